//! Slice sequences as scripts of primitive moves, their evaluation into
//! linear maps between state modules, and relation checks between scripts.
//!
//! Between a `split` and the matching `glue` the evaluation state holds two
//! fragments. Their joint state is kept correlated (a sum of fragment
//! pairs), so evaluation stays linear even on starts that mix terms; moves
//! in that window carry an `upper@`/`lower@` qualifier choosing the
//! fragment they act on.

use crate::ambialgebra::{trace_unit_solve, unit_e, AlgebraElement, AmbiError};
use crate::category::{FusionCategory, ObjectId};
use crate::roottree::{
    apply_coform, apply_form, assoc, attach_trace_unit, enumerate_admissible, insert_unit_leaf,
    normalize, print_tree, remove_unit_leaf, AssocDir, LabeledTree, NodePath, RootTree, Shape,
    StateVector, Step, TreeError, TreePattern, UnitSide,
};
use std::collections::BTreeMap;
use std::fmt;

/// Fragment selector for moves between `split` and `glue`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Upper,
    Lower,
}

impl fmt::Display for Half {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Half::Upper => write!(f, "upper"),
            Half::Lower => write!(f, "lower"),
        }
    }
}

/// The element a trace-unit move attaches: the solved trace unit `c`, the
/// algebra unit `e`, or a literal like `I + 4A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElementRef {
    TraceUnit,
    Unit,
    Literal(String),
}

impl ElementRef {
    pub fn resolve(&self, cat: &FusionCategory) -> Result<AlgebraElement, AmbiError> {
        match self {
            ElementRef::TraceUnit => trace_unit_solve(cat),
            ElementRef::Unit => unit_e(cat),
            ElementRef::Literal(s) => AlgebraElement::parse(cat, s),
        }
    }
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementRef::TraceUnit => write!(f, "c"),
            ElementRef::Unit => write!(f, "e"),
            ElementRef::Literal(s) => write!(f, "{s}"),
        }
    }
}

/// One primitive rewriting move with its address data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Move {
    Assoc { half: Option<Half>, dir: AssocDir, path: NodePath },
    InsertUnit { half: Option<Half>, path: NodePath, side: UnitSide },
    RemoveUnit { half: Option<Half>, path: NodePath },
    TraceUnit { half: Option<Half>, path: NodePath, element: ElementRef },
    Split { path: NodePath },
    Glue { host: Half, at: NodePath },
    Form { half: Option<Half>, path: NodePath },
    Coform { half: Option<Half>, path: NodePath, object: String },
    Normalize,
}

fn addr(half: &Option<Half>, path: &NodePath) -> String {
    match half {
        Some(h) => format!("{h}@{path}"),
        None => format!("@{path}"),
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Assoc { half, dir, path } => {
                let d = if *dir == AssocDir::Left { "L" } else { "R" };
                write!(f, "assoc {d} {}", addr(half, path))
            }
            Move::InsertUnit { half, path, side } => {
                let s = if *side == UnitSide::L { "L" } else { "R" };
                write!(f, "unit+ {} {s}", addr(half, path))
            }
            Move::RemoveUnit { half, path } => write!(f, "unit- {}", addr(half, path)),
            Move::TraceUnit { half, path, element } => {
                write!(f, "trace {} with {element}", addr(half, path))
            }
            Move::Split { path } => write!(f, "split @{path}"),
            Move::Glue { host, at } => write!(f, "glue {host}@{at}"),
            Move::Form { half, path } => write!(f, "form {}", addr(half, path)),
            Move::Coform { half, path, object } => {
                write!(f, "coform {} {object}", addr(half, path))
            }
            Move::Normalize => write!(f, "norm"),
        }
    }
}

/// An ordered list of moves over a declared input shape. The input pattern
/// may pin some labels; those only narrow the default start domain of
/// [`check_relation`], evaluation checks the shape alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveScript {
    pub input: TreePattern,
    pub moves: Vec<Move>,
}

impl MoveScript {
    pub fn new(input: TreePattern, moves: Vec<Move>) -> Self {
        MoveScript { input, moves }
    }

    pub fn input_shape(&self) -> &Shape {
        &self.input.shape
    }

    /// Concatenation: run `self`, then `next` on the result.
    pub fn then(&self, next: &MoveScript) -> MoveScript {
        let mut moves = self.moves.clone();
        moves.extend(next.moves.iter().cloned());
        MoveScript { input: self.input.clone(), moves }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScriptError {
    #[error("script parse error at line {0}: {1}")]
    Parse(usize, String),
    #[error("move {index} ({mv}): {msg}")]
    ShapeCheck { index: usize, mv: String, msg: String },
    #[error("bad shape descriptor: {0}")]
    Descriptor(String),
    #[error("scripts do not share an input shape")]
    InputMismatch,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Evaluation failure, tagged with the move that aborted.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("start state does not match the script input shape")]
    StartShape,
    #[error("move {index} ({mv}): {source}")]
    Tree { index: usize, mv: String, source: TreeError },
    #[error("move {index} ({mv}): {source}")]
    Element { index: usize, mv: String, source: AmbiError },
    #[error("move {index} ({mv}): {msg}")]
    State { index: usize, mv: String, msg: String },
    #[error("script left an unglued split open")]
    OpenSplit,
}

/// Correlated two-fragment state between split and glue: a formal sum of
/// (upper tree, lower tree) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
struct PairState {
    upper_shape: Shape,
    lower_shape: Shape,
    terms: BTreeMap<(Vec<ObjectId>, Vec<ObjectId>), u64>,
}

impl PairState {
    fn add(&mut self, cat: &FusionCategory, key: (Vec<ObjectId>, Vec<ObjectId>), coeff: u64) {
        if coeff % cat.field().prime() == 0 {
            return;
        }
        let e = self.terms.entry(key).or_insert(0);
        *e = cat.field().add(*e, coeff);
        if *e == 0 {
            let dead: Vec<_> = self
                .terms
                .iter()
                .filter(|(_, &v)| v == 0)
                .map(|(k, _)| k.clone())
                .collect();
            for k in dead {
                self.terms.remove(&k);
            }
        }
    }

    fn render(&self, cat: &FusionCategory) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|((u, l), &k)| {
                let ut = LabeledTree::build(&self.upper_shape, u);
                let lt = LabeledTree::build(&self.lower_shape, l);
                format!("{} * {} (x) {}", k, print_tree(cat, &ut), print_tree(cat, &lt))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Applies a state-vector transformation to one fragment of every pair,
    /// keeping the correlation.
    fn apply_half<F>(&self, cat: &FusionCategory, half: Half, op: F) -> Result<PairState, TreeError>
    where
        F: Fn(&StateVector) -> Result<StateVector, TreeError>,
    {
        let old_shape = match half {
            Half::Upper => &self.upper_shape,
            Half::Lower => &self.lower_shape,
        };
        // the probe fixes the output shape even when no term survives
        let new_shape = op(&StateVector::zero(old_shape.clone()))?.shape().clone();
        let mut out = PairState {
            upper_shape: if half == Half::Upper { new_shape.clone() } else { self.upper_shape.clone() },
            lower_shape: if half == Half::Lower { new_shape } else { self.lower_shape.clone() },
            terms: BTreeMap::new(),
        };
        let mut memo: BTreeMap<Vec<ObjectId>, StateVector> = BTreeMap::new();
        for ((u, l), &k) in &self.terms {
            let key = match half {
                Half::Upper => u,
                Half::Lower => l,
            };
            if !memo.contains_key(key) {
                let mut single = StateVector::zero(old_shape.clone());
                single.add(cat, key.clone(), 1);
                memo.insert(key.clone(), op(&single)?);
            }
            for (labels, c) in memo[key].iter() {
                let coeff = cat.field().mul(k, c);
                let pair_key = match half {
                    Half::Upper => (labels.clone(), l.clone()),
                    Half::Lower => (u.clone(), labels.clone()),
                };
                out.add(cat, pair_key, coeff);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
enum EvalValue {
    Single(StateVector),
    Pair(PairState),
}

impl EvalValue {
    fn render(&self, cat: &FusionCategory) -> String {
        match self {
            EvalValue::Single(sv) => sv.render(cat),
            EvalValue::Pair(p) => p.render(cat),
        }
    }
}

fn single_op<'a>(
    cat: &'a FusionCategory,
    mv: &'a Move,
) -> Option<Box<dyn Fn(&StateVector) -> Result<StateVector, TreeError> + 'a>> {
    match mv {
        Move::Assoc { dir, path, .. } => {
            let (dir, path) = (*dir, path.clone());
            Some(Box::new(move |sv| assoc(cat, sv, &path, dir)))
        }
        Move::InsertUnit { path, side, .. } => {
            let (path, side) = (path.clone(), *side);
            Some(Box::new(move |sv| insert_unit_leaf(cat, sv, &path, side)))
        }
        Move::RemoveUnit { path, .. } => {
            let path = path.clone();
            Some(Box::new(move |sv| remove_unit_leaf(cat, sv, &path)))
        }
        Move::Form { path, .. } => {
            let path = path.clone();
            Some(Box::new(move |sv| apply_form(cat, sv, &path)))
        }
        Move::Normalize => Some(Box::new(move |sv| Ok(normalize(sv)))),
        _ => None,
    }
}

fn move_half(mv: &Move) -> Option<Half> {
    match mv {
        Move::Assoc { half, .. }
        | Move::InsertUnit { half, .. }
        | Move::RemoveUnit { half, .. }
        | Move::TraceUnit { half, .. }
        | Move::Form { half, .. }
        | Move::Coform { half, .. } => *half,
        _ => None,
    }
}

/// Left-to-right composition of the primitive moves on a start vector.
/// Any primitive's failure aborts with the move index.
pub fn evaluate(
    cat: &FusionCategory,
    script: &MoveScript,
    start: &StateVector,
) -> Result<StateVector, EvalError> {
    evaluate_impl(cat, script, start, &mut |_, _, _| {})
}

/// Like [`evaluate`], additionally collecting a rendered snapshot of the
/// state after every move.
pub fn evaluate_trace(
    cat: &FusionCategory,
    script: &MoveScript,
    start: &StateVector,
) -> Result<(StateVector, Vec<String>), EvalError> {
    let mut lines = Vec::new();
    let out = evaluate_impl(cat, script, start, &mut |i, mv, state| {
        lines.push(format!("after {:>2} [{}]: {}", i, mv, state.render(cat)));
    })?;
    Ok((out, lines))
}

fn evaluate_impl(
    cat: &FusionCategory,
    script: &MoveScript,
    start: &StateVector,
    observe: &mut dyn FnMut(usize, &Move, &EvalValue),
) -> Result<StateVector, EvalError> {
    if start.shape() != script.input_shape() {
        return Err(EvalError::StartShape);
    }
    let mut state = EvalValue::Single(start.clone());
    for (index, mv) in script.moves.iter().enumerate() {
        let tree_err = |e: TreeError| EvalError::Tree { index, mv: mv.to_string(), source: e };
        let state_err =
            |msg: &str| EvalError::State { index, mv: mv.to_string(), msg: msg.to_string() };
        state = match mv {
            Move::Split { path } => match state {
                EvalValue::Single(sv) => {
                    let sub_shape = match sv.shape().at(path) {
                        None => return Err(tree_err(TreeError::BadPath(path.clone()))),
                        Some(Shape::Leaf) => {
                            return Err(tree_err(TreeError::LeafSplit(path.clone())))
                        }
                        Some(s) => s.clone(),
                    };
                    if path.is_root() {
                        return Err(tree_err(TreeError::RootSplit));
                    }
                    let lower_shape = sv.shape().replace(path, Shape::Leaf).unwrap();
                    let unit = cat.unit();
                    let mut pair = PairState {
                        upper_shape: sub_shape,
                        lower_shape,
                        terms: BTreeMap::new(),
                    };
                    for (labels, c) in sv.iter() {
                        let tree = LabeledTree::build(sv.shape(), labels);
                        let sub = tree.at(path).unwrap();
                        if sub.label() != unit {
                            continue;
                        }
                        let rest = tree.replace(path, LabeledTree::Leaf(unit)).unwrap();
                        pair.add(cat, (sub.labels(), rest.labels()), c);
                    }
                    EvalValue::Pair(pair)
                }
                EvalValue::Pair(_) => return Err(state_err("split while a split is already open")),
            },
            Move::Glue { host, at } => match state {
                EvalValue::Pair(pair) => {
                    let (host_shape, guest_shape) = match host {
                        Half::Upper => (&pair.upper_shape, &pair.lower_shape),
                        Half::Lower => (&pair.lower_shape, &pair.upper_shape),
                    };
                    match host_shape.at(at) {
                        None => return Err(tree_err(TreeError::BadPath(at.clone()))),
                        Some(Shape::Fork(..)) => {
                            return Err(tree_err(TreeError::NotALeaf(at.clone())))
                        }
                        Some(Shape::Leaf) => {}
                    }
                    let new_shape = host_shape.replace(at, guest_shape.clone()).unwrap();
                    let unit = cat.unit();
                    let mut out = StateVector::zero(new_shape);
                    for ((u, l), &k) in &pair.terms {
                        let u_tree = LabeledTree::build(&pair.upper_shape, u);
                        let l_tree = LabeledTree::build(&pair.lower_shape, l);
                        let (h_tree, g_tree) = match host {
                            Half::Upper => (&u_tree, &l_tree),
                            Half::Lower => (&l_tree, &u_tree),
                        };
                        if h_tree.at(at).unwrap().label() != unit || g_tree.label() != unit {
                            return Err(tree_err(TreeError::GlueMismatch(at.clone())));
                        }
                        let t = h_tree.replace(at, g_tree.clone()).unwrap();
                        if t.admissible(cat).is_ok() {
                            out.add(cat, t.labels(), k);
                        }
                    }
                    EvalValue::Single(out)
                }
                EvalValue::Single(_) => return Err(state_err("glue without an open split")),
            },
            Move::TraceUnit { path, element, .. } => {
                let elem = element.resolve(cat).map_err(|e| EvalError::Element {
                    index,
                    mv: mv.to_string(),
                    source: e,
                })?;
                let pairs = elem.pairs();
                let path = path.clone();
                let op = move |sv: &StateVector| attach_trace_unit(cat, sv, &path, &pairs);
                apply_state(cat, state, move_half(mv), &op, index, mv)?
            }
            Move::Coform { path, object, .. } => {
                let obj = cat.lookup(object).map_err(|e| EvalError::Tree {
                    index,
                    mv: mv.to_string(),
                    source: e.into(),
                })?;
                let path = path.clone();
                let op = move |sv: &StateVector| apply_coform(cat, sv, &path, obj);
                apply_state(cat, state, move_half(mv), &op, index, mv)?
            }
            _ => {
                let op = single_op(cat, mv)
                    .unwrap_or_else(|| unreachable!("all remaining moves are single ops"));
                apply_state(cat, state, move_half(mv), &*op, index, mv)?
            }
        };
        observe(index, mv, &state);
    }
    match state {
        EvalValue::Single(sv) => Ok(sv),
        EvalValue::Pair(_) => Err(EvalError::OpenSplit),
    }
}

fn apply_state(
    cat: &FusionCategory,
    state: EvalValue,
    half: Option<Half>,
    op: &dyn Fn(&StateVector) -> Result<StateVector, TreeError>,
    index: usize,
    mv: &Move,
) -> Result<EvalValue, EvalError> {
    let tree_err = |e: TreeError| EvalError::Tree { index, mv: mv.to_string(), source: e };
    match (state, half) {
        (EvalValue::Single(sv), None) => Ok(EvalValue::Single(op(&sv).map_err(tree_err)?)),
        (EvalValue::Single(_), Some(_)) => Err(EvalError::State {
            index,
            mv: mv.to_string(),
            msg: "fragment qualifier outside a split".into(),
        }),
        (EvalValue::Pair(p), Some(h)) => {
            Ok(EvalValue::Pair(p.apply_half(cat, h, op).map_err(tree_err)?))
        }
        (EvalValue::Pair(_), None) => Err(EvalError::State {
            index,
            mv: mv.to_string(),
            msg: "move inside a split needs an upper@/lower@ qualifier".into(),
        }),
    }
}

// ---------------------------------------------------------------------------
// Static shape checking
// ---------------------------------------------------------------------------

/// Shape of the evaluation state between moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeState {
    Single(Shape),
    Pair { upper: Shape, lower: Shape },
}

/// Simulates the script on shapes alone, proving every move's structural
/// precondition satisfiable. Returns the state shape after every move.
pub fn check_shapes(script: &MoveScript) -> Result<Vec<ShapeState>, ScriptError> {
    let mut state = ShapeState::Single(script.input_shape().clone());
    let mut out = Vec::new();
    for (index, mv) in script.moves.iter().enumerate() {
        let err = |msg: String| ScriptError::ShapeCheck { index, mv: mv.to_string(), msg };
        let pick = |state: &ShapeState, half: &Option<Half>| -> Result<Shape, ScriptError> {
            match (state, half) {
                (ShapeState::Single(s), None) => Ok(s.clone()),
                (ShapeState::Pair { upper, .. }, Some(Half::Upper)) => Ok(upper.clone()),
                (ShapeState::Pair { lower, .. }, Some(Half::Lower)) => Ok(lower.clone()),
                (ShapeState::Single(_), Some(_)) => {
                    Err(err("fragment qualifier outside a split".into()))
                }
                (ShapeState::Pair { .. }, None) => {
                    Err(err("move inside a split needs a qualifier".into()))
                }
            }
        };
        let put = |state: &ShapeState, half: &Option<Half>, shape: Shape| -> ShapeState {
            match (state, half) {
                (ShapeState::Single(_), None) => ShapeState::Single(shape),
                (ShapeState::Pair { lower, .. }, Some(Half::Upper)) => {
                    ShapeState::Pair { upper: shape, lower: lower.clone() }
                }
                (ShapeState::Pair { upper, .. }, Some(Half::Lower)) => {
                    ShapeState::Pair { upper: upper.clone(), lower: shape }
                }
                _ => unreachable!("pick() already rejected this combination"),
            }
        };
        state = match mv {
            Move::Assoc { half, dir, path } => {
                let s = pick(&state, half)?;
                let local = s.at(path).ok_or_else(|| err(format!("no node at {path}")))?;
                let new_local = match (dir, local) {
                    (AssocDir::Left, Shape::Fork(x, yz)) => match &**yz {
                        Shape::Fork(y, z) => {
                            Shape::fork(Shape::fork((**x).clone(), (**y).clone()), (**z).clone())
                        }
                        Shape::Leaf => return Err(err(format!("{path} is not x(yz)-shaped"))),
                    },
                    (AssocDir::Right, Shape::Fork(xy, z)) => match &**xy {
                        Shape::Fork(x, y) => {
                            Shape::fork((**x).clone(), Shape::fork((**y).clone(), (**z).clone()))
                        }
                        Shape::Leaf => return Err(err(format!("{path} is not (xy)z-shaped"))),
                    },
                    _ => return Err(err(format!("{path} is a leaf"))),
                };
                put(&state, half, s.replace(path, new_local).unwrap())
            }
            Move::InsertUnit { half, path, side } => {
                let s = pick(&state, half)?;
                let local = s.at(path).ok_or_else(|| err(format!("no node at {path}")))?.clone();
                let new_local = match side {
                    UnitSide::L => Shape::fork(Shape::Leaf, local),
                    UnitSide::R => Shape::fork(local, Shape::Leaf),
                };
                put(&state, half, s.replace(path, new_local).unwrap())
            }
            Move::RemoveUnit { half, path } => {
                let s = pick(&state, half)?;
                if path.is_root() {
                    return Err(err("cannot remove the root".into()));
                }
                match s.at(path) {
                    Some(Shape::Leaf) => {}
                    Some(_) => return Err(err(format!("{path} is not a leaf"))),
                    None => return Err(err(format!("no node at {path}"))),
                }
                let parent = NodePath(path.0[..path.0.len() - 1].to_vec());
                let Some(Shape::Fork(l, r)) = s.at(&parent) else {
                    return Err(err(format!("no fork at {parent}")));
                };
                let sibling = match path.0.last().unwrap() {
                    Step::L => (**r).clone(),
                    Step::R => (**l).clone(),
                };
                put(&state, half, s.replace(&parent, sibling).unwrap())
            }
            Move::TraceUnit { half, path, .. } => {
                let s = pick(&state, half)?;
                match s.at(path) {
                    Some(Shape::Leaf) => {}
                    Some(_) => return Err(err(format!("{path} is not a leaf"))),
                    None => return Err(err(format!("no node at {path}"))),
                }
                let new_local = Shape::fork(Shape::Leaf, Shape::fork(Shape::Leaf, Shape::Leaf));
                put(&state, half, s.replace(path, new_local).unwrap())
            }
            Move::Coform { half, path, .. } => {
                let s = pick(&state, half)?;
                match s.at(path) {
                    Some(Shape::Leaf) => {}
                    Some(_) => return Err(err(format!("{path} is not a leaf"))),
                    None => return Err(err(format!("no node at {path}"))),
                }
                put(&state, half, s.replace(path, Shape::fork(Shape::Leaf, Shape::Leaf)).unwrap())
            }
            Move::Form { half, path } => {
                let s = pick(&state, half)?;
                match s.at(path) {
                    Some(Shape::Fork(l, r)) if **l == Shape::Leaf && **r == Shape::Leaf => {}
                    Some(_) => return Err(err(format!("{path} is not a two-leaf fork"))),
                    None => return Err(err(format!("no node at {path}"))),
                }
                put(&state, half, s.replace(path, Shape::Leaf).unwrap())
            }
            Move::Split { path } => match &state {
                ShapeState::Single(s) => {
                    if path.is_root() {
                        return Err(err("cannot split at the root".into()));
                    }
                    match s.at(path) {
                        Some(Shape::Fork(..)) => {}
                        Some(Shape::Leaf) => {
                            return Err(err(format!("split edge {path} sits above a leaf")))
                        }
                        None => return Err(err(format!("no node at {path}"))),
                    }
                    ShapeState::Pair {
                        upper: s.at(path).unwrap().clone(),
                        lower: s.replace(path, Shape::Leaf).unwrap(),
                    }
                }
                ShapeState::Pair { .. } => return Err(err("split while a split is open".into())),
            },
            Move::Glue { host, at } => match &state {
                ShapeState::Pair { upper, lower } => {
                    let (h, g) = match host {
                        Half::Upper => (upper, lower),
                        Half::Lower => (lower, upper),
                    };
                    match h.at(at) {
                        Some(Shape::Leaf) => {}
                        Some(_) => return Err(err(format!("glue slot {at} is not a leaf"))),
                        None => return Err(err(format!("no node at {at}"))),
                    }
                    ShapeState::Single(h.replace(at, g.clone()).unwrap())
                }
                ShapeState::Single(_) => return Err(err("glue without an open split".into())),
            },
            Move::Normalize => state.clone(),
        };
        out.push(state.clone());
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Built-in scripts
// ---------------------------------------------------------------------------

/// Descriptor of the vertex-pass family of start shapes: a right-nested
/// chain of `depth >= 1` forks on the left of the root, companion leaf on
/// the right. `depth = 2` is the worked four-leaf shape; the trace unit
/// attaches at the innermost right leaf and the companion is the branch
/// being passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainDescriptor {
    pub depth: usize,
}

impl ChainDescriptor {
    pub fn example() -> Self {
        ChainDescriptor { depth: 2 }
    }

    /// `( P_k ( ... ( P_1 R ):? ... ):? S ):1` with `depth = k` chain forks.
    pub fn shape(&self) -> Result<Shape, ScriptError> {
        if self.depth == 0 {
            return Err(ScriptError::Descriptor(
                "chain depth must be at least 1".into(),
            ));
        }
        let mut chain = Shape::fork(Shape::Leaf, Shape::Leaf);
        for _ in 1..self.depth {
            chain = Shape::fork(Shape::Leaf, chain);
        }
        Ok(Shape::fork(chain, Shape::Leaf))
    }

    fn pattern(&self) -> Result<TreePattern, ScriptError> {
        let shape = self.shape()?;
        let mut named = BTreeMap::new();
        named.insert(0, "1".to_string());
        Ok(TreePattern { shape, named })
    }

    fn attach_path(&self) -> NodePath {
        let mut steps = vec![Step::L];
        steps.extend(std::iter::repeat(Step::R).take(self.depth));
        NodePath(steps)
    }
}

fn repeat_r(n: usize) -> NodePath {
    NodePath(std::iter::repeat(Step::R).take(n).collect())
}

/// The new sequence: attach the trace-unit circle next to the innermost
/// leaf, ride its right boundary branch up the chain by associativity,
/// split at the unit edge below it, reattach the lower part behind the
/// other boundary branch, close the circle with one more associativity and
/// the form, and drop the unit leaf that arises.
pub fn new_sequence(descriptor: &ChainDescriptor) -> Result<MoveScript, ScriptError> {
    let k = descriptor.depth;
    let attach = descriptor.attach_path();
    let mut moves = vec![
        Move::TraceUnit { half: None, path: attach.clone(), element: ElementRef::TraceUnit },
        Move::Assoc { half: None, dir: AssocDir::Left, path: attach },
    ];
    for j in (0..k).rev() {
        let mut steps = vec![Step::L];
        steps.extend(std::iter::repeat(Step::R).take(j));
        moves.push(Move::Assoc { half: None, dir: AssocDir::Left, path: NodePath(steps) });
    }
    let r_leaf = repeat_r(k + 1);
    let slot = repeat_r(k + 2);
    moves.extend([
        Move::Split { path: NodePath(vec![Step::L, Step::L]) },
        Move::RemoveUnit { half: Some(Half::Lower), path: NodePath(vec![Step::L, Step::L]) },
        Move::InsertUnit { half: Some(Half::Upper), path: r_leaf.clone(), side: UnitSide::R },
        Move::Glue { host: Half::Upper, at: slot },
        Move::Normalize,
        Move::Assoc { half: None, dir: AssocDir::Left, path: r_leaf.clone() },
        Move::Form { half: None, path: r_leaf.child(Step::L) },
        Move::RemoveUnit { half: None, path: r_leaf.child(Step::L) },
    ]);
    Ok(MoveScript::new(descriptor.pattern()?, moves))
}

/// Passing a vertex: the companion branch slides into the chain through
/// `depth` associativity moves.
pub fn vertex_pass(descriptor: &ChainDescriptor) -> Result<MoveScript, ScriptError> {
    let moves = (0..descriptor.depth)
        .map(|j| Move::Assoc { half: None, dir: AssocDir::Right, path: repeat_r(j) })
        .collect();
    Ok(MoveScript::new(descriptor.pattern()?, moves))
}

/// Which leaf of the two-leaf start fork the bubble attaches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BubbleSide {
    Left,
    Right,
}

/// The relation that builds a bubble on the two-leaf fork: trace unit,
/// associativity, split at the unit edge, glue, normalize, associativity,
/// form, and removal of the arising unit leaf.
pub fn bubble_relation(side: BubbleSide) -> MoveScript {
    let shape = Shape::fork(Shape::Leaf, Shape::Leaf);
    let mut named = BTreeMap::new();
    named.insert(0, "1".to_string());
    let input = TreePattern { shape, named };
    let (attach, split, stub) = match side {
        BubbleSide::Right => ("R", "RL", "RL"),
        BubbleSide::Left => ("L", "LL", "LL"),
    };
    let p = |s: &str| NodePath::parse(s).unwrap();
    let moves = vec![
        Move::TraceUnit { half: None, path: p(attach), element: ElementRef::TraceUnit },
        Move::Assoc { half: None, dir: AssocDir::Left, path: p(attach) },
        Move::Split { path: p(split) },
        Move::RemoveUnit { half: Some(Half::Lower), path: p(stub) },
        Move::InsertUnit { half: Some(Half::Upper), path: p("R"), side: UnitSide::R },
        Move::Glue { host: Half::Upper, at: p("RR") },
        Move::Normalize,
        Move::Assoc { half: None, dir: AssocDir::Left, path: p("R") },
        Move::Form { half: None, path: p("RL") },
        Move::RemoveUnit { half: None, path: p("RL") },
    ];
    MoveScript::new(input, moves)
}

/// The do-nothing script on a shape.
pub fn empty_script(shape: Shape) -> MoveScript {
    let mut named = BTreeMap::new();
    named.insert(0, "1".to_string());
    MoveScript::new(TreePattern { shape, named }, Vec::new())
}

/// Scripts addressable by name from the CLI and script files.
pub fn builtin(name: &str) -> Option<MoveScript> {
    match name {
        "newseq" => new_sequence(&ChainDescriptor::example()).ok(),
        "vertexpass" => vertex_pass(&ChainDescriptor::example()).ok(),
        "bubble" => Some(bubble_relation(BubbleSide::Right)),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Relation checking
// ---------------------------------------------------------------------------

/// One row of a relation check: a start basis tree and both script outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationRow {
    pub start: RootTree,
    pub out_a: StateVector,
    pub out_b: StateVector,
}

impl RelationRow {
    pub fn matches(&self) -> bool {
        self.out_a == self.out_b
    }
}

/// Result of comparing two scripts over a start domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationReport {
    pub equal: bool,
    pub rows: Vec<RelationRow>,
    pub first_counterexample: Option<usize>,
}

impl RelationReport {
    pub fn render(&self, cat: &FusionCategory) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&format!(
                "{} {}\n  A: {}\n  B: {}\n",
                if row.matches() { "=" } else { "!" },
                print_tree(cat, row.start.tree()),
                row.out_a.render(cat),
                row.out_b.render(cat),
            ));
        }
        if self.equal {
            out.push_str(&format!("EQUAL over {} starts\n", self.rows.len()));
        } else {
            out.push_str("NOT EQUAL\n");
        }
        out
    }
}

/// Evaluates both scripts on every start basis tree and compares the
/// normalized outputs. The domain defaults to all admissible labelings of
/// the shared input shape that extend script A's pinned labels.
pub fn check_relation(
    cat: &FusionCategory,
    a: &MoveScript,
    b: &MoveScript,
    start_domain: Option<Vec<RootTree>>,
) -> Result<RelationReport, ScriptError> {
    if a.input_shape() != b.input_shape() {
        return Err(ScriptError::InputMismatch);
    }
    let domain = match start_domain {
        Some(d) => d,
        None => {
            let fixed = a
                .input
                .fixed_labels(cat)
                .map_err(|e| ScriptError::Descriptor(e.to_string()))?;
            enumerate_admissible(cat, a.input_shape(), &fixed)
        }
    };
    let mut rows = Vec::new();
    let mut first = None;
    for (i, start) in domain.into_iter().enumerate() {
        let sv = StateVector::from_tree(cat, &start);
        let out_a = evaluate(cat, a, &sv)?;
        let out_b = evaluate(cat, b, &sv)?;
        let row = RelationRow { start, out_a, out_b };
        if !row.matches() && first.is_none() {
            first = Some(i);
        }
        rows.push(row);
    }
    Ok(RelationReport { equal: first.is_none(), rows, first_counterexample: first })
}

// ---------------------------------------------------------------------------
// Script text format
// ---------------------------------------------------------------------------

/// Renders a script in the one-move-per-line file format.
pub fn print_script(script: &MoveScript) -> String {
    let mut out = String::new();
    out.push_str(&format!("start {}\n", render_pattern(&script.input)));
    for mv in &script.moves {
        out.push_str(&format!("{mv}\n"));
    }
    out
}

fn render_pattern(p: &TreePattern) -> String {
    fn go(shape: &Shape, named: &BTreeMap<usize, String>, idx: &mut usize) -> String {
        let here = *idx;
        *idx += 1;
        let label = named.get(&here).cloned().unwrap_or_else(|| "?".to_string());
        match shape {
            Shape::Leaf => label,
            Shape::Fork(l, r) => {
                let ls = go(l, named, idx);
                let rs = go(r, named, idx);
                format!("( {ls} {rs} ):{label}")
            }
        }
    }
    let mut idx = 0;
    go(&p.shape, &p.named, &mut idx)
}

/// Parses the script file format: a `start <tree-pattern>` line followed by
/// one move per line. `#` starts a comment.
pub fn parse_script(text: &str) -> Result<MoveScript, ScriptError> {
    let mut input: Option<TreePattern> = None;
    let mut moves = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| ScriptError::Parse(lineno + 1, msg);
        let mut words = line.split_whitespace();
        let head = words.next().unwrap();
        if head == "start" {
            if input.is_some() {
                return Err(err("duplicate start line".into()));
            }
            let rest = line["start".len()..].trim();
            let pattern =
                crate::roottree::parse_tree_pattern(rest).map_err(|e| err(e.to_string()))?;
            input = Some(pattern);
            continue;
        }
        if input.is_none() {
            return Err(err("the first line must declare `start <shape>`".into()));
        }
        let mv = match head {
            "assoc" => {
                let dir = match words.next() {
                    Some("L") => AssocDir::Left,
                    Some("R") => AssocDir::Right,
                    _ => return Err(err("assoc: expected L or R".into())),
                };
                let (half, path) = parse_addr(words.next(), &err)?;
                Move::Assoc { half, dir, path }
            }
            "unit+" => {
                let (half, path) = parse_addr(words.next(), &err)?;
                let side = match words.next() {
                    Some("L") => UnitSide::L,
                    Some("R") => UnitSide::R,
                    _ => return Err(err("unit+: expected side L or R".into())),
                };
                Move::InsertUnit { half, path, side }
            }
            "unit-" => {
                let (half, path) = parse_addr(words.next(), &err)?;
                Move::RemoveUnit { half, path }
            }
            "trace" => {
                let (half, path) = parse_addr(words.next(), &err)?;
                if words.next() != Some("with") {
                    return Err(err("trace: expected `with <element>`".into()));
                }
                let text = words.by_ref().collect::<Vec<&str>>().join(" ");
                if text.is_empty() {
                    return Err(err("trace: missing element".into()));
                }
                let element = match text.as_str() {
                    "c" => ElementRef::TraceUnit,
                    "e" => ElementRef::Unit,
                    other => ElementRef::Literal(other.to_string()),
                };
                Move::TraceUnit { half, path, element }
            }
            "split" => {
                let (half, path) = parse_addr(words.next(), &err)?;
                if half.is_some() {
                    return Err(err("split: takes no fragment qualifier".into()));
                }
                Move::Split { path }
            }
            "glue" => {
                let (half, at) = parse_addr(words.next(), &err)?;
                let host =
                    half.ok_or_else(|| err("glue: expected upper@<path> or lower@<path>".into()))?;
                Move::Glue { host, at }
            }
            "form" => {
                let (half, path) = parse_addr(words.next(), &err)?;
                Move::Form { half, path }
            }
            "coform" => {
                let (half, path) = parse_addr(words.next(), &err)?;
                let object = words
                    .next()
                    .ok_or_else(|| err("coform: missing object name".into()))?
                    .to_string();
                Move::Coform { half, path, object }
            }
            "norm" => Move::Normalize,
            other => return Err(err(format!("unknown move `{other}`"))),
        };
        if let Some(extra) = words.next() {
            return Err(err(format!("trailing input `{extra}`")));
        }
        moves.push(mv);
    }
    let input = input.ok_or_else(|| ScriptError::Parse(1, "missing start line".into()))?;
    let script = MoveScript::new(input, moves);
    check_shapes(&script)?;
    Ok(script)
}

fn parse_addr(
    word: Option<&str>,
    err: &dyn Fn(String) -> ScriptError,
) -> Result<(Option<Half>, NodePath), ScriptError> {
    let w = word.ok_or_else(|| err("missing address".into()))?;
    let (half, rest) = if let Some(r) = w.strip_prefix("upper@") {
        (Some(Half::Upper), r)
    } else if let Some(r) = w.strip_prefix("lower@") {
        (Some(Half::Lower), r)
    } else if let Some(r) = w.strip_prefix('@') {
        (None, r)
    } else {
        return Err(err(format!("bad address `{w}`")));
    };
    let path = NodePath::parse(rest).map_err(|e| err(e.to_string()))?;
    Ok((half, path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roottree::parse_tree;

    fn c5() -> FusionCategory {
        FusionCategory::builtin_c5()
    }

    fn sv(cat: &FusionCategory, s: &str) -> StateVector {
        StateVector::from_tree(cat, &parse_tree(cat, s).unwrap())
    }

    #[test]
    fn empty_script_is_identity() {
        let cat = c5();
        let start = sv(&cat, "( A A ):1");
        let script = empty_script(start.shape().clone());
        assert_eq!(evaluate(&cat, &script, &start).unwrap(), start);
    }

    #[test]
    fn start_shape_is_enforced() {
        let cat = c5();
        let start = sv(&cat, "( A A ):1");
        let script = empty_script(Shape::Leaf);
        assert!(matches!(evaluate(&cat, &script, &start), Err(EvalError::StartShape)));
    }

    #[test]
    fn example_one_new_sequence_coefficients() {
        let cat = c5();
        let script = new_sequence(&ChainDescriptor::example()).unwrap();
        let start = sv(&cat, "( ( A ( A A ):A ):A A ):1");
        let out = evaluate(&cat, &script, &start).unwrap();
        let end1 = parse_tree(&cat, "( A ( A ( A A ):1 ):A ):1").unwrap();
        let end2 = parse_tree(&cat, "( A ( A ( A A ):A ):A ):1").unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out.coeff_of(end1.tree()), 4);
        assert_eq!(out.coeff_of(end2.tree()), 3);
        // passing the vertex lands on the same trees with the same weights
        let pass = vertex_pass(&ChainDescriptor::example()).unwrap();
        let out_pass = evaluate(&cat, &pass, &start).unwrap();
        assert_eq!(out, out_pass);
    }

    #[test]
    fn example_three_single_end_tree() {
        let cat = c5();
        let script = new_sequence(&ChainDescriptor::example()).unwrap();
        let start = sv(&cat, "( ( A ( A A ):A ):1 1 ):1");
        let out = evaluate(&cat, &script, &start).unwrap();
        let end = parse_tree(&cat, "( A ( A ( A 1 ):A ):A ):1").unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.coeff_of(end.tree()), 1);
    }

    #[test]
    fn bubble_is_identity_on_both_forks() {
        let cat = c5();
        for side in [BubbleSide::Right, BubbleSide::Left] {
            let script = bubble_relation(side);
            for start_text in ["( A A ):1", "( 1 1 ):1"] {
                let start = sv(&cat, start_text);
                let out = evaluate(&cat, &script, &start).unwrap();
                assert_eq!(out, start, "bubble {side:?} on {start_text}");
            }
        }
    }

    #[test]
    fn check_relation_script_vs_itself() {
        let cat = c5();
        let script = vertex_pass(&ChainDescriptor::example()).unwrap();
        let report = check_relation(&cat, &script, &script, None).unwrap();
        assert!(report.equal);
        assert_eq!(report.rows.len(), 13);
        assert_eq!(report.first_counterexample, None);
    }

    #[test]
    fn relation_counterexample_is_located() {
        let cat = c5();
        let pass = vertex_pass(&ChainDescriptor::example()).unwrap();
        // vertex pass followed by an extra unit insertion differs from it
        let mut other = pass.clone();
        other.moves.push(Move::InsertUnit {
            half: None,
            path: NodePath::root(),
            side: UnitSide::R,
        });
        let report = check_relation(&cat, &pass, &other, None).unwrap();
        assert!(!report.equal);
        assert_eq!(report.first_counterexample, Some(0));
    }

    #[test]
    fn evaluate_is_functorial_under_concatenation() {
        let cat = c5();
        let d = ChainDescriptor::example();
        let pass = vertex_pass(&d).unwrap();
        // split the two assoc moves of the vertex pass into two scripts
        let first = MoveScript::new(pass.input.clone(), pass.moves[..1].to_vec());
        let second_input = crate::roottree::parse_tree_pattern("( ? ( ( ? ? ):? ? ):? ):1").unwrap();
        let second = MoveScript::new(second_input, pass.moves[1..].to_vec());
        let start = sv(&cat, "( ( A ( A A ):A ):A A ):1");
        let composed = evaluate(&cat, &pass, &start).unwrap();
        let staged = evaluate(&cat, &second, &evaluate(&cat, &first, &start).unwrap()).unwrap();
        assert_eq!(composed, staged);
    }

    #[test]
    fn evaluate_is_linear_across_split_and_glue() {
        let cat = c5();
        let script = new_sequence(&ChainDescriptor::example()).unwrap();
        let shape = script.input_shape().clone();
        let starts = enumerate_admissible(&cat, &shape, &BTreeMap::new());
        // a mixed start: 2 * first + 3 * second basis tree
        let mut mixed = StateVector::zero(shape);
        mixed.add(&cat, starts[0].labels(), 2);
        mixed.add(&cat, starts[1].labels(), 3);
        let whole = evaluate(&cat, &script, &mixed).unwrap();
        let part_a = evaluate(&cat, &script, &StateVector::from_tree(&cat, &starts[0])).unwrap();
        let part_b = evaluate(&cat, &script, &StateVector::from_tree(&cat, &starts[1])).unwrap();
        let summed = part_a.scale(&cat, 2).plus(&cat, &part_b.scale(&cat, 3)).unwrap();
        assert_eq!(whole, summed);
    }

    #[test]
    fn script_text_round_trip() {
        let d = ChainDescriptor::example();
        for script in [
            new_sequence(&d).unwrap(),
            vertex_pass(&d).unwrap(),
            bubble_relation(BubbleSide::Right),
        ] {
            let text = print_script(&script);
            let back = parse_script(&text).unwrap();
            assert_eq!(print_script(&back), text);
            assert_eq!(back.moves, script.moves);
        }
    }

    #[test]
    fn parse_rejects_malformed_scripts() {
        assert!(matches!(parse_script("assoc L @L\n"), Err(ScriptError::Parse(1, _))));
        assert!(matches!(
            parse_script("start ( ? ? ):1\nassoc X @L\n"),
            Err(ScriptError::Parse(2, _))
        ));
        // statically impossible move: assoc at a leaf
        assert!(matches!(
            parse_script("start ( ? ? ):1\nassoc L @L\n"),
            Err(ScriptError::ShapeCheck { .. })
        ));
        assert!(matches!(
            parse_script("start ( ? ? ):1\nglue upper@L\n"),
            Err(ScriptError::ShapeCheck { .. })
        ));
    }

    #[test]
    fn static_checker_follows_new_sequence() {
        let script = new_sequence(&ChainDescriptor::example()).unwrap();
        let states = check_shapes(&script).unwrap();
        assert_eq!(states.len(), script.moves.len());
        // the final state is a single caterpillar of four leaves
        match states.last().unwrap() {
            ShapeState::Single(s) => assert_eq!(s.leaf_count(), 4),
            ShapeState::Pair { .. } => panic!("script must close its split"),
        }
    }

    #[test]
    fn eval_errors_carry_the_move_index() {
        let cat = c5();
        // removing a non-unit leaf fails at move 0
        let script = MoveScript::new(
            crate::roottree::parse_tree_pattern("( ? ? ):1").unwrap(),
            vec![Move::RemoveUnit { half: None, path: NodePath::parse("L").unwrap() }],
        );
        let start = sv(&cat, "( A A ):1");
        match evaluate(&cat, &script, &start) {
            Err(EvalError::Tree { index: 0, .. }) => {}
            other => panic!("expected a tree error at move 0, got {other:?}"),
        }
    }
}
