//! Labeled roottrees, state vectors, and the primitive rewriting moves.
//!
//! A roottree is a rooted binary tree whose nodes (leaves and forks alike)
//! carry simple objects; the root always carries the unit, and at every fork
//! with label `v` and child labels `(l, r)` the fusion rule `n(l, r, v) = 1`
//! holds. A [`StateVector`] is a formal field-linear combination of
//! roottrees that share one shape; the moves below are the linear maps the
//! slice transitions induce between such spaces.

use crate::category::{CategoryError, FusionCategory, ObjectId};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// One step from a node down to a child.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Step {
    L,
    R,
}

/// Address of a node as the list of steps from the root. The empty path is
/// the root itself and prints as `.`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct NodePath(pub Vec<Step>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn parse(s: &str) -> Result<Self, TreeError> {
        if s == "." {
            return Ok(Self::root());
        }
        let mut steps = Vec::new();
        for ch in s.chars() {
            match ch {
                'L' => steps.push(Step::L),
                'R' => steps.push(Step::R),
                _ => return Err(TreeError::BadPathSyntax(s.to_string())),
            }
        }
        Ok(NodePath(steps))
    }

    pub fn child(&self, step: Step) -> Self {
        let mut steps = self.0.clone();
        steps.push(step);
        NodePath(steps)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, ".");
        }
        for s in &self.0 {
            write!(f, "{}", if *s == Step::L { 'L' } else { 'R' })?;
        }
        Ok(())
    }
}

/// Unlabeled rooted binary tree: the shape shared by all terms of a state
/// vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Shape {
    Leaf,
    Fork(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn fork(l: Shape, r: Shape) -> Shape {
        Shape::Fork(Box::new(l), Box::new(r))
    }

    pub fn at(&self, path: &NodePath) -> Option<&Shape> {
        let mut cur = self;
        for step in &path.0 {
            match (cur, step) {
                (Shape::Fork(l, _), Step::L) => cur = l,
                (Shape::Fork(_, r), Step::R) => cur = r,
                (Shape::Leaf, _) => return None,
            }
        }
        Some(cur)
    }

    pub fn replace(&self, path: &NodePath, sub: Shape) -> Option<Shape> {
        if path.0.is_empty() {
            return Some(sub);
        }
        let Shape::Fork(l, r) = self else { return None };
        let rest = NodePath(path.0[1..].to_vec());
        Some(match path.0[0] {
            Step::L => Shape::fork(l.replace(&rest, sub)?, (**r).clone()),
            Step::R => Shape::fork((**l).clone(), r.replace(&rest, sub)?),
        })
    }

    pub fn node_count(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Fork(l, r) => 1 + l.node_count() + r.node_count(),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Fork(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    /// Preorder index of the node at `path` (root = 0).
    pub fn preorder_index(&self, path: &NodePath) -> Option<usize> {
        let mut idx = 0;
        let mut cur = self;
        for step in &path.0 {
            match (cur, step) {
                (Shape::Fork(l, _), Step::L) => {
                    idx += 1;
                    cur = l;
                }
                (Shape::Fork(l, r), Step::R) => {
                    idx += 1 + l.node_count();
                    cur = r;
                }
                (Shape::Leaf, _) => return None,
            }
        }
        Some(idx)
    }

    /// All node paths in preorder.
    pub fn paths(&self) -> Vec<NodePath> {
        fn walk(shape: &Shape, prefix: &NodePath, out: &mut Vec<NodePath>) {
            out.push(prefix.clone());
            if let Shape::Fork(l, r) = shape {
                walk(l, &prefix.child(Step::L), out);
                walk(r, &prefix.child(Step::R), out);
            }
        }
        let mut out = Vec::new();
        walk(self, &NodePath::root(), &mut out);
        out
    }
}

/// A fully labeled tree; the working representation behind state-vector
/// terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum LabeledTree {
    Leaf(ObjectId),
    Fork(ObjectId, Box<LabeledTree>, Box<LabeledTree>),
}

impl LabeledTree {
    pub fn fork(label: ObjectId, l: LabeledTree, r: LabeledTree) -> LabeledTree {
        LabeledTree::Fork(label, Box::new(l), Box::new(r))
    }

    pub fn label(&self) -> ObjectId {
        match self {
            LabeledTree::Leaf(v) | LabeledTree::Fork(v, _, _) => *v,
        }
    }

    pub fn shape(&self) -> Shape {
        match self {
            LabeledTree::Leaf(_) => Shape::Leaf,
            LabeledTree::Fork(_, l, r) => Shape::fork(l.shape(), r.shape()),
        }
    }

    pub fn at(&self, path: &NodePath) -> Option<&LabeledTree> {
        let mut cur = self;
        for step in &path.0 {
            match (cur, step) {
                (LabeledTree::Fork(_, l, _), Step::L) => cur = l,
                (LabeledTree::Fork(_, _, r), Step::R) => cur = r,
                (LabeledTree::Leaf(_), _) => return None,
            }
        }
        Some(cur)
    }

    pub fn replace(&self, path: &NodePath, sub: LabeledTree) -> Option<LabeledTree> {
        if path.0.is_empty() {
            return Some(sub);
        }
        let LabeledTree::Fork(v, l, r) = self else { return None };
        let rest = NodePath(path.0[1..].to_vec());
        Some(match path.0[0] {
            Step::L => LabeledTree::fork(*v, l.replace(&rest, sub)?, (**r).clone()),
            Step::R => LabeledTree::fork(*v, (**l).clone(), r.replace(&rest, sub)?),
        })
    }

    fn flatten_into(&self, out: &mut Vec<ObjectId>) {
        match self {
            LabeledTree::Leaf(v) => out.push(*v),
            LabeledTree::Fork(v, l, r) => {
                out.push(*v);
                l.flatten_into(out);
                r.flatten_into(out);
            }
        }
    }

    /// Labels in preorder.
    pub fn labels(&self) -> Vec<ObjectId> {
        let mut out = Vec::new();
        self.flatten_into(&mut out);
        out
    }

    /// Rebuilds a tree from a shape and preorder labels.
    pub fn build(shape: &Shape, labels: &[ObjectId]) -> LabeledTree {
        fn go(shape: &Shape, labels: &[ObjectId], pos: &mut usize) -> LabeledTree {
            let v = labels[*pos];
            *pos += 1;
            match shape {
                Shape::Leaf => LabeledTree::Leaf(v),
                Shape::Fork(l, r) => {
                    let lt = go(l, labels, pos);
                    let rt = go(r, labels, pos);
                    LabeledTree::fork(v, lt, rt)
                }
            }
        }
        let mut pos = 0;
        go(shape, labels, &mut pos)
    }

    /// Checks local admissibility everywhere below (and including) this node.
    pub fn admissible(&self, cat: &FusionCategory) -> Result<(), NodePath> {
        fn go(t: &LabeledTree, cat: &FusionCategory, path: &NodePath) -> Result<(), NodePath> {
            if let LabeledTree::Fork(v, l, r) = t {
                if !cat.admissible(l.label(), r.label(), *v) {
                    return Err(path.clone());
                }
                go(l, cat, &path.child(Step::L))?;
                go(r, cat, &path.child(Step::R))?;
            }
            Ok(())
        }
        go(self, cat, &NodePath::root())
    }
}

/// A labeled rooted binary tree with unit root and admissible labels.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RootTree(LabeledTree);

impl RootTree {
    pub fn new(cat: &FusionCategory, tree: LabeledTree) -> Result<Self, TreeError> {
        if tree.label() != cat.unit() {
            return Err(TreeError::RootNotUnit);
        }
        tree.admissible(cat).map_err(TreeError::Inadmissible)?;
        Ok(RootTree(tree))
    }

    pub fn tree(&self) -> &LabeledTree {
        &self.0
    }

    pub fn into_tree(self) -> LabeledTree {
        self.0
    }

    pub fn shape(&self) -> Shape {
        self.0.shape()
    }

    pub fn labels(&self) -> Vec<ObjectId> {
        self.0.labels()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("bad path syntax `{0}`")]
    BadPathSyntax(String),
    #[error("path {0} does not address a node of this shape")]
    BadPath(NodePath),
    #[error("root label must be the unit object")]
    RootNotUnit,
    #[error("inadmissible labels at node {0}")]
    Inadmissible(NodePath),
    #[error("node {0} is not a fork with the required arrangement")]
    WrongLocalShape(NodePath),
    #[error("node {0} is not a leaf")]
    NotALeaf(NodePath),
    #[error("leaf {0} is not labeled with the unit in every term")]
    NotUnitLeaf(NodePath),
    #[error("cannot remove the root")]
    RootRemoval,
    #[error("cannot split at the root edge")]
    RootSplit,
    #[error("split edge {0} must sit below a fork")]
    LeafSplit(NodePath),
    #[error("state shapes do not match")]
    ShapeMismatch,
    #[error("glue slot {0} is not a unit leaf in every term")]
    GlueMismatch(NodePath),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Category(#[from] CategoryError),
}

/// Formal linear combination of same-shape roottrees. Terms are keyed by the
/// preorder label sequence, which fixes the deterministic order everywhere;
/// zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateVector {
    shape: Shape,
    terms: BTreeMap<Vec<ObjectId>, u64>,
}

impl StateVector {
    pub fn zero(shape: Shape) -> Self {
        StateVector { shape, terms: BTreeMap::new() }
    }

    pub fn from_tree(cat: &FusionCategory, tree: &RootTree) -> Self {
        let mut sv = StateVector::zero(tree.shape());
        sv.add(cat, tree.tree().labels(), 1);
        sv
    }

    /// Adds `coeff` times the term with the given preorder labels.
    pub fn add(&mut self, cat: &FusionCategory, labels: Vec<ObjectId>, coeff: u64) {
        let coeff = coeff % cat.field().prime();
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(labels).or_insert(0);
        *entry = cat.field().add(*entry, coeff);
        if *entry == 0 {
            // remove exact cancellations eagerly
            let key: Vec<ObjectId> = self
                .terms
                .iter()
                .find(|(_, &v)| v == 0)
                .map(|(k, _)| k.clone())
                .unwrap();
            self.terms.remove(&key);
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, labels: &[ObjectId]) -> u64 {
        self.terms.get(labels).copied().unwrap_or(0)
    }

    pub fn coeff_of(&self, tree: &LabeledTree) -> u64 {
        self.coeff(&tree.labels())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<ObjectId>, u64)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn trees(&self) -> impl Iterator<Item = (LabeledTree, u64)> + '_ {
        self.terms
            .iter()
            .map(|(labels, &c)| (LabeledTree::build(&self.shape, labels), c))
    }

    /// Renders the vector in the tree grammar, deterministically ordered.
    pub fn render(&self, cat: &FusionCategory) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.trees()
            .map(|(t, c)| format!("{} * {}", c, print_tree(cat, &t)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn scale(&self, cat: &FusionCategory, k: u64) -> StateVector {
        let mut out = StateVector::zero(self.shape.clone());
        for (labels, c) in self.iter() {
            out.add(cat, labels.clone(), cat.field().mul(c, k));
        }
        out
    }

    pub fn plus(&self, cat: &FusionCategory, other: &StateVector) -> Result<StateVector, TreeError> {
        if self.shape != other.shape {
            return Err(TreeError::ShapeMismatch);
        }
        let mut out = self.clone();
        for (labels, c) in other.iter() {
            out.add(cat, labels.clone(), c);
        }
        Ok(out)
    }
}

/// Re-canonicalizes a state vector. Construction already combines like terms
/// and drops zeros, so this is the identity; it exists as the explicit
/// normalization point of the calculus and for the `norm` script move.
pub fn normalize(sv: &StateVector) -> StateVector {
    sv.clone()
}

fn map_terms<F>(cat: &FusionCategory, sv: &StateVector, new_shape: Shape, f: F) -> StateVector
where
    F: Fn(&LabeledTree, u64) -> Vec<(LabeledTree, u64)>,
{
    let mut out = StateVector::zero(new_shape);
    for (labels, c) in sv.iter() {
        let tree = LabeledTree::build(sv.shape(), labels);
        for (t, k) in f(&tree, c) {
            debug_assert!(t.admissible(cat).is_ok());
            out.add(cat, t.labels(), k);
        }
    }
    out
}

/// All admissible labelings of `shape` that extend `fixed` (preorder index
/// to object), in deterministic (preorder-lexicographic) order. Contradictory
/// fixed labels yield an empty list.
pub fn enumerate_admissible(
    cat: &FusionCategory,
    shape: &Shape,
    fixed: &BTreeMap<usize, ObjectId>,
) -> Vec<RootTree> {
    /// Labelings of `shape` rooted at preorder index `idx` with root label
    /// `label`, as complete preorder label sequences for the subtree.
    fn collect(
        cat: &FusionCategory,
        shape: &Shape,
        fixed: &BTreeMap<usize, ObjectId>,
        idx: usize,
        label: ObjectId,
    ) -> Vec<Vec<ObjectId>> {
        if fixed.get(&idx).is_some_and(|&want| want != label) {
            return Vec::new();
        }
        match shape {
            Shape::Leaf => vec![vec![label]],
            Shape::Fork(l, r) => {
                let l_idx = idx + 1;
                let r_idx = idx + 1 + l.node_count();
                let mut out = Vec::new();
                for bl in cat.object_ids() {
                    for br in cat.object_ids() {
                        if !cat.admissible(bl, br, label) {
                            continue;
                        }
                        let lefts = collect(cat, l, fixed, l_idx, bl);
                        if lefts.is_empty() {
                            continue;
                        }
                        let rights = collect(cat, r, fixed, r_idx, br);
                        for lv in &lefts {
                            for rv in &rights {
                                let mut labels = vec![label];
                                labels.extend_from_slice(lv);
                                labels.extend_from_slice(rv);
                                out.push(labels);
                            }
                        }
                    }
                }
                out
            }
        }
    }

    let set: BTreeSet<Vec<ObjectId>> =
        collect(cat, shape, fixed, 0, cat.unit()).into_iter().collect();
    set.into_iter()
        .map(|labels| RootTree(LabeledTree::build(shape, &labels)))
        .collect()
}

/// Rebracketing direction. `Left` turns `x ⊗ (y ⊗ z)` into `(x ⊗ y) ⊗ z`
/// through the forward block; `Right` goes the other way through the inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssocDir {
    Left,
    Right,
}

/// The associativity move at `path`: each term is expanded through the
/// matching F-block and like terms are combined.
pub fn assoc(
    cat: &FusionCategory,
    sv: &StateVector,
    path: &NodePath,
    dir: AssocDir,
) -> Result<StateVector, TreeError> {
    let local = sv.shape().at(path).ok_or(TreeError::BadPath(path.clone()))?;
    let new_local = match (dir, local) {
        (AssocDir::Left, Shape::Fork(x, rest)) => match &**rest {
            Shape::Fork(y, z) => {
                Shape::fork(Shape::fork((**x).clone(), (**y).clone()), (**z).clone())
            }
            Shape::Leaf => return Err(TreeError::WrongLocalShape(path.clone())),
        },
        (AssocDir::Right, Shape::Fork(rest, z)) => match &**rest {
            Shape::Fork(x, y) => {
                Shape::fork((**x).clone(), Shape::fork((**y).clone(), (**z).clone()))
            }
            Shape::Leaf => return Err(TreeError::WrongLocalShape(path.clone())),
        },
        _ => return Err(TreeError::WrongLocalShape(path.clone())),
    };
    let new_shape = sv
        .shape()
        .replace(path, new_local)
        .ok_or(TreeError::BadPath(path.clone()))?;

    let mut out = StateVector::zero(new_shape);
    for (labels, c) in sv.iter() {
        let tree = LabeledTree::build(sv.shape(), labels);
        let node = tree.at(path).expect("path checked against shape");
        match (dir, node) {
            (AssocDir::Left, LabeledTree::Fork(n, x, inner)) => {
                let LabeledTree::Fork(q, y, z) = &**inner else { unreachable!() };
                let blk = cat.f_block(x.label(), y.label(), z.label(), *n)?;
                let col = blk
                    .col_index(*q)
                    .ok_or_else(|| TreeError::Inadmissible(path.clone()))?;
                for (ri, &e) in blk.rows.iter().enumerate() {
                    let coeff = blk.mat[ri][col];
                    if coeff == 0 {
                        continue;
                    }
                    let new_node = LabeledTree::fork(
                        *n,
                        LabeledTree::fork(e, (**x).clone(), (**y).clone()),
                        (**z).clone(),
                    );
                    let t = tree.replace(path, new_node).unwrap();
                    out.add(cat, t.labels(), cat.field().mul(c, coeff));
                }
            }
            (AssocDir::Right, LabeledTree::Fork(n, inner, z)) => {
                let LabeledTree::Fork(e, x, y) = &**inner else { unreachable!() };
                let blk = cat.f_block(x.label(), y.label(), z.label(), *n)?;
                let row = blk
                    .row_index(*e)
                    .ok_or_else(|| TreeError::Inadmissible(path.clone()))?;
                for (ci, &f) in blk.cols.iter().enumerate() {
                    let coeff = blk.inv[ci][row];
                    if coeff == 0 {
                        continue;
                    }
                    let new_node = LabeledTree::fork(
                        *n,
                        (**x).clone(),
                        LabeledTree::fork(f, (**y).clone(), (**z).clone()),
                    );
                    let t = tree.replace(path, new_node).unwrap();
                    out.add(cat, t.labels(), cat.field().mul(c, coeff));
                }
            }
            _ => unreachable!(),
        }
    }
    Ok(out)
}

/// Which side the fresh unit leaf lands on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitSide {
    L,
    R,
}

/// Grows a fork at `path`: the subtree `T` with label `v` becomes `T ⊗ 1`
/// (side R) or `1 ⊗ T` (side L), the new fork keeping label `v`.
/// Coefficients are unchanged.
pub fn insert_unit_leaf(
    cat: &FusionCategory,
    sv: &StateVector,
    path: &NodePath,
    side: UnitSide,
) -> Result<StateVector, TreeError> {
    let local = sv.shape().at(path).ok_or(TreeError::BadPath(path.clone()))?.clone();
    let new_local = match side {
        UnitSide::L => Shape::fork(Shape::Leaf, local),
        UnitSide::R => Shape::fork(local, Shape::Leaf),
    };
    let new_shape = sv
        .shape()
        .replace(path, new_local)
        .ok_or(TreeError::BadPath(path.clone()))?;
    let unit = cat.unit();
    Ok(map_terms(cat, sv, new_shape, |tree, c| {
        let sub = tree.at(path).unwrap().clone();
        let v = sub.label();
        let new_node = match side {
            UnitSide::L => LabeledTree::fork(v, LabeledTree::Leaf(unit), sub),
            UnitSide::R => LabeledTree::fork(v, sub, LabeledTree::Leaf(unit)),
        };
        vec![(tree.replace(path, new_node).unwrap(), c)]
    }))
}

/// Removes a unit-labeled leaf, collapsing its parent fork onto the sibling.
/// The leaf must be labeled 1 in every term and must not be the root.
pub fn remove_unit_leaf(
    cat: &FusionCategory,
    sv: &StateVector,
    path: &NodePath,
) -> Result<StateVector, TreeError> {
    if path.is_root() {
        return Err(TreeError::RootRemoval);
    }
    match sv.shape().at(path) {
        None => return Err(TreeError::BadPath(path.clone())),
        Some(Shape::Fork(..)) => return Err(TreeError::NotALeaf(path.clone())),
        Some(Shape::Leaf) => {}
    }
    let parent = NodePath(path.0[..path.0.len() - 1].to_vec());
    let last = *path.0.last().unwrap();
    let unit = cat.unit();
    for (labels, _) in sv.iter() {
        let tree = LabeledTree::build(sv.shape(), labels);
        if tree.at(path).unwrap().label() != unit {
            return Err(TreeError::NotUnitLeaf(path.clone()));
        }
    }
    let Some(Shape::Fork(pl, pr)) = sv.shape().at(&parent) else {
        return Err(TreeError::BadPath(parent));
    };
    let sibling_shape = match last {
        Step::L => (**pr).clone(),
        Step::R => (**pl).clone(),
    };
    let new_shape = sv
        .shape()
        .replace(&parent, sibling_shape)
        .ok_or(TreeError::BadPath(parent.clone()))?;
    Ok(map_terms(cat, sv, new_shape, |tree, c| {
        let LabeledTree::Fork(_, l, r) = tree.at(&parent).unwrap() else { unreachable!() };
        let sibling = match last {
            Step::L => (**r).clone(),
            Step::R => (**l).clone(),
        };
        vec![(tree.replace(&parent, sibling).unwrap(), c)]
    }))
}

/// Attaches the trace-unit circle at a leaf: the leaf with label `v` becomes
/// `( v ( a ā ):1 ):v`, summed over the element's objects `a` with its
/// coefficients. Inadmissible combinations are dropped silently.
pub fn attach_trace_unit(
    cat: &FusionCategory,
    sv: &StateVector,
    leaf_path: &NodePath,
    element: &[(ObjectId, u64)],
) -> Result<StateVector, TreeError> {
    match sv.shape().at(leaf_path) {
        None => return Err(TreeError::BadPath(leaf_path.clone())),
        Some(Shape::Fork(..)) => return Err(TreeError::NotALeaf(leaf_path.clone())),
        Some(Shape::Leaf) => {}
    }
    let new_local = Shape::fork(Shape::Leaf, Shape::fork(Shape::Leaf, Shape::Leaf));
    let new_shape = sv
        .shape()
        .replace(leaf_path, new_local)
        .ok_or(TreeError::BadPath(leaf_path.clone()))?;
    let unit = cat.unit();
    Ok(map_terms(cat, sv, new_shape, |tree, c| {
        let v = tree.at(leaf_path).unwrap().label();
        element
            .iter()
            .filter(|&&(a, k)| {
                k != 0 && cat.admissible(a, cat.dual(a), unit) && cat.admissible(v, unit, v)
            })
            .map(|&(a, k)| {
                let circle = LabeledTree::fork(
                    unit,
                    LabeledTree::Leaf(a),
                    LabeledTree::Leaf(cat.dual(a)),
                );
                let new_node = LabeledTree::fork(v, LabeledTree::Leaf(v), circle);
                (
                    tree.replace(leaf_path, new_node).unwrap(),
                    cat.field().mul(c, k),
                )
            })
            .collect()
    }))
}

/// The two fragments of a split, upper part first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitHalves {
    pub upper: StateVector,
    pub lower: StateVector,
}

/// Cuts the edge above the node at `edge_path`. Terms whose label there is
/// not the unit are discarded; each survivor is cut into the subtree
/// (re-rooted at the cut, root label 1) and the remaining tree with a unit
/// leaf at the cut site.
///
/// The returned pair is the factored projection of the split state: the
/// term coefficient rides on the upper fragment and each distinct lower
/// fragment appears with coefficient 1. Script evaluation keeps the exact
/// correlated two-fragment state instead (see `script::evaluate`).
pub fn split_at(
    cat: &FusionCategory,
    sv: &StateVector,
    edge_path: &NodePath,
) -> Result<SplitHalves, TreeError> {
    if edge_path.is_root() {
        return Err(TreeError::RootSplit);
    }
    let sub_shape = match sv.shape().at(edge_path) {
        None => return Err(TreeError::BadPath(edge_path.clone())),
        Some(Shape::Leaf) => return Err(TreeError::LeafSplit(edge_path.clone())),
        Some(s) => s.clone(),
    };
    let lower_shape = sv
        .shape()
        .replace(edge_path, Shape::Leaf)
        .ok_or(TreeError::BadPath(edge_path.clone()))?;
    let unit = cat.unit();
    let mut upper = StateVector::zero(sub_shape);
    let mut lower = StateVector::zero(lower_shape);
    for (labels, c) in sv.iter() {
        let tree = LabeledTree::build(sv.shape(), labels);
        let sub = tree.at(edge_path).unwrap();
        if sub.label() != unit {
            continue;
        }
        upper.add(cat, sub.labels(), c);
        let rest = tree.replace(edge_path, LabeledTree::Leaf(unit)).unwrap();
        let rest_labels = rest.labels();
        if lower.coeff(&rest_labels) == 0 {
            lower.add(cat, rest_labels, 1);
        }
    }
    Ok(SplitHalves { upper, lower })
}

/// Grafts every guest tree (a whole roottree, unit root) into the unit leaf
/// of the host at `at`, multiplying coefficients per term pair.
pub fn glue(
    cat: &FusionCategory,
    host: &StateVector,
    guest: &StateVector,
    at: &NodePath,
) -> Result<StateVector, TreeError> {
    match host.shape().at(at) {
        None => return Err(TreeError::BadPath(at.clone())),
        Some(Shape::Fork(..)) => return Err(TreeError::NotALeaf(at.clone())),
        Some(Shape::Leaf) => {}
    }
    let new_shape = host
        .shape()
        .replace(at, guest.shape().clone())
        .ok_or(TreeError::BadPath(at.clone()))?;
    let unit = cat.unit();
    for (labels, _) in host.iter() {
        let tree = LabeledTree::build(host.shape(), labels);
        if tree.at(at).unwrap().label() != unit {
            return Err(TreeError::GlueMismatch(at.clone()));
        }
    }
    let mut out = StateVector::zero(new_shape);
    for (h_labels, hc) in host.iter() {
        let h_tree = LabeledTree::build(host.shape(), h_labels);
        for (g_labels, gc) in guest.iter() {
            let g_tree = LabeledTree::build(guest.shape(), g_labels);
            if g_tree.label() != unit {
                return Err(TreeError::GlueMismatch(at.clone()));
            }
            let t = h_tree.replace(at, g_tree).unwrap();
            if t.admissible(cat).is_ok() {
                out.add(cat, t.labels(), cat.field().mul(hc, gc));
            }
        }
    }
    Ok(out)
}

/// Applies the form λ at a fork whose children are both leaves: terms whose
/// fork label is the unit are kept, multiplied by the form scalar of the
/// left leaf object, and the fork collapses to a unit leaf; all other terms
/// are dropped.
pub fn apply_form(
    cat: &FusionCategory,
    sv: &StateVector,
    fork_path: &NodePath,
) -> Result<StateVector, TreeError> {
    match sv.shape().at(fork_path) {
        Some(Shape::Fork(l, r)) if **l == Shape::Leaf && **r == Shape::Leaf => {}
        Some(_) => return Err(TreeError::WrongLocalShape(fork_path.clone())),
        None => return Err(TreeError::BadPath(fork_path.clone())),
    }
    let new_shape = sv
        .shape()
        .replace(fork_path, Shape::Leaf)
        .ok_or(TreeError::BadPath(fork_path.clone()))?;
    let unit = cat.unit();
    Ok(map_terms(cat, sv, new_shape, |tree, c| {
        let LabeledTree::Fork(v, l, r) = tree.at(fork_path).unwrap() else { unreachable!() };
        if *v != unit || r.label() != cat.dual(l.label()) {
            return Vec::new();
        }
        let scalar = cat.form_scalar(l.label());
        vec![(
            tree.replace(fork_path, LabeledTree::Leaf(unit)).unwrap(),
            cat.field().mul(c, scalar),
        )]
    }))
}

/// Applies the coform Λ at a unit leaf: the leaf becomes an `(a, ā)` fork
/// labeled 1 and the coefficient picks up the coform scalar of `a`.
pub fn apply_coform(
    cat: &FusionCategory,
    sv: &StateVector,
    leaf_path: &NodePath,
    object: ObjectId,
) -> Result<StateVector, TreeError> {
    match sv.shape().at(leaf_path) {
        None => return Err(TreeError::BadPath(leaf_path.clone())),
        Some(Shape::Fork(..)) => return Err(TreeError::NotALeaf(leaf_path.clone())),
        Some(Shape::Leaf) => {}
    }
    let unit = cat.unit();
    for (labels, _) in sv.iter() {
        let tree = LabeledTree::build(sv.shape(), labels);
        if tree.at(leaf_path).unwrap().label() != unit {
            return Err(TreeError::NotUnitLeaf(leaf_path.clone()));
        }
    }
    let new_local = Shape::fork(Shape::Leaf, Shape::Leaf);
    let new_shape = sv
        .shape()
        .replace(leaf_path, new_local)
        .ok_or(TreeError::BadPath(leaf_path.clone()))?;
    let scalar = cat.coform_scalar(object);
    Ok(map_terms(cat, sv, new_shape, |tree, c| {
        let fork = LabeledTree::fork(
            unit,
            LabeledTree::Leaf(object),
            LabeledTree::Leaf(cat.dual(object)),
        );
        vec![(
            tree.replace(leaf_path, fork).unwrap(),
            cat.field().mul(c, scalar),
        )]
    }))
}

// ---------------------------------------------------------------------------
// Tree grammar
// ---------------------------------------------------------------------------

/// A parsed tree expression before label resolution: shape plus concrete
/// label names by preorder index. `?` and `?name` labels stay free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreePattern {
    pub shape: Shape,
    pub named: BTreeMap<usize, String>,
}

impl TreePattern {
    /// Resolves the concrete names against a category.
    pub fn fixed_labels(
        &self,
        cat: &FusionCategory,
    ) -> Result<BTreeMap<usize, ObjectId>, TreeError> {
        let mut out = BTreeMap::new();
        for (&idx, name) in &self.named {
            out.insert(idx, cat.lookup(name)?);
        }
        Ok(out)
    }

    /// A pattern with no free labels resolves to a single roottree.
    pub fn to_tree(&self, cat: &FusionCategory) -> Result<RootTree, TreeError> {
        let total = self.shape.node_count();
        if self.named.len() != total {
            let missing = (0..total).find(|i| !self.named.contains_key(i)).unwrap();
            return Err(TreeError::Parse {
                line: 1,
                col: 1,
                msg: format!("free label at preorder node {missing}; a concrete tree is required"),
            });
        }
        let fixed = self.fixed_labels(cat)?;
        let labels: Vec<ObjectId> = (0..total).map(|i| fixed[&i]).collect();
        RootTree::new(cat, LabeledTree::build(&self.shape, &labels))
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open,
    Close,
    Colon,
    Name(String),
    Free(String),
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0, line: 1, col: 1 }
    }

    fn error(&self, msg: impl Into<String>) -> TreeError {
        TreeError::Parse { line: self.line, col: self.col, msg: msg.into() }
    }

    fn bump(&mut self, ch: char) {
        self.pos += ch.len_utf8();
        if ch == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
    }

    fn next_token(&mut self) -> Result<Option<(Token, usize, usize)>, TreeError> {
        while let Some(ch) = self.src[self.pos..].chars().next() {
            if ch.is_whitespace() {
                self.bump(ch);
            } else {
                break;
            }
        }
        let (line, col) = (self.line, self.col);
        let Some(ch) = self.src[self.pos..].chars().next() else {
            return Ok(None);
        };
        let tok = match ch {
            '(' => {
                self.bump(ch);
                Token::Open
            }
            ')' => {
                self.bump(ch);
                Token::Close
            }
            ':' => {
                self.bump(ch);
                Token::Colon
            }
            '?' => {
                self.bump(ch);
                let mut name = String::new();
                while let Some(c) = self.src[self.pos..].chars().next() {
                    if c.is_alphanumeric() || c == '_' {
                        name.push(c);
                        self.bump(c);
                    } else {
                        break;
                    }
                }
                Token::Free(name)
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut name = String::new();
                while let Some(c) = self.src[self.pos..].chars().next() {
                    if c.is_alphanumeric() || c == '_' {
                        name.push(c);
                        self.bump(c);
                    } else {
                        break;
                    }
                }
                Token::Name(name)
            }
            other => return Err(self.error(format!("unexpected character `{other}`"))),
        };
        Ok(Some((tok, line, col)))
    }
}

/// Parses a tree expression with possibly free labels:
/// `( A ( A A ):?x ):1` — leaf = name, fork = `( <tree> <tree> ):<label>`.
pub fn parse_tree_pattern(text: &str) -> Result<TreePattern, TreeError> {
    let mut lx = Lexer::new(text);
    let mut tokens = Vec::new();
    while let Some(t) = lx.next_token()? {
        tokens.push(t);
    }
    let mut pos = 0;
    let (shape, labels) = parse_node(&tokens, &mut pos, text)?;
    if pos != tokens.len() {
        let (_, line, col) = &tokens[pos];
        return Err(TreeError::Parse {
            line: *line,
            col: *col,
            msg: "trailing input after tree expression".into(),
        });
    }
    let mut named = BTreeMap::new();
    for (idx, lab) in labels.into_iter().enumerate() {
        if let Some(name) = lab {
            named.insert(idx, name);
        }
    }
    Ok(TreePattern { shape, named })
}

type PatNode = (Shape, Vec<Option<String>>);

fn parse_node(tokens: &[(Token, usize, usize)], pos: &mut usize, src: &str) -> Result<PatNode, TreeError> {
    let eof = || {
        let (line, col) = src
            .lines()
            .enumerate()
            .last()
            .map(|(i, l)| (i + 1, l.len() + 1))
            .unwrap_or((1, 1));
        TreeError::Parse { line, col, msg: "unexpected end of input".into() }
    };
    let Some((tok, line, col)) = tokens.get(*pos) else { return Err(eof()) };
    match tok {
        Token::Name(n) => {
            *pos += 1;
            Ok((Shape::Leaf, vec![Some(n.clone())]))
        }
        Token::Free(_) => {
            *pos += 1;
            Ok((Shape::Leaf, vec![None]))
        }
        Token::Open => {
            *pos += 1;
            let (ls, mut ll) = parse_node(tokens, pos, src)?;
            let (rs, rl) = parse_node(tokens, pos, src)?;
            match tokens.get(*pos) {
                Some((Token::Close, _, _)) => *pos += 1,
                Some((_, l, c)) => {
                    return Err(TreeError::Parse { line: *l, col: *c, msg: "expected `)`".into() })
                }
                None => return Err(eof()),
            }
            match tokens.get(*pos) {
                Some((Token::Colon, _, _)) => *pos += 1,
                Some((_, l, c)) => {
                    return Err(TreeError::Parse {
                        line: *l,
                        col: *c,
                        msg: "expected `:<label>` after fork".into(),
                    })
                }
                None => return Err(eof()),
            }
            let label = match tokens.get(*pos) {
                Some((Token::Name(n), _, _)) => {
                    *pos += 1;
                    Some(n.clone())
                }
                Some((Token::Free(_), _, _)) => {
                    *pos += 1;
                    None
                }
                Some((_, l, c)) => {
                    return Err(TreeError::Parse { line: *l, col: *c, msg: "expected label".into() })
                }
                None => return Err(eof()),
            };
            let mut labels = vec![label];
            labels.append(&mut ll);
            labels.extend(rl);
            Ok((Shape::fork(ls, rs), labels))
        }
        _ => Err(TreeError::Parse {
            line: *line,
            col: *col,
            msg: "expected leaf name or `(`".into(),
        }),
    }
}

/// Parses a concrete roottree: every label present, root the unit,
/// admissibility checked (the error names the offending node).
pub fn parse_tree(cat: &FusionCategory, text: &str) -> Result<RootTree, TreeError> {
    parse_tree_pattern(text)?.to_tree(cat)
}

/// Prints a labeled tree in the grammar, inverse to [`parse_tree`].
pub fn print_tree(cat: &FusionCategory, tree: &LabeledTree) -> String {
    match tree {
        LabeledTree::Leaf(v) => cat.name(*v).to_string(),
        LabeledTree::Fork(v, l, r) => format!(
            "( {} {} ):{}",
            print_tree(cat, l),
            print_tree(cat, r),
            cat.name(*v)
        ),
    }
}

/// Prints a shape with all labels free except the unit root.
pub fn print_shape(shape: &Shape) -> String {
    fn go(shape: &Shape, root: bool) -> String {
        match shape {
            Shape::Leaf => "?".to_string(),
            Shape::Fork(l, r) => format!(
                "( {} {} ):{}",
                go(l, false),
                go(r, false),
                if root { "1" } else { "?" }
            ),
        }
    }
    go(shape, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::FusionCategory;

    fn c5() -> FusionCategory {
        FusionCategory::builtin_c5()
    }

    fn tree(cat: &FusionCategory, s: &str) -> RootTree {
        parse_tree(cat, s).unwrap()
    }

    fn sv(cat: &FusionCategory, s: &str) -> StateVector {
        StateVector::from_tree(cat, &tree(cat, s))
    }

    fn path(s: &str) -> NodePath {
        NodePath::parse(s).unwrap()
    }

    #[test]
    fn parse_print_round_trip() {
        let cat = c5();
        for s in ["( A A ):1", "( A ( A A ):A ):1", "( ( A ( A A ):1 ):A A ):1", "1"] {
            let t = tree(&cat, s);
            assert_eq!(print_tree(&cat, t.tree()), s);
        }
    }

    #[test]
    fn parse_rejects_bad_input() {
        let cat = c5();
        assert!(matches!(
            parse_tree(&cat, "( A ( A A ):B ):1"),
            Err(TreeError::Category(CategoryError::UnknownName(_)))
        ));
        assert!(matches!(parse_tree(&cat, "( A A ):A"), Err(TreeError::RootNotUnit)));
        // ( A 1 ):1 violates n(A, 1, 1) = 0
        assert!(matches!(parse_tree(&cat, "( A 1 ):1"), Err(TreeError::Inadmissible(_))));
        assert!(matches!(parse_tree(&cat, "( A A "), Err(TreeError::Parse { .. })));
        assert!(matches!(parse_tree(&cat, "( A ?x ):1"), Err(TreeError::Parse { .. })));
    }

    #[test]
    fn enumerate_single_fork() {
        let cat = c5();
        let shape = Shape::fork(Shape::Leaf, Shape::Leaf);
        let trees = enumerate_admissible(&cat, &shape, &BTreeMap::new());
        let printed: Vec<String> = trees.iter().map(|t| print_tree(&cat, t.tree())).collect();
        assert_eq!(printed, vec!["( 1 1 ):1", "( A A ):1"]);
    }

    #[test]
    fn enumerate_single_leaf() {
        let cat = c5();
        let trees = enumerate_admissible(&cat, &Shape::Leaf, &BTreeMap::new());
        assert_eq!(trees.len(), 1);
        assert_eq!(print_tree(&cat, trees[0].tree()), "1");
    }

    #[test]
    fn enumerate_contradiction_is_empty() {
        let cat = c5();
        let shape = Shape::fork(Shape::Leaf, Shape::Leaf);
        let mut fixed = BTreeMap::new();
        fixed.insert(1, cat.lookup("1").unwrap());
        fixed.insert(2, cat.lookup("A").unwrap());
        assert!(enumerate_admissible(&cat, &shape, &fixed).is_empty());
    }

    #[test]
    fn assoc_expands_through_the_block() {
        let cat = c5();
        // subtree A -> (A, (A, A)) with inner channel 1, under the root fork
        let start = sv(&cat, "( ( A ( A A ):1 ):A A ):1");
        let out = assoc(&cat, &start, &path("L"), AssocDir::Left).unwrap();
        let e1 = tree(&cat, "( ( ( A A ):1 A ):A A ):1");
        let ea = tree(&cat, "( ( ( A A ):A A ):A A ):1");
        assert_eq!(out.len(), 2);
        assert_eq!(out.coeff_of(e1.tree()), 2);
        assert_eq!(out.coeff_of(ea.tree()), 3);

        // inner channel A picks the other column
        let start = sv(&cat, "( ( A ( A A ):A ):A A ):1");
        let out = assoc(&cat, &start, &path("L"), AssocDir::Left).unwrap();
        assert_eq!(out.coeff_of(e1.tree()), 4);
        assert_eq!(out.coeff_of(ea.tree()), 3);
    }

    #[test]
    fn assoc_triangle_is_identity() {
        let cat = c5();
        let start = sv(&cat, "( ( 1 ( A A ):1 ):1 1 ):1");
        let out = assoc(&cat, &start, &path("L"), AssocDir::Left).unwrap();
        assert_eq!(out.len(), 1);
        let (t, c) = out.trees().next().unwrap();
        assert_eq!(c, 1);
        assert_eq!(print_tree(&cat, &t), "( ( ( 1 A ):A A ):1 1 ):1");
    }

    #[test]
    fn assoc_left_right_inverse() {
        let cat = c5();
        let start = sv(&cat, "( ( A ( A A ):A ):A A ):1");
        let there = assoc(&cat, &start, &path("L"), AssocDir::Left).unwrap();
        let back = assoc(&cat, &there, &path("L"), AssocDir::Right).unwrap();
        assert_eq!(back, start);
    }

    #[test]
    fn assoc_requires_local_fork() {
        let cat = c5();
        let start = sv(&cat, "( A A ):1");
        assert!(matches!(
            assoc(&cat, &start, &path("L"), AssocDir::Left),
            Err(TreeError::WrongLocalShape(_))
        ));
        assert!(matches!(
            assoc(&cat, &start, &path("LL"), AssocDir::Left),
            Err(TreeError::BadPath(_))
        ));
    }

    #[test]
    fn unit_insert_remove_round_trip() {
        let cat = c5();
        let start = sv(&cat, "( A A ):1");
        for side in [UnitSide::L, UnitSide::R] {
            let grown = insert_unit_leaf(&cat, &start, &path("L"), side).unwrap();
            let unit_leaf = match side {
                UnitSide::L => path("LL"),
                UnitSide::R => path("LR"),
            };
            let back = remove_unit_leaf(&cat, &grown, &unit_leaf).unwrap();
            assert_eq!(back, start);
        }
    }

    #[test]
    fn unit_remove_errors() {
        let cat = c5();
        let start = sv(&cat, "( A A ):1");
        assert!(matches!(
            remove_unit_leaf(&cat, &start, &path("L")),
            Err(TreeError::NotUnitLeaf(_))
        ));
        assert!(matches!(
            remove_unit_leaf(&cat, &start, &NodePath::root()),
            Err(TreeError::RootRemoval)
        ));
        assert!(matches!(
            insert_unit_leaf(&cat, &start, &path("LLL"), UnitSide::L),
            Err(TreeError::BadPath(_))
        ));
    }

    #[test]
    fn attach_trace_unit_sums_branches() {
        let cat = c5();
        let one = cat.lookup("1").unwrap();
        let a = cat.lookup("A").unwrap();
        let start = sv(&cat, "( A A ):1");
        let c = [(one, 1), (a, 4)];
        let out = attach_trace_unit(&cat, &start, &path("R"), &c).unwrap();
        assert_eq!(out.len(), 2);
        let t1 = tree(&cat, "( A ( A ( 1 1 ):1 ):A ):1");
        let ta = tree(&cat, "( A ( A ( A A ):1 ):A ):1");
        assert_eq!(out.coeff_of(t1.tree()), 1);
        assert_eq!(out.coeff_of(ta.tree()), 4);

        // attaching only the identity leaves a single unchanged-coefficient term
        let out = attach_trace_unit(&cat, &start, &path("R"), &[(one, 1)]).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.coeff_of(t1.tree()), 1);
    }

    #[test]
    fn attach_then_form_composes_scalars() {
        // attach e = I + 3A to a bare unit leaf, then apply the form:
        // 1*λ_1 + 3*λ_A = 4 on the collapsed tree (computed by hand)
        let cat = c5();
        let one = cat.lookup("1").unwrap();
        let a = cat.lookup("A").unwrap();
        let start = StateVector::from_tree(
            &cat,
            &RootTree::new(&cat, LabeledTree::Leaf(one)).unwrap(),
        );
        let attached = attach_trace_unit(&cat, &start, &NodePath::root(), &[(one, 1), (a, 3)]).unwrap();
        let formed = apply_form(&cat, &attached, &path("R")).unwrap();
        assert_eq!(formed.len(), 1);
        let expect = tree(&cat, "( 1 1 ):1");
        assert_eq!(formed.coeff_of(expect.tree()), 4);
    }

    #[test]
    fn split_discards_non_unit_edges() {
        let cat = c5();
        let start = sv(&cat, "( ( A A ):A A ):1");
        let halves = split_at(&cat, &start, &path("L")).unwrap();
        assert!(halves.upper.is_zero());
        assert!(halves.lower.is_zero());
    }

    #[test]
    fn split_then_glue_round_trip() {
        let cat = c5();
        let start = sv(&cat, "( ( A A ):1 ( A A ):1 ):1");
        let halves = split_at(&cat, &start, &path("L")).unwrap();
        assert_eq!(print_tree(&cat, &halves.upper.trees().next().unwrap().0), "( A A ):1");
        let back = glue(&cat, &halves.lower, &halves.upper, &path("L")).unwrap();
        assert_eq!(back, start);
    }

    #[test]
    fn glue_with_zero_factor_is_zero() {
        let cat = c5();
        let host = sv(&cat, "( ( A A ):1 ( A A ):1 ):1");
        let halves = split_at(&cat, &host, &path("L")).unwrap();
        let empty = StateVector::zero(halves.upper.shape().clone());
        let out = glue(&cat, &halves.lower, &empty, &path("L")).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn form_keeps_only_unit_fork() {
        let cat = c5();
        // mixed state: fork label 1 survives, fork label A dies
        let mut state = StateVector::zero(Shape::fork(
            Shape::Leaf,
            Shape::fork(Shape::Leaf, Shape::Leaf),
        ));
        let keep = tree(&cat, "( 1 ( A A ):1 ):1");
        let drop = tree(&cat, "( A ( A A ):A ):1");
        state.add(&cat, keep.labels(), 2);
        state.add(&cat, drop.labels(), 3);
        let out = apply_form(&cat, &state, &path("R")).unwrap();
        assert_eq!(out.len(), 1);
        let expect = tree(&cat, "( 1 1 ):1");
        assert_eq!(out.coeff_of(expect.tree()), 2);
    }

    #[test]
    fn coform_multiplies_by_scalar() {
        let cat = c5();
        let a = cat.lookup("A").unwrap();
        let one = cat.lookup("1").unwrap();
        let start = sv(&cat, "( 1 1 ):1");
        let out = apply_coform(&cat, &start, &path("L"), a).unwrap();
        let expect = tree(&cat, "( ( A A ):1 1 ):1");
        assert_eq!(out.coeff_of(expect.tree()), 3);
        let out = apply_coform(&cat, &start, &path("L"), one).unwrap();
        let expect = tree(&cat, "( ( 1 1 ):1 1 ):1");
        assert_eq!(out.coeff_of(expect.tree()), 1);
        // non-unit leaf is an error
        let bad = sv(&cat, "( A A ):1");
        assert!(matches!(
            apply_coform(&cat, &bad, &path("L"), a),
            Err(TreeError::NotUnitLeaf(_))
        ));
    }

    #[test]
    fn coform_assoc_form_is_identity_scalar() {
        let cat = c5();
        for name in ["1", "A"] {
            let a = cat.lookup(name).unwrap();
            let abar = cat.dual(a);
            // snake composite on ( a ā ):1
            let start_tree = RootTree::new(
                &cat,
                LabeledTree::fork(cat.unit(), LabeledTree::Leaf(a), LabeledTree::Leaf(abar)),
            )
            .unwrap();
            let start = StateVector::from_tree(&cat, &start_tree);
            let s = insert_unit_leaf(&cat, &start, &path("L"), UnitSide::R).unwrap();
            let s = apply_coform(&cat, &s, &path("LR"), abar).unwrap();
            let s = assoc(&cat, &s, &path("L"), AssocDir::Left).unwrap();
            let s = apply_form(&cat, &s, &path("LL")).unwrap();
            let s = remove_unit_leaf(&cat, &s, &path("LL")).unwrap();
            assert_eq!(s, start, "snake at {name}");
        }
    }

    #[test]
    fn normalize_cancels_and_is_idempotent() {
        let cat = c5();
        let t = tree(&cat, "( A A ):1");
        let mut state = StateVector::zero(t.shape());
        state.add(&cat, t.labels(), 2);
        state.add(&cat, t.labels(), 3);
        assert!(state.is_zero());
        let n = normalize(&state);
        assert_eq!(n, state);
    }
}
