//! Multiplicity-free semisimple tensor categories over a prime field.
//!
//! A category is given by its simple objects with duals, the fusion table
//! `n(a,b,c) ∈ {0,1}`, one associativity block per admissible quadruple
//! `(a,b,c;d)`, and the form/coform scalars of the pairing `a ⊗ ā ↔ 1`.
//! The form is normalized to 1 on every object; all pairing normalization
//! lives in the coform.

use crate::field::PrimeField;
use std::collections::BTreeMap;
use std::fmt;

/// Index of a simple object. The unit object is always id 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId(pub usize);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A simple object: display name plus the id of its dual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleObject {
    pub id: ObjectId,
    pub name: String,
    pub dual: ObjectId,
}

/// Total fusion table with multiplicities in {0,1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionRules {
    count: usize,
    table: Vec<bool>, // indexed a*n^2 + b*n + c
}

impl FusionRules {
    pub fn new(count: usize) -> Self {
        FusionRules {
            count,
            table: vec![false; count * count * count],
        }
    }

    pub fn set(&mut self, a: ObjectId, b: ObjectId, c: ObjectId, value: bool) {
        let n = self.count;
        self.table[a.0 * n * n + b.0 * n + c.0] = value;
    }

    /// The multiplicity n(a,b,c) as a boolean.
    pub fn admissible(&self, a: ObjectId, b: ObjectId, c: ObjectId) -> bool {
        let n = self.count;
        self.table[a.0 * n * n + b.0 * n + c.0]
    }
}

/// One block of the associator: the change of basis between the two
/// parenthesizations of `a ⊗ b ⊗ c` mapping to total object `d`.
///
/// Rows are indexed by the left-tree channels `e` of `((a⊗b)_e ⊗ c → d)`,
/// columns by the right-tree channels `f` of `(a ⊗ (b⊗c)_f → d)`, both in
/// ascending object-id order. Applying `mat` to a coefficient vector in the
/// right-parenthesized basis yields the left-parenthesized coefficients;
/// `inv` goes the other way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FBlock {
    pub rows: Vec<ObjectId>,
    pub cols: Vec<ObjectId>,
    pub mat: Vec<Vec<u64>>,
    pub inv: Vec<Vec<u64>>,
}

impl FBlock {
    pub fn row_index(&self, e: ObjectId) -> Option<usize> {
        self.rows.iter().position(|&x| x == e)
    }

    pub fn col_index(&self, f: ObjectId) -> Option<usize> {
        self.cols.iter().position(|&x| x == f)
    }

    /// Entry `[e][f]` of the forward matrix.
    pub fn entry(&self, e: ObjectId, f: ObjectId) -> Option<u64> {
        Some(self.mat[self.row_index(e)?][self.col_index(f)?])
    }

    /// Entry `[f][e]` of the inverse matrix.
    pub fn entry_inv(&self, f: ObjectId, e: ObjectId) -> Option<u64> {
        Some(self.inv[self.col_index(f)?][self.row_index(e)?])
    }

    fn is_identity(&self) -> bool {
        self.mat
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, &v)| v == u64::from(i == j)))
    }
}

/// Form and coform scalars per object: λ_a : a⊗ā → 1 and Λ_a : 1 → a⊗ā.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingData {
    pub form: Vec<u64>,
    pub coform: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CategoryError {
    #[error("unknown object id {0}")]
    UnknownObject(ObjectId),
    #[error("unknown object name `{0}`")]
    UnknownName(String),
    #[error("inadmissible triple ({0}, {1}, {2}; {3}): no channel on one side")]
    InadmissibleTriple(ObjectId, ObjectId, ObjectId, ObjectId),
    #[error("associativity block ({0}, {1}, {2}; {3}) is singular")]
    SingularBlock(ObjectId, ObjectId, ObjectId, ObjectId),
    #[error("associativity block ({0}, {1}, {2}; {3}) has shape {4}x{5}, expected {6}x{7}")]
    BlockShape(ObjectId, ObjectId, ObjectId, ObjectId, usize, usize, usize, usize),
    #[error("category file: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] crate::field::FieldError),
}

/// A validated-constructible fusion category. Immutable after construction.
#[derive(Debug, Clone)]
pub struct FusionCategory {
    field: PrimeField,
    objects: Vec<SimpleObject>,
    rules: FusionRules,
    blocks: BTreeMap<(ObjectId, ObjectId, ObjectId, ObjectId), FBlock>,
    pairing: PairingData,
}

impl FusionCategory {
    /// Assembles a category from raw data. Associativity blocks may be given
    /// for any admissible quadruple; missing blocks default to the identity,
    /// which realizes the triangle convention for unit-involving triples.
    /// Block invertibility is established here; the remaining axioms are the
    /// business of [`validate`].
    pub fn assemble(
        field: PrimeField,
        objects: Vec<SimpleObject>,
        rules: FusionRules,
        given_blocks: BTreeMap<(ObjectId, ObjectId, ObjectId, ObjectId), Vec<Vec<u64>>>,
        coform: BTreeMap<ObjectId, u64>,
    ) -> Result<Self, CategoryError> {
        let count = objects.len();
        let ids: Vec<ObjectId> = (0..count).map(ObjectId).collect();
        let mut blocks = BTreeMap::new();
        for &a in &ids {
            for &b in &ids {
                for &c in &ids {
                    for &d in &ids {
                        let rows: Vec<ObjectId> = ids
                            .iter()
                            .copied()
                            .filter(|&e| rules.admissible(a, b, e) && rules.admissible(e, c, d))
                            .collect();
                        let cols: Vec<ObjectId> = ids
                            .iter()
                            .copied()
                            .filter(|&f| rules.admissible(b, c, f) && rules.admissible(a, f, d))
                            .collect();
                        if rows.is_empty() && cols.is_empty() {
                            continue;
                        }
                        let mat = match given_blocks.get(&(a, b, c, d)) {
                            Some(m) => {
                                if m.len() != rows.len()
                                    || m.iter().any(|r| r.len() != cols.len())
                                {
                                    let got_cols = m.first().map_or(0, Vec::len);
                                    return Err(CategoryError::BlockShape(
                                        a, b, c, d, m.len(), got_cols, rows.len(), cols.len(),
                                    ));
                                }
                                m.clone()
                            }
                            None => {
                                if rows.len() != cols.len() {
                                    return Err(CategoryError::InadmissibleTriple(a, b, c, d));
                                }
                                (0..rows.len())
                                    .map(|i| (0..cols.len()).map(|j| u64::from(i == j)).collect())
                                    .collect()
                            }
                        };
                        let inv = field
                            .invert_matrix(&mat)
                            .ok_or(CategoryError::SingularBlock(a, b, c, d))?;
                        blocks.insert((a, b, c, d), FBlock { rows, cols, mat, inv });
                    }
                }
            }
        }
        let mut form = vec![1; count];
        let mut coform_v = vec![1; count];
        for (id, v) in coform {
            if id.0 >= count {
                return Err(CategoryError::UnknownObject(id));
            }
            coform_v[id.0] = v % field.prime();
        }
        for v in form.iter_mut() {
            *v %= field.prime();
        }
        Ok(FusionCategory {
            field,
            objects,
            rules,
            blocks,
            pairing: PairingData { form, coform: coform_v },
        })
    }

    /// The worked two-object category over Z_5: objects {1, A}, A ⊗ A = 1 ⊕ A,
    /// nontrivial block F(A,A,A;A) = [[2,4],[3,3]], coform scalar 3 at A.
    pub fn builtin_c5() -> Self {
        let field = PrimeField::new(5).unwrap();
        let unit = ObjectId(0);
        let a = ObjectId(1);
        let objects = vec![
            SimpleObject { id: unit, name: "1".into(), dual: unit },
            SimpleObject { id: a, name: "A".into(), dual: a },
        ];
        let mut rules = FusionRules::new(2);
        rules.set(unit, unit, unit, true);
        rules.set(unit, a, a, true);
        rules.set(a, unit, a, true);
        rules.set(a, a, unit, true);
        rules.set(a, a, a, true);
        let mut given = BTreeMap::new();
        given.insert((a, a, a, a), vec![vec![2, 4], vec![3, 3]]);
        let mut coform = BTreeMap::new();
        coform.insert(a, 3);
        Self::assemble(field, objects, rules, given, coform)
            .expect("builtin category data is well formed")
    }

    /// The degenerate one-object category {1} over Z_p.
    pub fn one_object(p: u64) -> Result<Self, CategoryError> {
        let field = PrimeField::new(p)?;
        let unit = ObjectId(0);
        let objects = vec![SimpleObject { id: unit, name: "1".into(), dual: unit }];
        let mut rules = FusionRules::new(1);
        rules.set(unit, unit, unit, true);
        Self::assemble(field, objects, rules, BTreeMap::new(), BTreeMap::new())
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn unit(&self) -> ObjectId {
        ObjectId(0)
    }

    pub fn objects(&self) -> &[SimpleObject] {
        &self.objects
    }

    pub fn object_ids(&self) -> impl Iterator<Item = ObjectId> {
        (0..self.objects.len()).map(ObjectId)
    }

    pub fn dual(&self, a: ObjectId) -> ObjectId {
        self.objects[a.0].dual
    }

    pub fn name(&self, a: ObjectId) -> &str {
        &self.objects[a.0].name
    }

    pub fn lookup(&self, name: &str) -> Result<ObjectId, CategoryError> {
        self.objects
            .iter()
            .find(|o| o.name == name)
            .map(|o| o.id)
            .ok_or_else(|| CategoryError::UnknownName(name.to_string()))
    }

    pub fn rules(&self) -> &FusionRules {
        &self.rules
    }

    pub fn pairing(&self) -> &PairingData {
        &self.pairing
    }

    pub fn admissible(&self, a: ObjectId, b: ObjectId, c: ObjectId) -> bool {
        self.rules.admissible(a, b, c)
    }

    /// The fusion decomposition {c : n(a,b,c) = 1} in ascending id order.
    pub fn fuse(&self, a: ObjectId, b: ObjectId) -> Result<Vec<ObjectId>, CategoryError> {
        self.check_object(a)?;
        self.check_object(b)?;
        Ok(self
            .object_ids()
            .filter(|&c| self.rules.admissible(a, b, c))
            .collect())
    }

    fn check_object(&self, a: ObjectId) -> Result<(), CategoryError> {
        if a.0 < self.objects.len() {
            Ok(())
        } else {
            Err(CategoryError::UnknownObject(a))
        }
    }

    /// The associativity block for `(a,b,c)` with total object `d`.
    pub fn f_block(
        &self,
        a: ObjectId,
        b: ObjectId,
        c: ObjectId,
        d: ObjectId,
    ) -> Result<&FBlock, CategoryError> {
        self.blocks
            .get(&(a, b, c, d))
            .filter(|blk| !blk.rows.is_empty() && !blk.cols.is_empty())
            .ok_or(CategoryError::InadmissibleTriple(a, b, c, d))
    }

    pub fn form_scalar(&self, a: ObjectId) -> u64 {
        self.pairing.form[a.0]
    }

    pub fn coform_scalar(&self, a: ObjectId) -> u64 {
        self.pairing.coform[a.0]
    }

    /// The unit-to-unit entry of F(a, ā, a; a): the factor the associativity
    /// move contributes in every pairing/ambialgebra composite.
    pub fn assoc_factor(&self, a: ObjectId) -> Result<u64, CategoryError> {
        let u = self.unit();
        let blk = self.f_block(a, self.dual(a), a, a)?;
        blk.entry(u, u)
            .ok_or(CategoryError::InadmissibleTriple(a, self.dual(a), a, a))
    }

    /// Same entry of the inverse block, used by the product composite.
    pub fn assoc_factor_inv(&self, a: ObjectId) -> Result<u64, CategoryError> {
        let u = self.unit();
        let blk = self.f_block(a, self.dual(a), a, a)?;
        blk.entry_inv(u, u)
            .ok_or(CategoryError::InadmissibleTriple(a, self.dual(a), a, a))
    }
}

/// Outcome of one axiom check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub pass: bool,
    pub witness: Option<String>,
}

/// Per-axiom report produced by [`validate`]. Failures are reported, never
/// thrown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            match (&c.pass, &c.witness) {
                (true, _) => writeln!(f, "{:<24} pass", c.name)?,
                (false, Some(w)) => writeln!(f, "{:<24} FAIL ({w})", c.name)?,
                (false, None) => writeln!(f, "{:<24} FAIL", c.name)?,
            }
        }
        Ok(())
    }
}

/// Checks every axiom the calculus relies on and reports each with a witness
/// tuple on failure: unit laws, duality, dual involution, fusion
/// associativity, block invertibility, the triangle convention, the pentagon
/// identity (brute force over all admissible quintuples), and pairing
/// nondegeneracy in both composition orders.
pub fn validate(cat: &FusionCategory) -> ValidationReport {
    let mut checks = Vec::new();
    let unit = cat.unit();
    let ids: Vec<ObjectId> = cat.object_ids().collect();

    let mut fail: Option<String> = None;
    for &a in &ids {
        for &c in &ids {
            if cat.admissible(unit, a, c) != (c == a) || cat.admissible(a, unit, c) != (c == a) {
                fail = Some(format!("({}, {})", cat.name(a), cat.name(c)));
            }
        }
    }
    checks.push(AxiomCheck { name: "unit laws", pass: fail.is_none(), witness: fail });

    let mut fail = None;
    for &a in &ids {
        for &b in &ids {
            if cat.admissible(a, b, unit) != (b == cat.dual(a)) {
                fail = Some(format!("({}, {})", cat.name(a), cat.name(b)));
            }
        }
    }
    checks.push(AxiomCheck { name: "duality", pass: fail.is_none(), witness: fail });

    let mut fail = None;
    for &a in &ids {
        if cat.dual(cat.dual(a)) != a {
            fail = Some(cat.name(a).to_string());
        }
    }
    if cat.dual(unit) != unit {
        fail = Some("unit not self-dual".into());
    }
    checks.push(AxiomCheck { name: "dual involution", pass: fail.is_none(), witness: fail });

    let mut fail = None;
    for &a in &ids {
        for &b in &ids {
            for &c in &ids {
                for &d in &ids {
                    let lhs = ids
                        .iter()
                        .filter(|&&e| cat.admissible(a, b, e) && cat.admissible(e, c, d))
                        .count();
                    let rhs = ids
                        .iter()
                        .filter(|&&f| cat.admissible(b, c, f) && cat.admissible(a, f, d))
                        .count();
                    if lhs != rhs {
                        fail = Some(format!(
                            "({}, {}, {}, {})",
                            cat.name(a), cat.name(b), cat.name(c), cat.name(d)
                        ));
                    }
                }
            }
        }
    }
    checks.push(AxiomCheck { name: "fusion associativity", pass: fail.is_none(), witness: fail });

    // Invertibility is established during assembly; re-derive it here so the
    // report stands on its own.
    let mut fail = None;
    for (&(a, b, c, d), blk) in &cat.blocks {
        if cat.field.invert_matrix(&blk.mat).is_none() {
            fail = Some(format!("({}, {}, {}; {})", cat.name(a), cat.name(b), cat.name(c), cat.name(d)));
        }
    }
    checks.push(AxiomCheck { name: "block invertibility", pass: fail.is_none(), witness: fail });

    let mut fail = None;
    for (&(a, b, c, d), blk) in &cat.blocks {
        if (a == unit || b == unit || c == unit) && !blk.is_identity() {
            fail = Some(format!("({}, {}, {}; {})", cat.name(a), cat.name(b), cat.name(c), cat.name(d)));
        }
    }
    checks.push(AxiomCheck { name: "triangle convention", pass: fail.is_none(), witness: fail });

    let pentagon = pentagon_witness(cat);
    checks.push(AxiomCheck { name: "pentagon", pass: pentagon.is_none(), witness: pentagon });

    let mut fail = None;
    for &a in &ids {
        match snake_scalars(cat, a) {
            Ok((s_fwd, s_inv)) => {
                if s_fwd != 1 || s_inv != 1 {
                    fail = Some(format!("{} -> ({s_fwd}, {s_inv})", cat.name(a)));
                }
            }
            Err(e) => fail = Some(format!("{}: {e}", cat.name(a))),
        }
    }
    checks.push(AxiomCheck { name: "pairing nondegeneracy", pass: fail.is_none(), witness: fail });

    ValidationReport { checks }
}

/// The two coform-associativity-form composite scalars at object `a`.
///
/// The forward one is λ_a · Λ_ā · F(a,ā,a;a)[1,1]; the inverse-side partner
/// uses the inverse block. Both must equal 1 for the pairing to be
/// nondegenerate with the identity as the composite.
pub fn snake_scalars(cat: &FusionCategory, a: ObjectId) -> Result<(u64, u64), CategoryError> {
    let f = cat.field();
    let abar = cat.dual(a);
    let fwd = f.mul(
        f.mul(cat.coform_scalar(abar), cat.assoc_factor(a)?),
        cat.form_scalar(a),
    );
    let inv = f.mul(
        f.mul(cat.coform_scalar(a), cat.assoc_factor_inv(a)?),
        cat.form_scalar(abar),
    );
    Ok((fwd, inv))
}

/// Brute-force pentagon check over every admissible quintuple `(a,b,c,d;e)`.
/// Returns a witness string for the first failure, `None` when all pass.
///
/// Both routes from `((a⊗b)⊗c)⊗d` to `a⊗(b⊗(c⊗d))` are assembled from
/// inverse blocks and compared entry by entry on the channel-pair bases.
fn pentagon_witness(cat: &FusionCategory) -> Option<String> {
    let f = cat.field();
    let ids: Vec<ObjectId> = cat.object_ids().collect();
    for &a in &ids {
        for &b in &ids {
            for &c in &ids {
                for &d in &ids {
                    for &e in &ids {
                        // basis of ((ab)c)d -> e: pairs (x, y)
                        let src: Vec<(ObjectId, ObjectId)> = ids
                            .iter()
                            .flat_map(|&x| ids.iter().map(move |&y| (x, y)))
                            .filter(|&(x, y)| {
                                cat.admissible(a, b, x)
                                    && cat.admissible(x, c, y)
                                    && cat.admissible(y, d, e)
                            })
                            .collect();
                        // basis of a(b(cd)) -> e: pairs (z, w)
                        let dst: Vec<(ObjectId, ObjectId)> = ids
                            .iter()
                            .flat_map(|&z| ids.iter().map(move |&w| (z, w)))
                            .filter(|&(z, w)| {
                                cat.admissible(c, d, z)
                                    && cat.admissible(b, z, w)
                                    && cat.admissible(a, w, e)
                            })
                            .collect();
                        if src.is_empty() || dst.is_empty() {
                            continue;
                        }
                        for (si, &(x, y)) in src.iter().enumerate() {
                            for (di, &(z, w)) in dst.iter().enumerate() {
                                // route A: ((ab)c)d -> (ab)(cd) -> a(b(cd))
                                let mut route_a = 0;
                                if let (Ok(b1), Ok(b2)) =
                                    (cat.f_block(x, c, d, e), cat.f_block(a, b, z, e))
                                {
                                    if let (Some(t1), Some(t2)) =
                                        (b1.entry_inv(z, y), b2.entry_inv(w, x))
                                    {
                                        route_a = f.mul(t1, t2);
                                    }
                                }
                                // route B: ((ab)c)d -> (a(bc))d -> a((bc)d) -> a(b(cd))
                                let mut route_b = 0;
                                for &u in &ids {
                                    if !(cat.admissible(b, c, u)
                                        && cat.admissible(a, u, y)
                                        && cat.admissible(u, d, w))
                                    {
                                        continue;
                                    }
                                    if let (Ok(b1), Ok(b2), Ok(b3)) = (
                                        cat.f_block(a, b, c, y),
                                        cat.f_block(a, u, d, e),
                                        cat.f_block(b, c, d, w),
                                    ) {
                                        if let (Some(t1), Some(t2), Some(t3)) = (
                                            b1.entry_inv(u, x),
                                            b2.entry_inv(w, y),
                                            b3.entry_inv(z, u),
                                        ) {
                                            route_b = f.add(route_b, f.mul(f.mul(t1, t2), t3));
                                        }
                                    }
                                }
                                if route_a != route_b {
                                    return Some(format!(
                                        "({}, {}, {}, {}; {}) at ({}, {}) -> ({}, {}): {} != {}",
                                        cat.name(a), cat.name(b), cat.name(c), cat.name(d),
                                        cat.name(e), cat.name(x), cat.name(y),
                                        cat.name(z), cat.name(w), route_a, route_b
                                    ));
                                }
                                let _ = (si, di);
                            }
                        }
                    }
                }
            }
        }
    }
    None
}

/// Parses the line-oriented category file format:
///
/// ```text
/// prime 5
/// object 1 dual=1
/// object A dual=A
/// fuse A A -> 1 A
/// F A A A @ A = [[2,4],[3,3]]
/// coform A = 3
/// ```
///
/// The first object declared is the unit. Unit fusion and duality rows are
/// filled in automatically; unspecified F-blocks default to the identity
/// (the triangle convention), unspecified coforms to 1.
pub fn parse_category_file(text: &str) -> Result<FusionCategory, CategoryError> {
    let mut prime: Option<u64> = None;
    let mut names: Vec<String> = Vec::new();
    let mut duals: Vec<String> = Vec::new();
    let mut fuse_lines: Vec<(String, String, Vec<String>)> = Vec::new();
    let mut f_lines: Vec<([String; 4], Vec<Vec<u64>>)> = Vec::new();
    let mut coform_lines: Vec<(String, u64)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| CategoryError::Parse(format!("line {}: {}", lineno + 1, msg));
        let mut words = line.split_whitespace();
        match words.next() {
            Some("prime") => {
                let v = words
                    .next()
                    .ok_or_else(|| err("prime: missing value".into()))?
                    .parse::<u64>()
                    .map_err(|e| err(format!("prime: {e}")))?;
                prime = Some(v);
            }
            Some("object") => {
                let name = words.next().ok_or_else(|| err("object: missing name".into()))?;
                let dual = words
                    .next()
                    .and_then(|w| w.strip_prefix("dual="))
                    .ok_or_else(|| err("object: expected dual=<name>".into()))?;
                names.push(name.to_string());
                duals.push(dual.to_string());
            }
            Some("fuse") => {
                let a = words.next().ok_or_else(|| err("fuse: missing object".into()))?;
                let b = words.next().ok_or_else(|| err("fuse: missing object".into()))?;
                if words.next() != Some("->") {
                    return Err(err("fuse: expected ->".into()));
                }
                let outs: Vec<String> = words.map(str::to_string).collect();
                if outs.is_empty() {
                    return Err(err("fuse: empty decomposition".into()));
                }
                fuse_lines.push((a.to_string(), b.to_string(), outs));
            }
            Some("F") => {
                let rest: Vec<&str> = line[1..].trim().split('=').collect();
                if rest.len() != 2 {
                    return Err(err("F: expected `F a b c @ d = [[..]]`".into()));
                }
                let head: Vec<&str> = rest[0].split_whitespace().collect();
                if head.len() != 5 || head[3] != "@" {
                    return Err(err("F: expected `F a b c @ d = [[..]]`".into()));
                }
                let mat = parse_matrix(rest[1].trim()).map_err(|m| err(format!("F: {m}")))?;
                f_lines.push(
                    ([head[0].into(), head[1].into(), head[2].into(), head[4].into()], mat),
                );
            }
            Some("coform") => {
                let name = words.next().ok_or_else(|| err("coform: missing object".into()))?;
                if words.next() != Some("=") {
                    return Err(err("coform: expected =".into()));
                }
                let v = words
                    .next()
                    .ok_or_else(|| err("coform: missing value".into()))?
                    .parse::<u64>()
                    .map_err(|e| err(format!("coform: {e}")))?;
                coform_lines.push((name.to_string(), v));
            }
            Some(other) => return Err(err(format!("unknown directive `{other}`"))),
            None => unreachable!(),
        }
    }

    let p = prime.ok_or_else(|| CategoryError::Parse("missing `prime` line".into()))?;
    let field = PrimeField::new(p)?;
    if names.is_empty() {
        return Err(CategoryError::Parse("no objects declared".into()));
    }
    let lookup = |n: &str| -> Result<ObjectId, CategoryError> {
        names
            .iter()
            .position(|x| x == n)
            .map(ObjectId)
            .ok_or_else(|| CategoryError::UnknownName(n.to_string()))
    };
    let unit = ObjectId(0);
    let objects: Result<Vec<SimpleObject>, CategoryError> = names
        .iter()
        .zip(&duals)
        .enumerate()
        .map(|(i, (n, d))| {
            Ok(SimpleObject { id: ObjectId(i), name: n.clone(), dual: lookup(d)? })
        })
        .collect();
    let objects = objects?;

    let mut rules = FusionRules::new(names.len());
    for i in 0..names.len() {
        let a = ObjectId(i);
        rules.set(unit, a, a, true);
        rules.set(a, unit, a, true);
    }
    for (a, b, outs) in fuse_lines {
        let a = lookup(&a)?;
        let b = lookup(&b)?;
        for c in outs {
            rules.set(a, b, lookup(&c)?, true);
        }
    }

    let mut given = BTreeMap::new();
    for ([a, b, c, d], mat) in f_lines {
        let mat = mat
            .into_iter()
            .map(|row| row.into_iter().map(|v| v % p).collect())
            .collect();
        given.insert((lookup(&a)?, lookup(&b)?, lookup(&c)?, lookup(&d)?), mat);
    }
    let mut coform = BTreeMap::new();
    for (n, v) in coform_lines {
        coform.insert(lookup(&n)?, v % p);
    }
    FusionCategory::assemble(field, objects, rules, given, coform)
}

fn parse_matrix(s: &str) -> Result<Vec<Vec<u64>>, String> {
    let s = s.trim();
    let inner = s
        .strip_prefix("[[")
        .and_then(|t| t.strip_suffix("]]"))
        .ok_or("expected [[..],[..]] syntax")?;
    inner
        .split("],[")
        .map(|row| {
            row.split(',')
                .map(|v| v.trim().parse::<u64>().map_err(|e| e.to_string()))
                .collect()
        })
        .collect()
}

/// Renders a category back into the file format; `parse_category_file` of the
/// output reproduces the category.
pub fn print_category_file(cat: &FusionCategory) -> String {
    let mut out = String::new();
    out.push_str(&format!("prime {}\n", cat.field().prime()));
    for o in cat.objects() {
        out.push_str(&format!("object {} dual={}\n", o.name, cat.name(o.dual)));
    }
    let unit = cat.unit();
    for a in cat.object_ids() {
        for b in cat.object_ids() {
            if a == unit || b == unit {
                continue;
            }
            let outs: Vec<&str> = cat
                .object_ids()
                .filter(|&c| cat.admissible(a, b, c))
                .map(|c| cat.name(c))
                .collect();
            if !outs.is_empty() {
                out.push_str(&format!(
                    "fuse {} {} -> {}\n",
                    cat.name(a),
                    cat.name(b),
                    outs.join(" ")
                ));
            }
        }
    }
    for (&(a, b, c, d), blk) in &cat.blocks {
        if blk.is_identity() {
            continue;
        }
        let rows: Vec<String> = blk
            .mat
            .iter()
            .map(|r| r.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
            .collect();
        out.push_str(&format!(
            "F {} {} {} @ {} = [[{}]]\n",
            cat.name(a),
            cat.name(b),
            cat.name(c),
            cat.name(d),
            rows.join("],[")
        ));
    }
    for a in cat.object_ids() {
        if cat.coform_scalar(a) != 1 {
            out.push_str(&format!("coform {} = {}\n", cat.name(a), cat.coform_scalar(a)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c5() -> FusionCategory {
        FusionCategory::builtin_c5()
    }

    #[test]
    fn c5_fusion_rules() {
        let cat = c5();
        let one = cat.lookup("1").unwrap();
        let a = cat.lookup("A").unwrap();
        // A (x) A = 1 (+) A
        assert!(cat.admissible(a, a, a));
        assert!(cat.admissible(a, a, one));
        // 1 (x) A = A
        assert!(cat.admissible(one, a, a));
        assert!(!cat.admissible(one, a, one));
        assert_eq!(cat.fuse(a, a).unwrap(), vec![one, a]);
        assert_eq!(cat.fuse(one, one).unwrap(), vec![one]);
        assert_eq!(cat.fuse(one, a).unwrap(), vec![a]);
        assert!(cat.fuse(ObjectId(7), a).is_err());
    }

    #[test]
    fn c5_block_data() {
        let cat = c5();
        let one = cat.lookup("1").unwrap();
        let a = cat.lookup("A").unwrap();
        let blk = cat.f_block(a, a, a, a).unwrap();
        // the four tracked coefficients of the worked example:
        // alpha = 2 (f=1 -> e=1), beta = 3 (f=1 -> e=A),
        // gamma = 4 (f=A -> e=1), delta = 3 (f=A -> e=A)
        assert_eq!(blk.entry(one, one), Some(2));
        assert_eq!(blk.entry(a, one), Some(3));
        assert_eq!(blk.entry(one, a), Some(4));
        assert_eq!(blk.entry(a, a), Some(3));
        assert_eq!(cat.f_block(a, a, a, one).unwrap().mat, vec![vec![1]]);
        // triangle: unit anywhere gives the identity
        assert_eq!(cat.f_block(one, a, a, a).unwrap().mat, vec![vec![1]]);
        // self-inverse mod 5
        let sq = cat.field().mat_mul(&blk.mat, &blk.mat);
        assert_eq!(sq, vec![vec![1, 0], vec![0, 1]]);
        // coform scalar must be 2^-1 = 3 in Z_5
        assert_eq!(cat.coform_scalar(a), 3);
        assert_eq!(cat.form_scalar(a), 1);
    }

    #[test]
    fn c5_validates() {
        let report = validate(&c5());
        assert!(report.all_pass(), "{report}");
        assert!(report.check("pentagon").unwrap().pass);
    }

    #[test]
    fn one_object_validates() {
        let report = validate(&FusionCategory::one_object(5).unwrap());
        assert!(report.all_pass(), "{report}");
    }

    #[test]
    fn snake_scalar_is_one() {
        let cat = c5();
        let a = cat.lookup("A").unwrap();
        // coform 3, assoc entry 2, form 1: 3 * 2 * 1 = 1 mod 5
        assert_eq!(snake_scalars(&cat, a).unwrap(), (1, 1));
        assert_eq!(snake_scalars(&cat, cat.unit()).unwrap(), (1, 1));
    }

    #[test]
    fn broken_pairing_is_reported() {
        // same data as c5 but with the coform left at 1
        let field = PrimeField::new(5).unwrap();
        let unit = ObjectId(0);
        let a = ObjectId(1);
        let objects = vec![
            SimpleObject { id: unit, name: "1".into(), dual: unit },
            SimpleObject { id: a, name: "A".into(), dual: a },
        ];
        let mut rules = FusionRules::new(2);
        rules.set(unit, unit, unit, true);
        rules.set(unit, a, a, true);
        rules.set(a, unit, a, true);
        rules.set(a, a, unit, true);
        rules.set(a, a, a, true);
        let mut given = BTreeMap::new();
        given.insert((a, a, a, a), vec![vec![2, 4], vec![3, 3]]);
        let cat =
            FusionCategory::assemble(field, objects, rules, given, BTreeMap::new()).unwrap();
        let report = validate(&cat);
        assert!(!report.check("pairing nondegeneracy").unwrap().pass);
    }

    #[test]
    fn singular_block_rejected() {
        let field = PrimeField::new(5).unwrap();
        let unit = ObjectId(0);
        let a = ObjectId(1);
        let objects = vec![
            SimpleObject { id: unit, name: "1".into(), dual: unit },
            SimpleObject { id: a, name: "A".into(), dual: a },
        ];
        let mut rules = FusionRules::new(2);
        rules.set(unit, unit, unit, true);
        rules.set(unit, a, a, true);
        rules.set(a, unit, a, true);
        rules.set(a, a, unit, true);
        rules.set(a, a, a, true);
        let mut given = BTreeMap::new();
        given.insert((a, a, a, a), vec![vec![1, 2], vec![2, 4]]);
        let err = FusionCategory::assemble(field, objects, rules, given, BTreeMap::new());
        assert!(matches!(err, Err(CategoryError::SingularBlock(..))));
    }

    #[test]
    fn file_round_trip() {
        let cat = c5();
        let text = print_category_file(&cat);
        let back = parse_category_file(&text).unwrap();
        assert_eq!(print_category_file(&back), text);
        let report = validate(&back);
        assert!(report.all_pass());
    }

    #[test]
    fn file_parse_errors() {
        assert!(parse_category_file("object A dual=A\n").is_err());
        assert!(parse_category_file("prime 6\nobject 1 dual=1\n").is_err());
        assert!(parse_category_file("prime 5\nobject 1 dual=1\nbogus x\n").is_err());
        assert!(parse_category_file("prime 5\nobject 1 dual=B\n").is_err());
    }
}
