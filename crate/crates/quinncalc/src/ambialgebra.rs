//! The ambialgebra on the two-leaf fork space and its trace unit.
//!
//! Elements are linear combinations of the forks `( a ā ):1` under the
//! root, one per simple object. In the multiplicity-free dual-paired basis
//! the product and coproduct act diagonally per object, so they are carried
//! as per-object scalars; the roottree composites behind those scalars are
//! replayed move-by-move in the test suite.

use crate::category::{CategoryError, FusionCategory, ObjectId};
use std::collections::BTreeMap;

/// Σ_a coeffs[a] · (fork (a, ā) under root 1). Text form `I + 4A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    coeffs: BTreeMap<ObjectId, u64>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement { coeffs: BTreeMap::new() }
    }

    /// The identity element I: coefficient 1 on the unit fork.
    pub fn identity(cat: &FusionCategory) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(cat.unit(), 1);
        AlgebraElement { coeffs }
    }

    pub fn from_coeffs(cat: &FusionCategory, pairs: &[(ObjectId, u64)]) -> Self {
        let mut coeffs = BTreeMap::new();
        for &(a, k) in pairs {
            let k = k % cat.field().prime();
            if k != 0 {
                coeffs.insert(a, k);
            }
        }
        AlgebraElement { coeffs }
    }

    pub fn coeff(&self, a: ObjectId) -> u64 {
        self.coeffs.get(&a).copied().unwrap_or(0)
    }

    pub fn pairs(&self) -> Vec<(ObjectId, u64)> {
        self.coeffs.iter().map(|(&a, &k)| (a, k)).collect()
    }

    /// Renders in the `I + 4A` form; the unit fork prints as `I`.
    pub fn render(&self, cat: &FusionCategory) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (&a, &k) in &self.coeffs {
            if a == cat.unit() {
                parts.push(if k == 1 { "I".to_string() } else { format!("{k}I") });
            } else if k == 1 {
                parts.push(cat.name(a).to_string());
            } else {
                parts.push(format!("{}{}", k, cat.name(a)));
            }
        }
        parts.join(" + ")
    }

    /// Parses the `I + 4A` form. `I` names the unit fork; a bare object name
    /// means coefficient 1.
    pub fn parse(cat: &FusionCategory, text: &str) -> Result<Self, AmbiError> {
        let mut pairs = Vec::new();
        for raw in text.split('+') {
            let term = raw.trim();
            if term.is_empty() {
                return Err(AmbiError::Parse(format!("empty term in `{text}`")));
            }
            if term == "0" {
                continue;
            }
            let digits: String = term.chars().take_while(char::is_ascii_digit).collect();
            let name = term[digits.len()..].trim();
            let coeff = if digits.is_empty() {
                1
            } else {
                digits
                    .parse::<u64>()
                    .map_err(|e| AmbiError::Parse(format!("bad coefficient in `{term}`: {e}")))?
            };
            let obj = if name == "I" {
                cat.unit()
            } else if name.is_empty() {
                return Err(AmbiError::Parse(format!("missing object name in `{term}`")));
            } else {
                cat.lookup(name)?
            };
            pairs.push((obj, coeff % cat.field().prime()));
        }
        // combine repeated objects mod p
        let mut merged: BTreeMap<ObjectId, u64> = BTreeMap::new();
        for (a, k) in pairs {
            let e = merged.entry(a).or_insert(0);
            *e = cat.field().add(*e, k);
        }
        merged.retain(|_, k| *k != 0);
        Ok(AlgebraElement { coeffs: merged })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AmbiError {
    #[error("product factor vanishes at object {0}: the unit does not exist")]
    NoUnit(String),
    #[error("ambialgebra is not special: mΨΔ vanishes at object {0}")]
    NotSpecial(String),
    #[error("element parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Category(#[from] CategoryError),
}

/// Per-object structure scalars of the ambialgebra.
///
/// `m_factor` is the scalar the product composite picks up (form times the
/// inverse associativity entry), `delta_factor` the coproduct's (coform
/// times the forward entry), `e_coeff` the unit element, `c_coeff` the trace
/// unit where it exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureScalars {
    pub m_factor: Vec<u64>,
    pub delta_factor: Vec<u64>,
    pub e_coeff: Vec<u64>,
    pub c_coeff: Vec<Option<u64>>,
}

impl StructureScalars {
    pub fn m(&self, a: ObjectId) -> u64 {
        self.m_factor[a.0]
    }

    pub fn delta(&self, a: ObjectId) -> u64 {
        self.delta_factor[a.0]
    }
}

/// Derives the per-object factors by composing the relevant associativity
/// entries and pairing scalars. For the worked category: m_factor(A) = 2,
/// delta_factor(A) = 3·2 = 1.
pub fn structure_scalars(cat: &FusionCategory) -> Result<StructureScalars, AmbiError> {
    let f = cat.field();
    let mut m_factor = Vec::new();
    let mut delta_factor = Vec::new();
    let mut e_coeff = Vec::new();
    let mut c_coeff = Vec::new();
    for a in cat.object_ids() {
        let abar = cat.dual(a);
        let m = f.mul(cat.form_scalar(abar), cat.assoc_factor_inv(a)?);
        let d = f.mul(cat.coform_scalar(abar), cat.assoc_factor(a)?);
        m_factor.push(m);
        delta_factor.push(d);
        e_coeff.push(f.inv(m).unwrap_or(0));
        let md = f.mul(m, d);
        c_coeff.push(match (f.inv(m), f.inv(md)) {
            (Some(e), Some(md_inv)) => Some(f.mul(e, md_inv)),
            _ => None,
        });
    }
    Ok(StructureScalars { m_factor, delta_factor, e_coeff, c_coeff })
}

/// The unit element e with m(e ⊗ x) = x: e_coeff(a) = m_factor(a)⁻¹.
pub fn unit_e(cat: &FusionCategory) -> Result<AlgebraElement, AmbiError> {
    let s = structure_scalars(cat)?;
    let mut pairs = Vec::new();
    for a in cat.object_ids() {
        if s.m(a) == 0 {
            return Err(AmbiError::NoUnit(cat.name(a).to_string()));
        }
        pairs.push((a, s.e_coeff[a.0]));
    }
    Ok(AlgebraElement::from_coeffs(cat, &pairs))
}

/// The product m on elements: diagonal per object.
pub fn product(
    cat: &FusionCategory,
    x: &AlgebraElement,
    y: &AlgebraElement,
) -> Result<AlgebraElement, AmbiError> {
    let s = structure_scalars(cat)?;
    let f = cat.field();
    let pairs: Vec<(ObjectId, u64)> = cat
        .object_ids()
        .map(|a| (a, f.mul(s.m(a), f.mul(x.coeff(a), y.coeff(a)))))
        .collect();
    Ok(AlgebraElement::from_coeffs(cat, &pairs))
}

/// Ψ: the factor-free position swap of the two output circles. On
/// coefficients it is the identity; it exists to make the composite below
/// read like the construction it models.
pub fn swap(x: &AlgebraElement) -> AlgebraElement {
    x.clone()
}

/// The composite mΨΔ on an element, diagonal per object.
pub fn m_psi_delta(cat: &FusionCategory, x: &AlgebraElement) -> Result<AlgebraElement, AmbiError> {
    let s = structure_scalars(cat)?;
    let f = cat.field();
    let swapped = swap(x);
    let pairs: Vec<(ObjectId, u64)> = cat
        .object_ids()
        .map(|a| (a, f.mul(f.mul(s.m(a), s.delta(a)), swapped.coeff(a))))
        .collect();
    Ok(AlgebraElement::from_coeffs(cat, &pairs))
}

/// Solves mΨΔ(c) = e per object. Errors with the offending object when the
/// composite scalar vanishes somewhere (the ambialgebra is not special).
pub fn trace_unit_solve(cat: &FusionCategory) -> Result<AlgebraElement, AmbiError> {
    let e = unit_e(cat)?;
    let s = structure_scalars(cat)?;
    let f = cat.field();
    let mut pairs = Vec::new();
    for a in cat.object_ids() {
        let md = f.mul(s.m(a), s.delta(a));
        let inv = f
            .inv(md)
            .ok_or_else(|| AmbiError::NotSpecial(cat.name(a).to_string()))?;
        pairs.push((a, f.mul(inv, e.coeff(a))));
    }
    Ok(AlgebraElement::from_coeffs(cat, &pairs))
}

/// The closed form c_a = (λΦΛ)_a²: the coform into ā ⊗ a, the factor-free
/// position swap Φ, then the form — squared.
pub fn trace_unit_general(cat: &FusionCategory) -> Result<AlgebraElement, AmbiError> {
    let f = cat.field();
    let mut pairs = Vec::new();
    for a in cat.object_ids() {
        let scalar = f.mul(cat.form_scalar(a), cat.coform_scalar(cat.dual(a)));
        if scalar == 0 {
            return Err(AmbiError::NotSpecial(cat.name(a).to_string()));
        }
        pairs.push((a, f.mul(scalar, scalar)));
    }
    Ok(AlgebraElement::from_coeffs(cat, &pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::FusionCategory;
    use crate::roottree::{
        apply_coform, apply_form, assoc, insert_unit_leaf, remove_unit_leaf, split_at, AssocDir,
        LabeledTree, NodePath, RootTree, StateVector, UnitSide,
    };

    fn c5() -> FusionCategory {
        FusionCategory::builtin_c5()
    }

    fn path(s: &str) -> NodePath {
        NodePath::parse(s).unwrap()
    }

    #[test]
    fn c5_structure_scalars() {
        let cat = c5();
        let one = cat.lookup("1").unwrap();
        let a = cat.lookup("A").unwrap();
        let s = structure_scalars(&cat).unwrap();
        assert_eq!(s.m(a), 2);
        assert_eq!(s.delta(a), 1); // 3 * 2 = 1 mod 5
        assert_eq!(s.m(one), 1);
        assert_eq!(s.delta(one), 1);
    }

    #[test]
    fn c5_unit_and_trace_unit() {
        let cat = c5();
        let e = unit_e(&cat).unwrap();
        assert_eq!(e.render(&cat), "I + 3A");
        let c = trace_unit_solve(&cat).unwrap();
        assert_eq!(c.render(&cat), "I + 4A");
        let g = trace_unit_general(&cat).unwrap();
        assert_eq!(g, c);
        // mΨΔ(c) = e, computed through the element arithmetic
        assert_eq!(m_psi_delta(&cat, &c).unwrap(), e);
    }

    #[test]
    fn trivial_category_trace_unit() {
        let cat = FusionCategory::one_object(5).unwrap();
        assert_eq!(unit_e(&cat).unwrap().render(&cat), "I");
        assert_eq!(trace_unit_solve(&cat).unwrap().render(&cat), "I");
        assert_eq!(trace_unit_general(&cat).unwrap().render(&cat), "I");
    }

    #[test]
    fn unit_absorbs_random_elements() {
        let cat = c5();
        let e = unit_e(&cat).unwrap();
        let one = cat.lookup("1").unwrap();
        let a = cat.lookup("A").unwrap();
        // all 25 elements of the two-dimensional fork space, unit law exact
        for x0 in 0..5 {
            for x1 in 0..5 {
                let x = AlgebraElement::from_coeffs(&cat, &[(one, x0), (a, x1)]);
                assert_eq!(product(&cat, &e, &x).unwrap(), x);
            }
        }
    }

    #[test]
    fn element_text_round_trip() {
        let cat = c5();
        for s in ["I + 4A", "I + 3A", "I", "4A", "0"] {
            let e = AlgebraElement::parse(&cat, s).unwrap();
            assert_eq!(e.render(&cat), s);
        }
        assert_eq!(
            AlgebraElement::parse(&cat, "2I + 2I").unwrap().render(&cat),
            "4I"
        );
        assert!(AlgebraElement::parse(&cat, "4B").is_err());
        assert!(AlgebraElement::parse(&cat, "4").is_err());
    }

    /// Replays the product composite on the fork pair `(a ā)(a ā)` through
    /// the roottree moves and returns its scalar.
    fn replay_m(cat: &FusionCategory, a: crate::category::ObjectId) -> u64 {
        let unit = cat.unit();
        let abar = cat.dual(a);
        let fork = |x: crate::category::ObjectId| {
            LabeledTree::fork(unit, LabeledTree::Leaf(x), LabeledTree::Leaf(cat.dual(x)))
        };
        let start_tree =
            RootTree::new(cat, LabeledTree::fork(unit, fork(a), fork(a))).unwrap();
        let sv = StateVector::from_tree(cat, &start_tree);
        // move the second circle's a-branch onto the first circle, pair (ā, a),
        // then collapse
        let s = assoc(cat, &sv, &NodePath::root(), AssocDir::Left).unwrap();
        let s = assoc(cat, &s, &path("L"), AssocDir::Right).unwrap();
        let s = apply_form(cat, &s, &path("LR")).unwrap();
        let s = remove_unit_leaf(cat, &s, &path("LR")).unwrap();
        let expect = RootTree::new(
            cat,
            LabeledTree::fork(unit, LabeledTree::Leaf(a), LabeledTree::Leaf(abar)),
        )
        .unwrap();
        assert_eq!(s.len(), 1, "product replay must stay diagonal");
        s.coeff_of(expect.tree())
    }

    /// Replays the coproduct composite on the fork `(a ā)` and returns its
    /// scalar: insert a unit, apply the coform, reassociate into two circles
    /// and split off the second one.
    fn replay_delta(cat: &FusionCategory, a: crate::category::ObjectId) -> u64 {
        let unit = cat.unit();
        let abar = cat.dual(a);
        let start_tree = RootTree::new(
            cat,
            LabeledTree::fork(unit, LabeledTree::Leaf(a), LabeledTree::Leaf(abar)),
        )
        .unwrap();
        let sv = StateVector::from_tree(cat, &start_tree);
        let s = insert_unit_leaf(cat, &sv, &path("L"), UnitSide::R).unwrap();
        let s = apply_coform(cat, &s, &path("LR"), abar).unwrap();
        let s = assoc(cat, &s, &path("L"), AssocDir::Left).unwrap();
        let s = assoc(cat, &s, &NodePath::root(), AssocDir::Right).unwrap();
        // the circles separate; channels other than the unit are lost here
        let halves = split_at(cat, &s, &path("L")).unwrap();
        assert_eq!(halves.upper.len(), 1);
        assert_eq!(halves.lower.len(), 1);
        let fork_tree =
            LabeledTree::fork(unit, LabeledTree::Leaf(a), LabeledTree::Leaf(abar));
        halves.upper.coeff_of(&fork_tree)
    }

    #[test]
    fn scalars_match_roottree_replay() {
        let cat = c5();
        let s = structure_scalars(&cat).unwrap();
        for a in cat.object_ids() {
            assert_eq!(replay_m(&cat, a), s.m(a), "m at {}", cat.name(a));
            assert_eq!(replay_delta(&cat, a), s.delta(a), "delta at {}", cat.name(a));
        }
    }

    #[test]
    fn trace_unit_equation_replayed_through_roottrees() {
        // mΨΔ(c) = e, with both composites replayed move by move: the
        // coproduct fans c_a out into two circles, Ψ swaps them, the product
        // folds them back; the resulting scalar on each fork must equal e_a.
        let cat = c5();
        let f = cat.field();
        let c = trace_unit_solve(&cat).unwrap();
        let e = unit_e(&cat).unwrap();
        for a in cat.object_ids() {
            let d = replay_delta(&cat, a);
            // Ψ swaps the two identical circles: no factor
            let m = replay_m(&cat, a);
            let got = f.mul(f.mul(c.coeff(a), d), m);
            assert_eq!(got, e.coeff(a), "object {}", cat.name(a));
        }
    }
}
