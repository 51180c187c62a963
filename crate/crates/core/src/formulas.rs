//! Verifiers for the torsion identities of pants decompositions and the
//! calculators for doubles of 3-manifolds and products with surfaces.
//!
//! Every identity with a square root is checked on squares, so all
//! comparisons are exact equalities of rationals.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::complex::{BasedChainComplex, ComplexError, GradedBases};
use crate::mv::{adapted_bases, multiplicativity, normalize_delta, AdaptPattern, MvBases, MvError};
use crate::pairing::{delta_02, fundamental_class, period_matrix, symplectic_basis, PairingError};
use crate::par::{self, Execution};
use crate::ratlin::{det, rat, rat_to_string, unit_vector, LinalgError, Rational};
use crate::surf::{double, gluing_tree, pants, GluingCase, GluingTree, LeafKind, SurfaceError};
use crate::torsion::{
    default_choices, random_choices, random_homology_bases, torsion, torsion_default, TorsionError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Mv(#[from] MvError),
    #[error(transparent)]
    Torsion(#[from] TorsionError),
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{0} must be nonzero")]
    ZeroInput(&'static str),
    #[error("boundary component {0} has an empty list of pants torsions")]
    EmptyList(usize),
    #[error("boundary component {index} has {len} pants torsions; a closed surface of genus g has 2g-2")]
    OddList { index: usize, len: usize },
    #[error("need at least one boundary component")]
    NoBoundary,
    #[error("genus {0} is not supported here (need g >= 2)")]
    Genus(usize),
    #[error("need at least one trial")]
    NoTrials,
}

/// Outcome of an exact identity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub identity: String,
    pub lhs: String,
    pub rhs: String,
    pub equal: bool,
    pub witness: Value,
}

impl VerificationReport {
    fn new(identity: &str, lhs: &Rational, rhs: &Rational, witness: Value) -> Self {
        VerificationReport {
            identity: identity.to_string(),
            lhs: rat_to_string(lhs),
            rhs: rat_to_string(rhs),
            equal: lhs == rhs,
            witness,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn s(r: &Rational) -> String {
    rat_to_string(r)
}

/// Doubles the pants with adapted bases (the whole surface free) and checks
/// `|𝕋(Σ_{0,3})|² = |det Δ_{0,2} / det ℘|`.
pub fn thm1_verify() -> Result<VerificationReport, FormulaError> {
    let p = pants();
    let (x, dec) = double(&p)?;
    let given = MvBases::canonical(&dec);
    let ad = adapted_bases(&dec, &given, AdaptPattern::WholeFree)?;
    let t_pants = torsion_default(&dec.a, &ad.bases.a)?.abs();
    let lhs = &t_pants * &t_pants;
    let t_double = torsion_default(&dec.x, &ad.bases.x)?.abs();

    let gamma = symplectic_basis(&x)?;
    let hx = &ad.bases.x;
    let period = period_matrix(&x, &gamma, &hx.degrees[1])?;
    let d02 = delta_02(&x, &hx.degrees[0].vectors[0], &hx.degrees[2].vectors[0])?;
    let det_period = det(&period)?;
    let det_delta = d02.get(0, 0).clone();
    let rhs = (&det_delta / &det_period).abs();

    // normalization h_1 = Γ, h_0 = point, h_2 = fundamental class
    let canonical_period = det(&period_matrix(&x, &gamma, &gamma.cycles)?)?;
    let canonical_delta = delta_02(&x, &unit_vector(x.vertices().len(), 0), &fundamental_class(&x))?;
    let mut normalized = hx.clone();
    normalized.degrees[0].vectors[0] = unit_vector(x.vertices().len(), 0);
    normalized.degrees[1] = gamma.cycles.clone();
    normalized.degrees[2].vectors[0] = fundamental_class(&x);
    let t_normalized = torsion_default(&dec.x, &normalized)?.abs();

    let witness = json!({
        "pants_torsion": s(&t_pants),
        "double_torsion": s(&t_double),
        "pants_squared_equals_double": lhs == t_double,
        "les_torsion": s(&ad.torsion),
        "les_term_dets": ad.terms.iter().map(|t| s(&t.det)).collect::<Vec<_>>(),
        "les_display_dims": ad.les.display_dims(),
        "det_period": s(&det_period),
        "det_delta_02": s(&det_delta),
        "canonical_det_period": s(&canonical_period),
        "canonical_delta_02": s(canonical_delta.get(0, 0)),
        "canonical_double_torsion": s(&t_normalized),
    });
    Ok(VerificationReport::new("thm1", &lhs, &rhs, witness))
}

/// Per-leaf and per-node data collected while walking a gluing tree.
#[derive(Debug, Default)]
struct Walk {
    pants: Vec<(usize, Rational)>,
    cylinders: Vec<(usize, Rational)>,
    nodes: Vec<Value>,
}

fn walk(tree: &GluingTree, given: GradedBases, out: &mut Walk) -> Result<GradedBases, FormulaError> {
    match tree {
        GluingTree::Leaf { surface, kind } => {
            let t = torsion_default(surface.complex(), &given)?.abs();
            match kind {
                LeafKind::Pants(nu) => out.pants.push((*nu, t)),
                LeafKind::Cylinder(nu) => out.cylinders.push((*nu, t)),
            }
            Ok(given)
        }
        GluingTree::Node { decomposition, case, a, b, .. } => {
            let dec = decomposition.as_ref();
            let mut bases = MvBases::canonical(dec);
            bases.x = given;
            if *case == GluingCase::Case3 {
                bases = normalize_delta(dec, &bases)?;
            }
            let ad = adapted_bases(dec, &bases, AdaptPattern::Gluing)?;
            let m = multiplicativity(dec, &ad.bases)?;
            out.nodes.push(json!({
                "case": case,
                "glued": dec.circle_names,
                "les_dims": ad.les.dims(),
                "les_torsion": s(&ad.torsion),
                "intersection_torsion": s(&m.torsion_i),
                "whole_torsion": s(&m.torsion_x),
                "piece_torsions": [s(&m.torsion_a), s(&m.torsion_b)],
                "multiplicative": m.holds(),
            }));
            walk(a, ad.bases.a.clone(), out)?;
            walk(b, ad.bases.b.clone(), out)?;
            Ok(ad.bases.x)
        }
    }
}

/// Product-over-pants identity with the root bases given explicitly.
pub fn thm2_verify_with_bases(g: usize, n: usize, root: Option<GradedBases>) -> Result<VerificationReport, FormulaError> {
    let tree = gluing_tree(g, n)?;
    let c = tree.surface().complex();
    let given = root.unwrap_or_else(|| GradedBases::canonical(&c.homology()));
    let mut w = Walk::default();
    let used = walk(&tree, given, &mut w)?;
    let lhs = torsion_default(c, &used)?.abs();
    let rhs = w.pants.iter().fold(Rational::one(), |acc, (_, t)| acc * t);
    let witness = json!({
        "genus": g,
        "boundary_count": n,
        "factor_count": w.pants.len(),
        "pants_torsions": w.pants.iter().map(|(nu, t)| json!({"piece": nu, "torsion": s(t)})).collect::<Vec<_>>(),
        "cylinder_torsions": w.cylinders.iter().map(|(nu, t)| json!({"piece": nu, "torsion": s(t)})).collect::<Vec<_>>(),
        "gluings": w.nodes,
    });
    Ok(VerificationReport::new("thm2", &lhs, &rhs, witness))
}

/// `|𝕋(Σ_{g,n})| = ∏ |𝕋(Σ_{0,3}^ν)|` over the `2g-2+n` pants. Seed 0 uses the
/// canonical bases of `Σ_{g,n}`; other seeds use random bases.
pub fn thm2_verify(g: usize, n: usize, seed: u64) -> Result<VerificationReport, FormulaError> {
    let root = if seed == 0 {
        None
    } else {
        let tree = gluing_tree(g, n)?;
        let c = tree.surface().complex();
        Some(random_homology_bases(c, &c.homology(), seed))
    };
    let mut report = thm2_verify_with_bases(g, n, root)?;
    report.witness["seed"] = json!(seed);
    Ok(report)
}

/// One gluing `Σ_{g-1,1} ∪ Σ_{1,1} = Σ_{g,0}` with `δ_2(h_2) = h_1(𝕊_1)`.
pub fn case3_verify(g: usize) -> Result<VerificationReport, FormulaError> {
    if g < 2 {
        return Err(FormulaError::Genus(g));
    }
    let tree = gluing_tree(g, 0)?;
    let GluingTree::Node { decomposition, case, .. } = &tree else {
        unreachable!("closed surfaces are glued")
    };
    debug_assert_eq!(*case, GluingCase::Case3);
    let dec = decomposition.as_ref();
    let given = normalize_delta(dec, &MvBases::canonical(dec))?;
    let ad = adapted_bases(dec, &given, AdaptPattern::Gluing)?;
    let m = multiplicativity(dec, &ad.bases)?;
    let lhs = m.torsion_x.clone();
    let rhs = &m.torsion_a * &m.torsion_b;
    let witness = json!({
        "genus": g,
        "les_torsion": s(&ad.torsion),
        "les_dims": ad.les.dims(),
        "intersection_torsion": s(&m.torsion_i),
        "torsion_rest": s(&m.torsion_a),
        "torsion_torus": s(&m.torsion_b),
        "positive": lhs > Rational::zero() && rhs > Rational::zero(),
    });
    Ok(VerificationReport::new("case3", &lhs, &rhs, witness))
}

/// Adapted Mayer-Vietoris torsion at every gluing of `Σ_{g,n}`: `lhs` is the
/// product of the sequence torsions, `rhs` is 1, and `equal` requires each
/// one to be exactly 1.
pub fn mv_verify(g: usize, n: usize) -> Result<VerificationReport, FormulaError> {
    let tree = gluing_tree(g, n)?;
    let c = tree.surface().complex();
    let mut w = Walk::default();
    walk(&tree, GradedBases::canonical(&c.homology()), &mut w)?;
    let torsions: Vec<Rational> = w
        .nodes
        .iter()
        .map(|v| crate::ratlin::parse_rational(v["les_torsion"].as_str().expect("string")).expect("valid"))
        .collect();
    let lhs = torsions.iter().fold(Rational::one(), |acc, t| acc * t);
    let all_one = torsions.iter().all(One::is_one);
    let mut report = VerificationReport::new("mv_adapted", &lhs, &rat(1), json!({ "gluings": w.nodes }));
    report.equal = all_one;
    Ok(report)
}

/// `|𝕋|` of `c` for `trials` random choices starting at `seed`; equal when
/// all agree with the default choices.
pub fn independence_verify(
    c: &BasedChainComplex,
    bases: &GradedBases,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<VerificationReport, FormulaError> {
    if trials == 0 {
        return Err(FormulaError::NoTrials);
    }
    let h = c.homology();
    let base = torsion(c, bases, &default_choices(c, &h))?.abs();
    let seeds: Vec<u64> = (0..trials as u64).map(|k| seed.wrapping_add(k)).collect();
    let values = par::map(exec, &seeds, |&sd| torsion(c, bases, &random_choices(c, &h, sd)).map(|t| t.abs()))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let odd = values.iter().find(|v| **v != base).cloned();
    let rhs = odd.clone().unwrap_or_else(|| base.clone());
    let witness = json!({
        "trials": trials,
        "first_seed": seed,
        "values": values.iter().map(s).collect::<Vec<_>>(),
    });
    Ok(VerificationReport::new("independence", &base, &rhs, witness))
}

/// Squared torsion of a double of a 3-manifold whose boundary components are
/// given by the torsions of their pants: `∏_{i,j} |t_{ij}| · |𝕋(ℋ)|`.
pub fn double_3mfd_torsion(pants_torsions: &[Vec<Rational>], mv_torsion: &Rational) -> Result<Rational, FormulaError> {
    if pants_torsions.is_empty() {
        return Err(FormulaError::NoBoundary);
    }
    if mv_torsion.is_zero() {
        return Err(FormulaError::ZeroInput("Mayer-Vietoris torsion"));
    }
    let mut acc = mv_torsion.abs();
    for (index, list) in pants_torsions.iter().enumerate() {
        if list.is_empty() {
            return Err(FormulaError::EmptyList(index));
        }
        if list.len() % 2 != 0 {
            return Err(FormulaError::OddList { index, len: list.len() });
        }
        for t in list {
            if t.is_zero() {
                return Err(FormulaError::ZeroInput("pants torsion"));
            }
            acc *= t.abs();
        }
    }
    Ok(acc)
}

/// Squared torsion of `M × Σ`: `|tM|^{χ(Σ)} · |tΣ|^{χ(M)} · |tH|`.
pub fn product_manifold_torsion(
    t_m: &Rational,
    t_sigma: &Rational,
    chi_m: i64,
    chi_sigma: i64,
    t_h: &Rational,
) -> Result<Rational, FormulaError> {
    for (name, v) in [("torsion of M", t_m), ("torsion of the surface", t_sigma), ("Mayer-Vietoris torsion", t_h)] {
        if v.is_zero() {
            return Err(FormulaError::ZeroInput(name));
        }
    }
    Ok(pow(&t_m.abs(), chi_sigma) * pow(&t_sigma.abs(), chi_m) * t_h.abs())
}

fn pow(x: &Rational, e: i64) -> Rational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

/// Runs [`thm2_verify`] over a grid of `(g, n, seed)`, in input order.
pub fn thm2_grid(cases: &[(usize, usize, u64)], exec: Execution) -> Vec<Result<VerificationReport, FormulaError>> {
    par::map(exec, cases, |&(g, n, seed)| thm2_verify(g, n, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::frac;
    use proptest::prelude::*;

    #[test]
    fn period_matrix_identity() {
        let r = thm1_verify().unwrap();
        assert!(r.equal, "{}", r.to_json_string());
        assert_eq!(r.lhs, "1");
        assert_eq!(r.witness["pants_squared_equals_double"], json!(true));
        assert_eq!(r.witness["canonical_det_period"], json!("1"));
        assert_eq!(r.witness["canonical_delta_02"], json!("1"));
        assert_eq!(r.witness["les_torsion"], json!("1"));
    }

    #[test]
    fn pants_product_small() {
        for (g, n) in [(0, 3), (0, 4), (0, 5), (1, 1), (1, 2), (2, 0), (2, 1)] {
            let r = thm2_verify(g, n, 0).unwrap();
            assert!(r.equal, "g={g} n={n}: {}", r.to_json_string());
            assert_eq!(r.witness["factor_count"], json!(2 * g + n - 2));
            for node in r.witness["gluings"].as_array().unwrap() {
                assert_eq!(node["les_torsion"], json!("1"));
                assert_eq!(node["multiplicative"], json!(true));
            }
        }
    }

    #[test]
    fn pants_product_random_bases() {
        for seed in 1..4 {
            let r = thm2_verify(2, 1, seed).unwrap();
            assert!(r.equal, "{}", r.to_json_string());
        }
    }

    #[test]
    fn pants_product_rescaled_root() {
        let tree = gluing_tree(1, 2).unwrap();
        let c = tree.surface().complex();
        let mut bases = GradedBases::canonical(&c.homology());
        let base = thm2_verify_with_bases(1, 2, Some(bases.clone())).unwrap();
        bases.scale(1, 0, &frac(7, 2));
        let scaled = thm2_verify_with_bases(1, 2, Some(bases)).unwrap();
        assert!(base.equal && scaled.equal);
        assert_ne!(base.lhs, scaled.lhs);
    }

    #[test]
    fn case3() {
        for g in 2..=3 {
            let r = case3_verify(g).unwrap();
            assert!(r.equal, "{}", r.to_json_string());
            assert_eq!(r.witness["positive"], json!(true));
        }
        assert_eq!(case3_verify(1).unwrap_err(), FormulaError::Genus(1));
    }

    #[test]
    fn mv_grid() {
        for (g, n) in [(2, 0), (2, 1), (1, 1)] {
            assert!(mv_verify(g, n).unwrap().equal);
        }
    }

    #[test]
    fn calculators() {
        let one = rat(1);
        assert_eq!(double_3mfd_torsion(&[vec![one.clone(), one.clone()]], &one).unwrap(), one);
        let t = double_3mfd_torsion(&[vec![rat(2), frac(1, 3)], vec![rat(5), rat(1), rat(-1), rat(2)]], &frac(3, 4)).unwrap();
        assert_eq!(t, frac(2 * 5 * 2 * 3, 3 * 4));
        assert_eq!(double_3mfd_torsion(&[], &one).unwrap_err(), FormulaError::NoBoundary);
        assert_eq!(double_3mfd_torsion(&[vec![]], &one).unwrap_err(), FormulaError::EmptyList(0));
        assert!(matches!(double_3mfd_torsion(&[vec![one.clone()]], &one), Err(FormulaError::OddList { .. })));
        assert!(double_3mfd_torsion(&[vec![one.clone(), one.clone()]], &rat(0)).is_err());

        assert_eq!(product_manifold_torsion(&one, &one, 2, -2, &one).unwrap(), one);
        let v = product_manifold_torsion(&rat(3), &rat(5), 2, -2, &rat(7)).unwrap();
        assert_eq!(v, frac(25 * 7, 9));
        assert!(product_manifold_torsion(&rat(0), &one, 0, 0, &one).is_err());
    }

    #[test]
    fn closed_surface_torsion_against_pairings() {
        // With the (-1)^(p+1) exponent convention the torsion of a closed
        // surface is |det ℘| / |det Δ_{0,2}|, the reciprocal of the quotient
        // in the usual statement of the period-matrix identity. Both are 1 in
        // the canonical normalization.
        let (x, dec) = double(&pants()).unwrap();
        let gamma = symplectic_basis(&x).unwrap();
        let mut hb = GradedBases::canonical(&dec.x.homology());
        hb.degrees[0].vectors[0] = unit_vector(x.vertices().len(), 0);
        hb.degrees[1] = gamma.cycles.clone();
        hb.degrees[2].vectors[0] = fundamental_class(&x);
        assert_eq!(torsion_default(&dec.x, &hb).unwrap().abs(), rat(1));
        for (k0, k1, k2) in [(rat(1), rat(3), rat(1)), (rat(2), rat(1), rat(5)), (frac(1, 2), frac(7, 3), rat(-4))] {
            let mut h = hb.clone();
            h.scale(0, 0, &k0);
            h.scale(1, 0, &k1);
            h.scale(2, 0, &k2);
            let t = torsion_default(&dec.x, &h).unwrap().abs();
            let p = det(&period_matrix(&x, &gamma, &h.degrees[1]).unwrap()).unwrap();
            let d = delta_02(&x, &h.degrees[0].vectors[0], &h.degrees[2].vectors[0]).unwrap().get(0, 0).clone();
            assert_eq!(t, (p / d).abs());
        }
    }

    fn nonzero() -> impl Strategy<Value = Rational> {
        (1i64..50, 1i64..50, any::<bool>()).prop_map(|(n, d, neg)| frac(if neg { -n } else { n }, d))
    }

    proptest! {
        #[test]
        fn double_is_multiplicative(a in nonzero(), b in nonzero(), c in nonzero(), k in nonzero()) {
            let base = double_3mfd_torsion(&[vec![a.clone(), b.clone()]], &c).unwrap();
            let scaled = double_3mfd_torsion(&[vec![&a * &k, b]], &c).unwrap();
            prop_assert_eq!(scaled, base * k.abs());
        }

        #[test]
        fn product_is_multiplicative(a in nonzero(), b in nonzero(), h in nonzero(), k in nonzero(), cm in -3i64..=3, cs in -3i64..=3) {
            let base = product_manifold_torsion(&a, &b, cm, cs, &h).unwrap();
            let in_m = product_manifold_torsion(&(&a * &k), &b, cm, cs, &h).unwrap();
            prop_assert_eq!(in_m, &base * pow(&k.abs(), cs));
            let in_h = product_manifold_torsion(&a, &b, cm, cs, &(&h * &k)).unwrap();
            prop_assert_eq!(in_h, &base * k.abs());
        }
    }
}
