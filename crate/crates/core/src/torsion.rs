//! Reidemeister-Franz torsion of a based chain complex.
//!
//! In degree `p` the cell basis `c_p` is compared with the assembled basis
//! `b_p ⊔ ℓ_p(h_p) ⊔ s_p(b_{p-1})`, and the degree factor enters the product
//! with exponent `(-1)^(p+1)`. Only the absolute value is an invariant of the
//! homology bases; the sign depends on orderings and is reported as computed.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{BasedChainComplex, ComplexError, GradedBases, HomologyData};
use crate::par::{self, Execution};
use crate::ratlin::{
    add_scaled, change_of_basis_det, rat, rat_to_string, solve, zero_vector, BasisList, LinalgError, RatMatrix,
    Rational,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorsionError {
    #[error("assembled set in degree {degree} is not a basis")]
    NotABasis { degree: usize },
    #[error("invalid torsion choices in degree {degree}: {reason}")]
    InvalidChoices { degree: usize, reason: String },
    #[error("complex is not acyclic (betti numbers {betti:?})")]
    NotAcyclic { betti: Vec<usize> },
    #[error("oracle limited to total dimension {max}, got {got}")]
    Oversize { max: usize, got: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Nonzero torsion value together with its per-degree factors
/// `[b_p ⊔ ℓ_p(h_p) ⊔ s_p(b_{p-1}), c_p]` (before exponentiation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionValue {
    pub value: Rational,
    pub degree_factors: Vec<Rational>,
}

impl TorsionValue {
    pub fn abs(&self) -> Rational {
        self.value.abs()
    }

    pub fn report(&self) -> TorsionReport {
        TorsionReport {
            value: rat_to_string(&self.value),
            abs: rat_to_string(&self.abs()),
            degree_factors: self.degree_factors.iter().map(rat_to_string).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionReport {
    pub value: String,
    pub abs: String,
    pub degree_factors: Vec<String>,
}

/// Bases `b_p` of the boundaries, sections `s_p` and homology lifts `ℓ_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionChoices {
    /// Basis of `B_p` in `C_p`.
    pub b: Vec<BasisList>,
    /// `s[p][i]` is a preimage under `∂_p` of `b[p-1][i]`.
    pub s: Vec<BasisList>,
    /// `lift[p][k]` is the cycle chosen for the `k`-th canonical class of `H_p`.
    pub lift: Vec<BasisList>,
}

/// `b_p = B_p`, canonical sections, canonical representatives.
pub fn default_choices(c: &BasedChainComplex, h: &HomologyData) -> TorsionChoices {
    let n = c.len();
    let b: Vec<BasisList> = h.degrees.iter().map(|d| d.boundaries.clone()).collect();
    let s = (0..n)
        .map(|p| {
            if p == 0 {
                return BasisList::empty(c.dim(0));
            }
            let del = c.boundary(p);
            let vectors = b[p - 1]
                .vectors
                .iter()
                .map(|v| solve(&del, v).expect("boundary vectors have preimages"))
                .collect();
            BasisList { ambient_dim: c.dim(p), vectors }
        })
        .collect();
    let lift = h.degrees.iter().map(|d| d.representatives.clone()).collect();
    TorsionChoices { b, s, lift }
}

fn random_coefficient(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    rat(rng.random_range(lo..=hi))
}

fn random_invertible(rng: &mut ChaCha8Rng, k: usize) -> RatMatrix {
    loop {
        let entries = (0..k * k).map(|_| random_coefficient(rng, -3, 3)).collect();
        let m = RatMatrix::from_entries(k, k, entries).expect("square by construction");
        if m.rank() == k {
            return m;
        }
    }
}

fn combine(basis: &BasisList, coeffs: &[Rational]) -> Vec<Rational> {
    let mut out = zero_vector(basis.ambient_dim);
    for (v, k) in basis.vectors.iter().zip(coeffs) {
        add_scaled(&mut out, v, k);
    }
    out
}

/// Valid choices perturbed at random: `b_p` recombined by an invertible
/// matrix, sections shifted by cycles, lifts shifted by boundaries.
/// Deterministic per seed.
pub fn random_choices(c: &BasedChainComplex, h: &HomologyData, seed: u64) -> TorsionChoices {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = c.len();
    let mut b = Vec::with_capacity(n);
    for d in &h.degrees {
        let k = d.boundaries.len();
        let mix = random_invertible(&mut rng, k);
        let vectors = (0..k).map(|j| combine(&d.boundaries, &mix.column(j))).collect();
        b.push(BasisList { ambient_dim: d.boundaries.ambient_dim, vectors });
    }
    let mut s = Vec::with_capacity(n);
    for p in 0..n {
        if p == 0 {
            s.push(BasisList::empty(c.dim(0)));
            continue;
        }
        let del = c.boundary(p);
        let cycles = &h.degrees[p].cycles;
        let vectors = b[p - 1]
            .vectors
            .iter()
            .map(|v| {
                let mut x = solve(&del, v).expect("boundary vectors have preimages");
                let shift: Vec<Rational> = (0..cycles.len()).map(|_| random_coefficient(&mut rng, -2, 2)).collect();
                add_scaled(&mut x, &combine(cycles, &shift), &Rational::one());
                x
            })
            .collect();
        s.push(BasisList { ambient_dim: c.dim(p), vectors });
    }
    let lift = h
        .degrees
        .iter()
        .map(|d| {
            let vectors = d
                .representatives
                .vectors
                .iter()
                .map(|r| {
                    let shift: Vec<Rational> =
                        (0..d.boundaries.len()).map(|_| random_coefficient(&mut rng, -2, 2)).collect();
                    let mut v = r.clone();
                    add_scaled(&mut v, &combine(&d.boundaries, &shift), &Rational::one());
                    v
                })
                .collect();
            BasisList { ambient_dim: d.representatives.ambient_dim, vectors }
        })
        .collect();
    TorsionChoices { b, s, lift }
}

/// Random homology bases: the canonical classes recombined by an invertible
/// matrix, representatives shifted by boundaries. Deterministic per seed.
pub fn random_homology_bases(c: &BasedChainComplex, h: &HomologyData, seed: u64) -> GradedBases {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let degrees = (0..c.len())
        .map(|p| {
            let d = &h.degrees[p];
            let k = d.representatives.len();
            let mix = random_invertible(&mut rng, k);
            let vectors = (0..k)
                .map(|j| {
                    let mut v = combine(&d.representatives, &mix.column(j));
                    let shift: Vec<Rational> =
                        (0..d.boundaries.len()).map(|_| random_coefficient(&mut rng, -2, 2)).collect();
                    add_scaled(&mut v, &combine(&d.boundaries, &shift), &Rational::one());
                    v
                })
                .collect();
            BasisList { ambient_dim: c.dim(p), vectors }
        })
        .collect();
    GradedBases { degrees }
}

fn check_choices(c: &BasedChainComplex, h: &HomologyData, ch: &TorsionChoices) -> Result<(), TorsionError> {
    let n = c.len();
    if ch.b.len() != n || ch.s.len() != n || ch.lift.len() != n {
        return Err(TorsionError::InvalidChoices { degree: 0, reason: "wrong number of degrees".into() });
    }
    for p in 0..n {
        let bad = |reason: &str| TorsionError::InvalidChoices { degree: p, reason: reason.into() };
        if ch.lift[p].len() != h.betti_at(p) {
            return Err(bad("one lift per homology class is required"));
        }
        if p >= 1 {
            let del = c.boundary(p);
            if ch.s[p].len() != ch.b[p - 1].len() {
                return Err(bad("one section vector per boundary basis vector is required"));
            }
            for (x, target) in ch.s[p].vectors.iter().zip(&ch.b[p - 1].vectors) {
                if &del.mul_vec(x)? != target {
                    return Err(bad("section does not map onto the boundary basis"));
                }
            }
            for v in &ch.lift[p].vectors {
                if !del.mul_vec(v)?.iter().all(Zero::is_zero) {
                    return Err(bad("lift is not a cycle"));
                }
            }
        }
    }
    Ok(())
}

/// `ℓ_p(h_p)`: lifts of the user's classes through the chosen section.
fn lift_user_basis(
    h: &HomologyData,
    p: usize,
    user: &BasisList,
    lift: &BasisList,
) -> Result<BasisList, TorsionError> {
    let vectors = user
        .vectors
        .iter()
        .map(|v| Ok(combine(lift, &h.class_coordinates(p, v)?)))
        .collect::<Result<Vec<_>, TorsionError>>()?;
    Ok(BasisList { ambient_dim: user.ambient_dim, vectors })
}

/// Torsion with respect to the cell bases and the homology bases `hb`.
pub fn torsion(
    c: &BasedChainComplex,
    hb: &GradedBases,
    choices: &TorsionChoices,
) -> Result<TorsionValue, TorsionError> {
    let h = c.homology();
    hb.check(c, &h)?;
    check_choices(c, &h, choices)?;
    let mut value = Rational::one();
    let mut degree_factors = Vec::with_capacity(c.len());
    for p in 0..c.len() {
        let lifted = lift_user_basis(&h, p, &hb.degrees[p], &choices.lift[p])?;
        let assembled = choices.b[p].concat(&lifted).concat(&choices.s[p]);
        let factor = match change_of_basis_det(&assembled, &BasisList::standard(c.dim(p))) {
            Ok(d) => d,
            Err(LinalgError::Dependent) | Err(LinalgError::DimensionMismatch(_)) => {
                return Err(TorsionError::NotABasis { degree: p })
            }
            Err(e) => return Err(e.into()),
        };
        if p % 2 == 1 {
            value *= &factor;
        } else {
            value /= &factor;
        }
        degree_factors.push(factor);
    }
    Ok(TorsionValue { value, degree_factors })
}

/// Torsion with default choices.
pub fn torsion_default(c: &BasedChainComplex, hb: &GradedBases) -> Result<TorsionValue, TorsionError> {
    let h = c.homology();
    torsion(c, hb, &default_choices(c, &h))
}

/// Torsion of an exact complex (empty homology bases).
pub fn torsion_acyclic(c: &BasedChainComplex, choices: &TorsionChoices) -> Result<TorsionValue, TorsionError> {
    let h = c.homology();
    let betti = h.betti();
    if betti.iter().any(|&b| b != 0) {
        return Err(TorsionError::NotAcyclic { betti });
    }
    let hb = GradedBases { degrees: (0..c.len()).map(|p| BasisList::empty(c.dim(p))).collect() };
    torsion(c, &hb, choices)
}

/// Absolute torsion for each seed of a sweep, in seed order.
pub fn independence_sweep(
    c: &BasedChainComplex,
    hb: &GradedBases,
    seeds: &[u64],
    exec: Execution,
) -> Result<Vec<TorsionValue>, TorsionError> {
    let h = c.homology();
    par::map(exec, seeds, |&seed| torsion(c, hb, &random_choices(c, &h, seed)))
        .into_iter()
        .collect()
}

/// Largest total dimension accepted by [`torsion_oracle`].
pub const ORACLE_MAX_DIM: usize = 12;

/// Torsion by an independent route: the complex is made acyclic by adjoining
/// one cell per homology basis vector (with boundary that vector), then the
/// torsion is read off square minors of the boundary maps found by exhaustive
/// subset search. Determinants use Laplace expansion.
pub fn torsion_oracle(c: &BasedChainComplex, hb: &GradedBases) -> Result<TorsionValue, TorsionError> {
    if c.total_dim() > ORACLE_MAX_DIM {
        return Err(TorsionError::Oversize { max: ORACLE_MAX_DIM, got: c.total_dim() });
    }
    let h = c.homology();
    hb.check(c, &h)?;

    // augmented complex: D_p = C_p ⊕ E_p, E_p has one cell per vector of h_{p-1}
    let n = c.len();
    let extra = |p: usize| if p >= 1 { hb.get(p - 1).map_or(0, BasisList::len) } else { 0 };
    let top = if hb.get(n.saturating_sub(1)).map_or(0, BasisList::len) > 0 { n + 1 } else { n };
    let dims: Vec<usize> = (0..top).map(|p| c.dim(p) + extra(p)).collect();
    let boundaries: Vec<RatMatrix> = (1..top)
        .map(|p| {
            let mut m = RatMatrix::zeros(dims[p - 1], dims[p]);
            let del = c.boundary(p);
            for r in 0..del.rows() {
                for col in 0..del.cols() {
                    m.set(r, col, del.get(r, col).clone());
                }
            }
            for (k, v) in hb.degrees[p - 1].vectors.iter().enumerate() {
                for (r, x) in v.iter().enumerate() {
                    m.set(r, c.dim(p) + k, x.clone());
                }
            }
            m
        })
        .collect();

    let mut chosen_prev: Vec<usize> = Vec::new();
    let mut value = Rational::one();
    let mut degree_factors = Vec::new();
    for p in 1..top {
        let rows: Vec<usize> = (0..dims[p - 1]).filter(|i| !chosen_prev.contains(i)).collect();
        let del = &boundaries[p - 1];
        let (cols, minor) = first_invertible_minor(del, &rows, dims[p])
            .ok_or(TorsionError::NotAcyclic { betti: h.betti() })?;
        // minor belongs to degree p-1, exponent (-1)^p
        if p % 2 == 0 {
            value *= &minor;
        } else {
            value /= &minor;
        }
        degree_factors.push(minor);
        chosen_prev = cols;
    }
    let leftover = dims.last().copied().unwrap_or(0) - chosen_prev.len();
    if leftover != 0 || (top == 1 && dims[0] != 0) {
        return Err(TorsionError::NotAcyclic { betti: h.betti() });
    }
    Ok(TorsionValue { value, degree_factors })
}

fn first_invertible_minor(m: &RatMatrix, rows: &[usize], ncols: usize) -> Option<(Vec<usize>, Rational)> {
    let k = rows.len();
    let mut subset: Vec<usize> = (0..k).collect();
    if k > ncols {
        return None;
    }
    loop {
        let d = laplace_det(&m.submatrix(rows, &subset));
        if !d.is_zero() {
            return Some((subset, d));
        }
        // next k-subset in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if subset[i] < ncols - k + i {
                subset[i] += 1;
                for j in i + 1..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Determinant by Laplace expansion along rows, memoised on the set of used columns.
fn laplace_det(m: &RatMatrix) -> Rational {
    fn go(m: &RatMatrix, used: u32, memo: &mut HashMap<u32, Rational>) -> Rational {
        let n = m.rows();
        let row = used.count_ones() as usize;
        if row == n {
            return Rational::one();
        }
        if let Some(v) = memo.get(&used) {
            return v.clone();
        }
        let mut acc = Rational::zero();
        let mut position = 0;
        for c in 0..n {
            if used & (1 << c) != 0 {
                continue;
            }
            let a = m.get(row, c);
            if !a.is_zero() {
                let term = a * go(m, used | (1 << c), memo);
                if position % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            position += 1;
        }
        memo.insert(used, acc.clone());
        acc
    }
    assert!(m.is_square() && m.rows() < 32);
    go(m, 0, &mut HashMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::{det, frac};

    fn two_term(k: i64) -> BasedChainComplex {
        BasedChainComplex::new(vec![1, 1], vec![RatMatrix::from_i64(&[&[k]])], None).unwrap()
    }

    fn circle() -> BasedChainComplex {
        BasedChainComplex::new(vec![1, 1], vec![RatMatrix::zeros(1, 1)], None).unwrap()
    }

    #[test]
    fn circle_default_choices_are_empty() {
        let c = circle();
        let h = c.homology();
        let ch = default_choices(&c, &h);
        assert!(ch.b[0].is_empty() && ch.b[1].is_empty());
        let hb = GradedBases::canonical(&h);
        assert_eq!(torsion(&c, &hb, &ch).unwrap().abs(), rat(1));
    }

    #[test]
    fn two_term_default_choices() {
        let c = two_term(2);
        let h = c.homology();
        let ch = default_choices(&c, &h);
        assert_eq!(ch.b[0].vectors, vec![vec![rat(2)]]);
        assert_eq!(ch.s[1].vectors, vec![vec![rat(1)]]);
        assert_eq!(torsion_acyclic(&c, &ch).unwrap().value, frac(1, 2));
    }

    #[test]
    fn acyclic_examples() {
        let id = two_term(1);
        assert_eq!(torsion_acyclic(&id, &default_choices(&id, &id.homology())).unwrap().value, rat(1));
        let three = two_term(3);
        assert_eq!(
            torsion_acyclic(&three, &default_choices(&three, &three.homology())).unwrap().abs(),
            frac(1, 3)
        );
        let c = circle();
        assert!(matches!(
            torsion_acyclic(&c, &default_choices(&c, &c.homology())),
            Err(TorsionError::NotAcyclic { .. })
        ));
    }

    #[test]
    fn random_choices_are_deterministic() {
        let c = two_term(2).direct_sum(&circle());
        let h = c.homology();
        assert_eq!(random_choices(&c, &h, 11), random_choices(&c, &h, 11));
    }

    #[test]
    fn invalid_choices_are_rejected() {
        let c = two_term(2);
        let h = c.homology();
        let mut ch = default_choices(&c, &h);
        ch.s[1].vectors[0] = vec![rat(5)];
        assert!(matches!(torsion_acyclic(&c, &ch), Err(TorsionError::InvalidChoices { degree: 1, .. })));
    }

    #[test]
    fn scaling_law() {
        let c = circle();
        let h = c.homology();
        let base = torsion_default(&c, &GradedBases::canonical(&h)).unwrap().abs();
        let mut hb = GradedBases::canonical(&h);
        hb.scale(0, 0, &rat(5));
        // degree 0 enters with exponent -1
        assert_eq!(torsion_default(&c, &hb).unwrap().abs(), base.clone() / rat(5));
        let mut hb = GradedBases::canonical(&h);
        hb.scale(1, 0, &rat(-7));
        assert_eq!(torsion_default(&c, &hb).unwrap().abs(), base * rat(7));
    }

    #[test]
    fn oracle_matches_small_examples() {
        for c in [two_term(2), two_term(3), circle(), two_term(5).direct_sum(&circle())] {
            let hb = GradedBases::canonical(&c.homology());
            assert_eq!(torsion_oracle(&c, &hb).unwrap().abs(), torsion_default(&c, &hb).unwrap().abs());
        }
    }

    #[test]
    fn oracle_rejects_oversize() {
        let big = BasedChainComplex::new(vec![13], vec![], None).unwrap();
        let hb = GradedBases::canonical(&big.homology());
        assert!(matches!(torsion_oracle(&big, &hb), Err(TorsionError::Oversize { .. })));
    }

    #[test]
    fn laplace_agrees_with_elimination() {
        let m = RatMatrix::from_i64(&[&[2, -1, 0, 3], &[1, 1, 4, 0], &[0, 5, -2, 1], &[3, 0, 1, 1]]);
        assert_eq!(laplace_det(&m), det(&m).unwrap());
    }
}
