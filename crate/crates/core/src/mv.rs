//! Mayer-Vietoris machinery for a decomposition `X = A ∪ B` with `A ∩ B = I`:
//! the short exact sequence of cellular chain complexes, the long exact
//! homology sequence viewed as an acyclic based complex `ℋ`, homology bases
//! adapted so that `𝕋(ℋ) = 1`, and the multiplicativity check.
//!
//! Terms of `ℋ` are indexed `C_{3q} = H_q(X)`, `C_{3q+1} = H_q(A) ⊕ H_q(B)`,
//! `C_{3q+2} = H_q(I)`; trailing zero terms are dropped.

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::complex::{matrix_to_json, vectors_to_json, BasedChainComplex, ComplexError, GradedBases, HomologyData};
use crate::ratlin::{
    change_of_basis_det, image_basis, rat_to_string, scale_vector, solve, BasisList, LinalgError, RatMatrix, Rational,
};
use crate::torsion::{default_choices, torsion_acyclic, torsion_default, TorsionError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MvError {
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("long exact sequence is not exact at term {term} (construction bug)")]
    NotExact { term: usize },
    #[error("term {term} is fixed and cannot be normalized from its neighbours")]
    OverDetermined { term: usize },
    #[error("normalization needs {0}")]
    Normalization(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Torsion(#[from] TorsionError),
}

/// Degreewise matrices of a chain map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainMap {
    pub degrees: Vec<RatMatrix>,
}

impl ChainMap {
    pub fn new(degrees: Vec<RatMatrix>) -> Self {
        ChainMap { degrees }
    }

    pub fn degree(&self, p: usize) -> &RatMatrix {
        &self.degrees[p]
    }

    /// `∂' f_p = f_{p-1} ∂` in every degree, with matching shapes.
    pub fn is_chain_map(&self, src: &BasedChainComplex, tgt: &BasedChainComplex) -> bool {
        if self.degrees.len() != src.len() || src.len() != tgt.len() {
            return false;
        }
        for (p, f) in self.degrees.iter().enumerate() {
            if f.rows() != tgt.dim(p) || f.cols() != src.dim(p) {
                return false;
            }
            if p >= 1 {
                let lhs = tgt.boundary(p).mul(f).expect("shapes checked");
                let rhs = self.degrees[p - 1].mul(&src.boundary(p)).expect("shapes checked");
                if lhs != rhs {
                    return false;
                }
            }
        }
        true
    }
}

/// `X = A ∪ B`, `I = A ∩ B`, with cellular inclusion maps. All four complexes
/// have the same number of stored degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub x: BasedChainComplex,
    pub a: BasedChainComplex,
    pub b: BasedChainComplex,
    pub i: BasedChainComplex,
    pub i_to_a: ChainMap,
    pub i_to_b: ChainMap,
    pub a_to_x: ChainMap,
    pub b_to_x: ChainMap,
    /// Names of the glued circles, in the order of the cells of `I`.
    pub circle_names: Vec<String>,
}

/// `0 → C(I) → C(A) ⊕ C(B) → C(X) → 0` with `x ↦ (x, -x)` and `(u, v) ↦ u + v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortExact {
    pub inj: Vec<RatMatrix>,
    pub surj: Vec<RatMatrix>,
}

pub fn short_exact(dec: &Decomposition) -> Result<ShortExact, MvError> {
    let n = dec.x.len();
    if [dec.a.len(), dec.b.len(), dec.i.len()].iter().any(|&l| l != n) {
        return Err(MvError::InvalidDecomposition("complexes have different lengths".into()));
    }
    let maps = [
        (&dec.i_to_a, &dec.i, &dec.a, "I→A"),
        (&dec.i_to_b, &dec.i, &dec.b, "I→B"),
        (&dec.a_to_x, &dec.a, &dec.x, "A→X"),
        (&dec.b_to_x, &dec.b, &dec.x, "B→X"),
    ];
    for (f, s, t, name) in maps {
        if !f.is_chain_map(s, t) {
            return Err(MvError::InvalidDecomposition(format!("{name} is not a chain map")));
        }
    }
    let mut inj = Vec::with_capacity(n);
    let mut surj = Vec::with_capacity(n);
    for p in 0..n {
        let i = dec.i_to_a.degree(p).vstack(&dec.i_to_b.degree(p).scaled(&-Rational::one()))?;
        let s = dec.a_to_x.degree(p).hstack(dec.b_to_x.degree(p))?;
        if !s.mul(&i)?.is_zero() {
            return Err(MvError::InvalidDecomposition(format!("composite is nonzero in degree {p}")));
        }
        if i.rank() != dec.i.dim(p) {
            return Err(MvError::InvalidDecomposition(format!("I does not embed in degree {p}")));
        }
        if s.rank() != dec.x.dim(p) {
            return Err(MvError::InvalidDecomposition(format!("cells of X are not covered in degree {p}")));
        }
        if dec.a.dim(p) + dec.b.dim(p) != dec.x.dim(p) + dec.i.dim(p) {
            return Err(MvError::InvalidDecomposition(format!("not exact in the middle in degree {p}")));
        }
        inj.push(i);
        surj.push(s);
    }
    Ok(ShortExact { inj, surj })
}

/// Homology bases of the four spaces of a decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MvBases {
    pub x: GradedBases,
    pub a: GradedBases,
    pub b: GradedBases,
    pub i: GradedBases,
}

impl MvBases {
    pub fn canonical(dec: &Decomposition) -> Self {
        MvBases {
            x: GradedBases::canonical(&dec.x.homology()),
            a: GradedBases::canonical(&dec.a.homology()),
            b: GradedBases::canonical(&dec.b.homology()),
            i: GradedBases::canonical(&dec.i.homology()),
        }
    }
}

/// A space with a homology basis; converts cycles to coordinates in that basis.
struct BasedHomology<'a> {
    h: HomologyData,
    hb: &'a GradedBases,
    frames: Vec<RatMatrix>,
}

impl<'a> BasedHomology<'a> {
    fn new(c: &BasedChainComplex, hb: &'a GradedBases) -> Result<Self, MvError> {
        let h = c.homology();
        hb.check(c, &h)?;
        let frames = (0..c.len()).map(|p| h.class_matrix(p, &hb.degrees[p])).collect::<Result<_, _>>()?;
        Ok(BasedHomology { h, hb, frames })
    }

    fn betti(&self, q: usize) -> usize {
        self.h.betti_at(q)
    }

    fn coords(&self, q: usize, v: &[Rational]) -> Result<Vec<Rational>, MvError> {
        let canonical = self.h.class_coordinates(q, v)?;
        Ok(solve(&self.frames[q], &canonical)?)
    }

    fn basis(&self, q: usize) -> &BasisList {
        &self.hb.degrees[q]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermSpace {
    Whole,
    Pieces,
    Intersection,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LesTerm {
    pub label: String,
    pub space: TermSpace,
    pub degree: usize,
    pub dim: usize,
    /// For a pieces term: the dimensions of the `A` and `B` blocks.
    pub split: Option<(usize, usize)>,
}

/// The long exact sequence as an acyclic based complex: the cell basis of
/// each term is the given homology basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LongExactSequence {
    pub terms: Vec<LesTerm>,
    complex: BasedChainComplex,
}

impl LongExactSequence {
    pub fn complex(&self) -> &BasedChainComplex {
        &self.complex
    }

    /// `maps[p - 1]` is the map out of term `p`.
    pub fn maps(&self) -> &[RatMatrix] {
        self.complex.boundaries()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.dim).collect()
    }

    /// Dimensions from the leftmost term of the sequence (`H_top(X)`) down to `H_0(X)`.
    pub fn display_dims(&self) -> Vec<usize> {
        self.dims().into_iter().rev().collect()
    }

    pub fn alternating_sum(&self) -> i64 {
        self.complex.euler_characteristic()
    }

    pub fn torsion(&self) -> Result<Rational, MvError> {
        let h = self.complex.homology();
        Ok(torsion_acyclic(&self.complex, &default_choices(&self.complex, &h))?.value)
    }
}

/// Class of `δ[z]` in `H_q(I)` coordinates for a cycle `z` of `X_{q+1}`: lift
/// `z` through the surjection, add `inj(shift)` to the lift, take `∂`, pull
/// back through the injection.
fn zigzag(
    dec: &Decomposition,
    ses: &ShortExact,
    q: usize,
    z: &[Rational],
    shift: Option<Vec<Rational>>,
) -> Result<Vec<Rational>, MvError> {
    let mut lift = solve(&ses.surj[q + 1], z)?;
    if let Some(x) = shift {
        let extra = ses.inj[q + 1].mul_vec(&x)?;
        for (l, e) in lift.iter_mut().zip(extra) {
            *l += e;
        }
    }
    let na = dec.a.dim(q + 1);
    let du = dec.a.boundary(q + 1).mul_vec(&lift[..na])?;
    let dv = dec.b.boundary(q + 1).mul_vec(&lift[na..])?;
    let stacked: Vec<Rational> = du.into_iter().chain(dv).collect();
    solve(&ses.inj[q], &stacked).map_err(|_| MvError::NotExact { term: 3 * q + 2 })
}

fn les_with(dec: &Decomposition, bases: &MvBases, salt: Option<i64>) -> Result<LongExactSequence, MvError> {
    let ses = short_exact(dec)?;
    let hx = BasedHomology::new(&dec.x, &bases.x)?;
    let ha = BasedHomology::new(&dec.a, &bases.a)?;
    let hb = BasedHomology::new(&dec.b, &bases.b)?;
    let hi = BasedHomology::new(&dec.i, &bases.i)?;
    let n = dec.x.len();

    let mut terms = Vec::new();
    for q in 0..n {
        terms.push(LesTerm {
            label: format!("H_{q}(X)"),
            space: TermSpace::Whole,
            degree: q,
            dim: hx.betti(q),
            split: None,
        });
        terms.push(LesTerm {
            label: format!("H_{q}(A)+H_{q}(B)"),
            space: TermSpace::Pieces,
            degree: q,
            dim: ha.betti(q) + hb.betti(q),
            split: Some((ha.betti(q), hb.betti(q))),
        });
        terms.push(LesTerm {
            label: format!("H_{q}(I)"),
            space: TermSpace::Intersection,
            degree: q,
            dim: hi.betti(q),
            split: None,
        });
    }

    let mut maps = Vec::new();
    for p in 1..terms.len() {
        let q = p / 3;
        let m = match p % 3 {
            1 => {
                let mut cols = Vec::new();
                for v in &ha.basis(q).vectors {
                    cols.push(hx.coords(q, &dec.a_to_x.degree(q).mul_vec(v)?)?);
                }
                for v in &hb.basis(q).vectors {
                    cols.push(hx.coords(q, &dec.b_to_x.degree(q).mul_vec(v)?)?);
                }
                RatMatrix::from_columns(terms[p - 1].dim, &cols)?
            }
            2 => {
                let mut cols = Vec::new();
                for v in &hi.basis(q).vectors {
                    let mut col = ha.coords(q, &dec.i_to_a.degree(q).mul_vec(v)?)?;
                    let neg: Vec<Rational> = dec.i_to_b.degree(q).mul_vec(v)?.into_iter().map(|x| -x).collect();
                    col.extend(hb.coords(q, &neg)?);
                    cols.push(col);
                }
                RatMatrix::from_columns(terms[p - 1].dim, &cols)?
            }
            _ => {
                // δ: H_{q}(X) → H_{q-1}(I)
                let mut cols = Vec::new();
                for (k, z) in hx.basis(q).vectors.iter().enumerate() {
                    let shift = salt.map(|t| {
                        (0..dec.i.dim(q))
                            .map(|j| Rational::from_integer(((t + 7 * k as i64 + 3 * j as i64).rem_euclid(5) - 2).into()))
                            .collect()
                    });
                    let x = zigzag(dec, &ses, q - 1, z, shift)?;
                    cols.push(hi.coords(q - 1, &x)?);
                }
                RatMatrix::from_columns(terms[p - 1].dim, &cols)?
            }
        };
        maps.push(m);
    }

    while terms.len() > 1 && terms.last().is_some_and(|t| t.dim == 0) {
        terms.pop();
        maps.pop();
    }
    let labels = terms.iter().map(|t| (0..t.dim).map(|k| format!("{}#{k}", t.label)).collect()).collect();
    let complex = BasedChainComplex::new(terms.iter().map(|t| t.dim).collect(), maps, Some(labels))?;
    if let Err(ComplexError::NotAComplex { degree }) = complex.validate() {
        return Err(MvError::NotExact { term: degree });
    }
    let betti = complex.homology().betti();
    if let Some(term) = betti.iter().position(|&b| b != 0) {
        return Err(MvError::NotExact { term });
    }
    Ok(LongExactSequence { terms, complex })
}

/// The Mayer-Vietoris sequence in the given homology bases. Exactness is
/// checked and a failure is reported as a construction bug.
pub fn les(dec: &Decomposition, bases: &MvBases) -> Result<LongExactSequence, MvError> {
    les_with(dec, bases, None)
}

/// Same sequence with every lift in the connecting maps perturbed by the
/// image of a chain of `I` determined by `salt`; the result must not depend
/// on the perturbation.
pub fn les_with_shifted_lifts(dec: &Decomposition, bases: &MvBases, salt: i64) -> Result<LongExactSequence, MvError> {
    les_with(dec, bases, Some(salt))
}

/// Which spaces keep their prescribed homology bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AdaptPattern {
    /// Pieces and intersection fixed, whole space free.
    WholeFree,
    /// Whole space and intersection fixed, pieces free.
    Gluing,
}

impl AdaptPattern {
    fn is_free(self, space: TermSpace) -> bool {
        match self {
            AdaptPattern::WholeFree => space == TermSpace::Whole,
            AdaptPattern::Gluing => space == TermSpace::Pieces,
        }
    }
}

/// Per-term record: `h'_p = b_p ⊔ s_p(b_{p-1})` and its coefficients in the
/// (adapted) term basis, whose determinant is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedTerm {
    pub label: String,
    pub free: bool,
    pub b: BasisList,
    pub s: BasisList,
    /// Factor applied to the first vector of the term basis.
    pub scale: Rational,
    pub coefficients: RatMatrix,
    pub det: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedBases {
    pub pattern: AdaptPattern,
    pub bases: MvBases,
    pub terms: Vec<AdaptedTerm>,
    pub les: LongExactSequence,
    pub torsion: Rational,
}

/// Rescales free term bases (and fixed-term image bases `b_p`) degree by
/// degree until every `[h'_p, h_p] = 1`, then rebuilds the sequence in the
/// adapted bases.
pub fn adapted_bases(dec: &Decomposition, given: &MvBases, pattern: AdaptPattern) -> Result<AdaptedBases, MvError> {
    let l = les(dec, given)?;
    let c = l.complex();
    let n = c.len();
    let h = c.homology();
    let mut b: Vec<BasisList> = h.degrees.iter().map(|d| d.boundaries.clone()).collect();
    let mut s: Vec<BasisList> = Vec::with_capacity(n);
    let mut scale = vec![Rational::one(); n];
    let free: Vec<bool> = l.terms.iter().map(|t| pattern.is_free(t.space)).collect();

    let sections = |b_prev: &BasisList, p: usize| -> Result<BasisList, MvError> {
        let d = c.boundary(p);
        let vectors = b_prev.vectors.iter().map(|v| solve(&d, v)).collect::<Result<Vec<_>, _>>()?;
        Ok(BasisList { ambient_dim: c.dim(p), vectors })
    };
    let assembled_det = |b: &BasisList, s: &BasisList, p: usize| -> Result<Rational, MvError> {
        Ok(change_of_basis_det(&b.concat(s), &BasisList::standard(c.dim(p)))?)
    };

    for p in 0..n {
        let sp = if p == 0 { BasisList::empty(c.dim(0)) } else { sections(&b[p - 1], p)? };
        s.push(sp);
        let d = assembled_det(&b[p], &s[p], p)? / &scale[p];
        if d.is_one() {
            continue;
        }
        if free[p] {
            scale[p] *= &d;
        } else if !b[p].is_empty() {
            let k = d.recip();
            b[p].vectors[0] = scale_vector(&b[p].vectors[0], &k);
        } else if p >= 1 && free[p - 1] && !b[p - 1].is_empty() {
            let k = d.recip();
            b[p - 1].vectors[0] = scale_vector(&b[p - 1].vectors[0], &k);
            s[p].vectors[0] = scale_vector(&s[p].vectors[0], &k);
            scale[p - 1] *= &k;
        } else {
            return Err(MvError::OverDetermined { term: p });
        }
    }

    let mut terms = Vec::with_capacity(n);
    for p in 0..n {
        let mut coefficients = b[p].concat(&s[p]).to_matrix();
        if coefficients.rows() > 0 {
            let inv = scale[p].recip();
            for col in 0..coefficients.cols() {
                let v = coefficients.get(0, col) * &inv;
                coefficients.set(0, col, v);
            }
        }
        let det = if coefficients.rows() == 0 { Rational::one() } else { crate::ratlin::det(&coefficients)? };
        debug_assert!(det.is_one());
        terms.push(AdaptedTerm {
            label: l.terms[p].label.clone(),
            free: free[p],
            b: b[p].clone(),
            s: s[p].clone(),
            scale: scale[p].clone(),
            coefficients,
            det,
        });
    }

    let mut bases = given.clone();
    for (p, t) in l.terms.iter().enumerate() {
        if scale[p].is_one() {
            continue;
        }
        let q = t.degree;
        match t.space {
            TermSpace::Whole => bases.x.scale(q, 0, &scale[p]),
            TermSpace::Intersection => bases.i.scale(q, 0, &scale[p]),
            TermSpace::Pieces => match t.split {
                Some((na, _)) if na > 0 => bases.a.scale(q, 0, &scale[p]),
                _ => bases.b.scale(q, 0, &scale[p]),
            },
        }
    }
    let les = les(dec, &bases)?;
    let torsion = les.torsion()?;
    Ok(AdaptedBases { pattern, bases, terms, les, torsion })
}

/// Rescales `h_2(X)` so that the connecting map sends it to the basis vector
/// of `H_1(I)` (single-circle gluing of a closed surface).
pub fn normalize_delta(dec: &Decomposition, bases: &MvBases) -> Result<MvBases, MvError> {
    let l = les(dec, bases)?;
    if l.terms.len() < 7 || l.terms[6].dim != 1 || l.terms[5].dim != 1 {
        return Err(MvError::Normalization("one-dimensional H_2(X) and H_1(I)".into()));
    }
    let k = l.maps()[5].get(0, 0).clone();
    if k.is_zero() {
        return Err(MvError::Normalization("a nonzero connecting map in degree 2".into()));
    }
    let mut out = bases.clone();
    out.x.scale(2, 0, &k.recip());
    Ok(out)
}

/// Both sides of `𝕋(A)·𝕋(B) = 𝕋(I)·𝕋(X)·𝕋(ℋ)` in absolute value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multiplicativity {
    pub torsion_a: Rational,
    pub torsion_b: Rational,
    pub torsion_i: Rational,
    pub torsion_x: Rational,
    pub torsion_les: Rational,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl Multiplicativity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn multiplicativity(dec: &Decomposition, bases: &MvBases) -> Result<Multiplicativity, MvError> {
    let ta = torsion_default(&dec.a, &bases.a)?.abs();
    let tb = torsion_default(&dec.b, &bases.b)?.abs();
    let ti = torsion_default(&dec.i, &bases.i)?.abs();
    let tx = torsion_default(&dec.x, &bases.x)?.abs();
    let th = les(dec, bases)?.torsion()?.abs();
    let lhs = &ta * &tb;
    let rhs = &ti * &tx * &th;
    Ok(Multiplicativity { torsion_a: ta, torsion_b: tb, torsion_i: ti, torsion_x: tx, torsion_les: th, lhs, rhs })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LesReport {
    pub terms: Vec<LesTerm>,
    pub maps: Vec<Vec<Vec<String>>>,
    pub determinants: Vec<String>,
    pub torsion: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdaptedTermReport {
    pub label: String,
    pub free: bool,
    pub b: Vec<Vec<String>>,
    pub s: Vec<Vec<String>>,
    pub scale: String,
    pub coefficients: Vec<Vec<String>>,
    pub det: String,
}

impl AdaptedBases {
    pub fn report(&self) -> LesReport {
        LesReport {
            terms: self.les.terms.clone(),
            maps: self.les.maps().iter().map(matrix_to_json).collect(),
            determinants: self.terms.iter().map(|t| rat_to_string(&t.det)).collect(),
            torsion: rat_to_string(&self.torsion),
        }
    }

    pub fn term_reports(&self) -> Vec<AdaptedTermReport> {
        self.terms
            .iter()
            .map(|t| AdaptedTermReport {
                label: t.label.clone(),
                free: t.free,
                b: vectors_to_json(&t.b),
                s: vectors_to_json(&t.s),
                scale: rat_to_string(&t.scale),
                coefficients: matrix_to_json(&t.coefficients),
                det: rat_to_string(&t.det),
            })
            .collect()
    }
}

/// Rank of a map of the sequence (used for the image dimensions).
pub fn map_rank(l: &LongExactSequence, p: usize) -> usize {
    image_basis(&l.maps()[p - 1]).len()
}
