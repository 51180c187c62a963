//! Finite chain complexes over the rationals with a distinguished cell
//! basis in every degree, and homology with explicit basis tracking.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ratlin::{
    image_basis, kernel_basis, parse_rational, rat_to_string, solve, BasisList, LinalgError, RatMatrix, Rational,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("boundary map in degree {degree} has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    Shape { degree: usize, rows: usize, cols: usize, expected_rows: usize, expected_cols: usize },
    #[error("expected {expected} boundary matrices, got {got}")]
    BoundaryCount { expected: usize, got: usize },
    #[error("composite of boundary maps is nonzero at degree {degree}")]
    NotAComplex { degree: usize },
    #[error("labels for degree {degree}: {got} given, {expected} cells")]
    Labels { degree: usize, expected: usize, got: usize },
    #[error("homology basis in degree {degree}: {reason}")]
    BadBases { degree: usize, reason: String },
    #[error("malformed complex JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Chain complex `0 → C_n → … → C_0 → 0` with the standard basis of each
/// `C_p` as its distinguished basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasedChainComplex {
    dims: Vec<usize>,
    /// `boundaries[p - 1]` is `∂_p : C_p → C_{p-1}`.
    boundaries: Vec<RatMatrix>,
    labels: Vec<Vec<String>>,
}

impl BasedChainComplex {
    /// Checks shapes only; see [`BasedChainComplex::validate`] for `∂∘∂ = 0`.
    pub fn new(
        dims: Vec<usize>,
        boundaries: Vec<RatMatrix>,
        labels: Option<Vec<Vec<String>>>,
    ) -> Result<Self, ComplexError> {
        let expected = dims.len().saturating_sub(1);
        if boundaries.len() != expected {
            return Err(ComplexError::BoundaryCount { expected, got: boundaries.len() });
        }
        for (i, b) in boundaries.iter().enumerate() {
            let p = i + 1;
            if b.rows() != dims[p - 1] || b.cols() != dims[p] {
                return Err(ComplexError::Shape {
                    degree: p,
                    rows: b.rows(),
                    cols: b.cols(),
                    expected_rows: dims[p - 1],
                    expected_cols: dims[p],
                });
            }
        }
        let labels = match labels {
            Some(labels) => {
                if labels.len() != dims.len() {
                    return Err(ComplexError::Labels { degree: labels.len(), expected: dims.len(), got: labels.len() });
                }
                for (p, (l, &d)) in labels.iter().zip(&dims).enumerate() {
                    if l.len() != d {
                        return Err(ComplexError::Labels { degree: p, expected: d, got: l.len() });
                    }
                }
                labels
            }
            None => default_labels(&dims),
        };
        Ok(BasedChainComplex { dims, boundaries, labels })
    }

    /// The complex with no nonzero chain groups.
    pub fn empty() -> Self {
        BasedChainComplex { dims: Vec::new(), boundaries: Vec::new(), labels: Vec::new() }
    }

    /// `None` for the empty complex.
    pub fn top_degree(&self) -> Option<usize> {
        self.dims.len().checked_sub(1)
    }

    /// Number of stored degrees (`top_degree + 1`).
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, p: usize) -> usize {
        self.dims.get(p).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    /// `∂_p : C_p → C_{p-1}`; zero maps outside the stored range.
    pub fn boundary(&self, p: usize) -> RatMatrix {
        if p >= 1 && p < self.dims.len() {
            self.boundaries[p - 1].clone()
        } else {
            RatMatrix::zeros(if p == 0 { 0 } else { self.dim(p - 1) }, self.dim(p))
        }
    }

    pub fn boundaries(&self) -> &[RatMatrix] {
        &self.boundaries
    }

    /// Shape and `∂_{p-1} ∘ ∂_p = 0` checks; reports the first failing degree.
    pub fn validate(&self) -> Result<(), ComplexError> {
        BasedChainComplex::new(self.dims.clone(), self.boundaries.clone(), Some(self.labels.clone()))?;
        for p in 2..self.dims.len() {
            let composite = self.boundaries[p - 2].mul(&self.boundaries[p - 1])?;
            if !composite.is_zero() {
                return Err(ComplexError::NotAComplex { degree: p });
            }
        }
        Ok(())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(p, &d)| if p % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// Degreewise cycles, boundaries and canonical homology representatives.
    pub fn homology(&self) -> HomologyData {
        let degrees = (0..self.dims.len())
            .map(|p| {
                let dim = self.dims[p];
                let cycles = if p == 0 { BasisList::standard(dim) } else { kernel_basis(&self.boundary(p)) };
                let bounds = if p + 1 < self.dims.len() {
                    image_basis(&self.boundaries[p])
                } else {
                    BasisList::empty(dim)
                };
                let reps = complete_basis(&bounds, &cycles);
                DegreeHomology { cycles, boundaries: bounds, representatives: reps }
            })
            .collect();
        HomologyData { degrees }
    }

    /// Block-diagonal sum; labels of the summands are prefixed with `L:` and `R:`.
    pub fn direct_sum(&self, other: &BasedChainComplex) -> BasedChainComplex {
        let n = self.dims.len().max(other.dims.len());
        let dims: Vec<usize> = (0..n).map(|p| self.dim(p) + other.dim(p)).collect();
        let boundaries = (1..n).map(|p| self.boundary(p).block_diag(&other.boundary(p))).collect();
        let labels = (0..n)
            .map(|p| {
                let left = self.labels.get(p).into_iter().flatten().map(|l| format!("L:{l}"));
                let right = other.labels.get(p).into_iter().flatten().map(|l| format!("R:{l}"));
                left.chain(right).collect()
            })
            .collect();
        BasedChainComplex { dims, boundaries, labels }
    }

    /// Returns the complex with the same data but the given labels.
    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self, ComplexError> {
        BasedChainComplex::new(self.dims.clone(), self.boundaries.clone(), Some(labels.clone()))?;
        self.labels = labels;
        Ok(self)
    }

    /// Pads with zero-dimensional degrees up to `len` stored degrees.
    pub fn padded(&self, len: usize) -> BasedChainComplex {
        let mut out = self.clone();
        while out.dims.len() < len {
            let p = out.dims.len();
            out.dims.push(0);
            out.labels.push(Vec::new());
            if p >= 1 {
                out.boundaries.push(RatMatrix::zeros(out.dims[p - 1], 0));
            }
        }
        out
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            dims: self.dims.clone(),
            boundaries: self.boundaries.iter().map(matrix_to_json).collect(),
            labels: Some(self.labels.clone()),
        }
    }

    pub fn from_json(json: &ComplexJson) -> Result<Self, ComplexError> {
        let mut boundaries = Vec::with_capacity(json.boundaries.len());
        for (i, rows) in json.boundaries.iter().enumerate() {
            let p = i + 1;
            let (r, c) = (json.dims.get(p - 1).copied().unwrap_or(0), json.dims.get(p).copied().unwrap_or(0));
            boundaries.push(matrix_from_json(rows, r, c)?);
        }
        BasedChainComplex::new(json.dims.clone(), boundaries, json.labels.clone())
    }

    pub fn from_json_str(s: &str) -> Result<Self, ComplexError> {
        let json: ComplexJson = serde_json::from_str(s).map_err(|e| ComplexError::Json(e.to_string()))?;
        Self::from_json(&json)
    }
}

fn default_labels(dims: &[usize]) -> Vec<Vec<String>> {
    dims.iter()
        .enumerate()
        .map(|(p, &d)| (0..d).map(|i| format!("e{p}_{i}")).collect())
        .collect()
}

/// Greedy extension of `start` by vectors of `pool` that raise the rank.
/// Returns only the added vectors.
pub(crate) fn complete_basis(start: &BasisList, pool: &BasisList) -> BasisList {
    let mut acc = start.clone();
    let mut added = BasisList::empty(start.ambient_dim);
    for v in &pool.vectors {
        let mut trial = acc.clone();
        trial.vectors.push(v.clone());
        if trial.rank() == trial.len() {
            acc = trial;
            added.vectors.push(v.clone());
        }
    }
    added
}

/// JSON form of a complex; rationals are strings `"p/q"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub dims: Vec<usize>,
    pub boundaries: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
}

pub fn matrix_to_json(m: &RatMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(rat_to_string).collect()).collect()
}

pub fn vectors_to_json(b: &BasisList) -> Vec<Vec<String>> {
    b.vectors.iter().map(|v| v.iter().map(rat_to_string).collect()).collect()
}

/// Parses a matrix with the expected shape. An empty row list is accepted for
/// any matrix with zero rows or zero columns.
pub fn matrix_from_json(rows: &[Vec<String>], r: usize, c: usize) -> Result<RatMatrix, ComplexError> {
    if rows.is_empty() && (r == 0 || c == 0) {
        return Ok(RatMatrix::zeros(r, c));
    }
    if rows.len() != r {
        return Err(ComplexError::Json(format!("matrix has {} rows, expected {r}", rows.len())));
    }
    let mut data = Vec::with_capacity(r);
    for row in rows {
        if row.len() != c {
            return Err(ComplexError::Json(format!("matrix row has {} entries, expected {c}", row.len())));
        }
        data.push(row.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?);
    }
    Ok(RatMatrix::from_rows(data, c)?)
}

/// Homology of one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeHomology {
    /// Basis of `Z_p = Ker ∂_p`.
    pub cycles: BasisList,
    /// Basis of `B_p = Im ∂_{p+1}`.
    pub boundaries: BasisList,
    /// Cycles whose classes form the canonical basis of `H_p`.
    pub representatives: BasisList,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyData {
    pub degrees: Vec<DegreeHomology>,
}

impl HomologyData {
    pub fn betti(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.representatives.len()).collect()
    }

    pub fn betti_at(&self, p: usize) -> usize {
        self.degrees.get(p).map_or(0, |d| d.representatives.len())
    }

    /// Coordinates of the class of the cycle `v` in the canonical basis of `H_p`.
    pub fn class_coordinates(&self, p: usize, v: &[Rational]) -> Result<Vec<Rational>, ComplexError> {
        let Some(d) = self.degrees.get(p) else {
            if v.is_empty() {
                return Ok(Vec::new());
            }
            return Err(ComplexError::BadBases { degree: p, reason: "degree out of range".into() });
        };
        let frame = d.boundaries.concat(&d.representatives);
        let x = solve(&frame.to_matrix(), v).map_err(|_| ComplexError::BadBases {
            degree: p,
            reason: "vector is not a cycle".into(),
        })?;
        Ok(x[d.boundaries.len()..].to_vec())
    }

    /// Matrix whose columns are the class coordinates of the given cycles.
    pub fn class_matrix(&self, p: usize, cycles: &BasisList) -> Result<RatMatrix, ComplexError> {
        let cols = cycles
            .vectors
            .iter()
            .map(|v| self.class_coordinates(p, v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RatMatrix::from_columns(self.betti_at(p), &cols)?)
    }
}

/// A chosen basis of each `H_p`, given by cycle representatives in `C_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedBases {
    pub degrees: Vec<BasisList>,
}

impl GradedBases {
    pub fn canonical(h: &HomologyData) -> Self {
        GradedBases { degrees: h.degrees.iter().map(|d| d.representatives.clone()).collect() }
    }

    pub fn get(&self, p: usize) -> Option<&BasisList> {
        self.degrees.get(p)
    }

    /// Every vector is a cycle and the classes form a basis of `H_p`.
    pub fn check(&self, c: &BasedChainComplex, h: &HomologyData) -> Result<(), ComplexError> {
        if self.degrees.len() != c.len() {
            return Err(ComplexError::BadBases {
                degree: self.degrees.len(),
                reason: format!("{} degrees given for a complex with {}", self.degrees.len(), c.len()),
            });
        }
        for (p, basis) in self.degrees.iter().enumerate() {
            if basis.ambient_dim != c.dim(p) {
                return Err(ComplexError::BadBases { degree: p, reason: "wrong ambient dimension".into() });
            }
            if basis.len() != h.betti_at(p) {
                return Err(ComplexError::BadBases {
                    degree: p,
                    reason: format!("{} vectors for betti number {}", basis.len(), h.betti_at(p)),
                });
            }
            let m = h.class_matrix(p, basis)?;
            if m.rank() != basis.len() {
                return Err(ComplexError::BadBases { degree: p, reason: "classes are dependent".into() });
            }
        }
        Ok(())
    }

    /// Replaces vector `i` of degree `p` by `k` times itself.
    pub fn scale(&mut self, p: usize, i: usize, k: &Rational) {
        assert!(!k.is_zero(), "homology basis vectors cannot be scaled by zero");
        let v = &mut self.degrees[p].vectors[i];
        for x in v.iter_mut() {
            *x *= k;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::rat;

    fn circle() -> BasedChainComplex {
        BasedChainComplex::new(vec![1, 1], vec![RatMatrix::zeros(1, 1)], None).unwrap()
    }

    #[test]
    fn circle_homology() {
        let c = circle();
        c.validate().unwrap();
        assert_eq!(c.homology().betti(), vec![1, 1]);
        assert_eq!(c.euler_characteristic(), 0);
    }

    #[test]
    fn nonzero_composite_is_reported() {
        let c = BasedChainComplex::new(
            vec![1, 1, 1],
            vec![RatMatrix::from_i64(&[&[1]]), RatMatrix::from_i64(&[&[1]])],
            None,
        )
        .unwrap();
        assert_eq!(c.validate(), Err(ComplexError::NotAComplex { degree: 2 }));
    }

    #[test]
    fn shape_errors() {
        let err = BasedChainComplex::new(vec![2, 1], vec![RatMatrix::zeros(1, 1)], None).unwrap_err();
        assert!(matches!(err, ComplexError::Shape { degree: 1, .. }));
        let err = BasedChainComplex::new(vec![2, 1], vec![], None).unwrap_err();
        assert!(matches!(err, ComplexError::BoundaryCount { .. }));
    }

    #[test]
    fn direct_sum_examples() {
        let s = circle().direct_sum(&circle());
        assert_eq!(s.dims(), &[2, 2]);
        assert_eq!(s.homology().betti(), vec![2, 2]);
        let e = circle().direct_sum(&BasedChainComplex::empty());
        assert_eq!(e.dims(), circle().dims());
        assert_eq!(e.boundaries(), circle().boundaries());
    }

    #[test]
    fn homology_invariants_on_a_small_complex() {
        // 0 → Q → Q² → Q → 0 with ∂_2 = (1,1)^T, ∂_1 = (1,-1)
        let c = BasedChainComplex::new(
            vec![1, 2, 1],
            vec![RatMatrix::from_i64(&[&[1, -1]]), RatMatrix::from_i64(&[&[1], &[1]])],
            None,
        )
        .unwrap();
        c.validate().unwrap();
        let h = c.homology();
        for d in &h.degrees {
            assert_eq!(d.cycles.len(), d.boundaries.len() + d.representatives.len());
        }
        assert_eq!(h.betti(), vec![0, 0, 0]);
        let chi_betti: i64 = h.betti().iter().enumerate().map(|(p, &b)| if p % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
        assert_eq!(chi_betti, c.euler_characteristic());
        assert_eq!(c.homology(), h);
    }

    #[test]
    fn class_coordinates_modulo_boundaries() {
        let c = BasedChainComplex::new(vec![2, 1], vec![RatMatrix::from_i64(&[&[-1], &[1]])], None).unwrap();
        let h = c.homology();
        assert_eq!(h.betti(), vec![1, 0]);
        // v1 is homologous to v0
        let x = h.class_coordinates(0, &[rat(0), rat(1)]).unwrap();
        let y = h.class_coordinates(0, &[rat(1), rat(0)]).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn json_round_trip() {
        let c = BasedChainComplex::new(
            vec![1, 2, 1],
            vec![RatMatrix::from_i64(&[&[1, -1]]), RatMatrix::from_i64(&[&[1], &[1]])],
            None,
        )
        .unwrap();
        let s = serde_json::to_string(&c.to_json()).unwrap();
        assert_eq!(BasedChainComplex::from_json_str(&s).unwrap(), c);
        assert!(BasedChainComplex::from_json_str("{\"dims\":[1,1],\"boundaries\":[[[\"q\"]]]}").is_err());
    }
}
