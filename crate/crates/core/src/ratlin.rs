//! Exact rational dense linear algebra.
//!
//! Everything downstream (homology, torsion, Mayer-Vietoris bookkeeping,
//! intersection forms) is phrased in terms of [`RatMatrix`] and
//! [`BasisList`]. Pivoting is deterministic: the first nonzero entry in
//! column order is always taken, so bases and sections are reproducible.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar. `num_rational` keeps it in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Integer literal as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d` as a rational. Panics on a zero denominator.
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `"p/q"`, or `"p"` when `q = 1`.
pub fn rat_to_string(r: &Rational) -> String {
    r.to_string()
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational, LinalgError> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| LinalgError::Parse(s.to_string()))?;
            let d: BigInt = d.trim().parse().map_err(|_| LinalgError::Parse(s.to_string()))?;
            if d.is_zero() {
                return Err(LinalgError::Parse(s.to_string()));
            }
            Rational::new(n, d)
        }
        None => Rational::from_integer(s.parse().map_err(|_| LinalgError::Parse(s.to_string()))?),
    };
    Ok(parsed)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("right-hand side is not in the column space")]
    NoSolution,
    #[error("vectors are linearly dependent")]
    Dependent,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

/// Dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(rat_to_string).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, entries: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(RatMatrix { rows, cols, entries })
    }

    /// Builds a matrix from rows; `cols` is needed for the zero-row case.
    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Ok(RatMatrix { rows: n, cols, entries })
    }

    /// Convenience constructor for small integer matrices (tests, fixtures).
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged integer matrix");
                r.iter().map(|&x| rat(x)).collect()
            })
            .collect();
        Self::from_rows(data, cols).expect("shape checked above")
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(LinalgError::DimensionMismatch(format!(
                    "column {c} has length {}, expected {rows}",
                    col.len()
                )));
            }
            for (r, x) in col.iter().enumerate() {
                m.set(r, c, x.clone());
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x * k).collect(),
        }
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let idx = r * out.cols + c;
                        out.entries[idx] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn add(&self, other: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch("matrix sum of different shapes".into()));
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch("hstack row counts differ".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c).clone());
            }
        }
        Ok(out)
    }

    /// `[self; other]`.
    pub fn vstack(&self, other: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch("vstack column counts differ".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(RatMatrix { rows: self.rows + other.rows, cols: self.cols, entries })
    }

    pub fn block_diag(&self, other: &RatMatrix) -> RatMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).clone());
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                out.set(self.rows + r, self.cols + c, other.get(r, c).clone());
            }
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> RatMatrix {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        rref(self).pivot_cols.len()
    }
}

/// Result of Gauss-Jordan elimination: `transform · M = reduced`.
#[derive(Debug, Clone)]
pub struct Rref {
    pub reduced: RatMatrix,
    pub pivot_cols: Vec<usize>,
    pub transform: RatMatrix,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }
}

fn swap_rows(m: &mut RatMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for c in 0..m.cols {
        m.entries.swap(a * m.cols + c, b * m.cols + c);
    }
}

fn scale_row(m: &mut RatMatrix, r: usize, k: &Rational) {
    for c in 0..m.cols {
        let idx = r * m.cols + c;
        if !m.entries[idx].is_zero() {
            m.entries[idx] *= k;
        }
    }
}

/// row[target] -= k * row[source]
fn eliminate_row(m: &mut RatMatrix, target: usize, source: usize, k: &Rational) {
    for c in 0..m.cols {
        let s = &m.entries[source * m.cols + c];
        if !s.is_zero() {
            let delta = s * k;
            m.entries[target * m.cols + c] -= delta;
        }
    }
}

/// Reduced row echelon form with the accumulated row operations.
pub fn rref(m: &RatMatrix) -> Rref {
    let mut reduced = m.clone();
    let mut transform = RatMatrix::identity(m.rows);
    let mut pivot_cols = Vec::new();
    let mut next_row = 0;
    for c in 0..m.cols {
        if next_row == m.rows {
            break;
        }
        let Some(p) = (next_row..m.rows).find(|&r| !reduced.get(r, c).is_zero()) else {
            continue;
        };
        swap_rows(&mut reduced, p, next_row);
        swap_rows(&mut transform, p, next_row);
        let inv = reduced.get(next_row, c).recip();
        scale_row(&mut reduced, next_row, &inv);
        scale_row(&mut transform, next_row, &inv);
        for r in 0..m.rows {
            if r != next_row {
                let k = reduced.get(r, c).clone();
                if !k.is_zero() {
                    eliminate_row(&mut reduced, r, next_row, &k);
                    eliminate_row(&mut transform, r, next_row, &k);
                }
            }
        }
        pivot_cols.push(c);
        next_row += 1;
    }
    Rref { reduced, pivot_cols, transform }
}

/// Ordered list of coordinate vectors in a common ambient space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisList {
    pub ambient_dim: usize,
    pub vectors: Vec<Vec<Rational>>,
}

impl BasisList {
    pub fn new(ambient_dim: usize, vectors: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient_dim) {
            return Err(LinalgError::DimensionMismatch(format!(
                "vector of length {} in a {ambient_dim}-dimensional space",
                v.len()
            )));
        }
        Ok(BasisList { ambient_dim, vectors })
    }

    pub fn empty(ambient_dim: usize) -> Self {
        BasisList { ambient_dim, vectors: Vec::new() }
    }

    pub fn standard(dim: usize) -> Self {
        let vectors = (0..dim).map(|i| unit_vector(dim, i)).collect();
        BasisList { ambient_dim: dim, vectors }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Matrix with the basis vectors as columns.
    pub fn to_matrix(&self) -> RatMatrix {
        RatMatrix::from_columns(self.ambient_dim, &self.vectors).expect("lengths checked on construction")
    }

    pub fn rank(&self) -> usize {
        self.to_matrix().rank()
    }

    pub fn is_independent(&self) -> bool {
        self.rank() == self.len()
    }

    pub fn concat(&self, other: &BasisList) -> BasisList {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let mut vectors = self.vectors.clone();
        vectors.extend(other.vectors.iter().cloned());
        BasisList { ambient_dim: self.ambient_dim, vectors }
    }
}

pub fn unit_vector(dim: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); dim];
    v[i] = Rational::one();
    v
}

pub fn zero_vector(dim: usize) -> Vec<Rational> {
    vec![Rational::zero(); dim]
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn add_scaled(acc: &mut [Rational], v: &[Rational], k: &Rational) {
    if k.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += x * k;
        }
    }
}

pub fn scale_vector(v: &[Rational], k: &Rational) -> Vec<Rational> {
    v.iter().map(|x| x * k).collect()
}

/// Null space basis, one vector per free column in increasing order.
pub fn kernel_basis(m: &RatMatrix) -> BasisList {
    let Rref { reduced, pivot_cols, .. } = rref(m);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivot_cols {
        is_pivot[p] = true;
    }
    let vectors = (0..m.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = zero_vector(m.cols);
            v[free] = Rational::one();
            for (i, &p) in pivot_cols.iter().enumerate() {
                v[p] = -reduced.get(i, free).clone();
            }
            v
        })
        .collect();
    BasisList { ambient_dim: m.cols, vectors }
}

/// Column space basis: the first independent columns of `m`.
pub fn image_basis(m: &RatMatrix) -> BasisList {
    let pivots = rref(m).pivot_cols;
    BasisList { ambient_dim: m.rows, vectors: pivots.iter().map(|&c| m.column(c)).collect() }
}

/// Canonical solution of `m · x = b` with all non-pivot coordinates zero.
pub fn solve(m: &RatMatrix, b: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
    if b.len() != m.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            m.rows
        )));
    }
    let Rref { pivot_cols, transform, .. } = rref(m);
    let y = transform.mul_vec(b)?;
    if y[pivot_cols.len()..].iter().any(|x| !x.is_zero()) {
        return Err(LinalgError::NoSolution);
    }
    let mut x = zero_vector(m.cols);
    for (i, &p) in pivot_cols.iter().enumerate() {
        x[p] = y[i].clone();
    }
    Ok(x)
}

/// Exact determinant by elimination.
pub fn det(m: &RatMatrix) -> Result<Rational, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut acc = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a.get(r, c).is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != c {
            swap_rows(&mut a, p, c);
            acc = -acc;
        }
        let pivot = a.get(c, c).clone();
        for r in c + 1..n {
            let k = a.get(r, c) / &pivot;
            if !k.is_zero() {
                eliminate_row(&mut a, r, c, &k);
            }
        }
        acc *= pivot;
    }
    Ok(acc)
}

/// Coordinates of `v` in `basis` (which must be independent).
pub fn coordinates(basis: &BasisList, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
    solve(&basis.to_matrix(), v)
}

/// Determinant of the matrix expressing `new` in coordinates of `old`.
pub fn change_of_basis_det(new: &BasisList, old: &BasisList) -> Result<Rational, LinalgError> {
    if new.ambient_dim != old.ambient_dim || new.len() != old.len() {
        return Err(LinalgError::DimensionMismatch(format!(
            "bases of size {} in dim {} and size {} in dim {}",
            new.len(),
            new.ambient_dim,
            old.len(),
            old.ambient_dim
        )));
    }
    if old.len() != old.ambient_dim {
        return Err(LinalgError::DimensionMismatch(format!(
            "{} vectors cannot be a basis of a {}-dimensional space",
            old.len(),
            old.ambient_dim
        )));
    }
    let old_m = old.to_matrix();
    let Rref { pivot_cols, transform, .. } = rref(&old_m);
    if pivot_cols.len() != old.len() {
        return Err(LinalgError::Dependent);
    }
    let coords = transform.mul(&new.to_matrix())?;
    let d = det(&coords)?;
    if d.is_zero() {
        return Err(LinalgError::Dependent);
    }
    Ok(d)
}

/// `|x|` as a rational.
pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_i64(rows)
    }

    #[test]
    fn rref_identity() {
        let id = RatMatrix::identity(2);
        let r = rref(&id);
        assert_eq!(r.reduced, id);
        assert_eq!(r.pivot_cols, vec![0, 1]);
        assert_eq!(r.transform, id);
    }

    #[test]
    fn rref_rank_one() {
        let a = m(&[&[2, 4], &[1, 2]]);
        let r = rref(&a);
        assert_eq!(r.reduced, m(&[&[1, 2], &[0, 0]]));
        assert_eq!(r.pivot_cols, vec![0]);
        assert_eq!(r.transform.mul(&a).unwrap(), r.reduced);
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&RatMatrix::zeros(2, 3));
        assert_eq!(k, BasisList::standard(3));
        assert!(kernel_basis(&RatMatrix::identity(2)).is_empty());
    }

    #[test]
    fn image_examples() {
        assert_eq!(image_basis(&RatMatrix::identity(3)), BasisList::standard(3));
        assert!(image_basis(&RatMatrix::zeros(2, 2)).is_empty());
        let b = image_basis(&m(&[&[2], &[0]]));
        assert_eq!(b.vectors, vec![vec![rat(2), rat(0)]]);
    }

    #[test]
    fn solve_examples() {
        let b = vec![rat(3), frac(-1, 2), rat(7)];
        assert_eq!(solve(&RatMatrix::identity(3), &b).unwrap(), b);
        assert_eq!(solve(&m(&[&[2]]), &[rat(1)]).unwrap(), vec![frac(1, 2)]);
        assert_eq!(solve(&m(&[&[1], &[0]]), &[rat(0), rat(1)]), Err(LinalgError::NoSolution));
    }

    #[test]
    fn solve_is_canonical() {
        // free column 1 must stay zero
        let a = m(&[&[1, 1, 0], &[0, 0, 1]]);
        let x = solve(&a, &[rat(5), rat(2)]).unwrap();
        assert_eq!(x, vec![rat(5), rat(0), rat(2)]);
    }

    #[test]
    fn det_examples() {
        assert_eq!(det(&RatMatrix::identity(4)).unwrap(), rat(1));
        assert_eq!(det(&m(&[&[0, 1], &[1, 0]])).unwrap(), rat(-1));
        let j = m(&[&[0, 0, 1, 0], &[0, 0, 0, 1], &[-1, 0, 0, 0], &[0, -1, 0, 0]]);
        assert_eq!(det(&j).unwrap(), rat(1));
        assert_eq!(det(&RatMatrix::zeros(2, 3)), Err(LinalgError::NotSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn change_of_basis_examples() {
        let old = BasisList::new(2, vec![vec![rat(1), rat(1)], vec![rat(0), rat(3)]]).unwrap();
        assert_eq!(change_of_basis_det(&old, &old).unwrap(), rat(1));
        let mut doubled = old.clone();
        doubled.vectors[0] = scale_vector(&doubled.vectors[0], &rat(2));
        assert_eq!(change_of_basis_det(&doubled, &old).unwrap(), rat(2));
        let swapped = BasisList::new(2, vec![old.vectors[1].clone(), old.vectors[0].clone()]).unwrap();
        assert_eq!(change_of_basis_det(&swapped, &old).unwrap(), rat(-1));
    }

    #[test]
    fn change_of_basis_errors() {
        let old = BasisList::standard(2);
        let short = BasisList::new(2, vec![vec![rat(1), rat(0)]]).unwrap();
        assert!(matches!(change_of_basis_det(&short, &old), Err(LinalgError::DimensionMismatch(_))));
        let dep = BasisList::new(2, vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)]]).unwrap();
        assert_eq!(change_of_basis_det(&dep, &old), Err(LinalgError::Dependent));
    }

    #[test]
    fn rational_strings() {
        assert_eq!(rat_to_string(&frac(6, -4)), "-3/2");
        assert_eq!(rat_to_string(&rat(5)), "5");
        assert_eq!(parse_rational("-3/2").unwrap(), frac(-3, 2));
        assert_eq!(parse_rational("4/2").unwrap(), rat(2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    /// Brute-force rank: largest k with a nonzero k×k minor (cofactor determinants).
    fn minor_rank(a: &RatMatrix) -> usize {
        fn cofactor_det(a: &RatMatrix) -> Rational {
            let n = a.rows();
            if n == 0 {
                return Rational::one();
            }
            let mut acc = Rational::zero();
            for c in 0..n {
                if a.get(0, c).is_zero() {
                    continue;
                }
                let rows: Vec<usize> = (1..n).collect();
                let cols: Vec<usize> = (0..n).filter(|&j| j != c).collect();
                let term = a.get(0, c) * cofactor_det(&a.submatrix(&rows, &cols));
                if c % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        let max = a.rows().min(a.cols());
        (1..=max)
            .rev()
            .find(|&k| {
                subsets(a.rows(), k).iter().any(|rs| {
                    subsets(a.cols(), k).iter().any(|cs| !cofactor_det(&a.submatrix(rs, cs)).is_zero())
                })
            })
            .unwrap_or(0)
    }

    #[test]
    fn random_rank_three_five_by_seven() {
        // product of 5x3 and 3x7 integer matrices with fixed entries
        let left = m(&[&[1, 0, 2], &[3, -1, 0], &[0, 4, 1], &[2, 2, -3], &[1, 1, 1]]);
        let right = m(&[
            &[1, 2, 0, -1, 3, 0, 1],
            &[0, 1, 5, 2, -2, 1, 0],
            &[2, 0, 1, 1, 0, -3, 4],
        ]);
        let a = left.mul(&right).unwrap();
        assert_eq!(minor_rank(&a), 3);
        let r = rref(&a);
        assert_eq!(r.rank(), 3);
        assert_eq!(r.transform.mul(&a).unwrap(), r.reduced);
    }

    fn small_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = RatMatrix> {
        (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..=3, r * c)
                .prop_map(move |v| RatMatrix::from_entries(r, c, v.into_iter().map(rat).collect()).unwrap())
        })
    }

    fn cofactor(a: &RatMatrix) -> Rational {
        let n = a.rows();
        if n == 0 {
            return Rational::one();
        }
        (0..n)
            .map(|c| {
                let rows: Vec<usize> = (1..n).collect();
                let cols: Vec<usize> = (0..n).filter(|&j| j != c).collect();
                let t = a.get(0, c) * cofactor(&a.submatrix(&rows, &cols));
                if c % 2 == 0 { t } else { -t }
            })
            .fold(Rational::zero(), |x, y| x + y)
    }

    proptest! {
        #[test]
        fn rref_transform_reproduces(a in small_matrix(5, 6)) {
            let r = rref(&a);
            prop_assert_eq!(r.transform.mul(&a).unwrap(), r.reduced.clone());
            prop_assert!(!det(&r.transform).unwrap().is_zero());
            prop_assert!(r.pivot_cols.windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn rank_nullity(a in small_matrix(5, 6)) {
            let k = kernel_basis(&a);
            let i = image_basis(&a);
            prop_assert_eq!(k.rank() + i.rank(), a.cols());
            for v in &k.vectors {
                prop_assert!(is_zero_vector(&a.mul_vec(v).unwrap()));
            }
        }

        #[test]
        fn det_matches_cofactor(n in 1usize..=5, seed in proptest::collection::vec(-4i64..=4, 25)) {
            let a = RatMatrix::from_entries(n, n, seed[..n * n].iter().map(|&x| rat(x)).collect()).unwrap();
            prop_assert_eq!(det(&a).unwrap(), cofactor(&a));
        }

        #[test]
        fn change_of_basis_chains(entries in proptest::collection::vec(-3i64..=3, 27)) {
            let mk = |chunk: &[i64]| {
                BasisList::new(3, chunk.chunks(3).map(|c| c.iter().map(|&x| rat(x)).collect()).collect()).unwrap()
            };
            let (a, b, c) = (mk(&entries[0..9]), mk(&entries[9..18]), mk(&entries[18..27]));
            prop_assume!(a.is_independent() && b.is_independent() && c.is_independent());
            let ab = change_of_basis_det(&a, &b).unwrap();
            let bc = change_of_basis_det(&b, &c).unwrap();
            let ac = change_of_basis_det(&a, &c).unwrap();
            prop_assert_eq!(ab * bc, ac);
        }
    }
}
