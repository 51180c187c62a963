//! Intersection pairing on a closed oriented surface complex.
//!
//! A spanning tree of the 1-skeleton is collapsed to get a one-vertex model.
//! Around the single vertex the half-edge ends of the loops sit on a circle
//! (the link), read off from the corners of the attaching words; two loops
//! meet with sign ±1 when their ends interleave on that circle.

use std::collections::VecDeque;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::complex::{matrix_to_json, vectors_to_json};
use crate::ratlin::{add_scaled, det, rat, rat_to_string, scale_vector, BasisList, LinalgError, RatMatrix, Rational};
use crate::surf::{Face, Letter, SurfaceComplex, SurfaceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairingError {
    #[error("surface has boundary circles")]
    Bordered,
    #[error("surface is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("vertex link is not a single circle (surface is not a closed oriented surface)")]
    BadLink,
    #[error("vector {0} is not a 1-cycle")]
    NotACycle(usize),
    #[error("intersection form is degenerate")]
    Degenerate,
    #[error("homology basis of degree {degree}: {reason}")]
    BadBasis { degree: usize, reason: String },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// One-vertex model of a closed surface with the induced maps on 1-chains.
#[derive(Debug, Clone)]
pub struct OneVertexModel {
    pub model: SurfaceComplex,
    /// `loops[k]` is the edge of the original surface that became loop `k`.
    pub loops: Vec<usize>,
    pub tree_edges: Vec<usize>,
    /// `tree_path[v]`: 1-chain of tree edges from the root to `v`.
    tree_path: Vec<Vec<Rational>>,
    edge_count: usize,
    ends: Vec<(usize, usize)>,
}

impl OneVertexModel {
    /// Coordinates of a 1-chain of the original surface on the loops.
    pub fn project(&self, z: &[Rational]) -> Vec<Rational> {
        self.loops.iter().map(|&e| z[e].clone()).collect()
    }

    /// The cycle `path(tail) + e - path(head)` for loop `k`.
    pub fn lift(&self, k: usize) -> Vec<Rational> {
        let e = self.loops[k];
        let (tail, head) = self.ends[e];
        let mut out = self.tree_path[tail].clone();
        out[e] += Rational::one();
        add_scaled(&mut out, &self.tree_path[head], &rat(-1));
        out
    }

    /// Matrix of [`OneVertexModel::project`] (loops × edges).
    pub fn projection_matrix(&self) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.loops.len(), self.edge_count);
        for (k, &e) in self.loops.iter().enumerate() {
            m.set(k, e, rat(1));
        }
        m
    }

    /// Matrix of [`OneVertexModel::lift`] (edges × loops).
    pub fn lift_matrix(&self) -> RatMatrix {
        let cols: Vec<Vec<Rational>> = (0..self.loops.len()).map(|k| self.lift(k)).collect();
        RatMatrix::from_columns(self.edge_count, &cols).expect("lengths agree")
    }
}

/// Collapses a breadth-first spanning tree rooted at vertex 0.
pub fn one_vertex_reduction(x: &SurfaceComplex) -> Result<OneVertexModel, PairingError> {
    one_vertex_reduction_from(x, 0)
}

/// Collapses a breadth-first spanning tree rooted at `root`.
pub fn one_vertex_reduction_from(x: &SurfaceComplex, root: usize) -> Result<OneVertexModel, PairingError> {
    if !x.is_closed() {
        return Err(PairingError::Bordered);
    }
    let comps = x.components();
    if comps != 1 {
        return Err(PairingError::Disconnected(comps));
    }
    let nv = x.vertices().len();
    let ne = x.edges().len();
    let mut adjacency = vec![Vec::new(); nv];
    for (j, e) in x.edges().iter().enumerate() {
        if e.tail != e.head {
            adjacency[e.tail].push((j, e.head, 1));
            adjacency[e.head].push((j, e.tail, -1));
        }
    }
    let mut tree_path: Vec<Option<Vec<Rational>>> = vec![None; nv];
    tree_path[root] = Some(vec![Rational::zero(); ne]);
    let mut in_tree = vec![false; ne];
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &(j, w, sign) in &adjacency[v] {
            if tree_path[w].is_none() {
                let mut path = tree_path[v].clone().expect("visited");
                path[j] += rat(sign);
                tree_path[w] = Some(path);
                in_tree[j] = true;
                queue.push_back(w);
            }
        }
    }
    let tree_path: Vec<Vec<Rational>> = tree_path.into_iter().map(|p| p.expect("connected")).collect();
    let loops: Vec<usize> = (0..ne).filter(|&j| !in_tree[j]).collect();
    let tree_edges: Vec<usize> = (0..ne).filter(|&j| in_tree[j]).collect();
    let mut loop_index = vec![usize::MAX; ne];
    for (k, &e) in loops.iter().enumerate() {
        loop_index[e] = k;
    }
    let faces = x
        .faces()
        .iter()
        .map(|f| Face {
            label: f.label.clone(),
            word: f
                .word
                .iter()
                .filter(|l| !in_tree[l.edge])
                .map(|l| Letter { edge: loop_index[l.edge], sign: l.sign })
                .collect(),
        })
        .collect();
    let edges = loops
        .iter()
        .map(|&e| crate::surf::Edge { label: x.edges()[e].label.clone(), tail: 0, head: 0 })
        .collect();
    let model = SurfaceComplex::from_cells(vec![x.vertices()[root].clone()], edges, faces, Vec::new())?;
    let ends = x.edges().iter().map(|e| (e.tail, e.head)).collect();
    Ok(OneVertexModel { model, loops, tree_edges, tree_path, edge_count: ne, ends })
}

/// Half-edge end of loop `k`: `2k` is where it leaves the vertex, `2k + 1`
/// where it arrives.
fn departure(l: Letter) -> usize {
    if l.sign > 0 { 2 * l.edge } else { 2 * l.edge + 1 }
}

fn arrival(l: Letter) -> usize {
    if l.sign > 0 { 2 * l.edge + 1 } else { 2 * l.edge }
}

/// Cyclic position of every half-edge end around the vertex.
fn link_positions(model: &SurfaceComplex) -> Result<Vec<usize>, PairingError> {
    let n = 2 * model.edges().len();
    let mut next = vec![usize::MAX; n];
    for f in model.faces() {
        let k = f.word.len();
        for i in 0..k {
            let a = arrival(f.word[i]);
            let d = departure(f.word[(i + 1) % k]);
            if next[a] != usize::MAX {
                return Err(PairingError::BadLink);
            }
            next[a] = d;
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if next.contains(&usize::MAX) {
        return Err(PairingError::BadLink);
    }
    let mut pos = vec![usize::MAX; n];
    let mut node = 0;
    for step in 0..n {
        if pos[node] != usize::MAX {
            return Err(PairingError::BadLink);
        }
        pos[node] = step;
        node = next[node];
    }
    if node != 0 {
        return Err(PairingError::BadLink);
    }
    Ok(pos)
}

/// Skew-symmetric matrix of intersection numbers of the loops of a one-vertex model.
pub fn loop_intersections(model: &SurfaceComplex) -> Result<RatMatrix, PairingError> {
    let pos = link_positions(model)?;
    let k = model.edges().len();
    let n = 2 * k;
    let mut m = RatMatrix::zeros(k, k);
    // `t` lies on the arc going forward from `a` to `b` (exclusive)
    let inside = |a: usize, b: usize, t: usize| {
        let span = (b + n - a) % n;
        let off = (t + n - a) % n;
        off > 0 && off < span
    };
    for x in 0..k {
        let (x_out, x_in) = (pos[2 * x], pos[2 * x + 1]);
        for y in 0..k {
            if x == y {
                continue;
            }
            let (y_out, y_in) = (pos[2 * y], pos[2 * y + 1]);
            let out_in = inside(x_in, x_out, y_out);
            let in_in = inside(x_in, x_out, y_in);
            let value = match (out_in, in_in) {
                (true, false) => 1,
                (false, true) => -1,
                _ => 0,
            };
            m.set(x, y, rat(value));
        }
    }
    Ok(m)
}

/// Computes intersection numbers of 1-cycles of a closed surface.
#[derive(Debug, Clone)]
pub struct IntersectionForm {
    reduction: OneVertexModel,
    loops: RatMatrix,
    boundary: RatMatrix,
}

impl IntersectionForm {
    pub fn new(x: &SurfaceComplex) -> Result<Self, PairingError> {
        Self::with_root(x, 0)
    }

    pub fn with_root(x: &SurfaceComplex, root: usize) -> Result<Self, PairingError> {
        let reduction = one_vertex_reduction_from(x, root)?;
        let loops = loop_intersections(&reduction.model)?;
        Ok(IntersectionForm { reduction, loops, boundary: x.complex().boundary(1) })
    }

    pub fn reduction(&self) -> &OneVertexModel {
        &self.reduction
    }

    fn check_cycle(&self, k: usize, z: &[Rational]) -> Result<(), PairingError> {
        let d = self.boundary.mul_vec(z)?;
        if d.iter().any(|v| !v.is_zero()) {
            return Err(PairingError::NotACycle(k));
        }
        Ok(())
    }

    pub fn pair(&self, z: &[Rational], w: &[Rational]) -> Rational {
        let pz = self.reduction.project(z);
        let pw = self.reduction.project(w);
        let lw = self.loops.mul_vec(&pw).expect("sizes agree");
        pz.iter().zip(&lw).map(|(a, b)| a * b).sum()
    }

    /// `M_ij = ι(rows_i, cols_j)`.
    pub fn matrix(&self, rows: &BasisList, cols: &BasisList) -> Result<RatMatrix, PairingError> {
        for (k, z) in rows.vectors.iter().chain(&cols.vectors).enumerate() {
            self.check_cycle(k, z)?;
        }
        let entries = rows
            .vectors
            .iter()
            .flat_map(|z| cols.vectors.iter().map(move |w| (z, w)))
            .map(|(z, w)| self.pair(z, w))
            .collect();
        Ok(RatMatrix::from_entries(rows.len(), cols.len(), entries)?)
    }
}

/// Intersection matrix of the given 1-cycles.
pub fn intersection_form(x: &SurfaceComplex, basis: &BasisList) -> Result<RatMatrix, PairingError> {
    IntersectionForm::new(x)?.matrix(basis, basis)
}

/// Canonical basis `Γ_1..Γ_{2g}` with `Γ_i · Γ_{i+g} = 1` and all other pairings 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticBasis {
    pub genus: usize,
    pub cycles: BasisList,
}

/// Standard symplectic matrix `[[0, I], [-I, 0]]` of size `2g`.
pub fn canonical_form(g: usize) -> RatMatrix {
    let mut j = RatMatrix::zeros(2 * g, 2 * g);
    for i in 0..g {
        j.set(i, i + g, rat(1));
        j.set(i + g, i, rat(-1));
    }
    j
}

/// Symplectic reduction of the canonical homology representatives.
pub fn symplectic_basis(x: &SurfaceComplex) -> Result<SymplecticBasis, PairingError> {
    let form = IntersectionForm::new(x)?;
    let h = x.complex().homology();
    let mut pool: Vec<Vec<Rational>> = h.degrees[1].representatives.vectors.clone();
    let mut us = Vec::new();
    let mut vs = Vec::new();
    while !pool.is_empty() {
        let u = pool.remove(0);
        let Some(j) = pool.iter().position(|w| !form.pair(&u, w).is_zero()) else {
            return Err(PairingError::Degenerate);
        };
        let w = pool.remove(j);
        let k = form.pair(&u, &w);
        let v = scale_vector(&w, &k.recip());
        for z in pool.iter_mut() {
            let zv = form.pair(z, &v);
            let zu = form.pair(z, &u);
            add_scaled(z, &u, &-zv);
            add_scaled(z, &v, &zu);
        }
        us.push(u);
        vs.push(v);
    }
    let genus = us.len();
    let ambient_dim = x.complex().dim(1);
    us.extend(vs);
    Ok(SymplecticBasis { genus, cycles: BasisList { ambient_dim, vectors: us } })
}

/// `℘_ij = ∫_{Γ_i} ω_j` with `ω_j` dual to the `j`-th cycle of `h1`,
/// evaluated as the intersection number `Γ_i · h1_j`.
pub fn period_matrix(x: &SurfaceComplex, gamma: &SymplecticBasis, h1: &BasisList) -> Result<RatMatrix, PairingError> {
    IntersectionForm::new(x)?.matrix(&gamma.cycles, h1)
}

/// Sum of all 2-cells; a cycle for coherently oriented surfaces.
pub fn fundamental_class(x: &SurfaceComplex) -> Vec<Rational> {
    vec![Rational::one(); x.faces().len()]
}

/// `[λμ]` for `h0 = λ·[point]` and `h2 = μ·[X]`.
pub fn delta_02(x: &SurfaceComplex, h0: &[Rational], h2: &[Rational]) -> Result<RatMatrix, PairingError> {
    if h0.len() != x.vertices().len() || h2.len() != x.faces().len() {
        return Err(PairingError::BadBasis { degree: 0, reason: "wrong lengths".into() });
    }
    let lambda: Rational = h0.iter().sum();
    let fundamental = fundamental_class(x);
    let Some(mu) = h2.first().cloned() else {
        return Err(PairingError::BadBasis { degree: 2, reason: "surface has no 2-cells".into() });
    };
    if h2.iter().zip(&fundamental).any(|(a, f)| *a != &mu * f) {
        return Err(PairingError::BadBasis { degree: 2, reason: "not a multiple of the fundamental class".into() });
    }
    Ok(RatMatrix::from_entries(1, 1, vec![lambda * mu])?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairingReport {
    pub genus: usize,
    pub basis: Vec<Vec<String>>,
    pub intersection: Vec<Vec<String>>,
    pub period_matrix: Vec<Vec<String>>,
    pub det_period: String,
    pub delta_02: Vec<Vec<String>>,
    pub det_delta_02: String,
}

/// Pairing data of `x` for the homology bases `h0`, `h1`, `h2`.
pub fn pairing_report(
    x: &SurfaceComplex,
    h0: &[Rational],
    h1: &BasisList,
    h2: &[Rational],
) -> Result<PairingReport, PairingError> {
    let gamma = symplectic_basis(x)?;
    let form = IntersectionForm::new(x)?;
    let inter = form.matrix(&gamma.cycles, &gamma.cycles)?;
    let period = form.matrix(&gamma.cycles, h1)?;
    let d02 = delta_02(x, h0, h2)?;
    Ok(PairingReport {
        genus: gamma.genus,
        basis: vectors_to_json(&gamma.cycles),
        intersection: matrix_to_json(&inter),
        det_period: rat_to_string(&det(&period)?),
        period_matrix: matrix_to_json(&period),
        det_delta_02: rat_to_string(d02.get(0, 0)),
        delta_02: matrix_to_json(&d02),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::unit_vector;
    use crate::surf::{cylinder, double, pants, surface};
    use proptest::prelude::*;

    fn torus_word() -> SurfaceComplex {
        SurfaceComplex::from_cells(
            vec!["v".into()],
            vec![
                crate::surf::Edge { label: "a".into(), tail: 0, head: 0 },
                crate::surf::Edge { label: "b".into(), tail: 0, head: 0 },
            ],
            vec![Face { label: "F".into(), word: vec![Letter::pos(0), Letter::pos(1), Letter::neg(0), Letter::neg(1)] }],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn standard_torus() {
        let t = torus_word();
        let m = intersection_form(&t, &BasisList::standard(2)).unwrap();
        assert_eq!(m, RatMatrix::from_i64(&[&[0, 1], &[-1, 0]]));
        let r = one_vertex_reduction(&t).unwrap();
        assert_eq!(r.loops, vec![0, 1]);
        assert_eq!(r.lift_matrix(), RatMatrix::identity(2));
        let gamma = symplectic_basis(&t).unwrap();
        let p = period_matrix(&t, &gamma, &gamma.cycles).unwrap();
        assert_eq!(p, canonical_form(1));
    }

    #[test]
    fn doubled_cylinder_is_a_torus() {
        let (t, _) = double(&cylinder()).unwrap();
        let r = one_vertex_reduction(&t).unwrap();
        assert_eq!(r.model.vertices().len(), 1);
        assert_eq!(r.model.edges().len(), 3);
        let gamma = symplectic_basis(&t).unwrap();
        assert_eq!(gamma.genus, 1);
        let m = intersection_form(&t, &gamma.cycles).unwrap();
        assert_eq!(m, canonical_form(1));
    }

    #[test]
    fn doubled_pants_reduction() {
        let (x, _) = double(&pants()).unwrap();
        let r = one_vertex_reduction(&x).unwrap();
        assert_eq!(r.tree_edges.len(), 2);
        assert_eq!(r.model.edges().len(), 5);
        assert_eq!(r.model.complex().homology().betti(), vec![1, 4, 1]);
        // project ∘ lift is the identity on loops
        let id = r.projection_matrix().mul(&r.lift_matrix()).unwrap();
        assert_eq!(id, RatMatrix::identity(5));
        for k in 0..5 {
            let z = r.lift(k);
            assert!(x.complex().boundary(1).mul_vec(&z).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn canonical_bases_of_closed_surfaces() {
        for g in 2..=3 {
            let (x, _) = surface(g, 0).unwrap();
            let gamma = symplectic_basis(&x).unwrap();
            assert_eq!(gamma.genus, g);
            let m = intersection_form(&x, &gamma.cycles).unwrap();
            assert_eq!(m, canonical_form(g));
            assert_eq!(det(&m).unwrap(), rat(1));
        }
        let (x, _) = double(&pants()).unwrap();
        let gamma = symplectic_basis(&x).unwrap();
        assert_eq!(intersection_form(&x, &gamma.cycles).unwrap(), canonical_form(2));
    }

    #[test]
    fn boundaries_pair_to_zero() {
        let (x, _) = surface(2, 0).unwrap();
        let form = IntersectionForm::new(&x).unwrap();
        let d2 = x.complex().boundary(2);
        let reps = x.complex().homology().degrees[1].representatives.clone();
        for f in 0..d2.cols() {
            let b = d2.column(f);
            for z in &reps.vectors {
                assert!(form.pair(&b, z).is_zero());
            }
        }
    }

    #[test]
    fn independent_of_spanning_tree() {
        let (x, _) = double(&pants()).unwrap();
        let reps = x.complex().homology().degrees[1].representatives.clone();
        let base = IntersectionForm::with_root(&x, 0).unwrap().matrix(&reps, &reps).unwrap();
        for root in 1..x.vertices().len() {
            let m = IntersectionForm::with_root(&x, root).unwrap().matrix(&reps, &reps).unwrap();
            assert_eq!(m, base, "root {root}");
        }
    }

    #[test]
    fn period_matrix_scaling() {
        let (x, _) = double(&pants()).unwrap();
        let gamma = symplectic_basis(&x).unwrap();
        let p = period_matrix(&x, &gamma, &gamma.cycles).unwrap();
        assert_eq!(p, canonical_form(2));
        assert_eq!(det(&p).unwrap(), rat(1));
        let mut doubled = gamma.cycles.clone();
        doubled.vectors[0] = scale_vector(&doubled.vectors[0], &rat(2));
        assert_eq!(det(&period_matrix(&x, &gamma, &doubled).unwrap()).unwrap(), rat(2));
    }

    #[test]
    fn delta_pairing() {
        let (x, _) = double(&pants()).unwrap();
        let h0 = unit_vector(x.vertices().len(), 0);
        let h2 = fundamental_class(&x);
        assert!(x.complex().boundary(2).mul_vec(&h2).unwrap().iter().all(Zero::is_zero));
        assert_eq!(delta_02(&x, &h0, &h2).unwrap(), RatMatrix::from_i64(&[&[1]]));
        assert_eq!(delta_02(&x, &h0, &scale_vector(&h2, &rat(3))).unwrap(), RatMatrix::from_i64(&[&[3]]));
        assert_eq!(delta_02(&x, &scale_vector(&h0, &rat(-1)), &h2).unwrap(), RatMatrix::from_i64(&[&[-1]]));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(one_vertex_reduction(&pants()).unwrap_err(), PairingError::Bordered);
        let (x, _) = double(&pants()).unwrap();
        let bad = BasisList { ambient_dim: x.edges().len(), vectors: vec![unit_vector(x.edges().len(), 3)] };
        assert!(matches!(intersection_form(&x, &bad), Err(PairingError::NotACycle(0))));
    }

    proptest! {
        #[test]
        fn skew_and_bilinear(coeffs in proptest::collection::vec(-3i64..=3, 8), k in 1i64..=4) {
            let (x, _) = double(&pants()).unwrap();
            let reps = x.complex().homology().degrees[1].representatives.clone();
            let mut z = vec![Rational::zero(); x.edges().len()];
            let mut w = z.clone();
            for (i, r) in reps.vectors.iter().enumerate() {
                add_scaled(&mut z, r, &rat(coeffs[i]));
                add_scaled(&mut w, r, &rat(coeffs[i + 4]));
            }
            let basis = BasisList { ambient_dim: z.len(), vectors: vec![z.clone(), w.clone()] };
            let m = intersection_form(&x, &basis).unwrap();
            prop_assert!(m.get(0, 0).is_zero() && m.get(1, 1).is_zero());
            prop_assert_eq!(m.get(0, 1), &-m.get(1, 0).clone());
            let scaled = BasisList { ambient_dim: z.len(), vectors: vec![scale_vector(&z, &rat(k)), w] };
            let ms = intersection_form(&x, &scaled).unwrap();
            prop_assert_eq!(ms.get(0, 1), &(m.get(0, 1) * rat(k)));
        }
    }
}
