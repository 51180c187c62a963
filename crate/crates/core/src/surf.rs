//! Cell structures for the circle, the cylinder, the pair of pants and the
//! surfaces `Σ_{g,n}` obtained by gluing pants along boundary circles.
//!
//! A [`SurfaceComplex`] keeps the combinatorial data (vertices, oriented
//! edges, 2-cells with cyclic attaching words, named boundary circles) and
//! derives its cellular chain complex from it. Every boundary circle is a
//! single vertex with a single loop edge.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{BasedChainComplex, ComplexError, ComplexJson};
use crate::mv::{ChainMap, Decomposition};
use crate::ratlin::{rat, RatMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("no boundary circle named {0:?}")]
    UnknownCircle(String),
    #[error("circle {0:?} cannot be glued to itself")]
    SelfGluing(String),
    #[error("circle {0:?} is used twice in one gluing")]
    RepeatedCircle(String),
    #[error("surface is closed; doubling needs a boundary")]
    Closed,
    #[error("no pants decomposition for genus {g} with {n} boundary circles (need 2g-2+n >= 1)")]
    BelowThreshold { g: usize, n: usize },
    #[error("malformed cell structure: {0}")]
    Malformed(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// One letter `e^{±1}` of an attaching word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Letter {
    pub edge: usize,
    pub sign: i32,
}

impl Letter {
    pub fn pos(edge: usize) -> Self {
        Letter { edge, sign: 1 }
    }

    pub fn neg(edge: usize) -> Self {
        Letter { edge, sign: -1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub label: String,
    pub tail: usize,
    pub head: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub label: String,
    pub word: Vec<Letter>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCircle {
    pub name: String,
    pub vertex: usize,
    pub edge: usize,
}

/// A 2-complex with the cellular chain complex it determines.
#[derive(Clone, PartialEq, Eq)]
pub struct SurfaceComplex {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    circles: Vec<BoundaryCircle>,
    complex: BasedChainComplex,
}

impl fmt::Debug for SurfaceComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceComplex")
            .field("cells", &(self.vertices.len(), self.edges.len(), self.faces.len()))
            .field("circles", &self.circles.iter().map(|c| c.name.as_str()).collect::<Vec<_>>())
            .finish()
    }
}

impl SurfaceComplex {
    pub fn from_cells(
        vertices: Vec<String>,
        edges: Vec<Edge>,
        faces: Vec<Face>,
        circles: Vec<BoundaryCircle>,
    ) -> Result<Self, SurfaceError> {
        let nv = vertices.len();
        for e in &edges {
            if e.tail >= nv || e.head >= nv {
                return Err(SurfaceError::Malformed(format!("edge {} has an endpoint out of range", e.label)));
            }
        }
        for f in &faces {
            if f.word.is_empty() {
                return Err(SurfaceError::Malformed(format!("face {} has an empty word", f.label)));
            }
            for (i, l) in f.word.iter().enumerate() {
                if l.edge >= edges.len() || l.sign.abs() != 1 {
                    return Err(SurfaceError::Malformed(format!("bad letter in face {}", f.label)));
                }
                let next = f.word[(i + 1) % f.word.len()];
                if letter_end(&edges, *l) != letter_start(&edges, next) {
                    return Err(SurfaceError::Malformed(format!("attaching word of {} is not a closed path", f.label)));
                }
            }
        }
        for (i, c) in circles.iter().enumerate() {
            let e = edges
                .get(c.edge)
                .ok_or_else(|| SurfaceError::Malformed(format!("circle {} edge out of range", c.name)))?;
            if e.tail != c.vertex || e.head != c.vertex {
                return Err(SurfaceError::Malformed(format!("circle {} is not a loop at its vertex", c.name)));
            }
            if circles[..i].iter().any(|o| o.name == c.name) {
                return Err(SurfaceError::Malformed(format!("duplicate circle name {}", c.name)));
            }
        }

        let ne = edges.len();
        let nf = faces.len();
        let mut d1 = RatMatrix::zeros(nv, ne);
        for (j, e) in edges.iter().enumerate() {
            if e.tail != e.head {
                d1.set(e.head, j, rat(1));
                d1.set(e.tail, j, rat(-1));
            }
        }
        let mut dims = vec![nv, ne];
        let mut boundaries = vec![d1];
        let mut labels = vec![vertices.clone(), edges.iter().map(|e| e.label.clone()).collect()];
        if nf > 0 {
            let mut d2 = RatMatrix::zeros(ne, nf);
            for (j, f) in faces.iter().enumerate() {
                for l in &f.word {
                    let v = d2.get(l.edge, j) + rat(l.sign as i64);
                    d2.set(l.edge, j, v);
                }
            }
            dims.push(nf);
            boundaries.push(d2);
            labels.push(faces.iter().map(|f| f.label.clone()).collect());
        }
        let complex = BasedChainComplex::new(dims, boundaries, Some(labels))?;
        complex.validate()?;
        Ok(SurfaceComplex { vertices, edges, faces, circles, complex })
    }

    pub fn complex(&self) -> &BasedChainComplex {
        &self.complex
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn boundary_circles(&self) -> &[BoundaryCircle] {
        &self.circles
    }

    pub fn circle(&self, name: &str) -> Result<&BoundaryCircle, SurfaceError> {
        self.circles
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| SurfaceError::UnknownCircle(name.to_string()))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.complex.euler_characteristic()
    }

    pub fn is_closed(&self) -> bool {
        self.circles.is_empty()
    }

    /// Number of connected components of the 1-skeleton.
    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(e.tail, e.head);
        }
        (0..self.vertices.len()).filter(|&v| uf.find(v) == v).count()
    }

    /// Genus of a connected surface from `χ = 2 - 2g - n`.
    pub fn genus(&self) -> usize {
        let twice = 2 - self.euler_characteristic() - self.circles.len() as i64;
        (twice.max(0) / 2) as usize
    }

    /// Signed number of occurrences of `edge` in all attaching words.
    pub fn edge_incidence(&self, edge: usize) -> i64 {
        self.faces
            .iter()
            .flat_map(|f| &f.word)
            .filter(|l| l.edge == edge)
            .map(|l| l.sign as i64)
            .sum()
    }

    /// Prefixes every cell label with `prefix.`.
    pub fn with_cell_prefix(mut self, prefix: &str) -> Self {
        for v in &mut self.vertices {
            *v = format!("{prefix}.{v}");
        }
        for e in &mut self.edges {
            e.label = format!("{prefix}.{}", e.label);
        }
        for f in &mut self.faces {
            f.label = format!("{prefix}.{}", f.label);
        }
        SurfaceComplex::from_cells(self.vertices, self.edges, self.faces, self.circles).expect("relabeling keeps validity")
    }

    /// Renames boundary circles in order.
    pub fn with_circle_names(mut self, names: &[&str]) -> Result<Self, SurfaceError> {
        if names.len() != self.circles.len() {
            return Err(SurfaceError::Malformed(format!(
                "{} names for {} circles",
                names.len(),
                self.circles.len()
            )));
        }
        for (c, n) in self.circles.iter_mut().zip(names) {
            c.name = n.to_string();
        }
        SurfaceComplex::from_cells(self.vertices, self.edges, self.faces, self.circles)
    }

    pub fn rename_circle(mut self, from: &str, to: &str) -> Result<Self, SurfaceError> {
        self.circle(from)?;
        for c in &mut self.circles {
            if c.name == from {
                c.name = to.to_string();
            }
        }
        SurfaceComplex::from_cells(self.vertices, self.edges, self.faces, self.circles)
    }

    pub fn to_json(&self) -> SurfaceJson {
        SurfaceJson {
            genus: self.genus(),
            boundary_count: self.circles.len(),
            euler_characteristic: self.euler_characteristic(),
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            faces: self.faces.clone(),
            boundary_circles: self.circles.clone(),
            complex: self.complex.to_json(),
        }
    }

    pub fn from_json(json: &SurfaceJson) -> Result<Self, SurfaceError> {
        let s = SurfaceComplex::from_cells(
            json.vertices.clone(),
            json.edges.clone(),
            json.faces.clone(),
            json.boundary_circles.clone(),
        )?;
        if BasedChainComplex::from_json(&json.complex)? != s.complex {
            return Err(SurfaceError::Malformed("chain complex does not match the cells".into()));
        }
        Ok(s)
    }
}

fn letter_start(edges: &[Edge], l: Letter) -> usize {
    if l.sign > 0 { edges[l.edge].tail } else { edges[l.edge].head }
}

fn letter_end(edges: &[Edge], l: Letter) -> usize {
    if l.sign > 0 { edges[l.edge].head } else { edges[l.edge].tail }
}

/// Surface JSON: cells, attaching words, boundary registry and the derived complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceJson {
    pub genus: usize,
    pub boundary_count: usize,
    pub euler_characteristic: i64,
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    pub boundary_circles: Vec<BoundaryCircle>,
    pub complex: ComplexJson,
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    /// Keeps the smaller index as the root.
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

fn edge(label: &str, tail: usize, head: usize) -> Edge {
    Edge { label: label.to_string(), tail, head }
}

fn circle_at(name: &str, vertex: usize, edge: usize) -> BoundaryCircle {
    BoundaryCircle { name: name.to_string(), vertex, edge }
}

/// One vertex, one loop.
pub fn circle() -> SurfaceComplex {
    SurfaceComplex::from_cells(vec!["v".into()], vec![edge("c", 0, 0)], vec![], vec![circle_at("c", 0, 0)])
        .expect("fixed cell structure")
}

/// Product structure on `S¹ × [-ε, ε]`: loops `bottom`, `top`, a vertical
/// edge `e`, and one square with `∂ = top - bottom`.
pub fn cylinder() -> SurfaceComplex {
    SurfaceComplex::from_cells(
        vec!["u0".into(), "u1".into()],
        vec![edge("bottom", 0, 0), edge("top", 1, 1), edge("e", 0, 1)],
        vec![Face { label: "Q".into(), word: vec![Letter::pos(2), Letter::pos(1), Letter::neg(2), Letter::neg(0)] }],
        vec![circle_at("bottom", 0, 0), circle_at("top", 1, 1)],
    )
    .expect("fixed cell structure")
}

/// Pair of pants: vertices `v1, v2, v3`, boundary loops `c1, c2, c3`, arcs
/// `a1: v1 → v2`, `a2: v2 → v3`, and one 2-cell with word
/// `c1 a1 c2⁻¹ a2 c3⁻¹ a2⁻¹ a1⁻¹`, so `∂F = c1 - c2 - c3`.
pub fn pants() -> SurfaceComplex {
    SurfaceComplex::from_cells(
        vec!["v1".into(), "v2".into(), "v3".into()],
        vec![edge("c1", 0, 0), edge("c2", 1, 1), edge("c3", 2, 2), edge("a1", 0, 1), edge("a2", 1, 2)],
        vec![Face {
            label: "F".into(),
            word: vec![
                Letter::pos(0),
                Letter::pos(3),
                Letter::neg(1),
                Letter::pos(4),
                Letter::neg(2),
                Letter::neg(4),
                Letter::neg(3),
            ],
        }],
        vec![circle_at("c1", 0, 0), circle_at("c2", 1, 1), circle_at("c3", 2, 2)],
    )
    .expect("fixed cell structure")
}

/// Glues `y` onto `x` along the named circle pairs at once. Circle cells are
/// identified vertex to vertex and loop to loop, the loop of `y` replaced by
/// `ε` times the loop of `x` with `ε` chosen so the two adjacent 2-cells
/// induce opposite orientations (orientation reversal when both occur with
/// the same sign). Returns the glued surface and the decomposition record
/// with `A = x`, `B = y`, `I` the glued circles.
pub fn glue_many(
    x: &SurfaceComplex,
    y: &SurfaceComplex,
    pairs: &[(&str, &str)],
) -> Result<(SurfaceComplex, Decomposition), SurfaceError> {
    for (i, (cx, cy)) in pairs.iter().enumerate() {
        if std::ptr::eq(x, y) && cx == cy {
            return Err(SurfaceError::SelfGluing(cx.to_string()));
        }
        if pairs[..i].iter().any(|(px, _)| px == cx) {
            return Err(SurfaceError::RepeatedCircle(cx.to_string()));
        }
        if pairs[..i].iter().any(|(_, py)| py == cy) {
            return Err(SurfaceError::RepeatedCircle(cy.to_string()));
        }
    }
    let glued: Vec<(&BoundaryCircle, &BoundaryCircle, i32)> = pairs
        .iter()
        .map(|(cx, cy)| {
            let a = x.circle(cx)?;
            let b = y.circle(cy)?;
            let (sa, sb) = (x.edge_incidence(a.edge), y.edge_incidence(b.edge));
            let eps = if sa == 0 || sb == 0 { 1 } else { -(sa * sb).signum() as i32 };
            Ok((a, b, eps))
        })
        .collect::<Result<_, SurfaceError>>()?;

    let (nvx, nex, nfx) = (x.vertices.len(), x.edges.len(), x.faces.len());
    let mut uf = UnionFind::new(nvx + y.vertices.len());
    for (a, b, _) in &glued {
        uf.union(a.vertex, nvx + b.vertex);
    }
    let mut new_vertex = vec![usize::MAX; nvx + y.vertices.len()];
    let mut vertices = Vec::new();
    for v in 0..new_vertex.len() {
        let r = uf.find(v);
        if new_vertex[r] == usize::MAX {
            new_vertex[r] = vertices.len();
            vertices.push(if v < nvx { x.vertices[v].clone() } else { y.vertices[v - nvx].clone() });
        }
        new_vertex[v] = new_vertex[r];
    }

    // y edge index -> (new edge, sign)
    let mut y_edge = vec![(usize::MAX, 1i32); y.edges.len()];
    for (a, b, eps) in &glued {
        y_edge[b.edge] = (a.edge, *eps);
    }
    let mut edges: Vec<Edge> = x
        .edges
        .iter()
        .map(|e| Edge { label: e.label.clone(), tail: new_vertex[e.tail], head: new_vertex[e.head] })
        .collect();
    for (j, e) in y.edges.iter().enumerate() {
        if y_edge[j].0 == usize::MAX {
            y_edge[j] = (edges.len(), 1);
            edges.push(Edge { label: e.label.clone(), tail: new_vertex[nvx + e.tail], head: new_vertex[nvx + e.head] });
        }
    }
    let mut faces = x.faces.clone();
    for f in &y.faces {
        let word = f
            .word
            .iter()
            .map(|l| {
                let (e, s) = y_edge[l.edge];
                Letter { edge: e, sign: l.sign * s }
            })
            .collect();
        faces.push(Face { label: f.label.clone(), word });
    }

    let mut circles: Vec<BoundaryCircle> = x
        .circles
        .iter()
        .filter(|c| !glued.iter().any(|(a, _, _)| a.name == c.name))
        .map(|c| BoundaryCircle { name: c.name.clone(), vertex: new_vertex[c.vertex], edge: c.edge })
        .collect();
    for c in y.circles.iter().filter(|c| !glued.iter().any(|(_, b, _)| b.name == c.name)) {
        let mut name = c.name.clone();
        while circles.iter().any(|o| o.name == name) {
            name.push('\'');
        }
        circles.push(BoundaryCircle { name, vertex: new_vertex[nvx + c.vertex], edge: y_edge[c.edge].0 });
    }
    let surface = SurfaceComplex::from_cells(vertices, edges, faces, circles)?;

    // chain maps of the decomposition
    let len = 3;
    let xc = surface.complex.padded(len);
    let ac = x.complex.padded(len);
    let bc = y.complex.padded(len);
    let k = glued.len();
    let ic = intersection_complex(&glued.iter().map(|(a, _, _)| a.name.clone()).collect::<Vec<_>>()).padded(len);

    let mut a_to_x = vec![
        RatMatrix::zeros(xc.dim(0), ac.dim(0)),
        RatMatrix::zeros(xc.dim(1), ac.dim(1)),
        RatMatrix::zeros(xc.dim(2), ac.dim(2)),
    ];
    for (v, &w) in new_vertex[..nvx].iter().enumerate() {
        a_to_x[0].set(w, v, rat(1));
    }
    for e in 0..nex {
        a_to_x[1].set(e, e, rat(1));
    }
    for f in 0..nfx {
        a_to_x[2].set(f, f, rat(1));
    }
    let mut b_to_x = vec![
        RatMatrix::zeros(xc.dim(0), bc.dim(0)),
        RatMatrix::zeros(xc.dim(1), bc.dim(1)),
        RatMatrix::zeros(xc.dim(2), bc.dim(2)),
    ];
    for v in 0..y.vertices.len() {
        b_to_x[0].set(new_vertex[nvx + v], v, rat(1));
    }
    for (j, &(e, s)) in y_edge.iter().enumerate() {
        b_to_x[1].set(e, j, rat(s as i64));
    }
    for f in 0..y.faces.len() {
        b_to_x[2].set(nfx + f, f, rat(1));
    }
    let mut i_to_a = vec![RatMatrix::zeros(ac.dim(0), k), RatMatrix::zeros(ac.dim(1), k), RatMatrix::zeros(ac.dim(2), 0)];
    let mut i_to_b = vec![RatMatrix::zeros(bc.dim(0), k), RatMatrix::zeros(bc.dim(1), k), RatMatrix::zeros(bc.dim(2), 0)];
    for (j, (a, b, eps)) in glued.iter().enumerate() {
        i_to_a[0].set(a.vertex, j, rat(1));
        i_to_a[1].set(a.edge, j, rat(1));
        i_to_b[0].set(b.vertex, j, rat(1));
        i_to_b[1].set(b.edge, j, rat(*eps as i64));
    }
    let decomposition = Decomposition {
        x: xc,
        a: ac,
        b: bc,
        i: ic,
        i_to_a: ChainMap::new(i_to_a),
        i_to_b: ChainMap::new(i_to_b),
        a_to_x: ChainMap::new(a_to_x),
        b_to_x: ChainMap::new(b_to_x),
        circle_names: pairs.iter().map(|(cx, _)| cx.to_string()).collect(),
    };
    Ok((surface, decomposition))
}

/// Disjoint union of `k` one-vertex circles.
fn intersection_complex(names: &[String]) -> BasedChainComplex {
    let k = names.len();
    BasedChainComplex::new(
        vec![k, k],
        vec![RatMatrix::zeros(k, k)],
        Some(vec![
            names.iter().map(|n| format!("{n}.v")).collect(),
            names.iter().map(|n| format!("{n}.c")).collect(),
        ]),
    )
    .expect("shapes are consistent")
}

/// Glues along a single pair of circles.
pub fn glue(
    x: &SurfaceComplex,
    cx: &str,
    y: &SurfaceComplex,
    cy: &str,
) -> Result<(SurfaceComplex, Decomposition), SurfaceError> {
    glue_many(x, y, &[(cx, cy)])
}

/// Two copies of `x` glued along all boundary circles (copy A first).
pub fn double(x: &SurfaceComplex) -> Result<(SurfaceComplex, Decomposition), SurfaceError> {
    if x.is_closed() {
        return Err(SurfaceError::Closed);
    }
    let copy = x.clone();
    let names: Vec<String> = x.circles.iter().map(|c| c.name.clone()).collect();
    let pairs: Vec<(&str, &str)> = names.iter().map(|n| (n.as_str(), n.as_str())).collect();
    glue_many(x, &copy, &pairs)
}

/// Circle label of a pants decomposition: `S_k` (k may be zero or negative
/// for the outer boundary chain) or `S'_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CircleLabel {
    Cut(i64),
    Prime(usize),
}

impl fmt::Display for CircleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircleLabel::Cut(k) => write!(f, "S_{k}"),
            CircleLabel::Prime(k) => write!(f, "S'_{k}"),
        }
    }
}

impl Serialize for CircleLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    Pants,
    TorusWithBoundary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub label: usize,
    pub kind: PieceKind,
    pub circles: Vec<CircleLabel>,
}

/// Combinatorial pants decomposition of `Σ_{g,n}`: the `2g-2+n` pants, the
/// intermediate tori `Σ_{1,1}^ν = Y_ν ∪ Σ_{0,3}^ν`, and circle labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PantsDecomposition {
    pub genus: usize,
    pub boundary_count: usize,
    pub pieces: Vec<Piece>,
    pub tori: Vec<Piece>,
    pub cutting_circles: Vec<CircleLabel>,
    pub meridians: Vec<CircleLabel>,
    pub boundary_circles: Vec<CircleLabel>,
}

impl PantsDecomposition {
    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    /// Number of pants sides bounded by `label` (each `S'_ν` bounds its pants twice).
    pub fn sides(&self, label: CircleLabel) -> usize {
        self.pieces.iter().map(|p| p.circles.iter().filter(|&&c| c == label).count()).sum()
    }
}

fn check_threshold(g: usize, n: usize) -> Result<(), SurfaceError> {
    if 2 * g + n < 3 {
        return Err(SurfaceError::BelowThreshold { g, n });
    }
    Ok(())
}

/// Boundary circles of the genus-zero chain, in gluing order: the torus
/// boundaries `S_1..S_g` followed by the outer circles `S_0, S_{-1}, …`.
fn chain_sequence(g: usize, n: usize) -> Vec<CircleLabel> {
    let inner = (1..=g as i64).map(CircleLabel::Cut);
    let outer = (0..n as i64).map(|k| CircleLabel::Cut(-k));
    inner.chain(outer).collect()
}

/// Boundary labels of the chain pants `g+1, …, 2g-2+n`.
fn chain_pieces(g: usize, n: usize) -> Vec<Vec<CircleLabel>> {
    let seq = chain_sequence(g, n);
    let m = seq.len();
    if m < 3 {
        return Vec::new();
    }
    let gi = g as i64;
    let count = m - 2;
    (1..=count)
        .map(|k| {
            let ki = k as i64;
            let out = CircleLabel::Cut(gi + ki);
            let prev = CircleLabel::Cut(gi + ki - 1);
            match (k == 1, k == count) {
                (true, true) => vec![seq[0], seq[1], seq[2]],
                (true, false) => vec![seq[0], seq[1], out],
                (false, false) => vec![out, seq[k], prev],
                (false, true) => vec![prev, seq[m - 1], seq[m - 2]],
            }
        })
        .collect()
}

pub fn pants_decomposition(g: usize, n: usize) -> Result<PantsDecomposition, SurfaceError> {
    check_threshold(g, n)?;
    let closed_pair = g == 2 && n == 0;
    let single_torus = g == 1 && n == 1;
    let torus_boundary = |nu: usize| -> CircleLabel {
        if closed_pair {
            CircleLabel::Cut(1)
        } else if single_torus {
            CircleLabel::Cut(0)
        } else {
            CircleLabel::Cut(nu as i64)
        }
    };
    let mut pieces = Vec::new();
    let mut tori = Vec::new();
    for nu in 1..=g {
        let s = torus_boundary(nu);
        pieces.push(Piece {
            label: nu,
            kind: PieceKind::Pants,
            circles: vec![CircleLabel::Prime(nu), CircleLabel::Prime(nu), s],
        });
        tori.push(Piece { label: nu, kind: PieceKind::TorusWithBoundary, circles: vec![s] });
    }
    for (k, circles) in chain_pieces(g, n).into_iter().enumerate() {
        pieces.push(Piece { label: g + k + 1, kind: PieceKind::Pants, circles });
    }
    let cut_count = (2 * g + n) as i64 - 3;
    let cutting_circles = (1..=cut_count).map(CircleLabel::Cut).collect();
    let boundary_circles = if single_torus {
        vec![CircleLabel::Cut(0)]
    } else {
        (0..n as i64).map(|k| CircleLabel::Cut(-k)).collect()
    };
    Ok(PantsDecomposition {
        genus: g,
        boundary_count: n,
        pieces,
        tori,
        cutting_circles,
        meridians: (1..=g).map(CircleLabel::Prime).collect(),
        boundary_circles,
    })
}

/// Which gluing step of the inductive argument a node realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GluingCase {
    /// `Σ_{0,3} ∪ Σ_{0,n-1} = Σ_{0,n}`
    Case1,
    /// `Σ_{0,3} ∪ Y = Σ_{1,1}` along two circles
    Case2,
    /// `Σ_{g-1,1} ∪ Σ_{1,1} = Σ_{g,0}`
    Case3,
    /// `Σ_{g-1,n+1} ∪ Σ_{1,1} = Σ_{g,n}`
    Case4,
    /// two copies glued along every boundary circle
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LeafKind {
    Pants(usize),
    Cylinder(usize),
}

/// Binary gluing history of a surface; leaves are pants and cylinders.
#[derive(Debug, Clone)]
pub enum GluingTree {
    Leaf {
        surface: SurfaceComplex,
        kind: LeafKind,
    },
    Node {
        surface: SurfaceComplex,
        decomposition: Box<Decomposition>,
        case: GluingCase,
        a: Box<GluingTree>,
        b: Box<GluingTree>,
    },
}

impl GluingTree {
    pub fn surface(&self) -> &SurfaceComplex {
        match self {
            GluingTree::Leaf { surface, .. } | GluingTree::Node { surface, .. } => surface,
        }
    }

    pub fn pants_count(&self) -> usize {
        match self {
            GluingTree::Leaf { kind: LeafKind::Pants(_), .. } => 1,
            GluingTree::Leaf { .. } => 0,
            GluingTree::Node { a, b, .. } => a.pants_count() + b.pants_count(),
        }
    }

    /// Nodes in pre-order (root first, then `a`, then `b`).
    pub fn nodes(&self) -> Vec<&GluingTree> {
        let mut out = vec![self];
        if let GluingTree::Node { a, b, .. } = self {
            out.extend(a.nodes());
            out.extend(b.nodes());
        }
        out
    }

    fn glue(
        a: GluingTree,
        b: GluingTree,
        pairs: &[(&str, &str)],
        case: GluingCase,
    ) -> Result<GluingTree, SurfaceError> {
        let (surface, dec) = glue_many(a.surface(), b.surface(), pairs)?;
        Ok(GluingTree::Node { surface, decomposition: Box::new(dec), case, a: Box::new(a), b: Box::new(b) })
    }
}

fn labelled_pants(nu: usize, circles: &[CircleLabel]) -> Result<SurfaceComplex, SurfaceError> {
    let names: Vec<String> = circles.iter().map(ToString::to_string).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    pants().with_cell_prefix(&format!("P{nu}")).with_circle_names(&refs)
}

/// `Σ_{1,1}^ν = Σ_{0,3}^ν ∪ Y_ν` with boundary named `boundary`.
fn torus_piece(nu: usize, boundary: CircleLabel) -> Result<GluingTree, SurfaceError> {
    let lo = format!("S'_{nu}-");
    let hi = format!("S'_{nu}+");
    let b = boundary.to_string();
    let p = pants().with_cell_prefix(&format!("P{nu}")).with_circle_names(&[&lo, &hi, &b])?;
    let y = cylinder().with_cell_prefix(&format!("Y{nu}")).with_circle_names(&[&lo, &hi])?;
    GluingTree::glue(
        GluingTree::Leaf { surface: p, kind: LeafKind::Pants(nu) },
        GluingTree::Leaf { surface: y, kind: LeafKind::Cylinder(nu) },
        &[(&lo, &lo), (&hi, &hi)],
        GluingCase::Case2,
    )
}

/// Gluing history of `Σ_{g,n}`: tori `Σ_{1,1}^ν` (Case 2), the genus-zero
/// chain of the remaining pants (Case 1), then the tori attached one at a
/// time (Case 4, and Case 3 for the last torus of a closed surface).
pub fn gluing_tree(g: usize, n: usize) -> Result<GluingTree, SurfaceError> {
    let dec = pants_decomposition(g, n)?;
    let chain = &dec.pieces[g..];
    let mut tree: Option<GluingTree> = None;
    for piece in chain {
        let p = GluingTree::Leaf { surface: labelled_pants(piece.label, &piece.circles)?, kind: LeafKind::Pants(piece.label) };
        tree = Some(match tree {
            None => p,
            Some(rest) => {
                let shared = CircleLabel::Cut(piece.label as i64 - 1).to_string();
                GluingTree::glue(p, rest, &[(&shared, &shared)], GluingCase::Case1)?
            }
        });
    }
    for nu in 1..=g {
        let boundary = dec.tori[nu - 1].circles[0];
        let torus = torus_piece(nu, boundary)?;
        tree = Some(match tree {
            None => torus,
            Some(rest) => {
                let name = boundary.to_string();
                let closes = rest.surface().boundary_circles().len() == 1 && n == 0;
                let case = if closes { GluingCase::Case3 } else { GluingCase::Case4 };
                GluingTree::glue(rest, torus, &[(&name, &name)], case)?
            }
        });
    }
    Ok(tree.expect("threshold guarantees at least one piece"))
}

/// `Σ_{g,n}` assembled from pants, with its decomposition record.
pub fn surface(g: usize, n: usize) -> Result<(SurfaceComplex, PantsDecomposition), SurfaceError> {
    let tree = gluing_tree(g, n)?;
    Ok((tree.surface().clone(), pants_decomposition(g, n)?))
}
