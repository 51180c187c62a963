//! Exact Reidemeister-Franz torsion for finite based chain complexes, cell
//! complexes of compact orientable surfaces assembled from pairs of pants,
//! Mayer-Vietoris bookkeeping and the torsion identities for pants
//! decompositions.
//!
//! All arithmetic is over the rationals; identities involving square roots
//! are checked by comparing squares.

pub mod complex;
pub mod formulas;
pub mod mv;
pub mod pairing;
pub mod par;
pub mod ratlin;
pub mod surf;
pub mod torsion;
