//! Exact analysis of Euclidean crystallographic groups.
//!
//! A crystallographic group is stored as a finite point group of integer
//! matrices acting on `Z^n` together with a vector system `g -> u_g` of
//! rational translations. From that data the crate computes the minimal
//! denominator of the affine realization, the extension class in
//! `H^2(G, Z^n)`, torsion-freeness, the isotypical decomposition of the
//! complexified lattice, evenness, Hodge types and the dimensions of the
//! corresponding Teichmüller components.

pub mod analysis;
pub mod catalog;
pub mod cli;
pub mod cohomology;
pub mod cryst;
pub mod cyclotomic;
pub mod error;
pub mod group;
pub mod hodge;
pub mod io;
pub mod linalg;

pub use error::{Error, Result};
