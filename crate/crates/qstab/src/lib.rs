//! Exact and numerical machinery around q-deformed root lattices and
//! stability conditions on type-A quiver hearts.
//!
//! The crate has two halves that meet in the K-lattice:
//!
//! * **Exact algebra** over `Z[q, q⁻¹]`: q-Cartan matrices, q-reflections,
//!   the K-theory action of spherical twists, braid/Hecke relation checks,
//!   and integer reductions (`ring`, `quiver`, `qlattice`).
//! * **Stability machinery** on the module heart of a type-A path algebra:
//!   Harder–Narasimhan filtrations, semistable tables, the global-dimension
//!   function and its minimization, the induced q-stability classification,
//!   and the explicit A₂ picture (`repalg`, `stability`, `qinduce`, `a2`).
//! * **Numerical monodromy** of the Coxeter-KZ connection for ADE reflection
//!   representations, with Hecke/braid residuals and Frobenius-multiplication
//!   cross-checks (`ckz`).

#![allow(clippy::needless_range_loop)] // index loops run over several matrices at once

pub mod a2;
pub mod ckz;
pub mod error;
pub mod qinduce;
pub mod qlattice;
pub mod quiver;
pub mod repalg;
pub mod ring;
pub mod stability;

pub use error::{Error, Result};
