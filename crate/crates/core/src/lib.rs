//! Mod-p pro-p Iwahori–Hecke algebras of SL2, GL2 and split tori over finite
//! fields, their finite-dimensional modules, parabolic induction and its right
//! adjoint, and spectral-sequence bookkeeping for cohomology tables.

pub mod error;
pub mod field;
pub mod linalg;
pub mod weyl;
pub mod algebra;
pub mod character;
pub mod module;
pub mod functors;
pub mod classify;
pub mod report;
pub mod spectral;
pub mod fixtures;

pub use error::{HeckeError, Result};
