//! Exact computations with generic non-critical crystalline filtered
//! φ-modules and the locally analytic extension data attached to them.
//!
//! The crate is organised in layers:
//!
//! * [`exactlin`] — exact rational matrices, canonical subspaces, quotients
//!   and flags;
//! * [`filphi`] — filtered φ-modules over an unramified base: genericity,
//!   weak admissibility, refinements, Hodge parameters, filtered `Hom`/`Ext¹`;
//! * [`charspace`] — coordinates on `Hom(T(K), E)` and the Weyl action;
//! * [`glncomb`] — constituent labels, parabolic combinatorics and the
//!   extension-dimension formulas;
//! * [`extcalc`] — presented models of the automorphic and Galois extension
//!   spaces, the comparison map between them and its kernel.

pub mod charspace;
pub mod error;
pub mod exactlin;
pub mod extcalc;
pub mod filphi;
pub mod glncomb;
pub mod perm;

pub use charspace::CharVector;
pub use error::{Error, Result};
pub use exactlin::{ExactScalar, Flag, Matrix, Quotient, Subspace};
pub use extcalc::{PresentedModel, TDModel};
pub use filphi::{FilteredPhiModule, Filtration, Refinement};
pub use glncomb::{Constituent, ParabolicShape, SocleDiagram};
pub use perm::Perm;
