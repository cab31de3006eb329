//! Fourier–Galerkin fields on the periodic square.
//!
//! Norms are true integral norms over `[0, L)²`: `‖u‖² = L² Σ_k |û(k)|²`.

mod field;
mod forcing;
mod grid;
pub mod snapshot;
mod transform;

pub use field::{
    leray_project, nonlinear_term, random_divfree_field, stokes_apply, trilinear_b, Norms,
    RawField, Spectrum, VelocityField,
};
pub use forcing::{ForcingMode, ForcingSpec, TimeProfile};
pub use grid::TorusGrid;
