//! One-leg θ-scheme for 2D incompressible Navier–Stokes on the periodic torus,
//! with discrete energy and stability certificates.

pub mod certify;
pub mod constants;
pub mod error;
pub mod gronwall;
pub mod spectral;
pub mod stepper;

pub use certify::{full_report, CertificateReport, CertifyParams};
pub use constants::{BoundLedger, LedgerInputs, ThetaConstants, Variant};
pub use error::{Error, Result};
pub use spectral::{ForcingSpec, TorusGrid, VelocityField};
pub use stepper::{run, RunConfig, StepRecord, TrajectoryLog};
