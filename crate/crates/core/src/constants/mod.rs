//! Scheme constants and the bound ledger.

mod ledger;
mod theta;

pub use ledger::{BoundLedger, Chain, K5Fn, LedgerInputs, LongTime, Provenance, Variant};
pub use theta::{check_identities, half_theta_obstruction, theta_constants, theta_constants_scaled, ThetaConstants};
