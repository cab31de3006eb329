//! Fixtures shared by the kernel benchmarks.

use oneleg::spectral::{random_divfree_field, Spectrum};
use oneleg::{ForcingSpec, RunConfig, TorusGrid, VelocityField};

/// A random divergence-free field on the standard `n × n` torus.
pub fn field(n: usize, seed: u64) -> VelocityField {
    let grid = TorusGrid::standard(n).expect("even resolution");
    random_divfree_field(&grid, seed, Spectrum::default())
}

/// A moderately viscous forced run starting from [`field`].
pub fn run_config(n: usize) -> RunConfig {
    RunConfig::new(field(n, 1), 0.05, 0.75, 0.01, 1)
        .with_forcing(ForcingSpec::single([1, 2], [[0.2, 0.0], [-0.1, 0.0]]))
}
