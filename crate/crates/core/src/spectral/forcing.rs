use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{leray_project, RawField, VelocityField};
use super::grid::TorusGrid;
use crate::error::Result;

/// One forced wavenumber. The conjugate partner at `-k` is added automatically,
/// so the physical contribution is `2 Re(c e^{ik·x})` per component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForcingMode {
    pub k: [i64; 2],
    /// `[[re₁, im₁], [re₂, im₂]]`.
    pub amplitude: [[f64; 2]; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeProfile {
    #[default]
    Constant,
    /// Multiplies the spatial pattern by `cos(frequency·t + phase)`.
    Sinusoidal { frequency: f64, phase: f64 },
}

impl TimeProfile {
    pub fn factor(&self, t: f64) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Sinusoidal { frequency, phase } => (frequency * t + phase).cos(),
        }
    }

    /// `sup_{t ≥ 0} |factor(t)|`.
    pub fn sup(&self) -> f64 {
        match *self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Sinusoidal { frequency, phase } => {
                if frequency == 0.0 {
                    phase.cos().abs()
                } else {
                    1.0
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct ForcingSpec {
    #[serde(default)]
    pub modes: Vec<ForcingMode>,
    #[serde(default)]
    pub profile: TimeProfile,
}

impl ForcingSpec {
    pub fn none() -> Self {
        Self::default()
    }

    /// Steady forcing on a single mode.
    pub fn single(k: [i64; 2], amplitude: [[f64; 2]; 2]) -> Self {
        Self {
            modes: vec![ForcingMode { k, amplitude }],
            profile: TimeProfile::Constant,
        }
    }

    /// The projected spatial pattern.
    pub fn spatial(&self, grid: &TorusGrid) -> Result<VelocityField> {
        let mut raw = RawField::zeros(grid);
        for m in &self.modes {
            let c = [
                Complex64::new(m.amplitude[0][0], m.amplitude[0][1]),
                Complex64::new(m.amplitude[1][0], m.amplitude[1][1]),
            ];
            let [k1, k2] = m.k;
            raw.add(k1, k2, c)?;
            raw.add(-k1, -k2, [c[0].conj(), c[1].conj()])?;
        }
        Ok(leray_project(raw))
    }

    pub fn at(&self, grid: &TorusGrid, t: f64) -> Result<VelocityField> {
        Ok(self.spatial(grid)?.scaled(self.profile.factor(t)))
    }

    /// `‖f‖_∞ = sup_t ‖f(t)‖` in closed form.
    pub fn sup_norm(&self, grid: &TorusGrid) -> Result<f64> {
        Ok(self.spatial(grid)?.l2() * self.profile.sup())
    }
}
