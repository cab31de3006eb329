use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic square `[0, L)^2` carrying `n` Fourier modes per axis.
///
/// Retained wavenumbers satisfy `|k_i| <= n/2 - 1`; the Nyquist line is kept
/// at zero so that every retained mode has its conjugate partner.
#[derive(Clone)]
pub struct TorusGrid {
    n: usize,
    length: f64,
    plans: Arc<Plans>,
}

pub(crate) struct Plans {
    pub forward: Arc<dyn Fft<f64>>,
    pub inverse: Arc<dyn Fft<f64>>,
    /// Physical wavenumber components and `|k|²` per storage slot (zero off the retained set).
    pub k1: Vec<f64>,
    pub k2: Vec<f64>,
    pub ksq: Vec<f64>,
    pub retained: Vec<bool>,
}

fn slot_wavenumber(n: usize, i: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

#[derive(Serialize, Deserialize)]
struct GridSpec {
    n: usize,
    domain_length: f64,
}

impl TorusGrid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "resolution must be even and at least 4, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "domain length must be positive, got {length}"
            )));
        }
        let m = 2 * n;
        let mut planner = FftPlanner::new();
        let kmax = n as i64 / 2 - 1;
        let scale = 2.0 * PI / length;
        let mut k1 = vec![0.0; n * n];
        let mut k2 = vec![0.0; n * n];
        let mut ksq = vec![0.0; n * n];
        let mut retained = vec![false; n * n];
        for i1 in 0..n {
            for i2 in 0..n {
                let (a, b) = (slot_wavenumber(n, i1), slot_wavenumber(n, i2));
                if a.abs() <= kmax && b.abs() <= kmax {
                    let idx = i1 * n + i2;
                    k1[idx] = a as f64 * scale;
                    k2[idx] = b as f64 * scale;
                    ksq[idx] = k1[idx] * k1[idx] + k2[idx] * k2[idx];
                    retained[idx] = true;
                }
            }
        }
        let plans = Plans {
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
            k1,
            k2,
            ksq,
            retained,
        };
        Ok(Self {
            n,
            length,
            plans: Arc::new(plans),
        })
    }

    /// Grid on the standard `2π` torus, where `λ₁ = 1`.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn domain_length(&self) -> f64 {
        self.length
    }

    /// Physical resolution used for products and quadrature.
    pub fn padded(&self) -> usize {
        2 * self.n
    }

    pub fn kmax(&self) -> i64 {
        self.n as i64 / 2 - 1
    }

    /// Factor converting integer wavenumbers to physical ones.
    pub fn k_scale(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// First Stokes eigenvalue.
    pub fn lambda1(&self) -> f64 {
        self.k_scale() * self.k_scale()
    }

    /// Parseval weight: `‖u‖² = L² Σ |û|²`.
    pub fn parseval(&self) -> f64 {
        self.length * self.length
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, k1: i64, k2: i64) -> bool {
        let km = self.kmax();
        k1.abs() <= km && k2.abs() <= km
    }

    /// Storage index of a retained wavenumber.
    pub fn index(&self, k1: i64, k2: i64) -> usize {
        debug_assert!(self.contains(k1, k2));
        let n = self.n as i64;
        (k1.rem_euclid(n) * n + k2.rem_euclid(n)) as usize
    }

    /// Integer wavenumber stored at slot `i` (FFT ordering).
    pub fn wavenumber(&self, i: usize) -> i64 {
        slot_wavenumber(self.n, i)
    }

    /// Iterates `(index, k1, k2)` over retained wavenumbers in storage order.
    pub fn modes(&self) -> impl Iterator<Item = (usize, i64, i64)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i1| {
            (0..n).filter_map(move |i2| {
                let k1 = self.wavenumber(i1);
                let k2 = self.wavenumber(i2);
                if self.contains(k1, k2) {
                    Some((i1 * n + i2, k1, k2))
                } else {
                    None
                }
            })
        })
    }

    /// Index of `-k` for the mode stored at `idx`.
    pub fn conj_index(&self, idx: usize) -> usize {
        let n = self.n;
        let (i1, i2) = (idx / n, idx % n);
        ((n - i1) % n) * n + (n - i2) % n
    }

    pub(crate) fn plans(&self) -> &Plans {
        &self.plans
    }

    pub fn same_as(&self, other: &TorusGrid) -> bool {
        self.n == other.n && self.length == other.length
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("n", &self.n)
            .field("domain_length", &self.length)
            .finish()
    }
}

impl Serialize for TorusGrid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GridSpec {
            n: self.n,
            domain_length: self.length,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorusGrid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = GridSpec::deserialize(d)?;
        TorusGrid::new(spec.n, spec.domain_length).map_err(serde::de::Error::custom)
    }
}
