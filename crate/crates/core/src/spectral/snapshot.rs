//! Field snapshots.
//!
//! JSON: `{"format": "oneleg-field", "version": 1, "n", "domain_length", "modes": [[k1, k2, re1, im1, re2, im2], ...]}`.
//!
//! Binary, all little-endian:
//! magic `OLFS`, `u32` version, `u32` n, `f64` domain length, `u64` record count,
//! then per record `i32 k1, i32 k2, f64 re1, f64 im1, f64 re2, f64 im2`.
//!
//! Records cover every retained wavenumber in storage order.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::VelocityField;
use super::grid::TorusGrid;
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"OLFS";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct JsonSnapshot {
    format: String,
    version: u32,
    n: usize,
    domain_length: f64,
    modes: Vec<(i64, i64, f64, f64, f64, f64)>,
}

fn records(u: &VelocityField) -> Vec<(i64, i64, f64, f64, f64, f64)> {
    let (c1, c2) = u.components();
    u.grid()
        .modes()
        .map(|(idx, k1, k2)| (k1, k2, c1[idx].re, c1[idx].im, c2[idx].re, c2[idx].im))
        .collect()
}

fn rebuild(grid: TorusGrid, recs: &[(i64, i64, f64, f64, f64, f64)]) -> Result<VelocityField> {
    let len = grid.len();
    let mut c1 = vec![Complex64::new(0.0, 0.0); len];
    let mut c2 = c1.clone();
    for &(k1, k2, a, b, c, d) in recs {
        if !grid.contains(k1, k2) {
            return Err(Error::Schema(format!("wavenumber ({k1}, {k2}) outside grid")));
        }
        if k1 == 0 && k2 == 0 && (a, b, c, d) != (0.0, 0.0, 0.0, 0.0) {
            return Err(Error::Schema("nonzero mean mode".into()));
        }
        let idx = grid.index(k1, k2);
        c1[idx] = Complex64::new(a, b);
        c2[idx] = Complex64::new(c, d);
    }
    Ok(VelocityField::from_parts_unchecked(grid, c1, c2))
}

pub fn to_json(u: &VelocityField) -> String {
    let snap = JsonSnapshot {
        format: "oneleg-field".into(),
        version: VERSION,
        n: u.grid().n(),
        domain_length: u.grid().domain_length(),
        modes: records(u),
    };
    serde_json::to_string(&snap).expect("snapshot serializes")
}

pub fn from_json(s: &str) -> Result<VelocityField> {
    let snap: JsonSnapshot =
        serde_json::from_str(s).map_err(|e| Error::Schema(format!("snapshot json: {e}")))?;
    if snap.format != "oneleg-field" || snap.version != VERSION {
        return Err(Error::Schema("unknown snapshot format or version".into()));
    }
    let grid = TorusGrid::new(snap.n, snap.domain_length)?;
    rebuild(grid, &snap.modes)
}

pub fn write_binary<W: Write>(u: &VelocityField, mut w: W) -> Result<()> {
    let recs = records(u);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(u.grid().n() as u32).to_le_bytes())?;
    w.write_all(&u.grid().domain_length().to_le_bytes())?;
    w.write_all(&(recs.len() as u64).to_le_bytes())?;
    for (k1, k2, a, b, c, d) in recs {
        w.write_all(&(k1 as i32).to_le_bytes())?;
        w.write_all(&(k2 as i32).to_le_bytes())?;
        for x in [a, b, c, d] {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    Ok(())
}

fn take<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Schema(format!("truncated snapshot: {e}")))?;
    Ok(buf)
}

pub fn read_binary<R: Read>(mut r: R) -> Result<VelocityField> {
    if &take::<4>(&mut r)? != MAGIC {
        return Err(Error::Schema("bad snapshot magic".into()));
    }
    if u32::from_le_bytes(take(&mut r)?) != VERSION {
        return Err(Error::Schema("unsupported snapshot version".into()));
    }
    let n = u32::from_le_bytes(take(&mut r)?) as usize;
    let length = f64::from_le_bytes(take(&mut r)?);
    let grid = TorusGrid::new(n, length)?;
    let count = u64::from_le_bytes(take(&mut r)?) as usize;
    if count > grid.len() {
        return Err(Error::Schema("record count exceeds grid".into()));
    }
    let mut recs = Vec::with_capacity(count);
    for _ in 0..count {
        let k1 = i32::from_le_bytes(take(&mut r)?) as i64;
        let k2 = i32::from_le_bytes(take(&mut r)?) as i64;
        let mut v = [0.0; 4];
        for x in v.iter_mut() {
            *x = f64::from_le_bytes(take(&mut r)?);
        }
        recs.push((k1, k2, v[0], v[1], v[2], v[3]));
    }
    rebuild(grid, &recs)
}
