//! Zero-padded transforms between retained spectra and the `2n × 2n` grid.
//!
//! Two real fields travel through one complex FFT as `a + i b`.

use std::cell::RefCell;

use num_complex::Complex64;

use super::grid::TorusGrid;

type C = Complex64;

thread_local! {
    // Padded buffers are freed and reallocated several times per iteration;
    // recycling them keeps the allocator from trimming and regrowing the heap.
    static POOL: RefCell<Vec<Vec<C>>> = const { RefCell::new(Vec::new()) };
}

/// A zeroed buffer of length `len`, reused when possible.
pub(crate) fn take(len: usize) -> Vec<C> {
    let mut v = POOL.with(|p| p.borrow_mut().pop()).unwrap_or_default();
    v.clear();
    v.resize(len, C::new(0.0, 0.0));
    v
}

pub(crate) fn give(v: Vec<C>) {
    POOL.with(|p| {
        let mut p = p.borrow_mut();
        if p.len() < 16 {
            p.push(v);
        }
    });
}

fn retained_slots(grid: &TorusGrid, m: usize) -> Vec<usize> {
    let km = grid.kmax();
    (-km..=km).map(|k| k.rem_euclid(m as i64) as usize).collect()
}

/// Physical samples of `a + i b` on the padded grid, row-major in `(x1, x2)`.
pub(crate) fn to_physical_pair(grid: &TorusGrid, a: &[C], b: &[C]) -> Vec<C> {
    let m = grid.padded();
    let n = grid.n();
    let mut buf = take(m * m);
    for (idx, k1, k2) in grid.modes() {
        let r = k1.rem_euclid(m as i64) as usize;
        let c = k2.rem_euclid(m as i64) as usize;
        buf[r * m + c] = a[idx] + C::i() * b[idx];
    }
    debug_assert_eq!(a.len(), n * n);
    let plan = &grid.plans().inverse;
    let cols = retained_slots(grid, m);
    let mut tmp = take(cols.len() * m);
    for (j, &c) in cols.iter().enumerate() {
        for r in 0..m {
            tmp[j * m + r] = buf[r * m + c];
        }
    }
    let mut scratch = take(plan.get_inplace_scratch_len());
    plan.process_with_scratch(&mut tmp, &mut scratch);
    for (j, &c) in cols.iter().enumerate() {
        for r in 0..m {
            buf[r * m + c] = tmp[j * m + r];
        }
    }
    plan.process_with_scratch(&mut buf, &mut scratch);
    give(tmp);
    give(scratch);
    buf
}

/// Retained spectra of `Re z` and `Im z` for physical samples `z`.
pub(crate) fn from_physical_pair(grid: &TorusGrid, mut z: Vec<C>) -> (Vec<C>, Vec<C>) {
    let m = grid.padded();
    let n = grid.n();
    let plan = &grid.plans().forward;
    let mut scratch = take(plan.get_inplace_scratch_len());
    plan.process_with_scratch(&mut z, &mut scratch);
    let cols = retained_slots(grid, m);
    let mut tmp = take(cols.len() * m);
    for (j, &c) in cols.iter().enumerate() {
        for r in 0..m {
            tmp[j * m + r] = z[r * m + c];
        }
    }
    plan.process_with_scratch(&mut tmp, &mut scratch);
    give(scratch);
    give(z);
    let norm = 1.0 / (m * m) as f64;
    let mut zk = vec![C::new(0.0, 0.0); n * n];
    let km = grid.kmax();
    for (j, k2) in (-km..=km).enumerate() {
        for k1 in -km..=km {
            let r = k1.rem_euclid(m as i64) as usize;
            zk[grid.index(k1, k2)] = tmp[j * m + r] * norm;
        }
    }
    let mut p = vec![C::new(0.0, 0.0); n * n];
    let mut q = vec![C::new(0.0, 0.0); n * n];
    for (idx, _, _) in grid.modes() {
        let zc = zk[grid.conj_index(idx)].conj();
        p[idx] = (zk[idx] + zc) * 0.5;
        q[idx] = (zk[idx] - zc) * C::new(0.0, -0.5);
    }
    give(tmp);
    (p, q)
}
