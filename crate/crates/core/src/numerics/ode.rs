//! Dormand–Prince 5(4) with embedded error control.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step size; halving it is the refinement test.
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-12, atol: 1e-12, h_max: 0.1, max_steps: 1_000_000 }
    }
}

impl OdeOptions {
    /// Tolerances divided by `2⁵` and the step cap halved: a fifth-order
    /// method should then shrink its error by about the same factor.
    pub fn refined(&self) -> Self {
        OdeOptions { rtol: self.rtol / 32.0, atol: self.atol / 32.0, h_max: self.h_max / 2.0, ..*self }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus the embedded fourth-order ones
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
pub fn integrate<const D: usize, F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: [f64; D],
    opts: &OdeOptions,
) -> Result<([f64; D], OdeStats)>
where
    F: FnMut(f64, &[f64; D]) -> Result<[f64; D]>,
{
    let mut stats = OdeStats::default();
    let span = t1 - t0;
    if span == 0.0 {
        return Ok((y0, stats));
    }
    let dir = if span > 0.0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut h = libm::fmin(opts.h_max, libm::fabs(span)) * 0.1;
    let mut k = [[0.0; D]; 7];
    k[0] = f(t, &y)?;
    loop {
        let remaining = (t1 - t) * dir;
        if remaining <= 1e-15 * libm::fabs(span) {
            return Ok((y, stats));
        }
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::Tolerance("step budget exhausted before reaching the end point".into()));
        }
        h = libm::fmin(libm::fmin(h, opts.h_max), remaining);
        let hs = h * dir;
        for s in 1..7 {
            let mut ys = y;
            for (i, v) in ys.iter_mut().enumerate() {
                for j in 0..s {
                    *v += hs * A[s][j] * k[j][i];
                }
            }
            k[s] = f(t + C[s] * hs, &ys)?;
        }
        let mut ynew = y;
        for (i, v) in ynew.iter_mut().enumerate() {
            for j in 0..6 {
                *v += hs * A[6][j] * k[j][i];
            }
        }
        let mut acc = 0.0;
        for i in 0..D {
            let mut e = 0.0;
            for j in 0..7 {
                e += E[j] * k[j][i];
            }
            let scale = opts.atol + opts.rtol * libm::fmax(libm::fabs(y[i]), libm::fabs(ynew[i]));
            let r = hs * e / scale;
            acc += r * r;
        }
        let err = libm::sqrt(acc / D as f64);
        if !err.is_finite() {
            return Err(Error::Tolerance("non-finite value during integration".into()));
        }
        if err <= 1.0 {
            t += hs;
            y = ynew;
            k[0] = k[6];
            stats.accepted += 1;
        } else {
            stats.rejected += 1;
        }
        let factor = if err == 0.0 { 5.0 } else { 0.9 * libm::pow(err, -0.2) };
        h *= libm::fmin(5.0, libm::fmax(0.2, factor));
        if h < 1e-14 * libm::fabs(span) {
            return Err(Error::Tolerance("step size underflow".into()));
        }
    }
}

/// `x^k` by repeated squaring.
pub fn powu(mut x: f64, mut k: u32) -> f64 {
    let mut acc = 1.0;
    while k > 0 {
        if k & 1 == 1 {
            acc *= x;
        }
        x *= x;
        k >>= 1;
    }
    acc
}
