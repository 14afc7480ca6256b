//! The generalized trigonometric functions `Cs`, `Sn`: the solution of
//! `u' = −v`, `v' = u^{2n−1}`, `u(0) = 1`, `v(0) = 0`.

use alloc::format;
use alloc::vec::Vec;

use super::ode::{integrate, powu, OdeOptions};
use crate::error::{Error, Result};

/// Samples per period; the trapezoid rule is spectrally accurate on
/// periodic analytic integrands.
const SAMPLES: usize = 2048;

#[derive(Clone, Debug, PartialEq)]
pub struct GenTrig {
    pub n: u32,
    /// Period from the Γ-function closed form.
    pub period: f64,
    /// Period from the ODE: twice the first positive zero of `Sn`.
    pub period_ode: f64,
    /// `Cs`, `Sn` on the uniform grid `θᵢ = i·T/SAMPLES`, `i < SAMPLES`.
    pub cs: Vec<f64>,
    pub sn: Vec<f64>,
    /// `|Cs(T) − 1| + |Sn(T)|`.
    pub closure_error: f64,
    /// Max over the grid of `|Cs²ⁿ + n·Sn² − 1|`.
    pub identity_error: f64,
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `T = 2√(π/n)·Γ(1/(2n))/Γ((n+1)/(2n))`.
pub fn period(n: u32) -> f64 {
    let nf = n as f64;
    2.0 * libm::sqrt(core::f64::consts::PI / nf) * gamma(1.0 / (2.0 * nf)) / gamma((nf + 1.0) / (2.0 * nf))
}

fn field(n: u32) -> impl Fn(f64, &[f64; 2]) -> Result<[f64; 2]> {
    move |_, y| Ok([-y[1], powu(y[0], 2 * n - 1)])
}

/// First positive zero of `Sn`, found by marching until the sign flips and
/// then Newton's method with `Sn' = Cs^{2n−1}`.
fn half_period(n: u32, opts: &OdeOptions) -> Result<f64> {
    let chunk = 0.05;
    let mut t = 0.0;
    let mut y = [1.0, 0.0];
    loop {
        let (next, _) = integrate(field(n), t, t + chunk, y, opts)?;
        if t > 0.0 && next[1] <= 0.0 {
            break;
        }
        t += chunk;
        y = next;
        if t > 1e3 {
            return Err(Error::Tolerance("Sn has no zero within the search window".into()));
        }
    }
    // Sn > 0 at t, Sn ≤ 0 at t + chunk
    let mut guess = t + chunk / 2.0;
    for _ in 0..50 {
        let (z, _) = integrate(field(n), t, guess, y, opts)?;
        let slope = powu(z[0], 2 * n - 1);
        if slope == 0.0 {
            break;
        }
        let step = z[1] / slope;
        guess -= step;
        if libm::fabs(step) < 1e-15 * guess {
            return Ok(guess);
        }
    }
    Ok(guess)
}

/// Tabulates `Cs`, `Sn` over one period and checks closure and the
/// Pythagorean-type identity against `tol`.
pub fn gen_trig(n: u32, tol: f64) -> Result<GenTrig> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let opts = OdeOptions::default();
    let t = period(n);
    let h = t / SAMPLES as f64;
    let mut cs = Vec::with_capacity(SAMPLES);
    let mut sn = Vec::with_capacity(SAMPLES);
    let mut y = [1.0, 0.0];
    for i in 0..SAMPLES {
        cs.push(y[0]);
        sn.push(y[1]);
        let (next, _) = integrate(field(n), i as f64 * h, (i + 1) as f64 * h, y, &opts)?;
        y = next;
    }
    let closure_error = libm::fabs(y[0] - 1.0) + libm::fabs(y[1]);
    if closure_error >= tol {
        return Err(Error::Tolerance(format!(
            "Cs, Sn do not close up after one period (error {:e})",
            closure_error
        )));
    }
    let period_ode = 2.0 * half_period(n, &opts)?;
    if libm::fabs(period_ode - t) >= tol * t {
        return Err(Error::Tolerance(format!(
            "Gamma-function period {} and ODE period {} disagree",
            t, period_ode
        )));
    }
    let identity_error = cs
        .iter()
        .zip(&sn)
        .map(|(c, s)| libm::fabs(powu(*c, 2 * n) + n as f64 * s * s - 1.0))
        .fold(0.0, libm::fmax);
    if identity_error >= tol {
        return Err(Error::Tolerance(format!("Cs^2n + n Sn^2 = 1 violated by {:e}", identity_error)));
    }
    Ok(GenTrig { n, period: t, period_ode, cs, sn, closure_error, identity_error })
}

impl GenTrig {
    pub fn samples(&self) -> usize {
        self.cs.len()
    }

    pub fn theta(&self, i: usize) -> f64 {
        i as f64 * self.period / self.samples() as f64
    }

    /// `(Cs θ, Sn θ)` for any real `θ`, integrating from the nearest node.
    pub fn eval(&self, theta: f64) -> Result<(f64, f64)> {
        let m = self.samples();
        let h = self.period / m as f64;
        let r = theta - libm::floor(theta / self.period) * self.period;
        let i = libm::round(r / h) as usize;
        let y0 = [self.cs[i % m], self.sn[i % m]];
        let (y, _) = integrate(field(self.n), i as f64 * h, r, y0, &OdeOptions::default())?;
        Ok((y[0], y[1]))
    }

    /// `∫₀ᵀ Snᵖ Csᵠ dθ` by the trapezoid rule on the grid.
    pub fn integral(&self, p: u32, q: u32) -> f64 {
        let h = self.period / self.samples() as f64;
        self.cs.iter().zip(&self.sn).map(|(c, s)| powu(*s, p) * powu(*c, q)).sum::<f64>() * h
    }

    /// The closed form of `∫₀ᵀ Snᵖ Csᵠ dθ`: zero when `p` or `q` is odd,
    /// a ratio of Γ-values otherwise.
    pub fn closed_form(&self, p: u32, q: u32) -> f64 {
        closed_form(self.n, p, q)
    }

    /// Largest violation of `Cs` even, `Sn` odd, and the two half-period
    /// symmetries, over the grid.
    pub fn symmetry_error(&self) -> f64 {
        let m = self.samples();
        let half = m / 2;
        let mut worst: f64 = 0.0;
        for i in 0..m {
            let neg = (m - i) % m;
            let shift = (i + half) % m;
            let refl = (half + m - i) % m;
            let errs = [
                self.cs[neg] - self.cs[i],
                self.sn[neg] + self.sn[i],
                self.cs[shift] + self.cs[i],
                self.sn[shift] + self.sn[i],
                self.cs[refl] + self.cs[i],
                self.sn[refl] - self.sn[i],
            ];
            for e in errs {
                worst = libm::fmax(worst, libm::fabs(e));
            }
        }
        worst
    }
}

pub fn closed_form(n: u32, p: u32, q: u32) -> f64 {
    if p % 2 == 1 || q % 2 == 1 {
        return 0.0;
    }
    let a = (p as f64 + 1.0) / 2.0;
    let b = (q as f64 + 1.0) / (2.0 * n as f64);
    2.0 / libm::sqrt(libm::pow(n as f64, p as f64 + 1.0)) * gamma(a) * gamma(b) / gamma(a + b)
}
