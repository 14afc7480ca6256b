//! Return map of a monodromic nilpotent planar system in generalized polar
//! coordinates, the displacement `d(ρ₀)` and the first multiplier `v₁(T)`.
//!
//! The system is first brought to Andreev form by the exact polynomial change
//! `y = v + F(x)`, then written with `x = ρ Cs θ`,
//! `v = ρⁿ (c Sn θ + m Csⁿ θ)`, where `m = b̃/(2n)` and `c = √(−Δ/(4n))`.
//! With these constants the angular speed has the constant leading part
//! `θ̇ = −c ρⁿ⁻¹`, so `θ` decreases along orbits and `d(ρ₀) > 0` means the
//! origin attracts in forward time.

use alloc::format;
use alloc::vec::Vec;

use super::gentrig::{closed_form, period};
use super::ode::{integrate, powu, OdeOptions};
use crate::coef::Coef;
use crate::error::{Error, Result};
use crate::monodromy::andreev_data;
use crate::poly::Poly2;
use crate::system::PlanarSystem;

/// Polynomial with float coefficients, evaluated term by term.
#[derive(Clone, Debug, PartialEq)]
struct FloatPoly2 {
    terms: Vec<(u32, u32, f64)>,
}

impl FloatPoly2 {
    fn from_exact(p: &Poly2) -> Result<Self> {
        let mut terms = Vec::with_capacity(p.len());
        for (e, c) in p.terms() {
            let v = c.to_f64().ok_or_else(|| Error::NotNumeric(format!("{}", c)))?;
            terms.push((e.0[0], e.0[1], v));
        }
        Ok(FloatPoly2 { terms })
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|&(i, j, c)| c * powu(x, i) * powu(y, j)).sum()
    }
}

fn numeric(c: &Coef, what: &str) -> Result<f64> {
    c.to_f64().ok_or_else(|| Error::NotNumeric(format!("{} = {}", what, c)))
}

/// The planar field in Andreev form together with the polar constants.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarSystem {
    pub n: u32,
    /// `m = b̃/(2n)`.
    pub m: f64,
    /// `c = √(−Δ/(4n))`.
    pub c: f64,
    /// `μ = b̃/√(−Δ)`, the coefficient of the canonical form.
    pub mu: f64,
    xdot: FloatPoly2,
    vdot: FloatPoly2,
}

impl PolarSystem {
    /// Requires rational coefficients and a monodromic origin with Andreev
    /// number `n` (decided numerically from `Δ < 0`).
    pub fn new(pl: &PlanarSystem, n: u32) -> Result<Self> {
        for p in [pl.xdot().poly(), pl.ydot().poly()] {
            if let Some((_, c)) = p.terms().find(|(_, c)| !c.is_constant()) {
                return Err(Error::NotNumeric(format!("{}", c)));
            }
        }
        let d = andreev_data(pl)?;
        if d.n != Some(n) {
            return Err(Error::Precondition(format!("the Andreev number is not {}", n)));
        }
        let delta = numeric(d.delta.as_ref().expect("delta exists when n does"), "delta")?;
        if !(delta < 0.0) {
            return Err(Error::Precondition("the origin is not monodromic (delta >= 0)".into()));
        }
        let b_tilde = numeric(&d.b_tilde, "b~")?;

        let big_f = Poly2::from_terms(d.big_f.poly().terms().map(|(e, c)| ([e.0[0], 0], c.clone())));
        let subs = [Poly2::var(0), &Poly2::var(1) + &big_f];
        let fx = pl.xdot().poly();
        let fy = pl.ydot().poly();
        let fdeg = big_f.degree().unwrap_or(1).max(1);
        let bound = fx.degree().unwrap_or(1).max(fy.degree().unwrap_or(1)) * fdeg + fdeg;
        let xhat = fx.compose(&subs, bound);
        let vhat = &fy.compose(&subs, bound) - &big_f.partial(0).mul_trunc(&xhat, bound);

        let nf = n as f64;
        Ok(PolarSystem {
            n,
            m: b_tilde / (2.0 * nf),
            c: libm::sqrt(-delta / (4.0 * nf)),
            mu: b_tilde / libm::sqrt(-delta),
            xdot: FloatPoly2::from_exact(&xhat)?,
            vdot: FloatPoly2::from_exact(&vhat)?,
        })
    }

    /// Right side for the state `(ρ, Cs θ, Sn θ)` with `θ` as time.
    fn rhs(&self, s: &[f64; 3]) -> Result<[f64; 3]> {
        let (rho, cs, sn) = (s[0], s[1], s[2]);
        let n = self.n;
        let (c, m) = (self.c, self.m);
        let rn1 = powu(rho, n - 1);
        let rn = rn1 * rho;
        let x = rho * cs;
        let w = c * rn * sn;
        let v = w + m * rn * powu(cs, n);
        let xd = self.xdot.eval(x, v);
        let wd = self.vdot.eval(x, v) - m * n as f64 * powu(x, n - 1) * xd;
        let cs2n1 = powu(cs, 2 * n - 1);
        let num = xd * c * rn * cs2n1 + rho * sn * wd;
        let den = cs * wd - c * n as f64 * rn1 * sn * xd;
        // the leading part of den is −c²ρ^{2n−1}
        let scale = c * c * rn1 * rn;
        if !(-den > 0.1 * scale) {
            return Err(Error::Domain(format!(
                "angular speed degenerates at rho = {:e}; the orbit leaves the monodromic neighbourhood",
                rho
            )));
        }
        Ok([num / den, -sn, cs2n1])
    }

    /// `ρ̃(T, ρ₀)` for the given integrator settings.
    pub fn return_radius(&self, rho0: f64, opts: &OdeOptions) -> Result<f64> {
        if !(rho0 > 0.0) {
            return Err(Error::Domain("rho0 must be positive".into()));
        }
        let t = period(self.n);
        let (s, _) = integrate(|_, s| self.rhs(s), 0.0, t, [rho0, 1.0, 0.0], opts)?;
        Ok(s[0])
    }

    /// `v₁(T)` from the first-order variational equation, `exp(−(m/c) ∫₀ᵀ Csⁿ⁻¹)`.
    pub fn v1_predicted(&self) -> f64 {
        libm::exp(-(self.m / self.c) * closed_form(self.n, 0, self.n - 1))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DisplacementSample {
    pub rho0: f64,
    /// `d(ρ₀)` from the refined run.
    pub d: f64,
    /// `|d_coarse − d_refined|` plus a rounding floor.
    pub err: f64,
    /// `±1` when `|d| > 10·err`, `0` when the sign cannot be called.
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DisplacementResult {
    pub n: u32,
    pub samples: Vec<DisplacementSample>,
    /// Slope of `log |d|` against `log ρ₀` over the called samples.
    pub exponent: Option<f64>,
    /// The exponent rounded, when it is within 0.25 of an integer.
    pub leading: Option<u32>,
    /// Common sign of every sample, when each one was called.
    pub sign: Option<i8>,
}

impl DisplacementResult {
    /// Every sample sits below its error floor.
    pub fn below_floor(&self) -> bool {
        self.samples.iter().all(|s| s.sign == 0)
    }

    /// Whether the leading power has the parity of `n`.
    pub fn parity_matches(&self) -> Option<bool> {
        self.leading.map(|k| k % 2 == self.n % 2)
    }
}

/// Relative rounding floor for one period of integration.
const ROUNDING_FLOOR: f64 = 1e-14;

/// Largest tolerated `|d_coarse − d_refined| / ρ₀`.
const REFINEMENT_LIMIT: f64 = 1e-7;

/// The sign call margin over the error estimate.
const SIGN_MARGIN: f64 = 10.0;

/// `d(ρ₀) = ρ̃(T, ρ₀) − ρ₀` over `grid`, each value computed twice (with
/// `tol` and with the refined settings) to estimate its error.
pub fn displacement(pl: &PlanarSystem, n: u32, grid: &[f64], tol: f64) -> Result<DisplacementResult> {
    if grid.is_empty() {
        return Err(Error::Precondition("empty rho grid".into()));
    }
    let sys = PolarSystem::new(pl, n)?;
    let coarse = OdeOptions { rtol: tol, atol: tol, ..OdeOptions::default() };
    let fine = coarse.refined();
    let mut samples = Vec::with_capacity(grid.len());
    for &rho0 in grid {
        let d1 = sys.return_radius(rho0, &coarse)? - rho0;
        let d2 = sys.return_radius(rho0, &fine)? - rho0;
        let diff = libm::fabs(d1 - d2);
        if diff > REFINEMENT_LIMIT * rho0 {
            return Err(Error::Tolerance(format!("refinement does not converge at rho0 = {}", rho0)));
        }
        let err = diff + ROUNDING_FLOOR * rho0;
        let sign = if libm::fabs(d2) > SIGN_MARGIN * err && d1 * d2 > 0.0 {
            if d2 > 0.0 { 1 } else { -1 }
        } else {
            0
        };
        samples.push(DisplacementSample { rho0, d: d2, err, sign });
    }
    let called: Vec<&DisplacementSample> = samples.iter().filter(|s| s.sign != 0).collect();
    let exponent = if called.len() >= 2 {
        let pts: Vec<(f64, f64)> = called.iter().map(|s| (libm::log(s.rho0), libm::log(libm::fabs(s.d)))).collect();
        Some(slope(&pts))
    } else {
        None
    };
    let leading = exponent.and_then(|e| {
        let r = libm::round(e);
        (r >= 1.0 && libm::fabs(e - r) < 0.25).then_some(r as u32)
    });
    let sign = match called.first() {
        Some(first) if called.len() == samples.len() && called.iter().all(|s| s.sign == first.sign) => {
            Some(first.sign)
        }
        _ => None,
    };
    Ok(DisplacementResult { n, samples, exponent, leading, sign })
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Geometric grid of `k` radii between `lo` and `hi`.
pub fn geometric_grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k <= 1 {
        return alloc::vec![lo];
    }
    let r = libm::pow(hi / lo, 1.0 / (k - 1) as f64);
    (0..k).map(|i| lo * libm::pow(r, i as f64)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct V1Estimate {
    pub n: u32,
    pub mu: f64,
    /// `1 + lim d(ρ₀)/ρ₀`, extrapolated linearly from two small radii.
    pub extrapolated: f64,
    /// The value from the variational integral.
    pub predicted: f64,
    /// Spread between two independent extrapolations.
    pub spread: f64,
}

impl V1Estimate {
    /// `v₁ = 1` for even `n`; for odd `n`, `v₁ − 1` has the sign of `−μ`.
    pub fn consistent(&self, tol: f64) -> bool {
        let dev = self.extrapolated - 1.0;
        if self.n % 2 == 0 || self.mu == 0.0 {
            libm::fabs(dev) < tol
        } else {
            libm::fabs(dev) > tol && (dev < 0.0) == (self.mu > 0.0)
        }
    }
}

/// Estimates `v₁(T)` from `d(ρ₀)/ρ₀` at `ρ₀ = r, r/2, r/4`: two linear
/// extrapolations to `ρ₀ = 0` must agree within `tol`.
pub fn v1_check(pl: &PlanarSystem, n: u32, r: f64, tol: f64) -> Result<V1Estimate> {
    let sys = PolarSystem::new(pl, n)?;
    let opts = OdeOptions::default().refined();
    let ratio = |rho: f64| -> Result<f64> { Ok((sys.return_radius(rho, &opts)? - rho) / rho) };
    let (g1, g2, g4) = (ratio(r)?, ratio(r / 2.0)?, ratio(r / 4.0)?);
    let e1 = 2.0 * g2 - g1;
    let e2 = 2.0 * g4 - g2;
    let spread = libm::fabs(e1 - e2);
    if spread > tol {
        return Err(Error::Tolerance(format!("v1 extrapolation is unstable (spread {:e})", spread)));
    }
    Ok(V1Estimate { n, mu: sys.mu, extrapolated: 1.0 + e2, predicted: sys.v1_predicted(), spread })
}
