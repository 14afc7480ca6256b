//! The formal series `H = y² + H₃ + H₄ + …` with `XH = Σ ωₙ xⁿ`, the
//! center verdict read off the first nonzero `ωₙ`, and first-integral checks.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::assume::Assumptions;
use crate::cmanifold::{
    exact_cm_candidate, graph_of_surface, hamiltonian_reconstruct, reversibility_check,
    Hamiltonian, Reversibility,
};
use crate::coef::Coef;
use crate::error::{Error, Result};
use crate::linops::solve_t;
use crate::monodromy::{AndreevData, Condition, MonodromyVerdict};
use crate::poly::{Exps, Jet3, Poly2, Poly3};
use crate::system::{PlanarSystem, Relation, SideConditionSet, SystemModel};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionSeries {
    /// `H` through degree `order`, with quadratic part `y²`.
    pub h: Jet3,
    /// `(n, ωₙ)` for `n = 4..=order`.
    pub omegas: Vec<(u32, Coef)>,
    pub first_nonzero: Option<(u32, Coef)>,
    pub order: u32,
}

impl ObstructionSeries {
    pub fn omega(&self, n: u32) -> Option<&Coef> {
        self.omegas.iter().find(|(k, _)| *k == n).map(|(_, c)| c)
    }

    pub fn all_zero(&self) -> bool {
        self.first_nonzero.is_none()
    }
}

fn homogeneous_parts(p: &Poly3, max: u32) -> Vec<Poly3> {
    (0..=max).map(|k| p.homogeneous_part(k)).collect()
}

/// Builds `H` degree by degree: at degree `n` the known terms `Fₙ` come from
/// the nonlinear part acting on `H₂ … H_{n−1}`, and `Tₙ(Hₙ) + Fₙ = ωₙ xⁿ` is
/// solved with the `yⁿ` coefficient of `Hₙ` set to zero.
pub fn omega_series(s: &SystemModel, order: u32) -> Result<ObstructionSeries> {
    omega_series_with_kernel(s, order, &BTreeMap::new())
}

/// As [`omega_series`], but the `yⁿ` coefficient of `Hₙ` (the kernel of `Tₙ`)
/// is taken from `kernel` where given. Only `ωₘ` with `m > n` can change.
pub fn omega_series_with_kernel(
    s: &SystemModel,
    order: u32,
    kernel: &BTreeMap<u32, Coef>,
) -> Result<ObstructionSeries> {
    if order < 4 {
        return Err(Error::Precondition("the obstruction series needs order at least 4".into()));
    }
    if order > s.order() {
        return Err(Error::Order { required: order as usize, available: s.order() as usize });
    }
    let lambda = s.lambda();
    let nl: Vec<Vec<Poly3>> = (0..3).map(|i| homogeneous_parts(&s.nonlinear(i), order)).collect();
    // grad[m][i] = ∂H_m/∂(var i)
    let mut parts: Vec<Poly3> = alloc::vec![Poly3::zero(); order as usize + 1];
    parts[2] = Poly3::monomial(Exps([0, 2, 0]), Coef::one());
    let mut grads: Vec<[Poly3; 3]> = alloc::vec![Default::default(); order as usize + 1];
    grads[2] = [parts[2].partial(0), parts[2].partial(1), parts[2].partial(2)];
    let mut omegas = Vec::new();
    for n in 3..=order {
        let mut fnp = Poly3::zero();
        for k in 2..n {
            let m = (n - k + 1) as usize;
            for i in 0..3 {
                let a = &nl[i][k as usize];
                let g = &grads[m][i];
                if !a.is_zero() && !g.is_zero() {
                    fnp = &fnp + &(a * g);
                }
            }
        }
        let (mut hn, w) = solve_t(&fnp, n, lambda)?;
        if let Some(c) = kernel.get(&n) {
            hn.add_term(Exps([0, n, 0]), c.clone());
        }
        grads[n as usize] = [hn.partial(0), hn.partial(1), hn.partial(2)];
        parts[n as usize] = hn;
        if n >= 4 {
            omegas.push((n, w));
        } else if !w.is_zero() {
            return Err(Error::Internal("cubic obstruction must vanish".into()));
        }
    }
    let mut h = Poly3::zero();
    for p in &parts {
        h = &h + p;
    }
    let h = Jet3::new(h, order);
    let first_nonzero = omegas.iter().find(|(_, w)| !w.is_zero()).cloned();
    let series = ObstructionSeries { h, omegas, first_nonzero, order };
    let res = series_residual(s, &series);
    if !res.is_zero() {
        return Err(Error::Internal(alloc::format!("XH - sum w_n x^n is nonzero: {}", res)));
    }
    Ok(series)
}

/// `XH − Σ ωₙ xⁿ` through degree `order`.
pub fn series_residual(s: &SystemModel, o: &ObstructionSeries) -> Poly3 {
    let mut res = s.lie_derivative(o.h.poly()).truncate(o.order);
    for (n, w) in &o.omegas {
        res.add_term(Exps([*n, 0, 0]), -w);
    }
    res
}

/// The jet of `XH` through degree `order`; zero certifies a formal first
/// integral to that order.
pub fn check_first_integral(s: &SystemModel, h: &Jet3, order: u32) -> Result<Poly3> {
    if h.order() < order {
        return Err(Error::Order { required: order as usize, available: h.order() as usize });
    }
    let nonconstant = h.poly().terms().any(|(e, _)| e.degree() > 0);
    if !nonconstant {
        return Err(Error::Precondition("a first integral must be nonconstant".into()));
    }
    Ok(s.lie_derivative(h.poly()).truncate(order))
}

/// Exact structure proving a center on an exact invariant surface.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CenterCertificate {
    /// `V` with `V = 0` invariant and tangent to the `xy`-plane.
    pub surface: Poly3,
    /// Exact restriction of the system to the surface.
    pub restriction: PlanarSystem,
    pub reversibility: Reversibility,
    pub hamiltonian: Option<Hamiltonian>,
}

/// Searches for an exact invariant graph `z = h(x, y)` whose restricted
/// system is axis-reversible or Hamiltonian.
pub fn find_certificate(s: &SystemModel) -> Result<Option<CenterCertificate>> {
    let Some(surface) = exact_cm_candidate(s, s.order())? else {
        return Ok(None);
    };
    let h = graph_of_surface(&surface).ok_or_else(|| Error::Internal("surface is not a graph".into()))?;
    let subs = [Poly2::var(0), Poly2::var(1), h.clone()];
    let hdeg = h.degree().unwrap_or(1).max(1);
    let bound = s.fields().iter().filter_map(|f| f.degree()).max().unwrap_or(1) * hdeg;
    let xdot = s.field(0).compose(&subs, bound);
    let ydot = s.field(1).compose(&subs, bound);
    let restriction = PlanarSystem::from_polys(xdot, ydot, bound)?;
    let reversibility = reversibility_check(&restriction);
    let hamiltonian = hamiltonian_reconstruct(&restriction);
    if !reversibility.is_reversible() && hamiltonian.is_none() {
        return Ok(None);
    }
    Ok(Some(CenterCertificate { surface, restriction, reversibility, hamiltonian }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CenterStatus {
    /// `β = n − 1` with odd `n`.
    Focus { n: u32 },
    /// First nonzero obstruction at an even index.
    NotACenter { index: u32, value: Coef },
    /// First nonzero obstruction at an odd index: no formal first integral,
    /// but a center is still possible.
    NotFormallyIntegrable { index: u32, value: Coef, certificate: Option<CenterCertificate> },
    CenterConfirmed(CenterCertificate),
    /// All obstructions vanish through `order` and no certificate was found.
    Undecided { order: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CenterVerdict {
    pub status: CenterStatus,
    pub side_conditions: SideConditionSet,
}

impl CenterVerdict {
    /// Name of the criterion that produced the verdict.
    pub fn criterion(&self) -> &'static str {
        match self.status {
            CenterStatus::Focus { .. } => "odd Andreev number with beta = n-1 criterion",
            CenterStatus::NotACenter { .. } => "even-index obstruction criterion",
            CenterStatus::NotFormallyIntegrable { .. } => "odd-index obstruction (no first integral with the pinned kernel choices)",
            CenterStatus::CenterConfirmed(_) => "exact invariant surface with reversible or Hamiltonian restriction",
            CenterStatus::Undecided { .. } => "all computed obstructions vanish",
        }
    }
}

/// Decision tree on top of a monodromic verdict.
pub fn center_verdict(
    s: &SystemModel,
    d: &AndreevData,
    mono: &MonodromyVerdict,
    o: &ObstructionSeries,
    assume: &Assumptions,
) -> Result<CenterVerdict> {
    let Some(n) = mono.andreev_number() else {
        return Err(Error::Precondition("the center verdict needs a monodromic singular point".into()));
    };
    let mut side = mono.side_conditions.clone();
    side.extend(s.side_conditions());
    let done = |status, side| Ok(CenterVerdict { status, side_conditions: side });
    if mono.condition == Some(Condition::BetaEqual) && n % 2 == 1 {
        debug_assert!(!d.b_tilde.is_zero());
        return done(CenterStatus::Focus { n }, side);
    }
    if let Some((index, value)) = o.first_nonzero.clone() {
        if !value.is_constant() && !assume.is_nonzero(&value) {
            side.push(value.clone(), Relation::NonZero);
        }
        if index % 2 == 0 {
            return done(CenterStatus::NotACenter { index, value }, side);
        }
        let certificate = find_certificate(s)?;
        return done(CenterStatus::NotFormallyIntegrable { index, value, certificate }, side);
    }
    match find_certificate(s)? {
        Some(c) => done(CenterStatus::CenterConfirmed(c), side),
        None => done(CenterStatus::Undecided { order: o.order }, side),
    }
}

/// `−2ãb̃/n`, the predicted first obstruction when `β = n − 1` on the planar
/// normal-form family.
pub fn beta_shortcut(d: &AndreevData) -> Result<Coef> {
    let n = d.n.ok_or_else(|| Error::Precondition("no Andreev number".into()))?;
    if d.b_tilde.is_zero() {
        return Err(Error::Precondition("needs beta = n-1, but the x^(n-1) coefficient of Phi vanishes".into()));
    }
    Ok(&(&d.a_tilde * &d.b_tilde) * &Coef::ratio(-2, n as i64))
}
