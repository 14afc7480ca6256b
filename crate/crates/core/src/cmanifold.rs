//! Center manifold jets `z = h(x, y)` from the invariance equation, the
//! restricted planar system, and exact certificates: invariant algebraic
//! surfaces, axis reversibility and Hamiltonian structure.

use crate::coef::Coef;
use crate::error::{Error, Result};
use crate::poly::{Exps, Jet2, Poly2, Poly3};
use crate::system::{PlanarSystem, SystemModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Computed,
    UserExact,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CenterManifoldJet {
    pub h: Jet2,
    pub provenance: Provenance,
}

impl CenterManifoldJet {
    pub fn order(&self) -> u32 {
        self.h.order()
    }

    /// An exact manifold supplied by the caller, known to every order.
    pub fn exact(h: Poly2, order: u32) -> Self {
        CenterManifoldJet { h: Jet2::new(h, order), provenance: Provenance::UserExact }
    }
}

fn xy_subs(h: &Poly2) -> [Poly2; 3] {
    [Poly2::var(0), Poly2::var(1), h.clone()]
}

/// Left side of the invariance equation,
/// `h_x (y + P) + h_y Q + λ h − R` with `z = h`, through degree `order`.
fn invariance_defect(s: &SystemModel, h: &Poly2, order: u32) -> Poly2 {
    let subs = xy_subs(h);
    let xdot = s.field(0).compose(&subs, order);
    let ydot = s.field(1).compose(&subs, order);
    let r = s.nonlinear(2).compose(&subs, order);
    let lhs = &(&h.partial(0).mul_trunc(&xdot, order) + &h.partial(1).mul_trunc(&ydot, order))
        + &h.scale(s.lambda());
    (&lhs - &r).truncate(order)
}

/// Taylor jet of the center manifold through degree `m`, lowest degree first.
pub fn cm_jet(s: &SystemModel, m: u32) -> Result<CenterManifoldJet> {
    if m > s.order() {
        return Err(Error::Order { required: m as usize, available: s.order() as usize });
    }
    let lambda = s.lambda();
    let mut h = Poly2::zero();
    for k in 2..=m {
        // degree-k part of the defect with h_k still zero
        let e = invariance_defect(s, &h, k).homogeneous_part(k);
        // y ∂h_k/∂x + λ h_k = −E_k, solved from the top x-power down
        let mut next = Coef::zero();
        for j in (0..=k).rev() {
            let mut rhs = -&e.coeff([j, k - j]);
            if j < k {
                rhs = &rhs - &(&next * &Coef::from_int((j + 1) as i64));
            }
            let c = &rhs / lambda;
            h.add_term(Exps([j, k - j]), c.clone());
            next = c;
        }
    }
    Ok(CenterManifoldJet { h: Jet2::new(h, m), provenance: Provenance::Computed })
}

/// The invariance defect of a jet; zero through its order for a true jet.
pub fn defect(s: &SystemModel, h: &CenterManifoldJet) -> Poly2 {
    invariance_defect(s, h.h.poly(), h.order())
}

/// `ẋ = y + P(x, y, h)`, `ẏ = Q(x, y, h)`.
pub fn restrict(s: &SystemModel, h: &CenterManifoldJet) -> Result<PlanarSystem> {
    let m = h.order();
    if m > s.order() {
        return Err(Error::Order { required: m as usize, available: s.order() as usize });
    }
    if !h.h.poly().coeff([0, 0]).is_zero() {
        return Err(Error::Order { required: m as usize, available: 0 });
    }
    let subs = xy_subs(h.h.poly());
    let xdot = s.field(0).compose(&subs, m);
    let ydot = s.field(1).compose(&subs, m);
    PlanarSystem::from_polys(xdot, ydot, m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurfaceCheck {
    /// `XV = cofactor · V`.
    Invariant { cofactor: Poly3 },
    NotInvariant { remainder: Poly3 },
}

impl SurfaceCheck {
    pub fn is_invariant(&self) -> bool {
        matches!(self, SurfaceCheck::Invariant { .. })
    }
}

/// Decides whether `V = 0` is invariant, reading the system's fields as
/// exact polynomials: the Lie derivative is divided by `V`.
pub fn invariant_surface_check(s: &SystemModel, v: &Poly3) -> Result<SurfaceCheck> {
    if v.is_zero() {
        return Err(Error::Degenerate("zero polynomial does not define a surface".into()));
    }
    let xv = s.lie_derivative(v);
    let (q, r) = xv.divide(v)?;
    if !r.is_zero() {
        return Ok(SurfaceCheck::NotInvariant { remainder: r });
    }
    debug_assert_eq!(&q * v, xv);
    Ok(SurfaceCheck::Invariant { cofactor: q })
}

/// Reads `z − j^m h` as an exact invariant surface when it is one.
pub fn exact_cm_candidate(s: &SystemModel, m: u32) -> Result<Option<Poly3>> {
    let h = cm_jet(s, m)?;
    let v = &Poly3::var(2) - &Poly3::from_poly2(h.h.poly());
    Ok(invariant_surface_check(s, &v)?.is_invariant().then_some(v))
}

/// Solves an exact surface `V = 0` with `∂V/∂z` a nonzero constant for
/// `z = h(x, y)`.
pub fn graph_of_surface(v: &Poly3) -> Option<Poly2> {
    let cz = v.coeff([0, 0, 1]);
    if cz.is_zero() {
        return None;
    }
    let rest = v - &Poly3::monomial(Exps([0, 0, 1]), cz.clone());
    if rest.involves_z() {
        return None;
    }
    Some(rest.at_z_zero().scale(&(-&cz.inv()?)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reversibility {
    /// Symmetric under `(x, t) → (−x, −t)`.
    XReversible,
    /// Symmetric under `(y, t) → (−y, −t)`.
    YReversible,
    Both,
    None,
}

impl Reversibility {
    pub fn is_reversible(self) -> bool {
        self != Reversibility::None
    }
}

fn parity_in(p: &Poly2, var: usize, odd: bool) -> bool {
    p.terms().all(|(e, _)| (e.0[var] % 2 == 1) == odd)
}

pub fn reversibility_check(pl: &PlanarSystem) -> Reversibility {
    let (fx, fy) = (pl.xdot().poly(), pl.ydot().poly());
    let x_rev = parity_in(fx, 0, false) && parity_in(fy, 0, true);
    let y_rev = parity_in(fx, 1, true) && parity_in(fy, 1, false);
    match (x_rev, y_rev) {
        (true, true) => Reversibility::Both,
        (true, false) => Reversibility::XReversible,
        (false, true) => Reversibility::YReversible,
        (false, false) => Reversibility::None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hamiltonian {
    /// `∂H/∂y = ẋ`, `∂H/∂x = −ẏ`, `H(0,0) = 0`.
    pub gradient: Jet2,
    /// The positive multiple with quadratic part `y²`.
    pub normalized: Option<Jet2>,
}

/// Reconstructs a Hamiltonian when the divergence vanishes at jet level.
pub fn hamiltonian_reconstruct(pl: &PlanarSystem) -> Option<Hamiltonian> {
    let n = pl.order();
    let (fx, fy) = (pl.xdot().poly(), pl.ydot().poly());
    let div = &fx.partial(0) + &fy.partial(1);
    if !div.truncate(n.saturating_sub(1)).is_zero() {
        return None;
    }
    let mut h = Poly2::zero();
    for (e, c) in fx.terms() {
        let k = e.0[1] + 1;
        h.add_term(Exps([e.0[0], k]), c / &Coef::from_int(k as i64));
    }
    let rest = (&(-fy) - &h.partial(0)).truncate(n);
    for (e, c) in rest.terms() {
        if e.0[1] != 0 {
            return None;
        }
        let k = e.0[0] + 1;
        h.add_term(Exps([k, 0]), c / &Coef::from_int(k as i64));
    }
    let gradient = Jet2::new(h, n + 1);
    let normalized = positive_scale_to_y2(gradient.poly()).map(|c| gradient.scale(&c));
    Some(Hamiltonian { gradient, normalized })
}

/// Factor turning the quadratic part into `y²`, when that part is a
/// positive rational multiple of `y²`.
fn positive_scale_to_y2(h: &Poly2) -> Option<Coef> {
    let q = h.homogeneous_part(2);
    if q.len() != 1 {
        return None;
    }
    let c = q.coeff([0, 2]).as_rational()?;
    if c <= num_rational::BigRational::from_integer(0.into()) {
        return None;
    }
    Coef::from_rational(c).inv()
}
