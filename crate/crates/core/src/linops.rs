//! Graded operators on homogeneous polynomials of degree `n` in `x, y, z`:
//!
//! * `T(p) = y ∂p/∂x − λ z ∂p/∂z`
//! * `L(p) = T(p) + λ p`
//!
//! and their tilde variants, in which `x` and `y` exchange roles.
//! Solving runs along the monomial index chains, so no matrix is inverted.

use alloc::vec::Vec;

use crate::coef::Coef;
use crate::error::{Error, Result};
use crate::linalg::{self, SparseRow};
use crate::poly::{monomial_basis3, Exps, Poly3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    T,
    L,
    TTilde,
    LTilde,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogOperator {
    pub kind: OpKind,
    pub degree: u32,
    pub lambda: Coef,
}

impl HomogOperator {
    pub fn new(kind: OpKind, degree: u32, lambda: Coef) -> Self {
        HomogOperator { kind, degree, lambda }
    }

    pub fn apply(&self, p: &Poly3) -> Result<Poly3> {
        if !p.is_homogeneous(self.degree) {
            return Err(Error::Inhomogeneous(self.degree));
        }
        Ok(match self.kind {
            OpKind::T => apply_t(p, &self.lambda),
            OpKind::L => apply_l(p, &self.lambda),
            OpKind::TTilde => apply_t(&p.swap_xy(), &self.lambda).swap_xy(),
            OpKind::LTilde => apply_l(&p.swap_xy(), &self.lambda).swap_xy(),
        })
    }

    /// Images of the monomial basis, written as sparse vectors over it.
    pub fn columns(&self) -> Vec<SparseRow> {
        let basis = monomial_basis3(self.degree);
        basis
            .iter()
            .map(|e| {
                let img = self
                    .apply(&Poly3::monomial(*e, Coef::one()))
                    .expect("basis monomial is homogeneous");
                to_row(&img, &basis)
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        linalg::rank(self.columns())
    }

    /// Whether `p` lies in the image of the operator.
    pub fn image_contains(&self, p: &Poly3) -> bool {
        let basis = monomial_basis3(self.degree);
        let mut e = linalg::Echelon::new();
        for c in self.columns() {
            e.insert(c);
        }
        e.contains(to_row(p, &basis))
    }

    /// The monomial spanning the kernel.
    pub fn kernel_monomial(&self) -> Poly3 {
        let n = self.degree;
        let e = match self.kind {
            OpKind::T => [0, n, 0],
            OpKind::L => [0, n - 1, 1],
            OpKind::TTilde => [n, 0, 0],
            OpKind::LTilde => [n - 1, 0, 1],
        };
        Poly3::monomial(Exps(e), Coef::one())
    }

    /// The monomial spanning the complement of the image.
    pub fn complement_monomial(&self) -> Poly3 {
        let n = self.degree;
        let e = match self.kind {
            OpKind::T => [n, 0, 0],
            OpKind::L => [n - 1, 0, 1],
            OpKind::TTilde => [0, n, 0],
            OpKind::LTilde => [0, n - 1, 1],
        };
        Poly3::monomial(Exps(e), Coef::one())
    }
}

/// Coordinates of a homogeneous polynomial in the given monomial basis.
pub fn to_row(p: &Poly3, basis: &[Exps<3>]) -> SparseRow {
    basis
        .iter()
        .enumerate()
        .filter_map(|(i, e)| {
            let c = p.coeff(e.0);
            (!c.is_zero()).then_some((i, c))
        })
        .collect()
}

fn apply_t(p: &Poly3, lambda: &Coef) -> Poly3 {
    let y = Poly3::var(1);
    let dz = p.partial(2).mul_monomial(&Exps([0, 0, 1]), lambda);
    &(&y * &p.partial(0)) - &dz
}

fn apply_l(p: &Poly3, lambda: &Coef) -> Poly3 {
    &apply_t(p, lambda) + &p.scale(lambda)
}

fn check_homogeneous(q: &Poly3, n: u32) -> Result<()> {
    if n == 0 || !q.is_homogeneous(n) {
        return Err(Error::Inhomogeneous(n));
    }
    Ok(())
}

/// Finds `p` and `ω` with `T(p) + q = ω xⁿ`; the `yⁿ` coefficient of `p` is 0.
pub fn solve_t(q: &Poly3, n: u32, lambda: &Coef) -> Result<(Poly3, Coef)> {
    check_homogeneous(q, n)?;
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    let mut p = Poly3::zero();
    // l >= 1: the z-weight makes each chain triangular in k
    for l in 1..=n {
        let denom = lambda * &Coef::from_int(l as i64);
        let mut prev = Coef::zero(); // p_{j+1,k-1,l}
        for k in 0..=(n - l) {
            let j = n - l - k;
            let mut rhs = q.coeff([j, k, l]);
            if k > 0 {
                rhs = &rhs + &(&prev * &Coef::from_int((j + 1) as i64));
            }
            let v = &rhs / &denom;
            p.add_term(Exps([j, k, l]), v.clone());
            prev = v;
        }
    }
    // l = 0: (j+1) p_{j+1,k-1,0} = -q_{j,k,0}
    let omega = q.coeff([n, 0, 0]);
    for k in 1..=n {
        let j = n - k;
        let c = q.coeff([j, k, 0]);
        if !c.is_zero() {
            p.add_term(Exps([j + 1, k - 1, 0]), &(-&c) / &Coef::from_int((j + 1) as i64));
        }
    }
    Ok((p, omega))
}

/// Finds `p` and `κ` with `L(p) + q = κ x^{n−1} z`; the `y^{n−1} z`
/// coefficient of `p` is 0.
pub fn solve_l(q: &Poly3, n: u32, lambda: &Coef) -> Result<(Poly3, Coef)> {
    check_homogeneous(q, n)?;
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    let mut p = Poly3::zero();
    for l in (0..=n).filter(|l| *l != 1) {
        let denom = lambda * &Coef::from_int(l as i64 - 1);
        let mut prev = Coef::zero();
        for k in 0..=(n - l) {
            let j = n - l - k;
            let mut rhs = q.coeff([j, k, l]);
            if k > 0 {
                rhs = &rhs + &(&prev * &Coef::from_int((j + 1) as i64));
            }
            let v = &rhs / &denom;
            p.add_term(Exps([j, k, l]), v.clone());
            prev = v;
        }
    }
    let kappa = q.coeff([n - 1, 0, 1]);
    for k in 1..n {
        let j = n - 1 - k;
        let c = q.coeff([j, k, 1]);
        if !c.is_zero() {
            p.add_term(Exps([j + 1, k - 1, 1]), &(-&c) / &Coef::from_int((j + 1) as i64));
        }
    }
    Ok((p, kappa))
}

/// Tilde variant: `T̃(p) + q = ω yⁿ` with the `xⁿ` coefficient of `p` zero.
pub fn solve_t_tilde(q: &Poly3, n: u32, lambda: &Coef) -> Result<(Poly3, Coef)> {
    let (p, w) = solve_t(&q.swap_xy(), n, lambda)?;
    Ok((p.swap_xy(), w))
}

/// Tilde variant: `L̃(p) + q = κ y^{n−1} z` with the `x^{n−1} z` coefficient of `p` zero.
pub fn solve_l_tilde(q: &Poly3, n: u32, lambda: &Coef) -> Result<(Poly3, Coef)> {
    let (p, k) = solve_l(&q.swap_xy(), n, lambda)?;
    Ok((p.swap_xy(), k))
}
