//! Degree-by-degree near-identity reduction to
//!
//! ```text
//! ẋ = y + x P₁(x),   ẏ = Q₂(x) + y P₁(x),   ż = −λz + z R₁(x)
//! ```
//!
//! At degree `k` the change `x → x + φ(x)` modifies the field by
//! `ad(φ) = (Tφ₁ − φ₂, Tφ₂, Lφ₃)`; the image of `ad` plus the span of
//! `(xᵏ, x^{k−1}y, 0)`, `(0, xᵏ, 0)`, `(0, 0, x^{k−1}z)` is the whole degree-`k`
//! space, and this is checked by exact elimination at every degree.

use alloc::vec::Vec;

use crate::coef::Coef;
use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseRow};
use crate::linops::{solve_l, solve_t, HomogOperator, OpKind};
use crate::poly::{monomial_basis3, Exps, Jet1, Jet3, Poly1, Poly3};
use crate::system::SystemModel;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormResult {
    pub p1: Jet1,
    pub q2: Jet1,
    pub r1: Jet1,
    /// Old coordinates as functions of the new ones, `x = Φ(u)`.
    pub transform: [Jet3; 3],
    /// The transformed field through degree `order`.
    pub field: [Poly3; 3],
    pub order: u32,
}

impl NormalFormResult {
    pub fn is_identity_transform(&self) -> bool {
        (0..3).all(|i| self.transform[i].poly() == &Poly3::var(i))
    }

    /// The normal form as a system model.
    pub fn system(&self, params: Vec<crate::coef::Symbol>) -> Result<SystemModel> {
        SystemModel::new(params, self.order, self.field.clone())
    }
}

fn t_apply(p: &Poly3, k: u32, lambda: &Coef) -> Result<Poly3> {
    HomogOperator::new(OpKind::T, k, lambda.clone()).apply(p)
}

/// Solves the degree-`k` homological equation. Returns `φ` and the resonant
/// coefficients `(a, b, c)`.
fn homological_step(g: &[Poly3; 3], k: u32, lambda: &Coef) -> Result<([Poly3; 3], [Coef; 3])> {
    let (phi3, kappa) = solve_l(&-&g[2], k, lambda)?;
    let c = -&kappa;
    let q0 = &g[1] + &t_apply(&g[0], k, lambda)?;
    let (w0, omega) = solve_t(&-&q0, k, lambda)?;
    let b = -&omega;
    let kk = Coef::from_int(k as i64);
    let k1 = Coef::from_int(k as i64 + 1);
    let a = &(&kk * &w0.coeff([k, 0, 0])) / &k1;
    let mut w = w0;
    w.add_term(Exps([k, 0, 0]), -&(&(&a * &k1) / &kk));
    let (phi1, rest) = solve_t(&-&w, k, lambda)?;
    if !rest.is_zero() {
        return Err(Error::Internal("x^k component left in the image equation".into()));
    }
    let mut phi2 = &t_apply(&phi1, k, lambda)? - &g[0];
    phi2.add_term(Exps([k, 0, 0]), a.clone());
    Ok(([phi1, phi2, phi3], [a, b, c]))
}

fn ad(phi: &[Poly3; 3], k: u32, lambda: &Coef) -> Result<[Poly3; 3]> {
    let t1 = t_apply(&phi[0], k, lambda)?;
    let t2 = t_apply(&phi[1], k, lambda)?;
    let l3 = HomogOperator::new(OpKind::L, k, lambda.clone()).apply(&phi[2])?;
    Ok([&t1 - &phi[1], t2, l3])
}

fn resonant(k: u32, abc: &[Coef; 3]) -> [Poly3; 3] {
    let [a, b, c] = abc;
    let mut y1 = Poly3::zero();
    y1.add_term(Exps([k, 0, 0]), a.clone());
    let mut y2 = Poly3::zero();
    y2.add_term(Exps([k - 1, 1, 0]), a.clone());
    y2.add_term(Exps([k, 0, 0]), b.clone());
    let mut y3 = Poly3::zero();
    y3.add_term(Exps([k - 1, 0, 1]), c.clone());
    [y1, y2, y3]
}

fn vector_row(v: &[Poly3; 3], basis: &[Exps<3>]) -> SparseRow {
    let d = basis.len();
    let mut row = SparseRow::new();
    for (i, comp) in v.iter().enumerate() {
        for (j, e) in basis.iter().enumerate() {
            let c = comp.coeff(e.0);
            if !c.is_zero() {
                row.insert(i * d + j, c);
            }
        }
    }
    row
}

/// Checks that the image of `ad` has codimension three at degree `k` and
/// that the resonant span completes it.
pub fn certify_split(k: u32, lambda: &Coef) -> Result<()> {
    let basis = monomial_basis3(k);
    let d = basis.len();
    let mut ech = Echelon::new();
    for comp in 0..3 {
        for e in &basis {
            let mut phi: [Poly3; 3] = Default::default();
            phi[comp] = Poly3::monomial(*e, Coef::one());
            ech.insert(vector_row(&ad(&phi, k, lambda)?, &basis));
        }
    }
    if ech.rank() != 3 * d - 3 {
        return Err(Error::Internal(alloc::format!(
            "homological operator has rank {} at degree {}, expected {}",
            ech.rank(),
            k,
            3 * d - 3
        )));
    }
    let one = Coef::one;
    let z = Coef::zero;
    for abc in [[one(), z(), z()], [z(), one(), z()], [z(), z(), one()]] {
        ech.insert(vector_row(&resonant(k, &abc), &basis));
    }
    if ech.rank() != 3 * d {
        return Err(Error::Internal(alloc::format!(
            "resonant span does not complement the image at degree {}",
            k
        )));
    }
    Ok(())
}

/// `(I + Dφ)⁻¹ X(u + φ(u))` through degree `m`.
fn push_forward(field: &[Poly3; 3], phi: &[Poly3; 3], m: u32) -> [Poly3; 3] {
    let subs: [Poly3; 3] = core::array::from_fn(|i| &Poly3::var(i) + &phi[i]);
    let v: [Poly3; 3] = core::array::from_fn(|i| field[i].compose(&subs, m));
    let dphi: [[Poly3; 3]; 3] = core::array::from_fn(|i| core::array::from_fn(|j| phi[i].partial(j)));
    let mut sum = v.clone();
    let mut term = v;
    loop {
        let next: [Poly3; 3] = core::array::from_fn(|i| {
            let mut acc = Poly3::zero();
            for j in 0..3 {
                acc = &acc - &dphi[i][j].mul_trunc(&term[j], m);
            }
            acc
        });
        if next.iter().all(|p| p.is_zero()) {
            break;
        }
        for i in 0..3 {
            sum[i] = &sum[i] + &next[i];
        }
        term = next;
    }
    sum
}

/// `DΦ·Y − X∘Φ` through degree `m`.
pub fn conjugacy_residual(
    original: &[Poly3; 3],
    transform: &[Poly3; 3],
    normal: &[Poly3; 3],
    m: u32,
) -> [Poly3; 3] {
    core::array::from_fn(|i| {
        let mut lhs = Poly3::zero();
        for j in 0..3 {
            lhs = &lhs + &transform[i].partial(j).mul_trunc(&normal[j], m);
        }
        &lhs - &original[i].compose(transform, m)
    })
}

/// Whether a field has the normal-form shape through degree `m`.
pub fn has_normal_shape(field: &[Poly3; 3], lambda: &Coef) -> bool {
    if field[0].involves_z() || field[1].involves_z() {
        return false;
    }
    if field[2].terms().any(|(e, _)| e.0[2] == 0) {
        return false;
    }
    let x_part = &field[0] - &Poly3::var(1);
    // ẋ − y = x P₁(x)
    if x_part.terms().any(|(e, _)| e.0[1] != 0 || e.0[0] < 2) {
        return false;
    }
    let z_part = &field[2] + &Poly3::var(2).scale(lambda);
    if z_part.terms().any(|(e, _)| e.0[1] != 0 || e.0[2] != 1 || e.0[0] == 0) {
        return false;
    }
    // ẏ − y P₁ = Q₂(x)
    let mut y_part = field[1].clone();
    for (e, c) in x_part.terms() {
        y_part.add_term(Exps([e.0[0] - 1, 1, 0]), -c);
    }
    let ok = y_part.terms().all(|(e, _)| e.0[1] == 0 && e.0[0] >= 2);
    ok
}

pub fn normal_form(s: &SystemModel, m: u32) -> Result<NormalFormResult> {
    if m > s.order() {
        return Err(Error::Order { required: m as usize, available: s.order() as usize });
    }
    let lambda = s.lambda();
    let original: [Poly3; 3] = core::array::from_fn(|i| s.field(i).truncate(m));
    let mut field = original.clone();
    let mut transform: [Poly3; 3] = core::array::from_fn(Poly3::var);
    for k in 2..=m {
        certify_split(k, lambda)?;
        let g: [Poly3; 3] = core::array::from_fn(|i| field[i].homogeneous_part(k));
        let (phi, abc) = homological_step(&g, k, lambda)?;
        let adphi = ad(&phi, k, lambda)?;
        let want = resonant(k, &abc);
        for i in 0..3 {
            if &g[i] - &adphi[i] != want[i] {
                return Err(Error::Internal(alloc::format!("homological residual at degree {}", k)));
            }
        }
        if phi.iter().all(|p| p.is_zero()) {
            continue;
        }
        field = push_forward(&field, &phi, m);
        if (0..3).any(|i| field[i].homogeneous_part(k) != want[i]) {
            return Err(Error::Internal(alloc::format!("degree {} not in resonant form", k)));
        }
        let subs: [Poly3; 3] = core::array::from_fn(|i| &Poly3::var(i) + &phi[i]);
        transform = core::array::from_fn(|i| transform[i].compose(&subs, m));
    }
    let res = conjugacy_residual(&original, &transform, &field, m);
    if res.iter().any(|p| !p.is_zero()) {
        return Err(Error::Internal("conjugacy residual is nonzero".into()));
    }
    if !has_normal_shape(&field, lambda) {
        return Err(Error::Internal("result is not in normal-form shape".into()));
    }
    let mut p1 = Poly1::zero();
    let mut q2 = Poly1::zero();
    let mut r1 = Poly1::zero();
    for (e, c) in field[0].terms() {
        if e.0[1] == 0 {
            p1.add_term(Exps([e.0[0] - 1]), c.clone());
        }
    }
    for (e, c) in field[1].terms() {
        if e.0[1] == 0 {
            q2.add_term(Exps([e.0[0]]), c.clone());
        }
    }
    for (e, c) in field[2].terms() {
        if e.0[0] > 0 {
            r1.add_term(Exps([e.0[0]]), c.clone());
        }
    }
    Ok(NormalFormResult {
        p1: Jet1::new(p1, m - 1),
        q2: Jet1::new(q2, m),
        r1: Jet1::new(r1, m - 1),
        transform: core::array::from_fn(|i| Jet3::new(transform[i].clone(), m)),
        field,
        order: m,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegrabilityPattern {
    pub p1_zero_to_m: bool,
    /// First index with a nonzero coefficient in `P₁`.
    pub m_index: Option<u32>,
    pub n: u32,
    /// Whether `m_index = 2sn − 1` for some `s ≥ 1`.
    pub matches_2sn_minus_1: bool,
}

/// Reports which branch of "either `P₁ ≡ 0` or `m = 2sn − 1`" the truncated
/// `P₁` is consistent with. This is a jet-level observation only.
pub fn integrability_pattern(nf: &NormalFormResult, n: u32) -> IntegrabilityPattern {
    let m_index = nf.p1.first_nonzero().map(|(k, _)| k);
    let matches = m_index.map(|m| n > 0 && (m + 1) % (2 * n) == 0).unwrap_or(false);
    IntegrabilityPattern { p1_zero_to_m: m_index.is_none(), m_index, n, matches_2sn_minus_1: matches }
}
