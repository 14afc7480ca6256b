//! Andreev data of a planar nilpotent system and the monodromy decision.
//!
//! With `y = F(x)` solving `y + X₂(x, y) = 0`, put `f(x) = Y₂(x, F(x))` and
//! `Φ(x) = (∂X₂/∂x + ∂Y₂/∂y)(x, F(x))`. If `f = a x^α + …` and
//! `Φ = b x^β + …`, the origin is monodromic exactly when `α = 2n − 1` is odd,
//! `β ≥ n − 1`, and `Δ = b̃² + 4ãn < 0`, where `ã` is the `x^{2n−1}`
//! coefficient of `f` and `b̃` the `x^{n−1}` coefficient of `Φ`.

use alloc::format;
use alloc::string::String;
use core::fmt;

use crate::assume::Assumptions;
use crate::coef::{Coef, Sign};
use crate::error::{Error, Result};
use crate::poly::{Jet1, Jet2, Poly2};
use crate::system::{PlanarSystem, Relation, SideConditionSet, SystemModel};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AndreevData {
    pub big_f: Jet1,
    pub f: Jet1,
    pub phi: Jet1,
    /// Index of the first nonzero coefficient of `f`; `None` when flat.
    pub alpha: Option<u32>,
    pub a: Coef,
    /// Index of the first nonzero coefficient of `Φ`; `None` when flat.
    pub beta: Option<u32>,
    pub b: Coef,
    /// `(α + 1)/2` when `α` is odd.
    pub n: Option<u32>,
    pub a_tilde: Coef,
    pub b_tilde: Coef,
    pub delta: Option<Coef>,
    /// Sign of `b̃` when it is a number; `μ` carries the same sign.
    pub mu_sign: Option<Sign>,
}

pub fn andreev_data(pl: &PlanarSystem) -> Result<AndreevData> {
    let order = pl.order();
    if order < 3 {
        return Err(Error::Order { required: 3, available: order as usize });
    }
    let x2 = pl.x2();
    let y2 = pl.y2();
    let g = Jet2::new(&Poly2::var(1) + x2.poly(), order);
    let big_f = g.implicit_solve()?;
    let f = Jet1::new(y2.poly().at_y(big_f.poly(), order), order);
    let div = &x2.poly().partial(0) + &y2.poly().partial(1);
    let phi = Jet1::new(div.at_y(big_f.poly(), order - 1), order - 1);

    let (alpha, a) = match f.first_nonzero() {
        Some((k, c)) => (Some(k), c),
        None => (None, Coef::zero()),
    };
    let (beta, b) = match phi.first_nonzero() {
        Some((k, c)) => (Some(k), c),
        None => (None, Coef::zero()),
    };
    let n = alpha.filter(|k| k % 2 == 1).map(|k| (k + 1) / 2);
    let (a_tilde, b_tilde, delta) = match n {
        Some(n) => {
            let at = f.poly().coeff_at(2 * n - 1);
            let bt = if n - 1 <= phi.order() { phi.poly().coeff_at(n - 1) } else { Coef::zero() };
            let d = &(&bt * &bt) + &(&at * &Coef::from_int(4 * n as i64));
            (at, bt, Some(d))
        }
        None => (Coef::zero(), Coef::zero(), None),
    };
    let mu_sign = if n.is_some() {
        b_tilde.as_rational().map(|r| Sign::of_rational(&r))
    } else {
        None
    };
    Ok(AndreevData { big_f, f, phi, alpha, a, beta, b, n, a_tilde, b_tilde, delta, mu_sign })
}

/// Which branch of the monodromy criterion applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `β > n − 1` or `Φ` flat.
    BetaAbove,
    /// `β = n − 1` with `Δ < 0`.
    BetaEqual,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::BetaAbove => "beta > n-1",
            Condition::BetaEqual => "beta = n-1",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotMonodromicReason {
    EvenAlpha { alpha: u32 },
    BetaBelow { beta: u32, n: u32 },
    DeltaNonNegative { delta: Coef },
}

impl fmt::Display for NotMonodromicReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotMonodromicReason::EvenAlpha { alpha } => {
                write!(f, "leading index of f is even (alpha = {})", alpha)
            }
            NotMonodromicReason::BetaBelow { beta, n } => {
                write!(f, "divergence index beta = {} is below n-1 = {}", beta, n - 1)
            }
            NotMonodromicReason::DeltaNonNegative { delta } => {
                write!(f, "Delta = {} is not negative", delta)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonodromyStatus {
    Monodromic { n: u32 },
    NotMonodromic(NotMonodromicReason),
    /// `f` vanishes through the jet order.
    Inconclusive { jet_bound: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyVerdict {
    pub status: MonodromyStatus,
    pub condition: Option<Condition>,
    pub side_conditions: SideConditionSet,
}

impl MonodromyVerdict {
    pub fn andreev_number(&self) -> Option<u32> {
        match self.status {
            MonodromyStatus::Monodromic { n } => Some(n),
            _ => None,
        }
    }

    pub fn is_monodromic(&self) -> bool {
        self.andreev_number().is_some()
    }
}

/// Applies the monodromy criterion. Signs of symbolic quantities are taken
/// from `assume` when it decides them and recorded as side conditions
/// otherwise.
pub fn classify_monodromy(d: &AndreevData, assume: &Assumptions) -> MonodromyVerdict {
    let mut side = SideConditionSet::new();
    let verdict = |status, condition, side| MonodromyVerdict { status, condition, side_conditions: side };
    let Some(alpha) = d.alpha else {
        return verdict(MonodromyStatus::Inconclusive { jet_bound: d.f.order() }, None, side);
    };
    if !d.a.is_constant() && !assume.is_nonzero(&d.a) {
        side.push(d.a.clone(), Relation::NonZero);
    }
    let Some(n) = d.n else {
        return verdict(
            MonodromyStatus::NotMonodromic(NotMonodromicReason::EvenAlpha { alpha }),
            None,
            side,
        );
    };
    if let Some(beta) = d.beta {
        if beta + 1 < n {
            if !d.b.is_constant() && !assume.is_nonzero(&d.b) {
                side.push(d.b.clone(), Relation::NonZero);
            }
            return verdict(
                MonodromyStatus::NotMonodromic(NotMonodromicReason::BetaBelow { beta, n }),
                None,
                side,
            );
        }
    }
    let condition = if d.b_tilde.is_zero() {
        Condition::BetaAbove
    } else {
        if !d.b_tilde.is_constant() && !assume.is_nonzero(&d.b_tilde) {
            side.push(d.b_tilde.clone(), Relation::NonZero);
        }
        Condition::BetaEqual
    };
    let delta = d.delta.clone().expect("set whenever n is");
    match assume.sign_of(&delta) {
        Some(Sign::Negative) => {}
        Some(_) => {
            return verdict(
                MonodromyStatus::NotMonodromic(NotMonodromicReason::DeltaNonNegative { delta }),
                None,
                side,
            );
        }
        None => side.push(delta, Relation::Negative),
    }
    verdict(MonodromyStatus::Monodromic { n }, Some(condition), side)
}

/// The Andreev-number-two inequality `lhs < rhs` read off a quadratic-cubic
/// system with vanishing `x²` coefficient in `ẏ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Andreev2Condition {
    /// `b101 c200 / λ`.
    pub lhs: Coef,
    /// `−(2 a200 − b110)²/8 − b300`.
    pub rhs: Coef,
    /// `2 a200 + b110`; nonzero means `β = n − 1`.
    pub beta_flag: Coef,
}

impl Andreev2Condition {
    /// `8 (lhs − rhs)`, which equals `Δ` for `n = 2`.
    pub fn delta(&self) -> Coef {
        (&self.lhs - &self.rhs).scale_rational(&crate::coef::rat(8, 1))
    }

    /// `lhs − rhs` as a single expression to be negative.
    pub fn difference(&self) -> Coef {
        &self.lhs - &self.rhs
    }
}

impl fmt::Display for Andreev2Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} < {}", self.lhs, self.rhs)
    }
}

pub fn andreev2_condition(s: &SystemModel) -> Result<Andreev2Condition> {
    let p = s.field(0);
    let q = s.field(1);
    let r = s.field(2);
    let b200 = q.coeff([2, 0, 0]);
    if !b200.is_zero() {
        return Err(Error::Precondition(format!(
            "the x^2 coefficient of dy must vanish, found {}",
            b200
        )));
    }
    let a200 = p.coeff([2, 0, 0]);
    let b110 = q.coeff([1, 1, 0]);
    let b101 = q.coeff([1, 0, 1]);
    let b300 = q.coeff([3, 0, 0]);
    let c200 = r.coeff([2, 0, 0]);
    let lhs = &(&b101 * &c200) / s.lambda();
    let t = &a200.scale_rational(&crate::coef::rat(2, 1)) - &b110;
    let rhs = &(&(&t * &t) * &Coef::ratio(-1, 8)) - &b300;
    let beta_flag = &a200.scale_rational(&crate::coef::rat(2, 1)) + &b110;
    Ok(Andreev2Condition { lhs, rhs, beta_flag })
}

/// One-line summary used by reports.
pub fn describe(v: &MonodromyVerdict) -> String {
    match &v.status {
        MonodromyStatus::Monodromic { n } => format!(
            "monodromic with Andreev number {} ({})",
            n,
            v.condition.map(|c| c.label()).unwrap_or("")
        ),
        MonodromyStatus::NotMonodromic(r) => format!("not monodromic: {}", r),
        MonodromyStatus::Inconclusive { jet_bound } => {
            format!("inconclusive: f vanishes through order {}; raise the order", jet_bound)
        }
    }
}
