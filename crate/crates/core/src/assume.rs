//! Sign questions about symbolic coefficients, answered from explicit
//! assumptions only. Nothing is guessed: an undecided sign stays `None`.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::coef::{Coef, ParamMonomial, ParamPoly, Sign, Symbol};
use crate::system::{Relation, SideCondition};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assumptions {
    items: Vec<SideCondition>,
}

impl Assumptions {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, expr: Coef, relation: Relation) -> Self {
        self.push(expr, relation);
        self
    }

    pub fn push(&mut self, expr: Coef, relation: Relation) {
        self.items.push(SideCondition { expr, relation });
    }

    pub fn iter(&self) -> impl Iterator<Item = &SideCondition> {
        self.items.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Sign of `c` when the assumptions decide it.
    pub fn sign_of(&self, c: &Coef) -> Option<Sign> {
        if let Some(r) = c.as_rational() {
            return Some(Sign::of_rational(&r));
        }
        if let Some(s) = self.sign_by_ratio(c) {
            return Some(s);
        }
        let n = self.poly_sign(c.numer())?;
        let d = self.poly_sign(c.denom())?;
        Some(n.times(d))
    }

    /// Whether `c` is known to be nonzero.
    pub fn is_nonzero(&self, c: &Coef) -> bool {
        if c.is_zero() {
            return false;
        }
        if let Some(s) = self.sign_of(c) {
            return s != Sign::Zero;
        }
        for a in &self.items {
            if a.relation == Relation::NonZero && ratio_constant(c, &a.expr).is_some() {
                return true;
            }
        }
        // a monomial numerator in nonzero parameters
        match c.numer().as_monomial() {
            Some((m, _)) => m.factors().iter().all(|(s, _)| self.symbol_nonzero(s)),
            None => false,
        }
    }

    fn sign_by_ratio(&self, c: &Coef) -> Option<Sign> {
        for a in &self.items {
            let s = match a.relation {
                Relation::Negative => Sign::Negative,
                Relation::Positive => Sign::Positive,
                Relation::NonZero => continue,
            };
            if let Some(r) = ratio_constant(c, &a.expr) {
                return Some(Sign::of_rational(&r).times(s));
            }
        }
        None
    }

    fn symbol_sign(&self, s: &Symbol) -> Option<Sign> {
        self.sign_by_ratio(&Coef::from_poly(ParamPoly::var(s)))
    }

    fn symbol_nonzero(&self, s: &Symbol) -> bool {
        let v = Coef::from_poly(ParamPoly::var(s));
        self.symbol_sign(s).is_some()
            || self
                .items
                .iter()
                .any(|a| a.relation == Relation::NonZero && ratio_constant(&v, &a.expr).is_some())
    }

    fn monomial_sign(&self, m: &ParamMonomial) -> Option<Sign> {
        let mut sign = Sign::Positive;
        for (s, e) in m.factors() {
            if e % 2 == 0 {
                if !self.symbol_nonzero(s) {
                    return None;
                }
            } else {
                sign = sign.times(self.symbol_sign(s)?);
            }
        }
        Some(sign)
    }

    fn poly_sign(&self, p: &ParamPoly) -> Option<Sign> {
        if let Some(r) = p.as_constant() {
            return Some(Sign::of_rational(&r));
        }
        if let Some(s) = self.sign_by_ratio(&Coef::from_poly(p.clone())) {
            return Some(s);
        }
        let mut common: Option<Sign> = None;
        for (m, c) in p.terms() {
            let s = Sign::of_rational(c).times(self.monomial_sign(m)?);
            match common {
                None => common = Some(s),
                Some(prev) if prev == s => {}
                _ => return None,
            }
        }
        common
    }
}

/// `c / e` when it is a nonzero rational constant.
fn ratio_constant(c: &Coef, e: &Coef) -> Option<num_rational::BigRational> {
    if e.is_zero() {
        return None;
    }
    let r = (c / e).as_rational()?;
    (!r.is_zero()).then_some(r)
}
