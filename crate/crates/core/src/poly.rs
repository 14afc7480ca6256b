//! Sparse polynomials and truncated series (jets) in one, two or three
//! phase variables with [`Coef`] coefficients.
//!
//! Monomials are ordered graded-lexicographically with `x > y > z`; every
//! iteration and printing walks terms in that order.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_rational::BigRational;
use num_traits::One;

use crate::coef::{Coef, Symbol};
use crate::error::{Error, Result};

pub const VAR_NAMES: [&str; 3] = ["x", "y", "z"];

/// Exponent vector of a monomial in `V` phase variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Exps<const V: usize>(pub [u32; V]);

impl<const V: usize> Exps<V> {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn zero() -> Self {
        Exps([0; V])
    }

    pub fn unit(var: usize) -> Self {
        let mut e = [0; V];
        e[var] = 1;
        Exps(e)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        Exps(e)
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Self) -> Self {
        let mut e = self.0;
        for (a, b) in e.iter_mut().zip(other.0.iter()) {
            *a -= *b;
        }
        Exps(e)
    }
}

impl<const V: usize> Ord for Exps<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl<const V: usize> PartialOrd for Exps<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<const V: usize> fmt::Display for Exps<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, e) in self.0.iter().enumerate() {
            if *e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            let name = if V == 1 { "x" } else { VAR_NAMES[i] };
            if *e == 1 {
                f.write_str(name)?;
            } else {
                write!(f, "{}^{}", name, e)?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Sparse polynomial in `V` phase variables. No zero coefficient is stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly<const V: usize> {
    terms: BTreeMap<Exps<V>, Coef>,
}

pub type Poly1 = SparsePoly<1>;
pub type Poly2 = SparsePoly<2>;
pub type Poly3 = SparsePoly<3>;

impl<const V: usize> Default for SparsePoly<V> {
    fn default() -> Self {
        SparsePoly { terms: BTreeMap::new() }
    }
}

impl<const V: usize> SparsePoly<V> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Coef) -> Self {
        Self::monomial(Exps::zero(), c)
    }

    pub fn monomial(e: Exps<V>, c: Coef) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    pub fn var(i: usize) -> Self {
        Self::monomial(Exps::unit(i), Coef::one())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ([u32; V], Coef)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(Exps(e), c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exps<V>, &Coef)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: [u32; V]) -> Coef {
        self.terms.get(&Exps(e)).cloned().unwrap_or_else(Coef::zero)
    }

    pub fn add_term(&mut self, e: Exps<V>, c: Coef) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = &*o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|e| e.degree())
    }

    /// Lowest total degree present.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|e| e.degree())
    }

    pub fn leading(&self) -> Option<(&Exps<V>, &Coef)> {
        self.terms.iter().next_back()
    }

    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|e| e.degree() == d)
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        SparsePoly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() == d)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    pub fn truncate(&self, order: u32) -> Self {
        SparsePoly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() <= order)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    /// Terms of degree strictly below `d`.
    pub fn below(&self, d: u32) -> Self {
        SparsePoly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() < d)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Coef) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.add_term(*e, v * c);
        }
        out
    }

    pub fn mul_monomial(&self, m: &Exps<V>, c: &Coef) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.add_term(e.mul(m), v * c);
        }
        out
    }

    /// Product truncated to total degree `order`.
    pub fn mul_trunc(&self, rhs: &Self, order: u32) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            let d1 = e1.degree();
            if d1 > order {
                break;
            }
            for (e2, c2) in &rhs.terms {
                if d1 + e2.degree() > order {
                    break;
                }
                out.add_term(e1.mul(e2), c1 * c2);
            }
        }
        out
    }

    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let k = e.0[var];
            if k == 0 {
                continue;
            }
            let mut ne = *e;
            ne.0[var] -= 1;
            out.add_term(ne, c * &Coef::from_int(k as i64));
        }
        out
    }

    pub fn map_coeffs(&self, mut f: impl FnMut(&Coef) -> Coef) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, f(c));
        }
        out
    }

    pub fn try_map_coeffs(&self, mut f: impl FnMut(&Coef) -> Option<Coef>) -> Option<Self> {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, f(c)?);
        }
        Some(out)
    }

    pub fn substitute_params(&self, values: &BTreeMap<Symbol, Coef>) -> Option<Self> {
        self.try_map_coeffs(|c| c.substitute(values))
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        for c in self.terms.values() {
            for s in c.symbols() {
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        out.sort();
        out
    }

    /// Evaluates at a point when every coefficient is a rational number.
    pub fn eval_f64(&self, point: &[f64; V]) -> Option<f64> {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = c.to_f64()?;
            for (x, k) in point.iter().zip(e.0.iter()) {
                t *= libm::pow(*x, *k as f64);
            }
            acc += t;
        }
        Some(acc)
    }

    pub fn pow_trunc(&self, k: u32, order: u32) -> Self {
        let mut acc = Self::constant(Coef::one());
        for _ in 0..k {
            acc = acc.mul_trunc(self, order);
        }
        acc
    }

    /// Simultaneous substitution of each variable by a polynomial in `W`
    /// variables, truncated to total degree `order`.
    pub fn compose<const W: usize>(&self, subs: &[SparsePoly<W>; V], order: u32) -> SparsePoly<W> {
        let mut powers: Vec<Vec<SparsePoly<W>>> = Vec::with_capacity(V);
        let max_exp: Vec<u32> = (0..V)
            .map(|i| self.terms.keys().map(|e| e.0[i]).max().unwrap_or(0))
            .collect();
        for i in 0..V {
            let mut row = Vec::with_capacity(max_exp[i] as usize + 1);
            row.push(SparsePoly::<W>::constant(Coef::one()));
            for k in 1..=max_exp[i] as usize {
                let next = row[k - 1].mul_trunc(&subs[i], order);
                row.push(next);
            }
            powers.push(row);
        }
        let mut out = SparsePoly::<W>::zero();
        for (e, c) in &self.terms {
            let mut t = SparsePoly::<W>::constant(c.clone());
            for i in 0..V {
                let k = e.0[i] as usize;
                if k > 0 {
                    t = t.mul_trunc(&powers[i][k], order);
                    if t.is_zero() {
                        break;
                    }
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Multivariate division by a single polynomial under graded-lex order.
    /// Returns `(quotient, remainder)`.
    pub fn divide(&self, divisor: &Self) -> Result<(Self, Self)> {
        let (lm, lc) = divisor
            .leading()
            .ok_or_else(|| Error::Degenerate("division by the zero polynomial".into()))?;
        let lc_inv = lc
            .inv()
            .ok_or_else(|| Error::Degenerate("leading coefficient vanishes".into()))?;
        let (lm, lc_inv) = (*lm, lc_inv);
        let mut p = self.clone();
        let mut q = Self::zero();
        let mut r = Self::zero();
        while let Some((m, c)) = p.terms.iter().next_back().map(|(m, c)| (*m, c.clone())) {
            if lm.divides(&m) {
                let qm = m.div(&lm);
                let qc = &c * &lc_inv;
                p = &p - &divisor.mul_monomial(&qm, &qc);
                q.add_term(qm, qc);
            } else {
                p.terms.remove(&m);
                r.add_term(m, c);
            }
        }
        Ok((q, r))
    }
}

impl Poly3 {
    /// Restriction to `z = 0`.
    pub fn at_z_zero(&self) -> Poly2 {
        let mut out = Poly2::zero();
        for (e, c) in self.terms() {
            if e.0[2] == 0 {
                out.add_term(Exps([e.0[0], e.0[1]]), c.clone());
            }
        }
        out
    }

    pub fn from_poly2(p: &Poly2) -> Self {
        let mut out = Poly3::zero();
        for (e, c) in p.terms() {
            out.add_term(Exps([e.0[0], e.0[1], 0]), c.clone());
        }
        out
    }

    pub fn involves_z(&self) -> bool {
        self.terms().any(|(e, _)| e.0[2] > 0)
    }

    /// Swaps the roles of `x` and `y`.
    pub fn swap_xy(&self) -> Self {
        let mut out = Poly3::zero();
        for (e, c) in self.terms() {
            out.add_term(Exps([e.0[1], e.0[0], e.0[2]]), c.clone());
        }
        out
    }
}

impl Poly2 {
    /// Substitutes `y = s(x)`.
    pub fn at_y(&self, s: &Poly1, order: u32) -> Poly1 {
        self.compose(&[Poly1::var(0), s.clone()], order)
    }
}

impl Poly1 {
    /// Index and value of the lowest nonzero coefficient.
    pub fn first_nonzero(&self) -> Option<(u32, Coef)> {
        self.terms().next().map(|(e, c)| (e.0[0], c.clone()))
    }

    pub fn coeff_at(&self, k: u32) -> Coef {
        self.coeff([k])
    }
}

impl<'a, const V: usize> core::ops::Add for &'a SparsePoly<V> {
    type Output = SparsePoly<V>;
    fn add(self, rhs: &'a SparsePoly<V>) -> SparsePoly<V> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<'a, const V: usize> core::ops::Sub for &'a SparsePoly<V> {
    type Output = SparsePoly<V>;
    fn sub(self, rhs: &'a SparsePoly<V>) -> SparsePoly<V> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl<'a, const V: usize> core::ops::Mul for &'a SparsePoly<V> {
    type Output = SparsePoly<V>;
    fn mul(self, rhs: &'a SparsePoly<V>) -> SparsePoly<V> {
        let mut out = SparsePoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1.mul(e2), c1 * c2);
            }
        }
        out
    }
}

impl<const V: usize> core::ops::Neg for &SparsePoly<V> {
    type Output = SparsePoly<V>;
    fn neg(self) -> SparsePoly<V> {
        self.map_coeffs(|c| -c)
    }
}

impl<const V: usize> fmt::Display for SparsePoly<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let is_unit_monomial = e.degree() == 0;
            if c.is_compound() {
                f.write_str(if k == 0 { "" } else { " + " })?;
                if is_unit_monomial {
                    write!(f, "{}", c)?;
                } else {
                    let s = alloc::format!("{}", c);
                    if s.starts_with('(') && c.denom().num_terms() <= 1 {
                        write!(f, "{}*{}", s, e)?;
                    } else {
                        write!(f, "({})*{}", s, e)?;
                    }
                }
                continue;
            }
            let neg = c.is_negative_term();
            let abs = if neg { -c } else { c.clone() };
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if is_unit_monomial {
                write!(f, "{}", abs)?;
            } else {
                write_scaled_monomial(f, &abs, e)?;
            }
        }
        Ok(())
    }
}

fn write_scaled_monomial<const V: usize>(
    f: &mut fmt::Formatter<'_>,
    c: &Coef,
    e: &Exps<V>,
) -> fmt::Result {
    if c.is_one() {
        return write!(f, "{}", e);
    }
    if let Some(r) = c.as_rational() {
        let (n, d) = (r.numer(), r.denom());
        if !n.is_one() {
            write!(f, "{}*", n)?;
        }
        write!(f, "{}", e)?;
        if !d.is_one() {
            write!(f, "/{}", d)?;
        }
        return Ok(());
    }
    // single parameter term, possibly over a monomial
    let num = c.numer();
    let (pm, pc) = num.leading().expect("nonzero");
    let den = c.denom();
    if !pc.numer().is_one() {
        write!(f, "{}*", pc.numer())?;
    }
    if pm.is_one() {
        write!(f, "{}", e)?;
    } else {
        write!(f, "{}*{}", pm, e)?;
    }
    if !pc.denom().is_one() {
        write!(f, "/{}", pc.denom())?;
    }
    if let Some((dm, _)) = den.leading() {
        if !dm.is_one() {
            write!(f, "/{}", dm)?;
        }
    }
    Ok(())
}

/// A truncated series: `poly` is the series modulo terms of total degree
/// greater than `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jet<const V: usize> {
    poly: SparsePoly<V>,
    order: u32,
}

pub type Jet1 = Jet<1>;
pub type Jet2 = Jet<2>;
pub type Jet3 = Jet<3>;

impl<const V: usize> Jet<V> {
    pub fn new(poly: SparsePoly<V>, order: u32) -> Self {
        Jet { poly: poly.truncate(order), order }
    }

    pub fn zero(order: u32) -> Self {
        Jet { poly: SparsePoly::zero(), order }
    }

    pub fn poly(&self) -> &SparsePoly<V> {
        &self.poly
    }

    pub fn into_poly(self) -> SparsePoly<V> {
        self.poly
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        Jet::new(&self.poly + &rhs.poly, order)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        Jet::new(&self.poly - &rhs.poly, order)
    }

    /// Product of jets. Terms of low degree in one factor extend what is
    /// known of the product, so the result order accounts for the lowest
    /// degree present in each factor.
    pub fn mul(&self, rhs: &Self) -> Self {
        let order = product_order(self, rhs);
        Jet { poly: self.poly.mul_trunc(&rhs.poly, order), order }
    }

    pub fn scale(&self, c: &Coef) -> Self {
        Jet { poly: self.poly.scale(c), order: self.order }
    }

    /// Partial derivative; one order of accuracy is lost.
    pub fn partial(&self, var: usize) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::Order { required: 1, available: 0 });
        }
        Ok(Jet { poly: self.poly.partial(var), order: self.order - 1 })
    }

    pub fn truncate(&self, order: u32) -> Result<Self> {
        if order > self.order {
            return Err(Error::Order { required: order as usize, available: self.order as usize });
        }
        Ok(Jet::new(self.poly.clone(), order))
    }

    pub fn homogeneous_part(&self, d: u32) -> Result<SparsePoly<V>> {
        if d > self.order {
            return Err(Error::Order { required: d as usize, available: self.order as usize });
        }
        Ok(self.poly.homogeneous_part(d))
    }

    /// `exp(self)` for a jet without constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.poly.coeff([0; V]).is_zero() {
            return Err(Error::Precondition("exp needs a jet with zero constant term".into()));
        }
        let mut acc = SparsePoly::constant(Coef::one());
        let mut term = SparsePoly::constant(Coef::one());
        for k in 1..=self.order {
            term = term
                .mul_trunc(&self.poly, self.order)
                .scale(&Coef::ratio(1, k as i64));
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        Ok(Jet { poly: acc, order: self.order })
    }
}

fn product_order<const V: usize>(a: &Jet<V>, b: &Jet<V>) -> u32 {
    // error in a (degree > a.order) times lowest term of b, and vice versa
    let va = a.poly.min_degree().unwrap_or(a.order + 1);
    let vb = b.poly.min_degree().unwrap_or(b.order + 1);
    (a.order + vb).min(b.order + va)
}

impl Jet3 {
    /// Substitutes `z = s(x, y)` in a three-variable jet.
    ///
    /// The substitute must have no constant term: otherwise the unknown tail
    /// of `self` would leak into every degree.
    pub fn substitute_z(&self, s: &Jet2) -> Result<Jet2> {
        if !s.poly.coeff([0, 0]).is_zero() {
            return Err(Error::Order { required: self.order as usize, available: 0 });
        }
        let order = self.order.min(s.order);
        let subs = [Poly2::var(0), Poly2::var(1), s.poly.clone()];
        Ok(Jet::new(self.poly.compose(&subs, order), order))
    }

    pub fn from_poly(p: Poly3, order: u32) -> Self {
        Jet::new(p, order)
    }
}

impl Jet2 {
    /// Solves `G(x, F(x)) = 0` for the jet `F`, degree by degree.
    ///
    /// Needs `G(0,0) = 0` and an invertible coefficient of `y`.
    pub fn implicit_solve(&self) -> Result<Jet1> {
        if !self.poly.coeff([0, 0]).is_zero() {
            return Err(Error::Precondition("implicit equation must vanish at the origin".into()));
        }
        let gy = self.poly.coeff([0, 1]);
        let gy_inv = gy.inv().ok_or(Error::SingularImplicit)?;
        let order = self.order;
        let mut f = Poly1::zero();
        for d in 1..=order {
            let g_at = self.poly.at_y(&f, d);
            let c = g_at.coeff([d]);
            if !c.is_zero() {
                f.add_term(Exps([d]), -&(&c * &gy_inv));
            }
        }
        Ok(Jet::new(f, order))
    }
}

impl Jet1 {
    pub fn first_nonzero(&self) -> Option<(u32, Coef)> {
        self.poly.first_nonzero()
    }
}

impl<const V: usize> fmt::Display for Jet<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({})", self.poly, self.order + 1)
    }
}

/// Number of monomials of degree `n` in three variables.
pub fn homogeneous_dim3(n: u32) -> usize {
    ((n + 1) * (n + 2) / 2) as usize
}

/// Monomials `x^j y^k z^l` with `j + k + l = n`, in decreasing graded-lex order.
pub fn monomial_basis3(n: u32) -> Vec<Exps<3>> {
    let mut out = Vec::with_capacity(homogeneous_dim3(n));
    for j in (0..=n).rev() {
        for k in (0..=n - j).rev() {
            out.push(Exps([j, k, n - j - k]));
        }
    }
    out
}

/// Integer power helper for rational numbers.
pub fn rational_pow(r: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= r;
    }
    acc
}
