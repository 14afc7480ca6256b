//! Exact scalars: polynomials in named parameters over the rationals, and
//! fractions of them.
//!
//! [`Coef`] is the coefficient type used everywhere else in the crate. It is
//! an unreduced fraction `num / den` of [`ParamPoly`] values; equality is
//! decided by cross-multiplication so two fractions compare equal exactly when
//! they denote the same rational function. After every operation the pair is
//! normalized cheaply (common monomial factor, rational content, exact
//! division when one side divides the other) which keeps expressions with
//! monomial denominators fully reduced.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Name of a free parameter.
pub type Symbol = Arc<str>;

/// Variable names that can never be parameters.
pub const RESERVED_NAMES: [&str; 3] = ["x", "y", "z"];

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A monomial in parameters, stored as `(name, exponent)` pairs sorted by name
/// with every exponent positive.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct ParamMonomial(Vec<(Symbol, u32)>);

impl ParamMonomial {
    pub fn one() -> Self {
        ParamMonomial(Vec::new())
    }

    pub fn var(name: &Symbol) -> Self {
        ParamMonomial(alloc::vec![(name.clone(), 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| *e).sum()
    }

    pub fn exponent(&self, name: &str) -> u32 {
        self.0
            .iter()
            .find(|(n, _)| &**n == name)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        ParamMonomial(out)
    }

    /// `self / other` when `other` divides `self`.
    fn checked_div(&self, other: &Self) -> Option<Self> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (name, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *name {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *name {
                let d = other.0[j].1;
                j += 1;
                match e.cmp(&d) {
                    Ordering::Less => return None,
                    Ordering::Equal => continue,
                    Ordering::Greater => out.push((name.clone(), e - d)),
                }
            } else {
                out.push((name.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(ParamMonomial(out))
    }

    fn gcd(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1.min(other.0[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        ParamMonomial(out)
    }
}

/// Graded lexicographic order; variables compare by name, earlier names rank
/// higher.
impl Ord for ParamMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (&self.0[i], &other.0[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match a.1.cmp(&b.1) {
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                    }
                    ord => return ord,
                },
            }
        }
        (self.0.len() - i).cmp(&(other.0.len() - j))
    }
}

impl PartialOrd for ParamMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ParamMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, (name, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{}", name)?;
            } else {
                write!(f, "{}^{}", name, e)?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial in parameters with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ParamPoly {
    terms: BTreeMap<ParamMonomial, BigRational>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        ParamPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(ParamMonomial::one(), c);
        }
        ParamPoly { terms }
    }

    pub fn var(name: &Symbol) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(ParamMonomial::var(name), BigRational::one());
        ParamPoly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (ParamMonomial, BigRational)>) -> Self {
        let mut p = ParamPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ParamMonomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_monomial(&self) -> Option<(&ParamMonomial, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&ParamMonomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        for m in self.terms.keys() {
            for (s, _) in m.factors() {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
        }
        out.sort();
        out
    }

    fn add_term(&mut self, m: ParamMonomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return ParamPoly::zero();
        }
        ParamPoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    fn mul_monomial(&self, m: &ParamMonomial, c: &BigRational) -> Self {
        ParamPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.mul(m), v * c))
                .collect(),
        }
    }

    fn div_monomial(&self, m: &ParamMonomial) -> Self {
        ParamPoly {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.checked_div(m).expect("monomial divides"), v.clone()))
                .collect(),
        }
    }

    fn monomial_content(&self) -> ParamMonomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return ParamMonomial::one();
        };
        let mut g = first.clone();
        for m in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients, signed so that the leading coefficient of `self / c` is
    /// positive.
    fn content(&self) -> BigRational {
        let mut g = BigInt::zero();
        let mut l = BigInt::one();
        for c in self.terms.values() {
            g = g.gcd(c.numer());
            l = l.lcm(c.denom());
        }
        if g.is_zero() {
            return BigRational::one();
        }
        let c = BigRational::new(g, l);
        match self.leading() {
            Some((_, lc)) if lc.is_negative() => -c,
            _ => c,
        }
    }

    /// Exact quotient by `d` under graded-lex division, if the remainder is zero.
    pub fn div_exact(&self, d: &ParamPoly) -> Option<ParamPoly> {
        let (dm, dc) = d.leading()?;
        let mut rem = self.clone();
        let mut quot = ParamPoly::zero();
        while let Some((m, c)) = rem.leading() {
            let qm = m.checked_div(dm)?;
            let qc = c / dc;
            rem = &rem - &d.mul_monomial(&qm, &qc);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    pub fn pow(&self, e: u32) -> ParamPoly {
        let mut acc = ParamPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Replaces parameters by the given values.
    pub fn substitute(&self, values: &BTreeMap<Symbol, Coef>) -> Coef {
        let mut out = Coef::zero();
        for (m, c) in &self.terms {
            let mut term = Coef::from_rational(c.clone());
            let mut rest = Vec::new();
            for (s, e) in m.factors() {
                match values.get(s) {
                    Some(v) => term = &term * &v.pow(*e),
                    None => rest.push((s.clone(), *e)),
                }
            }
            let rest = ParamPoly::from_terms([(ParamMonomial(rest), BigRational::one())]);
            out = &out + &(&term * &Coef::from_poly(rest));
        }
        out
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.as_constant().and_then(|c| c.to_f64())
    }
}

impl<'a> Add for &'a ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &'a ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub for &'a ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &'a ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul for &'a ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &'a ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        ParamPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

fn write_rational_factor(
    f: &mut fmt::Formatter<'_>,
    c: &BigRational,
    monomial: Option<&dyn fmt::Display>,
) -> fmt::Result {
    let numer = c.numer().abs();
    let denom = c.denom();
    match monomial {
        None => {
            write!(f, "{}", numer)?;
        }
        Some(m) => {
            if !numer.is_one() {
                write!(f, "{}*", numer)?;
            }
            write!(f, "{}", m)?;
        }
    }
    if !denom.is_one() {
        write!(f, "/{}", denom)?;
    }
    Ok(())
}

/// Writes a signed sum of `coefficient * monomial` terms in the grammar the
/// system parser accepts.
pub(crate) fn write_signed_terms<'a, M: fmt::Display + 'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (&'a M, &'a BigRational, bool)>,
) -> fmt::Result {
    let mut first = true;
    for (m, c, is_one) in terms {
        let neg = c.is_negative();
        if first {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        first = false;
        if is_one {
            write_rational_factor(f, c, None)?;
        } else {
            write_rational_factor(f, c, Some(m))?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_signed_terms(f, self.terms.iter().rev().map(|(m, c)| (m, c, m.is_one())))
    }
}

/// Element of the field of rational functions in the declared parameters.
#[derive(Clone, Debug)]
pub struct Coef {
    num: ParamPoly,
    den: ParamPoly,
}

impl Coef {
    pub fn zero() -> Self {
        Coef { num: ParamPoly::zero(), den: ParamPoly::one() }
    }

    pub fn one() -> Self {
        Coef::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Coef::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Coef { num: ParamPoly::constant(r), den: ParamPoly::one() }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Coef::from_rational(rat(n, d))
    }

    pub fn from_poly(p: ParamPoly) -> Self {
        Coef { num: p, den: ParamPoly::one() }
    }

    pub fn param(name: &str) -> Self {
        Coef::from_poly(ParamPoly::var(&Symbol::from(name)))
    }

    /// `num / den`, or `None` if `den` is the zero polynomial.
    pub fn fraction(num: ParamPoly, den: ParamPoly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Coef { num, den }.normalized())
    }

    pub fn numer(&self) -> &ParamPoly {
        &self.num
    }

    pub fn denom(&self) -> &ParamPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// The value as a rational number when no parameter survives.
    pub fn as_rational(&self) -> Option<BigRational> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn is_constant(&self) -> bool {
        self.as_rational().is_some()
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.as_rational().and_then(|r| r.to_f64())
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut s = self.num.symbols();
        for t in self.den.symbols() {
            if !s.contains(&t) {
                s.push(t);
            }
        }
        s.sort();
        s
    }

    pub fn inv(&self) -> Option<Coef> {
        if self.is_zero() {
            return None;
        }
        Some(Coef { num: self.den.clone(), den: self.num.clone() }.normalized())
    }

    pub fn pow(&self, e: u32) -> Coef {
        Coef { num: self.num.pow(e), den: self.den.pow(e) }.normalized()
    }

    /// Signed rational content of the numerator: `self / c` has a primitive
    /// integer numerator with positive leading coefficient.
    pub fn numerator_content(&self) -> BigRational {
        self.num.content()
    }

    pub fn scale_rational(&self, r: &BigRational) -> Coef {
        Coef { num: self.num.scale(r), den: self.den.clone() }.normalized()
    }

    pub fn substitute(&self, values: &BTreeMap<Symbol, Coef>) -> Option<Coef> {
        let n = self.num.substitute(values);
        let d = self.den.substitute(values);
        d.inv().map(|di| &n * &di)
    }

    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.den = ParamPoly::one();
            return self;
        }
        // common monomial factor
        let g = self.num.monomial_content().gcd(&self.den.monomial_content());
        if !g.is_one() {
            self.num = self.num.div_monomial(&g);
            self.den = self.den.div_monomial(&g);
        }
        // rational content, carried by the numerator
        let cd = self.den.content();
        if !cd.is_one() {
            let inv = cd.recip();
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
        if self.den.as_monomial().is_some() {
            return self;
        }
        if let Some(q) = self.num.div_exact(&self.den) {
            self.num = q;
            self.den = ParamPoly::one();
            return self;
        }
        if self.num.as_monomial().is_none() {
            if let Some(q) = self.den.div_exact(&self.num) {
                let c = q.content();
                self.num = ParamPoly::constant(c.recip());
                self.den = q.scale(&c.recip());
            }
        }
        self
    }
}

impl Default for Coef {
    fn default() -> Self {
        Coef::zero()
    }
}

impl PartialEq for Coef {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for Coef {}

impl<'a> Add for &'a Coef {
    type Output = Coef;
    fn add(self, rhs: &'a Coef) -> Coef {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            return Coef { num: &self.num + &rhs.num, den: self.den.clone() }.normalized();
        }
        Coef {
            num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
        .normalized()
    }
}

impl<'a> Sub for &'a Coef {
    type Output = Coef;
    fn sub(self, rhs: &'a Coef) -> Coef {
        self + &(-rhs)
    }
}

impl<'a> Mul for &'a Coef {
    type Output = Coef;
    fn mul(self, rhs: &'a Coef) -> Coef {
        if self.is_zero() || rhs.is_zero() {
            return Coef::zero();
        }
        Coef { num: &self.num * &rhs.num, den: &self.den * &rhs.den }.normalized()
    }
}

impl<'a> Div for &'a Coef {
    type Output = Coef;
    /// Panics on division by zero; callers check invertibility first.
    fn div(self, rhs: &'a Coef) -> Coef {
        self * &rhs.inv().expect("division by zero coefficient")
    }
}

impl Neg for &Coef {
    type Output = Coef;
    fn neg(self) -> Coef {
        Coef { num: -&self.num, den: self.den.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Coef {
            type Output = Coef;
            fn $m(self, rhs: Coef) -> Coef {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Coef {
    type Output = Coef;
    fn neg(self) -> Coef {
        -&self
    }
}

impl From<i64> for Coef {
    fn from(n: i64) -> Self {
        Coef::from_int(n)
    }
}

impl From<BigRational> for Coef {
    fn from(r: BigRational) -> Self {
        Coef::from_rational(r)
    }
}

impl Coef {
    /// True when printing needs parentheses to be used as a factor.
    pub fn is_compound(&self) -> bool {
        self.num.num_terms() > 1 || self.den.num_terms() > 1
    }

    /// Single-term coefficient with negative sign, e.g. `-2*a/3`.
    pub fn is_negative_term(&self) -> bool {
        self.num.num_terms() == 1
            && self.den.num_terms() == 1
            && self.num.leading().map(|(_, c)| c.is_negative()).unwrap_or(false)
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(d) = self.den.as_constant() {
            // den is normalized to 1 when constant
            if d.is_one() {
                return write!(f, "{}", self.num);
            }
            return write!(f, "({})/{}", self.num, d);
        }
        if self.num.num_terms() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        if self.den.num_terms() > 1 {
            write!(f, "/({})", self.den)
        } else {
            let (m, c) = self.den.leading().unwrap();
            if c.is_one() {
                write!(f, "/{}", m)
            } else {
                write!(f, "/({})", self.den)
            }
        }
    }
}

/// Sign of a scalar, when it can be decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_rational(r: &BigRational) -> Sign {
        if r.is_zero() {
            Sign::Zero
        } else if r.is_negative() {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

/// Helper for tests and callers building expressions by hand.
pub fn symbol(name: &str) -> Symbol {
    Symbol::from(name)
}
