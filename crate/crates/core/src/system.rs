//! Three-dimensional systems whose linear part is `y ∂x − λ z ∂z`, their
//! planar restrictions, and the side conditions collected during analysis.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Signed;

use crate::coef::{Coef, Symbol};
use crate::error::{Error, Result};
use crate::poly::{Exps, Jet2, Jet3, Poly2, Poly3};

pub const DEFAULT_ORDER: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    NonZero,
    Negative,
    Positive,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::NonZero => "!= 0",
            Relation::Negative => "< 0",
            Relation::Positive => "> 0",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideCondition {
    pub expr: Coef,
    pub relation: Relation,
}

impl fmt::Display for SideCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.expr, self.relation.symbol())
    }
}

/// Assumptions a verdict depends on, without duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SideConditionSet {
    items: Vec<SideCondition>,
}

impl SideConditionSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a condition, divided by the rational content of its numerator
    /// (by its absolute value for sign conditions).
    pub fn push(&mut self, expr: Coef, relation: Relation) {
        let mut content = expr.numerator_content();
        if relation != Relation::NonZero && content.is_negative() {
            content = -content;
        }
        let expr = if expr.is_zero() { expr } else { expr.scale_rational(&content.recip()) };
        let c = SideCondition { expr, relation };
        if !self.items.contains(&c) {
            self.items.push(c);
        }
    }

    pub fn extend(&mut self, other: &SideConditionSet) {
        for c in &other.items {
            self.push(c.expr.clone(), c.relation);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &SideCondition> {
        self.items.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }
}

/// `ẋ = y + P`, `ẏ = Q`, `ż = −λz + R` with `P, Q, R` of order at least two.
///
/// The fields are stored in full, linear part included, as exact polynomials
/// known through degree `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemModel {
    params: Vec<Symbol>,
    order: u32,
    fields: [Poly3; 3],
    lambda: Coef,
    side: SideConditionSet,
}

impl SystemModel {
    /// Builds and validates a system from its three full components.
    pub fn new(params: Vec<Symbol>, order: u32, fields: [Poly3; 3]) -> Result<Self> {
        for (i, f) in fields.iter().enumerate() {
            if let Some(d) = f.degree() {
                if d > order {
                    let (e, _) = f.leading().expect("nonzero");
                    return Err(Error::Precondition(format!(
                        "monomial {} in d{} exceeds the declared order {}",
                        e,
                        ["x", "y", "z"][i],
                        order
                    )));
                }
            }
        }
        let lambda = validate_linear_part(&fields)?;
        let mut side = SideConditionSet::new();
        if !lambda.is_constant() {
            side.push(lambda.clone(), Relation::NonZero);
        }
        Ok(SystemModel { params, order, fields, lambda, side })
    }

    pub fn params(&self) -> &[Symbol] {
        &self.params
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn lambda(&self) -> &Coef {
        &self.lambda
    }

    pub fn side_conditions(&self) -> &SideConditionSet {
        &self.side
    }

    /// Full component `i` (0 = ẋ, 1 = ẏ, 2 = ż).
    pub fn field(&self, i: usize) -> &Poly3 {
        &self.fields[i]
    }

    pub fn fields(&self) -> &[Poly3; 3] {
        &self.fields
    }

    /// Nonlinear parts `P, Q, R`.
    pub fn nonlinear(&self, i: usize) -> Poly3 {
        let mut out = Poly3::zero();
        for (e, c) in self.fields[i].terms() {
            if e.degree() >= 2 {
                out.add_term(*e, c.clone());
            }
        }
        out
    }

    pub fn p(&self) -> Jet3 {
        Jet3::new(self.nonlinear(0), self.order)
    }

    pub fn q(&self) -> Jet3 {
        Jet3::new(self.nonlinear(1), self.order)
    }

    pub fn r(&self) -> Jet3 {
        Jet3::new(self.nonlinear(2), self.order)
    }

    /// Parameters that actually appear in the fields.
    pub fn free_symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = Vec::new();
        for f in &self.fields {
            for s in f.symbols() {
                if !out.contains(&s) {
                    out.push(s);
                }
            }
        }
        out.sort();
        out
    }

    /// Substitutes values for parameters and revalidates.
    pub fn substitute(&self, values: &BTreeMap<Symbol, Coef>) -> Result<SystemModel> {
        let mut fields: [Poly3; 3] = Default::default();
        for i in 0..3 {
            fields[i] = self.fields[i].substitute_params(values).ok_or_else(|| {
                Error::Precondition("substitution makes a denominator vanish".into())
            })?;
        }
        let params = self
            .params
            .iter()
            .filter(|p| !values.contains_key(*p))
            .cloned()
            .collect();
        SystemModel::new(params, self.order, fields)
    }

    /// Same system, declared to a different jet order.
    pub fn with_order(&self, order: u32) -> Result<SystemModel> {
        let fields = [
            self.fields[0].truncate(order),
            self.fields[1].truncate(order),
            self.fields[2].truncate(order),
        ];
        let mut s = SystemModel::new(self.params.clone(), order, fields)?;
        s.side = self.side.clone();
        Ok(s)
    }

    /// Lie derivative `X·∇g` of a polynomial, exact.
    pub fn lie_derivative(&self, g: &Poly3) -> Poly3 {
        let mut out = Poly3::zero();
        for i in 0..3 {
            let d = g.partial(i);
            if !d.is_zero() {
                out = &out + &(&self.fields[i] * &d);
            }
        }
        out
    }
}

fn validate_linear_part(fields: &[Poly3; 3]) -> Result<Coef> {
    let names = ["dx", "dy", "dz"];
    for (i, f) in fields.iter().enumerate() {
        let c = f.coeff([0, 0, 0]);
        if !c.is_zero() {
            return Err(Error::LinearPart(format!("constant term {} in {}", c, names[i])));
        }
    }
    // dx must start with y, dy with nothing
    for i in 0..2 {
        for v in 0..3 {
            let e = Exps::<3>::unit(v);
            let got = fields[i].coeff(e.0);
            let want = if i == 0 && v == 1 { Coef::one() } else { Coef::zero() };
            if got != want {
                return Err(Error::LinearPart(describe_linear(names[i], &e, &got, &want)));
            }
        }
    }
    for v in 0..2 {
        let e = Exps::<3>::unit(v);
        let got = fields[2].coeff(e.0);
        if !got.is_zero() {
            return Err(Error::LinearPart(describe_linear("dz", &e, &got, &Coef::zero())));
        }
    }
    let lambda = -&fields[2].coeff([0, 0, 1]);
    if lambda.is_zero() {
        return Err(Error::ZeroLambda);
    }
    Ok(lambda)
}

fn describe_linear(eq: &str, e: &Exps<3>, got: &Coef, want: &Coef) -> String {
    if want.is_zero() {
        format!("forbidden linear term ({})*{} in {}", got, e, eq)
    } else {
        format!("coefficient of {} in {} is {}, expected {}", e, eq, got, want)
    }
}

/// Planar system `ẋ = y + X₂(x, y)`, `ẏ = Y₂(x, y)`, stored in full.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarSystem {
    xdot: Jet2,
    ydot: Jet2,
}

impl PlanarSystem {
    pub fn new(xdot: Jet2, ydot: Jet2) -> Result<Self> {
        let order = xdot.order().min(ydot.order());
        let xdot = xdot.truncate(order)?;
        let ydot = ydot.truncate(order)?;
        let ok = xdot.poly().coeff([0, 0]).is_zero()
            && xdot.poly().coeff([1, 0]).is_zero()
            && xdot.poly().coeff([0, 1]).is_one()
            && ydot.poly().coeff([0, 0]).is_zero()
            && ydot.poly().coeff([1, 0]).is_zero()
            && ydot.poly().coeff([0, 1]).is_zero();
        if !ok {
            return Err(Error::LinearPart("planar linear part must be y*d/dx".into()));
        }
        Ok(PlanarSystem { xdot, ydot })
    }

    /// Convenience constructor from exact polynomials.
    pub fn from_polys(xdot: Poly2, ydot: Poly2, order: u32) -> Result<Self> {
        PlanarSystem::new(Jet2::new(xdot, order), Jet2::new(ydot, order))
    }

    pub fn order(&self) -> u32 {
        self.xdot.order()
    }

    pub fn xdot(&self) -> &Jet2 {
        &self.xdot
    }

    pub fn ydot(&self) -> &Jet2 {
        &self.ydot
    }

    /// `X₂ = ẋ − y`.
    pub fn x2(&self) -> Jet2 {
        self.xdot.sub(&Jet2::new(Poly2::var(1), self.order()))
    }

    pub fn y2(&self) -> Jet2 {
        self.ydot.clone()
    }

    pub fn substitute(&self, values: &BTreeMap<Symbol, Coef>) -> Result<PlanarSystem> {
        let f = |j: &Jet2| -> Result<Jet2> {
            let p = j.poly().substitute_params(values).ok_or_else(|| {
                Error::Precondition("substitution makes a denominator vanish".into())
            })?;
            Ok(Jet2::new(p, j.order()))
        };
        PlanarSystem::new(f(&self.xdot)?, f(&self.ydot)?)
    }
}

impl fmt::Display for PlanarSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dx = {}; dy = {};", self.xdot.poly(), self.ydot.poly())
    }
}

/// An explicit affine change `old = shift + M·new`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameChange {
    pub shift: [Coef; 3],
    pub matrix: [[Coef; 3]; 3],
}

impl FrameChange {
    pub fn identity() -> Self {
        let z = Coef::zero;
        let o = Coef::one;
        FrameChange {
            shift: [z(), z(), z()],
            matrix: [[o(), z(), z()], [z(), o(), z()], [z(), z(), o()]],
        }
    }

    pub fn determinant(&self) -> Coef {
        let m = &self.matrix;
        let minor = |a: usize, b: usize, c: usize, d: usize| -> Coef {
            &(&m[1][a] * &m[2][b]) - &(&m[1][c] * &m[2][d])
        };
        let t0 = &m[0][0] * &minor(1, 2, 2, 1);
        let t1 = &m[0][1] * &minor(0, 2, 2, 0);
        let t2 = &m[0][2] * &minor(0, 1, 1, 0);
        &(&t0 - &t1) + &t2
    }

    /// Inverse by the adjugate formula.
    pub fn inverse_matrix(&self) -> Option<[[Coef; 3]; 3]> {
        let det = self.determinant();
        let inv_det = det.inv()?;
        let m = &self.matrix;
        let mut out: [[Coef; 3]; 3] = Default::default();
        for i in 0..3 {
            for j in 0..3 {
                // cofactor of entry (j, i)
                let r: Vec<usize> = (0..3).filter(|k| *k != j).collect();
                let c: Vec<usize> = (0..3).filter(|k| *k != i).collect();
                let minor = &(&m[r[0]][c[0]] * &m[r[1]][c[1]]) - &(&m[r[0]][c[1]] * &m[r[1]][c[0]]);
                let signed = if (i + j) % 2 == 0 { minor } else { -minor };
                out[i][j] = &signed * &inv_det;
            }
        }
        Some(out)
    }
}

/// Rewrites a raw polynomial system in the frame `old = shift + M·new` and
/// checks that the result has linear part `y ∂x − λ z ∂z`.
///
/// The change is supplied by the caller; it is verified, not discovered.
pub fn bring_to_nilpotent_frame(
    params: Vec<Symbol>,
    order: u32,
    raw: &[Poly3; 3],
    change: &FrameChange,
) -> Result<SystemModel> {
    let minv = change
        .inverse_matrix()
        .ok_or_else(|| Error::Frame("the linear change is singular".into()))?;
    let subs: [Poly3; 3] = core::array::from_fn(|i| {
        let mut s = Poly3::constant(change.shift[i].clone());
        for j in 0..3 {
            s = &s + &Poly3::var(j).scale(&change.matrix[i][j]);
        }
        s
    });
    let max_deg = raw.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
    let bound = max_deg.max(order);
    let composed: Vec<Poly3> = raw.iter().map(|p| p.compose(&subs, bound)).collect();
    let fields: [Poly3; 3] = core::array::from_fn(|i| {
        let mut s = Poly3::zero();
        for j in 0..3 {
            s = &s + &composed[j].scale(&minv[i][j]);
        }
        s
    });
    SystemModel::new(params, order, fields).map_err(|e| match e {
        Error::LinearPart(m) => Error::Frame(m),
        Error::ZeroLambda => Error::Frame("the transformed z eigenvalue vanishes".into()),
        other => other,
    })
}
