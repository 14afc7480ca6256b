#![allow(dead_code)]

use nilcenter_core::poly::Exps;
use nilcenter_core::system::{FrameChange, SystemModel};
use nilcenter_core::{Coef, Poly3, Symbol};

pub fn p(name: &str) -> Coef {
    Coef::param(name)
}

pub fn int(n: i64) -> Coef {
    Coef::from_int(n)
}

pub fn q(n: i64, d: i64) -> Coef {
    Coef::ratio(n, d)
}

/// Sum of `c * x^j y^k z^l`.
pub fn poly(terms: &[(Coef, [u32; 3])]) -> Poly3 {
    let mut out = Poly3::zero();
    for (c, e) in terms {
        out.add_term(Exps(*e), c.clone());
    }
    out
}

pub fn syms(names: &[&str]) -> Vec<Symbol> {
    names.iter().map(|n| Symbol::from(*n)).collect()
}

pub fn model(params: &[&str], order: u32, fields: [Poly3; 3]) -> SystemModel {
    SystemModel::new(syms(params), order, fields).expect("valid system")
}

/// dx = y + a200 x^2 + …, the generic quadratic-cubic system used for the
/// low-order jet formulas.
pub fn generic_quadratic(order: u32) -> SystemModel {
    let names = [
        "a200", "a110", "a020", "a101", "a011", "a002", "b200", "b110", "b020", "b101", "b011",
        "b002", "c200", "c110", "c020", "c101", "c011", "c002", "b300", "lambda",
    ];
    let quad = |pre: &str| -> Poly3 {
        let mut out = Poly3::zero();
        for e in [[2, 0, 0], [1, 1, 0], [0, 2, 0], [1, 0, 1], [0, 1, 1], [0, 0, 2]] {
            let name = format!("{}{}{}{}", pre, e[0], e[1], e[2]);
            out.add_term(Exps(e), p(&name));
        }
        out
    };
    let dx = &poly(&[(int(1), [0, 1, 0])]) + &quad("a");
    let dy = &quad("b") + &poly(&[(p("b300"), [3, 0, 0])]);
    let dz = &poly(&[(-&p("lambda"), [0, 0, 1])]) + &quad("c");
    model(&names, order, [dx, dy, dz])
}

/// dx = y, dy = b101 xz + b020 y^2 + b011 yz + b002 z^2,
/// dz = -z + x^2 + 2xy + c020 y^2.
pub fn kukles(order: u32) -> SystemModel {
    model(
        &["b101", "b020", "b011", "b002", "c020"],
        order,
        [
            poly(&[(int(1), [0, 1, 0])]),
            poly(&[
                (p("b101"), [1, 0, 1]),
                (p("b020"), [0, 2, 0]),
                (p("b011"), [0, 1, 1]),
                (p("b002"), [0, 0, 2]),
            ]),
            poly(&[
                (int(-1), [0, 0, 1]),
                (int(1), [2, 0, 0]),
                (int(2), [1, 1, 0]),
                (p("c020"), [0, 2, 0]),
            ]),
        ],
    )
}

/// Generalized Lorenz in its nilpotent frame:
/// dx = y - xz + yz/a, dy = -a xz + yz, dz = d z + x^2 - xy/a.
pub fn lorenz_nilpotent(order: u32) -> SystemModel {
    let a = p("a");
    let ia = a.inv().unwrap();
    model(
        &["a", "d"],
        order,
        [
            poly(&[(int(1), [0, 1, 0]), (int(-1), [1, 0, 1]), (ia.clone(), [0, 1, 1])]),
            poly(&[(-&a, [1, 0, 1]), (int(1), [0, 1, 1])]),
            poly(&[(p("d"), [0, 0, 1]), (int(1), [2, 0, 0]), (-&ia, [1, 1, 0])]),
        ],
    )
}

/// Raw generalized Lorenz: dx = a(y - x), dy = bx + cy - xz, dz = dz + xy.
pub fn lorenz_raw() -> [Poly3; 3] {
    let a = p("a");
    [
        poly(&[(a.clone(), [0, 1, 0]), (-&a, [1, 0, 0])]),
        poly(&[(p("b"), [1, 0, 0]), (p("c"), [0, 1, 0]), (int(-1), [1, 0, 1])]),
        poly(&[(p("d"), [0, 0, 1]), (int(1), [1, 1, 0])]),
    ]
}

/// Old coordinates from the nilpotent ones: x = y - x̄/a… written as
/// old = M·new for the change x̄ = y, ȳ = a(y - x), z̄ = z.
pub fn lorenz_change() -> FrameChange {
    let a = p("a");
    let z = Coef::zero;
    FrameChange {
        shift: [z(), z(), z()],
        matrix: [
            [int(1), -&a.inv().unwrap(), z()],
            [int(1), z(), z()],
            [z(), z(), int(1)],
        ],
    }
}

/// Dynamo model in its nilpotent frame, parameters l (the model's λ) and k:
/// dx = y, dy = l xz + yz, dz = -k z - k (l + 1)(l x + y)^2.
pub fn dynamo_nilpotent(order: u32) -> SystemModel {
    let l = p("l");
    let k = p("k");
    let kl1 = &k * &(&l + &int(1));
    let m = -&kl1;
    model(
        &["l", "k"],
        order,
        [
            poly(&[(int(1), [0, 1, 0])]),
            poly(&[(l.clone(), [1, 0, 1]), (int(1), [0, 1, 1])]),
            poly(&[
                (-&k, [0, 0, 1]),
                (&m * &(&l * &l), [2, 0, 0]),
                (&m * &(&l * &int(2)), [1, 1, 0]),
                (m.clone(), [0, 2, 0]),
            ]),
        ],
    )
}

/// Raw dynamo with alpha = k(l + 1), beta = l^2:
/// dx = -x - beta z + xy, dy = alpha - k y - alpha x^2, dz = x - l z.
pub fn dynamo_raw() -> [Poly3; 3] {
    let l = p("l");
    let k = p("k");
    let alpha = &k * &(&l + &int(1));
    let beta = &l * &l;
    [
        poly(&[(int(-1), [1, 0, 0]), (-&beta, [0, 0, 1]), (int(1), [1, 1, 0])]),
        poly(&[(alpha.clone(), [0, 0, 0]), (-&k, [0, 1, 0]), (-&alpha, [2, 0, 0])]),
        poly(&[(int(1), [1, 0, 0]), (-&l, [0, 0, 1])]),
    ]
}

/// Translate the equilibrium (0, l + 1, 0) to the origin, then
/// x = l x̄ + ȳ, y = z̄, z = x̄.
pub fn dynamo_change() -> FrameChange {
    let l = p("l");
    let z = Coef::zero;
    FrameChange {
        shift: [z(), &l + &int(1), z()],
        matrix: [[l.clone(), int(1), z()], [z(), z(), int(1)], [int(1), z(), z()]],
    }
}

pub fn subst(pairs: &[(&str, Coef)]) -> std::collections::BTreeMap<Symbol, Coef> {
    pairs.iter().map(|(n, c)| (Symbol::from(*n), c.clone())).collect()
}

use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small nonzero rational `p/q` with `|p| ≤ 3`, `q ≤ 3`.
pub fn small_rational(r: &mut ChaCha8Rng) -> Coef {
    loop {
        let n: i64 = r.gen_range(-3..=3);
        if n != 0 {
            return q(n, r.gen_range(1..=3));
        }
    }
}

/// Random polynomial with monomials of degree `lo..=hi`, each present with
/// probability `density`.
pub fn random_poly(r: &mut ChaCha8Rng, lo: u32, hi: u32, density: f64) -> Poly3 {
    let mut out = Poly3::zero();
    for d in lo..=hi {
        for e in nilcenter_core::poly::monomial_basis3(d) {
            if r.gen_bool(density) {
                out.add_term(e, small_rational(r));
            }
        }
    }
    out
}

pub fn random_lambda(r: &mut ChaCha8Rng) -> Coef {
    [int(1), int(-1), int(2), q(1, 2), q(-3, 2), int(3)][r.gen_range(0..6)].clone()
}

/// `ẋ = y + P`, `ẏ = Q`, `ż = −λz + R` with random nonlinearities of degree
/// at most `max_deg`.
pub fn random_system(r: &mut ChaCha8Rng, max_deg: u32, order: u32, density: f64) -> SystemModel {
    let lambda = random_lambda(r);
    let dx = &poly(&[(int(1), [0, 1, 0])]) + &random_poly(r, 2, max_deg, density);
    let dy = random_poly(r, 2, max_deg, density);
    let dz = &poly(&[(-&lambda, [0, 0, 1])]) + &random_poly(r, 2, max_deg, density);
    model(&[], order, [dx, dy, dz])
}

/// Random polynomial in `x` alone with degrees `lo..=hi`.
pub fn random_x_poly(r: &mut ChaCha8Rng, lo: u32, hi: u32, density: f64) -> Poly3 {
    let mut out = Poly3::zero();
    for d in lo..=hi {
        if r.gen_bool(density) {
            out.add_term(Exps([d, 0, 0]), small_rational(r));
        }
    }
    out
}

/// A random system already in the normal-form shape
/// `ẋ = y + xP₁(x)`, `ẏ = Q₂(x) + yP₁(x)`, `ż = −λz + zR₁(x)`.
pub fn random_normal_shape(r: &mut ChaCha8Rng, max_deg: u32, order: u32) -> SystemModel {
    let lambda = random_lambda(r);
    let p1 = random_x_poly(r, 1, max_deg - 1, 0.6);
    let q2 = random_x_poly(r, 2, max_deg, 0.6);
    let r1 = random_x_poly(r, 1, max_deg - 1, 0.6);
    let x = poly(&[(int(1), [1, 0, 0])]);
    let y = poly(&[(int(1), [0, 1, 0])]);
    let z = poly(&[(int(1), [0, 0, 1])]);
    let dx = &y + &(&x * &p1);
    let dy = &q2 + &(&y * &p1);
    let dz = &(&z * &r1) - &z.scale(&lambda);
    model(&[], order, [dx, dy, dz])
}

use nilcenter_core::assume::Assumptions;
use nilcenter_core::cmanifold::{cm_jet, restrict};
use nilcenter_core::monodromy::{andreev_data, classify_monodromy, AndreevData, MonodromyVerdict};
use nilcenter_core::obstruction::{center_verdict, omega_series, CenterVerdict, ObstructionSeries};

pub struct Pipeline {
    pub data: AndreevData,
    pub mono: MonodromyVerdict,
    pub omegas: ObstructionSeries,
    pub verdict: CenterVerdict,
}

/// Center manifold jet, Andreev data on the restriction, monodromy, the
/// obstruction series and the center verdict, all through order `n`.
pub fn pipeline(s: &SystemModel, n: u32, assume: &Assumptions) -> Pipeline {
    let h = cm_jet(s, n).unwrap();
    let pl = restrict(s, &h).unwrap();
    let data = andreev_data(&pl).unwrap();
    let mono = classify_monodromy(&data, assume);
    let omegas = omega_series(s, n).unwrap();
    let verdict = center_verdict(s, &data, &mono, &omegas, assume).unwrap();
    Pipeline { data, mono, omegas, verdict }
}

/// As [`pipeline`], or `None` when the singular point is not monodromic.
pub fn monodromic_pipeline(s: &SystemModel, n: u32, assume: &Assumptions) -> Option<Pipeline> {
    let h = cm_jet(s, n).unwrap();
    let data = andreev_data(&restrict(s, &h).unwrap()).unwrap();
    if !classify_monodromy(&data, assume).is_monodromic() {
        return None;
    }
    Some(pipeline(s, n, assume))
}

use proptest::prelude::*;

pub fn rational_strategy() -> impl Strategy<Value = Coef> {
    (-5i64..=5, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

/// Homogeneous polynomial of degree `n` with small rational coefficients,
/// roughly half of the monomials present.
pub fn homogeneous_strategy(n: u32) -> impl Strategy<Value = Poly3> {
    let basis = nilcenter_core::poly::monomial_basis3(n);
    let len = basis.len();
    proptest::collection::vec(proptest::option::of(rational_strategy()), len).prop_map(move |cs| {
        let mut out = Poly3::zero();
        for (e, c) in basis.iter().zip(cs) {
            if let Some(c) = c {
                out.add_term(*e, c);
            }
        }
        out
    })
}

/// Polynomial with monomials of degree `lo..=hi`.
pub fn poly_strategy(lo: u32, hi: u32) -> impl Strategy<Value = Poly3> {
    let parts: Vec<_> = (lo..=hi).map(homogeneous_strategy).collect();
    parts.prop_map(|ps| ps.iter().fold(Poly3::zero(), |acc, p| &acc + p))
}

pub fn lambda_strategy() -> impl Strategy<Value = Coef> {
    prop_oneof![Just(int(1)), Just(int(-1)), Just(q(1, 2)), Just(int(3)), Just(q(-5, 3))]
}
