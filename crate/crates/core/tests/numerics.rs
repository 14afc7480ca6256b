mod common;

use common::*;
use nilcenter_core::cmanifold::{cm_jet, restrict};
use nilcenter_core::error::Error;
use nilcenter_core::numerics::{
    closed_form, displacement, gen_trig, geometric_grid, integrate, period, v1_check, OdeOptions, PolarSystem,
};
use nilcenter_core::system::PlanarSystem;
use nilcenter_core::Poly2;

const IDENTITY_TOL: f64 = 1e-8;

fn planar(xdot: &[([u32; 2], i64, i64)], ydot: &[([u32; 2], i64, i64)], order: u32) -> PlanarSystem {
    let mk = |t: &[([u32; 2], i64, i64)]| Poly2::from_terms(t.iter().map(|(e, n, d)| (*e, q(*n, *d))));
    PlanarSystem::from_polys(mk(xdot), mk(ydot), order).unwrap()
}

#[test]
fn pythagorean_identity_and_closure() {
    for n in 1..=3 {
        let g = gen_trig(n, IDENTITY_TOL).unwrap();
        assert!(g.identity_error < IDENTITY_TOL, "n = {}: {:e}", n, g.identity_error);
        assert!(g.closure_error < IDENTITY_TOL);
        assert!((g.period - g.period_ode).abs() < 1e-9 * g.period);
        assert!(g.symmetry_error() < IDENTITY_TOL, "n = {}", n);
        assert_eq!((g.cs[0], g.sn[0]), (1.0, 0.0));
    }
}

#[test]
fn circular_period() {
    assert!((period(1) - 2.0 * std::f64::consts::PI).abs() < 1e-10);
    let g = gen_trig(1, IDENTITY_TOL).unwrap();
    assert!((g.period_ode - 2.0 * std::f64::consts::PI).abs() < 1e-10);
}

#[test]
fn odd_moments_vanish() {
    for n in 1..=3 {
        let g = gen_trig(n, IDENTITY_TOL).unwrap();
        for p in 0..=6 {
            for qq in 0..=6 {
                if p % 2 == 1 || qq % 2 == 1 {
                    assert!(g.integral(p, qq).abs() < IDENTITY_TOL, "n={} p={} q={}", n, p, qq);
                    assert_eq!(closed_form(n, p, qq), 0.0);
                }
            }
        }
    }
}

#[test]
fn even_moments_match_the_gamma_ratio() {
    for n in 1..=3 {
        let g = gen_trig(n, IDENTITY_TOL).unwrap();
        for p in (0..=6).step_by(2) {
            for qq in (0..=6).step_by(2) {
                let want = closed_form(n, p, qq);
                assert!((g.integral(p, qq) - want).abs() < IDENTITY_TOL * want.max(1.0), "n={} p={} q={}", n, p, qq);
            }
        }
        // the zeroth moment is the period
        assert!((closed_form(n, 0, 0) - g.period).abs() < 1e-12 * g.period);
    }
    // circular moments: ∫ sin²θ cos²θ = π/4
    assert!((closed_form(1, 2, 2) - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
}

#[test]
fn primitive_identities_along_the_orbit() {
    // ∫₀^θ Sn·Cs^q = (1 − Cs^{q+1}(θ))/(q+1) and ∫₀^θ Snᵖ·Cs^{2n−1} = Sn^{p+1}(θ)/(p+1),
    // integrated alongside the defining system
    for n in 1..=3u32 {
        let (qq, p) = (3, 2);
        let f = |_: f64, y: &[f64; 4]| {
            let (c, s) = (y[0], y[1]);
            Ok([-s, c.powi(2 * n as i32 - 1), s * c.powi(qq), s.powi(p) * c.powi(2 * n as i32 - 1)])
        };
        for theta in [0.3, 1.7, 4.0] {
            let (y, _) = integrate(f, 0.0, theta, [1.0, 0.0, 0.0, 0.0], &OdeOptions::default()).unwrap();
            let want_f = (1.0 - y[0].powi(qq + 1)) / (qq + 1) as f64;
            let want_g = y[1].powi(p + 1) / (p + 1) as f64;
            assert!((y[2] - want_f).abs() < IDENTITY_TOL && (y[3] - want_g).abs() < IDENTITY_TOL);
        }
    }
}

#[test]
fn eval_agrees_with_the_table() {
    let g = gen_trig(2, IDENTITY_TOL).unwrap();
    for i in [0, 17, 1000, 2047] {
        let (c, s) = g.eval(g.theta(i)).unwrap();
        assert!((c - g.cs[i]).abs() < 1e-12 && (s - g.sn[i]).abs() < 1e-12);
    }
    // periodic and odd
    let (c1, s1) = g.eval(0.9).unwrap();
    let (c2, s2) = g.eval(0.9 + 2.0 * g.period).unwrap();
    let (c3, s3) = g.eval(-0.9).unwrap();
    assert!((c1 - c2).abs() < 1e-10 && (s1 - s2).abs() < 1e-10);
    assert!((c1 - c3).abs() < 1e-10 && (s1 + s3).abs() < 1e-10);
}

#[test]
fn bad_arguments_are_rejected() {
    assert!(matches!(gen_trig(0, 1e-8), Err(Error::Precondition(_))));
    assert!(matches!(gen_trig(2, 0.0), Err(Error::Precondition(_))));
    let center = planar(&[([0, 1], 1, 1)], &[([3, 0], -1, 1)], 6);
    assert!(matches!(displacement(&center, 2, &[], 1e-10), Err(Error::Precondition(_))));
    assert!(matches!(PolarSystem::new(&center, 3), Err(Error::Precondition(_))));
    // saddle-type leading term: Δ > 0
    let saddle = planar(&[([0, 1], 1, 1)], &[([3, 0], 1, 1)], 6);
    assert!(matches!(PolarSystem::new(&saddle, 2), Err(Error::Precondition(_))));
    let symbolic = PlanarSystem::from_polys(
        Poly2::from_terms([([0, 1], int(1))]),
        Poly2::from_terms([([3, 0], -&p("a"))]),
        6,
    )
    .unwrap();
    assert!(matches!(PolarSystem::new(&symbolic, 2), Err(Error::NotNumeric(_))));
    let sys = PolarSystem::new(&center, 2).unwrap();
    assert!(matches!(sys.return_radius(0.0, &OdeOptions::default()), Err(Error::Domain(_))));
}

#[test]
fn cubic_center_sits_below_the_floor() {
    let center = planar(&[([0, 1], 1, 1)], &[([3, 0], -1, 1)], 6);
    let res = displacement(&center, 2, &geometric_grid(0.05, 0.4, 5), 1e-10).unwrap();
    assert!(res.below_floor(), "{:?}", res.samples);
    assert_eq!((res.sign, res.leading), (None, None));
    for s in &res.samples {
        assert!(s.d.abs() <= 10.0 * s.err);
    }
}

#[test]
fn reversible_quadratic_perturbation_sits_below_the_floor() {
    // ẋ = y + x², ẏ = −x³ is symmetric under (x, t) → (−x, −t), so every
    // orbit near the origin closes
    let pl = planar(&[([0, 1], 1, 1), ([2, 0], 1, 1)], &[([3, 0], -1, 1)], 10);
    let res = displacement(&pl, 2, &geometric_grid(0.02, 0.1, 4), 1e-10).unwrap();
    assert!(res.below_floor(), "{:?}", res.samples);
}

fn kukles_instance() -> PlanarSystem {
    // b101 = −1, b011 = 1, other parameters zero: ω₆ = 2/3
    let s = kukles(8)
        .substitute(&subst(&[("b101", int(-1)), ("b011", int(1)), ("b020", int(0)), ("b002", int(0)), ("c020", int(0))]))
        .unwrap();
    restrict(&s, &cm_jet(&s, 8).unwrap()).unwrap()
}

#[test]
fn even_obstruction_gives_a_stable_nonzero_displacement() {
    let pl = kukles_instance();
    let res = displacement(&pl, 2, &geometric_grid(0.05, 0.2, 5), 1e-10).unwrap();
    // ω₆ > 0 makes the origin repelling; d is negative in the decreasing angle
    assert_eq!(res.sign, Some(-1), "{:?}", res.samples);
    assert_eq!(res.leading, Some(2), "exponent {:?}", res.exponent);
    assert_eq!(res.parity_matches(), Some(true));
    for s in &res.samples {
        assert!(s.d.abs() > 10.0 * s.err);
    }
}

#[test]
fn first_variation_follows_the_canonical_coefficient() {
    // n = 2: v₁ = 1 whatever μ
    let even = planar(&[([0, 1], 1, 1)], &[([3, 0], -1, 1), ([1, 1], 2, 5)], 6);
    let e = v1_check(&even, 2, 0.04, 1e-6).unwrap();
    assert!(e.mu > 0.0 && e.consistent(1e-6), "{:?}", e);
    assert!((e.predicted - 1.0).abs() < 1e-12);

    // n = 3: v₁ − 1 has the sign of −μ
    for (b, sign) in [(1i64, -1.0), (-1, 1.0)] {
        let odd = planar(&[([0, 1], 1, 1)], &[([5, 0], -1, 1), ([2, 1], b, 10)], 8);
        let e = v1_check(&odd, 3, 0.04, 1e-4).unwrap();
        assert!(e.consistent(1e-4), "{:?}", e);
        assert_eq!((e.extrapolated - 1.0).signum(), sign);
        assert!((e.extrapolated - e.predicted).abs() < 1e-3, "{:?}", e);
    }
    let odd0 = planar(&[([0, 1], 1, 1)], &[([5, 0], -1, 1)], 8);
    let e = v1_check(&odd0, 3, 0.04, 1e-4).unwrap();
    assert!(e.mu == 0.0 && e.consistent(1e-4));
}
