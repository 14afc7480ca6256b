use nilcenter::parse::{parse_coef, parse_source, parse_system, InputError};
use nilcenter::print::print_system;
use nilcenter_core::poly::Exps;
use nilcenter_core::system::SystemModel;
use nilcenter_core::{Coef, Poly3, Symbol};
use proptest::prelude::*;

fn sym(s: &str) -> Symbol {
    Symbol::from(s)
}

#[test]
fn trivial_cubic() {
    let s = parse_system("dx = y; dy = -x^3; dz = -z;").unwrap();
    assert!(s.nonlinear(0).is_zero());
    assert!(s.nonlinear(2).is_zero());
    assert_eq!(s.nonlinear(1), Poly3::monomial(Exps([3, 0, 0]), Coef::from_int(-1)));
    assert_eq!(s.lambda(), &Coef::from_int(1));
    assert_eq!(s.order(), 12);
}

#[test]
fn lorenz_nilpotent_form() {
    let s = parse_system(
        "params a;\n\
         dx = y - x*z + (1/a)*y*z;\n\
         dy = -a*x*z + y*z;\n\
         dz = -2*a*z + x^2 - (1/a)*x*y;\n",
    )
    .unwrap();
    assert_eq!(s.lambda(), &(&Coef::from_int(2) * &Coef::param("a")));
    assert_eq!(s.params(), &[sym("a")]);
}

#[test]
fn linear_term_is_rejected_with_its_line() {
    let e = parse_system("dx = y + x;\ndy = -x^3;\ndz = -z;").unwrap_err();
    match e {
        InputError::Validation { line, msg } => {
            assert_eq!(line, Some(1));
            assert!(msg.contains("x"), "{}", msg);
        }
        other => panic!("{:?}", other),
    }
    let e = parse_system("dx = y;\ndy = -x^3;\ndz = -z + 3*y;").unwrap_err();
    assert!(matches!(e, InputError::Validation { line: Some(3), .. }), "{:?}", e);
}

#[test]
fn zero_lambda_and_degree_over_order() {
    assert!(matches!(parse_system("dx = y; dy = -x^3; dz = x^2;"), Err(InputError::Validation { .. })));
    assert!(matches!(
        parse_system("params a; order 3; dx = y; dy = -x^4; dz = -z;"),
        Err(InputError::Validation { .. })
    ));
}

#[test]
fn statements_and_names() {
    // equations may come in any order, each exactly once
    let s = parse_system("dz = -z; dx = y; dy = -x^3;").unwrap();
    assert_eq!(s.field(0), &Poly3::var(1));
    assert!(parse_source("dx = y; dx = y; dz = -z;").is_err());
    assert!(parse_source("dx = y; dy = 0;").is_err());
    assert!(parse_source("params x; dx = y; dy = 0; dz = -z;").is_err());
    assert!(parse_source("params order; dx = y; dy = 0; dz = -z;").is_err());
    assert!(parse_source("params a, a; dx = y; dy = 0; dz = -z;").is_err());
    assert!(parse_source("dx = y + b*x^2; dy = 0; dz = -z;").is_err());
    assert!(parse_source("dx = y; params a; dy = 0; dz = -z;").is_err());
    assert!(parse_source("dx = y + 0.5*x^2; dy = 0; dz = -z;").is_err());
    let src = parse_source("# comment\nparams a; order 7; # trailing\ndx = y; dy = a*x^3; dz = -z;").unwrap();
    assert_eq!(src.order, Some(7));
    assert_eq!(src.lines, [3, 3, 3]);
}

#[test]
fn powers() {
    let s = parse_system("params a; dx = y + (x + y)^2; dy = a^-2*x^3; dz = -z;").unwrap();
    assert_eq!(s.field(1).coeff([3, 0, 0]), Coef::param("a").pow(2).inv().unwrap());
    assert_eq!(s.field(0).coeff([1, 1, 0]), Coef::from_int(2));
    assert!(parse_source("dx = y + x^-2; dy = 0; dz = -z;").is_err());
    assert!(parse_source("dx = y + x^2^2; dy = 0; dz = -z;").is_err());
}

#[test]
fn coefficient_expressions() {
    let params = [sym("k")];
    assert_eq!(parse_coef("3*k/2", &params).unwrap(), &Coef::ratio(3, 2) * &Coef::param("k"));
    assert_eq!(parse_coef("-3/2", &params).unwrap(), Coef::ratio(-3, 2));
    assert!(parse_coef("x", &params).is_err());
    assert!(parse_coef("m", &params).is_err());
    assert!(parse_coef("1/(k - k)", &params).is_err());
}

#[test]
fn example_files_round_trip() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/systems");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let Ok(s) = parse_system(&text) else {
            assert!(path.ends_with("bad.sys"), "{} fails to parse", path.display());
            continue;
        };
        assert_eq!(parse_system(&print_system(&s)).unwrap(), s, "{}", path.display());
    }
}

fn coef_strategy() -> impl Strategy<Value = Coef> {
    let r = (-4i64..=4, 1i64..=3);
    (r.clone(), r.clone(), r.clone(), 0usize..4).prop_map(|((n0, d0), (n1, d1), (n2, d2), shape)| {
        let (a, b) = (Coef::param("a"), Coef::param("b"));
        let lin = &(&Coef::ratio(n0, d0) + &(&Coef::ratio(n1, d1) * &a)) + &(&Coef::ratio(n2, d2) * &b);
        match shape {
            0 => Coef::ratio(n0, d0),
            1 => lin,
            2 => &lin / &(&b + &Coef::from_int(2)),
            _ => &(&a * &b) * &Coef::ratio(n1, d1),
        }
    })
}

fn nonlinear_strategy() -> impl Strategy<Value = Poly3> {
    prop::collection::vec(((0u32..4, 0u32..4, 0u32..3), coef_strategy()), 0..5).prop_map(|terms| {
        let mut p = Poly3::zero();
        for ((i, j, k), c) in terms {
            if i + j + k >= 2 {
                p.add_term(Exps([i, j, k]), c);
            }
        }
        p
    })
}

fn lambda_strategy() -> impl Strategy<Value = Coef> {
    prop_oneof![
        (1i64..=5, 1i64..=3).prop_map(|(n, d)| Coef::ratio(n, d)),
        Just(Coef::param("a")),
        Just(&Coef::from_int(2) * &Coef::param("b")),
    ]
}

fn model_strategy() -> impl Strategy<Value = SystemModel> {
    (nonlinear_strategy(), nonlinear_strategy(), nonlinear_strategy(), lambda_strategy(), 8u32..=12).prop_map(
        |(p, q, r, lam, order)| {
            let dx = &Poly3::var(1) + &p;
            let dz = &Poly3::monomial(Exps([0, 0, 1]), -&lam) + &r;
            SystemModel::new(vec![sym("a"), sym("b")], order, [dx, q, dz]).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_then_parse_is_identity(s in model_strategy()) {
        let text = print_system(&s);
        let back = parse_system(&text).map_err(|e| TestCaseError::fail(format!("{}\n{}", e, text)))?;
        prop_assert_eq!(back, s);
    }

    #[test]
    fn injected_linear_monomials_are_rejected(
        s in model_strategy(),
        eq in 0usize..3,
        var in 0usize..3,
        c in coef_strategy(),
    ) {
        // the allowed linear part is y in dx and z in dz
        prop_assume!(!c.is_zero() && !(eq == 0 && var == 1) && !(eq == 2 && var == 2));
        let mut fields = s.fields().clone();
        let mut e = [0u32; 3];
        e[var] = 1;
        fields[eq].add_term(Exps(e), c);
        let text = format!(
            "params a, b;\norder {};\ndx = {};\ndy = {};\ndz = {};\n",
            s.order(), fields[0], fields[1], fields[2]
        );
        match parse_system(&text) {
            Err(InputError::Validation { line: Some(l), .. }) => prop_assert_eq!(l, eq + 3),
            other => prop_assert!(false, "{:?} accepted or misreported:\n{}", other, text),
        }
    }
}
