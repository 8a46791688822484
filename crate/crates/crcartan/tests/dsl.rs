use crcartan::library::{builtin_spec, BUILTINS};
use crcartan::spec::{eval_jet, eval_point, parse_spec, EvalError, Expr, Func, PointValue, Value};
use crcartan_core::jet::{JetSpace, C64};
use proptest::prelude::*;

const HEADER: &str = "manifold \"h\" { n = 1 complex z = (x, y) coords = [t, x, y] param eps = 0.25 }\n\
    theta = d(t) + i*(conj(z)*d(z) - z*d(conj(z)))\ntheta1 = sqrt(2)*d(z)\n";

fn with_density(expr: &str) -> crcartan::spec::ManifoldSpec {
    parse_spec(&format!("{HEADER}density = {expr}\n")).unwrap()
}

#[test]
fn shipped_specs_round_trip() {
    for b in BUILTINS {
        let spec = builtin_spec(b.name);
        let printed = spec.to_string();
        let again = parse_spec(&printed).unwrap_or_else(|e| panic!("{}: {e}\n{printed}", b.name));
        assert_eq!(again, spec, "{}", b.name);
        assert_eq!(again.to_string(), printed);
    }
}

fn scalar_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..1000).prop_map(|k| Expr::Num(k as f64 / 8.0)),
        Just(Expr::I),
        prop::sample::select(vec!["t", "x", "y", "z", "eps"]).prop_map(|v| Expr::Var(v.to_string())),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            inner.clone().prop_map(move |a| Expr::Neg(b(a))),
            (inner.clone(), inner.clone()).prop_map(move |(a, c)| Expr::Add(b(a), b(c))),
            (inner.clone(), inner.clone()).prop_map(move |(a, c)| Expr::Sub(b(a), b(c))),
            (inner.clone(), inner.clone()).prop_map(move |(a, c)| Expr::Mul(b(a), b(c))),
            (inner.clone(), inner.clone()).prop_map(move |(a, c)| Expr::Div(b(a), b(c))),
            (inner.clone(), 0u32..5).prop_map(move |(a, k)| Expr::Pow(b(a), k)),
            (inner.clone(), prop::sample::select(vec![Func::Exp, Func::Log, Func::Sin, Func::Cos, Func::Sqrt]))
                .prop_map(move |(a, f)| Expr::Func(f, b(a))),
            inner.prop_map(move |a| Expr::Conj(b(a))),
        ]
    })
}

/// Expressions defined everywhere, so every sample evaluates.
fn entire_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..100).prop_map(|k| Expr::Num(k as f64 / 8.0)),
        Just(Expr::I),
        prop::sample::select(vec!["t", "x", "y", "z", "eps"]).prop_map(|v| Expr::Var(v.to_string())),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let b = |e: Expr| Box::new(e);
        prop_oneof![
            inner.clone().prop_map(move |a| Expr::Neg(b(a))),
            (inner.clone(), inner.clone()).prop_map(move |(a, c)| Expr::Sub(b(a), b(c))),
            (inner.clone(), inner.clone()).prop_map(move |(a, c)| Expr::Mul(b(a), b(c))),
            (inner.clone(), 0u32..4).prop_map(move |(a, k)| Expr::Pow(b(a), k)),
            (inner.clone(), prop::sample::select(vec![Func::Sin, Func::Cos]))
                .prop_map(move |(a, f)| Expr::Func(f, b(a))),
            inner.prop_map(move |a| Expr::Conj(b(a))),
        ]
    })
}

/// Bytes biased towards the grammar's own vocabulary.
fn fuzz_text() -> impl Strategy<Value = String> {
    let piece = prop::sample::select(vec![
        "manifold", "\"h\"", "{", "}", "n", "=", "1", "2", "complex", "coords", "[", "]", "(", ")", ",", "param",
        "theta", "theta1", "density", "d", "conj", "exp", "log", "i", "t", "x", "y", "z", "+", "-", "*", "/", "^",
        "0.5", "1e-3", "\n", " ", "#", "@", "\"", "99999999999999999999",
    ]);
    prop_oneof![
        prop::collection::vec(piece.clone(), 0..60).prop_map(|v| v.join(" ")),
        prop::collection::vec(piece, 0..60).prop_map(|v| v.concat()),
        ".{0,80}",
        // a valid prefix followed by noise
        (0usize..HEADER.len(), ".{0,20}").prop_map(|(k, s)| format!("{}{s}", &HEADER[..k])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn expressions_round_trip(e in scalar_expr()) {
        let spec = with_density(&e.to_string());
        prop_assert_eq!(spec.density().unwrap(), &e);
    }

    #[test]
    fn parser_is_total(text in fuzz_text()) {
        match parse_spec(&text) {
            Ok(spec) => prop_assert_eq!(parse_spec(&spec.to_string()).unwrap(), spec),
            Err(e) => {
                prop_assert!(e.line >= 1 && e.col >= 1);
                prop_assert!(e.line <= text.lines().count().max(1) + 1);
                prop_assert!(!e.msg.is_empty());
            }
        }
    }

    #[test]
    fn evaluation_is_total(e in scalar_expr(), p in prop::array::uniform3(-1.0f64..1.0)) {
        let spec = with_density(&e.to_string());
        let s = JetSpace::new(3, 2);
        // either a value or a typed error, never a panic
        let _ = eval_jet(&spec, &e, &s, &p);
        let _ = eval_point(&spec, &e, &p);
    }

    /// Sums and products re-associated three ways evaluate alike.
    #[test]
    fn balance_does_not_matter(terms in prop::collection::vec(entire_expr(), 2..9), mul in any::<bool>(),
                               p in prop::array::uniform3(-0.5f64..0.5)) {
        let wrap = |e: &Expr| format!("({e})");
        let parts: Vec<String> = terms.iter().map(wrap).collect();
        let op = if mul { "*" } else { "+" };
        let left = parts.iter().skip(1).fold(parts[0].clone(), |acc, t| format!("({acc}){op}{t}"));
        let right = parts.iter().rev().skip(1).fold(parts[parts.len() - 1].clone(), |acc, t| format!("{t}{op}({acc})"));
        fn balanced(ps: &[String], op: &str) -> String {
            if ps.len() == 1 {
                return ps[0].clone();
            }
            let (a, b) = ps.split_at(ps.len() / 2);
            format!("({}){op}({})", balanced(a, op), balanced(b, op))
        }
        let mid = balanced(&parts, op);
        let s = JetSpace::new(3, 3);
        let eval = |text: &str| {
            let spec = with_density(text);
            match eval_jet(&spec, spec.density().unwrap(), &s, &p) {
                Ok(Value::Scalar(j)) => j,
                other => panic!("{text}: {other:?}"),
            }
        };
        let (a, b, c) = (eval(&left), eval(&right), eval(&mid));
        let scale = a.max_abs().max(1.0);
        prop_assert!(a.max_diff(&b) <= 1e-12 * scale, "{:e}", a.max_diff(&b));
        prop_assert!(a.max_diff(&c) <= 1e-12 * scale, "{:e}", a.max_diff(&c));
    }
}

#[test]
fn heisenberg_theta_at_origin() {
    let spec = builtin_spec("heisenberg");
    let s = JetSpace::new(3, 3);
    let Value::Form(cs) = eval_jet(&spec, spec.theta(), &s, &[0.0, 0.0, 0.0]).unwrap() else { panic!() };
    // θ = dt + 2y dx − 2x dy
    assert_eq!(cs[0].max_diff(&s.real(1.0)), 0.0);
    assert!(cs[1].max_diff(&(s.variable(2, 0.0) * 2.0)) < 1e-15);
    assert!(cs[2].max_diff(&(s.variable(1, 0.0) * -2.0)) < 1e-15);
}

#[test]
fn constant_forms_give_constant_jets() {
    let spec = parse_spec("manifold \"c\" { n = 1 coords = [a, b, c] param k = 3 }\ntheta = 2*d(a) - k*d(c)/4\ntheta1 = d(b) + i*d(c)\n").unwrap();
    let s = JetSpace::new(3, 4);
    for p in [[0.0, 0.0, 0.0], [1.5, -2.0, 0.3]] {
        let Value::Form(cs) = eval_jet(&spec, spec.theta(), &s, &p).unwrap() else { panic!() };
        assert_eq!(cs[0].max_diff(&s.real(2.0)), 0.0);
        assert_eq!(cs[1].max_abs(), 0.0);
        assert_eq!(cs[2].max_diff(&s.real(-0.75)), 0.0);
        let Value::Form(cs) = eval_jet(&spec, spec.theta_a(0), &s, &p).unwrap() else { panic!() };
        assert_eq!(cs[2].max_diff(&s.constant(C64::new(0.0, 1.0))), 0.0);
    }
}

#[test]
fn domain_errors_name_the_subexpression() {
    let spec = with_density("exp(t) + log(x - 1)");
    let s = JetSpace::new(3, 2);
    match eval_jet(&spec, spec.density().unwrap(), &s, &[0.0, 0.5, 0.0]) {
        Err(EvalError::Domain { func, expr, .. }) => {
            assert_eq!(func, "log");
            assert_eq!(expr, "log(x - 1)");
        }
        other => panic!("{other:?}"),
    }
    let spec = with_density("1/(x - y)");
    assert!(matches!(eval_point(&spec, spec.density().unwrap(), &[0.0, 0.2, 0.2]), Err(EvalError::DivByZero { .. })));
    assert!(matches!(eval_jet(&spec, spec.density().unwrap(), &s, &[0.0; 2]), Err(EvalError::PointLength { want: 3, got: 2 })));
}

#[test]
fn jets_and_points_agree() {
    let spec = with_density("exp(i*t)*z^2*conj(z) + eps*sqrt(x + 2)");
    let p = [0.3, -0.2, 0.7];
    let s = JetSpace::new(3, 2);
    let Value::Scalar(j) = eval_jet(&spec, spec.density().unwrap(), &s, &p).unwrap() else { panic!() };
    let PointValue::Scalar(v) = eval_point(&spec, spec.density().unwrap(), &p).unwrap() else { panic!() };
    assert!((j.value() - v).norm() < 1e-15);
}

/// Coefficients of the coframe re-expanded about a nearby point match the
/// coefficients evaluated there, up to the truncation the shift leaves exact.
#[test]
fn taylor_shift_on_shipped_specs() {
    const K: usize = 6;
    let delta = [3e-4, -2e-4, 1e-4];
    for b in BUILTINS {
        let spec = builtin_spec(b.name);
        let p: Vec<f64> = b.sample.iter().map(|(lo, hi)| 0.6 * lo + 0.4 * hi).collect();
        let q: Vec<f64> = p.iter().zip(delta).map(|(a, d)| a + d).collect();
        let s = JetSpace::new(3, K);
        let mut exprs = vec![spec.theta(), spec.theta_a(0)];
        exprs.extend(spec.density());
        for e in exprs {
            let (Value::Form(here), Value::Form(there)) = (eval_jet(&spec, e, &s, &p).unwrap(), eval_jet(&spec, e, &s, &q).unwrap()) else {
                let (Value::Scalar(h), Value::Scalar(t)) = (eval_jet(&spec, e, &s, &p).unwrap(), eval_jet(&spec, e, &s, &q).unwrap()) else { panic!() };
                assert!(h.recenter(&delta).truncate(K - 3).max_diff(&t.truncate(K - 3)) <= 1e-8);
                continue;
            };
            for (h, t) in here.iter().zip(&there) {
                let d = h.recenter(&delta).truncate(K - 3).max_diff(&t.truncate(K - 3));
                assert!(d <= 1e-8, "{}: {d:e}", b.name);
            }
        }
    }
}
