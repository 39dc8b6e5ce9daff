use std::collections::BTreeMap;

use helixgeom::catalog::expr::{
    builtin_params, chart_vars, eval_ast, parse_expr, parse_list, BinOp, Expr, Func,
};
use helixgeom::{GeomError, ParseError};
use proptest::prelude::*;

enum Want {
    Value(f64),
    Syntax(usize),
    Unknown(usize),
    Arity(usize),
    Domain,
}

fn check(text: &str, u: &[f64], want: Want) {
    let vars = chart_vars(u.len().max(1));
    let params = builtin_params();
    let parsed = parse_expr(text, &vars, &params);
    match (want, parsed) {
        (Want::Value(v), Ok(e)) => {
            let got = eval_ast(&e, u, &params).unwrap();
            assert!((got - v).abs() <= 1e-12 * (1.0 + v.abs()), "{text}: {got} != {v}");
        }
        (Want::Domain, Ok(e)) => {
            assert!(
                matches!(eval_ast(&e, u, &params), Err(GeomError::NumericalDomain { .. })),
                "{text}: expected a domain fault"
            );
        }
        (Want::Syntax(p), Err(ParseError::SyntaxError { position, expected })) => {
            assert_eq!(position, p, "{text}");
            assert!(!expected.is_empty());
        }
        (Want::Unknown(p), Err(ParseError::UnknownIdentifier { position, .. })) => assert_eq!(position, p, "{text}"),
        (Want::Arity(p), Err(ParseError::ArityError { position, .. })) => assert_eq!(position, p, "{text}"),
        (_, other) => panic!("{text}: unexpected {other:?}"),
    }
}

#[test]
fn grammar_conformance() {
    use Want::*;
    let cases: Vec<(&str, Vec<f64>, Want)> = vec![
        ("3", vec![], Value(3.0)),
        ("1 + 2 * 3", vec![], Value(7.0)),
        ("(1 + 2) * 3", vec![], Value(9.0)),
        ("10 - 4 - 3", vec![], Value(3.0)),
        ("2 ^ 3 ^ 2", vec![], Value(512.0)),
        ("-3 + 5", vec![], Value(2.0)),
        ("--2", vec![], Value(2.0)),
        ("2 * -3", vec![], Value(-6.0)),
        ("1.5e1", vec![], Value(15.0)),
        ("2.5E-1", vec![], Value(0.25)),
        (".5", vec![], Value(0.5)),
        ("sqrt(u1)", vec![4.0], Value(2.0)),
        ("u1 * u2", vec![3.0, 4.0], Value(12.0)),
        ("sin(pi / 2)", vec![], Value(1.0)),
        ("exp(log(u1))", vec![7.0], Value(7.0)),
        ("cosh(0) + sinh(0) + tan(0)", vec![], Value(1.0)),
        ("u1 ^ 0.5", vec![9.0], Value(3.0)),
        ("(-2) ^ 3", vec![], Value(-8.0)),
        ("  u1   +u2 ", vec![1.0, 2.0], Value(3.0)),
        ("cos(", vec![], Syntax(5)),
        ("2u1", vec![1.0], Syntax(2)),
        ("1 +", vec![], Syntax(4)),
        ("(1 + 2", vec![], Syntax(7)),
        ("1 $ 2", vec![], Syntax(3)),
        ("sin u1", vec![1.0], Syntax(5)),
        ("foo(1)", vec![], Unknown(1)),
        ("u1 + v", vec![1.0], Unknown(6)),
        ("cos(u1, u2)", vec![0.0, 0.0], Arity(4)),
        ("log(u1)", vec![0.0], Domain),
        ("1 / (u1 - 1)", vec![1.0], Domain),
    ];
    assert_eq!(cases.len(), 30);
    for (text, u, want) in cases {
        check(text, &u, want);
    }
}

#[test]
fn component_lists() {
    let vars = chart_vars(2);
    let items = parse_list("u1, u2, u1*u2", &vars, &BTreeMap::new()).unwrap();
    assert_eq!(items.len(), 3);
    assert!(matches!(
        parse_expr("1, 2", &vars, &BTreeMap::new()),
        Err(ParseError::ComponentCountMismatch { expected: 1, found: 2 })
    ));
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0.0f64..10.0).prop_map(Expr::Const),
        (0usize..2).prop_map(Expr::Var),
        Just(Expr::Param("pi".into())),
    ]
}

fn ast() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (0usize..8, inner.clone()).prop_map(|(f, e)| Expr::Call {
                func: Func::ALL[f],
                arg: Box::new(e),
                position: 0,
            }),
            (0usize..5, inner.clone(), inner).prop_map(|(o, l, r)| Expr::Binary {
                op: [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow][o],
                lhs: Box::new(l),
                rhs: Box::new(r),
                position: 0,
            }),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pretty_print_round_trips(e in ast(), pts in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 5)) {
        let vars = chart_vars(2);
        let params = builtin_params();
        let text = e.pretty(&vars).to_string();
        let back = parse_expr(&text, &vars, &params).unwrap();
        prop_assert_eq!(back.pretty(&vars).to_string(), text.clone());
        for (a, b) in pts {
            let x = eval_ast(&e, &[a, b], &params);
            let y = eval_ast(&back, &[a, b], &params);
            match (x, y) {
                (Ok(x), Ok(y)) => prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()), "{} vs {}", x, y),
                (Err(_), Err(_)) => {}
                (x, y) => prop_assert!(false, "{}: {:?} vs {:?}", text, x, y),
            }
        }
    }
}
