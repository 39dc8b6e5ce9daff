use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use helixgeom::catalog::expr::{
    builtin_params, chart_vars, eval_ast, parse_expr, BinOp, Expr, Func,
};
use helixgeom::catalog::{catalog_get, catalog_list, parse_immersion, CatalogEntry, Params};
use helixgeom::curves::frenet;
use helixgeom::flows::integrate_geodesic;
use helixgeom::helix::{estimate_helix_space, is_helix_direction};
use helixgeom::manifold::{
    gauss_split, hypersurface_normal, point_frame, second_fundamental_form, shape_operator,
    ImmersedPatch,
};
use helixgeom::numerics::{Matrix, ToleranceProfile, Vector};
use helixgeom::theorems::{verify, TheoremId, Verdict};
use helixgeom::{GeomError, ParseError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Catalog entry, its parameters, expected dimension and the axes spanning the truth.
type RecoveryCase = (&'static str, Vec<(&'static str, f64)>, usize, Vec<usize>);

type Criterion = (&'static str, fn() -> Outcome, Option<f64>);

fn v(xs: &[f64]) -> Vector {
    Vector::from_column_slice(xs)
}

fn axis(n: usize, i: usize) -> Vector {
    let mut e = Vector::zeros(n);
    e[i] = 1.0;
    e
}

fn entry(name: &str, params: &[(&str, f64)]) -> CatalogEntry {
    let p: Params = params.iter().map(|(k, x)| (k.to_string(), *x)).collect();
    catalog_get(name, &p).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// Richardson-extrapolated finite differences, independent of the library stencils.

fn jacobian_oracle(patch: &ImmersedPatch, u: &Vector) -> Matrix {
    let m = patch.param_dim();
    let d = |j: usize, h: f64| {
        let e = axis(m, j) * h;
        (patch.evaluate(&(u + &e)).unwrap() - patch.evaluate(&(u - &e)).unwrap()) / (2.0 * h)
    };
    let cols: Vec<Vector> = (0..m)
        .map(|j| {
            let (h1, h2) = (1.0 / 256.0, 1.0 / 512.0);
            (d(j, h2) * 4.0 - d(j, h1)) / 3.0
        })
        .collect();
    Matrix::from_columns(&cols)
}

fn mixed_oracle(patch: &ImmersedPatch, u: &Vector, x: &Vector, y: &Vector) -> Vector {
    let f = |p: Vector| patch.evaluate(&p).unwrap();
    let d = |h: f64| {
        let (a, b) = (x * h, y * h);
        (f(u + &a + &b) - f(u + &a - &b) - f(u - &a + &b) + f(u - &a - &b)) / (4.0 * h * h)
    };
    let (h1, h2) = (1.0 / 32.0, 1.0 / 64.0);
    (d(h2) * 4.0 - d(h1)) / 3.0
}

fn criterion_1() -> Outcome {
    let names: Vec<&str> = catalog_list().into_iter().map(|e| e.name).collect();
    let entries: Vec<CatalogEntry> = names.iter().map(|n| entry(n, &[])).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut proj, mut gauss, mut weing) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..200 {
        let e = &entries[k % entries.len()];
        let patch = &e.patch;
        let (m, n) = (patch.param_dim(), patch.ambient_dim());
        let b = patch.sample_box();
        let u = Vector::from_fn(m, |i, _| rng.random_range(b.lower()[i]..b.upper()[i]));
        let x = Vector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
        let y = Vector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));

        let frame = point_frame(patch, &u).map_err(|e| e.to_string())?;
        let j = jacobian_oracle(patch, &u);
        let g = j.transpose() * &j;
        let p_true = &j * g.try_inverse().unwrap() * j.transpose();
        let p = &frame.p_tan;
        proj = proj
            .max((p - &p_true).amax())
            .max((p * p - p).amax())
            .max((p + frame.p_norm() - Matrix::identity(n, n)).amax());

        let (tan, nor) = gauss_split(patch, &u, &x, &y).map_err(|e| e.to_string())?;
        let full = mixed_oracle(patch, &u, &x, &y);
        gauss = gauss
            .max((&tan + &nor - &full).amax())
            .max((&nor - (&full - &p_true * &full)).amax());

        let normal = hypersurface_normal(patch, &u).map_err(|e| e.to_string())?;
        let so = shape_operator(patch, &u, &normal).map_err(|e| e.to_string())?;
        let vxy = second_fundamental_form(patch, &u, &x, &y).map_err(|e| e.to_string())?;
        let (xa, ya) = (&frame.jacobian * &x, &frame.jacobian * &y);
        weing = weing
            .max((so.apply(&xa).dot(&ya) - vxy.dot(&normal)).abs())
            .max((so.apply(&xa).dot(&ya) - full.dot(&normal)).abs());
    }
    let detail = format!("projector {proj:.1e}, gauss {gauss:.1e}, weingarten {weing:.1e}");
    ensure(proj <= 1e-6 && gauss <= 1e-6 && weing <= 1e-6, || detail.clone())?;
    Ok(detail)
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for (name, want) in [("sphere", [-1.0, -1.0]), ("cylinder", [-1.0, 0.0])] {
        let e = entry(name, &[]);
        for u in e.patch.default_samples().iter().step_by(7) {
            let n = hypersurface_normal(&e.patch, u).map_err(|e| e.to_string())?;
            let p = e.patch.evaluate(u).unwrap();
            let radial = Vector::from_fn(3, |i, _| if name == "cylinder" && i == 2 { 0.0 } else { p[i] });
            ensure(n.dot(&radial) > 0.0, || format!("{name}: normal not outward"))?;
            let so = shape_operator(&e.patch, u, &n).map_err(|e| e.to_string())?;
            for (k, w) in so.principal_curvatures.iter().zip(want) {
                worst = worst.max((k - w).abs());
            }
        }
    }
    ensure(worst <= 1e-6, || format!("principal curvature error {worst:.1e}"))?;

    let helix = entry("cylinder", &[]).curve("helix", &BTreeMap::new()).unwrap().ambient();
    let tol = ToleranceProfile::default();
    let (t0, t1) = helix.t_range();
    let mut kerr = 0.0f64;
    for i in 0..16 {
        let t = t0 + (t1 - t0) * (i as f64 + 0.5) / 16.0;
        let fa = frenet(&helix, t, 3, &tol).map_err(|e| e.to_string())?;
        kerr = kerr.max((fa.curvatures[0] - 0.5).abs()).max((fa.curvatures[1] - 0.5).abs());
    }
    ensure(kerr <= 1e-4, || format!("helix curvature error {kerr:.1e}"))?;
    Ok(format!("principal {worst:.1e}, helix k1/k2 {kerr:.1e}"))
}

fn span_overlap(basis: &Matrix, truth: &[Vector]) -> f64 {
    let t = Matrix::from_columns(truth);
    (basis.transpose() * t).determinant().abs()
}

fn criterion_3() -> Outcome {
    let cases: Vec<RecoveryCase> = vec![
        ("plane", vec![], 3, vec![]),
        ("cylinder", vec![], 1, vec![2]),
        ("cone", vec![("beta", FRAC_PI_4)], 1, vec![2]),
        ("sphere", vec![], 0, vec![]),
        ("torus_product", vec![], 2, vec![2, 3]),
    ];
    let mut parts = Vec::new();
    for (name, params, dim, axes) in cases {
        let e = entry(name, &params);
        let per_axis = if e.patch.param_dim() == 3 { 4 } else { 8 };
        let samples = e.patch.sample_box().grid(per_axis);
        ensure(samples.len() == 64, || format!("{name}: {} samples", samples.len()))?;
        let start = Instant::now();
        let space = estimate_helix_space(&e.patch, &samples, 1e-6).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        ensure(space.basis.dim() == dim, || format!("{name}: dim {}", space.basis.dim()))?;
        if !axes.is_empty() {
            let n = e.patch.ambient_dim();
            let truth: Vec<Vector> = axes.iter().map(|&i| axis(n, i)).collect();
            let overlap = span_overlap(space.basis.basis(), &truth);
            ensure(overlap >= 0.999, || format!("{name}: overlap {overlap}"))?;
        }
        ensure(secs < 1.0, || format!("{name}: {secs:.2} s"))?;
        parts.push(format!("{name} {dim} ({secs:.2} s)"));
    }
    Ok(parts.join(", "))
}

fn criterion_4() -> Outcome {
    let e = entry("cone", &[("beta", FRAC_PI_4)]);
    let samples = e.patch.default_samples();
    ensure(samples.len() == 64, || format!("{} samples", samples.len()))?;
    let r = is_helix_direction(&e.patch, &axis(3, 2), &samples, 1e-6).map_err(|e| e.to_string())?;
    let err = (r.mean - FRAC_PI_4).abs();
    ensure(err <= 1e-5 && r.spread <= 1e-6, || format!("mean error {err:.1e}, spread {:.1e}", r.spread))?;
    Ok(format!("angle error {err:.1e}, spread {:.1e}", r.spread))
}

fn helix_point(a: f64, b: f64, t: f64) -> Vector {
    v(&[(a * t).cos(), (a * t).sin(), b * t])
}

fn criterion_5() -> Outcome {
    let cyl = entry("cylinder", &[]);
    let (a, b) = (FRAC_1_SQRT_2, FRAC_1_SQRT_2);
    let r = integrate_geodesic(cyl.patch.clone(), &v(&[0.0, 0.0]), &v(&[a, b]), 10.0, 1e-3)
        .map_err(|e| e.to_string())?;
    let end = cyl.patch.evaluate(r.points.us.last().unwrap()).unwrap();
    let end_err = (end - helix_point(a, b, 10.0)).norm();
    let mut drift = 0.0f64;
    for (u, x) in r.points.us.iter().zip(&r.points.vs) {
        let f = point_frame(&cyl.patch, u).unwrap();
        drift = drift.max(((&f.jacobian * x).norm() - 1.0).abs());
    }

    let chart = Arc::new(parse_immersion("cos(u1), sin(u1), sinh(u2)", 2, 3).unwrap());
    let err = |h: f64| -> Result<f64, String> {
        let r = integrate_geodesic(chart.clone(), &v(&[0.0, 0.0]), &v(&[1.0, 1.0]), 10.0, h)
            .map_err(|e| e.to_string())?;
        let end = chart.evaluate(r.points.us.last().unwrap()).unwrap();
        Ok((end - helix_point(a, b, 10.0)).norm())
    };
    let ratio = err(0.1)? / err(0.05)?;
    let detail = format!("endpoint {end_err:.1e}, halving ratio {ratio:.1}, speed drift {drift:.1e}");
    ensure(end_err <= 1e-5 && ratio >= 8.0 && drift <= 1e-6, || detail.clone())?;
    Ok(detail)
}

fn report(
    name: &str,
    params: &[(&str, f64)],
    curve: &str,
    curve_params: &[(&str, f64)],
    d: &Vector,
    id: TheoremId,
) -> Result<helixgeom::theorems::TheoremReport, String> {
    let cp: Params = curve_params.iter().map(|(k, x)| (k.to_string(), *x)).collect();
    let pc = entry(name, params).curve(curve, &cp).map_err(|e| e.to_string())?;
    verify(id, &pc, d, &pc.sample_ts(16), &ToleranceProfile::default()).map_err(|e| e.to_string())
}

fn verified(r: &helixgeom::theorems::TheoremReport, what: &str) -> Result<(), String> {
    ensure(r.verdict == Verdict::Verified, || format!("{what}: {:?}", r.verdict))
}

fn criterion_6() -> Outcome {
    let e3 = axis(3, 2);
    for (name, want) in [("cone", FRAC_PI_4.cos()), ("cylinder", 1.0)] {
        let r = report(name, &[], "u_circle", &[], &e3, TheoremId::T31)?;
        verified(&r, &format!("3.1 {name}"))?;
        let got = r.conclusion.residual;
        ensure((got - want).abs() <= 1e-4, || format!("3.1 {name}: distance {got}"))?;
    }
    for alpha in [0.3, 0.6, FRAC_PI_4, 1.0, 1.3] {
        let r = report("cylinder", &[], "helix", &[("alpha", alpha)], &e3, TheoremId::T32)?;
        verified(&r, &format!("3.2 alpha={alpha}"))?;
        ensure(r.conclusion.residual <= 1e-5, || format!("3.2 alpha={alpha}: spread {}", r.conclusion.residual))?;
    }
    let r = report("product_s1_r3", &[], "flat_helix", &[], &axis(5, 4), TheoremId::T33)?;
    verified(&r, "3.3 flat helix")?;
    for beta in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let r = report("cone", &[("beta", beta)], "u_circle", &[], &e3, TheoremId::T35)?;
        verified(&r, &format!("3.5 beta={beta}"))?;
        ensure(r.conclusion.residual <= 1e-6, || format!("3.5 beta={beta}: |<T,d>| {}", r.conclusion.residual))?;
    }
    verified(&report("cone", &[], "u_circle", &[], &e3, TheoremId::T36)?, "3.6 cone")?;
    let diag = v(&[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2]);
    verified(&report("plane", &[], "circle", &[], &diag, TheoremId::T36)?, "3.6 plane")?;

    for id in [TheoremId::T32, TheoremId::T33, TheoremId::T35, TheoremId::T36] {
        let r = report("sphere", &[], "equator", &[], &e3, id)?;
        ensure(r.verdict == Verdict::PremiseFailed, || format!("sphere control {id}: {:?}", r.verdict))?;
    }
    for psi in [0.3, FRAC_PI_4, 1.2] {
        let r = report("cone", &[], "spiral", &[("psi", psi)], &e3, TheoremId::T36)?;
        ensure(r.verdict == Verdict::PremiseFailed, || format!("spiral control psi={psi}: {:?}", r.verdict))?;
    }

    let tol = ToleranceProfile::default();
    let (mut runs, mut falsified) = (0usize, Vec::new());
    for info in catalog_list() {
        let e = entry(info.name, &[]);
        let n = e.patch.ambient_dim();
        let mut dirs: Vec<Vector> = (0..n).map(|i| axis(n, i)).collect();
        dirs.push(Vector::from_fn(n, |i, _| 1.0 + i as f64).normalize());
        for cname in e.curve_names() {
            let pc = e.curve(cname, &BTreeMap::new()).unwrap();
            let ts = pc.sample_ts(12);
            for d in &dirs {
                for id in TheoremId::ALL {
                    runs += 1;
                    if let Ok(r) = verify(id, &pc, d, &ts, &tol) {
                        if r.verdict == Verdict::Falsified {
                            falsified.push(format!("{}/{cname}/{id}", info.name));
                        }
                    }
                }
            }
        }
    }
    ensure(falsified.is_empty(), || format!("FALSIFIED: {}", falsified.join(", ")))?;
    Ok(format!("fixtures verified, controls fail premises, {runs} grid runs without FALSIFIED"))
}

enum Want {
    Value(f64),
    Syntax(usize),
    Unknown(usize),
    Arity(usize),
    Domain,
}

fn conformance(text: &str, u: &[f64], want: &Want) -> Result<(), String> {
    let vars = chart_vars(u.len().max(1));
    let params = builtin_params();
    let ok = match (want, parse_expr(text, &vars, &params)) {
        (Want::Value(x), Ok(e)) => eval_ast(&e, u, &params).is_ok_and(|y| (y - x).abs() <= 1e-12 * (1.0 + x.abs())),
        (Want::Domain, Ok(e)) => matches!(eval_ast(&e, u, &params), Err(GeomError::NumericalDomain { .. })),
        (Want::Syntax(p), Err(ParseError::SyntaxError { position, .. })) => position == *p,
        (Want::Unknown(p), Err(ParseError::UnknownIdentifier { position, .. })) => position == *p,
        (Want::Arity(p), Err(ParseError::ArityError { position, .. })) => position == *p,
        _ => false,
    };
    ensure(ok, || format!("conformance case {text:?}"))
}

fn random_ast(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    let leaf = depth == 0 || rng.random_bool(0.3);
    if leaf {
        return match rng.random_range(0..3) {
            0 => Expr::Const(rng.random_range(0.0..10.0)),
            1 => Expr::Var(rng.random_range(0..2)),
            _ => Expr::Param("pi".into()),
        };
    }
    match rng.random_range(0..3) {
        0 => Expr::Neg(Box::new(random_ast(rng, depth - 1))),
        1 => Expr::Call {
            func: Func::ALL[rng.random_range(0..Func::ALL.len())],
            arg: Box::new(random_ast(rng, depth - 1)),
            position: 0,
        },
        _ => Expr::Binary {
            op: [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow][rng.random_range(0..5)],
            lhs: Box::new(random_ast(rng, depth - 1)),
            rhs: Box::new(random_ast(rng, depth - 1)),
            position: 0,
        },
    }
}

fn criterion_7() -> Outcome {
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
        ("0.5 * 4", vec![], Value(2.0)),
        ("sqrt(u1)", vec![4.0], Value(2.0)),
        ("u1 * u2", vec![3.0, 4.0], Value(12.0)),
        ("sin(pi / 2)", vec![], Value(1.0)),
        ("exp(log(u1))", vec![7.0], Value(7.0)),
        ("cosh(0) + sinh(0) + tan(0)", vec![], Value(1.0)),
        ("u1 ^ 0.5", vec![9.0], Value(3.0)),
        ("(-2) ^ 3", vec![], Value(-8.0)),
        ("cos(u1) * cos(u1) + sin(u1) ^ 2", vec![0.7], Value(1.0)),
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
        ("sqrt(u1 - 2)", vec![1.0], Domain),
    ];
    ensure(cases.len() == 30, || format!("{} cases", cases.len()))?;
    for (text, u, want) in &cases {
        conformance(text, u, want)?;
    }

    let vars = chart_vars(2);
    let params = builtin_params();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut compared = 0usize;
    for _ in 0..100 {
        let ast = random_ast(&mut rng, 5);
        let text = ast.pretty(&vars).to_string();
        let back = parse_expr(&text, &vars, &params).map_err(|e| format!("{text}: {e}"))?;
        ensure(back.pretty(&vars).to_string() == text, || format!("round trip changed {text}"))?;
        for _ in 0..5 {
            let u = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
            match (eval_ast(&ast, &u, &params), eval_ast(&back, &u, &params)) {
                (Ok(x), Ok(y)) => {
                    ensure((x - y).abs() <= 1e-12 * (1.0 + x.abs()) || (x.is_nan() && y.is_nan()), || {
                        format!("{text}: {x} vs {y}")
                    })?;
                    compared += 1;
                }
                (Err(_), Err(_)) => {}
                (x, y) => return Err(format!("{text}: {x:?} vs {y:?}")),
            }
        }
    }
    Ok(format!("30 grammar cases, 100 round trips ({compared} evaluations agree)"))
}

const SCRIPT: &[(&[&str], i32)] = &[
    (&["catalog", "list"], 0),
    (&["frenet", "--expr", "cos(t), sin(t), t", "--t-range", "0, 2*pi"], 0),
    (&["frenet", "--curve", "cone/spiral", "--order", "3", "--samples", "6"], 0),
    (&["frenet", "--expr", "t, 0, 0", "--t-range", "0, 1"], 3),
    (&["frenet", "--expr", "cos(", "--t-range", "0, 1"], 2),
    (&["helix-space", "--surface", "cylinder"], 0),
    (&["helix-space", "--surface", "cone", "--seed", "42"], 0),
    (&["helix-space", "--surface", "sphere"], 0),
    (&["helix-space", "--surface", "plane"], 0),
    (&["helix-space", "--surface", "torus_product"], 0),
    (&["helix-space", "--immersion", "u1, u1, u2*0", "--m", "2"], 4),
    (&["verify", "--theorem", "3.1", "--surface", "cone", "--curve", "u_circle", "--direction", "e3"], 0),
    (&["verify", "--theorem", "3.2", "--surface", "cylinder", "--curve", "helix", "--direction", "e3"], 0),
    (&["verify", "--theorem", "3.3", "--surface", "cylinder", "--curve", "u_circle", "--direction", "e3"], 5),
    (&["verify", "--theorem", "3.5", "--surface", "cone", "--curve", "u_circle", "--direction", "(0, 0, 1)"], 0),
    (&["verify", "--theorem", "3.6", "--surface", "cone", "--curve", "spiral", "--direction", "e3"], 5),
    (&["trace", "--surface", "cylinder", "--kind", "geodesic", "--start", "0, 0", "--dir", "1, 1", "--length", "10", "--step", "1e-3"], 0),
    (&["trace", "--surface", "cone", "--kind", "curvline", "--start", "0.5, 1", "--eig", "1", "--length", "0.5"], 0),
    (&["trace", "--surface", "sphere", "--kind", "curvline", "--start", "0, 0.3", "--length", "1"], 4),
    (&["trace", "--surface", "plane", "--kind", "geodesic", "--start", "0, 0", "--dir", "1, 2", "--length", "1", "--step", "0.25"], 0),
];

fn run_script() -> Result<Vec<u8>, String> {
    let mut transcript = Vec::new();
    for (args, want) in SCRIPT {
        let out = Command::new(env!("CARGO_BIN_EXE_helixgeom"))
            .args(*args)
            .output()
            .map_err(|e| e.to_string())?;
        let code = out.status.code().unwrap_or(-1);
        ensure(code == *want, || format!("{}: exit {code}, expected {want}", args.join(" ")))?;
        transcript.extend_from_slice(format!("$ {}\n[exit {code}]\n", args.join(" ")).as_bytes());
        transcript.extend_from_slice(&out.stdout);
        transcript.extend_from_slice(&out.stderr);
    }
    Ok(transcript)
}

fn criterion_8() -> Outcome {
    let first = run_script()?;
    let second = run_script()?;
    ensure(first == second, || "transcripts differ".to_string())?;
    Ok(format!("{} commands, {} identical bytes", SCRIPT.len(), first.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("frame correctness", criterion_1, Some(5.0)),
        ("curvature oracles", criterion_2, None),
        ("helix-space recovery", criterion_3, None),
        ("constant-angle check", criterion_4, None),
        ("geodesic integrator", criterion_5, None),
        ("theorem suite", criterion_6, Some(30.0)),
        ("parser", criterion_7, None),
        ("determinism", criterion_8, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(lim)) if secs >= *lim => Err(format!("took {secs:.2} s, limit {lim} s")),
            (o, _) => o,
        };
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} {tag} {name}: {detail} [{secs:.2} s]", i + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
