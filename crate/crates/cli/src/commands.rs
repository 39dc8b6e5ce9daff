use std::fmt::Write as _;
use std::path::PathBuf;

use helixgeom::catalog::{catalog_get, catalog_list as entries, parse_curve, Params};
use helixgeom::curves::{frenet as frenet_at, reparametrize_unit_speed, AmbientCurve, ParamCurve};
use helixgeom::flows::{
    integrate_curvature_line, integrate_geodesic, trace_curvature_line, trace_geodesic,
};
use helixgeom::helix::{estimate_helix_space, helix_angle_of};
use helixgeom::manifold::hypersurface_normal_field;
use helixgeom::numerics::{ToleranceProfile, Vector};
use helixgeom::theorems::{verify as verify_theorem, TheoremId, Verdict};
use helixgeom::GeomError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::input::{self, CliError, CliResult, Surface};
use crate::render::{self, cell, num};
use crate::{FrenetArgs, HelixSpaceArgs, TraceArgs, TraceKind, VerifyArgs};

const ARCLENGTH_SAMPLES: usize = 1024;

fn emit(output: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn envelope(config: Value, result: Value) -> Value {
    json!({
        "tool_version": env!("CARGO_PKG_VERSION"),
        "config_echo": config,
        "result": result,
    })
}

fn tol_echo(tol: &ToleranceProfile) -> CliResult<Value> {
    serde_json::to_value(tol).map_err(|e| CliError::usage(e.to_string()))
}

fn params_echo(p: &Params) -> Value {
    Value::Object(p.iter().map(|(k, v)| (k.clone(), num(*v))).collect())
}

fn vec_echo(v: &Vector) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

fn parse_flag_error(flag: &str, text: &str, e: GeomError) -> CliError {
    match e {
        GeomError::Parse(pe) => CliError::parse(flag, text, pe),
        other => other.into(),
    }
}

fn cell_centred(range: (f64, f64), count: usize) -> Vec<f64> {
    let (a, b) = range;
    (0..count)
        .map(|i| a + (b - a) * (i as f64 + 0.5) / count as f64)
        .collect()
}

pub fn catalog_list() -> CliResult<u8> {
    let header = ["name", "params", "m", "n", "helix_dim", "curves"];
    let rows: Vec<[String; 6]> = entries()
        .into_iter()
        .map(|e| {
            let params = if e.params.is_empty() {
                "-".to_string()
            } else {
                e.params
                    .iter()
                    .map(|p| format!("{}={}", p.name, p.default))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            [
                e.name.to_string(),
                params,
                e.param_dim.to_string(),
                e.ambient_dim.to_string(),
                e.helix_dim.map_or("?".to_string(), |d| d.to_string()),
                e.curves.join(","),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(widths).enumerate() {
            if i + 1 == cells.len() {
                s.push_str(c);
            } else {
                let _ = write!(s, "{c:<w$}  ");
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for row in &rows {
        line(row.iter().map(String::as_str).collect());
    }
    print!("{out}");
    Ok(0)
}

pub fn frenet(a: &FrenetArgs) -> CliResult<u8> {
    let tol = input::tolerances(&a.common.tols)?;
    if a.order == 0 || a.samples == 0 {
        return Err(CliError::usage("--order and --samples must be positive"));
    }
    let (curve, range): (AmbientCurve, (f64, f64)) = match (&a.curve, &a.expr) {
        (Some(spec), None) => {
            let (entry, name) = spec
                .split_once('/')
                .ok_or_else(|| CliError::usage("--curve expects ENTRY/CURVE"))?;
            let e = catalog_get(entry, &input::params("--param", &a.params)?)?;
            let pc = e.curve(name, &input::params("--curve-param", &a.curve_params)?)?;
            let range = match &a.t_range {
                Some(t) => input::range("--t-range", t)?,
                None => pc.t_range(),
            };
            (pc.ambient(), range)
        }
        (None, Some(text)) => {
            let t = a
                .t_range
                .as_deref()
                .ok_or_else(|| CliError::usage("--expr needs --t-range"))?;
            let (t0, t1) = input::range("--t-range", t)?;
            let raw = parse_curve(text, &Params::new(), t0, t1)
                .map_err(|e| parse_flag_error("--expr", text, e))?;
            let c = reparametrize_unit_speed(&raw, ARCLENGTH_SAMPLES)?;
            let r = c.t_range();
            (c, r)
        }
        _ => return Err(CliError::usage("give exactly one of --curve or --expr")),
    };
    let n = curve.eval(range.0)?.len();
    if a.order > n {
        return Err(CliError::usage(format!("--order {} exceeds the ambient dimension {n}", a.order)));
    }

    let mut out = String::from("t");
    for i in 1..=a.order {
        for j in 1..=n {
            let _ = write!(out, ",V{i}_{j}");
        }
    }
    for i in 1..a.order {
        let _ = write!(out, ",k{i}");
    }
    out.push('\n');

    let mut degenerate: Option<(f64, usize)> = None;
    for t in cell_centred(range, a.samples) {
        let (frame, curvatures, rank) = match frenet_at(&curve, t, a.order, &tol) {
            Ok(fa) => (fa.frame, fa.curvatures, fa.rank),
            Err(GeomError::DegenerateFrame { rank, .. }) => (Vec::new(), Vec::new(), rank),
            Err(e) => {
                emit(&a.common.output, &out)?;
                return Err(e.into());
            }
        };
        if rank < a.order && degenerate.is_none() {
            degenerate = Some((t, rank));
        }
        out.push_str(&cell(t));
        for i in 0..a.order {
            for j in 0..n {
                out.push(',');
                if let Some(v) = frame.get(i) {
                    out.push_str(&cell(v[j]));
                }
            }
        }
        for i in 0..a.order - 1 {
            out.push(',');
            if let Some(k) = curvatures.get(i) {
                out.push_str(&cell(*k));
            }
        }
        out.push('\n');
    }
    emit(&a.common.output, &out)?;
    if let Some((t, rank)) = degenerate {
        eprintln!(
            "note: Frenet frame degenerate at t = {t}: rank {rank} < order {}; missing cells left empty",
            a.order
        );
        return Ok(3);
    }
    Ok(0)
}

fn surface_of(s: &crate::SurfaceArgs) -> CliResult<Surface> {
    input::surface(
        s.surface.as_deref(),
        &s.params,
        s.immersion.as_deref(),
        s.m,
        s.n,
        s.domain.as_deref(),
    )
}

pub fn helix_space(a: &HelixSpaceArgs) -> CliResult<u8> {
    let tol = input::tolerances(&a.common.tols)?;
    let surface = surface_of(&a.surface)?;
    let patch = surface.patch();
    let m = patch.param_dim();
    let per_axis = match a.samples {
        Some(0) => return Err(CliError::usage("--samples must be positive")),
        Some(k) => k,
        None => {
            let mut k = 8usize;
            while k > 1 && k.pow(m as u32) > 512 {
                k -= 1;
            }
            k
        }
    };
    let bx = patch.sample_box();
    let mut samples = bx.grid(per_axis);
    if a.seed != 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        for u in &mut samples {
            for i in 0..m {
                let (lo, hi) = (bx.lower()[i], bx.upper()[i]);
                let w = (hi - lo) / per_axis as f64;
                u[i] = (u[i] + w * rng.random_range(-0.25..0.25)).clamp(lo, hi);
            }
        }
    }
    let space = estimate_helix_space(patch, &samples, tol.helix_spread)?;
    let mut basis = Vec::new();
    let mut angles = Vec::new();
    for d in space.basis.vectors() {
        let (mean, sd) = helix_angle_of(&space, patch, &d)?;
        basis.push(vec_echo(&d));
        angles.push(json!({ "mean": num(mean), "stddev": num(sd) }));
    }
    let config = json!({
        "command": "helix-space",
        "surface": surface.echo(),
        "samples_per_axis": per_axis,
        "seed": a.seed,
        "tolerances": tol_echo(&tol)?,
    });
    let result = json!({
        "dim": space.basis.dim(),
        "basis": basis,
        "residual": num(space.residual),
        "angles": angles,
        "sample_count": space.sample_count,
    });
    emit(&a.common.output, &render::json(&envelope(config, result)))?;
    Ok(0)
}

pub fn verify(a: &VerifyArgs) -> CliResult<u8> {
    let tol = input::tolerances(&a.common.tols)?;
    let id = TheoremId::parse(a.theorem.trim()).ok_or_else(|| {
        CliError::usage(format!("unknown theorem {:?}; expected 3.1, 3.2, 3.3, 3.5 or 3.6", a.theorem))
    })?;
    if a.samples == 0 {
        return Err(CliError::usage("--samples must be positive"));
    }
    let surface = surface_of(&a.surface)?;
    let patch = surface.patch().clone();
    let (pc, curve_echo): (ParamCurve, Value) = match (&a.curve, &a.chart_curve) {
        (Some(name), None) => {
            let Surface::Catalog(entry) = &surface else {
                return Err(CliError::usage("--curve needs a catalog --surface; use --chart-curve"));
            };
            let cp = input::params("--curve-param", &a.curve_params)?;
            let pc = entry.curve(name, &cp)?;
            (pc, json!({ "catalog": name, "params": params_echo(&cp) }))
        }
        (None, Some(text)) => {
            let t = a
                .t_range
                .as_deref()
                .ok_or_else(|| CliError::usage("--chart-curve needs --t-range"))?;
            let (t0, t1) = input::range("--t-range", t)?;
            let uc = parse_curve(text, &Params::new(), t0, t1)
                .map_err(|e| parse_flag_error("--chart-curve", text, e))?;
            let m = patch.param_dim();
            let found = uc.eval(t0)?.len();
            if found != m {
                return Err(GeomError::DimensionMismatch { expected: m, found }.into());
            }
            let pc = ParamCurve::new(patch.clone(), move |t| uc.eval(t), t0, t1)
                .unit_speed(ARCLENGTH_SAMPLES)?;
            (pc, json!({ "chart_curve": text, "t_range": [num(t0), num(t1)] }))
        }
        _ => return Err(CliError::usage("give exactly one of --curve or --chart-curve")),
    };
    let d = input::direction(&a.direction, patch.ambient_dim())?;
    let ts = pc.sample_ts(a.samples);
    let report = verify_theorem(id, &pc, &d, &ts, &tol)?;
    let config = json!({
        "command": "verify",
        "theorem": id.as_str(),
        "surface": surface.echo(),
        "curve": curve_echo,
        "direction": vec_echo(&d),
        "samples": a.samples,
        "tolerances": tol_echo(&tol)?,
    });
    let result = serde_json::to_value(&report).map_err(|e| CliError::usage(e.to_string()))?;
    emit(&a.common.output, &render::json(&envelope(config, result)))?;
    Ok(match report.verdict {
        Verdict::Verified => 0,
        Verdict::PremiseFailed => 5,
        Verdict::Falsified => 6,
    })
}

pub fn trace(a: &TraceArgs) -> CliResult<u8> {
    let surface = surface_of(&a.surface)?;
    let patch = surface.patch().clone();
    let m = patch.param_dim();
    let u0 = input::point("--start", &a.start, m)?;
    let length = input::number("--length", &a.length)?;
    let step = input::number("--step", &a.step)?;
    if !(length > 0.0 && step > 0.0 && length.is_finite()) {
        return Err(CliError::usage("--length and --step must be positive"));
    }
    let (outcome, points) = match a.kind {
        TraceKind::Geodesic => {
            let dir = a
                .dir
                .as_deref()
                .ok_or_else(|| CliError::usage("--kind geodesic needs --dir"))?;
            let v0 = input::point("--dir", dir, m)?;
            match integrate_geodesic(patch.clone(), &u0, &v0, length, step) {
                Ok(r) => (Ok(r.max_defect), r.points),
                Err(e) => (Err(e), trace_geodesic(&patch, &u0, &v0, length, step).points),
            }
        }
        TraceKind::Curvline => {
            if patch.codimension() != 1 {
                return Err(CliError::usage("--kind curvline needs a hypersurface (n = m + 1)"));
            }
            if a.eig >= m {
                return Err(CliError::usage(format!("--eig must be below {m}")));
            }
            let field = hypersurface_normal_field(patch.clone());
            match integrate_curvature_line(patch.clone(), &u0, &field, a.eig, length, step) {
                Ok(r) => (Ok(r.max_defect), r.points),
                Err(e) => (
                    Err(e),
                    trace_curvature_line(&patch, &u0, &field, a.eig, length, step).points,
                ),
            }
        }
    };

    let n = patch.ambient_dim();
    let mut out = String::from("t");
    for i in 1..=m {
        let _ = write!(out, ",u{i}");
    }
    for i in 1..=n {
        let _ = write!(out, ",x{i}");
    }
    out.push('\n');
    for (t, u) in points.ts.iter().zip(&points.us) {
        let x = patch.evaluate(u)?;
        out.push_str(&cell(*t));
        for c in u.iter().chain(x.iter()) {
            out.push(',');
            out.push_str(&cell(*c));
        }
        out.push('\n');
    }
    match outcome {
        Ok(defect) => {
            let _ = writeln!(out, "# max_defect={}", cell(defect));
            emit(&a.output, &out)?;
            Ok(0)
        }
        Err(e) => {
            let _ = writeln!(out, "# stopped: {e}");
            emit(&a.output, &out)?;
            Err(e.into())
        }
    }
}
