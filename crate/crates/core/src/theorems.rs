//! Premise/conclusion checks for the helix-submanifold theorems on sampled
//! curves.
//!
//! Each `verify_*` evaluates every premise with a residual and a tolerance,
//! then the conclusion. The verdict is `Verified` when everything holds,
//! `PremiseFailed` when some premise fails, and `Falsified` when all premises
//! hold but the conclusion does not. A premise that cannot even be evaluated
//! (undefined principal normal, vanishing direction component) is reported
//! as a failed premise with `applicable = false`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::curves::{frenet, geodesic_residual, normal_curvature, slant_helix_test, ParamCurve};
use crate::error::{GeomError, Result};
use crate::flows::line_of_curvature_test;
use crate::helix::{
    decompose_direction, is_helix_direction, normal_component_field, DirectionDecomposition,
};
use crate::manifold::{point_frame, VectorField};
use crate::numerics::{stencil_derivative, stencil_step, ToleranceProfile, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TheoremId {
    #[serde(rename = "3.1")]
    T31,
    #[serde(rename = "3.2")]
    T32,
    #[serde(rename = "3.3")]
    T33,
    #[serde(rename = "3.5")]
    T35,
    #[serde(rename = "3.6")]
    T36,
}

impl TheoremId {
    pub const ALL: [TheoremId; 5] = [
        TheoremId::T31,
        TheoremId::T32,
        TheoremId::T33,
        TheoremId::T35,
        TheoremId::T36,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::T31 => "3.1",
            TheoremId::T32 => "3.2",
            TheoremId::T33 => "3.3",
            TheoremId::T35 => "3.5",
            TheoremId::T36 => "3.6",
        }
    }

    pub fn parse(s: &str) -> Option<TheoremId> {
        TheoremId::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Verified,
    PremiseFailed,
    Falsified,
}

/// One premise or conclusion with its measured residual. For lower-bound
/// checks (`lower_bound = true`) it holds when residual ≥ tol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    pub residual: f64,
    pub tol: f64,
    pub lower_bound: bool,
}

impl Check {
    fn at_most(name: &str, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            holds: residual <= tol,
            residual,
            tol,
            lower_bound: false,
        }
    }

    fn at_least(name: &str, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            holds: residual >= tol,
            residual,
            tol,
            lower_bound: true,
        }
    }

    fn unavailable(name: &str, tol: f64) -> Self {
        Self {
            name: name.into(),
            holds: false,
            residual: f64::NAN,
            tol,
            lower_bound: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub theorem_id: TheoremId,
    pub premises: Vec<Check>,
    pub conclusion: Check,
    pub verdict: Verdict,
    pub samples: usize,
    pub applicable: bool,
    pub notes: Vec<String>,
}

impl TheoremReport {
    fn new(
        theorem_id: TheoremId,
        premises: Vec<Check>,
        conclusion: Check,
        samples: usize,
        applicable: bool,
        notes: Vec<String>,
    ) -> Self {
        let verdict = if !applicable || premises.iter().any(|p| !p.holds) {
            Verdict::PremiseFailed
        } else if conclusion.holds {
            Verdict::Verified
        } else {
            Verdict::Falsified
        };
        Self {
            theorem_id,
            premises,
            conclusion,
            verdict,
            samples,
            applicable,
            notes,
        }
    }

    pub fn premise(&self, name: &str) -> Option<&Check> {
        self.premises.iter().find(|p| p.name == name)
    }
}

pub const HELIX_PREMISE: &str = "d is a helix direction";

fn check_direction(pc: &ParamCurve, d: &Vector) -> Result<()> {
    let n = pc.patch().ambient_dim();
    if d.len() != n {
        return Err(GeomError::DimensionMismatch {
            expected: n,
            found: d.len(),
        });
    }
    if (d.norm() - 1.0).abs() > 1e-8 {
        return Err(GeomError::BadParameter {
            name: "direction".into(),
            reason: "must be a unit vector".into(),
        });
    }
    Ok(())
}

fn check_samples(sample_ts: &[f64]) -> Result<()> {
    if sample_ts.len() < 2 {
        return Err(GeomError::TooFewSamples {
            needed: 2,
            found: sample_ts.len(),
        });
    }
    Ok(())
}

/// Angle spread of `d` over the patch's default grid plus the curve points.
fn helix_premise(pc: &ParamCurve, d: &Vector, sample_ts: &[f64], tol: &ToleranceProfile) -> Result<Check> {
    let patch = pc.patch();
    let mut us = patch.default_samples();
    for &t in sample_ts {
        us.push(pc.u(t)?);
    }
    let rep = is_helix_direction(patch, d, &us, tol.helix_spread)?;
    Ok(Check::at_most(HELIX_PREMISE, rep.spread, tol.helix_spread))
}

fn unit_tangent(pc: &ParamCurve, t: f64) -> Result<Vector> {
    let v = pc.velocity(t)?;
    let speed = v.norm();
    if !(speed > 1e-12) {
        return Err(GeomError::IrregularCurve { t, speed });
    }
    Ok(v / speed)
}

fn decompositions(pc: &ParamCurve, d: &Vector, sample_ts: &[f64]) -> Result<Vec<DirectionDecomposition>> {
    sample_ts
        .iter()
        .map(|&t| decompose_direction(&point_frame(pc.patch(), &pc.u(t)?)?, d))
        .collect()
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// <V_2, w(t)> along the curve, or `None` where V_2 is undefined.
fn principal_normal_products<F>(
    pc: &ParamCurve,
    sample_ts: &[f64],
    tol: &ToleranceProfile,
    mut w: F,
) -> Result<Option<Vec<f64>>>
where
    F: FnMut(usize, &Vector) -> f64,
{
    let amb = pc.ambient();
    let mut out = Vec::with_capacity(sample_ts.len());
    for (i, &t) in sample_ts.iter().enumerate() {
        let fa = frenet(&amb, t, 2, tol)?;
        match fa.principal_normal() {
            Ok(v2) => out.push(w(i, v2)),
            Err(GeomError::DegenerateFrame { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(out))
}

/// If α is a line of curvature (not a line) with respect to `n_field` on a
/// hypersurface and d is a helix direction, then d ∉ span{N, T}.
pub fn verify_thm_3_1(
    pc: &ParamCurve,
    d: &Vector,
    n_field: &VectorField,
    sample_ts: &[f64],
    tol: &ToleranceProfile,
) -> Result<TheoremReport> {
    let patch = pc.patch();
    if patch.codimension() != 1 {
        return Err(GeomError::CodimensionMismatch {
            expected: 1,
            found: patch.codimension(),
        });
    }
    check_direction(pc, d)?;
    check_samples(sample_ts)?;
    let mut premises = vec![helix_premise(pc, d, sample_ts, tol)?];
    let loc = line_of_curvature_test(pc, n_field, sample_ts, tol.loc)?;
    premises.push(Check::at_most("line of curvature", loc.max_angle_defect, tol.loc));

    let amb = pc.ambient();
    let mut line_like = 0usize;
    for &t in sample_ts {
        if frenet(&amb, t, 2, tol)?.is_line_like() {
            line_like += 1;
        }
    }
    let fraction = line_like as f64 / sample_ts.len() as f64;
    let mut not_line = Check::at_most("curve is not a line", fraction, 0.5);
    not_line.holds = fraction < 0.5;
    premises.push(not_line);

    // with λ = 0 and d = N the curve gives no contradiction, so such samples
    // are skipped as in theorem 3.5
    let applicable: Vec<f64> = sample_ts
        .iter()
        .zip(&loc.lambdas)
        .filter(|(_, l)| l.abs() >= tol.lambda)
        .map(|(t, _)| *t)
        .collect();
    let max_lambda = loc.lambdas.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    premises.push(Check::at_least("lambda nonzero", max_lambda, tol.lambda));
    let mut notes = Vec::new();
    if applicable.len() < sample_ts.len() {
        notes.push(format!(
            "{} of {} samples have |lambda| < {:e} and are not applicable",
            sample_ts.len() - applicable.len(),
            sample_ts.len(),
            tol.lambda
        ));
    }
    if applicable.is_empty() {
        return Ok(TheoremReport::new(
            TheoremId::T31,
            premises,
            Check::unavailable("d stays off span{N, T}", tol.separation),
            sample_ts.len(),
            false,
            notes,
        ));
    }

    let mut min_distance = f64::INFINITY;
    for &t in &applicable {
        let n = n_field(&pc.u(t)?)?;
        let tan = unit_tangent(pc, t)?;
        let rest = d - &n * d.dot(&n) - &tan * d.dot(&tan);
        min_distance = min_distance.min(rest.norm());
    }
    let conclusion = Check::at_least("d stays off span{N, T}", min_distance, tol.separation);
    Ok(TheoremReport::new(
        TheoremId::T31,
        premises,
        conclusion,
        sample_ts.len(),
        true,
        notes,
    ))
}

fn slant_conclusion(pc: &ParamCurve, d: &Vector, sample_ts: &[f64], tol: &ToleranceProfile) -> Result<Option<Check>> {
    match slant_helix_test(&pc.ambient(), d, sample_ts, tol.spread, tol) {
        Ok(rep) => Ok(Some(Check::at_most(
            "<d, V2> constant (slant helix)",
            rep.max - rep.min,
            tol.spread,
        ))),
        Err(GeomError::DegenerateFrame { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn undefined_v2(
    id: TheoremId,
    mut premises: Vec<Check>,
    name: &str,
    samples: usize,
    tol: &ToleranceProfile,
) -> TheoremReport {
    premises.push(Check::unavailable(name, tol.spread));
    TheoremReport::new(
        id,
        premises,
        Check::unavailable("<d, V2> constant (slant helix)", tol.spread),
        samples,
        false,
        vec!["principal normal V2 is undefined along the curve".into()],
    )
}

/// If α is a geodesic, d a helix direction and <V_2, ξ_j> constant, then α
/// is a slant helix with axis d.
pub fn verify_thm_3_2(
    pc: &ParamCurve,
    d: &Vector,
    sample_ts: &[f64],
    tol: &ToleranceProfile,
) -> Result<TheoremReport> {
    check_direction(pc, d)?;
    check_samples(sample_ts)?;
    let mut premises = vec![helix_premise(pc, d, sample_ts, tol)?];
    let mut worst: f64 = 0.0;
    for &t in sample_ts {
        worst = worst.max(geodesic_residual(pc, t, tol)?);
    }
    premises.push(Check::at_most("curve is a geodesic", worst, tol.geodesic));

    const NAME: &str = "<V2, xi_j> constant";
    let decs = decompositions(pc, d, sample_ts)?;
    let Some(products) = principal_normal_products(pc, sample_ts, tol, |i, v2| decs[i].dot_xi(v2))? else {
        return Ok(undefined_v2(TheoremId::T32, premises, NAME, sample_ts.len(), tol));
    };
    premises.push(Check::at_most(NAME, spread(&products), tol.spread));
    let Some(conclusion) = slant_conclusion(pc, d, sample_ts, tol)? else {
        return Ok(undefined_v2(TheoremId::T32, premises, "V2 defined", sample_ts.len(), tol));
    };
    Ok(TheoremReport::new(
        TheoremId::T32,
        premises,
        conclusion,
        sample_ts.len(),
        true,
        Vec::new(),
    ))
}

/// If k_T = 0 along α, d a helix direction and <V_2, T_j> constant, then α
/// is a slant helix with axis d.
pub fn verify_thm_3_3(
    pc: &ParamCurve,
    d: &Vector,
    sample_ts: &[f64],
    tol: &ToleranceProfile,
) -> Result<TheoremReport> {
    check_direction(pc, d)?;
    check_samples(sample_ts)?;
    let mut premises = vec![helix_premise(pc, d, sample_ts, tol)?];
    let mut worst: f64 = 0.0;
    for &t in sample_ts {
        worst = worst.max(normal_curvature(pc, t, tol)?);
    }
    premises.push(Check::at_most("normal curvature k_T = 0", worst, tol.normal_curvature));

    const NAME: &str = "<V2, T_j> constant";
    let decs = decompositions(pc, d, sample_ts)?;
    let Some(products) = principal_normal_products(pc, sample_ts, tol, |i, v2| decs[i].dot_t(v2))? else {
        return Ok(undefined_v2(TheoremId::T33, premises, NAME, sample_ts.len(), tol));
    };
    premises.push(Check::at_most(NAME, spread(&products), tol.spread));
    let Some(conclusion) = slant_conclusion(pc, d, sample_ts, tol)? else {
        return Ok(undefined_v2(TheoremId::T33, premises, "V2 defined", sample_ts.len(), tol));
    };
    Ok(TheoremReport::new(
        TheoremId::T33,
        premises,
        conclusion,
        sample_ts.len(),
        true,
        Vec::new(),
    ))
}

/// Derivative along the curve of a component of the decomposition of d.
fn direction_derivative<F>(pc: &ParamCurve, d: &Vector, t: f64, pick: F) -> Result<Vector>
where
    F: Fn(&DirectionDecomposition) -> Vector,
{
    let h = stencil_step(1, pc.fd_step());
    stencil_derivative(
        |s| {
            let frame = point_frame(pc.patch(), &pc.u(s)?)?;
            Ok(pick(&decompose_direction(&frame, d)?))
        },
        t,
        1,
        h,
    )
}

const NORMAL_DEFINED: &str = "normal component N_j nondegenerate";
const TANGENT_DEFINED: &str = "tangent component T_j nondegenerate";

/// If α is a line of curvature with respect to N_j (the unit normal
/// component of d), d a helix direction and N_j' tangent, then d ⟂ T.
/// Samples with |λ_j| below `tol.lambda` carry no information and are
/// skipped.
pub fn verify_thm_3_5(
    pc: &ParamCurve,
    d: &Vector,
    sample_ts: &[f64],
    tol: &ToleranceProfile,
) -> Result<TheoremReport> {
    check_direction(pc, d)?;
    check_samples(sample_ts)?;
    let mut premises = vec![helix_premise(pc, d, sample_ts, tol)?];
    let decs = decompositions(pc, d, sample_ts)?;
    if decs.iter().any(|dec| dec.normal_degenerate) {
        premises.push(Check::unavailable(NORMAL_DEFINED, 0.0));
        premises.push(Check::unavailable("line of curvature w.r.t. N_j", tol.loc));
        premises.push(Check::unavailable("N_j' is tangent", tol.tangency));
        premises.push(Check::unavailable("lambda_j nonzero", tol.lambda));
        return Ok(TheoremReport::new(
            TheoremId::T35,
            premises,
            Check::unavailable("d is orthogonal to T", tol.orthogonality),
            sample_ts.len(),
            false,
            vec!["normal component of d vanishes along the curve".into()],
        ));
    }
    premises.push(Check::at_least(NORMAL_DEFINED, 1.0, 0.0));

    let field = normal_component_field(pc.patch().clone(), d.clone());
    let loc = line_of_curvature_test(pc, &field, sample_ts, tol.loc)?;
    premises.push(Check::at_most("line of curvature w.r.t. N_j", loc.max_angle_defect, tol.loc));

    let mut leak: f64 = 0.0;
    for &t in sample_ts {
        let dn = direction_derivative(pc, d, t, |dec| dec.xi.clone())?;
        let frame = point_frame(pc.patch(), &pc.u(t)?)?;
        leak = leak.max(frame.normal_part(&dn).norm());
    }
    premises.push(Check::at_most("N_j' is tangent", leak, tol.tangency));

    let applicable: Vec<usize> = (0..sample_ts.len())
        .filter(|&i| loc.lambdas[i].abs() >= tol.lambda)
        .collect();
    let max_lambda = loc.lambdas.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    premises.push(Check::at_least("lambda_j nonzero", max_lambda, tol.lambda));
    let mut notes = Vec::new();
    if applicable.len() < sample_ts.len() {
        notes.push(format!(
            "{} of {} samples have |lambda_j| < {:e} and are not applicable",
            sample_ts.len() - applicable.len(),
            sample_ts.len(),
            tol.lambda
        ));
    }
    if applicable.is_empty() {
        return Ok(TheoremReport::new(
            TheoremId::T35,
            premises,
            Check::unavailable("d is orthogonal to T", tol.orthogonality),
            sample_ts.len(),
            false,
            notes,
        ));
    }
    let mut worst: f64 = 0.0;
    for &i in &applicable {
        worst = worst.max(unit_tangent(pc, sample_ts[i])?.dot(d).abs());
    }
    let conclusion = Check::at_most("d is orthogonal to T", worst, tol.orthogonality);
    Ok(TheoremReport::new(
        TheoremId::T35,
        premises,
        conclusion,
        sample_ts.len(),
        true,
        notes,
    ))
}

/// If d is a helix direction and {T_j', T} is linearly dependent along α,
/// then α is a line of curvature with respect to N_j.
pub fn verify_thm_3_6(
    pc: &ParamCurve,
    d: &Vector,
    sample_ts: &[f64],
    tol: &ToleranceProfile,
) -> Result<TheoremReport> {
    check_direction(pc, d)?;
    check_samples(sample_ts)?;
    let mut premises = vec![helix_premise(pc, d, sample_ts, tol)?];
    let decs = decompositions(pc, d, sample_ts)?;
    let tangent_ok = decs.iter().all(|dec| !dec.tangent_degenerate);
    let normal_ok = decs.iter().all(|dec| !dec.normal_degenerate);
    if !(tangent_ok && normal_ok) {
        let mut t_check = Check::at_least(TANGENT_DEFINED, 1.0, 0.0);
        if !tangent_ok {
            t_check = Check::unavailable(TANGENT_DEFINED, 0.0);
        }
        let mut n_check = Check::at_least(NORMAL_DEFINED, 1.0, 0.0);
        if !normal_ok {
            n_check = Check::unavailable(NORMAL_DEFINED, 0.0);
        }
        premises.push(t_check);
        premises.push(n_check);
        premises.push(Check::unavailable("{T_j', T} linearly dependent", tol.gram));
        return Ok(TheoremReport::new(
            TheoremId::T36,
            premises,
            Check::unavailable("line of curvature w.r.t. N_j", tol.loc),
            sample_ts.len(),
            false,
            vec!["a component of d vanishes along the curve".into()],
        ));
    }
    premises.push(Check::at_least(TANGENT_DEFINED, 1.0, 0.0));
    premises.push(Check::at_least(NORMAL_DEFINED, 1.0, 0.0));

    let mut worst: f64 = 0.0;
    for &t in sample_ts {
        let dt = direction_derivative(pc, d, t, |dec| dec.t_dir.clone())?;
        let tan = unit_tangent(pc, t)?;
        let (a, b, c) = (dt.dot(&dt), dt.dot(&tan), tan.dot(&tan));
        let det = (a * c - b * b).max(0.0);
        worst = worst.max(det / (1.0 + a).powi(2));
    }
    premises.push(Check::at_most("{T_j', T} linearly dependent", worst, tol.gram));

    let field = normal_component_field(pc.patch().clone(), d.clone());
    let loc = line_of_curvature_test(pc, &field, sample_ts, tol.loc)?;
    let conclusion = Check::at_most("line of curvature w.r.t. N_j", loc.max_angle_defect, tol.loc);
    Ok(TheoremReport::new(
        TheoremId::T36,
        premises,
        conclusion,
        sample_ts.len(),
        true,
        Vec::new(),
    ))
}

/// Runs the theorem `id`. `TheoremId::T31` uses the oriented hypersurface normal
/// as N.
pub fn verify(
    id: TheoremId,
    pc: &ParamCurve,
    d: &Vector,
    sample_ts: &[f64],
    tol: &ToleranceProfile,
) -> Result<TheoremReport> {
    match id {
        TheoremId::T31 => {
            let field: VectorField = crate::manifold::hypersurface_normal_field(Arc::clone(pc.patch()));
            verify_thm_3_1(pc, d, &field, sample_ts, tol)
        }
        TheoremId::T32 => verify_thm_3_2(pc, d, sample_ts, tol),
        TheoremId::T33 => verify_thm_3_3(pc, d, sample_ts, tol),
        TheoremId::T35 => verify_thm_3_5(pc, d, sample_ts, tol),
        TheoremId::T36 => verify_thm_3_6(pc, d, sample_ts, tol),
    }
}
