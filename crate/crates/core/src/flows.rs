//! Fixed-step RK4 tracing of geodesics and lines of curvature on a patch,
//! and the line-of-curvature test for a given curve.

use std::sync::Arc;

use serde::Serialize;

use crate::curves::ParamCurve;
use crate::error::{GeomError, Result};
use crate::manifold::{geodesic_acceleration, point_frame, shape_operator, ImmersedPatch, VectorField};
use crate::numerics::{CubicHermite, Vector};

/// Eigen-gap below which a point counts as umbilic for the chosen eigenvalue.
pub const UMBILIC_GAP: f64 = 1e-6;

/// Stored nodes of a trace: parameter, chart point and chart velocity.
#[derive(Debug, Clone, Default)]
pub struct TracePoints {
    pub ts: Vec<f64>,
    pub us: Vec<Vector>,
    pub vs: Vec<Vector>,
}

impl TracePoints {
    fn push(&mut self, t: f64, u: Vector, v: Vector) {
        self.ts.push(t);
        self.us.push(u);
        self.vs.push(v);
    }

    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }
}

/// Nodes traced so far and the error that stopped the trace, if any.
#[derive(Debug, Clone)]
pub struct PartialTrace {
    pub points: TracePoints,
    pub error: Option<GeomError>,
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    /// Dense output (cubic Hermite through the stored nodes).
    pub curve: ParamCurve,
    pub steps: usize,
    pub max_defect: f64,
    pub points: TracePoints,
}

fn step_count(length: f64, step: f64) -> Result<usize> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(GeomError::BadParameter {
            name: "length".into(),
            reason: "must be positive and finite".into(),
        });
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(GeomError::BadParameter {
            name: "step".into(),
            reason: "must be positive and finite".into(),
        });
    }
    Ok((length / step - 1e-9).ceil().max(1.0) as usize)
}

fn left_domain(patch: &ImmersedPatch, t: f64, u: &Vector) -> Result<()> {
    if patch.domain().contains(u) {
        Ok(())
    } else {
        Err(GeomError::LeftDomain {
            t,
            u: u.iter().copied().collect(),
        })
    }
}

/// One classical RK4 step for u' = v, v' = a(u, v).
fn rk4_geodesic(patch: &ImmersedPatch, t: f64, u: &Vector, v: &Vector, h: f64) -> Result<(Vector, Vector)> {
    let acc = |t: f64, u: &Vector, v: &Vector| {
        left_domain(patch, t, u)?;
        geodesic_acceleration(patch, u, v)
    };
    let a1 = acc(t, u, v)?;
    let (u2, v2) = (u + v * (h / 2.0), v + &a1 * (h / 2.0));
    let a2 = acc(t + h / 2.0, &u2, &v2)?;
    let (u3, v3) = (u + &v2 * (h / 2.0), v + &a2 * (h / 2.0));
    let a3 = acc(t + h / 2.0, &u3, &v3)?;
    let (u4, v4) = (u + &v3 * h, v + &a3 * h);
    let a4 = acc(t + h, &u4, &v4)?;
    let un = u + (v + &v2 * 2.0 + &v3 * 2.0 + &v4) * (h / 6.0);
    let vn = v + (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (h / 6.0);
    left_domain(patch, t + h, &un)?;
    Ok((un, vn))
}

/// Scales v0 so that the induced ambient speed is 1.
fn unit_initial_velocity(patch: &ImmersedPatch, u0: &Vector, v0: &Vector) -> Result<Vector> {
    if v0.len() != patch.param_dim() {
        return Err(GeomError::DimensionMismatch {
            expected: patch.param_dim(),
            found: v0.len(),
        });
    }
    let frame = point_frame(patch, u0)?;
    let speed = (&frame.jacobian * v0).norm();
    if !(speed > 1e-12) {
        return Err(GeomError::BadParameter {
            name: "v0".into(),
            reason: "initial velocity vanishes".into(),
        });
    }
    Ok(v0 / speed)
}

/// Geodesic trace that keeps the nodes computed before any failure.
pub fn trace_geodesic(patch: &ImmersedPatch, u0: &Vector, v0: &Vector, length: f64, step: f64) -> PartialTrace {
    let mut points = TracePoints::default();
    let error = (|| -> Result<()> {
        let n = step_count(length, step)?;
        patch.check_domain(u0)?;
        let h = length / n as f64;
        let mut u = u0.clone();
        let mut v = unit_initial_velocity(patch, u0, v0)?;
        points.push(0.0, u.clone(), v.clone());
        for i in 0..n {
            let t = i as f64 * h;
            let (un, vn) = rk4_geodesic(patch, t, &u, &v, h)?;
            u = un;
            v = vn;
            points.push((i + 1) as f64 * h, u.clone(), v.clone());
        }
        Ok(())
    })()
    .err();
    PartialTrace { points, error }
}

fn dense_curve(patch: Arc<ImmersedPatch>, points: &TracePoints) -> ParamCurve {
    let table = Arc::new(CubicHermite::new(
        points.ts.clone(),
        points.us.clone(),
        points.vs.clone(),
    ));
    let t1 = *points.ts.last().expect("trace has nodes");
    let tv = table.clone();
    ParamCurve::new(patch, move |t| Ok(table.eval(t)), 0.0, t1)
        .with_velocity(move |t| Ok(tv.eval_derivative(t)))
}

/// Central-difference derivative of stored node values (one-sided second
/// order at the ends).
fn node_derivative(ts: &[f64], ys: &[Vector], i: usize) -> Vector {
    let n = ts.len();
    if n == 2 {
        return (&ys[1] - &ys[0]) / (ts[1] - ts[0]);
    }
    if i == 0 {
        let h = ts[1] - ts[0];
        (&ys[0] * -3.0 + &ys[1] * 4.0 - &ys[2]) / (2.0 * h)
    } else if i == n - 1 {
        let h = ts[n - 1] - ts[n - 2];
        (&ys[n - 1] * 3.0 - &ys[n - 2] * 4.0 + &ys[n - 3]) / (2.0 * h)
    } else {
        (&ys[i + 1] - &ys[i - 1]) / (ts[i + 1] - ts[i - 1])
    }
}

/// Post-hoc geodesic defect ‖P_tan(J ü + Σ f_ij u̇_i u̇_j)‖ at the nodes, with
/// ü differenced from the stored velocities.
fn geodesic_defect(patch: &ImmersedPatch, points: &TracePoints) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, (u, v)) in points.us.iter().zip(&points.vs).enumerate() {
        let frame = point_frame(patch, u)?;
        let udd = node_derivative(&points.ts, &points.vs, i);
        let exact = geodesic_acceleration(patch, u, v)?;
        let err = &frame.jacobian * (udd - exact);
        worst = worst.max(frame.tangent_part(&err).norm());
    }
    Ok(worst)
}

/// Unit-speed geodesic from `u0` in chart direction `v0` (rescaled to unit
/// ambient speed), by RK4 on u'' = -Γ(u)(u', u').
pub fn integrate_geodesic(
    patch: Arc<ImmersedPatch>,
    u0: &Vector,
    v0: &Vector,
    length: f64,
    step: f64,
) -> Result<FlowResult> {
    let trace = trace_geodesic(&patch, u0, v0, length, step);
    if let Some(e) = trace.error {
        return Err(e);
    }
    let max_defect = geodesic_defect(&patch, &trace.points)?;
    Ok(FlowResult {
        curve: dense_curve(patch, &trace.points),
        steps: trace.points.len() - 1,
        max_defect,
        points: trace.points,
    })
}

/// Unit principal direction field of A_N, as chart velocity and ambient
/// vector, with the sign chosen to agree with `prev`.
fn principal_direction(
    patch: &ImmersedPatch,
    t: f64,
    u: &Vector,
    field: &VectorField,
    eig_index: usize,
    prev: Option<&Vector>,
) -> Result<(Vector, Vector)> {
    left_domain(patch, t, u)?;
    let n = field(u)?;
    let so = shape_operator(patch, u, &n)?;
    if eig_index >= so.principal_curvatures.len() {
        return Err(GeomError::BadParameter {
            name: "eig_index".into(),
            reason: format!("must be below {}", so.principal_curvatures.len()),
        });
    }
    let gap = so.eigen_gap(eig_index);
    if gap < UMBILIC_GAP {
        return Err(GeomError::UmbilicEncountered {
            t,
            u: u.iter().copied().collect(),
            gap,
        });
    }
    let mut w = so.principal_vectors.column(eig_index).into_owned();
    if let Some(p) = prev {
        if w.dot(p) < 0.0 {
            w = -w;
        }
    }
    let x = so.frame.coordinates_of(&w)?;
    Ok((x, w))
}

fn rk4_curvature_line(
    patch: &ImmersedPatch,
    field: &VectorField,
    eig_index: usize,
    t: f64,
    u: &Vector,
    w: &Vector,
    h: f64,
) -> Result<Vector> {
    let dir = |t: f64, u: &Vector| principal_direction(patch, t, u, field, eig_index, Some(w)).map(|(x, _)| x);
    let k1 = dir(t, u)?;
    let k2 = dir(t + h / 2.0, &(u + &k1 * (h / 2.0)))?;
    let k3 = dir(t + h / 2.0, &(u + &k2 * (h / 2.0)))?;
    let k4 = dir(t + h, &(u + &k3 * h))?;
    Ok(u + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

/// Curvature-line trace that keeps the nodes computed before any failure.
pub fn trace_curvature_line(
    patch: &ImmersedPatch,
    u0: &Vector,
    normal_field: &VectorField,
    eig_index: usize,
    length: f64,
    step: f64,
) -> PartialTrace {
    let mut points = TracePoints::default();
    let error = (|| -> Result<()> {
        let n = step_count(length, step)?;
        patch.check_domain(u0)?;
        let h = length / n as f64;
        let (x0, mut w) = principal_direction(patch, 0.0, u0, normal_field, eig_index, None)?;
        let mut u = u0.clone();
        points.push(0.0, u.clone(), x0);
        for i in 0..n {
            let t = i as f64 * h;
            let un = rk4_curvature_line(patch, normal_field, eig_index, t, &u, &w, h)?;
            let tn = (i + 1) as f64 * h;
            let (x, wn) = principal_direction(patch, tn, &un, normal_field, eig_index, Some(&w))?;
            u = un;
            w = wn;
            points.push(tn, u.clone(), x);
        }
        Ok(())
    })()
    .err();
    PartialTrace { points, error }
}

/// Largest angle between the differenced trace tangent and the local
/// principal vector at the nodes.
fn curvature_line_defect(
    patch: &ImmersedPatch,
    field: &VectorField,
    eig_index: usize,
    points: &TracePoints,
) -> Result<f64> {
    let ambient = points
        .us
        .iter()
        .map(|u| patch.evaluate(u))
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for (i, u) in points.us.iter().enumerate() {
        let tangent = node_derivative(&points.ts, &ambient, i);
        let (_, w) = principal_direction(patch, points.ts[i], u, field, eig_index, None)?;
        let along = tangent.dot(&w);
        let across = (&tangent - &w * along).norm();
        worst = worst.max(across.atan2(along.abs()));
    }
    Ok(worst)
}

/// Line of curvature through `u0`: follows the unit principal vector of
/// A_N (N = `normal_field`) belonging to the `eig_index`-th smallest
/// principal curvature.
pub fn integrate_curvature_line(
    patch: Arc<ImmersedPatch>,
    u0: &Vector,
    normal_field: &VectorField,
    eig_index: usize,
    length: f64,
    step: f64,
) -> Result<FlowResult> {
    let trace = trace_curvature_line(&patch, u0, normal_field, eig_index, length, step);
    if let Some(e) = trace.error {
        return Err(e);
    }
    let max_defect = curvature_line_defect(&patch, normal_field, eig_index, &trace.points)?;
    Ok(FlowResult {
        curve: dense_curve(patch, &trace.points),
        steps: trace.points.len() - 1,
        max_defect,
        points: trace.points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineOfCurvatureReport {
    pub max_angle_defect: f64,
    pub is_loc: bool,
    pub lambdas: Vec<f64>,
    pub defects: Vec<f64>,
}

/// Is T a principal vector of A_N at each sample? The defect is
/// ‖A T̂ − <A T̂, T̂> T̂‖ in orthonormal tangent coordinates.
pub fn line_of_curvature_test(
    pc: &ParamCurve,
    normal_field: &VectorField,
    sample_ts: &[f64],
    tol: f64,
) -> Result<LineOfCurvatureReport> {
    let mut lambdas = Vec::with_capacity(sample_ts.len());
    let mut defects = Vec::with_capacity(sample_ts.len());
    for &t in sample_ts {
        let u = pc.u(t)?;
        let tangent = pc.velocity(t)?;
        let speed = tangent.norm();
        if (speed - 1.0).abs() > 1e-4 {
            return Err(GeomError::NotUnitSpeed { t, speed });
        }
        let n = normal_field(&u).map_err(|e| match e {
            GeomError::DegenerateDecomposition { part, .. } => GeomError::DegenerateDecomposition { t, part },
            other => other,
        })?;
        let so = shape_operator(pc.patch(), &u, &n)?;
        let that = so.frame.tangent.basis().transpose() * &tangent;
        let that = &that / that.norm();
        let at = &so.matrix * &that;
        let lambda = at.dot(&that);
        defects.push((at - &that * lambda).norm());
        lambdas.push(lambda);
    }
    let max_angle_defect = defects.iter().copied().fold(0.0, f64::max);
    Ok(LineOfCurvatureReport {
        max_angle_defect,
        is_loc: max_angle_defect <= tol,
        lambdas,
        defects,
    })
}
