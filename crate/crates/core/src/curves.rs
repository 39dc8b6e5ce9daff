//! Curves in E^n and curves on patches: unit-speed reparametrization,
//! generalized Frenet frames, slant-helix test, normal curvature and
//! geodesic residual.

use std::fmt;
use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::manifold::{point_frame, second_fundamental_form, ImmersedPatch};
use crate::numerics::{
    stencil_derivative, stencil_step, stencil_weights, CubicHermite, ToleranceProfile, Vector,
    CURVE_STEP,
};

pub type CurveMap = Arc<dyn Fn(f64) -> Result<Vector> + Send + Sync>;
/// Analytic derivative evaluator: `(t, order) -> γ^(order)(t)`.
pub type CurveDerivatives = Arc<dyn Fn(f64, usize) -> Result<Vector> + Send + Sync>;

/// A regular curve t ↦ γ(t) in R^n.
#[derive(Clone)]
pub struct AmbientCurve {
    map: CurveMap,
    t_range: (f64, f64),
    fd_step: f64,
    derivatives: Option<CurveDerivatives>,
}

impl fmt::Debug for AmbientCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AmbientCurve")
            .field("t_range", &self.t_range)
            .field("fd_step", &self.fd_step)
            .field("analytic", &self.derivatives.is_some())
            .finish()
    }
}

impl AmbientCurve {
    pub fn new<F>(map: F, t0: f64, t1: f64) -> Self
    where
        F: Fn(f64) -> Result<Vector> + Send + Sync + 'static,
    {
        Self::from_map(Arc::new(map), t0, t1)
    }

    pub fn from_map(map: CurveMap, t0: f64, t1: f64) -> Self {
        Self {
            map,
            t_range: (t0, t1),
            fd_step: CURVE_STEP,
            derivatives: None,
        }
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn with_derivatives(mut self, d: CurveDerivatives) -> Self {
        self.derivatives = Some(d);
        self
    }

    pub fn t_range(&self) -> (f64, f64) {
        self.t_range
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn eval(&self, t: f64) -> Result<Vector> {
        (self.map)(t)
    }

    /// γ^(order)(t), analytic when available, otherwise a fourth-order
    /// central stencil.
    pub fn derivative(&self, t: f64, order: usize) -> Result<Vector> {
        if let Some(d) = &self.derivatives {
            return d(t, order);
        }
        stencil_derivative(|s| self.eval(s), t, order, stencil_step(order, self.fd_step))
    }

    pub fn speed(&self, t: f64) -> Result<f64> {
        Ok(self.derivative(t, 1)?.norm())
    }

    fn check_unit_speed(&self, t: f64, tol: f64) -> Result<f64> {
        let speed = self.speed(t)?;
        if (speed - 1.0).abs() > tol {
            return Err(GeomError::NotUnitSpeed { t, speed });
        }
        Ok(speed)
    }
}

const GAUSS5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Table s ↦ t(s) for the arclength of `c`: a cubic Hermite interpolant
/// with slopes 1/‖γ'(t)‖, plus the total length.
fn arclength_inverse(c: &AmbientCurve, samples: usize) -> Result<(CubicHermite, f64)> {
    let samples = samples.max(2);
    let (t0, t1) = c.t_range;
    let dt = (t1 - t0) / samples as f64;
    let ts: Vec<f64> = (0..=samples).map(|i| t0 + dt * i as f64).collect();
    let mut speeds = Vec::with_capacity(ts.len());
    for &t in &ts {
        let sp = c.speed(t)?;
        if !(sp > 1e-10) {
            return Err(GeomError::IrregularCurve { t, speed: sp });
        }
        speeds.push(sp);
    }
    let mut s = vec![0.0];
    for w in ts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut len = 0.0;
        for (x, wt) in GAUSS5 {
            let t = mid + half * x;
            let sp = c.speed(t)?;
            if !(sp > 1e-10) {
                return Err(GeomError::IrregularCurve { t, speed: sp });
            }
            len += wt * sp;
        }
        s.push(s.last().copied().unwrap_or(0.0) + half * len);
    }
    let total = *s.last().expect("nonempty");
    let table = CubicHermite::new(
        s,
        ts.iter().map(|&t| Vector::from_element(1, t)).collect(),
        speeds.iter().map(|&sp| Vector::from_element(1, 1.0 / sp)).collect(),
    );
    Ok((table, total))
}

/// Arclength reparametrization. The returned curve is parametrized by
/// s ∈ [0, L].
pub fn reparametrize_unit_speed(c: &AmbientCurve, samples: usize) -> Result<AmbientCurve> {
    let (table, total) = arclength_inverse(c, samples)?;
    let inner = c.clone();
    let map = move |s: f64| inner.eval(table.eval(s)[0]);
    Ok(AmbientCurve::new(map, 0.0, total).with_fd_step(c.fd_step))
}

/// Generalized Frenet apparatus at a parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct FrenetApparatus {
    pub t: f64,
    /// V_1..V_k, orthonormal.
    pub frame: Vec<Vector>,
    /// k_1..k_{k-1}.
    pub curvatures: Vec<f64>,
    pub rank: usize,
}

impl FrenetApparatus {
    /// V_i with 1-based index.
    pub fn vector(&self, i: usize) -> Result<&Vector> {
        if i == 0 || i > self.rank {
            return Err(GeomError::DegenerateFrame {
                t: self.t,
                rank: self.rank,
                needed: i,
            });
        }
        Ok(&self.frame[i - 1])
    }

    pub fn tangent(&self) -> &Vector {
        &self.frame[0]
    }

    /// Unit principal normal.
    pub fn principal_normal(&self) -> Result<&Vector> {
        self.vector(2)
    }

    pub fn is_line_like(&self) -> bool {
        self.rank < 2
    }
}

/// Gram–Schmidt on γ', γ'', …, γ^(max_order), stopping at the first
/// dependent derivative.
fn frame_at(c: &AmbientCurve, t: f64, max_order: usize, rank_tol: f64) -> Result<Vec<Vector>> {
    let mut frame: Vec<Vector> = Vec::with_capacity(max_order);
    for order in 1..=max_order {
        let d = c.derivative(t, order)?;
        let mut w = d.clone();
        for _ in 0..2 {
            for q in &frame {
                let k = q.dot(&w);
                w.axpy(-k, q, 1.0);
            }
        }
        let norm = w.norm();
        if !(norm >= rank_tol * d.norm().max(1.0)) {
            break;
        }
        frame.push(w / norm);
    }
    Ok(frame)
}

/// Frenet frame and curvatures k_i = <V_{i+1}, dV_i/ds>, the latter from
/// finite differences of the frame.
pub fn frenet(
    c: &AmbientCurve,
    t: f64,
    max_order: usize,
    tol: &ToleranceProfile,
) -> Result<FrenetApparatus> {
    let speed = c.check_unit_speed(t, tol.unit_speed)?;
    if max_order == 0 {
        return Err(GeomError::BadParameter {
            name: "max_order".into(),
            reason: "must be at least 1".into(),
        });
    }
    let frame = frame_at(c, t, max_order, tol.rank)?;
    if frame.is_empty() {
        return Err(GeomError::IrregularCurve { t, speed });
    }
    let rank = frame.len();
    let mut curvatures = Vec::with_capacity(rank.saturating_sub(1));
    if rank >= 2 {
        let h = 2.0 * c.fd_step;
        let p = 2usize;
        let w = stencil_weights(1, p);
        let mut derivs = vec![Vector::zeros(frame[0].len()); rank - 1];
        for (k, wk) in w.iter().enumerate() {
            if *wk == 0.0 {
                continue;
            }
            let tk = t + (k as f64 - p as f64) * h;
            let nb = frame_at(c, tk, rank - 1, tol.rank)?;
            if nb.len() < rank - 1 {
                return Err(GeomError::DegenerateFrame {
                    t: tk,
                    rank: nb.len(),
                    needed: rank - 1,
                });
            }
            for (d, v) in derivs.iter_mut().zip(&nb) {
                d.axpy(*wk / h, v, 1.0);
            }
        }
        for (i, d) in derivs.iter().enumerate() {
            curvatures.push(frame[i + 1].dot(d) / speed);
        }
    }
    Ok(FrenetApparatus {
        t,
        frame,
        curvatures,
        rank,
    })
}

/// Summary statistics of <V_2, d> along a curve.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SlantHelixReport {
    pub values: Vec<f64>,
    pub mean: f64,
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
    pub is_slant: bool,
}

pub(crate) fn stats(values: &[f64]) -> (f64, f64, f64, f64) {
    let n = values.len().max(1) as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (mean, var.sqrt(), min, max)
}

/// Does the principal normal keep a constant angle with `d`?
pub fn slant_helix_test(
    c: &AmbientCurve,
    d: &Vector,
    sample_ts: &[f64],
    tol: f64,
    profile: &ToleranceProfile,
) -> Result<SlantHelixReport> {
    let mut values = Vec::with_capacity(sample_ts.len());
    for &t in sample_ts {
        let fa = frenet(c, t, 2, profile)?;
        values.push(fa.principal_normal()?.dot(d));
    }
    let (mean, stddev, min, max) = stats(&values);
    Ok(SlantHelixReport {
        is_slant: max - min <= tol,
        values,
        mean,
        stddev,
        min,
        max,
    })
}

/// A curve t ↦ f(u(t)) on an immersed patch.
#[derive(Clone)]
pub struct ParamCurve {
    patch: Arc<ImmersedPatch>,
    u_of_t: CurveMap,
    u_dot: Option<CurveMap>,
    t_range: (f64, f64),
    fd_step: f64,
}

impl fmt::Debug for ParamCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamCurve")
            .field("patch", &self.patch.name())
            .field("t_range", &self.t_range)
            .finish()
    }
}

impl ParamCurve {
    pub fn new<F>(patch: Arc<ImmersedPatch>, u_of_t: F, t0: f64, t1: f64) -> Self
    where
        F: Fn(f64) -> Result<Vector> + Send + Sync + 'static,
    {
        Self {
            patch,
            u_of_t: Arc::new(u_of_t),
            u_dot: None,
            t_range: (t0, t1),
            fd_step: CURVE_STEP,
        }
    }

    /// Analytic coordinate velocity u̇(t).
    pub fn with_velocity<F>(mut self, u_dot: F) -> Self
    where
        F: Fn(f64) -> Result<Vector> + Send + Sync + 'static,
    {
        self.u_dot = Some(Arc::new(u_dot));
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn patch(&self) -> &Arc<ImmersedPatch> {
        &self.patch
    }

    pub fn t_range(&self) -> (f64, f64) {
        self.t_range
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    /// Uniformly spaced parameters strictly inside the range.
    pub fn sample_ts(&self, count: usize) -> Vec<f64> {
        let (a, b) = self.t_range;
        (0..count)
            .map(|i| a + (b - a) * (i as f64 + 0.5) / count as f64)
            .collect()
    }

    pub fn u(&self, t: f64) -> Result<Vector> {
        let u = (self.u_of_t)(t)?;
        self.patch.check_domain(&u)?;
        Ok(u)
    }

    pub fn point(&self, t: f64) -> Result<Vector> {
        self.patch.evaluate(&self.u(t)?)
    }

    pub fn coordinate_velocity(&self, t: f64) -> Result<Vector> {
        if let Some(d) = &self.u_dot {
            return d(t);
        }
        let f = &self.u_of_t;
        stencil_derivative(|s| f(s), t, 1, stencil_step(1, self.fd_step))
    }

    /// Ambient velocity J u̇.
    pub fn velocity(&self, t: f64) -> Result<Vector> {
        let u = self.u(t)?;
        let frame = point_frame(&self.patch, &u)?;
        Ok(&frame.jacobian * self.coordinate_velocity(t)?)
    }

    /// The same curve on the patch, parametrized by ambient arclength.
    pub fn unit_speed(&self, samples: usize) -> Result<ParamCurve> {
        let (table, total) = arclength_inverse(&self.ambient(), samples)?;
        let u_of_t = self.u_of_t.clone();
        Ok(ParamCurve {
            patch: self.patch.clone(),
            u_of_t: Arc::new(move |s| u_of_t(table.eval(s)[0])),
            u_dot: None,
            t_range: (0.0, total),
            fd_step: self.fd_step,
        })
    }

    /// The induced ambient curve f ∘ u.
    pub fn ambient(&self) -> AmbientCurve {
        let patch = self.patch.clone();
        let u_of_t = self.u_of_t.clone();
        AmbientCurve::new(move |t| patch.eval_raw(&u_of_t(t)?), self.t_range.0, self.t_range.1)
            .with_fd_step(self.fd_step)
    }

    fn unit_speed_velocity(&self, t: f64, tol: f64) -> Result<(Vector, Vector)> {
        let u = self.u(t)?;
        let frame = point_frame(&self.patch, &u)?;
        let x = self.coordinate_velocity(t)?;
        let speed = (&frame.jacobian * &x).norm();
        if (speed - 1.0).abs() > tol {
            return Err(GeomError::NotUnitSpeed { t, speed });
        }
        Ok((u, x))
    }
}

/// k_T = ‖V(T, T)‖ along a unit-speed curve on a patch.
pub fn normal_curvature(pc: &ParamCurve, t: f64, tol: &ToleranceProfile) -> Result<f64> {
    let (u, x) = pc.unit_speed_velocity(t, tol.unit_speed)?;
    Ok(second_fundamental_form(&pc.patch, &u, &x, &x)?.norm())
}

/// ‖P_tan γ''‖: the tangential acceleration, zero exactly for geodesics.
pub fn geodesic_residual(pc: &ParamCurve, t: f64, tol: &ToleranceProfile) -> Result<f64> {
    let (u, _) = pc.unit_speed_velocity(t, tol.unit_speed)?;
    let frame = point_frame(&pc.patch, &u)?;
    let acc = pc.ambient().derivative(t, 2)?;
    Ok(frame.tangent_part(&acc).norm())
}
