//! Immersed patches f: U ⊂ R^m → R^n and the pointwise apparatus built on
//! them: tangent/normal frames, second fundamental form, shape operators,
//! principal curvatures and Christoffel symbols.
//!
//! Sign convention: `A_N(X) = tang(-D̄_X N)`, so that
//! `<A_N X, Y> = <V(X, Y), N>`. With the outward normal the unit sphere has
//! principal curvatures (-1, -1).

use std::fmt;
use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::numerics::{
    central_diff, default_step, hessian_step, orthogonal_complement, orthonormalize,
    second_diff_fourth_order,
    stencil_derivative, sym_eig, Matrix, Subspace, Vector, CURVE_STEP,
};

pub type PatchMap = dyn Fn(&Vector) -> Result<Vector> + Send + Sync;
pub type JacobianMap = dyn Fn(&Vector) -> Result<Matrix> + Send + Sync;
/// Second partials: entry `[i][j]` is ∂²f/∂u_i∂u_j.
pub type HessianMap = dyn Fn(&Vector) -> Result<Vec<Vec<Vector>>> + Send + Sync;
/// A vector field on the parameter domain, e.g. a unit normal field.
pub type VectorField = Arc<dyn Fn(&Vector) -> Result<Vector> + Send + Sync>;

/// Axis-aligned box `[lower_i, upper_i]` in parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(GeomError::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if let Some(i) = (0..lower.len()).find(|&i| !(lower[i] < upper[i])) {
            return Err(GeomError::BadParameter {
                name: format!("domain axis {i}"),
                reason: format!("lower {} must be below upper {}", lower[i], upper[i]),
            });
        }
        Ok(Self { lower, upper })
    }

    /// Same interval on every axis.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, u: &Vector) -> bool {
        u.len() == self.dim()
            && u
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    /// Cell-centred uniform grid with `per_axis` points per axis.
    pub fn grid(&self, per_axis: usize) -> Vec<Vector> {
        let m = self.dim();
        let total = per_axis.pow(m as u32);
        (0..total)
            .map(|mut idx| {
                let mut u = Vector::zeros(m);
                for axis in 0..m {
                    let k = idx % per_axis;
                    idx /= per_axis;
                    let w = (self.upper[axis] - self.lower[axis]) / per_axis as f64;
                    u[axis] = self.lower[axis] + (k as f64 + 0.5) * w;
                }
                u
            })
            .collect()
    }
}

/// An immersion f: U ⊂ R^m → R^n with 1 ≤ m < n.
#[derive(Clone)]
pub struct ImmersedPatch {
    name: String,
    param_dim: usize,
    ambient_dim: usize,
    domain: BoxDomain,
    sample_box: BoxDomain,
    fd_step: f64,
    rank_tol: f64,
    map: Arc<PatchMap>,
    jacobian: Option<Arc<JacobianMap>>,
    hessian: Option<Arc<HessianMap>>,
}

impl fmt::Debug for ImmersedPatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImmersedPatch")
            .field("name", &self.name)
            .field("param_dim", &self.param_dim)
            .field("ambient_dim", &self.ambient_dim)
            .field("domain", &self.domain)
            .field("fd_step", &self.fd_step)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl ImmersedPatch {
    pub fn new<F>(
        name: impl Into<String>,
        param_dim: usize,
        ambient_dim: usize,
        domain: BoxDomain,
        map: F,
    ) -> Result<Self>
    where
        F: Fn(&Vector) -> Result<Vector> + Send + Sync + 'static,
    {
        if param_dim == 0 || param_dim >= ambient_dim {
            return Err(GeomError::BadParameter {
                name: "param_dim".into(),
                reason: format!("need 1 <= m < n, got m = {param_dim}, n = {ambient_dim}"),
            });
        }
        if domain.dim() != param_dim {
            return Err(GeomError::DimensionMismatch {
                expected: param_dim,
                found: domain.dim(),
            });
        }
        Ok(Self {
            name: name.into(),
            param_dim,
            ambient_dim,
            sample_box: domain.clone(),
            domain,
            fd_step: 1e-5,
            rank_tol: 1e-8,
            map: Arc::new(map),
            jacobian: None,
            hessian: None,
        })
    }

    pub fn with_jacobian<F>(mut self, jac: F) -> Self
    where
        F: Fn(&Vector) -> Result<Matrix> + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(jac));
        self
    }

    pub fn with_hessian<F>(mut self, hess: F) -> Self
    where
        F: Fn(&Vector) -> Result<Vec<Vec<Vector>>> + Send + Sync + 'static,
    {
        self.hessian = Some(Arc::new(hess));
        self
    }

    /// Relative first-derivative step (scaled by max(1, ‖u‖)).
    pub fn with_fd_step(mut self, rel: f64) -> Self {
        self.fd_step = rel;
        self
    }

    pub fn with_rank_tol(mut self, tol: f64) -> Self {
        self.rank_tol = tol;
        self
    }

    /// Box used by `default_samples`; must have the patch's parameter dimension.
    pub fn with_sample_box(mut self, sample_box: BoxDomain) -> Result<Self> {
        if sample_box.dim() != self.param_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.param_dim,
                found: sample_box.dim(),
            });
        }
        self.sample_box = sample_box;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn codimension(&self) -> usize {
        self.ambient_dim - self.param_dim
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn sample_box(&self) -> &BoxDomain {
        &self.sample_box
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn check_domain(&self, u: &Vector) -> Result<()> {
        if u.len() != self.param_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.param_dim,
                found: u.len(),
            });
        }
        if !self.domain.contains(u) {
            return Err(GeomError::OutOfDomain {
                u: u.iter().copied().collect(),
            });
        }
        Ok(())
    }

    /// f(u), with domain and finiteness checks.
    pub fn evaluate(&self, u: &Vector) -> Result<Vector> {
        self.check_domain(u)?;
        self.eval_raw(u)
    }

    /// f(u) without the domain check; finite-difference stencils may poke
    /// slightly past the box edge.
    pub(crate) fn eval_raw(&self, u: &Vector) -> Result<Vector> {
        let p = (self.map)(u)?;
        if p.len() != self.ambient_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.ambient_dim,
                found: p.len(),
            });
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(GeomError::NumericalDomain {
                context: format!("patch {} is not finite at {:?}", self.name, u.as_slice()),
            });
        }
        Ok(p)
    }

    /// Default sampling grid: 8 per axis, capped at 512 points overall.
    pub fn default_samples(&self) -> Vec<Vector> {
        let m = self.param_dim as u32;
        let mut per_axis = 8usize;
        while per_axis > 1 && per_axis.pow(m) > 512 {
            per_axis -= 1;
        }
        self.sample_box.grid(per_axis)
    }

    pub(crate) fn jacobian_raw(&self, u: &Vector) -> Result<Matrix> {
        if let Some(jac) = &self.jacobian {
            return jac(u);
        }
        let h = default_step(u, self.fd_step);
        let cols = (0..self.param_dim)
            .map(|j| central_diff(|x| self.eval_raw(x), u, j, h))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_columns(&cols))
    }

    pub(crate) fn hessian_raw(&self, u: &Vector) -> Result<Vec<Vec<Vector>>> {
        if let Some(hess) = &self.hessian {
            return hess(u);
        }
        let m = self.param_dim;
        let h = hessian_step(u);
        let mut out = vec![vec![Vector::zeros(self.ambient_dim); m]; m];
        for (i, j) in (0..m).flat_map(|i| (i..m).map(move |j| (i, j))) {
            let d = second_diff_fourth_order(|x| self.eval_raw(x), u, i, j, h)?;
            out[j][i] = d.clone();
            out[i][j] = d;
        }
        Ok(out)
    }
}

/// n×m Jacobian at `u`: column j is ∂f/∂u_j.
pub fn jacobian(patch: &ImmersedPatch, u: &Vector) -> Result<Matrix> {
    patch.check_domain(u)?;
    patch.jacobian_raw(u)
}

/// All second partials ∂²f/∂u_i∂u_j at `u`.
pub fn hessian(patch: &ImmersedPatch, u: &Vector) -> Result<Vec<Vec<Vector>>> {
    patch.check_domain(u)?;
    patch.hessian_raw(u)
}

/// Orthonormal tangent and normal bases at a point, with the tangent projector.
#[derive(Debug, Clone)]
pub struct PointFrame {
    pub u: Vector,
    pub p: Vector,
    pub jacobian: Matrix,
    pub tangent: Subspace,
    pub normal: Subspace,
    pub p_tan: Matrix,
}

impl PointFrame {
    pub fn p_norm(&self) -> Matrix {
        Matrix::identity(self.p.len(), self.p.len()) - &self.p_tan
    }

    pub fn tangent_part(&self, v: &Vector) -> Vector {
        &self.p_tan * v
    }

    pub fn normal_part(&self, v: &Vector) -> Vector {
        v - &self.p_tan * v
    }

    /// Metric g = JᵀJ.
    pub fn metric(&self) -> Matrix {
        self.jacobian.transpose() * &self.jacobian
    }

    /// Coordinates c with J c = tangential part of `v`.
    pub fn coordinates_of(&self, v: &Vector) -> Result<Vector> {
        let g = self.metric();
        let rhs = self.jacobian.transpose() * v;
        solve_metric(&g, &rhs, &self.u)
    }
}

pub(crate) fn solve_metric(g: &Matrix, rhs: &Vector, u: &Vector) -> Result<Vector> {
    let det = g.determinant();
    if det.abs() < 1e-12 {
        return Err(GeomError::SingularMetric {
            u: u.iter().copied().collect(),
            det,
        });
    }
    g.clone()
        .lu()
        .solve(rhs)
        .ok_or_else(|| GeomError::SingularMetric {
            u: u.iter().copied().collect(),
            det,
        })
}

pub(crate) fn frame_from_jacobian(
    patch: &ImmersedPatch,
    u: &Vector,
    p: Vector,
    jac: Matrix,
) -> Result<PointFrame> {
    let cols: Vec<Vector> = jac.column_iter().map(|c| c.into_owned()).collect();
    let scale = cols.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let (tangent, rank) = orthonormalize(&cols, patch.rank_tol() * scale);
    if rank < patch.param_dim() {
        return Err(GeomError::RankDeficient {
            u: u.iter().copied().collect(),
            rank,
            expected: patch.param_dim(),
        });
    }
    let normal = orthogonal_complement(&tangent, patch.ambient_dim());
    let p_tan = tangent.projector();
    Ok(PointFrame {
        u: u.clone(),
        p,
        jacobian: jac,
        tangent,
        normal,
        p_tan,
    })
}

/// Tangent space (orthonormalized Jacobian) and its normal complement at `u`.
pub fn point_frame(patch: &ImmersedPatch, u: &Vector) -> Result<PointFrame> {
    patch.check_domain(u)?;
    let p = patch.eval_raw(u)?;
    let jac = patch.jacobian_raw(u)?;
    frame_from_jacobian(patch, u, p, jac)
}

fn contract(hess: &[Vec<Vector>], x: &Vector, y: &Vector, n: usize) -> Vector {
    let mut acc = Vector::zeros(n);
    for (i, row) in hess.iter().enumerate() {
        for (j, h) in row.iter().enumerate() {
            let w = x[i] * y[j];
            if w != 0.0 {
                acc.axpy(w, h, 1.0);
            }
        }
    }
    acc
}

fn check_coords(patch: &ImmersedPatch, x: &Vector) -> Result<()> {
    if x.len() != patch.param_dim() {
        return Err(GeomError::DimensionMismatch {
            expected: patch.param_dim(),
            found: x.len(),
        });
    }
    Ok(())
}

/// Gauss split of D̄_X Y for coordinate fields X = Σ x_i ∂_i, Y = Σ y_j ∂_j
/// with constant coefficients: returns (D_X Y, V(X, Y)).
pub fn gauss_split(
    patch: &ImmersedPatch,
    u: &Vector,
    x: &Vector,
    y: &Vector,
) -> Result<(Vector, Vector)> {
    check_coords(patch, x)?;
    check_coords(patch, y)?;
    let frame = point_frame(patch, u)?;
    let hess = patch.hessian_raw(u)?;
    let full = contract(&hess, x, y, patch.ambient_dim());
    let tangential = frame.tangent_part(&full);
    let normal = &full - &tangential;
    Ok((tangential, normal))
}

/// Second fundamental form V(X, Y) for coordinate vectors `x`, `y`.
pub fn second_fundamental_form(
    patch: &ImmersedPatch,
    u: &Vector,
    x: &Vector,
    y: &Vector,
) -> Result<Vector> {
    gauss_split(patch, u, x, y).map(|(_, normal)| normal)
}

/// Shape operator A_N at a point, in the orthonormal tangent basis, together
/// with its principal curvatures and principal vectors.
#[derive(Debug, Clone)]
pub struct ShapeOperatorData {
    pub frame: PointFrame,
    pub normal: Vector,
    /// m×m, symmetric.
    pub matrix: Matrix,
    /// Ascending.
    pub principal_curvatures: Vec<f64>,
    /// Principal vectors as ambient unit vectors (columns).
    pub principal_vectors: Matrix,
    /// Principal vectors in the orthonormal tangent basis (columns).
    pub principal_coords: Matrix,
}

impl ShapeOperatorData {
    /// A_N applied to an ambient tangent vector.
    pub fn apply(&self, x: &Vector) -> Vector {
        let b = self.frame.tangent.basis();
        b * (&self.matrix * (b.transpose() * x))
    }

    /// Gap between eigenvalue `idx` and its nearest neighbour (∞ when m = 1).
    pub fn eigen_gap(&self, idx: usize) -> f64 {
        let k = &self.principal_curvatures;
        let mut gap = f64::INFINITY;
        if idx > 0 {
            gap = gap.min(k[idx] - k[idx - 1]);
        }
        if idx + 1 < k.len() {
            gap = gap.min(k[idx + 1] - k[idx]);
        }
        gap
    }
}

/// Checks that `n` is a unit vector in the normal space of `frame`.
pub fn check_unit_normal(frame: &PointFrame, n: &Vector, tol: f64) -> Result<()> {
    if n.len() != frame.p.len() {
        return Err(GeomError::DimensionMismatch {
            expected: frame.p.len(),
            found: n.len(),
        });
    }
    let norm_err = (n.norm() - 1.0).abs();
    if norm_err > 1e-8 {
        return Err(GeomError::NotNormal { residual: norm_err });
    }
    let leak = frame.tangent_part(n).norm();
    if leak > tol {
        return Err(GeomError::NotNormal { residual: leak });
    }
    Ok(())
}

/// Shape operator from the second fundamental form:
/// `A_ij = <V(t_i, t_j), N>` on the orthonormal tangent basis t_i.
pub fn shape_operator(patch: &ImmersedPatch, u: &Vector, normal: &Vector) -> Result<ShapeOperatorData> {
    let frame = point_frame(patch, u)?;
    check_unit_normal(&frame, normal, 1e-6)?;
    let hess = patch.hessian_raw(u)?;
    let m = patch.param_dim();
    let h_n = Matrix::from_fn(m, m, |a, b| hess[a][b].dot(normal));
    // coordinates of the orthonormal tangent basis: J C = T
    let g = frame.metric();
    let jt_t = frame.jacobian.transpose() * frame.tangent.basis();
    let det = g.determinant();
    if det.abs() < 1e-12 {
        return Err(GeomError::SingularMetric {
            u: u.iter().copied().collect(),
            det,
        });
    }
    let c = g.lu().solve(&jt_t).ok_or_else(|| GeomError::SingularMetric {
        u: u.iter().copied().collect(),
        det,
    })?;
    let a = c.transpose() * h_n * &c;
    let a = (&a + a.transpose()) * 0.5;
    let (vals, vecs) = sym_eig(&a);
    let principal_vectors = frame.tangent.basis() * &vecs;
    Ok(ShapeOperatorData {
        frame,
        normal: normal.clone(),
        matrix: a,
        principal_curvatures: vals,
        principal_vectors,
        principal_coords: vecs,
    })
}

/// tang(-D̄_X N) for X = J x, by differentiating the normal field along the
/// coordinate line through `u` in direction `x`.
pub fn weingarten_from_field(
    patch: &ImmersedPatch,
    u: &Vector,
    field: &VectorField,
    x: &Vector,
) -> Result<Vector> {
    check_coords(patch, x)?;
    let frame = point_frame(patch, u)?;
    let scale = x.norm().max(1e-300);
    let dn = stencil_derivative(|s| field(&(u + x * (s / scale))), 0.0, 1, CURVE_STEP)? * scale;
    Ok(-frame.tangent_part(&dn))
}

/// Christoffel symbols Γ^k_ij (indexed `[k][i][j]`) of the induced metric.
pub fn christoffel(patch: &ImmersedPatch, u: &Vector) -> Result<Vec<Vec<Vec<f64>>>> {
    patch.check_domain(u)?;
    let m = patch.param_dim();
    let jac = patch.jacobian_raw(u)?;
    let hess = patch.hessian_raw(u)?;
    let g = jac.transpose() * &jac;
    let det = g.determinant();
    if det.abs() < 1e-12 {
        return Err(GeomError::SingularMetric {
            u: u.iter().copied().collect(),
            det,
        });
    }
    let g_inv = g.try_inverse().ok_or(GeomError::SingularMetric {
        u: u.iter().copied().collect(),
        det,
    })?;
    let col = |j: usize| jac.column(j).into_owned();
    // dg[k][i][j] = ∂_k g_ij = <f_ki, f_j> + <f_i, f_kj>
    let mut dg = vec![vec![vec![0.0; m]; m]; m];
    for (k, dgk) in dg.iter_mut().enumerate() {
        for (i, row) in dgk.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = hess[k][i].dot(&col(j)) + col(i).dot(&hess[k][j]);
            }
        }
    }
    let mut gamma = vec![vec![vec![0.0; m]; m]; m];
    for (k, gk) in gamma.iter_mut().enumerate() {
        for i in 0..m {
            for j in 0..m {
                let mut s = 0.0;
                for l in 0..m {
                    s += g_inv[(k, l)] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
                }
                gk[i][j] = 0.5 * s;
            }
        }
    }
    Ok(gamma)
}

/// Coordinate acceleration of a geodesic: ü^k = -Γ^k_ij u̇^i u̇^j, computed
/// as -g⁻¹ Jᵀ Σ f_ij u̇^i u̇^j.
pub fn geodesic_acceleration(patch: &ImmersedPatch, u: &Vector, v: &Vector) -> Result<Vector> {
    let jac = patch.jacobian_raw(u)?;
    let hess = patch.hessian_raw(u)?;
    let acc = contract(&hess, v, v, patch.ambient_dim());
    let g = jac.transpose() * &jac;
    let rhs = jac.transpose() * acc;
    Ok(-solve_metric(&g, &rhs, u)?)
}

/// Ambient second derivative Σ f_ij x_i y_j (no projection).
pub fn ambient_second_derivative(
    patch: &ImmersedPatch,
    u: &Vector,
    x: &Vector,
    y: &Vector,
) -> Result<Vector> {
    check_coords(patch, x)?;
    check_coords(patch, y)?;
    let hess = hessian(patch, u)?;
    Ok(contract(&hess, x, y, patch.ambient_dim()))
}

/// Unit normal of a hypersurface, oriented so that det[J | N] > 0.
pub fn hypersurface_normal(patch: &ImmersedPatch, u: &Vector) -> Result<Vector> {
    if patch.codimension() != 1 {
        return Err(GeomError::CodimensionMismatch {
            expected: 1,
            found: patch.codimension(),
        });
    }
    let frame = point_frame(patch, u)?;
    let n = frame.normal.vector(0);
    let mut cols: Vec<Vector> = frame.jacobian.column_iter().map(|c| c.into_owned()).collect();
    cols.push(n.clone());
    let det = Matrix::from_columns(&cols).determinant();
    Ok(if det < 0.0 { -n } else { n })
}

/// The oriented hypersurface normal as a field over the chart.
pub fn hypersurface_normal_field(patch: Arc<ImmersedPatch>) -> VectorField {
    Arc::new(move |u: &Vector| hypersurface_normal(&patch, u))
}
