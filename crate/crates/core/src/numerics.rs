//! Small dense kernels shared by every other module: finite differences,
//! Gram–Schmidt, orthogonal complements and symmetric eigensolves.
//!
//! Ambient dimensions are expected to stay small (n ≤ 16), so everything
//! works on heap-allocated `DVector`/`DMatrix` without any attempt at
//! blocking or sparsity.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Every tolerance used by a rank decision, a premise check or a conclusion
/// check lives here so callers (and tests) can tighten them in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    /// Residual norm below which a vector counts as linearly dependent.
    pub rank: f64,
    /// Relative finite-difference step for first derivatives of immersions.
    pub fd_step: f64,
    /// Angle spread (radians) accepted for a helix direction.
    pub helix_spread: f64,
    /// Spread accepted for "constant along the curve" inner products.
    pub spread: f64,
    /// Maximum line-of-curvature defect.
    pub loc: f64,
    /// Maximum tangential acceleration for a geodesic.
    pub geodesic: f64,
    /// Maximum normal curvature counted as zero.
    pub normal_curvature: f64,
    /// Maximum normal part of a field derivative counted as tangent.
    pub tangency: f64,
    /// Minimum distance from span{N, T} required to call a direction outside it.
    pub separation: f64,
    /// Normalized Gram determinant below which two vectors are dependent.
    pub gram: f64,
    /// Maximum |<T, d>| counted as orthogonality.
    pub orthogonality: f64,
    /// Principal curvature magnitude below which a sample is vacuous.
    pub lambda: f64,
    /// Eigen-gap below which a point counts as umbilic.
    pub umbilic_gap: f64,
    /// Allowed deviation of a curve's speed from 1.
    pub unit_speed: f64,
    /// Allowed tangential leak of a supposed normal vector.
    pub normal_check: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self {
            rank: 1e-8,
            fd_step: 1e-5,
            helix_spread: 1e-6,
            spread: 1e-4,
            loc: 1e-4,
            geodesic: 1e-4,
            normal_curvature: 1e-4,
            tangency: 1e-4,
            separation: 1e-3,
            gram: 1e-6,
            orthogonality: 1e-6,
            lambda: 1e-6,
            umbilic_gap: 1e-6,
            unit_speed: 1e-4,
            normal_check: 1e-6,
        }
    }
}

impl ToleranceProfile {
    pub const KEYS: [&'static str; 15] = [
        "rank",
        "fd_step",
        "helix_spread",
        "spread",
        "loc",
        "geodesic",
        "normal_curvature",
        "tangency",
        "separation",
        "gram",
        "orthogonality",
        "lambda",
        "umbilic_gap",
        "unit_speed",
        "normal_check",
    ];

    /// Override a single tolerance by name.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        if !(value.is_finite() && value > 0.0) {
            return Err(GeomError::BadParameter {
                name: key.to_string(),
                reason: format!("tolerance must be positive and finite, got {value}"),
            });
        }
        let slot = match key {
            "rank" => &mut self.rank,
            "fd_step" => &mut self.fd_step,
            "helix_spread" => &mut self.helix_spread,
            "spread" => &mut self.spread,
            "loc" => &mut self.loc,
            "geodesic" => &mut self.geodesic,
            "normal_curvature" => &mut self.normal_curvature,
            "tangency" => &mut self.tangency,
            "separation" => &mut self.separation,
            "gram" => &mut self.gram,
            "orthogonality" => &mut self.orthogonality,
            "lambda" => &mut self.lambda,
            "umbilic_gap" => &mut self.umbilic_gap,
            "unit_speed" => &mut self.unit_speed,
            "normal_check" => &mut self.normal_check,
            _ => {
                return Err(GeomError::BadParameter {
                    name: key.to_string(),
                    reason: format!("unknown tolerance; known keys: {}", Self::KEYS.join(", ")),
                })
            }
        };
        *slot = value;
        Ok(())
    }
}

/// Rounds a positive step to the nearest power of two so that `x ± h` is
/// exact for moderate `x`.
pub fn pow2_step(h: f64) -> f64 {
    debug_assert!(h > 0.0);
    2f64.powi(h.log2().round() as i32)
}

/// Default first-derivative step at `x`: `rel · max(1, ‖x‖)`, snapped to a
/// power of two.
pub fn default_step(x: &Vector, rel: f64) -> f64 {
    pow2_step(rel * x.norm().max(1.0))
}

/// Step used for second derivatives of immersions (≈ ε^{1/4}).
pub fn second_step(x: &Vector) -> f64 {
    pow2_step(1.2e-4 * x.norm().max(1.0))
}

fn check_finite(v: Vector, what: &str) -> Result<Vector> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(v)
    } else {
        Err(GeomError::NumericalDomain {
            context: format!("non-finite value in {what}"),
        })
    }
}

fn shifted(x: &Vector, dir: usize, h: f64) -> Vector {
    let mut y = x.clone();
    y[dir] += h;
    y
}

/// Two-point central difference of `f` along coordinate `dir`.
pub fn central_diff<F>(f: F, x: &Vector, dir: usize, h: f64) -> Result<Vector>
where
    F: Fn(&Vector) -> Result<Vector>,
{
    let plus = f(&shifted(x, dir, h))?;
    let minus = f(&shifted(x, dir, -h))?;
    check_finite((plus - minus) / (2.0 * h), "central difference")
}

/// Second partial derivative ∂²f/∂x_i∂x_j with a central stencil.
pub fn second_diff<F>(f: F, x: &Vector, i: usize, j: usize, h: f64) -> Result<Vector>
where
    F: Fn(&Vector) -> Result<Vector>,
{
    let d = if i == j {
        let plus = f(&shifted(x, i, h))?;
        let mid = f(x)?;
        let minus = f(&shifted(x, i, -h))?;
        (plus - mid * 2.0 + minus) / (h * h)
    } else {
        let (a, b) = (i.min(j), i.max(j));
        let pp = f(&shifted(&shifted(x, a, h), b, h))?;
        let pm = f(&shifted(&shifted(x, a, h), b, -h))?;
        let mp = f(&shifted(&shifted(x, a, -h), b, h))?;
        let mm = f(&shifted(&shifted(x, a, -h), b, -h))?;
        (pp - pm - mp + mm) / (4.0 * h * h)
    };
    check_finite(d, "second difference")
}

/// Step for `second_diff_fourth_order` (≈ 2e-3, a power of two).
pub fn hessian_step(x: &Vector) -> f64 {
    pow2_step(2e-3 * x.norm().max(1.0))
}

/// Fourth-order accurate ∂²f/∂x_i∂x_j: the five-point second-derivative
/// stencil on the diagonal, the tensor product of five-point first-derivative
/// stencils off it.
pub fn second_diff_fourth_order<F>(f: F, x: &Vector, i: usize, j: usize, h: f64) -> Result<Vector>
where
    F: Fn(&Vector) -> Result<Vector>,
{
    let mut acc: Option<Vector> = None;
    let mut add = |v: Vector, w: f64| {
        let v = v * w;
        acc = Some(match acc.take() {
            Some(a) => a + v,
            None => v,
        });
    };
    if i == j {
        let w = stencil_weights(2, 2);
        for (k, wk) in w.iter().enumerate() {
            add(f(&shifted(x, i, (k as f64 - 2.0) * h))?, *wk);
        }
    } else {
        let (a, b) = (i.min(j), i.max(j));
        let w = stencil_weights(1, 2);
        for (ka, wa) in w.iter().enumerate() {
            if *wa == 0.0 {
                continue;
            }
            let xa = shifted(x, a, (ka as f64 - 2.0) * h);
            for (kb, wb) in w.iter().enumerate() {
                if *wb == 0.0 {
                    continue;
                }
                add(f(&shifted(&xa, b, (kb as f64 - 2.0) * h))?, wa * wb);
            }
        }
    }
    let acc = acc.expect("stencil has nonzero weights");
    check_finite(acc / (h * h), "second difference")
}

/// Finite-difference weights for the `order`-th derivative at 0 on the
/// integer nodes `-p..=p` (Fornberg's recursion).
pub fn stencil_weights(order: usize, p: usize) -> Vec<f64> {
    let nodes: Vec<f64> = (-(p as i64)..=p as i64).map(|k| k as f64).collect();
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c.swap_remove(order)
}

/// Half-width of the fourth-order central stencil for a derivative order.
pub fn stencil_half_width(order: usize) -> usize {
    order.div_ceil(2) + 1
}

/// Steps for `stencil_derivative` that keep round-off near 1e-11 for
/// unit-scale inputs; index = derivative order.
const STENCIL_STEPS: [f64; 6] = [0.0, 4.8828125e-4, 7.8125e-3, 3.125e-2, 0.125, 0.25];

/// Step for a derivative of the given order, scaled by `base / STENCIL_STEPS[1]`.
pub fn stencil_step(order: usize, base: f64) -> f64 {
    let idx = order.min(STENCIL_STEPS.len() - 1);
    STENCIL_STEPS[idx] * (base / STENCIL_STEPS[1])
}

/// Default base step for one-parameter maps (curves, fields along curves).
pub const CURVE_STEP: f64 = 4.8828125e-4;

/// Fourth-order accurate central derivative of a one-parameter map.
pub fn stencil_derivative<F>(f: F, t: f64, order: usize, h: f64) -> Result<Vector>
where
    F: Fn(f64) -> Result<Vector>,
{
    if order == 0 {
        return f(t);
    }
    let p = stencil_half_width(order);
    let w = stencil_weights(order, p);
    let mut acc: Option<Vector> = None;
    for (k, wk) in w.iter().enumerate() {
        if *wk == 0.0 {
            continue;
        }
        let offset = k as f64 - p as f64;
        let v = f(t + offset * h)? * *wk;
        acc = Some(match acc {
            Some(a) => a + v,
            None => v,
        });
    }
    let acc = acc.expect("stencil has nonzero weights");
    check_finite(acc / h.powi(order as i32), "stencil derivative")
}

/// An orthonormal basis of a linear subspace of R^n, stored as the columns
/// of an n×r matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    /// Wraps columns that are already orthonormal.
    pub fn from_orthonormal(basis: Matrix) -> Self {
        Self { basis }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            basis: Matrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            basis: Matrix::identity(ambient_dim, ambient_dim),
        }
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn vector(&self, i: usize) -> Vector {
        self.basis.column(i).into_owned()
    }

    pub fn vectors(&self) -> Vec<Vector> {
        (0..self.dim()).map(|i| self.vector(i)).collect()
    }

    pub fn projector(&self) -> Matrix {
        &self.basis * self.basis.transpose()
    }

    pub fn project(&self, v: &Vector) -> Vector {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Coordinates of `v` in this basis.
    pub fn coordinates(&self, v: &Vector) -> Vector {
        self.basis.transpose() * v
    }

    /// Distance from `v` to the subspace.
    pub fn distance(&self, v: &Vector) -> f64 {
        (v - self.project(v)).norm()
    }

    /// max |BᵀB − I|.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.basis.transpose() * &self.basis;
        let id = Matrix::identity(self.dim(), self.dim());
        (g - id).amax()
    }
}

/// Modified Gram–Schmidt with a second re-orthogonalization pass. Vectors
/// whose residual after projection is below `tol` are dropped.
pub fn orthonormalize(vectors: &[Vector], tol: f64) -> (Subspace, usize) {
    let n = vectors.first().map_or(0, |v| v.len());
    let mut kept: Vec<Vector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &kept {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm >= tol && norm.is_finite() {
            kept.push(w / norm);
        }
    }
    let rank = kept.len();
    let basis = if rank == 0 {
        Matrix::zeros(n, 0)
    } else {
        Matrix::from_columns(&kept)
    };
    (Subspace { basis }, rank)
}

/// Orthonormal basis of the orthogonal complement of `s` in R^`ambient_dim`.
/// Coordinate axes are added greedily, largest residual first.
pub fn orthogonal_complement(s: &Subspace, ambient_dim: usize) -> Subspace {
    let mut kept: Vec<Vector> = s.vectors();
    let start = kept.len();
    let target = ambient_dim.saturating_sub(start);
    let mut out = Vec::with_capacity(target);
    for _ in 0..target {
        let mut best: Option<(f64, Vector)> = None;
        for k in 0..ambient_dim {
            let mut w = Vector::zeros(ambient_dim);
            w[k] = 1.0;
            for _ in 0..2 {
                for q in &kept {
                    let c = q.dot(&w);
                    w.axpy(-c, q, 1.0);
                }
            }
            let norm = w.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > *b + 1e-12) {
                best = Some((norm, w));
            }
        }
        let (norm, w) = best.expect("ambient_dim > 0");
        let q = w / norm;
        kept.push(q.clone());
        out.push(q);
    }
    if out.is_empty() {
        Subspace::zero(ambient_dim)
    } else {
        Subspace::from_orthonormal(Matrix::from_columns(&out))
    }
}

/// Eigen-decomposition of a symmetric matrix: eigenvalues ascending,
/// eigenvectors as columns, each with its largest-magnitude entry positive.
pub fn sym_eig(m: &Matrix) -> (Vec<f64>, Matrix) {
    let k = m.nrows();
    if k == 0 {
        return (Vec::new(), Matrix::zeros(0, 0));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let cols: Vec<Vector> = order
        .iter()
        .map(|&i| {
            let v = eig.eigenvectors.column(i).into_owned();
            let max = v.amax();
            // first entry within rounding of the maximum decides the sign
            let lead = v
                .iter()
                .position(|c| c.abs() >= max - 1e-12)
                .unwrap_or(0);
            if v[lead] < 0.0 {
                -v
            } else {
                v
            }
        })
        .collect();
    (values, Matrix::from_columns(&cols))
}

/// Piecewise cubic Hermite interpolation of vector samples with known
/// derivatives. Outside the node range the end cubic is extrapolated.
#[derive(Debug, Clone)]
pub struct CubicHermite {
    x: Vec<f64>,
    y: Vec<Vector>,
    dy: Vec<Vector>,
}

impl CubicHermite {
    /// `x` must be strictly increasing with at least two nodes.
    pub fn new(x: Vec<f64>, y: Vec<Vector>, dy: Vec<Vector>) -> Self {
        assert!(x.len() >= 2 && x.len() == y.len() && y.len() == dy.len());
        debug_assert!(x.windows(2).all(|w| w[0] < w[1]));
        Self { x, y, dy }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[Vector] {
        &self.y
    }

    pub fn derivatives(&self) -> &[Vector] {
        &self.dy
    }

    fn locate(&self, t: f64) -> usize {
        match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.x.len() - 2),
        }
    }

    pub fn eval(&self, t: f64) -> Vector {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        &self.y[i] * h00 + &self.dy[i] * (h10 * h) + &self.y[i + 1] * h01 + &self.dy[i + 1] * (h11 * h)
    }

    pub fn eval_derivative(&self, t: f64) -> Vector {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let d00 = (6.0 * s2 - 6.0 * s) / h;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = (-6.0 * s2 + 6.0 * s) / h;
        let d11 = 3.0 * s2 - 2.0 * s;
        &self.y[i] * d00 + &self.dy[i] * d10 + &self.y[i + 1] * d01 + &self.dy[i + 1] * d11
    }
}

/// Frobenius-norm helper for matrices that may be empty.
pub fn frob(m: &Matrix) -> f64 {
    if m.is_empty() {
        0.0
    } else {
        m.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    #[test]
    fn central_diff_of_square() {
        let d = central_diff(|x: &Vector| Ok(v(&[x[0] * x[0]])), &v(&[1.0]), 0, 1e-4).unwrap();
        assert_abs_diff_eq!(d[0], 2.0, epsilon = 1e-7);
    }

    #[test]
    fn central_diff_of_constant_is_zero() {
        let d = central_diff(|_: &Vector| Ok(v(&[3.0, -1.0])), &v(&[0.7]), 0, 1e-4).unwrap();
        assert_eq!(d, v(&[0.0, 0.0]));
    }

    #[test]
    fn central_diff_of_circle() {
        let d = central_diff(
            |x: &Vector| Ok(v(&[x[0].sin(), x[0].cos()])),
            &v(&[0.0]),
            0,
            1e-4,
        )
        .unwrap();
        assert_abs_diff_eq!(d[0], 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(d[1], 0.0, epsilon = 1e-8);
    }

    #[test]
    fn central_diff_flags_non_finite() {
        let err = central_diff(|x: &Vector| Ok(v(&[x[0].ln()])), &v(&[0.0]), 0, 1e-4);
        assert!(matches!(err, Err(GeomError::NumericalDomain { .. })));
    }

    #[test]
    fn second_diff_cases() {
        let uv = |x: &Vector| Ok(v(&[x[0] * x[1]]));
        let d = second_diff(uv, &v(&[0.3, -2.0]), 0, 1, 1e-4).unwrap();
        assert_abs_diff_eq!(d[0], 1.0, epsilon = 1e-6);

        let lin = |x: &Vector| Ok(v(&[2.0 * x[0] - x[1], x[1]]));
        let d = second_diff(lin, &v(&[0.3, -2.0]), 0, 0, 1e-4).unwrap();
        assert_abs_diff_eq!(d.amax(), 0.0, epsilon = 1e-6);

        let cyl = |x: &Vector| Ok(v(&[x[0].cos(), x[0].sin(), x[1]]));
        let d = second_diff(cyl, &v(&[0.0, 0.0]), 0, 0, 1e-4).unwrap();
        assert_abs_diff_eq!(d[0], -1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(d[1], 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(d[2], 0.0, epsilon = 1e-6);
    }

    #[test]
    fn second_diff_is_symmetric() {
        let f = |x: &Vector| Ok(v(&[(x[0] * x[1]).sin(), x[0].exp() * x[1]]));
        let x = v(&[0.4, 1.1]);
        let a = second_diff(f, &x, 0, 1, 1e-4).unwrap();
        let b = second_diff(f, &x, 1, 0, 1e-4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fourth_order_second_diff() {
        let f = |x: &Vector| Ok(v(&[(x[0] * x[1]).sin(), x[0].exp() * x[1].cos()]));
        let x = v(&[0.4, 1.1]);
        let h = hessian_step(&x);
        let d01 = second_diff_fourth_order(f, &x, 0, 1, h).unwrap();
        let d10 = second_diff_fourth_order(f, &x, 1, 0, h).unwrap();
        assert_eq!(d01, d10);
        let (a, b) = (0.4f64, 1.1f64);
        let exact01 = (a * b).cos() - a * b * (a * b).sin();
        assert_abs_diff_eq!(d01[0], exact01, epsilon = 1e-10);
        assert_abs_diff_eq!(d01[1], -a.exp() * b.sin(), epsilon = 1e-10);
        let d00 = second_diff_fourth_order(f, &x, 0, 0, h).unwrap();
        assert_abs_diff_eq!(d00[0], -b * b * (a * b).sin(), epsilon = 1e-10);
        assert_abs_diff_eq!(d00[1], a.exp() * b.cos(), epsilon = 1e-10);
    }

    #[test]
    fn stencil_weights_match_textbook() {
        let w1 = stencil_weights(1, 2);
        let expect = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
        for (a, b) in w1.iter().zip(expect) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        let w2 = stencil_weights(2, 2);
        let expect = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
        for (a, b) in w2.iter().zip(expect) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        let w3 = stencil_weights(3, 3);
        let expect = [1.0 / 8.0, -1.0, 13.0 / 8.0, 0.0, -13.0 / 8.0, 1.0, -1.0 / 8.0];
        for (a, b) in w3.iter().zip(expect) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn stencil_derivatives_of_sine() {
        let f = |t: f64| Ok(v(&[t.sin()]));
        let t: f64 = 0.7;
        let exact = [t.sin(), t.cos(), -t.sin(), -t.cos(), t.sin()];
        for (order, e) in exact.iter().enumerate().skip(1) {
            let d = stencil_derivative(f, t, order, stencil_step(order, CURVE_STEP)).unwrap();
            let tol = [0.0, 1e-11, 1e-9, 1e-7, 1e-4][order];
            assert_abs_diff_eq!(d[0], *e, epsilon = tol);
        }
    }

    #[test]
    fn orthonormalize_examples() {
        let (s, r) = orthonormalize(&[v(&[1.0, 0.0]), v(&[0.0, 1.0])], 1e-10);
        assert_eq!(r, 2);
        assert_eq!(s.basis(), &Matrix::identity(2, 2));

        let (_, r) = orthonormalize(&[v(&[1.0, 0.0, 0.0]), v(&[2.0, 0.0, 0.0])], 1e-10);
        assert_eq!(r, 1);

        let (s, r) = orthonormalize(&[v(&[1.0, 1.0, 0.0]), v(&[1.0, 0.0, 0.0])], 1e-10);
        assert_eq!(r, 2);
        let h = 0.5f64.sqrt();
        assert_abs_diff_eq!(s.vector(0), v(&[h, h, 0.0]), epsilon = 1e-15);
        // hand Gram–Schmidt: e1 - (e1·q1) q1 = (1/2, -1/2, 0)
        assert_abs_diff_eq!(s.vector(1), v(&[h, -h, 0.0]), epsilon = 1e-15);
    }

    #[test]
    fn orthonormalize_empty_is_rank_zero() {
        let (s, r) = orthonormalize(&[], 1e-10);
        assert_eq!(r, 0);
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn complement_examples() {
        let (e1, _) = orthonormalize(&[v(&[1.0, 0.0, 0.0])], 1e-10);
        let c = orthogonal_complement(&e1, 3);
        assert_eq!(c.dim(), 2);
        assert_abs_diff_eq!((c.basis().transpose() * e1.basis()).amax(), 0.0, epsilon = 1e-12);

        let c = orthogonal_complement(&Subspace::full(3), 3);
        assert_eq!(c.dim(), 0);

        let (d, _) = orthonormalize(&[v(&[1.0, 1.0, 0.0])], 1e-10);
        let c = orthogonal_complement(&d, 3);
        let sum = d.projector() + c.projector();
        assert_abs_diff_eq!((sum - Matrix::identity(3, 3)).amax(), 0.0, epsilon = 1e-12);
        let h = 0.5f64.sqrt();
        assert_abs_diff_eq!(c.distance(&v(&[h, -h, 0.0])), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.distance(&v(&[0.0, 0.0, 1.0])), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn sym_eig_examples() {
        let (vals, _) = sym_eig(&Matrix::identity(2, 2));
        assert_eq!(vals, vec![1.0, 1.0]);

        let (vals, vecs) = sym_eig(&Matrix::from_diagonal(&v(&[0.0, -1.0])));
        assert_eq!(vals, vec![-1.0, 0.0]);
        assert_abs_diff_eq!(vecs.column(0).into_owned(), v(&[0.0, 1.0]), epsilon = 1e-15);
        assert_abs_diff_eq!(vecs.column(1).into_owned(), v(&[1.0, 0.0]), epsilon = 1e-15);

        let m = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (vals, vecs) = sym_eig(&m);
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-12);
        let h = 0.5f64.sqrt();
        // sign rule: largest-magnitude entry positive, first one on ties
        assert_abs_diff_eq!(vecs.column(0).into_owned(), v(&[h, -h]), epsilon = 1e-12);
        assert_abs_diff_eq!(vecs.column(1).into_owned(), v(&[h, h]), epsilon = 1e-12);
    }

    #[test]
    fn tolerance_profile_overrides() {
        let mut t = ToleranceProfile::default();
        t.set("loc", 1e-3).unwrap();
        assert_eq!(t.loc, 1e-3);
        assert!(t.set("nope", 1.0).is_err());
        assert!(t.set("loc", -1.0).is_err());
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let f = |t: f64| t * t * t - 2.0 * t + 1.0;
        let df = |t: f64| 3.0 * t * t - 2.0;
        let xs = vec![0.0, 0.5, 1.5, 2.0];
        let herm = CubicHermite::new(
            xs.clone(),
            xs.iter().map(|&t| v(&[f(t)])).collect(),
            xs.iter().map(|&t| v(&[df(t)])).collect(),
        );
        for t in [0.1, 0.7, 1.2, 1.99, 2.3, -0.2] {
            assert_abs_diff_eq!(herm.eval(t)[0], f(t), epsilon = 1e-12);
            assert_abs_diff_eq!(herm.eval_derivative(t)[0], df(t), epsilon = 1e-12);
        }
    }
}
