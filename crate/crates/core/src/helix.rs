//! Helix directions: angle tests, tangent/normal decomposition of a fixed
//! direction, and estimation of the helix-direction space H(M).
//!
//! Angle convention: the angle between a unit `d` and T_pM is
//! `arcsin ‖(I − P_tan) d‖ ∈ [0, π/2]` (computed as an `atan2` for
//! conditioning). The decomposition angle θ of
//! `d = cos θ · ξ + sin θ · T` is the complementary one: `cos θ = ‖normal part‖`.

use std::sync::Arc;

use serde::Serialize;

use crate::curves::stats;
use crate::error::{GeomError, Result};
use crate::manifold::{point_frame, ImmersedPatch, PointFrame, VectorField};
use crate::numerics::{orthogonal_complement, sym_eig, Matrix, Subspace, Vector};

/// Below this norm a tangent or normal part counts as zero.
pub const DEGENERATE_TOL: f64 = 1e-8;

/// `d = cos θ · ξ + sin θ · t_dir` with unit `ξ` normal and unit `t_dir`
/// tangent. A vanishing part is flagged and stored as the zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionDecomposition {
    pub d: Vector,
    pub theta: f64,
    pub xi: Vector,
    pub t_dir: Vector,
    pub normal_degenerate: bool,
    pub tangent_degenerate: bool,
}

impl DirectionDecomposition {
    pub fn reconstruct(&self) -> Vector {
        &self.xi * self.theta.cos() + &self.t_dir * self.theta.sin()
    }

    /// <v, ξ>, exactly 0 when ξ is flagged.
    pub fn dot_xi(&self, v: &Vector) -> f64 {
        if self.normal_degenerate {
            0.0
        } else {
            v.dot(&self.xi)
        }
    }

    /// <v, T_j>, exactly 0 when T_j is flagged.
    pub fn dot_t(&self, v: &Vector) -> f64 {
        if self.tangent_degenerate {
            0.0
        } else {
            v.dot(&self.t_dir)
        }
    }
}

fn check_unit(d: &Vector) -> Result<()> {
    let err = (d.norm() - 1.0).abs();
    if err > 1e-8 {
        return Err(GeomError::BadParameter {
            name: "direction".into(),
            reason: format!("must be a unit vector (|‖d‖ - 1| = {err:e})"),
        });
    }
    Ok(())
}

/// Angle between `d` and the tangent space, in [0, π/2].
pub fn tangent_angle(frame: &PointFrame, d: &Vector) -> f64 {
    let t = frame.tangent_part(d);
    let n = d - &t;
    n.norm().atan2(t.norm())
}

pub fn decompose_direction(frame: &PointFrame, d: &Vector) -> Result<DirectionDecomposition> {
    check_unit(d)?;
    let p_t = frame.tangent_part(d);
    let p_n = d - &p_t;
    let (nt, nn) = (p_t.norm(), p_n.norm());
    let normal_degenerate = nn < DEGENERATE_TOL;
    let tangent_degenerate = nt < DEGENERATE_TOL;
    let zero = Vector::zeros(d.len());
    Ok(DirectionDecomposition {
        d: d.clone(),
        theta: nt.atan2(nn),
        xi: if normal_degenerate { zero.clone() } else { p_n / nn },
        t_dir: if tangent_degenerate { zero } else { p_t / nt },
        normal_degenerate,
        tangent_degenerate,
    })
}

/// Unit normal component of a fixed direction, as a field over the chart.
pub fn normal_component_field(patch: Arc<ImmersedPatch>, d: Vector) -> VectorField {
    Arc::new(move |u: &Vector| {
        let frame = point_frame(&patch, u)?;
        let dec = decompose_direction(&frame, &d)?;
        if dec.normal_degenerate {
            return Err(GeomError::DegenerateDecomposition {
                t: f64::NAN,
                part: "normal",
            });
        }
        Ok(dec.xi)
    })
}

/// Unit tangent component of a fixed direction, as a field over the chart.
pub fn tangent_component_field(patch: Arc<ImmersedPatch>, d: Vector) -> VectorField {
    Arc::new(move |u: &Vector| {
        let frame = point_frame(&patch, u)?;
        let dec = decompose_direction(&frame, &d)?;
        if dec.tangent_degenerate {
            return Err(GeomError::DegenerateDecomposition {
                t: f64::NAN,
                part: "tangent",
            });
        }
        Ok(dec.t_dir)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HelixDirectionReport {
    pub d: Vec<f64>,
    pub angles: Vec<f64>,
    pub mean: f64,
    pub stddev: f64,
    pub spread: f64,
    pub is_helix: bool,
    pub tol: f64,
}

pub fn is_helix_direction(
    patch: &ImmersedPatch,
    d: &Vector,
    sample_us: &[Vector],
    tol: f64,
) -> Result<HelixDirectionReport> {
    if sample_us.len() < 8 {
        return Err(GeomError::TooFewSamples {
            needed: 8,
            found: sample_us.len(),
        });
    }
    check_unit(d)?;
    let angles = sample_us
        .iter()
        .map(|u| point_frame(patch, u).map(|f| tangent_angle(&f, d)))
        .collect::<Result<Vec<_>>>()?;
    let (mean, stddev, min, max) = stats(&angles);
    let spread = max - min;
    Ok(HelixDirectionReport {
        d: d.iter().copied().collect(),
        angles,
        mean,
        stddev,
        spread,
        is_helix: spread <= tol,
        tol,
    })
}

/// Estimated basis of H(M) together with the samples it was fitted on.
#[derive(Debug, Clone)]
pub struct HelixSpace {
    pub basis: Subspace,
    /// max_i ‖Bᵀ (P_i − P̄) B‖ over the samples (Frobenius norm).
    pub residual: f64,
    pub sample_count: usize,
    pub samples: Vec<Vector>,
}

/// SplitMix64, used only to seed deterministic restarts.
struct SplitMix(u64);

impl SplitMix {
    fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }
}

/// Residuals of a candidate direction y (reduced coordinates): the restricted
/// quadratic forms yᵀR_i y and the couplings s_kᵀ y to already accepted
/// directions.
struct IsotropyProblem {
    forms: Vec<Matrix>,
    couplings: Vec<Vector>,
}

impl IsotropyProblem {
    fn residuals(&self, y: &Vector) -> Vector {
        let mut r = Vec::with_capacity(self.forms.len() + self.couplings.len());
        r.extend(self.forms.iter().map(|m| y.dot(&(m * y))));
        r.extend(self.couplings.iter().map(|s| s.dot(y)));
        Vector::from_vec(r)
    }

    fn jacobian(&self, y: &Vector) -> Matrix {
        let rows = self.forms.len() + self.couplings.len();
        let mut j = Matrix::zeros(rows, y.len());
        for (i, m) in self.forms.iter().enumerate() {
            j.set_row(i, &(m * y * 2.0).transpose());
        }
        for (k, s) in self.couplings.iter().enumerate() {
            j.set_row(self.forms.len() + k, &s.transpose());
        }
        j
    }

    /// Levenberg–Marquardt on the unit sphere; returns the final point and
    /// its worst residual.
    fn solve(&self, start: &Vector) -> (Vector, f64) {
        let mut y = start.normalize();
        let mut r = self.residuals(&y);
        let mut cost = r.norm_squared();
        let mut mu = 1e-3;
        for _ in 0..100 {
            if r.amax() < 1e-15 {
                break;
            }
            let j = self.jacobian(&y);
            let jtj = j.transpose() * &j;
            let g = j.transpose() * &r;
            let mut improved = false;
            for _ in 0..12 {
                let lhs = &jtj + Matrix::identity(y.len(), y.len()) * (mu * (1.0 + jtj.trace()));
                let Some(step) = lhs.lu().solve(&(-&g)) else {
                    mu *= 10.0;
                    continue;
                };
                let step = &step - &y * y.dot(&step);
                let cand = (&y + step).normalize();
                let rc = self.residuals(&cand);
                let cc = rc.norm_squared();
                if cc < cost {
                    y = cand;
                    r = rc;
                    cost = cc;
                    mu = (mu * 0.3).max(1e-12);
                    improved = true;
                    break;
                }
                mu *= 10.0;
            }
            if !improved {
                break;
            }
        }
        let worst = r.amax();
        (y, worst)
    }
}

fn sign_normalized(v: Vector) -> Vector {
    let max = v.amax();
    let lead = v.iter().position(|c| c.abs() >= max - 1e-12).unwrap_or(0);
    if v[lead] < 0.0 {
        -v
    } else {
        v
    }
}

/// Estimate H(M) from tangent projectors P_i at the samples.
///
/// A unit d is a helix direction exactly when dᵀ M_i d = 0 for every
/// M_i = P_i − P̄, and for a linear H(M) every bilinear form dᵀ M_i e
/// vanishes on H(M). Directions are added one at a time: each round searches
/// the orthogonal complement of the directions accepted so far for a unit
/// vector whose restricted forms and couplings to the accepted ones vanish
/// (Levenberg–Marquardt from deterministic restarts), and stops when none
/// reaches `tol`.
pub fn estimate_helix_space(
    patch: &ImmersedPatch,
    sample_us: &[Vector],
    tol: f64,
) -> Result<HelixSpace> {
    if sample_us.len() < 16 {
        return Err(GeomError::TooFewSamples {
            needed: 16,
            found: sample_us.len(),
        });
    }
    let n = patch.ambient_dim();
    let projectors = sample_us
        .iter()
        .map(|u| point_frame(patch, u).map(|f| f.p_tan))
        .collect::<Result<Vec<_>>>()?;
    let mean = projectors.iter().fold(Matrix::zeros(n, n), |acc, p| acc + p)
        / projectors.len() as f64;
    let variations: Vec<Matrix> = projectors.iter().map(|p| p - &mean).collect();

    let mut rng = SplitMix(0x5EED_0F4E_11C5);
    let mut accepted: Vec<Vector> = Vec::new();
    while accepted.len() < n {
        let current = if accepted.is_empty() {
            Subspace::zero(n)
        } else {
            Subspace::from_orthonormal(Matrix::from_columns(&accepted))
        };
        let comp = orthogonal_complement(&current, n);
        let c = comp.basis();
        let r = comp.dim();
        let problem = IsotropyProblem {
            forms: variations.iter().map(|m| c.transpose() * m * c).collect(),
            couplings: variations
                .iter()
                .flat_map(|m| accepted.iter().map(move |w| c.transpose() * (m * w)))
                .collect(),
        };
        let mut gram = Matrix::zeros(r, r);
        for f in &problem.forms {
            gram += f * f;
        }
        for s in &problem.couplings {
            gram += s * s.transpose();
        }
        let (_, eigvecs) = sym_eig(&gram);
        let mut starts: Vec<Vector> = eigvecs.column_iter().map(|c| c.into_owned()).collect();
        starts.extend((0..r).map(|k| {
            let mut e = Vector::zeros(r);
            e[k] = 1.0;
            e
        }));
        for _ in 0..4 {
            starts.push(Vector::from_fn(r, |_, _| rng.next_f64()));
        }
        let found = starts
            .iter()
            .filter(|s| s.norm() > 1e-12)
            .map(|s| problem.solve(s))
            .find(|(_, worst)| *worst <= tol);
        match found {
            Some((y, _)) => {
                let w = c * y;
                accepted.push(w.normalize());
            }
            None => break,
        }
    }

    let basis = if accepted.is_empty() {
        Subspace::zero(n)
    } else {
        let cols: Vec<Vector> = accepted.into_iter().map(sign_normalized).collect();
        Subspace::from_orthonormal(Matrix::from_columns(&cols))
    };
    let residual = variations
        .iter()
        .map(|m| {
            let b = basis.basis();
            if b.ncols() == 0 {
                0.0
            } else {
                (b.transpose() * m * b).norm()
            }
        })
        .fold(0.0, f64::max);
    Ok(HelixSpace {
        basis,
        residual,
        sample_count: sample_us.len(),
        samples: sample_us.to_vec(),
    })
}

/// Mean and standard deviation of the tangent angle of `d` over the samples
/// stored with `space`.
pub fn helix_angle_of(space: &HelixSpace, patch: &ImmersedPatch, d: &Vector) -> Result<(f64, f64)> {
    check_unit(d)?;
    let distance = space.basis.distance(d);
    if distance > 1e-6 {
        return Err(GeomError::NotInSpace { distance });
    }
    let angles = space
        .samples
        .iter()
        .map(|u| point_frame(patch, u).map(|f| tangent_angle(&f, d)))
        .collect::<Result<Vec<_>>>()?;
    let (mean, stddev, _, _) = stats(&angles);
    Ok((mean, stddev))
}
