//! Built-in submanifolds with known helix structure and curve fixtures on
//! them.

pub mod expr;

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::Arc;

use crate::curves::ParamCurve;
use crate::error::{GeomError, Result};
use crate::manifold::{BoxDomain, ImmersedPatch};
use crate::numerics::{Matrix, Subspace, Vector};

pub use expr::{parse_curve, parse_immersion, parse_immersion_with};

pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
}

type EntryBuilder = fn(&Params) -> Result<(ImmersedPatch, Option<Subspace>)>;
type CurveBuilder = fn(&Arc<ImmersedPatch>, &Params, &Params) -> Result<ParamCurve>;

/// A named unit-speed curve on a catalog patch.
#[derive(Debug, Clone, Copy)]
pub struct CurveFixture {
    pub name: &'static str,
    pub params: &'static [ParamSpec],
    build: CurveBuilder,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub params: Params,
    pub patch: Arc<ImmersedPatch>,
    pub known_helix_space: Option<Subspace>,
    pub curves: &'static [CurveFixture],
}

impl CatalogEntry {
    pub fn curve_names(&self) -> Vec<&'static str> {
        self.curves.iter().map(|c| c.name).collect()
    }

    /// Builds a curve fixture; unspecified parameters take their defaults.
    pub fn curve(&self, name: &str, params: &Params) -> Result<ParamCurve> {
        let fixture = self
            .curves
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| GeomError::UnknownEntry(format!("{}/{}", self.name, name)))?;
        let cp = resolve(fixture.params, params)?;
        (fixture.build)(&self.patch, &self.params, &cp)
    }
}

struct EntrySpec {
    name: &'static str,
    params: &'static [ParamSpec],
    build: EntryBuilder,
    curves: &'static [CurveFixture],
}

/// One row of `catalog_list`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryInfo {
    pub name: &'static str,
    pub params: Vec<ParamSpec>,
    pub param_dim: usize,
    pub ambient_dim: usize,
    pub helix_dim: Option<usize>,
    pub curves: Vec<&'static str>,
}

fn resolve(specs: &[ParamSpec], given: &Params) -> Result<Params> {
    for key in given.keys() {
        if !specs.iter().any(|s| s.name == key) {
            return Err(GeomError::BadParameter {
                name: key.clone(),
                reason: "unknown parameter".into(),
            });
        }
    }
    let mut out = Params::new();
    for s in specs {
        let v = given.get(s.name).copied().unwrap_or(s.default);
        if !v.is_finite() {
            return Err(GeomError::BadParameter {
                name: s.name.into(),
                reason: "must be finite".into(),
            });
        }
        out.insert(s.name.to_string(), v);
    }
    Ok(out)
}

fn v(xs: &[f64]) -> Vector {
    Vector::from_column_slice(xs)
}

fn axes(n: usize, idx: &[usize]) -> Subspace {
    let mut b = Matrix::zeros(n, idx.len());
    for (c, &i) in idx.iter().enumerate() {
        b[(i, c)] = 1.0;
    }
    Subspace::from_orthonormal(b)
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        Err(GeomError::BadParameter {
            name: name.into(),
            reason: "must be positive".into(),
        })
    }
}

fn p(params: &Params, key: &str) -> f64 {
    params[key]
}

fn unit_curve<F>(patch: &Arc<ImmersedPatch>, t1: f64, u: F) -> ParamCurve
where
    F: Fn(f64) -> Vector + Send + Sync + 'static,
{
    ParamCurve::new(patch.clone(), move |t| Ok(u(t)), 0.0, t1)
}

// plane

fn plane(_: &Params) -> Result<(ImmersedPatch, Option<Subspace>)> {
    let patch = ImmersedPatch::new(
        "plane",
        2,
        3,
        BoxDomain::cube(2, -10.0, 10.0)?,
        |u: &Vector| Ok(v(&[u[0], u[1], 0.0])),
    )?
    .with_jacobian(|_: &Vector| Ok(Matrix::identity(3, 2)))
    .with_hessian(|_: &Vector| Ok(vec![vec![Vector::zeros(3); 2]; 2]))
    .with_sample_box(BoxDomain::cube(2, -1.0, 1.0)?)?;
    Ok((patch, Some(Subspace::full(3))))
}

const PLANE_CURVES: &[CurveFixture] = &[
    CurveFixture {
        name: "circle",
        params: &[ParamSpec { name: "radius", default: 1.0 }],
        build: |patch, _, cp| {
            let r = p(cp, "radius");
            positive("radius", r)?;
            Ok(unit_curve(patch, 2.0 * PI * r, move |t| v(&[r * (t / r).cos(), r * (t / r).sin()])))
        },
    },
    CurveFixture {
        name: "line",
        params: &[ParamSpec { name: "angle", default: 0.0 }],
        build: |patch, _, cp| {
            let (s, c) = p(cp, "angle").sin_cos();
            Ok(unit_curve(patch, 2.0, move |t| v(&[t * c, t * s])))
        },
    },
];

// cylinder

fn cylinder(params: &Params) -> Result<(ImmersedPatch, Option<Subspace>)> {
    let r = p(params, "radius");
    positive("radius", r)?;
    let patch = ImmersedPatch::new(
        "cylinder",
        2,
        3,
        BoxDomain::new(vec![-4.0 * PI, -20.0], vec![4.0 * PI, 20.0])?,
        move |u: &Vector| Ok(v(&[r * u[0].cos(), r * u[0].sin(), u[1]])),
    )?
    .with_sample_box(BoxDomain::new(vec![0.0, -1.0], vec![2.0 * PI, 1.0])?)?;
    Ok((patch, Some(axes(3, &[2]))))
}

const CYLINDER_CURVES: &[CurveFixture] = &[
    CurveFixture {
        name: "helix",
        params: &[ParamSpec { name: "alpha", default: FRAC_PI_4 }],
        build: |patch, sp, cp| {
            let r = p(sp, "radius");
            let (s, c) = p(cp, "alpha").sin_cos();
            Ok(unit_curve(patch, 2.0 * PI, move |t| v(&[t * c / r, t * s])))
        },
    },
    CurveFixture {
        name: "ruling",
        params: &[ParamSpec { name: "u0", default: 0.0 }],
        build: |patch, _, cp| {
            let u0 = p(cp, "u0");
            Ok(unit_curve(patch, 2.0, move |t| v(&[u0, t])))
        },
    },
    CurveFixture {
        name: "u_circle",
        params: &[ParamSpec { name: "v0", default: 0.0 }],
        build: |patch, sp, cp| {
            let r = p(sp, "radius");
            let v0 = p(cp, "v0");
            Ok(unit_curve(patch, 2.0 * PI * r, move |t| v(&[t / r, v0])))
        },
    },
];

// cone

fn cone(params: &Params) -> Result<(ImmersedPatch, Option<Subspace>)> {
    let beta = p(params, "beta");
    if !(beta > 0.0 && beta < PI / 2.0) {
        return Err(GeomError::BadParameter {
            name: "beta".into(),
            reason: "must lie in (0, pi/2)".into(),
        });
    }
    let (sb, cb) = beta.sin_cos();
    let patch = ImmersedPatch::new(
        "cone",
        2,
        3,
        BoxDomain::new(vec![-4.0 * PI, 0.1], vec![4.0 * PI, 10.0])?,
        move |u: &Vector| Ok(v(&[u[1] * sb * u[0].cos(), u[1] * sb * u[0].sin(), u[1] * cb])),
    )?
    .with_sample_box(BoxDomain::new(vec![0.0, 0.5], vec![2.0 * PI, 2.0])?)?;
    Ok((patch, Some(axes(3, &[2]))))
}

const CONE_CURVES: &[CurveFixture] = &[
    CurveFixture {
        name: "ruling",
        params: &[ParamSpec { name: "u0", default: 0.0 }],
        build: |patch, _, cp| {
            let u0 = p(cp, "u0");
            Ok(unit_curve(patch, 1.5, move |t| v(&[u0, 0.5 + t])))
        },
    },
    CurveFixture {
        // crosses every ruling at the angle psi
        name: "spiral",
        params: &[
            ParamSpec { name: "psi", default: FRAC_PI_4 },
            ParamSpec { name: "v0", default: 1.0 },
        ],
        build: |patch, sp, cp| {
            let sb = p(sp, "beta").sin();
            let (psi, v0) = (p(cp, "psi"), p(cp, "v0"));
            positive("v0", v0)?;
            let (s, c) = psi.sin_cos();
            if !(c > 1e-3 && s > 1e-3) {
                return Err(GeomError::BadParameter {
                    name: "psi".into(),
                    reason: "must lie strictly inside (0, pi/2)".into(),
                });
            }
            Ok(unit_curve(patch, 1.0, move |t| {
                let r = v0 + t * c;
                v(&[s / (sb * c) * (r / v0).ln(), r])
            }))
        },
    },
    CurveFixture {
        name: "u_circle",
        params: &[ParamSpec { name: "v0", default: 1.0 }],
        build: |patch, sp, cp| {
            let sb = p(sp, "beta").sin();
            let v0 = p(cp, "v0");
            positive("v0", v0)?;
            let r = v0 * sb;
            Ok(unit_curve(patch, 2.0 * PI * r, move |t| v(&[t / r, v0])))
        },
    },
];

// sphere

fn sphere(_: &Params) -> Result<(ImmersedPatch, Option<Subspace>)> {
    let patch = ImmersedPatch::new(
        "sphere",
        2,
        3,
        BoxDomain::new(vec![-4.0 * PI, -1.4], vec![4.0 * PI, 1.4])?,
        |u: &Vector| {
            let (cu, su, cv, sv) = (u[0].cos(), u[0].sin(), u[1].cos(), u[1].sin());
            Ok(v(&[cv * cu, cv * su, sv]))
        },
    )?
    .with_sample_box(BoxDomain::new(vec![0.0, -1.2], vec![2.0 * PI, 1.2])?)?;
    Ok((patch, Some(Subspace::zero(3))))
}

const SPHERE_CURVES: &[CurveFixture] = &[
    CurveFixture {
        name: "equator",
        params: &[],
        build: |patch, _, _| Ok(unit_curve(patch, 2.0 * PI, |t| v(&[t, 0.0]))),
    },
    CurveFixture {
        name: "latitude",
        params: &[ParamSpec { name: "phi", default: FRAC_PI_4 }],
        build: |patch, _, cp| {
            let phi = p(cp, "phi");
            let c = phi.cos();
            if !(phi.abs() < 1.4) {
                return Err(GeomError::BadParameter {
                    name: "phi".into(),
                    reason: "must lie in (-1.4, 1.4)".into(),
                });
            }
            Ok(unit_curve(patch, 2.0 * PI * c, move |t| v(&[t / c, phi])))
        },
    },
    CurveFixture {
        name: "meridian",
        params: &[ParamSpec { name: "u0", default: 0.0 }],
        build: |patch, _, cp| {
            let u0 = p(cp, "u0");
            Ok(unit_curve(patch, 2.4, move |t| v(&[u0, t - 1.2])))
        },
    },
];

// S¹ × R^k ⊂ R^(k+2)

fn s1_product(name: &str, k: usize) -> Result<ImmersedPatch> {
    let m = k + 1;
    let mut lo = vec![-4.0 * PI];
    let mut hi = vec![4.0 * PI];
    lo.extend(std::iter::repeat_n(-20.0, k));
    hi.extend(std::iter::repeat_n(20.0, k));
    // a full period sampled 4 times aliases: |cos u| would be constant
    let mut slo = vec![0.0];
    let mut shi = vec![5.0];
    slo.extend(std::iter::repeat_n(-1.0, k));
    shi.extend(std::iter::repeat_n(1.0, k));
    ImmersedPatch::new(name, m, m + 1, BoxDomain::new(lo, hi)?, |u: &Vector| {
        let mut x = Vec::with_capacity(u.len() + 1);
        x.push(u[0].cos());
        x.push(u[0].sin());
        x.extend(u.iter().skip(1));
        Ok(Vector::from_vec(x))
    })?
    .with_sample_box(BoxDomain::new(slo, shi)?)
}

fn torus_product(_: &Params) -> Result<(ImmersedPatch, Option<Subspace>)> {
    Ok((s1_product("torus_product", 2)?, Some(axes(4, &[2, 3]))))
}

fn product_s1_r3(_: &Params) -> Result<(ImmersedPatch, Option<Subspace>)> {
    Ok((s1_product("product_s1_r3", 3)?, Some(axes(5, &[2, 3, 4]))))
}

const TORUS_PRODUCT_CURVES: &[CurveFixture] = &[CurveFixture {
    name: "u_circle",
    params: &[],
    build: |patch, _, _| Ok(unit_curve(patch, 2.0 * PI, |t| v(&[t, 0.0, 0.0]))),
}];

const PRODUCT_S1_R3_CURVES: &[CurveFixture] = &[
    CurveFixture {
        // fixed point of the circle factor times a circular helix in the
        // flat factor, axis along the last coordinate
        name: "flat_helix",
        params: &[ParamSpec { name: "a", default: 1.0 }, ParamSpec { name: "b", default: 1.0 }],
        build: |patch, _, cp| {
            let (a, b) = (p(cp, "a"), p(cp, "b"));
            positive("a", a)?;
            let c = a.hypot(b);
            Ok(unit_curve(patch, 2.0 * PI, move |t| {
                let s = t / c;
                v(&[0.0, a * s.cos(), a * s.sin(), b * s])
            }))
        },
    },
    CurveFixture {
        name: "u_circle",
        params: &[],
        build: |patch, _, _| Ok(unit_curve(patch, 2.0 * PI, |t| v(&[t, 0.0, 0.0, 0.0]))),
    },
];

const REGISTRY: &[EntrySpec] = &[
    EntrySpec {
        name: "cone",
        params: &[ParamSpec { name: "beta", default: FRAC_PI_4 }],
        build: cone,
        curves: CONE_CURVES,
    },
    EntrySpec {
        name: "cylinder",
        params: &[ParamSpec { name: "radius", default: 1.0 }],
        build: cylinder,
        curves: CYLINDER_CURVES,
    },
    EntrySpec {
        name: "plane",
        params: &[],
        build: plane,
        curves: PLANE_CURVES,
    },
    EntrySpec {
        name: "product_s1_r3",
        params: &[],
        build: product_s1_r3,
        curves: PRODUCT_S1_R3_CURVES,
    },
    EntrySpec {
        name: "sphere",
        params: &[],
        build: sphere,
        curves: SPHERE_CURVES,
    },
    EntrySpec {
        name: "torus_product",
        params: &[],
        build: torus_product,
        curves: TORUS_PRODUCT_CURVES,
    },
];

pub fn catalog_get(name: &str, params: &Params) -> Result<CatalogEntry> {
    let spec = REGISTRY
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| GeomError::UnknownEntry(name.to_string()))?;
    let params = resolve(spec.params, params)?;
    let (patch, known_helix_space) = (spec.build)(&params)?;
    Ok(CatalogEntry {
        name: spec.name,
        params,
        patch: Arc::new(patch),
        known_helix_space,
        curves: spec.curves,
    })
}

/// All entries with default parameters, sorted by name.
pub fn catalog_list() -> Vec<EntryInfo> {
    let mut out: Vec<EntryInfo> = REGISTRY
        .iter()
        .map(|spec| {
            let entry = catalog_get(spec.name, &Params::new()).expect("defaults are valid");
            EntryInfo {
                name: spec.name,
                params: spec.params.to_vec(),
                param_dim: entry.patch.param_dim(),
                ambient_dim: entry.patch.ambient_dim(),
                helix_dim: entry.known_helix_space.map(|s| s.dim()),
                curves: spec.curves.iter().map(|c| c.name).collect(),
            }
        })
        .collect();
    out.sort_by(|a, b| a.name.cmp(b.name));
    out
}
