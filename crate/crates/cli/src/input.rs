use std::fmt;
use std::sync::Arc;

use helixgeom::catalog::expr::{builtin_params, chart_vars, eval_ast, parse_list, DEFAULT_BOX};
use helixgeom::catalog::{catalog_get, parse_immersion_with, CatalogEntry, Params};
use helixgeom::manifold::{BoxDomain, ImmersedPatch};
use helixgeom::numerics::{ToleranceProfile, Vector};
use helixgeom::{GeomError, ParseError};
use serde_json::{json, Value};

use crate::render::num;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse {
        flag: String,
        text: String,
        error: ParseError,
    },
    Geom(GeomError),
    Io(std::io::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn parse(flag: &str, text: &str, error: ParseError) -> Self {
        CliError::Parse {
            flag: flag.to_string(),
            text: text.to_string(),
            error,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => 2,
            CliError::Geom(e) => match e {
                GeomError::Parse(_)
                | GeomError::UnknownEntry(_)
                | GeomError::BadParameter { .. }
                | GeomError::DimensionMismatch { .. }
                | GeomError::TooFewSamples { .. } => 2,
                GeomError::RankDeficient { .. }
                | GeomError::UmbilicEncountered { .. }
                | GeomError::LeftDomain { .. } => 4,
                _ => 1,
            },
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Parse { flag, text, error } => {
                write!(f, "cannot parse {flag}: {error}")?;
                if let Some(p) = error.position() {
                    write!(f, "\n  {text}\n  {}^", " ".repeat(p.saturating_sub(1)))?;
                }
                Ok(())
            }
            CliError::Geom(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        CliError::Geom(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Comma-separated constant expressions, e.g. "0, pi/2".
pub fn numbers(flag: &str, text: &str) -> CliResult<Vec<f64>> {
    let params = builtin_params();
    let trimmed = text.trim();
    let inner = trimmed
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .filter(|s| parse_list(s, &[], &params).is_ok());
    let exprs = match inner {
        Some(s) => parse_list(s, &[], &params),
        None => parse_list(text, &[], &params),
    }
    .map_err(|e| CliError::parse(flag, text, e))?;
    exprs
        .iter()
        .map(|e| eval_ast(e, &[], &params).map_err(CliError::from))
        .collect()
}

pub fn number(flag: &str, text: &str) -> CliResult<f64> {
    let xs = numbers(flag, text)?;
    match xs.as_slice() {
        [x] => Ok(*x),
        _ => Err(CliError::usage(format!("{flag} expects one number, got {}", xs.len()))),
    }
}

pub fn range(flag: &str, text: &str) -> CliResult<(f64, f64)> {
    match numbers(flag, text)?.as_slice() {
        [a, b] if a < b => Ok((*a, *b)),
        _ => Err(CliError::usage(format!("{flag} expects \"a,b\" with a < b"))),
    }
}

fn key_value<'a>(flag: &str, item: &'a str) -> CliResult<(&'a str, &'a str)> {
    item.split_once('=')
        .map(|(k, v)| (k.trim(), v))
        .filter(|(k, _)| !k.is_empty())
        .ok_or_else(|| CliError::usage(format!("{flag} expects KEY=VALUE, got {item:?}")))
}

pub fn params(flag: &str, items: &[String]) -> CliResult<Params> {
    let mut out = Params::new();
    for item in items {
        let (k, v) = key_value(flag, item)?;
        out.insert(k.to_string(), number(flag, v)?);
    }
    Ok(out)
}

pub fn tolerances(items: &[String]) -> CliResult<ToleranceProfile> {
    let mut tol = ToleranceProfile::default();
    for item in items {
        let (k, v) = key_value("--tol", item)?;
        tol.set(k, number("--tol", v)?)?;
    }
    Ok(tol)
}

/// "e3" or a list of components; normalized, with a warning when the input
/// was not unit length.
pub fn direction(text: &str, n: usize) -> CliResult<Vector> {
    let t = text.trim();
    if let Some(k) = t.strip_prefix('e').and_then(|s| s.parse::<usize>().ok()) {
        if k == 0 || k > n {
            return Err(CliError::usage(format!("--direction {t} is not an axis of R^{n}")));
        }
        let mut d = Vector::zeros(n);
        d[k - 1] = 1.0;
        return Ok(d);
    }
    let xs = numbers("--direction", text)?;
    if xs.len() != n {
        return Err(CliError::Geom(GeomError::DimensionMismatch {
            expected: n,
            found: xs.len(),
        }));
    }
    let d = Vector::from_vec(xs);
    let norm = d.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(CliError::usage("--direction must be a nonzero finite vector"));
    }
    if (norm - 1.0).abs() > 1e-6 {
        eprintln!("warning: direction has norm {norm}, normalizing");
    }
    Ok(d / norm)
}

pub fn point(flag: &str, text: &str, m: usize) -> CliResult<Vector> {
    let xs = numbers(flag, text)?;
    if xs.len() != m {
        return Err(CliError::Geom(GeomError::DimensionMismatch {
            expected: m,
            found: xs.len(),
        }));
    }
    Ok(Vector::from_vec(xs))
}

/// "lo,hi" for every axis, or one "lo,hi" per axis separated by ';'.
pub fn domain(text: &str, m: usize) -> CliResult<BoxDomain> {
    let parts: Vec<&str> = text.split(';').collect();
    let pairs = parts
        .iter()
        .map(|p| range("--domain", p))
        .collect::<CliResult<Vec<_>>>()?;
    let pairs = match pairs.len() {
        1 => vec![pairs[0]; m],
        k if k == m => pairs,
        k => {
            return Err(CliError::Geom(GeomError::DimensionMismatch { expected: m, found: k }));
        }
    };
    Ok(BoxDomain::new(
        pairs.iter().map(|p| p.0).collect(),
        pairs.iter().map(|p| p.1).collect(),
    )?)
}

/// Surface selected by the common flags.
pub enum Surface {
    Catalog(CatalogEntry),
    Parsed {
        patch: Arc<ImmersedPatch>,
        text: String,
        domain: BoxDomain,
    },
}

impl Surface {
    pub fn patch(&self) -> &Arc<ImmersedPatch> {
        match self {
            Surface::Catalog(e) => &e.patch,
            Surface::Parsed { patch, .. } => patch,
        }
    }

    pub fn echo(&self) -> Value {
        match self {
            Surface::Catalog(e) => {
                let params: serde_json::Map<String, Value> =
                    e.params.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
                json!({ "catalog": e.name, "params": params })
            }
            Surface::Parsed { patch, text, domain } => json!({
                "immersion": text,
                "m": patch.param_dim(),
                "n": patch.ambient_dim(),
                "domain": domain
                    .lower()
                    .iter()
                    .zip(domain.upper())
                    .map(|(a, b)| vec![num(*a), num(*b)])
                    .collect::<Vec<_>>(),
            }),
        }
    }
}

pub fn surface(
    name: Option<&str>,
    params_in: &[String],
    immersion: Option<&str>,
    m: Option<usize>,
    n: Option<usize>,
    domain_text: Option<&str>,
) -> CliResult<Surface> {
    match (name, immersion) {
        (Some(name), None) => {
            let p = params("--param", params_in)?;
            Ok(Surface::Catalog(catalog_get(name, &p)?))
        }
        (None, Some(text)) => {
            let m = m.ok_or_else(|| CliError::usage("--immersion needs --m"))?;
            if m == 0 {
                return Err(CliError::usage("--m must be positive"));
            }
            let p = params("--param", params_in)?;
            let mut all = builtin_params();
            all.extend(p.iter().map(|(k, v)| (k.clone(), *v)));
            let count = parse_list(text, &chart_vars(m), &all)
                .map_err(|e| CliError::parse("--immersion", text, e))?
                .len();
            let n = n.unwrap_or(count);
            let dom = match domain_text {
                Some(t) => domain(t, m)?,
                None => BoxDomain::cube(m, DEFAULT_BOX.0, DEFAULT_BOX.1)?,
            };
            let patch = parse_immersion_with(text, m, n, &p, dom.clone()).map_err(|e| match e {
                GeomError::Parse(pe) => CliError::parse("--immersion", text, pe),
                other => CliError::Geom(other),
            })?;
            Ok(Surface::Parsed {
                patch: Arc::new(patch),
                text: text.to_string(),
                domain: dom,
            })
        }
        _ => Err(CliError::usage("give exactly one of --surface or --immersion")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_accept_expressions_and_tuples() {
        assert_eq!(numbers("x", "1, 2*3").unwrap(), vec![1.0, 6.0]);
        assert_eq!(numbers("x", "(0, 0, 1)").unwrap(), vec![0.0, 0.0, 1.0]);
        assert_eq!(numbers("x", "(1+2)*2").unwrap(), vec![6.0]);
        assert!(matches!(numbers("x", "cos("), Err(CliError::Parse { .. })));
    }

    #[test]
    fn directions() {
        assert_eq!(direction("e2", 3).unwrap().as_slice(), &[0.0, 1.0, 0.0]);
        let d = direction("(0, 3, 4)", 3).unwrap();
        assert!((d.norm() - 1.0).abs() < 1e-15);
        assert!(direction("e4", 3).is_err());
        assert!(direction("0, 0", 3).is_err());
    }

    #[test]
    fn domains() {
        let b = domain("-1, 1", 2).unwrap();
        assert_eq!(b.lower(), &[-1.0, -1.0]);
        let b = domain("0, 2*pi; -1, 1", 2).unwrap();
        assert_eq!(b.upper()[1], 1.0);
        assert!(domain("0,1;0,1;0,1", 2).is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let t = tolerances(&["spread=1e-3".into()]).unwrap();
        assert_eq!(t.spread, 1e-3);
        assert_eq!(tolerances(&["bogus=1".into()]).unwrap_err().exit_code(), 2);
        assert_eq!(tolerances(&["spread".into()]).unwrap_err().exit_code(), 2);
    }
}
