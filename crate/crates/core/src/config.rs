//! Experiment configuration files.
//!
//! ```toml
//! [metric]
//! nu = "-ln(1 + (x1^2 + x2^2)/4)"
//! x1_min = -1.5
//! x1_max = 1.5
//! x2_min = -1.5
//! x2_max = 1.5
//!
//! [form]
//! b1 = "0.1*x2"
//! b2 = "0.1*x1"
//!
//! [phi]
//! kind = "randers"      # randers | matsumoto | expr
//! # expr = "1/(1 - s)"  # required when kind = "expr"
//! b0 = 0.9
//!
//! [sampling]            # optional
//! n_x1 = 21
//! n_x2 = 21
//! n_t = 64
//! n_s = 201
//! eps_zero = 1e-9
//!
//! [geodesics]           # optional
//! T = 1.0
//! h = 1e-3
//! seeds = 8
//! ```

use std::fmt;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use crate::error::Result;
use crate::metric::{IsothermalMetric, LinearForm, MetricBundle, PhiFunction, Rect, Sampling};
use crate::scalarfield::{parse_expr, Var};

/// A problem with a configuration file, located by line when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config error at line {line}: {}", self.message),
            None => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiKind {
    Randers,
    Matsumoto,
    Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiSpec {
    pub kind: PhiKind,
    pub expr: Option<String>,
    pub b0: f64,
}

impl PhiSpec {
    pub fn build(&self) -> Result<PhiFunction> {
        match self.kind {
            PhiKind::Randers => PhiFunction::randers(self.b0),
            PhiKind::Matsumoto => PhiFunction::matsumoto(self.b0),
            PhiKind::Expr => {
                PhiFunction::from_expr(self.expr.as_deref().unwrap_or_default(), self.b0)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicSettings {
    pub duration: f64,
    pub h: f64,
    pub seeds: usize,
}

impl Default for GeodesicSettings {
    fn default() -> Self {
        Self {
            duration: 1.0,
            h: 1e-3,
            seeds: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub nu: String,
    pub domain: Rect,
    pub b1: String,
    pub b2: String,
    pub phi: PhiSpec,
    pub sampling: Sampling,
    pub geodesics: GeodesicSettings,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    metric: RawMetric,
    form: RawForm,
    phi: RawPhi,
    sampling: Option<Spanned<RawSampling>>,
    geodesics: Option<Spanned<RawGeodesics>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    nu: Spanned<String>,
    x1_min: f64,
    x1_max: f64,
    x2_min: f64,
    x2_max: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawForm {
    b1: Spanned<String>,
    b2: Spanned<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhi {
    kind: Spanned<String>,
    expr: Option<Spanned<String>>,
    b0: Spanned<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSampling {
    n_x1: usize,
    n_x2: usize,
    n_t: usize,
    n_s: usize,
    eps_zero: f64,
}

impl Default for RawSampling {
    fn default() -> Self {
        let s = Sampling::default();
        Self {
            n_x1: s.n_x1,
            n_x2: s.n_x2,
            n_t: s.n_t,
            n_s: s.n_s,
            eps_zero: s.eps_zero,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawGeodesics {
    #[serde(rename = "T")]
    duration: f64,
    h: f64,
    seeds: usize,
}

impl Default for RawGeodesics {
    fn default() -> Self {
        let g = GeodesicSettings::default();
        Self {
            duration: g.duration,
            h: g.h,
            seeds: g.seeds,
        }
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> std::result::Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        text.parse()
    }

    pub fn build_bundle(&self) -> Result<MetricBundle> {
        self.build_bundle_with(self.sampling)
    }

    pub fn build_bundle_with(&self, sampling: Sampling) -> Result<MetricBundle> {
        MetricBundle::new(
            IsothermalMetric::parse(&self.nu, self.domain)?,
            LinearForm::parse(&self.b1, &self.b2)?,
            self.phi.build()?,
            sampling,
        )
    }
}

impl std::str::FromStr for ExperimentConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> std::result::Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
            line: e.span().map(|s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        let err = |span: std::ops::Range<usize>, message: String| ConfigError {
            line: Some(line_of(text, span.start)),
            message,
        };
        let check_expr = |value: &Spanned<String>, vars: &[Var], key: &str| {
            parse_expr(value.get_ref(), vars)
                .map(|_| value.get_ref().clone())
                .map_err(|e| err(value.span(), format!("`{key}`: {e}")))
        };
        let xy = [Var::X1, Var::X2];
        let nu = check_expr(&raw.metric.nu, &xy, "nu")?;
        let b1 = check_expr(&raw.form.b1, &xy, "b1")?;
        let b2 = check_expr(&raw.form.b2, &xy, "b2")?;
        let m = &raw.metric;
        let domain = Rect::new(m.x1_min, m.x1_max, m.x2_min, m.x2_max)
            .map_err(|e| err(raw.metric.nu.span(), e.to_string()))?;

        let kind = match raw.phi.kind.get_ref().as_str() {
            "randers" => PhiKind::Randers,
            "matsumoto" => PhiKind::Matsumoto,
            "expr" => PhiKind::Expr,
            other => {
                return Err(err(
                    raw.phi.kind.span(),
                    format!("unknown phi kind `{other}` (expected randers, matsumoto or expr)"),
                ))
            }
        };
        let expr = match (&raw.phi.expr, kind) {
            (Some(e), PhiKind::Expr) => Some(check_expr(e, &[Var::S], "expr")?),
            (None, PhiKind::Expr) => {
                return Err(err(
                    raw.phi.kind.span(),
                    "kind = \"expr\" requires an `expr` key".into(),
                ))
            }
            (Some(e), _) => {
                return Err(err(
                    e.span(),
                    "`expr` is only used with kind = \"expr\"".into(),
                ))
            }
            (None, _) => None,
        };
        let b0 = *raw.phi.b0.get_ref();
        if !(b0 > 0.0 && b0 <= 1.0) {
            return Err(err(
                raw.phi.b0.span(),
                format!("b0 must lie in (0, 1], got {b0}"),
            ));
        }

        let sampling = match raw.sampling {
            Some(s) => {
                let span = s.span();
                let s = s.into_inner();
                if [s.n_x1, s.n_x2, s.n_t, s.n_s].iter().any(|&n| n < 8) {
                    return Err(err(span, "sampling counts must be at least 8".into()));
                }
                if !(s.eps_zero > 0.0 && s.eps_zero.is_finite()) {
                    return Err(err(span, "eps_zero must be positive".into()));
                }
                Sampling {
                    n_x1: s.n_x1,
                    n_x2: s.n_x2,
                    n_t: s.n_t,
                    n_s: s.n_s,
                    eps_zero: s.eps_zero,
                }
            }
            None => Sampling::default(),
        };
        let geodesics = match raw.geodesics {
            Some(g) => {
                let span = g.span();
                let g = g.into_inner();
                if !(g.duration > 0.0 && g.h > 0.0 && g.duration.is_finite() && g.h.is_finite()) {
                    return Err(err(span, "T and h must be positive".into()));
                }
                if g.seeds == 0 {
                    return Err(err(span, "seeds must be at least 1".into()));
                }
                GeodesicSettings {
                    duration: g.duration,
                    h: g.h,
                    seeds: g.seeds,
                }
            }
            None => GeodesicSettings::default(),
        };

        Ok(Self {
            nu,
            domain,
            b1,
            b2,
            phi: PhiSpec { kind, expr, b0 },
            sampling,
            geodesics,
        })
    }
}
