//! Hurst exponent estimators.
//!
//! Every estimator takes a series of increments, computes a fluctuation
//! statistic over a grid of window sizes (or lags), and reads the exponent
//! off an OLS fit in log-log coordinates:
//!
//! | method  | statistic                         | hurst        |
//! |---------|-----------------------------------|--------------|
//! | R/S     | mean rescaled range per window    | slope        |
//! | MF-DFA  | q-th order detrended fluctuation  | slope        |
//! | DMA     | squared deviation from moving avg | slope / 2    |
//! | GHE     | q-th absolute moment of lag diffs | slope / q    |

mod dfa;
mod dma;
mod fit;
mod ghe;
mod rs;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::series::{Series, SeriesKind};

pub use dfa::{estimate_dfa, estimate_mfdfa};
pub use dma::estimate_dma;
pub use fit::{loglog_fit, LogLogFit};
pub use ghe::{estimate_ghe, ghe_kq};
pub use rs::estimate_rs;

/// Relative threshold under which a fluctuation is treated as exactly zero.
pub(crate) const DEGENERATE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    /// Base `b` of the power grid `b^p` used by R/S and MF-DFA.
    pub scale_base: usize,
    pub min_scale: usize,
    /// Largest window as a fraction of the series length.
    pub max_scale_fraction: f64,
    pub dma_lambda_min: usize,
    pub dma_lambda_max: usize,
    pub ghe_tau_min: usize,
    pub ghe_tau_max: usize,
    /// Polynomial order of the MF-DFA detrending; only linear is supported.
    pub detrend_order: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            scale_base: 2,
            min_scale: 16,
            max_scale_fraction: 0.25,
            dma_lambda_min: 20,
            dma_lambda_max: 40,
            ghe_tau_min: 1,
            ghe_tau_max: 19,
            detrend_order: 1,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.scale_base < 2 {
            return bad(format!("scale base must be at least 2, got {}", self.scale_base));
        }
        if self.min_scale < 2 {
            return bad(format!("min scale must be at least 2, got {}", self.min_scale));
        }
        if !(self.max_scale_fraction > 0.0 && self.max_scale_fraction <= 1.0) {
            return bad(format!(
                "max scale fraction must lie in (0, 1], got {}",
                self.max_scale_fraction
            ));
        }
        if self.dma_lambda_min < 1 || self.dma_lambda_min >= self.dma_lambda_max {
            return bad(format!(
                "DMA window range must satisfy 1 <= min < max, got [{}, {}]",
                self.dma_lambda_min, self.dma_lambda_max
            ));
        }
        if self.ghe_tau_min < 1 || self.ghe_tau_min >= self.ghe_tau_max {
            return bad(format!(
                "GHE lag range must satisfy 1 <= min < max, got [{}, {}]",
                self.ghe_tau_min, self.ghe_tau_max
            ));
        }
        if self.detrend_order < 1 {
            return bad(format!(
                "detrend order must be at least 1, got {}",
                self.detrend_order
            ));
        }
        Ok(())
    }
}

/// Strictly increasing window sizes or lags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleGrid {
    scales: Vec<usize>,
}

impl ScaleGrid {
    pub fn new(scales: Vec<usize>) -> Result<Self> {
        if scales.len() < 2 {
            return Err(Error::InsufficientScales(format!(
                "need at least 2 scales, got {}",
                scales.len()
            )));
        }
        if scales[0] == 0 || scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "scales must be positive and strictly increasing: {scales:?}"
            )));
        }
        Ok(ScaleGrid { scales })
    }

    /// Every integer in `[min, max]`.
    pub fn range(min: usize, max: usize) -> Result<Self> {
        Self::new((min..=max).collect())
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    pub fn max(&self) -> usize {
        *self.scales.last().expect("grid is never empty")
    }
}

/// Powers `b^p` (p ≥ 1) between `min_scale` and `length × max_scale_fraction`.
pub fn make_scale_grid(series_length: usize, config: &EstimatorConfig) -> Result<ScaleGrid> {
    config.validate()?;
    let base = config.scale_base;
    if series_length < base.saturating_mul(base) {
        return Err(Error::InsufficientScales(format!(
            "series length {series_length} is shorter than base² = {}",
            base.saturating_mul(base)
        )));
    }
    let cap = series_length as f64 * config.max_scale_fraction;
    let mut scales = Vec::new();
    let mut scale = base;
    while (scale as f64) <= cap {
        if scale >= config.min_scale {
            scales.push(scale);
        }
        match scale.checked_mul(base) {
            Some(next) => scale = next,
            None => break,
        }
    }
    if scales.len() < 2 {
        return Err(Error::InsufficientScales(format!(
            "series length {series_length} admits {} scale(s) between {} and {cap}",
            scales.len(),
            config.min_scale
        )));
    }
    ScaleGrid::new(scales)
}

/// Cumulative sum of the increments, optionally after removing their mean.
pub fn build_profile(series: &Series, subtract_mean: bool) -> Result<Series> {
    series.expect_kind(SeriesKind::Increments, "build_profile")?;
    Series::levels(cumulate(series.values(), subtract_mean))
}

pub(crate) fn cumulate(values: &[f64], subtract_mean: bool) -> Vec<f64> {
    let shift = if subtract_mean {
        values.iter().sum::<f64>() / values.len() as f64
    } else {
        0.0
    };
    let mut acc = 0.0;
    values
        .iter()
        .map(|v| {
            acc += v - shift;
            acc
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Rs,
    Dma,
    Mfdfa,
    Ghe,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rs => "rs",
            Method::Dma => "dma",
            Method::Mfdfa => "mfdfa",
            Method::Ghe => "ghe",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A method together with its moment order. R/S and DMA carry `q = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodSpec {
    pub method: Method,
    pub q: f64,
}

impl MethodSpec {
    pub const RS: MethodSpec = MethodSpec { method: Method::Rs, q: 1.0 };
    pub const DMA: MethodSpec = MethodSpec { method: Method::Dma, q: 1.0 };
    pub const DFA: MethodSpec = MethodSpec { method: Method::Mfdfa, q: 2.0 };

    pub fn new(method: Method, q: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "moment order q must be positive and finite, got {q}"
            )));
        }
        if matches!(method, Method::Rs | Method::Dma) && q != 1.0 {
            return Err(Error::InvalidParameter(format!(
                "{method} takes no moment order (got q = {q})"
            )));
        }
        Ok(MethodSpec { method, q })
    }

    pub fn mfdfa(q: f64) -> Result<Self> {
        Self::new(Method::Mfdfa, q)
    }

    pub fn ghe(q: f64) -> Result<Self> {
        Self::new(Method::Ghe, q)
    }

    /// The six rows of the heavy-tail study: R/S, DMA, MF-DFA(1), DFA,
    /// GHE(1), GHE(2).
    pub fn study_set() -> Vec<MethodSpec> {
        vec![
            MethodSpec::RS,
            MethodSpec::DMA,
            MethodSpec { method: Method::Mfdfa, q: 1.0 },
            MethodSpec::DFA,
            MethodSpec { method: Method::Ghe, q: 1.0 },
            MethodSpec { method: Method::Ghe, q: 2.0 },
        ]
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.method {
            Method::Rs | Method::Dma => write!(f, "{}", self.method),
            _ => write!(f, "{}:{}", self.method, self.q),
        }
    }
}

/// Parses `name[:q]`: `rs`, `dma`, `dfa`, `mfdfa:1`, `ghe:2`. `mfdfa` and
/// `ghe` without an order default to q = 2.
impl FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, q) = match s.trim().split_once(':') {
            Some((name, q)) => {
                let q: f64 = q.trim().parse().map_err(|_| {
                    Error::InvalidParameter(format!("bad moment order in method '{s}'"))
                })?;
                (name.trim(), Some(q))
            }
            None => (s.trim(), None),
        };
        match name.to_ascii_lowercase().as_str() {
            "rs" | "r/s" => MethodSpec::new(Method::Rs, q.unwrap_or(1.0)),
            "dma" => MethodSpec::new(Method::Dma, q.unwrap_or(1.0)),
            "dfa" => match q {
                None | Some(2.0) => Ok(MethodSpec::DFA),
                Some(q) => Err(Error::InvalidParameter(format!(
                    "dfa is mfdfa with q = 2, got q = {q}"
                ))),
            },
            "mfdfa" | "mf-dfa" => MethodSpec::new(Method::Mfdfa, q.unwrap_or(2.0)),
            "ghe" => MethodSpec::new(Method::Ghe, q.unwrap_or(2.0)),
            _ => Err(Error::InvalidParameter(format!(
                "unknown method '{s}' (expected rs, dma, dfa, mfdfa[:q] or ghe[:q])"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HurstEstimate {
    pub method: MethodSpec,
    pub hurst: f64,
    pub fit: LogLogFit,
}

/// Dispatches to the estimator named by `method`.
pub fn estimate(series: &Series, method: MethodSpec, config: &EstimatorConfig) -> Result<HurstEstimate> {
    match method.method {
        Method::Rs => estimate_rs(series, config),
        Method::Dma => estimate_dma(series, config),
        Method::Mfdfa => estimate_mfdfa(series, method.q, config),
        Method::Ghe => estimate_ghe(series, method.q, config),
    }
}

pub(crate) fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// True when `value` is zero up to rounding relative to `reference`.
pub(crate) fn negligible(value: f64, reference: f64) -> bool {
    value.is_nan() || value <= DEGENERATE_TOLERANCE * reference
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(len: usize) -> Result<Vec<usize>> {
        make_scale_grid(len, &EstimatorConfig::default()).map(|g| g.scales().to_vec())
    }

    #[test]
    fn scale_grid_examples() {
        assert_eq!(grid(512).unwrap(), vec![16, 32, 64, 128]);
        let expected: Vec<usize> = (4..=14).map(|p| 1usize << p).collect();
        assert_eq!(grid(65536).unwrap(), expected);
        assert!(matches!(grid(32), Err(Error::InsufficientScales(_))));
        assert!(matches!(grid(3), Err(Error::InsufficientScales(_))));
        // 16 and 32 only: the smallest admissible length.
        assert_eq!(grid(128).unwrap(), vec![16, 32]);
        assert!(grid(127).is_err());
    }

    #[test]
    fn scale_grid_other_bases() {
        let cfg = EstimatorConfig {
            scale_base: 3,
            min_scale: 9,
            max_scale_fraction: 0.5,
            ..Default::default()
        };
        assert_eq!(make_scale_grid(200, &cfg).unwrap().scales(), &[9, 27, 81]);
    }

    #[test]
    fn profile_examples() {
        let s = Series::increments(vec![1.0, -1.0, 2.0]).unwrap();
        let p = build_profile(&s, true).unwrap();
        let want = [1.0 / 3.0, -4.0 / 3.0, 0.0];
        for (a, b) in p.values().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(p.kind(), SeriesKind::Levels);

        let s = Series::increments(vec![5.0, 5.0, 5.0]).unwrap();
        assert_eq!(build_profile(&s, false).unwrap().values(), &[5.0, 10.0, 15.0]);

        let levels = Series::levels(vec![1.0, 2.0]).unwrap();
        assert!(build_profile(&levels, true).is_err());
    }

    #[test]
    fn mean_subtracted_profile_ends_at_zero() {
        let s = Series::increments(vec![0.3, -1.7, 2.2, 5.1, -0.4, 0.9]).unwrap();
        let p = build_profile(&s, true).unwrap();
        assert!(p.values().last().unwrap().abs() < 1e-14);
    }

    #[test]
    fn config_validation() {
        assert!(EstimatorConfig::default().validate().is_ok());
        let bad = [
            EstimatorConfig { scale_base: 1, ..Default::default() },
            EstimatorConfig { min_scale: 1, ..Default::default() },
            EstimatorConfig { max_scale_fraction: 0.0, ..Default::default() },
            EstimatorConfig { max_scale_fraction: 1.5, ..Default::default() },
            EstimatorConfig { dma_lambda_min: 40, dma_lambda_max: 40, ..Default::default() },
            EstimatorConfig { ghe_tau_min: 0, ..Default::default() },
            EstimatorConfig { detrend_order: 0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn method_syntax() {
        let p = |s: &str| s.parse::<MethodSpec>();
        assert_eq!(p("rs").unwrap(), MethodSpec::RS);
        assert_eq!(p("dma").unwrap(), MethodSpec::DMA);
        assert_eq!(p("dfa").unwrap(), MethodSpec::DFA);
        assert_eq!(p("mfdfa:2").unwrap(), MethodSpec::DFA);
        assert_eq!(p("mfdfa:1").unwrap(), MethodSpec::mfdfa(1.0).unwrap());
        assert_eq!(p("GHE:1").unwrap(), MethodSpec::ghe(1.0).unwrap());
        assert_eq!(p("ghe").unwrap(), MethodSpec::ghe(2.0).unwrap());
        assert!(p("rs:2").is_err());
        assert!(p("ghe:0").is_err());
        assert!(p("ghe:x").is_err());
        assert!(p("dfa:1").is_err());
        assert!(p("hurst").is_err());
        for m in MethodSpec::study_set() {
            assert_eq!(m.to_string().parse::<MethodSpec>().unwrap(), m);
        }
    }

    #[test]
    fn scale_grid_rejects_unordered() {
        assert!(ScaleGrid::new(vec![4]).is_err());
        assert!(ScaleGrid::new(vec![4, 4]).is_err());
        assert!(ScaleGrid::new(vec![0, 4]).is_err());
        assert_eq!(ScaleGrid::range(20, 23).unwrap().scales(), &[20, 21, 22, 23]);
    }
}
