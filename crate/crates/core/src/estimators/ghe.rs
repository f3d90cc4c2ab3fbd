use super::{cumulate, loglog_fit, EstimatorConfig, HurstEstimate, MethodSpec, ScaleGrid};
use crate::error::{Error, Result};
use crate::series::{Series, SeriesKind};

#[inline]
fn abs_pow(d: f64, q: f64) -> f64 {
    if q == 1.0 {
        d.abs()
    } else if q == 2.0 {
        d * d
    } else {
        d.abs().powf(q)
    }
}

fn kq(levels: &[f64], q: f64, tau: usize) -> f64 {
    let count = levels.len() - tau;
    let sum: f64 = levels[tau..]
        .iter()
        .zip(levels)
        .map(|(later, earlier)| abs_pow(later - earlier, q))
        .sum();
    sum / count as f64
}

/// `K_q(τ)`: mean of `|X(t+τ) - X(t)|^q` over the `T - τ + 1` admissible
/// `t`, with `T` the last index of `levels`.
pub fn ghe_kq(levels: &Series, q: f64, tau: usize) -> Result<f64> {
    levels.expect_kind(SeriesKind::Levels, "ghe_kq")?;
    MethodSpec::ghe(q)?;
    if tau == 0 || tau >= levels.len() {
        return Err(Error::Domain(format!(
            "lag must lie in [1, {}), got {tau}",
            levels.len()
        )));
    }
    Ok(kq(levels.values(), q, tau))
}

/// Generalized Hurst exponent `H(q)` from the scaling `K_q(τ) ~ τ^{qH(q)}`
/// over every lag in `[ghe_tau_min, ghe_tau_max]`.
pub fn estimate_ghe(series: &Series, q: f64, config: &EstimatorConfig) -> Result<HurstEstimate> {
    series.expect_kind(SeriesKind::Increments, "estimate_ghe")?;
    let method = MethodSpec::ghe(q)?;
    config.validate()?;
    let x = series.values();
    if x.len() <= config.ghe_tau_max {
        return Err(Error::InsufficientScales(format!(
            "GHE needs more than {} observations, got {}",
            config.ghe_tau_max,
            x.len()
        )));
    }
    let grid = ScaleGrid::range(config.ghe_tau_min, config.ghe_tau_max)?;
    let levels = cumulate(x, false);
    let mut points = Vec::with_capacity(grid.scales().len());
    for &tau in grid.scales() {
        let k = kq(&levels, q, tau);
        if k.is_nan() || k <= 0.0 {
            return Err(Error::DegenerateSeries { method: "ghe", scale: tau });
        }
        points.push((tau as f64, k));
    }
    let fit = loglog_fit(&points)?;
    Ok(HurstEstimate {
        method,
        hurst: fit.slope / q,
        fit,
    })
}
