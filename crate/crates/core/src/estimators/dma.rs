use super::{cumulate, loglog_fit, max_abs, negligible, EstimatorConfig, HurstEstimate, MethodSpec, ScaleGrid};
use crate::error::{Error, Result};
use crate::series::{Series, SeriesKind};

/// Mean of `(X(t) - X̄_λ(t))²` over `t = λ-1 ..= n-1`, where `X̄_λ` is the
/// backward simple moving average over the last `λ` profile points.
fn dma_fluctuation(profile: &[f64], lambda: usize) -> f64 {
    let lf = lambda as f64;
    let mut window: f64 = profile[..lambda].iter().sum();
    let mut sum = 0.0;
    for t in (lambda - 1)..profile.len() {
        if t >= lambda {
            window += profile[t] - profile[t - lambda];
        }
        let d = profile[t] - window / lf;
        sum += d * d;
    }
    sum / (profile.len() - lambda + 1) as f64
}

/// Detrending moving average with a backward window, λ ranging over every
/// integer in `[dma_lambda_min, dma_lambda_max]`.
pub fn estimate_dma(series: &Series, config: &EstimatorConfig) -> Result<HurstEstimate> {
    series.expect_kind(SeriesKind::Increments, "estimate_dma")?;
    config.validate()?;
    let x = series.values();
    if x.len() <= config.dma_lambda_max {
        return Err(Error::InsufficientScales(format!(
            "DMA needs more than {} observations, got {}",
            config.dma_lambda_max,
            x.len()
        )));
    }
    let grid = ScaleGrid::range(config.dma_lambda_min, config.dma_lambda_max)?;
    let profile = cumulate(x, false);
    let reference = max_abs(x);
    let mut points = Vec::with_capacity(grid.scales().len());
    for &lambda in grid.scales() {
        let f2 = dma_fluctuation(&profile, lambda);
        if negligible(f2.sqrt(), reference) {
            return Err(Error::DegenerateSeries { method: "dma", scale: lambda });
        }
        points.push((lambda as f64, f2));
    }
    let fit = loglog_fit(&points)?;
    Ok(HurstEstimate {
        method: MethodSpec::DMA,
        hurst: fit.slope / 2.0,
        fit,
    })
}
