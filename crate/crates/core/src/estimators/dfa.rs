use super::{loglog_fit, make_scale_grid, max_abs, negligible, EstimatorConfig, HurstEstimate, MethodSpec};
use crate::error::{Error, Result};
use crate::series::{Series, SeriesKind};

/// Mean squared residual of the window profile around its OLS line.
/// `profile` is scratch space of the window's length.
fn window_fluctuation(window: &[f64], profile: &mut [f64]) -> f64 {
    let n = window.len();
    let nf = n as f64;
    let mean = window.iter().sum::<f64>() / nf;
    let mut acc = 0.0;
    for (p, &x) in profile.iter_mut().zip(window) {
        acc += x - mean;
        *p = acc;
    }
    // Abscissae 1..=n have mean (n+1)/2 and Σ(k - k̄)² = n(n²-1)/12.
    let kbar = (nf + 1.0) / 2.0;
    let sxx = nf * (nf * nf - 1.0) / 12.0;
    let ybar = profile.iter().sum::<f64>() / nf;
    let sxy: f64 = profile
        .iter()
        .enumerate()
        .map(|(i, &y)| (i as f64 + 1.0 - kbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let rss: f64 = profile
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let r = y - ybar - slope * (i as f64 + 1.0 - kbar);
            r * r
        })
        .sum();
    let f2 = rss / nf;
    // The profile of a window is bounded by n·max|x|.
    if negligible(f2.sqrt(), nf * max_abs(window)) {
        0.0
    } else {
        f2
    }
}

/// `(mean of F²(i)^{q/2})^{1/q}`.
fn aggregate(f2: &[f64], q: f64) -> f64 {
    let n = f2.len() as f64;
    if q == 2.0 {
        (f2.iter().sum::<f64>() / n).sqrt()
    } else if q == 1.0 {
        f2.iter().map(|v| v.sqrt()).sum::<f64>() / n
    } else {
        (f2.iter().map(|v| v.powf(q / 2.0)).sum::<f64>() / n).powf(1.0 / q)
    }
}

/// Multifractal DFA with linear detrending in contiguous forward windows.
pub fn estimate_mfdfa(series: &Series, q: f64, config: &EstimatorConfig) -> Result<HurstEstimate> {
    series.expect_kind(SeriesKind::Increments, "estimate_mfdfa")?;
    let method = MethodSpec::mfdfa(q)?;
    if config.detrend_order != 1 {
        return Err(Error::InvalidParameter(format!(
            "only linear detrending (order 1) is supported, got order {}",
            config.detrend_order
        )));
    }
    let x = series.values();
    let grid = make_scale_grid(x.len(), config)?;
    let mut scratch = vec![0.0; grid.max()];
    let mut f2 = Vec::new();
    let mut points = Vec::with_capacity(grid.scales().len());
    for &scale in grid.scales() {
        f2.clear();
        f2.extend(
            x.chunks_exact(scale)
                .map(|w| window_fluctuation(w, &mut scratch[..scale])),
        );
        if f2.iter().all(|&v| v == 0.0) {
            return Err(Error::DegenerateSeries { method: "mfdfa", scale });
        }
        points.push((scale as f64, aggregate(&f2, q)));
    }
    let fit = loglog_fit(&points)?;
    Ok(HurstEstimate {
        method,
        hurst: fit.slope,
        fit,
    })
}

/// Standard DFA, i.e. MF-DFA at q = 2.
pub fn estimate_dfa(series: &Series, config: &EstimatorConfig) -> Result<HurstEstimate> {
    estimate_mfdfa(series, 2.0, config)
}
