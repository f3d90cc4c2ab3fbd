use super::{loglog_fit, make_scale_grid, max_abs, negligible, EstimatorConfig, HurstEstimate, MethodSpec};
use crate::error::{Error, Result};
use crate::series::{Series, SeriesKind};

/// Rescaled range of one window, or `None` when its standard deviation is
/// zero.
fn window_rescaled_range(window: &[f64]) -> Option<f64> {
    let n = window.len() as f64;
    let mean = window.iter().sum::<f64>() / n;
    let (mut acc, mut lo, mut hi, mut ss) = (0.0f64, f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for &x in window {
        let d = x - mean;
        acc += d;
        lo = lo.min(acc);
        hi = hi.max(acc);
        ss += d * d;
    }
    let sd = (ss / n).sqrt();
    if negligible(sd, max_abs(window)) {
        return None;
    }
    Some((hi - lo) / sd)
}

/// Rescaled range analysis over contiguous, non-overlapping windows.
pub fn estimate_rs(series: &Series, config: &EstimatorConfig) -> Result<HurstEstimate> {
    series.expect_kind(SeriesKind::Increments, "estimate_rs")?;
    let x = series.values();
    let grid = make_scale_grid(x.len(), config)?;
    let mut points = Vec::with_capacity(grid.scales().len());
    for &scale in grid.scales() {
        let (sum, count) = x
            .chunks_exact(scale)
            .filter_map(window_rescaled_range)
            .fold((0.0, 0usize), |(s, c), rs| (s + rs, c + 1));
        if count == 0 {
            return Err(Error::DegenerateSeries { method: "rs", scale });
        }
        points.push((scale as f64, sum / count as f64));
    }
    let fit = loglog_fit(&points)?;
    Ok(HurstEstimate {
        method: MethodSpec::RS,
        hurst: fit.slope,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alternating(n: usize) -> Series {
        Series::increments((0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()).unwrap()
    }

    #[test]
    fn alternating_series_has_unit_rescaled_range() {
        let est = estimate_rs(&alternating(1024), &EstimatorConfig::default()).unwrap();
        for &(_, log_rs) in &est.fit.points {
            assert!(log_rs.abs() < 1e-14);
        }
        assert!(est.hurst.abs() < 1e-14);
    }

    #[test]
    fn constant_increments_are_degenerate() {
        let s = Series::increments(vec![0.1; 1024]).unwrap();
        assert!(matches!(
            estimate_rs(&s, &EstimatorConfig::default()),
            Err(Error::DegenerateSeries { method: "rs", .. })
        ));
    }

    #[test]
    fn constant_windows_are_skipped() {
        // First 16 observations constant; the rest alternate.
        let mut v = vec![2.0; 16];
        v.extend((0..496).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }));
        let est = estimate_rs(&Series::increments(v).unwrap(), &EstimatorConfig::default()).unwrap();
        assert!(est.fit.points[0].1.abs() < 1e-14);
    }

    #[test]
    fn too_short_for_two_scales() {
        let s = alternating(64);
        assert!(matches!(
            estimate_rs(&s, &EstimatorConfig::default()),
            Err(Error::InsufficientScales(_))
        ));
    }

    #[test]
    fn rejects_levels() {
        let s = Series::levels(vec![1.0; 512]).unwrap();
        assert!(matches!(
            estimate_rs(&s, &EstimatorConfig::default()),
            Err(Error::InvalidParameter(_))
        ));
    }
}
