use crate::error::{Error, Result};

/// Ordinary least squares fit of log(fluctuation) on log(scale).
#[derive(Debug, Clone, PartialEq)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(ln scale, ln fluctuation)` pairs the fit was computed from.
    pub points: Vec<(f64, f64)>,
}

pub fn loglog_fit(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientScales(format!(
            "log-log fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    let mut logs = Vec::with_capacity(points.len());
    for &(scale, fluct) in points {
        if !(scale > 0.0 && scale.is_finite() && fluct > 0.0 && fluct.is_finite()) {
            return Err(Error::Domain(format!(
                "log-log fit needs positive finite coordinates, got ({scale}, {fluct})"
            )));
        }
        logs.push((scale.ln(), fluct.ln()));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &logs {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= f64::EPSILON * mx.abs().max(1.0) * n {
        return Err(Error::DegenerateRegression);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = (syy - slope * sxy).max(0.0);
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(LogLogFit {
        slope,
        intercept,
        r_squared,
        points: logs,
    })
}
