//! Naive reference estimators, written without any code from the library.
//! Quadratic loops and uncentered normal equations on purpose.

#![allow(dead_code)]

/// Window sizes for a length-256 series with the default settings.
pub const GRID_256: [usize; 3] = [16, 32, 64];

/// OLS slope of ln(f) on ln(s) from uncentered normal equations.
pub fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(s, f) in points {
        let (x, y) = (s.ln(), f.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

fn mean(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for x in v {
        s += x;
    }
    s / v.len() as f64
}

pub fn rs(x: &[f64], scales: &[usize]) -> f64 {
    let mut points = Vec::new();
    for &n in scales {
        let mut total = 0.0;
        let mut count = 0;
        for k in 0..x.len() / n {
            let w = &x[k * n..(k + 1) * n];
            let m = mean(w);
            let mut var = 0.0;
            for v in w {
                var += (v - m) * (v - m);
            }
            let sd = (var / n as f64).sqrt();
            let mut hi = f64::MIN;
            let mut lo = f64::MAX;
            for j in 1..=n {
                let y: f64 = w[..j].iter().map(|v| v - m).sum();
                hi = hi.max(y);
                lo = lo.min(y);
            }
            total += (hi - lo) / sd;
            count += 1;
        }
        points.push((n as f64, total / count as f64));
    }
    slope(&points)
}

pub fn mfdfa(x: &[f64], q: f64, scales: &[usize]) -> f64 {
    let mut points = Vec::new();
    for &n in scales {
        let mut f2s = Vec::new();
        for k in 0..x.len() / n {
            let w = &x[k * n..(k + 1) * n];
            let m = mean(w);
            let y: Vec<f64> = (1..=n).map(|j| w[..j].iter().map(|v| v - m).sum()).collect();
            let (mut s1, mut sk, mut skk, mut sy, mut sky) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for (i, yi) in y.iter().enumerate() {
                let k = (i + 1) as f64;
                s1 += 1.0;
                sk += k;
                skk += k * k;
                sy += yi;
                sky += k * yi;
            }
            let b = (s1 * sky - sk * sy) / (s1 * skk - sk * sk);
            let a = (sy - b * sk) / s1;
            let mut rss = 0.0;
            for (i, yi) in y.iter().enumerate() {
                let r = yi - a - b * (i + 1) as f64;
                rss += r * r;
            }
            f2s.push(rss / n as f64);
        }
        let fq = (f2s.iter().map(|f| f.powf(q / 2.0)).sum::<f64>() / f2s.len() as f64).powf(1.0 / q);
        points.push((n as f64, fq));
    }
    slope(&points)
}

pub fn dma(x: &[f64], lambdas: std::ops::RangeInclusive<usize>) -> f64 {
    let profile: Vec<f64> = (0..x.len()).map(|t| x[..=t].iter().sum()).collect();
    let mut points = Vec::new();
    for lambda in lambdas {
        let mut sum = 0.0;
        let mut count = 0;
        for t in lambda - 1..profile.len() {
            let avg = mean(&profile[t + 1 - lambda..=t]);
            sum += (profile[t] - avg).powi(2);
            count += 1;
        }
        points.push((lambda as f64, sum / count as f64));
    }
    slope(&points) / 2.0
}

pub fn ghe(x: &[f64], q: f64, taus: std::ops::RangeInclusive<usize>) -> f64 {
    let levels: Vec<f64> = (0..x.len()).map(|t| x[..=t].iter().sum()).collect();
    let mut points = Vec::new();
    for tau in taus {
        let mut sum = 0.0;
        let mut count = 0;
        for t in 0..levels.len() - tau {
            sum += (levels[t + tau] - levels[t]).abs().powf(q);
            count += 1;
        }
        points.push((tau as f64, sum / count as f64));
    }
    slope(&points) / q
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Standard normals by Box–Muller.
pub fn normals(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        out.push(r * t.cos());
        out.push(r * t.sin());
    }
    out.truncate(n);
    out
}

/// Tick CSV for two trading days, each with 512 i.i.d. N(0,1) log-returns
/// turned into prices.
pub fn two_day_fixture(seed: u64) -> String {
    let mut csv = String::from("timestamp,price\n");
    for (d, day) in ["1983-01-03", "1983-01-04"].iter().enumerate() {
        let r = normals(512, seed.wrapping_mul(2).wrapping_add(d as u64));
        let mut logp = 0.0;
        for i in 0..=512 {
            if i > 0 {
                logp += r[i - 1];
            }
            let minute = 9 * 60 + 30 + i;
            csv.push_str(&format!("{day}T{:02}:{:02}:00,{}\n", minute / 60, minute % 60, 100.0 * f64::exp(logp)));
        }
    }
    csv
}
