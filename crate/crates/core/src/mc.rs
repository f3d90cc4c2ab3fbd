//! Monte Carlo sampling distributions of Hurst estimators on i.i.d.
//! symmetric stable increments `S(α, 0, √2/2, 0)`.
//!
//! Each replication's seed is a hash of the master seed, the stability
//! exponent, the length and the replication index, so any cell can be
//! recomputed on its own and the table does not depend on execution order
//! or thread count.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{estimate, EstimatorConfig, MethodSpec};
use crate::series::Series;
use crate::stable::{Seed, StableParams, StableSampler};

/// Lower and upper quantile levels reported per cell.
pub const LOWER_QUANTILE: f64 = 0.025;
pub const UPPER_QUANTILE: f64 = 0.975;

/// Lengths above 2^30 are not meaningful for in-memory replication.
const MAX_LOG2_LENGTH: u32 = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub alphas: Vec<f64>,
    pub log2_lengths: Vec<u32>,
    pub replications: usize,
    pub methods: Vec<MethodSpec>,
    pub master_seed: Seed,
    pub estimator_config: EstimatorConfig,
}

impl McConfig {
    /// α = 1.1, 1.2, …, 2.0; lengths 2^9 … 2^16; 1000 replications; the six
    /// study methods.
    pub fn study_design(master_seed: Seed) -> Self {
        McConfig {
            alphas: (11..=20).map(|a| a as f64 / 10.0).collect(),
            log2_lengths: (9..=16).collect(),
            replications: 1000,
            methods: MethodSpec::study_set(),
            master_seed,
            estimator_config: EstimatorConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.alphas.is_empty() {
            return bad("at least one alpha is required".into());
        }
        for (i, &a) in self.alphas.iter().enumerate() {
            if !(a > 1.0 && a <= 2.0) {
                return bad(format!("alpha must lie in (1, 2], got {a}"));
            }
            if self.alphas[..i].contains(&a) {
                return bad(format!("alpha {a} listed twice"));
            }
        }
        if self.log2_lengths.is_empty() {
            return bad("at least one length is required".into());
        }
        for (i, &p) in self.log2_lengths.iter().enumerate() {
            if !(1..=MAX_LOG2_LENGTH).contains(&p) {
                return bad(format!("log2 length must lie in [1, {MAX_LOG2_LENGTH}], got {p}"));
            }
            if self.log2_lengths[..i].contains(&p) {
                return bad(format!("log2 length {p} listed twice"));
            }
        }
        if self.replications < 1 {
            return bad("replications must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return bad(format!("method {m} listed twice"));
            }
        }
        self.estimator_config.validate()
    }

    pub fn cell_count(&self) -> usize {
        self.alphas.len() * self.log2_lengths.len() * self.methods.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellKey {
    pub alpha: f64,
    pub log2_length: u32,
    pub method: MethodSpec,
}

impl CellKey {
    pub fn length(&self) -> usize {
        1usize << self.log2_length
    }
}

/// Sampling statistics of one (α, length, method) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct McCell {
    pub key: CellKey,
    pub mean: f64,
    pub q025: f64,
    pub q975: f64,
    /// Replications that produced a finite estimate.
    pub n_effective: usize,
    pub n_failed: usize,
}

impl McCell {
    pub fn interval_width(&self) -> f64 {
        self.q975 - self.q025
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableEntry {
    pub key: CellKey,
    pub outcome: Result<McCell>,
}

/// All cells of a grid, ordered by (method, length, α) with methods in
/// configuration order.
#[derive(Debug, Clone, PartialEq)]
pub struct McTable {
    pub entries: Vec<TableEntry>,
}

impl McTable {
    pub fn get(&self, alpha: f64, log2_length: u32, method: MethodSpec) -> Option<&Result<McCell>> {
        self.entries
            .iter()
            .find(|e| e.key.alpha == alpha && e.key.log2_length == log2_length && e.key.method == method)
            .map(|e| &e.outcome)
    }

    /// The cell, panicking if it is missing or failed. Intended for tests
    /// and reports over grids known to be complete.
    pub fn cell(&self, alpha: f64, log2_length: u32, method: MethodSpec) -> &McCell {
        match self.get(alpha, log2_length, method) {
            Some(Ok(cell)) => cell,
            Some(Err(e)) => panic!("cell ({alpha}, 2^{log2_length}, {method}) failed: {e}"),
            None => panic!("cell ({alpha}, 2^{log2_length}, {method}) not in table"),
        }
    }

    pub const CSV_HEADER: &'static str = "alpha,log2_length,method,q,mean,q025,q975,n_effective,n_failed";

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for entry in &self.entries {
            let k = &entry.key;
            write!(out, "{},{},{},{},", k.alpha, k.log2_length, k.method.method, k.method.q)?;
            match &entry.outcome {
                Ok(c) => writeln!(
                    out,
                    "{:.6},{:.6},{:.6},{},{}",
                    c.mean, c.q025, c.q975, c.n_effective, c.n_failed
                )?,
                Err(Error::CellFailure { failed, .. }) => writeln!(out, "NaN,NaN,NaN,0,{failed}")?,
                Err(_) => writeln!(out, "NaN,NaN,NaN,0,0")?,
            }
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

/// Order-statistic quantile with linear interpolation at `h = (n-1)p`.
pub fn empirical_quantile(samples: &[f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("quantile of an empty sample".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability must lie in [0, 1], got {p}")));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("quantile of a sample containing NaN".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&sorted, p))
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    match sorted.get(lo + 1) {
        Some(&next) if frac > 0.0 => sorted[lo] + frac * (next - sorted[lo]),
        _ => sorted[lo],
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `replication` in cell (`alpha`, 2^`log2_length`).
pub fn replication_seed(master: Seed, alpha: f64, log2_length: u32, replication: usize) -> Seed {
    let mut h = splitmix64(master.0);
    for word in [alpha.to_bits(), u64::from(log2_length), replication as u64] {
        h = splitmix64(h ^ word);
    }
    Seed(h)
}

/// The i.i.d. `S(α, 0, √2/2, 0)` increments of one replication.
pub fn replication_series(master: Seed, alpha: f64, log2_length: u32, replication: usize) -> Result<Series> {
    let sampler = StableSampler::new(StableParams::symmetric_unit_variance(alpha)?)?;
    let seed = replication_seed(master, alpha, log2_length, replication);
    Series::increments(sampler.sample_n(1usize << log2_length, seed))
}

fn summarize(key: CellKey, estimates: Vec<Result<f64>>) -> Result<McCell> {
    let total = estimates.len();
    let mut last_error = None;
    let mut values = Vec::with_capacity(total);
    for est in estimates {
        match est {
            Ok(h) if h.is_finite() => values.push(h),
            Ok(h) => last_error = Some(format!("non-finite estimate {h}")),
            Err(e) => last_error = Some(e.to_string()),
        }
    }
    let n_failed = total - values.len();
    if values.is_empty() {
        return Err(Error::CellFailure {
            failed: n_failed,
            last_error: last_error.unwrap_or_default(),
        });
    }
    values.sort_by(f64::total_cmp);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(McCell {
        key,
        mean,
        q025: quantile_sorted(&values, LOWER_QUANTILE),
        q975: quantile_sorted(&values, UPPER_QUANTILE),
        n_effective: values.len(),
        n_failed,
    })
}

/// Estimates of every method on every replication of one (α, length)
/// pair, indexed `[method][replication]`. Each replication's series is
/// drawn once and shared by all methods.
fn simulate_pair<F>(
    config: &McConfig,
    alpha: f64,
    log2_length: u32,
    estimator: &F,
) -> Result<Vec<Vec<Result<f64>>>>
where
    F: Fn(MethodSpec, &Series, &EstimatorConfig) -> Result<f64> + Sync,
{
    let sampler = StableSampler::new(StableParams::symmetric_unit_variance(alpha)?)?;
    let length = 1usize << log2_length;
    let per_rep: Vec<Vec<Result<f64>>> = (0..config.replications)
        .into_par_iter()
        .map(|r| {
            let seed = replication_seed(config.master_seed, alpha, log2_length, r);
            match Series::increments(sampler.sample_n(length, seed)) {
                Ok(series) => config
                    .methods
                    .iter()
                    .map(|&m| estimator(m, &series, &config.estimator_config))
                    .collect(),
                Err(e) => vec![Err(e); config.methods.len()],
            }
        })
        .collect();
    let mut by_method: Vec<Vec<Result<f64>>> = (0..config.methods.len())
        .map(|_| Vec::with_capacity(config.replications))
        .collect();
    for rep in per_rep {
        for (slot, est) in by_method.iter_mut().zip(rep) {
            slot.push(est);
        }
    }
    Ok(by_method)
}

fn default_estimator(method: MethodSpec, series: &Series, cfg: &EstimatorConfig) -> Result<f64> {
    estimate(series, method, cfg).map(|e| e.hurst)
}

/// Sampling statistics of one method at one (α, length).
pub fn run_cell(
    alpha: f64,
    log2_length: u32,
    method: MethodSpec,
    replications: usize,
    master_seed: Seed,
    cfg: &EstimatorConfig,
) -> Result<McCell> {
    let config = McConfig {
        alphas: vec![alpha],
        log2_lengths: vec![log2_length],
        replications,
        methods: vec![method],
        master_seed,
        estimator_config: cfg.clone(),
    };
    config.validate()?;
    let key = CellKey { alpha, log2_length, method };
    let mut estimates = simulate_pair(&config, alpha, log2_length, &default_estimator)?;
    summarize(key, estimates.remove(0))
}

pub fn run_grid(config: &McConfig) -> Result<McTable> {
    run_grid_with(config, default_estimator, |_, _| {})
}

/// Runs the grid with a caller-supplied estimator. `progress` is called
/// with (pairs done, pairs total) after each (α, length) pair.
pub fn run_grid_with<F, P>(config: &McConfig, estimator: F, mut progress: P) -> Result<McTable>
where
    F: Fn(MethodSpec, &Series, &EstimatorConfig) -> Result<f64> + Sync,
    P: FnMut(usize, usize),
{
    config.validate()?;
    let total = config.alphas.len() * config.log2_lengths.len();
    let mut entries = Vec::with_capacity(config.cell_count());
    let mut done = 0;
    for &log2_length in &config.log2_lengths {
        for &alpha in &config.alphas {
            let estimates = simulate_pair(config, alpha, log2_length, &estimator)?;
            for (&method, est) in config.methods.iter().zip(estimates) {
                let key = CellKey { alpha, log2_length, method };
                entries.push(TableEntry { key, outcome: summarize(key, est) });
            }
            done += 1;
            progress(done, total);
        }
    }
    let method_rank = |m: &MethodSpec| config.methods.iter().position(|x| x == m).unwrap_or(usize::MAX);
    entries.sort_by(|a, b| {
        method_rank(&a.key.method)
            .cmp(&method_rank(&b.key.method))
            .then(a.key.log2_length.cmp(&b.key.log2_length))
            .then(a.key.alpha.total_cmp(&b.key.alpha))
    });
    Ok(McTable { entries })
}
