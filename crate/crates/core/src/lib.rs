//! Hurst exponent estimation under heavy tails.
//!
//! * [`stable`]: alpha-stable sampling (Chambers–Mallows–Stuck) and the
//!   matching characteristic function.
//! * [`estimators`]: R/S, MF-DFA/DFA, DMA and GHE with log-log regression.
//! * [`mc`]: replicated sampling-distribution studies over (α, length, method).
//! * [`sessions`]: per-day or per-month Hurst exponents from tick data.
//! * [`cli`]: the `hurstlab` command-line front-end.

pub mod cli;
pub mod error;
pub mod estimators;
pub mod mc;
pub mod series;
pub mod sessions;
pub mod stable;

pub use error::{Error, Result};
pub use estimators::{
    build_profile, estimate, estimate_dfa, estimate_dma, estimate_ghe, estimate_mfdfa, estimate_rs,
    ghe_kq, loglog_fit, make_scale_grid, EstimatorConfig, HurstEstimate, LogLogFit, Method,
    MethodSpec, ScaleGrid,
};
pub use series::{Series, SeriesKind};
pub use stable::{empirical_cf, sample_stable, stable_cf, ComplexValue, Seed, StableParams, StableSampler};
