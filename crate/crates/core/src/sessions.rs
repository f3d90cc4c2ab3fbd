//! Local Hurst exponents of intraday prices, one estimate per calendar day
//! or month. Sessions never share information: returns are formed only
//! between ticks of the same session.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::{DateTime, Datelike, NaiveDate, NaiveDateTime};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{estimate, EstimatorConfig, HurstEstimate, MethodSpec};
use crate::series::Series;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickRecord {
    pub timestamp: NaiveDateTime,
    pub price: f64,
}

/// Which CSV columns hold the timestamp and price, and how to read the
/// timestamp. Without a format string, ISO-8601 variants are accepted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSpec {
    pub timestamp_column: String,
    pub price_column: String,
    pub timestamp_format: Option<String>,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        ColumnSpec {
            timestamp_column: "timestamp".into(),
            price_column: "price".into(),
            timestamp_format: None,
        }
    }
}

/// A row that could not be parsed, by 1-based file line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedTicks {
    pub records: Vec<TickRecord>,
    pub rejections: Vec<Rejection>,
}

const ISO_FORMATS: &[&str] = &[
    "%Y-%m-%dT%H:%M:%S%.f",
    "%Y-%m-%d %H:%M:%S%.f",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M",
];

fn parse_timestamp(raw: &str, format: Option<&str>) -> std::result::Result<NaiveDateTime, String> {
    let raw = raw.trim();
    if let Some(fmt) = format {
        return NaiveDateTime::parse_from_str(raw, fmt)
            .or_else(|_| NaiveDate::parse_from_str(raw, fmt).map(|d| d.and_time(Default::default())))
            .map_err(|e| format!("timestamp '{raw}' does not match format '{fmt}': {e}"));
    }
    for fmt in ISO_FORMATS {
        if let Ok(ts) = NaiveDateTime::parse_from_str(raw, fmt) {
            return Ok(ts);
        }
    }
    if let Ok(ts) = DateTime::parse_from_rfc3339(raw) {
        return Ok(ts.naive_local());
    }
    if let Ok(d) = NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
        return Ok(d.and_time(Default::default()));
    }
    Err(format!("timestamp '{raw}' is not ISO-8601"))
}

fn parse_price(raw: &str) -> std::result::Result<f64, String> {
    let raw = raw.trim();
    match raw.parse::<f64>() {
        Ok(p) if p.is_finite() && p > 0.0 => Ok(p),
        Ok(p) => Err(format!("price {p} is not positive and finite")),
        Err(_) => Err(format!("price '{raw}' is not a number")),
    }
}

/// Reads a headed CSV of ticks. Unparseable rows are collected as
/// rejections; a timestamp earlier than its predecessor is an error.
pub fn load_ticks<R: Read>(source: R, spec: &ColumnSpec) -> Result<LoadedTicks> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Format(format!(
                "column '{name}' not found in header [{}]",
                headers.iter().collect::<Vec<_>>().join(", ")
            ))
        })
    };
    let ts_col = column(&spec.timestamp_column)?;
    let price_col = column(&spec.price_column)?;
    let format = spec.timestamp_format.as_deref();

    let mut records: Vec<TickRecord> = Vec::new();
    let mut rejections = Vec::new();
    for row in reader.records() {
        let row = match row {
            Ok(row) => row,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                rejections.push(Rejection { line, reason: e.to_string() });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        let parsed = match (row.get(ts_col), row.get(price_col)) {
            (Some(ts), Some(price)) => parse_timestamp(ts, format)
                .and_then(|timestamp| parse_price(price).map(|price| TickRecord { timestamp, price })),
            _ => Err(format!("row has {} fields, too few for the configured columns", row.len())),
        };
        match parsed {
            Ok(tick) => {
                if let Some(prev) = records.last() {
                    if tick.timestamp < prev.timestamp {
                        return Err(Error::Ordering { line });
                    }
                }
                records.push(tick);
            }
            Err(reason) => rejections.push(Rejection { line, reason }),
        }
    }
    if records.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no valid tick rows ({} rejected)",
            rejections.len()
        )));
    }
    Ok(LoadedTicks { records, rejections })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReturnMode {
    #[default]
    Log,
    Simple,
}

impl FromStr for ReturnMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "log" => Ok(ReturnMode::Log),
            "simple" => Ok(ReturnMode::Simple),
            _ => Err(Error::InvalidParameter(format!(
                "unknown return mode '{s}' (expected log or simple)"
            ))),
        }
    }
}

/// Successive returns `ln(p_t / p_{t-1})` or `p_t / p_{t-1} - 1`.
pub fn to_returns(ticks: &[TickRecord], mode: ReturnMode) -> Result<Vec<f64>> {
    if ticks.len() < 2 {
        return Err(Error::EmptyInput(format!(
            "returns need at least 2 ticks, got {}",
            ticks.len()
        )));
    }
    if let Some(bad) = ticks.iter().find(|t| !(t.price > 0.0 && t.price.is_finite())) {
        return Err(Error::Domain(format!(
            "price {} at {} is not positive",
            bad.price, bad.timestamp
        )));
    }
    Ok(ticks
        .windows(2)
        .map(|w| match mode {
            ReturnMode::Log => (w[1].price / w[0].price).ln(),
            ReturnMode::Simple => w[1].price / w[0].price - 1.0,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Granularity {
    Day,
    Month,
}

impl Granularity {
    /// Fewest returns a session needs before it is estimated.
    pub fn default_min_obs(self) -> usize {
        match self {
            Granularity::Day => 128,
            Granularity::Month => 1024,
        }
    }

    pub fn key(self, ts: &NaiveDateTime) -> SessionKey {
        match self {
            Granularity::Day => SessionKey::Day(ts.date()),
            Granularity::Month => SessionKey::Month {
                year: ts.year(),
                month: ts.month(),
            },
        }
    }
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "day" | "daily" => Ok(Granularity::Day),
            "month" | "monthly" => Ok(Granularity::Month),
            _ => Err(Error::InvalidParameter(format!(
                "unknown granularity '{s}' (expected day or month)"
            ))),
        }
    }
}

/// Calendar day or month; orders chronologically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SessionKey {
    Day(NaiveDate),
    Month { year: i32, month: u32 },
}

impl SessionKey {
    pub fn granularity(&self) -> Granularity {
        match self {
            SessionKey::Day(_) => Granularity::Day,
            SessionKey::Month { .. } => Granularity::Month,
        }
    }
}

impl fmt::Display for SessionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SessionKey::Day(d) => write!(f, "{}", d.format("%Y-%m-%d")),
            SessionKey::Month { year, month } => write!(f, "{year:04}-{month:02}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Session<'a> {
    pub key: SessionKey,
    pub ticks: &'a [TickRecord],
}

/// Splits chronologically ordered ticks into contiguous calendar sessions.
pub fn group_sessions(ticks: &[TickRecord], granularity: Granularity) -> Result<Vec<Session<'_>>> {
    if ticks.is_empty() {
        return Err(Error::EmptyInput("no ticks to group".into()));
    }
    if let Some(i) = ticks.windows(2).position(|w| w[1].timestamp < w[0].timestamp) {
        return Err(Error::InvalidParameter(format!(
            "ticks out of order at index {}",
            i + 1
        )));
    }
    let mut sessions = Vec::new();
    let mut start = 0;
    let mut key = granularity.key(&ticks[0].timestamp);
    for (i, tick) in ticks.iter().enumerate().skip(1) {
        let k = granularity.key(&tick.timestamp);
        if k != key {
            sessions.push(Session { key, ticks: &ticks[start..i] });
            start = i;
            key = k;
        }
    }
    sessions.push(Session { key, ticks: &ticks[start..] });
    Ok(sessions)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionHurst {
    pub key: SessionKey,
    pub estimate: HurstEstimate,
    /// Number of within-session returns.
    pub n_obs: usize,
}

/// One row of session output: an estimate, or the reason it was skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionOutcome {
    pub key: SessionKey,
    pub n_obs: usize,
    pub method: MethodSpec,
    pub result: std::result::Result<HurstEstimate, String>,
}

impl SessionOutcome {
    pub fn hurst(&self) -> Option<SessionHurst> {
        self.result.as_ref().ok().map(|estimate| SessionHurst {
            key: self.key,
            estimate: estimate.clone(),
            n_obs: self.n_obs,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionSettings {
    pub granularity: Granularity,
    pub method: MethodSpec,
    pub return_mode: ReturnMode,
    pub estimator_config: EstimatorConfig,
    pub min_obs: usize,
}

impl SessionSettings {
    pub fn new(granularity: Granularity) -> Self {
        SessionSettings {
            granularity,
            method: MethodSpec { method: crate::estimators::Method::Ghe, q: 2.0 },
            return_mode: ReturnMode::Log,
            estimator_config: EstimatorConfig::default(),
            min_obs: granularity.default_min_obs(),
        }
    }
}

fn estimate_session(session: &Session<'_>, settings: &SessionSettings) -> SessionOutcome {
    let n_obs = session.ticks.len().saturating_sub(1);
    let result = if n_obs < settings.min_obs {
        Err(format!("{n_obs} returns, fewer than the minimum {}", settings.min_obs))
    } else {
        to_returns(session.ticks, settings.return_mode)
            .and_then(Series::increments)
            .and_then(|s| estimate(&s, settings.method, &settings.estimator_config))
            .map_err(|e| e.to_string())
    };
    SessionOutcome {
        key: session.key,
        n_obs,
        method: settings.method,
        result,
    }
}

/// One outcome per session, chronological. Fails only if every session was
/// skipped.
pub fn session_hurst_series(ticks: &[TickRecord], settings: &SessionSettings) -> Result<Vec<SessionOutcome>> {
    settings.estimator_config.validate()?;
    let sessions = group_sessions(ticks, settings.granularity)?;
    let outcomes: Vec<SessionOutcome> = sessions
        .par_iter()
        .map(|s| estimate_session(s, settings))
        .collect();
    if outcomes.iter().all(|o| o.result.is_err()) {
        return Err(Error::EmptyResult(format!(
            "all {} sessions were skipped",
            outcomes.len()
        )));
    }
    Ok(outcomes)
}

pub const SESSIONS_CSV_HEADER: &str = "session,n_obs,method,q,hurst,r_squared,status";

pub fn write_sessions_csv<W: Write>(outcomes: &[SessionOutcome], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{SESSIONS_CSV_HEADER}")?;
    for o in outcomes {
        write!(out, "{},{},{},{},", o.key, o.n_obs, o.method.method, o.method.q)?;
        match &o.result {
            Ok(e) => writeln!(out, "{:.6},{:.6},ok", e.hurst, e.fit.r_squared)?,
            Err(_) => writeln!(out, "NaN,NaN,skipped")?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> NaiveDateTime {
        parse_timestamp(s, None).unwrap()
    }

    fn tick(s: &str, price: f64) -> TickRecord {
        TickRecord { timestamp: ts(s), price }
    }

    #[test]
    fn iso_variants_parse() {
        let want = NaiveDate::from_ymd_opt(1983, 1, 3).unwrap().and_hms_opt(9, 31, 0).unwrap();
        for s in [
            "1983-01-03T09:31:00",
            "1983-01-03 09:31:00",
            "1983-01-03T09:31",
            "1983-01-03 09:31",
            "1983-01-03T09:31:00.000",
            "1983-01-03T09:31:00Z",
            "1983-01-03T09:31:00-05:00",
        ] {
            assert_eq!(ts(s), want, "{s}");
        }
        assert!(parse_timestamp("03/01/1983 09:31", None).is_err());
        assert_eq!(
            parse_timestamp("03/01/1983 09:31", Some("%d/%m/%Y %H:%M")).unwrap(),
            want
        );
        assert_eq!(
            parse_timestamp("19830103", Some("%Y%m%d")).unwrap(),
            NaiveDate::from_ymd_opt(1983, 1, 3).unwrap().and_hms_opt(0, 0, 0).unwrap()
        );
    }

    #[test]
    fn loads_three_rows() {
        let csv = "timestamp,price\n1983-01-03T09:30:00,100\n1983-01-03T09:31:00,100.5\n1983-01-03T09:32:00,99.9\n";
        let loaded = load_ticks(csv.as_bytes(), &ColumnSpec::default()).unwrap();
        assert_eq!(loaded.records.len(), 3);
        assert!(loaded.rejections.is_empty());
        assert_eq!(loaded.records[1].price, 100.5);
        assert!(loaded.records[0].timestamp < loaded.records[2].timestamp);
    }

    #[test]
    fn malformed_price_is_rejected_with_line() {
        let mut csv = String::from("when,close,volume\n");
        for i in 0..100 {
            let price = if i == 41 { "abc".to_string() } else { format!("{}", 100 + i) };
            csv.push_str(&format!("1983-01-03 10:{:02}:{:02},{price},7\n", i / 60, i % 60));
        }
        let spec = ColumnSpec {
            timestamp_column: "when".into(),
            price_column: "close".into(),
            timestamp_format: None,
        };
        let loaded = load_ticks(csv.as_bytes(), &spec).unwrap();
        assert_eq!(loaded.records.len(), 99);
        assert_eq!(loaded.rejections.len(), 1);
        // Header is line 1, row i is line i + 2.
        assert_eq!(loaded.rejections[0].line, 43);
    }

    #[test]
    fn nonpositive_and_short_rows_are_rejected() {
        let csv = "timestamp,price\n1983-01-03T09:30:00,100\n1983-01-03T09:31:00,0\n1983-01-03T09:32:00\n1983-01-03T09:33:00,101\n";
        let loaded = load_ticks(csv.as_bytes(), &ColumnSpec::default()).unwrap();
        assert_eq!(loaded.records.len(), 2);
        let lines: Vec<u64> = loaded.rejections.iter().map(|r| r.line).collect();
        assert_eq!(lines, vec![3, 4]);
    }

    #[test]
    fn out_of_order_names_line() {
        let csv = "timestamp,price\n1983-01-03T09:30:00,100\n1983-01-03T09:32:00,101\n1983-01-03T09:31:00,102\n";
        let err = load_ticks(csv.as_bytes(), &ColumnSpec::default()).unwrap_err();
        assert_eq!(err, Error::Ordering { line: 4 });
    }

    #[test]
    fn missing_column_and_empty_file() {
        let err = load_ticks("time,price\n".as_bytes(), &ColumnSpec::default()).unwrap_err();
        assert!(matches!(err, Error::Format(ref m) if m.contains("timestamp")));
        let err = load_ticks("timestamp,price\n".as_bytes(), &ColumnSpec::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyInput(_)));
        let err = load_ticks("timestamp,price\nx,y\n".as_bytes(), &ColumnSpec::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyInput(_)));
    }

    #[test]
    fn return_definitions() {
        let flat = [tick("1983-01-03T10:00", 100.0), tick("1983-01-03T10:01", 100.0), tick("1983-01-03T10:02", 100.0)];
        assert_eq!(to_returns(&flat, ReturnMode::Log).unwrap(), vec![0.0, 0.0]);
        let up = [tick("1983-01-03T10:00", 100.0), tick("1983-01-03T10:01", 110.0)];
        let simple = to_returns(&up, ReturnMode::Simple).unwrap();
        assert!((simple[0] - 0.1).abs() < 1e-15);
        let log = to_returns(&up, ReturnMode::Log).unwrap();
        assert!((log[0] - 0.09531017980432493).abs() < 1e-15);
        assert!(to_returns(&up[..1], ReturnMode::Log).is_err());
        let bad = [tick("1983-01-03T10:00", 100.0), tick("1983-01-03T10:01", -1.0)];
        assert!(matches!(to_returns(&bad, ReturnMode::Log), Err(Error::Domain(_))));
    }

    #[test]
    fn groups_by_day_and_month() {
        let ticks = [
            tick("1983-01-02T15:59", 1.0),
            tick("1983-01-02T16:00", 1.0),
            tick("1983-01-03T09:30", 1.0),
            tick("1983-01-03T09:31", 1.0),
            tick("1983-01-03T09:32", 1.0),
        ];
        let days = group_sessions(&ticks, Granularity::Day).unwrap();
        assert_eq!(days.len(), 2);
        assert_eq!(days[0].key.to_string(), "1983-01-02");
        assert_eq!(days[1].key.to_string(), "1983-01-03");
        assert_eq!(days.iter().map(|s| s.ticks.len()).sum::<usize>(), ticks.len());
        let months = group_sessions(&ticks, Granularity::Month).unwrap();
        assert_eq!(months.len(), 1);
        assert_eq!(months[0].key.to_string(), "1983-01");
        assert!(group_sessions(&[], Granularity::Day).is_err());
        let mut rev = ticks;
        rev.swap(0, 4);
        assert!(group_sessions(&rev, Granularity::Day).is_err());
    }

    #[test]
    fn small_sessions_are_skipped_and_reported() {
        let mut ticks = Vec::new();
        // Day 1: 10 ticks. Day 2: 300 ticks of a deterministic wiggle.
        for i in 0..10 {
            ticks.push(tick(&format!("1983-01-03T10:{i:02}"), 100.0 + i as f64));
        }
        let mut p = 100.0;
        for i in 0..300 {
            p *= 1.0 + 0.001 * (((i * 37) % 11) as f64 - 5.0);
            ticks.push(tick(&format!("1983-01-04T{:02}:{:02}", 9 + i / 60, i % 60), p));
        }
        let mut settings = SessionSettings::new(Granularity::Day);
        settings.min_obs = 100;
        let out = session_hurst_series(&ticks, &settings).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].n_obs, 9);
        assert!(out[0].result.is_err());
        assert!(out[1].result.is_ok());
        assert!(out[0].hurst().is_none() && out[1].hurst().is_some());

        let mut csv = Vec::new();
        write_sessions_csv(&out, &mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SESSIONS_CSV_HEADER);
        assert_eq!(lines[1], "1983-01-03,9,ghe,2,NaN,NaN,skipped");
        assert!(lines[2].starts_with("1983-01-04,299,ghe,2,") && lines[2].ends_with(",ok"));

        settings.min_obs = 1000;
        assert!(matches!(
            session_hurst_series(&ticks, &settings),
            Err(Error::EmptyResult(_))
        ));
    }

    #[test]
    fn granularity_and_mode_parse() {
        assert_eq!("day".parse::<Granularity>().unwrap(), Granularity::Day);
        assert_eq!("Monthly".parse::<Granularity>().unwrap(), Granularity::Month);
        assert!("week".parse::<Granularity>().is_err());
        assert_eq!("simple".parse::<ReturnMode>().unwrap(), ReturnMode::Simple);
        assert!("pct".parse::<ReturnMode>().is_err());
    }
}
