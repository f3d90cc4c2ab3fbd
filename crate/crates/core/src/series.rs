use crate::error::{Error, Result};

/// Whether a series holds increments (returns) or accumulated levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    Increments,
    Levels,
}

/// An ordered sequence of finite observations, at least two long.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
    kind: SeriesKind,
}

impl Series {
    pub fn new(values: Vec<f64>, kind: SeriesKind) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::EmptyInput(format!(
                "series needs at least 2 observations, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "series value at index {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(Series { values, kind })
    }

    pub fn increments(values: Vec<f64>) -> Result<Self> {
        Self::new(values, SeriesKind::Increments)
    }

    pub fn levels(values: Vec<f64>) -> Result<Self> {
        Self::new(values, SeriesKind::Levels)
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Returns a copy with every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v * factor).collect(), self.kind)
    }

    pub(crate) fn expect_kind(&self, kind: SeriesKind, what: &str) -> Result<()> {
        if self.kind != kind {
            return Err(Error::InvalidParameter(format!(
                "{what} expects a series of {kind:?}, got {:?}",
                self.kind
            )));
        }
        Ok(())
    }
}

impl AsRef<[f64]> for Series {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}
