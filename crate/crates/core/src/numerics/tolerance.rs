use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleMode {
    Absolute,
    FrobeniusRelative,
}

/// Threshold policy shared by every approximate comparison in the crate.
///
/// In relative mode the effective threshold for a quantity of scale `s`
/// is `eps * max(1, s)`, so the floor never drops below `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub eps: f64,
    pub scale_mode: ScaleMode,
}

impl Tolerance {
    pub const DEFAULT_EPS: f64 = 1e-9;

    pub fn new(eps: f64) -> Result<Self> {
        Self::with_mode(eps, ScaleMode::FrobeniusRelative)
    }

    pub fn with_mode(eps: f64, scale_mode: ScaleMode) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {eps}")));
        }
        Ok(Self { eps, scale_mode })
    }

    pub fn absolute(eps: f64) -> Result<Self> {
        Self::with_mode(eps, ScaleMode::Absolute)
    }

    /// Effective threshold for a quantity whose natural scale is `scale`.
    pub fn threshold(&self, scale: f64) -> f64 {
        match self.scale_mode {
            ScaleMode::Absolute => self.eps,
            ScaleMode::FrobeniusRelative => self.eps * scale.max(1.0),
        }
    }

    pub fn accepts(&self, deviation: f64, scale: f64) -> bool {
        deviation <= self.threshold(scale)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { eps: Self::DEFAULT_EPS, scale_mode: ScaleMode::FrobeniusRelative }
    }
}
