//! Activity graphs, model parameters, finite volumes and configurations.

mod assignment;
mod graph;
mod volume;

pub use assignment::FieldAssignment;
pub use graph::{ActivityGraph, GraphPreset, Spin};
pub use volume::{occupied_count, Configuration, FiniteVolume, RootDegree};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tree order `k` (children per non-root vertex) and activity `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    k: u32,
    lambda: f64,
}

impl ModelParams {
    pub fn new(k: u32, lambda: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("k must be >= 2, got {k}")));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        Ok(Self { k, lambda })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.k, lambda)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validate() {
        assert!(ModelParams::new(2, 1.0).is_ok());
        assert!(ModelParams::new(1, 1.0).is_err());
        assert!(ModelParams::new(3, 0.0).is_err());
        assert!(ModelParams::new(3, f64::NAN).is_err());
        assert!(ModelParams::new(3, -2.0).is_err());
    }
}
