use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerance policy.
///
/// The effective tolerance for a matrix of spectral norm `s` is
/// `atol + rtol * s`. Eigenvalues closer than `eig_cluster` are treated as the
/// same eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub atol: f64,
    pub rtol: f64,
    pub eig_cluster: f64,
    pub max_dim: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            atol: 1e-9,
            rtol: 1e-9,
            eig_cluster: 1e-7,
            max_dim: 64,
        }
    }
}

impl Tolerance {
    pub fn new(atol: f64, rtol: f64, eig_cluster: f64, max_dim: usize) -> Result<Self> {
        let tol = Tolerance {
            atol,
            rtol,
            eig_cluster,
            max_dim,
        };
        tol.validate()?;
        Ok(tol)
    }

    /// Default policy with a different absolute floor.
    pub fn with_atol(atol: f64) -> Result<Self> {
        Tolerance {
            atol,
            ..Tolerance::default()
        }
        .validated()
    }

    pub fn with_max_dim(self, max_dim: usize) -> Self {
        Tolerance { max_dim, ..self }
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("atol", self.atol),
            ("rtol", self.rtol),
            ("eig_cluster", self.eig_cluster),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidTolerance(format!("{name} = {v} must be >= 0")));
            }
        }
        if self.atol > 1e-3 {
            return Err(Error::InvalidTolerance(format!(
                "atol = {} exceeds the sanity bound 1e-3",
                self.atol
            )));
        }
        if self.max_dim == 0 {
            return Err(Error::InvalidTolerance("max_dim must be positive".into()));
        }
        Ok(())
    }

    /// `atol + rtol * norm`.
    #[inline]
    pub fn effective(&self, norm: f64) -> f64 {
        self.atol + self.rtol * norm.abs()
    }

    /// Components below this modulus are ignored when fixing a phase.
    #[inline]
    pub fn phase_floor(&self) -> f64 {
        self.atol.sqrt().max(1e-12)
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        if n > self.max_dim {
            return Err(Error::DimensionTooLarge {
                n,
                max: self.max_dim,
            });
        }
        Ok(())
    }
}
