use crate::error::{Error, Result};

/// Homogeneous chiral medium: permittivity `epsilon`, permeability `mu` and
/// chirality measure `beta` of the Drude-Born-Fedorov relations
/// `B = mu (H + beta rot H)`, `D = epsilon (E + beta rot E)`.
///
/// All quantities are dimensionless; the caller fixes the scales.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MediumParams {
    epsilon: f64,
    mu: f64,
    beta: f64,
    sqrt_eps_mu: f64,
}

impl MediumParams {
    /// `beta = 0` is accepted here; only the chiral kernel paths reject it.
    pub fn new(epsilon: f64, mu: f64, beta: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta must be finite, got {beta}")));
        }
        Ok(Self {
            epsilon,
            mu,
            beta,
            sqrt_eps_mu: (epsilon * mu).sqrt(),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `sqrt(epsilon mu)`, the inverse wave speed.
    pub fn sqrt_eps_mu(&self) -> f64 {
        self.sqrt_eps_mu
    }

    /// `sqrt(mu / epsilon)`, the wave impedance scaling `H` inside `V`.
    pub fn impedance(&self) -> f64 {
        (self.mu / self.epsilon).sqrt()
    }

    pub fn is_chiral(&self) -> bool {
        self.beta != 0.0
    }

    pub fn require_chiral(&self) -> Result<()> {
        if self.is_chiral() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "beta = 0: the chiral kernel is undefined, use the non-chiral operator".into(),
            ))
        }
    }

    /// Pole of the dispersion map, `a = 1 / (beta sqrt(epsilon mu))`.
    pub fn pole(&self) -> Result<f64> {
        self.require_chiral()?;
        Ok(1.0 / (self.beta * self.sqrt_eps_mu))
    }

    /// Same medium with a different chirality.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.epsilon, self.mu, beta)
    }
}
