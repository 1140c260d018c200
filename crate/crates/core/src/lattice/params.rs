use crate::{Error, Result};

/// Decay exponent, inverse temperature and homogeneous field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    alpha: f64,
    beta: f64,
    h: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64, h: f64) -> Result<Self> {
        // NaN fails every comparison, so it is rejected too.
        if !(alpha > 1.0) || !alpha.is_finite() {
            return Err(Error::NonSummableDecay(alpha));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidBeta(beta));
        }
        if !h.is_finite() {
            return Err(Error::InvalidField(h));
        }
        Ok(Self { alpha, beta, h })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn with_beta(self, beta: f64) -> Result<Self> {
        Self::new(self.alpha, beta, self.h)
    }

    pub fn with_h(self, h: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, h)
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.beta, self.h)
    }

    /// `1 < alpha <= 2`: the decay range with a low-temperature phase transition.
    pub fn is_dyson_regime(&self) -> bool {
        self.alpha <= 2.0
    }
}
