use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Adaptive step `Δtⁿ = h^{1+σ} min(1, ‖u_hⁿ‖_∞^{-(1+ν)})`, optionally capped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeStepPolicy<T> {
    pub sigma: T,
    pub nu: T,
    pub dt_cap: Option<T>,
}

impl<T: Real> TimeStepPolicy<T> {
    pub const DEFAULT_SIGMA: f64 = 0.5;
    pub const DEFAULT_NU: f64 = 0.5;

    pub fn new(sigma: T, nu: T) -> Result<Self> {
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
        }
        if !(nu > T::zero()) || !nu.is_finite() {
            return Err(Error::param("nu", format!("must be positive, got {nu}")));
        }
        Ok(TimeStepPolicy {
            sigma,
            nu,
            dt_cap: None,
        })
    }

    pub fn with_cap(mut self, cap: T) -> Result<Self> {
        if !(cap > T::zero()) {
            return Err(Error::param("dt_cap", format!("must be positive, got {cap}")));
        }
        self.dt_cap = Some(cap);
        Ok(self)
    }

    /// Step size for a state with sup-norm `sup_u` on cells of width `h`.
    #[inline]
    pub fn dt(&self, sup_u: T, h: T) -> T {
        let base = h.powf(T::one() + self.sigma);
        let dt = if sup_u <= T::one() {
            base
        } else {
            base / sup_u.powf(T::one() + self.nu)
        };
        match self.dt_cap {
            Some(cap) => dt.min(cap),
            None => dt,
        }
    }
}

impl<T: Real> Default for TimeStepPolicy<T> {
    fn default() -> Self {
        TimeStepPolicy {
            sigma: T::lit(Self::DEFAULT_SIGMA),
            nu: T::lit(Self::DEFAULT_NU),
            dt_cap: None,
        }
    }
}
