use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::Mesh;

/// Scalar function of one variable, shareable across runs.
pub type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// How the first and last cells are coupled.
#[derive(Clone)]
pub enum Boundary<T> {
    /// `U⁰ := Uᴵ` and `Φᴵ⁺¹ := Φ¹`.
    Periodic,
    /// Prescribed upwind traces: `u` entering at `a` and `φ` entering at `b`,
    /// both as functions of time. Used for benchmark solutions that are not
    /// periodic.
    Inflow { u_left: ScalarFn<T>, phi_right: ScalarFn<T> },
}

impl<T> fmt::Debug for Boundary<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Periodic => f.write_str("Periodic"),
            Boundary::Inflow { .. } => f.write_str("Inflow"),
        }
    }
}

/// Exponent and initial data of `u_tt - u_xx = |u|^p` in split form.
#[derive(Clone)]
pub struct ProblemConfig<T> {
    pub p: T,
    pub u0: ScalarFn<T>,
    pub u1: ScalarFn<T>,
    /// `φ₀ = u₁ + u₀'`.
    pub phi0: ScalarFn<T>,
    pub boundary: Boundary<T>,
}

impl<T> fmt::Debug for ProblemConfig<T>
where
    T: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemConfig")
            .field("p", &self.p)
            .field("boundary", &self.boundary)
            .finish_non_exhaustive()
    }
}

impl<T: Real> ProblemConfig<T> {
    /// Builds `φ₀` from the analytic derivative `u0_prime`.
    pub fn new(
        p: T,
        u0: impl Fn(T) -> T + Send + Sync + 'static,
        u1: impl Fn(T) -> T + Send + Sync + 'static,
        u0_prime: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Result<Self> {
        check_exponent(p)?;
        let u1: ScalarFn<T> = Arc::new(u1);
        let u1_for_phi = Arc::clone(&u1);
        Ok(ProblemConfig {
            p,
            u0: Arc::new(u0),
            u1,
            phi0: Arc::new(move |x| u1_for_phi(x) + u0_prime(x)),
            boundary: Boundary::Periodic,
        })
    }

    pub fn with_boundary(mut self, boundary: Boundary<T>) -> Self {
        self.boundary = boundary;
        self
    }

    /// Spatially constant data `u ≡ u0`, `φ ≡ phi0`.
    pub fn constant(p: T, u0: T, phi0: T) -> Result<Self> {
        Self::new(p, move |_| u0, move |_| phi0, |_| T::zero())
    }

    /// Checks the exponent and, for periodic coupling, that the data are
    /// periodic on the mesh domain.
    pub fn validate(&self, mesh: &Mesh<T>) -> Result<()> {
        check_exponent(self.p)?;
        if let Boundary::Periodic = self.boundary {
            let close = |x: T, y: T| (x - y).abs() <= T::lit(1e-9) * T::one().max(x.abs());
            let (a, b) = (mesh.a(), mesh.b());
            if !close((self.u0)(a), (self.u0)(b)) {
                return Err(Error::param("u0", "initial data must satisfy u0(a) = u0(b)"));
            }
            if !close((self.phi0)(a), (self.phi0)(b)) {
                return Err(Error::param("phi0", "initial data must satisfy phi0(a) = phi0(b)"));
            }
        }
        Ok(())
    }
}

pub(crate) fn check_exponent<T: Real>(p: T) -> Result<()> {
    if p > T::one() && p.is_finite() {
        Ok(())
    } else {
        Err(Error::param("p", format!("exponent must exceed 1, got {p}")))
    }
}
