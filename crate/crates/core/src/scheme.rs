//! Common interface of the DG solver and the finite-difference comparator,
//! so one driver runs either.

use crate::dg::FieldState;
use crate::error::Result;
use crate::scalar::Real;

/// Quantities of the state produced by a step, gathered during the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport<T> {
    /// `K_h(uⁿ⁺¹) - K_h(uⁿ)`, summed from the per-coefficient increments.
    pub dk_u: T,
    /// `K_h(φⁿ⁺¹) - K_h(φⁿ)`, summed from the per-coefficient increments.
    pub dk_phi: T,
    pub k_u: T,
    pub k_phi: T,
    pub sup_u: T,
    pub sup_phi: T,
}

/// Spatial discretization advanced by explicit Euler steps.
pub trait Scheme<T: Real> {
    /// Short tag used in output files.
    fn name(&self) -> &'static str;

    /// Spacing entering the time-step rule.
    fn h(&self) -> T;

    fn initial_state(&self) -> FieldState<T>;

    /// Discrete spatial mean of a coefficient array.
    fn k_h(&self, values: &[T]) -> T;

    /// Constant of the discrete Jensen-type inequality for this scheme.
    fn lambda(&self) -> T;

    fn p(&self) -> T;

    /// Physical position of every degree of freedom.
    fn positions(&self) -> Vec<T>;

    /// Advances `state` by `dt` in place.
    fn step(&self, state: &mut FieldState<T>, dt: T) -> Result<StepReport<T>>;
}
