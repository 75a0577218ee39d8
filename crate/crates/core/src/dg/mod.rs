//! The fully discrete DG scheme: mesh, fields, adaptive time step and the
//! explicit update with upwind fluxes (backward trace for `u`, forward trace
//! for `φ`).

mod consistency;
mod kernel;
mod mesh;
mod operators;
mod problem;
mod state;
mod timestep;

pub use consistency::{consistency_residuals, Residuals};
pub use mesh::Mesh;
pub use operators::assemble_update_operators;
pub use problem::{Boundary, ProblemConfig, ScalarFn};
pub use state::{max_abs, sup_norm, FieldState};
pub use timestep::TimeStepPolicy;

use crate::error::Result;
use crate::reference_element::ReferenceElement;
use crate::scalar::{Power, Real};
use crate::scheme::{Scheme, StepReport};

use kernel::Kernel;

/// Nodal interpolant `I_h^k f`, cell-major.
pub fn interpolate<T: Real>(
    f: impl Fn(T) -> T,
    mesh: &Mesh<T>,
    elem: &ReferenceElement<T>,
) -> Vec<T> {
    mesh.nodal_positions(elem).into_iter().map(f).collect()
}

/// Evaluates the piecewise expansion at physical `x` (periodic wrap).
pub fn evaluate_field<T: Real>(
    coeffs: &[T],
    mesh: &Mesh<T>,
    elem: &ReferenceElement<T>,
    x: T,
) -> T {
    let (i, xi) = mesh.locate(x);
    let nb = elem.n_basis();
    elem.evaluate(&coeffs[i * nb..(i + 1) * nb], xi)
}

/// `Δtⁿ` for the current state.
pub fn adaptive_dt<T: Real>(state: &FieldState<T>, policy: &TimeStepPolicy<T>, h: T) -> T {
    policy.dt(max_abs(&state.u), h)
}

/// DG discretization of the split system on a fixed mesh.
pub struct DgScheme<T: Real> {
    elem: ReferenceElement<T>,
    mesh: Mesh<T>,
    config: ProblemConfig<T>,
    power: Power<T>,
    kernel: Kernel<T>,
    k_scale: T,
    lambda: T,
}

impl<T: Real> DgScheme<T> {
    pub fn new(elem: &ReferenceElement<T>, mesh: &Mesh<T>, config: &ProblemConfig<T>) -> Result<Self> {
        config.validate(mesh)?;
        Ok(DgScheme {
            kernel: Kernel::new(elem),
            power: Power::new(config.p),
            k_scale: mesh.h() * T::lit(0.5) / mesh.length(),
            lambda: elem.lambda(config.p)?,
            elem: elem.clone(),
            mesh: mesh.clone(),
            config: config.clone(),
        })
    }

    pub fn element(&self) -> &ReferenceElement<T> {
        &self.elem
    }

    pub fn mesh(&self) -> &Mesh<T> {
        &self.mesh
    }

    pub fn config(&self) -> &ProblemConfig<T> {
        &self.config
    }

    fn inflow_traces(&self, t: T) -> Option<(T, T)> {
        match &self.config.boundary {
            Boundary::Periodic => None,
            Boundary::Inflow { u_left, phi_right } => Some((u_left(t), phi_right(t))),
        }
    }
}

impl<T: Real> Scheme<T> for DgScheme<T> {
    fn name(&self) -> &'static str {
        "dg"
    }

    fn h(&self) -> T {
        self.mesh.h()
    }

    fn initial_state(&self) -> FieldState<T> {
        let u = interpolate(|x| (self.config.u0)(x), &self.mesh, &self.elem);
        let phi = interpolate(|x| (self.config.phi0)(x), &self.mesh, &self.elem);
        FieldState::new(u, phi, self.elem.n_basis())
    }

    fn k_h(&self, values: &[T]) -> T {
        k_h(values, &self.mesh, &self.elem)
    }

    fn lambda(&self) -> T {
        self.lambda
    }

    fn p(&self) -> T {
        self.config.p
    }

    fn positions(&self) -> Vec<T> {
        self.mesh.nodal_positions(&self.elem)
    }

    fn step(&self, state: &mut FieldState<T>, dt: T) -> Result<StepReport<T>> {
        if !(dt > T::zero()) {
            return Err(crate::Error::param("dt", format!("must be positive, got {dt}")));
        }
        let r = dt / self.mesh.h();
        let inflow = self.inflow_traces(state.t);
        let sums = self
            .kernel
            .step(&mut state.u, &mut state.phi, r, dt, self.power, inflow);
        state.t += dt;
        state.n += 1;
        Ok(StepReport {
            dk_u: sums.d_u * self.k_scale,
            dk_phi: sums.d_phi * self.k_scale,
            k_u: sums.u * self.k_scale,
            k_phi: sums.phi * self.k_scale,
            sup_u: sums.sup_u,
            sup_phi: sums.sup_phi,
        })
    }
}

/// One step of the scheme from scratch; convenient for tests and one-off use.
pub fn dg_step<T: Real>(
    state: &mut FieldState<T>,
    elem: &ReferenceElement<T>,
    mesh: &Mesh<T>,
    config: &ProblemConfig<T>,
    dt: T,
) -> Result<StepReport<T>> {
    DgScheme::new(elem, mesh, config)?.step(state, dt)
}

/// `K_h = 1/(b-a) Σ_i (h/2) Σ_j α_j u_jⁱ`.
pub fn k_h<T: Real>(values: &[T], mesh: &Mesh<T>, elem: &ReferenceElement<T>) -> T {
    let nb = elem.n_basis();
    let s: T = values
        .chunks_exact(nb)
        .map(|cell| cell.iter().zip(&elem.alpha).map(|(&u, &a)| a * u).sum::<T>())
        .sum();
    s * mesh.h() * T::lit(0.5) / mesh.length()
}
