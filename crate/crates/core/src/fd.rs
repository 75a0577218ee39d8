//! Upwind finite-difference comparator on a uniform periodic grid:
//! `u` takes the backward difference, `φ` the forward one, explicit Euler in
//! time with the nonlinearity evaluated at the updated `u`.

use crate::blowup::{run_until_blowup, BlowUpResult, RunLimits};
use crate::dg::{Boundary, FieldState, Mesh, ProblemConfig, TimeStepPolicy};
use crate::error::{Error, Result};
use crate::history::RunHistory;
use crate::scalar::{fast_max, Power, Real};
use crate::scheme::{Scheme, StepReport};

/// Grid values of `u` and `φ`; one value per point.
pub type FdState<T> = FieldState<T>;

struct Sums<T> {
    d_u: T,
    d_phi: T,
    u: T,
    phi: T,
    sup_u: T,
    sup_phi: T,
}

fn sweep<T: Real>(u: &mut [T], phi: &mut [T], h: T, dt: T, power: Power<T>) -> Result<Sums<T>> {
    if !(dt > T::zero()) {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    if dt > h {
        return Err(Error::CflViolation {
            dt: dt.to_f64_lossy(),
            limit: h.to_f64_lossy(),
        });
    }
    let n = u.len();
    if n < 2 || phi.len() != n {
        return Err(Error::Shape(format!("grid arrays of length {} and {}", n, phi.len())));
    }
    let r = dt / h;
    let zero = T::zero();
    let mut s = Sums {
        d_u: zero,
        d_phi: zero,
        u: zero,
        phi: zero,
        sup_u: zero,
        sup_phi: zero,
    };

    // Backward differences: walk upward, remembering the old left value.
    let mut left_old = u[n - 1];
    for j in 0..n {
        let old = u[j];
        let inc = -r * (old - left_old) + dt * phi[j];
        left_old = old;
        u[j] = old + inc;
        s.d_u += inc;
        s.u += u[j];
        s.sup_u = fast_max(s.sup_u, u[j].abs());
    }
    // Forward differences: walk downward, remembering the old right value.
    let mut right_old = phi[0];
    for j in (0..n).rev() {
        let old = phi[j];
        let inc = r * (right_old - old) + dt * power.abs_pow(u[j]);
        right_old = old;
        phi[j] = old + inc;
        s.d_phi += inc;
        s.phi += phi[j];
        s.sup_phi = fast_max(s.sup_phi, phi[j].abs());
    }
    // `max` drops NaN; the sums do not.
    if !s.u.is_finite() {
        s.sup_u = T::nan();
    }
    if !s.phi.is_finite() {
        s.sup_phi = T::nan();
    }
    Ok(s)
}

/// One upwind step on a periodic grid of spacing `h`. Rejects `dt > h`.
pub fn fd_step<T: Real>(state: &mut FdState<T>, h: T, dt: T, p: T) -> Result<()> {
    if state.n_basis() != 1 {
        return Err(Error::Shape("finite-difference state must have one value per point".into()));
    }
    sweep(&mut state.u, &mut state.phi, h, dt, Power::new(p))?;
    state.t += dt;
    state.n += 1;
    Ok(())
}

/// The comparator as a [`Scheme`]: grid points sit at the cell midpoints of
/// `mesh`.
pub struct FdScheme<T: Real> {
    mesh: Mesh<T>,
    config: ProblemConfig<T>,
    power: Power<T>,
}

impl<T: Real> FdScheme<T> {
    pub fn new(mesh: &Mesh<T>, config: &ProblemConfig<T>) -> Result<Self> {
        if !matches!(config.boundary, Boundary::Periodic) {
            return Err(Error::param("boundary", "finite-difference comparator is periodic only"));
        }
        config.validate(mesh)?;
        Ok(FdScheme {
            mesh: mesh.clone(),
            config: config.clone(),
            power: Power::new(config.p),
        })
    }

    pub fn mesh(&self) -> &Mesh<T> {
        &self.mesh
    }

    /// Linear interpolation of grid values at `x` (periodic).
    pub fn evaluate(&self, values: &[T], x: T) -> T {
        let h = self.mesh.h();
        let n = values.len();
        // Position measured from the first grid point, in units of h.
        let mut s = (x - self.mesh.a()) / h - T::lit(0.5);
        let nf = T::from_usize_lossy(n);
        s = s - (s / nf).floor() * nf;
        let j = s.floor().to_usize().unwrap_or(0).min(n - 1);
        let w = s - T::from_usize_lossy(j);
        values[j] * (T::one() - w) + values[(j + 1) % n] * w
    }
}

impl<T: Real> Scheme<T> for FdScheme<T> {
    fn name(&self) -> &'static str {
        "fd"
    }

    fn h(&self) -> T {
        self.mesh.h()
    }

    fn initial_state(&self) -> FieldState<T> {
        let x: Vec<T> = self.positions();
        let u = x.iter().map(|&x| (self.config.u0)(x)).collect();
        let phi = x.iter().map(|&x| (self.config.phi0)(x)).collect();
        FieldState::new(u, phi, 1)
    }

    fn k_h(&self, values: &[T]) -> T {
        values.iter().copied().sum::<T>() * self.mesh.h() / self.mesh.length()
    }

    /// Jensen's inequality for the grid mean gives the constant 1.
    fn lambda(&self) -> T {
        T::one()
    }

    fn p(&self) -> T {
        self.config.p
    }

    fn positions(&self) -> Vec<T> {
        (0..self.mesh.cells()).map(|i| self.mesh.cell_center(i)).collect()
    }

    fn step(&self, state: &mut FieldState<T>, dt: T) -> Result<StepReport<T>> {
        let h = self.mesh.h();
        let s = sweep(&mut state.u, &mut state.phi, h, dt, self.power)?;
        state.t += dt;
        state.n += 1;
        let scale = h / self.mesh.length();
        Ok(StepReport {
            dk_u: s.d_u * scale,
            dk_phi: s.d_phi * scale,
            k_u: s.u * scale,
            k_phi: s.phi * scale,
            sup_u: s.sup_u,
            sup_phi: s.sup_phi,
        })
    }
}

/// Blow-up run of the comparator.
pub fn fd_run_until_blowup<T: Real>(
    mesh: &Mesh<T>,
    config: &ProblemConfig<T>,
    policy: &TimeStepPolicy<T>,
    limits: &RunLimits<T>,
) -> Result<(BlowUpResult<T>, RunHistory<T>)> {
    let scheme = FdScheme::new(mesh, config)?;
    run_until_blowup(&scheme, policy, limits)
}
