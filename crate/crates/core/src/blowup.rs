//! Blow-up detection and the discrete blow-up estimates: the runner that
//! advances a scheme until `‖uₕ‖_∞` crosses a threshold, the monitor for the
//! `K_h` relations, and the closed-form helpers `γ_h`, `G` and the bounds.

use serde::Serialize;

use crate::dg::{max_abs, FieldState, Mesh, TimeStepPolicy};
use crate::error::{Error, Result};
use crate::history::{Observer, RunHistory, RunStatus, StepRecord};
use crate::quadrature::adaptive_integrate;
use crate::reference_element::ReferenceElement;
use crate::scalar::{Power, Real};
use crate::scheme::Scheme;

pub use crate::dg::k_h;

pub const DEFAULT_THRESHOLD: f64 = 1e9;
pub const DEFAULT_MAX_STEPS: usize = 50_000_000;

/// Weighted ℓ¹ norm `1/(b-a) Σ_i (h/2) Σ_j α_j |u_jⁱ|`.
pub fn weighted_l1<T: Real>(values: &[T], mesh: &Mesh<T>, elem: &ReferenceElement<T>) -> T {
    let abs: Vec<T> = values.iter().map(|v| v.abs()).collect();
    k_h(&abs, mesh, elem)
}

/// `γ_h = ((β_h - α_h)/Δt⁰)² - λ/(p+1) α_h^{p+1}`.
pub fn gamma_h<T: Real>(alpha_h: T, beta_h: T, dt0: T, lambda: T, p: T) -> T {
    gamma_from_increment(alpha_h, beta_h - alpha_h, dt0, lambda, p)
}

fn gamma_from_increment<T: Real>(alpha_h: T, increment: T, dt0: T, lambda: T, p: T) -> T {
    let slope = increment / dt0;
    slope * slope - lambda / (p + T::one()) * alpha_h.powf(p + T::one())
}

/// `G(z) = √(λ/(p+1) z^{p+1} + γ_h)`.
pub fn g_function<T: Real>(z: T, lambda: T, p: T, gamma: T) -> Result<T> {
    let radicand = lambda / (p + T::one()) * z.powf(p + T::one()) + gamma;
    if radicand < T::zero() {
        return Err(Error::NegativeRadicand(radicand.to_f64_lossy()));
    }
    Ok(radicand.sqrt())
}

/// `2(∫_{α_h}^∞ dz/G(z) + C h)`.
///
/// The half line is mapped onto `[0, 1)` by `z = α_h/(1-s)` (or
/// `z = s/(1-s)` when `α_h = 0`) and integrated adaptively to a relative
/// tolerance of 1e-8.
pub fn blowup_time_upper_bound<T: Real>(alpha_h: T, lambda: T, p: T, gamma: T, h: T, c: T) -> Result<T> {
    if !(p > T::one()) {
        return Err(Error::param("p", format!("integral of 1/G diverges for p = {p} <= 1")));
    }
    if alpha_h < T::zero() {
        return Err(Error::param("alpha_h", format!("must be nonnegative, got {alpha_h}")));
    }
    let mut failure = None;
    let one = T::one();
    let integrand = |s: T| {
        let w = one - s;
        let (z, jac) = if alpha_h > T::zero() {
            (alpha_h / w, alpha_h / (w * w))
        } else {
            (alpha_h + s / w, one / (w * w))
        };
        match g_function(z, lambda, p, gamma) {
            Ok(g) => jac / g,
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        }
    };
    let res = adaptive_integrate(integrand, T::zero(), one, T::lit(1e-8), 20_000);
    if let Some(e) = failure {
        return Err(e);
    }
    if !res.converged || !res.value.is_finite() {
        return Err(Error::param(
            "alpha_h",
            format!("improper integral did not converge (estimate {}, error {})", res.value, res.error),
        ));
    }
    Ok(T::lit(2.0) * (res.value + c * h))
}

/// Mesh size below which the first `n_steps` states satisfy
/// `‖uₕⁿ‖_∞ + ‖φₕⁿ‖_∞ ≤ 2Λ_∞`: the minimum of [`stability_mesh_terms`].
pub fn stability_mesh_bound<T: Real>(n_steps: usize, lambda_inf: T, sigma: T, rho: T, p: T) -> Result<T> {
    let [t1, t2, t3] = stability_mesh_terms(n_steps, lambda_inf, sigma, rho, p)?;
    Ok(t1.min(t2).min(t3))
}

/// The three explicit terms whose minimum is the stability mesh size.
pub fn stability_mesh_terms<T: Real>(n_steps: usize, lambda_inf: T, sigma: T, rho: T, p: T) -> Result<[T; 3]> {
    for (name, v) in [("lambda_inf", lambda_inf), ("sigma", sigma), ("rho", rho)] {
        if !(v > T::zero()) {
            return Err(Error::param(name, format!("must be positive, got {v}")));
        }
    }
    if n_steps == 0 {
        return Err(Error::param("n_steps", "must be positive"));
    }
    if !(p > T::one()) {
        return Err(Error::param("p", format!("must exceed 1, got {p}")));
    }
    let one = T::one();
    let n = T::from_usize_lossy(n_steps);
    let l = lambda_inf;
    let inv = one / (one + sigma);
    let growth = one + (T::lit(2.0) * l).powf(p - one);

    let t1 = ((T::lit(1.5).powf(one / n) - one) / (T::lit(2.0) * rho)).powf(one / sigma);
    let t2 = l / (T::lit(12.0) * n * l * growth).powf(inv);
    let t3 = l
        / (T::lit(4.0)
            * (T::lit(3.0) * l).powf(p)
            * (one + l.powf(p * sigma) / (T::lit(6.0).powf(p) * growth.powf(p))))
        .powf(inv);
    Ok([t1, t2, t3])
}

/// Stopping rules of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunLimits<T> {
    pub threshold: T,
    pub max_steps: usize,
    /// Stop exactly at this time if given.
    pub t_end: Option<T>,
}

impl<T: Real> Default for RunLimits<T> {
    fn default() -> Self {
        RunLimits {
            threshold: T::lit(DEFAULT_THRESHOLD),
            max_steps: DEFAULT_MAX_STEPS,
            t_end: None,
        }
    }
}

impl<T: Real> RunLimits<T> {
    pub fn new(threshold: T, max_steps: usize) -> Self {
        RunLimits {
            threshold,
            max_steps,
            t_end: None,
        }
    }

    pub fn until(mut self, t_end: T) -> Self {
        self.t_end = Some(t_end);
        self
    }
}

/// Summary of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowUpResult<T> {
    pub scheme: String,
    /// `Σ Δtⁿ` over the executed steps.
    pub t_h: T,
    pub steps: usize,
    pub threshold: T,
    pub alpha_h: T,
    /// `None` until one step has been taken.
    pub beta_h: Option<T>,
    pub gamma_h: Option<T>,
    pub lambda: T,
    pub status: RunStatus,
    pub final_sup_u: T,
    pub final_sup_phi: T,
}

/// A run in progress. Can be advanced in segments, which the benchmarks use
/// to stop at prescribed output times.
pub struct Run<'a, T: Real, S: Scheme<T> + ?Sized> {
    scheme: &'a S,
    policy: TimeStepPolicy<T>,
    state: FieldState<T>,
    last: StepRecord<T>,
    initial: StepRecord<T>,
    /// `(Δt⁰, K_h(u¹) - K_h(u⁰))`
    first: Option<(T, T)>,
}

impl<'a, T: Real, S: Scheme<T> + ?Sized> Run<'a, T, S> {
    pub fn new(scheme: &'a S, policy: TimeStepPolicy<T>) -> Self {
        Self::from_state(scheme, policy, scheme.initial_state())
    }

    pub fn from_state(scheme: &'a S, policy: TimeStepPolicy<T>, state: FieldState<T>) -> Self {
        let initial = StepRecord {
            n: state.n,
            t: state.t,
            dt: T::zero(),
            sup_u: max_abs(&state.u),
            sup_phi: max_abs(&state.phi),
            k_u: scheme.k_h(&state.u),
            k_phi: scheme.k_h(&state.phi),
            dk_u: T::zero(),
            dk_phi: T::zero(),
        };
        Run {
            scheme,
            policy,
            state,
            last: initial,
            initial,
            first: None,
        }
    }

    pub fn state(&self) -> &FieldState<T> {
        &self.state
    }

    pub fn last_record(&self) -> &StepRecord<T> {
        &self.last
    }

    pub fn initial_record(&self) -> &StepRecord<T> {
        &self.initial
    }

    /// Advances until a stopping rule fires. `max_steps` counts from step 0
    /// of the run, not from this call.
    pub fn advance(&mut self, limits: &RunLimits<T>, observer: &mut impl Observer<T>) -> Result<RunStatus> {
        let h = self.scheme.h();
        loop {
            if let Some(t_end) = limits.t_end {
                if self.state.t >= t_end {
                    return Ok(RunStatus::Completed);
                }
            }
            if self.state.n >= limits.max_steps {
                return Ok(RunStatus::MaxSteps);
            }
            let mut dt = self.policy.dt(self.last.sup_u, h);
            let mut clipped = None;
            if let Some(t_end) = limits.t_end {
                if self.state.t + dt >= t_end {
                    dt = t_end - self.state.t;
                    clipped = Some(t_end);
                }
            }
            let rep = self.scheme.step(&mut self.state, dt)?;
            if let Some(t_end) = clipped {
                self.state.t = t_end;
            }
            if self.first.is_none() {
                self.first = Some((dt, rep.dk_u));
            }
            self.last = StepRecord {
                n: self.state.n,
                t: self.state.t,
                dt,
                sup_u: rep.sup_u,
                sup_phi: rep.sup_phi,
                k_u: rep.k_u,
                k_phi: rep.k_phi,
                dk_u: rep.dk_u,
                dk_phi: rep.dk_phi,
            };
            observer.record(&self.last, &self.state)?;
            if !rep.sup_u.is_finite() || !rep.sup_phi.is_finite() {
                return Ok(RunStatus::Overflow);
            }
            if rep.sup_u >= limits.threshold {
                return Ok(RunStatus::BlownUp);
            }
        }
    }

    pub fn result(&self, status: RunStatus, threshold: T) -> BlowUpResult<T> {
        let lambda = self.scheme.lambda();
        let alpha_h = self.initial.k_u;
        let (beta_h, gamma_h) = match self.first {
            Some((dt0, inc)) => (
                Some(alpha_h + inc),
                Some(gamma_from_increment(alpha_h, inc, dt0, lambda, self.scheme.p())),
            ),
            None => (None, None),
        };
        BlowUpResult {
            scheme: self.scheme.name().to_string(),
            t_h: self.state.t,
            steps: self.state.n,
            threshold,
            alpha_h,
            beta_h,
            gamma_h,
            lambda,
            status,
            final_sup_u: self.last.sup_u,
            final_sup_phi: self.last.sup_phi,
        }
    }
}

/// Runs `scheme` from its initial data until a stopping rule fires,
/// streaming every record to `observer`.
pub fn run_with_observer<T: Real, S: Scheme<T> + ?Sized>(
    scheme: &S,
    policy: &TimeStepPolicy<T>,
    limits: &RunLimits<T>,
    observer: &mut impl Observer<T>,
) -> Result<BlowUpResult<T>> {
    let mut run = Run::new(scheme, *policy);
    let sup0 = run.initial_record().sup_u;
    if !(limits.threshold > sup0) {
        return Err(Error::param(
            "threshold",
            format!("must exceed the initial sup-norm {sup0}, got {}", limits.threshold),
        ));
    }
    observer.start(run.initial_record(), run.state())?;
    let status = run.advance(limits, observer)?;
    observer.finish(status)?;
    Ok(run.result(status, limits.threshold))
}

/// Runs to blow-up keeping the whole history in memory.
pub fn run_until_blowup<T: Real, S: Scheme<T> + ?Sized>(
    scheme: &S,
    policy: &TimeStepPolicy<T>,
    limits: &RunLimits<T>,
) -> Result<(BlowUpResult<T>, RunHistory<T>)> {
    let mut history = RunHistory::new(scheme.name());
    let result = run_with_observer(scheme, policy, limits, &mut history)?;
    Ok((result, history))
}

/// The relations checked along a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `(K_h(uⁿ⁺¹) - K_h(uⁿ))/Δtⁿ = K_h(φⁿ)`
    MeanIdentity,
    /// `K_h(φⁿ⁺¹) - K_h(φⁿ) ≥ λ Δtⁿ K_h(uⁿ⁺¹)^p`
    SourceInequality,
    /// `K_h(uⁿ⁺¹) > K_h(uⁿ)`
    Monotonicity,
    /// `((K_h(uⁿ⁺¹) - K_h(uⁿ))/Δtⁿ)² ≥ λ/(p+1) K_h(uⁿ)^{p+1} + γ_h`
    SquaredSlope,
}

impl Check {
    pub const ALL: [Check; 4] = [
        Check::MeanIdentity,
        Check::SourceInequality,
        Check::Monotonicity,
        Check::SquaredSlope,
    ];

    fn index(self) -> usize {
        self as usize
    }
}

/// A failed check: the step index `n` of the state `uⁿ` the relation starts
/// from, and both sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub check: Check,
    pub step: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub steps_checked: usize,
    /// First violation of each check, indexed like [`Check::ALL`].
    pub first: [Option<Violation>; 4],
}

impl InequalityReport {
    pub fn is_ok(&self) -> bool {
        self.first.iter().all(Option::is_none)
    }

    pub fn passed(&self, check: Check) -> bool {
        self.first[check.index()].is_none()
    }

    pub fn violation(&self, check: Check) -> Option<&Violation> {
        self.first[check.index()].as_ref()
    }

    /// Earliest violation over all checks.
    pub fn first_violation(&self) -> Option<&Violation> {
        self.first.iter().flatten().min_by_key(|v| v.step)
    }
}

/// Relative tolerance of the identity check.
pub const IDENTITY_REL_TOL: f64 = 1e-10;

/// Streaming checker; usable as an [`Observer`] or fed from a stored history.
#[derive(Debug, Clone)]
pub struct InequalityMonitor<T> {
    lambda: T,
    power: Power<T>,
    p: T,
    prev: Option<StepRecord<T>>,
    gamma: Option<T>,
    alpha: T,
    report: InequalityReport,
}

impl<T: Real> InequalityMonitor<T> {
    pub fn new(lambda: T, p: T) -> Self {
        InequalityMonitor {
            lambda,
            power: Power::new(p),
            p,
            prev: None,
            gamma: None,
            alpha: T::zero(),
            report: InequalityReport {
                steps_checked: 0,
                first: [None; 4],
            },
        }
    }

    pub fn report(&self) -> &InequalityReport {
        &self.report
    }

    pub fn into_report(self) -> InequalityReport {
        self.report
    }

    pub fn gamma_h(&self) -> Option<T> {
        self.gamma
    }

    pub fn push(&mut self, rec: &StepRecord<T>) {
        let Some(prev) = self.prev.replace(*rec) else {
            self.alpha = rec.k_u;
            return;
        };
        let dt = rec.dt;
        let n = prev.n;
        // Rounding allowance for relations that can hold with equality.
        let slack = T::epsilon() * T::lit(64.0);

        let slope = rec.dk_u / dt;
        let scale = slope.abs().max(prev.k_phi.abs());
        let ok = (slope - prev.k_phi).abs() <= T::lit(IDENTITY_REL_TOL) * scale;
        self.flag(Check::MeanIdentity, n, ok, slope, prev.k_phi);

        let rhs = self.lambda * dt * self.power.abs_pow(rec.k_u);
        let ok = rec.dk_phi >= rhs - slack * rhs.abs().max(rec.dk_phi.abs());
        self.flag(Check::SourceInequality, n, ok, rec.dk_phi, rhs);

        let ok = rec.dk_u > T::zero() && rec.k_u >= prev.k_u;
        self.flag(Check::Monotonicity, n, ok, rec.k_u, prev.k_u);

        let gamma = *self
            .gamma
            .get_or_insert_with(|| gamma_from_increment(self.alpha, rec.dk_u, dt, self.lambda, self.p));
        let lhs = slope * slope;
        let rhs = self.lambda / (self.p + T::one()) * self.power.abs_pow(prev.k_u) * prev.k_u.abs() + gamma;
        let ok = lhs >= rhs - slack * lhs.abs().max(rhs.abs());
        self.flag(Check::SquaredSlope, n, ok, lhs, rhs);

        self.report.steps_checked += 1;
    }

    fn flag(&mut self, check: Check, step: usize, ok: bool, lhs: T, rhs: T) {
        let slot = &mut self.report.first[check.index()];
        if !ok && slot.is_none() {
            *slot = Some(Violation {
                check,
                step,
                lhs: lhs.to_f64_lossy(),
                rhs: rhs.to_f64_lossy(),
            });
        }
    }
}

impl<T: Real> Observer<T> for InequalityMonitor<T> {
    fn start(&mut self, initial: &StepRecord<T>, _: &FieldState<T>) -> std::io::Result<()> {
        self.push(initial);
        Ok(())
    }

    fn record(&mut self, rec: &StepRecord<T>, _: &FieldState<T>) -> std::io::Result<()> {
        self.push(rec);
        Ok(())
    }
}

/// Checks a stored history (initial record required) against the mean
/// identity, the source inequality, strict monotonicity and the
/// squared-slope bound.
pub fn check_blowup_inequalities<T: Real>(history: &RunHistory<T>, lambda: T, p: T) -> Result<InequalityReport> {
    if history.initial.is_none() {
        return Err(Error::Shape("history has no initial record".into()));
    }
    let mut monitor = InequalityMonitor::new(lambda, p);
    for rec in history.all() {
        monitor.push(rec);
    }
    Ok(monitor.into_report())
}
