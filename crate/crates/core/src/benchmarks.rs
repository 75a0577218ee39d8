//! The four test problems (on `[0, 1]` unless moved), their closed-form solutions where
//! they exist, and the error measures used to compare runs against them.
//!
//! 1. Spatially constant blow-up `u = μ(T - t)^{2/(1-p)}`.
//! 2. Travelling blow-up front `u = μ(T - t + dx)^{2/(1-p)}`.
//! 3. `u₀ = 5(sin 4πx + 2)`, `u₁ = 5(sin 4πx - 4π cos 4πx + 2)`.
//! 4. `u₀ = 5(sin 4πx + 2)`, `u₁ = 20π + 5`.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::blowup::{BlowUpResult, InequalityMonitor, InequalityReport, Run, RunLimits};
use crate::dg::{Boundary, DgScheme, Mesh, ProblemConfig, TimeStepPolicy};
use crate::error::{Error, Result};
use crate::fd::FdScheme;
use crate::history::RunStatus;
use crate::quadrature::GaussLegendre;
use crate::reference_element::ReferenceElement;
use crate::scheme::Scheme;

/// One of the four test problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkCase {
    pub id: u8,
    pub p: f64,
    /// Prescribed blow-up time (cases 1 and 2).
    pub t_blowup: Option<f64>,
    /// Slope of the blow-up front (case 2).
    pub d: Option<f64>,
    /// Multiplies `μ`; anything but 1 breaks the exact solution on purpose.
    pub mu_scale: f64,
    pub a: f64,
    pub b: f64,
}

/// Output times of the DG/FD comparison for `p = 2` and `p = 3`.
pub const COMPARISON_TIMES_P2: [f64; 4] = [0.03, 0.10, 0.15, 0.25];
pub const COMPARISON_TIMES_P3: [f64; 4] = [0.03, 0.09, 0.105, 0.110];

impl BenchmarkCase {
    /// Case `id` with its default parameters (`T = 0.1` for case 1,
    /// `T = 0.5`, `d = 0.01` for case 2).
    pub fn new(id: u8, p: f64) -> Result<Self> {
        match id {
            1 => Self::example1(p, 0.1),
            2 => Self::example2(p, 0.5, 0.01),
            3 => Self::example3(p),
            4 => Self::example4(p),
            _ => Err(Error::param("case", format!("unknown case {id}, expected 1..=4"))),
        }
    }

    fn base(id: u8, p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::param("p", format!("exponent must exceed 1, got {p}")));
        }
        Ok(BenchmarkCase {
            id,
            p,
            t_blowup: None,
            d: None,
            mu_scale: 1.0,
            a: 0.0,
            b: 1.0,
        })
    }

    pub fn example1(p: f64, t_blowup: f64) -> Result<Self> {
        if !(t_blowup > 0.0) {
            return Err(Error::param("T", format!("blow-up time must be positive, got {t_blowup}")));
        }
        Ok(BenchmarkCase {
            t_blowup: Some(t_blowup),
            ..Self::base(1, p)?
        })
    }

    pub fn example2(p: f64, t_blowup: f64, d: f64) -> Result<Self> {
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::param("d", format!("slope must lie in (0, 1), got {d}")));
        }
        Ok(BenchmarkCase {
            d: Some(d),
            id: 2,
            ..Self::example1(p, t_blowup)?
        })
    }

    pub fn example3(p: f64) -> Result<Self> {
        Self::base(3, p)
    }

    pub fn example4(p: f64) -> Result<Self> {
        Self::base(4, p)
    }

    pub fn with_mu_scale(mut self, scale: f64) -> Self {
        self.mu_scale = scale;
        self
    }

    /// Moves the case to `[a, b]`. The periodic cases need a length that
    /// is a multiple of their period 1/2, which mesh validation enforces.
    pub fn with_domain(mut self, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::param("domain", format!("need a < b, got [{a}, {b}]")));
        }
        self.a = a;
        self.b = b;
        Ok(self)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn mesh(&self, cells: usize) -> Result<Mesh<f64>> {
        let (a, b) = self.domain();
        Mesh::new(a, b, cells)
    }

    pub fn has_exact(&self) -> bool {
        self.t_blowup.is_some()
    }

    /// Amplitude `μ` of the exact solution.
    pub fn mu(&self) -> Option<f64> {
        let p = self.p;
        let base = 2.0 * (p + 1.0) / ((p - 1.0) * (p - 1.0));
        let mu = match (self.id, self.d) {
            (1, _) => base.powf(1.0 / (p - 1.0)),
            (2, Some(d)) => ((1.0 - d * d) * base).powf(1.0 / (p - 1.0)),
            _ => return None,
        };
        Some(mu * self.mu_scale)
    }

    /// `T - t + dx`, which must stay positive.
    fn distance(&self, x: f64, t: f64) -> Result<f64> {
        let big_t = self
            .t_blowup
            .ok_or_else(|| Error::param("case", format!("case {} has no exact solution", self.id)))?;
        let s = big_t - t + self.d.unwrap_or(0.0) * x;
        if s > 0.0 {
            Ok(s)
        } else {
            Err(Error::BeyondBlowUp { x, t })
        }
    }

    /// Closed-form `u(x, t)` (cases 1 and 2).
    pub fn exact_u(&self, x: f64, t: f64) -> Result<f64> {
        let s = self.distance(x, t)?;
        let mu = self.mu().expect("exact case has μ");
        Ok(mu * s.powf(2.0 / (1.0 - self.p)))
    }

    /// Closed-form `∂_t u(x, t)`.
    pub fn exact_u_t(&self, x: f64, t: f64) -> Result<f64> {
        let s = self.distance(x, t)?;
        let p = self.p;
        let mu = self.mu().expect("exact case has μ");
        Ok(2.0 / (p - 1.0) * mu * s.powf((p + 1.0) / (1.0 - p)))
    }

    /// Closed-form `φ = ∂_t u + ∂_x u = (1 - d) ∂_t u`.
    pub fn exact_phi(&self, x: f64, t: f64) -> Result<f64> {
        Ok((1.0 - self.d.unwrap_or(0.0)) * self.exact_u_t(x, t)?)
    }

    /// Initial data; case 2 gets inflow traces from the exact solution since
    /// it is not periodic.
    pub fn problem(&self) -> Result<ProblemConfig<f64>> {
        let p = self.p;
        match self.id {
            1 => {
                let u0 = self.exact_u(0.0, 0.0)?;
                let u1 = self.exact_u_t(0.0, 0.0)?;
                ProblemConfig::constant(p, u0, u1)
            }
            2 => {
                let c = *self;
                let d = self.d.expect("case 2 has d");
                // Evaluation beyond the front is a caller error; NaN ends the run as overflow.
                let u = move |x: f64, t: f64| c.exact_u(x, t).unwrap_or(f64::NAN);
                let ut = move |x: f64, t: f64| c.exact_u_t(x, t).unwrap_or(f64::NAN);
                let phi = move |x: f64, t: f64| c.exact_phi(x, t).unwrap_or(f64::NAN);
                let (a, b) = self.domain();
                let cfg = ProblemConfig::new(p, move |x| u(x, 0.0), move |x| ut(x, 0.0), move |x| -d * ut(x, 0.0))?;
                Ok(cfg.with_boundary(Boundary::Inflow {
                    u_left: Arc::new(move |t| u(a, t)),
                    phi_right: Arc::new(move |t| phi(b, t)),
                }))
            }
            3 => ProblemConfig::new(
                p,
                |x| 5.0 * ((4.0 * PI * x).sin() + 2.0),
                |x| 5.0 * ((4.0 * PI * x).sin() - 4.0 * PI * (4.0 * PI * x).cos() + 2.0),
                |x| 20.0 * PI * (4.0 * PI * x).cos(),
            ),
            4 => ProblemConfig::new(
                p,
                |x| 5.0 * ((4.0 * PI * x).sin() + 2.0),
                |_| 20.0 * PI + 5.0,
                |x| 20.0 * PI * (4.0 * PI * x).cos(),
            ),
            _ => unreachable!("validated at construction"),
        }
    }

    /// Quartiles `0, T/4, T/2, 3T/4` of the prescribed blow-up time.
    pub fn quartile_times(&self) -> Option<Vec<f64>> {
        self.t_blowup.map(|t| (0..4).map(|q| q as f64 * t / 4.0).collect())
    }

    /// Times of the DG/FD comparison table (case 4).
    pub fn comparison_times(&self) -> Vec<f64> {
        if self.p == 3.0 {
            COMPARISON_TIMES_P3.to_vec()
        } else {
            COMPARISON_TIMES_P2.to_vec()
        }
    }
}

/// Spacing of the difference stencils in [`residual_check_exact`].
pub const RESIDUAL_SPACING: f64 = 1e-3;

/// Largest scaled residual `|u_tt - u_xx - |u|^p| / max(1, |u|^p)` of the
/// closed form on an 11×11 grid of `[a, b] × [0, T/4]`, with fourth-order
/// central differences of spacing 1e-3.
pub fn residual_check_exact(case: &BenchmarkCase) -> Result<f64> {
    let big_t = case
        .t_blowup
        .ok_or_else(|| Error::param("case", format!("case {} has no exact solution", case.id)))?;
    let delta = RESIDUAL_SPACING;
    let second = |f: &dyn Fn(f64) -> Result<f64>, z: f64| -> Result<f64> {
        let v = [f(z - 2.0 * delta)?, f(z - delta)?, f(z)?, f(z + delta)?, f(z + 2.0 * delta)?];
        Ok((-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * delta * delta))
    };
    let mut worst: f64 = 0.0;
    for ix in 0..=10 {
        let x = case.a + (case.b - case.a) * ix as f64 / 10.0;
        for it in 0..=10 {
            // Stay one stencil width clear of t = 0 so the data are smooth there too.
            let t = 2.0 * delta + it as f64 / 10.0 * (big_t / 4.0);
            let utt = second(&|s| case.exact_u(x, s), t)?;
            let uxx = second(&|y| case.exact_u(y, t), x)?;
            let source = case.exact_u(x, t)?.abs().powf(case.p);
            worst = worst.max((utt - uxx - source).abs() / source.max(1.0));
        }
    }
    Ok(worst)
}

/// One row of an error table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRow {
    pub t: f64,
    pub rel_l2: f64,
    pub rel_linf: f64,
}

/// Relative `L²` and `L∞` errors of the DG expansion `coeffs` against
/// `reference`. `L²` uses ten Gauss points per cell; `L∞` samples the nodes
/// and eight interior points per cell.
pub fn error_norms(
    coeffs: &[f64],
    mesh: &Mesh<f64>,
    elem: &ReferenceElement<f64>,
    reference: impl Fn(f64) -> f64,
) -> Result<(f64, f64)> {
    let nb = elem.n_basis();
    if coeffs.len() != mesh.cells() * nb {
        return Err(Error::Shape(format!(
            "{} coefficients for {} cells of {} nodes",
            coeffs.len(),
            mesh.cells(),
            nb
        )));
    }
    let rule = GaussLegendre::<f64>::new(10);
    let samples: Vec<f64> = elem
        .nodes
        .iter()
        .copied()
        .chain((1..=8).map(|m| -1.0 + 2.0 * m as f64 / 9.0))
        .collect();
    let (mut diff2, mut ref2, mut diff_inf, mut ref_inf) = (0.0, 0.0, 0.0f64, 0.0f64);
    for i in 0..mesh.cells() {
        let cell = &coeffs[i * nb..(i + 1) * nb];
        for (&xi, &w) in rule.nodes.iter().zip(&rule.weights) {
            let r = reference(mesh.map(i, xi));
            let e = elem.evaluate(cell, xi) - r;
            diff2 += w * e * e;
            ref2 += w * r * r;
        }
        for &xi in &samples {
            let r = reference(mesh.map(i, xi));
            diff_inf = diff_inf.max((elem.evaluate(cell, xi) - r).abs());
            ref_inf = ref_inf.max(r.abs());
        }
    }
    if ref2 == 0.0 || ref_inf == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(((diff2 / ref2).sqrt(), diff_inf / ref_inf))
}

/// Relative discrete `ℓ²` and `ℓ∞` errors of `values` against `reference`
/// at the same points.
pub fn nodal_relative_errors(values: &[f64], reference: &[f64]) -> Result<(f64, f64)> {
    if values.len() != reference.len() {
        return Err(Error::Shape(format!("{} values against {} references", values.len(), reference.len())));
    }
    let (mut d2, mut r2, mut dinf, mut rinf) = (0.0, 0.0, 0.0f64, 0.0f64);
    for (&v, &r) in values.iter().zip(reference) {
        d2 += (v - r) * (v - r);
        r2 += r * r;
        dinf = dinf.max((v - r).abs());
        rinf = rinf.max(r.abs());
    }
    if r2 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(((d2 / r2).sqrt(), dinf / rinf))
}

fn reach<S: Scheme<f64> + ?Sized>(run: &mut Run<'_, f64, S>, t: f64, limits: &RunLimits<f64>) -> Result<()> {
    let status = run.advance(&limits.until(t), &mut ())?;
    if status == RunStatus::Completed {
        Ok(())
    } else {
        Err(Error::Stopped {
            status: status.as_str(),
            t: run.state().t,
            target: t,
        })
    }
}

/// DG errors against the exact solution at the given increasing times.
pub fn exact_error_table(
    case: &BenchmarkCase,
    scheme: &DgScheme<f64>,
    policy: &TimeStepPolicy<f64>,
    times: &[f64],
    limits: &RunLimits<f64>,
) -> Result<Vec<ErrorRow>> {
    let mut run = Run::new(scheme, *policy);
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        reach(&mut run, t, limits)?;
        let (rel_l2, rel_linf) = error_norms(&run.state().u, scheme.mesh(), scheme.element(), |x| {
            case.exact_u(x, t).unwrap_or(f64::NAN)
        })?;
        rows.push(ErrorRow { t, rel_l2, rel_linf });
    }
    Ok(rows)
}

/// DG on `cells` cells against the comparator on `refinement·cells` points,
/// the latter linearly interpolated to the DG nodes.
pub fn dg_fd_error_table(
    case: &BenchmarkCase,
    cells: usize,
    elem: &ReferenceElement<f64>,
    policy: &TimeStepPolicy<f64>,
    times: &[f64],
    refinement: usize,
    limits: &RunLimits<f64>,
) -> Result<Vec<ErrorRow>> {
    let config = case.problem()?;
    let dg = DgScheme::new(elem, &case.mesh(cells)?, &config)?;
    let fd = FdScheme::new(&case.mesh(cells * refinement.max(1))?, &config)?;
    let positions = dg.positions();
    let mut dg_run = Run::new(&dg, *policy);
    let mut fd_run = Run::new(&fd, *policy);
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        reach(&mut dg_run, t, limits)?;
        reach(&mut fd_run, t, limits)?;
        let reference: Vec<f64> = positions.iter().map(|&x| fd.evaluate(&fd_run.state().u, x)).collect();
        let (rel_l2, rel_linf) = nodal_relative_errors(&dg_run.state().u, &reference)?;
        rows.push(ErrorRow { t, rel_l2, rel_linf });
    }
    Ok(rows)
}

/// Knobs of [`run_benchmark`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkOptions {
    pub limits: RunLimits<f64>,
    /// Grid ratio of the comparator in the DG/FD table.
    pub fd_refinement: usize,
}

impl Default for BenchmarkOptions {
    fn default() -> Self {
        BenchmarkOptions {
            limits: RunLimits::default(),
            fd_refinement: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub case: BenchmarkCase,
    pub k: usize,
    pub cells: usize,
    /// Against the exact solution (cases 1, 2) or the comparator (case 4).
    pub errors: Vec<ErrorRow>,
    pub blowup: Option<BlowUpResult<f64>>,
    pub inequalities: Option<InequalityReport>,
}

/// Drives one case: error tables at the quartiles (cases 1, 2) or the
/// comparison times (case 4), and a monitored blow-up run (cases 3, 4).
pub fn run_benchmark(
    case: &BenchmarkCase,
    mesh: &Mesh<f64>,
    elem: &ReferenceElement<f64>,
    policy: &TimeStepPolicy<f64>,
    options: &BenchmarkOptions,
) -> Result<BenchmarkReport> {
    let config = case.problem()?;
    let scheme = DgScheme::new(elem, mesh, &config)?;
    let mut report = BenchmarkReport {
        case: *case,
        k: elem.k,
        cells: mesh.cells(),
        errors: Vec::new(),
        blowup: None,
        inequalities: None,
    };
    match case.id {
        1 | 2 => {
            let times = case.quartile_times().expect("exact cases have T");
            report.errors = exact_error_table(case, &scheme, policy, &times, &options.limits)?;
        }
        _ => {
            if case.id == 4 {
                report.errors = dg_fd_error_table(
                    case,
                    mesh.cells(),
                    elem,
                    policy,
                    &case.comparison_times(),
                    options.fd_refinement,
                    &options.limits,
                )?;
            }
            let mut monitor = InequalityMonitor::new(scheme.lambda(), case.p);
            let result = crate::blowup::run_with_observer(&scheme, policy, &options.limits, &mut monitor)?;
            report.blowup = Some(result);
            report.inequalities = Some(monitor.into_report());
        }
    }
    Ok(report)
}
