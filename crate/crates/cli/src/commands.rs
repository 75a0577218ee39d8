use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use log::info;
use serde::Serialize;

use wavedg::benchmarks::{run_benchmark, BenchmarkOptions, BenchmarkReport};
use wavedg::blowup::{run_with_observer, Run};
use wavedg::history::{fmt_sig17, CsvHistoryWriter};
use wavedg::validation::{run_validation, ValidationOptions};
use wavedg::xi::XiTracker;
use wavedg::{BlowUpResult, DgScheme, FdScheme, ReferenceElement, RunStatus, Scheme};

use crate::spec::{InputError, RunSpec, SchemeKind};

/// Whether the command's own checks passed; failures exit with status 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    Failed,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Passed
        } else {
            Outcome::Failed
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<String> {
    let text = serde_json::to_string_pretty(value)?;
    let mut out = create(dir, name)?;
    writeln!(out, "{text}")?;
    out.flush()?;
    Ok(text)
}

fn build_scheme(spec: &RunSpec, cells: usize) -> Result<Box<dyn Scheme<f64>>> {
    let case = spec.case()?;
    let mesh = wavedg::Mesh::new(spec.a, spec.b, cells)?;
    let config = case.problem()?;
    Ok(match spec.scheme {
        SchemeKind::Dg => {
            let el = ReferenceElement::new(spec.k)?;
            Box::new(DgScheme::new(&el, &mesh, &config)?)
        }
        SchemeKind::Fd => Box::new(FdScheme::new(&mesh, &config)?),
    })
}

#[derive(Serialize)]
struct RunSummary<'a> {
    #[serde(flatten)]
    result: &'a BlowUpResult<f64>,
    spec: &'a RunSpec,
}

/// One run; streams `history.csv` and writes `summary.json`.
pub fn cmd_run(spec: &RunSpec) -> Result<Outcome> {
    let scheme = build_scheme(spec, spec.cells)?;
    let out = create(&spec.out, "history.csv")?;
    let mut writer = CsvHistoryWriter::with_stride(out, scheme.name(), spec.stride)?;
    let result = run_with_observer(scheme.as_ref(), &spec.policy(), &spec.limits(), &mut writer)?;
    let text = write_json(&spec.out, "summary.json", &RunSummary { result: &result, spec })?;
    println!("{text}");
    info!("{} after {} steps, T_h = {}", result.status, result.steps, result.t_h);
    Ok(Outcome::Passed)
}

/// One row of the convergence table.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub k: usize,
    pub sigma: f64,
    pub nu: f64,
    pub t_h: f64,
    pub steps: usize,
    pub status: RunStatus,
}

pub const CONVERGENCE_HEADER: &str = "h,k,sigma,nu,T_h,steps,status";

fn convergence_line(r: &ConvergenceRow) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        fmt_sig17(r.h),
        r.k,
        fmt_sig17(r.sigma),
        fmt_sig17(r.nu),
        fmt_sig17(r.t_h),
        r.steps,
        r.status
    )
}

fn write_convergence(dir: &Path, name: &str, rows: &[ConvergenceRow]) -> Result<()> {
    let mut out = create(dir, name)?;
    writeln!(out, "{CONVERGENCE_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", convergence_line(r))?;
    }
    out.flush()?;
    Ok(())
}

fn strictly_decreasing(rows: &[ConvergenceRow]) -> bool {
    rows.windows(2).all(|w| w[1].t_h < w[0].t_h)
}

/// DG and FD blow-up times for `h = (b - a)/2^e`. Writes
/// `convergence.csv` (DG), `convergence_fd.csv` and `comparison.csv`.
pub fn cmd_convergence(spec: &RunSpec, exponents: &[u32]) -> Result<Outcome> {
    if exponents.is_empty() {
        return Err(InputError("`exponents` must not be empty".into()).into());
    }
    if let Some(e) = exponents.iter().find(|&&e| !(1..=20).contains(&e)) {
        return Err(InputError(format!("invalid value for `exponents`: {e} outside 1..20")).into());
    }
    let mut exps = exponents.to_vec();
    exps.sort_unstable();
    exps.dedup();

    let mut dg_rows = Vec::new();
    let mut fd_rows = Vec::new();
    for &e in &exps {
        let cells = 1usize << e;
        for (kind, rows) in [(SchemeKind::Dg, &mut dg_rows), (SchemeKind::Fd, &mut fd_rows)] {
            let s = RunSpec {
                scheme: kind,
                ..spec.clone()
            };
            let scheme = build_scheme(&s, cells)?;
            let r = run_with_observer(scheme.as_ref(), &s.policy(), &s.limits(), &mut ())?;
            info!("{} h=2^-{e}: {} T_h={} steps={}", kind.as_str(), r.status, r.t_h, r.steps);
            rows.push(ConvergenceRow {
                h: scheme.h(),
                k: if kind == SchemeKind::Dg { spec.k } else { 0 },
                sigma: spec.sigma,
                nu: spec.nu,
                t_h: r.t_h,
                steps: r.steps,
                status: r.status,
            });
        }
    }
    write_convergence(&spec.out, "convergence.csv", &dg_rows)?;
    write_convergence(&spec.out, "convergence_fd.csv", &fd_rows)?;

    let mut cmp = create(&spec.out, "comparison.csv")?;
    writeln!(cmp, "h,T_h_dg,T_h_fd")?;
    println!("{:>12}  {:>20}  {:>20}", "h", "T_h dg", "T_h fd");
    for (a, b) in dg_rows.iter().zip(&fd_rows) {
        writeln!(cmp, "{},{},{}", fmt_sig17(a.h), fmt_sig17(a.t_h), fmt_sig17(b.t_h))?;
        println!("{:>12.6e}  {:>20.12} ({})  {:>20.12} ({})", a.h, a.t_h, a.status, b.t_h, b.status);
    }
    cmp.flush()?;

    let all_blown = dg_rows.iter().chain(&fd_rows).all(|r| r.status == RunStatus::BlownUp);
    let mut ok = all_blown;
    if !all_blown {
        eprintln!("error: not every run reached the threshold (see the status column)");
    }
    if dg_rows.len() > 1 {
        for (name, rows) in [("dg", &dg_rows), ("fd", &fd_rows)] {
            if !strictly_decreasing(rows) {
                eprintln!("error: {name} blow-up times are not strictly decreasing in h");
                ok = false;
            }
        }
    }
    Ok(Outcome::from_bool(ok))
}

fn markdown_summary(report: &BenchmarkReport) -> String {
    let mut s = String::new();
    let c = &report.case;
    let _ = writeln!(s, "# Case {} (p = {})\n", c.id, c.p);
    let _ = writeln!(s, "k = {}, cells = {}\n", report.k, report.cells);
    if !report.errors.is_empty() {
        let _ = writeln!(s, "| t | relative L2 | relative Linf |\n|---|---|---|");
        for r in &report.errors {
            let _ = writeln!(s, "| {} | {:.3e} | {:.3e} |", r.t, r.rel_l2, r.rel_linf);
        }
        s.push('\n');
    }
    if let Some(b) = &report.blowup {
        let _ = writeln!(
            s,
            "Blow-up run: status {}, T_h = {:.10}, {} steps, threshold {:e}\n",
            b.status, b.t_h, b.steps, b.threshold
        );
    }
    if let Some(rep) = &report.inequalities {
        match rep.first_violation() {
            None => {
                let _ = writeln!(s, "Mean-value relations hold at all {} steps.", rep.steps_checked);
            }
            Some(v) => {
                let _ = writeln!(s, "{:?} violated at step {}: {} vs {}", v.check, v.step, v.lhs, v.rhs);
            }
        }
    }
    s
}

/// Error table and, for the blow-up cases, a monitored run. Writes
/// `errors.csv`, `report.json` and `summary.md`.
pub fn cmd_benchmark(spec: &RunSpec, fd_refinement: usize) -> Result<Outcome> {
    if spec.scheme != SchemeKind::Dg {
        return Err(InputError("invalid value for `scheme`: benchmarks drive the dg scheme".into()).into());
    }
    let case = spec.case()?;
    let mesh = wavedg::Mesh::new(spec.a, spec.b, spec.cells)?;
    let el = ReferenceElement::new(spec.k)?;
    let options = BenchmarkOptions {
        limits: spec.limits(),
        fd_refinement,
    };
    let report = run_benchmark(&case, &mesh, &el, &spec.policy(), &options)?;

    let mut out = create(&spec.out, "errors.csv")?;
    writeln!(out, "t,rel_l2,rel_linf")?;
    for r in &report.errors {
        writeln!(out, "{},{},{}", fmt_sig17(r.t), fmt_sig17(r.rel_l2), fmt_sig17(r.rel_linf))?;
    }
    out.flush()?;
    write_json(&spec.out, "report.json", &report)?;
    let md = markdown_summary(&report);
    let mut f = create(&spec.out, "summary.md")?;
    f.write_all(md.as_bytes())?;
    f.flush()?;
    print!("{md}");

    let relations_ok = report.inequalities.as_ref().map_or(true, |r| r.is_ok());
    let blown = report.blowup.as_ref().map_or(true, |b| b.status == RunStatus::BlownUp);
    Ok(Outcome::from_bool(relations_ok && blown))
}

/// Runs until every node has crossed every level (or a stopping rule
/// fires) and writes `xi.csv`; nodes that never crossed get an empty field.
pub fn cmd_xi_curve(spec: &RunSpec, levels: &[f64]) -> Result<Outcome> {
    if levels.is_empty() {
        return Err(InputError("`levels` must not be empty".into()).into());
    }
    let scheme = build_scheme(spec, spec.cells)?;
    let mut tracker = XiTracker::new(scheme.positions(), levels).map_err(|e| InputError(e.to_string()))?;
    let mut run = Run::new(scheme.as_ref(), spec.policy());
    let initial = *run.initial_record();
    if let Some(r) = levels.iter().find(|&&r| r <= initial.sup_u) {
        return Err(InputError(format!(
            "invalid value for `levels`: {r} does not exceed the initial amplitude {}",
            initial.sup_u
        ))
        .into());
    }
    tracker.observe(initial.t, &run.state().u);
    // Advance in chunks so the run can stop once the last node crosses.
    const CHUNK: usize = 4096;
    let status = loop {
        let n = run.state().n;
        let chunk = wavedg::RunLimits::new(spec.threshold, (n + CHUNK).min(spec.max_steps));
        let status = run.advance(&chunk, &mut tracker)?;
        if tracker.all_crossed() {
            break RunStatus::Completed;
        }
        if status != RunStatus::MaxSteps || run.state().n >= spec.max_steps {
            break status;
        }
    };

    let curves = tracker.curves()?;
    let mut out = create(&spec.out, "xi.csv")?;
    writeln!(out, "x,xi_R,R")?;
    for c in &curves {
        for (x, xi) in c.x.iter().zip(&c.xi) {
            let xi = xi.map(fmt_sig17).unwrap_or_default();
            writeln!(out, "{},{},{}", fmt_sig17(*x), xi, fmt_sig17(c.r))?;
        }
    }
    out.flush()?;
    println!("run ended: {status} at t = {}", run.state().t);
    for c in &curves {
        let crossed = c.crossed().count();
        match c.fit_line() {
            Some((slope, intercept)) => println!(
                "R = {}: {crossed}/{} nodes crossed, fitted slope {slope:.6}, intercept {intercept:.6}",
                c.r,
                c.x.len()
            ),
            None => println!("R = {}: {crossed}/{} nodes crossed", c.r, c.x.len()),
        }
    }
    Ok(Outcome::from_bool(tracker.all_crossed()))
}

/// Runs the property suite and prints one line per property.
pub fn cmd_validate(seed: u64, corrupt_alpha: Option<usize>) -> Result<Outcome> {
    let mut opts = ValidationOptions::new(seed);
    if let Some(k) = corrupt_alpha {
        let mut alpha = ReferenceElement::<f64>::new(k).map_err(|e| InputError(e.to_string()))?.alpha;
        alpha[0] += 1e-6;
        opts.alpha_override = Some((k, alpha));
    }
    let outcomes = run_validation(&opts)?;
    println!("seed {seed}");
    for o in &outcomes {
        println!("{o}");
    }
    Ok(Outcome::from_bool(outcomes.iter().all(|o| o.passed)))
}

/// Reference matrices as JSON, or the physical cell matrices for width `h`.
pub fn cmd_dump_matrices(k: usize, h: Option<f64>, out: Option<PathBuf>) -> Result<Outcome> {
    let el = ReferenceElement::<f64>::new(k).map_err(|e| InputError(e.to_string()))?;
    let text = match h {
        Some(h) => {
            if !(h > 0.0) {
                return Err(InputError(format!("invalid value for `h`: must be positive, got {h}")).into());
            }
            serde_json::to_string_pretty(&el.cell_matrices(h)?)?
        }
        None => serde_json::to_string_pretty(&el)?,
    };
    match out {
        Some(path) => {
            fs::write(&path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            // A closed pipe (e.g. `| head`) is not an error.
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(Outcome::Passed)
}
