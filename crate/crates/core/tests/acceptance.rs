//! Acceptance suite. Each test prints one line `criterion N PASS|FAIL ...`
//! and then asserts it. Tests take a shared lock so wall-clock limits are
//! measured without interference from each other.

use std::io::Write;
use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wavedg::benchmarks::{exact_error_table, BenchmarkCase};
use wavedg::blowup::{run_with_observer, InequalityMonitor};
use wavedg::dg::{consistency_residuals, evaluate_field, interpolate};
use wavedg::validation::{
    alpha_table, fd_equivalence_gap, jensen_inequality, matrix_identities, operator_norm_bound,
    positivity_and_boundedness,
};
use wavedg::xi::XiTracker;
use wavedg::{
    BlowUpResult, DgScheme, FdScheme, Mesh, ReferenceElement, RunLimits, RunStatus, Scheme, TimeStepPolicy,
};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

const SEED: u64 = 20240611;

/// Prints the criterion line and returns the overall verdict, which
/// includes the wall-clock limit.
fn verdict(n: u32, name: &str, passed: bool, start: Instant, limit_s: f64, detail: &str) -> bool {
    let secs = start.elapsed().as_secs_f64();
    let ok = passed && secs < limit_s;
    let tag = if ok { "PASS" } else { "FAIL" };
    // Straight to the stderr handle: libtest captures print macros of passing tests.
    let _ = writeln!(
        std::io::stderr(),
        "criterion {n:>2} {tag} {name}: {detail} [{secs:.2} s, limit {limit_s} s]"
    );
    ok
}

fn log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    wavedg::xi::fit_line(&lx, &ly).expect("distinct abscissae").0
}

#[test]
fn criterion_01_matrix_identities() {
    let _g = serial();
    let start = Instant::now();
    let ids = matrix_identities().unwrap();
    let alpha = alpha_table(None).unwrap();
    let detail = format!("{}; {}", ids.detail, alpha.detail);
    assert!(verdict(1, "matrix identities", ids.passed && alpha.passed, start, 1.0, &detail));
}

#[test]
fn criterion_02_operator_norm_bound() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let o = operator_norm_bound(&mut rng, 100).unwrap();
    assert!(verdict(2, "operator norm bound", o.passed, start, 1.0, &o.detail));
}

#[test]
fn criterion_03_jensen_inequality() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let o = jensen_inequality(&mut rng, 1000).unwrap();
    assert!(verdict(3, "discrete Jensen inequality", o.passed, start, 5.0, &o.detail));
}

#[test]
fn criterion_04_constant_blowup_accuracy() {
    let _g = serial();
    let start = Instant::now();
    let el = ReferenceElement::new(1).unwrap();
    // At t = 0.9T the p = 2 solution is 6e4; a small ν keeps the step count near 1e6.
    let policy = TimeStepPolicy::new(0.5, 0.1).unwrap();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for p in [2.0, 3.0] {
        let case = BenchmarkCase::example1(p, 0.1).unwrap();
        let scheme = DgScheme::new(&el, &case.mesh(64).unwrap(), &case.problem().unwrap()).unwrap();
        let mut times = case.quartile_times().unwrap();
        times.push(0.09);
        let rows = exact_error_table(&case, &scheme, &policy, &times, &RunLimits::default()).unwrap();
        let w = rows.iter().map(|r| r.rel_l2.max(r.rel_linf)).fold(0.0, f64::max);
        worst = worst.max(w);
        parts.push(format!("p={p}: max rel error {w:.3e}"));
    }
    let detail = format!("{} (bound 1e-2 at t in {{0, T/4, T/2, 3T/4, 0.9T}})", parts.join(", "));
    assert!(verdict(4, "constant blow-up accuracy", worst < 1e-2, start, 10.0, &detail));
}

#[test]
fn criterion_05_travelling_front_accuracy() {
    let _g = serial();
    let start = Instant::now();
    let el = ReferenceElement::new(1).unwrap();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for p in [2.0, 3.0] {
        let case = BenchmarkCase::example2(p, 0.5, 0.01).unwrap();
        let scheme = DgScheme::new(&el, &case.mesh(256).unwrap(), &case.problem().unwrap()).unwrap();
        let times = case.quartile_times().unwrap();
        let rows = exact_error_table(&case, &scheme, &TimeStepPolicy::default(), &times, &RunLimits::default()).unwrap();
        let w = rows.iter().map(|r| r.rel_linf).fold(0.0, f64::max);
        worst = worst.max(w);
        parts.push(format!("p={p}: max rel Linf {w:.3e}"));
    }
    let detail = format!("{} (bound 1e-2)", parts.join(", "));
    assert!(verdict(5, "travelling front accuracy", worst < 1e-2, start, 60.0, &detail));
}

#[test]
fn criterion_06_crossing_curves() {
    let _g = serial();
    let start = Instant::now();
    let (big_t, d) = (0.5, 0.01);
    let case = BenchmarkCase::example2(2.0, big_t, d).unwrap();
    let el = ReferenceElement::new(1).unwrap();
    let scheme = DgScheme::new(&el, &case.mesh(128).unwrap(), &case.problem().unwrap()).unwrap();
    let levels = [300.0, 600.0, 1200.0];
    let mut tracker = XiTracker::new(scheme.positions(), &levels).unwrap();
    // Every node has crossed 1200 by the time the left end reaches 1e4.
    let res = run_with_observer(&scheme, &TimeStepPolicy::default(), &RunLimits::new(1e4, 50_000_000), &mut tracker)
        .unwrap();
    let curves = tracker.curves().unwrap();

    let mut passed = res.status == RunStatus::BlownUp;
    let mut parts = Vec::new();
    let mut prev_gap = f64::INFINITY;
    for c in &curves {
        let all = c.xi.iter().all(Option::is_some);
        let (slope, _) = c.fit_line().unwrap_or((f64::NAN, f64::NAN));
        // Mean distance below the blow-up curve T + dx.
        let gap = c.crossed().map(|(x, xi)| big_t + d * x - xi).sum::<f64>() / c.x.len() as f64;
        passed &= all && (slope - d).abs() <= 0.1 * d && gap < prev_gap && gap > 0.0;
        prev_gap = gap;
        parts.push(format!("R={}: slope {slope:.5}, mean gap {gap:.5}", c.r));
    }
    let detail = format!("{} (slope within 10% of {d}, gap shrinking in R)", parts.join("; "));
    assert!(verdict(6, "crossing-time curves", passed, start, 60.0, &detail));
}

/// Reference blow-up times for `h = 2^-5 .. 2^-9` (DG, FD).
const TABLE_DG: [f64; 5] = [1.1671, 1.1527, 1.1455, 1.1419, 1.1401];
const TABLE_FD: [f64; 5] = [1.1675, 1.1538, 1.1463, 1.1423, 1.1403];
const EXPONENTS: [i32; 5] = [5, 6, 7, 8, 9];
/// Step parameters of the hard part; the only swept pair affordable at `h = 2^-9`.
const HARD_PAIR: (f64, f64) = (0.1, 0.5);
/// Step budget of a single run in the sweep.
const SWEEP_STEP_BUDGET: usize = 20_000_000;

fn blowup_time(case: &BenchmarkCase, cells: usize, fd: bool, pair: (f64, f64), max_steps: usize) -> BlowUpResult<f64> {
    let mesh = case.mesh(cells).unwrap();
    let cfg = case.problem().unwrap();
    let policy = TimeStepPolicy::new(pair.0, pair.1).unwrap();
    let limits = RunLimits::new(1e9, max_steps);
    if fd {
        run_with_observer(&FdScheme::new(&mesh, &cfg).unwrap(), &policy, &limits, &mut ()).unwrap()
    } else {
        let el = ReferenceElement::new(1).unwrap();
        run_with_observer(&DgScheme::new(&el, &mesh, &cfg).unwrap(), &policy, &limits, &mut ()).unwrap()
    }
}

#[test]
fn criterion_07_blowup_time_table() {
    let _g = serial();
    let start = Instant::now();
    let case = BenchmarkCase::example4(3.0).unwrap();

    // Hard part at the fixed pair, without a step budget.
    let mut dg = Vec::new();
    let mut fd = Vec::new();
    for e in EXPONENTS {
        let cells = 1usize << e;
        let a = blowup_time(&case, cells, false, HARD_PAIR, usize::MAX);
        let b = blowup_time(&case, cells, true, HARD_PAIR, usize::MAX);
        println!(
            "  h=1/2^{e}: DG T_h={:.6} ({}, {} steps)  FD T_h={:.6} ({}, {} steps)",
            a.t_h, a.status, a.steps, b.t_h, b.status, b.steps
        );
        dg.push(a);
        fd.push(b);
    }
    let all_blown = dg.iter().chain(&fd).all(|r| r.status == RunStatus::BlownUp);
    let dec = |v: &[BlowUpResult<f64>]| v.windows(2).all(|w| w[1].t_h < w[0].t_h);
    let max_gap = dg.iter().zip(&fd).map(|(a, b)| (a.t_h - b.t_h).abs()).fold(0.0, f64::max);
    let finest = dg[4].t_h;
    let hard_checks = [
        ("all runs reach 1e9", all_blown),
        ("DG decreasing", dec(&dg)),
        ("FD decreasing", dec(&fd)),
        ("|DG - FD| <= 2e-3", max_gap <= 2e-3),
        ("T_h(2^-9) in [1.13, 1.15]", (1.13..=1.15).contains(&finest)),
    ];
    for (name, ok) in &hard_checks {
        println!("  hard: {name}: {}", if *ok { "ok" } else { "violated" });
    }
    let hard = hard_checks.iter().all(|(_, ok)| *ok);

    // Soft part: every swept pair, coarse to fine, abandoned at the first
    // entry that misses the table or does not blow up within the budget.
    let mut best: Option<((f64, f64), f64)> = None;
    let mut soft = false;
    for sigma in [0.1, 0.5, 1.0] {
        for nu in [0.5, 2.0, 3.0] {
            let mut worst: f64 = 0.0;
            let mut resolved = true;
            'levels: for (i, e) in EXPONENTS.iter().enumerate() {
                for (is_fd, table) in [(false, &TABLE_DG), (true, &TABLE_FD)] {
                    let r = if (sigma, nu) == HARD_PAIR {
                        if is_fd { fd[i].clone() } else { dg[i].clone() }
                    } else {
                        blowup_time(&case, 1usize << e, is_fd, (sigma, nu), SWEEP_STEP_BUDGET)
                    };
                    if r.status != RunStatus::BlownUp {
                        resolved = false;
                        break 'levels;
                    }
                    worst = worst.max((r.t_h - table[i]).abs());
                    if worst > 1e-2 {
                        break 'levels;
                    }
                }
            }
            let label = if resolved { format!("max deviation >= {worst:.4}") } else { "budget exhausted".into() };
            println!("  soft: sigma={sigma} nu={nu}: {label}");
            if resolved && best.map_or(true, |(_, w)| worst < w) {
                best = Some(((sigma, nu), worst));
            }
            soft |= resolved && worst <= 1e-2;
        }
    }
    let best_label = match best {
        Some(((s, n), w)) => format!("best pair sigma={s} nu={n} deviation {w:.4}"),
        None => "no pair resolved".into(),
    };
    let detail = format!(
        "hard {} (DG 2^-9 T_h={finest:.6}, max |DG-FD|={max_gap:.2e}); soft {} ({best_label})",
        if hard { "ok" } else { "violated" },
        if soft { "ok" } else { "violated" },
    );
    assert!(verdict(7, "blow-up time table", hard && soft, start, 600.0, &detail));
}

#[test]
fn criterion_08_upwind_equivalence() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let gap = fd_equivalence_gap(&mut rng, 100).unwrap();
    let detail = format!("100 steps, max relative gap {gap:.3e} (bound 1e-12)");
    assert!(verdict(8, "piecewise-constant DG equals upwind FD", gap <= 1e-12, start, 1.0, &detail));
}

#[test]
fn criterion_09_mean_value_relations() {
    let _g = serial();
    let start = Instant::now();
    let el = ReferenceElement::new(1).unwrap();
    // Small σ, ν keep the p = 2 run to tens of millions of steps.
    let policy = TimeStepPolicy::new(0.1, 0.1).unwrap();
    let mut passed = true;
    let mut parts = Vec::new();
    for p in [2.0, 3.0] {
        let case = BenchmarkCase::example3(p).unwrap();
        let scheme = DgScheme::new(&el, &case.mesh(32).unwrap(), &case.problem().unwrap()).unwrap();
        let mut monitor = InequalityMonitor::new(scheme.lambda(), p);
        let res = run_with_observer(&scheme, &policy, &RunLimits::new(1e9, 200_000_000), &mut monitor).unwrap();
        let rep = monitor.into_report();
        let ok = res.status == RunStatus::BlownUp && rep.is_ok() && rep.steps_checked == res.steps;
        passed &= ok;
        parts.push(match rep.first_violation() {
            None => format!("p={p}: {} steps to 1e9, T_h={:.6}, no violation", res.steps, res.t_h),
            Some(v) => format!("p={p}: {:?} violated at step {} ({} vs {})", v.check, v.step, v.lhs, v.rhs),
        });
    }
    assert!(verdict(9, "mean-value relations", passed, start, 60.0, &parts.join("; ")));
}

#[test]
fn criterion_10_positivity_and_boundedness() {
    let _g = serial();
    let start = Instant::now();
    let search = positivity_and_boundedness(200).unwrap();
    let detail = format!("{:?}", search.found);
    assert!(verdict(10, "positivity and boundedness", search.passed(), start, 60.0, &detail));
}

#[test]
fn criterion_11_consistency_orders() {
    let _g = serial();
    let start = Instant::now();
    let case = BenchmarkCase::example1(2.0, 0.1).unwrap();
    let el = ReferenceElement::new(1).unwrap();
    let mesh = Mesh::unit(16).unwrap();
    let dts = [1e-3, 5e-4, 2.5e-4];
    let (mut rs, mut ss) = (Vec::new(), Vec::new());
    for &dt in &dts {
        let res = consistency_residuals(
            |x, t| case.exact_u(x, t).unwrap(),
            |x, t| case.exact_phi(x, t).unwrap(),
            case.p,
            &mesh,
            &el,
            0.02,
            dt,
            true,
        );
        rs.push(res.r_max);
        ss.push(res.s_max);
    }
    let (ord_r, ord_s) = (log_slope(&dts, &rs), log_slope(&dts, &ss));

    let f = |x: f64| (2.0 * std::f64::consts::PI * x).sin();
    let cells = [16usize, 32, 64, 128];
    let errs: Vec<f64> = cells
        .iter()
        .map(|&n| {
            let mesh = Mesh::unit(n).unwrap();
            let c = interpolate(f, &mesh, &el);
            (0..n * 40)
                .map(|m| {
                    let x = (m as f64 + 0.37) / (n * 40) as f64;
                    (evaluate_field(&c, &mesh, &el, x) - f(x)).abs()
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let hs: Vec<f64> = cells.iter().map(|&n| 1.0 / n as f64).collect();
    let ord_i = log_slope(&hs, &errs);

    let passed = (0.9..=1.1).contains(&ord_r) && (0.9..=1.1).contains(&ord_s) && (1.9..=2.1).contains(&ord_i);
    let detail = format!("residual orders in dt: u {ord_r:.3}, phi {ord_s:.3}; interpolation order {ord_i:.3}");
    assert!(verdict(11, "consistency orders", passed, start, 10.0, &detail));
}
