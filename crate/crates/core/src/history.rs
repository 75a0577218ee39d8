//! Per-step run records and the observers that consume them while a run is
//! in progress, so long blow-up runs never need the whole history in memory.

use std::io::Write;

use serde::Serialize;

use crate::dg::FieldState;
use crate::scalar::Real;

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// `‖uₕ‖_∞` reached the threshold.
    BlownUp,
    /// A coefficient became non-finite before the threshold was reached.
    Overflow,
    /// The step budget ran out first.
    MaxSteps,
    /// The requested end time was reached.
    Completed,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::BlownUp => "blown_up",
            RunStatus::Overflow => "overflow",
            RunStatus::MaxSteps => "max_steps",
            RunStatus::Completed => "completed",
        }
    }

    /// Both ways a run can diverge.
    pub fn diverged(self) -> bool {
        matches!(self, RunStatus::BlownUp | RunStatus::Overflow)
    }
}

impl std::fmt::Display for RunStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// State summary after step `n`. Record 0 describes the initial data and has
/// `dt = 0` and zero increments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord<T> {
    pub n: usize,
    pub t: T,
    /// Step that produced this state.
    pub dt: T,
    pub sup_u: T,
    pub sup_phi: T,
    pub k_u: T,
    pub k_phi: T,
    pub dk_u: T,
    pub dk_phi: T,
}

/// Receives every record of a run as it is produced.
pub trait Observer<T: Real> {
    /// Called once with the initial record before any step.
    fn start(&mut self, _initial: &StepRecord<T>, _state: &FieldState<T>) -> std::io::Result<()> {
        Ok(())
    }

    fn record(&mut self, rec: &StepRecord<T>, state: &FieldState<T>) -> std::io::Result<()>;

    fn finish(&mut self, _status: RunStatus) -> std::io::Result<()> {
        Ok(())
    }
}

impl<T: Real> Observer<T> for () {
    fn record(&mut self, _: &StepRecord<T>, _: &FieldState<T>) -> std::io::Result<()> {
        Ok(())
    }
}

impl<T: Real, O: Observer<T> + ?Sized> Observer<T> for &mut O {
    fn start(&mut self, initial: &StepRecord<T>, state: &FieldState<T>) -> std::io::Result<()> {
        (**self).start(initial, state)
    }

    fn record(&mut self, rec: &StepRecord<T>, state: &FieldState<T>) -> std::io::Result<()> {
        (**self).record(rec, state)
    }

    fn finish(&mut self, status: RunStatus) -> std::io::Result<()> {
        (**self).finish(status)
    }
}

impl<T: Real, A: Observer<T>, B: Observer<T>> Observer<T> for (A, B) {
    fn start(&mut self, initial: &StepRecord<T>, state: &FieldState<T>) -> std::io::Result<()> {
        self.0.start(initial, state)?;
        self.1.start(initial, state)
    }

    fn record(&mut self, rec: &StepRecord<T>, state: &FieldState<T>) -> std::io::Result<()> {
        self.0.record(rec, state)?;
        self.1.record(rec, state)
    }

    fn finish(&mut self, status: RunStatus) -> std::io::Result<()> {
        self.0.finish(status)?;
        self.1.finish(status)
    }
}

/// In-memory history: the initial record plus one record per executed step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunHistory<T> {
    pub scheme: String,
    pub initial: Option<StepRecord<T>>,
    pub records: Vec<StepRecord<T>>,
    pub status: Option<RunStatus>,
}

impl<T> RunHistory<T> {
    pub fn new(scheme: impl Into<String>) -> Self {
        RunHistory {
            scheme: scheme.into(),
            initial: None,
            records: Vec::new(),
            status: None,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Initial record followed by the step records.
    pub fn all(&self) -> impl Iterator<Item = &StepRecord<T>> {
        self.initial.iter().chain(&self.records)
    }
}

impl<T: Real> Observer<T> for RunHistory<T> {
    fn start(&mut self, initial: &StepRecord<T>, _: &FieldState<T>) -> std::io::Result<()> {
        self.initial = Some(*initial);
        Ok(())
    }

    fn record(&mut self, rec: &StepRecord<T>, _: &FieldState<T>) -> std::io::Result<()> {
        self.records.push(*rec);
        Ok(())
    }

    fn finish(&mut self, status: RunStatus) -> std::io::Result<()> {
        self.status = Some(status);
        Ok(())
    }
}

pub const HISTORY_HEADER: &str = "n,t,dt,sup_u,sup_phi,K_u,K_phi,scheme";

/// Formats a float with 17 significant digits.
pub fn fmt_sig17<T: Real>(x: T) -> String {
    format!("{:.16e}", x.to_f64_lossy())
}

/// Streams the history as CSV, one line per step (every `stride`-th step
/// plus the final one).
pub struct CsvHistoryWriter<W: Write> {
    out: W,
    scheme: String,
    stride: usize,
    /// Last record seen but not yet written, so the final step is always emitted.
    pending: Option<StepRecord<f64>>,
    lines_since_flush: usize,
}

impl<W: Write> CsvHistoryWriter<W> {
    pub fn new(out: W, scheme: impl Into<String>) -> std::io::Result<Self> {
        Self::with_stride(out, scheme, 1)
    }

    pub fn with_stride(mut out: W, scheme: impl Into<String>, stride: usize) -> std::io::Result<Self> {
        writeln!(out, "{HISTORY_HEADER}")?;
        Ok(CsvHistoryWriter {
            out,
            scheme: scheme.into(),
            stride: stride.max(1),
            pending: None,
            lines_since_flush: 0,
        })
    }

    pub fn into_inner(self) -> W {
        self.out
    }

    fn line(&self, r: &StepRecord<f64>) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            r.n,
            fmt_sig17(r.t),
            fmt_sig17(r.dt),
            fmt_sig17(r.sup_u),
            fmt_sig17(r.sup_phi),
            fmt_sig17(r.k_u),
            fmt_sig17(r.k_phi),
            self.scheme
        )
    }

    fn emit(&mut self, line: &str) -> std::io::Result<()> {
        writeln!(self.out, "{line}")?;
        self.lines_since_flush += 1;
        // Keeps a killed run's file useful.
        if self.lines_since_flush >= 4096 {
            self.out.flush()?;
            self.lines_since_flush = 0;
        }
        Ok(())
    }
}

impl<T: Real, W: Write> Observer<T> for CsvHistoryWriter<W> {
    fn record(&mut self, rec: &StepRecord<T>, _: &FieldState<T>) -> std::io::Result<()> {
        let rec = StepRecord {
            n: rec.n,
            t: rec.t.to_f64_lossy(),
            dt: rec.dt.to_f64_lossy(),
            sup_u: rec.sup_u.to_f64_lossy(),
            sup_phi: rec.sup_phi.to_f64_lossy(),
            k_u: rec.k_u.to_f64_lossy(),
            k_phi: rec.k_phi.to_f64_lossy(),
            dk_u: rec.dk_u.to_f64_lossy(),
            dk_phi: rec.dk_phi.to_f64_lossy(),
        };
        if rec.n % self.stride == 0 {
            self.pending = None;
            let line = self.line(&rec);
            self.emit(&line)
        } else {
            self.pending = Some(rec);
            Ok(())
        }
    }

    fn finish(&mut self, _: RunStatus) -> std::io::Result<()> {
        if let Some(rec) = self.pending.take() {
            let line = self.line(&rec);
            self.emit(&line)?;
        }
        self.out.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(n: usize) -> StepRecord<f64> {
        StepRecord {
            n,
            t: n as f64 * 0.1,
            dt: 0.1,
            sup_u: 1.0 / 3.0,
            sup_phi: 2.0,
            k_u: n as f64,
            k_phi: -1.5,
            dk_u: 1.0,
            dk_phi: 0.0,
        }
    }

    fn write_all(stride: usize, steps: usize) -> String {
        let mut w = CsvHistoryWriter::with_stride(Vec::new(), "dg", stride).unwrap();
        let s = FieldState::<f64>::zeros(2, 1);
        for n in 1..=steps {
            Observer::<f64>::record(&mut w, &rec(n), &s).unwrap();
        }
        Observer::<f64>::finish(&mut w, RunStatus::MaxSteps).unwrap();
        String::from_utf8(w.into_inner()).unwrap()
    }

    #[test]
    fn csv_has_header_and_round_trips_doubles() {
        let text = write_all(1, 3);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], HISTORY_HEADER);
        assert_eq!(lines.len(), 4);
        let fields: Vec<_> = lines[1].split(',').collect();
        assert_eq!(fields.len(), 8);
        assert_eq!(fields[3].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(fields[7], "dg");
    }

    #[test]
    fn stride_keeps_the_last_step() {
        let text = write_all(4, 10);
        let ns: Vec<usize> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(ns, vec![4, 8, 10]);
    }

    #[test]
    fn tuple_observer_feeds_both() {
        let mut pair = (RunHistory::new("a"), RunHistory::new("b"));
        let s = FieldState::<f64>::zeros(2, 1);
        pair.start(&rec(0), &s).unwrap();
        pair.record(&rec(1), &s).unwrap();
        pair.finish(RunStatus::Completed).unwrap();
        assert_eq!(pair.0.len(), 1);
        assert_eq!(pair.1.all().count(), 2);
        assert_eq!(pair.1.status, Some(RunStatus::Completed));
    }

    #[test]
    fn status_strings() {
        assert_eq!(RunStatus::BlownUp.to_string(), "blown_up");
        assert_eq!(serde_json::to_string(&RunStatus::MaxSteps).unwrap(), "\"max_steps\"");
        assert!(RunStatus::Overflow.diverged());
    }
}
