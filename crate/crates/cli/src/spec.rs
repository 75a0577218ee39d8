//! Run specification: command-line flags layered over an optional TOML file
//! layered over built-in defaults.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use wavedg::benchmarks::BenchmarkCase;
use wavedg::reference_element::MAX_DEGREE;

/// Bad user input; exits with status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn invalid(key: &str, reason: impl fmt::Display) -> InputError {
    InputError(format!("invalid value for `{key}`: {reason}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Dg,
    Fd,
}

impl SchemeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Dg => "dg",
            SchemeKind::Fd => "fd",
        }
    }
}

/// Every key of the specification, all optional. Parsed both from flags and
/// from the config file, whose keys are the flag names with underscores.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecArgs {
    /// Spatial discretization.
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeKind>,
    /// Polynomial degree (0..7).
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of cells (grid points for fd).
    #[arg(long)]
    pub cells: Option<usize>,
    /// Left end of the domain.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Right end of the domain.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Exponent of the nonlinearity.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    /// Sup-norm at which a run counts as blown up.
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Benchmark case (1..4).
    #[arg(long = "case")]
    pub case: Option<u8>,
    /// Prescribed blow-up time of cases 1 and 2.
    #[arg(long)]
    pub t_blowup: Option<f64>,
    /// Front slope of case 2.
    #[arg(long)]
    pub d: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write every n-th step to the history CSV (the last step always).
    #[arg(long)]
    pub stride: Option<usize>,
}

impl SpecArgs {
    /// Field-wise `self` if set, else `other`.
    pub fn or(self, other: SpecArgs) -> SpecArgs {
        SpecArgs {
            scheme: self.scheme.or(other.scheme),
            k: self.k.or(other.k),
            cells: self.cells.or(other.cells),
            a: self.a.or(other.a),
            b: self.b.or(other.b),
            p: self.p.or(other.p),
            sigma: self.sigma.or(other.sigma),
            nu: self.nu.or(other.nu),
            threshold: self.threshold.or(other.threshold),
            max_steps: self.max_steps.or(other.max_steps),
            case: self.case.or(other.case),
            t_blowup: self.t_blowup.or(other.t_blowup),
            d: self.d.or(other.d),
            out: self.out.or(other.out),
            seed: self.seed.or(other.seed),
            stride: self.stride.or(other.stride),
        }
    }

    pub fn from_toml(text: &str) -> Result<SpecArgs, InputError> {
        toml::from_str(text).map_err(|e| InputError(format!("config file: {}", e.message())))
    }

    pub fn from_file(path: &Path) -> Result<SpecArgs, InputError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError(format!("cannot read config file {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| InputError(format!("{}: {}", path.display(), e.0)))
    }
}

/// Flags plus the `--config` file they are layered over.
#[derive(Debug, Clone, Args)]
pub struct SpecOptions {
    /// TOML file with any of the keys below; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub args: SpecArgs,
}

impl SpecOptions {
    pub fn resolve(&self) -> Result<RunSpec, InputError> {
        let file = match &self.config {
            Some(path) => SpecArgs::from_file(path)?,
            None => SpecArgs::default(),
        };
        RunSpec::resolve(self.args.clone().or(file))
    }
}

/// Fully resolved and validated specification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub scheme: SchemeKind,
    pub k: usize,
    pub cells: usize,
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub sigma: f64,
    pub nu: f64,
    pub threshold: f64,
    pub max_steps: usize,
    pub case: u8,
    pub t_blowup: f64,
    pub d: f64,
    pub out: PathBuf,
    pub seed: u64,
    pub stride: usize,
}

impl RunSpec {
    pub fn resolve(args: SpecArgs) -> Result<RunSpec, InputError> {
        let case = args.case.unwrap_or(3);
        let spec = RunSpec {
            scheme: args.scheme.unwrap_or(SchemeKind::Dg),
            k: args.k.unwrap_or(1),
            cells: args.cells.unwrap_or(64),
            a: args.a.unwrap_or(0.0),
            b: args.b.unwrap_or(1.0),
            p: args.p.unwrap_or(2.0),
            sigma: args.sigma.unwrap_or(0.5),
            nu: args.nu.unwrap_or(0.5),
            threshold: args.threshold.unwrap_or(wavedg::blowup::DEFAULT_THRESHOLD),
            max_steps: args.max_steps.unwrap_or(wavedg::blowup::DEFAULT_MAX_STEPS),
            case,
            t_blowup: args.t_blowup.unwrap_or(if case == 2 { 0.5 } else { 0.1 }),
            d: args.d.unwrap_or(0.01),
            out: args.out.unwrap_or_else(|| PathBuf::from("wavedg-out")),
            seed: args.seed.unwrap_or(0),
            stride: args.stride.unwrap_or(1),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), InputError> {
        if self.k > MAX_DEGREE {
            return Err(invalid("k", format!("degree must lie in 0..{MAX_DEGREE}, got {}", self.k)));
        }
        if self.cells < 2 {
            return Err(invalid("cells", format!("need at least 2, got {}", self.cells)));
        }
        if !(self.a.is_finite() && self.b.is_finite() && self.a < self.b) {
            return Err(invalid("a", format!("domain needs a < b, got [{}, {}]", self.a, self.b)));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(invalid("p", format!("must exceed 1, got {}", self.p)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(invalid("sigma", format!("must be positive, got {}", self.sigma)));
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(invalid("nu", format!("must be positive, got {}", self.nu)));
        }
        if !(self.threshold > 0.0) {
            return Err(invalid("threshold", format!("must be positive, got {}", self.threshold)));
        }
        if self.max_steps == 0 {
            return Err(invalid("max_steps", "must be at least 1"));
        }
        if !(1..=4).contains(&self.case) {
            return Err(invalid("case", format!("must lie in 1..4, got {}", self.case)));
        }
        if !(self.t_blowup > 0.0) {
            return Err(invalid("t_blowup", format!("must be positive, got {}", self.t_blowup)));
        }
        if !(self.d > 0.0 && self.d < 1.0) {
            return Err(invalid("d", format!("must lie in (0, 1), got {}", self.d)));
        }
        if self.stride == 0 {
            return Err(invalid("stride", "must be at least 1"));
        }
        if self.scheme == SchemeKind::Fd && self.case == 2 {
            return Err(invalid("scheme", "fd runs periodic problems only; case 2 has inflow boundaries"));
        }
        self.case()?;
        Ok(())
    }

    pub fn case(&self) -> Result<BenchmarkCase, InputError> {
        let case = match self.case {
            1 => BenchmarkCase::example1(self.p, self.t_blowup),
            2 => BenchmarkCase::example2(self.p, self.t_blowup, self.d),
            n => BenchmarkCase::new(n, self.p),
        }
        .and_then(|c| c.with_domain(self.a, self.b))
        .map_err(|e| invalid("case", e))?;
        Ok(case)
    }

    pub fn policy(&self) -> wavedg::TimeStepPolicy<f64> {
        wavedg::TimeStepPolicy::new(self.sigma, self.nu).expect("validated")
    }

    pub fn limits(&self) -> wavedg::RunLimits<f64> {
        wavedg::RunLimits::new(self.threshold, self.max_steps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_override_defaults() {
        let file = SpecArgs::from_toml("k = 2\ncells = 32\np = 3.0\n").unwrap();
        let flags = SpecArgs {
            cells: Some(16),
            ..Default::default()
        };
        let spec = RunSpec::resolve(flags.or(file)).unwrap();
        assert_eq!((spec.k, spec.cells, spec.p, spec.sigma), (2, 16, 3.0, 0.5));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = SpecArgs::from_toml("cels = 3\n").unwrap_err();
        assert!(e.0.contains("cels"), "{e}");
    }

    #[test]
    fn errors_name_the_key() {
        let bad = |args: SpecArgs, key: &str| {
            let e = RunSpec::resolve(args).unwrap_err();
            assert!(e.0.contains(&format!("`{key}`")), "{e}");
        };
        bad(SpecArgs { k: Some(9), ..Default::default() }, "k");
        bad(SpecArgs { p: Some(1.0), ..Default::default() }, "p");
        bad(SpecArgs { case: Some(5), ..Default::default() }, "case");
        bad(SpecArgs { d: Some(1.5), case: Some(2), ..Default::default() }, "d");
        bad(SpecArgs { scheme: Some(SchemeKind::Fd), case: Some(2), ..Default::default() }, "scheme");
    }

    #[test]
    fn degree_message_cites_range() {
        let e = RunSpec::resolve(SpecArgs { k: Some(9), ..Default::default() }).unwrap_err();
        assert!(e.0.contains("0..7"), "{e}");
    }
}
