//! Command-line front end: argument parsing, configuration, dispatch and
//! report output.
//!
//! Exit codes: 0 proof of the positive claim, 1 proof of the negative claim,
//! 2 inconclusive, 64 usage, 65 malformed input data, 66 unreadable input,
//! 70 internal inconsistency, 74 output failure. A report is emitted for
//! every run that gets past argument parsing, and for usage errors too.

mod commands;
mod input;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::hullrank::{SearchOptions, DEFAULT_SYMBOLIC_THRESHOLD, DEFAULT_TRIALS};
use crate::planarity::DEFAULT_PLANARITY_TOL;
use crate::report::{Outcome, Report};
use crate::scalarlinalg::DEFAULT_FLOAT_TOL;

pub use input::{parse_json, read_input, CliError};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_SOFTWARE: i32 = 70;
pub const EXIT_IO: i32 = 74;

pub const DEFAULT_SAMPLES: usize = 33;

pub fn exit_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Positive => EXIT_POSITIVE,
        Outcome::Negative => EXIT_NEGATIVE,
        Outcome::Inconclusive => EXIT_INCONCLUSIVE,
        Outcome::Error => EXIT_SOFTWARE,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Subcommand)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Checks unity and associativity of structure constants.
    #[command(subcommand)]
    Algebra(AlgebraCommand),
    /// Certifies weak generic rank (or generic rank) of an affinor basis.
    Rank {
        file: PathBuf,
        /// Certify generic rank instead of weak generic rank.
        #[arg(long)]
        generic: bool,
        /// Also sample elements of the span for non-invertible ones.
        #[arg(long)]
        inversion_probe: bool,
    },
    /// Decides whether an algebra is Frobenius and cross-checks the module rank.
    Frobenius { file: PathBuf },
    /// Builds and checks the regular representation of Cl(s,t).
    Clifford {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        t: u32,
        /// Include the representation matrices in the report.
        #[arg(long)]
        emit: bool,
        /// Certify weak generic rank 2^(s+t).
        #[arg(long)]
        check_rank: bool,
        /// Certify generic rank on two copies of the representation space.
        #[arg(long)]
        doubled: bool,
    },
    /// Projector system of a splitting of R^m and its rank certificates.
    Distributions {
        /// Block dimensions, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        /// JSON matrix Q; blocks are spanned by consecutive columns of Q.
        #[arg(long)]
        conjugate: Option<PathBuf>,
        /// Include the projectors in the report.
        #[arg(long)]
        emit: bool,
    },
    /// Numerical planarity of a curve for a connection and an affinor basis.
    Planar {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long)]
        connection: PathBuf,
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Re-verifies every rank certificate stored in a report.
    VerifyReport { file: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Subcommand)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum AlgebraCommand {
    Verify { file: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Algebra(AlgebraCommand::Verify { .. }) => "algebra verify",
            Command::Rank { .. } => "rank",
            Command::Frobenius { .. } => "frobenius",
            Command::Clifford { .. } => "clifford",
            Command::Distributions { .. } => "distributions",
            Command::Planar { .. } => "planar",
            Command::VerifyReport { .. } => "verify-report",
        }
    }

    pub fn input_paths(&self) -> Vec<&PathBuf> {
        match self {
            Command::Algebra(AlgebraCommand::Verify { file })
            | Command::Rank { file, .. }
            | Command::Frobenius { file }
            | Command::VerifyReport { file } => vec![file],
            Command::Clifford { .. } => vec![],
            Command::Distributions { conjugate, .. } => conjugate.iter().collect(),
            Command::Planar { basis, connection, curve, .. } => vec![basis, connection, curve],
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "affinor-rank", version, about = "Exact certification of generic rank for affinor structures")]
struct Cli {
    /// Seed for every randomized search.
    #[arg(long, global = true, env = "AFFINOR_RANK_SEED", default_value_t = 0)]
    seed: u64,
    /// Random trials before falling back to symbolic methods.
    #[arg(long, global = true, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    /// Tolerance: planarity residual (default 1e-6) or float rank cross-check (default 1e-8).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Largest dimension for symbolic fallbacks.
    #[arg(long, global = true, default_value_t = DEFAULT_SYMBOLIC_THRESHOLD)]
    symbolic_threshold: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Effective configuration of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub trials: usize,
    /// `None` selects the per-command default.
    pub tol: Option<f64>,
    pub symbolic_threshold: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            seed: 0,
            trials: DEFAULT_TRIALS,
            tol: None,
            symbolic_threshold: DEFAULT_SYMBOLIC_THRESHOLD,
            format: Format::Json,
            out: None,
        }
    }

    pub fn search_options(&self) -> SearchOptions {
        SearchOptions {
            trials: self.trials,
            seed: self.seed,
            symbolic_threshold: self.symbolic_threshold,
        }
    }

    pub fn planarity_tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_PLANARITY_TOL)
    }

    pub fn float_rank_tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_FLOAT_TOL)
    }

    /// All numeric knobs positive.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        if self.symbolic_threshold == 0 {
            return Err(CliError::Usage("--symbolic-threshold must be at least 1".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!("--tol must be positive and finite, got {t}")));
            }
        }
        if let Command::Planar { samples, .. } = self.command {
            if samples == 0 {
                return Err(CliError::Usage("--samples must be positive".into()));
            }
        }
        Ok(())
    }

    fn echo(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config is serializable")
    }
}

/// Runs `cfg` and returns the report; `report.exit_code` is the process
/// exit status.
pub fn dispatch(cfg: &RunConfig) -> Report {
    let start = Instant::now();
    let mut report = Report::new(cfg.command.name(), cfg.echo());
    let result = cfg.validate().and_then(|()| {
        for p in cfg.command.input_paths() {
            std::fs::File::open(p).map_err(|e| CliError::Unreadable {
                path: p.display().to_string(),
                message: e.to_string(),
            })?;
        }
        commands::run(cfg, &mut report)
    });
    match result {
        Ok(outcome) => {
            report.outcome = outcome;
            report.exit_code = exit_code(outcome);
        }
        Err(e) => fail(&mut report, &e),
    }
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    report
}

fn fail(report: &mut Report, e: &CliError) {
    report.outcome = Outcome::Error;
    report.exit_code = e.exit_code();
    report.summary = e.to_string();
    report.error = Some(e.to_report_error());
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.render_text(),
    }
}

/// Parses `args` (including the program name), runs the command, writes the
/// report and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_POSITIVE;
            }
            eprint!("{e}");
            let mut report = Report::new("usage", serde_json::Value::Null);
            let err = CliError::Usage(e.kind().to_string());
            fail(&mut report, &err);
            print!("{}", render(&report, Format::Json));
            return EXIT_USAGE;
        }
    };
    let cfg = RunConfig {
        command: cli.command,
        seed: cli.seed,
        trials: cli.trials,
        tol: cli.tol,
        symbolic_threshold: cli.symbolic_threshold,
        format: cli.format,
        out: cli.out,
    };
    let mut report = dispatch(&cfg);
    let text = render(&report, cfg.format);
    match &cfg.out {
        None => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()).is_err() {
                return EXIT_IO;
            }
        }
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                let err = CliError::Output { path: path.display().to_string(), message: e.to_string() };
                eprintln!("{err}");
                fail(&mut report, &err);
                print!("{}", render(&report, cfg.format));
            }
        }
    }
    report.exit_code
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from([
            "affinor-rank", "rank", "b.json", "--generic", "--seed", "7", "--trials", "3", "--format", "text",
        ])
        .unwrap();
        assert_eq!(cli.seed, 7);
        assert_eq!(cli.trials, 3);
        assert_eq!(cli.format, Format::Text);
        assert!(matches!(cli.command, Command::Rank { generic: true, inversion_probe: false, .. }));

        let cli = Cli::try_parse_from(["affinor-rank", "distributions", "--dims", "2,1,3"]).unwrap();
        assert!(matches!(cli.command, Command::Distributions { ref dims, .. } if dims == &[2, 1, 3]));
        let cli = Cli::try_parse_from(["affinor-rank", "clifford", "--s", "1", "--t", "2", "--check-rank"]).unwrap();
        assert!(matches!(cli.command, Command::Clifford { s: 1, t: 2, check_rank: true, .. }));
    }

    #[test]
    fn knobs_must_be_positive() {
        let mut cfg = RunConfig::new(Command::Clifford { s: 1, t: 0, emit: false, check_rank: false, doubled: false });
        cfg.trials = 0;
        assert_eq!(dispatch(&cfg).exit_code, EXIT_USAGE);
        cfg.trials = 1;
        cfg.tol = Some(-1.0);
        assert_eq!(dispatch(&cfg).exit_code, EXIT_USAGE);
    }

    #[test]
    fn missing_input_is_reported() {
        let cfg = RunConfig::new(Command::Frobenius { file: "/nonexistent/alg.json".into() });
        let r = dispatch(&cfg);
        assert_eq!(r.exit_code, EXIT_NO_INPUT);
        assert_eq!(r.error.unwrap().path.as_deref(), Some("/nonexistent/alg.json"));
    }

    #[test]
    fn config_round_trips() {
        let cfg = RunConfig::new(Command::Planar {
            basis: "b".into(),
            connection: "c".into(),
            curve: "k".into(),
            samples: 9,
        });
        let back: RunConfig = serde_json::from_value(cfg.echo()).unwrap();
        assert_eq!(back, cfg);
    }
}
