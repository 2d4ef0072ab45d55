mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aiphase::report::{self, CheckStatus, Inputs, ScanParameter, Scheme};
use aiphase::QuadOptions;
use clap::{Args, Parser, Subcommand};

use config::ScenarioConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("validation failed")]
    Validation,
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 1,
            Self::Numerical(_) => 2,
            Self::Validation => 3,
        }
    }
}

impl From<aiphase::Error> for CliError {
    fn from(e: aiphase::Error) -> Self {
        use aiphase::Error as E;
        match e {
            E::InvalidInput(_) | E::Unsupported(_) => Self::Config(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "aiphase", version, about = "Phase and transition probability of a π/2–π–π/2 atom interferometer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Replaces the η-linear closed-form coefficient; negative control for `validate`.
    #[arg(long, hide = true, allow_negative_numbers = true)]
    closed_form_eta_coeff: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Phase contributions, contrast and P21.
    Phase(Common),
    /// CSV fringe over one scanned parameter.
    Fringe {
        #[command(flatten)]
        common: Common,
        /// alpha, kg_minus_alpha, T or d_gradiometer
        #[arg(long)]
        scan: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Arm separation and the compensating wavenumber changes.
    Contrast(Common),
    /// Cross-checks against the independent oracles.
    Validate(Common),
}

fn load(common: &Common) -> Result<Inputs, CliError> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", common.config.display())))?;
    let cfg = ScenarioConfig::parse(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", common.config.display())),
        other => other,
    })?;
    let opts = QuadOptions::from_env()?;
    let base = common.config.parent().unwrap_or(Path::new("."));
    let mut inp = cfg.build(base, opts)?;
    if let Some(c) = common.closed_form_eta_coeff {
        inp.coefficients.eta_linear = c;
    }
    Ok(inp)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn run(cli: Cli) -> Result<String, CliError> {
    let mut out = String::new();
    match cli.command {
        Command::Phase(common) => {
            let r = report::run_phase(&load(&common)?)?;
            for (k, v) in r.entries() {
                writeln!(out, "{k} = {}", num(v)).unwrap();
            }
            for n in &r.notes {
                writeln!(out, "# note: {n}").unwrap();
            }
        }
        Command::Fringe {
            common,
            scan,
            from,
            to,
            steps,
        } => {
            let param: ScanParameter = scan.parse()?;
            let inp = load(&common)?;
            let rows = report::run_fringe(&inp, param, from, to, steps)?;
            out = report::fringe_csv(&rows);
        }
        Command::Contrast(common) => {
            let r = report::run_contrast(&load(&common)?)?;
            let s = r.separation;
            let scheme = match r.scheme {
                Scheme::SingleKick => "single_kick",
                Scheme::TwoKick => "two_kick",
            };
            writeln!(out, "scheme = {scheme}").unwrap();
            writeln!(out, "dz = {}", num(s.dz)).unwrap();
            writeln!(out, "dp = {}", num(s.dp)).unwrap();
            match s.ratio_time {
                Some(t) => writeln!(out, "ratio_time = {}", num(t)).unwrap(),
                None => writeln!(out, "ratio_time = none").unwrap(),
            }
            writeln!(out, "kick_pi = {}", num(s.kick_pi)).unwrap();
            writeln!(out, "kick_final = {}", num(s.kick_final)).unwrap();
            writeln!(out, "residual_dz = {}", num(s.residual_dz)).unwrap();
            writeln!(out, "residual_dp = {}", num(s.residual_dp)).unwrap();
        }
        Command::Validate(common) => {
            let r = report::run_validate(&load(&common)?)?;
            for c in &r.checks {
                if c.status == CheckStatus::Skipped {
                    writeln!(out, "{}: {} ({})", c.name, c.status, c.detail).unwrap();
                } else {
                    writeln!(
                        out,
                        "{}: {} achieved={:.3e} threshold={:.1e} ({})",
                        c.name, c.status, c.achieved, c.threshold, c.detail
                    )
                    .unwrap();
                }
            }
            let overall = if r.passed() { "PASS" } else { "FAIL" };
            writeln!(out, "overall: {overall}").unwrap();
            if !r.passed() {
                print!("{out}");
                return Err(CliError::Validation);
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("aiphase: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
