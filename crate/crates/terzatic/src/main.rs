//! Command-line front end: evaluate functionals, run inequality checks,
//! estimate certificate constants, fuzz for violations, and selftest.
//!
//! Exit codes are the machine contract: 0 success/holds, 1
//! violated/failures found, 2 invalid input, 3 enumeration cap exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use terzatic::commands::{
    certificate_command, check_document, eval_document, fuzz_command, load_document, parse_range,
    FunctionalKind, FuzzArgs,
};
use terzatic::error::Error;
use terzatic::format::Mode;
use terzatic::instance::{WeightFamily, DEFAULT_ENUM_CAP};
use terzatic::report::{Direction, Target};
use terzatic::selftest::run_selftest;

const CAP_ENV_VAR: &str = "TERZATIC_CAP";

#[derive(Parser)]
#[command(
    name = "terzatic",
    about = "Jensen-functional evaluation and superterzatic inequality verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FunctionalArg {
    Jensen,
    Generalized,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    P,
    R,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Super,
    Sub,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Def2,
    Lemma5,
    #[value(name = "thm6-lower")]
    Thm6Lower,
    #[value(name = "thm6-upper")]
    Thm6Upper,
    #[value(name = "cor8-lower")]
    Cor8Lower,
    #[value(name = "cor8-upper")]
    Cor8Upper,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Float,
    Rational,
}

impl From<TargetArg> for Target {
    fn from(value: TargetArg) -> Self {
        match value {
            TargetArg::Def2 => Target::Def2,
            TargetArg::Lemma5 => Target::Lemma5,
            TargetArg::Thm6Lower => Target::Thm6Lower,
            TargetArg::Thm6Upper => Target::Thm6Upper,
            TargetArg::Cor8Lower => Target::Cor8Lower,
            TargetArg::Cor8Upper => Target::Cor8Upper,
        }
    }
}

impl From<ModeArg> for Mode {
    fn from(value: ModeArg) -> Self {
        match value {
            ModeArg::Float => Mode::Float,
            ModeArg::Rational => Mode::Rational,
        }
    }
}

#[derive(Args)]
struct CapArg {
    /// Cap on enumerated multi-indices; the TERZATIC_CAP environment
    /// variable overrides the default.
    #[arg(long)]
    cap: Option<u64>,
}

impl CapArg {
    fn resolve(&self) -> Result<u64, Error> {
        if let Some(cap) = self.cap {
            return Ok(cap);
        }
        match std::env::var(CAP_ENV_VAR) {
            Ok(value) => value.parse::<u64>().map_err(|_| {
                Error::InvalidArgument(format!("{CAP_ENV_VAR} must be an integer, got {value:?}"))
            }),
            Err(_) => Ok(DEFAULT_ENUM_CAP),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a functional over an instance document.
    Eval {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "generalized")]
        functional: FunctionalArg,
        /// Weight family to evaluate under.
        #[arg(long, value_enum, default_value = "p")]
        family: FamilyArg,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Check an inequality target over an instance document.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        target: TargetArg,
        /// Inequality direction; defaults to the model claim.
        #[arg(long, value_enum)]
        direction: Option<DirectionArg>,
        /// Relative verdict tolerance (float mode; exact mode ignores it).
        #[arg(long)]
        tolerance: Option<f64>,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Estimate the sharp certificate constant at a barycenter.
    Certificate {
        /// Function spec: power:<exp>, cube-log, or poly:<c0>,<c1>,...
        #[arg(long)]
        function: String,
        #[arg(long = "x-bar")]
        x_bar: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inclusive instance-size range "lo:hi".
        #[arg(long = "n-range", default_value = "2:6")]
        n_range: String,
        #[arg(long = "domain-upper", default_value = "1")]
        domain_upper: String,
        #[arg(long, value_enum, default_value = "float")]
        mode: ModeArg,
    },
    /// Search for inequality violations over random instances.
    Fuzz {
        #[arg(long, value_enum)]
        target: TargetArg,
        /// Function spec: power:<exp>, cube-log, or poly:<c0>,<c1>,...
        #[arg(long)]
        function: String,
        /// Certificate polynomial coefficients "<c0>,<c1>,...".
        #[arg(long)]
        certificate: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inclusive block-count range "lo:hi".
        #[arg(long = "k-range", default_value = "1:3")]
        k_range: String,
        /// Inclusive per-block size range "lo:hi".
        #[arg(long = "n-range", default_value = "2:4")]
        n_range: String,
        #[arg(long = "domain-upper", default_value = "1")]
        domain_upper: String,
        #[arg(long, value_enum, default_value = "float")]
        mode: ModeArg,
        /// Relative verdict tolerance (float mode).
        #[arg(long)]
        tolerance: Option<f64>,
        /// Directory for violation reproducer documents.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        cap: CapArg,
    },
    /// Re-run the pinned exact-example table.
    Selftest,
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Eval {
            file,
            functional,
            family,
            cap,
        } => {
            let doc = load_document(&file)?;
            let functional = match functional {
                FunctionalArg::Jensen => FunctionalKind::Jensen,
                FunctionalArg::Generalized => FunctionalKind::Generalized,
            };
            let family = match family {
                FamilyArg::P => WeightFamily::P,
                FamilyArg::R => WeightFamily::R,
            };
            let out = eval_document(&doc, functional, family, cap.resolve()?)?;
            println!("{out}");
            Ok(0)
        }
        Command::Check {
            file,
            target,
            direction,
            tolerance,
            cap,
        } => {
            let doc = load_document(&file)?;
            let direction = direction.map(|d| match d {
                DirectionArg::Super => Direction::Super,
                DirectionArg::Sub => Direction::Sub,
            });
            let (report, verdict) =
                check_document(&doc, target.into(), direction, tolerance, cap.resolve()?)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(match verdict {
                terzatic::report::Verdict::Violated => 1,
                _ => 0,
            })
        }
        Command::Certificate {
            function,
            x_bar,
            trials,
            seed,
            n_range,
            domain_upper,
            mode,
        } => {
            let out = certificate_command(
                mode.into(),
                &function,
                &x_bar,
                parse_range(&n_range)?,
                trials,
                seed,
                &domain_upper,
            )?;
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(0)
        }
        Command::Fuzz {
            target,
            function,
            certificate,
            trials,
            seed,
            k_range,
            n_range,
            domain_upper,
            mode,
            tolerance,
            out,
            cap,
        } => {
            let args = FuzzArgs {
                mode: mode.into(),
                target: target.into(),
                function_spec: &function,
                certificate_spec: certificate.as_deref(),
                trials,
                seed,
                k_range: parse_range(&k_range)?,
                n_range: parse_range(&n_range)?,
                domain_upper: &domain_upper,
                rel_tol: tolerance,
                cap: cap.resolve()?,
                out_dir: out.as_deref(),
            };
            let (report, found) = fuzz_command(&args)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(u8::from(found))
        }
        Command::Selftest => {
            let results = run_selftest();
            let mut failures = 0usize;
            for result in &results {
                if result.passed {
                    println!("PASS {}", result.name);
                } else {
                    println!("FAIL {}: {}", result.name, result.detail);
                    failures += 1;
                }
            }
            println!(
                "selftest: {}/{} pinned examples reproduced",
                results.len() - failures,
                results.len()
            );
            Ok(u8::from(failures > 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
