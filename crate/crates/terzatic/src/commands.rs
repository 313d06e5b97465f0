//! Command cores shared by the CLI binary and the C API: evaluate a
//! document, run a check against a target, estimate certificates, fuzz,
//! and selftest. Outputs are rendered scalars or JSON values; exit-code
//! mapping stays in the front ends.

use std::path::Path;

use serde_json::Value;

use crate::bounds::{corollary8_check, theorem6_lower_check, theorem6_upper_check, Side};
use crate::check::{check_def2, check_lemma5};
use crate::error::{Error, Result};
use crate::estimate::estimate_certificate;
use crate::format::{
    check_report_to_value, estimate_to_value, fuzz_report_to_value, instance_to_value,
    parse_document, reproducer_to_value, Document, JsonScalar, Mode, TypedDocument,
};
use crate::function::{FunctionModel, Polynomial};
use crate::fuzz::{run_fuzz, FuzzConfig, ShapeRange};
use crate::instance::WeightFamily;
use crate::report::{default_direction, CertSource, Direction, Target, Verdict};
use crate::scalar::{Rat, Scalar};

/// Which functional `eval` computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionalKind {
    Jensen,
    Generalized,
}

/// Parse a CLI function spec: "power:<exp>", "cube-log"/"cube_log", or
/// "poly:<c0>,<c1>,...".
pub fn parse_function_spec<S: Scalar>(spec: &str) -> Result<FunctionModel<S>> {
    if spec == "cube-log" || spec == "cube_log" {
        return Ok(FunctionModel::cube_log());
    }
    if let Some(exp) = spec.strip_prefix("power:") {
        return FunctionModel::power(S::parse_literal(exp)?);
    }
    if let Some(coeffs) = spec.strip_prefix("poly:") {
        let coeffs: Vec<S> = coeffs
            .split(',')
            .map(S::parse_literal)
            .collect::<Result<_>>()?;
        return FunctionModel::polynomial(coeffs);
    }
    Err(Error::InvalidArgument(format!(
        "unknown function spec {spec:?}; expected power:<exp>, cube-log, or poly:<c0>,<c1>,..."
    )))
}

/// Parse a certificate spec "<c0>,<c1>,..." into a polynomial.
pub fn parse_certificate_spec<S: Scalar>(spec: &str) -> Result<Polynomial<S>> {
    let coeffs: Vec<S> = spec
        .split(',')
        .map(S::parse_literal)
        .collect::<Result<_>>()?;
    Polynomial::new(coeffs)
}

/// "lo:hi" inclusive ranges for point and block counts.
pub fn parse_range(spec: &str) -> Result<(usize, usize)> {
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::InvalidArgument(format!("bad range bound {s:?}")))
    };
    match spec.split_once(':') {
        Some((lo, hi)) => Ok((parse(lo)?, parse(hi)?)),
        None => {
            let v = parse(spec)?;
            Ok((v, v))
        }
    }
}

pub fn load_document(path: &Path) -> Result<Document> {
    let text = std::fs::read_to_string(path)?;
    parse_document(&text)
}

fn eval_typed<S: JsonScalar>(
    doc: &TypedDocument<S>,
    functional: FunctionalKind,
    family: WeightFamily,
    cap: u64,
) -> Result<String> {
    let value = match functional {
        FunctionalKind::Jensen => {
            let inst = doc.instance.as_single_block(family)?;
            crate::functional::jensen(&doc.function, &inst)?
        }
        FunctionalKind::Generalized => {
            crate::functional::generalized_jensen(&doc.function, &doc.instance, family, cap)?
        }
    };
    Ok(value.render())
}

/// Evaluate the requested functional; the result is printed with 17
/// significant digits in float mode or as an exact "num/den" string.
pub fn eval_document(
    doc: &Document,
    functional: FunctionalKind,
    family: WeightFamily,
    cap: u64,
) -> Result<String> {
    match doc {
        Document::Float(d) => eval_typed(d, functional, family, cap),
        Document::Rational(d) => eval_typed(d, functional, family, cap),
    }
}

fn check_typed<S: JsonScalar>(
    doc: &TypedDocument<S>,
    target: Target,
    direction: Option<Direction>,
    rel_tol: Option<f64>,
    cap: u64,
) -> Result<(Value, Verdict)> {
    if direction == Some(Direction::Sub) && !target.supports_direction() {
        return Err(crate::report::missing_direction_error());
    }
    let f = &doc.function;
    let direction = direction.unwrap_or_else(|| default_direction(f));
    let report = match target {
        Target::Def2 => {
            let inst = doc.instance.as_single_block(WeightFamily::P)?;
            check_def2(f, &inst, direction, &CertSource::Model, rel_tol)?
        }
        Target::Lemma5 => check_lemma5(
            f,
            &doc.instance,
            direction,
            &CertSource::Model,
            rel_tol,
            cap,
        )?,
        Target::Thm6Lower => {
            theorem6_lower_check(f, &doc.instance, &CertSource::Model, rel_tol, cap)?
        }
        Target::Thm6Upper => {
            theorem6_upper_check(f, &doc.instance, &CertSource::Model, rel_tol, cap)?
        }
        Target::Cor8Lower | Target::Cor8Upper => {
            let side = if target == Target::Cor8Lower {
                Side::Lower
            } else {
                Side::Upper
            };
            let block = doc.instance.as_single_block(WeightFamily::P)?;
            let r = doc.instance.r_block(0).ok_or(Error::MissingRFamily)?;
            corollary8_check(
                f,
                block.points(),
                block.weights(),
                r,
                side,
                &CertSource::Model,
                rel_tol,
            )?
        }
    };
    let verdict = report.verdict;
    let echo = instance_to_value(&doc.instance);
    Ok((check_report_to_value(&report, target, Some(echo)), verdict))
}

/// Run a check target over a parsed document.
pub fn check_document(
    doc: &Document,
    target: Target,
    direction: Option<Direction>,
    rel_tol: Option<f64>,
    cap: u64,
) -> Result<(Value, Verdict)> {
    match doc {
        Document::Float(d) => check_typed(d, target, direction, rel_tol, cap),
        Document::Rational(d) => check_typed(d, target, direction, rel_tol, cap),
    }
}

/// Certificate estimation driven by string arguments, mode-dispatched.
#[allow(clippy::too_many_arguments)]
pub fn certificate_command(
    mode: Mode,
    function_spec: &str,
    x_bar: &str,
    n_range: (usize, usize),
    trials: usize,
    seed: u64,
    domain_upper: &str,
) -> Result<Value> {
    match mode {
        Mode::Float => {
            let f = parse_function_spec::<f64>(function_spec)?;
            let x_bar = f64::parse_literal(x_bar)?;
            let upper = f64::parse_literal(domain_upper)?;
            let est = estimate_certificate(&f, &x_bar, n_range, trials, seed, &upper)?;
            Ok(estimate_to_value(&est))
        }
        Mode::Rational => {
            let f = parse_function_spec::<Rat>(function_spec)?;
            let x_bar = Rat::parse_literal(x_bar)?;
            let upper = Rat::parse_literal(domain_upper)?;
            let est = estimate_certificate(&f, &x_bar, n_range, trials, seed, &upper)?;
            Ok(estimate_to_value(&est))
        }
    }
}

/// String-driven fuzz configuration for the front ends.
#[derive(Debug, Clone)]
pub struct FuzzArgs<'a> {
    pub mode: Mode,
    pub target: Target,
    pub function_spec: &'a str,
    pub certificate_spec: Option<&'a str>,
    pub trials: u64,
    pub seed: u64,
    pub k_range: (usize, usize),
    pub n_range: (usize, usize),
    pub domain_upper: &'a str,
    pub rel_tol: Option<f64>,
    pub cap: u64,
    /// Directory for violation reproducer documents.
    pub out_dir: Option<&'a Path>,
}

fn fuzz_typed<S: JsonScalar>(args: &FuzzArgs) -> Result<(Value, bool)> {
    let function = parse_function_spec::<S>(args.function_spec)?;
    let certificate = args
        .certificate_spec
        .map(parse_certificate_spec::<S>)
        .transpose()?;
    let config = FuzzConfig {
        target: args.target,
        function,
        certificate,
        trials: args.trials,
        seed: args.seed,
        shape: ShapeRange {
            k: args.k_range,
            n: args.n_range,
            domain_upper: S::parse_literal(args.domain_upper)?,
        },
        rel_tol: args.rel_tol,
        cap: args.cap,
    };
    let report = run_fuzz(&config)?;
    if let Some(dir) = args.out_dir {
        if !report.violations.is_empty() {
            std::fs::create_dir_all(dir)?;
            let f = match &config.certificate {
                Some(cert) => config.function.clone().with_certificate(cert.clone()),
                None => config.function.clone(),
            };
            for violation in &report.violations {
                let path = dir.join(format!("violation_{:06}.json", violation.trial));
                let doc = reproducer_to_value(&f, violation);
                std::fs::write(path, serde_json::to_string_pretty(&doc)?)?;
            }
        }
    }
    let found = !report.violations.is_empty();
    Ok((fuzz_report_to_value(&report, args.target), found))
}

/// Run a fuzz campaign; returns the report and whether violations were
/// found.
pub fn fuzz_command(args: &FuzzArgs) -> Result<(Value, bool)> {
    match args.mode {
        Mode::Float => fuzz_typed::<f64>(args),
        Mode::Rational => fuzz_typed::<Rat>(args),
    }
}
