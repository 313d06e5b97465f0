//! Seeded random-instance generation and violation search across the
//! implemented inequalities. Every trial derives its own sub-seed from
//! (master seed, trial index), so runs are deterministic and any single
//! violation replays in isolation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{corollary8_check, theorem6_lower_check, theorem6_upper_check, Side};
use crate::check::{check_def2, check_lemma5};
use crate::error::{Error, Result};
use crate::function::{FunctionModel, Polynomial};
use crate::instance::{GeneralInstance, PointVector, SimpleInstance, WeightFamily, Weights};
use crate::report::{default_direction, CertSource, CheckReport, Target, Verdict};
use crate::scalar::Scalar;
use crate::seeding::derive_subseed;

/// Instance shapes drawn by the generators.
#[derive(Debug, Clone)]
pub struct ShapeRange<S: Scalar> {
    /// Inclusive range for the number of blocks.
    pub k: (usize, usize),
    /// Inclusive range for points per block.
    pub n: (usize, usize),
    pub domain_upper: S,
}

#[derive(Debug, Clone)]
pub struct FuzzConfig<S: Scalar> {
    pub target: Target,
    pub function: FunctionModel<S>,
    /// Overrides the function's attached certificate when present.
    pub certificate: Option<Polynomial<S>>,
    pub trials: u64,
    pub seed: u64,
    pub shape: ShapeRange<S>,
    /// Relative verdict tolerance (float mode only).
    pub rel_tol: Option<f64>,
    pub cap: u64,
}

#[derive(Debug, Clone)]
pub struct Violation<S: Scalar> {
    pub trial: u64,
    pub sub_seed: u64,
    pub instance: GeneralInstance<S>,
    pub report: CheckReport<S>,
}

#[derive(Debug, Clone)]
pub struct FuzzReport<S: Scalar> {
    pub trials_run: u64,
    pub violations: Vec<Violation<S>>,
    /// Minimum slack across non-degenerate trials.
    pub min_slack: Option<S>,
    pub degenerate_count: u64,
    /// Trials that blew the enumeration cap, counted separately.
    pub cap_errors: u64,
}

fn sample_positive<S: Scalar>(rng: &mut ChaCha8Rng) -> S {
    loop {
        let u = S::sample_unit(rng);
        if !u.is_zero() {
            return u;
        }
    }
}

fn gen_weights<S: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> Weights<S> {
    let raw: Vec<S> = (0..n).map(|_| sample_positive(rng)).collect();
    Weights::new(raw).expect("positive draws normalize")
}

fn gen_points<S: Scalar>(rng: &mut ChaCha8Rng, n: usize, upper: &S) -> PointVector<S> {
    let values: Vec<S> = (0..n)
        .map(|_| upper.clone() * S::sample_unit(rng))
        .collect();
    PointVector::new(values, upper.clone()).expect("draws stay in domain")
}

fn gen_block<S: Scalar>(rng: &mut ChaCha8Rng, n: usize, upper: &S) -> SimpleInstance<S> {
    SimpleInstance::new(gen_weights(rng, n), gen_points(rng, n, upper))
        .expect("generated block is valid")
}

pub(crate) fn gen_general_with_rng<S: Scalar>(
    shape: &ShapeRange<S>,
    rng: &mut ChaCha8Rng,
    with_r: bool,
    forced_k: Option<usize>,
) -> GeneralInstance<S> {
    let k = forced_k.unwrap_or_else(|| rng.gen_range(shape.k.0..=shape.k.1));
    let sizes: Vec<usize> = (0..k).map(|_| rng.gen_range(shape.n.0..=shape.n.1)).collect();
    let q = gen_weights(rng, k);
    let blocks: Vec<SimpleInstance<S>> = sizes
        .iter()
        .map(|&n| gen_block(rng, n, &shape.domain_upper))
        .collect();
    let r_blocks = with_r.then(|| sizes.iter().map(|&n| gen_weights(rng, n)).collect());
    GeneralInstance::new(q, blocks, r_blocks).expect("generated instance is valid")
}

/// Deterministic single-block instance for a sub-seed.
pub fn gen_simple<S: Scalar>(shape: &ShapeRange<S>, sub_seed: u64) -> SimpleInstance<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed);
    let n = rng.gen_range(shape.n.0..=shape.n.1);
    gen_block(&mut rng, n, &shape.domain_upper)
}

/// Deterministic multi-block instance for a sub-seed.
pub fn gen_general<S: Scalar>(
    shape: &ShapeRange<S>,
    sub_seed: u64,
    with_r: bool,
) -> GeneralInstance<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed);
    gen_general_with_rng(shape, &mut rng, with_r, None)
}

fn validate_shape<S: Scalar>(config: &FuzzConfig<S>) -> Result<()> {
    let shape = &config.shape;
    if shape.k.0 < 1 || shape.k.0 > shape.k.1 {
        return Err(Error::InvalidArgument(format!(
            "invalid block-count range {}:{}",
            shape.k.0, shape.k.1
        )));
    }
    if shape.n.0 < 1 || shape.n.0 > shape.n.1 {
        return Err(Error::InvalidArgument(format!(
            "invalid point-count range {}:{}",
            shape.n.0, shape.n.1
        )));
    }
    if shape.domain_upper <= S::zero() {
        return Err(Error::NonPositiveDomain(shape.domain_upper.render()));
    }
    // The largest possible tensor sum must fit under the cap.
    let k = if config.target.single_block() {
        1
    } else {
        shape.k.1
    };
    let mut worst: u128 = 1;
    for _ in 0..k {
        worst = worst.saturating_mul(shape.n.1 as u128);
    }
    if worst > config.cap as u128 {
        return Err(Error::CapExceeded {
            required: worst,
            cap: config.cap,
        });
    }
    Ok(())
}

fn effective_function<S: Scalar>(config: &FuzzConfig<S>) -> FunctionModel<S> {
    match &config.certificate {
        Some(cert) => config.function.clone().with_certificate(cert.clone()),
        None => config.function.clone(),
    }
}

/// Generate and check the instance of one trial.
fn run_trial<S: Scalar>(
    config: &FuzzConfig<S>,
    f: &FunctionModel<S>,
    sub_seed: u64,
) -> Result<(GeneralInstance<S>, CheckReport<S>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed);
    let forced_k = config.target.single_block().then_some(1);
    let ginst = gen_general_with_rng(&config.shape, &mut rng, config.target.needs_r(), forced_k);
    let direction = default_direction(f);
    let report = match config.target {
        Target::Def2 => {
            let inst = ginst.as_single_block(WeightFamily::P)?;
            check_def2(f, &inst, direction, &CertSource::Model, config.rel_tol)?
        }
        Target::Lemma5 => check_lemma5(
            f,
            &ginst,
            direction,
            &CertSource::Model,
            config.rel_tol,
            config.cap,
        )?,
        Target::Thm6Lower => {
            theorem6_lower_check(f, &ginst, &CertSource::Model, config.rel_tol, config.cap)?
        }
        Target::Thm6Upper => {
            theorem6_upper_check(f, &ginst, &CertSource::Model, config.rel_tol, config.cap)?
        }
        Target::Cor8Lower | Target::Cor8Upper => {
            let side = if config.target == Target::Cor8Lower {
                Side::Lower
            } else {
                Side::Upper
            };
            let block = ginst.block(0);
            let r = ginst.r_block(0).ok_or(Error::MissingRFamily)?;
            corollary8_check(
                f,
                block.points(),
                block.weights(),
                r,
                side,
                &CertSource::Model,
                config.rel_tol,
            )?
        }
    };
    Ok((ginst, report))
}

/// Replay one trial of a configured run; violations reproduce
/// bit-identically in rational mode.
pub fn replay_trial<S: Scalar>(
    config: &FuzzConfig<S>,
    trial: u64,
) -> Result<(GeneralInstance<S>, CheckReport<S>)> {
    let f = effective_function(config);
    run_trial(config, &f, derive_subseed(config.seed, trial))
}

/// Run the configured number of trials, collecting violations and the
/// minimum observed slack. Deterministic for a fixed seed.
pub fn run_fuzz<S: Scalar>(config: &FuzzConfig<S>) -> Result<FuzzReport<S>> {
    validate_shape(config)?;
    let f = effective_function(config);
    let mut report = FuzzReport {
        trials_run: 0,
        violations: Vec::new(),
        min_slack: None,
        degenerate_count: 0,
        cap_errors: 0,
    };
    for trial in 0..config.trials {
        let sub_seed = derive_subseed(config.seed, trial);
        match run_trial(config, &f, sub_seed) {
            Err(Error::CapExceeded { .. }) => report.cap_errors += 1,
            Err(other) => return Err(other),
            Ok((instance, check)) => {
                if check.verdict == Verdict::Degenerate {
                    report.degenerate_count += 1;
                } else {
                    let slack = check.slack.clone();
                    let lower = match &report.min_slack {
                        None => true,
                        Some(current) => slack < *current,
                    };
                    if lower {
                        report.min_slack = Some(slack);
                    }
                    if check.verdict == Verdict::Violated {
                        report.violations.push(Violation {
                            trial,
                            sub_seed,
                            instance,
                            report: check,
                        });
                    }
                }
            }
        }
        report.trials_run += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::DEFAULT_ENUM_CAP;
    use crate::scalar::Rat;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    fn shape() -> ShapeRange<Rat> {
        ShapeRange {
            k: (1, 3),
            n: (2, 4),
            domain_upper: rat(1, 1),
        }
    }

    fn cube_config(target: Target, cert: &[(i64, i64)], trials: u64, seed: u64) -> FuzzConfig<Rat> {
        FuzzConfig {
            target,
            function: FunctionModel::power(rat(3, 1)).unwrap(),
            certificate: Some(
                Polynomial::new(cert.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap(),
            ),
            trials,
            seed,
            shape: shape(),
            rel_tol: None,
            cap: DEFAULT_ENUM_CAP,
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let s = shape();
        assert_eq!(gen_simple::<Rat>(&s, 42), gen_simple::<Rat>(&s, 42));
        assert_ne!(gen_simple::<Rat>(&s, 42), gen_simple::<Rat>(&s, 43));
        let a = gen_general::<Rat>(&s, 7, true);
        let b = gen_general::<Rat>(&s, 7, true);
        assert_eq!(a, b);
        assert!(a.has_r_family());
        assert!(!gen_general::<Rat>(&s, 7, false).has_r_family());
    }

    #[test]
    fn generated_weights_are_valid() {
        for seed in 0..50 {
            let inst = gen_simple::<Rat>(&shape(), seed);
            assert_eq!(inst.weights().sum(), rat(1, 1));
            assert!(inst.weights().iter().all(|w| *w > rat(0, 1)));
        }
    }

    #[test]
    fn sharp_cube_certificate_never_violates() {
        // C(t) = 2t makes every slack exactly zero for the cube.
        let config = cube_config(Target::Def2, &[(0, 1), (2, 1)], 300, 9);
        let report = run_fuzz(&config).unwrap();
        assert_eq!(report.trials_run, 300);
        assert!(report.violations.is_empty());
        if let Some(min) = &report.min_slack {
            assert!(Scalar::is_zero(min));
        }
    }

    #[test]
    fn power_certificate_violations_are_found_and_replay() {
        // C(t) = 3t^2 fails whenever the barycenter exceeds 2/3.
        let config = cube_config(Target::Def2, &[(0, 1), (0, 1), (3, 1)], 400, 2024);
        let report = run_fuzz(&config).unwrap();
        assert!(!report.violations.is_empty());
        for violation in report.violations.iter().take(5) {
            let (instance, check) = replay_trial(&config, violation.trial).unwrap();
            assert_eq!(instance, violation.instance);
            assert_eq!(check, violation.report);
            assert!(check.slack < rat(0, 1));
            // Violations concentrate beyond barycenter 2/3.
            assert!(check.barycenter > rat(2, 3));
        }
        let min = report.min_slack.as_ref().unwrap();
        assert!(*min < rat(0, 1));
    }

    #[test]
    fn min_slack_is_monotone_in_trials() {
        let config_small = cube_config(Target::Def2, &[(0, 1), (0, 1), (3, 1)], 100, 77);
        let mut config_large = config_small.clone();
        config_large.trials = 400;
        let small = run_fuzz(&config_small).unwrap();
        let large = run_fuzz(&config_large).unwrap();
        match (small.min_slack, large.min_slack) {
            (Some(s), Some(l)) => assert!(l <= s),
            (None, _) => {}
            (Some(_), None) => panic!("min slack disappeared"),
        }
    }

    #[test]
    fn thm6_targets_run_clean_with_sharp_certificate() {
        for target in [Target::Thm6Lower, Target::Cor8Lower] {
            // C(t) = t is strictly feasible for the cube on lower-type
            // checks (the sharp constant is 2t).
            let config = cube_config(target, &[(0, 1), (1, 1)], 150, 5);
            let report = run_fuzz(&config).unwrap();
            assert!(
                report.violations.is_empty(),
                "unexpected violations for {:?}",
                target
            );
        }
    }

    #[test]
    fn shape_must_respect_cap() {
        let mut config = cube_config(Target::Lemma5, &[(0, 1), (2, 1)], 1, 1);
        config.shape = ShapeRange {
            k: (8, 8),
            n: (10, 10),
            domain_upper: rat(1, 1),
        };
        config.cap = 1_000_000;
        assert!(matches!(
            run_fuzz(&config),
            Err(Error::CapExceeded { .. })
        ));
    }
}
