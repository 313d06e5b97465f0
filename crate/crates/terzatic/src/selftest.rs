//! Pinned exact examples, every one computed twice: through the primary
//! path and through the reference route, both compared bit-exactly
//! against frozen rational constants.

use crate::bounds::{
    corollary8_check, ratio_extrema, replicate_instance, theorem6_lower_check,
    theorem6_upper_check, Side,
};
use crate::check::{check_def2, def2_rhs, def2_rhs_alt, feasibility_threshold, lemma5_rhs};
use crate::function::{terza_quotient, FunctionModel};
use crate::functional::{generalized_jensen, jensen, tensor_distribution};
use crate::instance::{
    GeneralInstance, PointVector, SimpleInstance, WeightFamily, Weights, DEFAULT_ENUM_CAP,
};
use crate::oracle;
use crate::report::{CertSource, Direction, Threshold};
use crate::scalar::{Rat, Scalar};

#[derive(Debug, Clone)]
pub struct SelftestResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::from_ratio(n, d)
}

fn rats(values: &[(i64, i64)]) -> Vec<Rat> {
    values.iter().map(|&(n, d)| rat(n, d)).collect()
}

fn cube() -> FunctionModel<Rat> {
    FunctionModel::power(rat(3, 1)).expect("cube model")
}

fn weights(values: &[(i64, i64)]) -> Weights<Rat> {
    Weights::new(rats(values)).expect("weights")
}

fn points(values: &[(i64, i64)]) -> PointVector<Rat> {
    PointVector::new(rats(values), rat(1, 1)).expect("points")
}

fn simple(p: &[(i64, i64)], x: &[(i64, i64)]) -> SimpleInstance<Rat> {
    SimpleInstance::new(weights(p), points(x)).expect("instance")
}

fn worked_general() -> GeneralInstance<Rat> {
    let block = simple(&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]);
    GeneralInstance::new(weights(&[(1, 2), (1, 2)]), vec![block.clone(), block], None)
        .expect("general instance")
}

fn worked_k1() -> GeneralInstance<Rat> {
    replicate_instance(
        &weights(&[(1, 2), (1, 2)]),
        &points(&[(0, 1), (1, 1)]),
        &weights(&[(1, 1)]),
        Some(&weights(&[(1, 4), (3, 4)])),
    )
    .expect("k1 instance")
}

type Check = (&'static str, fn() -> std::result::Result<(), String>);

fn expect_eq<T: PartialEq + std::fmt::Debug>(
    label: &str,
    got: T,
    want: T,
) -> std::result::Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{label}: got {got:?}, want {want:?}"))
    }
}

fn checks() -> Vec<Check> {
    vec![
        ("weights normalize (1,3) -> (1/4,3/4)", || {
            let w = Weights::new(rats(&[(1, 1), (3, 1)])).map_err(|e| e.to_string())?;
            expect_eq("weights", w.as_slice().to_vec(), rats(&[(1, 4), (3, 4)]))
        }),
        ("barycenter (1/4,3/4)x(0,1) = 3/4", || {
            expect_eq(
                "barycenter",
                simple(&[(1, 4), (3, 4)], &[(0, 1), (1, 1)]).barycenter(),
                rat(3, 4),
            )
        }),
        ("quotient convention: 0, 1/4, 1/16", || {
            let f = cube();
            expect_eq(
                "at 0",
                terza_quotient(&f, &rat(0, 1)).map_err(|e| e.to_string())?,
                rat(0, 1),
            )?;
            expect_eq(
                "at 1/2",
                terza_quotient(&f, &rat(1, 2)).map_err(|e| e.to_string())?,
                rat(1, 4),
            )?;
            expect_eq(
                "at -1/4",
                terza_quotient(&f, &rat(-1, 4)).map_err(|e| e.to_string())?,
                rat(1, 16),
            )
        }),
        ("jensen uniform cube = 3/8 (both routes)", || {
            let inst = simple(&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]);
            expect_eq(
                "primary",
                jensen(&cube(), &inst).map_err(|e| e.to_string())?,
                rat(3, 8),
            )?;
            expect_eq(
                "reference",
                oracle::brute_jensen(&cube(), &inst).map_err(|e| e.to_string())?,
                rat(3, 8),
            )
        }),
        ("jensen (1/4,3/4) cube = 21/64 (both routes)", || {
            let inst = simple(&[(1, 4), (3, 4)], &[(0, 1), (1, 1)]);
            expect_eq(
                "primary",
                jensen(&cube(), &inst).map_err(|e| e.to_string())?,
                rat(21, 64),
            )?;
            expect_eq(
                "reference",
                oracle::brute_jensen(&cube(), &inst).map_err(|e| e.to_string())?,
                rat(21, 64),
            )
        }),
        ("generalized jensen k=2 = 3/16 (both routes)", || {
            let g = worked_general();
            expect_eq(
                "primary",
                generalized_jensen(&cube(), &g, WeightFamily::P, DEFAULT_ENUM_CAP)
                    .map_err(|e| e.to_string())?,
                rat(3, 16),
            )?;
            expect_eq(
                "reference",
                oracle::brute_generalized_jensen(&cube(), &g, WeightFamily::P, DEFAULT_ENUM_CAP)
                    .map_err(|e| e.to_string())?,
                rat(3, 16),
            )
        }),
        ("merged tensor atoms {(1/4,0),(1/2,1/2),(1/4,1)}", || {
            let d = tensor_distribution(&worked_general(), WeightFamily::P, true, DEFAULT_ENUM_CAP)
                .map_err(|e| e.to_string())?;
            let atoms: Vec<(Rat, Rat)> = d
                .atoms()
                .iter()
                .map(|a| (a.weight.clone(), a.value.clone()))
                .collect();
            expect_eq(
                "atoms",
                atoms,
                vec![
                    (rat(1, 4), rat(0, 1)),
                    (rat(1, 2), rat(1, 2)),
                    (rat(1, 4), rat(1, 1)),
                ],
            )
        }),
        ("def2 rhs forms: 5/16, 3/8, alt 5/16", || {
            let inst = simple(&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]);
            expect_eq(
                "rhs c=3/4",
                def2_rhs(&cube(), &rat(3, 4), &inst).map_err(|e| e.to_string())?,
                rat(5, 16),
            )?;
            expect_eq(
                "rhs c=1",
                def2_rhs(&cube(), &rat(1, 1), &inst).map_err(|e| e.to_string())?,
                rat(3, 8),
            )?;
            expect_eq(
                "alt c=3/4",
                def2_rhs_alt(&cube(), &rat(3, 4), &inst).map_err(|e| e.to_string())?,
                rat(5, 16),
            )
        }),
        ("def2 slack at (1/2,1): -3/256 and 0 (both routes)", || {
            let inst = simple(&[(1, 2), (1, 2)], &[(1, 2), (1, 1)]);
            let report = check_def2(
                &cube(),
                &inst,
                Direction::Super,
                &CertSource::Value(rat(27, 16)),
                None,
            )
            .map_err(|e| e.to_string())?;
            expect_eq("primary slack", report.slack, rat(-3, 256))?;
            expect_eq(
                "reference slack",
                oracle::def2_slack(&cube(), &rat(27, 16), &inst).map_err(|e| e.to_string())?,
                rat(-3, 256),
            )?;
            expect_eq(
                "sharp slack",
                oracle::def2_slack(&cube(), &rat(3, 2), &inst).map_err(|e| e.to_string())?,
                rat(0, 1),
            )
        }),
        ("lemma5 rhs c=1 = 3/16; slack c=1/2 = 1/16", || {
            let g = worked_general();
            expect_eq(
                "rhs",
                lemma5_rhs(&cube(), &rat(1, 1), &g, DEFAULT_ENUM_CAP)
                    .map_err(|e| e.to_string())?,
                rat(3, 16),
            )?;
            expect_eq(
                "reference slack",
                oracle::lemma5_slack(&cube(), &rat(1, 2), &g, DEFAULT_ENUM_CAP)
                    .map_err(|e| e.to_string())?,
                rat(1, 16),
            )
        }),
        ("thresholds: 1 and 3/2 (both routes)", || {
            let f = cube();
            let a = simple(&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]);
            let b = simple(&[(1, 2), (1, 2)], &[(1, 2), (1, 1)]);
            expect_eq(
                "primary a",
                feasibility_threshold(&f, &a).map_err(|e| e.to_string())?,
                Threshold::Finite(rat(1, 1)),
            )?;
            expect_eq(
                "primary b",
                feasibility_threshold(&f, &b).map_err(|e| e.to_string())?,
                Threshold::Finite(rat(3, 2)),
            )?;
            expect_eq(
                "reference b",
                oracle::threshold(&f, &b).map_err(|e| e.to_string())?,
                Threshold::Finite(rat(3, 2)),
            )
        }),
        ("ratio extrema (1/2,1/2)/(1/4,3/4) = (2/3, 2)", || {
            let g = worked_k1();
            let e = ratio_extrema(&g).map_err(|e| e.to_string())?;
            expect_eq("m", e.min_ratio.clone(), rat(2, 3))?;
            expect_eq("M", e.max_ratio.clone(), rat(2, 1))?;
            let brute = oracle::brute_ratio_extrema(&g).map_err(|e| e.to_string())?;
            expect_eq("brute m", brute.min_ratio, e.min_ratio)?;
            expect_eq("brute M", brute.max_ratio, e.max_ratio)
        }),
        ("two-block extrema (3/10,7/10)/(1/2,1/2) = (9/25, 49/25)", || {
            let g = replicate_instance(
                &weights(&[(3, 10), (7, 10)]),
                &points(&[(0, 1), (1, 1)]),
                &weights(&[(1, 2), (1, 2)]),
                Some(&weights(&[(1, 2), (1, 2)])),
            )
            .map_err(|e| e.to_string())?;
            let e = ratio_extrema(&g).map_err(|e| e.to_string())?;
            expect_eq("m", e.min_ratio, rat(9, 25))?;
            expect_eq("M", e.max_ratio, rat(49, 25))
        }),
        ("replicated k=2 extrema = (4/9, 4)", || {
            let g = replicate_instance(
                &weights(&[(1, 2), (1, 2)]),
                &points(&[(0, 1), (1, 1)]),
                &weights(&[(1, 2), (1, 2)]),
                Some(&weights(&[(1, 4), (3, 4)])),
            )
            .map_err(|e| e.to_string())?;
            let e = ratio_extrema(&g).map_err(|e| e.to_string())?;
            expect_eq("m", e.min_ratio, rat(4, 9))?;
            expect_eq("M", e.max_ratio, rat(4, 1))
        }),
        ("two-sided lower: lhs 5/32, rhs 1/8, slack 1/32 (both routes)", || {
            let g = worked_k1();
            let report =
                theorem6_lower_check(&cube(), &g, &CertSource::Model, None, DEFAULT_ENUM_CAP)
                    .map_err(|e| e.to_string())?;
            expect_eq("lhs", report.lhs, rat(5, 32))?;
            expect_eq("rhs", report.rhs, rat(1, 8))?;
            expect_eq("slack", report.slack, rat(1, 32))?;
            expect_eq(
                "reference slack",
                oracle::thm6_lower_slack(&cube(), &rat(3, 4), &g, DEFAULT_ENUM_CAP)
                    .map_err(|e| e.to_string())?,
                rat(1, 32),
            )
        }),
        ("two-sided upper: slack 0 at C=3/2, -3/128 at C=27/16 (both routes)", || {
            let g = worked_k1();
            let report = theorem6_upper_check(
                &cube(),
                &g,
                &CertSource::Value(rat(3, 2)),
                None,
                DEFAULT_ENUM_CAP,
            )
            .map_err(|e| e.to_string())?;
            expect_eq("lhs", report.lhs.clone(), rat(9, 32))?;
            expect_eq("slack", report.slack, rat(0, 1))?;
            let report =
                theorem6_upper_check(&cube(), &g, &CertSource::Model, None, DEFAULT_ENUM_CAP)
                    .map_err(|e| e.to_string())?;
            expect_eq("infeasible slack", report.slack, rat(-3, 128))?;
            expect_eq(
                "reference slack",
                oracle::thm6_upper_slack(&cube(), &rat(27, 16), &g, DEFAULT_ENUM_CAP)
                    .map_err(|e| e.to_string())?,
                rat(-3, 128),
            )
        }),
        ("single-block checks: slack 1/32 lower, 0 upper", || {
            let p = weights(&[(1, 2), (1, 2)]);
            let r = weights(&[(1, 4), (3, 4)]);
            let x = points(&[(0, 1), (1, 1)]);
            let report = corollary8_check(
                &cube(),
                &x,
                &p,
                &r,
                Side::Lower,
                &CertSource::Model,
                None,
            )
            .map_err(|e| e.to_string())?;
            expect_eq("lower slack", report.slack, rat(1, 32))?;
            let report = corollary8_check(
                &cube(),
                &x,
                &p,
                &r,
                Side::Upper,
                &CertSource::Value(rat(3, 2)),
                None,
            )
            .map_err(|e| e.to_string())?;
            expect_eq("upper slack", report.slack, rat(0, 1))
        }),
    ]
}

/// Run the whole pinned table; the process exit code is 0 iff every entry
/// reproduces bit-exactly.
pub fn run_selftest() -> Vec<SelftestResult> {
    checks()
        .into_iter()
        .map(|(name, run)| match run() {
            Ok(()) => SelftestResult {
                name,
                passed: true,
                detail: String::new(),
            },
            Err(detail) => SelftestResult {
                name,
                passed: false,
                detail,
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes() {
        let results = run_selftest();
        assert!(!results.is_empty());
        for r in &results {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }

    #[test]
    fn selftest_is_fast() {
        let start = std::time::Instant::now();
        let _ = run_selftest();
        assert!(start.elapsed() < std::time::Duration::from_secs(5));
    }
}
