//! Reference computations kept deliberately independent of the optimized
//! paths: naive summation (no compensation), function evaluation by
//! repeated multiplication (no Horner, no pow), literal nested-sum forms
//! of the two-sided checks, and full enumeration for the ratio extrema.
//! Instantiated at the rational scalar these are bit-exact oracles.

use crate::bounds::RatioExtrema;
use crate::error::{Error, Result};
use crate::function::{Family, FunctionModel};
use crate::instance::{GeneralInstance, MultiIndex, SimpleInstance, WeightFamily, BRUTE_CAP};
use crate::report::Threshold;
use crate::scalar::{Rat, Scalar};

/// Function evaluation by repeated multiplication. Rejects families that
/// have no closed arithmetic form (cube_log, fractional powers).
fn eval_reference<S: Scalar>(f: &FunctionModel<S>, x: &S) -> Result<S> {
    if *x < S::zero() {
        return Err(Error::NegativeFunctionInput(x.render()));
    }
    match f.family() {
        Family::Power { exponent } => {
            let p = exponent.to_integer().ok_or(Error::ExactUnsupported {
                family: "power with non-integer exponent",
            })?;
            let mut out = S::one();
            for _ in 0..p {
                out = out * x.clone();
            }
            Ok(out)
        }
        Family::CubeLog => Err(Error::ExactUnsupported { family: "cube_log" }),
        Family::Polynomial(poly) => {
            let mut out = S::zero();
            let mut power = S::one();
            for c in poly.coeffs() {
                out = out + c.clone() * power.clone();
                power = power * x.clone();
            }
            Ok(out)
        }
        Family::LinearCombination(members) => {
            let mut out = S::zero();
            for (scale, member) in members {
                out = out + scale.clone() * eval_reference(member, x)?;
            }
            Ok(out)
        }
    }
}

fn quotient_reference<S: Scalar>(f: &FunctionModel<S>, d: &S) -> Result<S> {
    if d.is_zero() {
        return Ok(S::zero());
    }
    let ad = d.abs();
    Ok(eval_reference(f, &ad)? / ad)
}

fn mean<S: Scalar>(weights: &[S], points: &[S]) -> S {
    let mut out = S::zero();
    for (w, x) in weights.iter().zip(points) {
        out = out + w.clone() * x.clone();
    }
    out
}

/// Plain-loop Jensen gap.
pub fn brute_jensen<S: Scalar>(f: &FunctionModel<S>, inst: &SimpleInstance<S>) -> Result<S> {
    let w = inst.weights().as_slice();
    let x = inst.points().as_slice();
    let center = mean(w, x);
    let mut gap = -eval_reference(f, &center)?;
    for (wi, xi) in w.iter().zip(x) {
        gap = gap + wi.clone() * eval_reference(f, xi)?;
    }
    Ok(gap)
}

/// Odometer over 1-based multi-indices, local to the reference route.
fn enumerate_indices(dims: &[usize], cap: u64) -> Result<Vec<Vec<usize>>> {
    let mut total: u128 = 1;
    for &n in dims {
        total = total.saturating_mul(n as u128);
    }
    if total > cap as u128 {
        return Err(Error::CapExceeded {
            required: total,
            cap,
        });
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut idx = vec![1usize; dims.len()];
    loop {
        out.push(idx.clone());
        let mut pos = dims.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if idx[pos] < dims[pos] {
                idx[pos] += 1;
                idx[pos + 1..].fill(1);
                break;
            }
        }
    }
}

fn tensor_weight<S: Scalar>(
    ginst: &GeneralInstance<S>,
    family: WeightFamily,
    idx: &[usize],
) -> Result<S> {
    let mut w = S::one();
    for (i, &j) in idx.iter().enumerate() {
        w = w * ginst.family_weight(family, i, j - 1)?.clone();
    }
    Ok(w)
}

fn mixed_point<S: Scalar>(ginst: &GeneralInstance<S>, idx: &[usize]) -> S {
    let q = ginst.outer_weights();
    let mut v = S::zero();
    for (i, &j) in idx.iter().enumerate() {
        v = v + q.get(i).clone() * ginst.block(i).points().get(j - 1).clone();
    }
    v
}

fn nested_mean<S: Scalar>(ginst: &GeneralInstance<S>, family: WeightFamily) -> Result<S> {
    let q = ginst.outer_weights();
    let mut out = S::zero();
    for i in 0..ginst.block_count() {
        let w = ginst.family_weights(family, i)?;
        out = out + q.get(i).clone() * mean(w.as_slice(), ginst.block(i).points().as_slice());
    }
    Ok(out)
}

/// Direct unmerged enumeration of the tensor-weighted Jensen gap.
pub fn brute_generalized_jensen<S: Scalar>(
    f: &FunctionModel<S>,
    ginst: &GeneralInstance<S>,
    family: WeightFamily,
    cap: u64,
) -> Result<S> {
    let indices = enumerate_indices(&ginst.dims(), cap)?;
    let mut expectation = S::zero();
    for idx in &indices {
        let w = tensor_weight(ginst, family, idx)?;
        expectation = expectation + w * eval_reference(f, &mixed_point(ginst, idx))?;
    }
    Ok(expectation - eval_reference(f, &nested_mean(ginst, family)?)?)
}

/// Full enumeration of min/max of the tensor-weight ratio, capped at
/// [`BRUTE_CAP`] indices; ties break toward the lexicographically
/// smallest index, which is the enumeration order.
pub fn brute_ratio_extrema<S: Scalar>(ginst: &GeneralInstance<S>) -> Result<RatioExtrema<S>> {
    if !ginst.has_r_family() {
        return Err(Error::MissingRFamily);
    }
    let indices = enumerate_indices(&ginst.dims(), BRUTE_CAP)?;
    let mut min: Option<(S, Vec<usize>)> = None;
    let mut max: Option<(S, Vec<usize>)> = None;
    for idx in &indices {
        let ratio = tensor_weight(ginst, WeightFamily::P, idx)?
            / tensor_weight(ginst, WeightFamily::R, idx)?;
        match &min {
            Some((current, _)) if ratio >= *current => {}
            _ => min = Some((ratio.clone(), idx.clone())),
        }
        match &max {
            Some((current, _)) if ratio <= *current => {}
            _ => max = Some((ratio, idx.clone())),
        }
    }
    let (min_ratio, argmin) = min.expect("nonempty enumeration");
    let (max_ratio, argmax) = max.expect("nonempty enumeration");
    Ok(RatioExtrema {
        min_ratio,
        max_ratio,
        argmin: MultiIndex::new(argmin),
        argmax: MultiIndex::new(argmax),
    })
}

/// Base-inequality slack J - RHS via the literal first display.
pub fn def2_slack<S: Scalar>(
    f: &FunctionModel<S>,
    c: &S,
    inst: &SimpleInstance<S>,
) -> Result<S> {
    let w = inst.weights().as_slice();
    let x = inst.points().as_slice();
    let center = mean(w, x);
    let mut rhs = S::zero();
    for (wi, xi) in w.iter().zip(x) {
        let d = xi.clone() - center.clone();
        let bracket = d.clone() * c.clone() + quotient_reference(f, &d)?;
        rhs = rhs + wi.clone() * xi.clone() * bracket;
    }
    Ok(brute_jensen(f, inst)? - rhs)
}

/// Tensor-inequality slack via literal enumeration.
pub fn lemma5_slack<S: Scalar>(
    f: &FunctionModel<S>,
    c: &S,
    ginst: &GeneralInstance<S>,
    cap: u64,
) -> Result<S> {
    let center = nested_mean(ginst, WeightFamily::P)?;
    let indices = enumerate_indices(&ginst.dims(), cap)?;
    let mut rhs = S::zero();
    for idx in &indices {
        let w = tensor_weight(ginst, WeightFamily::P, idx)?;
        let v = mixed_point(ginst, idx);
        let d = v.clone() - center.clone();
        let bracket = d.clone() * c.clone() + quotient_reference(f, &d)?;
        rhs = rhs + w * v * bracket;
    }
    Ok(brute_generalized_jensen(f, ginst, WeightFamily::P, cap)? - rhs)
}

/// sum_i q_i sum_j (a_ij - b_ij) x_ij for two weight families.
fn family_difference<S: Scalar>(
    ginst: &GeneralInstance<S>,
    a: WeightFamily,
    b: WeightFamily,
) -> Result<S> {
    let q = ginst.outer_weights();
    let mut out = S::zero();
    for i in 0..ginst.block_count() {
        let wa = ginst.family_weights(a, i)?;
        let wb = ginst.family_weights(b, i)?;
        let mut inner = S::zero();
        for j in 0..wa.len() {
            inner = inner
                + (wa.get(j).clone() - wb.get(j).clone()) * ginst.block(i).points().get(j).clone();
        }
        out = out + q.get(i).clone() * inner;
    }
    Ok(out)
}

/// Lower-bound slack via the literal displays, including the literal
/// nested-sum remainder term.
pub fn thm6_lower_slack<S: Scalar>(
    f: &FunctionModel<S>,
    c_at_p_mean: &S,
    ginst: &GeneralInstance<S>,
    cap: u64,
) -> Result<S> {
    let extrema = brute_ratio_extrema(ginst)?;
    let m = extrema.min_ratio;
    let p_mean = nested_mean(ginst, WeightFamily::P)?;
    let r_mean = nested_mean(ginst, WeightFamily::R)?;

    let lhs = brute_generalized_jensen(f, ginst, WeightFamily::P, cap)?
        - m.clone() * brute_generalized_jensen(f, ginst, WeightFamily::R, cap)?;

    let indices = enumerate_indices(&ginst.dims(), cap)?;
    let mut tensor_sum = S::zero();
    for idx in &indices {
        let wp = tensor_weight(ginst, WeightFamily::P, idx)?;
        let wr = tensor_weight(ginst, WeightFamily::R, idx)?;
        let v = mixed_point(ginst, idx);
        let d = v.clone() - p_mean.clone();
        let bracket = d.clone() * c_at_p_mean.clone() + quotient_reference(f, &d)?;
        tensor_sum = tensor_sum + (wp - m.clone() * wr) * v * bracket;
    }
    let diff = family_difference(ginst, WeightFamily::R, WeightFamily::P)?;
    let remainder_bracket =
        diff.clone() * c_at_p_mean.clone() + quotient_reference(f, &diff)?;
    let rhs = tensor_sum + m * r_mean * remainder_bracket;
    Ok(lhs - rhs)
}

/// Upper-bound slack via the literal displays.
pub fn thm6_upper_slack<S: Scalar>(
    f: &FunctionModel<S>,
    c_at_r_mean: &S,
    ginst: &GeneralInstance<S>,
    cap: u64,
) -> Result<S> {
    let extrema = brute_ratio_extrema(ginst)?;
    let big_m = extrema.max_ratio;
    let p_mean = nested_mean(ginst, WeightFamily::P)?;
    let r_mean = nested_mean(ginst, WeightFamily::R)?;

    let lhs = big_m.clone() * brute_generalized_jensen(f, ginst, WeightFamily::R, cap)?
        - brute_generalized_jensen(f, ginst, WeightFamily::P, cap)?;

    let indices = enumerate_indices(&ginst.dims(), cap)?;
    let mut tensor_sum = S::zero();
    for idx in &indices {
        let wp = tensor_weight(ginst, WeightFamily::P, idx)?;
        let wr = tensor_weight(ginst, WeightFamily::R, idx)?;
        let v = mixed_point(ginst, idx);
        let d = v.clone() - r_mean.clone();
        let bracket = d.clone() * c_at_r_mean.clone() + quotient_reference(f, &d)?;
        tensor_sum = tensor_sum + (big_m.clone() * wr - wp) * v * bracket;
    }
    let diff = family_difference(ginst, WeightFamily::P, WeightFamily::R)?;
    let remainder_bracket =
        diff.clone() * c_at_r_mean.clone() + quotient_reference(f, &diff)?;
    let rhs = tensor_sum + p_mean * remainder_bracket;
    Ok(lhs - rhs)
}

/// Brute-force feasibility threshold (J - B)/A.
pub fn threshold<S: Scalar>(
    f: &FunctionModel<S>,
    inst: &SimpleInstance<S>,
) -> Result<Threshold<S>> {
    let w = inst.weights().as_slice();
    let x = inst.points().as_slice();
    let center = mean(w, x);
    let mut quad = S::zero();
    let mut cross = S::zero();
    for (wi, xi) in w.iter().zip(x) {
        let d = xi.clone() - center.clone();
        quad = quad + wi.clone() * d.clone() * d.clone();
        cross = cross + wi.clone() * xi.clone() * quotient_reference(f, &d)?;
    }
    if quad.is_zero() {
        return Ok(Threshold::Unbounded);
    }
    Ok(Threshold::Finite((brute_jensen(f, inst)? - cross) / quad))
}

/// A reference request evaluated end-to-end in exact rational arithmetic.
pub enum ExactCheck<'a> {
    Jensen {
        f: &'a FunctionModel<Rat>,
        inst: &'a SimpleInstance<Rat>,
    },
    GeneralizedJensen {
        f: &'a FunctionModel<Rat>,
        ginst: &'a GeneralInstance<Rat>,
        family: WeightFamily,
    },
    Def2Slack {
        f: &'a FunctionModel<Rat>,
        c: Rat,
        inst: &'a SimpleInstance<Rat>,
    },
    Lemma5Slack {
        f: &'a FunctionModel<Rat>,
        c: Rat,
        ginst: &'a GeneralInstance<Rat>,
    },
    Thm6LowerSlack {
        f: &'a FunctionModel<Rat>,
        c: Rat,
        ginst: &'a GeneralInstance<Rat>,
    },
    Thm6UpperSlack {
        f: &'a FunctionModel<Rat>,
        c: Rat,
        ginst: &'a GeneralInstance<Rat>,
    },
    Threshold {
        f: &'a FunctionModel<Rat>,
        inst: &'a SimpleInstance<Rat>,
    },
    RatioExtrema {
        ginst: &'a GeneralInstance<Rat>,
    },
}

pub enum ExactValue {
    Scalar(Rat),
    Threshold(Threshold<Rat>),
    Extrema(RatioExtrema<Rat>),
}

impl ExactValue {
    pub fn scalar(&self) -> Option<&Rat> {
        match self {
            ExactValue::Scalar(v) => Some(v),
            _ => None,
        }
    }
}

/// Evaluate one reference check bit-exactly. The enumeration cap for
/// tensor sums is [`BRUTE_CAP`].
pub fn exact_evaluate(check: &ExactCheck) -> Result<ExactValue> {
    match check {
        ExactCheck::Jensen { f, inst } => Ok(ExactValue::Scalar(brute_jensen(f, inst)?)),
        ExactCheck::GeneralizedJensen { f, ginst, family } => Ok(ExactValue::Scalar(
            brute_generalized_jensen(f, ginst, *family, BRUTE_CAP)?,
        )),
        ExactCheck::Def2Slack { f, c, inst } => {
            Ok(ExactValue::Scalar(def2_slack(f, c, inst)?))
        }
        ExactCheck::Lemma5Slack { f, c, ginst } => {
            Ok(ExactValue::Scalar(lemma5_slack(f, c, ginst, BRUTE_CAP)?))
        }
        ExactCheck::Thm6LowerSlack { f, c, ginst } => Ok(ExactValue::Scalar(thm6_lower_slack(
            f, c, ginst, BRUTE_CAP,
        )?)),
        ExactCheck::Thm6UpperSlack { f, c, ginst } => Ok(ExactValue::Scalar(thm6_upper_slack(
            f, c, ginst, BRUTE_CAP,
        )?)),
        ExactCheck::Threshold { f, inst } => Ok(ExactValue::Threshold(threshold(f, inst)?)),
        ExactCheck::RatioExtrema { ginst } => {
            Ok(ExactValue::Extrema(brute_ratio_extrema(ginst)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{PointVector, Weights};

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    fn rats(values: &[(i64, i64)]) -> Vec<Rat> {
        values.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    fn cube() -> FunctionModel<Rat> {
        FunctionModel::power(rat(3, 1)).unwrap()
    }

    fn simple(p: &[(i64, i64)], x: &[(i64, i64)]) -> SimpleInstance<Rat> {
        SimpleInstance::new(
            Weights::new(rats(p)).unwrap(),
            PointVector::new(rats(x), rat(1, 1)).unwrap(),
        )
        .unwrap()
    }

    fn worked_k1() -> GeneralInstance<Rat> {
        crate::bounds::replicate_instance(
            &Weights::new(rats(&[(1, 2), (1, 2)])).unwrap(),
            &PointVector::new(rats(&[(0, 1), (1, 1)]), rat(1, 1)).unwrap(),
            &Weights::new(rats(&[(1, 1)])).unwrap(),
            Some(&Weights::new(rats(&[(1, 4), (3, 4)])).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn reference_jensen_pinned() {
        assert_eq!(
            brute_jensen(&cube(), &simple(&[(1, 2), (1, 2)], &[(0, 1), (1, 1)])).unwrap(),
            rat(3, 8)
        );
    }

    #[test]
    fn reference_rejects_transcendental_families() {
        let g: FunctionModel<Rat> = FunctionModel::cube_log();
        let inst = simple(&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]);
        assert!(matches!(
            brute_jensen(&g, &inst),
            Err(Error::ExactUnsupported { .. })
        ));
    }

    #[test]
    fn reference_thm6_slacks_pinned() {
        let g = worked_k1();
        assert_eq!(
            thm6_lower_slack(&cube(), &rat(3, 4), &g, BRUTE_CAP).unwrap(),
            rat(1, 32)
        );
        assert_eq!(
            thm6_upper_slack(&cube(), &rat(27, 16), &g, BRUTE_CAP).unwrap(),
            rat(-3, 128)
        );
        assert_eq!(
            thm6_upper_slack(&cube(), &rat(3, 2), &g, BRUTE_CAP).unwrap(),
            rat(0, 1)
        );
    }

    #[test]
    fn reference_def2_slack_pinned() {
        let inst = simple(&[(1, 2), (1, 2)], &[(1, 2), (1, 1)]);
        assert_eq!(
            def2_slack(&cube(), &rat(27, 16), &inst).unwrap(),
            rat(-3, 256)
        );
        assert_eq!(def2_slack(&cube(), &rat(3, 2), &inst).unwrap(), rat(0, 1));
    }

    #[test]
    fn brute_extrema_pinned_and_capped() {
        let e = brute_ratio_extrema(&worked_k1()).unwrap();
        assert_eq!(e.min_ratio, rat(2, 3));
        assert_eq!(e.max_ratio, rat(2, 1));
        assert_eq!(e.argmin.indices(), &[2]);
        assert_eq!(e.argmax.indices(), &[1]);
    }

    #[test]
    fn exact_evaluate_dispatch() {
        let f = cube();
        let inst = simple(&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]);
        let out = exact_evaluate(&ExactCheck::Jensen { f: &f, inst: &inst }).unwrap();
        assert_eq!(out.scalar(), Some(&rat(3, 8)));

        let out = exact_evaluate(&ExactCheck::Threshold { f: &f, inst: &inst }).unwrap();
        match out {
            ExactValue::Threshold(Threshold::Finite(v)) => assert_eq!(v, rat(1, 1)),
            _ => panic!("expected finite threshold"),
        }
    }
}
