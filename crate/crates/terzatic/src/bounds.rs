//! Two-sided bounds relating the Jensen gaps of two weight families: the
//! extreme ratios m and M of the tensor weights, the lower and upper
//! inequality checks they induce, replicated-block instances, and the
//! direct single-block specialization.

use crate::check::bracket;
use crate::error::{Error, Result};
use crate::function::FunctionModel;
use crate::functional::{generalized_jensen, jensen};
use crate::instance::{
    multi_indices, GeneralInstance, MultiIndex, PointVector, SimpleInstance, WeightFamily, Weights,
};
use crate::report::{CertSource, CheckReport, Direction};
use crate::scalar::Scalar;

/// Extrema of prod p_{i j_i} / prod r_{i j_i} over all multi-indices,
/// with witnessing indices. Both tensor families sum to 1 over the same
/// index set, so min <= 1 <= max always.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioExtrema<S: Scalar> {
    pub min_ratio: S,
    pub max_ratio: S,
    pub argmin: MultiIndex,
    pub argmax: MultiIndex,
}

/// Which of the two inequalities to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

/// The ratio of products factors over blocks, so the extrema are products
/// of per-block extrema; ties break toward the smallest index.
pub fn ratio_extrema<S: Scalar>(ginst: &GeneralInstance<S>) -> Result<RatioExtrema<S>> {
    if !ginst.has_r_family() {
        return Err(Error::MissingRFamily);
    }
    let mut min_ratio = S::one();
    let mut max_ratio = S::one();
    let mut argmin = Vec::with_capacity(ginst.block_count());
    let mut argmax = Vec::with_capacity(ginst.block_count());
    for i in 0..ginst.block_count() {
        let p = ginst.family_weights(WeightFamily::P, i)?;
        let r = ginst.family_weights(WeightFamily::R, i)?;
        let mut block_min: Option<(S, usize)> = None;
        let mut block_max: Option<(S, usize)> = None;
        for j in 0..p.len() {
            let ratio = p.get(j).clone() / r.get(j).clone();
            match &block_min {
                Some((current, _)) if ratio >= *current => {}
                _ => block_min = Some((ratio.clone(), j + 1)),
            }
            match &block_max {
                Some((current, _)) if ratio <= *current => {}
                _ => block_max = Some((ratio, j + 1)),
            }
        }
        let (lo, lo_j) = block_min.expect("nonempty block");
        let (hi, hi_j) = block_max.expect("nonempty block");
        min_ratio = min_ratio * lo;
        max_ratio = max_ratio * hi;
        argmin.push(lo_j);
        argmax.push(hi_j);
    }
    Ok(RatioExtrema {
        min_ratio,
        max_ratio,
        argmin: MultiIndex::new(argmin),
        argmax: MultiIndex::new(argmax),
    })
}

/// (tensor p-weight, tensor r-weight, mixed point) per multi-index.
fn tensor_triples<S: Scalar>(
    ginst: &GeneralInstance<S>,
    cap: u64,
) -> Result<Vec<(S, S, S)>> {
    let dims = ginst.dims();
    let q = ginst.outer_weights();
    let mut triples = Vec::new();
    for idx in multi_indices(&dims, cap)? {
        let mut wp = S::one();
        let mut wr = S::one();
        for i in 0..dims.len() {
            let j = idx.zero_based(i);
            wp = wp * ginst.family_weight(WeightFamily::P, i, j)?.clone();
            wr = wr * ginst.family_weight(WeightFamily::R, i, j)?.clone();
        }
        let value = S::sum_terms(
            (0..dims.len())
                .map(|i| q.get(i).clone() * ginst.block(i).points().get(idx.zero_based(i)).clone()),
        );
        triples.push((wp, wr, value));
    }
    Ok(triples)
}

/// sum_i q_i sum_j (r_ij - p_ij) x_ij, the literal nested form of the
/// barycenter difference; retained to cross-check the compact form.
fn family_diff_mean<S: Scalar>(ginst: &GeneralInstance<S>) -> Result<S> {
    let q = ginst.outer_weights();
    let mut outer = Vec::with_capacity(ginst.block_count());
    for i in 0..ginst.block_count() {
        let p = ginst.family_weights(WeightFamily::P, i)?;
        let r = ginst.family_weights(WeightFamily::R, i)?;
        let inner = S::sum_terms(
            (0..p.len()).map(|j| {
                (r.get(j).clone() - p.get(j).clone()) * ginst.block(i).points().get(j).clone()
            }),
        );
        outer.push(q.get(i).clone() * inner);
    }
    Ok(S::sum_terms(outer))
}

#[cfg(debug_assertions)]
fn assert_diff_identity<S: Scalar>(ginst: &GeneralInstance<S>, compact: &S) {
    if let Ok(literal) = family_diff_mean(ginst) {
        if S::EXACT {
            debug_assert!(literal == *compact, "barycenter difference identity");
        } else {
            debug_assert!(
                (literal.clone() - compact.clone()).abs().to_f64()
                    <= 1e-9 * compact.abs().to_f64().max(1.0),
                "barycenter difference identity"
            );
        }
    }
}

/// Lower check: J(p) - m J(r) against the tensor sum with coefficients
/// (prod p - m prod r) plus the collapsed remainder term at the
/// r-barycenter. The certificate is evaluated at the p-barycenter.
pub fn theorem6_lower_check<S: Scalar>(
    f: &FunctionModel<S>,
    ginst: &GeneralInstance<S>,
    cert: &CertSource<S>,
    rel_tol: Option<f64>,
    cap: u64,
) -> Result<CheckReport<S>> {
    let extrema = ratio_extrema(ginst)?;
    let p_mean = ginst.barycenter(WeightFamily::P)?;
    let r_mean = ginst.barycenter(WeightFamily::R)?;
    let c = cert.resolve(f, &p_mean)?;

    let gap_p = generalized_jensen(f, ginst, WeightFamily::P, cap)?;
    let gap_r = generalized_jensen(f, ginst, WeightFamily::R, cap)?;
    let lhs = gap_p - extrema.min_ratio.clone() * gap_r;

    #[cfg(debug_assertions)]
    assert_diff_identity(ginst, &(r_mean.clone() - p_mean.clone()));

    let m = &extrema.min_ratio;
    let triples = tensor_triples(ginst, cap)?;
    let mut terms = Vec::with_capacity(triples.len());
    for (wp, wr, value) in &triples {
        let coeff = wp.clone() - m.clone() * wr.clone();
        terms.push(coeff * value.clone() * bracket(f, &c, value, &p_mean)?);
    }
    let tensor_sum = S::sum_terms(terms);
    let remainder = m.clone() * r_mean.clone() * bracket(f, &c, &r_mean, &p_mean)?;
    let rhs = tensor_sum + remainder;

    Ok(CheckReport::build(
        lhs,
        rhs,
        Direction::Super,
        rel_tol,
        c,
        p_mean,
        Some(r_mean),
        ginst.all_points_equal(),
    ))
}

/// Upper check: M J(r) - J(p) against the tensor sum with coefficients
/// (M prod r - prod p) plus the collapsed remainder term at the
/// p-barycenter. The certificate is evaluated at the r-barycenter.
pub fn theorem6_upper_check<S: Scalar>(
    f: &FunctionModel<S>,
    ginst: &GeneralInstance<S>,
    cert: &CertSource<S>,
    rel_tol: Option<f64>,
    cap: u64,
) -> Result<CheckReport<S>> {
    let extrema = ratio_extrema(ginst)?;
    let p_mean = ginst.barycenter(WeightFamily::P)?;
    let r_mean = ginst.barycenter(WeightFamily::R)?;
    let c = cert.resolve(f, &r_mean)?;

    let gap_p = generalized_jensen(f, ginst, WeightFamily::P, cap)?;
    let gap_r = generalized_jensen(f, ginst, WeightFamily::R, cap)?;
    let lhs = extrema.max_ratio.clone() * gap_r - gap_p;

    #[cfg(debug_assertions)]
    assert_diff_identity(ginst, &(r_mean.clone() - p_mean.clone()));

    let big_m = &extrema.max_ratio;
    let triples = tensor_triples(ginst, cap)?;
    let mut terms = Vec::with_capacity(triples.len());
    for (wp, wr, value) in &triples {
        let coeff = big_m.clone() * wr.clone() - wp.clone();
        terms.push(coeff * value.clone() * bracket(f, &c, value, &r_mean)?);
    }
    let tensor_sum = S::sum_terms(terms);
    let remainder = p_mean.clone() * bracket(f, &c, &p_mean, &r_mean)?;
    let rhs = tensor_sum + remainder;

    Ok(CheckReport::build(
        lhs,
        rhs,
        Direction::Super,
        rel_tol,
        c,
        p_mean,
        Some(r_mean),
        ginst.all_points_equal(),
    ))
}

/// k identical blocks (p, x) under outer weights q, optionally with the
/// same r in every block. The ratio extrema of the result are the k-th
/// powers of the single-block extrema.
pub fn replicate_instance<S: Scalar>(
    p: &Weights<S>,
    x: &PointVector<S>,
    q: &Weights<S>,
    r: Option<&Weights<S>>,
) -> Result<GeneralInstance<S>> {
    let block = SimpleInstance::new(p.clone(), x.clone())?;
    let k = q.len();
    let blocks = vec![block; k];
    let r_blocks = r.map(|r| vec![r.clone(); k]);
    GeneralInstance::new(q.clone(), blocks, r_blocks)
}

/// Single-block specialization evaluated directly (no tensor
/// enumeration): per-point coefficients (p_i - m r_i) or (M r_i - p_i)
/// plus the collapsed remainder term.
pub fn corollary8_check<S: Scalar>(
    f: &FunctionModel<S>,
    x: &PointVector<S>,
    p: &Weights<S>,
    r: &Weights<S>,
    side: Side,
    cert: &CertSource<S>,
    rel_tol: Option<f64>,
) -> Result<CheckReport<S>> {
    if p.len() != r.len() {
        return Err(Error::LengthMismatch {
            context: "p vs r",
            left: p.len(),
            right: r.len(),
        });
    }
    let p_inst = SimpleInstance::new(p.clone(), x.clone())?;
    let r_inst = SimpleInstance::new(r.clone(), x.clone())?;
    let p_mean = p_inst.barycenter();
    let r_mean = r_inst.barycenter();
    let gap_p = jensen(f, &p_inst)?;
    let gap_r = jensen(f, &r_inst)?;

    let mut min_ratio: Option<S> = None;
    let mut max_ratio: Option<S> = None;
    for j in 0..p.len() {
        let ratio = p.get(j).clone() / r.get(j).clone();
        if min_ratio.as_ref().map_or(true, |m| ratio < *m) {
            min_ratio = Some(ratio.clone());
        }
        if max_ratio.as_ref().map_or(true, |m| ratio > *m) {
            max_ratio = Some(ratio);
        }
    }
    let min_ratio = min_ratio.expect("nonempty weights");
    let max_ratio = max_ratio.expect("nonempty weights");

    let (lhs, rhs, c) = match side {
        Side::Lower => {
            let c = cert.resolve(f, &p_mean)?;
            let lhs = gap_p - min_ratio.clone() * gap_r;
            let mut terms = Vec::with_capacity(p.len());
            for j in 0..p.len() {
                let coeff = p.get(j).clone() - min_ratio.clone() * r.get(j).clone();
                let point = x.get(j);
                terms.push(coeff * point.clone() * bracket(f, &c, point, &p_mean)?);
            }
            let rhs = S::sum_terms(terms)
                + min_ratio * r_mean.clone() * bracket(f, &c, &r_mean, &p_mean)?;
            (lhs, rhs, c)
        }
        Side::Upper => {
            let c = cert.resolve(f, &r_mean)?;
            let lhs = max_ratio.clone() * gap_r - gap_p;
            let mut terms = Vec::with_capacity(p.len());
            for j in 0..p.len() {
                let coeff = max_ratio.clone() * r.get(j).clone() - p.get(j).clone();
                let point = x.get(j);
                terms.push(coeff * point.clone() * bracket(f, &c, point, &r_mean)?);
            }
            let rhs =
                S::sum_terms(terms) + p_mean.clone() * bracket(f, &c, &p_mean, &r_mean)?;
            (lhs, rhs, c)
        }
    };

    Ok(CheckReport::build(
        lhs,
        rhs,
        Direction::Super,
        rel_tol,
        c,
        p_mean,
        Some(r_mean),
        x.all_equal(),
    ))
}
