//! The superterzatic lower-bound inequality on a simple instance, its
//! tensor-weighted form on a general instance, and the per-instance
//! feasibility threshold for the certificate constant.

use crate::error::Result;
use crate::function::{terza_quotient, FunctionModel};
use crate::functional::{generalized_jensen, jensen, tensor_distribution};
use crate::instance::{GeneralInstance, SimpleInstance, WeightFamily};
use crate::report::{CertSource, CheckReport, Direction, Threshold};
use crate::scalar::Scalar;

/// (y - center) * c + f(|y - center|)/|y - center|, the bracket every
/// check multiplies against its weights.
pub(crate) fn bracket<S: Scalar>(
    f: &FunctionModel<S>,
    c: &S,
    y: &S,
    center: &S,
) -> Result<S> {
    let d = y.clone() - center.clone();
    Ok(d.clone() * c.clone() + terza_quotient(f, &d)?)
}

/// sum p_i x_i [(x_i - x_bar) c + f(|x_i - x_bar|)/|x_i - x_bar|].
pub fn def2_rhs<S: Scalar>(f: &FunctionModel<S>, c: &S, inst: &SimpleInstance<S>) -> Result<S> {
    let center = inst.barycenter();
    let mut terms = Vec::with_capacity(inst.len());
    for (w, x) in inst.weights().iter().zip(inst.points().iter()) {
        terms.push(w.clone() * x.clone() * bracket(f, c, x, &center)?);
    }
    Ok(S::sum_terms(terms))
}

/// c * sum p_i (x_i - x_bar)^2 + sum p_i x_i f(|x_i - x_bar|)/|x_i - x_bar|,
/// the expanded form of [`def2_rhs`]; the two agree because the weighted
/// deviations sum to zero.
pub fn def2_rhs_alt<S: Scalar>(f: &FunctionModel<S>, c: &S, inst: &SimpleInstance<S>) -> Result<S> {
    let center = inst.barycenter();
    let quad = quadratic_moment(inst, &center);
    let cross = quotient_moment(f, inst, &center)?;
    Ok(c.clone() * quad + cross)
}

/// sum p_i (x_i - center)^2.
fn quadratic_moment<S: Scalar>(inst: &SimpleInstance<S>, center: &S) -> S {
    S::sum_terms(
        inst.weights()
            .iter()
            .zip(inst.points().iter())
            .map(|(w, x)| {
                let d = x.clone() - center.clone();
                w.clone() * d.clone() * d
            }),
    )
}

/// sum p_i x_i f(|x_i - center|)/|x_i - center|.
fn quotient_moment<S: Scalar>(
    f: &FunctionModel<S>,
    inst: &SimpleInstance<S>,
    center: &S,
) -> Result<S> {
    let mut terms = Vec::with_capacity(inst.len());
    for (w, x) in inst.weights().iter().zip(inst.points().iter()) {
        let d = x.clone() - center.clone();
        terms.push(w.clone() * x.clone() * terza_quotient(f, &d)?);
    }
    Ok(S::sum_terms(terms))
}

/// Check the base inequality J(f, p, x) >= def2_rhs (or <= in the sub
/// direction) with the certificate evaluated at the barycenter.
pub fn check_def2<S: Scalar>(
    f: &FunctionModel<S>,
    inst: &SimpleInstance<S>,
    direction: Direction,
    cert: &CertSource<S>,
    rel_tol: Option<f64>,
) -> Result<CheckReport<S>> {
    let center = inst.barycenter();
    let c = cert.resolve(f, &center)?;
    let lhs = jensen(f, inst)?;
    let rhs = def2_rhs(f, &c, inst)?;
    Ok(CheckReport::build(
        lhs,
        rhs,
        direction,
        rel_tol,
        c,
        center,
        None,
        inst.all_points_equal(),
    ))
}

/// The tensor-weighted right-hand side: the mixed-point expectation of
/// value * bracket against the family's tensor weights.
pub fn lemma5_rhs<S: Scalar>(
    f: &FunctionModel<S>,
    c: &S,
    ginst: &GeneralInstance<S>,
    cap: u64,
) -> Result<S> {
    let center = ginst.barycenter(WeightFamily::P)?;
    let distribution = tensor_distribution(ginst, WeightFamily::P, false, cap)?;
    let mut terms = Vec::with_capacity(distribution.len());
    for atom in distribution.atoms() {
        terms.push(atom.weight.clone() * atom.value.clone() * bracket(f, c, &atom.value, &center)?);
    }
    Ok(S::sum_terms(terms))
}

/// Check the tensor-weighted inequality with LHS the generalized Jensen
/// gap under the p family.
pub fn check_lemma5<S: Scalar>(
    f: &FunctionModel<S>,
    ginst: &GeneralInstance<S>,
    direction: Direction,
    cert: &CertSource<S>,
    rel_tol: Option<f64>,
    cap: u64,
) -> Result<CheckReport<S>> {
    let center = ginst.barycenter(WeightFamily::P)?;
    let c = cert.resolve(f, &center)?;
    let lhs = generalized_jensen(f, ginst, WeightFamily::P, cap)?;
    let rhs = lemma5_rhs(f, &c, ginst, cap)?;
    Ok(CheckReport::build(
        lhs,
        rhs,
        direction,
        rel_tol,
        c,
        center,
        None,
        ginst.all_points_equal(),
    ))
}

/// The RHS is affine in the constant: RHS(C) = A*C + B with
/// A = sum p_i (x_i - x_bar)^2 and B the quotient moment, so the base
/// inequality holds at this instance iff C <= (J - B)/A. When A = 0 every
/// constant is feasible.
pub fn feasibility_threshold<S: Scalar>(
    f: &FunctionModel<S>,
    inst: &SimpleInstance<S>,
) -> Result<Threshold<S>> {
    let center = inst.barycenter();
    let quad = quadratic_moment(inst, &center);
    if quad.is_zero() {
        return Ok(Threshold::Unbounded);
    }
    let j = jensen(f, inst)?;
    let cross = quotient_moment(f, inst, &center)?;
    Ok(Threshold::Finite((j - cross) / quad))
}
