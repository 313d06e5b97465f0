//! Evaluable function models on [0, a]: integer and real powers x^p with
//! p >= 3, the cube-log family x^3 ln(1/x), polynomials, and positive
//! linear combinations. A model optionally carries a polynomial
//! certificate x_bar -> C(x_bar) and a claim tag.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// What the model is claimed to be. Claims are data: checks never trust
/// them, they only pick the default inequality direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Claim {
    Superterzatic,
    Subterzatic,
    Unknown,
}

/// Polynomial c_0 + c_1 t + ... + c_d t^d.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<S: Scalar> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn new(coeffs: Vec<S>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Empty("polynomial coefficients"));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn eval(&self, t: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t.clone() + c.clone();
        }
        acc
    }

    pub fn scale(&self, k: &S) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| k.clone() * c.clone()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for i in 0..len {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(S::zero);
            let b = other.coeffs.get(i).cloned().unwrap_or_else(S::zero);
            coeffs.push(a + b);
        }
        Self { coeffs }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family<S: Scalar> {
    /// x^p for a fixed exponent p >= 3. Non-integer exponents evaluate in
    /// float mode only.
    Power { exponent: S },
    /// x^3 ln(1/x) with value 0 at x = 0. Float mode only.
    CubeLog,
    /// An arbitrary polynomial in x.
    Polynomial(Polynomial<S>),
    /// sum of scale_i * f_i with every scale strictly positive.
    LinearCombination(Vec<(S, FunctionModel<S>)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionModel<S: Scalar> {
    family: Family<S>,
    certificate: Option<Polynomial<S>>,
    claim: Claim,
}

impl<S: Scalar> FunctionModel<S> {
    /// x^p with p >= 3. Integer exponents get the certificate p * t^(p-1)
    /// attached automatically; for fractional exponents that expression is
    /// not a polynomial, so no certificate is derived.
    pub fn power(exponent: S) -> Result<Self> {
        if exponent < S::from_int(3) {
            return Err(Error::ExponentTooSmall(exponent.render()));
        }
        let certificate = exponent.to_integer().map(|p| {
            let mut coeffs = vec![S::zero(); p as usize];
            coeffs[(p - 1) as usize] = exponent.clone();
            Polynomial { coeffs }
        });
        Ok(Self {
            family: Family::Power { exponent },
            certificate,
            claim: Claim::Superterzatic,
        })
    }

    pub fn cube_log() -> Self {
        Self {
            family: Family::CubeLog,
            certificate: None,
            claim: Claim::Subterzatic,
        }
    }

    pub fn polynomial(coeffs: Vec<S>) -> Result<Self> {
        Ok(Self {
            family: Family::Polynomial(Polynomial::new(coeffs)?),
            certificate: None,
            claim: Claim::Unknown,
        })
    }

    /// Positive combination sum scale_i * f_i. The claim is the common
    /// claim of the members when they agree, otherwise unknown; when every
    /// member carries a certificate the combination inherits
    /// sum scale_i * C_i.
    pub fn linear_combination(members: Vec<(S, FunctionModel<S>)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Empty("linear combination members"));
        }
        for (scale, _) in &members {
            if *scale <= S::zero() {
                return Err(Error::NonPositiveScale(scale.render()));
            }
        }
        let claim = members
            .iter()
            .map(|(_, f)| f.claim)
            .reduce(|a, b| if a == b { a } else { Claim::Unknown })
            .unwrap_or(Claim::Unknown);
        let mut certificate: Option<Polynomial<S>> = None;
        for (scale, f) in &members {
            match f.certificate.as_ref() {
                Some(c) => {
                    let scaled = c.scale(scale);
                    certificate = Some(match certificate {
                        None => scaled,
                        Some(total) => total.add(&scaled),
                    });
                }
                None => {
                    certificate = None;
                    break;
                }
            }
        }
        Ok(Self {
            family: Family::LinearCombination(members),
            certificate,
            claim,
        })
    }

    pub fn with_certificate(mut self, certificate: Polynomial<S>) -> Self {
        self.certificate = Some(certificate);
        self
    }

    pub fn with_claim(mut self, claim: Claim) -> Self {
        self.claim = claim;
        self
    }

    pub fn family(&self) -> &Family<S> {
        &self.family
    }

    pub fn certificate(&self) -> Option<&Polynomial<S>> {
        self.certificate.as_ref()
    }

    pub fn claim(&self) -> Claim {
        self.claim
    }

    /// Evaluate f at x >= 0.
    pub fn eval(&self, x: &S) -> Result<S> {
        if *x < S::zero() {
            return Err(Error::NegativeFunctionInput(x.render()));
        }
        self.eval_unchecked(x)
    }

    fn eval_unchecked(&self, x: &S) -> Result<S> {
        match &self.family {
            Family::Power { exponent } => match exponent.to_integer() {
                Some(p) => Ok(x.powu(p as u32)),
                None => x.powf(exponent).ok_or(Error::ExactUnsupported {
                    family: "power with non-integer exponent",
                }),
            },
            Family::CubeLog => {
                if x.is_zero() {
                    return Ok(S::zero());
                }
                let ln_x = x.ln().ok_or(Error::ExactUnsupported { family: "cube_log" })?;
                Ok(x.powu(3) * -ln_x)
            }
            Family::Polynomial(p) => Ok(p.eval(x)),
            Family::LinearCombination(members) => {
                let mut terms = Vec::with_capacity(members.len());
                for (scale, f) in members {
                    terms.push(scale.clone() * f.eval_unchecked(x)?);
                }
                Ok(S::sum_terms(terms))
            }
        }
    }

    /// The certificate value C(x_bar), if a certificate is attached.
    pub fn certificate_at(&self, x_bar: &S) -> Result<S> {
        self.certificate
            .as_ref()
            .map(|c| c.eval(x_bar))
            .ok_or(Error::MissingCertificate)
    }
}

impl Polynomial<crate::scalar::Rat> {
    pub fn to_f64(&self) -> Polynomial<f64> {
        Polynomial {
            coeffs: self.coeffs.iter().map(Scalar::to_f64).collect(),
        }
    }
}

impl FunctionModel<crate::scalar::Rat> {
    pub fn to_f64(&self) -> FunctionModel<f64> {
        let family = match &self.family {
            Family::Power { exponent } => Family::Power {
                exponent: exponent.to_f64(),
            },
            Family::CubeLog => Family::CubeLog,
            Family::Polynomial(p) => Family::Polynomial(p.to_f64()),
            Family::LinearCombination(members) => Family::LinearCombination(
                members
                    .iter()
                    .map(|(s, f)| (s.to_f64(), f.to_f64()))
                    .collect(),
            ),
        };
        FunctionModel {
            family,
            certificate: self.certificate.as_ref().map(Polynomial::to_f64),
            claim: self.claim,
        }
    }
}

/// f(|d|)/|d| with the convention that the quotient is 0 at d = 0. The
/// zero branch triggers only on exact zero; all built-in quotients vanish
/// smoothly, so near-zero arguments are computed normally.
pub fn terza_quotient<S: Scalar>(f: &FunctionModel<S>, d: &S) -> Result<S> {
    if d.is_zero() {
        return Ok(S::zero());
    }
    let ad = d.abs();
    Ok(f.eval(&ad)? / ad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    fn cube() -> FunctionModel<Rat> {
        FunctionModel::power(rat(3, 1)).unwrap()
    }

    #[test]
    fn power_evaluates_and_carries_certificate() {
        let f = cube();
        assert_eq!(f.eval(&rat(1, 2)).unwrap(), rat(1, 8));
        assert_eq!(f.eval(&rat(0, 1)).unwrap(), rat(0, 1));
        assert_eq!(f.claim(), Claim::Superterzatic);
        // C(t) = 3 t^2
        assert_eq!(f.certificate_at(&rat(1, 2)).unwrap(), rat(3, 4));
        assert_eq!(f.certificate_at(&rat(3, 4)).unwrap(), rat(27, 16));
    }

    #[test]
    fn power_exponent_must_be_at_least_three() {
        assert!(matches!(
            FunctionModel::power(rat(2, 1)),
            Err(Error::ExponentTooSmall(_))
        ));
        assert!(FunctionModel::power(rat(7, 2)).is_ok());
    }

    #[test]
    fn fractional_power_is_float_only() {
        let f = FunctionModel::power(rat(7, 2)).unwrap();
        assert!(f.certificate().is_none());
        assert!(matches!(
            f.eval(&rat(1, 2)),
            Err(Error::ExactUnsupported { .. })
        ));
        let f = FunctionModel::power(3.5f64).unwrap();
        let v = f.eval(&0.25).unwrap();
        assert!((v - 0.25f64.powf(3.5)).abs() < 1e-18);
    }

    #[test]
    fn cube_log_is_zero_at_zero_and_float_only() {
        let g: FunctionModel<f64> = FunctionModel::cube_log();
        assert_eq!(g.eval(&0.0).unwrap(), 0.0);
        let v = g.eval(&0.5).unwrap();
        assert!((v - 0.125 * (2.0f64).ln()).abs() < 1e-17);
        assert_eq!(g.claim(), Claim::Subterzatic);

        let g: FunctionModel<Rat> = FunctionModel::cube_log();
        assert_eq!(g.eval(&rat(0, 1)).unwrap(), rat(0, 1));
        assert!(matches!(
            g.eval(&rat(1, 2)),
            Err(Error::ExactUnsupported { .. })
        ));
    }

    #[test]
    fn polynomial_eval_matches_horner_expansion() {
        let f = FunctionModel::polynomial(vec![rat(1, 1), rat(0, 1), rat(2, 1)]).unwrap();
        // 1 + 2 x^2 at x = 3/2 -> 1 + 2 * 9/4 = 11/2
        assert_eq!(f.eval(&rat(3, 2)).unwrap(), rat(11, 2));
        assert_eq!(f.claim(), Claim::Unknown);
    }

    #[test]
    fn negative_input_is_rejected() {
        assert!(matches!(
            cube().eval(&rat(-1, 2)),
            Err(Error::NegativeFunctionInput(_))
        ));
    }

    #[test]
    fn linear_combination_combines_values_claims_certificates() {
        let f = FunctionModel::linear_combination(vec![
            (rat(2, 1), FunctionModel::power(rat(3, 1)).unwrap()),
            (rat(1, 1), FunctionModel::power(rat(4, 1)).unwrap()),
        ])
        .unwrap();
        // 2 x^3 + x^4 at 1/2: 2/8 + 1/16 = 5/16
        assert_eq!(f.eval(&rat(1, 2)).unwrap(), rat(5, 16));
        assert_eq!(f.claim(), Claim::Superterzatic);
        // certificate 2*3t^2 + 4t^3 = 6t^2 + 4t^3 at t = 1/2: 3/2 + 1/2 = 2
        assert_eq!(f.certificate_at(&rat(1, 2)).unwrap(), rat(2, 1));

        let mixed = FunctionModel::linear_combination(vec![
            (rat(1, 1), FunctionModel::power(rat(3, 1)).unwrap()),
            (rat(1, 1), FunctionModel::cube_log()),
        ])
        .unwrap();
        assert_eq!(mixed.claim(), Claim::Unknown);
        assert!(mixed.certificate().is_none());

        assert!(matches!(
            FunctionModel::linear_combination(vec![(rat(0, 1), cube())]),
            Err(Error::NonPositiveScale(_))
        ));
        assert!(matches!(
            FunctionModel::<Rat>::linear_combination(vec![]),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn quotient_convention_and_values() {
        let f = cube();
        assert_eq!(terza_quotient(&f, &rat(0, 1)).unwrap(), rat(0, 1));
        assert_eq!(terza_quotient(&f, &rat(1, 2)).unwrap(), rat(1, 4));
        assert_eq!(terza_quotient(&f, &rat(-1, 4)).unwrap(), rat(1, 16));
    }

    #[test]
    fn quotient_vanishes_continuously_at_zero() {
        // Checked at d = 1e-6 and 1e-9 for the built-in families.
        let fams: Vec<FunctionModel<f64>> = vec![
            FunctionModel::power(3.0).unwrap(),
            FunctionModel::power(5.0).unwrap(),
            FunctionModel::cube_log(),
        ];
        for f in fams {
            let big = terza_quotient(&f, &1e-6).unwrap().abs();
            let small = terza_quotient(&f, &1e-9).unwrap().abs();
            assert!(big < 1e-9, "quotient at 1e-6 was {big}");
            assert!(small < big, "no decay: {small} vs {big}");
        }
    }
}
