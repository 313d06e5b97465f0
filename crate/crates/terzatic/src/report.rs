//! Check outcomes: verdicts, directions, certificate sources, and the
//! report record shared by every inequality check.

use crate::error::{Error, Result};
use crate::function::FunctionModel;
use crate::scalar::{verdict_tolerance, Scalar};

/// Which way the inequality is read. `Super` means LHS >= RHS must hold,
/// `Sub` reverses it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Super,
    Sub,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Super => "super",
            Direction::Sub => "sub",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    /// All points of the instance coincide, so both sides vanish and the
    /// check carries no information.
    Degenerate,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Degenerate => "degenerate",
        }
    }
}

/// Where the certificate constant comes from: the model's attached
/// polynomial, an explicit override value, or an arbitrary evaluator.
pub enum CertSource<'a, S: Scalar> {
    Model,
    Value(S),
    Eval(&'a dyn Fn(&S) -> S),
}

impl<'a, S: Scalar> CertSource<'a, S> {
    /// Resolve the constant at the evaluation point prescribed by the
    /// check (the p-barycenter for lower-type checks, the r-barycenter
    /// for upper-type checks).
    pub fn resolve(&self, f: &FunctionModel<S>, at: &S) -> Result<S> {
        match self {
            CertSource::Model => f.certificate_at(at),
            CertSource::Value(c) => Ok(c.clone()),
            CertSource::Eval(eval) => Ok(eval(at)),
        }
    }
}

/// Outcome of one inequality check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport<S: Scalar> {
    pub lhs: S,
    pub rhs: S,
    /// lhs - rhs for the super direction, rhs - lhs for sub.
    pub slack: S,
    pub verdict: Verdict,
    pub tolerance: S,
    pub c_used: S,
    /// The p-family barycenter.
    pub barycenter: S,
    /// The r-family barycenter, for the two-family checks.
    pub r_barycenter: Option<S>,
    pub direction: Direction,
}

impl<S: Scalar> CheckReport<S> {
    /// Assemble a report: slack per direction, tolerance per mode, verdict
    /// by `slack >= -tolerance` unless the instance was degenerate.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn build(
        lhs: S,
        rhs: S,
        direction: Direction,
        rel_tol: Option<f64>,
        c_used: S,
        barycenter: S,
        r_barycenter: Option<S>,
        degenerate: bool,
    ) -> Self {
        let slack = match direction {
            Direction::Super => lhs.clone() - rhs.clone(),
            Direction::Sub => rhs.clone() - lhs.clone(),
        };
        let tolerance = verdict_tolerance(&lhs, &rhs, rel_tol);
        let verdict = if degenerate {
            Verdict::Degenerate
        } else if slack >= -tolerance.clone() {
            Verdict::Holds
        } else {
            Verdict::Violated
        };
        Self {
            lhs,
            rhs,
            slack,
            verdict,
            tolerance,
            c_used,
            barycenter,
            r_barycenter,
            direction,
        }
    }

    pub fn holds(&self) -> bool {
        matches!(self.verdict, Verdict::Holds | Verdict::Degenerate)
    }
}

/// Default check direction implied by a model's claim tag; an unknown
/// claim defaults to the super direction.
pub fn default_direction<S: Scalar>(f: &FunctionModel<S>) -> Direction {
    match f.claim() {
        crate::function::Claim::Subterzatic => Direction::Sub,
        _ => Direction::Super,
    }
}

/// A per-instance feasibility bound that may be unbounded.
#[derive(Debug, Clone, PartialEq)]
pub enum Threshold<S: Scalar> {
    Finite(S),
    /// Every constant is feasible (all points equal).
    Unbounded,
}

impl<S: Scalar> Threshold<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            Threshold::Finite(v) => Some(v),
            Threshold::Unbounded => None,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Threshold::Finite(v) => v.render(),
            Threshold::Unbounded => "inf".into(),
        }
    }
}

pub(crate) fn missing_direction_error() -> Error {
    Error::InvalidArgument("this check target has no sub direction".into())
}

/// Identifies which inequality a check or fuzz run targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Def2,
    Lemma5,
    Thm6Lower,
    Thm6Upper,
    Cor8Lower,
    Cor8Upper,
}

impl Target {
    pub const ALL: [Target; 6] = [
        Target::Def2,
        Target::Lemma5,
        Target::Thm6Lower,
        Target::Thm6Upper,
        Target::Cor8Lower,
        Target::Cor8Upper,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Target::Def2 => "def2",
            Target::Lemma5 => "lemma5",
            Target::Thm6Lower => "thm6-lower",
            Target::Thm6Upper => "thm6-upper",
            Target::Cor8Lower => "cor8-lower",
            Target::Cor8Upper => "cor8-upper",
        }
    }

    pub fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown target {s:?}")))
    }

    /// Targets comparing two weight families need r-family weights.
    pub fn needs_r(self) -> bool {
        !matches!(self, Target::Def2 | Target::Lemma5)
    }

    /// Targets defined on a single block force k = 1.
    pub fn single_block(self) -> bool {
        matches!(
            self,
            Target::Def2 | Target::Cor8Lower | Target::Cor8Upper
        )
    }

    /// Only the base and tensor inequalities admit a reversed direction.
    pub fn supports_direction(self) -> bool {
        matches!(self, Target::Def2 | Target::Lemma5)
    }
}
