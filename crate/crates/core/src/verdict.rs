//! Pass/fail bookkeeping shared by every inequality check.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The inequality is uninformative at this point (a log of zero, a
    /// degenerate variance, ...).
    Vacuous,
}

impl Status {
    pub fn is_fail(self) -> bool {
        self == Status::Fail
    }

    /// Combines two verdicts: any failure wins, then any pass.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Pass, _) | (_, Status::Pass) => Status::Pass,
            _ => Status::Vacuous,
        }
    }
}

/// One checked inequality `lower ≤ upper`, with `residual = upper − lower`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub lower: f64,
    pub upper: f64,
    pub residual: f64,
    pub status: Status,
}

impl Inequality {
    pub fn check(lower: f64, upper: f64, tol: f64) -> Self {
        let residual = upper - lower;
        let status = if residual >= -tol {
            Status::Pass
        } else {
            Status::Fail
        };
        Self {
            lower,
            upper,
            residual,
            status,
        }
    }

    pub fn vacuous(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            residual: upper - lower,
            status: Status::Vacuous,
        }
    }
}

/// Absolute tolerances used by the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// `dν/dt ≥ S_t*·I(f)`.
    pub russo: f64,
    /// Every other inequality (log-Sobolev type bounds, lift bounds,
    /// threshold bounds).
    pub inequality: f64,
    /// `γ_* ≤ η_*^{1−1/e} ≤ η_*^{1/2}`.
    pub remark: f64,
    /// Allowed decrease of `ν_t` between consecutive grid points.
    pub curve: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            russo: 1e-12,
            inequality: 1e-9,
            remark: 1e-12,
            curve: 1e-12,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_sign() {
        let ok = Inequality::check(0.25, 0.5, 1e-9);
        assert_eq!(ok.status, Status::Pass);
        assert_eq!(ok.residual, 0.25);
        let bad = Inequality::check(0.5, 0.25, 1e-9);
        assert_eq!(bad.status, Status::Fail);
        let edge = Inequality::check(1.0 + 1e-10, 1.0, 1e-9);
        assert_eq!(edge.status, Status::Pass);
    }

    #[test]
    fn combine() {
        assert_eq!(Status::Pass.and(Status::Vacuous), Status::Pass);
        assert_eq!(Status::Vacuous.and(Status::Vacuous), Status::Vacuous);
        assert_eq!(Status::Pass.and(Status::Fail), Status::Fail);
    }
}
