use thiserror::Error;

use crate::kinetic::Statistics;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` = {value} is invalid: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("momentum transfer has zero magnitude")]
    DegenerateQ,

    #[error("fugacity z = {z} outside the admissible range for {statistics} statistics")]
    FugacityOutOfRange { statistics: Statistics, z: f64 },

    #[error("structure factor is not finite at q = {q}, E = {energy}")]
    IndeterminatePoint { q: f64, energy: f64 },

    #[error("adaptive quadrature did not reach tolerance after {subdivisions} subdivisions (estimate {estimate}, error {error})")]
    QuadratureNonConvergent {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    #[error("tabulated T-matrix ends at q = {q_last} but {tail_fraction:e} of the thermal weight lies beyond it")]
    TabulatedRangeTooShort { q_last: f64, tail_fraction: f64 },

    #[error("invalid T-matrix table: {0}")]
    InvalidTable(String),

    #[error("momentum transfer {q} is not an integer multiple of the grid spacing {dp}")]
    GridMismatch { q: f64, dp: f64 },

    #[error("momentum grid too narrow: boundary weight {boundary_weight:e} exceeds {limit:e}")]
    GridTooNarrow { boundary_weight: f64, limit: f64 },

    #[error("integration step {step} unstable: {quantity} drifted by {drift:e}")]
    StepUnstable {
        step: usize,
        quantity: &'static str,
        drift: f64,
    },

    #[error("stability condition violated: {condition} = {value} exceeds {limit}")]
    CflViolation {
        condition: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

pub(crate) fn require_positive<T: crate::Real>(name: &'static str, value: T) -> Result<()> {
    if value > T::zero() && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: value.as_f64(),
            reason: "must be finite and strictly positive",
        })
    }
}

pub(crate) fn require_finite<T: crate::Real>(name: &'static str, value: T) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: value.as_f64(),
            reason: "must be finite",
        })
    }
}
