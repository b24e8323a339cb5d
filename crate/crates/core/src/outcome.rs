use serde::Serialize;

use crate::scalar::Scalar;

/// Why a quantity could not be evaluated as an ordinary finite number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// Both fringe extremes vanish; the value is reported as 0.
    UndefinedFringe,
    /// The noise floor vanishes; the value is the [`Outcome::UNBOUNDED`] sentinel.
    Unbounded,
}

/// A scalar result paired with a status flag.
///
/// Unbounded results carry the largest finite value of the scalar type
/// rather than an IEEE infinity so tabulated output stays parseable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Outcome<T> {
    pub value: T,
    pub status: Status,
}

impl<T: Scalar> Outcome<T> {
    pub fn ok(value: T) -> Self {
        Self { value, status: Status::Ok }
    }

    pub fn undefined_fringe() -> Self {
        Self {
            value: T::zero(),
            status: Status::UndefinedFringe,
        }
    }

    pub fn unbounded() -> Self {
        Self {
            value: T::max_value(),
            status: Status::Unbounded,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    /// `numerator / denominator`, flagging a vanishing denominator with `on_zero`.
    pub(crate) fn ratio(numerator: T, denominator: T, on_zero: Status) -> Self {
        if denominator > T::zero() {
            Self::ok(numerator / denominator)
        } else {
            match on_zero {
                Status::UndefinedFringe => Self::undefined_fringe(),
                _ => Self::unbounded(),
            }
        }
    }
}
