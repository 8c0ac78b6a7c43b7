//! Nonnegative extended reals `[0, ∞]`.
//!
//! Wide-sense distances live here. `∞` is its own variant and is never the
//! result of finite overflow: finite sums saturate at `f64::MAX`.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

pub use ExtReal::{Finite, Infinite};

impl ExtReal {
    pub const ZERO: ExtReal = Finite(0.0);

    /// Checked constructor. Rejects negatives and NaN; `f64::INFINITY`
    /// maps to [`ExtReal::Infinite`].
    pub fn new(value: f64) -> Option<Self> {
        if value.is_nan() || value < 0.0 {
            None
        } else if value == f64::INFINITY {
            Some(Infinite)
        } else {
            // normalize -0.0
            Some(Finite(value + 0.0))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Finite(v) => Some(v),
            Infinite => None,
        }
    }

    /// `f64` view with `∞ ↦ f64::INFINITY`. Only for display and plotting.
    pub fn to_f64(self) -> f64 {
        match self {
            Finite(v) => v,
            Infinite => f64::INFINITY,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Default for ExtReal {
    fn default() -> Self {
        ExtReal::ZERO
    }
}

impl From<f64> for ExtReal {
    /// Panics on negative or NaN input.
    fn from(value: f64) -> Self {
        ExtReal::new(value).unwrap_or_else(|| panic!("invalid extended real {value}"))
    }
}

impl Eq for ExtReal {}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Finite(a), Finite(b)) => a.total_cmp(b),
            (Finite(_), Infinite) => Ordering::Less,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Infinite, Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq<f64> for ExtReal {
    fn eq(&self, other: &f64) -> bool {
        matches!(self, Finite(v) if v == other)
    }
}

impl PartialOrd<f64> for ExtReal {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        match self {
            Finite(v) => v.partial_cmp(other),
            Infinite if other.is_nan() => None,
            Infinite if *other == f64::INFINITY => Some(Ordering::Equal),
            Infinite => Some(Ordering::Greater),
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite((a + b).min(f64::MAX)),
            _ => Infinite,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: f64) -> ExtReal {
        self + ExtReal::from(rhs)
    }
}

impl Sum for ExtReal {
    fn sum<I: Iterator<Item = ExtReal>>(iter: I) -> Self {
        iter.fold(ExtReal::ZERO, Add::add)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(v) => fmt::Display::fmt(v, f),
            Infinite => f.write_str("∞"),
        }
    }
}

/// Serialized as a JSON number, with `null` standing for `∞`.
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Finite(v) => serializer.serialize_f64(*v),
            Infinite => serializer.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match Option::<f64>::deserialize(deserializer)? {
            None => Ok(Infinite),
            Some(v) => ExtReal::new(v)
                .ok_or_else(|| serde::de::Error::custom(format!("invalid distance {v}"))),
        }
    }
}
