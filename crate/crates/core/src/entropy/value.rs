use std::cmp::Ordering;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Finite entropies below this are a bug, not rounding.
pub const NEGATIVITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum InfinityReason {
    KernelMismatchAtZero,
    KernelMismatchAtOne,
    /// Only produced by lab probes of structured surrogates; a finite matrix
    /// is always Hilbert-Schmidt.
    NotHilbertSchmidt,
}

impl fmt::Display for InfinityReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::KernelMismatchAtZero => "KernelMismatchAtZero",
            Self::KernelMismatchAtOne => "KernelMismatchAtOne",
            Self::NotHilbertSchmidt => "NotHilbertSchmidt",
        };
        f.write_str(s)
    }
}

/// A relative entropy in `[0, +∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EntropyValue {
    Finite(f64),
    PlusInfinity(InfinityReason),
}

impl EntropyValue {
    /// Checked constructor: rejects values below `-NEGATIVITY_TOL`.
    pub fn finite(v: f64) -> Result<Self> {
        if !v.is_finite() || v < -NEGATIVITY_TOL {
            return Err(Error::Internal(format!("entropy evaluated to {v}")));
        }
        Ok(Self::Finite(v))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(*v),
            Self::PlusInfinity(_) => None,
        }
    }

    /// `+∞` maps to `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }

    pub fn reason(&self) -> Option<InfinityReason> {
        match self {
            Self::Finite(_) => None,
            Self::PlusInfinity(r) => Some(*r),
        }
    }

    /// Order on `R⁺ ∪ {+∞}`: every finite value is below `+∞`, and all
    /// infinities compare equal regardless of reason.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => a.total_cmp(b),
            (Self::Finite(_), Self::PlusInfinity(_)) => Ordering::Less,
            (Self::PlusInfinity(_), Self::Finite(_)) => Ordering::Greater,
            (Self::PlusInfinity(_), Self::PlusInfinity(_)) => Ordering::Equal,
        }
    }

    /// `self <= other + tol` in the extended order.
    pub fn le_within(&self, other: &Self, tol: f64) -> bool {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => *a <= *b + tol,
            (_, Self::PlusInfinity(_)) => true,
            (Self::PlusInfinity(_), Self::Finite(_)) => false,
        }
    }

    /// Equal within `tol`, with `+∞ == +∞`.
    pub fn agrees_with(&self, other: &Self, tol: f64) -> bool {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => (a - b).abs() <= tol,
            (Self::PlusInfinity(_), Self::PlusInfinity(_)) => true,
            _ => false,
        }
    }

    /// Text cell: 17 significant digits or `inf`.
    pub fn to_cell(&self) -> String {
        match self {
            Self::Finite(v) => format!("{v:.16e}"),
            Self::PlusInfinity(_) => "inf".into(),
        }
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::PlusInfinity(r) => write!(f, "inf ({r})"),
        }
    }
}

/// `{"kind": "finite", "value": 0.12, "reason": null}` or
/// `{"kind": "plus_infinity", "value": "inf", "reason": "KernelMismatchAtZero"}`.
impl Serialize for EntropyValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("EntropyValue", 3)?;
        match self {
            Self::Finite(v) => {
                st.serialize_field("kind", "finite")?;
                st.serialize_field("value", v)?;
                st.serialize_field("reason", &None::<InfinityReason>)?;
            }
            Self::PlusInfinity(r) => {
                st.serialize_field("kind", "plus_infinity")?;
                st.serialize_field("value", "inf")?;
                st.serialize_field("reason", r)?;
            }
        }
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_puts_infinity_last() {
        let inf = EntropyValue::PlusInfinity(InfinityReason::KernelMismatchAtZero);
        let inf1 = EntropyValue::PlusInfinity(InfinityReason::KernelMismatchAtOne);
        let one = EntropyValue::Finite(1.0);
        assert_eq!(one.total_cmp(&inf), Ordering::Less);
        assert_eq!(inf.total_cmp(&inf1), Ordering::Equal);
        assert!(one.le_within(&inf, 0.0));
        assert!(!inf.le_within(&one, 1e9));
        assert!(inf.agrees_with(&inf1, 0.0));
    }

    #[test]
    fn serializes_infinity_as_string() {
        let inf = EntropyValue::PlusInfinity(InfinityReason::KernelMismatchAtZero);
        let s = serde_json::to_string(&inf).unwrap();
        assert_eq!(s, r#"{"kind":"plus_infinity","value":"inf","reason":"KernelMismatchAtZero"}"#);
        let s = serde_json::to_string(&EntropyValue::Finite(0.5)).unwrap();
        assert_eq!(s, r#"{"kind":"finite","value":0.5,"reason":null}"#);
    }

    #[test]
    fn rejects_negative() {
        assert!(EntropyValue::finite(-1e-6).is_err());
        assert!(EntropyValue::finite(-1e-12).is_ok());
        assert!(EntropyValue::finite(f64::NAN).is_err());
    }
}
