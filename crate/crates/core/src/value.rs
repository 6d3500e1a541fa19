//! Scalar cell values.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Absolute tolerance used whenever two numbers are compared.
pub const EPSILON: f64 = 1e-9;

/// A table cell. Percentages are stored as plain numbers (53.5% is `53.5`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Text(Arc<str>),
    Null,
}

impl Value {
    /// Parses a raw CSV field: empty is `Null`, anything numeric is a number.
    pub fn parse_field(raw: &str) -> Value {
        let s = raw.trim();
        if s.is_empty() {
            return Value::Null;
        }
        match s.parse::<f64>() {
            Ok(n) if n.is_finite() => Value::Number(n),
            _ => Value::Text(Arc::from(s)),
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    fn rank_of_kind(&self) -> u8 {
        match self {
            Value::Null => 0,
            Value::Number(_) => 1,
            Value::Text(_) => 2,
        }
    }

    /// Total order used by sorting and ranking: `Null < numbers < text`.
    pub fn total_cmp(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Number(a), Value::Number(b)) => {
                if (a - b).abs() <= EPSILON {
                    Ordering::Equal
                } else {
                    a.total_cmp(b)
                }
            }
            (Value::Text(a), Value::Text(b)) => a.as_bytes().cmp(b.as_bytes()),
            _ => self.rank_of_kind().cmp(&other.rank_of_kind()),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Number(a), Value::Number(b)) => (a - b).abs() <= EPSILON,
            (Value::Text(a), Value::Text(b)) => a == b,
            (Value::Null, Value::Null) => true,
            _ => false,
        }
    }
}

// Numbers within EPSILON of each other may hash differently; hashing is only
// used for caches keyed on values copied verbatim, where that is harmless.
impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank_of_kind().hash(state);
        match self {
            Value::Number(n) => {
                let n = if *n == 0.0 { 0.0 } else { *n };
                n.to_bits().hash(state)
            }
            Value::Text(s) => s.hash(state),
            Value::Null => {}
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(n) => {
                if n.fract() == 0.0 && n.abs() < 1e15 {
                    write!(f, "{}", *n as i64)
                } else {
                    write!(f, "{n}")
                }
            }
            Value::Text(s) => f.write_str(s),
            Value::Null => Ok(()),
        }
    }
}

impl From<f64> for Value {
    fn from(n: f64) -> Self {
        Value::Number(n)
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Number(n as f64)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(Arc::from(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_compare_with_tolerance() {
        assert_eq!(Value::Number(0.1 + 0.2), Value::Number(0.3));
        assert_ne!(Value::Number(1.0), Value::Number(1.0 + 1e-6));
        assert_ne!(Value::Number(1.0), Value::Text("1".into()));
        assert_eq!(Value::Null, Value::Null);
        assert_ne!(Value::Null, Value::Text("".into()));
    }

    #[test]
    fn parse_fields() {
        assert_eq!(Value::parse_field(" 5668 "), Value::Number(5668.0));
        assert_eq!(Value::parse_field("53.5"), Value::Number(53.5));
        assert_eq!(Value::parse_field("Youth"), Value::Text("Youth".into()));
        assert_eq!(Value::parse_field(""), Value::Null);
        assert_eq!(Value::parse_field("NaN"), Value::Text("NaN".into()));
    }

    #[test]
    fn total_order_by_kind() {
        let mut vs = vec![Value::from("b"), Value::from(2.0), Value::Null, Value::from(-1.0), Value::from("a")];
        vs.sort_by(Value::total_cmp);
        assert_eq!(vs, vec![Value::Null, Value::from(-1.0), Value::from(2.0), Value::from("a"), Value::from("b")]);
    }

    #[test]
    fn display_integral_numbers_without_fraction() {
        assert_eq!(Value::from(3034.0).to_string(), "3034");
        assert_eq!(Value::from(53.5).to_string(), "53.5");
    }
}
