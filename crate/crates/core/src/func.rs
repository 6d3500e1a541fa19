//! The closed vocabulary of aggregation, analytic and arithmetic functions.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Func {
    Sum,
    Avg,
    Max,
    Min,
    Count,
    Rank,
    DenseRank,
    Cumsum,
    Add,
    Sub,
    Mul,
    Div,
    PercentOf,
}

impl Func {
    pub const ALL: [Func; 13] = [
        Func::Sum,
        Func::Avg,
        Func::Max,
        Func::Min,
        Func::Count,
        Func::Rank,
        Func::DenseRank,
        Func::Cumsum,
        Func::Add,
        Func::Sub,
        Func::Mul,
        Func::Div,
        Func::PercentOf,
    ];

    /// Group aggregation functions.
    pub const AGGREGATES: [Func; 5] = [Func::Sum, Func::Avg, Func::Max, Func::Min, Func::Count];

    /// Functions usable over a partition; a superset of [`Func::AGGREGATES`].
    pub const ANALYTICS: [Func; 8] = [
        Func::Sum,
        Func::Avg,
        Func::Max,
        Func::Min,
        Func::Count,
        Func::Rank,
        Func::DenseRank,
        Func::Cumsum,
    ];

    /// Binary arithmetic templates.
    pub const ARITHMETIC: [Func; 5] = [Func::Add, Func::Sub, Func::Mul, Func::Div, Func::PercentOf];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sum => "sum",
            Func::Avg => "avg",
            Func::Max => "max",
            Func::Min => "min",
            Func::Count => "count",
            Func::Rank => "rank",
            Func::DenseRank => "dense_rank",
            Func::Cumsum => "cumsum",
            Func::Add => "add",
            Func::Sub => "sub",
            Func::Mul => "mul",
            Func::Div => "div",
            Func::PercentOf => "percent_of",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Argument order is irrelevant for these functions.
    pub fn is_commutative(self) -> bool {
        matches!(
            self,
            Func::Sum | Func::Avg | Func::Max | Func::Min | Func::Count | Func::Add | Func::Mul
        )
    }

    /// Nested applications of these collapse: `f(f(a, b), c) = f(a, b, c)`.
    pub fn is_flattenable(self) -> bool {
        matches!(self, Func::Sum | Func::Max | Func::Min)
    }

    pub fn is_aggregate(self) -> bool {
        Func::AGGREGATES.contains(&self)
    }

    pub fn is_analytic(self) -> bool {
        Func::ANALYTICS.contains(&self)
    }

    pub fn is_arithmetic(self) -> bool {
        Func::ARITHMETIC.contains(&self)
    }

    /// Aggregates that only make sense over numeric columns.
    pub fn needs_numbers(self) -> bool {
        matches!(self, Func::Sum | Func::Avg | Func::Cumsum) || self.is_arithmetic()
    }

    /// Applies the function to already evaluated arguments.
    ///
    /// `rank` and `dense_rank` rank their first argument against all
    /// arguments (descending, ties share a rank). `cumsum` over an explicit
    /// argument list is the sum of that list.
    pub fn apply(self, args: &[Value]) -> Result<Value> {
        match self {
            Func::Sum | Func::Cumsum => {
                let nums = self.numbers(args)?;
                Ok(Value::Number(nums.iter().sum()))
            }
            Func::Avg => {
                let nums = self.numbers(args)?;
                if nums.is_empty() {
                    Ok(Value::Null)
                } else {
                    Ok(Value::Number(nums.iter().sum::<f64>() / nums.len() as f64))
                }
            }
            Func::Max | Func::Min => {
                let best = args.iter().filter(|v| !v.is_null()).fold(None::<&Value>, |acc, v| match acc {
                    None => Some(v),
                    Some(b) => {
                        let ord = v.total_cmp(b);
                        let better = if self == Func::Max {
                            ord == Ordering::Greater
                        } else {
                            ord == Ordering::Less
                        };
                        Some(if better { v } else { b })
                    }
                });
                Ok(best.cloned().unwrap_or(Value::Null))
            }
            Func::Count => Ok(Value::Number(args.iter().filter(|v| !v.is_null()).count() as f64)),
            Func::Rank | Func::DenseRank => {
                let (own, _) = args.split_first().ok_or(Error::Arity {
                    func: self.name(),
                    expected: 1,
                    found: 0,
                })?;
                let mut greater: Vec<&Value> = args.iter().filter(|v| v.total_cmp(own) == Ordering::Greater).collect();
                if self == Func::DenseRank {
                    greater.sort_by(|a, b| a.total_cmp(b));
                    greater.dedup_by(|a, b| a.total_cmp(b) == Ordering::Equal);
                }
                Ok(Value::Number(1.0 + greater.len() as f64))
            }
            Func::Add | Func::Sub | Func::Mul | Func::Div | Func::PercentOf => {
                if args.len() != 2 {
                    return Err(Error::Arity {
                        func: self.name(),
                        expected: 2,
                        found: args.len(),
                    });
                }
                if args.iter().any(Value::is_null) {
                    return Ok(Value::Null);
                }
                let nums = self.numbers(args)?;
                let (x, y) = (nums[0], nums[1]);
                let out = match self {
                    Func::Add => x + y,
                    Func::Sub => x - y,
                    Func::Mul => x * y,
                    Func::Div | Func::PercentOf if y == 0.0 => return Ok(Value::Null),
                    Func::Div => x / y,
                    _ => x / y * 100.0,
                };
                Ok(Value::Number(out))
            }
        }
    }

    fn numbers(self, args: &[Value]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(args.len());
        for v in args {
            match v {
                Value::Number(n) => out.push(*n),
                Value::Null => {}
                Value::Text(t) => {
                    return Err(Error::TypeMismatch {
                        func: self.name(),
                        what: format!("text `{t}`"),
                    })
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nums(xs: &[f64]) -> Vec<Value> {
        xs.iter().map(|&x| Value::Number(x)).collect()
    }

    #[test]
    fn names_round_trip() {
        for f in Func::ALL {
            assert_eq!(Func::from_name(f.name()), Some(f));
            let json = serde_json::to_string(&f).unwrap();
            assert_eq!(json, format!("\"{}\"", f.name()));
        }
        assert_eq!(Func::from_name("median"), None);
    }

    #[test]
    fn analytic_functions_extend_aggregates() {
        for f in Func::AGGREGATES {
            assert!(f.is_analytic());
        }
        assert!(!Func::Rank.is_aggregate());
    }

    #[test]
    fn aggregates() {
        assert_eq!(Func::Sum.apply(&nums(&[1667.0, 1367.0])).unwrap(), Value::from(3034.0));
        assert_eq!(Func::Sum.apply(&[]).unwrap(), Value::from(0.0));
        assert_eq!(Func::Avg.apply(&[]).unwrap(), Value::Null);
        assert_eq!(Func::Max.apply(&[]).unwrap(), Value::Null);
        assert_eq!(Func::Count.apply(&[Value::Null, Value::from(1.0)]).unwrap(), Value::from(1.0));
        assert_eq!(Func::Min.apply(&[Value::from("b"), Value::from("a")]).unwrap(), Value::from("a"));
        assert!(Func::Sum.apply(&[Value::from("A")]).is_err());
    }

    #[test]
    fn ranks_descend_with_shared_ties() {
        // own value first, then the whole partition
        assert_eq!(Func::Rank.apply(&nums(&[5.0, 5.0, 9.0, 5.0, 7.0])).unwrap(), Value::from(3.0));
        assert_eq!(Func::DenseRank.apply(&nums(&[5.0, 5.0, 9.0, 5.0, 7.0])).unwrap(), Value::from(3.0));
        assert_eq!(Func::Rank.apply(&nums(&[9.0, 9.0, 5.0, 5.0, 7.0])).unwrap(), Value::from(1.0));
        assert_eq!(Func::DenseRank.apply(&nums(&[5.0, 9.0, 9.0, 5.0])).unwrap(), Value::from(2.0));
        assert_eq!(Func::Rank.apply(&nums(&[5.0, 9.0, 9.0, 5.0])).unwrap(), Value::from(3.0));
    }

    #[test]
    fn arithmetic() {
        assert_eq!(Func::PercentOf.apply(&nums(&[3034.0, 5668.0])).unwrap(), Value::from(3034.0 / 5668.0 * 100.0));
        assert_eq!(Func::Div.apply(&nums(&[1.0, 0.0])).unwrap(), Value::Null);
        assert_eq!(Func::Sub.apply(&nums(&[1.0, 3.0])).unwrap(), Value::from(-2.0));
        assert_eq!(Func::Add.apply(&[Value::Null, Value::from(1.0)]).unwrap(), Value::Null);
        assert!(Func::Add.apply(&nums(&[1.0])).is_err());
    }
}
