//! Shape abstraction: bounds on row and column counts.

use crate::query::{Query, Slot};

use super::{Analyzer, Lookup, Verdict};

/// Inclusive bounds on the output shape of every instantiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
}

impl Shape {
    fn exact(rows: usize, cols: usize) -> Shape {
        Shape {
            rows: (rows, rows),
            cols: (cols, cols),
        }
    }
}

impl Analyzer {
    /// Shape bounds; `None` when a concrete subquery fails to evaluate.
    pub fn shape(&self, q: &Query) -> Option<Shape> {
        if q.is_concrete() {
            return match self.lookup(q) {
                Lookup::Done(c) => Some(Shape::exact(c.traced.prov.num_rows(), c.traced.prov.arity())),
                Lookup::Fails => None,
                Lookup::TooLarge => Some(Shape {
                    rows: (0, usize::MAX),
                    cols: (0, usize::MAX),
                }),
            };
        }
        Some(match q {
            Query::Table { .. } => unreachable!("base tables are concrete"),
            Query::Filter { input, .. } => {
                let s = self.shape(input)?;
                Shape { rows: (0, s.rows.1), ..s }
            }
            Query::Sort { input, .. } => self.shape(input)?,
            Query::Proj { input, cols } => {
                let s = self.shape(input)?;
                let cols = match cols {
                    Slot::Filled(c) => (c.len(), c.len()),
                    Slot::Hole { .. } => (1, s.cols.1),
                };
                Shape { rows: s.rows, cols }
            }
            Query::Join { left, right } => {
                let (l, r) = (self.shape(left)?, self.shape(right)?);
                Shape {
                    rows: (l.rows.0 * r.rows.0, l.rows.1 * r.rows.1),
                    cols: (l.cols.0 + r.cols.0, l.cols.1 + r.cols.1),
                }
            }
            Query::LeftJoin { left, right, .. } => {
                let (l, r) = (self.shape(left)?, self.shape(right)?);
                Shape {
                    rows: (l.rows.0, l.rows.1 * r.rows.1.max(1)),
                    cols: (l.cols.0 + r.cols.0, l.cols.1 + r.cols.1),
                }
            }
            Query::Group { input, keys, .. } => {
                let s = self.shape(input)?;
                let rows = match (keys, self.concrete(input)) {
                    (Slot::Filled(k), Some(c)) => {
                        let n = crate::eval::group_rows(&c.traced.values, k).len();
                        (n, n)
                    }
                    _ => (s.rows.0.min(1), s.rows.1),
                };
                let cols = match keys {
                    Slot::Filled(k) => (k.len() + 1, k.len() + 1),
                    Slot::Hole { .. } => (2, s.cols.1.max(2)),
                };
                Shape { rows, cols }
            }
            Query::Partition { input, .. } | Query::Arithmetic { input, .. } => {
                let s = self.shape(input)?;
                Shape {
                    rows: s.rows,
                    cols: (s.cols.0 + 1, s.cols.1 + 1),
                }
            }
        })
    }

    /// UNSAT when no instantiation has enough rows and columns for the
    /// demonstration.
    pub fn prune_check_type(&self, q: &Query) -> Verdict {
        let demo = self.demo.as_ref().expect("analyzer built with a demonstration");
        match self.shape(q) {
            Some(s) if s.rows.1 >= demo.rows && s.cols.1 >= demo.cols => Verdict::Sat,
            _ => Verdict::Unsat,
        }
    }
}
