//! Value abstraction: the shape check plus known output values.

use crate::consistency::find_witness;
use crate::expr::DemoExpr;
use crate::query::Query;
use crate::table::Database;
use crate::value::Value;

use super::{Analyzer, Stop, Verdict};

/// The value a demonstration cell must evaluate to, when it is determined.
/// Partial applications leave it open.
pub(super) fn demo_value(e: &DemoExpr, db: &Database) -> Option<Value> {
    match e {
        DemoExpr::Const { value } => Some(value.clone()),
        DemoExpr::Ref(r) => r.resolve(db).ok().cloned(),
        DemoExpr::App { partial: true, .. } => None,
        DemoExpr::App { func, args, .. } => {
            let vals = args.iter().map(|a| demo_value(a, db)).collect::<Option<Vec<_>>>()?;
            func.apply(&vals).ok()
        }
    }
}

impl Analyzer {
    /// UNSAT when the shape check fails or some demonstrated value cannot
    /// be placed on a distinct row and column whose known value agrees.
    /// Unknown values match anything.
    pub fn prune_check_value(&self, q: &Query) -> Verdict {
        if self.prune_check_type(q) == Verdict::Unsat {
            return Verdict::Unsat;
        }
        let demo = self.demo.as_ref().expect("analyzer built with a demonstration");
        let t = match self.abs(q) {
            Ok(t) => t,
            Err(Stop::Fails) => return Verdict::Unsat,
            Err(Stop::TooAbstract) => return Verdict::Sat,
        };
        let caps: Vec<usize> = t.rows.iter().map(|r| r.count).collect();
        let ok = find_witness(demo.rows, demo.cols, &caps, t.arity, None, |i, j, r, c| {
            match (&demo.values[i][j], &t.rows[r].cells[c].value) {
                (Some(want), Some(have)) => want == have,
                _ => true,
            }
        });
        if ok.is_some() {
            Verdict::Sat
        } else {
            Verdict::Unsat
        }
    }
}
