//! Cell references and the two expression languages: provenance expressions
//! produced by evaluation and demonstration expressions written by users.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::Func;
use crate::table::Database;
use crate::value::Value;

/// A 1-based reference to one cell of an input table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellRef {
    pub table: Arc<str>,
    pub row: usize,
    pub col: usize,
}

impl CellRef {
    pub fn new(table: &str, row: usize, col: usize) -> CellRef {
        CellRef {
            table: Arc::from(table),
            row,
            col,
        }
    }

    pub fn resolve<'a>(&self, db: &'a Database) -> Result<&'a Value> {
        db.get(&self.table)?
            .cell(self.row, self.col)
            .ok_or_else(|| Error::BadRef(self.clone()))
    }
}

impl fmt::Display for CellRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{},{}]", self.table, self.row, self.col)
    }
}

/// How an output cell was derived from the inputs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProvExpr {
    Const(Value),
    Ref(CellRef),
    App(Func, Vec<ProvExpr>),
    /// Cells merged by grouping; all members hold the same value.
    Group(Vec<ProvExpr>),
}

impl ProvExpr {
    pub fn refs(&self) -> BTreeSet<CellRef> {
        let mut out = BTreeSet::new();
        self.collect_refs(&mut out);
        out
    }

    pub fn collect_refs(&self, out: &mut BTreeSet<CellRef>) {
        self.visit_refs(&mut |r| {
            out.insert(r.clone());
        });
    }

    pub fn visit_refs(&self, f: &mut impl FnMut(&CellRef)) {
        match self {
            ProvExpr::Const(_) => {}
            ProvExpr::Ref(r) => f(r),
            ProvExpr::App(_, args) | ProvExpr::Group(args) => args.iter().for_each(|a| a.visit_refs(f)),
        }
    }

    /// Flattens nested `sum`/`max`/`min` applications, bottom-up.
    pub fn simplify(self) -> ProvExpr {
        match self {
            ProvExpr::App(func, args) => {
                let args = args.into_iter().map(ProvExpr::simplify);
                ProvExpr::flat_app(func, args)
            }
            ProvExpr::Group(members) => ProvExpr::Group(members.into_iter().map(ProvExpr::simplify).collect()),
            leaf => leaf,
        }
    }

    /// Builds `func(args)`, splicing in arguments that are themselves
    /// applications of the same flattenable function. Arguments are assumed
    /// to be simplified already.
    pub fn flat_app(func: Func, args: impl IntoIterator<Item = ProvExpr>) -> ProvExpr {
        let mut out = Vec::new();
        for a in args {
            match a {
                ProvExpr::App(g, inner) if g == func && func.is_flattenable() => out.extend(inner),
                other => out.push(other),
            }
        }
        ProvExpr::App(func, out)
    }

    pub fn eval(&self, db: &Database) -> Result<Value> {
        match self {
            ProvExpr::Const(v) => Ok(v.clone()),
            ProvExpr::Ref(r) => r.resolve(db).cloned(),
            ProvExpr::App(func, args) => {
                let vals = args.iter().map(|a| a.eval(db)).collect::<Result<Vec<_>>>()?;
                func.apply(&vals)
            }
            ProvExpr::Group(members) => {
                let mut vals = members.iter().map(|m| m.eval(db));
                let first = vals.next().ok_or(Error::GroupMismatch)??;
                for v in vals {
                    if v? != first {
                        return Err(Error::GroupMismatch);
                    }
                }
                Ok(first)
            }
        }
    }

    /// Number of leaf values (constants and references).
    pub fn leaf_count(&self) -> usize {
        match self {
            ProvExpr::Const(_) | ProvExpr::Ref(_) => 1,
            ProvExpr::App(_, args) | ProvExpr::Group(args) => args.iter().map(ProvExpr::leaf_count).sum(),
        }
    }
}

impl fmt::Display for ProvExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProvExpr::Const(v) => fmt_const(v, f),
            ProvExpr::Ref(r) => write!(f, "{r}"),
            ProvExpr::App(func, args) => {
                write!(f, "{func}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
            ProvExpr::Group(members) => {
                f.write_str("group{")?;
                write_list(f, members)?;
                f.write_str("}")
            }
        }
    }
}

fn fmt_const(v: &Value, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match v {
        Value::Text(s) => write!(f, "{s:?}"),
        Value::Null => f.write_str("null"),
        n => write!(f, "{n}"),
    }
}

fn write_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, a) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

/// A cell of a user demonstration. `partial` applications stand for
/// `f◇(...)`: the user listed some arguments and omitted others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DemoExpr {
    Const {
        value: Value,
    },
    Ref(CellRef),
    App {
        #[serde(rename = "fn")]
        func: Func,
        args: Vec<DemoExpr>,
        #[serde(default)]
        partial: bool,
    },
}

impl DemoExpr {
    pub fn constant(v: impl Into<Value>) -> DemoExpr {
        DemoExpr::Const { value: v.into() }
    }

    pub fn cell(table: &str, row: usize, col: usize) -> DemoExpr {
        DemoExpr::Ref(CellRef::new(table, row, col))
    }

    pub fn app(func: Func, args: Vec<DemoExpr>) -> DemoExpr {
        DemoExpr::App {
            func,
            args,
            partial: false,
        }
    }

    pub fn partial(func: Func, args: Vec<DemoExpr>) -> DemoExpr {
        DemoExpr::App {
            func,
            args,
            partial: true,
        }
    }

    pub fn refs(&self) -> BTreeSet<CellRef> {
        let mut out = BTreeSet::new();
        self.visit_refs(&mut |r| {
            out.insert(r.clone());
        });
        out
    }

    pub fn visit_refs(&self, f: &mut impl FnMut(&CellRef)) {
        match self {
            DemoExpr::Const { .. } => {}
            DemoExpr::Ref(r) => f(r),
            DemoExpr::App { args, .. } => args.iter().for_each(|a| a.visit_refs(f)),
        }
    }

    pub fn visit_consts(&self, f: &mut impl FnMut(&Value)) {
        match self {
            DemoExpr::Const { value } => f(value),
            DemoExpr::Ref(_) => {}
            DemoExpr::App { args, .. } => args.iter().for_each(|a| a.visit_consts(f)),
        }
    }

    /// Structural checks: partial applications list at least one argument.
    pub fn validate(&self) -> Result<()> {
        match self {
            DemoExpr::App { func, args, partial } => {
                if *partial && args.is_empty() {
                    return Err(Error::Malformed(format!("partial `{func}` lists no arguments")));
                }
                args.iter().try_for_each(DemoExpr::validate)
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for DemoExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DemoExpr::Const { value } => fmt_const(value, f),
            DemoExpr::Ref(r) => write!(f, "{r}"),
            DemoExpr::App { func, args, partial } => {
                write!(f, "{func}(")?;
                write_list(f, args)?;
                if *partial {
                    f.write_str(if args.is_empty() { "◇" } else { ",◇" })?;
                }
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Table;

    fn r(row: usize, col: usize) -> ProvExpr {
        ProvExpr::Ref(CellRef::new("T", row, col))
    }

    fn db() -> Database {
        Database::from_tables([Table::parse_csv(
            "T",
            "City,Quarter,Group,Enrolled,Population\nA,1,Youth,1667,5668\nA,1,Adult,1367,5668\n",
        )
        .unwrap()])
    }

    #[test]
    fn refs_of_leaves_and_composites() {
        assert!(ProvExpr::Const(Value::from(100.0)).refs().is_empty());
        let e = ProvExpr::App(Func::Div, vec![ProvExpr::App(Func::Sum, vec![r(1, 4), r(2, 4)]), r(1, 5)]);
        let expected: BTreeSet<_> = [CellRef::new("T", 1, 4), CellRef::new("T", 2, 4), CellRef::new("T", 1, 5)].into();
        assert_eq!(e.refs(), expected);
        let g = ProvExpr::Group(vec![r(1, 1), r(2, 1)]);
        assert_eq!(g.refs(), [CellRef::new("T", 1, 1), CellRef::new("T", 2, 1)].into());
    }

    #[test]
    fn simplify_flattens_nested_sums() {
        let (a, b, c) = (r(1, 1), r(1, 2), r(1, 3));
        let nested = ProvExpr::App(Func::Sum, vec![ProvExpr::App(Func::Sum, vec![a.clone(), b.clone()]), c.clone()]);
        assert_eq!(nested.simplify(), ProvExpr::App(Func::Sum, vec![a.clone(), b.clone(), c.clone()]));
        let single = ProvExpr::App(Func::Sum, vec![a.clone()]);
        assert_eq!(single.clone().simplify(), single);
        let mixed = ProvExpr::App(Func::Avg, vec![ProvExpr::App(Func::Avg, vec![a.clone()]), b]);
        assert_eq!(mixed.clone().simplify(), mixed);
    }

    #[test]
    fn eval_expressions() {
        let db = db();
        let s = ProvExpr::App(Func::Sum, vec![r(1, 4), r(2, 4)]);
        assert_eq!(s.eval(&db).unwrap(), Value::from(3034.0));
        assert_eq!(r(1, 5).eval(&db).unwrap(), Value::from(5668.0));
        assert_eq!(ProvExpr::Group(vec![r(1, 1), r(2, 1)]).eval(&db).unwrap(), Value::from("A"));
        assert_eq!(ProvExpr::Group(vec![r(1, 3), r(2, 3)]).eval(&db), Err(Error::GroupMismatch));
        assert!(matches!(r(3, 1).eval(&db), Err(Error::BadRef(_))));
    }

    #[test]
    fn display_forms() {
        let g = ProvExpr::Group(vec![r(1, 1), r(2, 1)]);
        assert_eq!(g.to_string(), "group{T[1,1],T[2,1]}");
        let d = DemoExpr::partial(Func::Sum, vec![DemoExpr::cell("T", 1, 4)]);
        assert_eq!(d.to_string(), "sum(T[1,4],◇)");
    }

    #[test]
    fn demo_json_shape() {
        let d = DemoExpr::partial(Func::Sum, vec![DemoExpr::cell("T", 1, 4), DemoExpr::constant(100.0)]);
        let json = serde_json::to_value(&d).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"kind":"app","fn":"sum","partial":true,"args":[
                {"kind":"ref","table":"T","row":1,"col":4},
                {"kind":"const","value":100.0}]})
        );
        let back: DemoExpr = serde_json::from_value(json).unwrap();
        assert_eq!(back, d);
        let bad = serde_json::from_str::<DemoExpr>(r#"{"kind":"app","fn":"median","args":[]}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn partial_without_arguments_is_invalid() {
        assert!(DemoExpr::partial(Func::Sum, vec![]).validate().is_err());
        assert!(DemoExpr::app(Func::Count, vec![]).validate().is_ok());
    }
}
