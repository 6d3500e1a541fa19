//! The analytical query language with typed holes.
//!
//! Column indices are 1-based throughout. A query with no holes is
//! *concrete*; search starts from skeletons where every parameter is a hole
//! and fills them one at a time.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::Func;
use crate::table::Database;
use crate::value::Value;

pub type HoleId = usize;

/// A parameter position that is either still open or instantiated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Slot<T> {
    Hole { hole: HoleId },
    Filled(T),
}

impl<T> Slot<T> {
    pub fn hole(id: HoleId) -> Slot<T> {
        Slot::Hole { hole: id }
    }

    pub fn filled(&self) -> Option<&T> {
        match self {
            Slot::Filled(v) => Some(v),
            Slot::Hole { .. } => None,
        }
    }

    pub fn hole_id(&self) -> Option<HoleId> {
        match self {
            Slot::Hole { hole } => Some(*hole),
            Slot::Filled(_) => None,
        }
    }

    pub fn is_hole(&self) -> bool {
        matches!(self, Slot::Hole { .. })
    }
}

impl<T> From<T> for Slot<T> {
    fn from(v: T) -> Self {
        Slot::Filled(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl CmpOp {
    pub const ALL: [CmpOp; 5] = [CmpOp::Lt, CmpOp::Le, CmpOp::Eq, CmpOp::Gt, CmpOp::Ge];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, lhs: &Value, rhs: &Value) -> bool {
        let same_kind = matches!(
            (lhs, rhs),
            (Value::Number(_), Value::Number(_)) | (Value::Text(_), Value::Text(_)) | (Value::Null, Value::Null)
        );
        if !same_kind {
            return false;
        }
        let ord = lhs.total_cmp(rhs);
        match self {
            CmpOp::Lt => ord.is_lt(),
            CmpOp::Le => ord.is_le(),
            CmpOp::Eq => ord.is_eq(),
            CmpOp::Gt => ord.is_gt(),
            CmpOp::Ge => ord.is_ge(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operand {
    Col(usize),
    Const(Value),
}

/// `lhs op rhs` where `lhs` is a column.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub lhs: usize,
    pub op: CmpOp,
    pub rhs: Operand,
}

impl Atom {
    pub fn columns(&self) -> impl Iterator<Item = usize> {
        let rhs = match self.rhs {
            Operand::Col(c) => Some(c),
            Operand::Const(_) => None,
        };
        std::iter::once(self.lhs).chain(rhs)
    }

    pub fn holds(&self, row: &[Value]) -> bool {
        let rhs = match &self.rhs {
            Operand::Col(c) => &row[c - 1],
            Operand::Const(v) => v,
        };
        self.op.holds(&row[self.lhs - 1], rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Predicate {
    True,
    False,
    And { atoms: Vec<Atom> },
}

impl Predicate {
    pub fn atom(lhs: usize, op: CmpOp, rhs: Operand) -> Predicate {
        Predicate::And {
            atoms: vec![Atom { lhs, op, rhs }],
        }
    }

    pub fn holds(&self, row: &[Value]) -> bool {
        match self {
            Predicate::True => true,
            Predicate::False => false,
            Predicate::And { atoms } => atoms.iter().all(|a| a.holds(row)),
        }
    }

    pub fn columns(&self) -> Vec<usize> {
        match self {
            Predicate::And { atoms } => atoms.iter().flat_map(Atom::columns).collect(),
            _ => Vec::new(),
        }
    }

    pub fn max_column(&self) -> usize {
        self.columns().into_iter().max().unwrap_or(0)
    }
}

impl fmt::Display for Predicate {
    /// `#2 = #4 && #1 < 3`, with `#i` the 1-based column.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::True => f.write_str("true"),
            Predicate::False => f.write_str("false"),
            Predicate::And { atoms } => {
                for (i, a) in atoms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" && ")?;
                    }
                    write!(f, "#{} {} ", a.lhs, a.op.symbol())?;
                    match &a.rhs {
                        Operand::Col(c) => write!(f, "#{c}")?,
                        Operand::Const(Value::Text(t)) => write!(f, "{t:?}")?,
                        Operand::Const(v) => write!(f, "{v}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

/// Sort direction. `<`/`<=` sort ascending and `>`/`>=` descending; both
/// spellings of a direction produce the same stable sort, so only the
/// direction is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortOrder {
    Asc,
    Desc,
}

impl From<CmpOp> for SortOrder {
    fn from(op: CmpOp) -> Self {
        match op {
            CmpOp::Gt | CmpOp::Ge => SortOrder::Desc,
            CmpOp::Lt | CmpOp::Le | CmpOp::Eq => SortOrder::Asc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Query {
    Table {
        id: String,
    },
    Filter {
        input: Box<Query>,
        pred: Slot<Predicate>,
    },
    Join {
        left: Box<Query>,
        right: Box<Query>,
    },
    LeftJoin {
        left: Box<Query>,
        right: Box<Query>,
        pred: Slot<Predicate>,
    },
    Proj {
        input: Box<Query>,
        cols: Slot<Vec<usize>>,
    },
    Sort {
        input: Box<Query>,
        cols: Slot<Vec<usize>>,
        order: Slot<SortOrder>,
    },
    Group {
        input: Box<Query>,
        keys: Slot<Vec<usize>>,
        #[serde(rename = "fn")]
        func: Slot<Func>,
        target: Slot<usize>,
    },
    Partition {
        input: Box<Query>,
        keys: Slot<Vec<usize>>,
        #[serde(rename = "fn")]
        func: Slot<Func>,
        target: Slot<usize>,
    },
    Arithmetic {
        input: Box<Query>,
        #[serde(rename = "fn")]
        func: Slot<Func>,
        cols: Slot<Vec<usize>>,
    },
}

/// Operator kinds in enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Filter,
    Join,
    LeftJoin,
    Proj,
    Sort,
    Group,
    Partition,
    Arithmetic,
}

impl OpKind {
    pub const ALL: [OpKind; 8] = [
        OpKind::Filter,
        OpKind::Join,
        OpKind::LeftJoin,
        OpKind::Proj,
        OpKind::Sort,
        OpKind::Group,
        OpKind::Partition,
        OpKind::Arithmetic,
    ];

    pub fn is_binary(self) -> bool {
        matches!(self, OpKind::Join | OpKind::LeftJoin)
    }

    pub fn name(self) -> &'static str {
        match self {
            OpKind::Filter => "filter",
            OpKind::Join => "join",
            OpKind::LeftJoin => "left_join",
            OpKind::Proj => "proj",
            OpKind::Sort => "sort",
            OpKind::Group => "group",
            OpKind::Partition => "partition",
            OpKind::Arithmetic => "arithmetic",
        }
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OpKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown operator `{s}`")))
    }
}

/// What may be plugged into a hole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoleKind {
    /// Grouping or partitioning key columns.
    Keys,
    ProjCols,
    SortCols,
    SortOrder,
    /// A group aggregation function.
    AggFunc,
    /// A function over a partition.
    AnalyticFunc,
    AggTarget,
    ArithFunc,
    ArithCols,
    Predicate,
    JoinPredicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hole {
    pub id: HoleId,
    pub kind: HoleKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binding {
    Columns(Vec<usize>),
    Column(usize),
    Func(Func),
    Order(SortOrder),
    Predicate(Predicate),
}

impl Binding {
    fn fits(&self, kind: HoleKind) -> bool {
        match (self, kind) {
            (Binding::Columns(c), HoleKind::Keys | HoleKind::ProjCols | HoleKind::SortCols | HoleKind::ArithCols) => {
                !c.is_empty() && c.iter().all(|&i| i >= 1)
            }
            (Binding::Column(c), HoleKind::AggTarget) => *c >= 1,
            (Binding::Func(f), HoleKind::AggFunc) => f.is_aggregate(),
            (Binding::Func(f), HoleKind::AnalyticFunc) => f.is_analytic(),
            (Binding::Func(f), HoleKind::ArithFunc) => f.is_arithmetic(),
            (Binding::Order(_), HoleKind::SortOrder) => true,
            (Binding::Predicate(_), HoleKind::Predicate | HoleKind::JoinPredicate) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binding::Columns(c) => write!(f, "{c:?}"),
            Binding::Column(c) => write!(f, "{c}"),
            Binding::Func(func) => write!(f, "{func}"),
            Binding::Order(o) => write!(f, "{o:?}"),
            Binding::Predicate(p) => write!(f, "{p:?}"),
        }
    }
}

fn fill<T: Clone>(slot: &mut Slot<T>, id: HoleId, value: T) -> bool {
    if slot.hole_id() == Some(id) {
        *slot = Slot::Filled(value);
        true
    } else {
        false
    }
}

impl Query {
    pub fn table(id: &str) -> Query {
        Query::Table { id: id.to_string() }
    }

    /// A skeleton node for `op` whose parameters are all holes numbered 0;
    /// call [`Query::renumber_holes`] once the tree is assembled.
    pub fn skeleton(op: OpKind, mut children: Vec<Query>) -> Query {
        let mut next = || Box::new(children.remove(0));
        match op {
            OpKind::Filter => Query::Filter { input: next(), pred: Slot::hole(0) },
            OpKind::Join => Query::Join {
                left: next(),
                right: next(),
            },
            OpKind::LeftJoin => Query::LeftJoin {
                left: next(),
                right: next(),
                pred: Slot::hole(0),
            },
            OpKind::Proj => Query::Proj { input: next(), cols: Slot::hole(0) },
            OpKind::Sort => Query::Sort {
                input: next(),
                cols: Slot::hole(0),
                order: Slot::hole(0),
            },
            OpKind::Group => Query::Group {
                input: next(),
                keys: Slot::hole(0),
                func: Slot::hole(0),
                target: Slot::hole(0),
            },
            OpKind::Partition => Query::Partition {
                input: next(),
                keys: Slot::hole(0),
                func: Slot::hole(0),
                target: Slot::hole(0),
            },
            OpKind::Arithmetic => Query::Arithmetic {
                input: next(),
                func: Slot::hole(0),
                cols: Slot::hole(0),
            },
        }
    }

    pub fn op_kind(&self) -> Option<OpKind> {
        Some(match self {
            Query::Table { .. } => return None,
            Query::Filter { .. } => OpKind::Filter,
            Query::Join { .. } => OpKind::Join,
            Query::LeftJoin { .. } => OpKind::LeftJoin,
            Query::Proj { .. } => OpKind::Proj,
            Query::Sort { .. } => OpKind::Sort,
            Query::Group { .. } => OpKind::Group,
            Query::Partition { .. } => OpKind::Partition,
            Query::Arithmetic { .. } => OpKind::Arithmetic,
        })
    }

    pub fn children(&self) -> Vec<&Query> {
        match self {
            Query::Table { .. } => vec![],
            Query::Join { left, right } | Query::LeftJoin { left, right, .. } => vec![left, right],
            Query::Filter { input, .. }
            | Query::Proj { input, .. }
            | Query::Sort { input, .. }
            | Query::Group { input, .. }
            | Query::Partition { input, .. }
            | Query::Arithmetic { input, .. } => vec![input],
        }
    }

    fn children_mut(&mut self) -> Vec<&mut Query> {
        match self {
            Query::Table { .. } => vec![],
            Query::Join { left, right } | Query::LeftJoin { left, right, .. } => vec![left, right],
            Query::Filter { input, .. }
            | Query::Proj { input, .. }
            | Query::Sort { input, .. }
            | Query::Group { input, .. }
            | Query::Partition { input, .. }
            | Query::Arithmetic { input, .. } => vec![input],
        }
    }

    /// Holes owned directly by this node, in instantiation order: key
    /// columns, then function, then target or argument columns, then
    /// predicate.
    pub fn own_holes(&self) -> Vec<Hole> {
        let mut out = Vec::new();
        let mut push = |id: Option<HoleId>, kind| {
            if let Some(id) = id {
                out.push(Hole { id, kind });
            }
        };
        match self {
            Query::Table { .. } | Query::Join { .. } => {}
            Query::Filter { pred, .. } => push(pred.hole_id(), HoleKind::Predicate),
            Query::LeftJoin { pred, .. } => push(pred.hole_id(), HoleKind::JoinPredicate),
            Query::Proj { cols, .. } => push(cols.hole_id(), HoleKind::ProjCols),
            Query::Sort { cols, order, .. } => {
                push(cols.hole_id(), HoleKind::SortCols);
                push(order.hole_id(), HoleKind::SortOrder);
            }
            Query::Group { keys, func, target, .. } => {
                push(keys.hole_id(), HoleKind::Keys);
                push(func.hole_id(), HoleKind::AggFunc);
                push(target.hole_id(), HoleKind::AggTarget);
            }
            Query::Partition { keys, func, target, .. } => {
                push(keys.hole_id(), HoleKind::Keys);
                push(func.hole_id(), HoleKind::AnalyticFunc);
                push(target.hole_id(), HoleKind::AggTarget);
            }
            Query::Arithmetic { func, cols, .. } => {
                push(func.hole_id(), HoleKind::ArithFunc);
                push(cols.hole_id(), HoleKind::ArithCols);
            }
        }
        out
    }

    /// All holes, innermost subquery first (post-order, left before right).
    pub fn holes(&self) -> Vec<Hole> {
        let mut out = Vec::new();
        self.collect_holes(&mut out);
        out
    }

    fn collect_holes(&self, out: &mut Vec<Hole>) {
        for c in self.children() {
            c.collect_holes(out);
        }
        out.extend(self.own_holes());
    }

    pub fn is_concrete(&self) -> bool {
        self.own_holes().is_empty() && self.children().iter().all(|c| c.is_concrete())
    }

    /// Number of operator nodes; base tables do not count.
    pub fn size(&self) -> usize {
        match self {
            Query::Table { .. } => 0,
            _ => 1 + self.children().iter().map(|c| c.size()).sum::<usize>(),
        }
    }

    /// Number of table references.
    pub fn leaves(&self) -> usize {
        match self {
            Query::Table { .. } => 1,
            _ => self.children().iter().map(|c| c.leaves()).sum(),
        }
    }

    /// Assigns hole ids 0, 1, 2, ... in instantiation order.
    pub fn renumber_holes(&mut self) {
        let mut next = 0;
        self.renumber_from(&mut next);
    }

    fn renumber_from(&mut self, next: &mut HoleId) {
        for c in self.children_mut() {
            c.renumber_from(next);
        }
        let mut bump = |id: &mut HoleId| {
            *id = *next;
            *next += 1;
        };
        macro_rules! renumber {
            ($($slot:expr),*) => {{ $( if let Slot::Hole { hole } = $slot { bump(hole); } )* }};
        }
        match self {
            Query::Table { .. } | Query::Join { .. } => {}
            Query::Filter { pred, .. } | Query::LeftJoin { pred, .. } => renumber!(pred),
            Query::Proj { cols, .. } => renumber!(cols),
            Query::Sort { cols, order, .. } => renumber!(cols, order),
            Query::Group { keys, func, target, .. } | Query::Partition { keys, func, target, .. } => {
                renumber!(keys, func, target)
            }
            Query::Arithmetic { func, cols, .. } => renumber!(func, cols),
        }
    }

    /// The node that owns hole `id`.
    pub fn hole_owner(&self, id: HoleId) -> Option<&Query> {
        if self.own_holes().iter().any(|h| h.id == id) {
            return Some(self);
        }
        self.children().into_iter().find_map(|c| c.hole_owner(id))
    }

    /// Returns a copy with hole `id` instantiated.
    pub fn substitute(&self, id: HoleId, binding: &Binding) -> Result<Query> {
        let hole = self.holes().into_iter().find(|h| h.id == id).ok_or(Error::UnknownHole(id))?;
        if !binding.fits(hole.kind) {
            return Err(Error::KindMismatch(format!("{:?} <- {binding}", hole.kind)));
        }
        let mut out = self.clone();
        let done = out.fill_hole(id, binding);
        debug_assert!(done);
        Ok(out)
    }

    fn fill_hole(&mut self, id: HoleId, binding: &Binding) -> bool {
        let here = match (&mut *self, binding) {
            (Query::Filter { pred, .. } | Query::LeftJoin { pred, .. }, Binding::Predicate(p)) => {
                fill(pred, id, p.clone())
            }
            (Query::Proj { cols, .. } | Query::Arithmetic { cols, .. }, Binding::Columns(c)) => fill(cols, id, c.clone()),
            (Query::Sort { cols, .. }, Binding::Columns(c)) => fill(cols, id, c.clone()),
            (Query::Sort { order, .. }, Binding::Order(o)) => fill(order, id, *o),
            (Query::Group { keys, .. } | Query::Partition { keys, .. }, Binding::Columns(c)) => {
                fill(keys, id, c.clone())
            }
            (Query::Group { func, .. } | Query::Partition { func, .. } | Query::Arithmetic { func, .. }, Binding::Func(f)) => {
                fill(func, id, *f)
            }
            (Query::Group { target, .. } | Query::Partition { target, .. }, Binding::Column(c)) => fill(target, id, *c),
            _ => false,
        };
        here || self.children_mut().into_iter().any(|c| c.fill_hole(id, binding))
    }

    /// Output arity, when it is determined by the instantiated parameters.
    pub fn arity(&self, db: &Database) -> Option<usize> {
        match self {
            Query::Table { id } => db.get(id).ok().map(|t| t.arity()),
            Query::Filter { input, .. } | Query::Sort { input, .. } => input.arity(db),
            Query::Join { left, right } | Query::LeftJoin { left, right, .. } => Some(left.arity(db)? + right.arity(db)?),
            Query::Proj { cols, .. } => cols.filled().map(Vec::len),
            Query::Group { keys, .. } => keys.filled().map(|k| k.len() + 1),
            Query::Partition { input, .. } | Query::Arithmetic { input, .. } => input.arity(db).map(|a| a + 1),
        }
    }

    /// Checks that every instantiated column index fits its input.
    pub fn check_scope(&self, db: &Database) -> Result<()> {
        for c in self.children() {
            c.check_scope(db)?;
        }
        let input_arity = match self {
            Query::Table { id } => {
                db.get(id)?;
                return Ok(());
            }
            Query::Join { .. } => return Ok(()),
            Query::LeftJoin { left, right, .. } => match (left.arity(db), right.arity(db)) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            },
            _ => self.children()[0].arity(db),
        };
        let Some(arity) = input_arity else {
            return Ok(());
        };
        let check = |c: usize| {
            if c == 0 || c > arity {
                Err(Error::BadColumn { col: c, arity })
            } else {
                Ok(())
            }
        };
        let check_all = |cs: &[usize]| cs.iter().try_for_each(|&c| check(c));
        match self {
            Query::Filter { pred, .. } | Query::LeftJoin { pred, .. } => {
                if let Some(p) = pred.filled() {
                    check_all(&p.columns())?;
                }
            }
            Query::Proj { cols, .. } | Query::Sort { cols, .. } | Query::Arithmetic { cols, .. } => {
                if let Some(c) = cols.filled() {
                    check_all(c)?;
                }
            }
            Query::Group { keys, target, .. } | Query::Partition { keys, target, .. } => {
                if let Some(k) = keys.filled() {
                    check_all(k)?;
                }
                if let Some(t) = target.filled() {
                    check(*t)?;
                }
            }
            Query::Table { .. } | Query::Join { .. } => {}
        }
        if let Query::Arithmetic {
            func: Slot::Filled(_),
            cols: Slot::Filled(c),
            ..
        } = self
        {
            if c.len() != 2 {
                return Err(Error::Malformed(format!("arithmetic takes 2 columns, got {}", c.len())));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("queries always serialize")
    }

    pub fn parse_json(text: &str) -> Result<Query> {
        Ok(serde_json::from_str(text)?)
    }
}

impl fmt::Display for Query {
    /// Compact instruction-style rendering, e.g. `group(T, [1,2], sum(4))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn slot<T: fmt::Debug>(s: &Slot<T>) -> String {
            match s {
                Slot::Hole { hole } => format!("□{hole}"),
                Slot::Filled(v) => format!("{v:?}"),
            }
        }
        fn func(s: &Slot<Func>) -> String {
            match s {
                Slot::Hole { hole } => format!("□{hole}"),
                Slot::Filled(v) => v.name().to_string(),
            }
        }
        fn pred(s: &Slot<Predicate>) -> String {
            match s {
                Slot::Hole { hole } => format!("□{hole}"),
                Slot::Filled(p) => p.to_string(),
            }
        }
        match self {
            Query::Table { id } => write!(f, "{id}"),
            Query::Filter { input, pred: p } => write!(f, "filter({input}, {})", pred(p)),
            Query::Join { left, right } => write!(f, "join({left}, {right})"),
            Query::LeftJoin { left, right, pred: p } => write!(f, "left_join({left}, {right}, {})", pred(p)),
            Query::Proj { input, cols } => write!(f, "proj({input}, {})", slot(cols)),
            Query::Sort { input, cols, order } => write!(f, "sort({input}, {}, {})", slot(cols), slot(order)),
            Query::Group {
                input,
                keys,
                func: fun,
                target,
            } => write!(f, "group({input}, {}, {}({}))", slot(keys), func(fun), slot(target)),
            Query::Partition {
                input,
                keys,
                func: fun,
                target,
            } => write!(f, "partition({input}, {}, {}({}))", slot(keys), func(fun), slot(target)),
            Query::Arithmetic { input, func: fun, cols } => write!(f, "arithmetic({input}, {}, {})", func(fun), slot(cols)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Table;

    fn running_query() -> Query {
        let group = Query::Group {
            input: Box::new(Query::table("T")),
            keys: vec![1, 2, 5].into(),
            func: Func::Sum.into(),
            target: 4.into(),
        };
        let part = Query::Partition {
            input: Box::new(group),
            keys: vec![1].into(),
            func: Func::Cumsum.into(),
            target: 4.into(),
        };
        Query::Arithmetic {
            input: Box::new(part),
            func: Func::PercentOf.into(),
            cols: vec![5, 3].into(),
        }
    }

    fn group_skeleton() -> Query {
        let mut q = Query::skeleton(OpKind::Group, vec![Query::table("T")]);
        q.renumber_holes();
        q
    }

    #[test]
    fn sizes() {
        assert_eq!(Query::table("T").size(), 0);
        assert_eq!(running_query().size(), 3);
        let j = Query::Filter {
            input: Box::new(Query::Join {
                left: Box::new(Query::table("A")),
                right: Box::new(Query::table("B")),
            }),
            pred: Predicate::True.into(),
        };
        assert_eq!(j.size(), 2);
    }

    #[test]
    fn holes_and_substitution() {
        let q = group_skeleton();
        let holes = q.holes();
        assert_eq!(holes.len(), 3);
        assert_eq!(holes[0].kind, HoleKind::Keys);
        let q2 = q.substitute(holes[0].id, &Binding::Columns(vec![1, 2, 3])).unwrap();
        assert_eq!(
            q2,
            Query::Group {
                input: Box::new(Query::table("T")),
                keys: vec![1, 2, 3].into(),
                func: Slot::hole(holes[1].id),
                target: Slot::hole(holes[2].id),
            }
        );
        assert!(running_query().is_concrete());
        assert!(running_query().holes().is_empty());
        let mut p = Query::skeleton(OpKind::Partition, vec![Query::table("T")]);
        p.renumber_holes();
        assert_eq!(p.holes().len(), 3);
    }

    #[test]
    fn substitution_errors() {
        let q = group_skeleton();
        assert_eq!(q.substitute(99, &Binding::Column(1)), Err(Error::UnknownHole(99)));
        assert!(matches!(q.substitute(0, &Binding::Column(1)), Err(Error::KindMismatch(_))));
        assert!(matches!(q.substitute(1, &Binding::Func(Func::Rank)), Err(Error::KindMismatch(_))));
        assert!(q.substitute(1, &Binding::Func(Func::Count)).is_ok());
    }

    #[test]
    fn holes_are_innermost_first() {
        let mut q = Query::skeleton(OpKind::Arithmetic, vec![Query::skeleton(OpKind::Group, vec![Query::table("T")])]);
        q.renumber_holes();
        let q = q.substitute(0, &Binding::Columns(vec![1])).unwrap();
        let kinds: Vec<_> = q.holes().iter().map(|h| h.kind).collect();
        assert_eq!(kinds, vec![HoleKind::AggFunc, HoleKind::AggTarget, HoleKind::ArithFunc, HoleKind::ArithCols]);
    }

    #[test]
    fn json_round_trip_with_holes() {
        let q = group_skeleton().substitute(0, &Binding::Columns(vec![1])).unwrap();
        let back = Query::parse_json(&q.to_json()).unwrap();
        assert_eq!(back, q);
        let back = Query::parse_json(&running_query().to_json()).unwrap();
        assert_eq!(back, running_query());
        let text = r#"{"op":"filter","input":{"op":"table","id":"T"},
                       "pred":{"kind":"and","atoms":[{"lhs":1,"op":"==","rhs":{"const":"A"}}]}}"#;
        let q = Query::parse_json(text).unwrap();
        assert!(q.is_concrete());
    }

    #[test]
    fn arity_and_scope() {
        let db = Database::from_tables([Table::parse_csv("T", "a,b,c,d,e\n1,2,3,4,5\n").unwrap()]);
        assert_eq!(running_query().arity(&db), Some(6));
        running_query().check_scope(&db).unwrap();
        let bad = Query::Proj {
            input: Box::new(Query::table("T")),
            cols: vec![6].into(),
        };
        assert_eq!(bad.check_scope(&db), Err(Error::BadColumn { col: 6, arity: 5 }));
    }

    #[test]
    fn display_shows_holes() {
        assert_eq!(group_skeleton().to_string(), "group(T, □0, □1(□2))");
    }
}
