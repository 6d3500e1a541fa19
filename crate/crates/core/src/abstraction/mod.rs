//! Abstract provenance for partial queries.
//!
//! Every abstract cell holds the set of input cells that may flow into it
//! under *any* instantiation of the query's holes, plus the cell's value
//! when it is known for all instantiations. Three precision tiers apply to
//! group, partition and arithmetic, depending on how many parameters are
//! instantiated and whether key values are known.

mod cell;
mod type_abs;
mod value_abs;

use std::collections::{BTreeSet, HashMap};
use std::hash::{BuildHasher, RandomState};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::consistency::{find_witness, simplify_demo};
use crate::error::{Error, Result};
use crate::eval::{arith_expr, eval_traced_capped, Traced};
use crate::expr::{CellRef, DemoExpr, ProvExpr};
use crate::func::Func;
use crate::grid::DemoGrid;
use crate::query::{Operand, Predicate, Query, Slot};
use crate::table::Database;
use crate::value::Value;

pub use cell::{AbsCell, Alts, Heads};
pub use type_abs::Shape;

use cell::{merge, pair_choice, union, MAX_EXACT};

/// Abstract tables with more distinct rows than this are not built.
pub const MAX_ABS_ROWS: usize = 10_000;

// The subquery cache is dropped wholesale once it reaches this many entries.
const MAX_CACHED: usize = 4096;

/// Dense numbering of all input cells.
#[derive(Debug, Clone)]
pub struct CellIndex {
    tables: Vec<(Arc<str>, usize, usize)>,
    offsets: HashMap<Arc<str>, (usize, usize, usize)>,
    len: usize,
}

impl CellIndex {
    pub fn new(db: &Database) -> CellIndex {
        let mut tables = Vec::new();
        let mut offsets = HashMap::new();
        let mut len = 0;
        for t in db.tables() {
            let id: Arc<str> = Arc::from(t.id.as_str());
            tables.push((id.clone(), len, t.arity()));
            offsets.insert(id, (len, t.num_rows(), t.arity()));
            len += t.num_rows() * t.arity();
        }
        CellIndex { tables, offsets, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn index(&self, r: &CellRef) -> Option<usize> {
        let &(off, rows, cols) = self.offsets.get(&r.table)?;
        if r.row == 0 || r.row > rows || r.col == 0 || r.col > cols {
            return None;
        }
        Some(off + (r.row - 1) * cols + (r.col - 1))
    }

    pub fn cell_ref(&self, i: usize) -> CellRef {
        let (id, off, cols) = self
            .tables
            .iter()
            .rev()
            .find(|(_, off, _)| *off <= i)
            .expect("index within range");
        let k = i - off;
        CellRef {
            table: id.clone(),
            row: k / cols + 1,
            col: k % cols + 1,
        }
    }

    pub fn bits(&self, refs: impl IntoIterator<Item = CellRef>) -> Result<FixedBitSet> {
        let mut set = FixedBitSet::with_capacity(self.len);
        for r in refs {
            set.insert(self.index(&r).ok_or(Error::BadRef(r))?);
        }
        Ok(set)
    }
}

/// A distinct abstract row standing for `count` rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbsRow {
    pub cells: Vec<AbsCell>,
    pub count: usize,
}

/// Result of abstract evaluation. When `exact_cols` is false, columns of a
/// concrete output correspond to distinct abstract columns but not
/// necessarily at the same positions.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsTable {
    pub arity: usize,
    pub rows: Vec<AbsRow>,
    pub exact_cols: bool,
}

impl AbsTable {
    fn new(arity: usize, rows: Vec<AbsRow>, exact_cols: bool) -> AbsTable {
        let mut t = AbsTable { arity, rows, exact_cols };
        t.dedup();
        t
    }

    /// Total number of represented rows.
    pub fn total_rows(&self) -> usize {
        self.rows.iter().map(|r| r.count).sum()
    }

    pub fn cell(&self, row: usize, col: usize) -> &AbsCell {
        &self.rows[row].cells[col]
    }

    /// Refs of a 0-based cell.
    pub fn refs(&self, index: &CellIndex, row: usize, col: usize) -> BTreeSet<CellRef> {
        self.cell(row, col).refs.ones().map(|i| index.cell_ref(i)).collect()
    }

    fn dedup(&mut self) {
        let hasher = RandomState::new();
        let mut seen: HashMap<u64, Vec<usize>> = HashMap::new();
        let mut out: Vec<AbsRow> = Vec::with_capacity(self.rows.len());
        for row in self.rows.drain(..) {
            let bucket = seen.entry(hasher.hash_one(&row.cells)).or_default();
            match bucket.iter().find(|&&i| out[i].cells == row.cells) {
                Some(&i) => out[i].count += row.count,
                None => {
                    bucket.push(out.len());
                    out.push(row);
                }
            }
        }
        self.rows = out;
    }

    fn col_ok(&self, c: usize) -> bool {
        self.exact_cols && c >= 1 && c <= self.arity
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AbsResult {
    Table(AbsTable),
    TooAbstract,
}

/// Highest precision tier the analysis may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tier {
    /// Parameters are ignored.
    Weak,
    /// Instantiated key and target columns are used.
    Medium,
    /// Known key values split rows into their groups.
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "snake_case")]
pub enum PrunerKind {
    Provenance,
    Type,
    Value,
    None,
}

impl PrunerKind {
    pub const ALL: [PrunerKind; 4] = [PrunerKind::Provenance, PrunerKind::Type, PrunerKind::Value, PrunerKind::None];

    pub fn name(self) -> &'static str {
        match self {
            PrunerKind::Provenance => "provenance",
            PrunerKind::Type => "type",
            PrunerKind::Value => "value",
            PrunerKind::None => "none",
        }
    }
}

impl fmt::Display for PrunerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrunerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PrunerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown pruner `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
}

/// A concrete subquery's evaluation, shared by the pruners and the
/// synthesizer's domain inference.
#[derive(Debug)]
pub struct Concrete {
    pub traced: Traced,
    pub abs: AbsTable,
}

/// Abstract evaluator bound to one database and demonstration. Results for
/// concrete subqueries are cached.
pub struct Analyzer {
    db: Database,
    index: CellIndex,
    demo: Option<DemoFacts>,
    max_tier: Tier,
    cache: Mutex<HashMap<Query, Lookup>>,
}

struct DemoFacts {
    rows: usize,
    cols: usize,
    refs: Vec<Vec<FixedBitSet>>,
    cells: Vec<Vec<DemoExpr>>,
    heads: Vec<Vec<Heads>>,
    values: Vec<Vec<Option<Value>>>,
}

impl Analyzer {
    pub fn new(db: &Database) -> Analyzer {
        Analyzer {
            index: CellIndex::new(db),
            db: db.clone(),
            demo: None,
            max_tier: Tier::Strong,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// An analyzer that can also check partial queries against `demo`.
    pub fn with_demo(db: &Database, demo: &DemoGrid) -> Result<Analyzer> {
        demo.check_refs(db)?;
        let mut a = Analyzer::new(db);
        let refs = demo
            .rows
            .iter()
            .map(|r| r.iter().map(|e| a.index.bits(e.refs())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let values = demo
            .rows
            .iter()
            .map(|r| r.iter().map(|e| value_abs::demo_value(e, db)).collect())
            .collect();
        let cells: Vec<Vec<DemoExpr>> = demo.rows.iter().map(|r| r.iter().map(simplify_demo).collect()).collect();
        let heads = cells.iter().map(|r| r.iter().map(Heads::of_demo).collect()).collect();
        a.demo = Some(DemoFacts {
            rows: demo.num_rows(),
            cols: demo.num_cols(),
            refs,
            cells,
            heads,
            values,
        });
        Ok(a)
    }

    pub fn with_max_tier(mut self, tier: Tier) -> Analyzer {
        self.max_tier = tier;
        self
    }

    pub fn db(&self) -> &Database {
        &self.db
    }

    pub fn index(&self) -> &CellIndex {
        &self.index
    }

    /// Evaluates a concrete query once; `None` when evaluation fails or the
    /// result would be too large.
    pub fn concrete(&self, q: &Query) -> Option<Arc<Concrete>> {
        match self.lookup(q) {
            Lookup::Done(c) => Some(c),
            _ => None,
        }
    }

    /// Like [`Analyzer::concrete`] but leaves the cache untouched on a miss.
    /// Used for whole queries, which are rarely seen twice.
    pub fn evaluate(&self, q: &Query) -> Option<Arc<Concrete>> {
        match self.lookup_with(q, false) {
            Lookup::Done(c) => Some(c),
            _ => None,
        }
    }

    fn lookup(&self, q: &Query) -> Lookup {
        self.lookup_with(q, true)
    }

    fn lookup_with(&self, q: &Query, store: bool) -> Lookup {
        if let Some(hit) = self.cache.lock().expect("cache lock").get(q) {
            return hit.clone();
        }
        let out = match eval_traced_capped(q, &self.db, MAX_ABS_ROWS) {
            Err(Error::TooLarge(_)) => Lookup::TooLarge,
            Err(_) => Lookup::Fails,
            Ok(traced) => Lookup::Done(self.lift(traced)),
        };
        if store {
            let mut cache = self.cache.lock().expect("cache lock");
            if cache.len() >= MAX_CACHED {
                cache.clear();
            }
            cache.insert(q.clone(), out.clone());
        }
        out
    }

    fn lift(&self, traced: Traced) -> Arc<Concrete> {
        let rows = traced
            .prov
            .rows
            .iter()
            .zip(&traced.values)
            .map(|(prow, vrow)| AbsRow {
                cells: prow
                    .iter()
                    .zip(vrow)
                    .map(|(e, v)| AbsCell::lift(e, v, &self.index))
                    .collect(),
                count: 1,
            })
            .collect();
        let abs = AbsTable::new(traced.prov.arity(), rows, true);
        Arc::new(Concrete { traced, abs })
    }

    /// Abstract evaluation. `Err` means a concrete subquery cannot be
    /// evaluated, so no instantiation of `q` can be either.
    pub fn eval_abs(&self, q: &Query) -> Result<AbsResult, ()> {
        match self.abs(q) {
            Ok(t) => Ok(AbsResult::Table(t)),
            Err(Stop::TooAbstract) => Ok(AbsResult::TooAbstract),
            Err(Stop::Fails) => Err(()),
        }
    }

    fn abs(&self, q: &Query) -> Result<AbsTable, Stop> {
        if q.is_concrete() {
            return match self.lookup(q) {
                Lookup::Done(c) => Ok(c.abs.clone()),
                Lookup::Fails => Err(Stop::Fails),
                Lookup::TooLarge => Err(Stop::TooAbstract),
            };
        }
        let n = self.index.len();
        let t = match q {
            Query::Table { .. } => unreachable!("base tables are concrete"),
            Query::Filter { input, pred } => {
                let t = self.abs(input)?;
                match pred {
                    Slot::Filled(p) if t.exact_cols => filter_known(t, p),
                    _ => t,
                }
            }
            Query::Sort { input, .. } => self.abs(input)?,
            Query::Proj { input, cols } => {
                let t = self.abs(input)?;
                match cols {
                    Slot::Filled(cols) if t.exact_cols && cols.iter().all(|&c| t.col_ok(c)) => {
                        let rows = t
                            .rows
                            .into_iter()
                            .map(|r| AbsRow {
                                cells: cols.iter().map(|&c| r.cells[c - 1].clone()).collect(),
                                count: r.count,
                            })
                            .collect();
                        AbsTable::new(cols.len(), rows, true)
                    }
                    _ => AbsTable { exact_cols: false, ..t },
                }
            }
            Query::Join { left, right } => {
                let (l, r) = (self.abs(left)?, self.abs(right)?);
                cross(&l, &r, false, n)?
            }
            Query::LeftJoin { left, right, .. } => {
                let (l, r) = (self.abs(left)?, self.abs(right)?);
                cross(&l, &r, true, n)?
            }
            Query::Group {
                input,
                keys,
                func,
                target,
            } => {
                let t = self.abs(input)?;
                let heads = func.filled().map_or(Heads::of_funcs(Func::AGGREGATES), |&f| Heads::of_func(f));
                self.group(t, keys.filled(), heads, target.filled().copied())
            }
            Query::Partition {
                input,
                keys,
                func,
                target,
            } => {
                let t = self.abs(input)?;
                let heads = func.filled().map_or(Heads::of_funcs(Func::ANALYTICS), |&f| Heads::of_func(f));
                self.partition(t, keys.filled(), heads, target.filled().copied())
            }
            Query::Arithmetic { input, func, cols } => {
                let t = self.abs(input)?;
                self.arithmetic(t, func.filled().copied(), cols.filled())
            }
        };
        if t.rows.len() > MAX_ABS_ROWS {
            return Err(Stop::TooAbstract);
        }
        Ok(t)
    }

    // Columns an aggregate may read, 1-based.
    fn agg_sources(&self, t: &AbsTable, keys: Option<&Vec<usize>>, target: Option<usize>) -> Vec<usize> {
        if self.max_tier >= Tier::Medium && t.exact_cols {
            if let Some(c) = target.filter(|&c| t.col_ok(c)) {
                return vec![c];
            }
            if let Some(keys) = keys.filter(|k| k.iter().all(|&c| t.col_ok(c))) {
                return (1..=t.arity).filter(|c| !keys.contains(c)).collect();
            }
        }
        (1..=t.arity).collect()
    }

    // Key columns usable for the medium tier, and row groups for the strong tier.
    fn key_info(&self, t: &AbsTable, keys: Option<&Vec<usize>>) -> (Option<Vec<usize>>, Option<Vec<Vec<usize>>>) {
        let keys = match keys {
            Some(k) if self.max_tier >= Tier::Medium && k.iter().all(|&c| t.col_ok(c)) => k.clone(),
            _ => return (None, None),
        };
        if self.max_tier < Tier::Strong {
            return (Some(keys), None);
        }
        let known = t.rows.iter().all(|r| keys.iter().all(|&k| r.cells[k - 1].value.is_some()));
        if !known {
            return (Some(keys), None);
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, row) in t.rows.iter().enumerate() {
            let same = |g: &&mut Vec<usize>| keys.iter().all(|&k| t.rows[g[0]].cells[k - 1].value == row.cells[k - 1].value);
            match groups.iter_mut().find(same) {
                Some(g) => g.push(i),
                None => groups.push(vec![i]),
            }
        }
        (Some(keys), Some(groups))
    }

    fn group(&self, t: AbsTable, keys: Option<&Vec<usize>>, heads: Heads, target: Option<usize>) -> AbsTable {
        let n = self.index.len();
        let sources = self.agg_sources(&t, keys, target);
        let all_rows: Vec<usize> = (0..t.rows.len()).collect();
        match self.key_info(&t, keys) {
            (Some(keys), Some(groups)) => {
                let rows = groups
                    .iter()
                    .map(|g| {
                        let mut cells: Vec<AbsCell> = keys.iter().map(|&k| merge(&t, g, k, n)).collect();
                        cells.push(aggregate(&t, g, &sources, heads, n));
                        AbsRow { cells, count: 1 }
                    })
                    .collect();
                AbsTable::new(keys.len() + 1, rows, true)
            }
            (Some(keys), None) => {
                let mut cells: Vec<AbsCell> = keys.iter().map(|&k| merge(&t, &all_rows, k, n)).collect();
                cells.push(aggregate(&t, &all_rows, &sources, heads, n));
                let count = t.total_rows();
                AbsTable::new(keys.len() + 1, rows_if(count, cells), true)
            }
            (None, _) => {
                let mut cells: Vec<AbsCell> = (1..=t.arity).map(|k| merge(&t, &all_rows, k, n)).collect();
                cells.push(aggregate(&t, &all_rows, &sources, heads, n));
                let count = t.total_rows();
                AbsTable::new(t.arity + 1, rows_if(count, cells), false)
            }
        }
    }

    fn partition(&self, mut t: AbsTable, keys: Option<&Vec<usize>>, heads: Heads, target: Option<usize>) -> AbsTable {
        let n = self.index.len();
        let sources = self.agg_sources(&t, keys, target);
        let groups = match self.key_info(&t, keys) {
            (_, Some(groups)) => groups,
            _ => vec![(0..t.rows.len()).collect()],
        };
        let mut extra = vec![None; t.rows.len()];
        for g in &groups {
            let cell = aggregate(&t, g, &sources, heads, n);
            for &i in g {
                extra[i] = Some(cell.clone());
            }
        }
        for (row, cell) in t.rows.iter_mut().zip(extra) {
            row.cells.push(cell.expect("every row is in a group"));
        }
        AbsTable::new(t.arity + 1, t.rows, t.exact_cols)
    }

    fn arithmetic(&self, mut t: AbsTable, func: Option<Func>, cols: Option<&Vec<usize>>) -> AbsTable {
        let n = self.index.len();
        let known_cols = match cols {
            Some(c) if self.max_tier >= Tier::Medium && c.len() == 2 && c.iter().all(|&k| t.col_ok(k)) => {
                Some((c[0], c[1]))
            }
            _ => None,
        };
        let heads = func.map_or(Heads::of_funcs(Func::ARITHMETIC), Heads::of_func);
        for i in 0..t.rows.len() {
            let cell = match known_cols {
                Some((a, b)) => {
                    let mut cell = union(&t, &[i], &[a, b], n).with_heads(heads);
                    let row = &t.rows[i];
                    cell.value = match (func, &row.cells[a - 1].value, &row.cells[b - 1].value) {
                        (Some(f), Some(x), Some(y)) => f.apply(&[x.clone(), y.clone()]).ok(),
                        _ => None,
                    };
                    cell
                }
                None => pair_choice(&t.rows[i], heads, n),
            };
            let cell = AbsCell {
                exact: exact_arith(&t.rows[i], func, known_cols),
                ..cell
            };
            t.rows[i].cells.push(cell);
        }
        AbsTable::new(t.arity + 1, t.rows, t.exact_cols)
    }

    /// Provenance pruning: UNSAT when no instantiation can be consistent
    /// with the demonstration.
    pub fn prune_check(&self, q: &Query) -> Verdict {
        let demo = self.demo.as_ref().expect("analyzer built with a demonstration");
        match self.abs(q) {
            Err(Stop::Fails) => Verdict::Unsat,
            Err(Stop::TooAbstract) => Verdict::Sat,
            Ok(t) => {
                let caps: Vec<usize> = t.rows.iter().map(|r| r.count).collect();
                let ok = find_witness(demo.rows, demo.cols, &caps, t.arity, None, |i, j, r, c| {
                    t.rows[r].cells[c].covers(&demo.cells[i][j], demo.heads[i][j], &demo.refs[i][j])
                });
                if ok.is_some() {
                    Verdict::Sat
                } else {
                    Verdict::Unsat
                }
            }
        }
    }

    pub fn check(&self, kind: PrunerKind, q: &Query) -> Verdict {
        match kind {
            PrunerKind::Provenance => self.prune_check(q),
            PrunerKind::Type => self.prune_check_type(q),
            PrunerKind::Value => self.prune_check_value(q),
            PrunerKind::None => Verdict::Sat,
        }
    }
}

#[derive(Clone)]
enum Lookup {
    Done(Arc<Concrete>),
    Fails,
    TooLarge,
}

enum Stop {
    TooAbstract,
    Fails,
}


fn rows_if(count: usize, cells: Vec<AbsCell>) -> Vec<AbsRow> {
    if count == 0 {
        Vec::new()
    } else {
        vec![AbsRow { cells, count }]
    }
}

// Every term an arithmetic cell may hold, when its inputs are exact.
fn exact_arith(row: &AbsRow, func: Option<Func>, cols: Option<(usize, usize)>) -> Option<Arc<[ProvExpr]>> {
    let funcs = func.map_or(Func::ARITHMETIC.to_vec(), |f| vec![f]);
    let arity = row.cells.len();
    let pairs: Vec<(usize, usize)> = match cols {
        Some(p) => vec![p],
        None => (1..=arity).flat_map(|a| (1..=arity).map(move |b| (a, b))).collect(),
    };
    if pairs.iter().any(|&(a, b)| row.cells[a - 1].exact.is_none() || row.cells[b - 1].exact.is_none()) {
        return None;
    }
    let mut out = Vec::new();
    for (a, b) in pairs {
        let xs = row.cells[a - 1].exact.as_ref()?;
        let ys = row.cells[b - 1].exact.as_ref()?;
        for &f in &funcs {
            for x in xs.iter() {
                for y in ys.iter() {
                    if out.len() == MAX_EXACT {
                        return None;
                    }
                    out.push(arith_expr(f, x.clone(), y.clone()));
                }
            }
        }
    }
    Some(out.into())
}

// An aggregate over one of `sources` across `rows`.
fn aggregate(t: &AbsTable, rows: &[usize], sources: &[usize], heads: Heads, n: usize) -> AbsCell {
    AbsCell::choice(sources.iter().map(|&c| union(t, rows, &[c], n)).collect(), heads, n)
}

fn cross(l: &AbsTable, r: &AbsTable, pad_left: bool, n: usize) -> Result<AbsTable, Stop> {
    if l.rows.len() * r.rows.len() + l.rows.len() > MAX_ABS_ROWS {
        return Err(Stop::TooAbstract);
    }
    let mut rows = Vec::new();
    for a in &l.rows {
        for b in &r.rows {
            rows.push(AbsRow {
                cells: a.cells.iter().chain(&b.cells).cloned().collect(),
                count: a.count * b.count,
            });
        }
        if pad_left {
            let pad = AbsCell::pad(n);
            let mut cells = a.cells.clone();
            cells.extend(std::iter::repeat_n(pad, r.arity));
            rows.push(AbsRow { cells, count: a.count });
        }
    }
    // Pairs of distinct rows are distinct, so no dedup is needed.
    Ok(AbsTable {
        arity: l.arity + r.arity,
        rows,
        exact_cols: l.exact_cols && r.exact_cols,
    })
}

// Drops rows on which the predicate is false for every instantiation.
fn filter_known(t: AbsTable, p: &Predicate) -> AbsTable {
    if !p.columns().iter().all(|&c| t.col_ok(c)) {
        return t;
    }
    let definitely_false = |row: &AbsRow| match p {
        Predicate::True => false,
        Predicate::False => true,
        Predicate::And { atoms } => atoms.iter().any(|a| {
            let lhs = &row.cells[a.lhs - 1].value;
            let rhs = match &a.rhs {
                Operand::Col(c) => row.cells[c - 1].value.clone(),
                Operand::Const(v) => Some(v.clone()),
            };
            match (lhs, rhs) {
                (Some(x), Some(y)) => !a.op.holds(x, &y),
                _ => false,
            }
        }),
    };
    let AbsTable { arity, rows, exact_cols } = t;
    let rows = rows.into_iter().filter(|r| !definitely_false(r)).collect();
    AbsTable { arity, rows, exact_cols }
}

/// Abstract evaluation with default precision.
pub fn eval_abs(q: &Query, db: &Database) -> Result<AbsResult> {
    Analyzer::new(db)
        .eval_abs(q)
        .map_err(|_| Error::Malformed(format!("a concrete subquery of `{q}` fails to evaluate")))
}

/// One-shot provenance pruning check.
pub fn prune_check(q: &Query, db: &Database, demo: &DemoGrid) -> Result<Verdict> {
    Ok(Analyzer::with_demo(db, demo)?.prune_check(q))
}

pub fn prune_check_type(q: &Query, db: &Database, demo: &DemoGrid) -> Result<Verdict> {
    Ok(Analyzer::with_demo(db, demo)?.prune_check_type(q))
}

pub fn prune_check_value(q: &Query, db: &Database, demo: &DemoGrid) -> Result<Verdict> {
    Ok(Analyzer::with_demo(db, demo)?.prune_check_value(q))
}
