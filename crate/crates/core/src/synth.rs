//! Worklist search over partial queries.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::abstraction::{Analyzer, PrunerKind, Verdict};
use crate::consistency::{prov_consistent_projected, MatchWitness};
use crate::error::{Error, Result};
use crate::eval::Traced;
use crate::expr::DemoExpr;
use crate::func::Func;
use crate::grid::DemoGrid;
use crate::query::{Binding, CmpOp, Hole, HoleKind, OpKind, Operand, Predicate, Query};
use crate::sql::to_sql;
use crate::table::Database;
use crate::value::Value;

/// Largest column subset tried for keys, projections and sort columns.
pub const MAX_SUBSET: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    /// Maximum number of operators.
    pub depth: usize,
    /// Stop after this many solutions.
    pub limit: usize,
    /// Seconds.
    pub timeout: f64,
    pub pruner: PrunerKind,
    pub seed: u64,
    /// Operators skeletons may use.
    pub operators: Vec<OpKind>,
    pub order: SearchOrder,
}

/// How the worklist visits skeletons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchOrder {
    /// One breadth-first search per skeleton, smaller skeletons and those
    /// reading fewer tables first.
    #[default]
    Skeleton,
    /// A single breadth-first search seeded with every skeleton.
    Global,
}

impl std::str::FromStr for SearchOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skeleton" => Ok(SearchOrder::Skeleton),
            "global" => Ok(SearchOrder::Global),
            other => Err(Error::Malformed(format!("unknown search order `{other}`"))),
        }
    }
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            depth: 3,
            limit: 10,
            timeout: 600.0,
            pruner: PrunerKind::Provenance,
            seed: 0,
            operators: OpKind::ALL.to_vec(),
            order: SearchOrder::Skeleton,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.depth == 0 {
            return Err(Error::Malformed("depth must be at least 1".into()));
        }
        if self.limit == 0 {
            return Err(Error::Malformed("limit must be at least 1".into()));
        }
        if self.operators.is_empty() {
            return Err(Error::Malformed("at least one operator is required".into()));
        }
        if !(self.timeout > 0.0) {
            return Err(Error::Malformed("timeout must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub rank: usize,
    /// Operator count of the query before the final projection.
    pub size: usize,
    pub sql: String,
    pub query: Query,
    /// Demonstration rows and columns matched in the query's output.
    pub witness: MatchWitness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthReport {
    pub solutions: Vec<Solution>,
    pub queries_visited: usize,
    pub queries_pruned: usize,
    pub timed_out: bool,
    /// Wall-clock seconds; not serialized so that reports of equal runs are
    /// byte-identical.
    #[serde(skip)]
    pub elapsed: f64,
}

impl SynthReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

/// All operator compositions with 1 to `depth` operators whose leaves are
/// input tables, every parameter a hole. Ordered by size, then operator,
/// then children.
pub fn construct_skeletons(db: &Database, depth: usize) -> Vec<Query> {
    construct_skeletons_with(db, depth, &OpKind::ALL)
}

/// Like [`construct_skeletons`] over a subset of the operators.
pub fn construct_skeletons_with(db: &Database, depth: usize, ops: &[OpKind]) -> Vec<Query> {
    let mut by_size: Vec<Vec<Query>> = vec![db.ids().map(Query::table).collect()];
    for size in 1..=depth {
        let mut level = Vec::new();
        for op in OpKind::ALL.into_iter().filter(|op| ops.contains(op)) {
            if op.is_binary() {
                for left_size in (0..size).rev() {
                    let right_size = size - 1 - left_size;
                    for l in &by_size[left_size] {
                        for r in &by_size[right_size] {
                            level.push(Query::skeleton(op, vec![l.clone(), r.clone()]));
                        }
                    }
                }
            } else {
                for c in &by_size[size - 1] {
                    level.push(Query::skeleton(op, vec![c.clone()]));
                }
            }
        }
        by_size.push(level);
    }
    by_size
        .into_iter()
        .skip(1)
        .flatten()
        .map(|mut q| {
            q.renumber_holes();
            q
        })
        .collect()
}

/// The hole to instantiate next: innermost operator first, then key
/// columns, function, target or argument columns, predicate.
pub fn choose_next_hole(q: &Query) -> Option<Hole> {
    let first = q.holes().into_iter().next()?;
    let owner = q.hole_owner(first.id)?;
    owner.own_holes().into_iter().min_by_key(|h| hole_priority(h.kind))
}

fn hole_priority(kind: HoleKind) -> u8 {
    match kind {
        HoleKind::Keys | HoleKind::ProjCols | HoleKind::SortCols => 0,
        HoleKind::AggTarget | HoleKind::ArithCols => 1,
        HoleKind::AggFunc | HoleKind::AnalyticFunc | HoleKind::ArithFunc | HoleKind::SortOrder => 2,
        HoleKind::Predicate | HoleKind::JoinPredicate => 3,
    }
}

/// Facts mined once from the demonstration.
#[derive(Debug, Clone, Default)]
pub struct DemoHints {
    /// Arithmetic templates in order of appearance.
    pub arith: Vec<Func>,
    /// Constants the user typed, excluding the `100` of percentages.
    pub constants: Vec<Value>,
}

impl DemoHints {
    pub fn mine(demo: &DemoGrid) -> DemoHints {
        let mut hints = DemoHints::default();
        for cell in demo.cells() {
            hints.visit(cell);
        }
        hints
    }

    fn visit(&mut self, e: &DemoExpr) {
        let DemoExpr::App { func, args, .. } = e else {
            if let DemoExpr::Const { value } = e {
                if !self.constants.contains(value) {
                    self.constants.push(value.clone());
                }
            }
            return;
        };
        if let Some(inner) = percent_pattern(*func, args) {
            push_unique(&mut self.arith, Func::PercentOf);
            for a in inner {
                self.visit(a);
            }
            return;
        }
        if func.is_arithmetic() {
            push_unique(&mut self.arith, *func);
        }
        for a in args {
            self.visit(a);
        }
    }
}

fn push_unique(v: &mut Vec<Func>, f: Func) {
    if !v.contains(&f) {
        v.push(f);
    }
}

fn div_args(e: &DemoExpr) -> Option<&[DemoExpr]> {
    match e {
        DemoExpr::App {
            func: Func::Div,
            args,
            partial: false,
        } if args.len() == 2 => Some(args),
        _ => None,
    }
}

// `mul(div(x, y), 100)` in either argument order; returns `[x, y]`.
fn percent_pattern(func: Func, args: &[DemoExpr]) -> Option<&[DemoExpr]> {
    if func != Func::Mul || args.len() != 2 {
        return None;
    }
    let hundred = |e: &DemoExpr| matches!(e, DemoExpr::Const { value } if *value == Value::Number(100.0));
    match (&args[0], &args[1]) {
        (a, b) if hundred(b) => div_args(a),
        (a, b) if hundred(a) => div_args(b),
        _ => None,
    }
}

/// Column subsets of `1..=arity` with sizes in `sizes`, smallest first,
/// lexicographic within a size.
pub fn column_subsets(arity: usize, max_size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, arity: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for c in start..=arity {
            cur.push(c);
            rec(c + 1, arity, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for k in 1..=max_size.min(arity) {
        rec(1, arity, k, &mut Vec::new(), &mut out);
    }
    out
}

fn numeric(values: &[Vec<Value>], col: usize) -> bool {
    let mut seen = false;
    for row in values {
        match &row[col - 1] {
            Value::Number(_) => seen = true,
            Value::Null => {}
            Value::Text(_) => return false,
        }
    }
    seen
}

fn distinct(values: &[Vec<Value>], col: usize) -> Vec<&Value> {
    let mut out: Vec<&Value> = Vec::new();
    for row in values {
        let v = &row[col - 1];
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

// Equalities between a column that is unique on its side and a column on the
// other side whose values it covers.
fn key_pairs(left: &Traced, right: &Traced) -> Vec<Predicate> {
    let split = left.prov.arity();
    let unique = |t: &Traced, c: usize| distinct(&t.values, c).len() == t.values.len() && !t.values.is_empty();
    let mut out = Vec::new();
    for i in 1..=split {
        for j in 1..=right.prov.arity() {
            let li = distinct(&left.values, i);
            let rj = distinct(&right.values, j);
            if li.iter().chain(&rj).any(|v| v.is_null()) {
                continue;
            }
            let covers = |a: &[&Value], b: &[&Value]| b.iter().all(|v| a.contains(v));
            if (unique(left, i) && covers(&li, &rj)) || (unique(right, j) && covers(&rj, &li)) {
                out.push(Predicate::atom(i, CmpOp::Eq, Operand::Col(split + j)));
            }
        }
    }
    out
}

/// Candidate bindings for a hole, in the order they are tried.
pub fn infer_domain(hole: Hole, q: &Query, analyzer: &Analyzer, hints: &DemoHints) -> Vec<Binding> {
    let Some(owner) = q.hole_owner(hole.id) else {
        return Vec::new();
    };
    let children = owner.children();
    let inputs: Option<Vec<_>> = children.iter().map(|c| analyzer.concrete(c)).collect();
    let Some(inputs) = inputs else {
        return Vec::new();
    };
    let input = &inputs[0].traced;
    let arity = input.prov.arity();
    let values = &input.values;
    match hole.kind {
        HoleKind::Keys => column_subsets(arity, MAX_SUBSET.min(arity.saturating_sub(1)))
            .into_iter()
            .map(Binding::Columns)
            .collect(),
        HoleKind::ProjCols => {
            let identity: Vec<usize> = (1..=arity).collect();
            column_subsets(arity, MAX_SUBSET)
                .into_iter()
                .filter(|c| *c != identity)
                .map(Binding::Columns)
                .collect()
        }
        HoleKind::SortCols => column_subsets(arity, MAX_SUBSET).into_iter().map(Binding::Columns).collect(),
        HoleKind::SortOrder => vec![
            Binding::Order(crate::query::SortOrder::Asc),
            Binding::Order(crate::query::SortOrder::Desc),
        ],
        HoleKind::AggFunc | HoleKind::AnalyticFunc => {
            let funcs: &[Func] = if hole.kind == HoleKind::AggFunc { &Func::AGGREGATES } else { &Func::ANALYTICS };
            let target = match owner {
                Query::Group { target, .. } | Query::Partition { target, .. } => target.filled().copied(),
                _ => None,
            };
            let text_target = target.is_some_and(|c| !numeric(values, c));
            funcs
                .iter()
                .filter(|f| !(text_target && f.needs_numbers()))
                .map(|&f| Binding::Func(f))
                .collect()
        }
        HoleKind::AggTarget => {
            let (keys, func) = match owner {
                Query::Group { keys, func, .. } | Query::Partition { keys, func, .. } => (keys.filled(), func.filled()),
                _ => (None, None),
            };
            let keys = keys.cloned().unwrap_or_default();
            let needs_numbers = func.is_some_and(|f| f.needs_numbers());
            (1..=arity)
                .filter(|c| !keys.contains(c))
                .filter(|&c| !needs_numbers || numeric(values, c))
                .map(Binding::Column)
                .collect()
        }
        HoleKind::ArithFunc => {
            let mut funcs = hints.arith.clone();
            for f in Func::ARITHMETIC {
                push_unique(&mut funcs, f);
            }
            // Descending column pairs are only needed by non-commutative functions.
            let descending = match owner {
                Query::Arithmetic { cols, .. } => cols.filled().is_some_and(|c| c.len() == 2 && c[1] < c[0]),
                _ => false,
            };
            funcs
                .into_iter()
                .filter(|f| !(descending && f.is_commutative()))
                .map(Binding::Func)
                .collect()
        }
        HoleKind::ArithCols => {
            let Query::Arithmetic { func, .. } = owner else {
                return Vec::new();
            };
            let commutative = func.filled().is_some_and(|f| f.is_commutative());
            let nums: Vec<usize> = (1..=arity).filter(|&c| numeric(values, c)).collect();
            let mut out = Vec::new();
            for &a in &nums {
                for &b in &nums {
                    if a == b || (commutative && b < a) {
                        continue;
                    }
                    out.push(Binding::Columns(vec![a, b]));
                }
            }
            out
        }
        HoleKind::Predicate => {
            let mut preds = Vec::new();
            if let Query::Filter { input: inner, .. } = owner {
                if let Query::Join { left, right } = &**inner {
                    if let (Some(l), Some(r)) = (analyzer.concrete(left), analyzer.concrete(right)) {
                        preds.extend(key_pairs(&l.traced, &r.traced));
                    }
                }
            }
            for c in 1..=arity {
                let col_numeric = numeric(values, c);
                for v in &hints.constants {
                    let ops: &[CmpOp] = match v {
                        Value::Number(_) if col_numeric => &CmpOp::ALL,
                        Value::Text(_) if !col_numeric => &[CmpOp::Eq],
                        _ => &[],
                    };
                    for &op in ops {
                        preds.push(Predicate::atom(c, op, Operand::Const(v.clone())));
                    }
                }
            }
            preds.into_iter().map(Binding::Predicate).collect()
        }
        HoleKind::JoinPredicate => {
            let right = &inputs[1].traced;
            key_pairs(input, right).into_iter().map(Binding::Predicate).collect()
        }
    }
}

/// Breadth-first search over partial queries, pruning with the configured
/// pruner.
pub fn synthesize(db: &Database, demo: &DemoGrid, config: &SynthConfig) -> Result<SynthReport> {
    config.validate()?;
    if db.is_empty() {
        return Err(Error::NoInputs);
    }
    demo.validate()?;
    let analyzer = Analyzer::with_demo(db, demo)?;
    let hints = DemoHints::mine(demo);
    let start = Instant::now();
    let deadline = start + Duration::from_secs_f64(config.timeout.min(1e9));

    let mut skeletons = construct_skeletons_with(db, config.depth, &config.operators);
    skeletons.sort_by_key(|q| (q.size(), q.leaves()));
    let seeds: Vec<Vec<Query>> = match config.order {
        SearchOrder::Skeleton => skeletons.into_iter().map(|q| vec![q]).collect(),
        SearchOrder::Global => vec![skeletons],
    };
    let mut found: Vec<(usize, Query, MatchWitness)> = Vec::new();
    let mut visited = 0;
    let mut pruned = 0;
    let mut timed_out = false;

    'search: for seed in seeds {
        let mut worklist = VecDeque::from(seed);
        while let Some(q) = worklist.pop_front() {
            if Instant::now() >= deadline {
                timed_out = true;
                break 'search;
            }
            visited += 1;
            match choose_next_hole(&q) {
                None => {
                    let Some(c) = analyzer.evaluate(&q) else { continue };
                    if let Some(w) = prov_consistent_projected(&c.traced.prov, demo) {
                        found.push((q.size(), q, w));
                        if found.len() >= config.limit {
                            break 'search;
                        }
                    }
                }
                Some(hole) => {
                    if analyzer.check(config.pruner, &q) == Verdict::Unsat {
                        pruned += 1;
                        continue;
                    }
                    for b in infer_domain(hole, &q, &analyzer, &hints) {
                        if let Ok(next) = q.substitute(hole.id, &b) {
                            worklist.push_back(next);
                        }
                    }
                }
            }
        }
    }

    found.sort_by_key(|(size, _, _)| *size);
    let mut solutions = Vec::new();
    for (rank, (size, core, w)) in found.into_iter().enumerate() {
        let arity = analyzer.evaluate(&core).map_or(0, |c| c.traced.prov.arity());
        let identity: Vec<usize> = (1..=arity).collect();
        let query = if w.cols == identity {
            core
        } else {
            Query::Proj {
                input: Box::new(core),
                cols: w.cols.clone().into(),
            }
        };
        let witness = MatchWitness {
            rows: w.rows,
            cols: (1..=w.cols.len()).collect(),
        };
        solutions.push(Solution {
            rank: rank + 1,
            size,
            sql: to_sql(&query, db)?,
            query,
            witness,
        });
    }
    Ok(SynthReport {
        solutions,
        queries_visited: visited,
        queries_pruned: pruned,
        timed_out,
        elapsed: start.elapsed().as_secs_f64(),
    })
}
