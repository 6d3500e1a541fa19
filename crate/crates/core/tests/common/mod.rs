//! Random inputs and search-tree walks shared by the property tests.
#![allow(dead_code)]

use provsynth_core::abstraction::{AbsResult, Analyzer, PrunerKind, Verdict};
use provsynth_core::consistency::simplify_demo;
use provsynth_core::eval::eval_prov;
use provsynth_core::harness::demo_expr;
use provsynth_core::abstraction::Heads;
use provsynth_core::synth::{choose_next_hole, construct_skeletons, infer_domain, DemoHints};
use provsynth_core::{Database, DemoGrid, Query, Table, Value};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

/// A table of `rows` x `cols` with a text first column and small integers
/// elsewhere, so that groups and ties are common.
pub fn random_table(rng: &mut impl Rng, id: &str, rows: usize, cols: usize) -> Table {
    let words = ["a", "b", "c"];
    let data = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|c| {
                    if c == 0 {
                        Value::from(*words.choose(rng).unwrap())
                    } else {
                        Value::Number(rng.random_range(0..6) as f64)
                    }
                })
                .collect()
        })
        .collect();
    Table::new(id, None, data).unwrap()
}

/// One table `T` with 2..=max_rows rows and 2..=max_cols columns.
pub fn random_db(rng: &mut impl Rng, max_rows: usize, max_cols: usize) -> Database {
    let rows = rng.random_range(2..=max_rows);
    let cols = rng.random_range(2..=max_cols);
    Database::from_tables([random_table(rng, "T", rows, cols)])
}

/// Like [`random_db`], sometimes with a second table `U`.
pub fn random_db2(rng: &mut impl Rng, max_rows: usize, max_cols: usize) -> Database {
    let mut db = random_db(rng, max_rows, max_cols);
    if rng.random_bool(0.3) {
        let rows = rng.random_range(1..=max_rows);
        let cols = rng.random_range(1..=max_cols);
        db.insert(random_table(rng, "U", rows, cols));
    }
    db
}

/// A random root-to-leaf path of the search tree: a skeleton, each partial
/// query on the way and the concrete query it ends in.
pub fn random_walk(rng: &mut impl Rng, db: &Database, depth: usize) -> Option<Vec<Query>> {
    let analyzer = Analyzer::new(db);
    let hints = DemoHints::default();
    let skeletons = construct_skeletons(db, depth);
    let mut q = skeletons.choose(rng)?.clone();
    let mut path = vec![q.clone()];
    while let Some(hole) = choose_next_hole(&q) {
        let domain = infer_domain(hole, &q, &analyzer, &hints);
        let b = domain.choose(rng)?;
        q = q.substitute(hole.id, b).ok()?;
        path.push(q.clone());
    }
    Some(path)
}

/// A demonstration of one or two random rows and a random non-empty subset
/// of columns of the concrete query's provenance, in random column order.
pub fn random_demo(rng: &mut impl Rng, db: &Database, concrete: &Query) -> Option<DemoGrid> {
    let prov = eval_prov(concrete, db).ok()?;
    if prov.num_rows() == 0 || prov.arity() == 0 {
        return None;
    }
    let nrows = rng.random_range(1..=prov.num_rows().min(2));
    let rows = rand::seq::index::sample(rng, prov.num_rows(), nrows).into_vec();
    let mut cols: Vec<usize> = (0..prov.arity()).collect();
    cols.shuffle(rng);
    cols.truncate(rng.random_range(1..=prov.arity().min(3)));
    let grid = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| demo_expr(&prov.rows[r][c], rng)).collect())
        .collect();
    DemoGrid::new(None, grid).ok()
}

/// Ways a partial query's abstraction can fail to bound an instantiation.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// The analysis claims a concrete subquery fails, yet the instantiation
    /// evaluates.
    SpuriousFailure,
    /// A concrete cell's refs fit in no abstract cell.
    RefsEscape(String),
    /// A concrete cell, shown as a demonstration cell, is covered by no
    /// abstract cell.
    Uncovered(String),
}

/// Checks that every cell of `concrete`'s output is bounded by some cell of
/// `partial`'s abstract table. `None` when the instantiation does not
/// evaluate, so there is nothing to bound.
pub fn over_approximates(rng: &mut impl Rng, db: &Database, partial: &Query, concrete: &Query) -> Option<Result<(), Violation>> {
    let prov = eval_prov(concrete, db).ok()?;
    let analyzer = Analyzer::new(db);
    let table = match analyzer.eval_abs(partial) {
        Err(()) => return Some(Err(Violation::SpuriousFailure)),
        Ok(AbsResult::TooAbstract) => return Some(Ok(())),
        Ok(AbsResult::Table(t)) => t,
    };
    let cells: Vec<_> = table.rows.iter().flat_map(|r| r.cells.iter()).collect();
    for row in &prov.rows {
        for e in row {
            let want = analyzer.index().bits(e.refs()).unwrap();
            if !cells.iter().any(|c| want.is_subset(&c.refs)) {
                return Some(Err(Violation::RefsEscape(e.to_string())));
            }
            let shown = simplify_demo(&demo_expr(e, rng));
            let heads = Heads::of_demo(&shown);
            let shown_refs = analyzer.index().bits(shown.refs()).unwrap();
            if !cells.iter().any(|c| c.covers(&shown, heads, &shown_refs)) {
                return Some(Err(Violation::Uncovered(e.to_string())));
            }
        }
    }
    Some(Ok(()))
}

/// Pruners that rejected a prefix of a path whose end is consistent with
/// `demo`.
pub fn unsound_pruners(db: &Database, demo: &DemoGrid, path: &[Query]) -> Vec<(PrunerKind, String)> {
    let analyzer = Analyzer::with_demo(db, demo).unwrap();
    let mut bad = Vec::new();
    for kind in [PrunerKind::Provenance, PrunerKind::Type, PrunerKind::Value] {
        for q in path.iter().filter(|q| !q.is_concrete()) {
            if analyzer.check(kind, q) == Verdict::Unsat {
                bad.push((kind, q.to_string()));
                break;
            }
        }
    }
    bad
}
