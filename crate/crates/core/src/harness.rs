//! Benchmark generation and batch runs comparing pruners.

use std::fs;
use std::path::Path;
use std::time::Instant;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::abstraction::PrunerKind;
use crate::error::{Error, Result};
use crate::eval::{eval, eval_prov};
use crate::expr::{DemoExpr, ProvExpr};
use crate::func::Func;
use crate::grid::DemoGrid;
use crate::query::Query;
use crate::synth::{synthesize, SynthConfig};
use crate::table::{Database, Table};
use crate::value::Value;

/// Input tables larger than this are sampled down.
pub const SAMPLE_ROWS: usize = 20;
/// Rows of the ground-truth output shown in a demonstration.
pub const DEMO_ROWS: usize = 2;
/// Arguments kept by a truncated application.
pub const KEEP_ARGS: usize = 4;

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub name: String,
    pub db: Database,
    pub demo: DemoGrid,
    pub gt: Query,
}

/// Samples the inputs, evaluates the ground truth with provenance and turns
/// two random output rows into a demonstration.
pub fn generate_demo(db: &Database, gt: &Query, seed: u64) -> Result<(Database, DemoGrid)> {
    if !gt.is_concrete() {
        return Err(Error::NotConcrete);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampled = Database::from_tables(db.tables().map(|t| sample_rows(t, &mut rng)));
    let star = eval_prov(gt, &sampled)?;
    if star.num_rows() < DEMO_ROWS {
        return Err(Error::Malformed(format!(
            "ground truth yields {} rows on the sampled inputs; at least {DEMO_ROWS} are needed, sample more rows",
            star.num_rows()
        )));
    }
    let mut picked = index::sample(&mut rng, star.num_rows(), DEMO_ROWS).into_vec();
    picked.sort_unstable();
    let rows = picked
        .into_iter()
        .map(|r| star.rows[r].iter().map(|e| demo_expr(e, &mut rng)).collect())
        .collect();
    Ok((sampled, DemoGrid::new(None, rows)?))
}

fn sample_rows(t: &Table, rng: &mut ChaCha8Rng) -> Table {
    if t.num_rows() <= SAMPLE_ROWS {
        return t.clone();
    }
    let mut keep = index::sample(rng, t.num_rows(), SAMPLE_ROWS).into_vec();
    keep.sort_unstable();
    Table {
        rows: keep.into_iter().map(|i| t.rows[i].clone()).collect(),
        ..t.clone()
    }
}

/// A demonstration of one provenance term: one member stands for a group,
/// commutative arguments are shuffled and long argument lists keep their
/// first and last two entries around an omission.
pub fn demo_expr(e: &ProvExpr, rng: &mut impl Rng) -> DemoExpr {
    match e {
        ProvExpr::Const(v) => DemoExpr::Const { value: v.clone() },
        ProvExpr::Ref(r) => DemoExpr::Ref(r.clone()),
        ProvExpr::Group(members) => demo_expr(&members[rng.random_range(0..members.len())], rng),
        ProvExpr::App(func, args) => {
            let mut args: Vec<DemoExpr> = args.iter().map(|a| demo_expr(a, rng)).collect();
            if func.is_commutative() {
                args.shuffle(rng);
            }
            if args.len() > KEEP_ARGS {
                let tail = args.split_off(args.len() - KEEP_ARGS / 2);
                args.truncate(KEEP_ARGS / 2);
                args.extend(tail);
                DemoExpr::partial(*func, args)
            } else {
                DemoExpr::app(*func, args)
            }
        }
    }
}

/// One line of a suite report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub bench: String,
    pub pruner: PrunerKind,
    pub solved: bool,
    pub seconds: f64,
    pub visited: usize,
    pub pruned: usize,
    /// Rank of the first solution whose output equals the ground truth's.
    pub gt_rank: Option<usize>,
}

/// Runs every benchmark under every pruner. Rows come out benchmark-major
/// in input order.
pub fn run_suite(benches: &[Benchmark], pruners: &[PrunerKind], config: &SynthConfig) -> Vec<ReportRow> {
    let jobs: Vec<(&Benchmark, PrunerKind)> = benches.iter().flat_map(|b| pruners.iter().map(move |&p| (b, p))).collect();
    jobs.into_par_iter().map(|(b, p)| run_one(b, p, config)).collect()
}

fn run_one(b: &Benchmark, pruner: PrunerKind, config: &SynthConfig) -> ReportRow {
    let config = SynthConfig { pruner, ..config.clone() };
    let start = Instant::now();
    let report = synthesize(&b.db, &b.demo, &config);
    let seconds = start.elapsed().as_secs_f64();
    let mut row = ReportRow {
        bench: b.name.clone(),
        pruner,
        solved: false,
        seconds,
        visited: 0,
        pruned: 0,
        gt_rank: None,
    };
    let (Ok(report), Ok(want)) = (report, eval(&b.gt, &b.db)) else {
        return row;
    };
    row.visited = report.queries_visited;
    row.pruned = report.queries_pruned;
    row.gt_rank = report
        .solutions
        .iter()
        .find(|s| eval(&s.query, &b.db).is_ok_and(|t| t.same_content(&want)))
        .map(|s| s.rank);
    row.solved = row.gt_rank.is_some();
    row
}

pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bench", "pruner", "solved", "seconds", "visited", "pruned", "gt_rank"])
        .expect("writing to memory");
    for r in rows {
        w.write_record([
            r.bench.clone(),
            r.pruner.to_string(),
            r.solved.to_string(),
            format!("{:.3}", r.seconds),
            r.visited.to_string(),
            r.pruned.to_string(),
            r.gt_rank.map_or(String::new(), |k| k.to_string()),
        ])
        .expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("csv output is utf-8")
}

/// Per pruner: solved count, top-1 count and mean seconds.
pub fn summary(rows: &[ReportRow]) -> String {
    let mut pruners: Vec<PrunerKind> = Vec::new();
    for r in rows {
        if !pruners.contains(&r.pruner) {
            pruners.push(r.pruner);
        }
    }
    let mut out = String::new();
    for p in pruners {
        let mine: Vec<&ReportRow> = rows.iter().filter(|r| r.pruner == p).collect();
        let solved = mine.iter().filter(|r| r.solved).count();
        let top = mine.iter().filter(|r| r.gt_rank == Some(1)).count();
        let mean = mine.iter().map(|r| r.seconds).sum::<f64>() / mine.len() as f64;
        let visited: usize = mine.iter().map(|r| r.visited).sum();
        out.push_str(&format!(
            "{p}: solved {solved}/{}, top-1 {top}, mean {mean:.2}s, visited {visited}\n",
            mine.len()
        ));
    }
    out
}

/// Writes `dir/<name>/{tables/*.csv, demo.json, gt.json}`.
pub fn save_benchmark(b: &Benchmark, dir: &Path) -> Result<()> {
    let root = dir.join(&b.name);
    let tables = root.join("tables");
    fs::create_dir_all(&tables).map_err(io)?;
    for t in b.db.tables() {
        fs::write(tables.join(format!("{}.csv", t.id)), t.to_csv()).map_err(io)?;
    }
    fs::write(root.join("demo.json"), b.demo.to_json()).map_err(io)?;
    let gt = serde_json::to_string_pretty(&b.gt).expect("queries always serialize");
    fs::write(root.join("gt.json"), gt).map_err(io)?;
    Ok(())
}

pub fn load_benchmark(root: &Path) -> Result<Benchmark> {
    let name = root
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Error::Malformed(format!("bad benchmark directory {}", root.display())))?
        .to_string();
    let mut paths: Vec<_> = fs::read_dir(root.join("tables"))
        .map_err(io)?
        .map(|e| e.map(|e| e.path()).map_err(io))
        .collect::<Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|x| x == "csv"));
    paths.sort();
    let mut db = Database::new();
    for p in paths {
        let id = p.file_stem().and_then(|s| s.to_str()).expect("csv files have a stem");
        db.insert(Table::load_csv(id, &p)?);
    }
    let demo = DemoGrid::load(&root.join("demo.json"))?;
    let gt_text = fs::read_to_string(root.join("gt.json")).map_err(io)?;
    let gt: Query = serde_json::from_str(&gt_text).map_err(|e| Error::Malformed(format!("gt.json: {e}")))?;
    Ok(Benchmark { name, db, demo, gt })
}

/// Every benchmark directory under `dir`, by name.
pub fn load_suite(dir: &Path) -> Result<Vec<Benchmark>> {
    let mut roots: Vec<_> = fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()).map_err(io))
        .collect::<Result<_>>()?;
    roots.retain(|p| p.is_dir());
    roots.sort();
    roots.iter().map(|r| load_benchmark(r)).collect()
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

/// A 12-row sales table: region, quarter, product, units, revenue.
pub fn sales_table() -> Table {
    let regions = ["East", "West", "North"];
    let products = ["pen", "ink"];
    let mut rows = Vec::new();
    for (i, region) in regions.iter().enumerate() {
        for q in 1..=4usize {
            let product = products[(i + q) % 2];
            let units = (7 * i + 3 * q + (i * q) % 5) as f64 + 2.0;
            let revenue = units * (4.0 + i as f64) + (q * q) as f64;
            rows.push(vec![
                Value::from(*region),
                Value::Number(q as f64),
                Value::from(product),
                Value::Number(units),
                Value::Number(revenue),
            ]);
        }
    }
    let columns = ["region", "quarter", "product", "units", "revenue"].map(String::from).to_vec();
    Table::new("S", Some(columns), rows).expect("sales rows are rectangular")
}

/// Ground truths of the generated suite, by name.
pub fn suite_queries() -> Vec<(&'static str, Query)> {
    let s = || Box::new(Query::table("S"));
    let group = |keys: Vec<usize>, func: Func, target: usize| Query::Group {
        input: s(),
        keys: keys.into(),
        func: func.into(),
        target: target.into(),
    };
    let partition = |input: Box<Query>, keys: Vec<usize>, func: Func, target: usize| Query::Partition {
        input,
        keys: keys.into(),
        func: func.into(),
        target: target.into(),
    };
    let arithmetic = |input: Box<Query>, func: Func, cols: Vec<usize>| Query::Arithmetic {
        input,
        func: func.into(),
        cols: cols.into(),
    };
    vec![
        ("region_revenue", group(vec![1], Func::Sum, 5)),
        ("product_units_max", group(vec![3], Func::Max, 4)),
        ("region_orders", group(vec![1], Func::Count, 2)),
        ("running_units", partition(s(), vec![1], Func::Cumsum, 4)),
        ("revenue_rank", partition(s(), vec![3], Func::Rank, 5)),
        ("region_avg_revenue", partition(s(), vec![1], Func::Avg, 5)),
        ("unit_price", arithmetic(s(), Func::Div, vec![5, 4])),
        ("revenue_share", arithmetic(Box::new(partition(s(), vec![1], Func::Sum, 5)), Func::PercentOf, vec![5, 6])),
        ("margin", arithmetic(s(), Func::Sub, vec![5, 4])),
        (
            "running_region_share",
            arithmetic(
                Box::new(partition(Box::new(group(vec![1, 2], Func::Sum, 5)), vec![1], Func::Cumsum, 3)),
                Func::PercentOf,
                vec![3, 4],
            ),
        ),
    ]
}

/// The ten-item suite over [`sales_table`].
pub fn generate_suite(seed: u64) -> Result<Vec<Benchmark>> {
    let db = Database::from_tables([sales_table()]);
    suite_queries()
        .into_iter()
        .enumerate()
        .map(|(i, (name, gt))| {
            let (db, demo) = generate_demo(&db, &gt, seed.wrapping_add(i as u64))?;
            Ok(Benchmark {
                name: name.to_string(),
                db,
                demo,
                gt,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consistency::prov_consistent;
    use crate::running_example;

    #[test]
    fn golden_demo_truncates_long_sums() {
        let db = running_example::database();
        let gt = running_example::golden_query();
        let mut truncated = false;
        for seed in 0..20 {
            let (sampled, demo) = generate_demo(&db, &gt, seed).unwrap();
            let star = eval_prov(&gt, &sampled).unwrap();
            assert!(prov_consistent(&star, &demo).is_some());
            truncated |= demo.cells().any(|e| format!("{e}").contains('◇'));
        }
        assert!(truncated);
    }

    #[test]
    fn projection_demo_is_bare_refs() {
        let db = running_example::database();
        let gt = Query::Proj {
            input: Box::new(Query::table("T")),
            cols: vec![1].into(),
        };
        let (_, demo) = generate_demo(&db, &gt, 3).unwrap();
        assert_eq!(demo.num_rows(), 2);
        assert!(demo.cells().all(|e| matches!(e, DemoExpr::Ref(_))));
    }

    #[test]
    fn deterministic_per_seed() {
        let db = running_example::database();
        let gt = running_example::golden_query();
        assert_eq!(generate_demo(&db, &gt, 7).unwrap().1, generate_demo(&db, &gt, 7).unwrap().1);
    }

    #[test]
    fn one_row_outputs_are_rejected() {
        let db = running_example::database();
        let gt = Query::Group {
            input: Box::new(Query::table("T")),
            keys: vec![].into(),
            func: Func::Sum.into(),
            target: 4.into(),
        };
        assert!(matches!(generate_demo(&db, &gt, 0), Err(Error::Malformed(_))));
    }

    #[test]
    fn large_inputs_are_sampled() {
        let rows: Vec<Vec<Value>> = (0..50).map(|i| vec![Value::Number(i as f64)]).collect();
        let db = Database::from_tables([Table::new("A", None, rows).unwrap()]);
        let (sampled, _) = generate_demo(&db, &Query::table("A"), 1).unwrap();
        assert_eq!(sampled.get("A").unwrap().num_rows(), SAMPLE_ROWS);
    }

    #[test]
    fn suite_round_trips_through_disk() {
        let suite = generate_suite(0).unwrap();
        assert_eq!(suite.len(), 10);
        let dir = tempfile::tempdir().unwrap();
        for b in &suite {
            save_benchmark(b, dir.path()).unwrap();
        }
        let loaded = load_suite(dir.path()).unwrap();
        assert_eq!(loaded.len(), 10);
        for b in &loaded {
            let orig = suite.iter().find(|o| o.name == b.name).unwrap();
            assert_eq!(b.gt, orig.gt);
            assert_eq!(b.demo, orig.demo);
            assert!(b.db.get("S").unwrap().same_content(orig.db.get("S").unwrap()));
        }
    }

    #[test]
    fn empty_suite_gives_empty_report() {
        let rows = run_suite(&[], &[PrunerKind::Provenance], &SynthConfig::default());
        assert!(rows.is_empty());
        assert_eq!(report_csv(&rows), "bench,pruner,solved,seconds,visited,pruned,gt_rank\n");
    }
}
