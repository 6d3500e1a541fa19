//! Concrete and provenance-tracking evaluation of concrete queries.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::expr::{CellRef, ProvExpr};
use crate::func::Func;
use crate::grid::ProvTable;
use crate::query::{Predicate, Query, Slot, SortOrder};
use crate::table::{dedup_names, Database, Table};
use crate::value::Value;

/// Partitions row indices (0-based) by equality on the key columns.
/// Groups appear in order of first appearance; rows keep their order within
/// a group.
pub fn extract_groups(t: &Table, keys: &[usize]) -> Vec<Vec<usize>> {
    group_rows(&t.rows, keys)
}

pub(crate) fn group_rows(rows: &[Vec<Value>], keys: &[usize]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let same_key = |g: &&mut Vec<usize>| keys.iter().all(|&k| rows[g[0]][k - 1] == row[k - 1]);
        match groups.iter_mut().find(same_key) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    groups
}

/// Stable order of row indices by the given key columns.
pub(crate) fn sorted_order(rows: &[Vec<Value>], cols: &[usize], order: SortOrder) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..rows.len()).collect();
    idx.sort_by(|&a, &b| {
        let ord = cols
            .iter()
            .map(|&c| rows[a][c - 1].total_cmp(&rows[b][c - 1]))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal);
        match order {
            SortOrder::Asc => ord,
            SortOrder::Desc => ord.reverse(),
        }
    });
    idx
}

fn filled<T>(slot: &Slot<T>) -> Result<&T> {
    slot.filled().ok_or(Error::NotConcrete)
}

fn check_cols(cols: &[usize], arity: usize) -> Result<()> {
    match cols.iter().find(|&&c| c == 0 || c > arity) {
        Some(&col) => Err(Error::BadColumn { col, arity }),
        None => Ok(()),
    }
}

fn check_pred(pred: &Predicate, arity: usize) -> Result<()> {
    check_cols(&pred.columns(), arity)
}

fn derived_name(func: Func, names: &[&str]) -> String {
    let mut out = func.name().to_string();
    for n in names {
        out.push('_');
        out.push_str(n);
    }
    out
}

fn arith_args(cols: &[usize]) -> Result<(usize, usize)> {
    match cols {
        [a, b] => Ok((*a, *b)),
        _ => Err(Error::Arity {
            func: "arithmetic",
            expected: 2,
            found: cols.len(),
        }),
    }
}

/// Evaluates a concrete query to a plain table.
pub fn eval(q: &Query, db: &Database) -> Result<Table> {
    let (columns, rows) = eval_values(q, db)?;
    Table::new("result", Some(columns), rows)
}

type Rows = (Vec<String>, Vec<Vec<Value>>);

fn eval_values(q: &Query, db: &Database) -> Result<Rows> {
    match q {
        Query::Table { id } => {
            let t = db.get(id)?;
            Ok((t.columns.clone(), t.rows.clone()))
        }
        Query::Filter { input, pred } => {
            let (cols, rows) = eval_values(input, db)?;
            let pred = filled(pred)?;
            check_pred(pred, cols.len())?;
            let rows = rows.into_iter().filter(|r| pred.holds(r)).collect();
            Ok((cols, rows))
        }
        Query::Join { left, right } => {
            let (lc, lr) = eval_values(left, db)?;
            let (rc, rr) = eval_values(right, db)?;
            let rows = lr
                .iter()
                .flat_map(|l| rr.iter().map(move |r| l.iter().chain(r).cloned().collect()))
                .collect();
            Ok((dedup_names(lc.into_iter().chain(rc).collect()), rows))
        }
        Query::LeftJoin { left, right, pred } => {
            let (lc, lr) = eval_values(left, db)?;
            let (rc, rr) = eval_values(right, db)?;
            let pred = filled(pred)?;
            check_pred(pred, lc.len() + rc.len())?;
            let mut rows = Vec::new();
            for l in &lr {
                let before = rows.len();
                for r in &rr {
                    let row: Vec<Value> = l.iter().chain(r).cloned().collect();
                    if pred.holds(&row) {
                        rows.push(row);
                    }
                }
                if rows.len() == before {
                    let mut row = l.clone();
                    row.resize(lc.len() + rc.len(), Value::Null);
                    rows.push(row);
                }
            }
            Ok((dedup_names(lc.into_iter().chain(rc).collect()), rows))
        }
        Query::Proj { input, cols } => {
            let (names, rows) = eval_values(input, db)?;
            let cols = filled(cols)?;
            check_cols(cols, names.len())?;
            let names = dedup_names(cols.iter().map(|&c| names[c - 1].clone()).collect());
            let rows = rows.iter().map(|r| cols.iter().map(|&c| r[c - 1].clone()).collect()).collect();
            Ok((names, rows))
        }
        Query::Sort { input, cols, order } => {
            let (names, rows) = eval_values(input, db)?;
            let cols = filled(cols)?;
            check_cols(cols, names.len())?;
            let order = sorted_order(&rows, cols, *filled(order)?);
            let rows = order.into_iter().map(|i| rows[i].clone()).collect();
            Ok((names, rows))
        }
        Query::Group {
            input,
            keys,
            func,
            target,
        } => {
            let (names, rows) = eval_values(input, db)?;
            let (keys, func, target) = (filled(keys)?, *filled(func)?, *filled(target)?);
            check_cols(keys, names.len())?;
            check_cols(&[target], names.len())?;
            let mut out = Vec::new();
            for g in group_rows(&rows, keys) {
                let mut row: Vec<Value> = keys.iter().map(|&k| rows[g[0]][k - 1].clone()).collect();
                let vals: Vec<Value> = g.iter().map(|&i| rows[i][target - 1].clone()).collect();
                row.push(func.apply(&vals)?);
                out.push(row);
            }
            let mut out_names: Vec<String> = keys.iter().map(|&k| names[k - 1].clone()).collect();
            out_names.push(derived_name(func, &[&names[target - 1]]));
            Ok((dedup_names(out_names), out))
        }
        Query::Partition {
            input,
            keys,
            func,
            target,
        } => {
            let (mut names, mut rows) = eval_values(input, db)?;
            let (keys, func, target) = (filled(keys)?, *filled(func)?, *filled(target)?);
            check_cols(keys, names.len())?;
            check_cols(&[target], names.len())?;
            let mut extra = vec![Value::Null; rows.len()];
            for g in group_rows(&rows, keys) {
                let vals: Vec<Value> = g.iter().map(|&i| rows[i][target - 1].clone()).collect();
                for (pos, &i) in g.iter().enumerate() {
                    extra[i] = match func {
                        Func::Cumsum => Func::Sum.apply(&vals[..=pos])?,
                        Func::Rank | Func::DenseRank => {
                            let own = &vals[pos];
                            let greater: Vec<&Value> =
                                vals.iter().filter(|v| v.total_cmp(own) == Ordering::Greater).collect();
                            let n = if func == Func::Rank {
                                greater.len()
                            } else {
                                let mut distinct: Vec<&Value> = Vec::new();
                                for v in greater {
                                    if !distinct.iter().any(|d| d.total_cmp(v) == Ordering::Equal) {
                                        distinct.push(v);
                                    }
                                }
                                distinct.len()
                            };
                            Value::Number(1.0 + n as f64)
                        }
                        _ => func.apply(&vals)?,
                    };
                }
            }
            for (row, v) in rows.iter_mut().zip(extra) {
                row.push(v);
            }
            let name = derived_name(func, &[&names[target - 1]]);
            names.push(name);
            Ok((dedup_names(names), rows))
        }
        Query::Arithmetic { input, func, cols } => {
            let (mut names, mut rows) = eval_values(input, db)?;
            let (func, cols) = (*filled(func)?, filled(cols)?);
            check_cols(cols, names.len())?;
            let (a, b) = arith_args(cols)?;
            for row in rows.iter_mut() {
                let v = func.apply(&[row[a - 1].clone(), row[b - 1].clone()])?;
                row.push(v);
            }
            let name = derived_name(func, &[&names[a - 1], &names[b - 1]]);
            names.push(name);
            Ok((dedup_names(names), rows))
        }
    }
}

/// A provenance table together with the values of its cells.
#[derive(Debug, Clone)]
pub struct Traced {
    pub prov: ProvTable,
    pub values: Vec<Vec<Value>>,
}

/// Provenance-tracking evaluation: each output cell is an expression over
/// input cell references.
pub fn eval_prov(q: &Query, db: &Database) -> Result<ProvTable> {
    Ok(eval_traced(q, db)?.prov)
}

/// Like [`eval_prov`] but also returns every cell's value.
pub fn eval_traced(q: &Query, db: &Database) -> Result<Traced> {
    eval_traced_capped(q, db, usize::MAX)
}

/// Like [`eval_traced`], failing with [`Error::TooLarge`] instead of building
/// a join result with more than `max_rows` rows.
pub fn eval_traced_capped(q: &Query, db: &Database, max_rows: usize) -> Result<Traced> {
    let eval_traced = |q: &Query, db: &Database| eval_traced_capped(q, db, max_rows);
    let check = |l: &Traced, r: &Traced| {
        if l.values.len().saturating_mul(r.values.len().max(1)) > max_rows {
            Err(Error::TooLarge(max_rows))
        } else {
            Ok(())
        }
    };
    match q {
        Query::Table { id } => {
            let t = db.get(id)?;
            let rows = (1..=t.num_rows())
                .map(|i| (1..=t.arity()).map(|j| ProvExpr::Ref(CellRef::new(id, i, j))).collect())
                .collect();
            Ok(Traced {
                prov: ProvTable {
                    columns: t.columns.clone(),
                    rows,
                },
                values: t.rows.clone(),
            })
        }
        Query::Filter { input, pred } => {
            let t = eval_traced(input, db)?;
            let pred = filled(pred)?;
            check_pred(pred, t.prov.arity())?;
            let keep: Vec<usize> = (0..t.values.len()).filter(|&i| pred.holds(&t.values[i])).collect();
            Ok(select_rows(t, &keep))
        }
        Query::Join { left, right } => {
            let (l, r) = (eval_traced(left, db)?, eval_traced(right, db)?);
            check(&l, &r)?;
            let pairs: Vec<(usize, Option<usize>)> = (0..l.values.len())
                .flat_map(|i| (0..r.values.len()).map(move |j| (i, Some(j))))
                .collect();
            Ok(concat_rows(&l, &r, &pairs))
        }
        Query::LeftJoin { left, right, pred } => {
            let (l, r) = (eval_traced(left, db)?, eval_traced(right, db)?);
            check(&l, &r)?;
            let pred = filled(pred)?;
            check_pred(pred, l.prov.arity() + r.prov.arity())?;
            let mut pairs = Vec::new();
            for i in 0..l.values.len() {
                let before = pairs.len();
                for j in 0..r.values.len() {
                    let row: Vec<Value> = l.values[i].iter().chain(&r.values[j]).cloned().collect();
                    if pred.holds(&row) {
                        pairs.push((i, Some(j)));
                    }
                }
                if pairs.len() == before {
                    pairs.push((i, None));
                }
            }
            Ok(concat_rows(&l, &r, &pairs))
        }
        Query::Proj { input, cols } => {
            let t = eval_traced(input, db)?;
            let cols = filled(cols)?;
            check_cols(cols, t.prov.arity())?;
            let mut prov = t.prov.project(cols);
            prov.columns = dedup_names(prov.columns);
            let values = t.values.iter().map(|r| cols.iter().map(|&c| r[c - 1].clone()).collect()).collect();
            Ok(Traced { prov, values })
        }
        Query::Sort { input, cols, order } => {
            let t = eval_traced(input, db)?;
            let cols = filled(cols)?;
            check_cols(cols, t.prov.arity())?;
            let order = sorted_order(&t.values, cols, *filled(order)?);
            Ok(select_rows(t, &order))
        }
        Query::Group {
            input,
            keys,
            func,
            target,
        } => {
            let t = eval_traced(input, db)?;
            let (keys, func, target) = (filled(keys)?, *filled(func)?, *filled(target)?);
            check_cols(keys, t.prov.arity())?;
            check_cols(&[target], t.prov.arity())?;
            let mut rows = Vec::new();
            let mut values = Vec::new();
            for g in group_rows(&t.values, keys) {
                let mut row: Vec<ProvExpr> = keys
                    .iter()
                    .map(|&k| ProvExpr::Group(g.iter().map(|&i| t.prov.rows[i][k - 1].clone()).collect()))
                    .collect();
                row.push(ProvExpr::flat_app(func, g.iter().map(|&i| t.prov.rows[i][target - 1].clone())));
                let mut vrow: Vec<Value> = keys.iter().map(|&k| t.values[g[0]][k - 1].clone()).collect();
                let vals: Vec<Value> = g.iter().map(|&i| t.values[i][target - 1].clone()).collect();
                vrow.push(func.apply(&vals)?);
                rows.push(row);
                values.push(vrow);
            }
            let mut names: Vec<String> = keys.iter().map(|&k| t.prov.columns[k - 1].clone()).collect();
            names.push(derived_name(func, &[&t.prov.columns[target - 1]]));
            Ok(Traced {
                prov: ProvTable {
                    columns: dedup_names(names),
                    rows,
                },
                values,
            })
        }
        Query::Partition {
            input,
            keys,
            func,
            target,
        } => {
            let mut t = eval_traced(input, db)?;
            let (keys, func, target) = (filled(keys)?, *filled(func)?, *filled(target)?);
            check_cols(keys, t.prov.arity())?;
            check_cols(&[target], t.prov.arity())?;
            let n = t.values.len();
            let mut extra: Vec<Option<ProvExpr>> = vec![None; n];
            for g in group_rows(&t.values, keys) {
                let cells: Vec<ProvExpr> = g.iter().map(|&i| t.prov.rows[i][target - 1].clone()).collect();
                for (pos, &i) in g.iter().enumerate() {
                    let e = match func {
                        Func::Cumsum => ProvExpr::flat_app(Func::Sum, cells[..=pos].iter().cloned()),
                        Func::Rank | Func::DenseRank => {
                            let own = std::iter::once(cells[pos].clone());
                            let others = cells.iter().enumerate().filter(|(k, _)| *k != pos).map(|(_, c)| c.clone());
                            ProvExpr::App(func, own.chain(others).collect())
                        }
                        _ => ProvExpr::flat_app(func, cells.iter().cloned()),
                    };
                    extra[i] = Some(e);
                }
            }
            for (i, e) in extra.into_iter().enumerate() {
                let e = e.expect("every row belongs to a group");
                let v = e.eval(db)?;
                t.prov.rows[i].push(e);
                t.values[i].push(v);
            }
            let name = derived_name(func, &[&t.prov.columns[target - 1]]);
            t.prov.columns.push(name);
            t.prov.columns = dedup_names(std::mem::take(&mut t.prov.columns));
            Ok(t)
        }
        Query::Arithmetic { input, func, cols } => {
            let mut t = eval_traced(input, db)?;
            let (func, cols) = (*filled(func)?, filled(cols)?);
            check_cols(cols, t.prov.arity())?;
            let (a, b) = arith_args(cols)?;
            for i in 0..t.values.len() {
                let (x, y) = (t.prov.rows[i][a - 1].clone(), t.prov.rows[i][b - 1].clone());
                let e = arith_expr(func, x, y);
                let v = func.apply(&[t.values[i][a - 1].clone(), t.values[i][b - 1].clone()])?;
                t.prov.rows[i].push(e);
                t.values[i].push(v);
            }
            let name = derived_name(func, &[&t.prov.columns[a - 1], &t.prov.columns[b - 1]]);
            t.prov.columns.push(name);
            t.prov.columns = dedup_names(std::mem::take(&mut t.prov.columns));
            Ok(t)
        }
    }
}

/// Provenance of a binary arithmetic template; `percent_of` unfolds to
/// `mul(div(x, y), 100)`.
pub fn arith_expr(func: Func, x: ProvExpr, y: ProvExpr) -> ProvExpr {
    match func {
        Func::PercentOf => ProvExpr::App(
            Func::Mul,
            vec![ProvExpr::App(Func::Div, vec![x, y]), ProvExpr::Const(Value::Number(100.0))],
        ),
        f => ProvExpr::App(f, vec![x, y]),
    }
}

fn select_rows(t: Traced, idx: &[usize]) -> Traced {
    Traced {
        prov: ProvTable {
            columns: t.prov.columns,
            rows: idx.iter().map(|&i| t.prov.rows[i].clone()).collect(),
        },
        values: idx.iter().map(|&i| t.values[i].clone()).collect(),
    }
}

fn concat_rows(l: &Traced, r: &Traced, pairs: &[(usize, Option<usize>)]) -> Traced {
    let ra = r.prov.arity();
    let mut rows = Vec::with_capacity(pairs.len());
    let mut values = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        let mut row = l.prov.rows[i].clone();
        let mut vrow = l.values[i].clone();
        match j {
            Some(j) => {
                row.extend(r.prov.rows[j].iter().cloned());
                vrow.extend(r.values[j].iter().cloned());
            }
            None => {
                row.extend(std::iter::repeat_n(ProvExpr::Const(Value::Null), ra));
                vrow.extend(std::iter::repeat_n(Value::Null, ra));
            }
        }
        rows.push(row);
        values.push(vrow);
    }
    let columns = dedup_names(l.prov.columns.iter().chain(&r.prov.columns).cloned().collect());
    Traced {
        prov: ProvTable { columns, rows },
        values,
    }
}
