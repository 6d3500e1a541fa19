//! SQL text for concrete queries. The output is advisory and never parsed
//! back.

use crate::error::{Error, Result};
use crate::func::Func;
use crate::query::{Atom, CmpOp, Operand, Predicate, Query, Slot, SortOrder};
use crate::table::{dedup_names, Database};
use crate::value::Value;

/// Renders a concrete query as nested subqueries.
pub fn to_sql(q: &Query, db: &Database) -> Result<String> {
    Ok(render(q, db)?.0)
}

fn filled<T>(s: &Slot<T>) -> Result<&T> {
    s.filled().ok_or(Error::NotConcrete)
}

/// Keywords that cannot be used as bare column names.
const RESERVED: [&str; 24] = [
    "all", "and", "as", "asc", "between", "by", "case", "desc", "from", "group", "having", "in", "is", "join", "left",
    "not", "null", "on", "or", "order", "over", "partition", "select", "where",
];

fn ident(name: &str) -> String {
    let plain = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !RESERVED.contains(&name.to_ascii_lowercase().as_str());
    if plain {
        name.to_string()
    } else {
        format!("\"{}\"", name.replace('"', "\"\""))
    }
}

fn literal(v: &Value) -> String {
    match v {
        Value::Text(s) => format!("'{}'", s.replace('\'', "''")),
        Value::Null => "Null".to_string(),
        n => n.to_string(),
    }
}

fn col(names: &[String], c: usize) -> Result<String> {
    names
        .get(c.wrapping_sub(1))
        .map(|n| ident(n))
        .ok_or(Error::BadColumn { col: c, arity: names.len() })
}

fn cols(names: &[String], cs: &[usize]) -> Result<Vec<String>> {
    cs.iter().map(|&c| col(names, c)).collect()
}

fn op_text(op: CmpOp) -> &'static str {
    op.symbol()
}

fn atom_text(a: &Atom, name: &dyn Fn(usize) -> Result<String>) -> Result<String> {
    let rhs = match &a.rhs {
        Operand::Col(c) => name(*c)?,
        Operand::Const(v) => literal(v),
    };
    Ok(format!("{} {} {}", name(a.lhs)?, op_text(a.op), rhs))
}

fn pred_text(p: &Predicate, name: &dyn Fn(usize) -> Result<String>) -> Result<String> {
    Ok(match p {
        Predicate::True => "True".to_string(),
        Predicate::False => "False".to_string(),
        Predicate::And { atoms } => atoms
            .iter()
            .map(|a| atom_text(a, name))
            .collect::<Result<Vec<_>>>()?
            .join(" And "),
    })
}

fn title(func: Func) -> &'static str {
    match func {
        Func::Sum | Func::Cumsum => "Sum",
        Func::Avg => "Avg",
        Func::Max => "Max",
        Func::Min => "Min",
        Func::Count => "Count",
        Func::Rank => "Rank",
        Func::DenseRank => "Dense_Rank",
        _ => unreachable!("not an aggregate"),
    }
}

fn derived(func: Func, parts: &[&String]) -> String {
    let mut s = func.name().to_string();
    for p in parts {
        s.push('_');
        s.push_str(p);
    }
    s
}

fn join_select(ln: &[String], rn: &[String]) -> (Vec<String>, String) {
    let names = dedup_names(ln.iter().chain(rn).cloned().collect());
    let items: Vec<String> = ln
        .iter()
        .map(|n| format!("l.{}", ident(n)))
        .chain(rn.iter().map(|n| format!("r.{}", ident(n))))
        .zip(&names)
        .map(|(src, out)| format!("{src} As {}", ident(out)))
        .collect();
    (names, items.join(", "))
}

fn render(q: &Query, db: &Database) -> Result<(String, Vec<String>)> {
    Ok(match q {
        Query::Table { id } => {
            let t = db.get(id)?;
            (format!("Select * From {}", ident(id)), t.columns.clone())
        }
        Query::Filter { input, pred } => {
            let (inner, names) = render(input, db)?;
            let p = pred_text(filled(pred)?, &|c| col(&names, c))?;
            (format!("Select * From ({inner}) As t Where {p}"), names)
        }
        Query::Join { left, right } => {
            let (l, ln) = render(left, db)?;
            let (r, rn) = render(right, db)?;
            let (names, items) = join_select(&ln, &rn);
            (format!("Select {items} From ({l}) As l Cross Join ({r}) As r"), names)
        }
        Query::LeftJoin { left, right, pred } => {
            let (l, ln) = render(left, db)?;
            let (r, rn) = render(right, db)?;
            let split = ln.len();
            let side = |c: usize| -> Result<String> {
                if c >= 1 && c <= split {
                    Ok(format!("l.{}", col(&ln, c)?))
                } else {
                    Ok(format!("r.{}", col(&rn, c.wrapping_sub(split))?))
                }
            };
            let p = pred_text(filled(pred)?, &side)?;
            let (names, items) = join_select(&ln, &rn);
            (format!("Select {items} From ({l}) As l Left Join ({r}) As r On {p}"), names)
        }
        Query::Proj { input, cols: cs } => {
            let (inner, names) = render(input, db)?;
            let cs = filled(cs)?;
            let out = dedup_names(cs.iter().map(|&c| names.get(c.wrapping_sub(1)).cloned().unwrap_or_default()).collect());
            let items: Vec<String> = cols(&names, cs)?
                .into_iter()
                .zip(&out)
                .map(|(src, o)| if src == ident(o) { src } else { format!("{src} As {}", ident(o)) })
                .collect();
            (format!("Select {} From ({inner}) As t", items.join(", ")), out)
        }
        Query::Sort { input, cols: cs, order } => {
            let (inner, names) = render(input, db)?;
            let dir = match filled(order)? {
                SortOrder::Asc => "Asc",
                SortOrder::Desc => "Desc",
            };
            let keys: Vec<String> = cols(&names, filled(cs)?)?.into_iter().map(|c| format!("{c} {dir}")).collect();
            (format!("Select * From ({inner}) As t Order By {}", keys.join(", ")), names)
        }
        Query::Group {
            input,
            keys,
            func,
            target,
        } => {
            let (inner, names) = render(input, db)?;
            let (keys, func, target) = (filled(keys)?, *filled(func)?, *filled(target)?);
            let key_text = cols(&names, keys)?.join(", ");
            let agg_name = derived(func, &[names.get(target.wrapping_sub(1)).ok_or(Error::BadColumn {
                col: target,
                arity: names.len(),
            })?]);
            let mut out: Vec<String> = keys.iter().map(|&k| names[k - 1].clone()).collect();
            out.push(agg_name);
            let out = dedup_names(out);
            let sql = format!(
                "Select {key_text}, {}({}) As {} From ({inner}) As t Group By {key_text}",
                title(func),
                col(&names, target)?,
                ident(out.last().expect("aggregate column"))
            );
            (sql, out)
        }
        Query::Partition {
            input,
            keys,
            func,
            target,
        } => {
            let (inner, names) = render(input, db)?;
            let (keys, func, target) = (filled(keys)?, *filled(func)?, *filled(target)?);
            let tcol = col(&names, target)?;
            let mut window = format!("Partition By {}", cols(&names, keys)?.join(", "));
            let sort = match &**input {
                Query::Sort { cols: cs, order, .. } => Some((filled(cs)?, *filled(order)?)),
                _ => None,
            };
            let sort_keys = |sort: Option<(&Vec<usize>, SortOrder)>| -> Result<Option<String>> {
                let Some((cs, order)) = sort else { return Ok(None) };
                let dir = if order == SortOrder::Asc { "Asc" } else { "Desc" };
                Ok(Some(cols(&names, cs)?.into_iter().map(|c| format!("{c} {dir}")).collect::<Vec<_>>().join(", ")))
            };
            let call = match func {
                Func::Rank | Func::DenseRank => {
                    window.push_str(&format!(" Order By {tcol} Desc"));
                    format!("{}()", title(func))
                }
                Func::Cumsum => {
                    if let Some(k) = sort_keys(sort)? {
                        window.push_str(&format!(" Order By {k}"));
                    }
                    window.push_str(" Rows Between Unbounded Preceding And Current Row");
                    format!("Sum({tcol})")
                }
                f => format!("{}({tcol})", title(f)),
            };
            let mut out = names.clone();
            out.push(derived(func, &[&names[target - 1]]));
            let out = dedup_names(out);
            let sql = format!(
                "Select *, {call} Over ({window}) As {} From ({inner}) As t",
                ident(out.last().expect("window column"))
            );
            (sql, out)
        }
        Query::Arithmetic { input, func, cols: cs } => {
            let (inner, names) = render(input, db)?;
            let (func, cs) = (*filled(func)?, filled(cs)?);
            let (a, b) = match cs.as_slice() {
                [a, b] => (*a, *b),
                _ => {
                    return Err(Error::Arity {
                        func: "arithmetic",
                        expected: 2,
                        found: cs.len(),
                    })
                }
            };
            let (x, y) = (col(&names, a)?, col(&names, b)?);
            let expr = match func {
                Func::Add => format!("{x} + {y}"),
                Func::Sub => format!("{x} - {y}"),
                Func::Mul => format!("{x} * {y}"),
                Func::Div => format!("{x} / {y}"),
                Func::PercentOf => format!("{x} / {y} * 100"),
                _ => unreachable!("not an arithmetic template"),
            };
            let mut out = names.clone();
            out.push(derived(func, &[&names[a - 1], &names[b - 1]]));
            let out = dedup_names(out);
            let sql = format!(
                "Select *, {expr} As {} From ({inner}) As t",
                ident(out.last().expect("arithmetic column"))
            );
            (sql, out)
        }
    })
}
