//! Whether provenance generalizes a demonstration, cell by cell and table
//! by table.

use serde::{Deserialize, Serialize};

use crate::expr::{DemoExpr, ProvExpr};
use crate::grid::{DemoGrid, ProvTable};

/// Row and column correspondence between a demonstration and a table.
/// `rows[i]` and `cols[j]` are the 1-based table row and column matched by
/// demonstration row `i + 1` and column `j + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// `e ≺ e★`: the demonstration expression is a generalization-compatible
/// view of the provenance expression.
pub fn expr_generalizes(e: &DemoExpr, star: &ProvExpr) -> bool {
    if let ProvExpr::Group(members) = star {
        return members.iter().any(|m| expr_generalizes(e, m));
    }
    match (e, star) {
        (DemoExpr::Const { value }, ProvExpr::Const(v)) => value == v,
        (DemoExpr::Ref(r), ProvExpr::Ref(s)) => r == s,
        (DemoExpr::App { func, args, partial }, ProvExpr::App(g, sargs)) if func == g => {
            if *partial {
                if func.is_commutative() {
                    bipartite_embed(args, sargs)
                } else {
                    subsequence_embed(args, sargs)
                }
            } else if args.len() != sargs.len() {
                false
            } else if func.is_commutative() {
                bipartite_embed(args, sargs)
            } else {
                args.iter().zip(sargs).all(|(a, s)| expr_generalizes(a, s))
            }
        }
        _ => false,
    }
}

// Each demo argument matched to a distinct provenance argument.
fn bipartite_embed(args: &[DemoExpr], sargs: &[ProvExpr]) -> bool {
    if args.len() > sargs.len() {
        return false;
    }
    let adj: Vec<Vec<usize>> = args
        .iter()
        .map(|a| (0..sargs.len()).filter(|&k| expr_generalizes(a, &sargs[k])).collect())
        .collect();
    let caps = vec![1; sargs.len()];
    capacity_matching(&adj, &caps).is_some()
}

// Demo arguments embed into provenance arguments in order.
fn subsequence_embed(args: &[DemoExpr], sargs: &[ProvExpr]) -> bool {
    let mut k = 0;
    for a in args {
        while k < sargs.len() && !expr_generalizes(a, &sargs[k]) {
            k += 1;
        }
        if k == sargs.len() {
            return false;
        }
        k += 1;
    }
    true
}

/// Flattens nested applications of the same flattenable function in a
/// demonstration expression; the result is partial if any flattened level was.
pub fn simplify_demo(e: &DemoExpr) -> DemoExpr {
    match e {
        DemoExpr::App { func, args, partial } => {
            let mut out = Vec::new();
            let mut partial = *partial;
            for a in args.iter().map(simplify_demo) {
                match a {
                    DemoExpr::App {
                        func: g,
                        args: inner,
                        partial: p,
                    } if g == *func && func.is_flattenable() => {
                        partial |= p;
                        out.extend(inner);
                    }
                    other => out.push(other),
                }
            }
            DemoExpr::App {
                func: *func,
                args: out,
                partial,
            }
        }
        other => other.clone(),
    }
}

/// Maximum matching of left nodes into right nodes with per-node capacities.
/// Returns the right node of every left node when all left nodes fit.
pub fn capacity_matching(adj: &[Vec<usize>], caps: &[usize]) -> Option<Vec<usize>> {
    fn augment(
        i: usize,
        adj: &[Vec<usize>],
        caps: &[usize],
        seen: &mut [bool],
        holders: &mut [Vec<usize>],
        assign: &mut [usize],
    ) -> bool {
        for &r in &adj[i] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if holders[r].len() < caps[r] {
                holders[r].push(i);
                assign[i] = r;
                return true;
            }
            for slot in 0..holders[r].len() {
                let other = holders[r][slot];
                if augment(other, adj, caps, seen, holders, assign) {
                    holders[r][slot] = i;
                    assign[i] = r;
                    return true;
                }
            }
        }
        false
    }
    let mut holders = vec![Vec::new(); caps.len()];
    let mut assign = vec![usize::MAX; adj.len()];
    for i in 0..adj.len() {
        let mut seen = vec![false; caps.len()];
        if !augment(i, adj, caps, &mut seen, &mut holders, &mut assign) {
            return None;
        }
    }
    Some(assign)
}

/// Searches injective row and column maps from an `m × n` demonstration into
/// a table with `caps.len()` rows (row `r` usable `caps[r]` times) and
/// `ncols` columns. `cell_ok(i, j, r, c)` decides one demo cell against one
/// table cell (all 0-based). With `cols` given, only that column map is tried.
pub fn find_witness(
    m: usize,
    n: usize,
    caps: &[usize],
    ncols: usize,
    cols: Option<&[usize]>,
    cell_ok: impl Fn(usize, usize, usize, usize) -> bool,
) -> Option<MatchWitness> {
    let nrows = caps.len();
    if m == 0 || n == 0 {
        return Some(MatchWitness {
            rows: vec![],
            cols: vec![],
        });
    }
    if n > ncols || caps.iter().sum::<usize>() < m {
        return None;
    }
    let candidates: Vec<Vec<usize>> = match cols {
        Some(fixed) => {
            if fixed.len() != n || fixed.iter().any(|&c| c >= ncols) {
                return None;
            }
            fixed.iter().map(|&c| vec![c]).collect()
        }
        None => (0..n).map(|_| (0..ncols).collect()).collect(),
    };
    // ok[(i * n + j) * ncols + c] lists the rows where demo cell (i, j) fits column c.
    let mut fits = vec![Vec::new(); m * n * ncols];
    for j in 0..n {
        for &c in &candidates[j] {
            for i in 0..m {
                fits[(i * n + j) * ncols + c] = (0..nrows).filter(|&r| cell_ok(i, j, r, c)).collect();
            }
        }
    }
    let column_ok = |j: usize, c: usize| (0..m).all(|i| !fits[(i * n + j) * ncols + c].is_empty());
    let candidates: Vec<Vec<usize>> = candidates
        .into_iter()
        .enumerate()
        .map(|(j, cs)| cs.into_iter().filter(|&c| column_ok(j, c)).collect())
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return None;
    }

    struct Search<'a> {
        m: usize,
        n: usize,
        ncols: usize,
        nrows: usize,
        caps: &'a [usize],
        fits: &'a [Vec<usize>],
        candidates: &'a [Vec<usize>],
    }

    impl Search<'_> {
        // rows[i][r] is true when demo row i still fits table row r on the chosen columns.
        fn go(&self, j: usize, chosen: &mut Vec<usize>, rows: &[Vec<bool>]) -> Option<MatchWitness> {
            if j == self.n {
                let adj: Vec<Vec<usize>> = rows
                    .iter()
                    .map(|ok| (0..self.nrows).filter(|&r| ok[r]).collect())
                    .collect();
                let assign = capacity_matching(&adj, self.caps)?;
                return Some(MatchWitness {
                    rows: assign.into_iter().map(|r| r + 1).collect(),
                    cols: chosen.iter().map(|c| c + 1).collect(),
                });
            }
            for &c in &self.candidates[j] {
                if chosen.contains(&c) {
                    continue;
                }
                let mut next = rows.to_vec();
                let mut alive = true;
                for i in 0..self.m {
                    let mut keep = vec![false; self.nrows];
                    for &r in &self.fits[(i * self.n + j) * self.ncols + c] {
                        keep[r] = next[i][r];
                    }
                    next[i] = keep;
                    if !next[i].iter().any(|&b| b) {
                        alive = false;
                        break;
                    }
                }
                if !alive {
                    continue;
                }
                chosen.push(c);
                if let Some(w) = self.go(j + 1, chosen, &next) {
                    return Some(w);
                }
                chosen.pop();
            }
            None
        }
    }

    let search = Search {
        m,
        n,
        ncols,
        nrows,
        caps,
        fits: &fits,
        candidates: &candidates,
    };
    search.go(0, &mut Vec::new(), &vec![vec![true; nrows]; m])
}

fn simplified_cells(demo: &DemoGrid) -> Vec<Vec<DemoExpr>> {
    demo.rows.iter().map(|r| r.iter().map(simplify_demo).collect()).collect()
}

/// Column alignment by name: every demonstration column name must occur in
/// the table.
fn align_by_name(t: &ProvTable, demo: &DemoGrid) -> Option<Vec<usize>> {
    let names = demo.columns.as_ref()?;
    names.iter().map(|n| t.columns.iter().position(|c| c == n)).collect()
}

/// Provenance consistency with positional columns: names align columns when
/// the demonstration declares them, otherwise arities must agree and columns
/// map to themselves.
pub fn prov_consistent(t: &ProvTable, demo: &DemoGrid) -> Option<MatchWitness> {
    let cols = match align_by_name(t, demo) {
        Some(cols) => cols,
        None if demo.num_cols() == t.arity() => (0..t.arity()).collect(),
        None => return None,
    };
    consistent_with(t, demo, Some(&cols))
}

/// Provenance consistency up to a projection: any injective column map is
/// allowed. The witness columns are the projection that makes the table
/// consistent under [`prov_consistent`].
pub fn prov_consistent_projected(t: &ProvTable, demo: &DemoGrid) -> Option<MatchWitness> {
    if let Some(cols) = align_by_name(t, demo) {
        return consistent_with(t, demo, Some(&cols));
    }
    consistent_with(t, demo, None)
}

fn consistent_with(t: &ProvTable, demo: &DemoGrid, cols: Option<&[usize]>) -> Option<MatchWitness> {
    let cells = simplified_cells(demo);
    let caps = vec![1; t.num_rows()];
    find_witness(demo.num_rows(), demo.num_cols(), &caps, t.arity(), cols, |i, j, r, c| {
        expr_generalizes(&cells[i][j], &t.rows[r][c])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::CellRef;
    use crate::func::Func;

    fn r(row: usize, col: usize) -> ProvExpr {
        ProvExpr::Ref(CellRef::new("T", row, col))
    }

    fn d(row: usize, col: usize) -> DemoExpr {
        DemoExpr::cell("T", row, col)
    }

    fn col4_sum() -> ProvExpr {
        ProvExpr::App(Func::Sum, (1..=8).map(|i| r(i, 4)).collect())
    }

    #[test]
    fn ground_rules() {
        assert!(expr_generalizes(&d(1, 1), &r(1, 1)));
        assert!(!expr_generalizes(&d(1, 1), &r(1, 2)));
        assert!(expr_generalizes(&DemoExpr::constant(100.0), &ProvExpr::Const(100.0.into())));
        assert!(!expr_generalizes(&DemoExpr::constant(100.0), &r(1, 1)));
        assert!(expr_generalizes(&d(1, 1), &ProvExpr::Group(vec![r(1, 1), r(2, 1)])));
        assert!(!expr_generalizes(&d(3, 1), &ProvExpr::Group(vec![r(1, 1), r(2, 1)])));
    }

    #[test]
    fn partial_commutative() {
        let demo = DemoExpr::partial(Func::Sum, vec![d(1, 4), d(2, 4), d(8, 4)]);
        assert!(expr_generalizes(&demo, &col4_sum()));
        let shuffled = DemoExpr::partial(Func::Sum, vec![d(8, 4), d(1, 4)]);
        assert!(expr_generalizes(&shuffled, &col4_sum()));
        let outside = DemoExpr::partial(Func::Sum, vec![d(1, 4), d(9, 4)]);
        assert!(!expr_generalizes(&outside, &col4_sum()));
        let twice = DemoExpr::partial(Func::Sum, vec![d(1, 4), d(1, 4)]);
        assert!(!expr_generalizes(&twice, &col4_sum()));
        let wrong_fn = DemoExpr::partial(Func::Max, vec![d(1, 4)]);
        assert!(!expr_generalizes(&wrong_fn, &col4_sum()));
    }

    #[test]
    fn partial_non_commutative_keeps_order() {
        let star = ProvExpr::App(Func::Sub, vec![r(1, 1), r(2, 1)]);
        assert!(expr_generalizes(&DemoExpr::partial(Func::Sub, vec![d(2, 1)]), &star));
        assert!(expr_generalizes(&DemoExpr::partial(Func::Sub, vec![d(1, 1), d(2, 1)]), &star));
        assert!(!expr_generalizes(&DemoExpr::partial(Func::Sub, vec![d(2, 1), d(1, 1)]), &star));
    }

    #[test]
    fn complete_apps() {
        let star = ProvExpr::App(Func::Div, vec![ProvExpr::App(Func::Sum, vec![r(1, 4), r(2, 4)]), r(1, 5)]);
        let demo = DemoExpr::app(Func::Div, vec![DemoExpr::app(Func::Sum, vec![d(2, 4), d(1, 4)]), d(1, 5)]);
        assert!(expr_generalizes(&demo, &star));
        let swapped = DemoExpr::app(Func::Div, vec![d(1, 5), DemoExpr::app(Func::Sum, vec![d(2, 4), d(1, 4)])]);
        assert!(!expr_generalizes(&swapped, &star));
        let short = DemoExpr::app(Func::Sum, vec![d(1, 4)]);
        assert!(!expr_generalizes(&short, &ProvExpr::App(Func::Sum, vec![r(1, 4), r(2, 4)])));
    }

    #[test]
    fn demo_flattening() {
        let nested = DemoExpr::app(Func::Sum, vec![DemoExpr::partial(Func::Sum, vec![d(1, 4)]), d(2, 4)]);
        assert_eq!(simplify_demo(&nested), DemoExpr::partial(Func::Sum, vec![d(1, 4), d(2, 4)]));
    }

    #[test]
    fn capacities() {
        let adj = vec![vec![0], vec![0]];
        assert!(capacity_matching(&adj, &[1]).is_none());
        assert_eq!(capacity_matching(&adj, &[2]), Some(vec![0, 0]));
        let adj = vec![vec![0, 1], vec![0]];
        assert_eq!(capacity_matching(&adj, &[1, 1]), Some(vec![1, 0]));
    }

    #[test]
    fn table_level() {
        let t = ProvTable {
            columns: vec!["a".into(), "b".into()],
            rows: vec![vec![r(1, 1), r(1, 2)], vec![r(2, 1), r(2, 2)], vec![r(3, 1), r(3, 2)]],
        };
        let demo = DemoGrid::new(None, vec![vec![d(3, 1), d(3, 2)], vec![d(1, 1), d(1, 2)]]).unwrap();
        let w = prov_consistent(&t, &demo).unwrap();
        assert_eq!(w.rows, vec![3, 1]);
        assert_eq!(w.cols, vec![1, 2]);
        let narrow = DemoGrid::new(None, vec![vec![d(2, 2)]]).unwrap();
        assert!(prov_consistent(&t, &narrow).is_none());
        assert_eq!(prov_consistent_projected(&t, &narrow).unwrap().cols, vec![2]);
        let named = DemoGrid::new(Some(vec!["b".into()]), vec![vec![d(2, 2)]]).unwrap();
        assert_eq!(prov_consistent(&t, &named).unwrap().cols, vec![2]);
        let dup = DemoGrid::new(None, vec![vec![d(1, 1), d(1, 2)], vec![d(1, 1), d(1, 2)]]).unwrap();
        assert!(prov_consistent(&t, &dup).is_none());
    }
}
