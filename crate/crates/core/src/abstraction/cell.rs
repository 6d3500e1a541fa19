//! Abstract cells: bounds on the input cells and the top-level function of
//! every expression a concrete cell may hold.

use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::consistency::expr_generalizes;
use crate::expr::{DemoExpr, ProvExpr};
use crate::func::Func;
use crate::value::Value;

use super::{AbsRow, AbsTable, CellIndex};

/// More alternatives than this are collapsed into their union.
pub(super) const MAX_ALTS: usize = 64;

/// Longest list of exact terms a cell keeps.
pub(super) const MAX_EXACT: usize = 512;

/// Possible top-level shapes of an expression: a cell reference, a
/// constant, or an application of one of the functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Heads(u16);

impl Heads {
    pub const LEAF: Heads = Heads(1 << 13);
    pub const CONST: Heads = Heads(1 << 14);
    pub const ANY: Heads = Heads(u16::MAX);

    /// The head of `func`'s provenance term. Running sums are sums and
    /// percentages are products.
    pub fn of_func(func: Func) -> Heads {
        let f = match func {
            Func::Cumsum => Func::Sum,
            Func::PercentOf => Func::Mul,
            f => f,
        };
        Heads(1 << f as u16)
    }

    pub fn of_funcs(funcs: impl IntoIterator<Item = Func>) -> Heads {
        funcs.into_iter().fold(Heads::default(), |h, f| h | Heads::of_func(f))
    }

    pub fn of_prov(e: &ProvExpr) -> Heads {
        match e {
            ProvExpr::Const(_) => Heads::CONST,
            ProvExpr::Ref(_) => Heads::LEAF,
            ProvExpr::App(f, _) => Heads(1 << *f as u16),
            ProvExpr::Group(members) => members.iter().fold(Heads::default(), |h, m| h | Heads::of_prov(m)),
        }
    }

    /// The head a matching provenance term must have.
    pub fn of_demo(e: &DemoExpr) -> Heads {
        match e {
            DemoExpr::Const { .. } => Heads::CONST,
            DemoExpr::Ref(_) => Heads::LEAF,
            DemoExpr::App { func, .. } => Heads(1 << *func as u16),
        }
    }

    pub fn intersects(self, other: Heads) -> bool {
        self.0 & other.0 != 0
    }
}

impl std::ops::BitOr for Heads {
    type Output = Heads;

    fn bitor(self, rhs: Heads) -> Heads {
        Heads(self.0 | rhs.0)
    }
}

/// Tighter bounds, one per way of filling the holes a cell depends on.
/// Cells of one column with the same nonzero `layout` list their
/// alternatives in the same order, so they can be united position by
/// position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alts {
    pub sets: Arc<[FixedBitSet]>,
    pub layout: u64,
}

/// One abstract cell. `refs` bounds every instantiation; when `alts` is
/// present every instantiation also fits one of its sets. `exact` lists
/// the provenance terms an instantiation may hold, when concrete inputs
/// pin them down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsCell {
    pub refs: Arc<FixedBitSet>,
    pub alts: Option<Alts>,
    pub heads: Heads,
    pub value: Option<Value>,
    pub exact: Option<Arc<[ProvExpr]>>,
}

// Hashes the bounds only; cells that differ elsewhere merely collide.
impl Hash for AbsCell {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.refs.hash(state);
        self.heads.hash(state);
    }
}

impl AbsCell {
    pub(super) fn new(refs: FixedBitSet, heads: Heads, value: Option<Value>) -> AbsCell {
        AbsCell {
            refs: Arc::new(refs),
            alts: None,
            heads,
            value,
            exact: None,
        }
    }

    /// The cell of a concretely evaluated expression. A group cell matches
    /// through one of its members, so each member is an alternative.
    pub(super) fn lift(e: &ProvExpr, value: &Value, index: &CellIndex) -> AbsCell {
        let bits = |e: &ProvExpr| index.bits(e.refs()).expect("evaluation yields valid refs");
        let mut cell = AbsCell::new(bits(e), Heads::of_prov(e), Some(value.clone()));
        cell.exact = Some(Arc::new([e.clone()]));
        if let ProvExpr::Group(members) = e {
            if members.len() > 1 && members.len() <= MAX_ALTS {
                cell.alts = Some(Alts {
                    sets: members.iter().map(bits).collect(),
                    layout: 0,
                });
            }
        }
        cell
    }

    /// The null padding of an outer join.
    pub(super) fn pad(n: usize) -> AbsCell {
        AbsCell::new(FixedBitSet::with_capacity(n), Heads::CONST, Some(Value::Null))
    }

    /// Whether some instantiation may hold an expression with head `heads`
    /// that draws on all of `want` and generalizes to `demo`.
    pub fn covers(&self, demo: &DemoExpr, heads: Heads, want: &FixedBitSet) -> bool {
        if !self.heads.intersects(heads) {
            return false;
        }
        if let Some(exact) = &self.exact {
            return exact.iter().any(|e| Heads::of_prov(e).intersects(heads) && expr_generalizes(demo, e));
        }
        match &self.alts {
            Some(alts) => alts.sets.iter().any(|a| want.is_subset(a)),
            None => want.is_subset(&self.refs),
        }
    }

    pub(super) fn unknown(mut self) -> AbsCell {
        self.value = None;
        self.exact = None;
        self
    }

    pub(super) fn with_heads(mut self, heads: Heads) -> AbsCell {
        self.heads = heads;
        self.exact = None;
        self
    }

    // Bounds of each alternative, or the single bound.
    fn sets(&self) -> Vec<FixedBitSet> {
        match &self.alts {
            Some(a) => a.sets.to_vec(),
            None => vec![(*self.refs).clone()],
        }
    }

    /// One of `options`, each possibly with alternatives of its own.
    pub(super) fn choice(options: Vec<AbsCell>, heads: Heads, n: usize) -> AbsCell {
        if options.len() == 1 {
            let only = options.into_iter().next().expect("one option");
            return only.with_heads(heads).unknown();
        }
        let mut refs = FixedBitSet::with_capacity(n);
        let mut sets = Vec::new();
        let mut layout = DefaultHasher::new();
        let mut aligned = true;
        for o in &options {
            refs.union_with(&o.refs);
            sets.extend(o.sets());
            match &o.alts {
                Some(a) => {
                    aligned &= a.layout != 0;
                    (a.layout, a.sets.len()).hash(&mut layout);
                }
                None => (0u64, 1usize).hash(&mut layout),
            }
        }
        let alts = (sets.len() <= MAX_ALTS).then(|| Alts {
            sets: sets.into(),
            layout: if aligned { nonzero(layout.finish()) } else { 0 },
        });
        AbsCell {
            refs: Arc::new(refs),
            alts,
            heads,
            value: None,
            exact: None,
        }
    }
}

fn nonzero(h: u64) -> u64 {
    h.max(1)
}

/// A cell holding a group of the given column's cells over `rows`: it
/// matches through one member.
pub(super) fn merge(t: &AbsTable, rows: &[usize], col: usize, n: usize) -> AbsCell {
    if let [r] = rows {
        return t.rows[*r].cells[col - 1].clone();
    }
    let cells = || rows.iter().map(|&r| &t.rows[r].cells[col - 1]);
    let mut cell = union(t, rows, &[col], n);
    cell.heads = cells().fold(Heads::default(), |h, c| h | c.heads);
    let total: usize = cells().map(|c| c.alts.as_ref().map_or(1, |a| a.sets.len())).sum();
    if total <= MAX_ALTS {
        cell.alts = Some(Alts {
            sets: cells().flat_map(AbsCell::sets).collect(),
            layout: 0,
        });
    }
    cell
}

/// Union of the given 1-based columns over the given rows, as read by one
/// application. The value is known only when every contributing cell holds
/// the same known value. Heads are those of the contributing cells.
///
/// Cells of one column are united alternative by alternative when their
/// layouts agree; the choices of different columns are independent and
/// combine as a product.
pub(super) fn union(t: &AbsTable, rows: &[usize], cols: &[usize], n: usize) -> AbsCell {
    let mut refs = FixedBitSet::with_capacity(n);
    let mut heads = Heads::default();
    let mut value: Option<Option<Value>> = None;
    for &r in rows {
        for &c in cols {
            let cell = &t.rows[r].cells[c - 1];
            refs.union_with(&cell.refs);
            heads = heads | cell.heads;
            value = match value {
                None => Some(cell.value.clone()),
                Some(Some(v)) if cell.value.as_ref() == Some(&v) => Some(Some(v)),
                Some(_) => Some(None),
            };
        }
    }
    let mut cell = AbsCell::new(refs, heads, value.flatten());
    let mut fixed = FixedBitSet::with_capacity(n);
    let mut product: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(n)];
    let mut layouts = Vec::new();
    for &c in cols {
        match column_alts(t, rows, c, n) {
            Some(alts) => {
                if product.len() * alts.sets.len() > MAX_ALTS {
                    return cell;
                }
                layouts.push(alts.layout);
                product = product
                    .iter()
                    .flat_map(|p| {
                        alts.sets.iter().map(move |s| {
                            let mut u = p.clone();
                            u.union_with(s);
                            u
                        })
                    })
                    .collect();
            }
            None => {
                for &r in rows {
                    fixed.union_with(&t.rows[r].cells[c - 1].refs);
                }
            }
        }
    }
    if !layouts.is_empty() {
        for p in &mut product {
            p.union_with(&fixed);
        }
        let layout = match layouts[..] {
            _ if layouts.contains(&0) => 0,
            [one] if cols.len() == 1 => one,
            _ => {
                let mut h = DefaultHasher::new();
                layouts.hash(&mut h);
                nonzero(h.finish())
            }
        };
        cell.alts = Some(Alts {
            sets: product.into(),
            layout,
        });
    }
    cell
}

// Alternatives of one column over `rows`: a single cell's own, or the
// position-wise union of cells sharing a layout. Cells without
// alternatives contribute to every position. A row standing for several
// concrete rows counts as several cells.
fn column_alts(t: &AbsTable, rows: &[usize], c: usize, n: usize) -> Option<Alts> {
    if let [r] = rows {
        if t.rows[*r].count == 1 {
            return t.rows[*r].cells[c - 1].alts.clone();
        }
    }
    let mut shape: Option<(u64, usize)> = None;
    for &r in rows {
        if let Some(a) = &t.rows[r].cells[c - 1].alts {
            if a.layout == 0 {
                return None;
            }
            match shape {
                None => shape = Some((a.layout, a.sets.len())),
                Some(s) if s == (a.layout, a.sets.len()) => {}
                Some(_) => return None,
            }
        }
    }
    let (layout, len) = shape?;
    let mut sets = vec![FixedBitSet::with_capacity(n); len];
    for &r in rows {
        let cell = &t.rows[r].cells[c - 1];
        for (k, acc) in sets.iter_mut().enumerate() {
            match &cell.alts {
                Some(a) => acc.union_with(&a.sets[k]),
                None => acc.union_with(&cell.refs),
            }
        }
    }
    Some(Alts {
        sets: sets.into(),
        layout,
    })
}

// An application to some two distinct cells of `row`, or to the only one.
// Alternatives enumerate the pairs and, within a pair, the alternatives of
// both cells; rows whose cells share layouts line up position by position.
pub(super) fn pair_choice(row: &AbsRow, heads: Heads, n: usize) -> AbsCell {
    let cells = &row.cells;
    let mut refs = FixedBitSet::with_capacity(n);
    for c in cells {
        refs.union_with(&c.refs);
    }
    let mut cell = AbsCell::new(refs, heads, None);
    let mut pairs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|a| (a + 1..cells.len()).map(move |b| (a, b))).collect();
    if pairs.is_empty() {
        pairs.push((0, 0));
    }
    let width = |c: &AbsCell| c.alts.as_ref().map_or(1, |a| a.sets.len());
    let total: usize = pairs.iter().map(|&(a, b)| width(&cells[a]) * width(&cells[b])).sum();
    if total <= 1 || total > MAX_ALTS {
        return cell;
    }
    let mut sets = Vec::with_capacity(total);
    for &(a, b) in &pairs {
        let ys = cells[b].sets();
        for x in cells[a].sets() {
            for y in &ys {
                let mut s = x.clone();
                s.union_with(y);
                sets.push(s);
            }
        }
    }
    let mut layout = DefaultHasher::new();
    let mut aligned = true;
    for c in cells {
        match &c.alts {
            Some(a) => {
                aligned &= a.layout != 0;
                (a.layout, a.sets.len()).hash(&mut layout);
            }
            None => (0u64, 1usize).hash(&mut layout),
        }
    }
    cell.alts = Some(Alts {
        sets: sets.into(),
        layout: if aligned { nonzero(layout.finish()) } else { 0 },
    });
    cell
}
