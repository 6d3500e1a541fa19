//! The enrollment example used throughout the docs and tests: a 16-row
//! table of program enrollment by city, quarter and age group, and a
//! two-row demonstration of a cumulative enrollment percentage.

use crate::expr::DemoExpr;
use crate::func::Func;
use crate::grid::DemoGrid;
use crate::query::Query;
use crate::table::{Database, Table};

pub const TABLE_CSV: &str = "\
City,Quarter,Group,Enrolled,Population
A,1,Youth,1667,5668
A,1,Adult,1367,5668
A,2,Youth,256,5668
A,2,Adult,347,5668
A,3,Youth,148,5668
A,3,Adult,237,5668
A,4,Youth,556,5668
A,4,Adult,432,5668
B,1,Youth,2578,10541
B,1,Adult,1200,10541
B,2,Youth,812,10541
B,2,Adult,643,10541
B,3,Youth,590,10541
B,3,Adult,462,10541
B,4,Youth,768,10541
B,4,Adult,801,10541
";

pub fn table() -> Table {
    Table::parse_csv("T", TABLE_CSV).expect("fixture parses")
}

pub fn database() -> Database {
    Database::from_tables([table()])
}

fn percent(sum: DemoExpr, population: DemoExpr) -> DemoExpr {
    DemoExpr::app(
        Func::Mul,
        vec![DemoExpr::app(Func::Div, vec![sum, population]), DemoExpr::constant(100.0)],
    )
}

/// Quarter 1 and quarter 4 of city A; the second sum omits rows 3 to 7.
pub fn demo() -> DemoGrid {
    let t = |r, c| DemoExpr::cell("T", r, c);
    let rows = vec![
        vec![t(1, 1), t(1, 2), percent(DemoExpr::app(Func::Sum, vec![t(1, 4), t(2, 4)]), t(1, 5))],
        vec![
            t(7, 1),
            t(7, 2),
            percent(DemoExpr::partial(Func::Sum, vec![t(1, 4), t(2, 4), t(8, 4)]), t(7, 5)),
        ],
    ];
    DemoGrid::new(None, rows).expect("fixture is well formed")
}

/// Sum enrollment per city and quarter, accumulate per city, and divide by
/// the population. Output columns: City, Quarter, Population, C1, C2, pct.
pub fn golden_query() -> Query {
    let group = Query::Group {
        input: Box::new(Query::table("T")),
        keys: vec![1, 2, 5].into(),
        func: Func::Sum.into(),
        target: 4.into(),
    };
    let running = Query::Partition {
        input: Box::new(group),
        keys: vec![1].into(),
        func: Func::Cumsum.into(),
        target: 4.into(),
    };
    Query::Arithmetic {
        input: Box::new(running),
        func: Func::PercentOf.into(),
        cols: vec![5, 3].into(),
    }
}

/// Columns of [`golden_query`] that the demonstration shows.
pub const GOLDEN_COLUMNS: [usize; 3] = [1, 2, 6];
