//! Demonstration grids and provenance tables.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{DemoExpr, ProvExpr};
use crate::table::{Database, Table};

/// The user's partial output: a rectangular grid of demonstration expressions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoGrid {
    pub columns: Option<Vec<String>>,
    pub rows: Vec<Vec<DemoExpr>>,
}

impl DemoGrid {
    pub fn new(columns: Option<Vec<String>>, rows: Vec<Vec<DemoExpr>>) -> Result<DemoGrid> {
        let grid = DemoGrid { columns, rows };
        grid.validate()?;
        Ok(grid)
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn cell(&self, row: usize, col: usize) -> &DemoExpr {
        &self.rows[row][col]
    }

    pub fn cells(&self) -> impl Iterator<Item = &DemoExpr> {
        self.rows.iter().flatten()
    }

    pub fn validate(&self) -> Result<()> {
        let width = self.num_cols();
        if self.rows.is_empty() || width == 0 {
            return Err(Error::Malformed("demonstration must have at least one row and one column".into()));
        }
        if let Some(i) = self.rows.iter().position(|r| r.len() != width) {
            return Err(Error::Malformed(format!("demonstration row {} is ragged", i + 1)));
        }
        if let Some(cols) = &self.columns {
            if cols.len() != width {
                return Err(Error::Malformed(format!(
                    "demonstration declares {} column names for {width} columns",
                    cols.len()
                )));
            }
        }
        self.cells().try_for_each(DemoExpr::validate)
    }

    /// Every reference must point at an existing input cell.
    pub fn check_refs(&self, db: &Database) -> Result<()> {
        let mut err = None;
        for cell in self.cells() {
            cell.visit_refs(&mut |r| {
                if err.is_none() {
                    if let Err(e) = r.resolve(db) {
                        err = Some(e);
                    }
                }
            });
        }
        err.map_or(Ok(()), Err)
    }

    pub fn parse_json(text: &str) -> Result<DemoGrid> {
        let grid: DemoGrid = serde_json::from_str(text)?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn load(path: &Path) -> Result<DemoGrid> {
        DemoGrid::parse_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("demonstrations always serialize")
    }
}

/// Output of provenance-tracking evaluation: one expression per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ProvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<ProvExpr>>,
}

impl ProvTable {
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    /// Keeps the given 1-based columns, in the given order.
    pub fn project(&self, cols: &[usize]) -> ProvTable {
        ProvTable {
            columns: cols.iter().map(|&c| self.columns[c - 1].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| cols.iter().map(|&c| r[c - 1].clone()).collect())
                .collect(),
        }
    }

    /// Evaluates every cell.
    pub fn eval(&self, db: &Database) -> Result<Table> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e.eval(db)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Table::new("result", Some(self.columns.clone()), rows)
    }

    /// Renders cells as expression strings, CSV-encoded.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory csv write");
        for row in &self.rows {
            w.write_record(row.iter().map(ProvExpr::to_string)).expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv output is utf-8")
    }
}
