//! Tables, the input database and CSV I/O.

use std::collections::HashSet;
use std::path::Path;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::value::Value;

/// An ordered bag of rows with uniform arity.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub id: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    /// Builds a table, generating `c1..cn` names when `columns` is `None`.
    pub fn new(id: impl Into<String>, columns: Option<Vec<String>>, rows: Vec<Vec<Value>>) -> Result<Table> {
        let id = id.into();
        let arity = match &columns {
            Some(c) => c.len(),
            None => rows.first().map_or(0, Vec::len),
        };
        for (i, row) in rows.iter().enumerate() {
            if row.len() != arity {
                return Err(Error::RaggedRow {
                    table: id,
                    row: i + 1,
                    expected: arity,
                    found: row.len(),
                });
            }
        }
        let columns = columns.unwrap_or_else(|| default_column_names(arity));
        Ok(Table { id, columns, rows })
    }

    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// 1-based cell access.
    pub fn cell(&self, row: usize, col: usize) -> Option<&Value> {
        self.rows.get(row.checked_sub(1)?)?.get(col.checked_sub(1)?)
    }

    /// Values of one column (1-based).
    pub fn column(&self, col: usize) -> impl Iterator<Item = &Value> + '_ {
        self.rows.iter().map(move |r| &r[col - 1])
    }

    /// True when every non-null value of the column is numeric and at least one is present.
    pub fn is_numeric_column(&self, col: usize) -> bool {
        let mut seen = false;
        for v in self.column(col) {
            match v {
                Value::Number(_) => seen = true,
                Value::Null => {}
                Value::Text(_) => return false,
            }
        }
        seen
    }

    /// Row containment ignoring order and multiplicity.
    pub fn contained_in(&self, other: &Table) -> bool {
        self.arity() == other.arity() && self.rows.iter().all(|r| other.rows.iter().any(|o| o == r))
    }

    /// Table equality as mutual containment; row order is irrelevant.
    pub fn same_content(&self, other: &Table) -> bool {
        self.contained_in(other) && other.contained_in(self)
    }

    pub fn parse_csv(id: impl Into<String>, text: &str) -> Result<Table> {
        let id = id.into();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
        if header.is_empty() || header.iter().all(String::is_empty) {
            return Err(Error::Malformed(format!("table `{id}` has no header")));
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != header.len() {
                return Err(Error::RaggedRow {
                    table: id,
                    row: i + 1,
                    expected: header.len(),
                    found: record.len(),
                });
            }
            rows.push(record.iter().map(Value::parse_field).collect());
        }
        Table::new(id, Some(header), rows)
    }

    pub fn load_csv(id: impl Into<String>, path: &Path) -> Result<Table> {
        let text = std::fs::read_to_string(path)?;
        Table::parse_csv(id, &text)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        // writes to a Vec cannot fail
        w.write_record(&self.columns).expect("in-memory csv write");
        for row in &self.rows {
            w.write_record(row.iter().map(Value::to_string)).expect("in-memory csv write");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv output is utf-8")
    }
}

pub fn default_column_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("c{i}")).collect()
}

/// Makes names unique by suffixing repeats with `_2`, `_3`, ...
pub fn dedup_names(names: Vec<String>) -> Vec<String> {
    let mut seen: HashSet<String> = HashSet::new();
    names
        .into_iter()
        .map(|n| {
            if seen.insert(n.clone()) {
                return n;
            }
            let mut k = 2;
            loop {
                let candidate = format!("{n}_{k}");
                if seen.insert(candidate.clone()) {
                    return candidate;
                }
                k += 1;
            }
        })
        .collect()
}

/// The named input tables, in declaration order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Database {
    tables: IndexMap<String, Table>,
}

impl Database {
    pub fn new() -> Database {
        Database::default()
    }

    pub fn from_tables(tables: impl IntoIterator<Item = Table>) -> Database {
        let mut db = Database::new();
        for t in tables {
            db.insert(t);
        }
        db
    }

    pub fn insert(&mut self, table: Table) {
        self.tables.insert(table.id.clone(), table);
    }

    pub fn get(&self, id: &str) -> Result<&Table> {
        self.tables.get(id).ok_or_else(|| Error::UnknownTable(id.to_string()))
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.tables.get_index_of(id)
    }

    pub fn tables(&self) -> impl Iterator<Item = &Table> {
        self.tables.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.tables.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_csv_with_header() {
        let t = Table::parse_csv("T", "City,Quarter,Enrolled\nA,1,1667\nA,1,\n").unwrap();
        assert_eq!(t.arity(), 3);
        assert_eq!(t.num_rows(), 2);
        assert_eq!(t.cell(1, 3), Some(&Value::from(1667.0)));
        assert_eq!(t.cell(2, 3), Some(&Value::Null));
        assert_eq!(t.cell(3, 1), None);
        assert!(t.is_numeric_column(2));
        assert!(!t.is_numeric_column(1));
    }

    #[test]
    fn ragged_csv_is_rejected() {
        let err = Table::parse_csv("T", "a,b\n1,2\n3\n").unwrap_err();
        assert!(matches!(err, Error::RaggedRow { row: 2, .. }));
    }

    #[test]
    fn csv_round_trip() {
        let text = "City,Population\nA,5668\nB,10541\n";
        let t = Table::parse_csv("T", text).unwrap();
        assert_eq!(t.to_csv(), text);
    }

    #[test]
    fn equality_ignores_row_order() {
        let a = Table::parse_csv("a", "x,y\n1,2\n3,4\n").unwrap();
        let b = Table::parse_csv("b", "x,y\n3,4\n1,2\n").unwrap();
        let c = Table::parse_csv("c", "x,y\n3,4\n").unwrap();
        assert!(a.same_content(&b));
        assert!(!a.same_content(&c));
        assert!(c.contained_in(&a));
    }

    #[test]
    fn generated_names() {
        let t = Table::new("T", None, vec![vec![Value::Null, Value::Null]]).unwrap();
        assert_eq!(t.columns, vec!["c1", "c2"]);
        assert_eq!(dedup_names(vec!["a".into(), "a".into(), "b".into()]), vec!["a", "a_2", "b"]);
    }
}
