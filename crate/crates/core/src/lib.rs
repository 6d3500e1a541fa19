//! Synthesis of analytical SQL queries from cell-level computation
//! demonstrations.
//!
//! A demonstration is a small grid whose cells are expressions over input
//! cells (`sum(T[1,4], T[2,4], ◇)`). The synthesizer enumerates queries with
//! holes, prunes partial queries whose abstract provenance cannot cover the
//! demonstration, and returns concrete queries whose provenance-tracking
//! output generalizes it.

pub mod abstraction;
pub mod consistency;
pub mod error;
pub mod eval;
pub mod expr;
pub mod func;
pub mod harness;
pub mod grid;
pub mod query;
pub mod running_example;
pub mod sql;
pub mod synth;
pub mod table;
pub mod value;

pub use error::{Error, Result};
pub use expr::{CellRef, DemoExpr, ProvExpr};
pub use func::Func;
pub use grid::{DemoGrid, ProvTable};
pub use query::Query;
pub use table::{Database, Table};
pub use value::Value;
