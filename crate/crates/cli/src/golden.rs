use std::path::Path;

use anyhow::Result;
use serde::Deserialize;

use crate::failure::{usage, GoldenMismatch};
use crate::output::{read_text, Table};

pub const C0_FILE: &str = "c0.json";
pub const MODULATION_FILE: &str = "modulation_slope.csv";
pub const DIMENSION_FILE: &str = "dimension_free.csv";

#[derive(Debug, Deserialize)]
pub struct C0Golden {
    pub schema: u32,
    pub c0: f64,
}

pub fn load_c0(dir: &Path) -> Result<f64> {
    let path = dir.join(C0_FILE);
    let g: C0Golden = serde_json::from_str(&read_text(&path)?)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if g.schema != 1 {
        return Err(usage(format!("{}: unsupported schema {}", path.display(), g.schema)));
    }
    Ok(g.c0)
}

pub fn close(x: f64, golden: f64, tol: f64) -> bool {
    (x - golden).abs() <= tol * golden.abs().max(1.0)
}

pub fn load_table(dir: &Path, name: &str) -> Result<Table> {
    let path = dir.join(name);
    Table::parse(&read_text(&path)?, &path.display().to_string())
}

/// Compares the numeric `columns` of rows sharing the same `key` value. Rows
/// of `actual` whose key is absent from the golden table are reported.
pub fn compare_tables(actual: &Table, golden: &Table, key: &str, columns: &[&str], tol: f64) -> Vec<String> {
    let mut problems = Vec::new();
    let (Some(ka), Some(kg)) = (actual.column(key), golden.column(key)) else {
        return vec![format!("key column `{key}` missing")];
    };
    for row in &actual.rows {
        let Some(g) = golden.rows.iter().find(|g| g[kg] == row[ka]) else {
            problems.push(format!("{key} = {} has no golden row", row[ka]));
            continue;
        };
        for &c in columns {
            let (Some(ca), Some(cg)) = (actual.column(c), golden.column(c)) else {
                problems.push(format!("column `{c}` missing"));
                continue;
            };
            match (row[ca].parse::<f64>(), g[cg].parse::<f64>()) {
                (Ok(x), Ok(y)) if close(x, y, tol) => {}
                _ => problems.push(format!("{key} = {}: {c} = {} vs golden {}", row[ka], row[ca], g[cg])),
            }
        }
    }
    problems
}

pub fn verdict(problems: Vec<String>) -> Result<()> {
    if problems.is_empty() {
        eprintln!("golden: match");
        Ok(())
    } else {
        Err(GoldenMismatch(problems).into())
    }
}
