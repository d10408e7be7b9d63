use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coding::{min_valid_modulus, modulation_difference, EkSpaceElement};
use crate::error::{invalid, Result};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub a: u64,
    pub aggregate_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayTable {
    pub rows: Vec<DecayRow>,
    /// Least-squares slope of `log(error)` against `log(A)`; `None` when
    /// fewer than two errors are nonzero.
    pub slope: Option<f64>,
    /// Every error is exactly zero.
    pub exact: bool,
}

/// Ordinary least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `Σ_j Σ_e modulation_difference(j, e, A)` for every `A`, with the log-log
/// slope of the sweep.
pub fn modulation_decay_experiment<T: Real>(
    family: &[EkSpaceElement<T>],
    a_list: &[u64],
) -> Result<DecayTable> {
    if a_list.is_empty() {
        return invalid("empty A list");
    }
    if a_list.iter().any(|a| !a.is_power_of_two()) || a_list.windows(2).any(|w| w[0] >= w[1]) {
        return invalid("A list must be increasing powers of two");
    }
    let min = family.iter().map(min_valid_modulus).max().unwrap_or(1);
    if let Some(bad) = a_list.iter().find(|&&a| a < min) {
        return invalid(format!("A = {bad} is below the minimal valid modulus {min}"));
    }
    let rows = a_list
        .par_iter()
        .map(|&a| {
            let mut total = 0.0;
            for e in family {
                for j in 1..=e.d() {
                    total += modulation_difference(j, e, a)?
                        .aggregate
                        .to_f64()
                        .unwrap_or(f64::NAN);
                }
            }
            Ok(DecayRow {
                a,
                aggregate_error: total,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.aggregate_error > 0.0)
        .map(|r| ((r.a as f64).ln(), r.aggregate_error.ln()))
        .unzip();
    Ok(DecayTable {
        exact: rows.iter().all(|r| r.aggregate_error == 0.0),
        slope: fit_slope(&x, &y),
        rows,
    })
}
