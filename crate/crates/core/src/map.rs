//! Space–time grids of computed observables and their CSV form.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Observable stored in a [`SpaceTimeMap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    N12,
    X12,
    N1,
    /// N12/N1.
    F,
    /// Two-qubit coherence magnitude.
    Coherence,
    /// Filter function value; the first axis is frequency.
    Filter,
    /// Mode occupation ⟨a†a⟩; the first axis is momentum.
    Occupation,
    /// Anomalous correlation |⟨a_k a_{−k}⟩|; the first axis is momentum.
    Anomalous,
    /// N12 divided by the gapless scaling prefactor T t^{3−D/z}.
    ScaledN12,
}

impl Quantity {
    pub fn file_stem(self) -> &'static str {
        match self {
            Quantity::N12 => "n12",
            Quantity::X12 => "x12",
            Quantity::N1 => "n1",
            Quantity::F => "f",
            Quantity::Coherence => "coherence",
            Quantity::Filter => "filter",
            Quantity::Occupation => "occupation",
            Quantity::Anomalous => "anomalous",
            Quantity::ScaledN12 => "scaled_n12",
        }
    }
}

/// Outcome of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellValue {
    pub value: f64,
    /// False when the quadrature stopped at its budget; `value` is then the
    /// best estimate reached.
    pub converged: bool,
}

impl CellValue {
    pub fn exact(value: f64) -> Self {
        Self { value, converged: true }
    }

    /// Accepts a converged value, or the best estimate of a quadrature
    /// that ran out of budget.
    pub fn from_result(r: Result<f64>) -> Result<Self> {
        match r {
            Ok(value) => Ok(Self::exact(value)),
            Err(Error::QuadratureNotConverged { value, .. }) if value.is_finite() => Ok(Self {
                value,
                converged: false,
            }),
            Err(e) => Err(e),
        }
    }
}

/// Rectangular (r, t) grid of one quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeMap {
    pub r_values: Vec<f64>,
    pub t_values: Vec<f64>,
    /// `values[i][j]` belongs to `r_values[i]` and `t_values[j]`.
    pub values: Vec<Vec<f64>>,
    pub quantity: Quantity,
    /// Cells whose quadrature did not converge, as (i, j) indices.
    pub unconverged: Vec<(usize, usize)>,
    /// Input configuration and tolerances of the run.
    pub metadata: serde_json::Value,
}

fn check_axis(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Config(format!("{name} axis is empty")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config(format!("{name} axis has non-finite entries")));
    }
    if v.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config(format!("{name} axis must be strictly increasing")));
    }
    Ok(())
}

/// Evaluates `cell(r, t)` on every grid point.
///
/// Cells are independent and each is computed exactly once, so the result
/// does not depend on `workers`. `workers == 0` uses all available cores.
pub fn compute_map<F>(
    r_values: &[f64],
    t_values: &[f64],
    quantity: Quantity,
    metadata: serde_json::Value,
    workers: usize,
    cell: F,
) -> Result<SpaceTimeMap>
where
    F: Fn(f64, f64) -> Result<CellValue> + Sync,
{
    check_axis("r", r_values)?;
    check_axis("t", t_values)?;
    let nt = t_values.len();
    let indices: Vec<(usize, usize)> = (0..r_values.len()).flat_map(|i| (0..nt).map(move |j| (i, j))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let cells: Vec<Result<CellValue>> = pool.install(|| {
        indices
            .par_iter()
            .map(|&(i, j)| cell(r_values[i], t_values[j]))
            .collect()
    });
    let mut values = vec![vec![0.0; nt]; r_values.len()];
    let mut unconverged = Vec::new();
    for (&(i, j), c) in indices.iter().zip(cells) {
        let c = c?;
        if !c.value.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite {quantity:?} at r = {}, t = {}",
                r_values[i], t_values[j]
            )));
        }
        if !c.converged {
            unconverged.push((i, j));
        }
        values[i][j] = c.value;
    }
    Ok(SpaceTimeMap {
        r_values: r_values.to_vec(),
        t_values: t_values.to_vec(),
        values,
        quantity,
        unconverged,
        metadata,
    })
}

impl SpaceTimeMap {
    /// Values at fixed t index as a function of r.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[j]).collect()
    }

    /// CSV with header `r,t,value`, rows ordered by r then t, numbers in
    /// shortest round-trip form.
    pub fn to_csv(&self) -> String {
        self.to_csv_with_axes("r", "t")
    }

    /// [`SpaceTimeMap::to_csv`] with other names for the two axes.
    pub fn to_csv_with_axes(&self, first: &str, second: &str) -> String {
        let mut out = format!("{first},{second},value\n");
        for (r, row) in self.r_values.iter().zip(&self.values) {
            for (t, v) in self.t_values.iter().zip(row) {
                let _ = writeln!(out, "{r},{t},{v}");
            }
        }
        out
    }

    /// Parses the output of [`SpaceTimeMap::to_csv`].
    pub fn from_csv(text: &str, quantity: Quantity) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some("r,t,value") {
            return Err(Error::Config("expected header r,t,value".into()));
        }
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for (n, line) in lines.enumerate() {
            let parts: Vec<&str> = line.split(',').collect();
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Config(format!("line {}: {e}", n + 2)))
            };
            if parts.len() != 3 {
                return Err(Error::Config(format!("line {}: expected 3 fields", n + 2)));
            }
            rows.push((parse(parts[0])?, parse(parts[1])?, parse(parts[2])?));
        }
        let mut r_values: Vec<f64> = rows.iter().map(|x| x.0).collect();
        r_values.dedup();
        let nt = rows.len() / r_values.len().max(1);
        let t_values: Vec<f64> = rows.iter().take(nt).map(|x| x.1).collect();
        if r_values.len() * nt != rows.len() {
            return Err(Error::Config("CSV is not a rectangular r-major grid".into()));
        }
        let values = rows.chunks(nt).map(|c| c.iter().map(|x| x.2).collect()).collect();
        Ok(Self {
            r_values,
            t_values,
            values,
            quantity,
            unconverged: Vec::new(),
            metadata: serde_json::Value::Null,
        })
    }
}

/// Axis specification: explicit values or an evenly spaced range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    Values(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        count: usize,
        #[serde(default)]
        log: bool,
    },
}

impl AxisSpec {
    pub fn linear(start: f64, stop: f64, count: usize) -> Self {
        AxisSpec::Range {
            start,
            stop,
            count,
            log: false,
        }
    }

    pub fn log(start: f64, stop: f64, count: usize) -> Self {
        AxisSpec::Range {
            start,
            stop,
            count,
            log: true,
        }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        match *self {
            AxisSpec::Values(ref v) => Ok(v.clone()),
            AxisSpec::Range {
                start,
                stop,
                count,
                log,
            } => {
                if count == 0 {
                    return Err(Error::Config("axis count must be positive".into()));
                }
                if count == 1 {
                    return Ok(vec![start]);
                }
                if log {
                    if !(start > 0.0 && stop > 0.0) {
                        return Err(Error::Config("log axis needs positive bounds".into()));
                    }
                    Ok(crate::numerics::fit::geomspace(start, stop, count))
                } else {
                    Ok(crate::numerics::fit::linspace(start, stop, count))
                }
            }
        }
    }
}
