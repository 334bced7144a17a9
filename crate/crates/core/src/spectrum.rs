//! Eigenvalue curves over a grid of field strengths.

use serde::{Deserialize, Serialize};

use crate::config::{TopConfig, TopKind};
use crate::error::Result;

/// Sorted eigenvalue rows, one per η. Rows whose solve failed are NaN-filled
/// and carry the error message.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumScan {
    pub kind: TopKind,
    pub template: TopConfig,
    pub eta_grid: Vec<f64>,
    pub curves: Vec<Vec<f64>>,
    /// jmax for the trigonometric top, basis size N for the hyperbolic one.
    pub truncation: usize,
    pub converged: Vec<bool>,
    pub errors: Vec<Option<String>>,
}

impl SpectrumScan {
    pub(crate) fn from_rows(
        kind: TopKind,
        template: &TopConfig,
        eta_values: &[f64],
        truncation: usize,
        count: usize,
        rows: Vec<Result<(Vec<f64>, bool)>>,
    ) -> Self {
        let mut scan = SpectrumScan {
            kind,
            template: *template,
            eta_grid: eta_values.to_vec(),
            curves: vec![vec![f64::NAN; count]; eta_values.len()],
            truncation,
            converged: vec![false; eta_values.len()],
            errors: vec![None; eta_values.len()],
        };
        for (i, row) in rows.into_iter().enumerate() {
            scan.set_row(i, row);
        }
        scan
    }

    pub(crate) fn set_row(&mut self, i: usize, row: Result<(Vec<f64>, bool)>) {
        match row {
            Ok((levels, ok)) => {
                self.curves[i] = levels;
                self.converged[i] = ok;
                self.errors[i] = None;
            }
            Err(e) => {
                self.curves[i].iter_mut().for_each(|v| *v = f64::NAN);
                self.converged[i] = false;
                self.errors[i] = Some(e.to_string());
            }
        }
    }

    pub fn len(&self) -> usize {
        self.eta_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta_grid.is_empty()
    }

    pub fn kappa(&self, i: usize) -> f64 {
        self.template.with_eta(self.eta_grid[i]).kappa()
    }

    /// Index of the grid point equal to η within 1e-12·max(1, |η|).
    pub fn find_eta(&self, eta: f64) -> Option<usize> {
        self.eta_grid.iter().position(|&e| (e - eta).abs() <= 1e-12 * eta.abs().max(1.0))
    }

    /// Copy with every energy negated and each row re-sorted ascending.
    pub fn negated(&self) -> SpectrumScan {
        let mut out = self.clone();
        for row in &mut out.curves {
            row.iter_mut().for_each(|v| *v = -*v);
            row.sort_by(f64::total_cmp);
        }
        out
    }
}

/// Evenly spaced values `min, min + step, …` up to `max` inclusive, generated
/// by index so the endpoints are exact.
pub fn linear_grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    if step <= 0.0 || max < min {
        return if max == min { vec![min] } else { Vec::new() };
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| min + i as f64 * step).collect()
}
