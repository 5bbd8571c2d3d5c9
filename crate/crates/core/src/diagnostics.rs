//! Error norms against exact solutions, energy deviation series and
//! observed convergence orders.

use crate::error::{Error, Result};
use crate::field::{Field, Sample};

/// One diagnostics row of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunRecord {
    pub t: f64,
    /// Energy conserved by the scheme that produced the run.
    pub e_mod: f64,
    pub e_orig: Option<f64>,
    pub err_l2: Option<f64>,
    pub err_inf: Option<f64>,
    /// Nonlinear iterations spent on the step that reached `t`.
    pub iters: Option<usize>,
}

/// `(e_{h,2}, e_{h,inf})` of `u` against `exact` sampled on the same grid.
pub fn error_norms<T: Sample>(u: &Field<T>, exact: impl Fn(&[f64]) -> T) -> (f64, f64) {
    let grid = u.grid();
    let d = grid.dim();
    let mut sum = 0.0;
    let mut max = 0.0f64;
    for (i, &v) in u.values().iter().enumerate() {
        let p = grid.point(i);
        let e = (v - exact(&p[..d])).modulus();
        sum += e * e;
        max = max.max(e);
    }
    ((grid.cell_volume() * sum).sqrt(), max)
}

/// `log2(e_{k-1} / e_k)` for consecutive ladder entries.
pub fn convergence_orders(errors: &[f64]) -> Result<Vec<f64>> {
    if let Some((index, &value)) = errors
        .iter()
        .enumerate()
        .find(|(_, &e)| !(e > 0.0 && e.is_finite()))
    {
        return Err(Error::NonPositiveError { index, value });
    }
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

/// `|E^n - E^0|` for each record.
pub fn energy_deviation(records: &[RunRecord]) -> Result<Vec<f64>> {
    let first = records.first().ok_or(Error::EmptyRecords)?;
    Ok(records.iter().map(|r| (r.e_mod - first.e_mod).abs()).collect())
}

pub fn max_energy_deviation(records: &[RunRecord]) -> Result<f64> {
    Ok(energy_deviation(records)?.into_iter().fold(0.0, f64::max))
}
