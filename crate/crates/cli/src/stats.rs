//! Small statistics helpers for rate experiments.

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares on `(ln n, ln value)`.
pub fn slope_fit(points: &[(f64, f64)]) -> Result<SlopeFit, CliError> {
    if points.iter().any(|&(_, v)| v <= 0.0) {
        return Err(CliError::config(
            "slope fit needs strictly positive values",
        ));
    }
    let mut xs: Vec<f64> = Vec::with_capacity(points.len());
    let mut ys: Vec<f64> = Vec::with_capacity(points.len());
    for &(n, v) in points {
        if n <= 0.0 {
            return Err(CliError::config("slope fit needs positive sizes"));
        }
        xs.push(n.ln());
        ys.push(v.ln());
    }
    let distinct = {
        let mut sorted = xs.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.dedup();
        sorted.len()
    };
    if distinct < 2 {
        return Err(CliError::config("slope fit needs at least two distinct sizes"));
    }
    let m = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / m;
    let mean_y = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(SlopeFit {
        slope,
        intercept,
        r2,
    })
}

/// Smallest replication count driving the two-sided tail bound
/// `2 exp(-2 eps^2 N)` below `delta` (the bound starts at 2, so any
/// `delta` below that is meaningful).
pub fn hoeffding_reps(epsilon: f64, delta: f64) -> Result<u64, CliError> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 2.0) {
        return Err(CliError::config(
            "hoeffding_reps needs epsilon in (0,1) and delta in (0,2)",
        ));
    }
    let raw = (2.0 / delta).ln() / (2.0 * epsilon * epsilon);
    // guard the ceiling against last-ulp noise at exact integers
    Ok((raw - 1e-9).ceil().max(1.0) as u64)
}
