//! Uniform time grids that always contain t = 0.

use crate::error::{Error, Result};

/// A uniform grid `t_i = i·dt` for `i` in `-n_neg..=n_pos`.
///
/// Points are generated from integer offsets so `t` and `-t` are exact
/// negatives of each other on a symmetric grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    n_neg: usize,
    n_pos: usize,
}

impl TimeGrid {
    /// Grid over `[t_min, t_max]` with `n` points; `t = 0` must fall on a node.
    pub fn new(t_min: f64, t_max: f64, n: usize) -> Result<Self> {
        if !(t_min < 0.0 && t_max > 0.0) {
            return Err(Error::domain(format!(
                "time grid must satisfy t_min < 0 < t_max, got [{t_min}, {t_max}]"
            )));
        }
        if n < 3 {
            return Err(Error::domain("time grid needs at least 3 points"));
        }
        let dt = (t_max - t_min) / (n - 1) as f64;
        let zero = -t_min / dt;
        let n_neg = zero.round();
        if (zero - n_neg).abs() > 1e-6 {
            return Err(Error::domain(format!(
                "t = 0 is not a grid node for [{t_min}, {t_max}] with {n} points"
            )));
        }
        let n_neg = n_neg as usize;
        Ok(TimeGrid {
            dt,
            n_neg,
            n_pos: n - 1 - n_neg,
        })
    }

    /// Symmetric grid over `[-t_max, t_max]`; `n` must be odd.
    pub fn symmetric(t_max: f64, n: usize) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(Error::domain(format!("symmetric grid needs an odd point count, got {n}")));
        }
        Self::new(-t_max, t_max, n)
    }

    /// Grid over `[0, t_max]` with the given step, rounded to whole steps.
    pub fn non_negative(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && t_max > 0.0) {
            return Err(Error::domain("non-negative grid needs t_max > 0 and dt > 0"));
        }
        Ok(TimeGrid {
            dt,
            n_neg: 0,
            n_pos: (t_max / dt).round() as usize,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.n_neg + self.n_pos + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of `t = 0`.
    pub fn zero_index(&self) -> usize {
        self.n_neg
    }

    pub fn n_neg(&self) -> usize {
        self.n_neg
    }

    pub fn n_pos(&self) -> usize {
        self.n_pos
    }

    pub fn is_symmetric(&self) -> bool {
        self.n_neg == self.n_pos
    }

    pub fn t_min(&self) -> f64 {
        -(self.n_neg as f64) * self.dt
    }

    pub fn t_max(&self) -> f64 {
        self.n_pos as f64 * self.dt
    }

    /// Signed step count of node `i` relative to zero.
    pub fn offset(&self, i: usize) -> i64 {
        i as i64 - self.n_neg as i64
    }

    pub fn time(&self, i: usize) -> f64 {
        self.offset(i) as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    /// Largest number of steps on either side of zero.
    pub fn max_steps(&self) -> usize {
        self.n_neg.max(self.n_pos)
    }

    /// Evaluates an even function `f(|t|)` on the grid, computing each
    /// magnitude once.
    pub fn map_even(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let half: Vec<f64> = (0..=self.max_steps()).map(|k| f(k as f64 * self.dt)).collect();
        (0..self.len())
            .map(|i| half[self.offset(i).unsigned_abs() as usize])
            .collect()
    }

    /// Evaluates an odd function on the grid from its values at `|t|`.
    pub fn map_odd(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let half: Vec<f64> = (0..=self.max_steps()).map(|k| f(k as f64 * self.dt)).collect();
        (0..self.len())
            .map(|i| {
                let k = self.offset(i);
                let v = half[k.unsigned_abs() as usize];
                if k < 0 {
                    -v
                } else {
                    v
                }
            })
            .collect()
    }
}

/// Checks that `times` is uniform and symmetric about zero, returning the step.
pub fn check_uniform_symmetric(times: &[f64]) -> Result<f64> {
    let n = times.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "grid must have an odd number (≥ 3) of points, got {n}"
        )));
    }
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::domain("grid must be increasing"));
    }
    let tol = 1e-9 * dt.max(times[n - 1].abs());
    for (i, &t) in times.iter().enumerate() {
        if (t - (times[0] + i as f64 * dt)).abs() > tol {
            return Err(Error::domain(format!("non-uniform grid at index {i}")));
        }
        if (t + times[n - 1 - i]).abs() > tol {
            return Err(Error::domain("grid is not symmetric about t = 0"));
        }
    }
    Ok(dt)
}
