//! First-crossing times `ξ_R(x) = inf{tⁿ : |uₕ(x, tⁿ)| ≥ R}` at every degree
//! of freedom, recorded while a run progresses.

use serde::Serialize;

use crate::dg::FieldState;
use crate::error::{Error, Result};
use crate::history::{Observer, StepRecord};
use crate::scalar::Real;

/// `ξ_R` at each sampled position; `None` where the level was never reached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XiCurve<T> {
    pub r: T,
    pub x: Vec<T>,
    pub xi: Vec<Option<T>>,
}

impl<T: Real> XiCurve<T> {
    /// Points that crossed the level.
    pub fn crossed(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.x.iter().zip(&self.xi).filter_map(|(&x, xi)| xi.map(|t| (x, t)))
    }

    /// Least-squares line `ξ ≈ slope·x + intercept` through the crossed
    /// points.
    pub fn fit_line(&self) -> Option<(T, T)> {
        let (xs, ys): (Vec<T>, Vec<T>) = self.crossed().unzip();
        fit_line(&xs, &ys)
    }
}

/// Least-squares line through `(xs, ys)`; `None` for fewer than two
/// distinct abscissae.
pub fn fit_line<T: Real>(xs: &[T], ys: &[T]) -> Option<(T, T)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = T::from_usize_lossy(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    if sxx == T::zero() {
        return None;
    }
    let sxy: T = xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Observer that records `ξ_R` for several levels at once.
#[derive(Debug, Clone)]
pub struct XiTracker<T> {
    levels: Vec<T>,
    x: Vec<T>,
    xi: Vec<Vec<Option<T>>>,
    /// Largest initial amplitude, for the precondition check.
    initial_max: Option<T>,
}

impl<T: Real> XiTracker<T> {
    /// `positions` are the physical locations of the degrees of freedom.
    pub fn new(positions: Vec<T>, levels: &[T]) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::param("levels", "at least one level R is required"));
        }
        if let Some(bad) = levels.iter().find(|r| !(**r > T::zero())) {
            return Err(Error::param("levels", format!("levels must be positive, got {bad}")));
        }
        let n = positions.len();
        Ok(XiTracker {
            levels: levels.to_vec(),
            x: positions,
            xi: vec![vec![None; n]; levels.len()],
            initial_max: None,
        })
    }

    /// Feeds the nodal values of `u` at time `t`.
    pub fn observe(&mut self, t: T, u: &[T]) {
        if self.initial_max.is_none() {
            self.initial_max = Some(u.iter().fold(T::zero(), |m, v| m.max(v.abs())));
        }
        for (level, xi) in self.levels.iter().zip(&mut self.xi) {
            for (slot, v) in xi.iter_mut().zip(u) {
                if slot.is_none() && v.abs() >= *level {
                    *slot = Some(t);
                }
            }
        }
    }

    /// Whether every position has reached every level.
    pub fn all_crossed(&self) -> bool {
        self.xi.iter().flatten().all(Option::is_some)
    }

    /// One curve per level. Fails for a level not above the initial amplitude.
    pub fn curves(&self) -> Result<Vec<XiCurve<T>>> {
        let init = self.initial_max.unwrap_or(T::zero());
        self.levels
            .iter()
            .zip(&self.xi)
            .map(|(&r, xi)| {
                if r <= init {
                    return Err(Error::param(
                        "R",
                        format!("level {r} does not exceed the initial amplitude {init}"),
                    ));
                }
                Ok(XiCurve {
                    r,
                    x: self.x.clone(),
                    xi: xi.clone(),
                })
            })
            .collect()
    }
}

impl<T: Real> Observer<T> for XiTracker<T> {
    fn start(&mut self, initial: &StepRecord<T>, state: &FieldState<T>) -> std::io::Result<()> {
        self.observe(initial.t, &state.u);
        Ok(())
    }

    fn record(&mut self, rec: &StepRecord<T>, state: &FieldState<T>) -> std::io::Result<()> {
        self.observe(rec.t, &state.u);
        Ok(())
    }
}

/// `ξ_R` from a sequence of `(tⁿ, uⁿ)` snapshots.
pub fn xi_curve<'a, T: Real>(
    snapshots: impl IntoIterator<Item = (T, &'a [T])>,
    positions: Vec<T>,
    r: T,
) -> Result<XiCurve<T>> {
    let mut tracker = XiTracker::new(positions, &[r])?;
    for (t, u) in snapshots {
        tracker.observe(t, u);
    }
    Ok(tracker.curves()?.remove(0))
}
