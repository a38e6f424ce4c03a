//! Search over planar measurement settings for the largest Cerf-Adami left-hand side.
//!
//! A full grid over `[0, π)³` is evaluated first; [`refine`] then runs a
//! shrinking-step coordinate ascent from the grid optimum. The objective has
//! kinks (it contains an absolute value), so no derivatives are used.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::{canonical_angle, cerf_adami_lhs, DensityMatrix, MeasurementSettings};
use crate::scalar::Real;

pub const MIN_GRID_RESOLUTION: usize = 8;
pub const MIN_THRESHOLD_RESOLUTION: usize = 32;
/// Slack allowed when checking that the maximal lhs grows with the Werner parameter.
pub const MONOTONICITY_SLACK: f64 = 1e-6;
/// Grid values this close to the maximum are treated as equal.
pub const TIE_WINDOW: f64 = 1e-12;

/// One evaluated point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry<T> {
    pub settings: MeasurementSettings<T>,
    pub lhs: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult<T> {
    pub best_settings: MeasurementSettings<T>,
    pub best_lhs: T,
    /// `best_lhs − 1`; positive means the classical bound is violated.
    pub margin: T,
    pub trace: Vec<TraceEntry<T>>,
    pub grid_resolution: usize,
    pub refined: bool,
}

impl<T: Real> SearchResult<T> {
    pub fn violation_found(&self) -> bool {
        self.best_lhs > T::one() + T::TOL
    }
}

/// Evaluates the lhs on every cell of the `resolution³` grid with spacing `π / resolution`.
///
/// The trace is in lexicographic order of the grid indices and ties (values
/// within [`TIE_WINDOW`]) resolve to the lexicographically smallest triple,
/// independent of evaluation order.
pub fn grid_search<T: Real>(rho: &DensityMatrix<T>, resolution: usize) -> Result<SearchResult<T>> {
    if resolution < MIN_GRID_RESOLUTION {
        return Err(Error::ResolutionTooSmall {
            got: resolution,
            min: MIN_GRID_RESOLUTION,
        });
    }
    let n = resolution;
    let step = T::PI() / T::from_usize(n).ok_or_else(|| Error::Overflow(n.to_string()))?;
    let angle = |i: usize| T::from_usize(i).unwrap_or_else(T::zero) * step;
    let trace = (0..n * n * n)
        .into_par_iter()
        .map(|cell| {
            let angles = [
                angle(cell / (n * n)),
                angle((cell / n) % n),
                angle(cell % n),
            ];
            Ok(TraceEntry {
                settings: MeasurementSettings::new(angles)?,
                lhs: cerf_adami_lhs(rho, angles)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // Symmetry-related cells differ only by rounding; anything within
    // TIE_WINDOW of the maximum counts as a tie and the first such cell wins.
    let max = trace.iter().map(|e| e.lhs).fold(T::neg_infinity(), T::max);
    let window = T::lit(TIE_WINDOW);
    let best_entry = *trace
        .iter()
        .find(|e| e.lhs >= max - window)
        .ok_or(Error::Internal {
            quantity: "grid maximum",
            value: max.as_f64(),
        })?;
    Ok(SearchResult {
        best_settings: best_entry.settings,
        best_lhs: best_entry.lhs,
        margin: best_entry.lhs - T::one(),
        trace,
        grid_resolution: resolution,
        refined: false,
    })
}

/// Coordinate ascent from `start` with initial step `π / resolution`.
///
/// Each pass tries `+step` then `−step` on each angle in turn, keeping strict
/// improvements; a pass with no improvement halves the step. Stops once the
/// step drops below `tol`. The trace holds every evaluation, starting point first.
pub fn refine_from<T: Real>(
    rho: &DensityMatrix<T>,
    start: MeasurementSettings<T>,
    resolution: usize,
    tol: T,
) -> Result<SearchResult<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidTolerance(tol.as_f64()));
    }
    if resolution == 0 {
        return Err(Error::ResolutionTooSmall { got: 0, min: 1 });
    }
    let mut step = T::PI()
        / T::from_usize(resolution).ok_or_else(|| Error::Overflow(resolution.to_string()))?;
    let mut current = start.angles();
    let mut best = cerf_adami_lhs(rho, current)?;
    let mut trace = vec![TraceEntry {
        settings: start,
        lhs: best,
    }];
    while step >= tol {
        let mut improved = false;
        for axis in 0..3 {
            for dir in [step, -step] {
                let mut candidate = current;
                candidate[axis] = canonical_angle(candidate[axis] + dir);
                let lhs = cerf_adami_lhs(rho, candidate)?;
                trace.push(TraceEntry {
                    settings: MeasurementSettings::new(candidate)?,
                    lhs,
                });
                if lhs > best {
                    best = lhs;
                    current = candidate;
                    improved = true;
                }
            }
        }
        if !improved {
            step = step / T::two();
        }
    }
    Ok(SearchResult {
        best_settings: MeasurementSettings::new(current)?,
        best_lhs: best,
        margin: best - T::one(),
        trace,
        grid_resolution: resolution,
        refined: true,
    })
}

/// Refines a grid result from its optimum; the grid trace is kept in front of
/// the refinement trace.
pub fn refine<T: Real>(
    rho: &DensityMatrix<T>,
    start: &SearchResult<T>,
    tol: T,
) -> Result<SearchResult<T>> {
    let mut result = refine_from(rho, start.best_settings, start.grid_resolution, tol)?;
    if result.best_lhs < start.best_lhs {
        // Cannot happen: ascent starts at the grid optimum and never accepts a
        // worse point.
        return Err(Error::Internal {
            quantity: "refined lhs below grid lhs",
            value: (result.best_lhs - start.best_lhs).as_f64(),
        });
    }
    let mut trace = start.trace.clone();
    trace.append(&mut result.trace);
    result.trace = trace;
    Ok(result)
}

/// Grid search followed by refinement.
pub fn search<T: Real>(
    rho: &DensityMatrix<T>,
    resolution: usize,
    tol: T,
) -> Result<SearchResult<T>> {
    refine(rho, &grid_search(rho, resolution)?, tol)
}

/// Outcome of the Werner-parameter bisection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WernerThreshold<T> {
    /// Largest sampled `p` whose refined maximum lhs stays at or below 1.
    pub threshold: T,
    /// Smallest sampled `p` found to violate.
    pub upper: T,
    /// `(p, max lhs)` for every sampled parameter, sorted by `p`.
    pub samples: Vec<(T, T)>,
}

/// Bisects `p ∈ [0, 1]` for the largest Werner parameter with no violation.
///
/// Each sample runs [`grid_search`] and [`refine`] on `ρ_W(p)`. The sampled
/// maxima must be nondecreasing in `p` to within [`MONOTONICITY_SLACK`].
pub fn werner_threshold<T: Real>(resolution: usize, tol: T) -> Result<WernerThreshold<T>> {
    if resolution < MIN_THRESHOLD_RESOLUTION {
        return Err(Error::ResolutionTooSmall {
            got: resolution,
            min: MIN_THRESHOLD_RESOLUTION,
        });
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidTolerance(tol.as_f64()));
    }
    let max_lhs =
        |p: T| -> Result<T> { Ok(search(&DensityMatrix::werner(p)?, resolution, tol)?.best_lhs) };
    let bound = T::one() + T::TOL;
    let mut samples = vec![
        (T::zero(), max_lhs(T::zero())?),
        (T::one(), max_lhs(T::one())?),
    ];
    let (mut lo, mut hi) = (T::zero(), T::one());
    if samples[0].1 > bound {
        return Err(Error::Internal {
            quantity: "max lhs of the maximally mixed state",
            value: samples[0].1.as_f64(),
        });
    }
    if samples[1].1 <= bound {
        return Ok(WernerThreshold {
            threshold: T::one(),
            upper: T::one(),
            samples,
        });
    }
    while hi - lo > tol {
        let mid = (lo + hi) / T::two();
        let v = max_lhs(mid)?;
        samples.push((mid, v));
        if v <= bound {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let slack = T::lit(MONOTONICITY_SLACK);
    for w in samples.windows(2) {
        if w[1].1 < w[0].1 - slack {
            return Err(Error::MonotonicityViolated {
                p_lo: w[0].0.as_f64(),
                lhs_lo: w[0].1.as_f64(),
                p_hi: w[1].0.as_f64(),
                lhs_hi: w[1].1.as_f64(),
            });
        }
    }
    Ok(WernerThreshold {
        threshold: lo,
        upper: hi,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_checks() {
        let s = DensityMatrix::<f64>::singlet();
        assert_eq!(
            grid_search(&s, 4).unwrap_err(),
            Error::ResolutionTooSmall { got: 4, min: 8 }
        );
        assert!(matches!(
            werner_threshold::<f64>(16, 1e-3),
            Err(Error::ResolutionTooSmall { .. })
        ));
        let g = grid_search(&s, 8).unwrap();
        assert!(matches!(
            refine(&s, &g, 0.0),
            Err(Error::InvalidTolerance(_))
        ));
    }

    #[test]
    fn grid_trace_order_and_best() {
        let s = DensityMatrix::<f64>::singlet();
        let g = grid_search(&s, 8).unwrap();
        assert_eq!(g.trace.len(), 512);
        let step = std::f64::consts::PI / 8.0;
        assert_eq!(g.trace[1].settings.angles(), [0.0, 0.0, step]);
        assert_eq!(g.trace[8].settings.angles(), [0.0, step, 0.0]);
        let max = g.trace.iter().map(|e| e.lhs).fold(f64::MIN, f64::max);
        assert!(max - g.best_lhs <= TIE_WINDOW);
        let first = g
            .trace
            .iter()
            .position(|e| e.lhs >= max - TIE_WINDOW)
            .unwrap();
        assert_eq!(g.best_settings, g.trace[first].settings);
        assert_eq!(g.best_settings.angles(), [0.0, step, 2.0 * step]);
        assert_eq!(g.margin, g.best_lhs - 1.0);
        assert!(!g.refined);
    }

    #[test]
    fn refine_never_loses_ground() {
        let s = DensityMatrix::<f64>::singlet();
        let g = grid_search(&s, 8).unwrap();
        let r = refine(&s, &g, 1e-4).unwrap();
        assert!(r.refined);
        assert!(r.best_lhs >= g.best_lhs);
        let max = r.trace.iter().map(|e| e.lhs).fold(f64::MIN, f64::max);
        assert!((r.best_lhs - max).abs() <= 1e-12);
    }
}
