//! Alternating-sign scans and the completely monotonic degree.
//!
//! A function `f` on `(0, inf)` is completely monotonic when
//! `(-1)^n f^(n)(t) >= 0` for every order and point. A finite scan can only
//! refute that, so a passing [`SignPatternReport`] means "no violation found".
//! The degree of `f` is the supremum of exponents `r` for which `t^r f(t)` is
//! still completely monotonic; [`estimate_cm_degree`] brackets it by bisection.

use rayon::prelude::*;
use rug::Float;

use crate::error::{Error, Result};
use crate::laurent::{h_derivative, h_function, TailSeries};
use crate::precision::WorkingPrecision;

/// Logarithmically spaced sample points, both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGrid {
    t_min: f64,
    t_max: f64,
    points: usize,
}

impl LogGrid {
    pub fn new(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        if !(t_min.is_finite() && t_min > 0.0) {
            return Err(Error::argument("LogGrid::new", "t_min must be finite and > 0"));
        }
        if !(t_max.is_finite() && t_max > t_min) {
            return Err(Error::argument("LogGrid::new", "t_max must be finite and > t_min"));
        }
        if points < 2 {
            return Err(Error::argument("LogGrid::new", "need at least 2 points"));
        }
        Ok(LogGrid { t_min, t_max, points })
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Geometric midpoint `sqrt(t_min t_max)`.
    pub fn median(&self) -> f64 {
        (self.t_min * self.t_max).sqrt()
    }

    pub fn points(&self, prec: WorkingPrecision) -> Vec<Float> {
        let lo = prec.float(self.t_min);
        let hi = prec.float(self.t_max);
        let log_lo = prec.float(lo.ln_ref());
        let span = prec.float(hi.ln_ref()) - &log_lo;
        let last = self.points - 1;
        (0..self.points)
            .map(|i| match i {
                0 => prec.float(&lo),
                i if i == last => prec.float(&hi),
                i => {
                    let step = prec.float(&span * i as u64) / last as u64;
                    (step + &log_lo).exp()
                }
            })
            .collect()
    }
}

/// Source of `f^(n)(t)` for `n = 0..=max_order`.
pub trait DerivativeOracle: Sync {
    fn derivatives(&self, t: &Float, max_order: u32, prec: WorkingPrecision) -> Result<Vec<Float>>;
}

/// Adapts a per-order closure `(n, t, prec) -> f^(n)(t)`.
pub struct PerOrder<F>(pub F);

impl<F> DerivativeOracle for PerOrder<F>
where
    F: Fn(u32, &Float, WorkingPrecision) -> Result<Float> + Sync,
{
    fn derivatives(&self, t: &Float, max_order: u32, prec: WorkingPrecision) -> Result<Vec<Float>> {
        (0..=max_order)
            .map(|n| {
                (self.0)(n, t, prec).map_err(|e| {
                    Error::numeric("derivative oracle", format!("order {n}: {e}"))
                })
            })
            .collect()
    }
}

/// `h(t) = exp(1/t) - psi'(t)` and its closed-form derivatives.
#[derive(Debug, Clone, Copy, Default)]
pub struct HOracle;

impl DerivativeOracle for HOracle {
    fn derivatives(&self, t: &Float, max_order: u32, prec: WorkingPrecision) -> Result<Vec<Float>> {
        let mut out = Vec::with_capacity(max_order as usize + 1);
        out.push(h_function(t, prec)?);
        for i in 1..=max_order {
            out.push(h_derivative(i, t, prec)?);
        }
        Ok(out)
    }
}

/// `t^r S(t)` for a tail series `S`, differentiated termwise.
#[derive(Debug, Clone)]
pub struct ScaledTailOracle {
    pub series: TailSeries,
    pub r: Float,
}

impl DerivativeOracle for ScaledTailOracle {
    fn derivatives(&self, t: &Float, max_order: u32, prec: WorkingPrecision) -> Result<Vec<Float>> {
        self.series.scaled_derivatives(&self.r, t, max_order, prec)
    }
}

/// A point where `(-1)^order f^(order)(t)` is negative beyond the noise floor.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub order: u32,
    pub t: Float,
    /// The raw derivative `f^(order)(t)`.
    pub value: Float,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignPatternReport {
    pub max_order: u32,
    pub grid: LogGrid,
    pub pass: bool,
    pub first_violation: Option<Violation>,
}

impl SignPatternReport {
    /// `"no violation found"` or a description of the first violation.
    pub fn verdict(&self) -> String {
        match &self.first_violation {
            None => "no violation found".to_string(),
            Some(v) => format!(
                "sign violation at order {} t={} (f^(n) = {})",
                v.order,
                v.t.to_f64(),
                v.value.to_f64()
            ),
        }
    }
}

/// Scans `(-1)^n f^(n)(t)` for `n = 0..=max_order` on every grid point.
///
/// Points are evaluated in parallel; the reported violation is always the
/// first one in ascending order, then ascending `t`.
pub fn check_sign_pattern(
    oracle: &dyn DerivativeOracle,
    grid: &LogGrid,
    max_order: u32,
    prec: WorkingPrecision,
) -> Result<SignPatternReport> {
    let points = grid.points(prec);
    let values: Vec<Vec<Float>> = points
        .par_iter()
        .map(|t| {
            oracle.derivatives(t, max_order, prec).map_err(|e| {
                Error::numeric("check_sign_pattern", format!("oracle failed at t={}: {e}", t.to_f64()))
            })
        })
        .collect::<Result<_>>()?;

    let floor = prec.noise_floor();
    let mut first_violation = None;
    'scan: for n in 0..=max_order as usize {
        for (t, row) in points.iter().zip(&values) {
            let value = &row[n];
            let signed = if n % 2 == 0 { prec.float(value) } else { -prec.float(value) };
            if signed < -prec.float(&floor) {
                first_violation = Some(Violation {
                    order: n as u32,
                    t: t.clone(),
                    value: value.clone(),
                });
                break 'scan;
            }
        }
    }
    Ok(SignPatternReport {
        max_order,
        grid: *grid,
        pass: first_violation.is_none(),
        first_violation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeEstimate {
    /// Family index when the function is a Laurent remainder `H_k`.
    pub k: Option<u32>,
    /// Largest tested exponent at which the scan passes.
    pub r_lo: f64,
    /// Smallest tested exponent at which the scan fails.
    pub r_hi: f64,
    pub max_order: u32,
    pub grid: LogGrid,
    pub bisection_steps: u32,
    /// Exponents below `r_lo` re-scanned to confirm the pass set is downward closed.
    pub closure_checks: Vec<f64>,
    /// First violation found at `r_hi`.
    pub witness: Violation,
}

impl DegreeEstimate {
    pub fn width(&self) -> f64 {
        self.r_hi - self.r_lo
    }

    pub fn contains(&self, r: f64) -> bool {
        self.r_lo <= r && r <= self.r_hi
    }
}

/// Bisection parameters shared by the degree estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeSearch {
    pub r_min: f64,
    pub r_max: f64,
    pub tol: f64,
    pub grid: LogGrid,
    pub max_order: u32,
}

impl DegreeSearch {
    /// Defaults for `H_k`: `r` in `(0, k+3)`, width 1/32, grid `[1e-2, 1e6] x 200`, orders `0..=6`.
    pub fn for_remainder(k: u32) -> Self {
        DegreeSearch {
            r_min: 0.0,
            r_max: k as f64 + 3.0,
            tol: 1.0 / 32.0,
            grid: LogGrid::new(1e-2, 1e6, 200).expect("valid default grid"),
            max_order: 6,
        }
    }
}

/// Completely monotonic degree of `H_k` by bisection over `t^r H_k(t)`.
pub fn estimate_cm_degree(k: u32, search: &DegreeSearch, prec: WorkingPrecision) -> Result<DegreeEstimate> {
    let mut estimate = estimate_series_degree(TailSeries::remainder(k), search, prec)?;
    estimate.k = Some(k);
    Ok(estimate)
}

/// Degree of an arbitrary tail series `S` (e.g. a single term) by bisection over `t^r S(t)`.
pub fn estimate_series_degree(
    series: TailSeries,
    search: &DegreeSearch,
    prec: WorkingPrecision,
) -> Result<DegreeEstimate> {
    estimate_degree_with(
        |r| ScaledTailOracle { series, r: prec.float(r) },
        search,
        prec,
    )
}

/// Bisection over a family `r -> oracle for t^r f(t)`.
pub fn estimate_degree_with<F, O>(family: F, search: &DegreeSearch, prec: WorkingPrecision) -> Result<DegreeEstimate>
where
    F: Fn(f64) -> O,
    O: DerivativeOracle,
{
    let DegreeSearch { r_min, r_max, tol, grid, max_order } = *search;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::argument("estimate_cm_degree", "tol must be > 0"));
    }
    if r_min.partial_cmp(&r_max) != Some(std::cmp::Ordering::Less) {
        return Err(Error::argument("estimate_cm_degree", "need r_min < r_max"));
    }
    let scan = |r: f64| check_sign_pattern(&family(r), &grid, max_order, prec);

    if !scan(r_min)?.pass {
        return Err(Error::Bracket(format!(
            "pattern already fails at r_min = {r_min}; lower r_min"
        )));
    }
    let mut witness = match scan(r_max)?.first_violation {
        Some(v) => v,
        None => {
            return Err(Error::Bracket(format!(
                "no violation at r_max = {r_max}; raise r_max or extend the grid/orders"
            )))
        }
    };

    let (mut lo, mut hi) = (r_min, r_max);
    let mut steps = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match scan(mid)?.first_violation {
            None => lo = mid,
            Some(v) => {
                hi = mid;
                witness = v;
            }
        }
        steps += 1;
    }

    let closure_checks = vec![lo - 0.5 * tol, lo - tol, 0.5 * (r_min + lo)];
    for &r in &closure_checks {
        if !scan(r)?.pass {
            return Err(Error::Bracket(format!(
                "pass set not downward closed: r_lo = {lo} passes but r = {r} fails"
            )));
        }
    }

    Ok(DegreeEstimate {
        k: None,
        r_lo: lo,
        r_hi: hi,
        max_order,
        grid,
        bisection_steps: steps,
        closure_checks,
        witness,
    })
}
