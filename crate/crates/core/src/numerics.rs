//! One-dimensional numerical kernel: bracketing minimizer, grid oracle,
//! finite differences, and bisection.
//!
//! Everything here is deterministic: identical inputs produce identical
//! results bit for bit. The grid search doubles as the independent oracle
//! the test suites compare closed forms and solver output against.

use crate::error::Error;

/// Iteration budget shared by the iterative routines.
pub const MAX_ITERATIONS: usize = 200;

// (sqrt(5) - 1) / 2, the golden-section interval reduction factor.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Outcome of a minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeResult {
    pub x_min: f64,
    pub f_min: f64,
    pub evaluations: usize,
    pub converged: bool,
}

fn checked<F: Fn(f64) -> f64>(f: &F, x: f64, evaluations: &mut usize) -> Result<f64, Error> {
    *evaluations += 1;
    let value = f(x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { x })
    }
}

/// Golden-section search for a local minimum of `f` inside `[lo, hi]`,
/// finished by a parabolic polish.
///
/// The bracket shrinks by a constant factor per iteration, so no
/// smoothness beyond continuity is needed, and the routine never assumes
/// unimodality of anything outside the bracket it was given. Pure
/// comparison-based search stalls on the sqrt(eps) plateau where nearby
/// `f` values are indistinguishable in f64; fitting a parabola through
/// wider-spaced samples recovers the minimizer well below that plateau.
/// Fails with [`Error::NoConvergence`] if the bracket cannot reach
/// `x_tol` within the iteration budget.
pub fn minimize_bracketed<F>(f: F, lo: f64, hi: f64, x_tol: f64) -> Result<MinimizeResult, Error>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Precondition(format!(
            "minimize_bracketed requires finite lo < hi; got [{lo}, {hi}]"
        )));
    }
    if x_tol.is_nan() || x_tol <= 0.0 {
        return Err(Error::Precondition(format!(
            "minimize_bracketed requires x_tol > 0; got {x_tol}"
        )));
    }

    let mut evaluations = 0;
    let mut a = lo;
    let mut b = hi;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = checked(&f, c, &mut evaluations)?;
    let mut fd = checked(&f, d, &mut evaluations)?;
    let (mut best_x, mut best_f) = if fc <= fd { (c, fc) } else { (d, fd) };

    for _ in 0..MAX_ITERATIONS {
        if b - a <= x_tol {
            let mid = 0.5 * (a + b);
            let f_mid = checked(&f, mid, &mut evaluations)?;
            let (x_min, f_min) = polish(&f, lo, hi, mid, f_mid, best_x, best_f, &mut evaluations)?;
            return Ok(MinimizeResult {
                x_min,
                f_min,
                evaluations,
                converged: true,
            });
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = checked(&f, c, &mut evaluations)?;
            if fc < best_f {
                best_x = c;
                best_f = fc;
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = checked(&f, d, &mut evaluations)?;
            if fd < best_f {
                best_x = d;
                best_f = fd;
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        width: b - a,
    })
}

/// Two parabolic-interpolation passes around the converged midpoint,
/// sampled wide enough that `f` differences rise above rounding noise.
/// A vertex is taken only when the fit is convex, lands inside the
/// sampled triplet, and does not increase `f`.
#[allow(clippy::too_many_arguments)]
fn polish<F>(
    f: &F,
    lo: f64,
    hi: f64,
    mid: f64,
    f_mid: f64,
    best_x: f64,
    best_f: f64,
    evaluations: &mut usize,
) -> Result<(f64, f64), Error>
where
    F: Fn(f64) -> f64,
{
    let scale = 1.0 + lo.abs().max(hi.abs());
    let base_h = (1e-5 * scale).min((hi - lo) / 4.0);
    let mut center = mid;
    let mut f_center = f_mid;
    for h in [base_h, base_h / 16.0] {
        if h <= 0.0 {
            break;
        }
        let anchor = center.clamp(lo + h, hi - h);
        let f_minus = checked(f, anchor - h, evaluations)?;
        let f_anchor = checked(f, anchor, evaluations)?;
        let f_plus = checked(f, anchor + h, evaluations)?;
        let curvature = f_minus - 2.0 * f_anchor + f_plus;
        if curvature > 0.0 {
            let vertex = anchor - 0.5 * h * (f_plus - f_minus) / curvature;
            if (vertex - anchor).abs() <= h && (lo..=hi).contains(&vertex) {
                let f_vertex = checked(f, vertex, evaluations)?;
                if f_vertex <= f_anchor {
                    center = vertex;
                    f_center = f_vertex;
                }
            }
        }
    }
    if best_f < f_center {
        Ok((best_x, best_f))
    } else {
        Ok((center, f_center))
    }
}

/// Evaluates `f` on `n` equally spaced points of `[lo, hi]` and returns
/// the argmin, ties broken toward the smaller abscissa.
pub fn grid_minimum<F>(f: F, lo: f64, hi: f64, n: usize) -> Result<MinimizeResult, Error>
where
    F: Fn(f64) -> f64,
{
    if n < 2 {
        return Err(Error::Precondition(format!(
            "grid_minimum requires n >= 2; got {n}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Precondition(format!(
            "grid_minimum requires finite lo < hi; got [{lo}, {hi}]"
        )));
    }
    let step = (hi - lo) / ((n - 1) as f64);
    let mut best_x = f64::NAN;
    let mut best_f = f64::INFINITY;
    for i in 0..n {
        let x = if i == n - 1 {
            hi
        } else {
            lo + (i as f64) * step
        };
        let value = f(x);
        if !value.is_finite() {
            return Err(Error::NonFinite { x });
        }
        if value < best_f {
            best_f = value;
            best_x = x;
        }
    }
    Ok(MinimizeResult {
        x_min: best_x,
        f_min: best_f,
        evaluations: n,
        converged: true,
    })
}

/// Which derivative a central difference approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOrder {
    First,
    Second,
}

/// Central finite difference of `f` at `x` with step `h`:
/// `(f(x+h) - f(x-h)) / 2h` for the first derivative,
/// `(f(x+h) - 2 f(x) + f(x-h)) / h^2` for the second.
pub fn central_difference<F>(f: F, x: f64, h: f64, order: DiffOrder) -> Result<f64, Error>
where
    F: Fn(f64) -> f64,
{
    if h.is_nan() || h <= 0.0 {
        return Err(Error::Precondition(format!(
            "central_difference requires h > 0; got {h}"
        )));
    }
    let mut evaluations = 0;
    let fp = checked(&f, x + h, &mut evaluations)?;
    let fm = checked(&f, x - h, &mut evaluations)?;
    match order {
        DiffOrder::First => Ok((fp - fm) / (2.0 * h)),
        DiffOrder::Second => {
            let f0 = checked(&f, x, &mut evaluations)?;
            Ok((fp - 2.0 * f0 + fm) / (h * h))
        }
    }
}

/// Bisection root finder. Requires a strict sign change,
/// `f(lo) * f(hi) < 0`; returns the midpoint of the final bracket once
/// its width is at most `tol`.
pub fn bisect_root<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, Error>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Precondition(format!(
            "bisect_root requires finite lo < hi; got [{lo}, {hi}]"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Precondition(format!(
            "bisect_root requires tol > 0; got {tol}"
        )));
    }
    let mut evaluations = 0;
    let mut a = lo;
    let mut b = hi;
    let mut f_a = checked(&f, a, &mut evaluations)?;
    let f_b = checked(&f, b, &mut evaluations)?;
    if f_a == 0.0 || f_b == 0.0 || (f_a < 0.0) == (f_b < 0.0) {
        return Err(Error::Precondition(format!(
            "bisect_root requires a sign change: f({a}) = {f_a}, f({b}) = {f_b}"
        )));
    }
    for _ in 0..MAX_ITERATIONS {
        let mid = 0.5 * (a + b);
        if b - a <= tol {
            return Ok(mid);
        }
        let f_mid = checked(&f, mid, &mut evaluations)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_a < 0.0) {
            a = mid;
            f_a = f_mid;
        } else {
            b = mid;
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        width: b - a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AllocationFraction, WorkloadPoint, EPS_X};

    fn time_fn(s: f64, r: f64) -> impl Fn(f64) -> f64 {
        let point = WorkloadPoint::new(s, r).unwrap();
        move |x| {
            point
                .execution_time(AllocationFraction::new(x).unwrap())
                .value()
        }
    }

    #[test]
    fn minimize_finds_quadratic_vertex() {
        let result = minimize_bracketed(|x| (x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10).unwrap();
        assert!(result.converged);
        assert!((result.x_min - 0.3).abs() < 1e-9);
        assert!(result.f_min < 1e-18);
    }

    #[test]
    fn minimize_finds_model_optimum() {
        let result = minimize_bracketed(time_fn(0.5, 10.0), 0.0, 1.0 - EPS_X, 1e-10).unwrap();
        assert!((result.x_min - 1.0 / 6.0).abs() < 1e-9);
        assert!((result.f_min - 0.8).abs() < 1e-12);
    }

    #[test]
    fn minimize_is_deterministic() {
        let a = minimize_bracketed(time_fn(0.37, 12.0), 0.0, 0.99, 1e-10).unwrap();
        let b = minimize_bracketed(time_fn(0.37, 12.0), 0.0, 0.99, 1e-10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn minimize_rejects_bad_inputs() {
        assert!(matches!(
            minimize_bracketed(|x| x, 1.0, 0.0, 1e-8),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            minimize_bracketed(|x| x, 0.0, 1.0, 0.0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            minimize_bracketed(|_| f64::NAN, 0.0, 1.0, 1e-8),
            Err(Error::NonFinite { .. })
        ));
        // An unreachable tolerance exhausts the budget.
        assert!(matches!(
            minimize_bracketed(|x| x * x, 0.0, 1.0, 1e-300),
            Err(Error::NoConvergence {
                iterations: MAX_ITERATIONS,
                ..
            })
        ));
    }

    #[test]
    fn grid_minimum_monotone_and_ties() {
        let result = grid_minimum(|x| x, 0.0, 1.0, 11).unwrap();
        assert_eq!(result.x_min, 0.0);
        assert_eq!(result.evaluations, 11);
        // Constant function: tie broken toward the smaller x.
        let result = grid_minimum(|_| 1.0, 0.0, 1.0, 5).unwrap();
        assert_eq!(result.x_min, 0.0);
    }

    #[test]
    fn grid_minimum_collapse_curve_stays_at_origin() {
        let result = grid_minimum(time_fn(0.95, 10.0), 0.0, 1.0 - EPS_X, 1_000_000).unwrap();
        assert_eq!(result.x_min, 0.0);
    }

    #[test]
    fn grid_minimum_matches_closed_form() {
        let result = grid_minimum(time_fn(0.2, 10.0), 0.0, 1.0 - EPS_X, 1_000_000).unwrap();
        assert!((result.x_min - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn grid_minimum_rejects_bad_inputs() {
        assert!(matches!(
            grid_minimum(|x| x, 0.0, 1.0, 1),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            grid_minimum(|x| 1.0 / x, 0.0, 1.0, 3),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn central_difference_basics() {
        let d = central_difference(|x| x * x, 1.0, 1e-6, DiffOrder::First).unwrap();
        assert!((d - 2.0).abs() < 1e-6);
        let dd = central_difference(|x| x * x, 0.0, 1e-4, DiffOrder::Second).unwrap();
        assert!((dd - 2.0).abs() < 1e-4);
        // Raw model formula, evaluated slightly past x = 0 on purpose.
        let raw = |x: f64| 0.5 / (1.0 + 9.0 * x) + 0.5 / (1.0 - x);
        let d = central_difference(raw, 0.0, 1e-6, DiffOrder::First).unwrap();
        assert!((d - -4.0).abs() < 1e-4);
        assert!(central_difference(|x| x, 0.0, 0.0, DiffOrder::First).is_err());
    }

    #[test]
    fn bisect_finds_roots() {
        let root = bisect_root(|x| x - 0.25, 0.0, 1.0, 1e-12).unwrap();
        assert!((root - 0.25).abs() < 1e-11);

        let point = WorkloadPoint::new(0.2, 10.0).unwrap();
        let deriv =
            move |x: f64| point.execution_time_derivative(AllocationFraction::new(x).unwrap());
        let root = bisect_root(deriv, 0.0, 0.9, 1e-12).unwrap();
        assert!((root - 1.0 / 3.0).abs() < 1e-9);

        let point = WorkloadPoint::new(0.8, 10.0).unwrap();
        let deriv =
            move |x: f64| point.execution_time_derivative(AllocationFraction::new(x).unwrap());
        let root = bisect_root(deriv, 0.0, 0.9, 1e-12).unwrap();
        assert!((root - 1.0 / 21.0).abs() < 1e-9);
    }

    #[test]
    fn bisect_requires_sign_change() {
        assert!(matches!(
            bisect_root(|x| x + 1.0, 0.0, 1.0, 1e-9),
            Err(Error::Precondition(_))
        ));
        // A zero endpoint is not a strict sign change.
        assert!(matches!(
            bisect_root(|x| x, 0.0, 1.0, 1e-9),
            Err(Error::Precondition(_))
        ));
    }
}
