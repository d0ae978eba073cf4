//! Golden-section search for maxima of unimodal functions.

use crate::error::{Error, Result};

/// Bracket width at which the search stops.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

const INV_PHI: f64 = 0.618_033_988_749_894_8;
const MAX_ITERATIONS: usize = 500;

/// Maximizes a unimodal `objective` on `[lo, hi]`.
///
/// Shrinks the bracket until its width is below `tol` and returns the
/// bracket midpoint with its objective value. On equal probes the left part
/// is kept, so flat stretches resolve toward the smaller argument.
pub fn golden_section_max<F>(objective: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(Error::argument(format!(
            "empty search interval [{lo}, {hi}]"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::argument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = objective(c);
    let mut fd = objective(d);
    for _ in 0..MAX_ITERATIONS {
        if b - a < tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = objective(d);
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, objective(x)))
}
