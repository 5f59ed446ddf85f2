//! Scalar root finding and minimization used throughout the solver.
//!
//! Everything here is deterministic: bisection always takes the midpoint and
//! golden-section search uses a fixed ratio, so repeated runs give
//! bit-identical results.

/// Absolute tolerance on the abscissa for every bisection in the crate.
pub const BISECTION_TOL: f64 = 1e-12;

/// Absolute tolerance on the abscissa for golden-section searches.
pub const GOLDEN_TOL: f64 = 1e-10;

const MAX_BISECTION_STEPS: usize = 200;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Root of a non-increasing function on `[lo, hi]`.
///
/// Assumes `f(lo) >= 0 >= f(hi)`; if `f(lo) <= 0` returns `lo`, if
/// `f(hi) >= 0` returns `hi`. The result is the midpoint of the final
/// bracket, whose width is below `tol`.
pub fn bisect_decreasing<F>(f: F, lo: f64, hi: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if f(lo) <= 0.0 {
        return lo;
    }
    if f(hi) >= 0.0 {
        return hi;
    }
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..MAX_BISECTION_STEPS {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root of a non-decreasing function on `[lo, hi]` (mirror of
/// [`bisect_decreasing`]).
pub fn bisect_increasing<F>(f: F, lo: f64, hi: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    bisect_decreasing(|t| -f(t), lo, hi, tol)
}

/// A located minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

impl Minimum {
    /// Keeps the lower of two minima; equal values keep the smaller abscissa.
    pub fn better(self, other: Minimum) -> Minimum {
        if other.value < self.value || (other.value == self.value && other.x < self.x) {
            other
        } else {
            self
        }
    }
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// The endpoints are evaluated as well, so a monotone `f` returns the right
/// endpoint value rather than an interior approximation of it.
pub fn golden_section<F>(f: F, lo: f64, hi: f64, tol: f64) -> Minimum
where
    F: Fn(f64) -> f64,
{
    let mut best = Minimum {
        x: lo,
        value: f(lo),
    };
    if hi <= lo {
        return best;
    }
    best = best.better(Minimum {
        x: hi,
        value: f(hi),
    });

    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    best.better(Minimum { x, value: f(x) })
        .better(Minimum { x: c, value: fc })
        .better(Minimum { x: d, value: fd })
}

/// Uniform scan of `points` abscissae over `[lo, hi]` followed by a golden
/// refinement on the two cells around the best scan point.
pub fn scan_then_golden<F>(f: F, lo: f64, hi: f64, points: usize, tol: f64) -> Minimum
where
    F: Fn(f64) -> f64,
{
    if hi <= lo || points < 2 {
        return golden_section(&f, lo, hi, tol);
    }
    let step = (hi - lo) / (points - 1) as f64;
    let mut best_idx = 0;
    let mut best = Minimum {
        x: lo,
        value: f(lo),
    };
    for i in 1..points {
        let x = if i == points - 1 {
            hi
        } else {
            lo + step * i as f64
        };
        let cand = Minimum { x, value: f(x) };
        if cand.value < best.value {
            best = cand;
            best_idx = i;
        }
    }
    let a = if best_idx == 0 {
        lo
    } else {
        lo + step * (best_idx - 1) as f64
    };
    let b = (lo + step * (best_idx + 1) as f64).min(hi);
    best.better(golden_section(f, a, b, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_linear_root() {
        let r = bisect_decreasing(|t| 3.1 - 3.3 * t - 1.0, 0.0, 1.0, BISECTION_TOL);
        assert!((r - 7.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn bisection_clamps_to_endpoints() {
        assert_eq!(bisect_decreasing(|t| -1.0 - t, 0.0, 1.0, 1e-12), 0.0);
        assert_eq!(bisect_decreasing(|t| 2.0 - t, 0.0, 1.0, 1e-12), 1.0);
        assert_eq!(bisect_increasing(|t| t - 5.0, 0.0, 1.0, 1e-12), 1.0);
    }

    #[test]
    fn golden_finds_parabola_vertex() {
        let m = golden_section(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-10);
        assert!((m.x - 0.3).abs() < 1e-6);
        assert!((m.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn golden_monotone_returns_endpoint() {
        let m = golden_section(|x| -x, 0.0, 2.0, 1e-10);
        assert_eq!(m.x, 2.0);
    }

    #[test]
    fn scan_handles_multimodal() {
        let f = |x: f64| (x - 0.1).powi(2).min((x - 0.8).powi(2) - 0.01);
        let m = scan_then_golden(f, 0.0, 1.0, 33, 1e-10);
        assert!((m.x - 0.8).abs() < 1e-5);
    }

    #[test]
    fn ties_prefer_smaller_abscissa() {
        let a = Minimum { x: 0.5, value: 1.0 };
        let b = Minimum { x: 0.2, value: 1.0 };
        assert_eq!(a.better(b).x, 0.2);
        assert_eq!(b.better(a).x, 0.2);
    }
}
