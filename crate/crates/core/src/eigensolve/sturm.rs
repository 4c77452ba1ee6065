use super::Tridiagonal;
use crate::interval::Interval;

/// Number of eigenvalues strictly below `x`, by counting negative pivots of
/// the `LDL^T` factorization of `T - xI`. Pivots smaller in magnitude than
/// `ε² ‖T‖` are replaced by that floor with their sign kept (zero counts as
/// positive), so an eigenvalue equal to `x` is not counted.
pub fn count_below(t: &Tridiagonal, x: f64) -> usize {
    let n = t.n();
    if n == 0 {
        return 0;
    }
    let floor = (f64::EPSILON * f64::EPSILON * t.norm_inf()).max(f64::MIN_POSITIVE);
    let guard = |q: f64| {
        if q.abs() < floor {
            if q < 0.0 {
                -floor
            } else {
                floor
            }
        } else {
            q
        }
    };
    let mut count = 0;
    let mut q = guard(t.diag[0] - x);
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let e = t.offdiag[i - 1];
        q = guard((t.diag[i] - x) - e * e / q);
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalues in `[a, b)`.
pub fn count_in_interval(t: &Tridiagonal, interval: Interval) -> usize {
    count_below(t, interval.b()).saturating_sub(count_below(t, interval.a()))
}

/// All eigenvalues by bisection on the Sturm count, ascending. Independent
/// of the QL path; used to cross-check it.
pub fn bisection_eigenvalues(t: &Tridiagonal) -> Vec<f64> {
    let n = t.n();
    let radius = t.norm_inf();
    let lo0 = -radius - 1.0;
    let hi0 = radius + 1.0;
    (0..n)
        .map(|k| {
            // Smallest x with count_below(x) > k.
            let (mut lo, mut hi) = (lo0, hi0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if count_below(t, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}
