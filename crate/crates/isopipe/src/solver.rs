//! Scalar root finding for monotone functions on a bracketing interval.
//!
//! The wave-curve equations solved in this crate are all strictly monotone
//! in the `mu` coordinate, so a sign-change bracket always contains exactly
//! one root. Bisection guarantees convergence; a Newton step is taken
//! whenever it stays inside the current bracket.

/// Stop when the bracket width drops below this value.
pub const MU_TOL: f64 = 1e-13;
/// Iteration cap for the hybrid solver.
pub const MAX_ITER: usize = 200;

/// Finds the root of a strictly monotone `f` in `[lo, hi]`.
///
/// Requires `f(lo)` and `f(hi)` to have opposite signs (either may be zero).
/// `df` is the derivative; where it is cheap and smooth Newton takes over,
/// otherwise the method falls back to bisection.
pub fn find_root<F, D>(f: F, df: D, lo: f64, hi: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    let f_hi = f(hi);
    if f_hi == 0.0 {
        return hi;
    }
    debug_assert!(
        f_lo.signum() != f_hi.signum(),
        "find_root requires a sign change: f({lo}) = {f_lo}, f({hi}) = {f_hi}"
    );

    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        if (hi - lo).abs() < MU_TOL {
            return 0.5 * (lo + hi);
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    0.5 * (lo + hi)
}

/// Expands `hi` geometrically until `pred(hi)` holds, starting from `lo`.
pub fn expand_upper<P: Fn(f64) -> bool>(lo: f64, step: f64, pred: P) -> f64 {
    let mut hi = lo + step;
    let mut s = step;
    while !pred(hi) {
        s *= 2.0;
        hi += s;
        assert!(
            hi.is_finite() && s < 1e300,
            "bracket expansion diverged (lo = {lo})"
        );
    }
    hi
}

/// Expands `lo` downward until `pred(lo)` holds.
pub fn expand_lower<P: Fn(f64) -> bool>(hi: f64, step: f64, pred: P) -> f64 {
    let mut lo = hi - step;
    let mut s = step;
    while !pred(lo) {
        s *= 2.0;
        lo -= s;
        assert!(
            lo.is_finite() && s < 1e300,
            "bracket expansion diverged (hi = {hi})"
        );
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root_of_two() {
        let r = find_root(|x| x * x * x - 2.0, |x| 3.0 * x * x, 0.0, 2.0);
        assert!((r - 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn decreasing_function() {
        let r = find_root(|x| 1.0 - x.exp(), |x| -x.exp(), -3.0, 5.0);
        assert!(r.abs() < 1e-12);
    }

    #[test]
    fn endpoint_root() {
        let r = find_root(|x| x, |_| 1.0, 0.0, 1.0);
        assert_eq!(r, 0.0);
    }

    #[test]
    fn expansion_brackets_distant_roots() {
        let f = |x: f64| x - 1e6;
        let hi = expand_upper(0.0, 1.0, |x| f(x) > 0.0);
        assert!(f(hi) > 0.0);
        let lo = expand_lower(0.0, 1.0, |x| -f(-x) < 0.0);
        assert!(lo < 0.0);
    }
}
