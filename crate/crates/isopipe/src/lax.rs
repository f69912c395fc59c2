//! Wave-curve geometry for the isothermal p-system.
//!
//! Shock and rarefaction branches, forward/backward Lax curves, the map
//! `Xi(z) = -2 sinh(z/2)` that makes the shock branches translation
//! invariant in `(mu, nu)` coordinates, the distinguished states on the
//! curves (flux maximizer/minimizer, largest-density intersections with a
//! flux line `q = q_m`, intersection of forward-1 and backward-2 curves),
//! and the admissible flux windows at an interface.
//!
//! In `(mu, nu)` coordinates the four branches through a base `(mu*, nu*)`
//! read
//!
//! ```text
//! S1: nu = nu* + Xi(mu - mu*)      R1: nu = nu* + mu* - mu
//! S2: nu = nu* + Xi(mu* - mu)      R2: nu = nu* - mu* + mu
//! ```
//!
//! so the forward 1-curve and backward 2-curve are strictly monotone in
//! `nu` as functions of `mu`; every intersection problem solved here is a
//! monotone scalar root-find.

use thiserror::Error;

use crate::solver::{expand_lower, expand_upper, find_root};
use crate::state::{GasParams, State};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaxError {
    #[error("curve evaluation needs rho > 0, got {rho}")]
    NonPositiveRho { rho: f64 },
    #[error("q_m = {q_m} violates the left flux window (-inf, {bound}]")]
    AboveLeftWindow { q_m: f64, bound: f64 },
    #[error("q_m = {q_m} violates the right flux window [{bound}, inf)")]
    BelowRightWindow { q_m: f64, bound: f64 },
}

/// Characteristic family index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    One,
    Two,
}

/// Which branch (or glued curve) to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Shock,
    Rarefaction,
    /// Forward Lax curve: rarefaction branch for smaller density glued to
    /// the shock branch for larger density (family 1; mirrored for 2).
    Forward,
    /// Backward Lax curve.
    Backward,
}

/// `Xi(z) = exp(-z/2) - exp(z/2) = -2 sinh(z/2)`.
#[inline]
pub fn xi(zeta: f64) -> f64 {
    -2.0 * (0.5 * zeta).sinh()
}

/// Inverse of [`xi`]. Evaluated in the cancellation-free form on each half
/// line so that it is odd to the last bit.
pub fn xi_inv(x: f64) -> f64 {
    if x < 0.0 {
        return -xi_inv(-x);
    }
    2.0 * (2.0 / ((x * x + 4.0).sqrt() + x)).ln()
}

#[inline]
fn d_xi(zeta: f64) -> f64 {
    -(0.5 * zeta).cosh()
}

/// `nu` on the forward 1-curve through `(mu*, nu*)` as a function of `mu`.
/// Strictly decreasing.
pub(crate) fn fl1_nu(mu: f64, base_mu: f64, base_nu: f64) -> f64 {
    if mu <= base_mu {
        base_nu + base_mu - mu
    } else {
        base_nu + xi(mu - base_mu)
    }
}

pub(crate) fn fl1_dnu(mu: f64, base_mu: f64) -> f64 {
    if mu <= base_mu {
        -1.0
    } else {
        d_xi(mu - base_mu)
    }
}

/// `nu` on the backward 2-curve through `(mu*, nu*)` as a function of `mu`.
/// Strictly increasing.
pub(crate) fn bl2_nu(mu: f64, base_mu: f64, base_nu: f64) -> f64 {
    if mu <= base_mu {
        base_nu - base_mu + mu
    } else {
        base_nu + xi(base_mu - mu)
    }
}

pub(crate) fn bl2_dnu(mu: f64, base_mu: f64) -> f64 {
    if mu <= base_mu {
        1.0
    } else {
        -d_xi(mu - base_mu)
    }
}

/// Evaluates a wave curve through `base` at density `rho`, returning the
/// momentum `q` of the curve point.
pub fn curve_value(
    kind: CurveKind,
    fam: Family,
    rho: f64,
    base: State,
    g: GasParams,
) -> Result<f64, LaxError> {
    if !(rho > 0.0) {
        return Err(LaxError::NonPositiveRho { rho });
    }
    let a = g.a();
    let v = base.v();
    let ratio = rho / base.rho();
    let shock = |sign: f64| rho * (v + sign * a * (ratio.sqrt() - ratio.sqrt().recip()));
    let raref = |sign: f64| rho * (v + sign * a * ratio.ln());
    let sign = match fam {
        Family::One => -1.0,
        Family::Two => 1.0,
    };
    let q = match (kind, fam) {
        (CurveKind::Shock, _) => shock(sign),
        (CurveKind::Rarefaction, _) => raref(sign),
        // Case splits at rho = rho*: the rarefaction side owns the tie.
        (CurveKind::Forward, Family::One) => {
            if rho <= base.rho() {
                raref(sign)
            } else {
                shock(sign)
            }
        }
        (CurveKind::Forward, Family::Two) => {
            if rho < base.rho() {
                shock(sign)
            } else {
                raref(sign)
            }
        }
        (CurveKind::Backward, Family::One) => {
            if rho < base.rho() {
                shock(sign)
            } else {
                raref(sign)
            }
        }
        (CurveKind::Backward, Family::Two) => {
            if rho <= base.rho() {
                raref(sign)
            } else {
                shock(sign)
            }
        }
    };
    Ok(q)
}

/// Propagation speed of an i-shock from `base` to the state at density
/// `rho` on the corresponding shock branch.
pub fn shock_speed(fam: Family, rho: f64, base: State, g: GasParams) -> Result<f64, LaxError> {
    if !(rho > 0.0) {
        return Err(LaxError::NonPositiveRho { rho });
    }
    let sign = match fam {
        Family::One => -1.0,
        Family::Two => 1.0,
    };
    Ok(base.v() + sign * g.a() * (rho / base.rho()).sqrt())
}

/// The point of the forward 1-curve through `u` with the maximal momentum,
/// restricted as the left flux window requires: for `nu <= 1` this is the
/// sonic point of the rarefaction branch (`mu + nu - 1`, `nu = 1`); for a
/// supersonic base the window is capped at the base itself, which is what
/// this returns.
pub fn bar_state(u: State, g: GasParams) -> State {
    let (mu, nu) = u.mu_nu(g);
    if nu >= 1.0 {
        return u;
    }
    let rho = (mu + nu - 1.0).exp();
    State::new(rho, g.a() * rho).expect("sonic point of the forward 1-curve is a valid state")
}

/// Mirror of [`bar_state`]: minimal momentum on the backward 2-curve.
pub fn underline_state(u: State, g: GasParams) -> State {
    let (mu, nu) = u.mu_nu(g);
    if nu <= -1.0 {
        return u;
    }
    let rho = (mu - nu - 1.0).exp();
    State::new(rho, -g.a() * rho).expect("sonic point of the backward 2-curve is a valid state")
}

/// Admissible interface fluxes as a closed interval, unbounded on one side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxWindow {
    pub lo: f64,
    pub hi: f64,
}

impl FluxWindow {
    pub fn contains(&self, q: f64) -> bool {
        self.lo <= q && q <= self.hi
    }
}

/// Fluxes attainable at `x = 0` from the left along the forward 1-curve:
/// `(-inf, q_bar(u)]` for `v <= a`, `(-inf, q]` for a supersonic base.
pub fn flux_window_minus(u: State, g: GasParams) -> FluxWindow {
    let hi = if u.nu(g) <= 1.0 {
        bar_state(u, g).q()
    } else {
        u.q()
    };
    FluxWindow {
        lo: f64::NEG_INFINITY,
        hi,
    }
}

/// Fluxes attainable at `x = 0` from the right along the backward 2-curve.
pub fn flux_window_plus(u: State, g: GasParams) -> FluxWindow {
    let lo = if u.nu(g) >= -1.0 {
        underline_state(u, g).q()
    } else {
        u.q()
    };
    FluxWindow {
        lo,
        hi: f64::INFINITY,
    }
}

/// Largest-density intersection of the forward 1-curve through `u` with the
/// flux line `q = q_m`. Uses the closed form when `q_m = 0`, otherwise the
/// monotone root-find of [`hat_state_generic`].
pub fn hat_state(q_m: f64, u: State, g: GasParams) -> Result<State, LaxError> {
    let bound = flux_window_minus(u, g).hi;
    if q_m > bound {
        return Err(LaxError::AboveLeftWindow { q_m, bound });
    }
    if q_m == 0.0 {
        let a = g.a();
        let v = u.v();
        let rho = if v > 0.0 {
            let c = (v * v + 4.0 * a * a).sqrt() + v;
            u.rho() / (4.0 * a * a) * c * c
        } else {
            u.rho() * (v / a).exp()
        };
        return Ok(State::new(rho, 0.0).expect("zero-flux hat state is a valid state"));
    }
    hat_state_generic(q_m, u, g)
}

/// Mirror of [`hat_state`] on the backward 2-curve.
pub fn check_state(q_m: f64, u: State, g: GasParams) -> Result<State, LaxError> {
    let bound = flux_window_plus(u, g).lo;
    if q_m < bound {
        return Err(LaxError::BelowRightWindow { q_m, bound });
    }
    if q_m == 0.0 {
        let a = g.a();
        let v = u.v();
        let rho = if v > 0.0 {
            u.rho() * (-v / a).exp()
        } else {
            let c = (v * v + 4.0 * a * a).sqrt() - v;
            u.rho() / (4.0 * a * a) * c * c
        };
        return Ok(State::new(rho, 0.0).expect("zero-flux check state is a valid state"));
    }
    check_state_generic(q_m, u, g)
}

/// Root-finding route for [`hat_state`], valid for every admissible `q_m`
/// including zero. The momentum along the forward 1-curve is unimodal in
/// `mu`; the largest-density intersection lies on the decreasing tail right
/// of the maximizer, where the bracket is monotone.
pub fn hat_state_generic(q_m: f64, u: State, g: GasParams) -> Result<State, LaxError> {
    let bound = flux_window_minus(u, g).hi;
    if q_m > bound {
        return Err(LaxError::AboveLeftWindow { q_m, bound });
    }
    let a = g.a();
    let (mu0, nu0) = u.mu_nu(g);
    let mu_pk = if nu0 <= 1.0 {
        mu0 + nu0 - 1.0
    } else {
        // stationary point of q = a e^mu (nu0 + Xi(mu - mu0)) on the shock
        // branch: 3 s^2 - 2 nu0 s - 1 = 0 for s = exp((mu - mu0)/2)
        let s = (nu0 + (nu0 * nu0 + 3.0).sqrt()) / 3.0;
        mu0 + 2.0 * s.ln()
    };
    let f = |mu: f64| a * mu.exp() * fl1_nu(mu, mu0, nu0) - q_m;
    let df = |mu: f64| a * mu.exp() * (fl1_nu(mu, mu0, nu0) + fl1_dnu(mu, mu0));
    if f(mu_pk) <= 0.0 {
        // admissibility was already checked, so q_m sits at the window edge
        // up to rounding: the intersection is the maximizer itself
        return Ok(state_on_line(mu_pk, q_m));
    }
    let hi = expand_upper(mu_pk, 1.0, |m| f(m) < 0.0);
    let mu_hat = find_root(f, df, mu_pk, hi);
    Ok(state_on_line(mu_hat, q_m))
}

/// Root-finding route for [`check_state`].
pub fn check_state_generic(q_m: f64, u: State, g: GasParams) -> Result<State, LaxError> {
    let bound = flux_window_plus(u, g).lo;
    if q_m < bound {
        return Err(LaxError::BelowRightWindow { q_m, bound });
    }
    let a = g.a();
    let (mu0, nu0) = u.mu_nu(g);
    let mu_min = if nu0 >= -1.0 {
        mu0 - nu0 - 1.0
    } else {
        let s = (-nu0 + (nu0 * nu0 + 3.0).sqrt()) / 3.0;
        mu0 + 2.0 * s.ln()
    };
    let f = |mu: f64| a * mu.exp() * bl2_nu(mu, mu0, nu0) - q_m;
    let df = |mu: f64| a * mu.exp() * (bl2_nu(mu, mu0, nu0) + bl2_dnu(mu, mu0));
    if f(mu_min) >= 0.0 {
        return Ok(state_on_line(mu_min, q_m));
    }
    let hi = expand_upper(mu_min, 1.0, |m| f(m) > 0.0);
    let mu_check = find_root(f, df, mu_min, hi);
    Ok(state_on_line(mu_check, q_m))
}

fn state_on_line(mu: f64, q_m: f64) -> State {
    State::new(mu.exp(), q_m).expect("curve intersection density is above the vacuum floor")
}

/// The unique intersection of the forward 1-curve through `u_l` and the
/// backward 2-curve through `u_r` — the middle state of the classical
/// Riemann solution. The difference of the two `nu(mu)` branches is
/// strictly decreasing, so the bracket is monotone and the root unique.
pub fn intermediate_state(u_l: State, u_r: State, g: GasParams) -> State {
    if u_l == u_r {
        return u_l;
    }
    let (mu_l, nu_l) = u_l.mu_nu(g);
    let (mu_r, nu_r) = u_r.mu_nu(g);
    let d = |mu: f64| fl1_nu(mu, mu_l, nu_l) - bl2_nu(mu, mu_r, nu_r);
    let dd = |mu: f64| fl1_dnu(mu, mu_l) - bl2_dnu(mu, mu_r);
    let mut lo = mu_l.min(mu_r);
    let mut hi = mu_l.max(mu_r);
    if d(lo) < 0.0 {
        lo = expand_lower(lo, 1.0, |m| d(m) > 0.0);
    }
    if d(hi) > 0.0 {
        hi = expand_upper(hi, 1.0, |m| d(m) < 0.0);
    }
    let mu = find_root(d, dd, lo, hi);
    let nu = 0.5 * (fl1_nu(mu, mu_l, nu_l) + bl2_nu(mu, mu_r, nu_r));
    State::from_mu_nu(mu, nu, g).expect("intermediate state density is above the vacuum floor")
}
