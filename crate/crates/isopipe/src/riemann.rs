//! The classical (Lax) Riemann solver: wave-fan construction, self-similar
//! sampling and interface traces.
//!
//! A solution of the Riemann problem is a self-similar function of
//! `xi = x/t`, represented here as an ordered list of waves. Between and
//! outside the waves the solution is constant; inside a rarefaction it is
//! sampled in closed form from `lambda_i(u(xi)) = xi`. Sampling is right
//! continuous at discontinuities.

use serde::Serialize;

use crate::lax::{intermediate_state, shock_speed, Family};
use crate::state::{GasParams, State};

/// Relative threshold below which a wave is considered to have zero
/// strength and is omitted from the fan. Keeps root-finder noise from
/// producing spurious zero-length waves.
pub const WAVE_STRENGTH_TOL: f64 = 1e-13;

/// Family of a wave in a fan; the stationary kind is reserved for
/// under-compressive discontinuities at `xi = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveFamily {
    One,
    Two,
    Stationary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    Shock,
    Rarefaction,
    UnderCompressive,
}

/// One wave of a self-similar solution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Wave {
    pub family: WaveFamily,
    pub kind: WaveKind,
    pub left: State,
    pub right: State,
    pub speed_lo: f64,
    pub speed_hi: f64,
}

impl Wave {
    /// Interior of a rarefaction at ray `xi`, from `lambda_i(u) = xi`.
    fn rarefaction_interior(&self, xi: f64, g: GasParams) -> State {
        let a = g.a();
        let vl = self.left.v();
        let (v, rho) = match self.family {
            WaveFamily::One => (xi + a, self.left.rho() * ((vl - a - xi) / a).exp()),
            WaveFamily::Two => (xi - a, self.left.rho() * ((xi - a - vl) / a).exp()),
            WaveFamily::Stationary => unreachable!("stationary waves have no interior"),
        };
        State::new(rho, rho * v).expect("rarefaction interior density is above the vacuum floor")
    }
}

/// Ordered wave list describing a self-similar solution `xi -> u(xi)`.
#[derive(Debug, Clone, Serialize)]
pub struct WaveFan {
    pub left_datum: State,
    pub right_datum: State,
    pub waves: Vec<Wave>,
}

impl WaveFan {
    pub fn constant(u: State) -> Self {
        Self {
            left_datum: u,
            right_datum: u,
            waves: Vec::new(),
        }
    }

    /// Samples the solution at `xi = x/t`; right continuous at jumps.
    pub fn sample(&self, xi: f64, g: GasParams) -> State {
        let mut current = self.left_datum;
        for w in &self.waves {
            if xi < w.speed_lo {
                return current;
            }
            if w.kind == WaveKind::Rarefaction && xi < w.speed_hi {
                return w.rarefaction_interior(xi, g);
            }
            current = w.right;
        }
        current
    }

    /// Left limit `lim_{s -> xi^-} u(s)`.
    pub fn sample_left_limit(&self, xi: f64, g: GasParams) -> State {
        let mut current = self.left_datum;
        for w in &self.waves {
            if xi <= w.speed_lo {
                return current;
            }
            if w.kind == WaveKind::Rarefaction && xi <= w.speed_hi {
                return w.rarefaction_interior(xi, g);
            }
            current = w.right;
        }
        current
    }

    /// Traces at the interface: `(u(0^-), u(0^+))`.
    pub fn traces(&self, g: GasParams) -> (State, State) {
        (self.sample_left_limit(0.0, g), self.sample(0.0, g))
    }

    /// All wave speeds, in order (rarefactions contribute both edges).
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = Vec::with_capacity(2 * self.waves.len());
        for w in &self.waves {
            pts.push(w.speed_lo);
            if w.speed_hi != w.speed_lo {
                pts.push(w.speed_hi);
            }
        }
        pts
    }

    pub fn max_abs_speed(&self) -> f64 {
        self.waves
            .iter()
            .flat_map(|w| [w.speed_lo.abs(), w.speed_hi.abs()])
            .fold(0.0, f64::max)
    }
}

pub(crate) fn zero_strength(left: State, right: State, g: GasParams) -> bool {
    let rho_scale = left.rho().max(right.rho());
    let q_scale = left
        .q()
        .abs()
        .max(right.q().abs())
        .max(g.a() * rho_scale);
    (left.rho() - right.rho()).abs() <= WAVE_STRENGTH_TOL * rho_scale
        && (left.q() - right.q()).abs() <= WAVE_STRENGTH_TOL * q_scale
}

/// Builds the single i-family wave connecting `left` to `right`, where
/// `right` lies on the forward i-curve through `left`. Returns `None` for a
/// zero-strength jump.
pub(crate) fn wave_between(
    left: State,
    right: State,
    family: Family,
    g: GasParams,
) -> Option<Wave> {
    if zero_strength(left, right, g) {
        return None;
    }
    let fam = match family {
        Family::One => WaveFamily::One,
        Family::Two => WaveFamily::Two,
    };
    let compressive = match family {
        Family::One => right.rho() > left.rho(),
        Family::Two => right.rho() < left.rho(),
    };
    if compressive {
        let sigma = shock_speed(family, right.rho(), left, g)
            .expect("shock endpoint density is positive");
        Some(Wave {
            family: fam,
            kind: WaveKind::Shock,
            left,
            right,
            speed_lo: sigma,
            speed_hi: sigma,
        })
    } else {
        let (lo, hi) = match family {
            Family::One => (left.eigenvalues(g).0, right.eigenvalues(g).0),
            Family::Two => (left.eigenvalues(g).1, right.eigenvalues(g).1),
        };
        Some(Wave {
            family: fam,
            kind: WaveKind::Rarefaction,
            left,
            right,
            speed_lo: lo,
            speed_hi: hi,
        })
    }
}

/// Solves the Riemann problem with data `(u_l, u_r)`: a 1-family wave to
/// the intermediate state followed by a 2-family wave, degenerate waves
/// omitted.
pub fn solve_rp(u_l: State, u_r: State, g: GasParams) -> WaveFan {
    if u_l == u_r {
        return WaveFan {
            left_datum: u_l,
            right_datum: u_r,
            waves: Vec::new(),
        };
    }
    let tilde = intermediate_state(u_l, u_r, g);
    let mut waves = Vec::with_capacity(2);
    waves.extend(wave_between(u_l, tilde, Family::One, g));
    waves.extend(wave_between(tilde, u_r, Family::Two, g));
    WaveFan {
        left_datum: u_l,
        right_datum: u_r,
        waves,
    }
}

/// L1 distance between two self-similar solutions over `[xi_lo, xi_hi]`,
/// with the pointwise norm `|drho| + |dq|`. Integration splits at the
/// merged breakpoints of both fans and applies Gauss-Legendre quadrature on
/// each smooth segment.
pub fn l1_distance(fan_a: &WaveFan, fan_b: &WaveFan, g: GasParams, xi_lo: f64, xi_hi: f64) -> f64 {
    let mut cuts: Vec<f64> = fan_a
        .breakpoints()
        .into_iter()
        .chain(fan_b.breakpoints())
        .filter(|s| *s > xi_lo && *s < xi_hi)
        .collect();
    cuts.push(xi_lo);
    cuts.push(xi_hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        total += gauss_legendre_20(lo, hi, |xi| {
            let ua = fan_a.sample(xi, g);
            let ub = fan_b.sample(xi, g);
            (ua.rho() - ub.rho()).abs() + (ua.q() - ub.q()).abs()
        });
    }
    total
}

/// 20-point Gauss-Legendre rule on `[lo, hi]`.
pub(crate) fn gauss_legendre_20<F: Fn(f64) -> f64>(lo: f64, hi: f64, f: F) -> f64 {
    // abscissae / weights for n = 20 on [-1, 1] (positive half; symmetric)
    const X: [f64; 10] = [
        0.0765265211334973,
        0.2277858511416451,
        0.3737060887154195,
        0.5108670019508271,
        0.6360536807265150,
        0.7463319064601508,
        0.8391169718222188,
        0.9122344282513259,
        0.9639719272779138,
        0.9931285991850949,
    ];
    const W: [f64; 10] = [
        0.1527533871307258,
        0.1491729864726037,
        0.1420961093183820,
        0.1316886384491766,
        0.1181945319615184,
        0.1019301198172404,
        0.0832767415767048,
        0.0626720483341091,
        0.0406014298003869,
        0.0176140071391521,
    ];
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut sum = 0.0;
    for i in 0..10 {
        sum += W[i] * (f(mid - half * X[i]) + f(mid + half * X[i]));
    }
    half * sum
}
