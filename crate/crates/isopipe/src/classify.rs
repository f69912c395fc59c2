//! Regime classification for the electronic pressure valve.
//!
//! For a datum pair the valve is either open or active; active pairs split
//! into flow-neutral and influential ones, open pairs into six mutually
//! disjoint subsets that decide whether the traces of the free-flow
//! solution would keep the valve open (coherent) or flip it shut
//! (chattering). The module provides both the closed-form predicates and
//! slow definition-based checkers that re-solve the Riemann problems posed
//! by traces and cuts; the two routes are cross-checked in the acceptance
//! suite.

use std::sync::OnceLock;

use serde::Serialize;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::lax::{intermediate_state, xi_inv, Family};
use crate::riemann::{wave_between, WaveFan, WaveKind};
use crate::state::{states_close, GasParams, State};
use crate::valve::{closed_pressure_gap, solve_coupled, ValveError, ValveModel};

/// Relative flux threshold (scale `a rho`) below which the intermediate
/// state counts as flow-neutral; the intermediate state comes from a
/// root-finder, so exact zero cannot be required.
pub const NEUTRAL_FLUX_TOL: f64 = 1e-11;

/// State tolerance for the definition-based coherence and consistence
/// checks.
pub const DEFINITION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OpenActive {
    Open,
    Active,
}

/// Whether an active valve changes the flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Influence {
    #[serde(rename = "A_N")]
    Neutral,
    #[serde(rename = "A_I")]
    Influential,
}

/// The six disjoint subsets of the open regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OSubset {
    #[serde(rename = "O_O^1")]
    OO1,
    #[serde(rename = "O_O^2")]
    OO2,
    #[serde(rename = "O_O^3")]
    OO3,
    #[serde(rename = "O_O^4")]
    OO4,
    #[serde(rename = "O_A^1")]
    OA1,
    #[serde(rename = "O_A^2")]
    OA2,
}

impl OSubset {
    pub fn keeps_valve_open(self) -> bool {
        matches!(self, OSubset::OO1 | OSubset::OO2 | OSubset::OO3 | OSubset::OO4)
    }

    pub fn label(self) -> &'static str {
        match self {
            OSubset::OO1 => "O_O^1",
            OSubset::OO2 => "O_O^2",
            OSubset::OO3 => "O_O^3",
            OSubset::OO4 => "O_O^4",
            OSubset::OA1 => "O_A^1",
            OSubset::OA2 => "O_A^2",
        }
    }
}

/// Full classification of a datum pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegimeReport {
    pub open_active: OpenActive,
    pub influence: Option<Influence>,
    pub o_sub: Option<OSubset>,
    pub coherent: bool,
    pub consistent: bool,
    pub l1_continuous: bool,
    /// Signed pressure jump a closed valve would sustain.
    pub gap: f64,
    /// Momentum of the intermediate state of the free-flow solution.
    pub q_tilde: f64,
}

impl RegimeReport {
    /// Short label of the finest regime set the pair belongs to.
    pub fn regime_label(&self) -> &'static str {
        match (self.influence, self.o_sub) {
            (Some(Influence::Neutral), _) => "A_N",
            (Some(Influence::Influential), _) => "A_I",
            (_, Some(sub)) => sub.label(),
            _ => unreachable!("report carries either an influence or an open subset"),
        }
    }
}

/// `Phi(nu) = a^2 e^nu (e^{Xi^{-1}(nu)} - e^nu)`: the pressure gap between
/// the zero-flux hat and check states of a state with coordinates
/// `(mu, nu)` is `e^mu` times... see [`classify`] for how it enters the
/// open-subset formulas. Positive for `nu < 0`, zero at `0`, negative for
/// `nu > 0`.
pub fn phi(nu: f64, g: GasParams) -> f64 {
    g.a() * g.a() * nu.exp() * (xi_inv(nu).exp() - nu.exp())
}

/// The maximizer `nu_c` of [`phi`] (independent of the sound speed),
/// computed once by golden-section search. `Phi` is strictly decreasing on
/// `[nu_c, inf)` and `nu_c < -1`.
pub fn phi_maximizer() -> f64 {
    static NU_C: OnceLock<f64> = OnceLock::new();
    *NU_C.get_or_init(|| {
        let f = |nu: f64| nu.exp() * (xi_inv(nu).exp() - nu.exp());
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (-20.0f64, -0.5f64);
        let (mut c, mut d) = (b - inv_phi * (b - a), a + inv_phi * (b - a));
        let (mut fc, mut fd) = (f(c), f(d));
        while b - a > 1e-12 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = f(d);
            }
        }
        0.5 * (a + b)
    })
}

fn diagonal_not_influential(u: State, m: f64, g: GasParams) -> bool {
    u.q() == 0.0 || closed_pressure_gap(u, u, g).abs() > m
}

/// Classifies a pair for the electronic valve with threshold `m`.
pub fn classify(u_l: State, u_r: State, m: f64, g: GasParams) -> RegimeReport {
    let gap = closed_pressure_gap(u_l, u_r, g);
    let active = gap.abs() <= m;
    let tilde = intermediate_state(u_l, u_r, g);
    let q_tilde = tilde.q();
    let tilde_neutral = q_tilde.abs() <= NEUTRAL_FLUX_TOL * g.a() * tilde.rho();

    let (influence, o_sub) = if active {
        let inf = if tilde_neutral {
            Influence::Neutral
        } else {
            Influence::Influential
        };
        (Some(inf), None)
    } else {
        (None, Some(open_subset(u_l, u_r, tilde, m, g)))
    };

    let coherent = active || o_sub.is_some_and(|s| s.keeps_valve_open());

    let consistent = if active {
        u_l.q() >= 0.0
            && u_r.q() <= 0.0
            && diagonal_not_influential(u_l, m, g)
            && diagonal_not_influential(u_r, m, g)
    } else {
        diagonal_not_influential(u_l, m, g)
            && diagonal_not_influential(u_r, m, g)
            && (tilde_neutral || closed_pressure_gap(u_l, tilde, g).abs() > m)
            && (tilde_neutral || closed_pressure_gap(tilde, u_r, g).abs() > m)
            && !free_flow_rarefaction_touches_zero_flux(u_l, u_r, tilde, g)
    };

    RegimeReport {
        open_active: if active {
            OpenActive::Active
        } else {
            OpenActive::Open
        },
        influence,
        o_sub,
        coherent,
        consistent,
        l1_continuous: gap.abs() != m,
        gap,
        q_tilde,
    }
}

/// True when a rarefaction of the free-flow solution takes the value
/// `q = 0` somewhere in its closed span (touching an endpoint counts).
fn free_flow_rarefaction_touches_zero_flux(
    u_l: State,
    u_r: State,
    tilde: State,
    g: GasParams,
) -> bool {
    let waves = [
        wave_between(u_l, tilde, Family::One, g),
        wave_between(tilde, u_r, Family::Two, g),
    ];
    waves.into_iter().flatten().any(|w| {
        w.kind == WaveKind::Rarefaction && w.left.q() <= 0.0 && w.right.q() >= 0.0
    })
}

fn open_subset(u_l: State, u_r: State, tilde: State, m: f64, g: GasParams) -> OSubset {
    let (mu_l, nu_l) = u_l.mu_nu(g);
    let (mu_r, nu_r) = u_r.mu_nu(g);
    let nu_t = tilde.nu(g);
    if nu_t >= 0.0 {
        if nu_t <= nu_l {
            OSubset::OO3
        } else {
            let e = (mu_l + nu_l).exp() * phi(-(nu_l.max(1.0) * nu_t.min(1.0)), g);
            if e > m {
                OSubset::OO1
            } else {
                OSubset::OA1
            }
        }
    } else if nu_t >= nu_r {
        OSubset::OO4
    } else {
        let e = (mu_r - nu_r).exp() * phi(-(nu_r.min(-1.0) * nu_t.max(-1.0)), g);
        if e > m {
            OSubset::OO2
        } else {
            OSubset::OA2
        }
    }
}

/// Explicit coherence subset from the sign structure of the data alone:
/// `nu_r < 0 < nu_l` with both diagonal pressure gaps above the threshold.
/// A subset of the coherence domain.
pub fn ch_prime(u_l: State, u_r: State, m: f64, g: GasParams) -> bool {
    let (mu_l, nu_l) = u_l.mu_nu(g);
    let (mu_r, nu_r) = u_r.mu_nu(g);
    if !(nu_r < 0.0 && 0.0 < nu_l) {
        return false;
    }
    let left = (mu_l + nu_l).exp() * phi(-nu_l, g);
    let right = (mu_r - nu_r).exp() * phi(nu_r, g);
    left.min(right) > m
}

/// Signed margin of `u` inside the invariant region bounded by the two
/// rarefaction curves through `u0` (nonnegative iff inside).
pub fn invariant_domain_slack(u: State, u0: State, g: GasParams) -> f64 {
    let z_margin = u.z(g) - u0.z(g);
    let w_margin = u0.w(g) - u.w(g);
    z_margin.min(w_margin)
}

pub fn in_invariant_domain(u: State, u0: State, g: GasParams) -> bool {
    invariant_domain_slack(u, u0, g) >= 0.0
}

/// Test rays for the definition-based checks of a fan: wave speeds,
/// midpoints between consecutive speeds, rarefaction interior thirds, the
/// interface ray 0 and one ray beyond each edge of the fan. A rarefaction
/// crosses the zero-flux line only on the ray `xi = -a` (family 1) or
/// `xi = +a` (family 2); rays tightly inside the span around that point
/// are included because cut problems there can flip the valve decision
/// while every coarser ray stays clear.
pub fn consistency_grid(fan: &WaveFan, g: GasParams) -> Vec<f64> {
    let mut speeds = vec![0.0];
    for w in &fan.waves {
        speeds.push(w.speed_lo);
        speeds.push(w.speed_hi);
        if w.kind == WaveKind::Rarefaction {
            let width = w.speed_hi - w.speed_lo;
            speeds.push(w.speed_lo + width / 3.0);
            speeds.push(w.speed_lo + 2.0 * width / 3.0);
            let xi_zero = match w.family {
                crate::riemann::WaveFamily::One => -g.a(),
                crate::riemann::WaveFamily::Two => g.a(),
                crate::riemann::WaveFamily::Stationary => continue,
            };
            if w.speed_lo <= xi_zero && xi_zero <= w.speed_hi {
                speeds.push(xi_zero);
                for delta in [1e-3 * width, 1e-6 * width] {
                    speeds.push((xi_zero - delta).max(w.speed_lo));
                    speeds.push((xi_zero + delta).min(w.speed_hi));
                }
            }
        }
    }
    let far = fan.max_abs_speed() + 1.0;
    speeds.push(-far);
    speeds.push(far);
    speeds.sort_by(f64::total_cmp);
    speeds.dedup();
    let mut grid = Vec::with_capacity(2 * speeds.len());
    for pair in speeds.windows(2) {
        grid.push(pair[0]);
        grid.push(0.5 * (pair[0] + pair[1]));
    }
    grid.push(*speeds.last().expect("grid is never empty"));
    grid
}

/// Rays at which two piecewise representations must agree to consider the
/// underlying functions equal: merged breakpoints plus three interior
/// points per merged segment and one point beyond each end.
fn comparison_rays(fans: &[&WaveFan], extra: &[f64]) -> Vec<f64> {
    let mut cuts: Vec<f64> = fans
        .iter()
        .flat_map(|f| f.breakpoints())
        .chain(extra.iter().copied())
        .collect();
    let far = fans
        .iter()
        .map(|f| f.max_abs_speed())
        .fold(0.0, f64::max)
        .max(extra.iter().fold(0.0f64, |m, x| m.max(x.abs())))
        + 1.0;
    cuts.push(-far);
    cuts.push(far);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut rays = Vec::with_capacity(4 * cuts.len());
    for pair in cuts.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        rays.push(lo);
        for k in 1..4 {
            rays.push(lo + (hi - lo) * k as f64 / 4.0);
        }
    }
    rays.push(far);
    rays
}

/// Re-solves the Riemann problem posed by the solver's own interface
/// traces and checks that it reproduces the frozen two-state picture.
/// Failure is the signature of valve chattering.
pub fn coherent_by_definition(
    u_l: State,
    u_r: State,
    model: &dyn ValveModel,
    g: GasParams,
) -> Result<bool, ValveError> {
    let fan = solve_coupled(u_l, u_r, model, g)?;
    let (um, up) = fan.traces(g);
    let resolved = solve_coupled(um, up, model, g)?;
    let (rm, rp) = resolved.traces(g);
    if !states_close(rm, um, DEFINITION_TOL, g) || !states_close(rp, up, DEFINITION_TOL, g) {
        return Ok(false);
    }
    let rays = comparison_rays(&[&resolved], &[]);
    Ok(rays.into_iter().all(|xi| {
        let expected = if xi < 0.0 { um } else { up };
        states_close(resolved.sample(xi, g), expected, DEFINITION_TOL, g)
    }))
}

/// Checks the cut-and-paste conditions of consistence at every ray of
/// `xi_grid` by re-solving the two cut problems and comparing functions on
/// the merged ray set. The paste condition is implied by the two cut
/// comparisons at the shared rays.
pub fn consistent_by_definition(
    u_l: State,
    u_r: State,
    model: &dyn ValveModel,
    g: GasParams,
    xi_grid: &[f64],
) -> Result<bool, ValveError> {
    let fan = solve_coupled(u_l, u_r, model, g)?;
    for &xi0 in xi_grid {
        let u0 = fan.sample(xi0, g);
        let left_cut = solve_coupled(u_l, u0, model, g)?;
        let right_cut = solve_coupled(u0, u_r, model, g)?;
        let rays = comparison_rays(&[&fan, &left_cut, &right_cut], &[xi0]);
        for xi in rays {
            let full = fan.sample(xi, g);
            let expected_left = if xi < xi0 { full } else { u0 };
            if !states_close(left_cut.sample(xi, g), expected_left, DEFINITION_TOL, g) {
                return Ok(false);
            }
            let expected_right = if xi < xi0 { u0 } else { full };
            if !states_close(right_cut.sample(xi, g), expected_right, DEFINITION_TOL, g) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Which datum a phase-diagram sweep holds fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepSide {
    /// `u_l` fixed, the grid spans `u_r`.
    FixLeft,
    /// `u_r` fixed, the grid spans `u_l`.
    FixRight,
}

/// One evaluated grid point: the `(mu, nu)` coordinates of the swept datum
/// and the classification of the resulting pair.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub mu: f64,
    pub nu: f64,
    pub report: RegimeReport,
}

fn sweep_point(
    side: SweepSide,
    fixed: State,
    mu: f64,
    nu: f64,
    m: f64,
    g: GasParams,
) -> SweepRow {
    let moving = State::from_mu_nu(mu, nu, g)
        .expect("sweep grids stay far from the vacuum floor");
    let report = match side {
        SweepSide::FixLeft => classify(fixed, moving, m, g),
        SweepSide::FixRight => classify(moving, fixed, m, g),
    };
    SweepRow { mu, nu, report }
}

/// Classifies every point of the `(mu, nu)` grid against the fixed datum,
/// in row-major order with `mu` as the outer axis. Evaluated in parallel
/// when the `parallel` feature is enabled; the output order is identical
/// either way.
pub fn sweep_grid(
    side: SweepSide,
    fixed: State,
    mu_axis: &[f64],
    nu_axis: &[f64],
    m: f64,
    g: GasParams,
) -> Vec<SweepRow> {
    #[cfg(feature = "parallel")]
    {
        let n = nu_axis.len();
        (0..mu_axis.len() * n)
            .into_par_iter()
            .map(|k| sweep_point(side, fixed, mu_axis[k / n], nu_axis[k % n], m, g))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        sweep_grid_seq(side, fixed, mu_axis, nu_axis, m, g)
    }
}

/// Single-threaded variant of [`sweep_grid`]; same output.
pub fn sweep_grid_seq(
    side: SweepSide,
    fixed: State,
    mu_axis: &[f64],
    nu_axis: &[f64],
    m: f64,
    g: GasParams,
) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(mu_axis.len() * nu_axis.len());
    for &mu in mu_axis {
        for &nu in nu_axis {
            rows.push(sweep_point(side, fixed, mu, nu, m, g));
        }
    }
    rows
}
