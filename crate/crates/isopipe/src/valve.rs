//! Valve models and the coupling Riemann solver.
//!
//! A valve sits at `x = 0`. When it is open the flow is governed by the
//! classical solver on the whole line; when it is active it imposes an
//! interface flux `q_m` and the solution is the juxtaposition of a
//! single nonpositive-speed 1-wave from the left datum to
//! `hat(q_m, u_l)`, a stationary under-compressive jump to
//! `check(q_m, u_r)` (omitted when the two coincide), and a single
//! nonnegative-speed 2-wave to the right datum. Mass is conserved across
//! the interface; momentum in general is not — the deficit is the force
//! exerted by the valve.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lax::{check_state, flux_window_minus, hat_state, Family, LaxError};
use crate::riemann::{solve_rp, wave_between, zero_strength, Wave, WaveFan, WaveFamily, WaveKind};
use crate::state::{GasParams, State};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValveError {
    #[error("valve parameter must be strictly positive, got {value}")]
    NonPositiveParameter { value: f64 },
    #[error(
        "pressure-drop law has no admissible flux in [0, {hi}] (residual at the window edge: {residual})"
    )]
    NoAdmissibleFlux { hi: f64, residual: f64 },
    #[error(transparent)]
    Lax(#[from] LaxError),
}

/// Outcome of a valve decision for a datum pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValveDecision {
    Open,
    Active { q_m: f64 },
}

impl ValveDecision {
    pub fn is_active(&self) -> bool {
        matches!(self, ValveDecision::Active { .. })
    }

    pub fn q_m(&self) -> Option<f64> {
        match self {
            ValveDecision::Open => None,
            ValveDecision::Active { q_m } => Some(*q_m),
        }
    }
}

/// Decision contract of a valve: given the two sensor states, choose open
/// or active mode and, when active, the interface flux. Implementations
/// must be pure, deterministic and total on the state space.
pub trait ValveModel: Send + Sync {
    fn decide(&self, u_l: State, u_r: State, g: GasParams)
        -> Result<ValveDecision, ValveError>;
}

impl ValveModel for Box<dyn ValveModel> {
    fn decide(
        &self,
        u_l: State,
        u_r: State,
        g: GasParams,
    ) -> Result<ValveDecision, ValveError> {
        (**self).decide(u_l, u_r, g)
    }
}

/// Signed pressure gap `p(check(0, u_r)) - p(hat(0, u_l))` that a closed
/// valve would have to sustain. This is the quantity the electronic valve
/// compares against its threshold and the diagnostic logged per step by the
/// simulator.
pub fn closed_pressure_gap(u_l: State, u_r: State, g: GasParams) -> f64 {
    let hat = hat_state(0.0, u_l, g).expect("zero flux is always admissible");
    let check = check_state(0.0, u_r, g).expect("zero flux is always admissible");
    check.pressure(g) - hat.pressure(g)
}

/// Two-way electronic pressure valve: closes (active, `q_m = 0`) exactly
/// when the pressure jump a closed valve would sustain is at most the
/// threshold; the boundary case belongs to the active set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectronicValve {
    pub threshold: f64,
}

impl ElectronicValve {
    pub fn new(threshold: f64) -> Result<Self, ValveError> {
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(ValveError::NonPositiveParameter { value: threshold });
        }
        Ok(Self { threshold })
    }
}

impl ValveModel for ElectronicValve {
    fn decide(
        &self,
        u_l: State,
        u_r: State,
        g: GasParams,
    ) -> Result<ValveDecision, ValveError> {
        if closed_pressure_gap(u_l, u_r, g).abs() <= self.threshold {
            Ok(ValveDecision::Active { q_m: 0.0 })
        } else {
            Ok(ValveDecision::Open)
        }
    }
}

/// Spring-loaded valve: compares the raw pressure jump `|p(rho_r) -
/// p(rho_l)|` of the sensor states against the spring resistance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpringValve {
    pub threshold: f64,
}

impl SpringValve {
    pub fn new(threshold: f64) -> Result<Self, ValveError> {
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(ValveError::NonPositiveParameter { value: threshold });
        }
        Ok(Self { threshold })
    }
}

impl ValveModel for SpringValve {
    fn decide(
        &self,
        u_l: State,
        u_r: State,
        g: GasParams,
    ) -> Result<ValveDecision, ValveError> {
        if (u_r.pressure(g) - u_l.pressure(g)).abs() <= self.threshold {
            Ok(ValveDecision::Active { q_m: 0.0 })
        } else {
            Ok(ValveDecision::Open)
        }
    }
}

/// One-way (check) valve wrapping another model: flow through the
/// interface may only be nonnegative. An active inner decision with
/// negative flux is clamped shut; an open inner decision is overridden to
/// a shut valve whenever the free-flow interface flux would be negative.
#[derive(Debug, Clone)]
pub struct OneWayValve<V> {
    pub inner: V,
}

impl<V: ValveModel> ValveModel for OneWayValve<V> {
    fn decide(
        &self,
        u_l: State,
        u_r: State,
        g: GasParams,
    ) -> Result<ValveDecision, ValveError> {
        match self.inner.decide(u_l, u_r, g)? {
            ValveDecision::Active { q_m } if q_m < 0.0 => {
                Ok(ValveDecision::Active { q_m: 0.0 })
            }
            ValveDecision::Open => {
                let (_, up) = solve_rp(u_l, u_r, g).traces(g);
                if up.q() < 0.0 {
                    Ok(ValveDecision::Active { q_m: 0.0 })
                } else {
                    Ok(ValveDecision::Open)
                }
            }
            other => Ok(other),
        }
    }
}

/// One-way valve with a quadratic pressure-drop law: always active, with
/// the flux `q_m >= 0` solving
///
/// ```text
/// p(check(q_m, u_r)) = p(hat(q_m, u_l)) - a^2 k q_m^2 / p(hat(q_m, u_l))
/// ```
///
/// When the downstream closed pressure already exceeds the upstream one the
/// valve shuts (`q_m = 0`); when no root exists in the admissible window an
/// error is reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureDropValve {
    pub k: f64,
}

impl PressureDropValve {
    pub fn new(k: f64) -> Result<Self, ValveError> {
        if !(k.is_finite() && k > 0.0) {
            return Err(ValveError::NonPositiveParameter { value: k });
        }
        Ok(Self { k })
    }

    /// Residual of the pressure-drop law at flux `q`.
    fn law_residual(&self, q: f64, u_l: State, u_r: State, g: GasParams) -> Result<f64, ValveError> {
        let p_hat = hat_state(q, u_l, g)?.pressure(g);
        let p_check = check_state(q, u_r, g)?.pressure(g);
        let a = g.a();
        Ok(p_check - p_hat + a * a * self.k * q * q / p_hat)
    }
}

impl ValveModel for PressureDropValve {
    fn decide(
        &self,
        u_l: State,
        u_r: State,
        g: GasParams,
    ) -> Result<ValveDecision, ValveError> {
        let g0 = self.law_residual(0.0, u_l, u_r, g)?;
        if g0 >= 0.0 {
            // downstream pressure at least matches upstream: the check
            // valve shuts and zero flow satisfies the law or seals it
            return Ok(ValveDecision::Active { q_m: 0.0 });
        }
        let hi = flux_window_minus(u_l, g).hi;
        let g_hi = self.law_residual(hi, u_l, u_r, g)?;
        if g_hi < 0.0 {
            return Err(ValveError::NoAdmissibleFlux {
                hi,
                residual: g_hi,
            });
        }
        // the residual is strictly increasing in q on [0, hi]
        let (mut lo, mut hi) = (0.0, hi);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.law_residual(mid, u_l, u_r, g)? < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * hi.abs().max(1.0) {
                break;
            }
        }
        Ok(ValveDecision::Active {
            q_m: 0.5 * (lo + hi),
        })
    }
}

/// Solves the Riemann problem with the valve condition at `x = 0`.
pub fn solve_coupled(
    u_l: State,
    u_r: State,
    model: &dyn ValveModel,
    g: GasParams,
) -> Result<WaveFan, ValveError> {
    match model.decide(u_l, u_r, g)? {
        ValveDecision::Open => Ok(solve_rp(u_l, u_r, g)),
        ValveDecision::Active { q_m } => {
            // hat/check validate q_m against the two flux windows
            let um = hat_state(q_m, u_l, g)?;
            let up = check_state(q_m, u_r, g)?;
            let mut waves = Vec::with_capacity(3);
            waves.extend(wave_between(u_l, um, Family::One, g));
            if !zero_strength(um, up, g) {
                waves.push(Wave {
                    family: WaveFamily::Stationary,
                    kind: WaveKind::UnderCompressive,
                    left: um,
                    right: up,
                    speed_lo: 0.0,
                    speed_hi: 0.0,
                });
            }
            waves.extend(wave_between(up, u_r, Family::Two, g));
            Ok(WaveFan {
                left_datum: u_l,
                right_datum: u_r,
                waves,
            })
        }
    }
}

/// Serializable valve selection, mirroring the trait objects above.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ValveConfig {
    Electronic {
        #[serde(rename = "M")]
        m: f64,
    },
    Spring {
        #[serde(rename = "M")]
        m: f64,
    },
    OneWay {
        inner: Box<ValveConfig>,
    },
    PressureDrop {
        k: f64,
    },
}

impl ValveConfig {
    pub fn build(&self) -> Result<Box<dyn ValveModel>, ValveError> {
        Ok(match self {
            ValveConfig::Electronic { m } => Box::new(ElectronicValve::new(*m)?),
            ValveConfig::Spring { m } => Box::new(SpringValve::new(*m)?),
            ValveConfig::OneWay { inner } => Box::new(OneWayValve {
                inner: inner.build()?,
            }),
            ValveConfig::PressureDrop { k } => Box::new(PressureDropValve::new(*k)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lax::{bar_state, curve_value, CurveKind};
    use crate::state::states_close;

    fn g1() -> GasParams {
        GasParams::new(1.0).unwrap()
    }

    fn st(rho: f64, q: f64) -> State {
        State::new(rho, q).unwrap()
    }

    #[test]
    fn electronic_decision_uses_hat_check_pressures() {
        let g = g1();
        let (ul, ur) = (st(1.0, 0.0), st(2.0, 0.0));
        // both data at rest: hat = (1,0), check = (2,0), gap = 1
        let wide = ElectronicValve::new(1.5).unwrap();
        assert_eq!(
            wide.decide(ul, ur, g).unwrap(),
            ValveDecision::Active { q_m: 0.0 }
        );
        let narrow = ElectronicValve::new(0.5).unwrap();
        assert_eq!(narrow.decide(ul, ur, g).unwrap(), ValveDecision::Open);
    }

    #[test]
    fn electronic_boundary_belongs_to_active() {
        let g = g1();
        let v = ElectronicValve::new(1.0).unwrap();
        // gap is exactly 1.0 = M for rest data (1, 0) / (2, 0)
        assert!(v.decide(st(1.0, 0.0), st(2.0, 0.0), g).unwrap().is_active());
    }

    #[test]
    fn electronic_equal_data_is_active() {
        let g = g1();
        let v = ElectronicValve::new(1e-9_f64.max(0.1)).unwrap();
        assert!(v.decide(st(1.0, 0.0), st(1.0, 0.0), g).unwrap().is_active());
    }

    #[test]
    fn spring_compares_raw_densities() {
        let g = g1();
        let v = SpringValve::new(0.1).unwrap();
        assert!(v.decide(st(1.0, 5.0), st(1.0, -5.0), g).unwrap().is_active());
        let v = SpringValve::new(0.5).unwrap();
        assert_eq!(v.decide(st(1.0, 0.0), st(2.0, 0.0), g).unwrap(), ValveDecision::Open);
        assert!(v.decide(st(1.0, 0.0), st(1.4, 0.0), g).unwrap().is_active());
    }

    #[test]
    fn one_way_passes_through_nonnegative_active_flux() {
        let g = g1();
        let v = OneWayValve {
            inner: ElectronicValve::new(1.5).unwrap(),
        };
        assert_eq!(
            v.decide(st(1.0, 0.0), st(2.0, 0.0), g).unwrap(),
            ValveDecision::Active { q_m: 0.0 }
        );
    }

    #[test]
    fn one_way_overrides_open_with_backward_flow() {
        let g = g1();
        // inner is open (gap 1 > 0.5) and the free-flow trace has q < 0
        let v = OneWayValve {
            inner: ElectronicValve::new(0.5).unwrap(),
        };
        assert_eq!(
            v.decide(st(1.0, 0.0), st(2.0, 0.0), g).unwrap(),
            ValveDecision::Active { q_m: 0.0 }
        );
        // mirrored data: free flow is forward, stays open
        assert_eq!(
            v.decide(st(2.0, 0.0), st(1.0, 0.0), g).unwrap(),
            ValveDecision::Open
        );
    }

    #[test]
    fn pressure_drop_equal_rest_data_gives_zero_flux() {
        let g = g1();
        let v = PressureDropValve::new(1.0).unwrap();
        assert_eq!(
            v.decide(st(1.0, 0.0), st(1.0, 0.0), g).unwrap(),
            ValveDecision::Active { q_m: 0.0 }
        );
    }

    #[test]
    fn pressure_drop_forward_gradient_has_positive_root() {
        let g = g1();
        let v = PressureDropValve::new(1.0).unwrap();
        let (ul, ur) = (st(2.0, 0.0), st(1.0, 0.0));
        let q_m = match v.decide(ul, ur, g).unwrap() {
            ValveDecision::Active { q_m } => q_m,
            other => panic!("expected active, got {other:?}"),
        };
        assert!(q_m > 0.0 && q_m < bar_state(ul, g).q());
        // residual of the law at the found flux
        let r = v.law_residual(q_m, ul, ur, g).unwrap();
        let p_scale = ul.pressure(g).max(ur.pressure(g));
        assert!(r.abs() <= 1e-10 * p_scale, "law residual {r}");

        // independent oracle: coarse bisection of the same law built from
        // raw curve evaluations (own scalar solves in rho)
        let p_hat = |q: f64| {
            let (mut lo, mut hi) = (bar_state(ul, g).rho(), 50.0);
            for _ in 0..120 {
                let mid = 0.5 * (lo + hi);
                let on = curve_value(CurveKind::Forward, Family::One, mid, ul, g).unwrap();
                if on > q {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            g.a() * g.a() * 0.5 * (lo + hi)
        };
        let p_check = |q: f64| {
            let (mut lo, mut hi) = (crate::lax::underline_state(ur, g).rho(), 50.0);
            for _ in 0..120 {
                let mid = 0.5 * (lo + hi);
                let on = curve_value(CurveKind::Backward, Family::Two, mid, ur, g).unwrap();
                if on < q {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            g.a() * g.a() * 0.5 * (lo + hi)
        };
        let law = |q: f64| p_check(q) - p_hat(q) + q * q / p_hat(q);
        let (mut lo, mut hi) = (0.0f64, bar_state(ul, g).q());
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            if law(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q_oracle = 0.5 * (lo + hi);
        assert!(
            (q_m - q_oracle).abs() <= 1e-6 * q_oracle.max(1.0),
            "lib {q_m} vs oracle {q_oracle}"
        );
    }

    #[test]
    fn pressure_drop_adverse_gradient_shuts_the_valve() {
        let g = g1();
        let v = PressureDropValve::new(1.0).unwrap();
        // downstream pressure higher: residual at zero is +1 > 0
        assert_eq!(
            v.decide(st(1.0, 0.0), st(2.0, 0.0), g).unwrap(),
            ValveDecision::Active { q_m: 0.0 }
        );
    }

    #[test]
    fn coupled_rest_data_active_yields_pure_under_compressive_jump() {
        let g = g1();
        let model = ElectronicValve::new(1.5).unwrap();
        let fan = solve_coupled(st(1.0, 0.0), st(2.0, 0.0), &model, g).unwrap();
        assert_eq!(fan.waves.len(), 1);
        let w = &fan.waves[0];
        assert_eq!(w.kind, WaveKind::UnderCompressive);
        assert_eq!(w.family, WaveFamily::Stationary);
        assert_eq!((w.speed_lo, w.speed_hi), (0.0, 0.0));
        assert_eq!(w.left, st(1.0, 0.0));
        assert_eq!(w.right, st(2.0, 0.0));
        let (um, up) = fan.traces(g);
        assert_eq!(um.q(), 0.0);
        assert_eq!(up.q(), 0.0);
    }

    #[test]
    fn coupled_open_equals_classical_solver() {
        let g = g1();
        let model = ElectronicValve::new(0.5).unwrap();
        let fan = solve_coupled(st(1.0, 0.0), st(2.0, 0.0), &model, g).unwrap();
        let classic = solve_rp(st(1.0, 0.0), st(2.0, 0.0), g);
        assert_eq!(fan.waves.len(), classic.waves.len());
        for (a, b) in fan.waves.iter().zip(&classic.waves) {
            assert_eq!(a.kind, b.kind);
            assert_eq!(a.left, b.left);
            assert_eq!(a.right, b.right);
        }
    }

    #[test]
    fn coupled_active_neutral_pair_has_no_under_compressive_wave() {
        let g = g1();
        let model = ElectronicValve::new(2.0).unwrap();
        let (ul, ur) = (st(1.0, 1.0), st(1.0, -1.0));
        // hat and check coincide at ((3+sqrt5)/2, 0): two shocks, no jump
        let fan = solve_coupled(ul, ur, &model, g).unwrap();
        assert_eq!(fan.waves.len(), 2);
        assert!(fan.waves.iter().all(|w| w.kind == WaveKind::Shock));
        let golden = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((fan.waves[0].right.rho() - golden).abs() < 1e-12);
        assert!((fan.waves[0].speed_lo + (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
        assert!((fan.waves[1].speed_lo - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn active_fans_split_by_wave_speed_sign() {
        let g = g1();
        // threshold wide enough that every pair below decides active
        let model = ElectronicValve::new(20.0).unwrap();
        let pairs = [
            (st(1.0, 0.5), st(2.0, -0.25)),
            (st(0.5, -0.2), st(0.7, 0.4)),
            (st(3.0, 4.0), st(0.2, 0.1)),
        ];
        for (ul, ur) in pairs {
            let fan = solve_coupled(ul, ur, &model, g).unwrap();
            let mut seen_zero = false;
            for w in &fan.waves {
                match w.kind {
                    WaveKind::UnderCompressive => {
                        seen_zero = true;
                        assert_eq!((w.speed_lo, w.speed_hi), (0.0, 0.0));
                    }
                    _ => {
                        if !seen_zero {
                            assert!(w.speed_hi <= 1e-12, "left sub-fan speed {}", w.speed_hi);
                        } else {
                            assert!(w.speed_lo >= -1e-12, "right sub-fan speed {}", w.speed_lo);
                        }
                    }
                }
            }
            // mass flux is continuous at the interface
            let (um, up) = fan.traces(g);
            assert!((um.q() - up.q()).abs() <= 1e-11 * um.q().abs().max(1.0));
        }
    }

    #[test]
    fn momentum_flux_jump_iff_under_compressive_wave() {
        let g = g1();
        let model = ElectronicValve::new(1.5).unwrap();
        let fan = solve_coupled(st(1.0, 0.0), st(2.0, 0.0), &model, g).unwrap();
        let (um, up) = fan.traces(g);
        let jump = up.flux(g).1 - um.flux(g).1;
        assert!((jump - 1.0).abs() < 1e-12, "valve force should be the pressure gap");

        let neutral = solve_coupled(st(1.0, 1.0), st(1.0, -1.0), &model, g).unwrap();
        let (um, up) = neutral.traces(g);
        assert!((up.flux(g).1 - um.flux(g).1).abs() < 1e-11);
        assert!(!neutral
            .waves
            .iter()
            .any(|w| w.kind == WaveKind::UnderCompressive));
    }

    #[test]
    fn coupled_half_fans_are_classical_solutions() {
        let g = g1();
        let model = ElectronicValve::new(3.0).unwrap();
        let (ul, ur) = (st(1.2, 0.7), st(0.8, -0.9));
        let fan = solve_coupled(ul, ur, &model, g).unwrap();
        let (um, up) = fan.traces(g);
        // each half, re-solved classically, matches the fan on its side
        let left = solve_rp(ul, um, g);
        let right = solve_rp(up, ur, g);
        for &xi in &[-3.0, -1.5, -0.4, -0.05] {
            assert!(states_close(fan.sample(xi, g), left.sample(xi, g), 1e-9, g));
        }
        for &xi in &[0.05, 0.3, 1.1, 4.0] {
            assert!(states_close(fan.sample(xi, g), right.sample(xi, g), 1e-9, g));
        }
    }

    #[test]
    fn valve_config_round_trips_and_builds() {
        let json = r#"{"type":"one_way","inner":{"type":"electronic","M":1.5}}"#;
        let cfg: ValveConfig = serde_json::from_str(json).unwrap();
        assert_eq!(
            cfg,
            ValveConfig::OneWay {
                inner: Box::new(ValveConfig::Electronic { m: 1.5 })
            }
        );
        let back = serde_json::to_string(&cfg).unwrap();
        assert_eq!(back, json);
        let model = cfg.build().unwrap();
        let g = g1();
        assert!(model
            .decide(st(1.0, 0.0), st(1.0, 0.0), g)
            .unwrap()
            .is_active());

        let bad: ValveConfig = serde_json::from_str(r#"{"type":"spring","M":-1.0}"#).unwrap();
        assert!(bad.build().is_err());
    }
}
