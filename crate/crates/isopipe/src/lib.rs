//! Exact Riemann solvers for isothermal gas flow in a pipe with a valve.
//!
//! The crate models one-dimensional isothermal gas flow (`p = a^2 rho`)
//! with a pressure-controlled valve at `x = 0`:
//!
//! * [`state`] — the state space `(rho, q)` and its derived coordinates;
//! * [`lax`] — closed-form wave-curve geometry and the monotone scalar
//!   solves for curve intersections;
//! * [`riemann`] — the classical Riemann solver, self-similar sampling and
//!   interface traces;
//! * [`valve`] — valve decision models (electronic, spring, one-way,
//!   pressure-drop) and the coupling Riemann solver that may insert a
//!   stationary under-compressive discontinuity at the valve;
//! * [`classify`] — coherence, consistence, continuity and
//!   invariant-domain predicates for the electronic valve, in both
//!   closed-form and definition-based (re-solving) variants, plus
//!   phase-diagram sweeps;
//! * [`godunov`] — a first-order finite-volume scheme whose interface
//!   fluxes come from the exact solvers, with the valve at an interior
//!   cell interface.
//!
//! With the default `parallel` feature, sweeps, flux loops and the
//! randomized verification suites run on rayon; results are bitwise
//! identical to the single-threaded fallback.

pub mod classify;
pub mod godunov;
pub mod lax;
pub mod riemann;
pub mod solver;
pub mod state;
pub mod valve;

pub use classify::{
    classify, coherent_by_definition, consistent_by_definition, in_invariant_domain, phi,
    RegimeReport,
};
pub use lax::{
    bar_state, check_state, curve_value, flux_window_minus, flux_window_plus, hat_state,
    intermediate_state, shock_speed, underline_state, xi, xi_inv, CurveKind, Family, FluxWindow,
};
pub use riemann::{l1_distance, solve_rp, Wave, WaveFan, WaveFamily, WaveKind};
pub use state::{GasParams, SonicClass, State, StateError};
pub use valve::{
    solve_coupled, ElectronicValve, OneWayValve, PressureDropValve, SpringValve, ValveConfig,
    ValveDecision, ValveError, ValveModel,
};
