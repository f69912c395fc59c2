//! First-order Godunov scheme on a 1-D pipe with the valve at an interior
//! cell interface.
//!
//! Interior interface fluxes are physical fluxes of the exact Riemann
//! solution sampled on the interface ray; the valve interface uses the
//! traces of the coupling solution instead, so the two adjacent cells can
//! see different momentum fluxes (the valve force) while the mass flux is
//! shared bitwise. The valve decision is re-evaluated every step from the
//! two adjacent cell averages.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::riemann::solve_rp;
use crate::state::{GasParams, State, StateError};
use crate::valve::{
    closed_pressure_gap, solve_coupled, ValveDecision, ValveError, ValveModel,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("grid: {0}")]
    Grid(String),
    #[error("config: {0}")]
    Config(String),
    #[error("cell {cell} left the state space after an update: {source}")]
    CellUpdate {
        cell: usize,
        #[source]
        source: StateError,
    },
    #[error(transparent)]
    Valve(#[from] ValveError),
}

/// Ghost-cell boundary treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// Ghost cell copies the edge cell.
    Outflow,
    /// Ghost cell mirrors the edge cell with negated momentum.
    Reflective,
}

/// Uniform finite-volume mesh with the valve at an interior interface.
///
/// The interface positions are `x_i = x_min + i dx`; construction requires
/// `x = 0` to land on an interface (up to a relative tolerance of 1e-9, and
/// `x_min` is then snapped so the valve interface sits at exactly zero).
#[derive(Debug, Clone)]
pub struct Grid1D {
    x_min: f64,
    dx: f64,
    valve_interface: usize,
    pub cells: Vec<State>,
    pub time: f64,
}

impl Grid1D {
    pub fn new(
        x_min: f64,
        x_max: f64,
        cells: Vec<State>,
    ) -> Result<Self, SimError> {
        let n = cells.len();
        if n < 2 {
            return Err(SimError::Grid(format!("need at least 2 cells, got {n}")));
        }
        if !(x_min < x_max) {
            return Err(SimError::Grid(format!(
                "empty domain: x_min = {x_min}, x_max = {x_max}"
            )));
        }
        let dx = (x_max - x_min) / n as f64;
        let j = (-x_min / dx).round();
        if (x_min + j * dx).abs() > 1e-9 * (x_max - x_min) {
            return Err(SimError::Grid(format!(
                "x = 0 must coincide with a cell interface (nearest interface at {})",
                x_min + j * dx
            )));
        }
        let j = j as usize;
        if j == 0 || j >= n {
            return Err(SimError::Grid(
                "the valve interface must be interior to the domain".into(),
            ));
        }
        Ok(Self {
            x_min: -(j as f64) * dx,
            dx,
            valve_interface: j,
            cells,
            time: 0.0,
        })
    }

    /// Builds a grid by evaluating `profile` at cell centers.
    pub fn from_profile(
        x_min: f64,
        x_max: f64,
        n_cells: usize,
        profile: impl Fn(f64) -> State,
    ) -> Result<Self, SimError> {
        if n_cells < 2 {
            return Err(SimError::Grid(format!(
                "need at least 2 cells, got {n_cells}"
            )));
        }
        let dx = (x_max - x_min) / n_cells as f64;
        let cells = (0..n_cells)
            .map(|i| profile(x_min + (i as f64 + 0.5) * dx))
            .collect();
        Self::new(x_min, x_max, cells)
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }

    #[inline]
    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    #[inline]
    pub fn valve_interface(&self) -> usize {
        self.valve_interface
    }

    /// Center of cell `i`.
    #[inline]
    pub fn x_center(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    pub fn total_mass(&self) -> f64 {
        self.cells.iter().map(|u| u.rho()).sum::<f64>() * self.dx
    }

    pub fn total_momentum(&self) -> f64 {
        self.cells.iter().map(|u| u.q()).sum::<f64>() * self.dx
    }
}

/// Simulation parameters. The valve model is part of the configuration;
/// stateless models keep the whole step deterministic.
pub struct SimConfig {
    pub cfl: f64,
    pub t_end: f64,
    pub boundary: Boundary,
    pub valve: Box<dyn ValveModel>,
    pub g: GasParams,
    pub output_every: f64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(SimError::Config(format!(
                "cfl must be in (0, 1], got {}",
                self.cfl
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(SimError::Config(format!(
                "t_end must be nonnegative and finite, got {}",
                self.t_end
            )));
        }
        if !(self.output_every > 0.0) {
            return Err(SimError::Config(format!(
                "output_every must be positive, got {}",
                self.output_every
            )));
        }
        Ok(())
    }
}

/// Per-step record of the valve state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValveEvent {
    /// Time at the beginning of the step.
    pub t: f64,
    pub decision: ValveDecision,
    /// Electronic-valve diagnostic: signed closed-valve pressure jump of
    /// the two adjacent cell averages.
    pub gap: f64,
}

/// Flux pair at one interface: what the cell on the left sees and what the
/// cell on the right sees. They differ only in the momentum component and
/// only at an active valve.
#[derive(Debug, Clone, Copy)]
struct InterfaceFlux {
    left: (f64, f64),
    right: (f64, f64),
}

impl InterfaceFlux {
    fn shared(f: (f64, f64)) -> Self {
        Self { left: f, right: f }
    }
}

fn ghost(u: State, boundary: Boundary) -> State {
    match boundary {
        Boundary::Outflow => u,
        Boundary::Reflective => u.mirror(),
    }
}

fn classic_flux(u_l: State, u_r: State, g: GasParams) -> (f64, f64) {
    if u_l == u_r {
        return u_l.flux(g);
    }
    solve_rp(u_l, u_r, g).sample(0.0, g).flux(g)
}

fn valve_flux(
    grid: &Grid1D,
    cfg: &SimConfig,
) -> Result<(InterfaceFlux, ValveEvent), SimError> {
    let j = grid.valve_interface;
    let (u_l, u_r) = (grid.cells[j - 1], grid.cells[j]);
    let g = cfg.g;
    let decision = cfg.valve.decide(u_l, u_r, g)?;
    let fan = solve_coupled(u_l, u_r, &*cfg.valve, g)?;
    let flux = match decision {
        ValveDecision::Open => InterfaceFlux::shared(fan.sample(0.0, g).flux(g)),
        ValveDecision::Active { .. } => {
            let (um, up) = fan.traces(g);
            let fl = um.flux(g);
            let fr = up.flux(g);
            // mass is conserved through the valve: both traces carry q_m
            assert_eq!(fl.0, fr.0, "valve mass flux must be shared bitwise");
            InterfaceFlux { left: fl, right: fr }
        }
    };
    let event = ValveEvent {
        t: grid.time,
        decision,
        gap: closed_pressure_gap(u_l, u_r, g),
    };
    Ok((flux, event))
}

fn interface_flux(
    i: usize,
    grid: &Grid1D,
    cfg: &SimConfig,
    valve: InterfaceFlux,
) -> InterfaceFlux {
    let n = grid.n_cells();
    if i == grid.valve_interface {
        return valve;
    }
    let u_l = if i == 0 {
        ghost(grid.cells[0], cfg.boundary)
    } else {
        grid.cells[i - 1]
    };
    let u_r = if i == n {
        ghost(grid.cells[n - 1], cfg.boundary)
    } else {
        grid.cells[i]
    };
    InterfaceFlux::shared(classic_flux(u_l, u_r, cfg.g))
}

#[cfg(feature = "parallel")]
fn compute_fluxes(grid: &Grid1D, cfg: &SimConfig, valve: InterfaceFlux) -> Vec<InterfaceFlux> {
    (0..=grid.n_cells())
        .into_par_iter()
        .map(|i| interface_flux(i, grid, cfg, valve))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn compute_fluxes(grid: &Grid1D, cfg: &SimConfig, valve: InterfaceFlux) -> Vec<InterfaceFlux> {
    compute_fluxes_seq(grid, cfg, valve)
}

/// Single-threaded flux loop; result is identical to the parallel path.
fn compute_fluxes_seq(grid: &Grid1D, cfg: &SimConfig, valve: InterfaceFlux) -> Vec<InterfaceFlux> {
    (0..=grid.n_cells())
        .map(|i| interface_flux(i, grid, cfg, valve))
        .collect()
}

/// Largest admissible time step: `cfl dx / max(|v| + a)`.
pub fn cfl_dt(grid: &Grid1D, cfg: &SimConfig) -> f64 {
    let smax = grid
        .cells
        .iter()
        .map(|u| u.v().abs() + cfg.g.a())
        .fold(0.0, f64::max);
    cfg.cfl * grid.dx / smax
}

/// Flux bookkeeping of one step, used for conservation accounting.
#[derive(Debug, Clone, Copy)]
pub struct StepFluxes {
    pub dt: f64,
    /// Mass and momentum flux entering through the left boundary interface.
    pub inflow: (f64, f64),
    /// Mass and momentum flux leaving through the right boundary interface.
    pub outflow: (f64, f64),
    /// Momentum-flux jump `f2(0^+) - f2(0^-)` at the valve (the valve force).
    pub valve_momentum_jump: f64,
}

/// Advances the grid by the time step `dt`.
pub fn step_by(
    grid: &mut Grid1D,
    cfg: &SimConfig,
    dt: f64,
) -> Result<(ValveEvent, StepFluxes), SimError> {
    let (valve, event) = valve_flux(grid, cfg)?;
    let fluxes = compute_fluxes(grid, cfg, valve);
    apply_fluxes(grid, dt, &fluxes).map(|fl| (event, fl))
}

/// Single-threaded variant of [`step_by`]; the result is identical.
pub fn step_by_seq(
    grid: &mut Grid1D,
    cfg: &SimConfig,
    dt: f64,
) -> Result<(ValveEvent, StepFluxes), SimError> {
    let (valve, event) = valve_flux(grid, cfg)?;
    let fluxes = compute_fluxes_seq(grid, cfg, valve);
    apply_fluxes(grid, dt, &fluxes).map(|fl| (event, fl))
}

fn apply_fluxes(
    grid: &mut Grid1D,
    dt: f64,
    fluxes: &[InterfaceFlux],
) -> Result<StepFluxes, SimError> {
    let lambda = dt / grid.dx;
    let mut new_cells = Vec::with_capacity(grid.n_cells());
    for (i, u) in grid.cells.iter().enumerate() {
        // the cell sees the right view of its left face and the left view
        // of its right face
        let fl = fluxes[i].right;
        let fr = fluxes[i + 1].left;
        let rho = u.rho() - lambda * (fr.0 - fl.0);
        let q = u.q() - lambda * (fr.1 - fl.1);
        new_cells.push(
            State::new(rho, q).map_err(|source| SimError::CellUpdate { cell: i, source })?,
        );
    }
    grid.cells = new_cells;
    grid.time += dt;
    let n = grid.n_cells();
    let j = grid.valve_interface;
    Ok(StepFluxes {
        dt,
        inflow: (dt * fluxes[0].right.0, dt * fluxes[0].right.1),
        outflow: (dt * fluxes[n].left.0, dt * fluxes[n].left.1),
        valve_momentum_jump: dt * (fluxes[j].right.1 - fluxes[j].left.1),
    })
}

/// Advances the grid by one CFL-limited step.
pub fn step(grid: &mut Grid1D, cfg: &SimConfig) -> Result<(ValveEvent, StepFluxes), SimError> {
    cfg.validate()?;
    let dt = cfl_dt(grid, cfg);
    step_by(grid, cfg, dt)
}

/// Conservation accounting and the per-step valve log of a full run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub steps: usize,
    pub mass_initial: f64,
    pub mass_final: f64,
    /// Net mass admitted through the two boundary interfaces.
    pub boundary_mass: f64,
    pub momentum_initial: f64,
    pub momentum_final: f64,
    /// Net momentum admitted through the two boundary interfaces.
    pub boundary_momentum: f64,
    /// Accumulated valve force `sum dt (f2(0^+) - f2(0^-))`. Nonzero only
    /// when the valve is active and influential.
    pub momentum_deficit: f64,
    pub events: Vec<ValveEvent>,
}

impl RunReport {
    /// Mass balance residual: change minus boundary contribution.
    pub fn mass_residual(&self) -> f64 {
        self.mass_final - self.mass_initial - self.boundary_mass
    }

    /// Momentum balance residual: change minus boundary contribution minus
    /// the accumulated valve force.
    pub fn momentum_residual(&self) -> f64 {
        self.momentum_final - self.momentum_initial - self.boundary_momentum
            - self.momentum_deficit
    }
}

/// Runs the simulation to `t_end`, clipping the last step, invoking
/// `on_snapshot` at the initial time, whenever a multiple of
/// `output_every` is crossed, and at the final time.
pub fn run(
    grid: &mut Grid1D,
    cfg: &SimConfig,
    mut on_snapshot: impl FnMut(&Grid1D),
) -> Result<RunReport, SimError> {
    cfg.validate()?;
    let mass_initial = grid.total_mass();
    let momentum_initial = grid.total_momentum();
    let mut report = RunReport {
        steps: 0,
        mass_initial,
        mass_final: mass_initial,
        boundary_mass: 0.0,
        momentum_initial,
        momentum_final: momentum_initial,
        boundary_momentum: 0.0,
        momentum_deficit: 0.0,
        events: Vec::new(),
    };
    on_snapshot(grid);
    let mut last_snapshot_time = grid.time;
    while grid.time < cfg.t_end {
        let dt = cfl_dt(grid, cfg).min(cfg.t_end - grid.time);
        let before = grid.time;
        let (event, fluxes) = step_by(grid, cfg, dt)?;
        report.steps += 1;
        report.events.push(event);
        report.boundary_mass += fluxes.inflow.0 - fluxes.outflow.0;
        report.boundary_momentum += fluxes.inflow.1 - fluxes.outflow.1;
        report.momentum_deficit += fluxes.valve_momentum_jump;
        if (grid.time / cfg.output_every).floor() > (before / cfg.output_every).floor() {
            on_snapshot(grid);
            last_snapshot_time = grid.time;
        }
    }
    if report.steps > 0 && grid.time != last_snapshot_time {
        on_snapshot(grid);
    }
    report.mass_final = grid.total_mass();
    report.momentum_final = grid.total_momentum();
    Ok(report)
}
