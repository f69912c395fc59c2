//! Simulation config file schema.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use isopipe::godunov::Boundary;
use isopipe::state::{GasParams, State};
use isopipe::valve::ValveConfig;

/// One piecewise-constant segment of the initial profile.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSegment {
    pub x_lo: f64,
    pub x_hi: f64,
    pub rho: f64,
    pub q: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimFile {
    pub a: f64,
    pub cfl: f64,
    pub t_end: f64,
    pub boundary: Boundary,
    pub valve: ValveConfig,
    pub cells: Vec<CellSegment>,
    pub n_cells: usize,
    pub output_every: f64,
    pub out: PathBuf,
    /// Valve event log path; defaults to `out` with extension
    /// `events.csv`.
    #[serde(default)]
    pub events_out: Option<PathBuf>,
}

impl SimFile {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(format!("config key a: must be strictly positive, got {}", self.a));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(format!("config key cfl: must be in (0, 1], got {}", self.cfl));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(format!(
                "config key t_end: must be nonnegative and finite, got {}",
                self.t_end
            ));
        }
        if !(self.output_every > 0.0) {
            return Err(format!(
                "config key output_every: must be strictly positive, got {}",
                self.output_every
            ));
        }
        if self.n_cells < 2 {
            return Err(format!(
                "config key n_cells: need at least 2 cells, got {}",
                self.n_cells
            ));
        }
        if self.cells.is_empty() {
            return Err("config key cells: at least one segment required".into());
        }
        for (i, seg) in self.cells.iter().enumerate() {
            if !(seg.x_lo < seg.x_hi) {
                return Err(format!(
                    "config key cells[{i}]: empty segment [{}, {}]",
                    seg.x_lo, seg.x_hi
                ));
            }
            if State::new(seg.rho, seg.q).is_err() {
                return Err(format!(
                    "config key cells[{i}]: state ({}, {}) is outside the state space",
                    seg.rho, seg.q
                ));
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> (f64, f64) {
        let lo = self.cells.iter().map(|s| s.x_lo).fold(f64::INFINITY, f64::min);
        let hi = self.cells.iter().map(|s| s.x_hi).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Piecewise-constant initial profile; every cell center must be
    /// covered by exactly one segment.
    pub fn profile(&self, _g: GasParams) -> Result<impl Fn(f64) -> State + '_, String> {
        let segments = self.cells.clone();
        Ok(move |x: f64| {
            segments
                .iter()
                .find(|s| s.x_lo <= x && x < s.x_hi)
                .or_else(|| segments.last().filter(|s| x == s.x_hi))
                .map(|s| State::new(s.rho, s.q).expect("segments validated"))
                .unwrap_or_else(|| panic!("no segment covers x = {x} (config key cells)"))
        })
    }

    pub fn events_path(&self) -> PathBuf {
        match &self.events_out {
            Some(p) => p.clone(),
            None => {
                let stem = self
                    .out
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "run".into());
                self.out
                    .parent()
                    .unwrap_or_else(|| Path::new("."))
                    .join(format!("{stem}.events.csv"))
            }
        }
    }
}
