//! CSV and JSON writers with byte-stable number formatting.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use isopipe::classify::SweepRow;
use isopipe::godunov::{Grid1D, ValveEvent};
use isopipe::riemann::WaveFan;
use isopipe::state::{GasParams, State};
use isopipe::valve::{ValveConfig, ValveDecision};

/// 17 significant digits: round-trip exact for f64 and byte-stable across
/// runs.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_profile_csv(
    path: &Path,
    t: f64,
    xs: &[f64],
    sample: impl Fn(f64) -> State,
    g: GasParams,
) -> io::Result<()> {
    let mut w = io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "t,x,rho,q,v,p,mu,nu")?;
    for &x in xs {
        write_state_row(&mut w, t, x, sample(x), g)?;
    }
    w.flush()
}

fn write_state_row<W: Write>(w: &mut W, t: f64, x: f64, u: State, g: GasParams) -> io::Result<()> {
    writeln!(
        w,
        "{},{},{},{},{},{},{},{}",
        fmt_f64(t),
        fmt_f64(x),
        fmt_f64(u.rho()),
        fmt_f64(u.q()),
        fmt_f64(u.v()),
        fmt_f64(u.pressure(g)),
        fmt_f64(u.mu()),
        fmt_f64(u.nu(g))
    )
}

pub fn write_snapshot_header<W: Write>(w: &mut W) -> io::Result<()> {
    writeln!(w, "t,x,rho,q,v,p,mu,nu")
}

/// One block per snapshot: a row per cell at the current time.
pub fn append_snapshot<W: Write>(w: &mut W, grid: &Grid1D, g: GasParams) -> io::Result<()> {
    for (i, u) in grid.cells.iter().enumerate() {
        write_state_row(w, grid.time, grid.x_center(i), *u, g)?;
    }
    Ok(())
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> io::Result<()> {
    let mut w = io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "mu,nu,regime,coherent,consistent")?;
    for row in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_f64(row.mu),
            fmt_f64(row.nu),
            row.report.regime_label(),
            row.report.coherent,
            row.report.consistent
        )?;
    }
    w.flush()
}

pub fn write_events_csv(path: &Path, events: &[ValveEvent]) -> io::Result<()> {
    let mut w = io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "t,mode,q_m,gap")?;
    for e in events {
        let (mode, q_m) = match e.decision {
            ValveDecision::Open => ("open", String::new()),
            ValveDecision::Active { q_m } => ("active", fmt_f64(q_m)),
        };
        writeln!(w, "{},{},{},{}", fmt_f64(e.t), mode, q_m, fmt_f64(e.gap))?;
    }
    w.flush()
}

/// JSON description of a solved wave fan, written next to the profile CSV.
#[derive(Serialize)]
pub struct FanSidecar<'a> {
    pub a: f64,
    pub t: f64,
    pub left: State,
    pub right: State,
    pub valve: Option<ValveConfig>,
    /// none / "open" / "active"
    pub mode: Option<&'static str>,
    pub q_m: Option<f64>,
    pub waves: &'a [isopipe::riemann::Wave],
    pub traces: Traces,
}

#[derive(Serialize)]
pub struct Traces {
    pub minus: State,
    pub plus: State,
}

impl<'a> FanSidecar<'a> {
    pub fn new(
        a: f64,
        t: f64,
        fan: &'a WaveFan,
        decision: Option<ValveDecision>,
        valve: Option<ValveConfig>,
        g: GasParams,
    ) -> Self {
        let (minus, plus) = fan.traces(g);
        Self {
            a,
            t,
            left: fan.left_datum,
            right: fan.right_datum,
            valve,
            mode: decision.map(|d| match d {
                ValveDecision::Open => "open",
                ValveDecision::Active { .. } => "active",
            }),
            q_m: decision.and_then(|d| d.q_m()),
            waves: &fan.waves,
            traces: Traces { minus, plus },
        }
    }
}
