//! State representation for the isothermal p-system.
//!
//! A state is a point `(rho, q)` in the open half plane `rho > 0`, where
//! `rho` is the mass density and `q` the linear momentum. The pressure law
//! is `p(rho) = a^2 rho` with `a` the (constant) sound speed. Several
//! derived coordinates are used throughout the crate:
//!
//! * `v = q / rho` — velocity,
//! * `mu = ln(rho)`, `nu = q / (a rho)` — logarithmic coordinates in which
//!   the wave-curve geometry becomes piecewise linear / translation
//!   invariant,
//! * `w = nu + mu`, `z = nu - mu` — Riemann invariants.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest density accepted at construction. The state space is open
/// (`rho > 0`): values at or below this floor are rejected, never clamped.
pub const RHO_MIN: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("density {rho} is below the vacuum floor {RHO_MIN}")]
    InvalidDensity { rho: f64 },
    #[error("sound speed {a} must be strictly positive and finite")]
    InvalidSoundSpeed { a: f64 },
    #[error("non-finite state component ({rho}, {q})")]
    NonFinite { rho: f64, q: f64 },
}

/// Gas parameters: the sound speed `a` of the isothermal pressure law
/// `p(rho) = a^2 rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    a: f64,
}

impl GasParams {
    pub fn new(a: f64) -> Result<Self, StateError> {
        if !(a.is_finite() && a > 0.0) {
            return Err(StateError::InvalidSoundSpeed { a });
        }
        Ok(Self { a })
    }

    /// Sound speed.
    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }
}

/// A gas state `(rho, q)` with `rho > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    rho: f64,
    q: f64,
}

/// Position of a state relative to the sonic lines `q = ±a rho`.
///
/// The comparison is exact on `nu = q/(a rho)`: `Subsonic` iff `|nu| < 1`,
/// `Sonic` iff `|nu| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SonicClass {
    Subsonic,
    Supersonic,
    Sonic,
}

impl State {
    pub fn new(rho: f64, q: f64) -> Result<Self, StateError> {
        if !(rho.is_finite() && q.is_finite()) {
            return Err(StateError::NonFinite { rho, q });
        }
        if rho < RHO_MIN {
            return Err(StateError::InvalidDensity { rho });
        }
        Ok(Self { rho, q })
    }

    /// Builds a state from the logarithmic coordinates `(mu, nu)`.
    pub fn from_mu_nu(mu: f64, nu: f64, g: GasParams) -> Result<Self, StateError> {
        let rho = mu.exp();
        Self::new(rho, g.a() * nu * rho)
    }

    #[inline]
    pub fn rho(&self) -> f64 {
        self.rho
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Velocity `v = q / rho`.
    #[inline]
    pub fn v(&self) -> f64 {
        self.q / self.rho
    }

    /// Pressure `p = a^2 rho`.
    #[inline]
    pub fn pressure(&self, g: GasParams) -> f64 {
        g.a() * g.a() * self.rho
    }

    #[inline]
    pub fn mu(&self) -> f64 {
        self.rho.ln()
    }

    #[inline]
    pub fn nu(&self, g: GasParams) -> f64 {
        self.q / (g.a() * self.rho)
    }

    /// Logarithmic coordinates `(mu, nu) = (ln rho, q/(a rho))`.
    #[inline]
    pub fn mu_nu(&self, g: GasParams) -> (f64, f64) {
        (self.mu(), self.nu(g))
    }

    /// Riemann invariant `w = nu + mu`.
    #[inline]
    pub fn w(&self, g: GasParams) -> f64 {
        self.nu(g) + self.mu()
    }

    /// Riemann invariant `z = nu - mu`.
    #[inline]
    pub fn z(&self, g: GasParams) -> f64 {
        self.nu(g) - self.mu()
    }

    /// Characteristic speeds `(v - a, v + a)`.
    #[inline]
    pub fn eigenvalues(&self, g: GasParams) -> (f64, f64) {
        let v = self.v();
        (v - g.a(), v + g.a())
    }

    /// Physical flux `(q, q^2/rho + a^2 rho)`.
    #[inline]
    pub fn flux(&self, g: GasParams) -> (f64, f64) {
        (self.q, self.q * self.q / self.rho + self.pressure(g))
    }

    pub fn sonic_class(&self, g: GasParams) -> SonicClass {
        let nu = self.nu(g).abs();
        if nu < 1.0 {
            SonicClass::Subsonic
        } else if nu > 1.0 {
            SonicClass::Supersonic
        } else {
            SonicClass::Sonic
        }
    }

    /// Mirror image `(rho, -q)`. Swaps the roles of the two characteristic
    /// families; used in tests and for reflective boundaries.
    #[inline]
    pub fn mirror(&self) -> Self {
        Self {
            rho: self.rho,
            q: -self.q,
        }
    }
}

/// Componentwise closeness with mixed absolute/relative scaling: the
/// density scale is `max(1, rho)` and the momentum scale `max(1, |q|, a rho)`.
pub fn states_close(u: State, v: State, tol: f64, g: GasParams) -> bool {
    let rho_scale = 1f64.max(u.rho()).max(v.rho());
    let q_scale = 1f64
        .max(u.q().abs())
        .max(v.q().abs())
        .max(g.a() * rho_scale);
    (u.rho() - v.rho()).abs() <= tol * rho_scale && (u.q() - v.q()).abs() <= tol * q_scale
}
