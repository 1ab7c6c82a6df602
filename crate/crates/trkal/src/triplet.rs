//! The Beltrami triplet `u = γ₀ e₁ + γ₁ h₁ + δ ẑ` and its closed-form viscous
//! evolution.
//!
//! Substituting the triplet ansatz into the force-free vorticity equation
//! couples the two amplitudes through the vertical velocity `δ(t)`:
//!
//! ```text
//! γ₀' = δ γ₁ - γ₀/R,         γ₁' = -δ γ₀ - γ₁/R,
//! ```
//!
//! so the energy decays freely, `γ₀² + γ₁² = C₀² e^{-2t/R}`, while the phase
//! `φ = atan2(γ₁, γ₀)` satisfies `φ' = -δ` for an *arbitrary* vertical
//! velocity. [`triplet_evolve`] exploits that closed form; the amplitude ODE
//! itself is only ever integrated in tests, as a cross-check.

use crate::error::{Error, Result};
use crate::geom::Vec3;
use serde::{Deserialize, Serialize};

/// Amplitudes of a Beltrami triplet at one time instant.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TripletState {
    /// Amplitude of `e₁`.
    pub gamma0: f64,
    /// Amplitude of `h₁`.
    pub gamma1: f64,
    /// Vertical velocity component.
    pub delta: f64,
    /// Base amplitude of the dominant mode (carried for the modulated setting).
    pub a: f64,
    /// Reynolds number.
    pub r: f64,
    /// Time.
    pub t: f64,
}

impl TripletState {
    pub fn new(gamma0: f64, gamma1: f64, delta: f64, a: f64, r: f64) -> Self {
        TripletState {
            gamma0,
            gamma1,
            delta,
            a,
            r,
            t: 0.0,
        }
    }

    /// Planar amplitude `(γ₀² + γ₁²)^{1/2}` at the state's own time.
    pub fn amplitude(&self) -> f64 {
        self.gamma0.hypot(self.gamma1)
    }

    /// Phase `φ = atan2(γ₁, γ₀)`.
    pub fn phase(&self) -> f64 {
        self.gamma1.atan2(self.gamma0)
    }

    /// Kinetic energy density `(γ₀² + γ₁² + δ²)/2` of the triplet field
    /// (the planar modes have unit mean-square magnitude).
    pub fn energy(&self) -> f64 {
        0.5 * (self.gamma0 * self.gamma0 + self.gamma1 * self.gamma1 + self.delta * self.delta)
    }
}

/// Closed-form evolution of a triplet under a caller-supplied vertical
/// velocity `δ(t)`.
///
/// The planar amplitude decays exactly as `e^{-(t-t₀)/R}` and the phase
/// advances by `-∫ δ dt`, evaluated by adaptive Simpson quadrature to `tol`.
pub fn triplet_evolve<F>(s0: &TripletState, delta_fn: F, t_end: f64, tol: f64) -> Result<TripletState>
where
    F: Fn(f64) -> f64,
{
    if t_end < s0.t {
        return Err(Error::InvalidInput(format!(
            "t_end {} precedes state time {}",
            t_end, s0.t
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be positive")));
    }
    let phase_shift = adaptive_simpson(&delta_fn, s0.t, t_end, tol)?;
    let rho = s0.amplitude() * (-(t_end - s0.t) / s0.r).exp();
    let phi = s0.phase() - phase_shift;
    let delta = delta_fn(t_end);
    if !delta.is_finite() {
        return Err(Error::NonFiniteDelta(t_end));
    }
    Ok(TripletState {
        gamma0: rho * phi.cos(),
        gamma1: rho * phi.sin(),
        delta,
        a: s0.a,
        r: s0.r,
        t: t_end,
    })
}

/// Velocity field of the triplet at height `z`:
/// `(ρ sin(z+φ), ρ cos(z+φ), δ)` with `ρ = (γ₀²+γ₁²)^{1/2}`.
///
/// The y-component carries `+cos`; expanding
/// `γ₀ e₁ + γ₁ h₁ = ρ (sin(z+φ), cos(z+φ), 0)` fixes that sign.
pub fn triplet_velocity(s: &TripletState, z: f64) -> Vec3 {
    let rho = s.amplitude();
    let (sn, cs) = (z + s.phase()).sin_cos();
    Vec3::new(rho * sn, rho * cs, s.delta)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = check_finite(f(a), a)?;
    let fb = check_finite(f(b), b)?;
    let m = 0.5 * (a + b);
    let fm = check_finite(f(m), m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

fn check_finite(v: f64, t: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteDelta(t))
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = check_finite(f(lm), lm)?;
    let frm = check_finite(f(rm), rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        // Richardson correction: Simpson pairs are fourth-order accurate.
        return Ok(left + right + delta / 15.0);
    }
    let half_tol = 0.5 * tol;
    Ok(
        simpson_recurse(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?
            + simpson_recurse(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?,
    )
}
