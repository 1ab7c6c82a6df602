//! Anisotropic Beltrami modes and their closed cross-product algebra.
//!
//! The two families
//!
//! ```text
//! e_m(z) = (sin mz, cos mz, 0),    h_m(z) = (cos mz, -sin mz, 0)
//! ```
//!
//! are pointwise curl eigenfunctions, `curl e_m = m e_m` and
//! `curl h_m = m h_m`, orthogonal to each other at every `z` ("dual" modes).
//! Together with the constant vertical vector ẑ they close under the cross
//! product:
//!
//! ```text
//! e_m × e_n = (0, 0,  sin (m-n)z)      h_m × e_n = (0, 0,  cos (m-n)z)
//! h_m × h_n = (0, 0,  sin (m-n)z)      e_m × h_n = (0, 0, -cos (m-n)z)
//! e_m × ẑ   = h_m                      h_m × ẑ   = -e_m
//! ```
//!
//! Note `h_m × e_m = +ẑ` (so `e_m × h_m = -ẑ`), as the `cos (m-n)z` identity
//! requires at `m = n`; the cross products here are the ordinary right-handed
//! ones and [`mode_cross`] is exactly antisymmetric.

use crate::error::{Error, Result};
use crate::geom::Vec3;
use serde::{Deserialize, Serialize};

/// Which of the two dual families a mode belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    /// `e_m(z) = (sin mz, cos mz, 0)`
    E,
    /// `h_m(z) = (cos mz, -sin mz, 0)`
    H,
}

/// An anisotropic curl eigenfunction with integer wavenumber `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeltramiMode {
    pub m: i64,
    pub parity: Parity,
}

impl BeltramiMode {
    pub fn e(m: i64) -> Self {
        BeltramiMode { m, parity: Parity::E }
    }

    pub fn h(m: i64) -> Self {
        BeltramiMode { m, parity: Parity::H }
    }

    /// Pointwise value of the mode. `|eval(z)| = 1` for every `z`.
    pub fn eval(&self, z: f64) -> Vec3 {
        let (s, c) = (self.m as f64 * z).sin_cos();
        match self.parity {
            Parity::E => Vec3::new(s, c, 0.0),
            Parity::H => Vec3::new(c, -s, 0.0),
        }
    }

    /// Curl of the mode obtained by differentiating the closed form.
    ///
    /// Equals `m * eval(z)` identically; kept separate so the eigenvalue
    /// relation can be checked without assuming it.
    pub fn curl_analytic(&self, z: f64) -> Vec3 {
        let m = self.m as f64;
        let (s, c) = (m * z).sin_cos();
        match self.parity {
            // d/dz (sin, cos, 0) = (m cos, -m sin, 0); curl = (-F_y', F_x', 0).
            Parity::E => Vec3::new(m * s, m * c, 0.0),
            Parity::H => Vec3::new(m * c, -m * s, 0.0),
        }
    }
}

/// Exact cross product of two modes, from the closure identities rather than
/// componentwise floating-point trigonometry of the inputs.
pub fn mode_cross(a: BeltramiMode, b: BeltramiMode, z: f64) -> Vec3 {
    let d = (a.m - b.m) as f64;
    let w = match (a.parity, b.parity) {
        (Parity::E, Parity::E) | (Parity::H, Parity::H) => (d * z).sin(),
        (Parity::H, Parity::E) => (d * z).cos(),
        (Parity::E, Parity::H) => -(d * z).cos(),
    };
    Vec3::new(0.0, 0.0, w)
}

/// `mode × ẑ`: maps `e_m ↦ h_m` and `h_m ↦ -e_m`, independent of `m`.
pub fn mode_cross_vertical(a: BeltramiMode, z: f64) -> Vec3 {
    match a.parity {
        Parity::E => BeltramiMode::h(a.m).eval(z),
        Parity::H => BeltramiMode::e(a.m).eval(z).scale(-1.0),
    }
}

/// `ẑ × mode`, the negative of [`mode_cross_vertical`].
pub fn vertical_cross_mode(a: BeltramiMode, z: f64) -> Vec3 {
    mode_cross_vertical(a, z).scale(-1.0)
}

/// Maximum residual `max_z |curl_h(mode) - m·mode|` of the eigenvalue relation
/// over a uniform z-grid, with the curl evaluated by centred finite
/// differences of step `h = 2π/grid_size`.
///
/// For the trigonometric modes the truncation error is bounded by
/// `|m|³ h²/6`, so the residual certifies the eigenmode to that accuracy.
pub fn curl_residual(mode: BeltramiMode, grid_size: usize) -> Result<f64> {
    if grid_size < 8 {
        return Err(Error::InvalidResolution(grid_size, 8));
    }
    let h = std::f64::consts::TAU / grid_size as f64;
    let m = mode.m as f64;
    let mut worst: f64 = 0.0;
    for i in 0..grid_size {
        let z = i as f64 * h;
        let plus = mode.eval(z + h);
        let minus = mode.eval(z - h);
        // Anisotropic fields depend on z only: curl F = (-F_y', F_x', 0).
        let curl = Vec3::new(
            -(plus.y - minus.y) / (2.0 * h),
            (plus.x - minus.x) / (2.0 * h),
            0.0,
        );
        let target = mode.eval(z).scale(m);
        worst = worst.max(curl.sub(target).norm());
    }
    Ok(worst)
}
