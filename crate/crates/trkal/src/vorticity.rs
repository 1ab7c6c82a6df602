//! The composed asymptotic velocity field, velocity/vorticity collinearity,
//! and the 1/r vorticity singularities over stationary points.
//!
//! The planar quasi-stationary field `u_g = C0 ∇C0/|∇C0|` has a vertical curl
//! component
//!
//! ```text
//! (rot u_g)_z = -C0 [H∇C0 × ∇C0]_z / |∇C0|³,
//! ```
//!
//! exact away from critical points (H is the Hessian of `C0`; the gradient
//! field itself is curl-free, so only the `∇(C0/|∇C0|)` factor contributes).
//! Near a nondegenerate stationary point `∇C0 ≈ BΣ̃` and the expression decays
//! like `1/ρ` with a fixed azimuthal profile in the eigenbasis of `B` — a
//! vertical string of singular vorticity. The plane component of the
//! vorticity is driven by `δ̄₁` and inherits both the `1/ρ` geometry and the
//! exponential growth of the phase.

use crate::energy::EnergyDensity;
use crate::error::{Error, Result};
use crate::fft::{wavenumber, FftPlan};
use crate::geom::Vec3;
use crate::morse::CriticalPoint;
use crate::phase::{CorrectionField, PhaseRun, PhaseState, ScalingFrame};
use crate::tracer::torus_dist;
use ndarray::{Array2, Array3};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::f64::consts::TAU;
use std::io::Write;

/// Default gradient floor below which the quasi-stationary direction (and
/// with it the composed field) is undefined.
pub const GRAD_FLOOR: f64 = 1e-8;

/// The composed quasi-stationary velocity field
/// `u = C0 ∇C0/|∇C0| + ε δ̄₁ ẑ + ε w̄₁`.
#[derive(Debug, Clone)]
pub struct AsymptoticVelocity {
    pub energy: EnergyDensity,
    pub phase: PhaseState,
    /// First-order planar correction amplitude; absent means `C̃ ≡ 0`.
    pub correction: Option<CorrectionField>,
    pub frame: ScalingFrame,
}

impl AsymptoticVelocity {
    /// Offset phase `φ̃₀` of the correction (zero when no correction is set).
    fn phi_offset_at(&self, xi: f64, eta: f64) -> f64 {
        self.correction
            .as_ref()
            .map(|c| c.phi_offset.eval(xi, eta))
            .unwrap_or(0.0)
    }

    fn c_tilde_at(&self, xi: f64, eta: f64) -> f64 {
        self.correction
            .as_ref()
            .map(|c| c.c_tilde_at(xi, eta))
            .unwrap_or(0.0)
    }

    /// The along-trajectory vertical velocity
    /// `δ̄₁ = -C0 (∇C0·∇φ)/|∇C0| - ∂φ/∂τ`.
    ///
    /// On fields with `|∇C0|` below the floor the advective part is dropped
    /// (no quasi-stationary drift on a flat energy landscape).
    pub fn delta1(&self, xi: f64, eta: f64) -> f64 {
        let (gx, ge) = self.energy.grad(xi, eta);
        let gn = gx.hypot(ge);
        let advect = if gn > GRAD_FLOOR {
            let (px, pe) = self.phase.phi.grad(xi, eta);
            self.energy.eval(xi, eta) * (gx * px + ge * pe) / gn
        } else {
            0.0
        };
        -advect - self.phase.dphi.eval(xi, eta)
    }

    /// Evaluate the composed field. The quasi-stationary reduction makes the
    /// closed form independent of `z`; `tau` must match the stored phase
    /// snapshot (it selects no interpolation here).
    pub fn eval(&self, xi: f64, eta: f64, _z: f64, tau: f64) -> Result<Vec3> {
        debug_assert!(
            (tau - self.phase.tau).abs() <= 1e-9 * tau.abs().max(1.0),
            "phase snapshot is at τ = {}, requested {tau}",
            self.phase.tau
        );
        let (gx, ge) = self.energy.grad(xi, eta);
        let gn = gx.hypot(ge);
        if gn <= GRAD_FLOOR {
            return Err(Error::NearCriticalPoint {
                xi,
                eta,
                grad: gn,
                floor: GRAD_FLOOR,
            });
        }
        let c0 = self.energy.eval(xi, eta);
        let eps = self.frame.eps();
        // w̄₁ = (|C̃|/|∇C0|)(cos φ̃₀ ∇C0 + sin φ̃₀ ngrad C0); ngrad = (∂η, -∂ξ).
        let (s_off, c_off) = self.phi_offset_at(xi, eta).sin_cos();
        let w1_scale = self.c_tilde_at(xi, eta).abs() / gn;
        let w1 = (
            w1_scale * (c_off * gx + s_off * ge),
            w1_scale * (c_off * ge - s_off * gx),
        );
        Ok(Vec3::new(
            c0 * gx / gn + eps * w1.0,
            c0 * ge / gn + eps * w1.1,
            eps * self.delta1(xi, eta),
        ))
    }
}

/// Exact vertical curl of the planar gradient-line part,
/// `-C0 [H∇C0 × ∇C0]_z / |∇C0|³`.
pub fn gradient_part_curl_z(e: &EnergyDensity, xi: f64, eta: f64) -> f64 {
    let (gx, ge) = e.grad(xi, eta);
    let gn = gx.hypot(ge);
    let h = e.hessian(xi, eta);
    let (hgx, hge) = h.apply((gx, ge));
    -e.eval(xi, eta) * (hgx * ge - hge * gx) / (gn * gn * gn)
}

/// Pointwise defect `|u - rot u|` of the composed field on a slow × fast grid.
#[derive(Debug, Clone)]
pub struct CollinearityReport {
    pub n_xy: usize,
    pub n_z: usize,
    pub eps: f64,
    /// `|u - rot u|` per grid node `(ξ, η, z)`.
    pub defect: Array3<f64>,
    /// `|δ̄₁|` per plane node — the predicted leading defect divided by ε.
    pub delta1_abs: Array2<f64>,
}

impl CollinearityReport {
    /// Worst relative deviation of the defect from `ε|δ̄₁|`, restricted to
    /// plane nodes where `|δ̄₁|` exceeds `frac` of its maximum.
    pub fn worst_relative_deviation(&self, frac: f64) -> f64 {
        let dmax = self.delta1_abs.iter().fold(0.0f64, |a, b| a.max(*b));
        let mut worst: f64 = 0.0;
        for ((i, j, k), v) in self.defect.indexed_iter() {
            let _ = k;
            let d = self.delta1_abs[(i, j)];
            if d >= frac * dmax && d > 0.0 {
                worst = worst.max((v / (self.eps * d) - 1.0).abs());
            }
        }
        worst
    }

    pub fn max_defect(&self) -> f64 {
        self.defect.iter().fold(0.0f64, |a, b| a.max(*b))
    }
}

/// Evaluate `u - rot u` for the composed field `u = u₀ + ε u₁` with
/// `rot = rot_z + ε rot_ξη`, all derivatives spectral on the grid.
///
/// The grid must resolve the fast period: `n_z ≥ 16`.
pub fn collinearity_defect(
    e: &EnergyDensity,
    phase: &PhaseState,
    frame: &ScalingFrame,
    n_xy: usize,
    n_z: usize,
) -> Result<CollinearityReport> {
    if n_z < 16 {
        return Err(Error::InvalidResolution(n_z, 16));
    }
    let eps = frame.eps();

    // Compose u = u₀ + ε (rot_ξη u₀ + δ₁ ẑ) on the grid.
    let mut ux = Array3::zeros((n_xy, n_xy, n_z));
    let mut uy = Array3::zeros((n_xy, n_xy, n_z));
    let mut uz = Array3::zeros((n_xy, n_xy, n_z));
    let mut delta1_abs = Array2::zeros((n_xy, n_xy));
    for i in 0..n_xy {
        for j in 0..n_xy {
            let xi = TAU * i as f64 / n_xy as f64;
            let eta = TAU * j as f64 / n_xy as f64;
            let c0 = e.eval(xi, eta);
            let (gx, ge) = e.grad(xi, eta);
            let phi = phase.phi.eval(xi, eta);
            let (px, pe) = phase.phi.grad(xi, eta);
            let d1 = -phase.dphi.eval(xi, eta);
            delta1_abs[(i, j)] = d1.abs();
            for k in 0..n_z {
                let z = TAU * k as f64 / n_z as f64;
                let (sw, cw) = (z + phi).sin_cos();
                // rot_ξη u₀ is purely vertical for a planar u₀.
                let g = (gx - c0 * pe) * cw - (ge + c0 * px) * sw;
                ux[(i, j, k)] = c0 * sw;
                uy[(i, j, k)] = c0 * cw;
                uz[(i, j, k)] = eps * (g + d1);
            }
        }
    }

    // rot u = rot_z u + ε rot_ξη u, spectrally.
    let plan_xy = FftPlan::new(n_xy);
    let plan_z = FftPlan::new(n_z);
    let deriv = |field: &Array3<f64>, axis: usize| -> Array3<f64> {
        let mut hat = field.mapv(|v| Complex64::new(v, 0.0));
        let plan = if axis == 2 { &plan_z } else { &plan_xy };
        plan.axis3(&mut hat, axis, true);
        let n_axis = if axis == 2 { n_z } else { n_xy };
        let scale = 1.0 / n_axis as f64;
        for ((i, j, k), v) in hat.indexed_iter_mut() {
            let idx = [i, j, k][axis];
            let kw = wavenumber(idx, n_axis);
            if n_axis % 2 == 0 && idx == n_axis / 2 {
                *v = Complex64::default();
            } else {
                *v *= Complex64::new(0.0, kw as f64 * scale);
            }
        }
        plan.axis3(&mut hat, axis, false);
        hat.mapv(|v| v.re)
    };

    let dux_dz = deriv(&ux, 2);
    let duy_dz = deriv(&uy, 2);
    let duz_dxi = deriv(&uz, 0);
    let duz_deta = deriv(&uz, 1);
    let duy_dxi = deriv(&uy, 0);
    let dux_deta = deriv(&ux, 1);

    let mut defect = Array3::zeros((n_xy, n_xy, n_z));
    for ((i, j, k), d) in defect.indexed_iter_mut() {
        let rot = Vec3::new(
            -duy_dz[(i, j, k)] + eps * duz_deta[(i, j, k)],
            dux_dz[(i, j, k)] - eps * duz_dxi[(i, j, k)],
            eps * (duy_dxi[(i, j, k)] - dux_deta[(i, j, k)]),
        );
        let u = Vec3::new(ux[(i, j, k)], uy[(i, j, k)], uz[(i, j, k)]);
        *d = u.sub(rot).norm();
    }

    Ok(CollinearityReport {
        n_xy,
        n_z,
        eps,
        defect,
        delta1_abs,
    })
}

/// Ring-sampled 1/r fit of the vertical vorticity around a stationary point.
#[derive(Debug, Clone)]
pub struct SingularityFit {
    pub point: CriticalPoint,
    /// Ring radii, decreasing towards the point.
    pub radii: Vec<f64>,
    /// Angle-averaged `|ω_z|` per ring (midpoint rule over azimuth).
    pub amplitudes: Vec<f64>,
    /// Log–log slope of amplitude against radius (−1 for a 1/r law).
    pub slope: f64,
    /// Extrapolated amplitude at unit radius.
    pub prefactor: f64,
    /// `|ω_z|·r` over azimuth `ψ` in the Hessian eigenbasis, at the
    /// geometric-mean radius.
    pub angle_profile: Vec<(f64, f64)>,
    /// True when `λ₁ = λ₂` (the leading 1/r term vanishes identically).
    pub umbilic: bool,
    /// All raw ring samples `(r, φ, |ω_z|)` in lab-frame azimuth.
    pub ring_samples: Vec<(f64, f64, f64)>,
}

impl SingularityFit {
    pub fn to_json(&self) -> Value {
        json!({
            "point": {"xi": self.point.xi, "eta": self.point.eta, "kind": self.point.kind.as_str()},
            "slope": self.slope,
            "prefactor": self.prefactor,
            "umbilic": self.umbilic,
            "radii": self.radii,
            "amplitudes": self.amplitudes,
        })
    }

    /// CSV with rows `r,phi,omega`.
    pub fn write_ring_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,phi,omega")?;
        for (r, phi, omega) in &self.ring_samples {
            writeln!(w, "{r},{phi},{omega}")?;
        }
        Ok(())
    }
}

/// Fit the vertical vorticity of the gradient-line field on rings around a
/// nondegenerate critical point, with the curl taken from the exact closed
/// form (finite differences across the singularity are never used).
pub fn vertical_singularity_fit(
    e: &EnergyDensity,
    point: &CriticalPoint,
    r_min: f64,
    r_max: f64,
    n_r: usize,
    n_phi: usize,
) -> Result<SingularityFit> {
    if !(r_min > 0.0 && r_max > r_min && n_r >= 2 && n_phi >= 8) {
        return Err(Error::InvalidInput(
            "need 0 < r_min < r_max, n_r ≥ 2, n_phi ≥ 8".into(),
        ));
    }
    check_annulus_clear(e, point.position(), r_max)?;

    let (l1, l2) = point.eigvals;
    let umbilic = (l1 - l2).abs() <= 1e-9 * l1.abs().max(l2.abs());

    let centre = point.position();
    let mut radii = Vec::with_capacity(n_r);
    let mut amplitudes = Vec::with_capacity(n_r);
    let mut ring_samples = Vec::with_capacity(n_r * n_phi);
    let log_step = (r_max / r_min).ln() / (n_r - 1) as f64;
    for ir in 0..n_r {
        // Decreasing towards the point.
        let r = r_max * (-(ir as f64) * log_step).exp();
        let mut acc = 0.0;
        for jphi in 0..n_phi {
            let phi = TAU * (jphi as f64 + 0.5) / n_phi as f64;
            let xi = centre.0 + r * phi.cos();
            let eta = centre.1 + r * phi.sin();
            let omega = gradient_part_curl_z(e, xi, eta).abs();
            acc += omega;
            ring_samples.push((r, phi, omega));
        }
        radii.push(r);
        amplitudes.push(acc / n_phi as f64);
    }

    // Log-log least squares for slope and unit-radius prefactor.
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = amplitudes.iter().map(|a| a.max(1e-300).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    let slope = num / den;
    let prefactor = (my - slope * mx).exp();

    // Azimuthal profile in the Hessian eigenbasis at the mid radius.
    let r_mid = (r_min * r_max).sqrt();
    let (v1, v2) = point.eigvecs;
    let mut angle_profile = Vec::with_capacity(n_phi);
    for jphi in 0..n_phi {
        let psi = TAU * (jphi as f64 + 0.5) / n_phi as f64;
        let (c, s) = psi.sin_cos();
        // (c, s) = (sin ψ, cos ψ) order fixed below: use cos ψ along v₁.
        let dir = (s * v1.0 + c * v2.0, s * v1.1 + c * v2.1);
        let xi = centre.0 + r_mid * dir.0;
        let eta = centre.1 + r_mid * dir.1;
        angle_profile.push((psi, gradient_part_curl_z(e, xi, eta).abs() * r_mid));
    }

    Ok(SingularityFit {
        point: point.clone(),
        radii,
        amplitudes,
        slope,
        prefactor,
        angle_profile,
        umbilic,
        ring_samples,
    })
}

/// Error when another critical point intrudes on the sampling annulus.
fn check_annulus_clear(e: &EnergyDensity, centre: (f64, f64), r_max: f64) -> Result<()> {
    let probes = 8;
    for i in 0..probes {
        for j in 0..probes {
            let p = (
                centre.0 + 1.3 * r_max * (2.0 * (i as f64 + 0.5) / probes as f64 - 1.0),
                centre.1 + 1.3 * r_max * (2.0 * (j as f64 + 0.5) / probes as f64 - 1.0),
            );
            let mut x = p;
            for _ in 0..30 {
                let g = e.grad(x.0, x.1);
                if g.0.hypot(g.1) < 1e-12 {
                    break;
                }
                let Some(step) = e.hessian(x.0, x.1).solve(g) else {
                    break;
                };
                x = (x.0 - step.0, x.1 - step.1);
            }
            let g = e.grad(x.0, x.1);
            if g.0.hypot(g.1) < 1e-10 {
                let d_centre = torus_dist(x, centre);
                if d_centre > 1e-6 && d_centre < 1.1 * r_max && torus_dist(p, centre) < 1.3 * r_max
                {
                    return Err(Error::AnnulusContaminated {
                        xi: centre.0,
                        eta: centre.1,
                        r_min: 0.0,
                        r_max,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Growth of the plane vorticity component `|rot_ξη δ̄₁|/R` at a probe radius.
#[derive(Debug, Clone)]
pub struct PlaneGrowthReport {
    pub times: Vec<f64>,
    /// Ring maximum of `|∇δ̄₁|/R` at `r_probe`, per time.
    pub values: Vec<f64>,
    pub fitted_rate: f64,
    pub r_probe: f64,
    /// `value(r_probe/2) / value(r_probe)` at the final time.
    pub half_radius_ratio: f64,
}

/// Evaluate the plane vorticity magnitude of the upward-velocity field on a
/// ring over time and fit its exponential growth rate.
pub fn plane_component_growth(
    e: &EnergyDensity,
    history: &PhaseRun,
    point: (f64, f64),
    times: &[f64],
    r_probe: f64,
    frame: &ScalingFrame,
) -> Result<PlaneGrowthReport> {
    if times.len() < 3 {
        return Err(Error::InvalidInput("need at least three sample times".into()));
    }
    let r = frame.reynolds();
    let n_phi = 64;
    let ring_max = |state: &PhaseState, radius: f64| -> f64 {
        let phi_xx = state.phi.dxi().dxi();
        let phi_xe = state.phi.dxi().deta();
        let phi_ee = state.phi.deta().deta();
        let mut m: f64 = 0.0;
        for j in 0..n_phi {
            let ang = TAU * (j as f64 + 0.5) / n_phi as f64;
            let xi = point.0 + radius * ang.cos();
            let eta = point.1 + radius * ang.sin();
            let g = e.grad(xi, eta);
            let gn = g.0.hypot(g.1);
            let (dtx, dte) = state.dphi.grad(xi, eta);
            let (mut sx, mut se) = (0.0, 0.0);
            if gn > GRAD_FLOOR {
                let c0 = e.eval(xi, eta);
                let h = e.hessian(xi, eta);
                let p = state.phi.grad(xi, eta);
                let gp = g.0 * p.0 + g.1 * p.1;
                let hp = h.apply(p);
                let big_phi = (
                    phi_xx.eval(xi, eta) * g.0 + phi_xe.eval(xi, eta) * g.1,
                    phi_xe.eval(xi, eta) * g.0 + phi_ee.eval(xi, eta) * g.1,
                );
                let hg = h.apply(g);
                // ∇[C0 (G·P)/|G|] by the product rule.
                sx = g.0 * gp / gn + c0 * (hp.0 + big_phi.0) / gn
                    - c0 * gp * hg.0 / (gn * gn * gn);
                se = g.1 * gp / gn + c0 * (hp.1 + big_phi.1) / gn
                    - c0 * gp * hg.1 / (gn * gn * gn);
            }
            let grad_d1 = (-sx - dtx, -se - dte);
            m = m.max(grad_d1.0.hypot(grad_d1.1) / r);
        }
        m
    };

    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        values.push(ring_max(history.state_at(t), r_probe));
    }
    let xs: Vec<f64> = times.to_vec();
    let ys: Vec<f64> = values.iter().map(|v| v.max(1e-300).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    let fitted_rate = num / den;

    let last = history.state_at(*times.last().unwrap());
    let v_half = ring_max(last, 0.5 * r_probe);
    let v_full = ring_max(last, r_probe);
    Ok(PlaneGrowthReport {
        times: xs,
        values,
        fitted_rate,
        r_probe,
        half_radius_ratio: v_half / v_full,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morse::find_critical_points;
    use crate::poly::TrigPoly2D;
    use crate::phase::{first_correction, phase_cauchy_solve, CorrectionOptions};
    use std::f64::consts::PI;

    fn sin_field(eps: f64) -> EnergyDensity {
        EnergyDensity::new(1.0, 1.0, TrigPoly2D::sin_product(eps), TrigPoly2D::zero()).unwrap()
    }

    fn zero_phase_state() -> PhaseState {
        let e = EnergyDensity::constant(1.0);
        phase_cauchy_solve(&e, &TrigPoly2D::zero(), &TrigPoly2D::zero(), 0.0, 4, 0.01)
            .unwrap()
            .last()
            .clone()
    }

    #[test]
    fn composed_field_reduces_to_gradient_lines() {
        // φ̃₀ = 0, C̃ = 0, δ̄₁ = 0: the pure gradient-line field.
        let e = sin_field(0.3);
        let v = AsymptoticVelocity {
            energy: e.clone(),
            phase: zero_phase_state(),
            correction: None,
            frame: ScalingFrame::new(1e4).unwrap(),
        };
        for (xi, eta) in [(1.0, 0.7), (2.5, 4.4)] {
            let u = v.eval(xi, eta, 0.0, 0.0).unwrap();
            let c0 = e.eval(xi, eta);
            let (gx, ge) = e.grad(xi, eta);
            let gn = gx.hypot(ge);
            assert!((u.x - c0 * gx / gn).abs() < 1e-14);
            assert!((u.y - c0 * ge / gn).abs() < 1e-14);
            assert_eq!(u.z, 0.0);
            // Planar speed is exactly C0.
            assert!((u.x.hypot(u.y) - c0).abs() < 1e-13);
        }
        // ngrad orthogonality at 100 points.
        for k in 0..100 {
            let xi = TAU * ((k as f64 * 0.618_033_988_749_895) % 1.0);
            let eta = TAU * ((k as f64 * 0.754_877_666_246_693) % 1.0);
            let (gx, ge) = e.grad(xi, eta);
            let ngrad = (ge, -gx);
            assert!((ngrad.0 * gx + ngrad.1 * ge).abs() < 1e-18);
        }
        // Near-critical evaluation errors out.
        assert!(matches!(
            v.eval(PI / 2.0, PI / 2.0, 0.0, 0.0),
            Err(Error::NearCriticalPoint { .. })
        ));
    }

    #[test]
    fn composed_field_with_correction_has_w1_contribution() {
        let e = sin_field(0.3);
        let run = phase_cauchy_solve(
            &e,
            &TrigPoly2D::harmonic(1, 0, 1e-2, 0.0),
            &TrigPoly2D::zero(),
            0.5,
            4,
            0.01,
        )
        .unwrap();
        let corr = first_correction(
            &e,
            &run,
            &TrigPoly2D::constant(0.2),
            0.5,
            &CorrectionOptions::default(),
        )
        .unwrap();
        let frame = ScalingFrame::new(1e4).unwrap();
        let v = AsymptoticVelocity {
            energy: e.clone(),
            phase: run.last().clone(),
            correction: Some(corr),
            frame,
        };
        let (xi, eta) = (1.0, 0.7);
        let u = v.eval(xi, eta, 0.0, 0.5).unwrap();
        // The w̄₁ part shifts the planar velocity away from C0 Ĝ by O(ε·C̃).
        let c0 = e.eval(xi, eta);
        let dev = (u.x.hypot(u.y) - c0).abs();
        assert!(dev > 0.0 && dev < 1e-2, "w̄₁ contribution present: {dev}");
        assert!(u.z.abs() > 0.0, "phase growth drives upward velocity");
    }

    #[test]
    fn analytic_curl_matches_local_finite_differences() {
        let e = EnergyDensity::new(
            1.1,
            1.0,
            TrigPoly2D::sin_product(0.25),
            TrigPoly2D::harmonic(1, 1, 0.05, -0.03),
        )
        .unwrap();
        let h = 1e-5;
        let u_g = |xi: f64, eta: f64| -> (f64, f64) {
            let c0 = e.eval(xi, eta);
            let (gx, ge) = e.grad(xi, eta);
            let gn = gx.hypot(ge);
            (c0 * gx / gn, c0 * ge / gn)
        };
        for k in 0..50 {
            let xi = TAU * ((k as f64 * 0.618_033_988_749_895) % 1.0);
            let eta = TAU * ((k as f64 * 0.754_877_666_246_693) % 1.0);
            if e.grad_norm(xi, eta) < 0.05 {
                continue;
            }
            let duy_dx = (u_g(xi + h, eta).1 - u_g(xi - h, eta).1) / (2.0 * h);
            let dux_de = (u_g(xi, eta + h).0 - u_g(xi, eta - h).0) / (2.0 * h);
            let numeric = duy_dx - dux_de;
            let analytic = gradient_part_curl_z(&e, xi, eta);
            assert!(
                (numeric - analytic).abs() < 1e-6 * (1.0 + analytic.abs()),
                "at ({xi},{eta}): {numeric} vs {analytic}"
            );
        }
    }

    #[test]
    fn analytic_curl_property_on_random_fields() {
        // The closed-form curl of the gradient-line field matches local
        // finite differences on randomly drawn energy densities, away from
        // critical points.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let h = 1e-5;
        for _ in 0..6 {
            let g0 = TrigPoly2D::harmonic(
                rng.gen_range(1..=2),
                rng.gen_range(-2..=2),
                rng.gen_range(-0.15..0.15),
                rng.gen_range(-0.15..0.15),
            )
            .add(&TrigPoly2D::sin_product(rng.gen_range(0.05..0.2)));
            let g1 = TrigPoly2D::harmonic(
                rng.gen_range(0..=2),
                rng.gen_range(1..=2),
                rng.gen_range(-0.1..0.1),
                rng.gen_range(-0.1..0.1),
            );
            let e = EnergyDensity::new(rng.gen_range(0.9..1.5), 1.0, g0, g1).unwrap();
            let u_g = |xi: f64, eta: f64| -> (f64, f64) {
                let c0 = e.eval(xi, eta);
                let (gx, ge) = e.grad(xi, eta);
                let gn = gx.hypot(ge);
                (c0 * gx / gn, c0 * ge / gn)
            };
            for _ in 0..20 {
                let xi: f64 = rng.gen_range(0.0..TAU);
                let eta: f64 = rng.gen_range(0.0..TAU);
                if e.grad_norm(xi, eta) < 0.05 {
                    continue;
                }
                let duy_dx = (u_g(xi + h, eta).1 - u_g(xi - h, eta).1) / (2.0 * h);
                let dux_de = (u_g(xi, eta + h).0 - u_g(xi, eta - h).0) / (2.0 * h);
                let analytic = gradient_part_curl_z(&e, xi, eta);
                assert!(
                    (duy_dx - dux_de - analytic).abs() < 1e-5 * (1.0 + analytic.abs()),
                    "curl mismatch at ({xi}, {eta})"
                );
            }
        }
    }

    #[test]
    fn saddle_singularity_slope_is_minus_one() {
        let e = sin_field(0.25);
        let set = find_critical_points(&e, 16, 1e-12).unwrap();
        let (_, saddle) = set
            .saddles()
            .find(|(_, p)| torus_dist(p.position(), (PI, PI)) < 1e-9)
            .unwrap();
        let fit = vertical_singularity_fit(&e, saddle, 1e-3, 1e-1, 16, 64).unwrap();
        assert!(!fit.umbilic);
        assert!(
            (fit.slope + 1.0).abs() < 0.05,
            "log-log slope {} should be -1 ± 0.05",
            fit.slope
        );
        assert!(fit.radii.windows(2).all(|w| w[1] < w[0]));
        // Every nondegenerate *anisotropic* point of the corpus obeys the
        // law; the sin-product extrema are umbilic (λ₁ = λ₂) and drop out.
        for p in &set.points {
            let fit = vertical_singularity_fit(&e, p, 1e-3, 1e-1, 16, 64).unwrap();
            if fit.umbilic {
                continue;
            }
            assert!((fit.slope + 1.0).abs() < 0.05, "{:?}: {}", p.kind, fit.slope);
        }
    }

    #[test]
    fn prefactor_scales_linearly_with_c0() {
        let run_fit = |a: f64| -> f64 {
            let e = EnergyDensity::new(a, 1.0, TrigPoly2D::sin_product(0.02), TrigPoly2D::zero())
                .unwrap();
            let set = find_critical_points(&e, 16, 1e-12).unwrap();
            let (_, saddle) = set
                .saddles()
                .find(|(_, p)| torus_dist(p.position(), (PI, PI)) < 1e-6)
                .unwrap();
            vertical_singularity_fit(&e, saddle, 1e-3, 5e-2, 12, 64)
                .unwrap()
                .prefactor
        };
        let (p1, p2) = (run_fit(1.0), run_fit(2.0));
        assert!(
            (p2 / p1 - 2.0).abs() < 0.05 * 2.0,
            "doubling A should double the prefactor: {p1} -> {p2}"
        );
    }

    #[test]
    fn umbilic_point_has_no_singular_ring() {
        // cos ξ + cos η has an isotropic Hessian at the origin.
        let g0 = TrigPoly2D::harmonic(1, 0, 0.2, 0.0).add(&TrigPoly2D::harmonic(0, 1, 0.2, 0.0));
        let e = EnergyDensity::new(1.0, 1.0, g0, TrigPoly2D::zero()).unwrap();
        let set = find_critical_points(&e, 16, 1e-12).unwrap();
        let p = set
            .points
            .iter()
            .find(|p| torus_dist(p.position(), (0.0, 0.0)) < 1e-9)
            .unwrap();
        let fit = vertical_singularity_fit(&e, p, 1e-3, 3e-2, 12, 64).unwrap();
        assert!(fit.umbilic);
        // Amplitudes vanish towards the point instead of diverging.
        assert!(fit.slope > -0.5, "no 1/r law at an umbilic: slope {}", fit.slope);
        assert!(
            fit.amplitudes.last().unwrap() < fit.amplitudes.first().unwrap(),
            "ring amplitude shrinks towards an umbilic point"
        );
    }

    #[test]
    fn annulus_contamination_is_detected() {
        let e = sin_field(0.25);
        let set = find_critical_points(&e, 16, 1e-12).unwrap();
        let (_, saddle) = set
            .saddles()
            .find(|(_, p)| torus_dist(p.position(), (PI, PI)) < 1e-9)
            .unwrap();
        // The nearest extrema sit at distance π/√2 ≈ 2.22; an annulus out to
        // 2.5 swallows them.
        assert!(matches!(
            vertical_singularity_fit(&e, saddle, 1e-2, 2.5, 8, 16),
            Err(Error::AnnulusContaminated { .. })
        ));
        // A tight annulus around the same saddle is clean.
        assert!(vertical_singularity_fit(&e, saddle, 1e-2, 1.0, 8, 16).is_ok());
    }

    #[test]
    fn angle_average_is_frame_invariant() {
        // The angle-averaged ring amplitude computed in the lab frame equals
        // the average of the eigenbasis profile divided by the radius.
        let e = sin_field(0.25);
        let set = find_critical_points(&e, 16, 1e-12).unwrap();
        let (_, saddle) = set
            .saddles()
            .find(|(_, p)| torus_dist(p.position(), (PI, PI)) < 1e-9)
            .unwrap();
        let fit = vertical_singularity_fit(&e, saddle, 1e-2, 4e-2, 3, 256).unwrap();
        let r_mid = (1e-2f64 * 4e-2).sqrt();
        // Lab-frame ring at the same radius.
        let mut acc = 0.0;
        for j in 0..256 {
            let ang = TAU * (j as f64 + 0.5) / 256.0;
            acc += gradient_part_curl_z(&e, PI + r_mid * ang.cos(), PI + r_mid * ang.sin()).abs();
        }
        let lab = acc / 256.0;
        let eig = fit.angle_profile.iter().map(|(_, v)| v).sum::<f64>() / 256.0 / r_mid;
        assert!((lab - eig).abs() < 1e-3 * lab, "lab {lab} vs eigenbasis {eig}");
    }

    #[test]
    fn collinearity_defect_tracks_eps_delta1() {
        let e = sin_field(0.2);
        // A phase with real growth so δ₁ = -∂φ/∂τ is O(1) after a window.
        let run = phase_cauchy_solve(
            &e,
            &TrigPoly2D::harmonic(1, 1, 0.05, 0.0),
            &TrigPoly2D::zero(),
            2.0,
            4,
            0.01,
        )
        .unwrap();
        let state = run.last();
        let frame = ScalingFrame::new(1e4).unwrap();
        let report = collinearity_defect(&e, state, &frame, 32, 16).unwrap();
        assert!(
            report.worst_relative_deviation(0.3) < 0.10,
            "defect should equal ε|δ̄₁| within 10%: {}",
            report.worst_relative_deviation(0.3)
        );

        // Quadrupling R halves the defect (∝ ε).
        let frame4 = ScalingFrame::new(4e4).unwrap();
        let report4 = collinearity_defect(&e, state, &frame4, 32, 16).unwrap();
        let ratio = report.max_defect() / report4.max_defect();
        assert!(
            (ratio - 2.0).abs() < 0.2,
            "defect(R)/defect(4R) should be ≈ 2, got {ratio}"
        );

        // ε → 0 (pure Beltrami): defect vanishes.
        let frame_inf = ScalingFrame::new(1e12).unwrap();
        let tiny = collinearity_defect(&e, state, &frame_inf, 32, 16).unwrap();
        assert!(tiny.max_defect() < 1e-5);
        // Undersized fast grid is rejected.
        assert!(collinearity_defect(&e, state, &frame, 32, 8).is_err());
    }

    #[test]
    fn plane_growth_constant_coefficients() {
        // Constant C0: δ̄₁ = -∂φ/∂τ and the ring value grows at the cosh rate.
        let c0 = 1.0;
        let e = EnergyDensity::constant(c0);
        let (m, n) = (2, 1);
        let rate = c0 * (((m * m + n * n) as f64) / 2.0).sqrt();
        let run = phase_cauchy_solve(
            &e,
            &TrigPoly2D::harmonic(m, n, 1e-4, 0.0),
            &TrigPoly2D::zero(),
            4.0 / rate,
            4,
            0.01 / rate,
        )
        .unwrap();
        let frame = ScalingFrame::new(1e4).unwrap();
        let times: Vec<f64> = (0..8).map(|k| (2.5 + 0.2 * k as f64) / rate).collect();
        let report =
            plane_component_growth(&e, &run, (0.3, 0.4), &times, 0.05, &frame).unwrap();
        assert!(
            (report.fitted_rate - rate).abs() < 0.02 * rate,
            "fitted {} vs {rate}",
            report.fitted_rate
        );
    }

    #[test]
    fn plane_growth_near_saddle_diverges_like_one_over_r() {
        // Weak sin-product modulation keeps C0(saddle) = A exactly while the
        // critical point supplies the 1/ρ geometry.
        let e = sin_field(0.01);
        let (m, n) = (2, 2);
        let rate = 1.0 * (((m * m + n * n) as f64) / 2.0f64).sqrt();
        // Cutoff 2 keeps (2,2) the fastest retained mode; the couplings the
        // modulation generates above it are exactly what the truncation
        // discards, so the frozen-coefficient rate stays clean. The sine
        // phase keeps ∇φ nonzero at the saddle (the cosine's gradient
        // vanishes there by periodicity).
        let run = phase_cauchy_solve(
            &e,
            &TrigPoly2D::harmonic(m, n, 0.0, 1e-4),
            &TrigPoly2D::zero(),
            6.0 / rate,
            2,
            0.005 / rate,
        )
        .unwrap();
        let frame = ScalingFrame::new(1e4).unwrap();
        // Fit late in the window where the cosh/sinh transients (relative
        // size e^{-2λτ}) are gone.
        let times: Vec<f64> = (0..8).map(|k| (4.0 + 0.25 * k as f64) / rate).collect();
        let report =
            plane_component_growth(&e, &run, (PI, PI), &times, 0.05, &frame).unwrap();
        assert!(
            (report.fitted_rate - rate).abs() < 0.02 * rate,
            "fitted {} vs {rate}",
            report.fitted_rate
        );
        assert!(
            (report.half_radius_ratio - 2.0).abs() < 0.2,
            "halving r should double the amplitude: {}",
            report.half_radius_ratio
        );
    }

    #[test]
    fn fit_report_exports() {
        let e = sin_field(0.25);
        let set = find_critical_points(&e, 16, 1e-12).unwrap();
        let (_, saddle) = set.saddles().next().unwrap();
        let fit = vertical_singularity_fit(&e, saddle, 1e-3, 1e-1, 8, 32).unwrap();
        let j = fit.to_json();
        assert!(j["slope"].as_f64().unwrap() < 0.0);
        let mut buf = Vec::new();
        fit.write_ring_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("r,phi,omega\n"));
        assert_eq!(text.lines().count(), 1 + 8 * 32);
    }
}
