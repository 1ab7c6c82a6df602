//! Scaled streamlines, quasi-stationary trajectories and gradient lines.
//!
//! The large-scale streamline system in slow variables is
//!
//! ```text
//! ξ' = C0(ξ,η) sin w,   η' = C0(ξ,η) cos w,   w' = ∂ξC0 cos w - ∂ηC0 sin w,
//! ```
//!
//! with `w = z + φ`. The angle `w̄ = atan2(∂ξC0, ∂ηC0)` is an equilibrium of
//! the `w` equation; trajectories holding it are *quasi-stationary* and their
//! plane projection is a gradient line of `C0`,
//! `Σ' = ± C0 ∇C0 / |∇C0|`. Perturbations `w̃ = w - w̄` decay like
//! `exp(-∫|∇C0| dτ)`, which [`stability_probe`] measures directly.
//!
//! Note the equilibrium only tracks exactly where the gradient direction is
//! constant along the path (symmetry lines of the field); elsewhere the
//! streamline approaches the gradient line asymptotically at rate `|∇C0|`.

use crate::energy::EnergyDensity;
use crate::error::{Error, Result};
use crate::ode::{DormandPrince, StepControl};
use crate::poly::TrigPoly2D;
use std::f64::consts::TAU;
use std::io::Write;

/// Local data of the slow phase field needed by the streamline system.
#[derive(Debug, Clone, Copy)]
pub struct PhaseSample {
    pub value: f64,
    pub dtau: f64,
    pub grad: (f64, f64),
}

/// Callback interface for the slow phase `φ(ξ,η,τ)`.
pub trait PhaseField {
    fn sample(&self, xi: f64, eta: f64, tau: f64) -> PhaseSample;
}

/// `φ ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroPhase;

impl PhaseField for ZeroPhase {
    fn sample(&self, _xi: f64, _eta: f64, _tau: f64) -> PhaseSample {
        PhaseSample {
            value: 0.0,
            dtau: 0.0,
            grad: (0.0, 0.0),
        }
    }
}

/// A time-independent phase given by a trigonometric polynomial.
#[derive(Debug, Clone)]
pub struct StaticPhase(pub TrigPoly2D);

impl PhaseField for StaticPhase {
    fn sample(&self, xi: f64, eta: f64, _tau: f64) -> PhaseSample {
        PhaseSample {
            value: self.0.eval(xi, eta),
            dtau: 0.0,
            grad: self.0.grad(xi, eta),
        }
    }
}

/// One accepted integration step of a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct Sample {
    pub tau: f64,
    pub xi: f64,
    pub eta: f64,
    pub z: f64,
    /// The vertical angle `w = z + φ` (equals `z` for planar traces).
    pub w: f64,
}

/// Why a trace ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    ReachedTauEnd,
    /// Entered the stop ball of a critical point at the recorded centre.
    EnteredCriticalBall { xi: f64, eta: f64 },
    StepFailure,
}

/// A sampled streamline or gradient-line path.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
    /// Integration tolerance the trace was produced with.
    pub tol: f64,
    /// Step-size cap used by the controller.
    pub max_step: f64,
    /// Running `∫ |∇C0| dτ` per sample, when the trace integrates it
    /// (gradient-line traces do; streamline runs leave it empty).
    pub grad_integral: Vec<f64>,
}

impl Trajectory {
    pub fn start(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn end(&self) -> &Sample {
        self.samples.last().expect("trajectories are non-empty")
    }

    /// CSV export: `tau,xi,eta,z` rows plus a trailing termination comment.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "tau,xi,eta,z")?;
        for s in &self.samples {
            writeln!(w, "{},{},{},{}", s.tau, s.xi, s.eta, s.z)?;
        }
        let reason = match self.termination {
            Termination::ReachedTauEnd => "reached_tau_end".to_string(),
            Termination::EnteredCriticalBall { xi, eta } => {
                format!("entered_critical_ball({xi},{eta})")
            }
            Termination::StepFailure => "step_failure".to_string(),
        };
        writeln!(w, "# termination={reason}")
    }
}

/// Ascent or descent along the energy-density gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Ascend,
    Descend,
}

/// Knobs shared by the tracing operations.
#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    pub tau_max: f64,
    pub tol: f64,
    /// Trace ends when it enters this ball around a critical point.
    pub stop_radius: f64,
    /// Below this gradient magnitude the quasi-stationary angle is undefined.
    pub grad_floor: f64,
    pub max_step: f64,
    /// Critical-ball detection is suppressed within this distance of the
    /// start (used when launching separatrices out of a saddle).
    pub arm_radius: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            tau_max: 50.0,
            tol: 1e-8,
            stop_radius: 1e-3,
            grad_floor: 1e-8,
            max_step: 0.05,
            arm_radius: 0.0,
        }
    }
}

/// Distance on the 2π-torus.
pub fn torus_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    fn wrap(d: f64) -> f64 {
        (d + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI
    }
    wrap(a.0 - b.0).hypot(wrap(a.1 - b.1))
}

/// The quasi-stationary vertical angle `w̄` with
/// `sin w̄ = ∂ξC0/|∇C0|`, `cos w̄ = ∂ηC0/|∇C0|` (full-circle branch).
pub fn quasi_stationary_angle(e: &EnergyDensity, xi: f64, eta: f64, grad_floor: f64) -> Result<f64> {
    let (gx, ge) = e.grad(xi, eta);
    let norm = gx.hypot(ge);
    if norm <= grad_floor {
        return Err(Error::NearCriticalPoint {
            xi,
            eta,
            grad: norm,
            floor: grad_floor,
        });
    }
    Ok(gx.atan2(ge))
}

/// Integrate the full scaled streamline system from `start = (ξ, η, z)` up to
/// `τ_end`, with the slow phase supplied by `phase`.
///
/// The integrated unknowns are `(ξ, η, w)`; the stored `z` is recovered as
/// `w - φ(ξ,η,τ)` at every accepted step.
pub fn integrate_streamline<P: PhaseField>(
    e: &EnergyDensity,
    phase: &P,
    start: (f64, f64, f64),
    tau_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    integrate_streamline_with(e, phase, start, tau_end, tol, TraceOptions::default().max_step)
}

pub fn integrate_streamline_with<P: PhaseField>(
    e: &EnergyDensity,
    phase: &P,
    start: (f64, f64, f64),
    tau_end: f64,
    tol: f64,
    max_step: f64,
) -> Result<Trajectory> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    check_phase_consistency(phase, start.0, start.1, 0.0)?;

    let p0 = phase.sample(start.0, start.1, 0.0);
    let w0 = start.2 + p0.value;
    let rhs = |_tau: f64, y: &[f64; 3]| -> [f64; 3] {
        let c0 = e.eval(y[0], y[1]);
        let (gx, ge) = e.grad(y[0], y[1]);
        let (sw, cw) = y[2].sin_cos();
        [c0 * sw, c0 * cw, gx * cw - ge * sw]
    };

    let mut samples = vec![Sample {
        tau: 0.0,
        xi: start.0,
        eta: start.1,
        z: start.2,
        w: w0,
    }];
    let solver = DormandPrince::new(tol, tol * 1e-2).with_max_step(max_step);
    solver.solve_with(rhs, 0.0, [start.0, start.1, w0], tau_end, |tau, y| {
        let z = y[2] - phase.sample(y[0], y[1], tau).value;
        samples.push(Sample {
            tau,
            xi: y[0],
            eta: y[1],
            z,
            w: y[2],
        });
        StepControl::Continue
    })?;

    Ok(Trajectory {
        samples,
        termination: Termination::ReachedTauEnd,
        tol,
        max_step,
        grad_integral: Vec::new(),
    })
}

fn check_phase_consistency<P: PhaseField>(phase: &P, xi: f64, eta: f64, tau: f64) -> Result<()> {
    let h = 1e-5;
    let s = phase.sample(xi, eta, tau);
    let fdx = (phase.sample(xi + h, eta, tau).value - phase.sample(xi - h, eta, tau).value)
        / (2.0 * h);
    let fde = (phase.sample(xi, eta + h, tau).value - phase.sample(xi, eta - h, tau).value)
        / (2.0 * h);
    let err = (fdx - s.grad.0).abs().max((fde - s.grad.1).abs());
    let scale = 1.0 + s.grad.0.abs().max(s.grad.1.abs());
    if err > 1e-4 * scale {
        return Err(Error::InconsistentCallback(err));
    }
    Ok(())
}

/// Trace a gradient line `Σ' = ± C0 ∇C0/|∇C0|` of the energy density.
///
/// The trace terminates inside `stop_radius` of a critical point (detected on
/// the fly with a Newton proximity probe on `∇C0 = 0`), or at `τ_max`. The
/// `grad_integral` field carries `∫|∇C0| dτ`, integrated alongside to the
/// same tolerance, so the exponential growth law of `C0` along the path can
/// be checked exactly.
pub fn trace_gradient_line(
    e: &EnergyDensity,
    start: (f64, f64),
    direction: Direction,
    opts: &TraceOptions,
) -> Result<Trajectory> {
    let (gx0, ge0) = e.grad(start.0, start.1);
    let g0 = gx0.hypot(ge0);
    if g0 <= opts.grad_floor {
        return Err(Error::NearCriticalPoint {
            xi: start.0,
            eta: start.1,
            grad: g0,
            floor: opts.grad_floor,
        });
    }
    if opts.arm_radius <= 0.0 {
        if let Some((cx, ceta)) = newton_proximity(e, start, opts.stop_radius) {
            return Err(Error::StartInsideCriticalBall {
                xi: start.0,
                eta: start.1,
                cx,
                ceta,
            });
        }
    }

    let sign = match direction {
        Direction::Ascend => 1.0,
        Direction::Descend => -1.0,
    };
    let rhs = |_tau: f64, y: &[f64; 3]| -> [f64; 3] {
        let c0 = e.eval(y[0], y[1]);
        let (gx, ge) = e.grad(y[0], y[1]);
        let norm = gx.hypot(ge).max(1e-300);
        [sign * c0 * gx / norm, sign * c0 * ge / norm, gx.hypot(ge)]
    };

    let mut samples = vec![Sample {
        tau: 0.0,
        xi: start.0,
        eta: start.1,
        z: 0.0,
        w: 0.0,
    }];
    let mut grad_integral = vec![0.0];
    let mut hit: Option<(f64, f64)> = None;
    let solver = DormandPrince::new(opts.tol, opts.tol * 1e-2).with_max_step(opts.max_step);
    let sol = solver.solve_with(
        rhs,
        0.0,
        [start.0, start.1, 0.0],
        opts.tau_max,
        |tau, y| {
            samples.push(Sample {
                tau,
                xi: y[0],
                eta: y[1],
                z: 0.0,
                w: 0.0,
            });
            grad_integral.push(y[2]);
            let armed = torus_dist((y[0], y[1]), start) >= opts.arm_radius;
            if armed {
                if let Some(c) = newton_proximity(e, (y[0], y[1]), opts.stop_radius) {
                    hit = Some(c);
                    return StepControl::Stop;
                }
            }
            StepControl::Continue
        },
    )?;

    let termination = match hit {
        Some((xi, eta)) => Termination::EnteredCriticalBall { xi, eta },
        None if sol.stopped => unreachable!("stop implies a recorded hit"),
        None => Termination::ReachedTauEnd,
    };
    Ok(Trajectory {
        samples,
        termination,
        tol: opts.tol,
        max_step: opts.max_step,
        grad_integral,
    })
}

/// Newton proximity probe: from `p`, does a damped Newton iteration on
/// `∇C0 = 0` converge to a root within `radius` of `p`? Returns the root.
///
/// The first Newton step length is itself a distance estimate, so points far
/// from every critical point bail out immediately.
fn newton_proximity(e: &EnergyDensity, p: (f64, f64), radius: f64) -> Option<(f64, f64)> {
    let h = e.hessian(p.0, p.1);
    let g = e.grad(p.0, p.1);
    let step = h.solve(g)?;
    if step.0.hypot(step.1) > radius {
        return None;
    }
    let mut x = (p.0 - step.0, p.1 - step.1);
    for _ in 0..12 {
        let g = e.grad(x.0, x.1);
        let gn = g.0.hypot(g.1);
        if gn < 1e-13 * (1.0 + e.a()) {
            if torus_dist(x, p) <= radius {
                return Some(x);
            }
            return None;
        }
        let h = e.hessian(x.0, x.1);
        let step = h.solve(g)?;
        x = (x.0 - step.0, x.1 - step.1);
        if torus_dist(x, p) > 4.0 * radius {
            return None;
        }
    }
    None
}

/// Report produced by [`stability_probe`].
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub times: Vec<f64>,
    pub w_tilde: Vec<f64>,
    /// Least-squares decay rate of `ln w̃` over the probe window.
    pub fitted_rate: f64,
    /// `|∇C0|` along the trajectory, the predicted instantaneous rate.
    pub predicted_rate_curve: Vec<f64>,
    /// Path minimum of `|∇C0|` (the decay bound exponent).
    pub min_grad: f64,
    pub max_grad: f64,
    /// Whether `w̃(τ) ≤ w̃₀ e^{-m(τ-τ₀)}` held at every sample.
    pub bound_ok: bool,
}

/// Linearised stability of a quasi-stationary trajectory: integrates
/// `dw̃/dτ = -|∇C0| w̃` along the base path and checks the exponential decay
/// bound with `m = min |∇C0|`.
///
/// The base trajectory must satisfy the quasi-stationarity condition; its
/// `w'` residual `∂ξC0 cos w - ∂ηC0 sin w` is checked against `qs_tol`.
pub fn stability_probe(
    e: &EnergyDensity,
    base: &Trajectory,
    w_tilde0: f64,
    qs_tol: f64,
) -> Result<StabilityReport> {
    if !(w_tilde0 > 0.0 && w_tilde0 <= 0.1) {
        return Err(Error::InvalidInput(format!(
            "perturbation {w_tilde0} must lie in (0, 0.1]"
        )));
    }
    let mut residual: f64 = 0.0;
    for s in &base.samples {
        let (gx, ge) = e.grad(s.xi, s.eta);
        residual = residual.max((gx * s.w.cos() - ge * s.w.sin()).abs());
    }
    if residual > qs_tol {
        return Err(Error::NotQuasiStationary(residual, qs_tol));
    }

    let s0 = base.start();
    let rhs = |_tau: f64, y: &[f64; 4]| -> [f64; 4] {
        let c0 = e.eval(y[0], y[1]);
        let (gx, ge) = e.grad(y[0], y[1]);
        let (sw, cw) = y[2].sin_cos();
        [
            c0 * sw,
            c0 * cw,
            gx * cw - ge * sw,
            -gx.hypot(ge) * y[3],
        ]
    };

    let mut times = vec![s0.tau];
    let mut w_tilde = vec![w_tilde0];
    let mut rates = vec![e.grad_norm(s0.xi, s0.eta)];
    let solver = DormandPrince::new(base.tol, base.tol * 1e-2).with_max_step(base.max_step);
    solver.solve_with(
        rhs,
        s0.tau,
        [s0.xi, s0.eta, s0.w, w_tilde0],
        base.end().tau,
        |tau, y| {
            times.push(tau);
            w_tilde.push(y[3]);
            rates.push(e.grad_norm(y[0], y[1]));
            StepControl::Continue
        },
    )?;

    let min_grad = rates.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_grad = rates.iter().cloned().fold(0.0, f64::max);
    let bound_ok = times.iter().zip(&w_tilde).all(|(&t, &w)| {
        w <= w_tilde0 * (-(min_grad) * (t - s0.tau)).exp() * (1.0 + 1e-9) + 1e-300
    });

    // ln w̃ against τ by least squares; the negated slope is the mean rate.
    let n = times.len() as f64;
    let mean_t = times.iter().sum::<f64>() / n;
    let mean_l = w_tilde.iter().map(|w| w.max(1e-300).ln()).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&t, &w) in times.iter().zip(&w_tilde) {
        num += (t - mean_t) * (w.max(1e-300).ln() - mean_l);
        den += (t - mean_t) * (t - mean_t);
    }
    let fitted_rate = if den > 0.0 { -num / den } else { 0.0 };

    Ok(StabilityReport {
        times,
        w_tilde,
        fitted_rate,
        predicted_rate_curve: rates,
        min_grad,
        max_grad,
        bound_ok,
    })
}
