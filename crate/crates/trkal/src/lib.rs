//! Numerical laboratory for decaying Beltrami (Trkal) flows and the large-scale
//! structures that grow out of their long-wavelength modulations.
//!
//! The crate is organised as a chain of small modules, each owning one stage of
//! the construction:
//!
//! * [`modes`] — anisotropic curl eigenfunctions `e_m`, `h_m` and their closed
//!   cross-product algebra.
//! * [`triplet`] — the three-component Beltrami triplet and its closed-form
//!   viscous evolution.
//! * [`poly`] — finite doubly-periodic trigonometric polynomials (the slow
//!   amplitude modulations) with exact derivatives.
//! * [`energy`] — the energy-density field `C0(ξ,η)` built from the modulations
//!   and its gradient/Hessian.
//! * [`ode`] — an embedded Runge–Kutta 5(4) integrator with PI step control.
//! * [`tracer`] — scaled streamlines, quasi-stationary trajectories, gradient
//!   lines of `C0` and the linearised stability probe.
//! * [`morse`] — critical points of `C0` on the torus, separatrices and the
//!   invariant curved-polygon partition.
//! * [`phase`] — the ill-posed elliptic Cauchy problem for the phase, spectrally
//!   truncated, plus the first-order correction and the late-time heat decay.
//! * [`vorticity`] — the composed asymptotic velocity field, velocity/vorticity
//!   collinearity and the 1/r vorticity-singularity fits.
//! * [`dns`] — a small pseudo-spectral periodic-box integrator of the force-free
//!   vorticity equation, used as an independent oracle throughout.
//!
//! Everything is dimensionless; lengths live on the 2π-torus and the Reynolds
//! number `R` is the only physical parameter.

// `!(x > 0)`-style guards reject NaN as well as the out-of-range value.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dns;
pub mod energy;
pub mod error;
pub mod fft;
pub mod geom;
pub mod modes;
pub mod morse;
pub mod ode;
pub mod phase;
pub mod poly;
pub mod tracer;
pub mod triplet;
pub mod vorticity;

pub use energy::EnergyDensity;
pub use error::{Error, Result};
pub use geom::{Mat2Sym, Vec3};
pub use modes::{BeltramiMode, Parity};
pub use phase::{PhaseState, ScalingFrame};
pub use poly::TrigPoly2D;
pub use tracer::Trajectory;
pub use triplet::TripletState;
