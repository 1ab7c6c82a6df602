//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid resolution {0} is too coarse (need at least {1})")]
    InvalidResolution(usize, usize),

    #[error("vertical-velocity function returned a non-finite value at t = {0}")]
    NonFiniteDelta(f64),

    #[error("energy density is not positive at (ξ,η) = ({xi}, {eta}): radicand {value}")]
    NonPositiveEnergy { xi: f64, eta: f64, value: f64 },

    #[error("gradient magnitude {grad} below floor {floor} at ({xi}, {eta}); point is critical")]
    NearCriticalPoint {
        xi: f64,
        eta: f64,
        grad: f64,
        floor: f64,
    },

    #[error("step size underflow at τ = {tau} (h = {h})")]
    StepFailure { tau: f64, h: f64 },

    #[error("start ({xi}, {eta}) lies inside the critical ball of ({cx}, {ceta})")]
    StartInsideCriticalBall {
        xi: f64,
        eta: f64,
        cx: f64,
        ceta: f64,
    },

    #[error("phase callback gradient disagrees with finite differences of its value (err {0})")]
    InconsistentCallback(f64),

    #[error("base trajectory is not quasi-stationary: max |w - w̄| = {0} exceeds {1}")]
    NotQuasiStationary(f64, f64),

    #[error("degenerate Hessian (det = {det}) at ({xi}, {eta})")]
    DegenerateHessian { xi: f64, eta: f64, det: f64 },

    #[error("field has no isolated critical points (gradient vanishes identically)")]
    NoCriticalPoints,

    #[error("separatrix branch {branch} of saddle ({xi}, {eta}) did not terminate within τ_max")]
    UnresolvedSeparatrix { xi: f64, eta: f64, branch: usize },

    #[error("separatrix graph is not a cellular torus embedding: {0}")]
    Topology(String),

    #[error("spectral coefficients overflow at τ = {tau}; ill-posed growth exceeded range")]
    BlowUp { tau: f64 },

    #[error("cos φ̃₀ reaches {0}, below the floor {1}; correction integral is near-singular")]
    NearSingularOffset(f64, f64),

    #[error("Reynolds number {0} must exceed 1")]
    InvalidReynolds(f64),

    #[error("time step {dt} violates the advective CFL bound; suggested dt ≤ {suggested}")]
    CflViolation { dt: f64, suggested: f64 },

    #[error("annulus [{r_min}, {r_max}] around ({xi}, {eta}) contains another critical point")]
    AnnulusContaminated {
        xi: f64,
        eta: f64,
        r_min: f64,
        r_max: f64,
    },

    #[error("{0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
