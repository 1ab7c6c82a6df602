//! Small geometric value types: 3-vectors and symmetric 2×2 matrices.

use serde::{Deserialize, Serialize};

/// A velocity vector in the dimensionless units of the governing equations.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(s * self.x, s * self.y, s * self.z)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// One eigenvalue with its unit eigenvector.
pub type EigenPair = (f64, (f64, f64));

/// Symmetric 2×2 matrix, used for Hessians of scalar fields on the torus.
///
/// Entries are `a = ∂²f/∂ξ²`, `b = ∂²f/∂ξ∂η`, `c = ∂²f/∂η²`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat2Sym {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Mat2Sym {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Mat2Sym { a, b, c }
    }

    pub fn det(&self) -> f64 {
        self.a * self.c - self.b * self.b
    }

    pub fn trace(&self) -> f64 {
        self.a + self.c
    }

    /// Matrix–vector product.
    pub fn apply(&self, v: (f64, f64)) -> (f64, f64) {
        (self.a * v.0 + self.b * v.1, self.b * v.0 + self.c * v.1)
    }

    /// Eigenvalues sorted `λ₁ ≥ λ₂`. Always real for a symmetric matrix.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.a + self.c);
        let disc = (0.5 * (self.a - self.c)).hypot(self.b);
        (mean + disc, mean - disc)
    }

    /// Eigenvalues with matching unit eigenvectors, `λ₁ ≥ λ₂`.
    pub fn eigen(&self) -> (EigenPair, EigenPair) {
        let (l1, l2) = self.eigenvalues();
        // The eigenvector for λ solves (a-λ)x + b y = 0. Pick the better
        // conditioned row for each eigenvalue.
        let v1 = eigenvector(self, l1);
        // Enforce exact orthogonality instead of solving twice.
        let v2 = (-v1.1, v1.0);
        ((l1, v1), (l2, v2))
    }

    /// Solve `M x = rhs`. Returns `None` when the matrix is singular.
    pub fn solve(&self, rhs: (f64, f64)) -> Option<(f64, f64)> {
        let det = self.det();
        let scale = self.a.abs().max(self.c.abs()).max(self.b.abs());
        if det.abs() <= f64::EPSILON * scale * scale * 16.0 {
            return None;
        }
        Some((
            (self.c * rhs.0 - self.b * rhs.1) / det,
            (self.a * rhs.1 - self.b * rhs.0) / det,
        ))
    }
}

fn eigenvector(m: &Mat2Sym, lambda: f64) -> (f64, f64) {
    // Rows of (M - λI) are (a-λ, b) and (b, c-λ); the eigenvector is
    // orthogonal to the larger row.
    let r1 = (m.a - lambda, m.b);
    let r2 = (m.b, m.c - lambda);
    let (rx, ry) = if r1.0.hypot(r1.1) >= r2.0.hypot(r2.1) {
        r1
    } else {
        r2
    };
    let norm = rx.hypot(ry);
    if norm == 0.0 {
        // Multiple of identity: every direction is an eigenvector.
        return (1.0, 0.0);
    }
    (-ry / norm, rx / norm)
}
