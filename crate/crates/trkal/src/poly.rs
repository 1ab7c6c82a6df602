//! Finite doubly-periodic trigonometric polynomials with exact termwise
//! calculus.
//!
//! A [`TrigPoly2D`] is a sparse map from integer wavevectors `(m, n)` to
//! complex coefficients with Hermitian symmetry, `c_{-m,-n} = conj(c_{m,n})`,
//! so the synthesised field `Σ c_{mn} e^{i(mξ+nη)}` is real. All derivatives
//! and products are computed exactly on the coefficients; nothing here is
//! gridded. The slow amplitude modulations of the flow are long-wavelength by
//! assumption, which is what keeps these polynomials finite and small.

use num_complex::Complex64;
use std::collections::BTreeMap;

const PRUNE_EPS: f64 = 0.0; // keep exact zeros out, nothing else

/// Sparse real-valued trigonometric polynomial on the 2π-torus.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPoly2D {
    terms: BTreeMap<(i32, i32), Complex64>,
}

impl TrigPoly2D {
    pub fn zero() -> Self {
        TrigPoly2D::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = TrigPoly2D::default();
        if c != 0.0 {
            p.terms.insert((0, 0), Complex64::new(c, 0.0));
        }
        p
    }

    /// Build from raw complex coefficients, symmetrising so the field is real.
    ///
    /// Returns the polynomial and the largest Hermitian asymmetry that had to
    /// be repaired (0 for already-symmetric input).
    pub fn from_complex_terms<I>(terms: I) -> (Self, f64)
    where
        I: IntoIterator<Item = ((i32, i32), Complex64)>,
    {
        let mut raw: BTreeMap<(i32, i32), Complex64> = BTreeMap::new();
        for (k, c) in terms {
            *raw.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        let mut out = BTreeMap::new();
        let mut asym: f64 = 0.0;
        let zero = Complex64::new(0.0, 0.0);
        for (&(m, n), &c) in &raw {
            let mirror = raw.get(&(-m, -n)).copied().unwrap_or(zero);
            let sym = 0.5 * (c + mirror.conj());
            asym = asym.max((c - mirror.conj()).norm() * 0.5);
            if sym.norm() > PRUNE_EPS {
                out.insert((m, n), sym);
            }
        }
        (TrigPoly2D { terms: out }, asym)
    }

    /// One real harmonic `a cos(mξ+nη) + b sin(mξ+nη)`.
    pub fn harmonic(m: i32, n: i32, cos_amp: f64, sin_amp: f64) -> Self {
        if m == 0 && n == 0 {
            return TrigPoly2D::constant(cos_amp);
        }
        let c = Complex64::new(0.5 * cos_amp, -0.5 * sin_amp);
        let (p, _) = TrigPoly2D::from_complex_terms([((m, n), c), ((-m, -n), c.conj())]);
        p
    }

    /// `k sin ξ sin η` — the square-vanishing example field.
    pub fn sin_product(k: f64) -> Self {
        // sin ξ sin η = (cos(ξ-η) - cos(ξ+η)) / 2
        TrigPoly2D::harmonic(1, -1, 0.5 * k, 0.0).add(&TrigPoly2D::harmonic(1, 1, -0.5 * k, 0.0))
    }

    /// The six-coefficient first-harmonic family on the torus
    /// `a cos ξ + b sin ξ + c cos η + d sin η + p cos(ξ+η) + q sin(ξ+η)`.
    pub fn torus_first_harmonics(a: f64, b: f64, c: f64, d: f64, p: f64, q: f64) -> Self {
        TrigPoly2D::harmonic(1, 0, a, b)
            .add(&TrigPoly2D::harmonic(0, 1, c, d))
            .add(&TrigPoly2D::harmonic(1, 1, p, q))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored coefficients.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Maximum of `|m|, |n|` over stored terms.
    pub fn degree(&self) -> i32 {
        self.terms
            .keys()
            .map(|&(m, n)| m.abs().max(n.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Coefficient at a given wavevector (zero when absent).
    pub fn coeff(&self, m: i32, n: i32) -> Complex64 {
        self.terms
            .get(&(m, n))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(i32, i32), &Complex64)> {
        self.terms.iter()
    }

    /// `ℓ¹` norm of the coefficients — an upper bound for `sup |p|`.
    pub fn sup_bound(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// `ℓ²` norm of the coefficients (the mean-square field norm).
    pub fn l2_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn eval(&self, xi: f64, eta: f64) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(m, n), &c) in &self.terms {
            let phase = m as f64 * xi + n as f64 * eta;
            acc += c * Complex64::cis(phase);
        }
        acc.re
    }

    /// Exact termwise gradient `(∂p/∂ξ, ∂p/∂η)`.
    pub fn grad(&self, xi: f64, eta: f64) -> (f64, f64) {
        let mut gx = Complex64::new(0.0, 0.0);
        let mut gy = Complex64::new(0.0, 0.0);
        for (&(m, n), &c) in &self.terms {
            let phase = m as f64 * xi + n as f64 * eta;
            let v = c * Complex64::cis(phase) * Complex64::new(0.0, 1.0);
            gx += v * m as f64;
            gy += v * n as f64;
        }
        (gx.re, gy.re)
    }

    /// Termwise partial derivative in ξ, as a new polynomial.
    pub fn dxi(&self) -> Self {
        self.map_coeffs(|(m, _), c| c * Complex64::new(0.0, m as f64))
    }

    /// Termwise partial derivative in η, as a new polynomial.
    pub fn deta(&self) -> Self {
        self.map_coeffs(|(_, n), c| c * Complex64::new(0.0, n as f64))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (&k, &c) in &other.terms {
            let e = terms.entry(k).or_insert(Complex64::new(0.0, 0.0));
            *e += c;
            if e.norm() <= PRUNE_EPS {
                terms.remove(&k);
            }
        }
        TrigPoly2D { terms }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_coeffs(|_, c| c * s)
    }

    /// Exact product by coefficient convolution.
    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<(i32, i32), Complex64> = BTreeMap::new();
        for (&(ma, na), &ca) in &self.terms {
            for (&(mb, nb), &cb) in &other.terms {
                let e = terms
                    .entry((ma + mb, na + nb))
                    .or_insert(Complex64::new(0.0, 0.0));
                *e += ca * cb;
            }
        }
        terms.retain(|_, c| c.norm() > PRUNE_EPS);
        TrigPoly2D { terms }
    }

    /// Heat-kernel decay: every coefficient multiplied by
    /// `exp(-(m²+n²) τ₁)`. The mean mode is invariant.
    pub fn heat_decay(&self, tau1: f64) -> Self {
        self.map_coeffs(|(m, n), c| {
            c * (-((m * m + n * n) as f64) * tau1).exp()
        })
    }

    /// The zero-mean part (mean coefficient removed).
    pub fn zero_mean(&self) -> Self {
        let mut p = self.clone();
        p.terms.remove(&(0, 0));
        p
    }

    /// Drop every term with `|m| > d` or `|n| > d`.
    pub fn truncate(&self, d: i32) -> Self {
        let mut p = self.clone();
        p.terms.retain(|&(m, n), _| m.abs() <= d && n.abs() <= d);
        p
    }

    /// Largest violation of `c_{-m,-n} = conj(c_{m,n})` over stored terms.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (&(m, n), &c) in &self.terms {
            worst = worst.max((c - self.coeff(-m, -n).conj()).norm());
        }
        worst
    }

    fn map_coeffs<F: Fn((i32, i32), Complex64) -> Complex64>(&self, f: F) -> Self {
        let mut terms = BTreeMap::new();
        for (&k, &c) in &self.terms {
            let v = f(k, c);
            if v.norm() > PRUNE_EPS {
                terms.insert(k, v);
            }
        }
        TrigPoly2D { terms }
    }

    /// Flat term list `(m, n, re, im)` in deterministic (sorted) order.
    pub fn to_term_list(&self) -> Vec<(i32, i32, f64, f64)> {
        self.terms
            .iter()
            .map(|(&(m, n), c)| (m, n, c.re, c.im))
            .collect()
    }

    /// Parse a `(m, n, re, im)` term list, symmetrising as needed. Returns the
    /// polynomial and the repaired asymmetry (see [`Self::from_complex_terms`]).
    pub fn from_term_list(list: &[(i32, i32, f64, f64)]) -> (Self, f64) {
        TrigPoly2D::from_complex_terms(
            list.iter()
                .map(|&(m, n, re, im)| ((m, n), Complex64::new(re, im))),
        )
    }
}
