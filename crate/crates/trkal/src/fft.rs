//! Thin FFT helpers on top of `rustfft`: normalised 2-D and 3-D transforms of
//! complex grids plus signed wavenumber bookkeeping.
//!
//! Conventions: `forward` produces true Fourier coefficients
//! `û_k = N⁻ᵈ Σ u(x) e^{-ik·x}` on the 2π-periodic grid, so `inverse`
//! synthesises `u(x) = Σ û_k e^{ik·x}` without further scaling.

use ndarray::{Array2, Array3, Axis};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Signed wavenumber of grid index `i` on an `n`-point axis.
pub fn wavenumber(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Cached forward/inverse plans for one grid size.
pub struct FftPlan {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftPlan {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    fn apply_axis_2d(&self, a: &mut Array2<Complex64>, axis: usize, forward: bool) {
        let fft = if forward { &self.fwd } else { &self.inv };
        let mut scratch = vec![Complex64::default(); self.n];
        for mut lane in a.lanes_mut(Axis(axis)) {
            if let Some(slice) = lane.as_slice_mut() {
                fft.process(slice);
            } else {
                for (d, s) in scratch.iter_mut().zip(lane.iter()) {
                    *d = *s;
                }
                fft.process(&mut scratch);
                for (d, s) in lane.iter_mut().zip(&scratch) {
                    *d = *s;
                }
            }
        }
    }

    /// In-place 2-D forward transform (normalised).
    pub fn forward2(&self, a: &mut Array2<Complex64>) {
        self.apply_axis_2d(a, 1, true);
        self.apply_axis_2d(a, 0, true);
        let scale = 1.0 / (self.n * self.n) as f64;
        a.mapv_inplace(|v| v * scale);
    }

    /// In-place 2-D inverse transform.
    pub fn inverse2(&self, a: &mut Array2<Complex64>) {
        self.apply_axis_2d(a, 1, false);
        self.apply_axis_2d(a, 0, false);
    }

    /// One FFT pass along `axis` of a 3-D array whose length on that axis is
    /// `self.size()`. No normalisation is applied.
    pub fn axis3(&self, a: &mut Array3<Complex64>, axis: usize, forward: bool) {
        assert_eq!(a.shape()[axis], self.n, "axis length must match the plan");
        let fft = if forward { &self.fwd } else { &self.inv };
        if axis == 2 {
            // z-lanes are contiguous: process chunks in parallel.
            let n = self.n;
            let slice = a.as_slice_mut().expect("standard layout");
            slice
                .par_chunks_mut(n)
                .for_each(|chunk| fft.process(chunk));
        } else {
            let mut scratch = vec![Complex64::default(); self.n];
            for mut lane in a.lanes_mut(Axis(axis)) {
                for (d, s) in scratch.iter_mut().zip(lane.iter()) {
                    *d = *s;
                }
                fft.process(&mut scratch);
                for (d, s) in lane.iter_mut().zip(&scratch) {
                    *d = *s;
                }
            }
        }
    }

    /// In-place 3-D forward transform (normalised).
    pub fn forward3(&self, a: &mut Array3<Complex64>) {
        self.axis3(a, 2, true);
        self.axis3(a, 1, true);
        self.axis3(a, 0, true);
        let scale = 1.0 / (self.n * self.n * self.n) as f64;
        a.mapv_inplace(|v| v * scale);
    }

    /// In-place 3-D inverse transform.
    pub fn inverse3(&self, a: &mut Array3<Complex64>) {
        self.axis3(a, 2, false);
        self.axis3(a, 1, false);
        self.axis3(a, 0, false);
    }
}

/// Spectral partial derivative of a real 2-D grid along one axis.
///
/// Transforms, multiplies by `ik`, transforms back; the Nyquist mode is
/// zeroed (its derivative is not representable as a real signal).
pub fn spectral_derivative_2d(plan: &FftPlan, field: &Array2<f64>, axis: usize) -> Array2<f64> {
    let n = plan.size();
    let mut hat = field.mapv(|v| Complex64::new(v, 0.0));
    plan.forward2(&mut hat);
    for ((i, j), v) in hat.indexed_iter_mut() {
        let idx = if axis == 0 { i } else { j };
        let k = wavenumber(idx, n);
        if n.is_multiple_of(2) && idx == n / 2 {
            *v = Complex64::default();
        } else {
            *v *= Complex64::new(0.0, k as f64);
        }
    }
    plan.inverse2(&mut hat);
    hat.mapv(|v| v.re)
}
