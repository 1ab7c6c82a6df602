//! Embedded Dormand–Prince 5(4) integrator with PI step-size control.
//!
//! Small and allocation-free (states are const-size arrays), which is all the
//! streamline and stability systems need. A fixed-step RK4 is provided
//! alongside as an independent oracle for tests.

use crate::error::{Error, Result};

/// What a per-step observer tells the integrator to do next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepControl {
    Continue,
    Stop,
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
    pub rejected: usize,
    /// True when an observer requested an early stop.
    pub stopped: bool,
}

/// Dormand–Prince 5(4) with proportional–integral step control.
#[derive(Debug, Clone)]
pub struct DormandPrince {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl DormandPrince {
    pub fn new(rtol: f64, atol: f64) -> Self {
        DormandPrince {
            rtol,
            atol,
            max_step: f64::INFINITY,
            max_steps: 5_000_000,
        }
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }

    pub fn solve<const N: usize, F>(&self, f: F, t0: f64, y0: [f64; N], t_end: f64) -> Result<Solution<N>>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        self.solve_with(f, t0, y0, t_end, |_, _| StepControl::Continue)
    }

    /// Integrate from `t0` to `t_end`, invoking `observe` after every accepted
    /// step. The observer may stop the run early.
    pub fn solve_with<const N: usize, F, O>(
        &self,
        mut f: F,
        t0: f64,
        y0: [f64; N],
        t_end: f64,
        mut observe: O,
    ) -> Result<Solution<N>>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
        O: FnMut(f64, &[f64; N]) -> StepControl,
    {
        assert!(t_end >= t0, "backwards integration is expressed by the RHS");
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let mut h = self.initial_step(t0, &y, &k1, t_end);
        let mut err_prev: f64 = 1.0;
        let mut steps = 0;
        let mut rejected = 0;

        if t0 == t_end {
            return Ok(Solution { t, y, steps, rejected, stopped: false });
        }

        loop {
            if steps + rejected > self.max_steps {
                return Err(Error::StepFailure { tau: t, h });
            }
            h = h.min(self.max_step).min(t_end - t);
            if h <= f64::EPSILON * 16.0 * t.abs().max(1.0) {
                return Err(Error::StepFailure { tau: t, h });
            }

            let (y_new, err, k7) = dp_step(&mut f, t, &y, &k1, h);
            let err_norm = self.error_norm(&y, &y_new, &err);

            if err_norm <= 1.0 {
                t += h;
                y = y_new;
                k1 = k7; // first-same-as-last
                steps += 1;
                if observe(t, &y) == StepControl::Stop {
                    return Ok(Solution { t, y, steps, rejected, stopped: true });
                }
                if t >= t_end - f64::EPSILON * 4.0 * t_end.abs().max(1.0) {
                    return Ok(Solution { t, y, steps, rejected, stopped: false });
                }
                // PI controller (orders 5/4): h ← h · 0.9 · err^-0.14 · err_prev^0.08
                let fac = 0.9 * err_norm.max(1e-10).powf(-0.7 / 5.0)
                    * err_prev.max(1e-10).powf(0.4 / 5.0);
                h *= fac.clamp(0.2, 5.0);
                err_prev = err_norm;
            } else {
                rejected += 1;
                h *= (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
    }

    fn error_norm<const N: usize>(&self, y0: &[f64; N], y1: &[f64; N], err: &[f64; N]) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            let scale = self.atol + self.rtol * y0[i].abs().max(y1[i].abs());
            let e = err[i] / scale;
            acc += e * e;
        }
        (acc / N as f64).sqrt()
    }

    fn initial_step<const N: usize>(&self, t0: f64, y: &[f64; N], f0: &[f64; N], t_end: f64) -> f64 {
        let d0 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let d1 = f0.iter().map(|v| v * v).sum::<f64>().sqrt();
        let h = if d1 > 1e-10 {
            0.01 * (d0.max(1e-3) / d1)
        } else {
            1e-3 * (t_end - t0).max(1e-3)
        };
        h.min(self.max_step).min((t_end - t0) * 0.5).max(1e-12)
    }
}

/// One Dormand–Prince step: returns the fifth-order solution, the embedded
/// error estimate, and the last stage (FSAL).
#[allow(clippy::needless_range_loop)]
fn dp_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N], [f64; N])
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A2: [f64; 1] = [0.2];
    const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
    const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
    const A5: [f64; 4] = [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
    ];
    const A6: [f64; 5] = [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ];
    const B: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    // b - b̂: difference against the embedded fourth-order weights.
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];

    let stage = |ks: &[&[f64; N]], coeffs: &[f64], y: &[f64; N], h: f64| -> [f64; N] {
        let mut out = *y;
        for i in 0..N {
            let mut acc = 0.0;
            for (k, c) in ks.iter().zip(coeffs) {
                acc += c * k[i];
            }
            out[i] += h * acc;
        }
        out
    };

    let k2 = f(t + C[0] * h, &stage(&[k1], &A2, y, h));
    let k3 = f(t + C[1] * h, &stage(&[k1, &k2], &A3, y, h));
    let k4 = f(t + C[2] * h, &stage(&[k1, &k2, &k3], &A4, y, h));
    let k5 = f(t + C[3] * h, &stage(&[k1, &k2, &k3, &k4], &A5, y, h));
    let k6 = f(t + C[4] * h, &stage(&[k1, &k2, &k3, &k4, &k5], &A6, y, h));

    let ks = [k1, &k2, &k3, &k4, &k5, &k6];
    let mut y_new = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (k, b) in ks.iter().zip(&B[..6]) {
            acc += b * k[i];
        }
        y_new[i] += h * acc;
    }
    let k7 = f(t + h, &y_new);

    let all = [k1, &k2, &k3, &k4, &k5, &k6, &k7];
    let mut err = [0.0; N];
    for i in 0..N {
        let mut acc = 0.0;
        for (k, e) in all.iter().zip(&E) {
            acc += e * k[i];
        }
        err[i] = h * acc;
    }
    (y_new, err, k7)
}

/// Fixed-step classical RK4 over `steps` equal steps. Test oracle.
pub fn integrate_fixed_rk4<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    steps: usize,
) -> [f64; N]
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let h = (t_end - t0) / steps as f64;
    let mut y = y0;
    let mut t = t0;
    for _ in 0..steps {
        let k1 = f(t, &y);
        let mut y2 = y;
        for i in 0..N {
            y2[i] += 0.5 * h * k1[i];
        }
        let k2 = f(t + 0.5 * h, &y2);
        let mut y3 = y;
        for i in 0..N {
            y3[i] += 0.5 * h * k2[i];
        }
        let k3 = f(t + 0.5 * h, &y3);
        let mut y4 = y;
        for i in 0..N {
            y4[i] += h * k3[i];
        }
        let k4 = f(t + h, &y4);
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;
    }
    y
}
