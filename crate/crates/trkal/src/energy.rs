//! The energy-density field `C0(ξ,η) = [(A·b0 + γ0)² + γ1²]^{1/2}` and its
//! exact derivatives.
//!
//! `γ0` and `γ1` are the slow amplitude modulations of the two dual Beltrami
//! modes; `A` is the base amplitude of the dominant mode and `b0` the quench
//! constant (≈ 1 over the times of interest, exactly 1 by default). Gradient
//! lines of `C0` are the plane projections of the quasi-stationary
//! streamlines, so everything downstream — tracing, topology, singularity
//! fits — consumes this type.

use crate::error::{Error, Result};
use crate::geom::Mat2Sym;
use crate::poly::TrigPoly2D;
use serde_json::{json, Value};

#[derive(Debug, Clone)]
pub struct EnergyDensity {
    a: f64,
    b0: f64,
    gamma0: TrigPoly2D,
    gamma1: TrigPoly2D,
    // Termwise derivatives, precomputed once.
    g0_xi: TrigPoly2D,
    g0_eta: TrigPoly2D,
    g1_xi: TrigPoly2D,
    g1_eta: TrigPoly2D,
    g0_xixi: TrigPoly2D,
    g0_xieta: TrigPoly2D,
    g0_etaeta: TrigPoly2D,
    g1_xixi: TrigPoly2D,
    g1_xieta: TrigPoly2D,
    g1_etaeta: TrigPoly2D,
    positivity_certified: bool,
}

impl EnergyDensity {
    /// Build the field, validating positivity.
    ///
    /// The sufficient condition `sup|γ0| + sup|γ1| < A·b0` (via coefficient
    /// ℓ¹ bounds) certifies positivity outright. When it fails, a dense
    /// pointwise scan must still find the radicand positive, otherwise
    /// construction errors; [`Self::positivity_certified`] records which of
    /// the two checks passed.
    pub fn new(a: f64, b0: f64, gamma0: TrigPoly2D, gamma1: TrigPoly2D) -> Result<Self> {
        if !(a.is_finite() && b0.is_finite()) {
            return Err(Error::InvalidInput("non-finite amplitude".into()));
        }
        let certified = gamma0.sup_bound() + gamma1.sup_bound() < a * b0;
        let e = EnergyDensity {
            a,
            b0,
            g0_xi: gamma0.dxi(),
            g0_eta: gamma0.deta(),
            g1_xi: gamma1.dxi(),
            g1_eta: gamma1.deta(),
            g0_xixi: gamma0.dxi().dxi(),
            g0_xieta: gamma0.dxi().deta(),
            g0_etaeta: gamma0.deta().deta(),
            g1_xixi: gamma1.dxi().dxi(),
            g1_xieta: gamma1.dxi().deta(),
            g1_etaeta: gamma1.deta().deta(),
            gamma0,
            gamma1,
            positivity_certified: certified,
        };
        if !certified {
            let n = 64;
            let floor = (1e-8 * a * b0).powi(2);
            for i in 0..n {
                for j in 0..n {
                    let xi = std::f64::consts::TAU * i as f64 / n as f64;
                    let eta = std::f64::consts::TAU * j as f64 / n as f64;
                    let s = e.a * e.b0 + e.gamma0.eval(xi, eta);
                    let t = e.gamma1.eval(xi, eta);
                    let r = s * s + t * t;
                    if r <= floor {
                        return Err(Error::NonPositiveEnergy { xi, eta, value: r });
                    }
                }
            }
        }
        Ok(e)
    }

    /// Unmodulated field `C0 ≡ A` (constant).
    pub fn constant(a: f64) -> Self {
        EnergyDensity::new(a, 1.0, TrigPoly2D::zero(), TrigPoly2D::zero())
            .expect("constant field is positive")
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    pub fn gamma0(&self) -> &TrigPoly2D {
        &self.gamma0
    }

    pub fn gamma1(&self) -> &TrigPoly2D {
        &self.gamma1
    }

    /// Whether the ℓ¹ sufficient condition certified positivity (as opposed
    /// to the pointwise fallback scan).
    pub fn positivity_certified(&self) -> bool {
        self.positivity_certified
    }

    /// Largest `|m|,|n|` appearing in either modulation.
    pub fn degree(&self) -> i32 {
        self.gamma0.degree().max(self.gamma1.degree())
    }

    pub fn eval(&self, xi: f64, eta: f64) -> f64 {
        let s = self.a * self.b0 + self.gamma0.eval(xi, eta);
        let t = self.gamma1.eval(xi, eta);
        let r = s * s + t * t;
        debug_assert!(r > 0.0, "positivity invariant violated at ({xi}, {eta})");
        r.sqrt()
    }

    /// Chain-rule gradient `[(A·b0+γ0)∇γ0 + γ1∇γ1]/C0`.
    pub fn grad(&self, xi: f64, eta: f64) -> (f64, f64) {
        let s = self.a * self.b0 + self.gamma0.eval(xi, eta);
        let t = self.gamma1.eval(xi, eta);
        let c = (s * s + t * t).sqrt();
        let sx = self.g0_xi.eval(xi, eta);
        let se = self.g0_eta.eval(xi, eta);
        let tx = self.g1_xi.eval(xi, eta);
        let te = self.g1_eta.eval(xi, eta);
        ((s * sx + t * tx) / c, (s * se + t * te) / c)
    }

    pub fn grad_norm(&self, xi: f64, eta: f64) -> f64 {
        let (gx, ge) = self.grad(xi, eta);
        gx.hypot(ge)
    }

    /// Exact Hessian of `C0` by the chain rule on the trig-poly derivatives.
    pub fn hessian(&self, xi: f64, eta: f64) -> Mat2Sym {
        let s = self.a * self.b0 + self.gamma0.eval(xi, eta);
        let t = self.gamma1.eval(xi, eta);
        let c = (s * s + t * t).sqrt();
        let sx = self.g0_xi.eval(xi, eta);
        let se = self.g0_eta.eval(xi, eta);
        let tx = self.g1_xi.eval(xi, eta);
        let te = self.g1_eta.eval(xi, eta);
        let gx = (s * sx + t * tx) / c;
        let ge = (s * se + t * te) / c;
        let sxx = self.g0_xixi.eval(xi, eta);
        let sxe = self.g0_xieta.eval(xi, eta);
        let see = self.g0_etaeta.eval(xi, eta);
        let txx = self.g1_xixi.eval(xi, eta);
        let txe = self.g1_xieta.eval(xi, eta);
        let tee = self.g1_etaeta.eval(xi, eta);
        let a = (sx * sx + s * sxx + tx * tx + t * txx - gx * gx) / c;
        let b = (se * sx + s * sxe + te * tx + t * txe - gx * ge) / c;
        let cc = (se * se + s * see + te * te + t * tee - ge * ge) / c;
        Mat2Sym::new(a, b, cc)
    }

    /// `C0²` as an exact trigonometric polynomial, `(A·b0+γ0)² + γ1²`.
    pub fn c0_squared(&self) -> TrigPoly2D {
        let s = self.gamma0.add(&TrigPoly2D::constant(self.a * self.b0));
        s.mul(&s).add(&self.gamma1.mul(&self.gamma1))
    }

    /// Guaranteed upper bound for `max C0` from coefficient ℓ¹ norms.
    pub fn sup_bound(&self) -> f64 {
        let s = self.a * self.b0 + self.gamma0.sup_bound();
        s.hypot(self.gamma1.sup_bound())
    }

    /// Guaranteed lower bound for `min C0` (may be crude; positive when the
    /// construction certified positivity).
    pub fn inf_bound(&self) -> f64 {
        (self.a * self.b0 - self.gamma0.sup_bound() - self.gamma1.sup_bound()).max(0.0)
    }

    /// Serialise to the documented JSON form
    /// `{"A": …, "b0": …, "gamma0": [[m,n,re,im],…], "gamma1": […]}`.
    pub fn to_json(&self) -> Value {
        let terms = |p: &TrigPoly2D| -> Value {
            Value::Array(
                p.to_term_list()
                    .into_iter()
                    .map(|(m, n, re, im)| json!([m, n, re, im]))
                    .collect(),
            )
        };
        json!({
            "A": self.a,
            "b0": self.b0,
            "gamma0": terms(&self.gamma0),
            "gamma1": terms(&self.gamma1),
        })
    }

    /// Load from the documented JSON form. Non-Hermitian coefficient lists are
    /// symmetrised and reported in `warnings`, as is uncertified positivity.
    pub fn from_json(v: &Value) -> Result<(Self, Vec<String>)> {
        let a = v
            .get("A")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::InvalidInput("missing numeric field \"A\"".into()))?;
        let b0 = v.get("b0").and_then(Value::as_f64).unwrap_or(1.0);
        let mut warnings = Vec::new();
        let mut load = |key: &str| -> Result<TrigPoly2D> {
            let list = match v.get(key) {
                None | Some(Value::Null) => Vec::new(),
                Some(Value::Array(rows)) => {
                    let mut out = Vec::with_capacity(rows.len());
                    for row in rows {
                        let row = row.as_array().ok_or_else(|| {
                            Error::InvalidInput(format!("{key}: term rows must be arrays"))
                        })?;
                        if row.len() != 4 {
                            return Err(Error::InvalidInput(format!(
                                "{key}: term rows are [m, n, re, im]"
                            )));
                        }
                        let m = row[0].as_f64().unwrap_or(f64::NAN);
                        let n = row[1].as_f64().unwrap_or(f64::NAN);
                        if m.fract() != 0.0 || n.fract() != 0.0 || !m.is_finite() || !n.is_finite()
                        {
                            return Err(Error::InvalidInput(format!(
                                "{key}: wavevector entries must be integers"
                            )));
                        }
                        out.push((
                            m as i32,
                            n as i32,
                            row[2].as_f64().unwrap_or(0.0),
                            row[3].as_f64().unwrap_or(0.0),
                        ));
                    }
                    out
                }
                Some(_) => {
                    return Err(Error::InvalidInput(format!("{key}: expected an array")))
                }
            };
            let (p, asym) = TrigPoly2D::from_term_list(&list);
            if asym > 1e-12 {
                warnings.push(format!(
                    "{key}: coefficients were not Hermitian (asymmetry {asym:.3e}); symmetrised"
                ));
            }
            Ok(p)
        };
        let gamma0 = load("gamma0")?;
        let gamma1 = load("gamma1")?;
        let e = EnergyDensity::new(a, b0, gamma0, gamma1)?;
        if !e.positivity_certified() {
            warnings.push(
                "positivity not certified by the ℓ¹ bound; pointwise scan passed".to_string(),
            );
        }
        Ok((e, warnings))
    }
}
