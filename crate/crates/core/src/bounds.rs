//! Closed-form error bounds, residual polynomials, dimension and measurement
//! scalings, and gate-count formulas.
//!
//! Energies are in normalized units (spectrum inside `[-1, 1]`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chebyshev::chebyshev_t;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundParams {
    /// Krylov dimension `D`.
    pub d: usize,
    /// Total noise rate `√(η_H² + η_S²)`.
    pub eta: f64,
    pub eta_s: f64,
    pub eta_h: f64,
    pub gamma0: f64,
    /// Overlap with the eigenspaces within `delta` of the ground energy.
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub eps_total: f64,
    pub alpha: f64,
    pub mu_const: f64,
    pub rho: f64,
    pub gap: f64,
    /// `‖S‖`; `1` if absent.
    pub s_norm: Option<f64>,
    /// Target energy error for the dimension and measurement scalings.
    pub target_error: Option<f64>,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams {
            d: 1,
            eta: 0.0,
            eta_s: 0.0,
            eta_h: 0.0,
            gamma0: 1.0,
            gamma: 1.0,
            delta: 0.1,
            epsilon: 1e-13,
            eps_total: 0.0,
            alpha: 0.5,
            mu_const: 1.0,
            rho: 1.0,
            gap: 0.1,
            s_norm: None,
            target_error: None,
        }
    }
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("eta", self.eta),
            ("eta_s", self.eta_s),
            ("eta_h", self.eta_h),
            ("gamma0", self.gamma0),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("epsilon", self.epsilon),
            ("eps_total", self.eps_total),
            ("alpha", self.alpha),
            ("mu_const", self.mu_const),
            ("rho", self.rho),
            ("gap", self.gap),
        ];
        for (name, v) in named {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        if self.d == 0 {
            return Err(Error::Domain("d must be at least 1".into()));
        }
        if !(self.gamma0 <= self.gamma && self.gamma <= 1.0) {
            return Err(Error::Domain(format!(
                "need gamma0 <= gamma <= 1, got gamma0 = {}, gamma = {}",
                self.gamma0, self.gamma
            )));
        }
        if self.alpha > 0.5 {
            return Err(Error::Domain(format!("alpha must lie in [0, 0.5], got {}", self.alpha)));
        }
        Ok(())
    }
}

/// `δ + 8(√δ·ε_tot + (1 − γ² + 4ε_tot)(1 + δ/2)^{−2⌊k/2⌋}) / (γ₀ − 2√((k+1)ε))²`
///
/// Bounds the noiseless thresholded error `E₀′ − E₀` for a Krylov space of
/// polynomial degree `k = D − 1`.
pub fn theorem2_bound(p: &BoundParams, k: usize) -> Result<f64> {
    let offset = 2.0 * ((k as f64 + 1.0) * p.epsilon).sqrt();
    let denom = p.gamma0 - offset;
    if !(denom > 0.0) {
        return Err(Error::DenominatorInvalid {
            gamma0: p.gamma0,
            offset,
        });
    }
    let decay = (1.0 + p.delta / 2.0).powf(-2.0 * (k / 2) as f64);
    let numer = p.delta.sqrt() * p.eps_total + (1.0 - p.gamma * p.gamma + 4.0 * p.eps_total) * decay;
    Ok(p.delta + 8.0 * numer / (denom * denom))
}

/// `χ = 3(2+μ)(1+1/ρ)(‖S‖/ε)^α·η_S + η_H`
pub fn lemma2_chi(p: &BoundParams, s_norm: f64) -> Result<f64> {
    if !(p.epsilon > 0.0) || !(p.rho > 0.0) {
        return Err(Error::Domain("epsilon and rho must be positive".into()));
    }
    let ratio = (s_norm / p.epsilon).powf(p.alpha);
    Ok(3.0 * (2.0 + p.mu_const) * (1.0 + 1.0 / p.rho) * ratio * p.eta_s + p.eta_h)
}

/// `π D⁴ χ`
pub fn noise_bound(p: &BoundParams, chi: f64) -> f64 {
    PI * (p.d as f64).powi(4) * chi
}

/// Minimax residual polynomial of degree `d` on `[a, b]`:
/// `p*(x) = T_d((b+a−2x)/(b−a)) / T_d((b+a)/(b−a))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualPoly {
    pub a: f64,
    pub b: f64,
    pub d: usize,
    /// `1 / T_d((b+a)/(b−a))`, the maximum of `|p*|` on `[a, b]`.
    pub beta: f64,
}

pub fn residual_poly(a: f64, b: f64, d: usize) -> Result<ResidualPoly> {
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(Error::Domain(format!("need 0 < a < b, got a = {a}, b = {b}")));
    }
    if d == 0 {
        return Err(Error::Domain("residual polynomial degree must be at least 1".into()));
    }
    let y0 = (b + a) / (b - a);
    Ok(ResidualPoly {
        a,
        b,
        d,
        beta: 1.0 / chebyshev_t(d, y0),
    })
}

impl ResidualPoly {
    fn y0(&self) -> f64 {
        (self.b + self.a) / (self.b - self.a)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let y = (self.b + self.a - 2.0 * x) / (self.b - self.a);
        let num = chebyshev_t(self.d, y);
        let den = chebyshev_t(self.d, self.y0());
        if num.is_finite() && den.is_finite() {
            return num / den;
        }
        // Large degree: compare in the exponent, cosh(dA)/cosh(dB) ≈ e^{d(A−B)}.
        if y.abs() <= 1.0 {
            return num / den;
        }
        let d = self.d as f64;
        let mag = (d * (y.abs().acosh() - self.y0().acosh())).exp();
        if y < 0.0 && self.d % 2 == 1 {
            -mag
        } else {
            mag
        }
    }

    /// `2(1 + √(a/b))^{−d}`
    pub fn beta_bound(&self) -> f64 {
        2.0 * (1.0 + (self.a / self.b).sqrt()).powf(-(self.d as f64))
    }
}

/// `g(δ, k) = 2√δ + 8(1 − (2/π)√δ)(1 + δ/2)^{−2⌊k/2⌋}` for `0 < δ < ¼`.
pub fn g_bound(delta: f64, k: usize) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::Domain(format!("g(delta, k) needs 0 < delta < 1/4, got {delta}")));
    }
    let s = delta.sqrt();
    Ok(2.0 * s + 8.0 * (1.0 - 2.0 / PI * s) * (1.0 + delta / 2.0).powf(-2.0 * (k / 2) as f64))
}

fn check_unit_interval(args: &[(&str, f64)]) -> Result<()> {
    for &(name, v) in args {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::Domain(format!("{name} must lie in (0, 1], got {v}")));
        }
    }
    Ok(())
}

/// Advisory Krylov dimension `⌈(ln 1/γ₀ + ln 1/ℰ)·min(1/ℰ, 1/Δ)⌉` with unit
/// constant; an order-of-magnitude estimate only.
pub fn required_dimension(gamma0: f64, err: f64, gap: f64) -> Result<u64> {
    check_unit_interval(&[("gamma0", gamma0), ("error", err), ("gap", gap)])?;
    let value = ((1.0 / gamma0).ln() + (1.0 / err).ln()) * (1.0 / err).min(1.0 / gap);
    // Absorb rounding so exact integers are not pushed up by one ulp.
    let tol = 1e-12 * value.abs().max(1.0);
    Ok(((value - tol).ceil() as u64).max(1))
}

/// Advisory total measurement count `(1/ℰ² + 1/(ℰγ₀⁴))·min(1/ℰ, 1/Δ)`.
pub fn measurement_budget(gamma0: f64, err: f64, gap: f64) -> Result<f64> {
    check_unit_interval(&[("gamma0", gamma0), ("error", err), ("gap", gap)])?;
    Ok((1.0 / (err * err) + 1.0 / (err * gamma0.powi(4))) * (1.0 / err).min(1.0 / gap))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    BinaryIndex,
    Symplectic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorCost {
    /// Two-qubit gates (symplectic) or `⌈log₂T⌉`-controlled Paulis and
    /// rotations (binary index).
    pub multi_qubit: u64,
    pub single_qubit: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub scheme: Scheme,
    pub n: u64,
    pub t: u64,
    pub u: OperatorCost,
    pub g: OperatorCost,
    pub r: OperatorCost,
    pub aux_qubits: u64,
    /// Extra qubits used while implementing `R` (symplectic only).
    pub extra_aux_qubits: u64,
}

impl CostReport {
    /// Longest coherent sequence for Krylov dimension `d`:
    /// `(d−1)·nT + 4dT` (binary index only).
    pub fn depth(&self, d: u64) -> Option<u64> {
        match self.scheme {
            Scheme::BinaryIndex if d >= 1 => Some((d - 1) * self.n * self.t + 4 * d * self.t),
            _ => None,
        }
    }
}

fn ceil_log2(t: u64) -> u64 {
    if t <= 1 {
        0
    } else {
        64 - (t - 1).leading_zeros() as u64
    }
}

pub fn gate_costs(n: u64, t: u64, scheme: Scheme) -> Result<CostReport> {
    if n == 0 || t == 0 {
        return Err(Error::Domain("n and t must be at least 1".into()));
    }
    let cost = |multi_qubit, single_qubit| OperatorCost {
        multi_qubit,
        single_qubit,
    };
    match scheme {
        Scheme::BinaryIndex => Ok(CostReport {
            scheme,
            n,
            t,
            u: cost(n * t, 0),
            g: cost(2 * t, 0),
            r: cost(4 * t, 0),
            aux_qubits: ceil_log2(t),
            extra_aux_qubits: 0,
        }),
        Scheme::Symplectic => {
            if n < 3 {
                return Err(Error::Domain(format!("symplectic costs need n >= 3, got {n}")));
            }
            Ok(CostReport {
                scheme,
                n,
                t,
                u: cost(3 * n + t, 0),
                g: cost(4 * n * n - 10 * n, 2),
                r: cost(8 * n * n + 14, 4),
                aux_qubits: 2 * n,
                extra_aux_qubits: 6,
            })
        }
    }
}

/// Everything computable from one parameter set; entries whose
/// preconditions fail are `None` with the reason in `notes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub k: usize,
    pub theorem2: Option<f64>,
    pub chi: Option<f64>,
    pub noise_bound: Option<f64>,
    pub g_bound: Option<f64>,
    pub residual_beta: Option<f64>,
    pub residual_beta_bound: Option<f64>,
    pub required_dimension: Option<u64>,
    pub measurement_budget: Option<f64>,
    pub notes: Vec<String>,
}

pub fn bound_report(p: &BoundParams) -> Result<BoundReport> {
    p.validate()?;
    let k = p.d - 1;
    let mut notes = Vec::new();
    let mut keep = |name: &str, r: Result<f64>| match r {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(format!("{name}: {e}"));
            None
        }
    };
    let theorem2 = keep("theorem2", theorem2_bound(p, k));
    let chi = keep("chi", lemma2_chi(p, p.s_norm.unwrap_or(1.0)));
    let noise = chi.map(|c| noise_bound(p, c));
    let g = keep("g_bound", g_bound(p.delta, k));
    let poly = if k / 2 >= 1 {
        residual_poly(p.delta * p.delta / 4.0, 1.0, k / 2).map_err(|e| notes.push(format!("residual: {e}"))).ok()
    } else {
        notes.push("residual: degree floor(k/2) is zero".into());
        None
    };
    let (required_dimension, measurement_budget) = match p.target_error {
        Some(err) => match (
            required_dimension(p.gamma0, err, p.gap),
            measurement_budget(p.gamma0, err, p.gap),
        ) {
            (Ok(d), Ok(m)) => (Some(d), Some(m)),
            (Err(e), _) | (_, Err(e)) => {
                notes.push(format!("scalings: {e}"));
                (None, None)
            }
        },
        None => (None, None),
    };
    Ok(BoundReport {
        k,
        theorem2,
        chi,
        noise_bound: noise,
        g_bound: g,
        residual_beta: poly.map(|r| r.beta),
        residual_beta_bound: poly.map(|r| r.beta_bound()),
        required_dimension,
        measurement_budget,
        notes,
    })
}
