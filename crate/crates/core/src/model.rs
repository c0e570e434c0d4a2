//! Parameters, rescaling, growth and response functions, and the delayed
//! vector field.
//!
//! The growth rate is stored in the substituted form
//! `f(T) = r (b - T^β)` with `b = 1 - β b̂`, i.e. `r` here is the Richards
//! rate already divided by `β`. The time-dependent version reads
//! `f(t, T) = r (1 - β b(t) - T^β)` and reduces to the autonomous one for
//! `b(t) ≡ b̂`. The carrying capacity is normalized to 1.

use alloc::vec::Vec;

use crate::math::{cos, floor, pow, pow_nonneg, TAU};
use crate::{Error, Result};

/// Raw biological rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub r: f64,
    pub beta: f64,
    pub b_hat: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub eta: f64,
    pub p: f64,
    pub m: f64,
    pub g: f64,
    pub a: f64,
    pub tau1: f64,
    pub tau2: f64,
}

/// Rescaled parameter set used by the equilibrium analysis.
///
/// `sigma_s = σγ/(ηr)`, `m_s = m/(ηg)`, `p_s = p/(ηg)`, `a_s = a/g` and
/// `mu = m_s - p_s`. The remaining fields are carried over unchanged so the
/// scaling can be inverted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledParams {
    pub sigma_s: f64,
    pub m_s: f64,
    pub p_s: f64,
    pub a_s: f64,
    pub mu: f64,
    pub r: f64,
    pub beta: f64,
    pub b: f64,
    pub gamma: f64,
    pub eta: f64,
    pub g: f64,
}

impl ScaledParams {
    /// Recover `(σ, m, p, a)` in raw units.
    pub fn unscale(&self) -> (f64, f64, f64, f64) {
        (
            self.sigma_s * self.eta * self.r / self.gamma,
            self.m_s * self.eta * self.g,
            self.p_s * self.eta * self.g,
            self.a_s * self.g,
        )
    }
}

/// Tumor and effector concentrations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub tumor: f64,
    pub effector: f64,
}

impl State {
    pub const fn new(tumor: f64, effector: f64) -> Self {
        State { tumor, effector }
    }

    pub fn is_finite(&self) -> bool {
        self.tumor.is_finite() && self.effector.is_finite()
    }

    pub fn axpy(&self, a: f64, other: &State) -> State {
        State::new(
            self.tumor + a * other.tumor,
            self.effector + a * other.effector,
        )
    }

    pub fn sub(&self, other: &State) -> State {
        State::new(self.tumor - other.tumor, self.effector - other.effector)
    }

    /// Sup-norm.
    pub fn norm_inf(&self) -> f64 {
        self.tumor.abs().max(self.effector.abs())
    }

    pub fn to_array(self) -> [f64; 2] {
        [self.tumor, self.effector]
    }

    pub fn from_array(v: [f64; 2]) -> Self {
        State::new(v[0], v[1])
    }
}

/// Periodic part of the chemotherapy level.
#[derive(Debug, Clone, PartialEq)]
pub enum Modulation {
    None,
    /// `eps · cos(2πt/period)`.
    Cosine {
        eps: f64,
        period: f64,
    },
    /// Uniform samples over one period, linearly interpolated with wrap-around.
    Tabulated {
        period: f64,
        values: Vec<f64>,
    },
}

/// Chemotherapy level `b(t) = b0 + φ(t)` with `φ` periodic.
#[derive(Debug, Clone, PartialEq)]
pub struct ChemoForcing {
    b0: f64,
    modulation: Modulation,
}

impl ChemoForcing {
    pub fn constant(b0: f64) -> Self {
        ChemoForcing {
            b0,
            modulation: Modulation::None,
        }
    }

    pub fn cosine(b0: f64, eps: f64, period: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "q",
                value: period,
                reason: "forcing period must be positive",
            });
        }
        if !eps.is_finite() {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: eps,
                reason: "forcing amplitude must be finite",
            });
        }
        let modulation = if eps == 0.0 {
            Modulation::None
        } else {
            Modulation::Cosine { eps, period }
        };
        Ok(ChemoForcing { b0, modulation })
    }

    pub fn tabulated(b0: f64, period: f64, values: Vec<f64>) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "q",
                value: period,
                reason: "forcing period must be positive",
            });
        }
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("tabulated forcing needs finite samples"));
        }
        Ok(ChemoForcing {
            b0,
            modulation: Modulation::Tabulated { period, values },
        })
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    pub fn modulation(&self) -> &Modulation {
        &self.modulation
    }

    pub fn period(&self) -> Option<f64> {
        match &self.modulation {
            Modulation::None => None,
            Modulation::Cosine { period, .. } | Modulation::Tabulated { period, .. } => {
                Some(*period)
            }
        }
    }

    /// `φ(t)`.
    pub fn phi(&self, t: f64) -> f64 {
        match &self.modulation {
            Modulation::None => 0.0,
            Modulation::Cosine { eps, period } => eps * cos(TAU * t / period),
            Modulation::Tabulated { period, values } => {
                let n = values.len();
                let u = t / period;
                let x = (u - floor(u)) * n as f64;
                let i = (floor(x) as usize).min(n - 1);
                let w = x - i as f64;
                let j = (i + 1) % n;
                (1.0 - w) * values[i] + w * values[j]
            }
        }
    }

    /// `b(t) = b0 + φ(t)`.
    pub fn level(&self, t: f64) -> f64 {
        match self.modulation {
            Modulation::None => self.b0,
            _ => self.b0 + self.phi(t),
        }
    }

    /// `sup |φ|`.
    pub fn sup_phi(&self) -> f64 {
        match &self.modulation {
            Modulation::None => 0.0,
            Modulation::Cosine { eps, .. } => eps.abs(),
            Modulation::Tabulated { values, .. } => {
                values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
            }
        }
    }

    /// `min_t b(t)`.
    pub fn min_level(&self) -> f64 {
        match &self.modulation {
            Modulation::None => self.b0,
            Modulation::Cosine { eps, .. } => self.b0 - eps.abs(),
            Modulation::Tabulated { values, .. } => {
                self.b0 + values.iter().cloned().fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// `b = 1 - β b̂`, required to be positive.
pub fn effective_b(beta: f64, b_hat: f64) -> Result<f64> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "shape exponent must lie in (0, 1]",
        });
    }
    let b = 1.0 - beta * b_hat;
    if !(b > 0.0) {
        return Err(Error::InvalidParameter {
            name: "b_hat",
            value: b_hat,
            reason: "baseline chemotherapy must satisfy b_hat < 1/beta",
        });
    }
    Ok(b)
}

/// `f(T) = r (b - T^β)`.
pub fn growth_f(t: f64, r: f64, beta: f64, b: f64) -> f64 {
    r * (b - pow_nonneg(t, beta))
}

/// `f'(T) = -r β T^(β-1)`; unbounded at `T = 0` when `β < 1`.
pub fn growth_f_prime(t: f64, r: f64, beta: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Domain("growth derivative needs T >= 0"));
    }
    if t == 0.0 && beta < 1.0 {
        return Err(Error::Domain("f'(0) is unbounded for beta < 1"));
    }
    Ok(-r * beta * pow(t, beta - 1.0))
}

/// `T f'(T) = -r β T^β`, finite everywhere on `T >= 0`.
pub fn growth_t_f_prime(t: f64, r: f64, beta: f64) -> f64 {
    -r * beta * pow_nonneg(t, beta)
}

/// Holling functional response `h(s) = s / (g + a s)`.
pub fn holling_h(s: f64, g: f64, a: f64) -> f64 {
    s / (g + a * s)
}

/// `h'(s) = g / (g + a s)²`.
pub fn holling_h_prime(s: f64, g: f64, a: f64) -> f64 {
    let d = g + a * s;
    g / (d * d)
}

fn check(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason,
        })
    }
}

impl ModelParams {
    /// Validate every field and precompute the derived constants.
    pub fn validated(self) -> Result<Model> {
        let p = &self;
        check("r", p.r, p.r > 0.0, "must be positive")?;
        check("gamma", p.gamma, p.gamma > 0.0, "must be positive")?;
        check("sigma", p.sigma, p.sigma > 0.0, "must be positive")?;
        check("eta", p.eta, p.eta > 0.0, "must be positive")?;
        check("p", p.p, p.p > 0.0, "must be positive")?;
        check("m", p.m, p.m > 0.0, "must be positive")?;
        check("g", p.g, p.g > 0.0, "must be positive")?;
        check("a", p.a, p.a >= 0.0, "must be nonnegative")?;
        check("tau1", p.tau1, p.tau1 >= 0.0, "must be nonnegative")?;
        check("tau2", p.tau2, p.tau2 >= 0.0, "must be nonnegative")?;
        check("b_hat", p.b_hat, p.b_hat >= 0.0, "must be nonnegative")?;
        let b = effective_b(p.beta, p.b_hat)?;
        Ok(Model {
            params: self,
            b,
            e_free: self.sigma / self.eta,
            scaled: self.scale_with(b),
        })
    }

    fn scale_with(&self, b: f64) -> ScaledParams {
        let m_s = self.m / (self.eta * self.g);
        let p_s = self.p / (self.eta * self.g);
        ScaledParams {
            sigma_s: self.sigma * self.gamma / (self.eta * self.r),
            m_s,
            p_s,
            a_s: self.a / self.g,
            mu: m_s - p_s,
            r: self.r,
            beta: self.beta,
            b,
            gamma: self.gamma,
            eta: self.eta,
            g: self.g,
        }
    }
}

/// Validated model: immutable after construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    params: ModelParams,
    b: f64,
    e_free: f64,
    scaled: ScaledParams,
}

impl Model {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn scaled(&self) -> &ScaledParams {
        &self.scaled
    }

    /// `b = 1 - β b̂`.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Effector level `σ/η` of the tumor-free equilibrium.
    pub fn effector_free(&self) -> f64 {
        self.e_free
    }

    pub fn tau_max(&self) -> f64 {
        self.params.tau1.max(self.params.tau2)
    }

    /// Same model with different delays.
    pub fn with_delays(&self, tau1: f64, tau2: f64) -> Result<Model> {
        ModelParams {
            tau1,
            tau2,
            ..self.params
        }
        .validated()
    }

    /// Autonomous growth `f(T) = r (b - T^β)`.
    pub fn f(&self, t: f64) -> f64 {
        growth_f(t, self.params.r, self.params.beta, self.b)
    }

    /// `T f'(T)`.
    pub fn t_f_prime(&self, t: f64) -> f64 {
        growth_t_f_prime(t, self.params.r, self.params.beta)
    }

    pub fn h(&self, s: f64) -> f64 {
        holling_h(s, self.params.g, self.params.a)
    }

    pub fn h_prime(&self, s: f64) -> f64 {
        holling_h_prime(s, self.params.g, self.params.a)
    }

    /// Time-dependent relative growth `f(t, T) = r (1 - β b(t) - T^β)`.
    pub fn f_forced(&self, time: f64, t: f64, forcing: &ChemoForcing) -> f64 {
        let pr = &self.params;
        pr.r * (1.0 - pr.beta * forcing.level(time) - pow_nonneg(t, pr.beta))
    }

    /// Delayed vector field `F(t, X, X(t-τ1), X(t-τ2))`.
    pub fn rhs(
        &self,
        time: f64,
        x: State,
        x_tau1: State,
        x_tau2: State,
        forcing: &ChemoForcing,
    ) -> State {
        let pr = &self.params;
        let d_tumor = x.tumor * (self.f_forced(time, x.tumor, forcing) - pr.gamma * x.effector);
        let response = pr.p * self.h(x_tau1.tumor) - pr.m * self.h(x_tau2.tumor);
        // σ - ηE written as σ(1 - E/E₀), E₀ = σ/η: exact at E = 0 and at E = E₀.
        let relaxation = pr.sigma * (1.0 - x.effector / self.e_free);
        let d_effector = relaxation + x.effector * response;
        State::new(d_tumor, d_effector)
    }

    /// Autonomous forcing `b(t) ≡ b̂` matching this model.
    pub fn constant_forcing(&self) -> ChemoForcing {
        ChemoForcing::constant(self.params.b_hat)
    }
}
