//! Equilibria of the autonomous system.
//!
//! Nontrivial equilibria `(T, E)` satisfy `E = f(T)/γ` and
//! `S(T, μ, a) = b - σ` in rescaled parameters. For `a = 0` the left-hand
//! side is `h_μ(T) = μ (T^β - b) T + T^β`, whose shape on `[0, b^{1/β}]` is
//! governed by the constants `μ_c < μ_bif`:
//!
//! - `μ ≤ μ_c`: `h_μ` is increasing wherever it matters, one root for `0 ≤ h0 ≤ b`;
//! - `μ > μ_c`: `h'_μ` has two zeros `T_L < T_⋆ < T_R` with values `H_L > H_R`,
//!   and up to three roots appear;
//! - `μ = μ_bif`: `H_R = 0` at `T_R = T_bif` (fold of `h_μ(T) = 0`).
//!
//! [`solve_triangle`] does not rely on the case table: it splits the interval
//! at the computed critical points and brackets every monotone piece.

use alloc::string::String;
use alloc::vec::Vec;

use crate::math::{pow, pow_nonneg, sqrt};
use crate::model::Model;
use crate::roots::newton_bisect;
use crate::{Error, Result, State};

/// Relative tolerance on located roots.
const ROOT_RTOL: f64 = 1e-13;
/// Roots closer than this fraction of `b^{1/β}` are merged and flagged degenerate.
const MERGE_FRACTION: f64 = 1e-8;
/// Relative tolerance for "touching" a critical value or an interval endpoint.
const TOUCH_RTOL: f64 = 1e-13;
/// Simple-root certificate for the continuation in `a`.
const SIMPLE_SLOPE: f64 = 1e-8;

/// Default upper bound on the rescaled handling parameter `a/g` for continuation.
pub const DEFAULT_A_THRESHOLD: f64 = 1e-2;

/// The scalar problem `h_μ(T) = h0` on `[0, b^{1/β}]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HContext {
    pub mu: f64,
    pub b: f64,
    pub beta: f64,
    pub h0: f64,
}

/// `h_μ` and its first three derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HDerivatives {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl HContext {
    pub fn new(mu: f64, b: f64, beta: f64, h0: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "b",
                value: b,
                reason: "must be positive",
            });
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: beta,
                reason: "must lie in (0, 1]",
            });
        }
        if !mu.is_finite() || !h0.is_finite() {
            return Err(Error::Domain("mu and h0 must be finite"));
        }
        Ok(HContext { mu, b, beta, h0 })
    }

    /// Context for the interior equilibria of a model at `a = 0`.
    pub fn for_model(model: &Model) -> Self {
        let s = model.scaled();
        HContext {
            mu: s.mu,
            b: s.b,
            beta: s.beta,
            h0: s.b - s.sigma_s,
        }
    }

    /// Right end `b^{1/β}` of the admissible interval.
    pub fn t_max(&self) -> f64 {
        pow(self.b, 1.0 / self.beta)
    }

    /// `h_μ(T)`, with `h_μ(0) = 0`.
    pub fn value(&self, t: f64) -> f64 {
        let tb = pow_nonneg(t, self.beta);
        self.mu * (tb - self.b) * t + tb
    }

    /// `h'_μ(T) = T^{β-1}(β + μ(1+β)T) - μb`; `+∞` at `T = 0` when `β < 1`.
    fn slope(&self, t: f64) -> f64 {
        let beta = self.beta;
        if beta == 1.0 {
            return 1.0 + 2.0 * self.mu * t - self.mu * self.b;
        }
        if t <= 0.0 {
            return f64::INFINITY;
        }
        pow(t, beta - 1.0) * (beta + self.mu * (1.0 + beta) * t) - self.mu * self.b
    }

    /// `h''_μ(T) = βT^{β-2}(β - 1 + μ(1+β)T)`.
    fn curvature(&self, t: f64) -> f64 {
        let beta = self.beta;
        if beta == 1.0 {
            return 2.0 * self.mu;
        }
        if t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        beta * pow(t, beta - 2.0) * (beta - 1.0 + self.mu * (1.0 + beta) * t)
    }

    /// Value and derivatives; the derivatives are unbounded at `T = 0` for `β < 1`.
    pub fn derivatives(&self, t: f64) -> Result<HDerivatives> {
        if t < 0.0 {
            return Err(Error::Domain("h_mu is defined for T >= 0"));
        }
        if t == 0.0 && self.beta < 1.0 {
            return Err(Error::Domain("derivatives of h_mu are unbounded at T = 0"));
        }
        let beta = self.beta;
        let d3 = if beta == 1.0 {
            0.0
        } else {
            beta * (beta - 1.0) * pow(t, beta - 3.0) * (beta - 2.0 + self.mu * (1.0 + beta) * t)
        };
        Ok(HDerivatives {
            value: self.value(t),
            d1: self.slope(t),
            d2: self.curvature(t),
            d3,
        })
    }

    /// `h'_μ(b^{1/β}) = βb(b^{-1/β} + μ)`.
    pub fn slope_at_t_max(&self) -> f64 {
        self.beta * self.b * (1.0 / self.t_max() + self.mu)
    }

    /// Zeros of `h'_μ` inside `(0, b^{1/β})`, ascending.
    pub fn critical_points(&self) -> Vec<f64> {
        let t_max = self.t_max();
        // h'' changes sign only at the inflection point T_⋆ (μ > 0, β < 1).
        let mut knots = alloc::vec![0.0];
        if self.mu > 0.0 && self.beta < 1.0 {
            let t_star = (1.0 - self.beta) / (self.mu * (1.0 + self.beta));
            if t_star < t_max {
                knots.push(t_star);
            }
        }
        knots.push(t_max);
        let mut out = Vec::new();
        for w in knots.windows(2) {
            let (l, u) = (w[0], w[1]);
            let (sl, su) = (self.slope(l), self.slope(u));
            if sl == 0.0 && l > 0.0 {
                out.push(l);
                continue;
            }
            if sl.signum() != su.signum() && su != 0.0 {
                if let Ok(t) =
                    newton_bisect(|t| (self.slope(t), self.curvature(t)), l, u, ROOT_RTOL)
                {
                    if t > 0.0 && t < t_max {
                        out.push(t);
                    }
                }
            }
        }
        out.dedup();
        out
    }
}

/// `μ_c = ((1/b)((1-β)/(1+β))^{β-1})^{1/β}`.
pub fn mu_critical(b: f64, beta: f64) -> f64 {
    pow(pow((1.0 - beta) / (1.0 + beta), beta - 1.0) / b, 1.0 / beta)
}

/// `μ_bif = 1 / (β [b (1-β)^{1-β}]^{1/β})`.
pub fn mu_bifurcation(b: f64, beta: f64) -> f64 {
    1.0 / (beta * pow(b * pow(1.0 - beta, 1.0 - beta), 1.0 / beta))
}

/// `T_bif = [(1-β) b]^{1/β}`.
pub fn t_bifurcation(b: f64, beta: f64) -> f64 {
    pow((1.0 - beta) * b, 1.0 / beta)
}

/// `l(μ) = min_{T>0} h'_μ(T) = μ b ((μ_c/μ)^β - 1)` for `μ > 0`.
pub fn min_slope(b: f64, beta: f64, mu: f64) -> f64 {
    mu * b * (pow(mu_critical(b, beta) / mu, beta) - 1.0)
}

/// Critical points of `h'_μ` for `μ > μ_c` and their critical values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldPoints {
    pub t_l: f64,
    pub t_r: f64,
    pub h_l: f64,
    pub h_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalConstants {
    pub b: f64,
    pub beta: f64,
    pub mu: f64,
    pub mu_c: f64,
    pub mu_bif: f64,
    pub t_bif: f64,
    /// Inflection point of `h_μ`, defined for `μ > 0`.
    pub t_star: Option<f64>,
    /// Defined for `μ > μ_c`.
    pub folds: Option<FoldPoints>,
}

impl CriticalConstants {
    fn folds(&self) -> Result<&FoldPoints> {
        self.folds
            .as_ref()
            .ok_or(Error::NotDefined("T_L, T_R exist only for mu > mu_c"))
    }

    pub fn t_l(&self) -> Result<f64> {
        Ok(self.folds()?.t_l)
    }

    pub fn t_r(&self) -> Result<f64> {
        Ok(self.folds()?.t_r)
    }

    pub fn h_l(&self) -> Result<f64> {
        Ok(self.folds()?.h_l)
    }

    pub fn h_r(&self) -> Result<f64> {
        Ok(self.folds()?.h_r)
    }
}

pub fn critical_constants(b: f64, beta: f64, mu: f64) -> Result<CriticalConstants> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "b",
            value: b,
            reason: "critical constants need b in (0, 1]",
        });
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "critical constants need beta in (0, 1)",
        });
    }
    let mu_c = mu_critical(b, beta);
    let t_star = (mu > 0.0).then(|| (1.0 - beta) / (mu * (1.0 + beta)));
    let folds = if mu > mu_c {
        let ctx = HContext::new(mu, b, beta, 0.0)?;
        let ts = t_star.expect("mu > mu_c > 0");
        let t_max = ctx.t_max();
        let slope = |t: f64| (ctx.slope(t), ctx.curvature(t));
        let t_l = newton_bisect(slope, 0.0, ts, ROOT_RTOL)?;
        let t_r = newton_bisect(slope, ts, t_max, ROOT_RTOL)?;
        Some(FoldPoints {
            t_l,
            t_r,
            h_l: ctx.value(t_l),
            h_r: ctx.value(t_r),
        })
    } else {
        None
    };
    Ok(CriticalConstants {
        b,
        beta,
        mu,
        mu_c,
        mu_bif: mu_bifurcation(b, beta),
        t_bif: t_bifurcation(b, beta),
        t_star,
        folds,
    })
}

/// A root of `h_μ(T) = h0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleRoot {
    pub t: f64,
    /// Sign of `h'_μ` at the root: `+1`, `-1`, or `0` for a tangency.
    pub slope_sign: i8,
    /// Two roots merged at a tangency (`h0` equal to a critical value).
    pub degenerate: bool,
}

/// All roots of `h_μ(T) = h0` on `[0, b^{1/β}]`, ascending.
pub fn solve_triangle(ctx: &HContext) -> Vec<TriangleRoot> {
    let t_max = ctx.t_max();
    let crit = ctx.critical_points();
    let touch = TOUCH_RTOL * ctx.h0.abs().max(1.0);
    let g = |t: f64| ctx.value(t) - ctx.h0;

    let mut knots = alloc::vec![0.0];
    knots.extend_from_slice(&crit);
    knots.push(t_max);

    let mut raw: Vec<TriangleRoot> = Vec::new();
    for (i, &k) in knots.iter().enumerate() {
        if g(k).abs() <= touch {
            let interior = i != 0 && i != knots.len() - 1;
            raw.push(TriangleRoot {
                t: k,
                slope_sign: if interior { 0 } else { sign_of(ctx.slope(k)) },
                degenerate: interior,
            });
        }
    }
    for w in knots.windows(2) {
        let (l, u) = (w[0], w[1]);
        let (gl, gu) = (g(l), g(u));
        if gl.abs() <= touch || gu.abs() <= touch || gl.signum() == gu.signum() {
            continue;
        }
        if let Ok(t) = newton_bisect(|t| (g(t), ctx.slope(t)), l, u, ROOT_RTOL) {
            raw.push(TriangleRoot {
                t,
                slope_sign: sign_of(ctx.slope(t)),
                degenerate: false,
            });
        }
    }
    raw.sort_by(|a, b| a.t.total_cmp(&b.t));

    let merge = MERGE_FRACTION * t_max;
    let mut out: Vec<TriangleRoot> = Vec::with_capacity(raw.len());
    for r in raw {
        match out.last_mut() {
            Some(last) if r.t - last.t < merge => {
                last.t = 0.5 * (last.t + r.t);
                last.slope_sign = 0;
                last.degenerate = true;
            }
            _ => out.push(r),
        }
    }
    out
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Case of the root-count classification for `h_μ(T) = h0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootCase {
    /// `μ < 0`, `h0 < 0`.
    NegativeMuBelow,
    /// `μ < 0`, `0 ≤ h0 ≤ b`.
    NegativeMuInside,
    /// `μ < 0`, `h0 > b`.
    NegativeMuAbove,
    /// `0 ≤ μ ≤ μ_c`, `h0 < 0`.
    MonotoneBelow,
    /// `0 ≤ μ ≤ μ_c`, `0 ≤ h0 ≤ b`.
    MonotoneInside,
    /// `μ ≥ 0` and `h0 > b`: any root lies beyond `b^{1/β}`.
    Above,
    /// `μ_c < μ ≤ μ_bif`, sub-case `I`..`IV`; `h0 < 0` is reported as `Below`.
    PreFold(FoldCase),
    /// `μ > μ_bif`, sub-case `I`..`V`.
    PostFold(FoldCase),
    /// `β = 1` beyond `μ = 1/b`, where `T_L` has merged into `T = 0`.
    LogisticBeyond,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldCase {
    I,
    II,
    III,
    IV,
    V,
    Below,
    ZeroTarget,
}

impl RootCase {
    pub fn label(&self) -> String {
        let s = match self {
            RootCase::NegativeMuBelow => "mu<0:1",
            RootCase::NegativeMuInside => "mu<0:2a",
            RootCase::NegativeMuAbove => "mu<0:2b",
            RootCase::MonotoneBelow => "0<=mu<=mu_c:a",
            RootCase::MonotoneInside => "0<=mu<=mu_c:b",
            RootCase::Above => "h0>b",
            RootCase::LogisticBeyond => "beta=1:mu>1/b",
            RootCase::PreFold(c) | RootCase::PostFold(c) => {
                let head = if matches!(self, RootCase::PreFold(_)) {
                    "1"
                } else {
                    "2"
                };
                let tail = match c {
                    FoldCase::I => "I",
                    FoldCase::II => "II",
                    FoldCase::III => "III",
                    FoldCase::IV => "IV",
                    FoldCase::V => "V",
                    FoldCase::Below => "below",
                    FoldCase::ZeroTarget => "h0=0",
                };
                return alloc::format!("{head}.{tail}");
            }
        };
        String::from(s)
    }
}

/// Case of `(μ, h0)` and the number of roots on `[0, b^{1/β}]` it implies,
/// when the classification pins it down.
pub fn classify(ctx: &HContext) -> (RootCase, Option<usize>) {
    let HContext { mu, b, beta, h0 } = *ctx;
    if mu < 0.0 {
        return if h0 < 0.0 {
            (RootCase::NegativeMuBelow, Some(0))
        } else if h0 < b {
            (RootCase::NegativeMuInside, Some(1))
        } else if h0 == b {
            // b^{1/β} itself, plus a second root when h_μ overshoots b.
            let n = if ctx.slope_at_t_max() < 0.0 { 2 } else { 1 };
            (RootCase::NegativeMuInside, Some(n))
        } else {
            // At most two; none when h_μ is still increasing at b^{1/β}.
            let n = (ctx.slope_at_t_max() >= 0.0).then_some(0);
            (RootCase::NegativeMuAbove, n)
        };
    }
    if h0 > b {
        return (RootCase::Above, Some(0));
    }
    let mu_c = mu_critical(b, beta);
    if mu <= mu_c {
        return if h0 < 0.0 {
            (RootCase::MonotoneBelow, Some(0))
        } else {
            (RootCase::MonotoneInside, Some(1))
        };
    }
    if beta == 1.0 {
        return (RootCase::LogisticBeyond, None);
    }
    let cc = match critical_constants(b, beta, mu) {
        Ok(cc) => cc,
        Err(_) => return (RootCase::LogisticBeyond, None),
    };
    let f = cc.folds.expect("mu > mu_c");
    let eq = |x: f64, y: f64| (x - y).abs() <= 1e-12 * y.abs().max(1.0);
    if mu <= cc.mu_bif {
        let case = if eq(h0, f.h_r) {
            (FoldCase::I, 2)
        } else if eq(h0, f.h_l) {
            (FoldCase::III, 2)
        } else if h0 > f.h_r && h0 < f.h_l {
            (FoldCase::II, 3)
        } else if h0 < 0.0 {
            (FoldCase::Below, 0)
        } else {
            (FoldCase::IV, 1)
        };
        (RootCase::PreFold(case.0), Some(case.1))
    } else {
        let case = if eq(h0, f.h_r) {
            (FoldCase::I, 1)
        } else if eq(h0, f.h_l) {
            (FoldCase::IV, 2)
        } else if h0 == 0.0 {
            // T = 0 joins the two roots of the H_R < h0 < 0 range.
            (FoldCase::ZeroTarget, 3)
        } else if h0 > f.h_r && h0 < 0.0 {
            (FoldCase::II, 2)
        } else if h0 > 0.0 && h0 < f.h_l {
            (FoldCase::III, 3)
        } else if h0 < f.h_r {
            (FoldCase::V, 0)
        } else {
            (FoldCase::V, 1)
        };
        (RootCase::PostFold(case.0), Some(case.1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    TumorFree,
    Interior,
}

/// A fixed point of the autonomous system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub kind: EquilibriumKind,
    pub state: State,
    /// `false` for tangential (double) roots.
    pub simple: bool,
}

impl Equilibrium {
    pub fn tumor(&self) -> f64 {
        self.state.tumor
    }

    pub fn effector(&self) -> f64 {
        self.state.effector
    }
}

/// `(0, σ/η)`.
pub fn tumor_free(model: &Model) -> Equilibrium {
    Equilibrium {
        kind: EquilibriumKind::TumorFree,
        state: State::new(0.0, model.effector_free()),
        simple: true,
    }
}

fn interior_at(model: &Model, t: f64, simple: bool) -> Equilibrium {
    Equilibrium {
        kind: EquilibriumKind::Interior,
        state: State::new(t, model.f(t) / model.params().gamma),
        simple,
    }
}

/// `T_*` for `β = 1` from the quadratic `μT² + (1-μb)T - (b-σ) = 0`,
/// in cancellation-free form.
pub fn logistic_interior_t(mu: f64, b: f64, sigma_s: f64) -> f64 {
    let disc = (1.0 + mu * b) * (1.0 + mu * b) - 4.0 * mu * sigma_s;
    2.0 * (b - sigma_s) / ((1.0 - mu * b) + sqrt(disc))
}

/// The unique interior equilibrium at `a = 0` under `σ < b, μ ≤ 0` or
/// `σ ≤ b, 0 < μ ≤ μ_c` (rescaled parameters).
pub fn interior_equilibrium(model: &Model) -> Result<Equilibrium> {
    let s = model.scaled();
    if s.a_s != 0.0 {
        return Err(Error::Hypothesis(
            "interior_equilibrium needs a = 0; continue the root with continue_in_a",
        ));
    }
    let dagger = s.sigma_s < s.b && s.mu <= 0.0;
    let ddagger = s.sigma_s <= s.b && s.mu > 0.0 && s.mu <= mu_critical(s.b, s.beta);
    if !dagger && !ddagger {
        return Err(Error::Hypothesis(
            "need sigma < b with mu <= 0, or sigma <= b with 0 < mu <= mu_c",
        ));
    }
    if s.sigma_s == s.b {
        return Err(Error::Hypothesis(
            "sigma = b: the interior root coincides with the tumor-free point",
        ));
    }
    if s.beta == 1.0 {
        return Ok(interior_at(
            model,
            logistic_interior_t(s.mu, s.b, s.sigma_s),
            true,
        ));
    }
    let roots: Vec<_> = solve_triangle(&HContext::for_model(model))
        .into_iter()
        .filter(|r| r.t > 0.0)
        .collect();
    match roots.as_slice() {
        [r] => Ok(interior_at(model, r.t, !r.degenerate)),
        _ => Err(Error::Hypothesis("expected exactly one interior root")),
    }
}

/// `S(T, μ, a) = (a+μ) T^{β+1} + T^β - (b(μ+a) - aσ) T` and `∂S/∂T`.
pub fn s_function(t: f64, mu: f64, a: f64, b: f64, beta: f64, sigma_s: f64) -> (f64, f64) {
    let tb = pow_nonneg(t, beta);
    let lin = b * (mu + a) - a * sigma_s;
    let value = (a + mu) * tb * t + tb - lin * t;
    let slope = if beta == 1.0 {
        2.0 * (a + mu) * t + 1.0 - lin
    } else {
        (a + mu) * (1.0 + beta) * tb + beta * pow(t, beta - 1.0) - lin
    };
    (value, slope)
}

/// Continue a simple interior root at `a = 0` to the model's small `a/g`.
pub fn continue_in_a(eq0: &Equilibrium, model: &Model, a_threshold: f64) -> Result<Equilibrium> {
    let s = model.scaled();
    if s.a_s == 0.0 {
        return Ok(*eq0);
    }
    if s.a_s > a_threshold {
        return Err(Error::ContinuationFailure(
            "a/g above the small-a threshold",
        ));
    }
    if eq0.kind != EquilibriumKind::Interior || !eq0.simple {
        return Err(Error::ContinuationFailure(
            "continuation starts from a simple interior root",
        ));
    }
    let target = s.b - s.sigma_s;
    let mut t = eq0.tumor();
    for _ in 0..50 {
        let (v, d) = s_function(t, s.mu, s.a_s, s.b, s.beta, s.sigma_s);
        if !(d.abs() > SIMPLE_SLOPE) {
            return Err(Error::ContinuationFailure("root lost simplicity"));
        }
        let step = (v - target) / d;
        t -= step;
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::ContinuationFailure("Newton iterate left T > 0"));
        }
        if step.abs() <= 1e-15 * t {
            let (_, d) = s_function(t, s.mu, s.a_s, s.b, s.beta, s.sigma_s);
            if !(d.abs() > SIMPLE_SLOPE) {
                return Err(Error::ContinuationFailure("root lost simplicity"));
            }
            return Ok(interior_at(model, t, true));
        }
    }
    Err(Error::ContinuationFailure(
        "no convergence in 50 Newton steps",
    ))
}

/// Admissible equilibrium with its root-classification label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledEquilibrium {
    pub equilibrium: Equilibrium,
    pub case_label: String,
}

/// Every admissible equilibrium: the tumor-free point plus the positive roots
/// of `h_μ(T) = b - σ`, continued to `a > 0` when needed.
pub fn all_equilibria(model: &Model, a_threshold: f64) -> Result<Vec<LabeledEquilibrium>> {
    let ctx = HContext::for_model(model);
    let (case, _) = classify(&ctx);
    let label = case.label();
    let mut out = alloc::vec![LabeledEquilibrium {
        equilibrium: tumor_free(model),
        case_label: String::from("tumor-free"),
    }];
    for root in solve_triangle(&ctx).into_iter().filter(|r| r.t > 0.0) {
        let eq0 = interior_at(model, root.t, !root.degenerate);
        let eq = continue_in_a(&eq0, model, a_threshold)?;
        out.push(LabeledEquilibrium {
            equilibrium: eq,
            case_label: label.clone(),
        });
    }
    Ok(out)
}

/// Residual of the equilibrium system at a state.
pub fn equilibrium_residual(model: &Model, x: State) -> f64 {
    let pr = model.params();
    let r1 = x.tumor * (model.f(x.tumor) - pr.gamma * x.effector);
    let r2 = pr.sigma + x.effector * ((pr.p - pr.m) * model.h(x.tumor) - pr.eta);
    r1.abs().max(r2.abs())
}
