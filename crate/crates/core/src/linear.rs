//! Linearization and stability under two delays.
//!
//! Around an equilibrium `(T̂, Ê)` the delayed system linearizes to
//! `Y' = A0 Y + A1 Y(t-τ1) + A2 Y(t-τ2)` with rank-one `A1`, `A2`. At an
//! interior point the characteristic function reduces to
//!
//! ```text
//! P(λ, τ1, τ2) = (λ - λ1)(λ - λ2) + R (p e^{-λτ1} - m e^{-λτ2})
//! ```
//!
//! in rescaled `p`, `m`, with `N = μR` and `D* = P(0) = λ1 λ2 - N`.

use num_complex::Complex64;

use crate::equilibria::{Equilibrium, EquilibriumKind};
use crate::math::{atan2, mixed_det, shifted_det, sqrt, Mat2, PI, TAU};
use crate::model::Model;
use crate::roots::bisect;
use crate::{Error, Result};

/// Relative tolerance for boundary cases (`Δ = 0`, `D* = 0`).
const BOUNDARY_RTOL: f64 = 1e-12;
/// Residual accepted for the equal-delay crossing.
const TAU_C_RESIDUAL: f64 = 1e-10;
/// Minimum modulus on an argument-principle contour.
const CONTOUR_MIN_MODULUS: f64 = 1e-8;

/// `A0`, `A1`, `A2` of the linearized delayed system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linearization {
    pub a0: Mat2,
    pub a1: Mat2,
    pub a2: Mat2,
    pub equilibrium: Equilibrium,
}

/// Jacobians of the vector field with respect to `X(t)`, `X(t-τ1)` and `X(t-τ2)`.
pub fn linearize(model: &Model, eq: &Equilibrium) -> Linearization {
    let pr = model.params();
    let (t, e) = (eq.tumor(), eq.effector());
    let a0 = Mat2::new(
        model.f(t) + model.t_f_prime(t) - pr.gamma * e,
        -pr.gamma * t,
        0.0,
        (pr.p - pr.m) * model.h(t) - pr.eta,
    );
    let hp = model.h_prime(t);
    let a1 = Mat2::new(0.0, 0.0, pr.p * hp * e, 0.0);
    let a2 = Mat2::new(0.0, 0.0, -pr.m * hp * e, 0.0);
    Linearization {
        a0,
        a1,
        a2,
        equilibrium: *eq,
    }
}

impl Linearization {
    /// `A0 + A1 + A2`, the undelayed Jacobian.
    pub fn total(&self) -> Mat2 {
        self.a0 + self.a1 + self.a2
    }
}

/// A function whose zeros in `Re λ > 0` decide linear stability.
pub trait CharacteristicFunction {
    fn eval(&self, lambda: Complex64, tau1: f64, tau2: f64) -> Complex64;

    /// No zero with `Re λ ≥ 0` has modulus above this bound, for any delays.
    fn root_radius(&self) -> f64;

    /// Scale for the default counting box; at least [`Self::root_radius`].
    fn box_scale(&self) -> f64 {
        self.root_radius()
    }
}

fn delay_factor(lambda: Complex64, tau: f64) -> Complex64 {
    if tau == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        (-lambda * tau).exp()
    }
}

impl CharacteristicFunction for Linearization {
    fn eval(&self, lambda: Complex64, tau1: f64, tau2: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        shifted_det(
            lambda,
            &[
                (one, &self.a0),
                (delay_factor(lambda, tau1), &self.a1),
                (delay_factor(lambda, tau2), &self.a2),
            ],
        )
    }

    fn root_radius(&self) -> f64 {
        self.a0.frobenius() + self.a1.frobenius() + self.a2.frobenius()
    }
}

/// Coefficients of `p0(λ) + p1(λ) e^{-λτ1} + p2(λ) e^{-λτ2} + p3 e^{-λ(τ1+τ2)}`.
///
/// `p0 = [c0, c1, c2]` lists `c0 + c1 λ + c2 λ²`; `p1`, `p2` are affine in `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDelayCoeffs {
    pub p0: [f64; 3],
    pub p1: [f64; 2],
    pub p2: [f64; 2],
    pub p3: f64,
}

impl TwoDelayCoeffs {
    pub fn eval(&self, lambda: Complex64, tau1: f64, tau2: f64) -> Complex64 {
        let z = delay_factor(lambda, tau1);
        let w = delay_factor(lambda, tau2);
        self.eval_zw(lambda, z, w)
    }

    /// Same polynomial with `e^{-λτ1}`, `e^{-λτ2}` replaced by free `z`, `w`.
    pub fn eval_zw(&self, lambda: Complex64, z: Complex64, w: Complex64) -> Complex64 {
        let p0 = self.p0[0] + lambda * (self.p0[1] + lambda * self.p0[2]);
        let p1 = self.p1[0] + lambda * self.p1[1];
        let p2 = self.p2[0] + lambda * self.p2[1];
        p0 + p1 * z + p2 * w + self.p3 * z * w
    }
}

fn is_rank_deficient(a: &Mat2) -> bool {
    let scale = a.frobenius();
    a.det().abs() <= BOUNDARY_RTOL * scale * scale
}

/// Expansion of `det(λI - A0 - zA1 - wA2)` for singular `A1`, `A2`.
pub fn two_delay_char_coeffs(a0: &Mat2, a1: &Mat2, a2: &Mat2) -> Result<TwoDelayCoeffs> {
    if !is_rank_deficient(a1) || !is_rank_deficient(a2) {
        return Err(Error::Hypothesis(
            "delay matrices must be singular; use AppendixQuadratic",
        ));
    }
    Ok(TwoDelayCoeffs {
        p0: [a0.det(), -a0.trace(), 1.0],
        p1: [mixed_det(a0, a1), -a1.trace()],
        p2: [mixed_det(a0, a2), -a2.trace()],
        p3: mixed_det(a1, a2),
    })
}

/// `P(λ, z, w) = det(λI - A - zB - wC)` written as a quadratic form:
///
/// ```text
/// λ² - tr(A) λ + det A + det(B) z² + (ĉ - tr(B) λ) z + det(C) w² - d̂(λ, z) w
/// ```
///
/// with `ĉ = det(A¹|B²) + det(B¹|A²)` and `d̂` the same mixed sum of `C` and
/// `λI - A - zB`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixQuadratic {
    pub a: Mat2,
    pub b: Mat2,
    pub c: Mat2,
}

impl AppendixQuadratic {
    pub fn new(a: Mat2, b: Mat2, c: Mat2) -> Self {
        AppendixQuadratic { a, b, c }
    }

    pub fn c_hat(&self) -> f64 {
        mixed_det(&self.a, &self.b)
    }

    /// `d̂(λ, z)`.
    pub fn d_hat(&self, lambda: Complex64, z: Complex64) -> Complex64 {
        let m = |i: usize, j: usize| {
            let id = if i == j {
                lambda
            } else {
                Complex64::new(0.0, 0.0)
            };
            id - self.a.get(i, j) - z * self.b.get(i, j)
        };
        let c = |i: usize, j: usize| Complex64::new(self.c.get(i, j), 0.0);
        // det(C¹|M²) + det(M¹|C²)
        (c(0, 0) * m(1, 1) - m(0, 1) * c(1, 0)) + (m(0, 0) * c(1, 1) - c(0, 1) * m(1, 0))
    }

    pub fn eval_zw(&self, lambda: Complex64, z: Complex64, w: Complex64) -> Complex64 {
        lambda * lambda - self.a.trace() * lambda
            + self.a.det()
            + self.b.det() * z * z
            + (self.c_hat() - self.b.trace() * lambda) * z
            + self.c.det() * w * w
            - self.d_hat(lambda, z) * w
    }

    /// Equal delays: `λ² - tr(A) λ + det A + det(B+C) z² + (c̃ - tr(B+C) λ) z`
    /// with `c̃ = det(A¹|(B+C)²) + det((B+C)¹|A²)`.
    pub fn equal_delay(&self) -> AppendixQuadratic {
        AppendixQuadratic {
            a: self.a,
            b: self.b + self.c,
            c: Mat2::ZERO,
        }
    }

    pub fn c_tilde(&self) -> f64 {
        mixed_det(&self.a, &(self.b + self.c))
    }
}

impl CharacteristicFunction for AppendixQuadratic {
    fn eval(&self, lambda: Complex64, tau1: f64, tau2: f64) -> Complex64 {
        self.eval_zw(
            lambda,
            delay_factor(lambda, tau1),
            delay_factor(lambda, tau2),
        )
    }

    fn root_radius(&self) -> f64 {
        self.a.frobenius() + self.b.frobenius() + self.c.frobenius()
    }
}

/// Reduced characteristic data at an interior equilibrium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicContext {
    /// `T f'(T) < 0`.
    pub lambda1: f64,
    /// `(p - m) h(T) - η`.
    pub lambda2: f64,
    /// `R = η f(T) T / (1 + aT/g)²`, paired with rescaled `p`, `m`.
    pub r: f64,
    pub p_s: f64,
    pub m_s: f64,
    /// `(m_s - p_s) R`.
    pub n: f64,
    /// `λ1 λ2 - N`.
    pub d_star: f64,
}

impl CharacteristicContext {
    pub fn from_parts(lambda1: f64, lambda2: f64, r: f64, p_s: f64, m_s: f64) -> Self {
        let n = (m_s - p_s) * r;
        CharacteristicContext {
            lambda1,
            lambda2,
            r,
            p_s,
            m_s,
            n,
            d_star: lambda1 * lambda2 - n,
        }
    }

    pub fn sum(&self) -> f64 {
        self.lambda1 + self.lambda2
    }

    pub fn product(&self) -> f64 {
        self.lambda1 * self.lambda2
    }

    /// `(λ1 + λ2)² - 4 D*`.
    pub fn discriminant(&self) -> f64 {
        let s = self.sum();
        s * s - 4.0 * self.d_star
    }
}

/// Context of an interior equilibrium (`T > 0`).
pub fn characteristic_context(model: &Model, eq: &Equilibrium) -> Result<CharacteristicContext> {
    if eq.kind != EquilibriumKind::Interior || !(eq.tumor() > 0.0) {
        return Err(Error::Domain(
            "characteristic context needs an interior equilibrium",
        ));
    }
    let pr = model.params();
    let s = model.scaled();
    let (t, e) = (eq.tumor(), eq.effector());
    let lambda1 = model.t_f_prime(t);
    let lambda2 = (pr.p - pr.m) * model.h(t) - pr.eta;
    // Same products as the A0/A1/A2 expansion: R p_s = γ T E h'(T) p.
    let r = pr.gamma * t * e * model.h_prime(t) * pr.eta * pr.g;
    Ok(CharacteristicContext::from_parts(
        lambda1, lambda2, r, s.p_s, s.m_s,
    ))
}

/// `P(λ, τ1, τ2)` from the reduced context.
pub fn char_eval(
    ctx: &CharacteristicContext,
    lambda: Complex64,
    tau1: f64,
    tau2: f64,
) -> Complex64 {
    let z = delay_factor(lambda, tau1);
    let w = delay_factor(lambda, tau2);
    (lambda - ctx.lambda1) * (lambda - ctx.lambda2) + ctx.r * (ctx.p_s * z - ctx.m_s * w)
}

impl CharacteristicFunction for CharacteristicContext {
    fn eval(&self, lambda: Complex64, tau1: f64, tau2: f64) -> Complex64 {
        char_eval(self, lambda, tau1, tau2)
    }

    fn root_radius(&self) -> f64 {
        // |(λ-λ1)(λ-λ2)| > R(p+m) ≥ |delay terms| beyond this modulus.
        self.lambda1.abs().max(self.lambda2.abs()) + sqrt(self.r.abs() * (self.p_s + self.m_s))
    }

    fn box_scale(&self) -> f64 {
        self.root_radius()
            .max(self.lambda1.abs())
            .max(self.lambda2.abs())
            .max(self.n.abs())
    }
}

/// `D*` at `a = 0` in closed form: `-η T ((μT + 1) f'(T) + μ f(T))`.
pub fn d_star_closed_form(model: &Model, t: f64) -> Result<f64> {
    let s = model.scaled();
    let fp = crate::model::growth_f_prime(t, s.r, s.beta)?;
    Ok(-s.eta * t * ((s.mu * t + 1.0) * fp + s.mu * model.f(t)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityLabel {
    Unstable,
    LocallyStable,
    LocallyAsymptoticallyStable,
    Inconclusive,
}

impl StabilityLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            StabilityLabel::Unstable => "unstable",
            StabilityLabel::LocallyStable => "locally_stable",
            StabilityLabel::LocallyAsymptoticallyStable => "locally_asymptotically_stable",
            StabilityLabel::Inconclusive => "inconclusive",
        }
    }
}

/// Evidence attached to a verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Witness {
    /// `Δ = γσ - rbη` and the two characteristic roots `-η`, `rb - γσ/η`.
    TumorFree { delta: f64, roots: [f64; 2] },
    /// `D*` with a positive real characteristic root when `D* < 0`.
    DStar { d_star: f64, real_root: Option<f64> },
    /// Trace, determinant and eigenvalues of the undelayed matrix.
    ZeroDelay {
        trace: f64,
        det: f64,
        eigenvalues: [Complex64; 2],
    },
    /// Delay range covered by the verdict.
    TauInterval { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub label: StabilityLabel,
    pub witness: Witness,
}

/// Delay-independent verdict at `(0, σ/η)` from `(λ + η)(λ - rb + γσ/η) = 0`.
pub fn tumor_free_verdict(model: &Model) -> StabilityVerdict {
    let pr = model.params();
    let (gs, rbe) = (pr.gamma * pr.sigma, pr.r * model.b() * pr.eta);
    let delta = gs - rbe;
    let roots = [-pr.eta, pr.r * model.b() - pr.gamma * model.effector_free()];
    let label = if delta.abs() <= BOUNDARY_RTOL * (gs + rbe) {
        StabilityLabel::LocallyStable
    } else if delta < 0.0 {
        StabilityLabel::Unstable
    } else {
        StabilityLabel::LocallyAsymptoticallyStable
    };
    StabilityVerdict {
        label,
        witness: Witness::TumorFree { delta, roots },
    }
}

/// Instability from `D* < 0`: `P(0) < 0` and `P(x) → +∞` on the real axis.
pub fn d_star_verdict(ctx: &CharacteristicContext, tau1: f64, tau2: f64) -> StabilityVerdict {
    let d = ctx.d_star;
    let scale = ctx.product().abs() + ctx.n.abs();
    if d.abs() <= BOUNDARY_RTOL * scale || d > 0.0 {
        return StabilityVerdict {
            label: StabilityLabel::Inconclusive,
            witness: Witness::DStar {
                d_star: d,
                real_root: None,
            },
        };
    }
    let p_real = |x: f64| char_eval(ctx, Complex64::new(x, 0.0), tau1, tau2).re;
    let hi = ctx.root_radius() + 1.0;
    let root = bisect(p_real, 0.0, hi, 1e-14 * hi).ok();
    StabilityVerdict {
        label: StabilityLabel::Unstable,
        witness: Witness::DStar {
            d_star: d,
            real_root: root,
        },
    }
}

/// Stability of `Y' = A Y` from trace and determinant.
///
/// A negative determinant is reported as unstable (a positive real eigenvalue).
pub fn zero_delay_verdict(a: &Mat2) -> StabilityVerdict {
    let (trace, det) = (a.trace(), a.det());
    let label = if trace < 0.0 && det > 0.0 {
        StabilityLabel::LocallyAsymptoticallyStable
    } else if trace > 0.0 || det < 0.0 {
        StabilityLabel::Unstable
    } else {
        StabilityLabel::Inconclusive
    };
    StabilityVerdict {
        label,
        witness: Witness::ZeroDelay {
            trace,
            det,
            eigenvalues: a.eigenvalues(),
        },
    }
}

/// Crossing data for equal delays `τ1 = τ2 = τ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfData {
    /// Delay below which stability is guaranteed: `(λ1 + λ2)/N`.
    pub tau_a: f64,
    /// Crossing frequency, the positive root of `G(y)`.
    pub y_hat: f64,
    /// First crossing delay.
    pub tau_c: f64,
    /// `|P(iŷ, τ_c, τ_c)|`.
    pub residual: f64,
}

impl HopfData {
    /// `τ_k = τ_c + 2kπ/ŷ`.
    pub fn tau_k(&self, k: u32) -> f64 {
        self.tau_c + TAU * k as f64 / self.y_hat
    }

    pub fn period(&self) -> f64 {
        TAU / self.y_hat
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EqualDelayOutcome {
    /// `λ1 λ2 ≥ |N|`: no imaginary-axis crossing for any `τ ≥ 0`.
    DelayIndependent {
        product: f64,
        n: f64,
    },
    Hopf(HopfData),
}

/// `G(y) = y⁴ + (λ1² + λ2²) y² + (λ1 λ2)² - N²`.
pub fn g_quartic(ctx: &CharacteristicContext, y: f64) -> f64 {
    let (l1, l2, n) = (ctx.lambda1, ctx.lambda2, ctx.n);
    let y2 = y * y;
    y2 * y2 + (l1 * l1 + l2 * l2) * y2 + (l1 * l2 - n) * (l1 * l2 + n)
}

/// Equal-delay analysis: Hopf delay `τ_c` or delay independence.
pub fn tau_critical(ctx: &CharacteristicContext) -> Result<EqualDelayOutcome> {
    let (l1, l2, n) = (ctx.lambda1, ctx.lambda2, ctx.n);
    let sum = l1 + l2;
    let prod = l1 * l2;
    if !(sum < 0.0) {
        return Err(Error::Hypothesis("lambda1 + lambda2 < 0 fails"));
    }
    if !(prod - n > 0.0) {
        return Err(Error::Hypothesis(
            "N < lambda1*lambda2 fails (D* <= 0, unstable for all delays)",
        ));
    }
    if prod + n >= 0.0 {
        return Ok(EqualDelayOutcome::DelayIndependent { product: prod, n });
    }
    // Positive root of the quadratic in y², written without cancellation.
    let s2 = l1 * l1 + l2 * l2;
    let c = (prod - n) * (prod + n);
    let y2 = -2.0 * c / (s2 + sqrt(s2 * s2 - 4.0 * c));
    let y = sqrt(y2);
    // N e^{-iyτ} = Q0 + i Q1: cos(yτ) = (λ1λ2 - y²)/N, sin(yτ) = (λ1+λ2) y / N.
    let mut theta = atan2(sum * y / n, (prod - y2) / n);
    if theta <= 0.0 {
        theta += TAU;
    }
    let tau_c = theta / y;
    let residual = char_eval(ctx, Complex64::new(0.0, y), tau_c, tau_c).norm();
    if !(residual <= TAU_C_RESIDUAL) {
        return Err(Error::NoConvergence {
            method: "tau_c residual verification",
            iterations: 1,
        });
    }
    Ok(EqualDelayOutcome::Hopf(HopfData {
        tau_a: sum / n,
        y_hat: y,
        tau_c,
        residual,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopfSide {
    Below,
    At,
    Above,
    DelayIndependent,
}

/// Prediction for equal delays `τ`, to be confirmed by simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfVerdict {
    pub side: HopfSide,
    pub verdict: StabilityVerdict,
    /// Small-amplitude cycle expected near the crossing.
    pub cycle_expected: bool,
}

pub fn hopf_verdict(ctx: &CharacteristicContext, tau: f64) -> Result<HopfVerdict> {
    let outcome = tau_critical(ctx)?;
    let (side, label, hi) = match outcome {
        EqualDelayOutcome::DelayIndependent { .. } => (
            HopfSide::DelayIndependent,
            StabilityLabel::LocallyAsymptoticallyStable,
            f64::INFINITY,
        ),
        EqualDelayOutcome::Hopf(h) => {
            if tau < h.tau_c {
                (
                    HopfSide::Below,
                    StabilityLabel::LocallyAsymptoticallyStable,
                    h.tau_c,
                )
            } else if tau > h.tau_c {
                (HopfSide::Above, StabilityLabel::Unstable, f64::INFINITY)
            } else {
                (HopfSide::At, StabilityLabel::Inconclusive, h.tau_c)
            }
        }
    };
    let lo = match (side, outcome) {
        (HopfSide::Above, EqualDelayOutcome::Hopf(h)) => h.tau_c,
        _ => 0.0,
    };
    Ok(HopfVerdict {
        side,
        verdict: StabilityVerdict {
            label,
            witness: Witness::TauInterval { lo, hi },
        },
        cycle_expected: side == HopfSide::Above,
    })
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]` in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.x0 && z.re < self.x1 && z.im > self.y0 && z.im < self.y1
    }
}

/// `[0, X] × [-X, X]` with `X = 1 + 2 · box_scale`.
pub fn default_box<F: CharacteristicFunction + ?Sized>(f: &F) -> Rect {
    let x = 1.0 + 2.0 * f.box_scale();
    Rect::new(0.0, x, -x, x)
}

const MAX_DEPTH: u32 = 40;

struct Contour<'a, F: ?Sized> {
    f: &'a F,
    tau1: f64,
    tau2: f64,
}

impl<F: CharacteristicFunction + ?Sized> Contour<'_, F> {
    fn value(&self, z: Complex64) -> Result<Complex64> {
        let v = self.f.eval(z, self.tau1, self.tau2);
        if !(v.norm() > CONTOUR_MIN_MODULUS) {
            return Err(Error::RootOnContour {
                at_re: z.re,
                at_im: z.im,
            });
        }
        Ok(v)
    }

    /// Argument increment of `f` along the straight segment `a → b`.
    fn segment(
        &self,
        a: Complex64,
        fa: Complex64,
        b: Complex64,
        fb: Complex64,
        depth: u32,
    ) -> Result<f64> {
        let whole = (fb / fa).arg();
        let m = 0.5 * (a + b);
        let fm = self.value(m)?;
        let left = (fm / fa).arg();
        let right = (fb / fm).arg();
        let consistent = whole.abs() < 0.5 * PI && (left + right - whole).abs() < 1e-9;
        if consistent {
            return Ok(left + right);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::NoConvergence {
                method: "argument principle refinement",
                iterations: MAX_DEPTH as usize,
            });
        }
        Ok(self.segment(a, fa, m, fm, depth + 1)? + self.segment(m, fm, b, fb, depth + 1)?)
    }
}

/// Number of zeros of `f(·, τ1, τ2)` inside `rect`, by the argument principle.
pub fn rhp_root_count<F: CharacteristicFunction + ?Sized>(
    f: &F,
    tau1: f64,
    tau2: f64,
    rect: &Rect,
) -> Result<usize> {
    let contour = Contour { f, tau1, tau2 };
    let corners = [
        Complex64::new(rect.x0, rect.y0),
        Complex64::new(rect.x1, rect.y0),
        Complex64::new(rect.x1, rect.y1),
        Complex64::new(rect.x0, rect.y1),
    ];
    let tau_max = tau1.max(tau2);
    let mut total = 0.0;
    for i in 0..4 {
        let (a, b) = (corners[i], corners[(i + 1) % 4]);
        let len = (b - a).norm();
        // e^{-λτ} turns once per 2π/τ along vertical edges.
        let n0 = 64usize.max((4.0 * len * tau_max) as usize);
        let mut za = a;
        let mut fa = contour.value(za)?;
        for j in 1..=n0 {
            let zb = a + (b - a) * (j as f64 / n0 as f64);
            let fb = contour.value(zb)?;
            total += contour.segment(za, fa, zb, fb, 0)?;
            za = zb;
            fa = fb;
        }
    }
    let winding = total / TAU;
    let n = libm::round(winding);
    if (winding - n).abs() > 1e-3 || n < 0.0 {
        return Err(Error::NoConvergence {
            method: "argument principle winding",
            iterations: 0,
        });
    }
    Ok(n as usize)
}
