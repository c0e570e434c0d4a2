//! Stability switching curves for unequal delays.
//!
//! On the imaginary axis `λ = iy` write `(iy - λ1)(iy - λ2) = Q0 + iQ1 = H e^{iφ1}`.
//! A crossing at `(τ1, τ2)` needs `|H e^{iφ1} + Rp e^{-iyτ1}| = Rm`, which
//! fixes `yτ1 = ±ϑ - φ1 + 2sπ` with
//! `cos ϑ = -(H² + R²(p² - m²)) / (2RpH)`; `τ2` then follows from the
//! argument of the same complex number. The set of admissible `y` is where
//! `|H² + R²(p² - m²)| ≤ 2RpH`.

use alloc::vec::Vec;
use core::ops::RangeInclusive;

use num_complex::Complex64;

use crate::linear::{char_eval, default_box, rhp_root_count, CharacteristicContext};
use crate::math::{acos, atan2, cos, floor, round, sin, sqrt, PI, TAU};
use crate::{Error, Result};

/// Residual bound `|P(iy, τ1, τ2)| ≤ RESIDUAL_RTOL (1 + y²)`.
pub const RESIDUAL_RTOL: f64 = 1e-8;
/// Width to which interval endpoints are bisected.
const ENDPOINT_TOL: f64 = 1e-10;

/// `y`-dependent quantities of the crossing equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingGeometry {
    pub ctx: CharacteristicContext,
}

impl CrossingGeometry {
    pub fn new(ctx: &CharacteristicContext) -> Self {
        CrossingGeometry { ctx: *ctx }
    }

    pub fn q0(&self, y: f64) -> f64 {
        self.ctx.product() - y * y
    }

    pub fn q1(&self, y: f64) -> f64 {
        -self.ctx.sum() * y
    }

    pub fn h_mag(&self, y: f64) -> f64 {
        libm::hypot(self.q0(y), self.q1(y))
    }

    /// Principal value of `φ1` in `(-π, π]`.
    pub fn phi1(&self, y: f64) -> f64 {
        atan2(self.q1(y), self.q0(y))
    }

    fn rp(&self) -> f64 {
        self.ctx.r * self.ctx.p_s
    }

    fn rm(&self) -> f64 {
        self.ctx.r * self.ctx.m_s
    }

    fn numerator(&self, y: f64) -> f64 {
        let h = self.h_mag(y);
        let (rp, rm) = (self.rp(), self.rm());
        h * h + (rp - rm) * (rp + rm)
    }

    /// `2RpH - |H² + R²(p² - m²)|`, nonnegative exactly on the feasible set.
    pub fn margin(&self, y: f64) -> f64 {
        2.0 * self.rp() * self.h_mag(y) - self.numerator(y).abs()
    }

    pub fn is_feasible(&self, y: f64) -> bool {
        self.margin(y) >= 0.0
    }

    /// `ϑ(y) ∈ [0, π]`; `None` outside the feasible set.
    pub fn vartheta(&self, y: f64) -> Option<f64> {
        if !self.is_feasible(y) {
            return None;
        }
        let c = -self.numerator(y) / (2.0 * self.rp() * self.h_mag(y));
        Some(acos(c.clamp(-1.0, 1.0)))
    }

    /// `ϑ` at a bisected interval endpoint, where equality holds: `0` or `π`.
    fn vartheta_at_endpoint(&self, y: f64) -> f64 {
        if self.numerator(y) > 0.0 {
            PI
        } else {
            0.0
        }
    }

    /// `yτ2` modulo `2π` for a given `yτ1`, from `Rm e^{-iyτ2} = H e^{iφ1} + Rp e^{-iyτ1}`.
    fn theta2(&self, y: f64, theta1: f64) -> f64 {
        let rp = self.rp();
        atan2(rp * sin(theta1) - self.q1(y), self.q0(y) + rp * cos(theta1))
    }
}

/// Maximal `y`-interval of the feasible set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleInterval {
    pub lo: f64,
    pub hi: f64,
    /// Endpoint obtained by bisection (equality holds there), not a grid edge.
    pub lo_exact: bool,
    pub hi_exact: bool,
}

/// Bisect the feasibility boundary between an infeasible and a feasible `y`;
/// returns a feasible point.
fn refine_endpoint(geo: &CrossingGeometry, mut out: f64, mut inside: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (out + inside);
        if mid == out || mid == inside {
            break;
        }
        if geo.is_feasible(mid) {
            inside = mid;
        } else {
            out = mid;
        }
        // Keep going past the tolerance while it is cheap: endpoints feed ϑ ∈ {0, π}.
        if (inside - out).abs() <= ENDPOINT_TOL * 1e-6 * inside.abs().max(1.0) {
            break;
        }
    }
    inside
}

/// Maximal intervals of `{y : |H² + R²(p² - m²)| ≤ 2RpH}` seen on `y_grid`.
pub fn feasible_set(ctx: &CharacteristicContext, y_grid: &[f64]) -> Result<Vec<FeasibleInterval>> {
    if y_grid.iter().any(|y| !(*y > 0.0)) || y_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(
            "y grid must be positive and strictly increasing",
        ));
    }
    let geo = CrossingGeometry::new(ctx);
    let mut out = Vec::new();
    let mut open: Option<(f64, bool)> = None;
    for (j, &y) in y_grid.iter().enumerate() {
        let feasible = geo.is_feasible(y);
        match (open, feasible) {
            (None, true) => {
                open = Some(if j == 0 {
                    (y, false)
                } else {
                    (refine_endpoint(&geo, y_grid[j - 1], y), true)
                });
            }
            (Some((lo, lo_exact)), false) => {
                out.push(FeasibleInterval {
                    lo,
                    hi: refine_endpoint(&geo, y, y_grid[j - 1]),
                    lo_exact,
                    hi_exact: true,
                });
                open = None;
            }
            _ => {}
        }
    }
    if let Some((lo, lo_exact)) = open {
        out.push(FeasibleInterval {
            lo,
            hi: *y_grid.last().expect("nonempty when an interval is open"),
            lo_exact,
            hi_exact: false,
        });
    }
    Ok(out)
}

/// Uniform grid on `(0, Y]`, with `Y` beyond which `H > R(p + m)`.
pub fn default_y_grid(ctx: &CharacteristicContext, n: usize) -> Vec<f64> {
    let big = ctx.r.abs() * (ctx.p_s + ctx.m_s) + ctx.product().abs();
    let y_max = sqrt(big) + ctx.sum().abs() + 1.0;
    (1..=n).map(|i| y_max * i as f64 / n as f64).collect()
}

/// A point of a crossing curve `C_{s,k}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchingCurvePoint {
    pub y: f64,
    pub tau1: f64,
    pub tau2: f64,
    /// `+1` or `-1`: the `±ϑ` branch.
    pub sign: i8,
    pub s: i32,
    pub k: i32,
    /// `|P(iy, τ1, τ2)|`.
    pub residual: f64,
}

fn residual_ok(y: f64, residual: f64) -> bool {
    residual <= RESIDUAL_RTOL * (1.0 + y * y)
}

fn make_point(
    ctx: &CharacteristicContext,
    y: f64,
    theta1: f64,
    theta2: f64,
    sign: i8,
    s: i32,
    k: i32,
) -> SwitchingCurvePoint {
    let (tau1, tau2) = (theta1 / y, theta2 / y);
    let residual = char_eval(ctx, Complex64::new(0.0, y), tau1, tau2).norm();
    SwitchingCurvePoint {
        y,
        tau1,
        tau2,
        sign,
        s,
        k,
        residual,
    }
}

fn to_unit_turn(theta: f64) -> f64 {
    theta - TAU * floor(theta / TAU)
}

/// Both branches at one `y` of the feasible set, principal `φ1` and `yτ2 ∈ [0, 2π)`.
/// Points with a negative delay or a failed residual check are omitted.
pub fn curve_points(
    ctx: &CharacteristicContext,
    y: f64,
    s: i32,
    k: i32,
) -> Vec<SwitchingCurvePoint> {
    let geo = CrossingGeometry::new(ctx);
    let Some(vt) = geo.vartheta(y) else {
        return Vec::new();
    };
    let phi = geo.phi1(y);
    let mut out = Vec::with_capacity(2);
    for sign in [1i8, -1] {
        let theta1 = sign as f64 * vt - phi + TAU * s as f64;
        let theta2 = to_unit_turn(geo.theta2(y, theta1)) + TAU * k as f64;
        let p = make_point(ctx, y, theta1, theta2, sign, s, k);
        if p.tau1 >= 0.0 && p.tau2 >= 0.0 && residual_ok(y, p.residual) {
            out.push(p);
        }
        if vt == 0.0 || vt == PI {
            break;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceOptions {
    pub samples_per_interval: usize,
    pub s_range: RangeInclusive<i32>,
    pub k_range: RangeInclusive<i32>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            samples_per_interval: 2000,
            s_range: 0..=3,
            k_range: 0..=3,
        }
    }
}

/// Connected run of curve points with fixed `(sign, s, k)`, ordered by `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub sign: i8,
    pub s: i32,
    pub k: i32,
    pub interval: usize,
    pub points: Vec<SwitchingCurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurveFamily {
    pub polylines: Vec<Polyline>,
    /// Samples dropped because a delay came out negative.
    pub dropped_negative: usize,
    /// Samples dropped by the residual check.
    pub dropped_residual: usize,
    /// Largest `|Δφ1|` between consecutive samples.
    pub max_phi_step: f64,
}

impl CurveFamily {
    pub fn points(&self) -> impl Iterator<Item = &SwitchingCurvePoint> {
        self.polylines.iter().flat_map(|p| p.points.iter())
    }
}

/// Angle sequence made continuous by `2π` shifts.
fn unwrap(raw: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(raw.len());
    let mut offset = 0.0;
    for (i, &a) in raw.iter().enumerate() {
        if i > 0 {
            let prev = raw[i - 1];
            offset -= TAU * round((a - prev) / TAU);
        }
        out.push(a + offset);
    }
    out
}

/// Sample every feasible interval and assemble the curves `C_{s,k}`.
///
/// Sampling is refined until consecutive `φ1` samples differ by less than `π`.
pub fn trace_curves(
    ctx: &CharacteristicContext,
    intervals: &[FeasibleInterval],
    opts: &TraceOptions,
) -> CurveFamily {
    let geo = CrossingGeometry::new(ctx);
    let mut family = CurveFamily::default();
    for (idx, iv) in intervals.iter().enumerate() {
        let mut n = opts.samples_per_interval.max(2);
        let (ys, phi) = loop {
            let ys: Vec<f64> = (0..n)
                .map(|j| {
                    if j == n - 1 {
                        iv.hi
                    } else {
                        iv.lo + (iv.hi - iv.lo) * j as f64 / (n - 1) as f64
                    }
                })
                .collect();
            let phi = unwrap(&ys.iter().map(|&y| geo.phi1(y)).collect::<Vec<_>>());
            let step = phi
                .windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .fold(0.0, f64::max);
            if step < PI || n > 1 << 20 {
                family.max_phi_step = family.max_phi_step.max(step);
                break (ys, phi);
            }
            n = 2 * n - 1;
        };
        let vt: Vec<f64> = ys
            .iter()
            .enumerate()
            .map(|(j, &y)| {
                let exact = (j == 0 && iv.lo_exact) || (j == ys.len() - 1 && iv.hi_exact);
                if exact {
                    geo.vartheta_at_endpoint(y)
                } else {
                    geo.vartheta(y)
                        .unwrap_or_else(|| geo.vartheta_at_endpoint(y))
                }
            })
            .collect();
        for sign in [1i8, -1] {
            let theta1: Vec<f64> = (0..ys.len())
                .map(|j| sign as f64 * vt[j] - phi[j])
                .collect();
            let raw2: Vec<f64> = (0..ys.len())
                .map(|j| geo.theta2(ys[j], theta1[j]))
                .collect();
            let mut theta2 = unwrap(&raw2);
            let shift = to_unit_turn(theta2[0]) - theta2[0];
            theta2.iter_mut().for_each(|t| *t += shift);
            for s in opts.s_range.clone() {
                for k in opts.k_range.clone() {
                    let mut current: Vec<SwitchingCurvePoint> = Vec::new();
                    for j in 0..ys.len() {
                        let p = make_point(
                            ctx,
                            ys[j],
                            theta1[j] + TAU * s as f64,
                            theta2[j] + TAU * k as f64,
                            sign,
                            s,
                            k,
                        );
                        let keep = if p.tau1 < 0.0 || p.tau2 < 0.0 {
                            family.dropped_negative += 1;
                            false
                        } else if !residual_ok(p.y, p.residual) {
                            family.dropped_residual += 1;
                            false
                        } else {
                            true
                        };
                        if keep {
                            current.push(p);
                        } else if !current.is_empty() {
                            family.polylines.push(Polyline {
                                sign,
                                s,
                                k,
                                interval: idx,
                                points: core::mem::take(&mut current),
                            });
                        }
                    }
                    if !current.is_empty() {
                        family.polylines.push(Polyline {
                            sign,
                            s,
                            k,
                            interval: idx,
                            points: current,
                        });
                    }
                }
            }
        }
    }
    family
        .polylines
        .sort_by_key(|p| (p.sign, p.s, p.k, p.interval));
    family
}

/// Curve point on the diagonal `τ1 = τ2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalCrossing {
    pub point: SwitchingCurvePoint,
    /// Closest `τ_k = τ_c + 2kπ/ŷ` and its distance, when a Hopf delay exists.
    pub nearest_tau_k: Option<(u32, f64)>,
}

/// Vertices with `|τ1 - τ2| ≤ 1e-9 (1 + τ1)`, plus sign changes of `τ1 - τ2`
/// along a polyline refined by bisection in `y`; sorted by `τ`, duplicates removed.
pub fn diagonal_crossings(
    ctx: &CharacteristicContext,
    family: &CurveFamily,
) -> Vec<DiagonalCrossing> {
    let geo = CrossingGeometry::new(ctx);
    let hopf = match crate::linear::tau_critical(ctx) {
        Ok(crate::linear::EqualDelayOutcome::Hopf(h)) => Some(h),
        _ => None,
    };
    let nearest = |tau: f64| {
        hopf.map(|h| {
            let k = round(((tau - h.tau_c) / (TAU / h.y_hat)).max(0.0)) as u32;
            (k, (tau - h.tau_k(k)).abs())
        })
    };
    let on_diag = |p: &SwitchingCurvePoint| (p.tau1 - p.tau2).abs() <= 1e-9 * (1.0 + p.tau1);
    let mut out = Vec::new();
    for pl in &family.polylines {
        for (i, p) in pl.points.iter().enumerate() {
            if on_diag(p) {
                out.push(DiagonalCrossing {
                    point: *p,
                    nearest_tau_k: nearest(p.tau1),
                });
                continue;
            }
            let Some(q) = pl.points.get(i + 1) else {
                continue;
            };
            let (da, db) = (p.tau1 - p.tau2, q.tau1 - q.tau2);
            if on_diag(q) || da.signum() == db.signum() {
                continue;
            }
            // Re-evaluate between the two vertices, keeping the branch of its neighbors.
            let at = |y: f64| -> Option<SwitchingCurvePoint> {
                let w = (y - p.y) / (q.y - p.y);
                let vt = geo.vartheta(y)?;
                let th1_guess = (1.0 - w) * p.tau1 * p.y + w * q.tau1 * q.y;
                let raw1 = p.sign as f64 * vt - geo.phi1(y);
                let th1 = raw1 + TAU * round((th1_guess - raw1) / TAU);
                let th2_guess = (1.0 - w) * p.tau2 * p.y + w * q.tau2 * q.y;
                let raw2 = geo.theta2(y, th1);
                let th2 = raw2 + TAU * round((th2_guess - raw2) / TAU);
                Some(make_point(ctx, y, th1, th2, p.sign, p.s, p.k))
            };
            let (mut lo, mut hi) = (p.y, q.y);
            let mut best = None;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                let Some(m) = at(mid) else { break };
                best = Some(m);
                let dm = m.tau1 - m.tau2;
                if dm == 0.0 {
                    break;
                }
                if dm.signum() == da.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if let Some(m) = best.filter(on_diag) {
                out.push(DiagonalCrossing {
                    point: m,
                    nearest_tau_k: nearest(m.tau1),
                });
            }
        }
    }
    // Branches meeting at an interval endpoint report the same point.
    out.sort_by(|a, b| a.point.tau1.total_cmp(&b.point.tau1));
    out.dedup_by(|a, b| {
        (a.point.tau1 - b.point.tau1).abs() <= 1e-9 * (1.0 + b.point.tau1)
            && (a.point.y - b.point.y).abs() <= 1e-9 * (1.0 + b.point.y)
    });
    out
}

/// Root counts on both sides of a curve vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingProbe {
    pub point: SwitchingCurvePoint,
    pub epsilon: f64,
    pub normal: [f64; 2],
    pub count_minus: usize,
    pub count_plus: usize,
}

impl CrossingProbe {
    pub fn jump(&self) -> i64 {
        self.count_plus as i64 - self.count_minus as i64
    }
}

/// Count right-half-plane roots at `τ ± ε n` with `n` the normal estimated from
/// the neighboring vertices and `ε = 1e-3 (1 + |τ|)`.
pub fn probe_crossing(
    ctx: &CharacteristicContext,
    polyline: &Polyline,
    index: usize,
) -> Result<CrossingProbe> {
    let pts = &polyline.points;
    if pts.len() < 3 || index == 0 || index + 1 >= pts.len() {
        return Err(Error::Domain("probe needs interior vertices of a polyline"));
    }
    let (a, p, b) = (pts[index - 1], pts[index], pts[index + 1]);
    let (t1, t2) = (b.tau1 - a.tau1, b.tau2 - a.tau2);
    let len = libm::hypot(t1, t2);
    if !(len > 0.0) {
        return Err(Error::Domain("degenerate tangent"));
    }
    let normal = [-t2 / len, t1 / len];
    let epsilon = 1e-3 * (1.0 + libm::hypot(p.tau1, p.tau2));
    let side = |s: f64| {
        (
            p.tau1 + s * epsilon * normal[0],
            p.tau2 + s * epsilon * normal[1],
        )
    };
    let (m1, m2) = side(-1.0);
    let (p1, p2) = side(1.0);
    if m1 < 0.0 || m2 < 0.0 || p1 < 0.0 || p2 < 0.0 {
        return Err(Error::Domain("probe leaves the nonnegative quadrant"));
    }
    let rect = default_box(ctx);
    Ok(CrossingProbe {
        point: p,
        epsilon,
        normal,
        count_minus: rhp_root_count(ctx, m1, m2, &rect)?,
        count_plus: rhp_root_count(ctx, p1, p2, &rect)?,
    })
}
