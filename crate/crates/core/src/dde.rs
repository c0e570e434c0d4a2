//! Fixed-step integration of the two-delay system by the method of steps.
//!
//! Each step is classical RK4. Delayed states at `t - τ` are read from the
//! initial history for `t - τ ≤ 0` and otherwise from a cubic Hermite
//! interpolant through the computed knots, so incommensurate delays need no
//! special treatment. The step must satisfy `h ≤ τ/4` for every positive
//! delay, which keeps every delayed read inside the already computed range.
//!
//! The uniform grid `t = i h` is merged with the derivative breakpoints
//! `s + iτ1 + jτ2` (`i + j ≤ 4`) spawned by the kink at `t = 0` and by the
//! knots of a tabulated history, so no step straddles a low-order jump and
//! the scheme keeps its fourth order.

use alloc::vec::Vec;

use crate::math::{exp, floor, pow};
use crate::model::{ChemoForcing, Model, State};
use crate::{Error, Result};

/// Values in `[-CLIP, 0)` are treated as roundoff and set to zero.
pub const CLIP: f64 = 1e-12;

/// Initial data on `[-τ_max, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub enum History {
    Constant(State),
    /// Linear interpolation through `(time, state)` samples; times increase
    /// and the last one is `0`. Constant extrapolation before the first sample.
    Tabulated {
        times: Vec<f64>,
        states: Vec<State>,
    },
}

fn check_state(x: &State) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Domain("history values must be finite"));
    }
    if x.tumor < 0.0 || x.effector < 0.0 {
        return Err(Error::Domain("history values must be nonnegative"));
    }
    Ok(())
}

impl History {
    pub fn constant(x: State) -> Result<Self> {
        check_state(&x)?;
        Ok(History::Constant(x))
    }

    pub fn tabulated(times: Vec<f64>, states: Vec<State>) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(Error::Domain("history needs matching, nonempty samples"));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) || *times.last().unwrap() != 0.0 {
            return Err(Error::Domain("history times must increase and end at 0"));
        }
        for x in &states {
            check_state(x)?;
        }
        Ok(History::Tabulated { times, states })
    }

    /// `Ψ(s)` for `s ≤ 0`.
    pub fn eval(&self, s: f64) -> State {
        match self {
            History::Constant(x) => *x,
            History::Tabulated { times, states } => {
                if s <= times[0] {
                    return states[0];
                }
                let n = times.len();
                if s >= times[n - 1] {
                    return states[n - 1];
                }
                let j = times.partition_point(|&t| t <= s).max(1);
                let (t0, t1) = (times[j - 1], times[j]);
                let w = (s - t0) / (t1 - t0);
                let (a, b) = (states[j - 1], states[j]);
                State::new(
                    (1.0 - w) * a.tumor + w * b.tumor,
                    (1.0 - w) * a.effector + w * b.effector,
                )
            }
        }
    }

    pub fn initial(&self) -> State {
        self.eval(0.0)
    }

    /// `sup Ψ₁` over the history.
    pub fn sup_tumor(&self) -> f64 {
        match self {
            History::Constant(x) => x.tumor,
            History::Tabulated { states, .. } => states.iter().fold(0.0_f64, |m, x| m.max(x.tumor)),
        }
    }
}

/// Roundoff bookkeeping of a run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    /// Components in `[-CLIP, 0)` set to zero.
    pub clipped: usize,
    /// Components below `-CLIP` (left untouched).
    pub positivity_violations: usize,
    pub first_violation_time: Option<f64>,
    pub min_tumor: f64,
    pub min_effector: f64,
}

/// Knots `t_i`, states and vector-field values, plus the data needed to
/// evaluate the solution anywhere on `[-τ_max, t_end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub derivatives: Vec<State>,
    pub h: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub history: History,
    pub diagnostics: Diagnostics,
}

fn hermite(t0: f64, t1: f64, x0: State, x1: State, d0: State, d1: State, t: f64) -> State {
    let dt = t1 - t0;
    let s = (t - t0) / dt;
    let (s2, s3) = (s * s, s * s * s);
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let c = |a: f64, b: f64, da: f64, db: f64| h00 * a + h10 * dt * da + h01 * b + h11 * dt * db;
    State::new(
        c(x0.tumor, x1.tumor, d0.tumor, d1.tumor),
        c(x0.effector, x1.effector, d0.effector, d1.effector),
    )
}

/// Dense evaluation over computed knots; `None` past the last knot.
fn dense(
    times: &[f64],
    states: &[State],
    derivs: &[State],
    history: &History,
    t: f64,
) -> Option<State> {
    if t <= 0.0 {
        return Some(history.eval(t));
    }
    let last = *times.last()?;
    if t > last || times.len() < 2 {
        return None;
    }
    let i = times.partition_point(|&x| x < t).clamp(1, times.len() - 1) - 1;
    Some(hermite(
        times[i],
        times[i + 1],
        states[i],
        states[i + 1],
        derivs[i],
        derivs[i + 1],
        t,
    ))
}

impl Trajectory {
    /// Solution value at any `t ≤ t_end`.
    pub fn eval(&self, t: f64) -> Option<State> {
        if self.times.len() < 2 {
            return if t <= 0.0 {
                Some(self.history.eval(t))
            } else {
                None
            };
        }
        dense(
            &self.times,
            &self.states,
            &self.derivatives,
            &self.history,
            t,
        )
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn last(&self) -> State {
        *self.states.last().expect("trajectory has its initial knot")
    }
}

/// `min(τ1, τ2, q)/128` over the positive ones, else `t_end/10⁵`.
pub fn default_step(tau1: f64, tau2: f64, period: Option<f64>, t_end: f64) -> f64 {
    let m = [tau1, tau2, period.unwrap_or(0.0)]
        .into_iter()
        .filter(|v| *v > 0.0)
        .fold(f64::INFINITY, f64::min);
    if m.is_finite() {
        m / 128.0
    } else {
        t_end / 1e5
    }
}

fn check_step(model: &Model, forcing: &ChemoForcing, t_end: f64, h: f64) -> Result<()> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::Domain("t_end must be positive"));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain("step size must be positive"));
    }
    let pr = model.params();
    for tau in [pr.tau1, pr.tau2] {
        if tau > 0.0 && h > tau / 4.0 {
            return Err(Error::StepSize {
                h,
                limit: tau / 4.0,
            });
        }
    }
    if let Some(q) = forcing.period() {
        if h > q / 100.0 {
            return Err(Error::StepSize {
                h,
                limit: q / 100.0,
            });
        }
    }
    Ok(())
}

/// Jump locations of low-order derivatives in `(0, t_end)`.
pub fn breakpoints(tau1: f64, tau2: f64, history: &History, t_end: f64) -> Vec<f64> {
    let mut sources = alloc::vec![0.0];
    if let History::Tabulated { times, .. } = history {
        sources.extend(times.iter().copied().filter(|&s| s < 0.0));
    }
    let taus: Vec<f64> = [tau1, tau2].into_iter().filter(|&t| t > 0.0).collect();
    let mut out = Vec::new();
    for &s0 in &sources {
        match taus.as_slice() {
            [] => {}
            [a] => out.extend((1..=4).map(|i| s0 + i as f64 * a)),
            [a, b] => {
                for i in 0..=4u32 {
                    for j in 0..=(4 - i) {
                        if i + j > 0 {
                            out.push(s0 + i as f64 * a + j as f64 * b);
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
    }
    out.retain(|&t| t > 0.0 && t < t_end);
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * t_end);
    out
}

/// Uniform points `i h`, `t_end` and the breakpoints; uniform points closer
/// than `h/100` to a breakpoint are dropped.
fn step_grid(h: f64, t_end: f64, bps: &[f64]) -> Vec<f64> {
    let n_full = floor(t_end / h) as usize;
    let mut grid: Vec<f64> = (0..=n_full).map(|i| i as f64 * h).collect();
    if t_end - n_full as f64 * h > 1e-12 * h {
        grid.push(t_end);
    } else {
        *grid.last_mut().expect("grid has t = 0") = t_end;
    }
    if bps.is_empty() {
        return grid;
    }
    let near = |t: f64| {
        let j = bps.partition_point(|&b| b < t);
        let below = j.checked_sub(1).map(|k| t - bps[k]);
        let above = bps.get(j).map(|b| b - t);
        below.into_iter().chain(above).any(|d| d < 0.01 * h)
    };
    let mut merged: Vec<f64> = grid
        .iter()
        .copied()
        .enumerate()
        .filter(|&(i, t)| i == 0 || i == grid.len() - 1 || !near(t))
        .map(|(_, t)| t)
        .collect();
    merged.extend(bps.iter().copied().filter(|&b| (t_end - b) >= 0.01 * h));
    merged.sort_by(f64::total_cmp);
    merged.dedup();
    merged
}

/// Integrate from the history on `[-τ_max, 0]` up to `t_end` with step `h`.
pub fn integrate(
    model: &Model,
    forcing: &ChemoForcing,
    history: &History,
    t_end: f64,
    h: f64,
) -> Result<Trajectory> {
    check_step(model, forcing, t_end, h)?;
    let (tau1, tau2) = (model.params().tau1, model.params().tau2);
    let grid = step_grid(h, t_end, &breakpoints(tau1, tau2, history, t_end));
    let cap = grid.len();
    let mut times = Vec::with_capacity(cap);
    let mut states = Vec::with_capacity(cap);
    let mut derivs: Vec<State> = Vec::with_capacity(cap);
    let mut diag = Diagnostics {
        min_tumor: f64::INFINITY,
        min_effector: f64::INFINITY,
        ..Diagnostics::default()
    };

    let x0 = history.initial();
    times.push(0.0);
    states.push(x0);

    // State at t - τ; τ = 0 means the current stage state.
    let lookup =
        |times: &[f64], states: &[State], derivs: &[State], t: f64, tau: f64, cur: State| {
            if tau == 0.0 {
                return cur;
            }
            let s = t - tau;
            if s <= 0.0 || times.len() < 2 {
                return history.eval(s.min(0.0));
            }
            dense(times, states, derivs, history, s).unwrap_or(cur)
        };
    let field = |times: &[f64], states: &[State], derivs: &[State], t: f64, x: State| {
        let x1 = lookup(times, states, derivs, t, tau1, x);
        let x2 = lookup(times, states, derivs, t, tau2, x);
        model.rhs(t, x, x1, x2, forcing)
    };
    derivs.push(field(&times, &states, &derivs, 0.0, x0));
    diag.min_tumor = x0.tumor;
    diag.min_effector = x0.effector;

    for i in 0..grid.len() - 1 {
        let (t, t_next) = (grid[i], grid[i + 1]);
        let step = t_next - t;
        let x = states[i];
        let k1 = derivs[i];
        let k2 = field(
            &times,
            &states,
            &derivs,
            t + 0.5 * step,
            x.axpy(0.5 * step, &k1),
        );
        let k3 = field(
            &times,
            &states,
            &derivs,
            t + 0.5 * step,
            x.axpy(0.5 * step, &k2),
        );
        let k4 = field(&times, &states, &derivs, t + step, x.axpy(step, &k3));
        let mut next = State::new(
            x.tumor + step / 6.0 * (k1.tumor + 2.0 * k2.tumor + 2.0 * k3.tumor + k4.tumor),
            x.effector
                + step / 6.0 * (k1.effector + 2.0 * k2.effector + 2.0 * k3.effector + k4.effector),
        );
        if !next.is_finite() {
            return Err(Error::NonFinite { time: t_next });
        }
        for v in [&mut next.tumor, &mut next.effector] {
            if *v < -CLIP {
                diag.positivity_violations += 1;
                diag.first_violation_time.get_or_insert(t_next);
            } else if *v < 0.0 {
                *v = 0.0;
                diag.clipped += 1;
            }
        }
        diag.min_tumor = diag.min_tumor.min(next.tumor);
        diag.min_effector = diag.min_effector.min(next.effector);
        times.push(t_next);
        states.push(next);
        // Knot derivative for the Hermite interpolant; every delayed read is
        // at or before t_next, already covered by the previous knots.
        let d = field(&times, &states, &derivs, t_next, next);
        derivs.push(d);
    }
    Ok(Trajectory {
        times,
        states,
        derivatives: derivs,
        h,
        tau1,
        tau2,
        history: history.clone(),
        diagnostics: diag,
    })
}

/// A-priori bounds on a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    /// Bound on `T(t)`, `t ≥ 0`.
    pub t_max: f64,
    /// Growth rate of the effector bound.
    pub kappa: f64,
    pub e0: f64,
    pub sigma: f64,
}

impl Envelope {
    /// `T_M = max{T(0), ((1 - β b_min))^{1/β}}` and `κ = p h(T_M) - η`, or
    /// `κ = -η` when the delays coincide and `m ≥ p`. The delayed reads use
    /// the larger of `T_M` and the history's supremum.
    pub fn new(model: &Model, forcing: &ChemoForcing, history: &History) -> Self {
        let pr = model.params();
        let x0 = history.initial();
        let cap = 1.0 - pr.beta * forcing.min_level();
        let logistic = if cap > 0.0 {
            pow(cap, 1.0 / pr.beta)
        } else {
            0.0
        };
        let t_max = x0.tumor.max(logistic);
        let t_read = t_max.max(history.sup_tumor());
        let kappa = if pr.tau1 == pr.tau2 && pr.m >= pr.p {
            -pr.eta
        } else {
            pr.p * model.h(t_read) - pr.eta
        };
        Envelope {
            t_max,
            kappa,
            e0: x0.effector,
            sigma: pr.sigma,
        }
    }

    /// `e^{κt} (E(0) + σ ∫₀ᵗ e^{-κs} ds)`.
    pub fn effector_bound(&self, t: f64) -> f64 {
        let k = self.kappa;
        if k == 0.0 {
            self.e0 + self.sigma * t
        } else {
            let g = exp(k * t);
            self.e0 * g + self.sigma * (g - 1.0) / k
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeReport {
    pub envelope: Envelope,
    pub tumor_violations: usize,
    pub effector_violations: usize,
    /// Largest `T - T_M` (negative when dominated everywhere).
    pub max_tumor_excess: f64,
    pub max_effector_excess: f64,
}

impl EnvelopeReport {
    pub fn violations(&self) -> usize {
        self.tumor_violations + self.effector_violations
    }
}

const ENVELOPE_RTOL: f64 = 1e-9;

/// Check every knot against the a-priori bounds.
pub fn envelope_check(traj: &Trajectory, model: &Model, forcing: &ChemoForcing) -> EnvelopeReport {
    let env = Envelope::new(model, forcing, &traj.history);
    envelope_check_samples(&env, &traj.times, &traj.states)
}

/// Same check on arbitrary samples.
pub fn envelope_check_samples(env: &Envelope, times: &[f64], states: &[State]) -> EnvelopeReport {
    let mut rep = EnvelopeReport {
        envelope: *env,
        tumor_violations: 0,
        effector_violations: 0,
        max_tumor_excess: f64::NEG_INFINITY,
        max_effector_excess: f64::NEG_INFINITY,
    };
    for (&t, x) in times.iter().zip(states) {
        let dt = x.tumor - env.t_max;
        let eb = env.effector_bound(t);
        let de = x.effector - eb;
        rep.max_tumor_excess = rep.max_tumor_excess.max(dt);
        rep.max_effector_excess = rep.max_effector_excess.max(de);
        if dt > ENVELOPE_RTOL * env.t_max.max(1.0) {
            rep.tumor_violations += 1;
        }
        if de > ENVELOPE_RTOL * eb.max(1.0) {
            rep.effector_violations += 1;
        }
    }
    rep
}

/// Long-time behavior read off the last tenth of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Asymptotics {
    Converged { distance: f64 },
    LimitCycle { amplitude: f64, period: f64 },
    Diverged,
    Undecided,
}

const CONVERGED_TOL: f64 = 1e-6;
const CYCLE_RTOL: f64 = 0.01;
const CYCLE_PEAKS: usize = 10;
const DIVERGED: f64 = 1e8;

/// Classify the terminal window; `equilibrium` enables the distance test.
pub fn asymptotics(traj: &Trajectory, equilibrium: Option<State>) -> Asymptotics {
    let n = traj.states.len();
    if n < 20 {
        return Asymptotics::Undecided;
    }
    let start = n - n / 10;
    let window = &traj.states[start..];
    let times = &traj.times[start..];
    if window
        .iter()
        .any(|x| !x.is_finite() || x.norm_inf() > DIVERGED)
    {
        return Asymptotics::Diverged;
    }
    if let Some(eq) = equilibrium {
        let distance = window
            .iter()
            .map(|x| x.sub(&eq).norm_inf())
            .fold(0.0, f64::max);
        if distance < CONVERGED_TOL {
            return Asymptotics::Converged { distance };
        }
    } else {
        let (lo, hi) = window
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x.tumor), hi.max(x.tumor))
            });
        let (elo, ehi) = window
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x.effector), hi.max(x.effector))
            });
        if hi - lo < CONVERGED_TOL && ehi - elo < CONVERGED_TOL {
            return Asymptotics::Converged {
                distance: (hi - lo).max(ehi - elo),
            };
        }
    }
    match cycle(times, window) {
        Some((amplitude, period)) => Asymptotics::LimitCycle { amplitude, period },
        None => Asymptotics::Undecided,
    }
}

/// Peak detection on `T` with parabolic refinement; `(amplitude, period)` when
/// the last peaks repeat to within 1% in height above the preceding trough
/// and in spacing.
fn cycle(times: &[f64], xs: &[State]) -> Option<(f64, f64)> {
    let v: Vec<f64> = xs.iter().map(|x| x.tumor).collect();
    let mut peaks: Vec<(f64, f64, usize)> = Vec::new();
    for i in 1..v.len() - 1 {
        if v[i] > v[i - 1] && v[i] >= v[i + 1] {
            let (a, b, c) = (v[i - 1], v[i], v[i + 1]);
            let denom = a - 2.0 * b + c;
            let off = if denom != 0.0 {
                0.5 * (a - c) / denom
            } else {
                0.0
            };
            let dt = times[i + 1] - times[i];
            let t = times[i] + off * dt;
            let val = b - 0.25 * (a - c) * off;
            peaks.push((t, val, i));
        }
    }
    if peaks.len() < CYCLE_PEAKS + 1 {
        return None;
    }
    let tail = &peaks[peaks.len() - CYCLE_PEAKS - 1..];
    let mut amps = Vec::with_capacity(CYCLE_PEAKS);
    let mut gaps = Vec::with_capacity(CYCLE_PEAKS);
    for w in tail.windows(2) {
        let trough = v[w[0].2..=w[1].2]
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        amps.push(w[1].1 - trough);
        gaps.push(w[1].0 - w[0].0);
    }
    let spread = |xs: &[f64]| {
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let (alo, ahi) = spread(&amps);
    let (glo, ghi) = spread(&gaps);
    if !(alo > CONVERGED_TOL) || ahi - alo > CYCLE_RTOL * ahi || ghi - glo > CYCLE_RTOL * ghi {
        return None;
    }
    let period = gaps.iter().sum::<f64>() / gaps.len() as f64;
    Some((0.5 * amps.iter().sum::<f64>() / amps.len() as f64, period))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    fn model(tau1: f64, tau2: f64) -> Model {
        ModelParams {
            r: 1.0,
            beta: 0.5,
            b_hat: 0.4,
            gamma: 1.0,
            sigma: 0.3,
            eta: 0.8,
            p: 1.2,
            m: 1.0,
            g: 1.0,
            a: 0.1,
            tau1,
            tau2,
        }
        .validated()
        .unwrap()
    }

    #[test]
    fn history_validation_and_interpolation() {
        assert!(History::constant(State::new(-1.0, 0.0)).is_err());
        assert!(
            History::tabulated(alloc::vec![-1.0, -0.5], alloc::vec![State::default(); 2]).is_err()
        );
        let h = History::tabulated(
            alloc::vec![-1.0, 0.0],
            alloc::vec![State::new(0.0, 1.0), State::new(1.0, 3.0)],
        )
        .unwrap();
        assert_eq!(h.eval(-0.5), State::new(0.5, 2.0));
        assert_eq!(h.eval(-5.0), State::new(0.0, 1.0));
        assert_eq!(h.sup_tumor(), 1.0);
    }

    #[test]
    fn step_size_preconditions() {
        let m = model(0.4, 0.0);
        let f = m.constant_forcing();
        let h = History::constant(State::new(0.1, 0.1)).unwrap();
        assert!(matches!(
            integrate(&m, &f, &h, 1.0, 0.2),
            Err(Error::StepSize { .. })
        ));
        assert!(integrate(&m, &f, &h, 1.0, 0.1).is_ok());
        let periodic = ChemoForcing::cosine(0.4, 0.05, 1.0).unwrap();
        assert!(matches!(
            integrate(&m, &periodic, &h, 1.0, 0.05),
            Err(Error::StepSize { .. })
        ));
        assert_eq!(default_step(0.0, 0.0, None, 10.0), 1e-4);
        assert_eq!(default_step(0.5, 0.25, Some(2.0), 10.0), 0.25 / 128.0);
    }

    #[test]
    fn partial_final_step_lands_on_t_end() {
        let m = model(0.0, 0.0);
        let h = History::constant(State::new(0.1, 0.1)).unwrap();
        let tr = integrate(&m, &m.constant_forcing(), &h, 1.05, 0.1).unwrap();
        assert_eq!(tr.t_end(), 1.05);
        assert_eq!(tr.times.len(), 12);
    }

    #[test]
    fn tumor_free_point_is_preserved() {
        let m = model(0.3, 0.7);
        let x = State::new(0.0, m.effector_free());
        let h = History::constant(x).unwrap();
        let tr = integrate(&m, &m.constant_forcing(), &h, 100.0, 0.01).unwrap();
        for s in &tr.states {
            assert!(s.sub(&x).norm_inf() <= 1e-12);
        }
    }

    #[test]
    fn effector_relaxes_at_rate_eta() {
        let m = model(0.3, 0.7);
        let e0 = 2.0;
        let h = History::constant(State::new(0.0, e0)).unwrap();
        let tr = integrate(&m, &m.constant_forcing(), &h, 10.0, 0.01).unwrap();
        let eta = m.params().eta;
        let es = m.effector_free();
        for (&t, x) in tr.times.iter().zip(&tr.states) {
            assert_eq!(x.tumor, 0.0);
            let exact = es + (e0 - es) * exp(-eta * t);
            assert!((x.effector - exact).abs() < 1e-9);
        }
        // Dense output between knots.
        let t = 3.3333;
        let exact = es + (e0 - es) * exp(-eta * t);
        assert!((tr.eval(t).unwrap().effector - exact).abs() < 1e-9);
    }

    #[test]
    fn fourth_order_convergence() {
        let m = model(0.37, 0.91);
        let f = ChemoForcing::cosine(0.4, 0.05, 3.0).unwrap();
        let hist = History::tabulated(
            alloc::vec![-1.0, -0.4, 0.0],
            alloc::vec![
                State::new(0.2, 0.4),
                State::new(0.3, 0.3),
                State::new(0.25, 0.35)
            ],
        )
        .unwrap();
        let t_end = 5.0;
        let run = |h: f64| integrate(&m, &f, &hist, t_end, h).unwrap().last();
        let h0 = 0.37 / 16.0;
        let reference = run(h0 / 16.0);
        let e1 = run(h0).sub(&reference).norm_inf();
        let e2 = run(h0 / 2.0).sub(&reference).norm_inf();
        assert!(e1 / e2 >= 12.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn envelope_dominates_and_flags_corruption() {
        let m = model(0.5, 1.2);
        let f = ChemoForcing::cosine(0.4, 0.1, 2.0).unwrap();
        let hist = History::constant(State::new(0.9, 0.0)).unwrap();
        let tr = integrate(&m, &f, &hist, 30.0, 0.01).unwrap();
        let rep = envelope_check(&tr, &m, &f);
        assert_eq!(rep.violations(), 0, "{rep:?}");
        let mut bad = tr.states.clone();
        bad[100].tumor = rep.envelope.t_max + 0.1;
        let rep = envelope_check_samples(&rep.envelope, &tr.times, &bad);
        assert_eq!(rep.tumor_violations, 1);
    }

    #[test]
    fn zero_effector_envelope_closed_form() {
        let env = Envelope {
            t_max: 1.0,
            kappa: 0.5,
            e0: 0.0,
            sigma: 0.3,
        };
        let t: f64 = 2.0;
        assert!((env.effector_bound(t) - 0.3 / 0.5 * (exp(0.5 * t) - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn asymptotics_classifies_synthetic_signals() {
        let times: Vec<f64> = (0..200_000).map(|i| i as f64 * 0.01).collect();
        let mk = |f: &dyn Fn(f64) -> f64| Trajectory {
            states: times.iter().map(|&t| State::new(f(t), 1.0)).collect(),
            derivatives: alloc::vec![State::default(); times.len()],
            times: times.clone(),
            h: 0.01,
            tau1: 0.0,
            tau2: 0.0,
            history: History::Constant(State::default()),
            diagnostics: Diagnostics::default(),
        };
        let cyc = mk(&|t| 0.5 + 0.1 * libm::sin(t));
        match asymptotics(&cyc, Some(State::new(0.5, 1.0))) {
            Asymptotics::LimitCycle { amplitude, period } => {
                assert!((amplitude - 0.1).abs() < 1e-3);
                assert!((period - crate::math::TAU).abs() < 1e-2);
            }
            other => panic!("{other:?}"),
        }
        let still = mk(&|_| 0.5);
        assert!(matches!(
            asymptotics(&still, Some(State::new(0.5, 1.0))),
            Asymptotics::Converged { .. }
        ));
        let decay = mk(&|t| 0.5 + exp(-0.002 * t) * libm::sin(t));
        assert_eq!(
            asymptotics(&decay, Some(State::new(0.5, 1.0))),
            Asymptotics::Undecided
        );
    }

    #[test]
    fn order_holds_for_incommensurate_delays() {
        let f = ChemoForcing::cosine(0.4, 0.05, 30.0).unwrap();
        let hist = History::constant(State::new(0.25, 0.35)).unwrap();
        for (t1, t2) in [(0.37, 0.91), (0.0, 0.91), (0.91, 0.91), (0.53, 0.29)] {
            let m = model(t1, t2);
            let run = |h: f64| integrate(&m, &f, &hist, 5.0, h).unwrap().last();
            let h0 = 0.29 / 4.0;
            let reference = run(h0 / 16.0);
            let e1 = run(h0).sub(&reference).norm_inf();
            let e2 = run(h0 / 2.0).sub(&reference).norm_inf();
            assert!(e1 / e2 >= 12.0, "({t1}, {t2}): ratio {}", e1 / e2);
        }
    }

    #[test]
    fn breakpoints_cover_delay_combinations() {
        let hist = History::constant(State::default()).unwrap();
        let b = breakpoints(1.0, 1.5, &hist, 3.2);
        assert_eq!(b, alloc::vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert!(breakpoints(0.0, 0.0, &hist, 3.0).is_empty());
    }
}
