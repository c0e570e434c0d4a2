//! Continuation of ω-periodic solutions from equilibria of the undelayed,
//! unforced system.
//!
//! An equilibrium `X*` continues to an ω-periodic solution of the forced,
//! delayed system for small forcing amplitude and small delays as long as no
//! eigenvalue of the undelayed Jacobian `M` equals `±2kπi/ω`. [`nonresonance`]
//! certifies that hypothesis and [`find_periodic`] computes the orbit by Newton
//! shooting on the period map, with a Picard iteration on the history when
//! delays are present.

use alloc::vec::Vec;

use crate::dde::{default_step, integrate, History, Trajectory, CLIP};
use crate::equilibria::Equilibrium;
use crate::linear::{characteristic_context, linearize, tau_critical, EqualDelayOutcome};
use crate::math::{ceil, floor, pow_nonneg, round, Mat2, TAU};
use crate::model::{ChemoForcing, Model, State};
use crate::{Complex64, Error, Result};

/// Distance to `2kπi/ω` below which an eigenvalue counts as resonant.
pub const RESONANCE_TOL: f64 = 1e-10;
/// Newton iterations on the shooting map.
pub const MAX_NEWTON: usize = 30;
/// Outer iterations on the history.
pub const MAX_PICARD: usize = 60;
/// Sup-norm change of successive history candidates at convergence.
pub const PICARD_TOL: f64 = 1e-10;
/// Closure defect required of a converged orbit, relative to `1 + sup|X|`.
pub const RESIDUAL_RTOL: f64 = 1e-8;

/// Sign used for the `T f'(T)` term of the `(1,1)` entry of `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixConvention {
    /// `f + T f' - γE`, the Jacobian of the vector field.
    Jacobian,
    /// `f - T f' - γE`.
    AlternativeSign,
}

/// Undelayed Jacobian at `eq`.
pub fn undelayed_matrix(model: &Model, eq: &Equilibrium, convention: MatrixConvention) -> Mat2 {
    let m = linearize(model, eq).total();
    match convention {
        MatrixConvention::Jacobian => m,
        MatrixConvention::AlternativeSign => {
            let t = eq.tumor();
            let mut a = m.0;
            a[0][0] -= 2.0 * model.t_f_prime(t);
            Mat2(a)
        }
    }
}

/// `tr M = -rβT^β - σ/E` at an interior equilibrium.
pub fn interior_trace(model: &Model, eq: &Equilibrium) -> f64 {
    let pr = model.params();
    -pr.r * pr.beta * pow_nonneg(eq.tumor(), pr.beta) - pr.sigma / eq.effector()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonresonanceReport {
    pub eigenvalues: [Complex64; 2],
    /// Smallest `k ≥ 0` hit by an eigenvalue, if any.
    pub resonant_k: Option<i64>,
}

impl NonresonanceReport {
    pub fn nonresonant(&self) -> bool {
        self.resonant_k.is_none()
    }
}

/// Check that no eigenvalue of `m` equals `±2kπi/ω`, `k = 0, 1, 2, ...`.
pub fn nonresonance(m: &Mat2, omega: f64) -> NonresonanceReport {
    let eigenvalues = m.eigenvalues();
    let base = TAU / omega;
    let resonant_k = eigenvalues
        .iter()
        .filter_map(|l| {
            let k = round(l.im / base);
            let target = Complex64::new(0.0, k * base);
            ((*l - target).norm() <= RESONANCE_TOL * (1.0 + target.im.abs()))
                .then_some(k.abs() as i64)
        })
        .min();
    NonresonanceReport {
        eigenvalues,
        resonant_k,
    }
}

/// Upper bounds on `|ε|`, `τ1`, `τ2` for the perturbative regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Smallness {
    pub eps_max: f64,
    pub tau1_max: f64,
    pub tau2_max: f64,
}

impl Smallness {
    /// `ε* = 0.05 b`; `τ* = 0.1 τ_c` at an interior equilibrium with an
    /// equal-delay Hopf point, else `0.1/η`.
    pub fn defaults(model: &Model, eq: &Equilibrium) -> Self {
        let ud = model.with_delays(0.0, 0.0).unwrap_or(*model);
        let tau_c = characteristic_context(&ud, eq)
            .ok()
            .and_then(|ctx| match tau_critical(&ctx) {
                Ok(EqualDelayOutcome::Hopf(hd)) => Some(hd.tau_c),
                _ => None,
            });
        let tau = tau_c.map_or(0.1 / model.params().eta, |t| 0.1 * t);
        Smallness {
            eps_max: 0.05 * model.b(),
            tau1_max: tau,
            tau2_max: tau,
        }
    }
}

/// Everything [`find_periodic`] needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationSetup {
    /// Model carrying the target delays.
    pub model: Model,
    pub equilibrium: Equilibrium,
    pub m: Mat2,
    pub omega: f64,
    pub eps: f64,
    /// `b(t) = b̂ + ε cos(2πt/ω)`.
    pub forcing: ChemoForcing,
    pub smallness: Smallness,
    /// Uniform step, `ω/steps`.
    pub steps: usize,
}

impl ContinuationSetup {
    pub fn new(model: &Model, equilibrium: &Equilibrium, omega: f64, eps: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Domain("omega must be positive"));
        }
        if !eps.is_finite() {
            return Err(Error::Domain("forcing amplitude must be finite"));
        }
        let forcing = ChemoForcing::cosine(model.params().b_hat, eps, omega)?;
        let pr = model.params();
        let h = default_step(pr.tau1, pr.tau2, Some(omega), omega).min(omega / 256.0);
        Ok(ContinuationSetup {
            model: *model,
            equilibrium: *equilibrium,
            m: undelayed_matrix(model, equilibrium, MatrixConvention::Jacobian),
            omega,
            eps,
            forcing,
            smallness: Smallness::defaults(model, equilibrium),
            steps: ceil(omega / h) as usize,
        })
    }

    pub fn with_smallness(mut self, smallness: Smallness) -> Self {
        self.smallness = smallness;
        self
    }

    pub fn h(&self) -> f64 {
        self.omega / self.steps as f64
    }

    pub fn nonresonance(&self) -> NonresonanceReport {
        nonresonance(&self.m, self.omega)
    }

    /// Nonresonance under the alternative sign convention for `M`.
    pub fn alternative_nonresonance(&self) -> NonresonanceReport {
        let alt = undelayed_matrix(
            &self.model,
            &self.equilibrium,
            MatrixConvention::AlternativeSign,
        );
        nonresonance(&alt, self.omega)
    }

    fn delayed(&self) -> bool {
        self.model.tau_max() > 0.0
    }
}

/// One period of a periodic solution, sampled at `t_k = kω/N`, `k < N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbit {
    pub omega: f64,
    pub times: Vec<f64>,
    pub samples: Vec<State>,
    /// Closure defect measured by re-integration.
    pub residual: f64,
    /// `sup |X(t) - X*|`.
    pub amplitude: f64,
    pub newton_iterations: usize,
    pub picard_iterations: usize,
}

impl PeriodicOrbit {
    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.norm_inf()))
    }

    /// `residual ≤ 1e-8 (1 + sup|X|)`.
    pub fn converged(&self) -> bool {
        self.residual <= RESIDUAL_RTOL * (1.0 + self.sup_norm())
    }

    /// Periodic extension, `X(t mod ω)`, by linear interpolation.
    pub fn eval(&self, t: f64) -> State {
        let n = self.samples.len();
        let h = self.omega / n as f64;
        let s = (t - floor(t / self.omega) * self.omega) / h;
        let i = (s as usize).min(n - 1);
        let w = s - i as f64;
        let (a, b) = (self.samples[i], self.samples[(i + 1) % n]);
        a.axpy(w, &b.sub(&a))
    }
}

/// History on `[-τ_max, 0]` taken from the periodic samples, ending at `x0`.
fn orbit_history(samples: &[State], omega: f64, tau_max: f64, x0: State) -> Result<History> {
    let n = samples.len();
    let h = omega / n as f64;
    let back = (ceil(tau_max / h) as usize + 1).min(n);
    let mut times = Vec::with_capacity(back + 1);
    let mut states = Vec::with_capacity(back + 1);
    for j in (1..=back).rev() {
        times.push(-(j as f64) * h);
        states.push(clip(samples[(n - j % n) % n]));
    }
    times.push(0.0);
    states.push(clip(x0));
    History::tabulated(times, states)
}

fn clip(x: State) -> State {
    State::new(x.tumor.max(0.0), x.effector.max(0.0))
}

fn check_positive(x: &State) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::NonFinite { time: 0.0 });
    }
    if x.tumor < -CLIP || x.effector < -CLIP {
        return Err(Error::PositivityLoss);
    }
    Ok(())
}

struct Shooter<'a> {
    setup: &'a ContinuationSetup,
    /// Previous orbit candidate feeding the history (delayed case only).
    candidate: &'a [State],
}

impl Shooter<'_> {
    fn history(&self, x0: State) -> Result<History> {
        if self.setup.delayed() {
            orbit_history(
                self.candidate,
                self.setup.omega,
                self.setup.model.tau_max(),
                x0,
            )
        } else {
            History::constant(clip(x0))
        }
    }

    fn flow(&self, x0: State) -> Result<Trajectory> {
        check_positive(&x0)?;
        let s = self.setup;
        integrate(&s.model, &s.forcing, &self.history(x0)?, s.omega, s.h())
    }

    fn defect(&self, x0: State) -> Result<State> {
        Ok(self.flow(x0)?.last().sub(&x0))
    }

    /// Newton on `Φ_ω(X0) - X0`; returns the fixed point and the iteration count.
    fn newton(&self, mut x: State) -> Result<(State, usize)> {
        for it in 0..MAX_NEWTON {
            let g = self.defect(x)?;
            let scale = 1.0 + x.norm_inf();
            if g.norm_inf() <= 1e-3 * RESIDUAL_RTOL * scale {
                return Ok((x, it));
            }
            let mut cols = [[0.0; 2]; 2];
            for (j, col) in cols.iter_mut().enumerate() {
                let mut v = x.to_array();
                let d = 1e-7 * (1.0 + v[j].abs());
                v[j] += d;
                let gj = self.defect(State::from_array(v))?;
                *col = [(gj.tumor - g.tumor) / d, (gj.effector - g.effector) / d];
            }
            let jac = Mat2::new(cols[0][0], cols[1][0], cols[0][1], cols[1][1]);
            let dx = jac
                .solve([-g.tumor, -g.effector])
                .ok_or(Error::Domain("singular shooting Jacobian"))?;
            // With T = 0 the T-row of the Jacobian is (J11, 0) and g.tumor = 0,
            // so the update leaves T exactly zero.
            let next = State::new(x.tumor + dx[0], x.effector + dx[1]);
            check_positive(&next)?;
            let next = clip(next);
            if next.sub(&x).norm_inf() <= 1e-14 * scale {
                return Ok((next, it + 1));
            }
            x = next;
        }
        Err(Error::NoConvergence {
            method: "shooting newton",
            iterations: MAX_NEWTON,
        })
    }
}

fn sample(traj: &Trajectory, times: &[f64]) -> Result<Vec<State>> {
    times
        .iter()
        .map(|&t| {
            let x = traj
                .eval(t)
                .ok_or(Error::Domain("sample outside trajectory"))?;
            check_positive(&x)?;
            Ok(clip(x))
        })
        .collect()
}

/// Continue the equilibrium to an ω-periodic solution.
pub fn find_periodic(setup: &ContinuationSetup) -> Result<PeriodicOrbit> {
    let report = setup.nonresonance();
    if let Some(k) = report.resonant_k {
        return Err(Error::Resonance { k });
    }
    let sm = &setup.smallness;
    let pr = setup.model.params();
    if setup.eps.abs() > sm.eps_max {
        return Err(Error::Hypothesis(
            "forcing amplitude above the smallness threshold",
        ));
    }
    if pr.tau1 > sm.tau1_max || pr.tau2 > sm.tau2_max {
        return Err(Error::Hypothesis("delays above the smallness threshold"));
    }
    let n = setup.steps;
    let times: Vec<f64> = (0..n).map(|k| k as f64 * setup.h()).collect();
    let x_star = setup.equilibrium.state;
    let mut candidate = alloc::vec![x_star; n];

    if setup.eps == 0.0 && !setup.delayed() {
        return finish(setup, times, candidate, 0, 0);
    }

    let mut x0 = x_star;
    let mut newton_total = 0;
    for picard in 1..=MAX_PICARD {
        let shooter = Shooter {
            setup,
            candidate: &candidate,
        };
        let (x, its) = shooter.newton(x0)?;
        newton_total += its;
        let next = sample(&shooter.flow(x)?, &times)?;
        let change = next
            .iter()
            .zip(&candidate)
            .fold(0.0_f64, |m, (a, b)| m.max(a.sub(b).norm_inf()));
        candidate = next;
        x0 = x;
        if !setup.delayed() || change < PICARD_TOL {
            return finish(setup, times, candidate, newton_total, picard);
        }
    }
    Err(Error::NoConvergence {
        method: "picard history iteration",
        iterations: MAX_PICARD,
    })
}

fn finish(
    setup: &ContinuationSetup,
    times: Vec<f64>,
    samples: Vec<State>,
    newton_iterations: usize,
    picard_iterations: usize,
) -> Result<PeriodicOrbit> {
    let x_star = setup.equilibrium.state;
    let amplitude = samples
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.sub(&x_star).norm_inf()));
    let mut orbit = PeriodicOrbit {
        omega: setup.omega,
        times,
        samples,
        residual: 0.0,
        amplitude,
        newton_iterations,
        picard_iterations,
    };
    orbit.residual = orbit_residual(&orbit, setup)?;
    Ok(orbit)
}

/// Re-integrate one period from the orbit's first sample, with the orbit as
/// history, and return the largest defect against the samples and against
/// `X(0)` at `t = ω`.
pub fn orbit_residual(orbit: &PeriodicOrbit, setup: &ContinuationSetup) -> Result<f64> {
    if orbit.samples.is_empty() {
        return Err(Error::Domain("orbit has no samples"));
    }
    let x0 = orbit.samples[0];
    let history = if setup.delayed() {
        orbit_history(&orbit.samples, orbit.omega, setup.model.tau_max(), x0)?
    } else {
        History::constant(clip(x0))?
    };
    let h = (orbit.omega / orbit.samples.len() as f64).min(setup.h());
    let traj = integrate(&setup.model, &setup.forcing, &history, orbit.omega, h)?;
    let mut defect = traj.last().sub(&x0).norm_inf();
    for (&t, x) in orbit.times.iter().zip(&orbit.samples) {
        let y = traj
            .eval(t)
            .ok_or(Error::Domain("sample outside trajectory"))?;
        defect = defect.max(y.sub(x).norm_inf());
    }
    Ok(defect)
}
