//! Self-check against closed-form constants of the model.

use serde::Serialize;
use tumordde_core::equilibria::interior_equilibrium;
use tumordde_core::equilibria::{
    critical_constants, mu_bifurcation, mu_critical, solve_triangle, t_bifurcation, HContext,
};
use tumordde_core::linear::{
    characteristic_context, tau_critical, tumor_free_verdict, EqualDelayOutcome, StabilityLabel,
};
use tumordde_core::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tolerance {
    Relative,
    Absolute,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub computed: f64,
    pub expected: f64,
    pub error: f64,
    pub tolerance: f64,
    pub kind: Tolerance,
    pub pass: bool,
}

impl Check {
    fn new(
        name: &'static str,
        computed: f64,
        expected: f64,
        tolerance: f64,
        kind: Tolerance,
    ) -> Self {
        let diff = (computed - expected).abs();
        let error = match kind {
            Tolerance::Relative => diff / expected.abs().max(f64::MIN_POSITIVE),
            Tolerance::Absolute => diff,
        };
        Check {
            name,
            computed,
            expected,
            error,
            tolerance,
            kind,
            pass: error <= tolerance,
        }
    }

    fn failed(name: &'static str, expected: f64, tolerance: f64, kind: Tolerance) -> Self {
        Check {
            name,
            computed: f64::NAN,
            expected,
            error: f64::INFINITY,
            tolerance,
            kind,
            pass: false,
        }
    }

    pub fn line(&self) -> String {
        let kind = match self.kind {
            Tolerance::Relative => "rel",
            Tolerance::Absolute => "abs",
        };
        format!(
            "{:<30} computed={:.16e} expected={:.16e} {kind}_err={:.3e} tol={:.1e} {}",
            self.name,
            self.computed,
            self.expected,
            self.error,
            self.tolerance,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

fn hopf_params() -> ModelParams {
    ModelParams {
        r: 1.0,
        beta: 1.0,
        b_hat: 0.0,
        gamma: 1.0,
        sigma: 0.2,
        eta: 1.0,
        p: 4.0,
        m: 1.0,
        g: 1.0,
        a: 0.0,
        tau1: 0.0,
        tau2: 0.0,
    }
}

fn single_root(mu: f64, b: f64, beta: f64, h0: f64) -> Option<f64> {
    let ctx = HContext::new(mu, b, beta, h0).ok()?;
    match solve_triangle(&ctx).as_slice() {
        [r] => Some(r.t),
        _ => None,
    }
}

pub fn run_checks() -> Vec<Check> {
    use Tolerance::{Absolute, Relative};
    let mut out = vec![
        Check::new(
            "mu_c(b=0.8, beta=0.5)",
            mu_critical(0.8, 0.5),
            75.0 / 16.0,
            1e-12,
            Relative,
        ),
        Check::new(
            "mu_bif(b=0.8, beta=0.5)",
            mu_bifurcation(0.8, 0.5),
            25.0 / 4.0,
            1e-12,
            Relative,
        ),
        Check::new(
            "T_bif(b=0.8, beta=0.5)",
            t_bifurcation(0.8, 0.5),
            4.0 / 25.0,
            1e-12,
            Relative,
        ),
    ];

    let slope = HContext::new(-1.5, 0.35, 0.5, 0.0)
        .and_then(|c| c.derivatives(c.t_max()))
        .map(|d| d.d1);
    out.push(match slope {
        Ok(s) => Check::new("h'_mu(b^(1/beta)), mu=-1.5", s, 1.17, 5e-3, Absolute),
        Err(_) => Check::failed("h'_mu(b^(1/beta)), mu=-1.5", 1.17, 5e-3, Absolute),
    });

    let h_r = critical_constants(0.8, 0.5, 25.0 / 4.0).and_then(|c| c.h_r());
    out.push(match h_r {
        Ok(v) => Check::new("H_R(mu_bif)", v, 0.0, 1e-10, Absolute),
        Err(_) => Check::failed("H_R(mu_bif)", 0.0, 1e-10, Absolute),
    });

    // β = 1: μ = 0 gives T = b - σ; μ = -1/b gives T = (1 - √(σ/b)) b.
    out.push(match single_root(0.0, 0.8, 1.0, 0.8 - 0.3) {
        Some(t) => Check::new("T_*(beta=1, mu=0)", t, 0.5, 1e-12, Relative),
        None => Check::failed("T_*(beta=1, mu=0)", 0.5, 1e-12, Relative),
    });
    out.push(match single_root(-1.0 / 0.64, 0.64, 1.0, 0.64 - 0.16) {
        Some(t) => Check::new("T_*(beta=1, mu=-1/b)", t, 0.32, 1e-12, Relative),
        None => Check::failed("T_*(beta=1, mu=-1/b)", 0.32, 1e-12, Relative),
    });

    let tf = ModelParams {
        sigma: 2.0,
        ..hopf_params()
    }
    .validated()
    .map(|m| tumor_free_verdict(&m).label == StabilityLabel::LocallyAsymptoticallyStable);
    out.push(Check::new(
        "tumor-free stable for Delta>0",
        f64::from(u8::from(tf == Ok(true))),
        1.0,
        0.0,
        Absolute,
    ));

    let residual = hopf_params().validated().ok().and_then(|m| {
        let eq = interior_equilibrium(&m).ok()?;
        let ctx = characteristic_context(&m, &eq).ok()?;
        match tau_critical(&ctx).ok()? {
            EqualDelayOutcome::Hopf(h) => Some(h.residual),
            EqualDelayOutcome::DelayIndependent { .. } => None,
        }
    });
    out.push(match residual {
        Some(r) => Check::new("|P(i y_hat, tau_c, tau_c)|", r, 0.0, 1e-10, Absolute),
        None => Check::failed("|P(i y_hat, tau_c, tau_c)|", 0.0, 1e-10, Absolute),
    });
    out
}
