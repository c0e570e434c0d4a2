use std::path::PathBuf;

use serde_json::{json, Value};
use tumordde_core::dde::{asymptotics, default_step, envelope_check, integrate, Asymptotics};
use tumordde_core::equilibria::{
    all_equilibria, equilibrium_residual, tumor_free, Equilibrium, EquilibriumKind,
    LabeledEquilibrium, DEFAULT_A_THRESHOLD,
};
use tumordde_core::linear::{
    characteristic_context, d_star_verdict, default_box, hopf_verdict, linearize, rhp_root_count,
    tau_critical, tumor_free_verdict, zero_delay_verdict, CharacteristicContext, EqualDelayOutcome,
    StabilityLabel, StabilityVerdict, Witness,
};
use tumordde_core::periodic::{find_periodic, ContinuationSetup, Smallness};
use tumordde_core::switching::{
    default_y_grid, diagonal_crossings, feasible_set, trace_curves, TraceOptions,
};
use tumordde_core::{Complex64, Model, State};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{self, csv, num, Diagnostic};

/// Output options common to every analysis subcommand.
pub struct OutputArgs {
    pub out: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<Format>,
}

impl OutputArgs {
    fn dir(&self, cfg: &RunConfig) -> PathBuf {
        cfg.out_dir(self.out_dir.as_deref())
    }

    /// Explicit target, if any: `--out`, or the default name under an
    /// explicitly chosen directory.
    fn optional_target(&self, cfg: &RunConfig, default: &str) -> Option<PathBuf> {
        let dir_chosen = self.out_dir.is_some()
            || std::env::var_os(crate::config::OUT_DIR_ENV).is_some_and(|v| !v.is_empty())
            || cfg.output.dir.is_some();
        (self.out.is_some() || dir_chosen)
            .then(|| output::resolve(&self.dir(cfg), self.out.as_deref(), default))
    }

    fn target(&self, cfg: &RunConfig, default: &str) -> PathBuf {
        output::resolve(&self.dir(cfg), self.out.as_deref(), default)
    }
}

fn complex(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn kind_str(kind: EquilibriumKind) -> &'static str {
    match kind {
        EquilibriumKind::TumorFree => "tumor_free",
        EquilibriumKind::Interior => "interior",
    }
}

fn diagnostics_json(d: &[Diagnostic]) -> Value {
    serde_json::to_value(d).expect("diagnostics serialize")
}

fn equilibria_of(
    cfg: &RunConfig,
    model: &Model,
    a_threshold: Option<f64>,
) -> Result<Vec<LabeledEquilibrium>, CliError> {
    let thr = a_threshold
        .or(cfg.equilibria.a_threshold)
        .unwrap_or(DEFAULT_A_THRESHOLD);
    Ok(all_equilibria(model, thr)?)
}

fn interior(list: &[LabeledEquilibrium], index: usize) -> Result<Equilibrium, CliError> {
    list.iter()
        .map(|l| l.equilibrium)
        .filter(|e| e.kind == EquilibriumKind::Interior)
        .nth(index)
        .ok_or_else(|| CliError::Domain(format!("no interior equilibrium with index {index}")))
}

pub fn equilibria(
    cfg: &RunConfig,
    a_threshold: Option<f64>,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let model = cfg.model(None, None)?;
    let list = equilibria_of(cfg, &model, a_threshold)?;
    let mut diags = Vec::new();
    for l in list.iter().filter(|l| !l.equilibrium.simple) {
        diags.push(Diagnostic::new(
            "degenerate_root",
            format!("tangential root at T = {}", l.equilibrium.tumor()),
        ));
    }
    let rows: Vec<Value> = list
        .iter()
        .map(|l| {
            let e = &l.equilibrium;
            json!({
                "kind": kind_str(e.kind),
                "T": e.tumor(),
                "E": e.effector(),
                "simple": e.simple,
                "case_label": l.case_label,
                "residual": equilibrium_residual(&model, e.state),
            })
        })
        .collect();
    match cfg.format(out.format, Format::Json) {
        Format::Json => {
            let value = json!({"equilibria": rows, "diagnostics": diagnostics_json(&diags)});
            output::emit_json(
                out.optional_target(cfg, "equilibria.json").as_deref(),
                &value,
            )
        }
        Format::Csv => {
            let table: Vec<Vec<String>> = list
                .iter()
                .map(|l| {
                    let e = &l.equilibrium;
                    vec![
                        kind_str(e.kind).into(),
                        num(e.tumor()),
                        num(e.effector()),
                        e.simple.to_string(),
                        l.case_label.clone(),
                    ]
                })
                .collect();
            let path = out.target(cfg, "equilibria.csv");
            output::write_atomic(
                &path,
                csv(&["kind", "T", "E", "simple", "case_label"], &table).as_bytes(),
            )?;
            let side = output::sidecar_path(&path);
            output::write_atomic(
                &side,
                output::json_text(
                    &json!({"params": cfg.params, "diagnostics": diagnostics_json(&diags)}),
                )
                .as_bytes(),
            )?;
            print!("{}", output::report_written(&[&path, &side]));
            Ok(())
        }
    }
}

fn witness_json(w: &Witness) -> Value {
    match *w {
        Witness::TumorFree { delta, roots } => {
            json!({"type": "tumor_free", "delta": delta, "roots": roots})
        }
        Witness::DStar { d_star, real_root } => {
            json!({"type": "d_star", "d_star": d_star, "real_root": real_root})
        }
        Witness::ZeroDelay {
            trace,
            det,
            eigenvalues,
        } => json!({
            "type": "zero_delay",
            "trace": trace,
            "det": det,
            "eigenvalues": [complex(eigenvalues[0]), complex(eigenvalues[1])],
        }),
        Witness::TauInterval { lo, hi } => {
            json!({"type": "tau_interval", "lo": lo, "hi": if hi.is_finite() { json!(hi) } else { Value::Null }})
        }
    }
}

fn count_roots(ctx: &CharacteristicContext, t1: f64, t2: f64) -> tumordde_core::Result<usize> {
    rhp_root_count(ctx, t1, t2, &default_box(ctx))
}

/// Verdict at the configured delays: undelayed matrix, `D* < 0`, the
/// equal-delay Hopf analysis, or else an argument-principle count.
fn interior_verdict(
    model: &Model,
    eq: &Equilibrium,
    ctx: &CharacteristicContext,
    diags: &mut Vec<Diagnostic>,
) -> (StabilityLabel, Value, &'static str) {
    let pr = model.params();
    let (t1, t2) = (pr.tau1, pr.tau2);
    let from = |v: StabilityVerdict| (v.label, witness_json(&v.witness));
    if t1 == 0.0 && t2 == 0.0 {
        let (l, w) = from(zero_delay_verdict(&linearize(model, eq).total()));
        return (l, w, "zero_delay");
    }
    let ds = d_star_verdict(ctx, t1, t2);
    if ds.label == StabilityLabel::Unstable {
        let (l, w) = from(ds);
        return (l, w, "d_star");
    }
    if t1 == t2 {
        match hopf_verdict(ctx, t1) {
            Ok(h) => {
                let (l, w) = from(h.verdict);
                return (l, w, "equal_delay_hopf");
            }
            Err(e) => diags.push(Diagnostic::new("hypothesis_status", e.to_string())),
        }
    }
    match count_roots(ctx, t1, t2) {
        Ok(n) => {
            let label = if n == 0 {
                StabilityLabel::LocallyAsymptoticallyStable
            } else {
                StabilityLabel::Unstable
            };
            (
                label,
                json!({"type": "root_count", "count": n}),
                "root_count",
            )
        }
        Err(e) => {
            diags.push(Diagnostic::new("root_count_failed", e.to_string()));
            (StabilityLabel::Inconclusive, Value::Null, "root_count")
        }
    }
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, |v| json!(v))
}

pub fn stability(
    cfg: &RunConfig,
    tau1: Option<f64>,
    tau2: Option<f64>,
    out: &OutputArgs,
) -> Result<(), CliError> {
    if out.format == Some(Format::Csv) {
        return Err(CliError::Usage("stability emits JSON only".into()));
    }
    let model = cfg.model(tau1, tau2)?;
    let pr = *model.params();
    let list = equilibria_of(cfg, &model, None)?;
    let mut diags = Vec::new();
    let mut entries = Vec::new();
    for l in &list {
        let eq = &l.equilibrium;
        let mut local = Vec::new();
        let entry = match eq.kind {
            EquilibriumKind::TumorFree => {
                let v = tumor_free_verdict(&model);
                let Witness::TumorFree { delta, .. } = v.witness else {
                    unreachable!()
                };
                json!({
                    "kind": "tumor_free", "T": eq.tumor(), "E": eq.effector(),
                    "label": v.label.as_str(), "method": "tumor_free_delta",
                    "delta": delta, "d_star": null, "lambda1": null, "lambda2": null,
                    "tau_a": null, "y_hat": null, "tau_c": null,
                    "witness": witness_json(&v.witness),
                })
            }
            EquilibriumKind::Interior => {
                let ctx = characteristic_context(&model, eq)?;
                let (tau_a, y_hat, tau_c) = match tau_critical(&ctx) {
                    Ok(EqualDelayOutcome::Hopf(h)) => (Some(h.tau_a), Some(h.y_hat), Some(h.tau_c)),
                    Ok(EqualDelayOutcome::DelayIndependent { .. }) => {
                        local.push(Diagnostic::new(
                            "delay_independent",
                            "lambda1*lambda2 >= |N|: no equal-delay crossing",
                        ));
                        (None, None, None)
                    }
                    Err(e) => {
                        local.push(Diagnostic::new("hypothesis_status", e.to_string()));
                        (None, None, None)
                    }
                };
                let (label, witness, method) = interior_verdict(&model, eq, &ctx, &mut local);
                let rhp = match count_roots(&ctx, pr.tau1, pr.tau2) {
                    Ok(n) => {
                        let expect_stable = label == StabilityLabel::LocallyAsymptoticallyStable;
                        if expect_stable != (n == 0) && label != StabilityLabel::Inconclusive {
                            local.push(Diagnostic::new(
                                "verdict_root_count_mismatch",
                                format!(
                                    "verdict {} with {n} right-half-plane roots",
                                    label.as_str()
                                ),
                            ));
                        }
                        Some(n)
                    }
                    Err(e) => {
                        local.push(Diagnostic::new("root_count_failed", e.to_string()));
                        None
                    }
                };
                if !eq.simple {
                    local.push(Diagnostic::new(
                        "degenerate_root",
                        "equilibrium is a tangential root",
                    ));
                }
                json!({
                    "kind": "interior", "T": eq.tumor(), "E": eq.effector(),
                    "case_label": l.case_label,
                    "label": label.as_str(), "method": method,
                    "delta": null, "d_star": ctx.d_star,
                    "lambda1": ctx.lambda1, "lambda2": ctx.lambda2, "n": ctx.n,
                    "tau_a": opt(tau_a), "y_hat": opt(y_hat), "tau_c": opt(tau_c),
                    "rhp_roots": rhp,
                    "witness": witness,
                })
            }
        };
        entries.push(entry);
        diags.extend(local);
    }
    let value = json!({
        "tau1": pr.tau1, "tau2": pr.tau2,
        "equilibria": entries,
        "diagnostics": diagnostics_json(&diags),
    });
    output::emit_json(
        out.optional_target(cfg, "stability.json").as_deref(),
        &value,
    )
}

pub fn tau_critical_cmd(cfg: &RunConfig, k_max: u32, out: &OutputArgs) -> Result<(), CliError> {
    if out.format == Some(Format::Csv) {
        return Err(CliError::Usage("tau-critical emits JSON only".into()));
    }
    let model = cfg.model(Some(0.0), Some(0.0))?;
    let list = equilibria_of(cfg, &model, None)?;
    let mut diags = Vec::new();
    let mut entries = Vec::new();
    for l in list
        .iter()
        .filter(|l| l.equilibrium.kind == EquilibriumKind::Interior)
    {
        let eq = &l.equilibrium;
        let ctx = characteristic_context(&model, eq)?;
        let base = json!({"T": eq.tumor(), "E": eq.effector(), "lambda1": ctx.lambda1,
            "lambda2": ctx.lambda2, "n": ctx.n, "d_star": ctx.d_star});
        let extra = match tau_critical(&ctx) {
            Ok(EqualDelayOutcome::Hopf(h)) => json!({
                "outcome": "hopf",
                "tau_a": h.tau_a, "y_hat": h.y_hat, "tau_c": h.tau_c,
                "residual": h.residual, "period": h.period(),
                "tau_k": (0..=k_max).map(|k| h.tau_k(k)).collect::<Vec<_>>(),
            }),
            Ok(EqualDelayOutcome::DelayIndependent { product, n }) => json!({
                "outcome": "delay_independent", "product": product, "n": n,
            }),
            Err(e) => {
                diags.push(Diagnostic::new("hypothesis_status", e.to_string()));
                json!({"outcome": "hypothesis_failed", "message": e.to_string()})
            }
        };
        let mut obj = base;
        obj.as_object_mut()
            .expect("object")
            .extend(extra.as_object().expect("object").clone());
        entries.push(obj);
    }
    if entries.is_empty() {
        return Err(CliError::Domain("no interior equilibrium".into()));
    }
    let value = json!({"equilibria": entries, "diagnostics": diagnostics_json(&diags)});
    output::emit_json(
        out.optional_target(cfg, "tau_critical.json").as_deref(),
        &value,
    )
}

pub struct SwitchingArgs {
    pub samples: Option<usize>,
    pub grid: Option<usize>,
    pub s_max: Option<i32>,
    pub k_max: Option<i32>,
    pub equilibrium_index: usize,
}

pub fn switching_curves(
    cfg: &RunConfig,
    a: &SwitchingArgs,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let model = cfg.model(Some(0.0), Some(0.0))?;
    let list = equilibria_of(cfg, &model, None)?;
    let eq = interior(&list, a.equilibrium_index)?;
    let ctx = characteristic_context(&model, &eq)?;
    let sc = &cfg.switching;
    let grid_n = a.grid.or(sc.grid).unwrap_or(4000);
    let opts = TraceOptions {
        samples_per_interval: a.samples.or(sc.samples).unwrap_or(2000),
        s_range: 0..=a.s_max.or(sc.s_max).unwrap_or(3),
        k_range: 0..=a.k_max.or(sc.k_max).unwrap_or(3),
    };
    if grid_n < 2 || opts.samples_per_interval < 2 {
        return Err(CliError::Usage(
            "grid and samples must be at least 2".into(),
        ));
    }
    let intervals = feasible_set(&ctx, &default_y_grid(&ctx, grid_n))?;
    let family = trace_curves(&ctx, &intervals, &opts);
    let diagonal = diagonal_crossings(&ctx, &family);
    let mut diags = Vec::new();
    if family.dropped_negative > 0 {
        diags.push(Diagnostic::new(
            "dropped_negative_delay",
            format!(
                "{} samples with a negative delay dropped",
                family.dropped_negative
            ),
        ));
    }
    if family.dropped_residual > 0 {
        diags.push(Diagnostic::new(
            "dropped_residual",
            format!(
                "{} samples failed the residual check",
                family.dropped_residual
            ),
        ));
    }
    if intervals.is_empty() {
        diags.push(Diagnostic::new(
            "empty_feasible_set",
            "no crossing frequency exists",
        ));
    }
    let header = ["y", "sign", "s", "k", "tau1", "tau2", "residual"];
    let points: Vec<_> = family.points().collect();
    let format = cfg.format(out.format, Format::Csv);
    let path = out.target(
        cfg,
        if format == Format::Csv {
            "switching_curves.csv"
        } else {
            "switching_curves.json"
        },
    );
    match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = points
                .iter()
                .map(|p| {
                    vec![
                        num(p.y),
                        p.sign.to_string(),
                        p.s.to_string(),
                        p.k.to_string(),
                        num(p.tau1),
                        num(p.tau2),
                        num(p.residual),
                    ]
                })
                .collect();
            output::write_atomic(&path, csv(&header, &rows).as_bytes())?;
        }
        Format::Json => {
            let rows: Vec<Value> = points
                .iter()
                .map(|p| {
                    json!({"y": p.y, "sign": p.sign, "s": p.s, "k": p.k,
                    "tau1": p.tau1, "tau2": p.tau2, "residual": p.residual})
                })
                .collect();
            output::write_atomic(
                &path,
                output::json_text(&json!({"points": rows})).as_bytes(),
            )?;
        }
    }
    let side = output::sidecar_path(&path);
    let meta = json!({
        "equilibrium": {"T": eq.tumor(), "E": eq.effector()},
        "lambda1": ctx.lambda1, "lambda2": ctx.lambda2, "r": ctx.r,
        "p_s": ctx.p_s, "m_s": ctx.m_s,
        "feasible_intervals": intervals.iter().map(|iv| json!({
            "lo": iv.lo, "hi": iv.hi, "lo_exact": iv.lo_exact, "hi_exact": iv.hi_exact,
        })).collect::<Vec<_>>(),
        "polylines": family.polylines.iter().map(|p| json!({
            "sign": p.sign, "s": p.s, "k": p.k, "interval": p.interval, "points": p.points.len(),
        })).collect::<Vec<_>>(),
        "diagonal_crossings": diagonal.iter().map(|d| json!({
            "y": d.point.y, "tau": d.point.tau1,
            "nearest_k": d.nearest_tau_k.map(|(k, _)| k),
            "distance": d.nearest_tau_k.map(|(_, dist)| dist),
        })).collect::<Vec<_>>(),
        "max_phi_step": family.max_phi_step,
        "diagnostics": diagnostics_json(&diags),
    });
    output::write_atomic(&side, output::json_text(&meta).as_bytes())?;
    print!("{}", output::report_written(&[&path, &side]));
    Ok(())
}

pub struct SimulateArgs {
    pub t_end: Option<f64>,
    pub h: Option<f64>,
    pub tau1: Option<f64>,
    pub tau2: Option<f64>,
}

fn forcing_json(f: &tumordde_core::ChemoForcing) -> Value {
    use tumordde_core::model::Modulation;
    match f.modulation() {
        Modulation::None => json!({"kind": "constant", "b0": f.b0()}),
        Modulation::Cosine { eps, period } => {
            json!({"kind": "cosine", "b0": f.b0(), "eps": eps, "q": period})
        }
        Modulation::Tabulated { period, values } => {
            json!({"kind": "tabulated", "b0": f.b0(), "q": period, "values": values})
        }
    }
}

fn asymptotics_json(a: &Asymptotics) -> Value {
    match *a {
        Asymptotics::Converged { distance } => json!({"kind": "converged", "distance": distance}),
        Asymptotics::LimitCycle { amplitude, period } => {
            json!({"kind": "limit_cycle", "amplitude": amplitude, "period": period})
        }
        Asymptotics::Diverged => json!({"kind": "diverged"}),
        Asymptotics::Undecided => json!({"kind": "undecided"}),
    }
}

fn params_json(model: &Model) -> Value {
    let p = model.params();
    json!({
        "r": p.r, "beta": p.beta, "b_hat": p.b_hat, "gamma": p.gamma,
        "sigma": p.sigma, "eta": p.eta, "p": p.p, "m": p.m, "g": p.g,
        "a": p.a, "tau1": p.tau1, "tau2": p.tau2,
    })
}

fn nearest_equilibrium(list: &[LabeledEquilibrium], x: State) -> Option<State> {
    list.iter()
        .map(|l| l.equilibrium.state)
        .min_by(|a, b| a.sub(&x).norm_inf().total_cmp(&b.sub(&x).norm_inf()))
}

pub fn simulate(cfg: &RunConfig, a: &SimulateArgs, out: &OutputArgs) -> Result<(), CliError> {
    let model = cfg.model(a.tau1, a.tau2)?;
    let forcing = cfg.forcing()?;
    let t_end = a
        .t_end
        .or(cfg.simulate.t_end)
        .ok_or_else(|| CliError::Usage("simulate needs --t-end or simulate.t_end".into()))?;
    if cfg.simulate.initial.is_none() && cfg.simulate.history.is_none() {
        return Err(CliError::Usage(
            "simulate needs simulate.initial or simulate.history".into(),
        ));
    }
    let history = cfg.history(State::default())?;
    let pr = *model.params();
    let h =
        a.h.or(cfg.simulate.h)
            .unwrap_or_else(|| default_step(pr.tau1, pr.tau2, forcing.period(), t_end));
    let traj = integrate(&model, &forcing, &history, t_end, h)?;
    let env = envelope_check(&traj, &model, &forcing);
    let autonomous = forcing.period().is_none();
    let eq = if autonomous {
        equilibria_of(cfg, &model, None)
            .ok()
            .and_then(|l| nearest_equilibrium(&l, traj.last()))
    } else {
        None
    };
    let asym = asymptotics(&traj, eq);
    let d = traj.diagnostics;
    let mut diags = Vec::new();
    if d.clipped > 0 {
        diags.push(Diagnostic::new(
            "clipped_negatives",
            format!("{} components in [-1e-12, 0) set to 0", d.clipped),
        ));
    }
    if d.positivity_violations > 0 {
        diags.push(Diagnostic::new(
            "positivity_violation",
            format!(
                "{} components below -1e-12, first at t = {}",
                d.positivity_violations,
                d.first_violation_time.unwrap_or(f64::NAN)
            ),
        ));
    }
    if env.violations() > 0 {
        diags.push(Diagnostic::new(
            "envelope_violation",
            format!("{} knots exceed the a-priori bounds", env.violations()),
        ));
    }
    let format = cfg.format(out.format, Format::Csv);
    let path = out.target(
        cfg,
        if format == Format::Csv {
            "trajectory.csv"
        } else {
            "trajectory.json"
        },
    );
    match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = traj
                .times
                .iter()
                .zip(&traj.states)
                .map(|(&t, x)| vec![num(t), num(x.tumor), num(x.effector)])
                .collect();
            output::write_atomic(&path, csv(&["t", "T", "E"], &rows).as_bytes())?;
        }
        Format::Json => {
            let value = json!({
                "t": traj.times,
                "T": traj.states.iter().map(|x| x.tumor).collect::<Vec<_>>(),
                "E": traj.states.iter().map(|x| x.effector).collect::<Vec<_>>(),
            });
            output::write_atomic(&path, output::json_text(&value).as_bytes())?;
        }
    }
    let side = output::sidecar_path(&path);
    let meta = json!({
        "params": params_json(&model),
        "h": h, "t_end": t_end, "tau1": pr.tau1, "tau2": pr.tau2,
        "knots": traj.times.len(),
        "forcing": forcing_json(&forcing),
        "positivity": {
            "clipped": d.clipped, "violations": d.positivity_violations,
            "min_T": d.min_tumor, "min_E": d.min_effector,
        },
        "envelope": {
            "T_M": env.envelope.t_max, "kappa": env.envelope.kappa,
            "tumor_violations": env.tumor_violations,
            "effector_violations": env.effector_violations,
        },
        "asymptotics": asymptotics_json(&asym),
        "diagnostics": diagnostics_json(&diags),
    });
    output::write_atomic(&side, output::json_text(&meta).as_bytes())?;
    print!("{}", output::report_written(&[&path, &side]));
    Ok(())
}

pub struct ContinueArgs {
    pub omega: Option<f64>,
    pub eps: Option<f64>,
    pub equilibrium: Option<String>,
    pub tau1: Option<f64>,
    pub tau2: Option<f64>,
    pub eps_max: Option<f64>,
    pub tau_max: Option<f64>,
}

pub fn continue_periodic(
    cfg: &RunConfig,
    a: &ContinueArgs,
    out: &OutputArgs,
) -> Result<(), CliError> {
    let cc = &cfg.continuation;
    let chemo = cfg.chemo.as_ref();
    let omega = a
        .omega
        .or(cc.omega)
        .or(chemo.and_then(|c| c.q))
        .ok_or_else(|| CliError::Usage("continue-periodic needs --omega".into()))?;
    let eps = a.eps.or(cc.eps).or(chemo.map(|c| c.eps)).unwrap_or(0.0);
    let model = cfg.model(a.tau1, a.tau2)?;
    let undelayed = model.with_delays(0.0, 0.0)?;
    let which = a
        .equilibrium
        .clone()
        .or(cc.equilibrium.clone())
        .unwrap_or_else(|| "interior".into());
    let eq = match which.as_str() {
        "interior" => interior(&equilibria_of(cfg, &undelayed, None)?, 0)?,
        "tumor-free" | "tumor_free" => tumor_free(&undelayed),
        other => {
            return Err(CliError::Usage(format!(
                "unknown equilibrium {other:?}; expected interior or tumor-free"
            )))
        }
    };
    let mut setup = ContinuationSetup::new(&model, &eq, omega, eps)?;
    let defaults = Smallness::defaults(&undelayed, &eq);
    let tau_max = a.tau_max.or(cc.tau_max);
    setup = setup.with_smallness(Smallness {
        eps_max: a.eps_max.or(cc.eps_max).unwrap_or(defaults.eps_max),
        tau1_max: tau_max.unwrap_or(defaults.tau1_max),
        tau2_max: tau_max.unwrap_or(defaults.tau2_max),
    });
    let report = setup.nonresonance();
    let alt = setup.alternative_nonresonance();
    let mut diags = Vec::new();
    if report.nonresonant() != alt.nonresonant() {
        diags.push(Diagnostic::new(
            "matrix_convention_discrepancy",
            "the alternative sign of T f' in M changes the nonresonance verdict",
        ));
    }
    if chemo.is_some_and(|c| c.values.is_some()) {
        diags.push(Diagnostic::new(
            "chemo_values_ignored",
            "continuation uses b(t) = b_hat + eps cos(2 pi t / omega)",
        ));
    }
    let orbit = find_periodic(&setup)?;
    if !orbit.converged() {
        diags.push(Diagnostic::new(
            "residual_above_tolerance",
            format!("closure defect {}", orbit.residual),
        ));
    }
    let format = cfg.format(out.format, Format::Csv);
    let path = out.target(
        cfg,
        if format == Format::Csv {
            "orbit.csv"
        } else {
            "orbit.json"
        },
    );
    match format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = orbit
                .times
                .iter()
                .zip(&orbit.samples)
                .map(|(&t, x)| vec![num(t), num(x.tumor), num(x.effector)])
                .collect();
            output::write_atomic(&path, csv(&["t", "T", "E"], &rows).as_bytes())?;
        }
        Format::Json => {
            let value = json!({
                "t": orbit.times,
                "T": orbit.samples.iter().map(|x| x.tumor).collect::<Vec<_>>(),
                "E": orbit.samples.iter().map(|x| x.effector).collect::<Vec<_>>(),
            });
            output::write_atomic(&path, output::json_text(&value).as_bytes())?;
        }
    }
    let side = output::sidecar_path(&path);
    let sm = setup.smallness;
    let meta = json!({
        "omega": orbit.omega, "eps": eps,
        "residual": orbit.residual, "amplitude": orbit.amplitude,
        "converged": orbit.converged(),
        "nonresonance_eigenvalues": report.eigenvalues.iter().map(|z| complex(*z)).collect::<Vec<_>>(),
        "equilibrium": {"kind": kind_str(eq.kind), "T": eq.tumor(), "E": eq.effector()},
        "tau1": model.params().tau1, "tau2": model.params().tau2,
        "smallness": {"eps_max": sm.eps_max, "tau1_max": sm.tau1_max, "tau2_max": sm.tau2_max},
        "newton_iterations": orbit.newton_iterations,
        "picard_iterations": orbit.picard_iterations,
        "diagnostics": diagnostics_json(&diags),
    });
    output::write_atomic(&side, output::json_text(&meta).as_bytes())?;
    print!("{}", output::report_written(&[&path, &side]));
    Ok(())
}
