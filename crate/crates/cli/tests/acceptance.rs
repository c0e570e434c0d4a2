//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tumordde_core::dde::{
    asymptotics, default_step, envelope_check, integrate, Asymptotics, History,
};
use tumordde_core::equilibria::{
    classify, interior_equilibrium, mu_bifurcation, mu_critical, solve_triangle, t_bifurcation,
    tumor_free, HContext,
};
use tumordde_core::linear::{
    char_eval, characteristic_context, default_box, linearize, rhp_root_count, tau_critical,
    tumor_free_verdict, EqualDelayOutcome, StabilityLabel,
};
use tumordde_core::periodic::{find_periodic, interior_trace, orbit_residual, ContinuationSetup};
use tumordde_core::switching::{
    default_y_grid, diagonal_crossings, feasible_set, probe_crossing, trace_curves, TraceOptions,
};
use tumordde_core::{ChemoForcing, Complex64, Model, ModelParams, State};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn hopf_model() -> Model {
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
    .validated()
    .unwrap()
}

/// Admissible parameters with `a = 0`, delays zero.
fn draw_params(rng: &mut ChaCha8Rng) -> ModelParams {
    let beta = if rng.random_bool(0.25) {
        1.0
    } else {
        rng.random_range(0.2..0.95)
    };
    ModelParams {
        r: rng.random_range(0.3..2.0),
        beta,
        b_hat: rng.random_range(0.0..0.6),
        gamma: rng.random_range(0.3..2.0),
        sigma: rng.random_range(0.05..1.5),
        eta: rng.random_range(0.2..2.0),
        p: rng.random_range(0.1..3.0),
        m: rng.random_range(0.1..3.0),
        g: rng.random_range(0.3..2.0),
        a: 0.0,
        tau1: 0.0,
        tau2: 0.0,
    }
}

fn constants() -> Outcome {
    let (b, beta) = (0.8, 0.5);
    let checks = [
        ("mu_c", mu_critical(b, beta), 75.0 / 16.0),
        ("mu_bif", mu_bifurcation(b, beta), 25.0 / 4.0),
        ("T_bif", t_bifurcation(b, beta), 4.0 / 25.0),
    ];
    let mut worst: f64 = 0.0;
    for (name, got, want) in checks {
        let e = rel(got, want);
        ensure(e <= 1e-12, || {
            format!("{name} = {got:e}, expected {want:e}")
        })?;
        worst = worst.max(e);
    }
    let ctx = HContext::new(-1.5, 0.35, 0.5, 0.0).map_err(|e| e.to_string())?;
    let slope = ctx.derivatives(ctx.t_max()).map_err(|e| e.to_string())?.d1;
    ensure((slope - 1.17).abs() <= 5e-3, || format!("h' = {slope}"))?;
    Ok(format!(
        "max rel err {worst:.1e}, h'(b^(1/beta)) = {slope:.6}"
    ))
}

const ORACLE_POINTS: usize = 1_000_000;

/// `T_i` and `T_i^β` on a uniform grid over `[0, b^{1/β}]`.
struct OracleGrid {
    b: f64,
    t: Vec<f64>,
    tb: Vec<f64>,
}

impl OracleGrid {
    fn new(b: f64, beta: f64) -> Self {
        let t_max = b.powf(1.0 / beta);
        let t: Vec<f64> = (0..ORACLE_POINTS)
            .map(|i| t_max * i as f64 / (ORACLE_POINTS - 1) as f64)
            .collect();
        let tb = t.iter().map(|x| x.powf(beta)).collect();
        OracleGrid { b, t, tb }
    }

    /// Zeros plus strict sign changes of `h_μ - h0` along the grid.
    fn count(&self, mu: f64, h0: f64) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for (&t, &tb) in self.t.iter().zip(&self.tb) {
            let v = mu * (tb - self.b) * t + tb - h0;
            let s = if v > 0.0 {
                1
            } else if v < 0.0 {
                -1
            } else {
                0
            };
            if s == 0 || (last != 0 && s != last) {
                count += 1;
            }
            last = s;
        }
        count
    }
}

fn root_counts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pairs = [(0.8, 0.5), (0.35, 0.5), (0.6, 0.3), (0.9, 0.75), (0.7, 1.0)];
    let per_pair = 240;
    let (mut tested, mut excluded) = (0usize, 0usize);
    let mut covered = BTreeSet::new();
    for (b, beta) in pairs {
        let grid = OracleGrid::new(b, beta);
        let mu_c = mu_critical(b, beta);
        let mut strata = vec![(-3.0 * mu_c, 0.0), (0.0, mu_c)];
        if beta < 1.0 {
            let mu_bif = mu_bifurcation(b, beta);
            strata.extend([(mu_c, mu_bif), (mu_bif, 3.0 * mu_bif)]);
        } else {
            strata.push((mu_c, 3.0 * mu_c));
        }
        for _ in 0..per_pair {
            let (lo, hi) = strata[rng.random_range(0..strata.len())];
            let mu = rng.random_range(lo..hi);
            let probe = HContext::new(mu, b, beta, 0.0).map_err(|e| e.to_string())?;
            let mut special = vec![0.0, b];
            special.extend(probe.critical_points().iter().map(|&c| probe.value(c)));
            special.sort_by(f64::total_cmp);
            let pad = 0.5 * (1.0 + special[special.len() - 1] - special[0]);
            let mut edges = vec![special[0] - pad];
            edges.extend(&special);
            edges.push(special[special.len() - 1] + pad);
            let k = rng.random_range(0..edges.len() - 1);
            let h0 = if rng.random_bool(0.05) {
                special[rng.random_range(0..special.len())]
            } else if edges[k + 1] > edges[k] {
                rng.random_range(edges[k]..edges[k + 1])
            } else {
                edges[k]
            };

            let ctx = HContext::new(mu, b, beta, h0).map_err(|e| e.to_string())?;
            let roots = solve_triangle(&ctx);
            let spacing = probe.t_max() / (ORACLE_POINTS - 1) as f64;
            let near_special = special
                .iter()
                .any(|&s| (h0 - s).abs() <= 1e-7 * (1.0 + s.abs()));
            let tangency = roots.iter().any(|r| r.degenerate);
            let crowded = roots.windows(2).any(|w| w[1].t - w[0].t < 4.0 * spacing);
            if near_special || tangency || crowded {
                excluded += 1;
                continue;
            }
            let oracle = grid.count(mu, h0);
            ensure(roots.len() == oracle, || {
                format!(
                    "mu={mu}, h0={h0}, b={b}, beta={beta}: solver {} vs oracle {oracle}",
                    roots.len()
                )
            })?;
            covered.insert(classify(&ctx).0.label());
            tested += 1;
        }
    }
    let required = [
        "mu<0:1",
        "mu<0:2a",
        "mu<0:2b",
        "0<=mu<=mu_c:a",
        "0<=mu<=mu_c:b",
        "h0>b",
        "1.II",
        "1.IV",
        "1.below",
        "2.II",
        "2.III",
        "2.V",
        "beta=1:mu>1/b",
    ];
    let missing: Vec<_> = required.iter().filter(|c| !covered.contains(**c)).collect();
    ensure(missing.is_empty(), || {
        format!("cases not sampled: {missing:?}")
    })?;
    ensure(tested >= 1000, || {
        format!("only {tested} non-degenerate samples")
    })?;
    Ok(format!(
        "{tested}/{tested} agree, {excluded} tangency-flagged excluded, {} cases covered",
        covered.len()
    ))
}

/// Positive root of `μT² + (1 - μb)T - (b - σ) = 0`, rationalized.
fn logistic_closed_form(mu: f64, b: f64, sigma: f64) -> f64 {
    let disc = (1.0 + mu * b).powi(2) - 4.0 * mu * sigma;
    2.0 * (b - sigma) / ((1.0 - mu * b) + disc.sqrt())
}

fn single_root(mu: f64, b: f64, sigma: f64) -> Result<f64, String> {
    let ctx = HContext::new(mu, b, 1.0, b - sigma).map_err(|e| e.to_string())?;
    let roots: Vec<_> = solve_triangle(&ctx)
        .into_iter()
        .filter(|r| r.t > 0.0)
        .collect();
    match roots.as_slice() {
        [r] => Ok(r.t),
        _ => Err(format!(
            "mu={mu}, b={b}, sigma={sigma}: {} roots",
            roots.len()
        )),
    }
}

fn logistic_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let b = rng.random_range(0.2..1.0);
        let sigma = rng.random_range(0.01..0.99) * b;
        let mu = -rng.random_range(0.01..5.0) / b;
        let t = single_root(mu, b, sigma)?;
        let e = rel(t, logistic_closed_form(mu, b, sigma));
        ensure(e <= 1e-12, || {
            format!("mu={mu}, b={b}, sigma={sigma}: rel err {e:e}")
        })?;
        worst = worst.max(e);
    }
    for (b, sigma) in [(0.8, 0.3), (0.64, 0.16), (0.5, 0.02), (1.0, 0.49)] {
        let t0 = single_root(0.0, b, sigma)?;
        let e0 = rel(t0, b - sigma);
        let t1 = single_root(-1.0 / b, b, sigma)?;
        let e1 = rel(t1, (1.0 - (sigma / b).sqrt()) * b);
        ensure(e0 <= 1e-12 && e1 <= 1e-12, || {
            format!("b={b}, sigma={sigma}: mu=0 err {e0:e}, mu=-1/b err {e1:e}")
        })?;
        worst = worst.max(e0).max(e1);
    }
    Ok(format!(
        "200 draws + 8 special cases, max rel err {worst:.1e}"
    ))
}

fn tumor_free_stability() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut stable, mut unstable, mut skipped) = (0, 0, 0);
    while stable < 100 || unstable < 100 {
        let mut pr = draw_params(&mut rng);
        pr.tau1 = rng.random_range(0.0..3.0);
        pr.tau2 = rng.random_range(0.0..3.0);
        let model = pr.validated().map_err(|e| e.to_string())?;
        let (gs, rbe) = (pr.gamma * pr.sigma, pr.r * model.b() * pr.eta);
        let delta = gs - rbe;
        if delta.abs() < 0.05 * (gs + rbe) {
            skipped += 1;
            continue;
        }
        let positive = delta > 0.0;
        if (positive && stable >= 100) || (!positive && unstable >= 100) {
            continue;
        }
        let label = tumor_free_verdict(&model).label;
        let lin = linearize(&model, &tumor_free(&model));
        let count = rhp_root_count(&lin, pr.tau1, pr.tau2, &default_box(&lin))
            .map_err(|e| e.to_string())?;
        let (want_label, want_count) = if positive {
            (StabilityLabel::LocallyAsymptoticallyStable, 0)
        } else {
            (StabilityLabel::Unstable, 1)
        };
        ensure(label == want_label && count == want_count, || {
            format!("delta={delta}: verdict {label:?}, {count} roots")
        })?;
        if positive {
            stable += 1;
        } else {
            unstable += 1;
        }
    }
    Ok(format!(
        "{stable} draws with delta>0, {unstable} with delta<0 ({skipped} near delta=0 skipped)"
    ))
}

fn hopf() -> Outcome {
    let start = Instant::now();
    let md = hopf_model();
    let eq = interior_equilibrium(&md).map_err(|e| e.to_string())?;
    let ctx = characteristic_context(&md, &eq).map_err(|e| e.to_string())?;
    let EqualDelayOutcome::Hopf(hd) = tau_critical(&ctx).map_err(|e| e.to_string())? else {
        return Err("no Hopf delay".into());
    };
    ensure(hd.residual <= 1e-10, || format!("|P| = {:e}", hd.residual))?;
    let rect = default_box(&ctx);
    let count = |tau: f64| rhp_root_count(&ctx, tau, tau, &rect).map_err(|e| e.to_string());
    let (below, above) = (count(hd.tau_c - 1e-3)?, count(hd.tau_c + 1e-3)?);
    ensure(below == 0 && above == 2, || {
        format!("rhp count {below} -> {above}")
    })?;

    let hist = History::constant(State::new(eq.tumor() * 1.05, eq.effector()))
        .map_err(|e| e.to_string())?;
    let t_end = 2000.0;
    let run = |f: f64| {
        let tau = f * hd.tau_c;
        let m = md.with_delays(tau, tau).map_err(|e| e.to_string())?;
        integrate(
            &m,
            &m.constant_forcing(),
            &hist,
            t_end,
            default_step(tau, tau, None, t_end),
        )
        .map_err(|e| e.to_string())
    };
    let stable = run(0.9)?;
    let dist = stable.last().sub(&eq.state).norm_inf();
    ensure(dist < 1e-4, || {
        format!("terminal distance {dist:e} at 0.9 tau_c")
    })?;
    let period = match asymptotics(&run(1.1)?, Some(eq.state)) {
        Asymptotics::LimitCycle { period, .. } => period,
        other => return Err(format!("1.1 tau_c: {other:?}")),
    };
    let dev = rel(period, hd.period());
    ensure(dev <= 0.1, || {
        format!("period {period} vs 2pi/y_hat {}", hd.period())
    })?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "|P| = {:.1e}, roots 0 -> 2, dist {dist:.1e}, period off by {:.1}%, {secs:.2} s",
        hd.residual,
        100.0 * dev
    ))
}

fn switching() -> Outcome {
    let md = hopf_model();
    let eq = interior_equilibrium(&md).map_err(|e| e.to_string())?;
    let ctx = characteristic_context(&md, &eq).map_err(|e| e.to_string())?;
    let intervals = feasible_set(&ctx, &default_y_grid(&ctx, 4000)).map_err(|e| e.to_string())?;
    let family = trace_curves(&ctx, &intervals, &TraceOptions::default());

    let mut n = 0;
    for p in family.points() {
        let res = char_eval(&ctx, Complex64::new(0.0, p.y), p.tau1, p.tau2).norm();
        ensure(res <= 1e-8 * (1.0 + p.y * p.y), || {
            format!("residual {res:e} at {p:?}")
        })?;
        n += 1;
    }
    ensure(n > 0, || "no curve points".into())?;

    // An isolated probe sees the same counts at half its reach; otherwise a
    // second curve runs between the probe points.
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let rect = default_box(&ctx);
    let lines: Vec<_> = family
        .polylines
        .iter()
        .filter(|p| p.points.len() >= 20)
        .collect();
    let (mut probes, mut skipped) = (0, 0);
    while probes < 10 {
        ensure(probes + skipped < 1000, || {
            format!("only {probes} isolated probes found")
        })?;
        let line = lines[rng.random_range(0..lines.len())];
        let margin = line.points.len() / 20 + 1;
        let idx = rng.random_range(margin..line.points.len() - margin);
        let Ok(probe) = probe_crossing(&ctx, line, idx) else {
            skipped += 1;
            continue;
        };
        let p = probe.point;
        let half = |s: f64| {
            let d = 0.5 * s * probe.epsilon;
            rhp_root_count(
                &ctx,
                p.tau1 + d * probe.normal[0],
                p.tau2 + d * probe.normal[1],
                &rect,
            )
            .map_err(|e| e.to_string())
        };
        if half(-1.0)? != probe.count_minus || half(1.0)? != probe.count_plus {
            skipped += 1;
            continue;
        }
        ensure(probe.jump().abs() == 2, || {
            format!("jump {} at {p:?}", probe.jump())
        })?;
        probes += 1;
    }

    let diag = diagonal_crossings(&ctx, &family);
    ensure(!diag.is_empty(), || "no diagonal points".into())?;
    let mut worst: f64 = 0.0;
    for d in &diag {
        let (_, dev) = d.nearest_tau_k.ok_or("no tau_k sequence")?;
        ensure(dev <= 1e-8, || {
            format!("diagonal point {:?} off tau_k by {dev:e}", d.point)
        })?;
        worst = worst.max(dev);
    }
    Ok(format!(
        "{n} points within tolerance, {probes} probes jump by 2 ({skipped} non-isolated skipped), {} diagonal points (max dev {worst:.1e})",
        diag.len()
    ))
}

fn random_history(rng: &mut ChaCha8Rng, tau_max: f64) -> History {
    let draw =
        |rng: &mut ChaCha8Rng| State::new(rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
    if tau_max == 0.0 {
        return History::constant(draw(rng)).unwrap();
    }
    let knots = rng.random_range(2..8);
    let times = (0..knots)
        .map(|i| -tau_max * (1.0 - i as f64 / (knots - 1) as f64))
        .collect();
    let states = (0..knots).map(|_| draw(rng)).collect();
    History::tabulated(times, states).unwrap()
}

fn random_delay(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.2) {
        0.0
    } else {
        rng.random_range(0.1..2.0)
    }
}

fn positivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut min: f64 = f64::INFINITY;
    for i in 0..200 {
        let mut pr = draw_params(&mut rng);
        pr.a = rng.random_range(0.0..1.0);
        pr.tau1 = random_delay(&mut rng);
        pr.tau2 = random_delay(&mut rng);
        let model = pr.validated().map_err(|e| e.to_string())?;
        let q = rng.random_range(1.0..10.0);
        let forcing = ChemoForcing::cosine(pr.b_hat, rng.random_range(0.0..=pr.b_hat), q)
            .map_err(|e| e.to_string())?;
        let hist = random_history(&mut rng, model.tau_max());
        let t_end = 30.0;
        let h = default_step(pr.tau1, pr.tau2, Some(q), t_end);
        let tr =
            integrate(&model, &forcing, &hist, t_end, h).map_err(|e| format!("draw {i}: {e}"))?;
        let m = tr
            .states
            .iter()
            .fold(f64::INFINITY, |m, x| m.min(x.tumor).min(x.effector));
        ensure(m >= -1e-12, || format!("draw {i}: min component {m:e}"))?;
        let rep = envelope_check(&tr, &model, &forcing);
        ensure(rep.violations() == 0, || format!("draw {i}: {rep:?}"))?;
        min = min.min(m);
    }

    let mut worst = f64::INFINITY;
    for _ in 0..8 {
        let mut pr = draw_params(&mut rng);
        pr.tau1 = rng.random_range(0.3..1.5);
        pr.tau2 = if rng.random_bool(0.25) {
            0.0
        } else {
            rng.random_range(0.3..1.5)
        };
        let model = pr.validated().map_err(|e| e.to_string())?;
        let q = rng.random_range(20.0..40.0);
        let forcing =
            ChemoForcing::cosine(pr.b_hat, 0.5 * pr.b_hat, q).map_err(|e| e.to_string())?;
        let hist = History::constant(State::new(
            rng.random_range(0.1..1.0),
            rng.random_range(0.1..1.0),
        ))
        .map_err(|e| e.to_string())?;
        let run = |h: f64| {
            integrate(&model, &forcing, &hist, 5.0, h)
                .map(|t| t.last())
                .map_err(|e| e.to_string())
        };
        // Coarsest step inside the asymptotic window for these rates.
        let tau_min = if pr.tau2 > 0.0 {
            pr.tau1.min(pr.tau2)
        } else {
            pr.tau1
        };
        let h0 = (tau_min / 8.0).min(q / 100.0);
        let reference = run(h0 / 32.0)?;
        let e1 = run(h0)?.sub(&reference).norm_inf();
        let e2 = run(h0 / 2.0)?.sub(&reference).norm_inf();
        let ratio = e1 / e2;
        ensure(ratio >= 12.0, || {
            format!("{pr:?}: error ratio {ratio:.2} ({e1:e} -> {e2:e})")
        })?;
        worst = worst.min(ratio);
    }
    Ok(format!(
        "200 runs, min component {min:.1e}, 0 envelope violations, min halving ratio {worst:.1}"
    ))
}

fn dulac() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut seen = BTreeSet::new();
    for i in 0..50 {
        let model = draw_params(&mut rng)
            .validated()
            .map_err(|e| e.to_string())?;
        let x0 = State::new(rng.random_range(0.01..2.0), rng.random_range(0.01..2.0));
        let hist = History::constant(x0).map_err(|e| e.to_string())?;
        let t_end = 400.0;
        let tr = integrate(
            &model,
            &model.constant_forcing(),
            &hist,
            t_end,
            default_step(0.0, 0.0, None, t_end),
        )
        .map_err(|e| e.to_string())?;
        let a = asymptotics(&tr, None);
        ensure(!matches!(a, Asymptotics::LimitCycle { .. }), || {
            format!("draw {i}: {a:?}")
        })?;
        seen.insert(match a {
            Asymptotics::Converged { .. } => "converged",
            Asymptotics::LimitCycle { .. } => "limit_cycle",
            Asymptotics::Diverged => "diverged",
            Asymptotics::Undecided => "undecided",
        });
    }
    Ok(format!("50 draws, no limit cycle (outcomes: {seen:?})"))
}

fn continuation() -> Outcome {
    let model = ModelParams {
        r: 1.0,
        beta: 0.5,
        b_hat: 0.4,
        gamma: 1.0,
        sigma: 0.3,
        eta: 0.8,
        p: 1.2,
        m: 1.0,
        g: 1.0,
        a: 0.0,
        tau1: 0.0,
        tau2: 0.0,
    }
    .validated()
    .map_err(|e| e.to_string())?;
    let interior = interior_equilibrium(&model).map_err(|e| e.to_string())?;
    let free = tumor_free(&model);
    let tr = interior_trace(&model, &interior);
    ensure(tr < 0.0, || format!("tr M = {tr}"))?;

    let mut worst_res: f64 = 0.0;
    let mut worst_spread: f64 = 1.0;
    for omega in [2.0, 4.0, 7.0] {
        for eq in [&interior, &free] {
            let setup =
                ContinuationSetup::new(&model, eq, omega, 0.01).map_err(|e| e.to_string())?;
            let nr = setup.nonresonance();
            ensure(nr.nonresonant(), || {
                format!("omega={omega}: resonant at {:?}", eq.kind)
            })?;
        }
        let mut ratios = Vec::new();
        for eps in [0.01, 0.005, 0.0025] {
            let setup =
                ContinuationSetup::new(&model, &interior, omega, eps).map_err(|e| e.to_string())?;
            let orbit =
                find_periodic(&setup).map_err(|e| format!("omega={omega}, eps={eps}: {e}"))?;
            let res = orbit_residual(&orbit, &setup).map_err(|e| e.to_string())?;
            ensure(orbit.converged() && res <= 1e-8, || {
                format!("omega={omega}, eps={eps}: residual {res:e}")
            })?;
            worst_res = worst_res.max(res);
            ratios.push(orbit.amplitude / eps);
        }
        let spread = ratios.iter().cloned().fold(0.0, f64::max)
            / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        ensure(spread <= 2.0, || {
            format!("omega={omega}: amplitude/eps {ratios:?}")
        })?;
        worst_spread = worst_spread.max(spread);
    }
    Ok(format!(
        "tr M = {tr:.4}, max residual {worst_res:.1e}, amplitude/eps spread {worst_spread:.4}"
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("validate.json");
    let run = || -> Result<(Vec<u8>, Vec<u8>), String> {
        let out = Command::new(env!("CARGO_BIN_EXE_tumordde"))
            .arg("validate")
            .arg("--out")
            .arg(&path)
            .env_remove("TUMORDDE_OUT_DIR")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            format!("validate exited with {}", out.status)
        })?;
        let file = std::fs::read(&path).map_err(|e| e.to_string())?;
        Ok((out.stdout, file))
    };
    let (s1, f1) = run()?;
    let (s2, f2) = run()?;
    ensure(s1 == s2, || "stdout differs between runs".into())?;
    ensure(f1 == f2, || "report file differs between runs".into())?;
    Ok(format!(
        "stdout {} bytes, report {} bytes, identical",
        s1.len(),
        f1.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("closed-form constants", constants),
        ("root-count conformance", root_counts),
        ("logistic closed forms", logistic_forms),
        ("tumor-free stability", tumor_free_stability),
        ("equal-delay Hopf", hopf),
        ("switching curves", switching),
        ("positivity and bounds", positivity),
        ("no autonomous cycles", dulac),
        ("periodic continuation", continuation),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {:>2} {tag} {name} [{:.2} s]: {detail}",
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} criteria, {failed} failed", criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
