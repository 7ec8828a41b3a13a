//! One function per scenario. Each writes its primary outputs and returns
//! the resolved defaults and headline numbers for the manifest.

use serde::Serialize;
use serde_json::{json, Value};

use crate::exponents::{gamma_interval, gamma_window, p_conf, ExponentReport, ModelParams};
use crate::linear_propagator::{solve_linear as solve_linear_field, RadialProfile, SpaceTimeField};
use crate::phase_geometry::{
    max_feasible_delta, max_shift, verify_shifted_cone_bounds, verify_unshifted_cone_inequality,
    ConeSampling, PhaseFn,
};
use crate::semilinear_solver::{
    picard_solve, sweep_p as run_sweep, time_march, MarchOptions, NonlinearitySpec, PicardOptions,
    SemilinearProblem, SweepBase,
};
use crate::special_functions::{envelope_bound, fit_v1_envelope, v1_symbol, v2_symbol};
use crate::strichartz_verifier::{
    homogeneous_ratio, inhomogeneous_ratio, source_family, window_sensitivity, DataFamily,
    ProbeOptions, RatioRow, StrichartzParams,
};
use crate::exponents::strichartz_gamma_bound;
use crate::strichartz_verifier::family::DEFAULT_WIDTHS;

use super::config::{FamilyKind, RunConfig, SemilinearConfig, SolveMode};
use super::output::{fmt_opt, fmt_real, OutputSet};
use super::HarnessError;

pub const EXPONENTS_HEADER: [&str; 12] = [
    "m", "n", "p", "p_crit", "p_conf", "p_strauss", "q_min", "q0", "mu_m", "alpha_m", "gamma_lo", "gamma_hi",
];

pub fn exponents(config: &RunConfig, out: &mut OutputSet) -> Result<Value, HarnessError> {
    let model = &config.model;
    let sweep = config.exponents.unwrap_or_default();
    let pairs: Vec<(u32, u32)> = match (sweep.sweep_m, sweep.sweep_n) {
        (Some([m0, m1]), Some([n0, n1])) => (m0..=m1).flat_map(|m| (n0..=n1).map(move |n| (m, n))).collect(),
        _ => vec![(model.m, model.n)],
    };
    let mut rows = Vec::with_capacity(pairs.len());
    for (m, n) in pairs {
        let r = ExponentReport::compute(m, n)?;
        let (g_lo, g_hi) = match model.p {
            Some(p) => {
                let (lo, hi) = gamma_window(m, n, p);
                (fmt_real(lo), fmt_real(hi))
            }
            None => (String::new(), String::new()),
        };
        rows.push(vec![
            m.to_string(),
            n.to_string(),
            fmt_opt(model.p),
            fmt_real(r.p_crit),
            fmt_real(r.p_conf),
            fmt_real(r.p_strauss),
            fmt_real(r.q_min),
            fmt_real(r.q0),
            fmt_real(r.mu_m),
            fmt_real(r.alpha_m),
            g_lo,
            g_hi,
        ]);
    }
    let count = rows.len();
    out.csv("exponents.csv", &EXPONENTS_HEADER, rows)?;
    Ok(json!({ "rows": count }))
}

pub fn check_geometry(config: &RunConfig, out: &mut OutputSet) -> Result<Value, HarnessError> {
    let model = &config.model;
    let g = config.geometry.unwrap_or_default();
    let sampling = ConeSampling {
        t_hi: g.t_hi,
        n_t: g.n_t,
        n_r: g.n_r,
        n_random: g.n_random,
        seed: config.seed,
    };
    let (m, big_m, t0) = (model.m, model.big_m, g.t0);
    let delta_max = max_feasible_delta(m, big_m, t0, &sampling)?;
    let unshifted = verify_unshifted_cone_inequality(m, big_m, t0, delta_max, &sampling)?;
    let nu_max = max_shift(m, big_m, t0);
    let nus = match g.nu {
        Some(nu) => vec![nu],
        None => vec![0.0, 0.5 * nu_max, nu_max],
    };
    let mut rows = vec![vec![
        "unshifted-cone".to_string(),
        unshifted.holds.to_string(),
        fmt_real(unshifted.worst_margin),
        fmt_real(delta_max),
    ]];
    let mut bounds = Vec::new();
    for nu in nus {
        let b = verify_shifted_cone_bounds(m, big_m, t0, nu, &sampling)?;
        rows.push(vec![
            format!("shifted-cone-lower(nu={})", fmt_real(nu)),
            (b.c_lower > 0.0).to_string(),
            fmt_real(b.c_lower),
            fmt_real(delta_max),
        ]);
        rows.push(vec![
            format!("shifted-cone-upper(nu={})", fmt_real(nu)),
            (b.c_upper.is_finite() && b.c_upper >= b.c_lower).to_string(),
            fmt_real(b.c_upper),
            fmt_real(delta_max),
        ]);
        bounds.push(json!({ "nu": nu, "c_lower": b.c_lower, "c_upper": b.c_upper, "samples": b.samples }));
    }
    out.csv("geometry.csv", &["inequality", "holds", "margin", "delta_max"], rows)?;
    Ok(json!({ "delta_max": delta_max, "nu_max": nu_max, "shifted": bounds, "seed": config.seed }))
}

pub fn symbols(config: &RunConfig, out: &mut OutputSet) -> Result<Value, HarnessError> {
    let m = config.model.m;
    let s = config.symbols.unwrap_or_default();
    let phase = PhaseFn::new(m);
    let w_max = (phase.eval(s.t_max) * s.lambda_max).max(1.0);
    let fit = fit_v1_envelope(m, 1e-9 * w_max, w_max, 20_000, 20)?;
    let constant = fit.constant.max(1.0);
    let mut rows = Vec::with_capacity(s.n * s.n);
    for i in 1..=s.n {
        let t = s.t_max * i as f64 / s.n as f64;
        for j in 1..=s.n {
            let lambda = s.lambda_max * j as f64 / s.n as f64;
            let v1 = v1_symbol(m, t, lambda)?;
            let v2 = v2_symbol(m, t, lambda)?;
            rows.push(vec![
                fmt_real(t),
                fmt_real(lambda),
                fmt_real(v1.re),
                fmt_real(v1.im),
                fmt_real(v2.re),
                fmt_real(v2.im),
                fmt_real(envelope_bound(constant, m, phase.eval(t) * lambda)),
            ]);
        }
    }
    out.csv(
        "symbols.csv",
        &["t", "lambda", "re_v1", "im_v1", "re_v2", "im_v2", "envelope_bound"],
        rows,
    )?;
    Ok(json!({ "envelope_constant": constant, "envelope_slope": fit.slope }))
}

fn field_rows(field: &SpaceTimeField) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for s in &field.snapshots {
        for (i, u) in s.u.iter().enumerate() {
            rows.push(vec![fmt_real(s.t), fmt_real(field.grid.r(i)), fmt_real(*u)]);
        }
    }
    rows
}

pub fn solve_linear(config: &RunConfig, out: &mut OutputSet) -> Result<Value, HarnessError> {
    let model = &config.model;
    let c = config.solve_linear.unwrap_or_default();
    let setup = config.grid_or_default().setup(model, c.t_final)?;
    let grid = setup.grid;
    let f = c.data.profile(model.big_m).sample(&grid);
    let g = match &c.velocity {
        Some(v) => v.profile(model.big_m).sample(&grid),
        None => vec![0.0; grid.n + 1],
    };
    let times: Vec<f64> = if c.snapshots == 1 {
        vec![c.t_final]
    } else {
        (0..c.snapshots)
            .map(|i| c.t_final * i as f64 / (c.snapshots - 1) as f64)
            .collect()
    };
    let field = solve_linear_field(&setup, &f, &g, &times)?;
    out.csv("field.csv", &["t", "r", "u"], field_rows(&field))?;
    let summary: Vec<Vec<String>> = (0..field.snapshots.len())
        .map(|i| {
            vec![
                fmt_real(field.snapshots[i].t),
                fmt_real(field.sup_norm(i)),
                fmt_real(field.l2_norm(i)),
                fmt_real(field.support_leak(i)),
            ]
        })
        .collect();
    out.csv("summary.csv", &["t", "sup_norm", "l2_norm", "support_leak"], summary)?;
    let max_leak = (0..field.snapshots.len()).map(|i| field.support_leak(i)).fold(0.0, f64::max);
    Ok(json!({ "r_max": grid.r_max, "N": grid.n, "times": times, "max_support_leak": max_leak }))
}

/// Weight exponent of the solution norm: explicit, else the midpoint of the
/// admissible window, else (above `p_conf`) the midpoint of the formula
/// window when it is non-empty.
pub fn resolve_gamma(params: &ModelParams, explicit: Option<f64>) -> Option<f64> {
    if explicit.is_some() {
        return explicit;
    }
    if let Ok((lo, hi)) = gamma_interval(params) {
        return Some(0.5 * (lo + hi));
    }
    if params.p >= p_conf(params.m, params.n) {
        let (lo, hi) = gamma_window(params.m, params.n, params.p);
        if lo < hi {
            return Some(0.5 * (lo + hi));
        }
    }
    None
}

fn march_options(c: &SemilinearConfig, gamma: Option<f64>) -> MarchOptions {
    MarchOptions {
        dt_max: c.dt_max,
        cfl_nl: c.cfl_nl,
        record_every: c.record_every,
        gamma,
        store_field: c.store_field,
        ..MarchOptions::default()
    }
}

#[derive(Debug, Serialize)]
struct OutcomeRecord<'a> {
    mode: &'a str,
    m: u32,
    n: u32,
    p: f64,
    eps: f64,
    #[serde(rename = "M")]
    big_m: f64,
    gamma: Option<f64>,
    kind: Option<String>,
    blowup_time: Option<f64>,
    final_sup: Option<f64>,
    final_weighted_norm: Option<f64>,
    steps: usize,
    tail_slope: Option<f64>,
    error: Option<String>,
}

pub fn solve_semilinear(config: &RunConfig, out: &mut OutputSet) -> Result<Value, HarnessError> {
    let params = config.model.params()?;
    let c = config.semilinear_or_default();
    let setup = config.grid_or_default().setup(&config.model, c.horizon)?;
    let grid = setup.grid;
    let spec = NonlinearitySpec {
        t0: c.t0,
        ..NonlinearitySpec::new(params.p)
    };
    let problem = SemilinearProblem::new(setup, spec)?;
    let data: Vec<f64> = c
        .data
        .profile(params.big_m)
        .sample(&grid)
        .iter()
        .map(|v| params.eps * v)
        .collect();
    let gamma = resolve_gamma(&params, c.gamma);
    match c.mode {
        SolveMode::TimeMarch => {
            let res = time_march(&problem, &data, &data, c.horizon, &march_options(&c, gamma))?;
            let o = &res.outcome;
            let kind = serde_json::to_value(o.kind)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string));
            let record = OutcomeRecord {
                mode: "time-march",
                m: params.m,
                n: params.n,
                p: params.p,
                eps: params.eps,
                big_m: params.big_m,
                gamma,
                kind: kind.clone(),
                blowup_time: o.blowup_time,
                final_sup: o.norm_history.last().map(|h| h.1),
                final_weighted_norm: o.final_weighted_norm,
                steps: o.steps,
                tail_slope: o.tail_slope,
                error: None,
            };
            out.json_lines("outcome.json-lines", &[record])?;
            out.csv(
                "norms.csv",
                &["t", "sup_norm"],
                o.norm_history.iter().map(|(t, s)| vec![fmt_real(*t), fmt_real(*s)]),
            )?;
            if c.store_field {
                out.csv("field.csv", &["t", "r", "u"], field_rows(&res.field))?;
            }
            Ok(json!({
                "mode": "time-march", "gamma": gamma, "r_max": grid.r_max, "N": grid.n,
                "kind": kind, "blowup_time": o.blowup_time,
                "final_weighted_norm": o.final_weighted_norm, "steps": o.steps,
            }))
        }
        SolveMode::Picard => {
            let gamma = gamma.ok_or_else(|| {
                HarnessError::Validation("picard mode needs a weight exponent gamma".into())
            })?;
            let opts = PicardOptions {
                max_iters: c.picard_max_iters,
                tol: c.picard_tol,
                dt: c.picard_dt,
                gamma,
                record_every: c.record_every,
            };
            let (diag, field) = picard_solve(&problem, &data, &data, c.horizon, &opts)?;
            let ratios = diag.contraction_ratios();
            let rows = (0..diag.m_seq.len()).map(|k| {
                let ratio = if k >= 2 { Some(diag.n_seq[k] / diag.n_seq[k - 1]) } else { None };
                vec![k.to_string(), fmt_real(diag.m_seq[k]), fmt_real(diag.n_seq[k]), fmt_opt(ratio)]
            });
            out.csv("picard.csv", &["iteration", "iterate_norm", "difference_norm", "ratio"], rows)?;
            let record = json!({
                "mode": "picard", "m": params.m, "n": params.n, "p": params.p, "eps": params.eps,
                "M": params.big_m, "gamma": gamma, "converged": diag.converged,
                "iterations": diag.iterations, "contraction_ratios": ratios,
                "final_weighted_norm": diag.m_seq.last(),
            });
            out.json_lines("outcome.json-lines", std::slice::from_ref(&record))?;
            if c.store_field {
                out.csv("field.csv", &["t", "r", "u"], field_rows(&field))?;
            }
            Ok(record)
        }
    }
}

pub fn sweep_p(config: &RunConfig, out: &mut OutputSet) -> Result<Value, HarnessError> {
    let params = config.model.params()?;
    let c = config.semilinear_or_default();
    let p_grid = c.p_grid.clone().unwrap_or_default();
    let setup = config.grid_or_default().setup(&config.model, c.horizon)?;
    let profile: RadialProfile = c.data.profile(params.big_m);
    let base = SweepBase {
        setup,
        t0: c.t0,
        eps: params.eps,
        f: profile.clone(),
        g: profile,
        horizon: c.horizon,
        march: march_options(&c, c.gamma),
    };
    let rows = run_sweep(&base, &p_grid);
    let kind_name = |k: Option<crate::semilinear_solver::OutcomeKind>| {
        k.and_then(|k| serde_json::to_value(k).ok())
            .and_then(|v| v.as_str().map(str::to_string))
    };
    let records: Vec<OutcomeRecord> = rows
        .iter()
        .map(|r| OutcomeRecord {
            mode: "time-march",
            m: params.m,
            n: params.n,
            p: r.p,
            eps: params.eps,
            big_m: params.big_m,
            gamma: c.gamma,
            kind: kind_name(r.kind),
            blowup_time: r.blowup_time,
            final_sup: r.final_sup,
            final_weighted_norm: r.final_weighted_norm,
            steps: r.steps,
            tail_slope: None,
            error: r.error.clone(),
        })
        .collect();
    out.json_lines("outcome.json-lines", &records)?;
    let table = rows.iter().map(|r| {
        vec![
            fmt_real(r.p),
            kind_name(r.kind).unwrap_or_default(),
            fmt_opt(r.blowup_time),
            fmt_opt(r.final_sup),
            fmt_opt(r.final_weighted_norm),
            r.steps.to_string(),
            fmt_real(r.p_crit),
            fmt_real(r.p_conf),
            r.error.clone().unwrap_or_default(),
        ]
    });
    out.csv(
        "sweep.csv",
        &["p", "kind", "blowup_time", "final_sup", "final_weighted_norm", "steps", "p_crit", "p_conf", "error"],
        table,
    )?;
    let kinds: Vec<Option<String>> = rows.iter().map(|r| kind_name(r.kind)).collect();
    Ok(json!({ "p_grid": p_grid, "kinds": kinds }))
}

fn ratio_rows(prefix: &str, rows: &[RatioRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                format!("{prefix}:{}", r.member_id),
                fmt_real(r.lhs),
                fmt_real(r.rhs),
                fmt_opt(r.ratio),
                fmt_real(r.tail_fraction),
                r.flags.join(";"),
            ]
        })
        .collect()
}

pub fn verify_strichartz(config: &RunConfig, out: &mut OutputSet) -> Result<Value, HarnessError> {
    let model = &config.model;
    let c = config.strichartz.clone().unwrap_or_default();
    let mut params = StrichartzParams::midpoint(model.m, model.n, model.big_m)?;
    params.t_max = c.t_max;
    let q = c.q.unwrap_or(params.q);
    let gamma = match c.gamma {
        Some(g) => g,
        None => 0.5 * strichartz_gamma_bound(model.m, model.n, q)?,
    };
    let delta = c
        .delta
        .unwrap_or(0.5 * crate::exponents::strichartz_delta_bound(model.m, model.n, q, gamma));
    params = params.with_exponents(q, gamma, delta);
    let opts = ProbeOptions {
        points_per_feature: c.points_per_feature,
        n_log: c.n_log,
        ..ProbeOptions::default()
    };
    let family = match c.family {
        FamilyKind::Widths => DataFamily::widths(model.big_m, &c.values),
        FamilyKind::Shifted => DataFamily::shifted(model.big_m, 0.2, &c.values),
        FamilyKind::TwoBump => DataFamily::two_bump(model.big_m, &c.values),
        FamilyKind::Dilation => {
            let b = RadialProfile::bump(1.0, model.big_m - 1.0);
            DataFamily::dilation(model.m, &b, &b, &c.values)
        }
    };
    let hom = homogeneous_ratio(&params, &family, &opts)?;
    let mut rows = ratio_rows("hom", &hom.rows);
    let mut summary = json!({
        "q": q, "gamma": gamma, "delta": delta, "t_max": c.t_max,
        "homogeneous_max_over_min": hom.max_over_min(),
        "homogeneous_max_tail_fraction": hom.max_tail_fraction(),
    });
    if c.inhomogeneous {
        let widths = if c.family == FamilyKind::Widths { c.values.clone() } else { DEFAULT_WIDTHS.to_vec() };
        let inh = inhomogeneous_ratio(&params, &source_family(model.big_m, &widths), &opts)?;
        rows.extend(ratio_rows("inh", &inh.rows));
        summary["gamma2"] = json!(params.gamma2());
        summary["inhomogeneous_max_over_min"] = json!(inh.max_over_min());
        summary["inhomogeneous_max_tail_fraction"] = json!(inh.max_tail_fraction());
    }
    out.csv("ratios.csv", &["member_id", "lhs", "rhs", "ratio", "tail_fraction", "flags"], rows)?;
    if c.negative_control {
        if let Some(member) = family.members.last() {
            let trend = window_sensitivity(&params, member, 0.05, &c.boxes, &opts)?;
            out.csv(
                "box_trend.csv",
                &["box", "ratio"],
                trend.iter().map(|(b, r)| vec![fmt_real(*b), fmt_real(*r)]),
            )?;
            summary["negative_control"] = json!(trend);
        }
    }
    Ok(summary)
}
