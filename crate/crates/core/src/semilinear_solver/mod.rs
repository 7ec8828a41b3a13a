//! Radial semilinear solver for `u_tt - t^m Δu = F_p(t, u)` in three
//! dimensions.
//!
//! Each sine mode is written as `ŵ_k(t) = a_k(t) V₁(t, λ_k) + b_k(t) V₂(t, λ_k)`.
//! With unit Wronskian, variation of parameters gives
//! `a_k' = -V₂ F̂_k` and `b_k' = V₁ F̂_k`, where `F̂` are the sine coefficients
//! of `r F_p(t, u)`. A step freezes the source at the midpoint, evaluated from
//! the state at the start of the step, and advances `(a, b)` by the midpoint
//! rule. With the source switched off the coefficients never change and the
//! linear solution is reproduced exactly.

pub mod nonlinearity;
pub mod picard;
pub mod sweep;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponents::ExponentError;
use crate::linear_propagator::{
    check_data, LinearSetup, NormAccumulator, PropagatorError, Propagator, SineTransform,
    Snapshot, SpaceTimeField, SpaceTimeWeight,
};
use crate::special_functions::least_squares_fit;

pub use nonlinearity::{evaluate_nonlinearity, NonlinearitySpec};
pub use picard::{picard_solve, PicardDiagnostics, PicardOptions};
pub use sweep::{sweep_p, SweepBase, SweepRow};

pub const BLOWUP_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error("invalid option {name} = {value}: {reason}")]
    InvalidOption {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("step size fell below {min_dt:e} at t = {t}")]
    StepRejection { t: f64, min_dt: f64 },
    #[error("Picard iteration diverged after {} iterations (N = {:?})", .0.iterations, .0.n_seq)]
    PicardDivergence(Box<PicardDiagnostics>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeKind {
    /// Reached the horizon with a bounded sup norm and a non-increasing tail.
    GlobalHorizon,
    /// Sup norm exceeded the threshold or became non-finite.
    Blowup,
    /// Reached the horizon without blowup but with a growing tail.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub kind: OutcomeKind,
    pub blowup_time: Option<f64>,
    /// Discrete `L^{p+1}` norm with the `(1 + |φ² - r²|)^γ` weight, when a
    /// `γ` was supplied.
    pub final_weighted_norm: Option<f64>,
    /// `(t, sup_r |u|)` at every recorded time.
    pub norm_history: Vec<(f64, f64)>,
    pub steps: usize,
    /// Log-log slope of the sup norm over the last tenth of the horizon.
    pub tail_slope: Option<f64>,
}

/// Time step and recording controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarchOptions {
    pub dt_max: f64,
    /// `dt <= cfl_nl / sqrt(p sup|u|^{p-1})` resolves the ODE time scale.
    pub cfl_nl: f64,
    pub min_dt: f64,
    pub blowup_threshold: f64,
    /// Interval between stored snapshots (and sup-norm history entries).
    pub record_every: f64,
    /// Switches the source off (pure linear evolution through the same path).
    pub nonlinear: bool,
    /// Weight exponent for the running weighted solution norm.
    pub gamma: Option<f64>,
    /// Keep snapshot fields (otherwise only norms are kept).
    pub store_field: bool,
}

impl Default for MarchOptions {
    fn default() -> Self {
        Self {
            dt_max: 0.01,
            cfl_nl: 0.1,
            min_dt: 1e-9,
            blowup_threshold: BLOWUP_THRESHOLD,
            record_every: 0.5,
            nonlinear: true,
            gamma: None,
            store_field: false,
        }
    }
}

impl MarchOptions {
    fn validate(&self) -> Result<(), SolverError> {
        let checks: [(&'static str, f64); 4] = [
            ("dt_max", self.dt_max),
            ("cfl_nl", self.cfl_nl),
            ("min_dt", self.min_dt),
            ("record_every", self.record_every),
        ];
        for (name, value) in checks {
            if !(value > 0.0 && value.is_finite()) {
                return Err(SolverError::InvalidOption {
                    name,
                    value,
                    reason: "must be positive and finite",
                });
            }
        }
        Ok(())
    }
}

/// Linear setup plus nonlinearity.
#[derive(Debug, Clone)]
pub struct SemilinearProblem {
    pub propagator: Propagator,
    pub spec: NonlinearitySpec,
}

impl SemilinearProblem {
    pub fn new(setup: LinearSetup, spec: NonlinearitySpec) -> Result<Self, SolverError> {
        if !(spec.p > 1.0) {
            return Err(SolverError::InvalidOption {
                name: "p",
                value: spec.p,
                reason: "must exceed 1",
            });
        }
        if !(spec.t0 > 0.0 && spec.t0 < 1.0) {
            return Err(SolverError::InvalidOption {
                name: "T0",
                value: spec.t0,
                reason: "must lie in (0, 1)",
            });
        }
        // thousands of transforms per run: always take the FFT path
        let transform = SineTransform::fast(setup.grid.n);
        Ok(Self {
            propagator: Propagator::with_transform(setup, transform)?,
            spec,
        })
    }

    pub fn setup(&self) -> &LinearSetup {
        &self.propagator.setup
    }

    fn check(&self, f: &[f64], g: &[f64], horizon: f64) -> Result<(), SolverError> {
        let setup = self.setup();
        check_data(setup, f)?;
        check_data(setup, g)?;
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(SolverError::InvalidOption {
                name: "horizon",
                value: horizon,
                reason: "must be positive and finite",
            });
        }
        setup.check_horizon(horizon)?;
        Ok(())
    }

    /// Sine coefficients of `r F_p(t, u)`.
    pub(crate) fn source_hat(&self, t: f64, u: &[f64]) -> Vec<f64> {
        let fu: Vec<f64> = u.iter().map(|&v| self.spec.eval(t, v)).collect();
        self.propagator.analyze(&fu)
    }
}

/// Modal state `(a_k, b_k)` of the variation-of-parameters form.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ModalState {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl ModalState {
    /// `(V₁, V₂)(t, λ_k)` for every mode.
    pub fn symbols_at(prop: &Propagator, t: f64) -> Vec<(f64, f64)> {
        let grid = prop.setup.grid;
        (1..grid.n)
            .map(|k| prop.symbols.values(t, grid.lambda(k)))
            .collect()
    }

    pub fn field_with(&self, prop: &Propagator, sym: &[(f64, f64)]) -> Vec<f64> {
        let c: Vec<f64> = sym
            .iter()
            .zip(self.a.iter().zip(&self.b))
            .map(|((v1, v2), (a, b))| v1 * a + v2 * b)
            .collect();
        prop.synthesize(&c)
    }

    pub fn field(&self, prop: &Propagator, t: f64) -> Vec<f64> {
        self.field_with(prop, &Self::symbols_at(prop, t))
    }

    /// `a -= dt V₂ F̂`, `b += dt V₁ F̂` with symbols taken at the midpoint.
    pub fn kick(&mut self, sym_mid: &[(f64, f64)], dt: f64, f_hat: &[f64]) {
        for (k, fh) in f_hat.iter().enumerate() {
            let (v1, v2) = sym_mid[k];
            self.a[k] -= dt * v2 * fh;
            self.b[k] += dt * v1 * fh;
        }
    }
}

pub(crate) fn sup_abs(u: &[f64]) -> f64 {
    u.iter().fold(0.0f64, |a, v| if v.is_finite() { a.max(v.abs()) } else { f64::INFINITY })
}

/// Result of a [`time_march`] run.
#[derive(Debug, Clone, PartialEq)]
pub struct MarchResult {
    pub outcome: RunOutcome,
    pub field: SpaceTimeField,
}

/// Marches from `t = 0` to `horizon`, stopping early on blowup.
pub fn time_march(
    problem: &SemilinearProblem,
    f: &[f64],
    g: &[f64],
    horizon: f64,
    opts: &MarchOptions,
) -> Result<MarchResult, SolverError> {
    opts.validate()?;
    problem.check(f, g, horizon)?;
    let prop = &problem.propagator;
    let setup = *problem.setup();
    let p = problem.spec.p;
    let mut state = ModalState {
        a: prop.analyze(f),
        b: prop.analyze(g),
    };
    let mut weighted = opts
        .gamma
        .map(|gamma| NormAccumulator::new(setup.m, setup.grid, SpaceTimeWeight::Solution, gamma, p + 1.0));
    let mut u = state.field(prop, 0.0);
    if let Some(acc) = weighted.as_mut() {
        acc.push(0.0, &u);
    }
    let mut snapshots = Vec::new();
    let mut history = vec![(0.0, sup_abs(&u))];
    if opts.store_field {
        snapshots.push(Snapshot { t: 0.0, u: u.clone() });
    }
    let mut t = 0.0;
    let mut next_record = opts.record_every;
    let mut steps = 0usize;
    let mut sup = sup_abs(&u);
    let mut blowup_time = None;
    while t < horizon {
        let mut dt = opts.dt_max;
        if opts.nonlinear && sup > 0.0 {
            dt = dt.min(opts.cfl_nl / (p * sup.powf(p - 1.0)).sqrt());
        }
        if dt < opts.min_dt {
            return Err(SolverError::StepRejection {
                t,
                min_dt: opts.min_dt,
            });
        }
        // land exactly on record times and the horizon
        let target = next_record.min(horizon);
        let mut landed = false;
        if t + dt >= target * (1.0 - 1e-12) {
            dt = target - t;
            landed = true;
        }
        if opts.nonlinear {
            let t_mid = t + 0.5 * dt;
            let sym = ModalState::symbols_at(prop, t_mid);
            let u_mid = state.field_with(prop, &sym);
            let f_hat = problem.source_hat(t_mid, &u_mid);
            state.kick(&sym, dt, &f_hat);
        }
        t = if landed { target } else { t + dt };
        steps += 1;
        u = state.field(prop, t);
        sup = sup_abs(&u);
        if let Some(acc) = weighted.as_mut() {
            acc.push(t, &u);
        }
        let blown = !sup.is_finite() || sup > opts.blowup_threshold;
        if landed && target == next_record || blown || t >= horizon {
            history.push((t, sup));
            if opts.store_field {
                snapshots.push(Snapshot { t, u: u.clone() });
            }
            if landed && target == next_record {
                next_record += opts.record_every;
            }
        }
        if blown {
            blowup_time = Some(t);
            break;
        }
    }
    let final_weighted_norm = weighted.as_ref().map(NormAccumulator::norm);
    let (kind, tail_slope) = match blowup_time {
        Some(_) => (OutcomeKind::Blowup, None),
        None => {
            let slope = tail_trend(&history, horizon);
            let kind = match slope {
                Some(s) if s > 0.0 => OutcomeKind::Inconclusive,
                _ => OutcomeKind::GlobalHorizon,
            };
            (kind, slope)
        }
    };
    Ok(MarchResult {
        outcome: RunOutcome {
            kind,
            blowup_time,
            final_weighted_norm,
            norm_history: history,
            steps,
            tail_slope,
        },
        field: SpaceTimeField {
            m: setup.m,
            big_m: setup.big_m,
            grid: setup.grid,
            snapshots,
        },
    })
}

/// Linear solution with zero data and a prescribed source `S(t, r)` that
/// vanishes outside `t ∈ [t_start, t_end]`.
///
/// `source(t)` returns radial samples of `S(t, ·)`. Inside the support the
/// modal coefficients advance by midpoint steps of at most `dt`, landing on
/// every requested time; afterwards the coefficients are frozen and each
/// snapshot costs one symbol sweep.
pub fn solve_with_source<S>(
    prop: &Propagator,
    source: S,
    support: (f64, f64),
    dt: f64,
    times: &[f64],
) -> Result<SpaceTimeField, SolverError>
where
    S: Fn(f64) -> Vec<f64>,
{
    let setup = prop.setup;
    let mut snapshots = Vec::with_capacity(times.len());
    solve_with_source_streaming(prop, source, support, dt, times, |t, u| {
        snapshots.push(Snapshot { t, u: u.to_vec() })
    })?;
    Ok(SpaceTimeField {
        m: setup.m,
        big_m: setup.big_m,
        grid: setup.grid,
        snapshots,
    })
}

/// [`solve_with_source`] handing each snapshot to `sink` instead of storing it.
pub fn solve_with_source_streaming<S, K>(
    prop: &Propagator,
    source: S,
    support: (f64, f64),
    dt: f64,
    times: &[f64],
    mut sink: K,
) -> Result<(), SolverError>
where
    S: Fn(f64) -> Vec<f64>,
    K: FnMut(f64, &[f64]),
{
    let setup = prop.setup;
    let (t_start, t_end) = support;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SolverError::InvalidOption {
            name: "dt",
            value: dt,
            reason: "must be positive and finite",
        });
    }
    if !(t_start >= 0.0 && t_end >= t_start && t_end.is_finite()) {
        return Err(SolverError::InvalidOption {
            name: "source support",
            value: t_end,
            reason: "needs 0 <= t_start <= t_end < inf",
        });
    }
    crate::linear_propagator::check_times(times)?;
    if let Some(&t_final) = times.last() {
        setup.check_horizon(t_final)?;
    }
    let modes = setup.grid.n - 1;
    let mut state = ModalState {
        a: vec![0.0; modes],
        b: vec![0.0; modes],
    };
    let zero = vec![0.0; setup.grid.n + 1];
    let mut t = t_start;
    for &ts in times {
        let stop = ts.min(t_end);
        while t < stop {
            let step = dt.min(stop - t);
            let t_mid = t + 0.5 * step;
            let sym = ModalState::symbols_at(prop, t_mid);
            let s_hat = prop.analyze(&source(t_mid));
            state.kick(&sym, step, &s_hat);
            t = if stop - t <= dt { stop } else { t + step };
        }
        if ts <= t_start {
            sink(ts, &zero);
        } else {
            sink(ts, &state.field(prop, ts));
        }
    }
    Ok(())
}

/// Log-log slope of the sup norm over `t >= 0.9 horizon`; `None` when fewer
/// than three positive entries fall in that window.
pub fn tail_trend(history: &[(f64, f64)], horizon: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = history
        .iter()
        .filter(|(t, s)| *t >= 0.9 * horizon && *t > 0.0 && *s > 0.0)
        .map(|(t, s)| (t.ln(), s.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    Some(least_squares_fit(&pts).0)
}

/// Discrete `L^{p+1}` norm of `(1 + |φ(t)² - r²|)^γ u` over a stored field.
pub fn weighted_solution_norm(field: &SpaceTimeField, p: f64, gamma: f64) -> f64 {
    let mut acc = NormAccumulator::new(field.m, field.grid, SpaceTimeWeight::Solution, gamma, p + 1.0);
    for s in &field.snapshots {
        acc.push(s.t, &s.u);
    }
    acc.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear_propagator::{RadialGrid, RadialProfile};

    fn problem(p: f64) -> SemilinearProblem {
        let setup = LinearSetup::new(1, 2.0, RadialGrid::new(20.0, 1000).unwrap()).unwrap();
        SemilinearProblem::new(setup, NonlinearitySpec::new(p)).unwrap()
    }

    #[test]
    fn zero_data_stays_zero() {
        let pr = problem(2.0);
        let z = vec![0.0; 1001];
        let opts = MarchOptions {
            store_field: true,
            dt_max: 0.05,
            ..Default::default()
        };
        let res = time_march(&pr, &z, &z, 3.0, &opts).unwrap();
        assert_eq!(res.outcome.kind, OutcomeKind::GlobalHorizon);
        for s in &res.field.snapshots {
            assert!(s.u.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn linear_path_matches_solve_linear() {
        let pr = problem(2.0);
        let grid = pr.setup().grid;
        let f = RadialProfile::bump(0.3, 1.0).sample(&grid);
        let g = RadialProfile::bump(-0.2, 0.7).sample(&grid);
        let opts = MarchOptions {
            nonlinear: false,
            store_field: true,
            dt_max: 0.1,
            record_every: 1.0,
            ..Default::default()
        };
        let res = time_march(&pr, &f, &g, 4.0, &opts).unwrap();
        let times = res.field.times();
        let lin = pr.propagator.solve(&f, &g, &times).unwrap();
        for (a, b) in res.field.snapshots.iter().zip(&lin.snapshots) {
            let scale = sup_abs(&b.u);
            for (x, y) in a.u.iter().zip(&b.u) {
                assert!((x - y).abs() <= 1e-8 * scale);
            }
        }
    }

    #[test]
    fn rejects_bad_options() {
        let pr = problem(2.0);
        let z = vec![0.0; 1001];
        let opts = MarchOptions {
            dt_max: -1.0,
            ..Default::default()
        };
        assert!(matches!(
            time_march(&pr, &z, &z, 1.0, &opts),
            Err(SolverError::InvalidOption { name: "dt_max", .. })
        ));
        assert!(matches!(
            time_march(&pr, &z, &z, 100.0, &MarchOptions::default()),
            Err(SolverError::Propagator(PropagatorError::GridValidity { .. }))
        ));
    }

    #[test]
    fn prescribed_single_mode_source_matches_rk4() {
        // S(t, r) = h(t) sin(λ_k r) / r excites mode k only, whose amplitude
        // solves w'' + t λ² w = h(t) with zero data.
        let pr = problem(2.0);
        let prop = &pr.propagator;
        let grid = prop.setup.grid;
        let k = 7;
        let lam = grid.lambda(k);
        let h = |t: f64| if (1.0..=2.0).contains(&t) { (std::f64::consts::PI * (t - 1.0)).sin().powi(2) } else { 0.0 };
        let profile: Vec<f64> = (0..=grid.n)
            .map(|i| {
                let r = grid.r(i);
                if i == 0 { lam } else { (lam * r).sin() / r }
            })
            .collect();
        let times = [0.5, 1.5, 2.0, 3.0];
        let field = solve_with_source(prop, |t| profile.iter().map(|v| h(t) * v).collect(), (1.0, 2.0), 0.002, &times).unwrap();
        // RK4 oracle on the mode equation
        let rhs = |t: f64, y: [f64; 2]| [y[1], h(t) - t * lam * lam * y[0]];
        let mut y = [0.0, 0.0];
        let mut t = 1.0;
        let dt = 1e-4;
        for (snap, &ts) in field.snapshots.iter().zip(&times) {
            while t < ts - 1e-12 {
                let k1 = rhs(t, y);
                let k2 = rhs(t + dt / 2.0, [y[0] + dt / 2.0 * k1[0], y[1] + dt / 2.0 * k1[1]]);
                let k3 = rhs(t + dt / 2.0, [y[0] + dt / 2.0 * k2[0], y[1] + dt / 2.0 * k2[1]]);
                let k4 = rhs(t + dt, [y[0] + dt * k3[0], y[1] + dt * k3[1]]);
                for j in 0..2 {
                    y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
                }
                t += dt;
            }
            let c = prop.analyze(&snap.u);
            if ts <= 1.0 {
                assert!(c.iter().all(|v| *v == 0.0));
                continue;
            }
            assert!((c[k - 1] - y[0]).abs() < 1e-5 * y[0].abs().max(1e-3), "t={ts}: {} vs {}", c[k - 1], y[0]);
            let other = c.iter().enumerate().filter(|(j, _)| *j != k - 1).map(|(_, v)| v.abs()).fold(0.0, f64::max);
            assert!(other < 1e-10);
        }
    }
}
