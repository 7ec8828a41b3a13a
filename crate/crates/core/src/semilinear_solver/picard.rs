//! Picard iteration `u_k'' - t^m Δu_k = F_p(t, u_{k-1})`, `u_{-1} = 0`, run on
//! the same step schedule as [`super::time_march`], so that its fixed point
//! is the marched solution.

use serde::{Deserialize, Serialize};

use crate::linear_propagator::{NormAccumulator, Snapshot, SpaceTimeField, SpaceTimeWeight};

use super::{ModalState, SemilinearProblem, SolverError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub max_iters: usize,
    /// Stop once `N_k < tol · M_0`.
    pub tol: f64,
    pub dt: f64,
    /// Weight exponent of the iterate norms (`q = p + 1`).
    pub gamma: f64,
    pub record_every: f64,
}

impl PicardOptions {
    pub fn new(gamma: f64) -> Self {
        Self {
            max_iters: 30,
            tol: 1e-10,
            dt: 0.05,
            gamma,
            record_every: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardDiagnostics {
    /// Weighted norms of the iterates `u_k`.
    pub m_seq: Vec<f64>,
    /// Weighted norms of `u_k - u_{k-1}` (with `u_{-1} = 0`).
    pub n_seq: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

impl PicardDiagnostics {
    /// `N_{k+1} / N_k` for `k >= 1`.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.n_seq
            .windows(2)
            .skip(1)
            .map(|w| w[1] / w[0])
            .collect()
    }
}

/// Step end times `t_j` of the shared uniform schedule: `n` steps of equal
/// length with record times every `record_every` landing on step ends.
pub fn step_schedule(horizon: f64, dt: f64, record_every: f64) -> Vec<f64> {
    let per_record = (record_every / dt).round().max(1.0) as usize;
    let dt = record_every / per_record as f64;
    let n = (horizon / dt).round() as usize;
    (1..=n).map(|j| j as f64 * dt).collect()
}

pub fn picard_solve(
    problem: &SemilinearProblem,
    f: &[f64],
    g: &[f64],
    horizon: f64,
    opts: &PicardOptions,
) -> Result<(PicardDiagnostics, SpaceTimeField), SolverError> {
    problem.check(f, g, horizon)?;
    if !(opts.dt > 0.0 && opts.record_every >= opts.dt) {
        return Err(SolverError::InvalidOption {
            name: "dt",
            value: opts.dt,
            reason: "must be positive and at most record_every",
        });
    }
    let prop = &problem.propagator;
    let setup = *problem.setup();
    let q = problem.spec.p + 1.0;
    let ends = step_schedule(horizon, opts.dt, opts.record_every);
    let per_record = (opts.record_every / opts.dt).round().max(1.0) as usize;
    let mut starts = vec![0.0];
    starts.extend_from_slice(&ends[..ends.len() - 1]);
    let mids: Vec<f64> = starts.iter().zip(&ends).map(|(a, b)| 0.5 * (a + b)).collect();
    let sym_mid: Vec<Vec<(f64, f64)>> = mids.iter().map(|&t| ModalState::symbols_at(prop, t)).collect();
    let sym_end: Vec<Vec<(f64, f64)>> = ends.iter().map(|&t| ModalState::symbols_at(prop, t)).collect();
    let f_hat0 = prop.analyze(f);
    let g_hat0 = prop.analyze(g);
    let new_acc = || {
        NormAccumulator::new(
            setup.m,
            setup.grid,
            SpaceTimeWeight::Characteristic { big_m: setup.big_m },
            opts.gamma,
            q,
        )
    };

    let u_init = ModalState {
        a: f_hat0.clone(),
        b: g_hat0.clone(),
    }
    .field(prop, 0.0);
    let mut prev_mid: Option<Vec<Vec<f64>>> = None;
    let mut prev_end: Vec<Vec<f64>> = vec![vec![0.0; f.len()]; ends.len()];
    let mut diag = PicardDiagnostics {
        m_seq: Vec::new(),
        n_seq: Vec::new(),
        converged: false,
        iterations: 0,
    };
    let mut rising = 0usize;
    loop {
        let mut state = ModalState {
            a: f_hat0.clone(),
            b: g_hat0.clone(),
        };
        let mut cur_mid = Vec::with_capacity(ends.len());
        let mut cur_end = Vec::with_capacity(ends.len());
        let mut m_acc = new_acc();
        let mut n_acc = new_acc();
        m_acc.push(0.0, &u_init);
        n_acc.push(0.0, &vec![0.0; f.len()]);
        for j in 0..ends.len() {
            let dt = ends[j] - starts[j];
            cur_mid.push(state.field_with(prop, &sym_mid[j]));
            if let Some(pm) = &prev_mid {
                let f_hat = problem.source_hat(mids[j], &pm[j]);
                state.kick(&sym_mid[j], dt, &f_hat);
            }
            let u = state.field_with(prop, &sym_end[j]);
            let diff: Vec<f64> = u.iter().zip(&prev_end[j]).map(|(a, b)| a - b).collect();
            m_acc.push(ends[j], &u);
            n_acc.push(ends[j], &diff);
            cur_end.push(u);
        }
        // u_0 - u_{-1} = u_0, so N_0 = M_0 up to the t = 0 slice
        let (mk, nk) = if diag.iterations == 0 {
            (m_acc.norm(), m_acc.norm())
        } else {
            (m_acc.norm(), n_acc.norm())
        };
        diag.m_seq.push(mk);
        diag.n_seq.push(nk);
        diag.iterations += 1;
        prev_mid = Some(cur_mid);
        prev_end = cur_end;
        let m0 = diag.m_seq[0];
        if nk <= opts.tol * m0 || (m0 == 0.0 && nk == 0.0) {
            diag.converged = true;
            break;
        }
        let k = diag.n_seq.len();
        if k >= 2 && diag.n_seq[k - 1] > diag.n_seq[k - 2] {
            rising += 1;
            if rising >= 3 {
                return Err(SolverError::PicardDivergence(Box::new(diag)));
            }
        } else {
            rising = 0;
        }
        if diag.iterations >= opts.max_iters {
            break;
        }
    }
    let mut snapshots = vec![Snapshot { t: 0.0, u: u_init }];
    for (j, u) in prev_end.into_iter().enumerate() {
        if (j + 1) % per_record == 0 {
            snapshots.push(Snapshot { t: ends[j], u });
        }
    }
    Ok((
        diag,
        SpaceTimeField {
            m: setup.m,
            big_m: setup.big_m,
            grid: setup.grid,
            snapshots,
        },
    ))
}
