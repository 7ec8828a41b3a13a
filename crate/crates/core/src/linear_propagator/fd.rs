//! Independent finite-difference solver for `w_tt = t^m w_rr`, `w = r u`,
//! with `w(t, 0) = w(t, r_max) = 0`: second-order central differences in
//! space and a (variable-step) leapfrog in time.

use crate::phase_geometry::PhaseFn;

use super::grid::{RadialGrid, RadialProfile};
use super::transform::radial_from_w;
use super::{check_inputs, LinearSetup, PropagatorError, Snapshot, SpaceTimeField};

/// Largest admissible Courant factor in `dt <= cfl · h / t_max^{m/2}`.
pub const MAX_CFL: f64 = 0.5;

/// Norm growth between consecutive steps treated as an instability.
pub const GROWTH_LIMIT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdOptions {
    pub cfl: f64,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self { cfl: MAX_CFL }
    }
}

/// Step counts per snapshot interval `[t_{j-1}, t_j]` (with `t_{-1} = 0`).
fn step_plan(
    m: u32,
    grid: &RadialGrid,
    times: &[f64],
    cfl: f64,
) -> Result<Vec<usize>, PropagatorError> {
    if !(cfl > 0.0 && cfl <= MAX_CFL) {
        return Err(PropagatorError::Cfl {
            cfl,
            limit: MAX_CFL,
        });
    }
    let t_max = times.last().copied().unwrap_or(0.0);
    let speed = PhaseFn::new(m).speed(t_max).max(1e-300);
    let dt_max = cfl * grid.h() / speed;
    let mut prev = 0.0;
    Ok(times
        .iter()
        .map(|&t| {
            let n = ((t - prev) / dt_max).ceil() as usize;
            prev = t;
            n
        })
        .collect())
}

pub fn fd_oracle(
    setup: &LinearSetup,
    f: &[f64],
    g: &[f64],
    times: &[f64],
    opts: FdOptions,
) -> Result<SpaceTimeField, PropagatorError> {
    check_inputs(setup, f, g, times)?;
    let plan = step_plan(setup.m, &setup.grid, times, opts.cfl)?;
    fd_run(setup, f, g, times, &plan)
}

/// The leapfrog stepper without the support and horizon checks, for data
/// such as single standing modes `sin(λ_k r)/r` that fill the whole interval.
pub fn fd_evolve(
    setup: &LinearSetup,
    f: &[f64],
    g: &[f64],
    times: &[f64],
    opts: FdOptions,
) -> Result<SpaceTimeField, PropagatorError> {
    let expected = setup.grid.n + 1;
    for d in [f, g] {
        if d.len() != expected {
            return Err(PropagatorError::LengthMismatch {
                expected,
                got: d.len(),
            });
        }
    }
    super::check_times(times)?;
    let plan = step_plan(setup.m, &setup.grid, times, opts.cfl)?;
    fd_run(setup, f, g, times, &plan)
}

/// Richardson extrapolation `(4 u_{h/2} - u_h) / 3` of two leapfrog runs, the
/// fine one with half the spacing and exactly twice the steps. Returned on
/// the coarse grid.
pub fn fd_oracle_richardson(
    setup: &LinearSetup,
    f: &RadialProfile,
    g: &RadialProfile,
    times: &[f64],
    opts: FdOptions,
) -> Result<SpaceTimeField, PropagatorError> {
    let coarse_grid = setup.grid;
    let fine = LinearSetup {
        grid: coarse_grid.refined(),
        ..*setup
    };
    let (fc, gc) = (f.sample(&coarse_grid), g.sample(&coarse_grid));
    let (ff, gf) = (f.sample(&fine.grid), g.sample(&fine.grid));
    check_inputs(setup, &fc, &gc, times)?;
    let plan = step_plan(setup.m, &coarse_grid, times, opts.cfl)?;
    let plan_fine: Vec<usize> = plan.iter().map(|n| 2 * n).collect();
    let coarse = fd_run(setup, &fc, &gc, times, &plan)?;
    let fine_run = fd_run(&fine, &ff, &gf, times, &plan_fine)?;
    let snapshots = coarse
        .snapshots
        .iter()
        .zip(&fine_run.snapshots)
        .map(|(c, fsnap)| Snapshot {
            t: c.t,
            u: c
                .u
                .iter()
                .enumerate()
                .map(|(i, uc)| (4.0 * fsnap.u[2 * i] - uc) / 3.0)
                .collect(),
        })
        .collect();
    Ok(SpaceTimeField {
        snapshots,
        ..coarse
    })
}

fn fd_run(
    setup: &LinearSetup,
    f: &[f64],
    g: &[f64],
    times: &[f64],
    plan: &[usize],
) -> Result<SpaceTimeField, PropagatorError> {
    let grid = setup.grid;
    let n = grid.n;
    let h = grid.h();
    let m = setup.m as i32;
    let inv_h2 = 1.0 / (h * h);
    // w at all nodes 0..=n with w_0 = w_n = 0
    let w0: Vec<f64> = (0..=n).map(|i| grid.r(i) * f[i]).collect();
    let w1: Vec<f64> = (0..=n).map(|i| grid.r(i) * g[i]).collect();
    let lap = |w: &[f64], i: usize| (w[i + 1] - 2.0 * w[i] + w[i - 1]) * inv_h2;

    let mut snapshots = Vec::with_capacity(times.len());
    let mut prev = w0.clone();
    let mut cur = w0.clone();
    let mut t: f64 = 0.0;
    let mut dt_prev = 0.0;
    let mut first = true;
    // two-level norm so a standing mode passing through zero is not flagged
    let mut norm_prev = 2.0 * energy(&cur);
    let mut t_start = 0.0;
    for (&t_snap, &steps) in times.iter().zip(plan) {
        if steps == 0 {
            snapshots.push(snapshot(&grid, t_snap, &cur));
            continue;
        }
        let dt = (t_snap - t_start) / steps as f64;
        for s in 0..steps {
            let mut next = vec![0.0; n + 1];
            if first {
                // Taylor start: w(dt) = f + dt g + dt^{m+2}/((m+1)(m+2)) f_rr
                //   + dt^{m+3}/((m+2)(m+3)) g_rr
                let mf = m as f64;
                let c2 = dt.powi(m + 2) / ((mf + 1.0) * (mf + 2.0));
                let c3 = dt.powi(m + 3) / ((mf + 2.0) * (mf + 3.0));
                for i in 1..n {
                    next[i] = w0[i] + dt * w1[i] + c2 * lap(&w0, i) + c3 * lap(&w1, i);
                }
                first = false;
            } else {
                let coef = t.powi(m);
                let ratio = dt / dt_prev;
                let acc_scale = 0.5 * dt * (dt + dt_prev) * coef;
                for i in 1..n {
                    next[i] = cur[i] + ratio * (cur[i] - prev[i]) + acc_scale * lap(&cur, i);
                }
            }
            prev = std::mem::replace(&mut cur, next);
            dt_prev = dt;
            t = if s + 1 == steps {
                t_snap
            } else {
                t_start + (s + 1) as f64 * dt
            };
            let norm = energy(&cur) + energy(&prev);
            if !norm.is_finite() || (norm_prev > 1e-200 && norm > GROWTH_LIMIT * GROWTH_LIMIT * norm_prev)
            {
                return Err(PropagatorError::Instability {
                    t,
                    growth: (norm / norm_prev).sqrt(),
                });
            }
            norm_prev = norm;
        }
        t_start = t_snap;
        snapshots.push(snapshot(&grid, t_snap, &cur));
    }
    Ok(SpaceTimeField {
        m: setup.m,
        big_m: setup.big_m,
        grid,
        snapshots,
    })
}

fn energy(w: &[f64]) -> f64 {
    w.iter().map(|x| x * x).sum()
}

fn snapshot(grid: &RadialGrid, t: f64, w: &[f64]) -> Snapshot {
    Snapshot {
        t,
        u: radial_from_w(grid, &w[1..grid.n]),
    }
}
