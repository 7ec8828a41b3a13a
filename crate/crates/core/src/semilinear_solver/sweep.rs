//! Runs [`super::time_march`] across a grid of exponents.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exponents::{p_conf, p_crit};
use crate::linear_propagator::{LinearSetup, RadialProfile};

use super::{time_march, MarchOptions, NonlinearitySpec, OutcomeKind, SemilinearProblem};

/// Everything except `p` that defines a sweep run. Data are
/// `(eps · f, eps · g)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepBase {
    pub setup: LinearSetup,
    #[serde(rename = "T0")]
    pub t0: f64,
    pub eps: f64,
    pub f: RadialProfile,
    pub g: RadialProfile,
    pub horizon: f64,
    pub march: MarchOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p: f64,
    pub kind: Option<OutcomeKind>,
    pub blowup_time: Option<f64>,
    /// Sup norm at the last recorded time.
    pub final_sup: Option<f64>,
    pub final_weighted_norm: Option<f64>,
    pub steps: usize,
    pub error: Option<String>,
    pub p_crit: f64,
    pub p_conf: f64,
}

pub fn sweep_p(base: &SweepBase, p_grid: &[f64]) -> Vec<SweepRow> {
    let m = base.setup.m;
    let crit = p_crit(m, 3).unwrap_or(f64::NAN);
    let conf = p_conf(m, 3);
    let grid = base.setup.grid;
    let f: Vec<f64> = base.f.sample(&grid).iter().map(|v| base.eps * v).collect();
    let g: Vec<f64> = base.g.sample(&grid).iter().map(|v| base.eps * v).collect();
    p_grid
        .par_iter()
        .map(|&p| {
            let mut row = SweepRow {
                p,
                kind: None,
                blowup_time: None,
                final_sup: None,
                final_weighted_norm: None,
                steps: 0,
                error: None,
                p_crit: crit,
                p_conf: conf,
            };
            let spec = NonlinearitySpec {
                t0: base.t0,
                ..NonlinearitySpec::new(p)
            };
            let run = SemilinearProblem::new(base.setup, spec)
                .and_then(|pr| time_march(&pr, &f, &g, base.horizon, &base.march));
            match run {
                Ok(res) => {
                    row.kind = Some(res.outcome.kind);
                    row.blowup_time = res.outcome.blowup_time;
                    row.final_sup = res.outcome.norm_history.last().map(|h| h.1);
                    row.final_weighted_norm = res.outcome.final_weighted_norm;
                    row.steps = res.outcome.steps;
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}
