//! Empirical probes of the weighted Strichartz estimates for radial data in
//! three dimensions.
//!
//! Each probe solves the linear problem for a family of data (or sources),
//! measures the weighted space-time `L^q` norm of the solution over a
//! truncated box, and divides by the data norm on the other side of the
//! estimate. The existence of a data-independent constant is probed through
//! the spread of these ratios across a family.

pub mod dyadic;
pub mod family;
pub mod sobolev;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exponents::{q_bounds, strichartz_delta_bound, strichartz_gamma_bound, ExponentError};
use crate::linear_propagator::{
    log_times, unit_bump, LinearSetup, NormAccumulator, PropagatorError, Propagator, RadialGrid,
    RadialProfile, SineTransform, SpaceTimeWeight,
};
use crate::phase_geometry::PhaseFn;
use crate::semilinear_solver::{solve_with_source_streaming, SolverError};
use crate::special_functions::least_squares_fit;

pub use dyadic::{dyadic_decompose, dyadic_decompose_spectral, lp_partition_check, DyadicBand, DyadicCutoff, DyadicDecomposition};
pub use family::{DataFamily, FamilyMember};
pub use sobolev::{sobolev_w_s1_norm, sobolev_w_s1_norm_with, SobolevNorm, SobolevOptions};

/// Tail bound (relative to the truncated integral) above which a row is
/// flagged.
pub const TAIL_DOMINATED: f64 = 0.1;

#[derive(Debug, Error)]
pub enum StrichartzError {
    #[error("parameter window violated: {constraint} (value {value}, bound {bound})")]
    Window {
        constraint: &'static str,
        value: f64,
        bound: f64,
    },
    #[error("hypothesis violated for member {id}: {constraint}")]
    Hypothesis { id: String, constraint: &'static str },
    #[error("member {id} is not supported in r <= M - 1: support {support} > {limit}")]
    DataSupport { id: String, support: f64, limit: f64 },
    #[error("Sobolev order {s} outside [0, 6]")]
    SobolevOrder { s: f64 },
    #[error("spectral tail {fraction:e} above {limit:e} after the order-{s} multiplier")]
    TailEnergy { s: f64, fraction: f64, limit: f64 },
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

fn window(constraint: &'static str, value: f64, bound: f64) -> StrichartzError {
    StrichartzError::Window {
        constraint,
        value,
        bound,
    }
}

/// Exponents and box of a probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrichartzParams {
    pub m: u32,
    pub n: u32,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub q: f64,
    pub gamma: f64,
    pub delta: f64,
    /// Time truncation of the space-time box.
    pub t_max: f64,
    /// Sources are smooth on `[0, T0]`; the inhomogeneous norm starts at `T0/2`.
    #[serde(rename = "T0")]
    pub t0: f64,
}

impl StrichartzParams {
    /// `q` at the midpoint of `(q_min, 2 q0)`, `γ` at half its bound and `δ`
    /// at the midpoint of its window.
    pub fn midpoint(m: u32, n: u32, big_m: f64) -> Result<Self, StrichartzError> {
        let (q_min, q0) = q_bounds(m, n);
        let q = 0.5 * (q_min + 2.0 * q0);
        let gamma = 0.5 * strichartz_gamma_bound(m, n, q)?;
        let delta = 0.5 * strichartz_delta_bound(m, n, q, gamma);
        Ok(Self {
            m,
            n,
            big_m,
            q,
            gamma,
            delta,
            t_max: 100.0,
            t0: 0.5,
        })
    }

    pub fn with_exponents(mut self, q: f64, gamma: f64, delta: f64) -> Self {
        self.q = q;
        self.gamma = gamma;
        self.delta = delta;
        self
    }

    fn validate_common(&self) -> Result<f64, StrichartzError> {
        if self.n != 3 {
            return Err(window("n = 3 (radial solver)", self.n as f64, 3.0));
        }
        if !(self.big_m > 1.0) {
            return Err(window("M > 1", self.big_m, 1.0));
        }
        if !(self.t_max > 2.0 && self.t_max.is_finite()) {
            return Err(window("t_max > 2", self.t_max, 2.0));
        }
        if !(self.t0 > 0.0 && self.t0 < 1.0) {
            return Err(window("0 < T0 < 1", self.t0, 1.0));
        }
        let (q_min, _) = q_bounds(self.m, self.n);
        if !(self.q > q_min) {
            return Err(window("q > q_min", self.q, q_min));
        }
        let bound = strichartz_gamma_bound(self.m, self.n, self.q)?;
        if !(self.gamma > 0.0) {
            return Err(window("gamma > 0", self.gamma, 0.0));
        }
        Ok(bound)
    }

    fn validate_gamma(&self, bound: f64) -> Result<(), StrichartzError> {
        if !(self.gamma < bound) {
            return Err(window("gamma < strichartz_gamma_bound(q)", self.gamma, bound));
        }
        Ok(())
    }

    fn validate_delta(&self) -> Result<(), StrichartzError> {
        if !(self.delta > 0.0) {
            return Err(window("delta > 0", self.delta, 0.0));
        }
        let d_hi = strichartz_delta_bound(self.m, self.n, self.q, self.gamma);
        if !(self.delta < d_hi) {
            return Err(window("delta < n/2 + 1/(m+2) - gamma - 1/q", self.delta, d_hi));
        }
        Ok(())
    }

    pub fn validate_homogeneous(&self) -> Result<(), StrichartzError> {
        let bound = self.validate_common()?;
        self.validate_gamma(bound)?;
        self.validate_delta()
    }

    pub fn validate_inhomogeneous(&self) -> Result<(), StrichartzError> {
        let bound = self.validate_common()?;
        self.validate_gamma(bound)?;
        let g2 = self.gamma2();
        if !(g2 > 1.0 / self.q) {
            return Err(window("gamma2 = (q-1) gamma1 > 1/q", g2, 1.0 / self.q));
        }
        Ok(())
    }

    /// Source-side weight exponent `(q - 1) γ`.
    pub fn gamma2(&self) -> f64 {
        (self.q - 1.0) * self.gamma
    }

    /// Sobolev orders `(n/2 + 1/(m+2) + δ, n/2 - 1/(m+2) + δ)` for `f` and `g`.
    pub fn sobolev_orders(&self) -> (f64, f64) {
        let base = self.n as f64 / 2.0;
        let k = 1.0 / (self.m as f64 + 2.0);
        (base + k + self.delta, base - k + self.delta)
    }
}

/// Discretisation controls shared by the probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    /// Grid points per smallest data feature.
    pub points_per_feature: f64,
    pub h_max: f64,
    /// Radial padding beyond `φ(t_max) + M - 1`.
    pub pad: f64,
    /// Uniform samples on the early interval `[t_lo, t_switch]`.
    pub n_linear: usize,
    pub t_switch: f64,
    /// Log-spaced samples on `(t_switch, t_max]`.
    pub n_log: usize,
    /// The tail fit uses samples with `t >= tail_fit_from · t_max`.
    pub tail_fit_from: f64,
    /// Step length inside the source support.
    pub source_dt: f64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            points_per_feature: 25.0,
            h_max: 0.02,
            pad: 5.0,
            n_linear: 80,
            t_switch: 2.0,
            n_log: 120,
            tail_fit_from: 0.25,
            source_dt: 0.005,
        }
    }
}

impl ProbeOptions {
    pub fn sample_times(&self, t_lo: f64, t_max: f64) -> Vec<f64> {
        let mut times: Vec<f64> = (0..=self.n_linear)
            .map(|i| t_lo + (self.t_switch - t_lo) * i as f64 / self.n_linear as f64)
            .collect();
        times.extend(log_times(self.t_switch, t_max, self.n_log + 1).into_iter().skip(1));
        times
    }

    fn spacing(&self, feature: f64) -> f64 {
        (feature / self.points_per_feature).min(self.h_max)
    }
}

/// One row of a ratio table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub member_id: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `None` for excluded rows (zero data).
    pub ratio: Option<f64>,
    /// Extrapolated tail of the space-time integral beyond `t_max`, relative
    /// to the truncated integral.
    pub tail_fraction: f64,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTable {
    pub rows: Vec<RatioRow>,
}

impl RatioTable {
    fn ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().filter_map(|r| r.ratio)
    }

    pub fn max(&self) -> Option<f64> {
        self.ratios().reduce(f64::max)
    }

    pub fn min(&self) -> Option<f64> {
        self.ratios().reduce(f64::min)
    }

    pub fn max_over_min(&self) -> Option<f64> {
        Some(self.max()? / self.min()?)
    }

    pub fn max_tail_fraction(&self) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.ratio.is_some())
            .map(|r| r.tail_fraction)
            .fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.ratios().all(f64::is_finite)
    }
}

/// Tail of `∫ I(t) dt` beyond the last sample, from a power-law fit of the
/// spatial integrals `I(t)` with `t >= t_fit`, relative to `integral`.
/// Infinite when the fitted decay is not integrable.
pub fn tail_fraction(history: &[(f64, f64)], integral: f64, t_fit: f64) -> f64 {
    let pts: Vec<(f64, f64)> = history
        .iter()
        .filter(|(t, i)| *t >= t_fit && *i > 0.0)
        .map(|(t, i)| (t.ln(), i.ln()))
        .collect();
    if integral <= 0.0 {
        return 0.0;
    }
    if pts.len() < 3 {
        return f64::INFINITY;
    }
    let (slope, intercept) = least_squares_fit(&pts);
    if slope >= -1.0 {
        return f64::INFINITY;
    }
    let t_end = history.last().map(|h| h.0).unwrap_or(0.0);
    let i_end = (intercept + slope * t_end.ln()).exp();
    i_end * t_end / (-slope - 1.0) / integral
}

/// Trapezoid integral of `(t, I)` samples up to `t_end`.
pub fn partial_integral(history: &[(f64, f64)], t_end: f64) -> f64 {
    history
        .windows(2)
        .take_while(|w| w[1].0 <= t_end * (1.0 + 1e-12))
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum()
}

fn flags_for(tail: f64) -> Vec<String> {
    if tail > TAIL_DOMINATED {
        vec!["tail-dominated".to_string()]
    } else {
        Vec::new()
    }
}

fn excluded_row(id: &str) -> RatioRow {
    RatioRow {
        member_id: id.to_string(),
        lhs: 0.0,
        rhs: 0.0,
        ratio: None,
        tail_fraction: 0.0,
        flags: vec!["excluded-zero".to_string()],
    }
}

/// Space-time integral history of the homogeneous solution for one member.
fn homogeneous_history(
    params: &StrichartzParams,
    member: &FamilyMember,
    opts: &ProbeOptions,
) -> Result<Vec<(f64, f64)>, StrichartzError> {
    let feature = member.f.feature_scale().min(member.g.feature_scale());
    let setup = LinearSetup::for_horizon(params.m, params.big_m, params.t_max, opts.spacing(feature), opts.pad)?;
    let grid = setup.grid;
    let prop = Propagator::with_transform(setup, SineTransform::fast(grid.n))?;
    let mut acc = NormAccumulator::new(
        params.m,
        grid,
        SpaceTimeWeight::Characteristic { big_m: params.big_m },
        params.gamma,
        params.q,
    );
    let times = opts.sample_times(0.0, params.t_max);
    prop.solve_streaming(&member.f.sample(&grid), &member.g.sample(&grid), &times, |t, u| {
        acc.push(t, u)
    })?;
    Ok(acc.history().to_vec())
}

fn homogeneous_rhs(params: &StrichartzParams, member: &FamilyMember) -> Result<f64, StrichartzError> {
    let (s_f, s_g) = params.sobolev_orders();
    Ok(sobolev_w_s1_norm(&member.f, s_f)?.value + sobolev_w_s1_norm(&member.g, s_g)?.value)
}

fn homogeneous_row(
    params: &StrichartzParams,
    member: &FamilyMember,
    opts: &ProbeOptions,
) -> Result<RatioRow, StrichartzError> {
    if member.f.is_zero() && member.g.is_zero() {
        return Ok(excluded_row(&member.id));
    }
    let rhs = homogeneous_rhs(params, member)?;
    let history = homogeneous_history(params, member, opts)?;
    let integral = partial_integral(&history, params.t_max);
    let tail = tail_fraction(&history, integral, opts.tail_fit_from * params.t_max);
    let lhs = integral.powf(1.0 / params.q);
    Ok(RatioRow {
        member_id: member.id.clone(),
        lhs,
        rhs,
        ratio: Some(lhs / rhs),
        tail_fraction: tail,
        flags: flags_for(tail),
    })
}

/// Ratios `‖weight^γ u‖_{L^q} / (‖f‖_{W^{s_f,1}} + ‖g‖_{W^{s_g,1}})` over a family.
pub fn homogeneous_ratio(
    params: &StrichartzParams,
    family: &DataFamily,
    opts: &ProbeOptions,
) -> Result<RatioTable, StrichartzError> {
    params.validate_homogeneous()?;
    family.check_support(params.big_m)?;
    let rows = family
        .members
        .par_iter()
        .map(|mem| homogeneous_row(params, mem, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RatioTable { rows })
}

/// Homogeneous ratio for one member at several box sizes, with `γ` raised
/// `excess` above its admissible bound (deliberately outside the window).
pub fn window_sensitivity(
    params: &StrichartzParams,
    member: &FamilyMember,
    excess: f64,
    boxes: &[f64],
    opts: &ProbeOptions,
) -> Result<Vec<(f64, f64)>, StrichartzError> {
    let bound = params.validate_common()?;
    let mut p = *params;
    p.gamma = bound + excess;
    p.t_max = boxes.iter().copied().fold(0.0, f64::max);
    DataFamily {
        members: vec![member.clone()],
    }
    .check_support(p.big_m)?;
    let rhs = homogeneous_rhs(params, member)?;
    let history = homogeneous_history(&p, member, opts)?;
    Ok(boxes
        .iter()
        .map(|&b| (b, partial_integral(&history, b).powf(1.0 / p.q) / rhs))
        .collect())
}

/// Time profile of the probe sources: a smooth bump on `[1, 2]`.
pub fn source_time_profile(t: f64) -> f64 {
    unit_bump(2.0 * (t - 1.5))
}

/// Support in `t` of [`source_time_profile`].
pub const SOURCE_SUPPORT: (f64, f64) = (1.0, 2.0);

/// Separable sources `S(t, r) = bump(2(t - 3/2)) · spatial(r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceMember {
    pub id: String,
    pub spatial: RadialProfile,
}

impl SourceMember {
    pub fn eval(&self, t: f64, r: f64) -> f64 {
        source_time_profile(t) * self.spatial.eval(r)
    }
}

/// Sources with spatial parts the centred bumps of [`DataFamily::widths`].
pub fn source_family(big_m: f64, fractions: &[f64]) -> Vec<SourceMember> {
    DataFamily::widths(big_m, fractions)
        .members
        .into_iter()
        .map(|m| SourceMember {
            id: m.id,
            spatial: m.f,
        })
        .collect()
}

/// `(∫∫ ((φ+M)² - r²)^{γ₂ q'} |S|^{q'} dx dt)^{1/q'}` with `q' = q/(q-1)`,
/// by the trapezoid rule on the (compact) support of the source.
pub fn source_norm(params: &StrichartzParams, src: &SourceMember) -> f64 {
    let qp = params.q / (params.q - 1.0);
    let gq = params.gamma2() * qp;
    let phase = PhaseFn::new(params.m);
    let (t_a, t_b) = SOURCE_SUPPORT;
    let rho = src.spatial.support_radius();
    let (nt, nr) = (400usize, 4000usize);
    let (dt, dr) = ((t_b - t_a) / nt as f64, rho / nr as f64);
    let mut total = 0.0;
    for i in 0..=nt {
        let t = t_a + i as f64 * dt;
        let a = phase.eval(t) + params.big_m;
        let ht = source_time_profile(t).abs().powf(qp);
        if ht == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for j in 0..=nr {
            let r = j as f64 * dr;
            let wj = if j == 0 || j == nr { 0.5 } else { 1.0 };
            inner += wj * (a * a - r * r).powf(gq) * src.spatial.eval(r).abs().powf(qp) * r * r;
        }
        let wi = if i == 0 || i == nt { 0.5 } else { 1.0 };
        total += wi * ht * inner * dr;
    }
    (4.0 * std::f64::consts::PI * total * dt).powf(1.0 / qp)
}

fn inhomogeneous_row(
    params: &StrichartzParams,
    src: &SourceMember,
    opts: &ProbeOptions,
) -> Result<RatioRow, StrichartzError> {
    if src.spatial.is_zero() {
        return Ok(excluded_row(&src.id));
    }
    let rhs = source_norm(params, src);
    let setup = LinearSetup::for_horizon(
        params.m,
        params.big_m,
        params.t_max,
        opts.spacing(src.spatial.feature_scale()),
        opts.pad,
    )?;
    let grid: RadialGrid = setup.grid;
    let prop = Propagator::with_transform(setup, SineTransform::fast(grid.n))?;
    let spatial = src.spatial.sample(&grid);
    let mut acc = NormAccumulator::new(
        params.m,
        grid,
        SpaceTimeWeight::Characteristic { big_m: params.big_m },
        params.gamma,
        params.q,
    );
    let times = opts.sample_times(0.5 * params.t0, params.t_max);
    solve_with_source_streaming(
        &prop,
        |t| {
            let h = source_time_profile(t);
            spatial.iter().map(|v| h * v).collect()
        },
        SOURCE_SUPPORT,
        opts.source_dt,
        &times,
        |t, u| acc.push(t, u),
    )?;
    let integral = acc.integral();
    let tail = tail_fraction(acc.history(), integral, opts.tail_fit_from * params.t_max);
    let lhs = acc.norm();
    Ok(RatioRow {
        member_id: src.id.clone(),
        lhs,
        rhs,
        ratio: Some(lhs / rhs),
        tail_fraction: tail,
        flags: flags_for(tail),
    })
}

/// Ratios `‖weight^{γ₁} u‖_{L^q(t >= T0/2)} / ‖weight^{γ₂} S‖_{L^{q'}}` for
/// sources supported in `t ∈ [1, 2]`, with `γ₂ = (q - 1) γ₁`.
pub fn inhomogeneous_ratio(
    params: &StrichartzParams,
    sources: &[SourceMember],
    opts: &ProbeOptions,
) -> Result<RatioTable, StrichartzError> {
    params.validate_inhomogeneous()?;
    let phase = PhaseFn::new(params.m);
    for src in sources {
        // the source must sit inside |x| <= φ(t) + M - 1 on its time support
        let reach = phase.eval(SOURCE_SUPPORT.0) + params.big_m - 1.0;
        if src.spatial.support_radius() > reach {
            return Err(StrichartzError::Hypothesis {
                id: src.id.clone(),
                constraint: "source vanishes for |x| > phi(t) + M - 1",
            });
        }
    }
    let rows = sources
        .par_iter()
        .map(|src| inhomogeneous_row(params, src, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RatioTable { rows })
}
