//! Radial (`n = 3`) linear propagator: `w = r u` solves `w_tt = t^m w_rr`,
//! so each sine mode `sin(λ_k r)` evolves with the symbol pair `V₁, V₂`.

pub mod fd;
pub mod grid;
pub mod norms;
pub mod transform;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::phase_geometry::{finite_speed_radius, PhaseFn, WeightSpec};
use crate::special_functions::{least_squares_fit, SpecialFnError, SymbolEvaluator};

pub use fd::{fd_evolve, fd_oracle, fd_oracle_richardson, FdOptions};
pub use grid::{unit_bump, RadialGrid, RadialProfile};
pub use norms::{NormAccumulator, SpaceTimeWeight};
pub use transform::{radial_from_w, SineTransform, SpectralField};

/// Relative size (against the peak) tolerated outside `r = M - 1`.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Minimum number of snapshots for a decay fit.
pub const MIN_DECAY_SNAPSHOTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagatorError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("data not supported in r <= M - 1: |value| = {value:e} at r = {r} (peak {peak:e})")]
    SupportViolation { r: f64, value: f64, peak: f64 },
    #[error("grid too small for t = {t_final}: need r_max > {needed}, have {r_max}")]
    GridValidity {
        t_final: f64,
        needed: f64,
        r_max: f64,
    },
    #[error("expected {expected} radial samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("snapshot times must be finite, nonnegative and strictly increasing")]
    TimesNotIncreasing,
    #[error("CFL factor {cfl} outside (0, {limit}]")]
    Cfl { cfl: f64, limit: f64 },
    #[error("finite-difference instability at t = {t}: norm growth {growth:e} per step")]
    Instability { t: f64, growth: f64 },
    #[error("decay fit needs at least {need} snapshots in the window, found {got}")]
    TooFewSnapshots { got: usize, need: usize },
    #[error("decay window starts too early: phi(t_lo) = {phi_lo} < 10 M = {required}")]
    WindowTooEarly { phi_lo: f64, required: f64 },
    #[error(transparent)]
    Symbol(#[from] SpecialFnError),
}

/// Degeneracy, support parameter and grid of a linear run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearSetup {
    pub m: u32,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub grid: RadialGrid,
}

impl LinearSetup {
    pub fn new(m: u32, big_m: f64, grid: RadialGrid) -> Result<Self, PropagatorError> {
        if m == 0 {
            return Err(SpecialFnError::DegenerateM.into());
        }
        if !(big_m > 1.0 && big_m.is_finite()) {
            return Err(PropagatorError::InvalidGrid(format!("M = {big_m} must exceed 1")));
        }
        Ok(Self { m, big_m, grid })
    }

    /// Grid of spacing at most `h` reaching `pad` beyond the support at `t_final`.
    pub fn for_horizon(m: u32, big_m: f64, t_final: f64, h: f64, pad: f64) -> Result<Self, PropagatorError> {
        let r_max = finite_speed_radius(m, big_m, t_final) + pad;
        Self::new(m, big_m, RadialGrid::with_spacing(r_max, h)?)
    }

    /// `r_max > φ(t) + M - 1 + 2h`.
    pub fn check_horizon(&self, t_final: f64) -> Result<(), PropagatorError> {
        let needed = finite_speed_radius(self.m, self.big_m, t_final) + 2.0 * self.grid.h();
        if self.grid.r_max > needed {
            Ok(())
        } else {
            Err(PropagatorError::GridValidity {
                t_final,
                needed,
                r_max: self.grid.r_max,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    pub m: u32,
    pub big_m: f64,
    pub grid: RadialGrid,
    pub snapshots: Vec<Snapshot>,
}

impl SpaceTimeField {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn sup_norm(&self, idx: usize) -> f64 {
        self.snapshots[idx].u.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// `(∫ u² r² dr)^{1/2}` by the trapezoid rule.
    pub fn l2_norm(&self, idx: usize) -> f64 {
        radial_l2(&self.grid, &self.snapshots[idx].u)
    }

    pub fn support_leak(&self, idx: usize) -> f64 {
        let s = &self.snapshots[idx];
        support_leak(self.m, self.big_m, &self.grid, s.t, &s.u)
    }
}

/// `(∫ u² r² dr)^{1/2}`, trapezoid in `r`.
pub fn radial_l2(grid: &RadialGrid, u: &[f64]) -> f64 {
    let h = grid.h();
    let n = grid.n;
    let mut acc = 0.0;
    for (i, v) in u.iter().enumerate() {
        let r = i as f64 * h;
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc += w * v * v * r * r;
    }
    (acc * h).sqrt()
}

/// Fraction of `∫ u² r² dr` lying beyond `r = φ(t) + M - 1 + 2h`.
pub fn support_leak(m: u32, big_m: f64, grid: &RadialGrid, t: f64, u: &[f64]) -> f64 {
    let cut = finite_speed_radius(m, big_m, t) + 2.0 * grid.h();
    let (mut inside, mut outside) = (0.0, 0.0);
    for (i, v) in u.iter().enumerate() {
        let r = grid.r(i);
        let e = v * v * r * r;
        if r > cut {
            outside += e;
        } else {
            inside += e;
        }
    }
    if inside + outside == 0.0 {
        0.0
    } else {
        outside / (inside + outside)
    }
}

pub(crate) fn check_times(times: &[f64]) -> Result<(), PropagatorError> {
    let mut prev = -f64::INFINITY;
    for &t in times {
        if !(t.is_finite() && t >= 0.0 && t > prev) {
            return Err(PropagatorError::TimesNotIncreasing);
        }
        prev = t;
    }
    Ok(())
}

/// Length, support (`|u| < SUPPORT_TOL · peak` beyond `M - 1`) and horizon checks.
pub fn check_data(setup: &LinearSetup, data: &[f64]) -> Result<(), PropagatorError> {
    let expected = setup.grid.n + 1;
    if data.len() != expected {
        return Err(PropagatorError::LengthMismatch {
            expected,
            got: data.len(),
        });
    }
    let peak = data.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !peak.is_finite() {
        return Err(PropagatorError::InvalidGrid("non-finite data".into()));
    }
    let edge = setup.big_m - 1.0;
    for (i, v) in data.iter().enumerate() {
        let r = setup.grid.r(i);
        if r > edge * (1.0 + 1e-12) && v.abs() > SUPPORT_TOL * peak {
            return Err(PropagatorError::SupportViolation {
                r,
                value: v.abs(),
                peak,
            });
        }
    }
    Ok(())
}

pub(crate) fn check_inputs(
    setup: &LinearSetup,
    f: &[f64],
    g: &[f64],
    times: &[f64],
) -> Result<(), PropagatorError> {
    check_data(setup, f)?;
    check_data(setup, g)?;
    check_times(times)?;
    if let Some(&t_final) = times.last() {
        setup.check_horizon(t_final)?;
    }
    Ok(())
}

/// Precomputed sine transform and symbol evaluator for one setup.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub setup: LinearSetup,
    pub transform: SineTransform,
    pub symbols: SymbolEvaluator,
}

impl Propagator {
    pub fn new(setup: LinearSetup) -> Result<Self, PropagatorError> {
        Ok(Self {
            transform: SineTransform::new(setup.grid.n),
            symbols: SymbolEvaluator::new(setup.m)?,
            setup,
        })
    }

    pub fn with_transform(setup: LinearSetup, transform: SineTransform) -> Result<Self, PropagatorError> {
        Ok(Self {
            transform,
            symbols: SymbolEvaluator::new(setup.m)?,
            setup,
        })
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.setup.grid
    }

    /// Sine coefficients of `r u`.
    pub fn analyze(&self, u: &[f64]) -> Vec<f64> {
        SpectralField::from_radial(self.setup.grid, u, &self.transform).coeffs
    }

    /// Radial samples from sine coefficients of `r u`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        radial_from_w(&self.setup.grid, &self.transform.inverse(coeffs))
    }

    /// `ŵ_k(t) = V₁(t, λ_k) f̂_k + V₂(t, λ_k) ĝ_k`.
    pub fn evolve_coeffs(&self, t: f64, f_hat: &[f64], g_hat: &[f64]) -> Vec<f64> {
        let grid = self.setup.grid;
        (0..f_hat.len())
            .into_par_iter()
            .map(|j| {
                let (v1, v2) = self.symbols.values(t, grid.lambda(j + 1));
                v1 * f_hat[j] + v2 * g_hat[j]
            })
            .collect()
    }

    /// Solves and hands each snapshot to `sink` without storing the field.
    pub fn solve_streaming<F>(
        &self,
        f: &[f64],
        g: &[f64],
        times: &[f64],
        mut sink: F,
    ) -> Result<(), PropagatorError>
    where
        F: FnMut(f64, &[f64]),
    {
        check_inputs(&self.setup, f, g, times)?;
        let f_hat = self.analyze(f);
        let g_hat = self.analyze(g);
        for &t in times {
            let c = self.evolve_coeffs(t, &f_hat, &g_hat);
            let u = self.synthesize(&c);
            sink(t, &u);
        }
        Ok(())
    }

    pub fn solve(&self, f: &[f64], g: &[f64], times: &[f64]) -> Result<SpaceTimeField, PropagatorError> {
        let mut snapshots = Vec::with_capacity(times.len());
        self.solve_streaming(f, g, times, |t, u| {
            snapshots.push(Snapshot { t, u: u.to_vec() })
        })?;
        Ok(SpaceTimeField {
            m: self.setup.m,
            big_m: self.setup.big_m,
            grid: self.setup.grid,
            snapshots,
        })
    }
}

/// Spectral solution at the requested times.
pub fn solve_linear(
    setup: &LinearSetup,
    f: &[f64],
    g: &[f64],
    times: &[f64],
) -> Result<SpaceTimeField, PropagatorError> {
    Propagator::new(*setup)?.solve(f, g, times)
}

/// Least-squares slope of `log sup|u|` against `log φ(t)` over snapshots in
/// `[t_lo, t_hi]`.
pub fn decay_slope(field: &SpaceTimeField, window: (f64, f64)) -> Result<f64, PropagatorError> {
    let phase = PhaseFn::new(field.m);
    let phi_lo = phase.eval(window.0);
    if phi_lo < 10.0 * field.big_m * (1.0 - 1e-12) {
        return Err(PropagatorError::WindowTooEarly {
            phi_lo,
            required: 10.0 * field.big_m,
        });
    }
    let pts: Vec<(f64, f64)> = field
        .snapshots
        .iter()
        .enumerate()
        .filter(|(_, s)| s.t >= window.0 && s.t <= window.1)
        .map(|(i, s)| (phase.eval(s.t).ln(), field.sup_norm(i).ln()))
        .collect();
    if pts.len() < MIN_DECAY_SNAPSHOTS {
        return Err(PropagatorError::TooFewSnapshots {
            got: pts.len(),
            need: MIN_DECAY_SNAPSHOTS,
        });
    }
    Ok(least_squares_fit(&pts).0)
}

/// Predicted sup-norm decay exponent `(n-1)/2 + m/(2(m+2))` in `n = 3`.
pub fn predicted_decay_exponent(m: u32) -> f64 {
    1.0 + crate::special_functions::amplitude_decay_exponent(m)
}

/// Discrete `(∫∫ ((φ+M)² - r²)^{γq} |u|^q 4πr² dr dt)^{1/q}` over `r <= φ(t)+M-1`.
pub fn weighted_field_norm(field: &SpaceTimeField, spec: &WeightSpec) -> f64 {
    let mut acc = NormAccumulator::new(
        field.m,
        field.grid,
        SpaceTimeWeight::Characteristic { big_m: spec.big_m },
        spec.gamma,
        spec.q,
    );
    for s in &field.snapshots {
        acc.push(s.t, &s.u);
    }
    acc.norm()
}

/// `n` log-spaced times on `[t_lo, t_hi]`.
pub fn log_times(t_lo: f64, t_hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![t_lo];
    }
    let (a, b) = (t_lo.ln(), t_hi.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                t_hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
