//! Dyadic partition of unity in frequency and the induced band decomposition
//! of radial snapshots.

use serde::{Deserialize, Serialize};

use crate::linear_propagator::{radial_l2, RadialGrid, SineTransform, SpectralField};

/// `β(τ) = χ(τ) - χ(2τ)` with `χ(τ) = S(log₂ τ / w)`, where `S` is the smooth
/// step from 1 (at 0) to 0 (at 1) built from `e^{-1/x}` and `w` is the
/// transition width in octaves. The support of `β` is `(1/2, 2^w)`, and the
/// dyadic sum telescopes to one. For `w < 1`, `β = 1` on `[2^{w-1}, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicCutoff {
    pub transition: f64,
}

impl Default for DyadicCutoff {
    fn default() -> Self {
        Self { transition: 0.5 }
    }
}

fn psi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// Smooth step: 1 for `x <= 0`, 0 for `x >= 1`.
fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x >= 1.0 {
        0.0
    } else {
        let a = psi(1.0 - x);
        a / (a + psi(x))
    }
}

impl DyadicCutoff {
    /// # Panics
    /// If `transition` is outside `(0, 1]`.
    pub fn new(transition: f64) -> Self {
        assert!(transition > 0.0 && transition <= 1.0, "transition must lie in (0, 1]");
        Self { transition }
    }

    fn chi(&self, log2_tau: f64) -> f64 {
        smooth_step(log2_tau / self.transition)
    }

    pub fn beta(&self, tau: f64) -> f64 {
        if !(tau > 0.0) {
            return 0.0;
        }
        let l = tau.log2();
        self.chi(l) - self.chi(l + 1.0)
    }

    /// `Σ_j β(τ/2^j)` over `j ∈ [⌊log₂τ⌋ - half_window, ⌊log₂τ⌋ + half_window]`.
    pub fn window_sum(&self, tau: f64, half_window: i32) -> f64 {
        let j0 = tau.log2().floor() as i32;
        (j0 - half_window..=j0 + half_window)
            .map(|j| self.beta(tau / 2f64.powi(j)))
            .sum()
    }

    /// Dyadic indices whose band can be nonzero at `tau`.
    pub fn active_bands(&self, tau: f64) -> std::ops::RangeInclusive<i32> {
        let j0 = tau.log2().floor() as i32;
        j0 - 1..=j0 + 1
    }
}

/// Largest `|Σ_j β(τ/2^j) - 1|` over the grid with window `⌊log₂τ⌋ ± half_window`.
pub fn lp_partition_check(cutoff: &DyadicCutoff, tau_grid: &[f64], half_window: i32) -> f64 {
    tau_grid
        .iter()
        .map(|&tau| (cutoff.window_sum(tau, half_window) - 1.0).abs())
        .fold(0.0, f64::max)
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    crate::linear_propagator::log_times(lo, hi, n)
}

/// One Littlewood-Paley piece `G_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicBand {
    pub j: i32,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicDecomposition {
    pub grid: RadialGrid,
    pub bands: Vec<DyadicBand>,
}

impl DyadicDecomposition {
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.n + 1];
        for b in &self.bands {
            for (o, v) in out.iter_mut().zip(&b.u) {
                *o += v;
            }
        }
        out
    }

    /// `(Σ_j ‖G_j‖₂²)^{1/2}` in the radial `L²(ℝ³)` norm.
    pub fn square_function_l2(&self) -> f64 {
        self.bands
            .iter()
            .map(|b| radial_l2(&self.grid, &b.u).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Bands with any nonzero sample.
    pub fn nonzero_bands(&self) -> Vec<i32> {
        self.bands
            .iter()
            .filter(|b| b.u.iter().any(|&v| v != 0.0))
            .map(|b| b.j)
            .collect()
    }
}

/// Splits a radial snapshot into dyadic frequency bands by weighting its sine
/// coefficients with `β(λ_k / 2^j)`.
pub fn dyadic_decompose(grid: &RadialGrid, u: &[f64], cutoff: &DyadicCutoff) -> DyadicDecomposition {
    let tr = SineTransform::new(grid.n);
    dyadic_decompose_spectral(&SpectralField::from_radial(*grid, u, &tr), cutoff)
}

/// [`dyadic_decompose`] starting from sine coefficients. Bands whose weights
/// vanish on every mode are omitted.
pub fn dyadic_decompose_spectral(field: &SpectralField, cutoff: &DyadicCutoff) -> DyadicDecomposition {
    let grid = field.grid;
    let tr = SineTransform::new(grid.n);
    let j_lo = *cutoff.active_bands(grid.lambda(1)).start();
    let j_hi = *cutoff.active_bands(grid.lambda(grid.n - 1)).end();
    let bands = (j_lo..=j_hi)
        .filter_map(|j| {
            let scale = 2f64.powi(j);
            let c: Vec<f64> = field
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, &ck)| ck * cutoff.beta(grid.lambda(i + 1) / scale))
                .collect();
            if c.iter().all(|&v| v == 0.0) {
                return None;
            }
            let band = SpectralField { grid, coeffs: c };
            Some(DyadicBand {
                j,
                u: band.to_radial(&tr),
            })
        })
        .collect();
    DyadicDecomposition { grid, bands }
}
