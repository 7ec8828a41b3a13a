//! Discrete sine transform (DST-I) on the interior nodes of a radial grid.
//!
//! Forward: `ŵ_k = (2/N) Σ_{i=1}^{N-1} w_i sin(πki/N)`.
//! Inverse: `w_i = Σ_{k=1}^{N-1} ŵ_k sin(πki/N)`.
//! With this scaling `h Σ w_i² = (r_max/2) Σ ŵ_k²`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::grid::RadialGrid;

/// Largest `N` for which the direct `O(N²)` product is used by default.
pub const DIRECT_MAX_N: usize = 4096;

#[derive(Clone)]
enum Path {
    /// `sin(πj/N)` for `j = 0..2N`; entry `(k i) mod 2N` gives `sin(πki/N)`.
    Direct(Arc<Vec<f64>>),
    Fft(Arc<dyn Fft<f64>>),
}

#[derive(Clone)]
pub struct SineTransform {
    n: usize,
    path: Path,
}

impl std::fmt::Debug for SineTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.path {
            Path::Direct(_) => "direct",
            Path::Fft(_) => "fft",
        };
        write!(f, "SineTransform {{ n: {}, path: {kind} }}", self.n)
    }
}

impl SineTransform {
    pub fn new(n: usize) -> Self {
        if n <= DIRECT_MAX_N {
            Self::direct(n)
        } else {
            Self::fast(n)
        }
    }

    pub fn direct(n: usize) -> Self {
        let table = (0..2 * n)
            .map(|j| (std::f64::consts::PI * j as f64 / n as f64).sin())
            .collect();
        Self {
            n,
            path: Path::Direct(Arc::new(table)),
        }
    }

    pub fn fast(n: usize) -> Self {
        let plan = FftPlanner::new().plan_fft_forward(2 * n);
        Self {
            n,
            path: Path::Fft(plan),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_direct(&self) -> bool {
        matches!(self.path, Path::Direct(_))
    }

    /// `S_k = Σ_{i=1}^{N-1} x_i sin(πki/N)` for `k = 1..N-1`;
    /// `x` and the result are indexed from 0 (entry `j` is node/mode `j+1`).
    fn raw(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(x.len(), n - 1, "sine transform length");
        match &self.path {
            Path::Direct(table) => {
                let two_n = 2 * n;
                (1..n)
                    .into_par_iter()
                    .map(|k| {
                        let mut acc = 0.0;
                        let mut idx = k;
                        for &xi in x {
                            acc += xi * table[idx];
                            idx += k;
                            if idx >= two_n {
                                idx -= two_n;
                            }
                        }
                        acc
                    })
                    .collect()
            }
            Path::Fft(plan) => {
                let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
                for (i, &xi) in x.iter().enumerate() {
                    buf[i + 1] = Complex64::new(xi, 0.0);
                    buf[2 * n - i - 1] = Complex64::new(-xi, 0.0);
                }
                plan.process(&mut buf);
                (1..n).map(|k| -0.5 * buf[k].im).collect()
            }
        }
    }

    pub fn forward(&self, w_interior: &[f64]) -> Vec<f64> {
        let scale = 2.0 / self.n as f64;
        let mut out = self.raw(w_interior);
        out.iter_mut().for_each(|c| *c *= scale);
        out
    }

    pub fn inverse(&self, coeffs: &[f64]) -> Vec<f64> {
        self.raw(coeffs)
    }
}

/// Sine coefficients of `w = r·u`, mode `k` stored at index `k - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub grid: RadialGrid,
    pub coeffs: Vec<f64>,
}

impl SpectralField {
    /// Transforms radial samples `u(r_i)`, `i = 0..=N`.
    pub fn from_radial(grid: RadialGrid, u: &[f64], tr: &SineTransform) -> Self {
        let w: Vec<f64> = (1..grid.n).map(|i| grid.r(i) * u[i]).collect();
        Self {
            grid,
            coeffs: tr.forward(&w),
        }
    }

    /// `w` at interior nodes `1..N-1`.
    pub fn to_w(&self, tr: &SineTransform) -> Vec<f64> {
        tr.inverse(&self.coeffs)
    }

    /// Radial samples `u(r_i)`, `i = 0..=N`.
    pub fn to_radial(&self, tr: &SineTransform) -> Vec<f64> {
        radial_from_w(&self.grid, &self.to_w(tr))
    }

    /// `(r_max / 2) Σ ŵ_k²`, the continuous `∫ w² dr` of the sine series.
    pub fn coefficient_energy(&self) -> f64 {
        0.5 * self.grid.r_max * self.coeffs.iter().map(|c| c * c).sum::<f64>()
    }

    /// Fraction of coefficient energy carried by the upper `fraction` of modes.
    pub fn tail_energy_fraction(&self, fraction: f64) -> f64 {
        let total: f64 = self.coeffs.iter().map(|c| c * c).sum();
        if total == 0.0 {
            return 0.0;
        }
        let start = ((1.0 - fraction) * self.coeffs.len() as f64) as usize;
        self.coeffs[start..].iter().map(|c| c * c).sum::<f64>() / total
    }
}

/// `h Σ w_i²` over interior nodes.
pub fn grid_energy(grid: &RadialGrid, w_interior: &[f64]) -> f64 {
    grid.h() * w_interior.iter().map(|w| w * w).sum::<f64>()
}

/// `u = w / r` at nodes `0..=N`; `u(0) = w'(0)` by the fourth-order one-sided
/// stencil `(48w₁ - 36w₂ + 16w₃ - 3w₄) / 12h` (using `w₀ = 0`), `u(r_max) = 0`.
pub fn radial_from_w(grid: &RadialGrid, w_interior: &[f64]) -> Vec<f64> {
    let n = grid.n;
    let h = grid.h();
    let mut u = vec![0.0; n + 1];
    for i in 1..n {
        u[i] = w_interior[i - 1] / grid.r(i);
    }
    let w = |i: usize| w_interior[i - 1];
    u[0] = (48.0 * w(1) - 36.0 * w(2) + 16.0 * w(3) - 3.0 * w(4)) / (12.0 * h);
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> Vec<f64> {
        (1..n)
            .map(|i| {
                let x = i as f64 / n as f64;
                (x * (1.0 - x)).powi(2) * (1.0 + 3.0 * x).sin()
            })
            .collect()
    }

    #[test]
    fn direct_roundtrip_and_parseval() {
        let grid = RadialGrid::new(7.0, 64).unwrap();
        let tr = SineTransform::direct(64);
        let w = sample(64);
        let c = tr.forward(&w);
        let back = tr.inverse(&c);
        for (a, b) in w.iter().zip(&back) {
            assert!((a - b).abs() < 1e-14);
        }
        let f = SpectralField {
            grid,
            coeffs: c,
        };
        let e1 = grid_energy(&grid, &w);
        assert!((e1 - f.coefficient_energy()).abs() < 1e-12 * e1);
    }

    #[test]
    fn fft_matches_direct() {
        for n in [16, 100, 257] {
            let w = sample(n);
            let a = SineTransform::direct(n).forward(&w);
            let b = SineTransform::fast(n).forward(&w);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn single_mode() {
        let n = 32;
        let tr = SineTransform::new(n);
        let w: Vec<f64> = (1..n)
            .map(|i| (std::f64::consts::PI * 3.0 * i as f64 / n as f64).sin())
            .collect();
        let c = tr.forward(&w);
        for (j, v) in c.iter().enumerate() {
            let expect = if j == 2 { 1.0 } else { 0.0 };
            assert!((v - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn origin_stencil_exact_for_quartics() {
        let grid = RadialGrid::new(1.0, 50).unwrap();
        // w = r (2 + r - r² + r³) so u(0) = 2
        let w: Vec<f64> = (1..50)
            .map(|i| {
                let r = grid.r(i);
                r * (2.0 + r - r * r + r * r * r)
            })
            .collect();
        let u = radial_from_w(&grid, &w);
        assert!((u[0] - 2.0).abs() < 1e-10);
    }
}
