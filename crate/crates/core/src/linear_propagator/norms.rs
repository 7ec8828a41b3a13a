//! Weighted space-time `L^q` norms over radial snapshots in three dimensions.

use crate::phase_geometry::PhaseFn;

use super::grid::RadialGrid;

/// Spatial weight multiplying `u` inside the norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceTimeWeight {
    /// `((φ(t)+M)² - r²)^γ` on `r <= φ(t) + M - 1`.
    Characteristic { big_m: f64 },
    /// `(1 + |φ(t)² - r²|)^γ` on the whole grid.
    Solution,
}

/// Streaming trapezoid rule in `t` of the trapezoid rule in `r` of
/// `weight^{γq} |u|^q 4π r²`. Snapshots must arrive in increasing `t`.
#[derive(Debug, Clone)]
pub struct NormAccumulator {
    phase: PhaseFn,
    grid: RadialGrid,
    weight: SpaceTimeWeight,
    gamma: f64,
    q: f64,
    prev: Option<(f64, f64)>,
    total: f64,
    history: Vec<(f64, f64)>,
}

impl NormAccumulator {
    pub fn new(m: u32, grid: RadialGrid, weight: SpaceTimeWeight, gamma: f64, q: f64) -> Self {
        Self {
            phase: PhaseFn::new(m),
            grid,
            weight,
            gamma,
            q,
            prev: None,
            total: 0.0,
            history: Vec::new(),
        }
    }

    /// `∫ weight^{γq} |u|^q 4π r² dr` at one time.
    pub fn spatial_integral(&self, t: f64, u: &[f64]) -> f64 {
        let phi = self.phase.eval(t);
        let h = self.grid.h();
        let gq = self.gamma * self.q;
        let (last, weight): (usize, Box<dyn Fn(f64) -> f64>) = match self.weight {
            SpaceTimeWeight::Characteristic { big_m } => {
                let reach = phi + big_m - 1.0;
                let last = ((reach / h).floor() as usize).min(self.grid.n);
                let a = phi + big_m;
                (last, Box::new(move |r: f64| (a * a - r * r).powf(gq)))
            }
            SpaceTimeWeight::Solution => (
                self.grid.n,
                Box::new(move |r: f64| (1.0 + (phi * phi - r * r).abs()).powf(gq)),
            ),
        };
        let mut acc = 0.0;
        for (i, &ui) in u.iter().enumerate().take(last + 1) {
            let r = i as f64 * h;
            let mut v = weight(r) * ui.abs().powf(self.q) * r * r;
            if i == 0 || i == last {
                v *= 0.5;
            }
            acc += v;
        }
        4.0 * std::f64::consts::PI * h * acc
    }

    pub fn push(&mut self, t: f64, u: &[f64]) {
        let i_t = self.spatial_integral(t, u);
        if let Some((t0, i0)) = self.prev {
            self.total += 0.5 * (t - t0) * (i0 + i_t);
        }
        self.prev = Some((t, i_t));
        self.history.push((t, i_t));
    }

    /// `∫∫ … dr dt` so far.
    pub fn integral(&self) -> f64 {
        self.total
    }

    /// The norm, `integral^{1/q}`.
    pub fn norm(&self) -> f64 {
        self.total.powf(1.0 / self.q)
    }

    /// `(t, spatial integral)` per pushed snapshot.
    pub fn history(&self) -> &[(f64, f64)] {
        &self.history
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_zero_norm() {
        let grid = RadialGrid::new(10.0, 100).unwrap();
        let mut acc = NormAccumulator::new(
            1,
            grid,
            SpaceTimeWeight::Characteristic { big_m: 2.0 },
            0.3,
            3.0,
        );
        let u = vec![0.0; 101];
        acc.push(0.0, &u);
        acc.push(1.0, &u);
        assert_eq!(acc.norm(), 0.0);
    }

    #[test]
    fn constant_field_region_volume() {
        // u = 1, γ = 0 over r <= φ(t)+M-1 = M-1 at t = 0 for a unit time slab
        let grid = RadialGrid::new(4.0, 4000).unwrap();
        let acc = NormAccumulator::new(
            1,
            grid,
            SpaceTimeWeight::Characteristic { big_m: 3.0 },
            0.0,
            2.0,
        );
        let u = vec![1.0; 4001];
        let vol = acc.spatial_integral(0.0, &u);
        let exact = 4.0 / 3.0 * std::f64::consts::PI * 8.0;
        assert!((vol - exact).abs() < 1e-5 * exact);
    }
}
