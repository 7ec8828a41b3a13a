//! Degenerate phase `φ(t) = 2/(m+2) t^{(m+2)/2}`, the characteristic weight,
//! and sampled checks of the cusp-cone covering inequalities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("negative argument {name} = {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("invalid {name} = {value}: must lie in {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
}

/// The phase function for a fixed degeneracy order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseFn {
    pub m: u32,
}

impl PhaseFn {
    pub fn new(m: u32) -> Self {
        Self { m }
    }

    fn order(&self) -> f64 {
        (self.m as f64 + 2.0) / 2.0
    }

    /// `φ(t)` without the sign check; callers guarantee `t >= 0`.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let k = self.order();
        t.powf(k) / k
    }

    #[inline]
    pub fn inverse(&self, s: f64) -> f64 {
        let k = self.order();
        (k * s).powf(1.0 / k)
    }

    /// `φ'(t) = t^{m/2}`, the propagation speed.
    #[inline]
    pub fn speed(&self, t: f64) -> f64 {
        t.powf(self.m as f64 / 2.0)
    }
}

pub fn phi(m: u32, t: f64) -> Result<f64, GeometryError> {
    if !(t >= 0.0) {
        return Err(GeometryError::Negative { name: "t", value: t });
    }
    Ok(PhaseFn::new(m).eval(t))
}

pub fn phi_inverse(m: u32, s: f64) -> Result<f64, GeometryError> {
    if !(s >= 0.0) {
        return Err(GeometryError::Negative { name: "s", value: s });
    }
    Ok(PhaseFn::new(m).inverse(s))
}

/// `(φ(t)+M)^2 - r^2`. Not clamped; negative outside the enlarged cone.
#[inline]
pub fn characteristic_weight(m: u32, big_m: f64, t: f64, r: f64) -> f64 {
    let a = PhaseFn::new(m).eval(t) + big_m;
    a * a - r * r
}

/// Largest support radius at time `t` for data supported in `B(0, M-1)`.
#[inline]
pub fn finite_speed_radius(m: u32, big_m: f64, t: f64) -> f64 {
    PhaseFn::new(m).eval(t) + big_m - 1.0
}

/// `(φ(t)+M, M)` pair describing the weight `((φ(t)+M)^2 - |x|^2)^γ` in `L^q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub gamma: f64,
    pub q: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
}

/// Sampling controls shared by the cone checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeSampling {
    pub t_hi: f64,
    pub n_t: usize,
    pub n_r: usize,
    pub n_random: usize,
    pub seed: u64,
}

impl Default for ConeSampling {
    fn default() -> Self {
        Self {
            t_hi: 1e3,
            n_t: 100,
            n_r: 100,
            n_random: 2000,
            seed: 0x5eed,
        }
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn check_t0(t0: f64) -> Result<(), GeometryError> {
    if !(t0 > 0.0 && t0 < 1.0) {
        return Err(GeometryError::OutOfRange {
            name: "T0",
            value: t0,
            range: "(0, 1)",
        });
    }
    Ok(())
}

fn check_big_m(big_m: f64) -> Result<(), GeometryError> {
    if !(big_m > 1.0) {
        return Err(GeometryError::OutOfRange {
            name: "M",
            value: big_m,
            range: "(1, inf)",
        });
    }
    Ok(())
}

/// Outcome of a sampled inequality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityCheck {
    pub holds: bool,
    /// Minimum over samples of `φ² - (1-δ) r² - δ (φ+M)²`.
    pub worst_margin: f64,
}

/// Checks `φ(t)^2 >= (1-δ) r^2 + δ (φ(t)+M)^2` on the unshifted cusp cone
/// `r <= φ(t) - φ(T0/4)`, `t ∈ [T0/4, t_hi]`.
pub fn verify_unshifted_cone_inequality(
    m: u32,
    big_m: f64,
    t0: f64,
    delta: f64,
    sampling: &ConeSampling,
) -> Result<InequalityCheck, GeometryError> {
    check_t0(t0)?;
    check_big_m(big_m)?;
    if !(0.0..1.0).contains(&delta) {
        return Err(GeometryError::OutOfRange {
            name: "delta",
            value: delta,
            range: "[0, 1)",
        });
    }
    let phase = PhaseFn::new(m);
    let base = phase.eval(t0 / 4.0);
    let mut worst = f64::INFINITY;
    for t in log_grid(t0 / 4.0, sampling.t_hi, sampling.n_t) {
        let ph = phase.eval(t);
        let r_top = (ph - base).max(0.0);
        for j in 0..sampling.n_r {
            let r = if sampling.n_r == 1 {
                r_top
            } else {
                r_top * j as f64 / (sampling.n_r - 1) as f64
            };
            let margin =
                ph * ph - (1.0 - delta) * r * r - delta * (ph + big_m) * (ph + big_m);
            worst = worst.min(margin);
        }
    }
    Ok(InequalityCheck {
        holds: worst >= 0.0,
        worst_margin: worst,
    })
}

/// Largest `δ` (to 1e-6 absolute) for which the unshifted inequality holds at
/// every sample. A positive answer is always resolved, even below 1e-6.
pub fn max_feasible_delta(
    m: u32,
    big_m: f64,
    t0: f64,
    sampling: &ConeSampling,
) -> Result<f64, GeometryError> {
    let holds = |d: f64| -> Result<bool, GeometryError> {
        Ok(verify_unshifted_cone_inequality(m, big_m, t0, d, sampling)?.holds)
    };
    let (mut lo, mut hi) = (0.0, 1.0 - 1e-12);
    if holds(hi)? {
        return Ok(hi);
    }
    // keep halving while lo = 0 so a feasible δ below the tolerance still
    // shows up as positive
    while hi - lo > 1e-6 || (lo == 0.0 && hi > f64::MIN_POSITIVE) {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Largest shift the cone covering uses: `M - 1 + φ(3 T0 / 8)`.
pub fn max_shift(m: u32, big_m: f64, t0: f64) -> f64 {
    big_m - 1.0 + PhaseFn::new(m).eval(3.0 * t0 / 8.0)
}

/// Empirical bounds of `(φ² - |x-ν|²) / ((φ+M)² - |x|²)` on a shifted cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedConeBounds {
    pub c_lower: f64,
    pub c_upper: f64,
    pub samples: usize,
}

/// Samples the shifted cone `|x - ν e₁| <= φ(t) - φ(T0/4)`, `t >= T0/2`.
///
/// Points are placed on the `(x₁, |x'|)` half-plane, which carries the full
/// geometry: a polar grid around the shift centre plus uniformly random
/// points from a seeded generator.
pub fn verify_shifted_cone_bounds(
    m: u32,
    big_m: f64,
    t0: f64,
    nu: f64,
    sampling: &ConeSampling,
) -> Result<ShiftedConeBounds, GeometryError> {
    check_t0(t0)?;
    check_big_m(big_m)?;
    let nu_max = max_shift(m, big_m, t0);
    if !(nu >= 0.0 && nu <= nu_max * (1.0 + 1e-15)) {
        return Err(GeometryError::OutOfRange {
            name: "nu",
            value: nu,
            range: "[0, M-1+phi(3 T0/8)]",
        });
    }
    let phase = PhaseFn::new(m);
    let base = phase.eval(t0 / 4.0);
    let times = log_grid(t0 / 2.0, sampling.t_hi, sampling.n_t);

    let ratio = |t: f64, s: f64, theta: f64| -> f64 {
        let ph = phase.eval(t);
        // y = x - ν e₁ in the (x₁, |x'|) plane
        let y1 = s * theta.cos();
        let y2 = s * theta.sin();
        let x1 = nu + y1;
        let x_sq = x1 * x1 + y2 * y2;
        let num = ph * ph - s * s;
        let den = (ph + big_m) * (ph + big_m) - x_sq;
        num / den
    };

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut count = 0usize;
    let n_s = (sampling.n_r as f64).sqrt().ceil().max(2.0) as usize;
    let n_theta = sampling.n_r.div_ceil(n_s).max(2);
    for &t in &times {
        let radius = phase.eval(t) - base;
        for i in 0..n_s {
            let s = radius * i as f64 / (n_s - 1) as f64;
            for j in 0..n_theta {
                let theta = std::f64::consts::PI * j as f64 / (n_theta - 1) as f64;
                let v = ratio(t, s, theta);
                lo = lo.min(v);
                hi = hi.max(v);
                count += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    let (la, lb) = ((t0 / 2.0).ln(), sampling.t_hi.ln());
    for _ in 0..sampling.n_random {
        let t = rng.gen_range(la..=lb).exp();
        let radius = phase.eval(t) - base;
        // uniform in the disc
        let s = radius * rng.gen::<f64>().sqrt();
        let theta = rng.gen_range(0.0..=std::f64::consts::PI);
        let v = ratio(t, s, theta);
        lo = lo.min(v);
        hi = hi.max(v);
        count += 1;
    }
    Ok(ShiftedConeBounds {
        c_lower: lo,
        c_upper: hi,
        samples: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_special_values() {
        for t in [0.0, 1.0, 3.0] {
            assert!((phi(2, t).unwrap() - t * t / 2.0).abs() < 1e-14);
        }
        assert!((phi(1, 1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(phi(1, 0.0).unwrap(), 0.0);
        assert!(phi(1, -1.0).is_err());
        assert!(phi_inverse(1, -1.0).is_err());
        assert!((phi_inverse(2, 2.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((phi_inverse(1, 2.0 / 3.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phi_is_convex_by_second_differences() {
        for m in 1..=4 {
            let h = 1e-3;
            for i in 1..2000 {
                let t = i as f64 * 5e-3;
                let d2 = phi(m, t + h).unwrap() - 2.0 * phi(m, t).unwrap()
                    + phi(m, t - h).unwrap();
                assert!(d2 >= -1e-15, "m={m} t={t}");
            }
        }
    }

    #[test]
    fn weight_examples() {
        assert_eq!(characteristic_weight(1, 2.0, 0.0, 0.0), 4.0);
        let big_m = 3.0;
        let w = characteristic_weight(1, big_m, 0.0, big_m - 1.0);
        assert!((w - (2.0 * big_m - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn finite_speed_radius_grows() {
        assert_eq!(finite_speed_radius(1, 2.5, 0.0), 1.5);
        let mut prev = -1.0;
        for i in 0..100 {
            let r = finite_speed_radius(2, 2.0, i as f64 * 0.1);
            assert!(r > prev);
            prev = r;
        }
    }

    #[test]
    fn unshifted_cases() {
        let s = ConeSampling::default();
        assert!(verify_unshifted_cone_inequality(1, 2.0, 0.5, 1e-4, &s).unwrap().holds);
        assert!(!verify_unshifted_cone_inequality(1, 2.0, 0.5, 0.9, &s).unwrap().holds);
        assert!(verify_unshifted_cone_inequality(1, 2.0, 0.5, 0.0, &s).unwrap().holds);
        assert!(verify_unshifted_cone_inequality(1, 2.0, 1.5, 0.1, &s).is_err());
        assert!(verify_unshifted_cone_inequality(1, 2.0, 0.5, 1.0, &s).is_err());
    }

    #[test]
    fn shifted_rejects_large_nu() {
        let s = ConeSampling::default();
        let nu = max_shift(1, 2.0, 0.5) * 1.01;
        assert!(verify_shifted_cone_bounds(1, 2.0, 0.5, nu, &s).is_err());
    }
}
