//! Closed-form exponents and admissible parameter windows.
//!
//! Everything here is a pure function of `(m, n, p)`. Quadratic roots use the
//! sign-aware formula so residuals stay at rounding level across the sweep
//! grid.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExponentError {
    #[error("space dimension n = {n} is below the minimum {min}")]
    DimensionTooSmall { n: u32, min: u32 },
    #[error("degeneracy order m = {0} must be at least 1")]
    DegeneracyTooSmall(u32),
    #[error("exponent out of range (p_conf = {p_conf}): p = {p} must lie in (p_crit, p_conf) with p_crit = {p_crit}")]
    ExponentOutOfRange { p: f64, p_crit: f64, p_conf: f64 },
    #[error("empty interval: gamma window ({lo}, {hi}) has lo >= hi")]
    EmptyInterval { lo: f64, hi: f64 },
    #[error("q too small: q = {q} must exceed q_min = {q_min}")]
    QTooSmall { q: f64, q_min: f64 },
    #[error("invalid model parameter {name} = {value}: {reason}")]
    InvalidParam {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
}

/// Problem instance `(m, n, p, eps, M)` for `u_tt - t^m Δu = |u|^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub m: u32,
    pub n: u32,
    pub p: f64,
    pub eps: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
}

impl ModelParams {
    pub fn new(m: u32, n: u32, p: f64, eps: f64, big_m: f64) -> Result<Self, ExponentError> {
        let params = Self { m, n, p, eps, big_m };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ExponentError> {
        if self.m < 1 {
            return Err(ExponentError::DegeneracyTooSmall(self.m));
        }
        if self.n < 3 {
            return Err(ExponentError::DimensionTooSmall { n: self.n, min: 3 });
        }
        if !(self.p > 1.0) || !self.p.is_finite() {
            return Err(ExponentError::InvalidParam {
                name: "p",
                value: self.p,
                reason: "must be > 1",
            });
        }
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(ExponentError::InvalidParam {
                name: "eps",
                value: self.eps,
                reason: "must be > 0",
            });
        }
        if !(self.big_m > 1.0) || !self.big_m.is_finite() {
            return Err(ExponentError::InvalidParam {
                name: "M",
                value: self.big_m,
                reason: "must be > 1",
            });
        }
        Ok(())
    }

    /// Homogeneous dimension `(m+2) n` that appears in every formula.
    pub fn mn(&self) -> f64 {
        homogeneous_dim(self.m, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub p_crit: f64,
    pub p_conf: f64,
    pub p_strauss: f64,
    pub q0: f64,
    pub q_min: f64,
    pub mu_m: f64,
    pub alpha_m: f64,
}

impl ExponentReport {
    pub fn compute(m: u32, n: u32) -> Result<Self, ExponentError> {
        let (q_min, q0) = q_bounds(m, n);
        let (mu_m, alpha_m) = damped_wave_coeffs(m);
        Ok(Self {
            p_crit: p_crit(m, n)?,
            p_conf: p_conf(m, n),
            p_strauss: strauss_exponent(n)?,
            q0,
            q_min,
            mu_m,
            alpha_m,
        })
    }
}

fn homogeneous_dim(m: u32, n: u32) -> f64 {
    (m as f64 + 2.0) * n as f64
}

/// Positive root of `a p^2 + b p + c = 0` with `a > 0`, `c < 0`.
///
/// Uses `q = -(b + sign(b) sqrt(disc)) / 2` and picks whichever of `q/a`,
/// `c/q` is positive, so neither root is formed by subtracting nearly equal
/// numbers.
pub fn positive_quadratic_root(a: f64, b: f64, c: f64) -> f64 {
    let disc = b * b - 4.0 * a * c;
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sign * disc.sqrt());
    let r1 = q / a;
    let r2 = c / q;
    if r1 > 0.0 {
        r1
    } else {
        r2
    }
}

/// Coefficients `(a, b, c)` of the quadratic whose positive root is `p_crit`.
pub fn p_crit_quadratic(m: u32, n: u32) -> (f64, f64, f64) {
    let k = m as f64 + 2.0;
    let n = n as f64;
    (k * n / 2.0 - 1.0, k * (1.0 - n / 2.0) - 3.0, -k)
}

/// Critical exponent. `m = 0` is accepted and reproduces the Strauss exponent.
pub fn p_crit(m: u32, n: u32) -> Result<f64, ExponentError> {
    if n < 3 {
        return Err(ExponentError::DimensionTooSmall { n, min: 3 });
    }
    let (a, b, c) = p_crit_quadratic(m, n);
    Ok(positive_quadratic_root(a, b, c))
}

/// Conformal exponent `((m+2)n + 6) / ((m+2)n - 2)`.
pub fn p_conf(m: u32, n: u32) -> f64 {
    let d = homogeneous_dim(m, n);
    (d + 6.0) / (d - 2.0)
}

pub fn strauss_quadratic(n: u32) -> (f64, f64, f64) {
    let n = n as f64;
    (n - 1.0, -(n + 1.0), -2.0)
}

/// Positive root of `(n-1)p^2 - (n+1)p - 2 = 0`.
pub fn strauss_exponent(n: u32) -> Result<f64, ExponentError> {
    if n < 2 {
        return Err(ExponentError::DimensionTooSmall { n, min: 2 });
    }
    let (a, b, c) = strauss_quadratic(n);
    Ok(positive_quadratic_root(a, b, c))
}

/// Raw endpoints of the gamma window, without checking `p`.
pub fn gamma_window(m: u32, n: u32, p: f64) -> (f64, f64) {
    let k = m as f64 + 2.0;
    let d = homogeneous_dim(m, n);
    let lo = 1.0 / (p * (p + 1.0));
    let hi = ((d - 2.0) * p - (d + 2.0)) / (2.0 * k * (p + 1.0)) + m as f64 / (k * (p + 1.0));
    (lo, hi)
}

/// Admissible weight exponents `gamma` for the global existence statement.
/// Requires `p_crit < p < p_conf`.
pub fn gamma_interval(params: &ModelParams) -> Result<(f64, f64), ExponentError> {
    let crit = p_crit(params.m, params.n)?;
    let conf = p_conf(params.m, params.n);
    if !(params.p > crit && params.p < conf) {
        return Err(ExponentError::ExponentOutOfRange {
            p: params.p,
            p_crit: crit,
            p_conf: conf,
        });
    }
    let (lo, hi) = gamma_window(params.m, params.n, params.p);
    if lo >= hi {
        return Err(ExponentError::EmptyInterval { lo, hi });
    }
    Ok((lo, hi))
}

/// `(mu_m, alpha_m) = (m/(m+2), 2m/(m+2))` of the large-time damped-wave form.
pub fn damped_wave_coeffs(m: u32) -> (f64, f64) {
    let m = m as f64;
    (m / (m + 2.0), 2.0 * m / (m + 2.0))
}

/// `(q_min, q0)`: the lower admissible Strichartz exponent and the endpoint.
pub fn q_bounds(m: u32, n: u32) -> (f64, f64) {
    let d = homogeneous_dim(m, n);
    let q_min = 2.0 * (d - m as f64) / (d - 2.0);
    let q0 = 2.0 * (d + 2.0) / (d - 2.0);
    debug_assert!(q0 > q_min);
    (q_min, q0)
}

/// Upper bound on the weight exponent in the homogeneous estimate at a given `q`.
pub fn strichartz_gamma_bound(m: u32, n: u32, q: f64) -> Result<f64, ExponentError> {
    let (q_min, _) = q_bounds(m, n);
    if !(q > q_min) {
        return Err(ExponentError::QTooSmall { q, q_min });
    }
    let k = m as f64 + 2.0;
    let d = homogeneous_dim(m, n);
    Ok((d - 2.0) / (2.0 * k) - (d - m as f64) / (k * q))
}

/// Upper bound on the Sobolev excess `delta` in the homogeneous estimate.
pub fn strichartz_delta_bound(m: u32, n: u32, q: f64, gamma: f64) -> f64 {
    n as f64 / 2.0 + 1.0 / (m as f64 + 2.0) - gamma - 1.0 / q
}

/// Per-inequality truth values of the older restricted global-existence
/// conditions, and of the older blowup range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlierRanges {
    pub cond_power: bool,
    pub cond_scaling: bool,
    pub cond_sandwich: bool,
    pub global_conditions_hold: bool,
    pub blowup_range_holds: bool,
}

pub fn earlier_ranges(params: &ModelParams) -> EarlierRanges {
    let m = params.m as f64;
    let n = params.n as f64;
    let p = params.p;
    let k = m + 2.0;
    let cond_power = (n + 1.0) * (p - 1.0) / (p + 1.0) <= m / k;
    let cond_scaling = (2.0 / (p - 1.0) - n * k / (2.0 * (p + 1.0))) * p <= 1.0;
    let left = 2.0 * (p + 1.0) / (p * (p - 1.0) * n * k);
    let mid = 1.0 / (p + 1.0);
    let right = (m + 4.0) / ((n + 1.0) * (p - 1.0) * k);
    let cond_sandwich = left <= mid && mid <= right;
    let d = n * k;
    let blowup_range_holds = p > 1.0 && p < (d + 2.0) / (d - 2.0);
    EarlierRanges {
        cond_power,
        cond_scaling,
        cond_sandwich,
        global_conditions_hold: cond_power && cond_scaling && cond_sandwich,
        blowup_range_holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual((a, b, c): (f64, f64, f64), x: f64) -> f64 {
        (a * x * x + b * x + c).abs()
    }

    #[test]
    fn p_crit_m0_is_one_plus_sqrt2() {
        let p = p_crit(0, 3).unwrap();
        assert!((p - (1.0 + 2f64.sqrt())).abs() < 1e-13);
    }

    #[test]
    fn p_crit_m1_n3_closed_form() {
        let p = p_crit(1, 3).unwrap();
        let exact = (9.0 + 249f64.sqrt()) / 14.0;
        assert!((p - exact).abs() < 1e-13);
        assert!((7.0 * p * p - 9.0 * p - 6.0).abs() < 1e-12);
        assert!((p - 1.769981).abs() < 1e-6);
    }

    #[test]
    fn p_crit_rejects_low_dimension() {
        assert!(matches!(
            p_crit(1, 2),
            Err(ExponentError::DimensionTooSmall { n: 2, .. })
        ));
    }

    #[test]
    fn strauss_residuals() {
        for n in 2..=12 {
            let p = strauss_exponent(n).unwrap();
            assert!(residual(strauss_quadratic(n), p) < 1e-12, "n = {n}");
        }
        let p2 = strauss_exponent(2).unwrap();
        assert!((p2 - (3.0 + 17f64.sqrt()) / 2.0).abs() < 1e-13);
    }

    #[test]
    fn p_conf_values() {
        assert!((p_conf(1, 3) - 15.0 / 7.0).abs() < 1e-15);
        assert_eq!(p_conf(0, 3), 3.0);
        assert!((p_conf(2, 3) - 1.8).abs() < 1e-15);
    }

    #[test]
    fn gamma_interval_example() {
        let params = ModelParams::new(1, 3, 2.0, 1e-3, 2.0).unwrap();
        let (lo, hi) = gamma_interval(&params).unwrap();
        assert!((lo - 1.0 / 6.0).abs() < 1e-12);
        assert!((hi - 5.0 / 18.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_interval_near_p_crit_is_thin() {
        let p = p_crit(1, 3).unwrap() + 1e-9;
        let params = ModelParams::new(1, 3, p, 1e-3, 2.0).unwrap();
        let (lo, hi) = gamma_interval(&params).unwrap();
        assert!(hi > lo);
        assert!(hi - lo < 1e-6);
    }

    #[test]
    fn gamma_interval_rejects_subcritical() {
        let params = ModelParams::new(1, 3, 1.5, 1e-3, 2.0).unwrap();
        assert!(matches!(
            gamma_interval(&params),
            Err(ExponentError::ExponentOutOfRange { .. })
        ));
    }

    #[test]
    fn damped_wave() {
        assert_eq!(damped_wave_coeffs(0), (0.0, 0.0));
        let (mu, alpha) = damped_wave_coeffs(1);
        assert!((mu - 1.0 / 3.0).abs() < 1e-15 && (alpha - 2.0 / 3.0).abs() < 1e-15);
        let mut prev = 0.0;
        for m in 1..=64 {
            let (mu, _) = damped_wave_coeffs(m);
            assert!(mu > prev && mu < 1.0);
            prev = mu;
        }
    }

    #[test]
    fn q_bounds_values() {
        let (q_min, q0) = q_bounds(1, 3);
        assert!((q_min - 16.0 / 7.0).abs() < 1e-14);
        assert!((q0 - 22.0 / 7.0).abs() < 1e-14);
        assert_eq!(q_bounds(0, 3), (3.0, 4.0));
        for m in 0..=20 {
            for n in 3..=10 {
                let (a, b) = q_bounds(m, n);
                assert!(b > a && a > 1.0);
            }
        }
    }

    #[test]
    fn gamma_bound_values() {
        let g = strichartz_gamma_bound(1, 3, 22.0 / 7.0).unwrap();
        assert!((g - 7.0 / 22.0).abs() < 1e-14);
        assert!(matches!(
            strichartz_gamma_bound(1, 3, 16.0 / 7.0),
            Err(ExponentError::QTooSmall { .. })
        ));
        let mut prev = f64::NEG_INFINITY;
        for i in 1..200 {
            let q = 16.0 / 7.0 + i as f64 * 0.05;
            let g = strichartz_gamma_bound(1, 3, q).unwrap();
            assert!(g > prev);
            prev = g;
        }
    }

    #[test]
    fn earlier_range_examples() {
        let lo = earlier_ranges(&ModelParams::new(1, 3, 1.5, 1.0, 2.0).unwrap());
        assert!(lo.blowup_range_holds);
        let hi = earlier_ranges(&ModelParams::new(1, 3, 2.5, 1.0, 2.0).unwrap());
        assert!(!hi.blowup_range_holds);
    }

    #[test]
    fn model_params_validation() {
        assert!(ModelParams::new(0, 3, 2.0, 1.0, 2.0).is_err());
        assert!(ModelParams::new(1, 2, 2.0, 1.0, 2.0).is_err());
        assert!(ModelParams::new(1, 3, 1.0, 1.0, 2.0).is_err());
        assert!(ModelParams::new(1, 3, 2.0, 0.0, 2.0).is_err());
        assert!(ModelParams::new(1, 3, 2.0, 1.0, 1.0).is_err());
    }
}
