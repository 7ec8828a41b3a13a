//! `0F1(; c; -w²/4) = Γ(c) (w/2)^{1-c} J_{c-1}(w)` for real `w >= 0`.
//!
//! This normalisation is what the mode symbols need: it is analytic at
//! `w = 0` with value 1, so no `(w/2)^{±ν}` prefactor ever blows up.
//! Small `w` uses the power series (double-double), large `w` the Hankel
//! expansion of `J_μ`.

use super::dd::DoubleDouble;
use super::gamma::gamma;
use super::SpecialFnError;

pub const BESSEL_SWITCH: f64 = 12.0;
pub const BESSEL_OVERLAP: (f64, f64) = (10.0, 16.0);
pub const BESSEL_OVERLAP_TOL: f64 = 1e-8;

const MAX_TERMS: usize = 2000;

/// Power series `Σ (-w²/4)^k / (k! (c)_k)`.
pub fn hyp0f1_series(c: f64, w: f64) -> f64 {
    let x = -0.25 * w * w;
    let mut term = DoubleDouble::ONE;
    let mut sum = DoubleDouble::ONE;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term = term.mul_f64(x) / DoubleDouble::sum(c, kf).mul_f64(kf + 1.0);
        sum = sum + term;
        let mag = term.abs().to_f64();
        if kf > w && mag <= 1e-33 * sum.abs().to_f64().max(1e-300) {
            break;
        }
    }
    sum.to_f64()
}

/// Hankel expansion `J_μ(w) ≈ sqrt(2/(πw)) (P cos χ - Q sin χ)`, truncated at
/// the smallest term. Returns `(value, truncation_estimate)`.
pub fn bessel_j_hankel(mu: f64, w: f64) -> (f64, f64) {
    let four_mu2 = 4.0 * mu * mu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0; // a_k(μ) / w^k
    let mut last = f64::INFINITY;
    let mut k = 1usize;
    let mut trunc = 0.0;
    while k < MAX_TERMS {
        let odd = (2 * k - 1) as f64;
        let next = a * (four_mu2 - odd * odd) / (k as f64 * 8.0 * w);
        let mag = next.abs();
        if mag >= last {
            trunc = last;
            break;
        }
        // k-th term joins Q for odd k, P for even k, with alternating signs
        match k % 4 {
            1 => q += next,
            2 => p -= next,
            3 => q -= next,
            _ => p += next,
        }
        a = next;
        last = mag;
        if mag < 1e-18 || mag == 0.0 {
            trunc = mag;
            break;
        }
        k += 1;
    }
    let chi = w - (0.5 * mu + 0.25) * std::f64::consts::PI;
    let amp = (2.0 / (std::f64::consts::PI * w)).sqrt();
    (amp * (p * chi.cos() - q * chi.sin()), amp * trunc)
}

/// Evaluator for `0F1(; c; -w²/4)` with a cached `Γ(c)`.
#[derive(Debug, Clone, Copy)]
pub struct Hyp0F1 {
    c: f64,
    gamma_c: f64,
}

impl Hyp0F1 {
    pub fn new(c: f64) -> Self {
        Self {
            c,
            gamma_c: gamma(c),
        }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    fn hankel(&self, w: f64) -> (f64, f64) {
        let (j, tr) = bessel_j_hankel(self.c - 1.0, w);
        let pref = self.gamma_c * (0.5 * w).powf(1.0 - self.c);
        (pref * j, pref * tr)
    }

    /// Value without overlap validation (hot path).
    #[inline]
    pub fn eval_fast(&self, w: f64) -> f64 {
        if w <= BESSEL_SWITCH {
            hyp0f1_series(self.c, w)
        } else {
            self.hankel(w).0
        }
    }

    /// Value with overlap validation: inside `BESSEL_OVERLAP` both regimes
    /// are computed and compared against the envelope `(1 + w)^{1/2 - c}`.
    pub fn eval(&self, w: f64) -> Result<f64, SpecialFnError> {
        if !w.is_finite() || w < 0.0 {
            return Err(SpecialFnError::NonFinite("bessel argument"));
        }
        let value = self.eval_fast(w);
        if (BESSEL_OVERLAP.0..=BESSEL_OVERLAP.1).contains(&w) {
            let other = if w <= BESSEL_SWITCH {
                self.hankel(w).0
            } else {
                hyp0f1_series(self.c, w)
            };
            let scale = self.gamma_c.abs() * (0.5 * w).powf(0.5 - self.c);
            let err = (value - other).abs() / scale;
            if err > BESSEL_OVERLAP_TOL {
                return Err(SpecialFnError::AccuracyUnattainable {
                    what: "bessel series/hankel overlap",
                    at: w,
                    error: err,
                });
            }
        }
        Ok(value)
    }
}
