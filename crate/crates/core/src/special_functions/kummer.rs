//! Kummer's confluent hypergeometric function `M(a, b; z)` on the imaginary axis.
//!
//! Two regimes:
//! - `|z| <= KUMMER_SWITCH`: Maclaurin series accumulated in double-double.
//!   On `z = iy` the terms reach `~e^{|y|}` before cancelling down to
//!   `O(|y|^{-a})`, so plain `f64` would lose ~13 digits at `|z| = 30`.
//! - `|z| > KUMMER_SWITCH`: the large-`|z|` expansion split into an
//!   `e^z`-carrying part and an algebraic part.
//!
//! Inside `KUMMER_OVERLAP` both are evaluated and must agree.

use num_complex::Complex64;

use super::dd::DoubleDouble;
use super::gamma::{gamma, rgamma};
use super::SpecialFnError;

pub const KUMMER_SWITCH: f64 = 30.0;
pub const KUMMER_OVERLAP: (f64, f64) = (25.0, 40.0);
/// Agreement demanded between the two regimes in the overlap band, relative
/// to the combined magnitude of the asymptotic components.
pub const KUMMER_OVERLAP_TOL: f64 = 1e-9;

const MAX_TERMS: usize = 4000;

fn is_nonpositive_int(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn check_params(a: f64, b: f64, z: Complex64) -> Result<(), SpecialFnError> {
    if !(a.is_finite() && b.is_finite() && z.re.is_finite() && z.im.is_finite()) {
        return Err(SpecialFnError::NonFinite("kummer_m arguments"));
    }
    if is_nonpositive_int(b) {
        return Err(SpecialFnError::ParameterPole { b });
    }
    if z.re != 0.0 {
        return Err(SpecialFnError::NotImaginary(z));
    }
    Ok(())
}

/// Maclaurin series of `M(a, b; iy)` in double-double arithmetic.
pub fn kummer_series(a: f64, b: f64, y: f64) -> Result<Complex64, SpecialFnError> {
    if is_nonpositive_int(b) {
        return Err(SpecialFnError::ParameterPole { b });
    }
    let ya = y.abs();
    // real coefficient c_k = (a)_k / (b)_k * |y|^k / k!, multiplied by i^k
    let mut c = DoubleDouble::ONE;
    let mut re = DoubleDouble::ONE;
    let mut im = DoubleDouble::ZERO;
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        let num = DoubleDouble::sum(a, kf).mul_f64(ya);
        let den = DoubleDouble::sum(b, kf).mul_f64(kf + 1.0);
        c = c * num / den;
        k += 1;
        match k % 4 {
            0 => re = re + c,
            1 => im = im + c,
            2 => re = re - c,
            _ => im = im - c,
        }
        let mag = c.abs().to_f64();
        let total = re.abs().to_f64() + im.abs().to_f64();
        if (k as f64) > ya && (mag <= 1e-34 * total.max(1e-300) || mag == 0.0) {
            break;
        }
        if k >= MAX_TERMS {
            return Err(SpecialFnError::NoConvergence("kummer series"));
        }
    }
    let val = Complex64::new(re.to_f64(), im.to_f64());
    Ok(if y < 0.0 { val.conj() } else { val })
}

/// The two components of the large-`|z|` expansion at `z = iy`, `y > 0`:
/// `M ≈ exp_part + alg_part`, where `exp_part` carries `e^z z^{a-b}` and
/// `alg_part` carries `z^{-a}`. Also returns the smallest retained term
/// magnitude as a truncation estimate.
#[derive(Debug, Clone, Copy)]
pub struct KummerAsymptotic {
    pub exp_part: Complex64,
    pub alg_part: Complex64,
    pub truncation: f64,
}

/// Sums `Σ_s (p)_s (q)_s / s! * w^s` up to the smallest term.
fn asymptotic_series(p: f64, q: f64, w: Complex64) -> (Complex64, f64) {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = 1.0;
    for s in 0..MAX_TERMS {
        let sf = s as f64;
        let next = term * w * ((p + sf) * (q + sf) / (sf + 1.0));
        let mag = next.norm();
        if mag >= last || mag == 0.0 {
            return (sum, if mag == 0.0 { 0.0 } else { last });
        }
        sum += next;
        term = next;
        last = mag;
        if mag < 1e-18 * sum.norm() {
            return (sum, mag);
        }
    }
    (sum, last)
}

pub fn kummer_asymptotic_parts(a: f64, b: f64, y: f64) -> KummerAsymptotic {
    debug_assert!(y > 0.0);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let gb = gamma(b);
    // z^c = y^c e^{i π c / 2}
    let zpow = |c: f64| Complex64::from_polar(y.powf(c), half_pi * c);
    // (-z)^{-1} = i / y,  z^{-1} = -i / y
    let (alg_sum, alg_tr) = asymptotic_series(a, a - b + 1.0, Complex64::new(0.0, 1.0 / y));
    let (exp_sum, exp_tr) = asymptotic_series(b - a, 1.0 - a, Complex64::new(0.0, -1.0 / y));
    let alg_pref = Complex64::from_polar(1.0, std::f64::consts::PI * a) * zpow(-a) * (gb * rgamma(b - a));
    let exp_pref = Complex64::from_polar(1.0, y) * zpow(a - b) * (gb * rgamma(a));
    KummerAsymptotic {
        exp_part: exp_pref * exp_sum,
        alg_part: alg_pref * alg_sum,
        truncation: alg_pref.norm() * alg_tr + exp_pref.norm() * exp_tr,
    }
}

/// Large-`|z|` expansion of `M(a, b; iy)`.
pub fn kummer_asymptotic(a: f64, b: f64, y: f64) -> Result<Complex64, SpecialFnError> {
    if is_nonpositive_int(b) {
        return Err(SpecialFnError::ParameterPole { b });
    }
    let parts = kummer_asymptotic_parts(a, b, y.abs());
    let val = parts.exp_part + parts.alg_part;
    let scale = parts.exp_part.norm() + parts.alg_part.norm();
    if parts.truncation > KUMMER_OVERLAP_TOL * scale.max(1e-300) {
        return Err(SpecialFnError::AccuracyUnattainable {
            what: "kummer asymptotic truncation",
            at: y.abs(),
            error: parts.truncation / scale,
        });
    }
    Ok(if y < 0.0 { val.conj() } else { val })
}

/// `M(a, b; z)` for `z` on the imaginary axis.
pub fn kummer_m(a: f64, b: f64, z: Complex64) -> Result<Complex64, SpecialFnError> {
    check_params(a, b, z)?;
    let y = z.im;
    let r = y.abs();
    if r <= KUMMER_SWITCH {
        let series = kummer_series(a, b, y)?;
        if r >= KUMMER_OVERLAP.0 {
            cross_check(a, b, y, series)?;
        }
        Ok(series)
    } else {
        let asym = kummer_asymptotic(a, b, y)?;
        if r <= KUMMER_OVERLAP.1 {
            let series = kummer_series(a, b, y)?;
            cross_check(a, b, y, series)?;
        }
        Ok(asym)
    }
}

fn cross_check(a: f64, b: f64, y: f64, series: Complex64) -> Result<(), SpecialFnError> {
    let parts = kummer_asymptotic_parts(a, b, y.abs());
    let mut asym = parts.exp_part + parts.alg_part;
    if y < 0.0 {
        asym = asym.conj();
    }
    let scale = parts.exp_part.norm() + parts.alg_part.norm();
    let err = (asym - series).norm() / scale.max(1e-300);
    if err > KUMMER_OVERLAP_TOL {
        return Err(SpecialFnError::AccuracyUnattainable {
            what: "kummer series/asymptotic overlap",
            at: y.abs(),
            error: err,
        });
    }
    Ok(())
}
