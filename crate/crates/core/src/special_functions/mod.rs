//! Multiplier symbols `V₁(t, λ)`, `V₂(t, λ)` of the linear propagator,
//! evaluated three independent ways:
//!
//! 1. direct integration of `v'' + t^m λ² v = 0` ([`mode_ode`]),
//! 2. `e^{-z/2} M(a, 2a; z)` with `z = 2iφ(t)λ` ([`kummer`]),
//! 3. the real form `0F1(; a + 1/2; -w²/4)` with `w = φ(t)λ` ([`bessel`]).
//!
//! The third route is real-valued, analytic at `w = 0`, and cheap, so the
//! PDE solvers use it through [`SymbolEvaluator`].

pub mod bessel;
pub mod dd;
pub mod gamma;
pub mod kummer;
pub mod mode_ode;

use num_complex::Complex64;
use thiserror::Error;

use crate::phase_geometry::PhaseFn;
pub use bessel::Hyp0F1;
pub use kummer::kummer_m;
pub use mode_ode::{evolve_mode, ModeIntegrator, ModeState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialFnError {
    #[error("non-finite or invalid input: {0}")]
    NonFinite(&'static str),
    #[error("parameter pole: b = {b} is a nonpositive integer")]
    ParameterPole { b: f64 },
    #[error("argument {0} is not on the imaginary axis")]
    NotImaginary(Complex64),
    #[error("series did not converge: {0}")]
    NoConvergence(&'static str),
    #[error("accuracy unattainable in {what} at |z| = {at}: discrepancy {error:e}")]
    AccuracyUnattainable {
        what: &'static str,
        at: f64,
        error: f64,
    },
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("degeneracy m must be >= 1 for the symbol representation")]
    DegenerateM,
}

/// A point `(m, t, λ)` at which a symbol is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSymbol {
    pub m: u32,
    pub t: f64,
    pub lambda: f64,
}

impl ModeSymbol {
    pub fn new(m: u32, t: f64, lambda: f64) -> Result<Self, SpecialFnError> {
        if m == 0 {
            return Err(SpecialFnError::DegenerateM);
        }
        if !(t.is_finite() && lambda.is_finite()) || t < 0.0 || lambda < 0.0 {
            return Err(SpecialFnError::NonFinite("symbol requires finite t, lambda >= 0"));
        }
        Ok(Self { m, t, lambda })
    }

    /// Real phase variable `w = φ(t)λ`.
    pub fn w(&self) -> f64 {
        PhaseFn::new(self.m).eval(self.t) * self.lambda
    }

    /// `z = 2iφ(t)λ`.
    pub fn z(&self) -> Complex64 {
        Complex64::new(0.0, 2.0 * self.w())
    }

    /// Kummer parameter `a` of `V₁` (`b = 2a`).
    pub fn a1(&self) -> f64 {
        let m = self.m as f64;
        m / (2.0 * (m + 2.0))
    }

    /// Kummer parameter `a` of `V₂` (`b = 2a`).
    pub fn a2(&self) -> f64 {
        let m = self.m as f64;
        (m + 4.0) / (2.0 * (m + 2.0))
    }

    /// `V₁ = e^{-z/2} M(a₁, 2a₁; z)`.
    pub fn v1_kummer(&self) -> Result<Complex64, SpecialFnError> {
        let z = self.z();
        let a = self.a1();
        Ok((-0.5 * z).exp() * kummer_m(a, 2.0 * a, z)?)
    }

    /// `V₂ = t e^{-z/2} M(a₂, 2a₂; z)`.
    pub fn v2_kummer(&self) -> Result<Complex64, SpecialFnError> {
        let z = self.z();
        let a = self.a2();
        Ok((-0.5 * z).exp() * kummer_m(a, 2.0 * a, z)? * self.t)
    }
}

pub fn v1_symbol(m: u32, t: f64, lambda: f64) -> Result<Complex64, SpecialFnError> {
    ModeSymbol::new(m, t, lambda)?.v1_kummer()
}

pub fn v2_symbol(m: u32, t: f64, lambda: f64) -> Result<Complex64, SpecialFnError> {
    ModeSymbol::new(m, t, lambda)?.v2_kummer()
}

/// Values and time derivatives of the fundamental pair at one `(t, λ)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FundamentalPair {
    pub v1: f64,
    pub v1_t: f64,
    pub v2: f64,
    pub v2_t: f64,
}

impl FundamentalPair {
    pub fn wronskian(&self) -> f64 {
        self.v1 * self.v2_t - self.v1_t * self.v2
    }
}

/// Real-valued symbol evaluator (Bessel route) for a fixed `m`.
///
/// With `ν = 1/(m+2)` and `B_c(w) = 0F1(; c; -w²/4)`:
/// `V₁ = B_{1-ν}(w)`, `V₂ = t B_{1+ν}(w)`, and
/// `d/dw B_c(w) = -(w / 2c) B_{c+1}(w)` with `dw/dt = λ t^{m/2}`.
#[derive(Debug, Clone, Copy)]
pub struct SymbolEvaluator {
    m: u32,
    phase: PhaseFn,
    b1: Hyp0F1,
    b1_next: Hyp0F1,
    b2: Hyp0F1,
    b2_next: Hyp0F1,
}

impl SymbolEvaluator {
    pub fn new(m: u32) -> Result<Self, SpecialFnError> {
        if m == 0 {
            return Err(SpecialFnError::DegenerateM);
        }
        let nu = 1.0 / (m as f64 + 2.0);
        Ok(Self {
            m,
            phase: PhaseFn::new(m),
            b1: Hyp0F1::new(1.0 - nu),
            b1_next: Hyp0F1::new(2.0 - nu),
            b2: Hyp0F1::new(1.0 + nu),
            b2_next: Hyp0F1::new(2.0 + nu),
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn phase(&self) -> &PhaseFn {
        &self.phase
    }

    /// Pair at `(t, λ)` without overlap validation. `t, λ >= 0` assumed.
    #[inline]
    pub fn pair(&self, t: f64, lambda: f64) -> FundamentalPair {
        let w = self.phase.eval(t) * lambda;
        let dw = lambda * self.phase.speed(t);
        let (c1, c2) = (self.b1.c(), self.b2.c());
        FundamentalPair {
            v1: self.b1.eval_fast(w),
            v1_t: -(w / (2.0 * c1)) * self.b1_next.eval_fast(w) * dw,
            v2: t * self.b2.eval_fast(w),
            v2_t: self.b2.eval_fast(w) - t * (w / (2.0 * c2)) * self.b2_next.eval_fast(w) * dw,
        }
    }

    /// `(V₁, V₂)` values only, cheaper than [`Self::pair`].
    #[inline]
    pub fn values(&self, t: f64, lambda: f64) -> (f64, f64) {
        let w = self.phase.eval(t) * lambda;
        (self.b1.eval_fast(w), t * self.b2.eval_fast(w))
    }

    /// `(V₁, V₂)` with series/asymptotic overlap validation.
    pub fn values_checked(&self, t: f64, lambda: f64) -> Result<(f64, f64), SpecialFnError> {
        ModeSymbol::new(self.m, t, lambda)?;
        let w = self.phase.eval(t) * lambda;
        Ok((self.b1.eval(w)?, t * self.b2.eval(w)?))
    }
}

/// The pair obtained by integrating the mode equation (first route).
pub fn fundamental_pair_ode(
    integrator: &ModeIntegrator,
    m: u32,
    t: f64,
    lambda: f64,
) -> Result<FundamentalPair, SpecialFnError> {
    let a = integrator.evolve(m, lambda, t, (1.0, 0.0))?;
    let b = integrator.evolve(m, lambda, t, (0.0, 1.0))?;
    Ok(FundamentalPair {
        v1: a.v,
        v1_t: a.v_dot,
        v2: b.v,
        v2_t: b.v_dot,
    })
}

/// One `(t, λ)` evaluated along all three routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteComparison {
    pub w: f64,
    pub ode: (f64, f64),
    pub kummer: (Complex64, Complex64),
    pub bessel: (f64, f64),
}

impl RouteComparison {
    /// Largest discrepancy among the three routes, relative to
    /// `max(|V|, abs_floor / rel_tol)` so that near a zero of the symbol the
    /// comparison degrades to an absolute one.
    pub fn max_discrepancy(&self, rel_tol: f64, abs_floor: f64) -> f64 {
        let floor = abs_floor / rel_tol;
        let pairs = [
            (self.ode.0, self.kummer.0.re, self.bessel.0),
            (self.ode.1, self.kummer.1.re, self.bessel.1),
        ];
        let mut worst: f64 = 0.0;
        for (o, k, b) in pairs {
            let scale = o.abs().max(k.abs()).max(b.abs()).max(floor);
            worst = worst
                .max((o - k).abs() / scale)
                .max((o - b).abs() / scale)
                .max((k - b).abs() / scale);
        }
        worst
    }

    pub fn max_imaginary(&self) -> f64 {
        self.kummer.0.im.abs().max(self.kummer.1.im.abs())
    }
}

/// Evaluates `V₁, V₂` at `(t, λ)` by all three routes.
pub fn compare_routes(
    m: u32,
    t: f64,
    lambda: f64,
    integrator: &ModeIntegrator,
) -> Result<RouteComparison, SpecialFnError> {
    let sym = ModeSymbol::new(m, t, lambda)?;
    let ode = fundamental_pair_ode(integrator, m, t, lambda)?;
    let bessel = SymbolEvaluator::new(m)?.values_checked(t, lambda)?;
    Ok(RouteComparison {
        w: sym.w(),
        ode: (ode.v1, ode.v2),
        kummer: (sym.v1_kummer()?, sym.v2_kummer()?),
        bessel,
    })
}

/// Decay exponent of the `V₁` amplitude envelope, `m / (2(m+2))`.
pub fn amplitude_decay_exponent(m: u32) -> f64 {
    let m = m as f64;
    m / (2.0 * (m + 2.0))
}

/// Fitted upper envelope of `|V₁|` as a function of `w = φ(t)λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeFit {
    /// Least-squares slope of log(bin maximum) against log(w).
    pub slope: f64,
    /// Smallest `C` with `|V₁| <= C (1 + w)^{-m/(2(m+2))}` on the sample set.
    pub constant: f64,
}

/// Samples `|V₁(w)|` on `[w_lo, w_hi]` (uniform in `w`, `samples` points),
/// takes the maximum in each of `bins` log-spaced bins, and fits a line.
pub fn fit_v1_envelope(
    m: u32,
    w_lo: f64,
    w_hi: f64,
    samples: usize,
    bins: usize,
) -> Result<EnvelopeFit, SpecialFnError> {
    if !(w_lo > 0.0 && w_hi > w_lo && samples >= bins && bins >= 2) {
        return Err(SpecialFnError::NonFinite("envelope fit range"));
    }
    let ev = SymbolEvaluator::new(m)?;
    let decay = amplitude_decay_exponent(m);
    let (llo, lhi) = (w_lo.ln(), w_hi.ln());
    let mut bin_max = vec![0.0f64; bins];
    let mut bin_w = vec![0.0f64; bins];
    let mut constant: f64 = 0.0;
    for i in 0..samples {
        let w = w_lo + (w_hi - w_lo) * i as f64 / (samples - 1) as f64;
        let v = ev.b1.eval_fast(w).abs();
        constant = constant.max(v * (1.0 + w).powf(decay));
        let b = (((w.ln() - llo) / (lhi - llo)) * bins as f64).floor() as usize;
        let b = b.min(bins - 1);
        if v > bin_max[b] {
            bin_max[b] = v;
            bin_w[b] = w;
        }
    }
    let pts: Vec<(f64, f64)> = bin_max
        .iter()
        .zip(&bin_w)
        .filter(|(v, _)| **v > 0.0)
        .map(|(v, w)| (w.ln(), v.ln()))
        .collect();
    Ok(EnvelopeFit {
        slope: least_squares_slope(&pts),
        constant,
    })
}

/// Bound on `|V₁|` over `w ∈ [0, w_hi]` in the form `C (1 + w)^{-m/(2(m+2))}`.
pub fn envelope_bound(constant: f64, m: u32, w: f64) -> f64 {
    constant * (1.0 + w).powf(-amplitude_decay_exponent(m))
}

pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    least_squares_fit(pts).0
}

/// Ordinary least-squares `(slope, intercept)`.
pub fn least_squares_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
