//! Uniform radial grid and closed-form radial data profiles.

use serde::{Deserialize, Serialize};

use super::PropagatorError;

/// Nodes `r_i = i h`, `i = 0..=n`, with `h = r_max / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_max: f64,
    pub n: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, n: usize) -> Result<Self, PropagatorError> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(PropagatorError::InvalidGrid(format!("r_max = {r_max} must be positive")));
        }
        if n < 8 {
            return Err(PropagatorError::InvalidGrid(format!("N = {n} must be at least 8")));
        }
        Ok(Self { r_max, n })
    }

    /// Grid with spacing at most `h_target` covering `[0, r_max]`.
    pub fn with_spacing(r_max: f64, h_target: f64) -> Result<Self, PropagatorError> {
        if !(h_target > 0.0) {
            return Err(PropagatorError::InvalidGrid(format!("h = {h_target} must be positive")));
        }
        Self::new(r_max, (r_max / h_target).ceil().max(8.0) as usize)
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.r_max / self.n as f64
    }

    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        i as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.r(i)).collect()
    }

    /// `λ_k = kπ / r_max`.
    #[inline]
    pub fn lambda(&self, k: usize) -> f64 {
        k as f64 * std::f64::consts::PI / self.r_max
    }

    /// Doubles the resolution on the same interval.
    pub fn refined(&self) -> Self {
        Self {
            r_max: self.r_max,
            n: 2 * self.n,
        }
    }
}

/// The standard compactly supported bump `exp(1 - 1/(1 - x²))`, `|x| < 1`.
#[inline]
pub fn unit_bump(x: f64) -> f64 {
    let s = 1.0 - x * x;
    if s <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / s).exp()
    }
}

/// Radial data with closed-form values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum RadialProfile {
    Zero,
    /// `A · bump((r - c) / R)`; `c > 0` gives a spherical shell.
    Bump {
        amplitude: f64,
        radius: f64,
        #[serde(default)]
        center: f64,
    },
    /// `A · exp(-r²/σ²) · bump(r / R)`.
    GaussianTruncated {
        amplitude: f64,
        sigma: f64,
        radius: f64,
    },
    Sum(Vec<RadialProfile>),
    /// `base(scale · r)`.
    Dilated { base: Box<RadialProfile>, scale: f64 },
    /// `factor · base(r)`.
    Scaled { base: Box<RadialProfile>, factor: f64 },
}

impl RadialProfile {
    pub fn bump(amplitude: f64, radius: f64) -> Self {
        Self::Bump {
            amplitude,
            radius,
            center: 0.0,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Bump {
                amplitude,
                radius,
                center,
            } => amplitude * unit_bump((r - center) / radius),
            Self::GaussianTruncated {
                amplitude,
                sigma,
                radius,
            } => amplitude * (-(r * r) / (sigma * sigma)).exp() * unit_bump(r / radius),
            Self::Sum(parts) => parts.iter().map(|p| p.eval(r)).sum(),
            Self::Dilated { base, scale } => base.eval(scale * r),
            Self::Scaled { base, factor } => factor * base.eval(r),
        }
    }

    /// Smallest `ρ` with the profile vanishing for `r >= ρ`.
    pub fn support_radius(&self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Bump { radius, center, .. } => center + radius,
            Self::GaussianTruncated { radius, .. } => *radius,
            Self::Sum(parts) => parts.iter().map(Self::support_radius).fold(0.0, f64::max),
            Self::Dilated { base, scale } => base.support_radius() / scale,
            Self::Scaled { base, .. } => base.support_radius(),
        }
    }

    pub fn sample(&self, grid: &RadialGrid) -> Vec<f64> {
        (0..=grid.n).map(|i| self.eval(grid.r(i))).collect()
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Bump { amplitude, .. } | Self::GaussianTruncated { amplitude, .. } => {
                *amplitude == 0.0
            }
            Self::Sum(parts) => parts.iter().all(Self::is_zero),
            Self::Dilated { base, .. } => base.is_zero(),
            Self::Scaled { base, factor } => *factor == 0.0 || base.is_zero(),
        }
    }

    /// Smallest feature length (used to pick a grid spacing).
    pub fn feature_scale(&self) -> f64 {
        match self {
            Self::Zero => f64::INFINITY,
            Self::Bump { radius, .. } => *radius,
            Self::GaussianTruncated { sigma, radius, .. } => sigma.min(*radius),
            Self::Sum(parts) => parts
                .iter()
                .map(Self::feature_scale)
                .fold(f64::INFINITY, f64::min),
            Self::Dilated { base, scale } => base.feature_scale() / scale,
            Self::Scaled { base, .. } => base.feature_scale(),
        }
    }
}
