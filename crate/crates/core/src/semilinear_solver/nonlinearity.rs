//! The time-blended power nonlinearity `F_p(t, u)`.

use serde::{Deserialize, Serialize};

pub const DEFAULT_T0: f64 = 0.5;
pub const DEFAULT_EPS0: f64 = 1e-6;

/// `F_p(t,u) = (1 - χ(t)) (ε₀² + u²)^{(p-1)/2} u + χ(t) |u|^p`, where `χ`
/// rises smoothly from 0 at `T0/2` to 1 at `T0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    pub p: f64,
    #[serde(rename = "T0")]
    pub t0: f64,
    pub eps0: f64,
}

impl NonlinearitySpec {
    pub fn new(p: f64) -> Self {
        Self {
            p,
            t0: DEFAULT_T0,
            eps0: DEFAULT_EPS0,
        }
    }

    /// `C^∞` transition `ψ(x) / (ψ(x) + ψ(1-x))`, `ψ(x) = e^{-1/x}` for `x > 0`.
    pub fn chi(&self, t: f64) -> f64 {
        let x = (t - 0.5 * self.t0) / (0.5 * self.t0);
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let a = (-1.0 / x).exp();
        let b = (-1.0 / (1.0 - x)).exp();
        a / (a + b)
    }

    /// The smooth branch used near `t = 0`.
    pub fn smooth_branch(&self, u: f64) -> f64 {
        (self.eps0 * self.eps0 + u * u).powf(0.5 * (self.p - 1.0)) * u
    }

    #[inline]
    pub fn eval(&self, t: f64, u: f64) -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        let c = self.chi(t);
        if c == 1.0 {
            return u.abs().powf(self.p);
        }
        (1.0 - c) * self.smooth_branch(u) + c * u.abs().powf(self.p)
    }
}

pub fn evaluate_nonlinearity(spec: &NonlinearitySpec, t: f64, u: f64) -> f64 {
    spec.eval(t, u)
}
