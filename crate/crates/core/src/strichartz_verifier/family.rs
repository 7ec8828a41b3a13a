//! Radial data families for the ratio probes.

use serde::{Deserialize, Serialize};

use crate::linear_propagator::RadialProfile;

use super::StrichartzError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub id: String,
    pub f: RadialProfile,
    pub g: RadialProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataFamily {
    pub members: Vec<FamilyMember>,
}

/// Fractions `0.1, 0.2, …, 0.8` of `M - 1`.
pub const DEFAULT_WIDTHS: [f64; 8] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];

impl DataFamily {
    /// Centred bumps `f = g = bump(r / (w (M-1)))`.
    pub fn widths(big_m: f64, fractions: &[f64]) -> Self {
        let members = fractions
            .iter()
            .map(|&w| {
                let b = RadialProfile::bump(1.0, w * (big_m - 1.0));
                FamilyMember {
                    id: format!("width-{w}"),
                    f: b.clone(),
                    g: b,
                }
            })
            .collect();
        Self { members }
    }

    /// The eight centred widths.
    pub fn standard(big_m: f64) -> Self {
        Self::widths(big_m, &DEFAULT_WIDTHS)
    }

    /// Shells of half-width `w (M-1)` centred at `c (M-1)`, with `c + w <= 1`.
    pub fn shifted(big_m: f64, width: f64, centers: &[f64]) -> Self {
        let members = centers
            .iter()
            .map(|&c| {
                let b = RadialProfile::Bump {
                    amplitude: 1.0,
                    radius: width * (big_m - 1.0),
                    center: c * (big_m - 1.0),
                };
                FamilyMember {
                    id: format!("shell-{c}"),
                    f: b.clone(),
                    g: b,
                }
            })
            .collect();
        Self { members }
    }

    /// A centred bump plus a shell, with the shell amplitude varied.
    pub fn two_bump(big_m: f64, amplitudes: &[f64]) -> Self {
        let scale = big_m - 1.0;
        let members = amplitudes
            .iter()
            .map(|&a| {
                let p = RadialProfile::Sum(vec![
                    RadialProfile::bump(1.0, 0.3 * scale),
                    RadialProfile::Bump {
                        amplitude: a,
                        radius: 0.2 * scale,
                        center: 0.7 * scale,
                    },
                ]);
                FamilyMember {
                    id: format!("two-bump-{a}"),
                    f: p.clone(),
                    g: p,
                }
            })
            .collect();
        Self { members }
    }

    /// `f_σ(r) = f(σ^{(m+2)/2} r)` and `g_σ(r) = σ g(σ^{(m+2)/2} r)`: the data
    /// of `u(σt, σ^{(m+2)/2} x)`, which solves the same equation.
    pub fn dilation(m: u32, base_f: &RadialProfile, base_g: &RadialProfile, sigmas: &[f64]) -> Self {
        let k = (m as f64 + 2.0) / 2.0;
        let members = sigmas
            .iter()
            .map(|&s| FamilyMember {
                id: format!("dilate-{s}"),
                f: RadialProfile::Dilated {
                    base: Box::new(base_f.clone()),
                    scale: s.powf(k),
                },
                g: RadialProfile::Scaled {
                    base: Box::new(RadialProfile::Dilated {
                        base: Box::new(base_g.clone()),
                        scale: s.powf(k),
                    }),
                    factor: s,
                },
            })
            .collect();
        Self { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Every profile must vanish for `r > M - 1`.
    pub fn check_support(&self, big_m: f64) -> Result<(), StrichartzError> {
        for mem in &self.members {
            for p in [&mem.f, &mem.g] {
                let support = p.support_radius();
                if support > (big_m - 1.0) * (1.0 + 1e-12) {
                    return Err(StrichartzError::DataSupport {
                        id: mem.id.clone(),
                        support,
                        limit: big_m - 1.0,
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_family_is_supported() {
        let fam = DataFamily::standard(2.0);
        assert_eq!(fam.len(), 8);
        fam.check_support(2.0).unwrap();
        DataFamily::shifted(2.0, 0.2, &[0.3, 0.5, 0.8]).check_support(2.0).unwrap();
        DataFamily::two_bump(2.0, &[0.5, 1.0]).check_support(2.0).unwrap();
    }

    #[test]
    fn oversized_member_rejected() {
        let fam = DataFamily::widths(2.0, &[1.2]);
        assert!(matches!(fam.check_support(2.0), Err(StrichartzError::DataSupport { .. })));
    }

    #[test]
    fn dilation_shrinks_support() {
        let b = RadialProfile::bump(1.0, 0.8);
        let fam = DataFamily::dilation(1, &b, &b, &[1.0, 2.0]);
        assert_eq!(fam.members[0].f.support_radius(), 0.8);
        let s = fam.members[1].f.support_radius();
        assert!((s - 0.8 / 2f64.powf(1.5)).abs() < 1e-14);
        assert_eq!(fam.members[1].g.eval(0.0), 2.0);
    }
}
