//! Run configuration: a TOML document with a top-level `scenario` key, a
//! `[model]` table, an optional `[grid]` table and one optional table per
//! scenario. Every table except `[model]` has documented defaults; missing
//! tables take all defaults.
//!
//! ```toml
//! scenario = "solve-semilinear"
//! output_dir = "out/blowup"
//! seed = 7
//!
//! [model]
//! m = 1
//! n = 3
//! p = 1.3
//! eps = 0.5
//! M = 2.0
//!
//! [grid]
//! h = 0.02
//! pad = 5.0
//!
//! [semilinear]
//! horizon = 50.0
//! dt_max = 0.01
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::exponents::{gamma_interval, ExponentError, ModelParams};
use crate::linear_propagator::{LinearSetup, RadialGrid, RadialProfile};
use crate::strichartz_verifier::family::DEFAULT_WIDTHS;

use super::HarnessError;

pub const SCENARIOS: [&str; 7] = [
    "exponents",
    "solve-linear",
    "solve-semilinear",
    "sweep-p",
    "verify-strichartz",
    "check-geometry",
    "symbols",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Exponents,
    SolveLinear,
    SolveSemilinear,
    SweepP,
    VerifyStrichartz,
    CheckGeometry,
    Symbols,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exponents => "exponents",
            Self::SolveLinear => "solve-linear",
            Self::SolveSemilinear => "solve-semilinear",
            Self::SweepP => "sweep-p",
            Self::VerifyStrichartz => "verify-strichartz",
            Self::CheckGeometry => "check-geometry",
            Self::Symbols => "symbols",
        }
    }
}

/// Model parameters; `p` and `eps` are only required by the scenarios that
/// use them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub m: u32,
    #[serde(default = "default_n")]
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(rename = "M", default = "default_big_m")]
    pub big_m: f64,
}

fn default_n() -> u32 {
    3
}

fn default_big_m() -> f64 {
    2.0
}

impl ModelConfig {
    pub fn require_p(&self) -> Result<f64, HarnessError> {
        self.p
            .ok_or_else(|| HarnessError::Validation("model.p is required by this scenario".into()))
    }

    /// Full validated parameters (`p` and `eps` must be present).
    pub fn params(&self) -> Result<ModelParams, HarnessError> {
        let p = self.require_p()?;
        let eps = self
            .eps
            .ok_or_else(|| HarnessError::Validation("model.eps is required by this scenario".into()))?;
        Ok(ModelParams::new(self.m, self.n, p, eps, self.big_m)?)
    }

    fn require_radial(&self) -> Result<(), HarnessError> {
        if self.n != 3 {
            return Err(HarnessError::Validation(format!(
                "the radial solvers need n = 3, got n = {}",
                self.n
            )));
        }
        if self.m < 1 {
            return Err(ExponentError::DegeneracyTooSmall(self.m).into());
        }
        if !(self.big_m > 1.0) {
            return Err(HarnessError::Validation(format!("M = {} must exceed 1", self.big_m)));
        }
        Ok(())
    }
}

/// Either an explicit `(r_max, N)` or a spacing `h` with the radius sized
/// from the run horizon plus `pad`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default = "default_pad")]
    pub pad: f64,
}

fn default_pad() -> f64 {
    5.0
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            r_max: None,
            n: None,
            h: Some(0.02),
            pad: default_pad(),
        }
    }
}

impl GridConfig {
    pub fn setup(&self, model: &ModelConfig, horizon: f64) -> Result<LinearSetup, HarnessError> {
        let setup = match (self.r_max, self.n, self.h) {
            (Some(r_max), Some(n), _) => LinearSetup::new(model.m, model.big_m, RadialGrid::new(r_max, n)?)?,
            (None, None, Some(h)) => LinearSetup::for_horizon(model.m, model.big_m, horizon, h, self.pad)?,
            _ => {
                return Err(HarnessError::Validation(
                    "grid: give both r_max and N, or only h".into(),
                ))
            }
        };
        Ok(setup)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    Bump,
    GaussianTruncated,
    TwoBump,
}

/// Radial data; `radius` defaults to `M - 1` and `sigma` to `radius / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub profile: DataKind,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

fn one() -> f64 {
    1.0
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            profile: DataKind::Bump,
            amplitude: 1.0,
            radius: None,
            sigma: None,
        }
    }
}

impl DataConfig {
    pub fn profile(&self, big_m: f64) -> RadialProfile {
        let radius = self.radius.unwrap_or(big_m - 1.0);
        let a = self.amplitude;
        match self.profile {
            DataKind::Bump => RadialProfile::bump(a, radius),
            DataKind::GaussianTruncated => RadialProfile::GaussianTruncated {
                amplitude: a,
                sigma: self.sigma.unwrap_or(0.5 * radius),
                radius,
            },
            DataKind::TwoBump => RadialProfile::Sum(vec![
                RadialProfile::bump(a, 0.3 * radius),
                RadialProfile::Bump {
                    amplitude: a,
                    radius: 0.2 * radius,
                    center: 0.7 * radius,
                },
            ]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentsConfig {
    /// Inclusive `[lo, hi]` ranges; both must be given for a sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_m: Option<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_n: Option<[u32; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveLinearConfig {
    pub t_final: f64,
    /// Equally spaced snapshots on `[0, t_final]`, endpoints included.
    pub snapshots: usize,
    pub data: DataConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub velocity: Option<DataConfig>,
}

impl Default for SolveLinearConfig {
    fn default() -> Self {
        Self {
            t_final: 10.0,
            snapshots: 11,
            data: DataConfig::default(),
            velocity: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    TimeMarch,
    Picard,
}

/// Shared by `solve-semilinear` and `sweep-p`. The data are
/// `f = g = eps · data`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemilinearConfig {
    pub horizon: f64,
    pub mode: SolveMode,
    #[serde(rename = "T0")]
    pub t0: f64,
    pub data: DataConfig,
    pub dt_max: f64,
    pub cfl_nl: f64,
    pub record_every: f64,
    /// Weight exponent of the solution norm; when absent the midpoint of the
    /// admissible window is used if `p` lies in `(p_crit, p_conf)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub store_field: bool,
    pub picard_dt: f64,
    pub picard_max_iters: usize,
    pub picard_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_grid: Option<Vec<f64>>,
}

impl Default for SemilinearConfig {
    fn default() -> Self {
        Self {
            horizon: 50.0,
            mode: SolveMode::TimeMarch,
            t0: 0.5,
            data: DataConfig::default(),
            dt_max: 0.01,
            cfl_nl: 0.1,
            record_every: 0.5,
            gamma: None,
            store_field: false,
            picard_dt: 0.05,
            picard_max_iters: 30,
            picard_tol: 1e-10,
            p_grid: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Widths,
    Shifted,
    TwoBump,
    Dilation,
}

/// Unset `q`, `gamma`, `delta` default to the midpoints of their windows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrichartzConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub t_max: f64,
    pub family: FamilyKind,
    /// Width fractions (widths), centres (shifted), shell amplitudes
    /// (two-bump) or dilation factors (dilation).
    pub values: Vec<f64>,
    pub inhomogeneous: bool,
    pub negative_control: bool,
    pub boxes: Vec<f64>,
    pub points_per_feature: f64,
    pub n_log: usize,
}

impl Default for StrichartzConfig {
    fn default() -> Self {
        Self {
            q: None,
            gamma: None,
            delta: None,
            t_max: 100.0,
            family: FamilyKind::Widths,
            values: DEFAULT_WIDTHS.to_vec(),
            inhomogeneous: true,
            negative_control: false,
            boxes: vec![25.0, 50.0, 100.0],
            points_per_feature: 25.0,
            n_log: 120,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(rename = "T0")]
    pub t0: f64,
    /// Shift to test; when absent `0`, `ν_max/2` and `ν_max` are all tested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    pub t_hi: f64,
    pub n_t: usize,
    pub n_r: usize,
    pub n_random: usize,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            t0: 0.5,
            nu: None,
            t_hi: 1e3,
            n_t: 100,
            n_r: 100,
            n_random: 10_000,
        }
    }
}

/// `n × n` points on `(0, t_max] × (0, lambda_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolsConfig {
    pub t_max: f64,
    pub lambda_max: f64,
    pub n: usize,
}

impl Default for SymbolsConfig {
    fn default() -> Self {
        Self {
            t_max: 10.0,
            lambda_max: 10.0,
            n: 50,
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<ExponentsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve_linear: Option<SolveLinearConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semilinear: Option<SemilinearConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strichartz: Option<StrichartzConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbols: Option<SymbolsConfig>,
}

impl RunConfig {
    /// A config for `scenario` with every optional table absent.
    pub fn minimal(scenario: Scenario, model: ModelConfig) -> Self {
        Self {
            scenario,
            output_dir: default_output_dir(),
            seed: 0,
            model,
            grid: None,
            exponents: None,
            solve_linear: None,
            semilinear: None,
            strichartz: None,
            geometry: None,
            symbols: None,
        }
    }

    pub fn semilinear_or_default(&self) -> SemilinearConfig {
        self.semilinear.clone().unwrap_or_default()
    }

    pub fn grid_or_default(&self) -> GridConfig {
        self.grid.unwrap_or_default()
    }

    /// Scenario-level checks, with exponent windows delegated to the
    /// `exponents` module.
    pub fn validate(&self) -> Result<(), HarnessError> {
        match self.scenario {
            Scenario::Exponents => {
                crate::exponents::ExponentReport::compute(self.model.m, self.model.n)?;
                if let Some(e) = &self.exponents {
                    if e.sweep_m.is_some() != e.sweep_n.is_some() {
                        return Err(HarnessError::Validation(
                            "exponents: sweep_m and sweep_n must be given together".into(),
                        ));
                    }
                }
                Ok(())
            }
            Scenario::CheckGeometry => {
                if self.model.m < 1 {
                    return Err(ExponentError::DegeneracyTooSmall(self.model.m).into());
                }
                Ok(())
            }
            Scenario::Symbols => {
                let s = self.symbols.unwrap_or_default();
                if !(s.t_max > 0.0 && s.lambda_max > 0.0 && s.n >= 1) {
                    return Err(HarnessError::Validation(
                        "symbols: t_max, lambda_max must be positive and n >= 1".into(),
                    ));
                }
                if self.model.m < 1 {
                    return Err(ExponentError::DegeneracyTooSmall(self.model.m).into());
                }
                Ok(())
            }
            Scenario::SolveLinear => {
                self.model.require_radial()?;
                let c = self.solve_linear.unwrap_or_default();
                if !(c.t_final >= 0.0 && c.snapshots >= 1) {
                    return Err(HarnessError::Validation(
                        "solve_linear: t_final must be >= 0 and snapshots >= 1".into(),
                    ));
                }
                Ok(())
            }
            Scenario::SolveSemilinear | Scenario::SweepP => {
                self.model.require_radial()?;
                let params = self.model.params()?;
                let c = self.semilinear_or_default();
                if self.scenario == Scenario::SolveSemilinear && c.mode == SolveMode::Picard {
                    // the contraction argument lives in the window only
                    gamma_interval(&params)?;
                }
                if self.scenario == Scenario::SweepP {
                    match &c.p_grid {
                        Some(g) if !g.is_empty() => {}
                        _ => {
                            return Err(HarnessError::Validation(
                                "sweep-p needs a non-empty p grid".into(),
                            ))
                        }
                    }
                }
                Ok(())
            }
            Scenario::VerifyStrichartz => {
                self.model.require_radial()?;
                Ok(())
            }
        }
    }
}

/// Parses TOML text into a config, reporting the position of syntax errors
/// and naming unknown scenarios.
pub fn parse_config(text: &str) -> Result<RunConfig, HarnessError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| parse_error(text, &e))?;
    if let Some(v) = table.get("scenario") {
        if let Some(name) = v.as_str() {
            if !SCENARIOS.contains(&name) {
                return Err(HarnessError::UnknownScenario(name.to_string()));
            }
        }
    }
    let config: RunConfig = toml::from_str(text).map_err(|e| parse_error(text, &e))?;
    config.validate()?;
    Ok(config)
}

/// Serialises a config to TOML.
pub fn emit_config(config: &RunConfig) -> Result<String, HarnessError> {
    toml::to_string(config).map_err(|e| HarnessError::Validation(format!("cannot serialise config: {e}")))
}

fn parse_error(text: &str, err: &toml::de::Error) -> HarnessError {
    let (line, column) = match err.span() {
        Some(span) => line_column(text, span.start),
        None => (0, 0),
    };
    HarnessError::Parse {
        line,
        column,
        message: err.message().to_string(),
    }
}

/// One-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_exponents_config() {
        let c = parse_config("scenario = \"exponents\"\n[model]\nm = 1\n").unwrap();
        assert_eq!(c.scenario, Scenario::Exponents);
        assert_eq!(c.model.n, 3);
        assert_eq!(c.model.big_m, 2.0);
    }

    #[test]
    fn syntax_error_has_position() {
        let text = "scenario = \"exponents\"\n[model]\nm = = 1\n";
        match parse_config(text) {
            Err(HarnessError::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column >= 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_scenario() {
        let text = "scenario = \"warp-drive\"\n[model]\nm = 1\n";
        assert!(matches!(parse_config(text), Err(HarnessError::UnknownScenario(_))));
    }

    #[test]
    fn picard_outside_window_is_rejected() {
        let text = "scenario = \"solve-semilinear\"\n[model]\nm = 1\np = 5.0\neps = 0.001\n[semilinear]\nmode = \"picard\"\n";
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("exponent out of range (p_conf = "), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn line_column_positions() {
        assert_eq!(line_column("ab\ncd", 0), (1, 1));
        assert_eq!(line_column("ab\ncd", 4), (2, 2));
    }

    #[test]
    fn emitted_config_round_trips() {
        let mut c = RunConfig::minimal(
            Scenario::SolveSemilinear,
            ModelConfig {
                m: 1,
                n: 3,
                p: Some(1.3),
                eps: Some(0.5),
                big_m: 2.0,
            },
        );
        c.semilinear = Some(SemilinearConfig {
            p_grid: Some(vec![1.2, 1.5]),
            ..Default::default()
        });
        c.grid = Some(GridConfig::default());
        let text = emit_config(&c).unwrap();
        assert_eq!(parse_config(&text).unwrap(), c);
    }
}
