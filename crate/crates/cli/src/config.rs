//! TOML run configuration. Every table rejects unknown keys.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use qys_core::classifier::GridSpec;
use qys_core::integrator::{EventKind, IntegratorConfig};
use qys_core::soliton::{Formulation, SolitonParams};
use qys_core::tip::{DEFAULT_ORDER, DEFAULT_R_START};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Line,
    Tip,
    Sweep,
    Oracle,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Line => "line",
            Mode::Tip => "tip",
            Mode::Sweep => "sweep",
            Mode::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Optional guard: must agree with the subcommand.
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub params: Option<ParamsSection>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    pub line: Option<LineSection>,
    pub tip: Option<TipSection>,
    pub sweep: Option<GridSpec>,
    pub oracle: Option<OracleSection>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub n: u32,
    pub lambda: f64,
    pub c: f64,
    pub rbar: f64,
}

impl ParamsSection {
    pub fn build(&self) -> Result<SolitonParams, CliError> {
        SolitonParams::new(self.n, self.lambda, self.c, self.rbar).map_err(CliError::config)
    }
}

fn default_line_span() -> [f64; 2] {
    [0.0, 10.0]
}

fn default_line_events() -> Vec<EventKind> {
    vec![EventKind::PsiZero, EventKind::Asymptote]
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSection {
    pub psi: Option<f64>,
    pub dpsi: Option<f64>,
    #[serde(rename = "F", default)]
    pub potential: f64,
    /// Initial radius.
    #[serde(default)]
    pub r0: f64,
    /// `[r_lo, r_hi]`; integrates both ways from `r0` when it lies inside.
    #[serde(default = "default_line_span")]
    pub span: [f64; 2],
    #[serde(default = "default_formulation")]
    pub formulation: FormulationName,
    #[serde(default = "default_line_events")]
    pub events: Vec<EventKind>,
    #[serde(default = "default_stride")]
    pub stride: usize,
}

impl Default for LineSection {
    fn default() -> Self {
        LineSection {
            psi: None,
            dpsi: None,
            potential: 0.0,
            r0: 0.0,
            span: default_line_span(),
            formulation: default_formulation(),
            events: default_line_events(),
            stride: default_stride(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulationName {
    Constraint,
    Flow,
}

fn default_formulation() -> FormulationName {
    FormulationName::Constraint
}

impl From<FormulationName> for Formulation {
    fn from(f: FormulationName) -> Self {
        match f {
            FormulationName::Constraint => Formulation::Constraint,
            FormulationName::Flow => Formulation::Flow,
        }
    }
}

fn default_r_end() -> f64 {
    10.0
}

fn default_order() -> usize {
    DEFAULT_ORDER
}

fn default_r_start() -> f64 {
    DEFAULT_R_START
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TipSection {
    /// One shot per value.
    #[serde(rename = "F0", default)]
    pub f0: F0Values,
    #[serde(default = "default_r_end")]
    pub r_end: f64,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default = "default_r_start")]
    pub r_start: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
}

impl Default for TipSection {
    fn default() -> Self {
        TipSection {
            f0: F0Values::default(),
            r_end: default_r_end(),
            order: default_order(),
            r_start: default_r_start(),
            stride: default_stride(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum F0Values {
    One(f64),
    Many(Vec<f64>),
}

impl Default for F0Values {
    fn default() -> Self {
        F0Values::One(0.0)
    }
}

impl F0Values {
    pub fn values(&self) -> Vec<f64> {
        match self {
            F0Values::One(v) => vec![*v],
            F0Values::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Exponential,
    ConstantPsi,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub family: Option<Family>,
    pub n: Option<u32>,
    pub c: Option<f64>,
    pub m: Option<f64>,
    pub a: Option<f64>,
    pub c1: Option<f64>,
    pub span: Option<f64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn check_mode(&self, mode: Mode) -> Result<(), CliError> {
        match self.mode {
            Some(m) if m != mode => Err(CliError::Config(format!(
                "config declares mode {:?} but the subcommand runs {:?}",
                m.name(),
                mode.name()
            ))),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected_with_a_location() {
        let err = toml::from_str::<RunConfig>("[params]\nn = 3\nlambda = 0\nc = 1\nrbar = 0\nbogus = 1\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("bogus") && err.contains("line 6"), "{err}");
        assert!(toml::from_str::<RunConfig>("[integrator]\nrtoll = 1e-9\n").is_err());
    }

    #[test]
    fn full_config_parses() {
        let cfg: RunConfig = toml::from_str(
            r#"
            mode = "line"
            seed = 7
            [params]
            n = 3
            lambda = 0.0
            c = 0.5
            rbar = 0.0
            [integrator]
            rtol = 1e-10
            [line]
            psi = 1.0
            dpsi = -0.1
            F = 0.0
            span = [-5.0, 5.0]
            events = ["psi-zero", "dpsi-zero"]
            [tip]
            F0 = [0.0, 0.5]
            [[sweep.cells]]
            name = "a"
            types = ["shrinking"]
            c_sign = "pos"
            r_condition = "above-lambda"
            samples = 3
            "#,
        )
        .unwrap();
        assert_eq!(cfg.integrator.rtol, 1e-10);
        assert_eq!(cfg.integrator.atol, 1e-12);
        assert_eq!(cfg.line.as_ref().unwrap().events.len(), 2);
        assert_eq!(cfg.tip.as_ref().unwrap().f0.values(), vec![0.0, 0.5]);
        assert_eq!(cfg.sweep.as_ref().unwrap().cells[0].samples, 3);
        assert!(cfg.check_mode(Mode::Tip).is_err());
    }
}
