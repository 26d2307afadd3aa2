//! Batch runs over explicit and randomly sampled initial data.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify, decisive_event, CSign, Classification, RCondition, DEFAULT_EPS};
use crate::error::{Error, Result};
use crate::integrator::{integrate_two_sided, EventKind, IntegratorConfig, Trajectory};
use crate::soliton::{Formulation, SolitonParams, SolitonState, SolitonType};
use crate::tip::shoot_tip;

/// Line-mode runs integrate this far each way from `r = 0` by default.
pub const DEFAULT_LINE_SPAN: f64 = 50.0;

/// Events enabled on line-mode sweep runs.
pub const LINE_EVENTS: [EventKind; 2] = [EventKind::PsiZero, EventKind::Asymptote];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum InitSpec {
    /// `(ψ, ψ', F)` at `r = 0`.
    Line {
        psi: f64,
        dpsi: f64,
        #[serde(rename = "F")]
        potential: f64,
    },
    /// Tip mode with `F(0) = F0`.
    Tip {
        #[serde(rename = "F0")]
        f0: f64,
    },
}

impl InitSpec {
    pub fn mode(&self) -> &'static str {
        match self {
            InitSpec::Line { .. } => "line",
            InitSpec::Tip { .. } => "tip",
        }
    }
}

fn default_line_span() -> f64 {
    DEFAULT_LINE_SPAN
}

/// One run: parameters, initial data and span.
///
/// Line-mode runs cover `[-span/2, span/2]`; tip-mode runs go out to
/// `r = span`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub n: u32,
    pub lambda: f64,
    pub c: f64,
    pub rbar: f64,
    pub init: InitSpec,
    #[serde(default = "default_line_span")]
    pub span: f64,
    /// Seed of the generator that drew the initial data; explicit runs
    /// inherit the grid seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl RunSpec {
    pub fn params(&self) -> Result<SolitonParams> {
        SolitonParams::new(self.n, self.lambda, self.c, self.rbar)
    }
}

fn default_eps() -> f64 {
    DEFAULT_EPS
}

/// Random line-mode data with the sign pattern of one regime row.
///
/// `n ∈ {3..6}`; `λ ∈ [0.1, 5]`, `0` or `[-5, -0.1]` by type;
/// `|c| ∈ [0.1, 2]`; `R̄ ∈ [-5, 5]`; `ψ0` log-uniform in `[0.1, 10]`;
/// `F0 ∈ [-2, 2]`; `|ψ'0| ∈ [ε, 10]` with the sign of the row. The `ε` rows
/// additionally resample until `|ψ'0 e^{cF0}| > ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingCell {
    pub name: String,
    pub types: Vec<SolitonType>,
    pub c_sign: CSign,
    pub r_condition: RCondition,
    #[serde(default = "default_eps")]
    pub eps: f64,
    pub samples: usize,
    #[serde(default = "default_line_span")]
    pub span: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub runs: Vec<RunSpec>,
    #[serde(default)]
    pub cells: Vec<SamplingCell>,
}

impl GridSpec {
    /// Explicit runs first, then each sampling cell in order.
    pub fn expand(&self) -> Result<Vec<RunSpec>> {
        let mut out = self.runs.clone();
        for run in &mut out {
            run.seed.get_or_insert(self.seed);
        }
        for (i, cell) in self.cells.iter().enumerate() {
            out.extend(sample_cell(cell, self.seed, i as u64)?);
        }
        Ok(out)
    }
}

/// Draws `cell.samples` runs from the stream `stream` of the ChaCha8
/// generator seeded with `seed`.
pub fn sample_cell(cell: &SamplingCell, seed: u64, stream: u64) -> Result<Vec<RunSpec>> {
    if cell.types.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "sampling cell {:?} lists no soliton types",
            cell.name
        )));
    }
    if !(cell.eps >= 0.0 && cell.eps < 10.0) {
        return Err(Error::InvalidConfig(format!(
            "sampling cell {:?}: eps must lie in [0, 10)",
            cell.name
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let strict = matches!(
        cell.r_condition,
        RCondition::AboveLambdaEps | RCondition::BelowLambdaEps
    );
    let sign = if cell.r_condition.is_above() { 1.0 } else { -1.0 };
    let mut runs = Vec::with_capacity(cell.samples);
    for _ in 0..cell.samples {
        let n = rng.random_range(3..=6u32);
        let ty = *cell.types.choose(&mut rng).expect("types checked non-empty");
        let lambda = match ty {
            SolitonType::Shrinking => rng.random_range(0.1..=5.0),
            SolitonType::Steady => 0.0,
            SolitonType::Expanding => -rng.random_range(0.1..=5.0),
        };
        let c_abs: f64 = rng.random_range(0.1..=2.0);
        let c = match cell.c_sign {
            CSign::Pos => c_abs,
            CSign::Neg => -c_abs,
        };
        let rbar = rng.random_range(-5.0..=5.0);
        let psi = rng.random_range(0.1f64.ln()..=10.0f64.ln()).exp();
        let (potential, dpsi) = loop {
            let f0: f64 = rng.random_range(-2.0..=2.0);
            let dpsi = sign * rng.random_range(cell.eps..=10.0);
            if !strict || (dpsi * (c * f0).exp()).abs() > cell.eps {
                break (f0, dpsi);
            }
        };
        runs.push(RunSpec {
            n,
            lambda,
            c,
            rbar,
            init: InitSpec::Line {
                psi,
                dpsi,
                potential,
            },
            span: cell.span,
            seed: Some(seed),
        });
    }
    Ok(runs)
}

/// Integrates one run with the default event set of its mode.
pub fn run_one(spec: &RunSpec, config: &IntegratorConfig) -> Result<Trajectory> {
    let params = spec.params()?;
    if !(spec.span >= 0.0 && spec.span.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "span must be finite and non-negative, got {}",
            spec.span
        )));
    }
    match spec.init {
        InitSpec::Line {
            psi,
            dpsi,
            potential,
        } => integrate_two_sided(
            Formulation::Constraint,
            &SolitonState::new(0.0, psi, dpsi, potential),
            &params,
            0.0,
            (-0.5 * spec.span, 0.5 * spec.span),
            config,
            &LINE_EVENTS,
        ),
        InitSpec::Tip { f0 } => shoot_tip(&params, f0, spec.span, config),
    }
}

/// One line of a sweep report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ReportRow {
    pub run_id: usize,
    pub n: u32,
    pub lambda: f64,
    pub c: f64,
    pub rbar: f64,
    pub mode: String,
    pub init: InitSpec,
    pub verdict: String,
    pub event_kind: Option<EventKind>,
    pub event_r: Option<f64>,
    pub alpha: Option<f64>,
    pub consistent: bool,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ReportRow {
    fn new(run_id: usize, spec: &RunSpec, outcome: Result<(Trajectory, Classification)>) -> Self {
        let mut row = ReportRow {
            run_id,
            n: spec.n,
            lambda: spec.lambda,
            c: spec.c,
            rbar: spec.rbar,
            mode: spec.init.mode().to_string(),
            init: spec.init,
            verdict: "error".to_string(),
            event_kind: None,
            event_r: None,
            alpha: None,
            consistent: false,
            seed: spec.seed.unwrap_or_default(),
            error: None,
        };
        match outcome {
            Ok((traj, class)) => {
                let event = decisive_event(&traj);
                row.verdict = class.verdict.label().to_string();
                row.event_kind = event.map(|e| e.kind);
                row.event_r = event.map(|e| e.r);
                row.alpha = event.and_then(|e| e.alpha);
                row.consistent = class.consistent;
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        row
    }
}

/// Runs every spec in parallel and reports in input order. Failures become
/// rows with verdict `error`.
pub fn sweep_regimes(runs: &[RunSpec], config: &IntegratorConfig) -> Vec<ReportRow> {
    runs.par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let outcome = run_one(spec, config).map(|t| {
                let class = classify(&t);
                (t, class)
            });
            ReportRow::new(i, spec, outcome)
        })
        .collect()
}
