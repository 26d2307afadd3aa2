//! Trajectory verdicts checked against the regime table.

mod construct;
mod sweep;
mod table;

use serde::Serialize;

use crate::integrator::{Event, EventKind, Origin, Termination, Trajectory, PSI_EVENT};
use crate::soliton::{curvature_excess, SolitonParams, SolitonType};

pub use construct::{
    construct_flat_asymptote, construct_negative_asymptote, FlatAsymptoteOptions,
    NegativeAsymptoteOptions,
};
pub use sweep::{
    run_one, sample_cell, sweep_regimes, GridSpec, InitSpec, ReportRow, RunSpec, SamplingCell,
};
pub use table::{
    regime_expectation, regime_table, CSign, CellKey, Expectation, RCondition, RegimeCell,
    DEFAULT_EPS, TYPES,
};

/// Tolerance on the asymptote value against the predicted limit.
pub const ALPHA_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    /// Line-mode run that covered its whole span with `ψ` bounded away from 0.
    CompleteLineCandidate,
    /// Tip-mode run that covered its whole span.
    RotSymCandidate,
    FiniteExtinction { r: f64 },
    Blowup { r: f64 },
    Asymptote { r: f64, alpha: f64 },
    /// Stopped early for a reason that decides nothing: a `ψ'` or `ψ''`
    /// root event, or the step budget.
    Truncated { r: f64 },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::CompleteLineCandidate => "complete-line-candidate",
            Verdict::RotSymCandidate => "rot-sym-candidate",
            Verdict::FiniteExtinction { .. } => "finite-extinction",
            Verdict::Blowup { .. } => "blowup",
            Verdict::Asymptote { .. } => "asymptote",
            Verdict::Truncated { .. } => "truncated",
        }
    }

    /// Verdicts that look like (a piece of) a complete soliton.
    pub fn is_complete_candidate(&self) -> bool {
        matches!(
            self,
            Verdict::CompleteLineCandidate | Verdict::RotSymCandidate | Verdict::Asymptote { .. }
        )
    }
}

/// Sign pattern read off the whole trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservedRegime {
    /// `None` when `ψ'` is not of one strict sign along the samples.
    pub r_condition: Option<RCondition>,
    pub c_sign: CSign,
    pub soliton_type: SolitonType,
}

impl ObservedRegime {
    pub fn is_mixed(&self) -> bool {
        self.r_condition.is_none()
    }

    pub fn key(&self) -> Option<CellKey> {
        self.r_condition.map(|r_condition| CellKey {
            r_condition,
            c_sign: self.c_sign,
            soliton_type: self.soliton_type,
        })
    }
}

/// Numerical counterparts of two structural facts, raised when a run
/// contradicts them. Neither is expected to fire.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ShadowFlags {
    /// `R >= 0` everywhere on a complete candidate whose fiber has `R̄ <= 0`.
    pub nonnegative_curvature_flat_fiber: bool,
    /// A constant-ψ run over a span of length at least 5 judged complete.
    pub constant_psi_complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub regime: ObservedRegime,
    /// Table entry for the observed regime, if it is not mixed.
    pub cell: Option<RegimeCell>,
    pub consistent: bool,
    pub flags: ShadowFlags,
    pub notes: Vec<String>,
}

impl Classification {
    pub fn expectation(&self) -> Option<Expectation> {
        self.cell.map(|c| c.expectation)
    }
}

/// Observed regime with `ε` margin `eps`.
pub fn observe_regime(traj: &Trajectory, eps: f64) -> ObservedRegime {
    let p = &traj.params;
    let (mut pos, mut neg, mut zero) = (false, false, false);
    let mut beyond_eps = true;
    for s in &traj.samples {
        if s.dpsi > 0.0 {
            pos = true;
        } else if s.dpsi < 0.0 {
            neg = true;
        } else {
            zero = true;
        }
        let excess = curvature_excess(s, p).unwrap_or(s.dpsi.signum() * f64::INFINITY);
        beyond_eps &= excess.abs() > eps;
    }
    let r_condition = match (pos, neg, zero) {
        (true, false, false) if beyond_eps => Some(RCondition::AboveLambdaEps),
        (true, false, false) => Some(RCondition::AboveLambda),
        (false, true, false) if beyond_eps => Some(RCondition::BelowLambdaEps),
        (false, true, false) => Some(RCondition::BelowLambda),
        _ => None,
    };
    ObservedRegime {
        r_condition,
        c_sign: CSign::of(p.c),
        soliton_type: p.soliton_type(),
    }
}

/// The event that decides the verdict, if any.
pub fn decisive_event(traj: &Trajectory) -> Option<&Event> {
    [EventKind::PsiZero, EventKind::Blowup, EventKind::Asymptote]
        .into_iter()
        .find_map(|k| traj.first_event(k))
        .or_else(|| traj.events.first())
}

fn verdict(traj: &Trajectory) -> Verdict {
    if let Some(ev) = traj.first_event(EventKind::PsiZero) {
        return Verdict::FiniteExtinction { r: ev.r };
    }
    if let Some(ev) = traj.first_event(EventKind::Blowup) {
        return Verdict::Blowup { r: ev.r };
    }
    if matches!(
        traj.termination,
        Termination::Blowup | Termination::StepUnderflow
    ) {
        return Verdict::Blowup { r: traj.termination_r };
    }
    if let Some(ev) = traj.first_event(EventKind::Asymptote) {
        return Verdict::Asymptote {
            r: ev.r,
            alpha: ev.alpha.unwrap_or(ev.state.psi),
        };
    }
    let bounded = traj.samples.iter().all(|s| s.psi > PSI_EVENT);
    match traj.termination {
        Termination::SpanEnd if bounded => match traj.origin {
            Origin::Tip => Verdict::RotSymCandidate,
            Origin::Line | Origin::Constructed => Verdict::CompleteLineCandidate,
        },
        _ => Verdict::Truncated { r: traj.termination_r },
    }
}

/// Predicted limit of `ψ` for a complete warped product with this `R̄`,
/// when one is allowed at all.
pub fn predicted_alpha(params: &SolitonParams) -> Option<f64> {
    if params.rbar == 0.0 {
        Some(0.0)
    } else if params.rbar < 0.0 && params.lambda < 0.0 {
        Some((params.rbar / params.lambda).sqrt())
    } else {
        None
    }
}

fn check(
    expectation: Expectation,
    verdict: &Verdict,
    traj: &Trajectory,
    notes: &mut Vec<String>,
) -> bool {
    let p = &traj.params;
    let line_side = traj.origin != Origin::Tip;
    match expectation {
        Expectation::Unsolved => {
            notes.push("unsolved cell: observation is exploratory".into());
            true
        }
        Expectation::RotationallySymmetric => {
            let ok = !(line_side && verdict.is_complete_candidate());
            if !ok {
                notes.push("complete line-mode candidate where only the rotationally symmetric mode is possible".into());
            }
            ok
        }
        Expectation::Trivial => {
            let ok = !verdict.is_complete_candidate();
            if !ok {
                notes.push("nontrivial complete candidate where only the trivial soliton is possible".into());
            }
            ok
        }
        Expectation::AsymptoteFlat | Expectation::AsymptoteFlatOrNegative => {
            let allowed = match expectation {
                Expectation::AsymptoteFlat if p.rbar == 0.0 => Some(0.0),
                Expectation::AsymptoteFlat => None,
                _ => predicted_alpha(p),
            };
            match (verdict, allowed) {
                (Verdict::Asymptote { alpha, .. }, Some(target)) => {
                    let ok = (alpha - target).abs() <= ALPHA_TOL;
                    if !ok {
                        notes.push(format!("asymptote {alpha} differs from predicted {target}"));
                    }
                    ok
                }
                (v, None) if v.is_complete_candidate() => {
                    notes.push(format!("complete candidate with inadmissible rbar = {}", p.rbar));
                    false
                }
                _ => true,
            }
        }
    }
}

/// Classifies with the default `ε`.
pub fn classify(traj: &Trajectory) -> Classification {
    classify_with_eps(traj, DEFAULT_EPS)
}

pub fn classify_with_eps(traj: &Trajectory, eps: f64) -> Classification {
    let verdict = verdict(traj);
    let regime = observe_regime(traj, eps);
    let mut notes = Vec::new();
    let cell = regime.key().map(regime_expectation);
    let consistent = match cell {
        None => {
            notes.push("mixed sign of psi' (R - lambda); excluded from consistency checks".into());
            true
        }
        Some(cell) => check(cell.expectation, &verdict, traj, &mut notes),
    };

    let mut flags = ShadowFlags::default();
    let nonneg = traj
        .diagnostics
        .curvature
        .iter()
        .all(|r| r.is_finite() && *r >= 0.0);
    if cell.is_some() && verdict.is_complete_candidate() && nonneg && traj.params.rbar <= 0.0 {
        flags.nonnegative_curvature_flat_fiber = true;
        notes.push("R >= 0 along a complete candidate with rbar <= 0".into());
    }
    let (lo, hi) = traj.span();
    let flat = traj.samples.iter().all(|s| s.dpsi.abs() < 1e-10);
    if verdict == Verdict::CompleteLineCandidate && hi - lo >= 5.0 && flat {
        flags.constant_psi_complete = true;
        notes.push("constant psi judged complete".into());
    }

    Classification {
        verdict,
        regime,
        cell,
        consistent,
        flags,
        notes,
    }
}
