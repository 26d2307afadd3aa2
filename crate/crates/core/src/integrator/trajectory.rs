use serde::{Deserialize, Serialize};

use super::dopri::{Segment, System};
use super::events::{locate_root, Event, EventKind};
use super::systems::{ConstraintSystem, FlowSystem};
use crate::error::{Error, Result};
use crate::soliton::{curvature_r, rbar_residual, Formulation, SolitonParams, SolitonState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    SpanEnd,
    Event,
    Blowup,
    StepUnderflow,
    /// `max_steps` accepted steps without reaching the span end.
    StepLimit,
}

impl Termination {
    /// Which of two leg terminations describes a stitched trajectory.
    fn rank(self) -> u8 {
        match self {
            Termination::Event => 4,
            Termination::Blowup => 3,
            Termination::StepUnderflow => 2,
            Termination::StepLimit => 1,
            Termination::SpanEnd => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Termination::SpanEnd => "span-end",
            Termination::Event => "event",
            Termination::Blowup => "blowup",
            Termination::StepUnderflow => "step-underflow",
            Termination::StepLimit => "step-limit",
        }
    }
}

/// How the initial data of a trajectory was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Line,
    Tip,
    Constructed,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Scalar curvature `R` at each sample.
    pub curvature: Vec<f64>,
    pub rbar_residual: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Dense {
    Constraint(Vec<Segment<3>>),
    Flow(Vec<Segment<4>>),
}

impl Dense {
    fn len(&self) -> usize {
        match self {
            Dense::Constraint(s) => s.len(),
            Dense::Flow(s) => s.len(),
        }
    }
}

/// Numerical solution with its knots, dense output and events.
///
/// Samples are sorted by increasing `r` regardless of the integration
/// direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: SolitonParams,
    pub formulation: Formulation,
    pub origin: Origin,
    pub samples: Vec<SolitonState>,
    pub events: Vec<Event>,
    pub termination: Termination,
    /// Radius where `termination` happened: the far end of the leg that
    /// decided it.
    pub termination_r: f64,
    pub diagnostics: Diagnostics,
    pub(crate) dense: Dense,
}

fn diagnostics(samples: &[SolitonState], params: &SolitonParams) -> Diagnostics {
    let curvature = samples
        .iter()
        .map(|s| curvature_r(s, params).unwrap_or(f64::NAN))
        .collect();
    let rbar_residual = samples
        .iter()
        .map(|s| rbar_residual(s, params).unwrap_or(f64::NAN))
        .collect();
    Diagnostics {
        curvature,
        rbar_residual,
    }
}

impl Trajectory {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        params: SolitonParams,
        formulation: Formulation,
        origin: Origin,
        samples: Vec<SolitonState>,
        events: Vec<Event>,
        termination: Termination,
        termination_r: f64,
        dense: Dense,
    ) -> Self {
        let diagnostics = diagnostics(&samples, &params);
        Trajectory {
            params,
            formulation,
            origin,
            samples,
            events,
            termination,
            termination_r,
            diagnostics,
            dense,
        }
    }

    /// Covered interval `[lo, hi]`.
    pub fn span(&self) -> (f64, f64) {
        let first = self.samples.first().map_or(f64::NAN, |s| s.r);
        let last = self.samples.last().map_or(f64::NAN, |s| s.r);
        (first, last)
    }

    pub fn first(&self) -> &SolitonState {
        &self.samples[0]
    }

    pub fn last(&self) -> &SolitonState {
        self.samples.last().expect("trajectories hold at least one sample")
    }

    /// Number of accepted steps with dense output.
    pub fn steps(&self) -> usize {
        self.dense.len()
    }

    pub fn first_event(&self, kind: EventKind) -> Option<&Event> {
        self.events.iter().find(|e| e.kind == kind)
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    /// Interpolated state at `r`; knots are returned exactly.
    pub fn dense_eval(&self, r: f64) -> Result<SolitonState> {
        let (lo, hi) = self.span();
        if !(r >= lo && r <= hi) {
            return Err(Error::OutOfSpan { r, lo, hi });
        }
        if let Ok(i) = self.samples.binary_search_by(|s| s.r.total_cmp(&r)) {
            return Ok(self.samples[i]);
        }
        match &self.dense {
            Dense::Constraint(segs) => {
                let sys = ConstraintSystem(&self.params);
                Ok(sys.state(r, &find_segment(segs, r)?.eval(r)))
            }
            Dense::Flow(segs) => {
                let sys = FlowSystem(&self.params);
                Ok(sys.state(r, &find_segment(segs, r)?.eval(r)))
            }
        }
    }

    /// Root of a root-type event function between `ra` and `rb`, refined on
    /// the dense output.
    pub fn locate_event(&self, kind: EventKind, ra: f64, rb: f64) -> Result<Event> {
        if !kind.is_root() {
            return Err(Error::InvalidConfig(format!(
                "{} is not a root-type event",
                kind.name()
            )));
        }
        let g = |r: f64| {
            self.dense_eval(r)
                .ok()
                .and_then(|s| kind.value(&s))
                .unwrap_or(f64::NAN)
        };
        let r = locate_root(g, ra, rb)?;
        Ok(Event {
            kind,
            r,
            state: self.dense_eval(r)?,
            alpha: None,
        })
    }

    /// Joins a leg ending at `r0` with a leg starting at `r0`.
    ///
    /// The termination of the result is the more severe of the two, with
    /// events ranking above blow-up, step failures and a clean span end.
    pub fn stitch(left: Trajectory, right: Trajectory) -> Result<Trajectory> {
        if left.formulation != right.formulation || left.params != right.params {
            return Err(Error::Construction(
                "cannot stitch trajectories of different systems".into(),
            ));
        }
        let join = left.last().r;
        if join != right.first().r {
            return Err(Error::Construction(format!(
                "legs do not meet: {} vs {}",
                join,
                right.first().r
            )));
        }
        let (termination, termination_r) = if left.termination.rank() > right.termination.rank() {
            (left.termination, left.termination_r)
        } else {
            (right.termination, right.termination_r)
        };
        let mut samples = left.samples;
        samples.extend_from_slice(&right.samples[1..]);
        let mut events = left.events;
        events.extend(right.events);
        events.sort_by(|a, b| a.r.total_cmp(&b.r));
        let dense = match (left.dense, right.dense) {
            (Dense::Constraint(mut a), Dense::Constraint(b)) => {
                a.extend(b);
                Dense::Constraint(a)
            }
            (Dense::Flow(mut a), Dense::Flow(b)) => {
                a.extend(b);
                Dense::Flow(a)
            }
            _ => unreachable!("formulations checked above"),
        };
        Ok(Trajectory::new(
            left.params,
            left.formulation,
            right.origin,
            samples,
            events,
            termination,
            termination_r,
            dense,
        ))
    }
}

fn find_segment<const N: usize>(segs: &[Segment<N>], r: f64) -> Result<&Segment<N>> {
    let i = segs.partition_point(|s| s.hi() < r);
    segs.get(i)
        .filter(|s| s.lo() <= r)
        .ok_or(Error::OutOfSpan {
            r,
            lo: segs.first().map_or(f64::NAN, Segment::lo),
            hi: segs.last().map_or(f64::NAN, Segment::hi),
        })
}
