//! Adaptive integration of the reduced system with dense output and events.

mod dopri;
mod events;
mod systems;
mod trajectory;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::soliton::{constraint_ddpsi, Formulation, SolitonParams, SolitonState};
use dopri::{try_step, Segment, System};
use systems::{ConstraintSystem, FlowSystem};
use trajectory::Dense;

pub use events::{
    locate_root, AsymptoteWindow, Event, EventKind, ASYMPTOTE_SLOPE, ASYMPTOTE_WINDOW, PSI_EVENT,
};
pub use trajectory::{Diagnostics, Origin, Termination, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    /// Step cap; keeps sign changes of the event functions from hiding
    /// inside a single long step.
    pub h_max: f64,
    pub max_steps: usize,
    pub blowup_threshold: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-9,
            atol: 1e-12,
            h_init: 1e-3,
            h_min: 1e-13,
            h_max: 0.1,
            max_steps: 200_000,
            blowup_threshold: 1e12,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return bad("rtol and atol must be positive");
        }
        if !(self.h_min > 0.0 && self.h_min <= self.h_init && self.h_init <= self.h_max) {
            return bad("step sizes must satisfy 0 < h_min <= h_init <= h_max");
        }
        if !self.h_max.is_finite() {
            return bad("h_max must be finite");
        }
        if !(self.blowup_threshold > 0.0) {
            return bad("blowup_threshold must be positive");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be positive");
        }
        Ok(())
    }
}

struct Leg<const N: usize> {
    samples: Vec<SolitonState>,
    segments: Vec<Segment<N>>,
    events: Vec<Event>,
    termination: Termination,
}

/// Integrates `formulation` from `init` across `rspan = (r0, r1)`.
///
/// `init.r` is ignored in favour of `r0`. In the flow formulation a missing
/// `init.ddpsi` is filled in from the curvature identity, so the run starts
/// on the level set `params.rbar`. All enabled events are terminal.
pub fn integrate(
    formulation: Formulation,
    init: &SolitonState,
    params: &SolitonParams,
    rspan: (f64, f64),
    config: &IntegratorConfig,
    events: &[EventKind],
) -> Result<Trajectory> {
    params.validate()?;
    config.validate()?;
    let (r0, r1) = rspan;
    if !(r0.is_finite() && r1.is_finite()) {
        return Err(Error::InvalidConfig("integration span must be finite".into()));
    }
    if !(init.psi.is_finite() && init.dpsi.is_finite() && init.potential.is_finite()) {
        return Err(Error::NonFinite("initial state"));
    }
    let (samples, events_out, termination, dense) = match formulation {
        Formulation::Constraint => {
            let sys = ConstraintSystem(params);
            let leg = run_leg(&sys, [init.psi, init.dpsi, init.potential], r0, r1, config, events)?;
            (leg.samples, leg.events, leg.termination, Dense::Constraint(leg.segments))
        }
        Formulation::Flow => {
            let ddpsi = match init.ddpsi {
                Some(d) => d,
                None => constraint_ddpsi(r0, init.psi, init.dpsi, init.potential, params)?,
            };
            let sys = FlowSystem(params);
            let y0 = [init.psi, init.dpsi, ddpsi, init.potential];
            let leg = run_leg(&sys, y0, r0, r1, config, events)?;
            (leg.samples, leg.events, leg.termination, Dense::Flow(leg.segments))
        }
    };
    let termination_r = if r1 < r0 { samples[0].r } else { samples[samples.len() - 1].r };
    Ok(Trajectory::new(
        *params,
        formulation,
        Origin::Line,
        samples,
        events_out,
        termination,
        termination_r,
        dense,
    ))
}

/// Integrates backward to `r_lo` and forward to `r_hi` from `init` at `r0`
/// and joins the two legs.
pub fn integrate_two_sided(
    formulation: Formulation,
    init: &SolitonState,
    params: &SolitonParams,
    r0: f64,
    (r_lo, r_hi): (f64, f64),
    config: &IntegratorConfig,
    events: &[EventKind],
) -> Result<Trajectory> {
    let back = integrate(formulation, init, params, (r0, r_lo), config, events)?;
    let fwd = integrate(formulation, init, params, (r0, r_hi), config, events)?;
    Trajectory::stitch(back, fwd)
}

fn exceeds<const N: usize, S: System<N>>(sys: &S, y: &[f64; N], threshold: f64) -> bool {
    y.iter().any(|v| !(v.abs() <= threshold)) || !(sys.potential_slope(y).abs() <= threshold)
}

/// Remaining distance to `ψ = 0`, estimated as `ψ/|ψ'|`, below which an
/// underflowing run counts as extinct.
const COLLAPSE_DISTANCE: f64 = 1e-9;

fn collapsing(s: &SolitonState, dir: f64) -> bool {
    s.psi < 1e-6 && dir * s.dpsi < 0.0 && s.psi < COLLAPSE_DISTANCE * s.r.abs().max(1.0) * s.dpsi.abs()
}

fn run_leg<const N: usize, S: System<N>>(
    sys: &S,
    y0: [f64; N],
    r0: f64,
    r1: f64,
    config: &IntegratorConfig,
    enabled: &[EventKind],
) -> Result<Leg<N>> {
    let roots: Vec<EventKind> = EventKind::ROOTS
        .into_iter()
        .filter(|k| enabled.contains(k))
        .collect();
    let watch_asymptote = enabled.contains(&EventKind::Asymptote);

    let mut leg = Leg {
        samples: vec![sys.state(r0, &y0)],
        segments: Vec::new(),
        events: Vec::new(),
        termination: Termination::SpanEnd,
    };
    let mut prev_g: Vec<Option<f64>> = roots.iter().map(|k| k.value(&leg.samples[0])).collect();
    let mut window = AsymptoteWindow::new();
    if watch_asymptote {
        window.push(&leg.samples[0]);
    }

    if r0 == r1 {
        return Ok(finish(leg, r0, r1));
    }
    let mut k1 = sys.rhs(r0, &y0)?;
    if exceeds(sys, &y0, config.blowup_threshold) {
        leg.events.push(Event {
            kind: EventKind::Blowup,
            r: r0,
            state: leg.samples[0],
            alpha: None,
        });
        leg.termination = Termination::Blowup;
        return Ok(finish(leg, r0, r1));
    }

    let dir = (r1 - r0).signum();
    let (mut r, mut y) = (r0, y0);
    let mut h = config.h_init.min(config.h_max);
    let mut last_failure: Option<Error> = None;
    let mut rejected = false;
    let mut accepted = 0usize;

    loop {
        if r == r1 {
            break;
        }
        if accepted >= config.max_steps {
            leg.termination = Termination::StepLimit;
            break;
        }
        let remaining = (r1 - r).abs();
        let habs = h.min(config.h_max);
        let r_new = if habs >= remaining { r1 } else { r + dir * habs };
        let hs = r_new - r;

        let step = match try_step(sys, r, &y, &k1, hs, config.rtol, config.atol) {
            Ok(step) if step.err <= 1.0 => step,
            outcome => {
                let factor = match outcome {
                    Ok(step) => (0.9 * step.err.powf(-0.2)).max(0.2),
                    Err(e) => {
                        last_failure = Some(e);
                        0.25
                    }
                };
                h = hs.abs() * factor;
                rejected = true;
                if h < config.h_min {
                    let last = *leg.samples.last().unwrap();
                    if enabled.contains(&EventKind::PsiZero) && collapsing(&last, dir) {
                        // ψ ~ (r* - r)^p with p < 1 cannot be followed down to
                        // PSI_EVENT in steps above h_min.
                        leg.events.push(Event {
                            kind: EventKind::PsiZero,
                            r,
                            state: last,
                            alpha: None,
                        });
                        leg.termination = Termination::Event;
                        break;
                    }
                    if let Some(Error::TipSingularity { .. }) = last_failure {
                        leg.events.push(Event {
                            kind: EventKind::TipSingularity,
                            r,
                            state: *leg.samples.last().unwrap(),
                            alpha: None,
                        });
                    }
                    log::debug!("step underflow at r = {r} ({last_failure:?})");
                    leg.termination = Termination::StepUnderflow;
                    break;
                }
                continue;
            }
        };

        if exceeds(sys, &step.y1, config.blowup_threshold) {
            let last = *leg.samples.last().unwrap();
            leg.events.push(Event {
                kind: EventKind::Blowup,
                r: last.r,
                state: last,
                alpha: None,
            });
            leg.termination = Termination::Blowup;
            break;
        }

        let seg = step.segment;
        leg.segments.push(seg);
        let state1 = sys.state(r_new, &step.y1);

        // Earliest sign change along the direction of integration.
        let mut hit: Option<(f64, EventKind)> = None;
        for (i, kind) in roots.iter().enumerate() {
            let g_new = kind.value(&state1);
            if let (Some(a), Some(b)) = (prev_g[i], g_new) {
                if a != 0.0 && (b == 0.0 || a.signum() != b.signum()) {
                    let g = |rr: f64| kind.value(&sys.state(rr, &seg.eval(rr))).unwrap_or(f64::NAN);
                    let root = if b == 0.0 {
                        r_new
                    } else {
                        locate_root(g, r, r_new).unwrap_or(r_new)
                    };
                    if hit.is_none_or(|(best, _)| (root - r) * dir < (best - r) * dir) {
                        hit = Some((root, *kind));
                    }
                }
            }
            if g_new.is_some() {
                prev_g[i] = g_new;
            }
        }
        if let Some((root, kind)) = hit {
            let state = if root == r_new {
                state1
            } else {
                sys.state(root, &seg.eval(root))
            };
            if root != r {
                leg.samples.push(state);
            }
            leg.events.push(Event {
                kind,
                r: root,
                state,
                alpha: None,
            });
            leg.termination = Termination::Event;
            break;
        }

        leg.samples.push(state1);
        accepted += 1;
        if watch_asymptote {
            if let Some(alpha) = window.push(&state1) {
                leg.events.push(Event {
                    kind: EventKind::Asymptote,
                    r: r_new,
                    state: state1,
                    alpha: Some(alpha),
                });
                leg.termination = Termination::Event;
                break;
            }
        }

        let factor = if step.err == 0.0 {
            10.0
        } else {
            (0.9 * step.err.powf(-0.2)).clamp(0.2, 10.0)
        };
        h = hs.abs() * if rejected { factor.min(1.0) } else { factor };
        rejected = false;
        last_failure = None;
        r = r_new;
        y = step.y1;
        k1 = step.k7;
    }
    Ok(finish(leg, r0, r1))
}

/// Puts a leg into increasing-`r` order.
fn finish<const N: usize>(mut leg: Leg<N>, r0: f64, r1: f64) -> Leg<N> {
    if r1 < r0 {
        leg.samples.reverse();
        leg.segments.reverse();
    }
    leg
}
