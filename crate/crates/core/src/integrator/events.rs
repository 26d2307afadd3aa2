use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::soliton::SolitonState;

/// Level at which `ψ` counts as extinct. Sits well above the tip threshold
/// of the right-hand sides so the crossing can still be located.
pub const PSI_EVENT: f64 = 1e-9;

/// Derivative bound of the asymptote window.
pub const ASYMPTOTE_SLOPE: f64 = 1e-8;
/// Length in `r` over which the asymptote bounds must hold.
pub const ASYMPTOTE_WINDOW: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    PsiZero,
    #[serde(rename = "dpsi-zero")]
    DPsiZero,
    #[serde(rename = "ddpsi-zero")]
    DDPsiZero,
    Blowup,
    Asymptote,
    TipSingularity,
}

impl EventKind {
    /// Root-type events, detected as a sign change of [`EventKind::value`].
    pub const ROOTS: [EventKind; 3] = [EventKind::PsiZero, EventKind::DPsiZero, EventKind::DDPsiZero];

    pub fn is_root(self) -> bool {
        Self::ROOTS.contains(&self)
    }

    /// Event function at a state, for root-type events.
    pub fn value(self, state: &SolitonState) -> Option<f64> {
        match self {
            EventKind::PsiZero => Some(state.psi - PSI_EVENT),
            EventKind::DPsiZero => Some(state.dpsi),
            EventKind::DDPsiZero => state.ddpsi,
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EventKind::PsiZero => "psi-zero",
            EventKind::DPsiZero => "dpsi-zero",
            EventKind::DDPsiZero => "ddpsi-zero",
            EventKind::Blowup => "blowup",
            EventKind::Asymptote => "asymptote",
            EventKind::TipSingularity => "tip-singularity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub r: f64,
    pub state: SolitonState,
    /// Window mean of `ψ` for asymptote events.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

/// Bisection for a sign change of `f` on `[ra, rb]`, to
/// `|Δr| <= 1e-12 max(1, |r|)`.
pub fn locate_root(mut f: impl FnMut(f64) -> f64, ra: f64, rb: f64) -> Result<f64> {
    let (mut a, mut b) = (ra, rb);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::NoSignChange(ra, rb));
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if (b - a).abs() <= 1e-12 * mid.abs().max(1.0) || mid == a || mid == b {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Tracks whether `|ψ'|` and `|ψ''|` have stayed below [`ASYMPTOTE_SLOPE`]
/// over a run of consecutive knots, and reports the trapezoid mean of `ψ`
/// once the run spans [`ASYMPTOTE_WINDOW`].
#[derive(Debug, Clone, Default)]
pub struct AsymptoteWindow {
    start: Option<f64>,
    last: Option<(f64, f64)>,
    integral: f64,
}

impl AsymptoteWindow {
    pub fn new() -> Self {
        Self::default()
    }

    fn reset(&mut self) {
        *self = Self::default();
    }

    /// Feed the next knot; returns `Some(alpha)` when the window completes.
    pub fn push(&mut self, state: &SolitonState) -> Option<f64> {
        let quiet = state.psi.is_finite()
            && state.dpsi.abs() < ASYMPTOTE_SLOPE
            && state.ddpsi.is_some_and(|d| d.abs() < ASYMPTOTE_SLOPE);
        if !quiet {
            self.reset();
            return None;
        }
        let (r, psi) = (state.r, state.psi);
        match self.last {
            None => self.start = Some(r),
            Some((r_prev, psi_prev)) => self.integral += 0.5 * (psi + psi_prev) * (r - r_prev),
        }
        self.last = Some((r, psi));
        let start = self.start.expect("start set with the first quiet knot");
        let width = r - start;
        (width.abs() >= ASYMPTOTE_WINDOW).then(|| self.integral / width)
    }

    /// First completed window along `samples`, as an asymptote event.
    pub fn scan(samples: &[SolitonState]) -> Option<Event> {
        let mut window = Self::new();
        samples.iter().find_map(|s| {
            window.push(s).map(|alpha| Event {
                kind: EventKind::Asymptote,
                r: s.r,
                state: *s,
                alpha: Some(alpha),
            })
        })
    }
}
