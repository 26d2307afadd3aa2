//! Constructions of the converging trajectories of the `R < λ`, `c < 0`
//! cells, which random line-mode data essentially never hits.

use crate::error::{Error, Result};
use crate::integrator::{
    integrate, EventKind, IntegratorConfig, Origin, Trajectory, PSI_EVENT,
};
use crate::soliton::{Formulation, SolitonParams, SolitonState};

/// Seeding of the `R̄ < 0` branch near the equilibrium `ψ = sqrt(R̄/λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativeAsymptoteOptions {
    /// Offset of the seed above the equilibrium.
    pub delta: f64,
    /// Value of `cF` at the seed; very negative values make `e^{cF}` small,
    /// i.e. put the seed far out along the trajectory.
    pub seed_cf: f64,
    /// Backward leg end.
    pub r_back: f64,
    /// Forward leg end.
    pub r_forward: f64,
    pub max_bisections: usize,
}

impl Default for NegativeAsymptoteOptions {
    fn default() -> Self {
        NegativeAsymptoteOptions {
            delta: 1e-6,
            seed_cf: -10.0,
            r_back: -20.0,
            r_forward: 60.0,
            max_bisections: 200,
        }
    }
}

/// Shooting data of the `R̄ = 0` branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatAsymptoteOptions {
    pub psi0: f64,
    pub f0: f64,
    /// Length of the returned trajectory.
    pub span: f64,
    /// Horizon of the shooting runs. Slow power-law decay can put the fate
    /// of a shot far beyond `span`.
    pub shoot_span: f64,
    pub max_bisections: usize,
}

impl Default for FlatAsymptoteOptions {
    fn default() -> Self {
        FlatAsymptoteOptions {
            psi0: 1.0,
            f0: 0.0,
            span: 200.0,
            shoot_span: 2000.0,
            max_bisections: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fate {
    /// Undershoots: crosses the target level or dies out.
    Below,
    /// Overshoots: `ψ'` turns positive.
    Above,
    Converged,
}

/// Bisection on an initial slope between a `Below` end and an `Above` end.
fn bisect_slope(
    mut below: f64,
    mut above: f64,
    max_iter: usize,
    mut shoot: impl FnMut(f64) -> Result<(Fate, Trajectory)>,
) -> Result<(Trajectory, Trajectory)> {
    let (fate, mut below_traj) = shoot(below)?;
    if fate != Fate::Below {
        return Err(Error::Construction(format!(
            "slope {below} does not undershoot ({fate:?})"
        )));
    }
    let (fate, mut above_traj) = shoot(above)?;
    if fate != Fate::Above {
        return Err(Error::Construction(format!(
            "slope {above} does not overshoot ({fate:?})"
        )));
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (below + above);
        if mid == below || mid == above {
            break;
        }
        let (fate, traj) = shoot(mid)?;
        match fate {
            Fate::Converged => return Ok((traj.clone(), traj)),
            Fate::Below => {
                below = mid;
                below_traj = traj;
            }
            Fate::Above => {
                above = mid;
                above_traj = traj;
            }
        }
    }
    Ok((below_traj, above_traj))
}

/// Trajectory converging forward to `ψ = sqrt(R̄/λ)` for `λ < 0`, `R̄ < 0`.
///
/// The seed sits `delta` above the equilibrium with slope on the stable
/// direction of the linearisation, refined by bisection on whether the
/// forward leg dips below the equilibrium or turns back up. The backward leg
/// is integrated from the same seed and the two are joined.
pub fn construct_negative_asymptote(
    params: &SolitonParams,
    opts: &NegativeAsymptoteOptions,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    params.validate()?;
    if !(params.lambda < 0.0 && params.rbar < 0.0) {
        return Err(Error::Construction(
            "the negative-fiber asymptote needs lambda < 0 and rbar < 0".into(),
        ));
    }
    let alpha = (params.rbar / params.lambda).sqrt();
    let psi_s = alpha + opts.delta;
    let f_s = opts.seed_cf / params.c;
    let e_s = opts.seed_cf.exp();
    let nm1 = params.nm1();
    // Linearisation u'' = A u + B u' about (alpha, 0).
    let a = -params.lambda / nm1;
    let b = -alpha * e_s / (2.0 * nm1);
    let mu = 0.5 * (b - (b * b + 4.0 * a).sqrt());
    let s0 = mu * opts.delta;

    let forward_events = [EventKind::PsiZero, EventKind::DPsiZero, EventKind::Asymptote];
    let shoot = |slope: f64| -> Result<(Fate, Trajectory)> {
        let init = SolitonState::new(0.0, psi_s, slope, f_s);
        let t = integrate(
            Formulation::Constraint,
            &init,
            params,
            (0.0, opts.r_forward),
            config,
            &forward_events,
        )?;
        let fate = if t.samples.iter().any(|s| s.psi <= alpha)
            || t.first_event(EventKind::PsiZero).is_some()
        {
            Fate::Below
        } else if t.first_event(EventKind::Asymptote).is_some() {
            Fate::Converged
        } else {
            Fate::Above
        };
        Ok((fate, t))
    };

    let (fate, first) = shoot(s0)?;
    let forward = if fate == Fate::Converged {
        first
    } else {
        let (below, above) = bisect_slope(4.0 * s0, 0.0, opts.max_bisections, shoot)?;
        [below, above]
            .into_iter()
            .find(|t| t.first_event(EventKind::Asymptote).is_some())
            .ok_or_else(|| {
                Error::Construction("slope bisection ended without an asymptote".into())
            })?
    };
    log::debug!(
        "negative asymptote seed slope {} (linear guess {s0})",
        forward.first().dpsi
    );

    let seed = *forward.first();
    let backward = integrate(
        Formulation::Constraint,
        &seed,
        params,
        (0.0, opts.r_back),
        config,
        &[EventKind::PsiZero],
    )?;
    Ok(Trajectory::stitch(backward, forward)?.with_origin(Origin::Constructed))
}

/// Trajectory with `R̄ = 0` decaying toward `ψ = 0`, by shooting on the
/// initial slope between extinction at finite `r` and `ψ'` turning positive.
///
/// The returned leg is the last surviving shot, which follows the
/// separatrix until the bisection runs out of precision and then ends at its
/// `ψ' = 0` turning point or at the end of the span.
pub fn construct_flat_asymptote(
    params: &SolitonParams,
    opts: &FlatAsymptoteOptions,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    params.validate()?;
    if params.rbar != 0.0 {
        return Err(Error::Construction(format!(
            "the flat asymptote needs rbar = 0, got {}",
            params.rbar
        )));
    }
    if !(opts.psi0 > PSI_EVENT) {
        return Err(Error::Construction("psi0 must be positive".into()));
    }
    let events = [EventKind::PsiZero, EventKind::DPsiZero];
    let shoot = |slope: f64| -> Result<(Fate, Trajectory)> {
        let init = SolitonState::new(0.0, opts.psi0, slope, opts.f0);
        let t = integrate(
            Formulation::Constraint,
            &init,
            params,
            (0.0, opts.shoot_span.max(opts.span)),
            config,
            &events,
        )?;
        // Survivors count as overshooting whether or not they turn within
        // the horizon; the separatrix is the edge of extinction.
        let fate = if t.first_event(EventKind::PsiZero).is_some() {
            Fate::Below
        } else {
            Fate::Above
        };
        Ok((fate, t))
    };

    // Steep enough to die out, and shallow enough to turn back.
    let mut below = -opts.psi0;
    while shoot(below)?.0 != Fate::Below {
        below *= 2.0;
        if below < -1e6 * opts.psi0 {
            return Err(Error::Construction("no extinguishing slope found".into()));
        }
    }
    let mut above = -1e-3 * opts.psi0;
    while shoot(above)?.0 != Fate::Above {
        above *= 0.5;
        if above > -1e-12 * opts.psi0 {
            return Err(Error::Construction("no overshooting slope found".into()));
        }
    }
    let (_, above_traj) = bisect_slope(below, above, opts.max_bisections, shoot)?;
    let init = *above_traj.first();
    log::debug!("flat asymptote slope {}", init.dpsi);
    Ok(integrate(
        Formulation::Constraint,
        &init,
        params,
        (0.0, opts.span),
        config,
        &events,
    )?
    .with_origin(Origin::Constructed))
}
