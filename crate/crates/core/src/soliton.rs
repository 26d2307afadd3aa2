//! Reduced ODE for a quasi-Yamabe gradient soliton on a warped product.
//!
//! A soliton `Hess F = (R - λ) g + c dF ⊗ dF` over `g = dr² + ψ(r)² g_N` is
//! carried by the warping function `ψ = F' e^{-cF}`. Along `r` everything
//! collapses to the curvature identity
//!
//! ```text
//! λψ² + ψ'ψ² e^{cF} + (n-1)(n-2)ψ'² + 2(n-1)ψψ'' = R̄
//! ```
//!
//! with `R̄` the (constant) scalar curvature of the fiber. Solving it for `ψ''`
//! gives the *constraint* formulation; differentiating it once and solving for
//! `ψ'''` gives the *flow* formulation, for which the left-hand side above is a
//! first integral.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this value of `ψ` the right-hand sides refuse to divide.
pub const PSI_MIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolitonType {
    Shrinking,
    Steady,
    Expanding,
}

impl SolitonType {
    pub fn of_lambda(lambda: f64) -> Self {
        if lambda > 0.0 {
            SolitonType::Shrinking
        } else if lambda < 0.0 {
            SolitonType::Expanding
        } else {
            SolitonType::Steady
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SolitonType::Shrinking => "shrinking",
            SolitonType::Steady => "steady",
            SolitonType::Expanding => "expanding",
        }
    }
}

/// Dimension, soliton constant, quasi constant and fiber scalar curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonParams {
    pub n: u32,
    pub lambda: f64,
    pub c: f64,
    pub rbar: f64,
}

impl SolitonParams {
    pub fn new(n: u32, lambda: f64, c: f64, rbar: f64) -> Result<Self> {
        let params = SolitonParams { n, lambda, c, rbar };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::InvalidParams(format!(
                "dimension n must be at least 3, got {}",
                self.n
            )));
        }
        if self.c == 0.0 {
            return Err(Error::InvalidParams(
                "the quasi constant c must be nonzero (c = 0 is not a quasi-Yamabe soliton)".into(),
            ));
        }
        if !(self.lambda.is_finite() && self.c.is_finite() && self.rbar.is_finite()) {
            return Err(Error::InvalidParams("lambda, c and rbar must be finite".into()));
        }
        Ok(())
    }

    pub fn soliton_type(&self) -> SolitonType {
        SolitonType::of_lambda(self.lambda)
    }

    pub(crate) fn nm1(&self) -> f64 {
        f64::from(self.n) - 1.0
    }

    pub(crate) fn nm2(&self) -> f64 {
        f64::from(self.n) - 2.0
    }
}

/// Snapshot `(r, ψ, ψ', F)` of the reduced system, optionally with `ψ''`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonState {
    pub r: f64,
    pub psi: f64,
    pub dpsi: f64,
    #[serde(rename = "F")]
    pub potential: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ddpsi: Option<f64>,
}

impl SolitonState {
    pub fn new(r: f64, psi: f64, dpsi: f64, potential: f64) -> Self {
        SolitonState {
            r,
            psi,
            dpsi,
            potential,
            ddpsi: None,
        }
    }

    pub fn with_ddpsi(mut self, ddpsi: f64) -> Self {
        self.ddpsi = Some(ddpsi);
        self
    }

    fn require_ddpsi(&self) -> Result<f64> {
        self.ddpsi.ok_or(Error::MissingSecondDerivative)
    }

    fn is_finite(&self) -> bool {
        self.r.is_finite()
            && self.psi.is_finite()
            && self.dpsi.is_finite()
            && self.potential.is_finite()
            && self.ddpsi.is_none_or(f64::is_finite)
    }
}

/// Which reduced ODE is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    /// `(ψ, ψ', F)` with `ψ''` solved from the curvature identity; `R̄` is data.
    Constraint,
    /// `(ψ, ψ', ψ'', F)` with `ψ'''` from the differentiated identity.
    Flow,
}

impl Formulation {
    pub fn dim(self) -> usize {
        match self {
            Formulation::Constraint => 3,
            Formulation::Flow => 4,
        }
    }
}

fn exp_cf(c: f64, potential: f64) -> Result<f64> {
    let e = (c * potential).exp();
    if e.is_finite() {
        Ok(e)
    } else {
        Err(Error::NonFinite("exp(c F)"))
    }
}

/// Scalar curvature `R = λ + ψ' e^{cF}`.
pub fn curvature_r(state: &SolitonState, params: &SolitonParams) -> Result<f64> {
    Ok(params.lambda + curvature_excess(state, params)?)
}

/// `R - λ = ψ' e^{cF}`, evaluated without going through `R`.
pub fn curvature_excess(state: &SolitonState, params: &SolitonParams) -> Result<f64> {
    Ok(state.dpsi * exp_cf(params.c, state.potential)?)
}

/// The four terms of the curvature identity, in the order they appear.
pub fn rbar_terms(state: &SolitonState, params: &SolitonParams) -> Result<[f64; 4]> {
    if !state.is_finite() {
        return Err(Error::NonFinite("state"));
    }
    let ddpsi = state.require_ddpsi()?;
    let e = exp_cf(params.c, state.potential)?;
    let (psi, dpsi) = (state.psi, state.dpsi);
    Ok([
        params.lambda * psi * psi,
        dpsi * psi * psi * e,
        params.nm1() * params.nm2() * dpsi * dpsi,
        2.0 * params.nm1() * psi * ddpsi,
    ])
}

/// Fiber scalar curvature the state is consistent with. `params.rbar` is ignored.
pub fn rbar_from_state(state: &SolitonState, params: &SolitonParams) -> Result<f64> {
    let t = rbar_terms(state, params)?;
    let value = t[0] + t[1] + t[2] + t[3];
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite("rbar"))
    }
}

/// `rbar_from_state - params.rbar`; the conserved-quantity monitor.
pub fn rbar_residual(state: &SolitonState, params: &SolitonParams) -> Result<f64> {
    Ok(rbar_from_state(state, params)? - params.rbar)
}

/// Largest magnitude among the curvature-identity terms; the natural scale
/// against which round-off in [`rbar_residual`] should be judged.
pub fn rbar_scale(state: &SolitonState, params: &SolitonParams) -> Result<f64> {
    let t = rbar_terms(state, params)?;
    Ok(t.iter()
        .fold(params.rbar.abs(), |acc, v| acc.max(v.abs())))
}

pub(crate) fn check_psi(r: f64, psi: f64) -> Result<()> {
    if psi > PSI_MIN {
        Ok(())
    } else {
        Err(Error::TipSingularity { r, psi })
    }
}

/// `ψ''` from the curvature identity.
pub(crate) fn constraint_ddpsi(
    r: f64,
    psi: f64,
    dpsi: f64,
    potential: f64,
    params: &SolitonParams,
) -> Result<f64> {
    check_psi(r, psi)?;
    let e = exp_cf(params.c, potential)?;
    let numer = params.rbar
        - params.lambda * psi * psi
        - dpsi * psi * psi * e
        - params.nm1() * params.nm2() * dpsi * dpsi;
    let ddpsi = numer / (2.0 * params.nm1() * psi);
    if ddpsi.is_finite() {
        Ok(ddpsi)
    } else {
        Err(Error::NonFinite("constraint right-hand side"))
    }
}

/// `ψ'''` from the differentiated identity; does not read `params.rbar`.
pub(crate) fn flow_dddpsi(
    r: f64,
    psi: f64,
    dpsi: f64,
    ddpsi: f64,
    potential: f64,
    params: &SolitonParams,
) -> Result<f64> {
    check_psi(r, psi)?;
    let e = exp_cf(params.c, potential)?;
    let nm1 = params.nm1();
    let numer = 2.0 * params.lambda * psi * dpsi
        + psi * psi * ddpsi * e
        + 2.0 * psi * dpsi * dpsi * e
        + params.c * psi * psi * psi * dpsi * e * e
        + 2.0 * nm1 * nm1 * dpsi * ddpsi;
    let dddpsi = -numer / (2.0 * nm1 * psi);
    if dddpsi.is_finite() {
        Ok(dddpsi)
    } else {
        Err(Error::NonFinite("flow right-hand side"))
    }
}

/// `F' = ψ e^{cF}`.
pub(crate) fn potential_slope(psi: f64, potential: f64, params: &SolitonParams) -> Result<f64> {
    let fp = psi * exp_cf(params.c, potential)?;
    if fp.is_finite() {
        Ok(fp)
    } else {
        Err(Error::NonFinite("F'"))
    }
}

/// Derivative `(ψ', ψ'', F')` of the constraint state.
pub fn constraint_rhs(state: &SolitonState, params: &SolitonParams) -> Result<[f64; 3]> {
    let ddpsi = constraint_ddpsi(state.r, state.psi, state.dpsi, state.potential, params)?;
    let fp = potential_slope(state.psi, state.potential, params)?;
    Ok([state.dpsi, ddpsi, fp])
}

/// Derivative `(ψ', ψ'', ψ''', F')` of the flow state.
pub fn flow_rhs(state: &SolitonState, params: &SolitonParams) -> Result<[f64; 4]> {
    let ddpsi = state.require_ddpsi()?;
    let dddpsi = flow_dddpsi(
        state.r,
        state.psi,
        state.dpsi,
        ddpsi,
        state.potential,
        params,
    )?;
    let fp = potential_slope(state.psi, state.potential, params)?;
    Ok([state.dpsi, ddpsi, dddpsi, fp])
}

/// `(F'', R - λ, c F'²)` reconstructed from `(ψ, ψ', F)`.
pub fn soliton_equation_terms(state: &SolitonState, params: &SolitonParams) -> Result<[f64; 3]> {
    let e = exp_cf(params.c, state.potential)?;
    let fp = state.psi * e;
    let fpp = (state.dpsi + params.c * state.psi * state.psi * e) * e;
    Ok([fpp, state.dpsi * e, params.c * fp * fp])
}

/// Radial component of the soliton equation, `F'' - (R - λ) - c F'²`.
///
/// The reduction turns this into an identity, so the value only measures
/// round-off in the reconstruction formulas.
pub fn soliton_equation_residual(state: &SolitonState, params: &SolitonParams) -> Result<f64> {
    let [fpp, excess, quad] = soliton_equation_terms(state, params)?;
    Ok(fpp - excess - quad)
}
