//! Power-series start at the tip `r = 0` of a rotationally symmetric soliton,
//! where `ψ(0) = 0` and `F'(0) = 0`.
//!
//! With `ψ = Σ p_k r^k`, the `r^{k-1}` coefficient of the curvature identity
//! is linear in `p_k` with factor `2(n-1) a1 k (n+k-3)`, so the coefficients
//! follow by recursion once `a1 = ψ'(0)` is fixed by `(n-1)(n-2) a1² = R̄`.
//! `F` and `e^{cF}` are expanded alongside through `F' = ψ e^{cF}`.

use crate::error::{Error, Result};
use crate::integrator::{integrate, EventKind, IntegratorConfig, Origin, Trajectory};
use crate::soliton::{Formulation, SolitonParams, SolitonState};

pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_R_START: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct TipSeries {
    pub params: SolitonParams,
    pub a1: f64,
    pub a3: f64,
    pub f0: f64,
    pub order: usize,
    pub r_start: f64,
    /// `ψ` coefficients `p_0 ..= p_order`.
    pub psi_coeffs: Vec<f64>,
    /// `F` coefficients `f_0 ..= f_{order+1}`.
    pub potential_coeffs: Vec<f64>,
}

fn mul(a: &[f64], b: &[f64], deg: usize) -> Vec<f64> {
    let mut out = vec![0.0; deg + 1];
    for (i, x) in a.iter().enumerate().take(deg + 1) {
        for (j, y) in b.iter().enumerate().take(deg + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn deriv(a: &[f64]) -> Vec<f64> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, x)| k as f64 * x)
        .collect()
}

fn horner(coeffs: &[f64], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
}

/// Appends `f_k` and `E_k` for `k = f.len()` from `F' = ψ e^{cF}` and
/// `E' = c F' E`.
fn extend_potential(p: &[f64], f: &mut Vec<f64>, e: &mut Vec<f64>, c: f64) {
    let k = f.len();
    let pe: f64 = (0..k)
        .map(|j| p.get(j).copied().unwrap_or(0.0) * e.get(k - 1 - j).copied().unwrap_or(0.0))
        .sum();
    f.push(pe / k as f64);
    let ek: f64 = (1..=k).map(|j| j as f64 * f[j] * e[k - j]).sum();
    e.push(c * ek / k as f64);
}

/// Coefficient of `r^m` in the curvature identity minus `R̄` for the
/// polynomial data `p`, `e`.
fn identity_coeff(p: &[f64], e: &[f64], params: &SolitonParams, m: usize) -> f64 {
    let (nm1, nm2) = (params.nm1(), params.nm2());
    let dp = deriv(p);
    let ddp = deriv(&dp);
    let p2 = mul(p, p, m);
    let t1 = params.lambda * p2[m];
    let t2 = mul(&mul(&dp, &p2, m), e, m)[m];
    let t3 = nm1 * nm2 * mul(&dp, &dp, m)[m];
    let t4 = 2.0 * nm1 * mul(p, &ddp, m)[m];
    let rbar = if m == 0 { params.rbar } else { 0.0 };
    t1 + t2 + t3 + t4 - rbar
}

/// Series data for the tip of a rotationally symmetric soliton.
pub fn tip_series(params: &SolitonParams, f0: f64, order: usize) -> Result<TipSeries> {
    params.validate()?;
    if !(params.rbar > 0.0) {
        return Err(Error::NonPositiveRbar(params.rbar));
    }
    if order < 3 {
        return Err(Error::InvalidConfig(format!(
            "tip series order must be at least 3, got {order}"
        )));
    }
    if !f0.is_finite() {
        return Err(Error::InvalidParams("F0 must be finite".into()));
    }
    let (nm1, nm2) = (params.nm1(), params.nm2());
    let nf = f64::from(params.n);
    let a1 = (params.rbar / (nm1 * nm2)).sqrt();
    let e0 = (params.c * f0).exp();
    if !e0.is_finite() {
        return Err(Error::NonFinite("exp(c F0)"));
    }

    let mut p = vec![0.0, a1];
    let mut f = vec![f0];
    let mut e = vec![e0];
    for k in 2..=order {
        while f.len() < k {
            extend_potential(&p, &mut f, &mut e, params.c);
        }
        p.push(0.0);
        let rho = identity_coeff(&p, &e, params, k - 1);
        let kf = k as f64;
        p[k] = -rho / (2.0 * nm1 * a1 * kf * (nf + kf - 3.0));
    }
    while f.len() < order + 2 {
        extend_potential(&p, &mut f, &mut e, params.c);
    }
    Ok(TipSeries {
        params: *params,
        a1,
        a3: p[3],
        f0,
        order,
        r_start: DEFAULT_R_START,
        psi_coeffs: p,
        potential_coeffs: f,
    })
}

impl TipSeries {
    pub fn with_r_start(mut self, r_start: f64) -> Self {
        self.r_start = r_start;
        self
    }

    /// Fiber of radius other than one: the tip is a cone point, not smooth.
    pub fn is_conical(&self) -> bool {
        (self.a1 - 1.0).abs() > 1e-12
    }

    pub fn psi(&self, r: f64) -> f64 {
        horner(&self.psi_coeffs, r)
    }

    pub fn dpsi(&self, r: f64) -> f64 {
        horner(&deriv(&self.psi_coeffs), r)
    }

    pub fn ddpsi(&self, r: f64) -> f64 {
        horner(&deriv(&deriv(&self.psi_coeffs)), r)
    }

    pub fn potential(&self, r: f64) -> f64 {
        horner(&self.potential_coeffs, r)
    }

    /// Curvature identity evaluated on the truncated series, arranged so that
    /// the `O(1)` terms cancel analytically rather than in floating point:
    /// `(n-1)(n-2)ψ'² - R̄` is taken as `(n-1)(n-2)(ψ'-a1)(ψ'+a1)`.
    pub fn residual(&self, r: f64) -> f64 {
        let p = &self.params;
        let (nm1, nm2) = (p.nm1(), p.nm2());
        let psi = self.psi(r);
        let dpsi = self.dpsi(r);
        let ddpsi = self.ddpsi(r);
        let dcoef = deriv(&self.psi_coeffs);
        let dpsi_minus_a1 = horner(&dcoef[1..], r) * r + (dcoef[0] - self.a1);
        let shift = horner(&self.potential_coeffs[1..], r) * r;
        let e = (p.c * self.f0).exp() * (p.c * shift).exp();
        p.lambda * psi * psi
            + dpsi * psi * psi * e
            + nm1 * nm2 * dpsi_minus_a1 * (dpsi + self.a1)
            + 2.0 * nm1 * psi * ddpsi
    }
}

/// State at the handoff radius, carrying `ψ''` from the series.
pub fn tip_init_state(series: &TipSeries) -> Result<SolitonState> {
    let r = series.r_start;
    if !(r > 0.0 && r <= 0.01) {
        return Err(Error::InvalidConfig(format!(
            "handoff radius must lie in (0, 0.01], got {r}"
        )));
    }
    Ok(
        SolitonState::new(r, series.psi(r), series.dpsi(r), series.potential(r))
            .with_ddpsi(series.ddpsi(r)),
    )
}

/// Integrates a tip series outward to `r_end` in the given formulation.
pub fn shoot_tip_series(
    series: &TipSeries,
    r_end: f64,
    config: &IntegratorConfig,
    formulation: Formulation,
    events: &[EventKind],
) -> Result<Trajectory> {
    let init = tip_init_state(series)?;
    if !(r_end >= init.r) {
        return Err(Error::InvalidConfig(format!(
            "tip shots run outward: r_end = {r_end} is below the handoff radius {}",
            init.r
        )));
    }
    let traj = integrate(
        formulation,
        &init,
        &series.params,
        (init.r, r_end),
        config,
        events,
    )?;
    Ok(traj.with_origin(Origin::Tip))
}

/// Rotationally symmetric candidate for `(params, F0)`: default series,
/// constraint formulation, extinction and asymptote events.
pub fn shoot_tip(
    params: &SolitonParams,
    f0: f64,
    r_end: f64,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let series = tip_series(params, f0, DEFAULT_ORDER)?;
    shoot_tip_series(
        &series,
        r_end,
        config,
        Formulation::Constraint,
        &[EventKind::PsiZero, EventKind::Asymptote],
    )
}
