//! Closed-form solutions of the reduced system, used as integrator oracles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::soliton::{SolitonParams, SolitonState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ExactFamily {
    /// `ψ ≡ a`, `F'(r) = -a / (a c r + c1)`. Lives on one side of a pole.
    ConstantPsi { a: f64, c: f64, c1: f64 },
    /// `F = m r`, `ψ = m e^{-c m r}`. Global, with `λ = c m² (1 - n(n-1)c)`
    /// and `R̄ = 0`.
    Exponential { m: f64, n: u32, c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSolution {
    pub family: ExactFamily,
    /// Open interval on which the family is defined; may be infinite.
    pub domain: (f64, f64),
    params: SolitonParams,
}

/// `F = m r`, `ψ = m e^{-c m r}` on all of the line.
pub fn exact_exponential(m: f64, n: u32, c: f64) -> Result<ExactSolution> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParams(format!("m must be positive, got {m}")));
    }
    let nf = f64::from(n);
    let lambda = c * m * m * (1.0 - nf * (nf - 1.0) * c);
    let params = SolitonParams::new(n, lambda, c, 0.0)?;
    Ok(ExactSolution {
        family: ExactFamily::Exponential { m, n, c },
        domain: (f64::NEG_INFINITY, f64::INFINITY),
        params,
    })
}

/// Constant warping function `ψ ≡ a`.
///
/// The background is `n = 3`, `λ = 0` until changed with
/// [`ExactSolution::with_background`]; any `(n, λ)` works with `R̄ = λa²`.
/// `c1 = 0` puts the pole at the base point `r = 0` and is rejected.
pub fn exact_constant_psi(a: f64, c: f64, c1: f64) -> Result<ExactSolution> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParams(format!("a must be positive, got {a}")));
    }
    if !c1.is_finite() {
        return Err(Error::InvalidParams("c1 must be finite".into()));
    }
    let params = SolitonParams::new(3, 0.0, c, 0.0)?;
    if c1 == 0.0 {
        return Err(Error::DegenerateInterval(
            "c1 = 0 places the pole of F' at r = 0".into(),
        ));
    }
    let pole = -c1 / (a * c);
    // a c r + c1 < 0 is where ψ = F' e^{-cF} is positive.
    let domain = if a * c > 0.0 {
        (f64::NEG_INFINITY, pole)
    } else {
        (pole, f64::INFINITY)
    };
    Ok(ExactSolution {
        family: ExactFamily::ConstantPsi { a, c, c1 },
        domain,
        params,
    })
}

impl ExactSolution {
    /// Parameters the family solves the system for.
    pub fn params(&self) -> SolitonParams {
        self.params
    }

    /// Re-embed a constant-ψ family in dimension `n` with soliton constant
    /// `lambda`. Exponential families have no such freedom and are returned
    /// unchanged.
    pub fn with_background(mut self, n: u32, lambda: f64) -> Result<Self> {
        if let ExactFamily::ConstantPsi { a, c, .. } = self.family {
            self.params = SolitonParams::new(n, lambda, c, lambda * a * a)?;
        }
        Ok(self)
    }

    /// Pole of `F'` for the constant-ψ family.
    pub fn pole(&self) -> Option<f64> {
        match self.family {
            ExactFamily::ConstantPsi { a, c, c1 } => Some(-c1 / (a * c)),
            ExactFamily::Exponential { .. } => None,
        }
    }

    pub fn contains(&self, r: f64) -> bool {
        r > self.domain.0 && r < self.domain.1
    }

    fn check(&self, r: f64) -> Result<()> {
        if self.contains(r) {
            Ok(())
        } else {
            Err(Error::OutOfSpan {
                r,
                lo: self.domain.0,
                hi: self.domain.1,
            })
        }
    }

    /// `(ψ, ψ', ψ'', F)` at `r`.
    pub fn state_at(&self, r: f64) -> Result<SolitonState> {
        self.check(r)?;
        Ok(match self.family {
            ExactFamily::ConstantPsi { a, c, c1 } => {
                let potential = -(-(a * c * r + c1)).ln() / c;
                SolitonState::new(r, a, 0.0, potential).with_ddpsi(0.0)
            }
            ExactFamily::Exponential { m, c, .. } => {
                let psi = m * (-c * m * r).exp();
                let k = -c * m;
                SolitonState::new(r, psi, k * psi, m * r).with_ddpsi(k * k * psi)
            }
        })
    }

    pub fn dddpsi_at(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(match self.family {
            ExactFamily::ConstantPsi { .. } => 0.0,
            ExactFamily::Exponential { m, c, .. } => {
                let k = -c * m;
                k * k * k * m * (k * r).exp()
            }
        })
    }

    /// `F'(r)`.
    pub fn potential_slope(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(match self.family {
            ExactFamily::ConstantPsi { a, c, c1 } => -a / (a * c * r + c1),
            ExactFamily::Exponential { m, .. } => m,
        })
    }

    /// Scalar curvature `R`, constant along both families.
    pub fn curvature(&self) -> f64 {
        match self.family {
            ExactFamily::ConstantPsi { .. } => self.params.lambda,
            ExactFamily::Exponential { m, n, c } => {
                let nf = f64::from(n);
                -nf * (nf - 1.0) * c * c * m * m
            }
        }
    }
}
