use super::dopri::System;
use crate::error::Result;
use crate::soliton::{
    constraint_ddpsi, flow_dddpsi, potential_slope, SolitonParams, SolitonState, PSI_MIN,
};

/// `y = (ψ, ψ', F)`.
pub(crate) struct ConstraintSystem<'a>(pub &'a SolitonParams);

/// `y = (ψ, ψ', ψ'', F)`.
pub(crate) struct FlowSystem<'a>(pub &'a SolitonParams);

impl System<3> for ConstraintSystem<'_> {
    fn rhs(&self, r: f64, y: &[f64; 3]) -> Result<[f64; 3]> {
        let ddpsi = constraint_ddpsi(r, y[0], y[1], y[2], self.0)?;
        Ok([y[1], ddpsi, potential_slope(y[0], y[2], self.0)?])
    }

    fn state(&self, r: f64, y: &[f64; 3]) -> SolitonState {
        let state = SolitonState::new(r, y[0], y[1], y[2]);
        if y[0] > PSI_MIN {
            if let Ok(ddpsi) = constraint_ddpsi(r, y[0], y[1], y[2], self.0) {
                return state.with_ddpsi(ddpsi);
            }
        }
        state
    }

    fn potential_slope(&self, y: &[f64; 3]) -> f64 {
        potential_slope(y[0], y[2], self.0).unwrap_or(f64::INFINITY)
    }
}

impl System<4> for FlowSystem<'_> {
    fn rhs(&self, r: f64, y: &[f64; 4]) -> Result<[f64; 4]> {
        let dddpsi = flow_dddpsi(r, y[0], y[1], y[2], y[3], self.0)?;
        Ok([y[1], y[2], dddpsi, potential_slope(y[0], y[3], self.0)?])
    }

    fn state(&self, r: f64, y: &[f64; 4]) -> SolitonState {
        SolitonState::new(r, y[0], y[1], y[3]).with_ddpsi(y[2])
    }

    fn potential_slope(&self, y: &[f64; 4]) -> f64 {
        potential_slope(y[0], y[3], self.0).unwrap_or(f64::INFINITY)
    }
}
