//! The regime table: what is known about complete solitons for each sign
//! pattern of `R - λ`, `c` and `λ`.

use serde::{Deserialize, Serialize};

use crate::soliton::SolitonType;

/// Margin used by the `R > λ + ε` and `R < λ - ε` rows.
pub const DEFAULT_EPS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RCondition {
    /// `R > λ + ε`
    AboveLambdaEps,
    /// `R > λ`
    AboveLambda,
    /// `R < λ`
    BelowLambda,
    /// `R < λ - ε`
    BelowLambdaEps,
}

impl RCondition {
    pub const ALL: [RCondition; 4] = [
        RCondition::AboveLambdaEps,
        RCondition::AboveLambda,
        RCondition::BelowLambda,
        RCondition::BelowLambdaEps,
    ];

    pub fn label(self) -> &'static str {
        match self {
            RCondition::AboveLambdaEps => "R>lambda+eps",
            RCondition::AboveLambda => "R>lambda",
            RCondition::BelowLambda => "R<lambda",
            RCondition::BelowLambdaEps => "R<lambda-eps",
        }
    }

    pub fn is_above(self) -> bool {
        matches!(self, RCondition::AboveLambdaEps | RCondition::AboveLambda)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CSign {
    Pos,
    Neg,
}

impl CSign {
    pub const ALL: [CSign; 2] = [CSign::Pos, CSign::Neg];

    pub fn of(c: f64) -> CSign {
        if c > 0.0 {
            CSign::Pos
        } else {
            CSign::Neg
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CSign::Pos => "c>0",
            CSign::Neg => "c<0",
        }
    }
}

pub const TYPES: [SolitonType; 3] = [
    SolitonType::Shrinking,
    SolitonType::Steady,
    SolitonType::Expanding,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    /// No complete line-mode solution; only the rotationally symmetric mode.
    RotationallySymmetric,
    /// Only the trivial soliton, so no nontrivial complete solution at all.
    Trivial,
    /// Warped product with `R̄ = 0` and `ψ → 0`.
    AsymptoteFlat,
    /// Warped product with either `R̄ = 0`, `ψ → 0`, or `R̄ < 0`,
    /// `ψ → sqrt(R̄/λ)`.
    AsymptoteFlatOrNegative,
    Unsolved,
}

impl Expectation {
    pub fn label(self) -> &'static str {
        match self {
            Expectation::RotationallySymmetric => "rotationally-symmetric",
            Expectation::Trivial => "trivial",
            Expectation::AsymptoteFlat => "asymptote-flat",
            Expectation::AsymptoteFlatOrNegative => "asymptote-flat-or-negative",
            Expectation::Unsolved => "unsolved",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub r_condition: RCondition,
    pub c_sign: CSign,
    pub soliton_type: SolitonType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RegimeCell {
    pub r_condition: RCondition,
    pub c_sign: CSign,
    pub soliton_type: SolitonType,
    pub expectation: Expectation,
    /// Where the entry comes from; `None` for unsolved cells.
    pub citation: Option<&'static str>,
}

impl RegimeCell {
    pub fn key(&self) -> CellKey {
        CellKey {
            r_condition: self.r_condition,
            c_sign: self.c_sign,
            soliton_type: self.soliton_type,
        }
    }
}

/// Table entry for a key. Every key has one.
pub fn regime_expectation(key: CellKey) -> RegimeCell {
    use CSign::*;
    use Expectation::*;
    use RCondition::*;
    use SolitonType::*;
    let (expectation, citation) = match (key.r_condition, key.c_sign, key.soliton_type) {
        (AboveLambdaEps, Pos, _) => (RotationallySymmetric, Some("Prop. 3.3")),
        (AboveLambda, Pos, Shrinking | Steady) => (RotationallySymmetric, Some("Thm. 4.1")),
        (BelowLambda, Neg, Steady) => (AsymptoteFlat, Some("Prop. 5.2")),
        (BelowLambda, Neg, Expanding) => (AsymptoteFlatOrNegative, Some("Prop. 5.1")),
        (BelowLambdaEps, Neg, _) => (Trivial, Some("Prop. 3.4")),
        _ => (Unsolved, None),
    };
    RegimeCell {
        r_condition: key.r_condition,
        c_sign: key.c_sign,
        soliton_type: key.soliton_type,
        expectation,
        citation,
    }
}

/// All 24 cells in row order: R-condition, then c sign, then type.
pub fn regime_table() -> Vec<RegimeCell> {
    let mut cells = Vec::with_capacity(24);
    for r_condition in RCondition::ALL {
        for c_sign in CSign::ALL {
            for soliton_type in TYPES {
                cells.push(regime_expectation(CellKey {
                    r_condition,
                    c_sign,
                    soliton_type,
                }));
            }
        }
    }
    cells
}
