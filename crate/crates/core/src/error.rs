use std::fmt;

use thiserror::Error;

/// The taut/veering axiom a rejected input violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    GluingInvolution,
    Connected,
    Orientable,
    TautAngles,
    Coorientation,
    AngleSum,
    FanSides,
    TorusCusps,
    EdgeReversed,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::GluingInvolution => "gluing-involution",
            Axiom::Connected => "connected",
            Axiom::Orientable => "orientable",
            Axiom::TautAngles => "taut-angles",
            Axiom::Coorientation => "top-meets-bottom",
            Axiom::AngleSum => "angle-sum-2pi",
            Axiom::FanSides => "nonempty-fans",
            Axiom::TorusCusps => "torus-cusps",
            Axiom::EdgeReversed => "edge-reversed",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed [{axiom}]: {detail}")]
    Validation { axiom: Axiom, detail: String },
}

impl TriError {
    pub fn invalid(axiom: Axiom, detail: impl Into<String>) -> Self {
        TriError::Validation {
            axiom,
            detail: detail.into(),
        }
    }

    pub fn axiom(&self) -> Option<Axiom> {
        match self {
            TriError::Validation { axiom, .. } => Some(*axiom),
            TriError::Parse(_) => None,
        }
    }
}

/// Failures of the veering layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VeeringError {
    #[error("cusp {cusp} is not pseudohyperbolic: {witness}")]
    NotPseudohyperbolic { cusp: usize, witness: String },
    #[error("edge {edge} has ends in ladderpoles of different handedness")]
    InconsistentVeer { edge: usize },
    #[error("cusp {cusp}: internal inconsistency: {detail}")]
    Internal { cusp: usize, detail: String },
}
