use std::fmt;

use thiserror::Error;

/// A named inequality of the admissible parameter region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Violation {
    RadiusNotPositive,
    DiscTooFarLeft,
    DiscNotLeftOfOneMinusC,
    CenterNotAboveOnePlusEta,
    EtaNotPositive,
    EtaAboveHalf,
    DeltaBelowQuarter,
    DeltaNotBelowHalf,
    Sigma1NotInsideDisc,
    ThetaTooLarge,
    J1Zero,
    J2Zero,
    T0TooSmall,
}

impl Violation {
    /// Stable machine-readable identifier.
    pub fn code(self) -> &'static str {
        match self {
            Violation::RadiusNotPositive => "r_positive",
            Violation::DiscTooFarLeft => "c_minus_r_above_minus_half",
            Violation::DiscNotLeftOfOneMinusC => "c_minus_r_below_one_minus_c",
            Violation::CenterNotAboveOnePlusEta => "c_above_one_plus_eta",
            Violation::EtaNotPositive => "eta_positive",
            Violation::EtaAboveHalf => "eta_at_most_half",
            Violation::DeltaBelowQuarter => "delta_at_least_quarter",
            Violation::DeltaNotBelowHalf => "delta_below_half",
            Violation::Sigma1NotInsideDisc => "sigma1_below_c_plus_r",
            Violation::ThetaTooLarge => "theta_one_plus_eta_at_most_2_1",
            Violation::J1Zero => "j1_positive",
            Violation::J2Zero => "j2_positive",
            Violation::T0TooSmall => "t0_at_least_5_7",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            Violation::RadiusNotPositive => "r must be positive",
            Violation::DiscTooFarLeft => "c - r must exceed -1/2",
            Violation::DiscNotLeftOfOneMinusC => "c - r must be below 1 - c",
            Violation::CenterNotAboveOnePlusEta => "c must exceed 1 + eta",
            Violation::EtaNotPositive => "eta must be positive",
            Violation::EtaAboveHalf => "eta exceeds 1/2",
            Violation::DeltaBelowQuarter => "delta below 1/4",
            Violation::DeltaNotBelowHalf => "delta must be below 1/2",
            Violation::Sigma1NotInsideDisc => "sigma1 must be below c + r",
            Violation::ThetaTooLarge => "theta_{1+eta} exceeds 2.1",
            Violation::J1Zero => "J1 must be positive",
            Violation::J2Zero => "J2 must be positive",
            Violation::T0TooSmall => "T0 below 5/7",
        };
        f.write_str(msg)
    }
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("infeasible parameters: {}", join(.0))]
    Constraint(Vec<Violation>),
    #[error("search error: {0}")]
    Search(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
