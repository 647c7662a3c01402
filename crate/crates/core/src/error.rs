use thiserror::Error;

use crate::group::Character;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scale: {0}")]
    InvalidScale(String),

    #[error("invalid supernatural number: {0}")]
    InvalidSupernatural(String),

    #[error("multibase entries must be at least 2, got {0}")]
    InvalidMultibase(u64),

    #[error("digit {digit} out of range for base {base}")]
    DigitOutOfRange { digit: u64, base: u64 },

    #[error("incompatible group points: {0}")]
    IncompatiblePoints(String),

    #[error("invalid group description: {0}")]
    InvalidGroup(String),

    #[error("character {0} cannot be resolved from the stored scale prefix")]
    UnresolvableCharacter(Character),

    #[error("character {0} does not belong to this group")]
    ForeignCharacter(Character),

    #[error("trigonometric polynomial has nonzero mean {0}")]
    MeanNotZero(num_complex::Complex64),

    #[error("nontrivial character {0} is fixed by the translation")]
    DegenerateCharacter(Character),

    #[error("shift power {power} exceeds truncation {l}")]
    PowerOutOfRange { power: i64, l: usize },

    #[error("index {index} out of range for truncation {l}")]
    IndexOutOfRange { index: i64, l: usize },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("derivation is not invariant: off-band mass {0:.3e}")]
    NotInvariant(f64),

    #[error("derivation is not {n}-covariant: off-band mass {mass:.3e}")]
    NotCovariant { n: i64, mass: f64 },

    #[error("diagonal fit leaves unexplained mass {0:.3e}; enlarge the character dictionary")]
    FitResidualTooLarge(f64),

    #[error("odometers carry no nontrivial translation-invariant derivations of C(G)")]
    NoInvariantDerivation,

    #[error("generator {0} is not covered by the derivation table")]
    UncoveredGenerator(String),

    #[error("{n} is divisible by every stored scale term; extend the scale prefix")]
    PrefixExhausted { n: i64 },

    #[error("derivation has a nonzero invariant C(G)-derivation part and cannot be lifted")]
    Obstructed,

    #[error("lifting is only implemented over odometers")]
    UnsupportedGroup,

    #[error("truncation {got} too small, need at least {needed}")]
    TruncationTooSmall { needed: usize, got: usize },

    #[error("invalid derivation description: {0}")]
    InvalidDerivation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
