//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised while parsing or validating a game document.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("document is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("game has no states")]
    NoStates,
    #[error("duplicate state name {0:?}")]
    DuplicateState(String),
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("state {state:?}: unknown action {action:?} for player {player}")]
    UnknownAction { state: String, action: String, player: u8 },
    #[error("state {state:?}: duplicate action {action:?} for player {player}")]
    DuplicateAction { state: String, action: String, player: u8 },
    #[error("state {0:?} has an empty move set")]
    EmptyMoveSet(String),
    #[error("missing transition delta({state:?}, {a1:?}, {a2:?})")]
    MissingTransition { state: String, a1: String, a2: String },
    #[error("duplicate transition delta({state:?}, {a1:?}, {a2:?})")]
    DuplicateTransition { state: String, a1: String, a2: String },
    #[error("transition delta({state:?}, {a1:?}, {a2:?}) has an empty successor list")]
    EmptySupport { state: String, a1: String, a2: String },
    #[error("transition delta({state:?}, {a1:?}, {a2:?}) lists successor {to:?} twice")]
    DuplicateSuccessor { state: String, a1: String, a2: String, to: String },
    #[error("transition delta({state:?}, {a1:?}, {a2:?}) mixes entries with and without probabilities")]
    MixedProbabilityMode { state: String, a1: String, a2: String },
    #[error("transition delta({state:?}, {a1:?}, {a2:?}) has probability {p} outside (0,1]")]
    BadProbabilityValue { state: String, a1: String, a2: String, p: f64 },
    #[error("transition delta({state:?}, {a1:?}, {a2:?}) probabilities sum to {sum}, not 1")]
    BadProbabilitySum { state: String, a1: String, a2: String, sum: f64 },
}

/// Errors raised by solvers and strategy construction.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    /// Priority range of the game does not fit the requested formula form.
    #[error("priority range {found} does not fit {expected}")]
    CaseMismatch { expected: String, found: String },
    /// Complemented operator arguments violate the player-1 nesting invariants.
    #[error("nesting violation in dual operator arguments: {0}")]
    NestingViolation(String),
    /// A combinatorial enumeration would exceed its hard size guard.
    #[error("enumeration guard exceeded: {what} would need {count} > {limit}")]
    BlowupGuard { what: String, count: u128, limit: u128 },
    /// Rank-form strategies need an explicit instantiation parameter.
    #[error("rank-form strategy requires an eps value")]
    MissingEps,
    /// Quantitative analysis over a support-only model with substitution disabled.
    #[error("game carries no probabilities and uniform substitution is disabled")]
    NoProbabilities,
    /// A winning state admitted no verifying witness support; indicates a bug.
    #[error("no witness support verified at state {state}; this is a solver bug")]
    InternalSoundness { state: String },
    /// The eps halving search ran out of attempts before verification passed.
    #[error("eps search exhausted after {halvings} halvings (target {target})")]
    EpsSearchExhausted { halvings: u32, target: f64 },
    /// Strategy document errors.
    #[error("strategy file: {0}")]
    BadStrategy(String),
    /// Target sets only make sense for the almost-sure forms.
    #[error("a target set is only meaningful for the almost-sure forms")]
    TargetUnsupported,
}
