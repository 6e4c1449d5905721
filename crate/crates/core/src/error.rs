use std::fmt;

use thiserror::Error;

/// A single structural problem found while validating input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeViolation {
    #[error("game has no nodes")]
    Empty,
    #[error("game must have at least one player")]
    NoPlayers,
    #[error("invalid action label {0:?} (must be nonempty without whitespace)")]
    InvalidLabel(String),
    #[error("duplicate history {0:?}")]
    DuplicateHistory(String),
    #[error("prefix not closed: {history:?} present but {missing:?} missing")]
    MissingPrefix { history: String, missing: String },
    #[error("leaf {0:?} without utilities")]
    LeafWithoutUtilities(String),
    #[error("leaf {0:?} has a player assigned")]
    PlayerAtLeaf(String),
    #[error("non-terminal {0:?} carries utilities")]
    UtilitiesAtInternal(String),
    #[error("leaf {history:?} has {found} utilities, expected {expected}")]
    UtilityCount {
        history: String,
        expected: usize,
        found: usize,
    },
    #[error("leaf {0:?} has a non-finite utility")]
    NonFiniteUtility(String),
    #[error("non-terminal {0:?} has no player")]
    MissingPlayer(String),
    #[error("history {history:?} assigned to player {player}, out of range")]
    PlayerOutOfRange { history: String, player: usize },
    #[error("chance node {0:?} has no distribution")]
    MissingChanceDistribution(String),
    #[error("history {0:?} has a chance distribution but is not a chance node")]
    ChanceAtNonChance(String),
    #[error("chance distribution at {0:?} does not match the child actions")]
    ChanceSupportMismatch(String),
    #[error("chance distribution at {0:?} has a non-positive probability")]
    NonPositiveProbability(String),
    #[error("chance distribution at {history:?} sums to {sum}, not 1")]
    ChanceNotNormalized { history: String, sum: f64 },
    #[error("unknown history {0:?}")]
    UnknownHistory(String),
    #[error("classical partition lists {found} players, game has {expected}")]
    ClassicalPlayerCount { expected: usize, found: usize },
    #[error("player {player}: empty block")]
    EmptyBlock { player: usize },
    #[error("player {player}: history {history:?} is not one of the player's decision nodes")]
    NotActing { player: usize, history: String },
    #[error("player {player}: history {history:?} appears in more than one block")]
    Overlap { player: usize, history: String },
    #[error("player {player}: history {history:?} is not covered")]
    Uncovered { player: usize, history: String },
    #[error("player {player}: action sets differ between {first:?} and {other:?}")]
    ActionSetMismatch {
        player: usize,
        first: String,
        other: String,
    },
}

/// Every violation found in one validation pass.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ValidationErrors(pub Vec<TreeViolation>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("unknown history {0:?}")]
    UnknownHistory(String),
    #[error(transparent)]
    Invalid(#[from] ValidationErrors),
    #[error("observation variants differ")]
    VariantMismatch,
    #[error("observation assignment does not match the game ({0})")]
    ShapeMismatch(String),
    #[error("blocks overlap at history {0:?}")]
    OverlappingBlocks(String),
    #[error("game has {nodes} histories, enumeration limit is {limit}")]
    NodeLimit { nodes: usize, limit: usize },
    #[error("stable modification requires sequence-variant observations")]
    SetVariant,
    #[error("classical model lacks perfect recall: {0}")]
    ImperfectRecall(String),
    #[error("not an observation-based model: {0}")]
    NotObservationModel(String),
    #[error("size bound violated: {actual} > {bound}")]
    SizeBound { actual: usize, bound: usize },
}
