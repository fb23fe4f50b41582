use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("unknown event `{0}`")]
    UnknownEvent(String),

    #[error("state `{state}` has more than one arc labelled `{label}`")]
    Nondeterministic { state: String, label: String },

    #[error("the system has no agents")]
    EmptyAmas,

    #[error("duplicate agent name `{0}`")]
    DuplicateAgent(String),

    #[error("state `{0}` is not reachable from the initial state")]
    NotPruned(String),

    #[error("unknown place `{0}`")]
    UnknownPlace(String),

    #[error("unknown transition `{0}`")]
    UnknownTransition(String),

    #[error("duplicate place `{0}`")]
    DuplicatePlace(String),

    #[error("duplicate transition `{0}`")]
    DuplicateTransition(String),

    #[error("transition `{0}` needs a non-empty preset and postset")]
    EmptyNeighbourhood(String),

    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),

    #[error("1-safety violation: firing `{transition}` puts a second token on `{place}`")]
    SafetyViolation { transition: String, place: String },

    #[error("place `{0}` belongs to more than one component net")]
    PlaceCollision(String),

    #[error(
        "region enumeration is limited to {bound} states but the system has {states}; \
         use the states-as-places translation instead"
    )]
    RegionBound { states: usize, bound: usize },

    #[error("the label set selects no agent")]
    EmptySubsystem,

    #[error("label `{0}` of the target transition is not in the label set")]
    LabelNotInSet(String),

    #[error("marking `{marking}` has several `{label}` successors; the graph is not deterministic")]
    NondeterministicGraph { marking: String, label: String },

    #[error("cannot select a path from an empty collection")]
    EmptyPathSet,

    #[error("witness replay on the global net failed: {0}")]
    ReplayFailed(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
