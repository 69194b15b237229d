use std::fmt;

use thiserror::Error;

/// The poset axiom a relation failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    Reflexivity,
    Antisymmetry,
    Transitivity,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Reflexivity => "reflexivity",
            Axiom::Antisymmetry => "antisymmetry",
            Axiom::Transitivity => "transitivity",
        })
    }
}

/// Which bound is missing for a pair in a non-lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingBound {
    Join,
    Meet,
}

impl fmt::Display for MissingBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MissingBound::Join => "join",
            MissingBound::Meet => "meet",
        })
    }
}

/// Connectivity-space axiom violated by a family of sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceAxiom {
    /// The empty set is missing.
    C0,
    /// An overlapping family lacks its union.
    C1,
}

impl fmt::Display for SpaceAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceAxiom::C0 => "(c0)",
            SpaceAxiom::C1 => "(c1)",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("element index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("cover relation contains a cycle through element {0}")]
    CycleDetected(usize),

    #[error("relation violates {axiom} at ({}, {})", witness.0, witness.1)]
    AxiomViolation { axiom: Axiom, witness: (usize, usize) },

    #[error("duplicate element label {0:?}")]
    DuplicateLabel(String),

    #[error("unknown element name {0:?}")]
    UnknownElement(String),

    #[error("operation requires a nonempty input set")]
    EmptyInput,

    #[error("{what} of size {size} exceeds the configured budget of {cap}")]
    SizeBudgetExceeded { what: &'static str, size: usize, cap: usize },

    #[error("not a lattice: {{{}, {}}} has no {missing}", pair.0, pair.1)]
    NotALattice { pair: (usize, usize), missing: MissingBound },

    #[error("empty poset is not a complete lattice")]
    EmptyLattice,

    #[error("not locally connected below element {0}")]
    NotLocallyConnectedBelow(usize),

    #[error("not a chainmail: mail {{{}, {}}} has no join", pair.0, pair.1)]
    NotAChainmail { pair: (usize, usize) },

    #[error("set is not mail-connected")]
    NotMailConnected,

    #[error("set is not totally disconnected: {} and {} share a lower bound", pair.0, pair.1)]
    NotTotallyDisconnected { pair: (usize, usize) },

    #[error("map is not monotone: {} <= {} but images are not ordered", pair.0, pair.1)]
    NotMonotone { pair: (usize, usize) },

    #[error("join of mail {{{}, {}}} is not preserved", pair.0, pair.1)]
    MailJoinNotPreserved { pair: (usize, usize) },

    #[error("joins not preserved at {witness:?}")]
    JoinsNotPreserved { witness: Vec<usize> },

    #[error("right adjoint does not preserve the join of separated set {witness:?}")]
    AdjointFailsSeparatedJoins { witness: Vec<usize> },

    #[error("connected element {0} is not mapped to a connected element")]
    ConnectedNotPreserved(usize),

    #[error("map table has {got} entries, source has {expected} elements")]
    TableSize { expected: usize, got: usize },

    #[error("{axiom} violated by family {witness:?}")]
    SpaceAxiomViolation { axiom: SpaceAxiom, witness: Vec<Vec<usize>> },

    #[error("topology is not closed: {0}")]
    NotATopology(String),

    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether this error means a verified theorem failed (an implementation bug),
    /// as opposed to bad input.
    pub fn is_theorem_violation(&self) -> bool {
        matches!(self, Error::TheoremViolation(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
