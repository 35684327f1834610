use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Validation,
    Budget,
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("{what} has length {actual}, expected {expected}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("edge {edge} references vertex {vertex}, but there are only {num_vertices} vertices")]
    VertexOutOfRange {
        edge: usize,
        vertex: usize,
        num_vertices: usize,
    },

    #[error("edge {0} is empty")]
    EmptyEdge(usize),

    #[error("edge {edge} repeats vertex {vertex}")]
    RepeatedVertex { edge: usize, vertex: usize },

    #[error("edge {edge} has negative weight {weight}")]
    NegativeWeight { edge: usize, weight: String },

    #[error("edge {0} has zero demand")]
    ZeroDemand(usize),

    #[error("no-clipping violated: edge {edge} has demand {demand} > b_{vertex} = {limit}")]
    NoClipping {
        edge: usize,
        vertex: usize,
        demand: u64,
        limit: u64,
    },

    #[error("demand instances support unit capacities only (edge {0})")]
    NonUnitDemandCapacity(usize),

    #[error("bipartite witness is invalid: {0}")]
    InvalidWitness(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported plane order q = {0}; supported orders are 2, 3, 4, 5, 7, 8, 9")]
    UnsupportedOrder(u64),

    #[error("malformed linear program: {0}")]
    MalformedLp(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("search space of {required} configurations exceeds the enumeration budget {budget}")]
    BudgetExceeded { required: String, budget: u128 },

    #[error("term {index} out of range for a combination of {len} terms")]
    TermOutOfRange { index: usize, len: usize },

    #[error("split portion {portion} must lie strictly between 0 and {lambda}")]
    PortionOutOfRange { portion: String, lambda: String },

    #[error("alpha = {0} is below 1")]
    AlphaBelowOne(String),

    #[error("combination has no terms")]
    EmptyCombination,

    #[error("packing needs mass {needed} but only {available} is packable")]
    InsufficientMass { needed: String, available: String },

    #[error("internal invariant violated: {message}\n{dump}")]
    Invariant { message: String, dump: String },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            Parse(_) => ErrorKind::Parse,
            DimensionMismatch { .. }
            | VertexOutOfRange { .. }
            | EmptyEdge(_)
            | RepeatedVertex { .. }
            | NegativeWeight { .. }
            | ZeroDemand(_)
            | NoClipping { .. }
            | NonUnitDemandCapacity(_)
            | InvalidWitness(_)
            | InvalidParameter(_)
            | UnsupportedOrder(_)
            | MalformedLp(_)
            | Infeasible
            | Unbounded
            | TermOutOfRange { .. }
            | PortionOutOfRange { .. }
            | AlphaBelowOne(_)
            | EmptyCombination => ErrorKind::Validation,
            BudgetExceeded { .. } => ErrorKind::Budget,
            InsufficientMass { .. } | Invariant { .. } => ErrorKind::Internal,
        }
    }

    pub(crate) fn invariant(message: impl Into<String>, dump: impl Into<String>) -> Self {
        Error::Invariant {
            message: message.into(),
            dump: dump.into(),
        }
    }
}
