use thiserror::Error;

use crate::tree::{NodeId, TreeKind};

/// Errors raised by tree construction, comparison and the aggregation routines.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Newick text could not be parsed.
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("duplicate leaf label {0:?}")]
    DuplicateLabel(String),
    #[error("empty leaf label at byte {0}")]
    EmptyLabel(usize),
    /// The tree violates a structural invariant of its kind.
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("expected a {expected} tree, got a {found} tree")]
    KindMismatch { expected: TreeKind, found: TreeKind },
    /// Two inputs are defined over different taxon sets.
    #[error("taxon sets differ")]
    TaxonMismatch,
    #[error("unknown taxon {0:?}")]
    UnknownTaxon(String),
    /// A node id does not satisfy the precondition of an editing operation.
    #[error("precondition failed at node {node}: {message}")]
    Precondition { node: NodeId, message: String },
    /// An enumeration would exceed the configured cap.
    #[error("capacity exceeded: {predicted} items predicted, cap is {cap}")]
    Capacity { predicted: u128, cap: u128 },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    /// The approximation guarantee does not cover the requested parameter.
    #[error("the 2-approximation is only guaranteed for p >= 1/2 (got p = {0}); use the brute-force method")]
    UnsupportedGuarantee(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
