//! Parametric triplet and quartet distances between partially resolved
//! phylogenies, with Hausdorff bounds, median consensus and brute-force
//! reference implementations.

pub mod consensus;
pub mod error;
pub mod expected;
pub mod hausdorff;
pub mod newick;
pub mod oracle;
pub mod quartet;
pub mod random;
pub mod rational;
pub mod tree;
pub mod triplet;

pub use error::{Error, Result};
pub use newick::{align_taxa, parse_newick, parse_newick_all, write_newick};
pub use rational::{format_rational, parse_rational, Rational};
pub use tree::{is_refinement, NodeId, Phylogeny, QuartetTopology, TaxonSet, TreeKind, TripletTopology, Violation};
pub use consensus::{best_of_profile, greedy_refine_median, profile_distance, Profile};
pub use hausdorff::{hausdorff_bounds, HausdorffBounds};
pub use oracle::{Classification, DistancePair};
pub use quartet::{parametric_quartet_distance, ApproxDistance, QuartetMethod, SharedMethod};
pub use triplet::parametric_triplet_distance;
