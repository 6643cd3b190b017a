//! Coherence of string rewriting presentations through decreasing diagrams.
//!
//! The pipeline: parse a presentation ([`polygraph`]), explore its rewrite
//! relation ([`engine`]), enumerate branchings ([`branchings`]), label steps
//! ([`labelling`]), close branchings by decreasing diagrams ([`decreasing`]),
//! collect elementary loops ([`loops`]), assemble the completion and fill
//! spheres ([`completion`]), and read off homology ([`homology`]).

pub mod branchings;
pub mod completion;
pub mod decreasing;
pub mod engine;
pub mod error;
pub mod homology;
pub mod labelling;
pub mod loops;
pub mod polygraph;

pub use branchings::{critical_branchings, local_branchings, Branching, BranchingKind, LocalBranching};
pub use completion::{
    build_completion, check_boundary, fill_parallel_sphere, fill_zigzag_sphere, CellKind, CoherentPresentation,
    CompletionConfig, ThreeCell, ThreeCellExpression, Verdict,
};
pub use decreasing::{check_decreasing, find_decreasing, DecreasingDiagram, StrictDiagram};
pub use engine::{
    classify_termination, distance, enumerate_steps, explore, normal_forms, quasi_normal_forms, support,
    ExplorationBudget, Path, ReductionGraph, Step, SupportMultiset, Termination, ZigzagPath,
};
pub use error::{Error, Result};
pub use homology::{abelianize, finiteness_report, homology, ChainComplexZ, FinitenessReport, HomologyResult};
pub use labelling::{LabelOrder, Labelling, QnfChoice};
pub use loops::{contract_loop, enumerate_elementary_loops, rotate_conjugators, LoopClass, LoopEnumeration};
pub use polygraph::{parse_polygraph, serialize_polygraph, Letter, ParseError, Polygraph, Rule, Word};
