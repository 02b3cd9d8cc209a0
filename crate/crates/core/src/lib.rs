//! Combinatorics of dual graphs of nodal curves.
//!
//! Dual graphs are connected multigraphs (loops and parallel edges allowed)
//! whose edges carry labels in a free commutative monoid over a finite set
//! of prime symbols. On top of that data this crate provides:
//!
//! - label arithmetic ([`monoid`]): products, divisibility, arithmetic
//!   complexity, types and primitive roots;
//! - graph structure ([`graph`]): validation, simple cycles, bridges and
//!   contractions;
//! - refinements ([`refine`]): basic refinements (blow-ups in a section),
//!   resolution to prime labels and independent witness verification;
//! - the alignment and strict alignment predicates ([`align`]), the latter
//!   deciding separatedness of the Néron model of the Jacobian;
//! - families of graphs over a poset of points related by specialization
//!   maps ([`family`]).
//!
//! JSON interchange formats live in [`json`], DOT export in [`dot`] and a
//! seeded random instance generator in [`random`].

#![forbid(unsafe_code)]

pub mod align;
pub mod dot;
pub mod family;
pub mod graph;
pub mod json;
pub mod monoid;
pub mod random;
pub mod refine;
pub mod report;

pub use align::{
    is_aligned, is_strictly_aligned, neron_separated_verdict, AlignmentReport, CycleVerdict,
    DEFAULT_CYCLE_CAP,
};
pub use dot::to_dot;
pub use family::{
    family_verdict, specialize, transport_basic_refinement, validate_family, CommutingDeclaration,
    Correspondence, Cover, FamilyIssue, FamilyVerdict, GraphFamily, Specialization, TransportError,
};
pub use graph::{
    Contraction, Cycle, CycleBudgetExceeded, Edge, EdgeKind, GraphError, GraphIssue, LabelledGraph,
};
pub use json::FormatError;
pub use monoid::{MonoidElement, MonoidError, MonoidHom, PrimeAlphabet};
pub use random::{gen_random, RandomSpec, SpecError};
pub use refine::{
    basic_refinement, compose_witnesses, resolve, verify_refinement, BasicRefinementSpec,
    CompositionError, Preimage, RefineError, RefinementReport, RefinementWitness, Resolution,
    WitnessIssue,
};
pub use report::ValidationReport;
