//! Interface configuration for composed services.
//!
//! Service interfaces are MDL terms: symbols, term variables, records and
//! choices whose elements may carry Boolean guards and whose tails may be
//! variables. Wiring an output port to an input port yields a seniority
//! constraint between the two interface terms. Solving all constraints
//! picks Boolean values (which functionality stays enabled) and ground terms
//! for the variables (what extra data flows through each service), which are
//! then emitted as per-service configuration.
//!
//! The pipeline, module by module:
//!
//! * [`mdl`]: terms, text syntax, grounding.
//! * [`seniority`]: the order on ground terms, meet and join.
//! * [`derivation`]: interfaces from service stubs and shells.
//! * [`constraints`]: topologies, interface bundles, constraint generation.
//! * [`solver`]: the constraint solver, a verifier and a brute-force oracle.
//! * [`emit`]: per-service configuration output.

pub mod constraints;
pub mod derivation;
pub mod emit;
pub mod mdl;
pub mod seniority;
pub mod solver;

pub use constraints::{Constraint, ConstraintSet, Origin, PortRef, Topology};
pub use derivation::{DerivedService, ServiceStub, ShellSpec};
pub use emit::ServiceConfig;
pub use mdl::{BoolExpr, Kind, Label, Substitution, Term};
pub use solver::{Solution, SolverConfig, Verdict};
