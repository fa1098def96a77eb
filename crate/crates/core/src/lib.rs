//! Subpath planning.
//!
//! A workspace is a set of planar subpaths, each with two endpoints and an arc
//! length. A solution is a closed tour that traverses every subpath exactly
//! once in one of its two directions. This crate turns a workspace into a
//! complete graph with start, end and middle nodes per subpath
//! ([`transform`]), repairs most triangle-inequality violations without
//! changing any finite Hamiltonian tour length ([`ieti`]) and then runs a
//! modified Christofides pipeline with ratio bound 2 ([`cspp`]).
//!
//! [`oracle`] solves small instances exactly and [`ga`] is a genetic baseline;
//! [`bench`] and [`verify`] drive both from the command line.

pub mod batch;
pub mod bench;
pub mod cspp;
pub mod error;
pub mod fmt;
pub mod ga;
pub mod graph;
pub mod ieti;
pub mod matching;
pub mod oracle;
pub mod transform;
pub mod verify;
pub mod workspace;

pub use cspp::{solve_cspp, CsppOutcome, Orientation, SppSolution, StageWeights, Step};
pub use error::{Error, Result};
pub use graph::{NodeId, NodeRole, SppGraph, Weight};
pub use workspace::{Point, Subpath, Workspace};
