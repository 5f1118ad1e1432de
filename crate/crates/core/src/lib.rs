//! Jumped Wenger graphs `J_m(q,i,j)` over finite fields: construction,
//! exact diameter and girth, constructive path and cycle witnesses, and a
//! grid runner that checks the known structural results against them.

pub mod gf;
pub mod graph;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod symfun;
pub mod witness;

pub use gf::{FieldElement, FieldError, FieldSpec};
pub use graph::{EdgeFormat, GraphError, GraphSpec, Origin, Side, VertexId};
pub use linalg::{FieldMatrix, LinalgError};
pub use metrics::{Adjacency, Distance, Girth};
pub use witness::{GirthPrediction, PredictionStatus, Walk, WalkKind, WitnessError};
