//! The matrix model of `Lie(n) = F S_n ω_n` on the basis `{σ ω_n : σ(1) = 1}`.

mod basis;
pub mod cache;
mod module;
mod resources;

pub use basis::LieBasis;
pub use cache::{cache_load, cache_store, LiemFile};
pub use module::{
    action_matrices_built, action_matrix, regular_span_rank, restrict, verify_dimension,
    verify_free_over_point_stabilizer, LieRepresentation, Provenance, ORACLE_MAX_DEGREE,
};
pub use resources::{ResourceLimits, ABSOLUTE_MAX_DEGREE};
