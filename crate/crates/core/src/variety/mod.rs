//! Rank varieties `V^#_E(M)` of modules for elementary abelian `p`-groups,
//! given by the matrices of a fixed generator list.

mod engine;
mod generic;
mod points;
mod report;

pub use engine::{
    is_member, projective_free_part, scan, scan_reduced, sigma_matrix, sigma_rank, test_point, u_alpha_minus_one,
    PointRecord, ProjectiveFreePart, SigmaSummary, DEFAULT_GROUP_ORDER_BUDGET, DEFAULT_POINT_BUDGET,
};
pub use generic::{
    chart_memberships, generic_membership, minor_vanishes, subset_grid_membership, ChartResult, GenericConfig,
    GenericOutcome, Witness,
};
pub use points::{projective_point_count, projective_points, ShiftedUnitPoint};
pub use report::{
    analyze, dimension_summary, DimensionCap, DimensionSummary, Mode, VarietyAnalysis, VarietyConfig, VarietyReport,
};
