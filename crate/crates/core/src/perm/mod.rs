//! Permutations of `{1, ..., n}` and the block constructions used to build
//! elementary abelian subgroups of symmetric groups.

mod permutation;
mod subgroups;

pub use permutation::{compose, delta, descending_cycle, embed_block, factorial, long_cycle, outer_perm, Permutation};
pub use subgroups::{
    is_prime, maximal_elem_abelians, regular_elem_abelian, subgroup_for_shape, ElemAbelianSubgroup, SubgroupShape,
};
