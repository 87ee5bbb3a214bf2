//! Exact integer linear algebra: normal forms, solving, saturation, indices and Hom modules.

mod hom;
#[allow(clippy::module_inception)]
mod lattice;
mod matrix;
mod normal;

pub use hom::{hom_module, restrict_action, ActionLattice};
pub use lattice::{
    is_saturated, lattice_index, left_kernel, right_kernel, saturate, solve_integer, solve_row, Index, Lattice,
    QuotientMap, Solution,
};
pub use matrix::{dot, ints, is_zero_vec, vec_add, vec_scale, vec_sub, IntMatrix};
pub use normal::{abs_det, hnf, hnf_only, snf, Hermite, Smith};

#[cfg(test)]
mod tests;
