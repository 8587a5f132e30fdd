//! Finite groups, abelian p-groups with automorphisms, and validated block
//! data G = D x| E.

mod abelian;
mod block;
pub mod examples;
mod finite;

pub use abelian::{AbelianPGroup, ActionMatrix, EmbeddedSubgroup};
pub use block::{
    describe_defect, validate_block_spec, validate_strict, BlockSpec, CharOrbit, SemidirectGroup, SplitGroup,
    DEFAULT_ORDER_BOUND,
};
pub use examples::{inverting_c3, inverting_c3_times_c3, rotating_c4_squared};
pub use finite::FiniteGroup;
