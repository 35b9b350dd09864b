//! Subloops, associativity decisions, nuclei, normal subloops, factor loops
//! and isomorphism testing.

mod assoc;
mod iso;
mod normal;
mod subloop;

use thiserror::Error;

use crate::table::{Element, LoopError};

pub use assoc::{
    all_products, associates, catalan, check_h, is_diassociative, is_power_associative, sa, stepping_up_check,
    MAX_H_LENGTH, MAX_PRODUCT_LENGTH,
};
pub use iso::{are_isomorphic, IsoInvariant};
pub use normal::{factor_loop, is_normal, is_simple, normal_subloops, nuclei, Nuclei};
pub use subloop::{all_subloops, is_subloop, subloop_generated, Subloop};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("element {0} has no two-sided inverse")]
    NoTwoSidedInverse(Element),
    #[error("{0:?} is not a normal subloop")]
    NotNormal(Vec<Element>),
    #[error(transparent)]
    Loop(LoopError),
}

impl From<LoopError> for StructureError {
    fn from(e: LoopError) -> Self {
        match e {
            LoopError::NoTwoSidedInverse(x) => StructureError::NoTwoSidedInverse(x),
            other => StructureError::Loop(other),
        }
    }
}
