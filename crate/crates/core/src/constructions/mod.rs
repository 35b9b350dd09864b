//! Loops built from formulas: central extensions, the wedge-product loop over
//! a prime field, and the middle Bol loop attached to a left Bol loop.

mod central;
mod wedge;

use thiserror::Error;

use crate::identity::{eval_identity, lookup, CheckResult};
use crate::table::{Element, LoopTable};

pub use central::{central_extension, fiber_image, Cocycle, CocycleIter, CocycleSampler, MAX_ENUMERATED_CELLS};
pub use wedge::{wedge_loop, WedgeParams, MAX_WEDGE_ORDER};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("cocycle is not normalized at ({0}, {1})")]
    NotNormalized(Element, Element),
    #[error("cocycle value {value} at ({q1}, {q2}) is not a fiber element")]
    CocycleOutOfRange { q1: Element, q2: Element, value: Element },
    #[error("cocycle has {got} values, expected {expected}")]
    CocycleShape { got: usize, expected: usize },
    #[error("fiber is not an abelian group")]
    FiberNotAbelianGroup,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("input is not a left Bol loop")]
    NotLeftBol(CheckResult),
}

/// `x o y = x / y^-1`, a middle Bol loop whenever `l` is left Bol.
pub fn middle_bol_from_left_bol(l: &LoopTable) -> Result<LoopTable, ConstructionError> {
    let r = eval_identity(l, lookup("LBOL").expect("catalog")).expect("three variables are always affordable");
    if !r.holds {
        return Err(ConstructionError::NotLeftBol(r));
    }
    let inv: Vec<Element> = l
        .elements()
        .map(|y| l.inverse(y).expect("left Bol loops have two-sided inverses"))
        .collect();
    Ok(LoopTable::from_fn(l.order(), |x, y| l.rdiv(x, inv[y])).expect("middle Bol operation is a loop"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::tests::table1;

    #[test]
    fn groups_give_middle_bol_loops() {
        let g = LoopTable::direct_product(&LoopTable::cyclic(2), &LoopTable::cyclic(4));
        let m = middle_bol_from_left_bol(&g).unwrap();
        // in a group x / y^-1 = x y
        assert_eq!(m, g);
        assert!(eval_identity(&m, lookup("MBOL").unwrap()).unwrap().holds);
    }

    #[test]
    fn non_bol_input_is_rejected() {
        assert!(matches!(
            middle_bol_from_left_bol(&table1()),
            Err(ConstructionError::NotLeftBol(r)) if !r.holds
        ));
    }
}
