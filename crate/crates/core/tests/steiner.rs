mod common;

use common::fixture;
use loopkit::structure::{is_diassociative, stepping_up_check};
use loopkit::LoopTable;

fn is_steiner(l: &LoopTable) -> bool {
    let e = l.identity();
    l.elements().all(|x| {
        l.mul(x, x) == e && l.elements().all(|y| l.mul(x, y) == l.mul(y, x) && l.mul(x, l.mul(x, y)) == y)
    })
}

/// Every element is its own inverse, so the closure under inverses is the
/// set itself; associativity is checked on all ordered triples with repeats.
fn strongly_associated(l: &LoopTable, set: [usize; 3]) -> bool {
    set.iter().all(|&u| {
        set.iter()
            .all(|&v| set.iter().all(|&w| l.mul(l.mul(u, v), w) == l.mul(u, l.mul(v, w))))
    })
}

#[test]
fn some_steiner_loops_of_order_16_are_not_stepping_up() {
    let l = fixture("steiner16a.loop").table;
    assert!(is_steiner(&l));
    assert!(is_diassociative(&l).holds);
    let r = stepping_up_check(&l);
    assert!(!r.holds);
    let [x, y, z] = ["x", "y", "z"].map(|v| r.witness_value(v).unwrap());
    assert!(strongly_associated(&l, [x, y, z]));
    assert!(!strongly_associated(&l, [x, y, l.mul(y, z)]));
}

#[test]
fn other_steiner_loops_of_order_16_are_stepping_up() {
    let l = fixture("steiner16b.loop").table;
    assert!(is_steiner(&l));
    assert!(stepping_up_check(&l).holds);
    for x in l.elements() {
        for y in l.elements() {
            for z in l.elements() {
                if strongly_associated(&l, [x, y, z]) {
                    assert!(strongly_associated(&l, [x, y, l.mul(y, z)]), "x={x} y={y} z={z}");
                }
            }
        }
    }
}
