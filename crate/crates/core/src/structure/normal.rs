use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::table::{Element, LoopTable};

use super::subloop::{closure_mask, is_subloop, mask_members};
use super::StructureError;

/// Left, middle and right nucleus, the nucleus and the center.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Nuclei {
    pub left: Vec<Element>,
    pub middle: Vec<Element>,
    pub right: Vec<Element>,
    pub nucleus: Vec<Element>,
    pub center: Vec<Element>,
}

pub fn nuclei(l: &LoopTable) -> Nuclei {
    let all_pairs = |pred: &dyn Fn(Element, Element) -> bool| {
        l.elements().all(|x| l.elements().all(|y| pred(x, y)))
    };
    let m = |a, b| l.mul(a, b);
    let left: Vec<Element> = l
        .elements()
        .filter(|&a| all_pairs(&|x, y| m(a, m(x, y)) == m(m(a, x), y)))
        .collect();
    let middle: Vec<Element> = l
        .elements()
        .filter(|&a| all_pairs(&|x, y| m(x, m(a, y)) == m(m(x, a), y)))
        .collect();
    let right: Vec<Element> = l
        .elements()
        .filter(|&a| all_pairs(&|x, y| m(x, m(y, a)) == m(m(x, y), a)))
        .collect();
    let nucleus: Vec<Element> = left
        .iter()
        .copied()
        .filter(|a| middle.contains(a) && right.contains(a))
        .collect();
    let center = nucleus
        .iter()
        .copied()
        .filter(|&a| l.elements().all(|x| m(a, x) == m(x, a)))
        .collect();
    Nuclei {
        left,
        middle,
        right,
        nucleus,
        center,
    }
}

fn coset_left(l: &LoopTable, x: Element, n: &[Element]) -> BTreeSet<Element> {
    n.iter().map(|&h| l.mul(x, h)).collect()
}

fn coset_right(l: &LoopTable, n: &[Element], x: Element) -> BTreeSet<Element> {
    n.iter().map(|&h| l.mul(h, x)).collect()
}

/// Coset-set test for normality: for all `x, y`,
/// `xN = Nx`, `(xN) y = x (Ny)`, `(Nx) y = N (xy)` and `x (yN) = (xy) N`.
pub fn is_normal(l: &LoopTable, members: &[Element]) -> bool {
    if !is_subloop(l, members) {
        return false;
    }
    for x in l.elements() {
        let xn = coset_left(l, x, members);
        let nx = coset_right(l, members, x);
        if xn != nx {
            return false;
        }
        for y in l.elements() {
            let xy = l.mul(x, y);
            let lhs: BTreeSet<Element> = xn.iter().map(|&u| l.mul(u, y)).collect();
            let rhs: BTreeSet<Element> = coset_right(l, members, y).iter().map(|&u| l.mul(x, u)).collect();
            if lhs != rhs {
                return false;
            }
            let lhs: BTreeSet<Element> = nx.iter().map(|&u| l.mul(u, y)).collect();
            if lhs != coset_right(l, members, xy) {
                return false;
            }
            let lhs: BTreeSet<Element> = coset_left(l, y, members).iter().map(|&u| l.mul(x, u)).collect();
            if lhs != coset_left(l, xy, members) {
                return false;
            }
        }
    }
    true
}

/// Generators of the inner mapping group as permutation arrays:
/// `T(x): z -> x \ (z x)`, `L(x, y): z -> (y x) \ (y (x z))`,
/// `R(x, y): z -> ((z x) y) / (x y)`.
fn inner_mapping_generators(l: &LoopTable) -> Vec<Vec<Element>> {
    let mut out = Vec::new();
    for x in l.elements() {
        out.push(l.elements().map(|z| l.ldiv(x, l.mul(z, x))).collect());
        for y in l.elements() {
            out.push(l.elements().map(|z| l.ldiv(l.mul(y, x), l.mul(y, l.mul(x, z)))).collect());
            out.push(l.elements().map(|z| l.rdiv(l.mul(l.mul(z, x), y), l.mul(x, y))).collect());
        }
    }
    out.sort();
    out.dedup();
    out
}

fn normal_closure(l: &LoopTable, seeds: &[Element], inner: &[Vec<Element>]) -> Vec<bool> {
    let mut mask = closure_mask(l, seeds.iter().copied());
    loop {
        let members = mask_members(&mask);
        let images: Vec<Element> = members
            .iter()
            .flat_map(|&m| inner.iter().map(move |phi| phi[m]))
            .filter(|&w| !mask[w])
            .collect();
        if images.is_empty() {
            return mask;
        }
        mask = closure_mask(l, members.into_iter().chain(images));
    }
}

/// All normal subloops, ordered by size then lexicographically.
pub fn normal_subloops(l: &LoopTable) -> Vec<Vec<Element>> {
    let inner = inner_mapping_generators(l);
    let trivial = closure_mask(l, []);
    let mut seen: HashSet<Vec<bool>> = HashSet::from([trivial.clone()]);
    let mut queue = vec![trivial];
    while let Some(mask) = queue.pop() {
        let members = mask_members(&mask);
        for x in l.elements().filter(|&x| !mask[x]) {
            let mut seeds = members.clone();
            seeds.push(x);
            let grown = normal_closure(l, &seeds, &inner);
            if seen.insert(grown.clone()) {
                queue.push(grown);
            }
        }
    }
    let mut out: Vec<Vec<Element>> = seen.iter().map(|m| mask_members(m)).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    debug_assert!(out.iter().all(|n| is_normal(l, n)));
    out
}

/// Only the trivial subloop and the whole loop are normal.
pub fn is_simple(l: &LoopTable) -> bool {
    l.order() > 1 && normal_subloops(l).len() == 2
}

/// The factor loop `L / N`. Cosets are numbered in increasing order of their
/// least member.
pub fn factor_loop(l: &LoopTable, normal: &[Element]) -> Result<LoopTable, StructureError> {
    if !is_normal(l, normal) {
        return Err(StructureError::NotNormal(normal.to_vec()));
    }
    let mut coset_of = vec![usize::MAX; l.order()];
    let mut reps = Vec::new();
    for x in l.elements() {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let idx = reps.len();
        reps.push(x);
        for &h in normal {
            coset_of[l.mul(x, h)] = idx;
        }
    }
    Ok(
        LoopTable::from_fn(reps.len(), |i, j| coset_of[l.mul(reps[i], reps[j])])
            .expect("factor of a loop by a normal subloop is a loop"),
    )
}
