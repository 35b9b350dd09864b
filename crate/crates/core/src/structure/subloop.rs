use std::collections::HashSet;

use crate::table::{Element, LoopTable};

/// A subloop together with the loop it lives in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subloop<'a> {
    pub parent: &'a LoopTable,
    /// Sorted member list.
    pub members: Vec<Element>,
    pub generators: Vec<Element>,
}

impl Subloop<'_> {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: Element) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    /// The subloop as a loop in its own right, members relabeled `0..order`
    /// in increasing order.
    pub fn to_table(&self) -> LoopTable {
        let index = |x: Element| self.members.binary_search(&x).expect("closed under products");
        LoopTable::from_fn(self.members.len(), |i, j| {
            index(self.parent.mul(self.members[i], self.members[j]))
        })
        .expect("subloops are loops")
    }
}

/// Membership mask of the least subloop containing `seeds` and the identity.
pub(crate) fn closure_mask(l: &LoopTable, seeds: impl IntoIterator<Item = Element>) -> Vec<bool> {
    let mut mask = vec![false; l.order()];
    let mut members = Vec::new();
    let mut pending = vec![l.identity()];
    pending.extend(seeds);
    while let Some(z) = pending.pop() {
        if mask[z] {
            continue;
        }
        mask[z] = true;
        members.push(z);
        for &m in &members {
            for w in [
                l.mul(m, z),
                l.mul(z, m),
                l.ldiv(m, z),
                l.ldiv(z, m),
                l.rdiv(m, z),
                l.rdiv(z, m),
            ] {
                if !mask[w] {
                    pending.push(w);
                }
            }
        }
    }
    mask
}

pub(crate) fn mask_members(mask: &[bool]) -> Vec<Element> {
    mask.iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i))
        .collect()
}

/// Least subloop containing `gens`, found by worklist closure under
/// multiplication and both divisions.
pub fn subloop_generated<'a>(l: &'a LoopTable, gens: &[Element]) -> Subloop<'a> {
    let mask = closure_mask(l, gens.iter().copied());
    Subloop {
        parent: l,
        members: mask_members(&mask),
        generators: gens.to_vec(),
    }
}

/// Is `members` closed under the loop operations (and nonempty)?
pub fn is_subloop(l: &LoopTable, members: &[Element]) -> bool {
    let mut mask = vec![false; l.order()];
    for &m in members {
        mask[m] = true;
    }
    mask[l.identity()]
        && members.iter().all(|&x| {
            members
                .iter()
                .all(|&y| mask[l.mul(x, y)] && mask[l.ldiv(x, y)] && mask[l.rdiv(x, y)])
        })
}

/// Every subloop, as sorted member lists, ordered by size then lexicographically.
pub fn all_subloops(l: &LoopTable) -> Vec<Vec<Element>> {
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    let start = closure_mask(l, []);
    seen.insert(start.clone());
    let mut queue = vec![start];
    while let Some(mask) = queue.pop() {
        for x in l.elements() {
            if mask[x] {
                continue;
            }
            let grown = closure_mask(l, mask_members(&mask).into_iter().chain([x]));
            if seen.insert(grown.clone()) {
                queue.push(grown);
            }
        }
    }
    let mut out: Vec<Vec<Element>> = seen.iter().map(|m| mask_members(m)).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}
