use crate::table::{Element, LoopTable};

use super::subloop::closure_mask;

const UNMAPPED: usize = usize::MAX;

/// Relabeling-invariant data of one element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct ElementInvariant {
    /// Least `k >= 1` with `x^k = 1` under left powers, or 0 if none.
    power_order: usize,
    left_cycles: Vec<usize>,
    right_cycles: Vec<usize>,
    commuting: usize,
    square_is_identity: bool,
    flexible_with: usize,
}

fn cycle_type(perm: impl Fn(Element) -> Element, n: usize) -> Vec<usize> {
    let mut seen = vec![false; n];
    let mut lens = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut z = start;
        while !seen[z] {
            seen[z] = true;
            z = perm(z);
            len += 1;
        }
        lens.push(len);
    }
    lens.sort_unstable();
    lens
}

fn element_invariant(l: &LoopTable, x: Element) -> ElementInvariant {
    let n = l.order();
    let e = l.identity();
    let mut p = x;
    let mut power_order = 0;
    for k in 1..=n {
        if p == e {
            power_order = k;
            break;
        }
        p = l.mul(x, p);
    }
    ElementInvariant {
        power_order,
        left_cycles: cycle_type(|z| l.mul(x, z), n),
        right_cycles: cycle_type(|z| l.mul(z, x), n),
        commuting: l.elements().filter(|&y| l.mul(x, y) == l.mul(y, x)).count(),
        square_is_identity: l.mul(x, x) == e,
        flexible_with: l
            .elements()
            .filter(|&y| l.mul(l.mul(x, y), x) == l.mul(x, l.mul(y, x)))
            .count(),
    }
}

/// A relabeling-invariant fingerprint; isomorphic loops have equal invariants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IsoInvariant {
    order: usize,
    elements: Vec<ElementInvariant>,
    commutative: bool,
    associative_triples: usize,
}

impl IsoInvariant {
    pub fn of(l: &LoopTable) -> Self {
        let mut elements: Vec<ElementInvariant> = l.elements().map(|x| element_invariant(l, x)).collect();
        elements.sort();
        let mut associative_triples = 0;
        for x in l.elements() {
            for y in l.elements() {
                let xy = l.mul(x, y);
                associative_triples += l.elements().filter(|&z| l.mul(xy, z) == l.mul(x, l.mul(y, z))).count();
            }
        }
        IsoInvariant {
            order: l.order(),
            elements,
            commutative: l.is_commutative(),
            associative_triples,
        }
    }
}

/// Greedy generating set, picking at each step the unreached element with the
/// fewest candidate images.
fn generating_set(l: &LoopTable, candidates: &[Vec<Element>]) -> Vec<Element> {
    let mut gens = Vec::new();
    let mut mask = closure_mask(l, []);
    while let Some(next) = l
        .elements()
        .filter(|&x| !mask[x])
        .min_by_key(|&x| (candidates[x].len(), x))
    {
        gens.push(next);
        mask = closure_mask(l, gens.iter().copied());
    }
    gens
}

/// Extends a partial map by closing under the loop operations. Returns false
/// on an inconsistency.
fn propagate(a: &LoopTable, b: &LoopTable, map: &mut [Element], inv: &mut [Element], fresh: Vec<Element>, allowed: &[Vec<bool>]) -> bool {
    let mut mapped: Vec<Element> = (0..a.order()).filter(|&x| map[x] != UNMAPPED).collect();
    let mut pending = fresh;
    let assign = |x: Element, y: Element, map: &mut [Element], inv: &mut [Element], pending: &mut Vec<Element>, mapped: &mut Vec<Element>| -> bool {
        if map[x] == UNMAPPED {
            if inv[y] != UNMAPPED || !allowed[x][y] {
                return false;
            }
            map[x] = y;
            inv[y] = x;
            pending.push(x);
            mapped.push(x);
            true
        } else {
            map[x] == y
        }
    };
    while let Some(u) = pending.pop() {
        let snapshot = mapped.clone();
        for v in snapshot {
            let (fu, fv) = (map[u], map[v]);
            let pairs = [
                (a.mul(u, v), b.mul(fu, fv)),
                (a.mul(v, u), b.mul(fv, fu)),
                (a.ldiv(u, v), b.ldiv(fu, fv)),
                (a.ldiv(v, u), b.ldiv(fv, fu)),
                (a.rdiv(u, v), b.rdiv(fu, fv)),
                (a.rdiv(v, u), b.rdiv(fv, fu)),
            ];
            for (x, y) in pairs {
                if !assign(x, y, map, inv, &mut pending, &mut mapped) {
                    return false;
                }
            }
        }
    }
    true
}

fn extend(
    a: &LoopTable,
    b: &LoopTable,
    gens: &[Element],
    candidates: &[Vec<Element>],
    allowed: &[Vec<bool>],
    map: &[Element],
    inv: &[Element],
) -> Option<Vec<Element>> {
    let Some((&g, rest)) = gens.split_first() else {
        let total = map.iter().all(|&y| y != UNMAPPED);
        let homomorphic = total
            && a.elements()
                .all(|x| a.elements().all(|y| map[a.mul(x, y)] == b.mul(map[x], map[y])));
        return homomorphic.then(|| map.to_vec());
    };
    if map[g] != UNMAPPED {
        return extend(a, b, rest, candidates, allowed, map, inv);
    }
    for &y in &candidates[g] {
        if inv[y] != UNMAPPED {
            continue;
        }
        let mut m = map.to_vec();
        let mut i = inv.to_vec();
        m[g] = y;
        i[y] = g;
        if propagate(a, b, &mut m, &mut i, vec![g], allowed) {
            if let Some(found) = extend(a, b, rest, candidates, allowed, &m, &i) {
                return Some(found);
            }
        }
    }
    None
}

/// An isomorphism `f` from `a` onto `b` (`f[x]` is the image of `x`), if any.
pub fn are_isomorphic(a: &LoopTable, b: &LoopTable) -> Option<Vec<Element>> {
    if a.order() != b.order() {
        return None;
    }
    let n = a.order();
    let inv_a: Vec<ElementInvariant> = a.elements().map(|x| element_invariant(a, x)).collect();
    let inv_b: Vec<ElementInvariant> = b.elements().map(|x| element_invariant(b, x)).collect();
    let mut sa = inv_a.clone();
    let mut sb = inv_b.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return None;
    }
    let candidates: Vec<Vec<Element>> = a
        .elements()
        .map(|x| b.elements().filter(|&y| inv_a[x] == inv_b[y]).collect())
        .collect();
    let allowed: Vec<Vec<bool>> = candidates
        .iter()
        .map(|c| {
            let mut row = vec![false; n];
            for &y in c {
                row[y] = true;
            }
            row
        })
        .collect();
    let mut map = vec![UNMAPPED; n];
    let mut inv = vec![UNMAPPED; n];
    map[a.identity()] = b.identity();
    inv[b.identity()] = a.identity();
    let gens = generating_set(a, &candidates);
    extend(a, b, &gens, &candidates, &allowed, &map, &inv)
}
