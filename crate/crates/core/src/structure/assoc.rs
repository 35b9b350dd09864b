use std::collections::{BTreeSet, HashSet};

use crate::identity::{lookup, eval_identity, CheckResult};
use crate::table::{Element, LoopError, LoopTable};

use super::subloop::{closure_mask, mask_members};
use super::StructureError;

/// Longest sequence accepted by [`all_products`].
pub const MAX_PRODUCT_LENGTH: usize = 12;
/// Largest `n` accepted by [`check_h`].
pub const MAX_H_LENGTH: usize = 8;

/// The Catalan number `C_k`.
pub fn catalan(k: u64) -> u64 {
    // C_k = binom(2k, k) / (k + 1), computed incrementally to stay exact
    (0..k).fold(1u64, |c, i| c * 2 * (2 * i + 1) / (i + 2))
}

/// Values of every parenthesization of the ordered product `seq`.
///
/// Uses the split recursion `P(i..=j) = U_k P(i..=k) * P(k+1..=j)` with the
/// value set of each contiguous range memoized.
pub fn all_products(l: &LoopTable, seq: &[Element]) -> Result<BTreeSet<Element>, StructureError> {
    let len = seq.len();
    if len == 0 {
        return Ok(BTreeSet::from([l.identity()]));
    }
    if len > MAX_PRODUCT_LENGTH {
        return Err(StructureError::ResourceLimit(format!(
            "product of {len} factors exceeds the limit {MAX_PRODUCT_LENGTH}"
        )));
    }
    // memo[i][j] = value set of seq[i..=j]
    let mut memo: Vec<Vec<BTreeSet<Element>>> = vec![vec![BTreeSet::new(); len]; len];
    for (i, &x) in seq.iter().enumerate() {
        memo[i][i].insert(x);
    }
    for width in 1..len {
        for i in 0..len - width {
            let j = i + width;
            let mut set = BTreeSet::new();
            for k in i..j {
                for &a in &memo[i][k] {
                    for &b in &memo[k + 1][j] {
                        set.insert(l.mul(a, b));
                    }
                }
            }
            memo[i][j] = set;
        }
    }
    Ok(std::mem::take(&mut memo[0][len - 1]))
}

/// `A(seq)`: all parenthesizations agree.
pub fn associates(l: &LoopTable, seq: &[Element]) -> Result<bool, StructureError> {
    Ok(all_products(l, seq)?.len() == 1)
}

/// `H(n)`: for all `a, b` every product of `n` factors from
/// `{1, a, a^-1, b, b^-1}` is independent of parenthesization.
///
/// Tuples are explored depth-first; for each prefix the unique value of every
/// contiguous range is kept, so extending a tuple costs `O(len^2)` and a
/// failing range prunes every extension (translations are bijective, so a
/// disagreement inside a range survives in the whole product).
pub fn check_h(l: &LoopTable, n: usize) -> Result<CheckResult, StructureError> {
    if n > MAX_H_LENGTH {
        return Err(StructureError::ResourceLimit(format!(
            "H({n}) exceeds the limit H({MAX_H_LENGTH})"
        )));
    }
    let inv: Vec<Element> = l
        .elements()
        .map(|x| l.inverse(x))
        .collect::<Result<_, LoopError>>()
        .map_err(StructureError::from)?;
    if n == 0 {
        return Ok(CheckResult::pass());
    }
    for a in l.elements() {
        for b in l.elements() {
            let mut alphabet = vec![l.identity(), a, inv[a], b, inv[b]];
            let mut seen = HashSet::new();
            alphabet.retain(|x| seen.insert(*x));
            let mut ranges = vec![vec![0usize; n]; n];
            let mut tuple = Vec::with_capacity(n);
            if let Some(bad) = extend_tuple(l, &alphabet, n, &mut tuple, &mut ranges) {
                let mut witness = vec![("a".to_string(), a), ("b".to_string(), b)];
                witness.extend(bad.iter().enumerate().map(|(i, &x)| (format!("x{}", i + 1), x)));
                return Ok(CheckResult::fail(witness));
            }
        }
    }
    Ok(CheckResult::pass())
}

fn extend_tuple(
    l: &LoopTable,
    alphabet: &[Element],
    n: usize,
    tuple: &mut Vec<Element>,
    ranges: &mut [Vec<Element>],
) -> Option<Vec<Element>> {
    let k = tuple.len();
    if k == n {
        return None;
    }
    for &x in alphabet {
        tuple.push(x);
        ranges[k][k] = x;
        let mut ok = true;
        'ranges: for i in (0..k).rev() {
            // every split of i..=k must agree
            let v = l.mul(ranges[i][i], ranges[i + 1][k]);
            for split in i + 1..k {
                if l.mul(ranges[i][split], ranges[split + 1][k]) != v {
                    ok = false;
                    break 'ranges;
                }
            }
            ranges[i][k] = v;
        }
        if !ok {
            // pad the failing prefix with identities up to length n
            let mut bad = tuple.clone();
            bad.resize(n, l.identity());
            return Some(bad);
        }
        if let Some(bad) = extend_tuple(l, alphabet, n, tuple, ranges) {
            return Some(bad);
        }
        tuple.pop();
    }
    None
}

fn first_nonassociative_triple(l: &LoopTable, members: &[Element]) -> Option<(Element, Element, Element)> {
    for &x in members {
        for &y in members {
            let xy = l.mul(x, y);
            for &z in members {
                if l.mul(xy, z) != l.mul(x, l.mul(y, z)) {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

fn generated_groups_check(l: &LoopTable, gen_sets: impl Iterator<Item = Vec<Element>>) -> CheckResult {
    let mut checked: HashSet<Vec<bool>> = HashSet::new();
    for gens in gen_sets {
        let mask = closure_mask(l, gens.iter().copied());
        if !checked.insert(mask.clone()) {
            continue;
        }
        let members = mask_members(&mask);
        if let Some((x, y, z)) = first_nonassociative_triple(l, &members) {
            let mut witness: Vec<(String, Element)> = gens
                .iter()
                .enumerate()
                .map(|(i, &g)| (format!("g{}", i + 1), g))
                .collect();
            witness.extend([("x".into(), x), ("y".into(), y), ("z".into(), z)]);
            return CheckResult::fail(witness);
        }
    }
    CheckResult::pass()
}

/// Every single element generates a group.
pub fn is_power_associative(l: &LoopTable) -> CheckResult {
    generated_groups_check(l, l.elements().map(|x| vec![x]))
}

/// Every pair of elements generates a group.
pub fn is_diassociative(l: &LoopTable) -> CheckResult {
    let n = l.order();
    generated_groups_check(
        l,
        (0..n).flat_map(move |x| (x..n).map(move |y| vec![x, y])),
    )
}

fn strongly_associates(l: &LoopTable, set: &[Element]) -> bool {
    set.iter().all(|&u| {
        set.iter().all(|&v| {
            let uv = l.mul(u, v);
            set.iter().all(|&w| l.mul(uv, w) == l.mul(u, l.mul(v, w)))
        })
    })
}

fn sa_set(l: &LoopTable, x: Element, y: Element, z: Element) -> Result<Vec<Element>, LoopError> {
    let mut set = vec![x, y, z, l.inverse(x)?, l.inverse(y)?, l.inverse(z)?];
    set.sort_unstable();
    set.dedup();
    Ok(set)
}

/// `SA(x, y, z)`: `A(u, v, w)` for all `u, v, w` among `x, y, z` and their inverses.
pub fn sa(l: &LoopTable, x: Element, y: Element, z: Element) -> Result<bool, LoopError> {
    Ok(strongly_associates(l, &sa_set(l, x, y, z)?))
}

/// The stepping-up implication `SA(x, y, z) -> SA(x, y, yz)`, checked on
/// alternative flexible IP loops.
pub fn stepping_up_check(l: &LoopTable) -> CheckResult {
    for name in ["FLEX", "LALT", "RALT", "LIP", "RIP", "AAIP"] {
        let r = eval_identity(l, lookup(name).expect("catalog")).expect("catalog identities are cheap");
        if !r.holds {
            return CheckResult {
                holds: false,
                witness: r.witness,
                detail: Some(format!("not in quasivariety domain: {name} fails")),
            };
        }
    }
    for x in l.elements() {
        for y in l.elements() {
            for z in l.elements() {
                let before = sa(l, x, y, z).expect("IP loops have inverses");
                if before && !sa(l, x, y, l.mul(y, z)).expect("IP loops have inverses") {
                    return CheckResult::fail(vec![("x".into(), x), ("y".into(), y), ("z".into(), z)]);
                }
            }
        }
    }
    CheckResult::pass()
}
