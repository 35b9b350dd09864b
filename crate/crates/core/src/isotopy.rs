//! Principal isotopes and universal / semi-universal properties.
//!
//! The principal isotope with parameters `(a, b)` multiplies by
//! `x o y = (x / a)(b \ y)` and has identity `b a`. Left isotopes fix `b = 1`
//! (so `x o y = (x / a) y`), right isotopes fix `a = 1` (`x o y = x (b \ y)`).

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::identity::{eval_compiled, CheckResult, Compiled, EvalError, EvalOptions, Identity, Term};
use crate::structure::{are_isomorphic, IsoInvariant};
use crate::table::{Element, LoopTable};

/// Parameters of a principal isotope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IsotopeSpec {
    pub a: Element,
    pub b: Element,
}

impl IsotopeSpec {
    pub fn new(a: Element, b: Element) -> Self {
        IsotopeSpec { a, b }
    }
}

/// Which isotopes a semi-universal check ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// `b = 1`, `a` ranges over the loop.
    Left,
    /// `a = 1`, `b` ranges over the loop.
    Right,
    Both,
}

impl std::str::FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(Side::Left),
            "right" => Ok(Side::Right),
            "both" => Ok(Side::Both),
            other => Err(format!("unknown side {other:?}; expected left, right or both")),
        }
    }
}

/// The isotope table in the parent's labels; its identity is `b a`.
pub fn raw_isotope(l: &LoopTable, s: IsotopeSpec) -> LoopTable {
    LoopTable::from_fn(l.order(), |x, y| l.mul(l.rdiv(x, s.a), l.ldiv(s.b, y)))
        .expect("principal isotopes are loops")
}

/// A principal isotope relabeled so that its identity is 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isotope {
    pub spec: IsotopeSpec,
    pub table: LoopTable,
    /// `relabel[original] = new`; an involution.
    pub relabel: Vec<Element>,
}

impl Isotope {
    pub fn to_original(&self, e: Element) -> Element {
        self.relabel[e]
    }

    pub fn from_original(&self, e: Element) -> Element {
        self.relabel[e]
    }
}

pub fn principal_isotope(l: &LoopTable, s: IsotopeSpec) -> Isotope {
    let raw = raw_isotope(l, s);
    debug_assert_eq!(raw.identity(), l.mul(s.b, s.a));
    let (table, relabel) = raw.renormalized();
    Isotope {
        spec: s,
        table,
        relabel,
    }
}

/// Outcome of checking an identity across a family of isotopes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniversalCheckResult {
    pub holds: bool,
    pub failing_isotope: Option<IsotopeSpec>,
    /// Witness inside the failing isotope, in the parent's labels.
    pub inner: Option<CheckResult>,
}

impl UniversalCheckResult {
    fn pass() -> Self {
        UniversalCheckResult {
            holds: true,
            failing_isotope: None,
            inner: None,
        }
    }
}

/// All isotope parameters in row-major `(a, b)` order restricted to `side`.
pub fn isotope_specs(l: &LoopTable, side: Option<Side>) -> Vec<IsotopeSpec> {
    let e = l.identity();
    let mut out = Vec::new();
    for a in l.elements() {
        for b in l.elements() {
            let keep = match side {
                None => true,
                Some(Side::Left) => b == e,
                Some(Side::Right) => a == e,
                Some(Side::Both) => a == e || b == e,
            };
            if keep {
                out.push(IsotopeSpec { a, b });
            }
        }
    }
    out
}

/// Checks `compiled` on each isotope in `specs`; the first failure in list
/// order is reported.
pub fn check_isotopes(
    l: &LoopTable,
    compiled: &Compiled,
    specs: &[IsotopeSpec],
    opts: EvalOptions,
) -> Result<UniversalCheckResult, EvalError> {
    let found = specs
        .par_iter()
        .map(|&s| {
            let iso = raw_isotope(l, s);
            eval_compiled(&iso, compiled, opts).map(|r| (s, r))
        })
        .find_map_first(|res| match res {
            Ok((_, r)) if r.holds => None,
            other => Some(other),
        });
    match found {
        None => Ok(UniversalCheckResult::pass()),
        Some(Err(e)) => Err(e),
        Some(Ok((s, inner))) => Ok(UniversalCheckResult {
            holds: false,
            failing_isotope: Some(s),
            inner: Some(inner),
        }),
    }
}

/// Does `id` hold in every principal isotope?
pub fn universal_check(l: &LoopTable, id: &Identity) -> Result<UniversalCheckResult, EvalError> {
    check_isotopes(l, &Compiled::new(id), &isotope_specs(l, None), EvalOptions::default())
}

/// Does `id` hold in every left / right isotope?
pub fn semi_universal_check(
    l: &LoopTable,
    id: &Identity,
    side: Side,
) -> Result<UniversalCheckResult, EvalError> {
    check_isotopes(l, &Compiled::new(id), &isotope_specs(l, Some(side)), EvalOptions::default())
}

fn fresh_name(taken: &[String], base: &str) -> String {
    std::iter::once(base.to_string())
        .chain((1..).map(|i| format!("{base}{i}")))
        .find(|c| !taken.contains(c))
        .expect("unbounded supply of names")
}

/// Rewrites `id` into an identity of the base loop stating that `id` holds in
/// the isotope `x o y = (x / u)(v \ y)`, with `u` and `v` as fresh variables.
/// `Left` fixes `v = 1`, `Right` fixes `u = 1`; `None` and `Both` keep both.
///
/// Identities using `^-1` have no such translation, since inverses in the
/// isotope may be undefined where the base loop's are not.
pub fn isotope_identity(id: &Identity, side: Option<Side>) -> Option<Identity> {
    if id.mentions_inverse() {
        return None;
    }
    let u_name = fresh_name(&id.variables, "u");
    let v_name = fresh_name(&id.variables, "v");
    let u = match side {
        Some(Side::Right) => None,
        _ => Some(Term::var(&u_name)),
    };
    let v = match side {
        Some(Side::Left) => None,
        _ => Some(Term::var(&v_name)),
    };
    let over_u = |t: Term| match &u {
        Some(u) => Term::rdiv(t, u.clone()),
        None => t,
    };
    let under_v = |t: Term| match &v {
        Some(v) => Term::ldiv(v.clone(), t),
        None => t,
    };
    let times_u = |t: Term| match &u {
        Some(u) => Term::mul(t, u.clone()),
        None => t,
    };
    let v_times = |t: Term| match &v {
        Some(v) => Term::mul(v.clone(), t),
        None => t,
    };
    // the isotope's identity is v u
    let one = match (&u, &v) {
        (Some(u), Some(v)) => Term::mul(v.clone(), u.clone()),
        (Some(w), None) | (None, Some(w)) => w.clone(),
        (None, None) => Term::One,
    };
    fn translate(
        t: &Term,
        one: &Term,
        over_u: &dyn Fn(Term) -> Term,
        under_v: &dyn Fn(Term) -> Term,
        times_u: &dyn Fn(Term) -> Term,
        v_times: &dyn Fn(Term) -> Term,
    ) -> Term {
        let tr = |s: &Term| translate(s, one, over_u, under_v, times_u, v_times);
        match t {
            Term::Var(_) => t.clone(),
            Term::One => one.clone(),
            Term::Mul(a, b) => Term::mul(over_u(tr(a)), under_v(tr(b))),
            // a o z = b  <=>  z = v ((a / u) \ b)
            Term::LDiv(a, b) => v_times(Term::ldiv(over_u(tr(a)), tr(b))),
            // z o b = a  <=>  z = (a / (v \ b)) u
            Term::RDiv(a, b) => times_u(Term::rdiv(tr(a), under_v(tr(b)))),
            Term::Inv(_) => unreachable!("inverse-free"),
        }
    }
    let tr = |t: &Term| translate(t, &one, &over_u, &under_v, &times_u, &v_times);
    Some(Identity::new(tr(&id.lhs), tr(&id.rhs)))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IsotopyError {
    #[error("order {order} exceeds the isotope-classification limit {limit}; use force")]
    ResourceLimit { order: usize, limit: usize },
}

pub const CLASSES_MAX_ORDER: usize = 64;

/// One isomorphism class of principal isotopes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotopeClass {
    /// Lexicographically least renormalized isotope table in the class.
    pub representative: LoopTable,
    pub multiplicity: usize,
    pub members: Vec<IsotopeSpec>,
}

/// Partitions all principal isotopes of `l` into isomorphism classes.
pub fn isotope_classes(l: &LoopTable, force: bool) -> Result<Vec<IsotopeClass>, IsotopyError> {
    if l.order() > CLASSES_MAX_ORDER && !force {
        return Err(IsotopyError::ResourceLimit {
            order: l.order(),
            limit: CLASSES_MAX_ORDER,
        });
    }
    let tables: Vec<(IsotopeSpec, LoopTable)> = isotope_specs(l, None)
        .into_par_iter()
        .map(|s| (s, principal_isotope(l, s).table))
        .collect();

    struct Class {
        rep: LoopTable,
        invariant: IsoInvariant,
        members: Vec<IsotopeSpec>,
    }
    let mut classes: Vec<Class> = Vec::new();
    let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
    for (s, t) in tables {
        if let Some(&idx) = seen.get(t.cells()) {
            classes[idx].members.push(s);
            continue;
        }
        let inv = IsoInvariant::of(&t);
        let idx = classes
            .iter()
            .position(|c| c.invariant == inv && are_isomorphic(&c.rep, &t).is_some());
        let idx = match idx {
            Some(i) => {
                if t.cells() < classes[i].rep.cells() {
                    classes[i].rep = t.clone();
                }
                classes[i].members.push(s);
                i
            }
            None => {
                classes.push(Class {
                    rep: t.clone(),
                    invariant: inv,
                    members: vec![s],
                });
                classes.len() - 1
            }
        };
        seen.insert(t.cells().to_vec(), idx);
    }
    Ok(classes
        .into_iter()
        .map(|c| IsotopeClass {
            representative: c.rep,
            multiplicity: c.members.len(),
            members: c.members,
        })
        .collect())
}

/// Is every map `y -> x \ (y x)` an automorphism?
pub fn rl_automorphism_check(l: &LoopTable) -> CheckResult {
    for x in l.elements() {
        let phi: Vec<Element> = l.elements().map(|y| l.ldiv(x, l.mul(y, x))).collect();
        for y in l.elements() {
            for z in l.elements() {
                if phi[l.mul(y, z)] != l.mul(phi[y], phi[z]) {
                    return CheckResult::fail(vec![("x".into(), x), ("y".into(), y), ("z".into(), z)]);
                }
            }
        }
    }
    CheckResult::pass()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity::lookup;

    fn table1() -> LoopTable {
        LoopTable::from_rows(&[
            [0, 1, 2, 3, 4, 5],
            [1, 0, 3, 2, 5, 4],
            [2, 5, 0, 4, 3, 1],
            [3, 4, 5, 0, 1, 2],
            [4, 2, 1, 5, 0, 3],
            [5, 3, 4, 1, 2, 0],
        ])
        .unwrap()
    }

    #[test]
    fn trivial_parameters_give_the_same_loop() {
        let l = table1();
        let iso = principal_isotope(&l, IsotopeSpec::new(0, 0));
        assert_eq!(iso.table, l);
    }

    #[test]
    fn isotope_identity_is_ba() {
        let l = table1();
        for a in l.elements() {
            for b in l.elements() {
                let raw = raw_isotope(&l, IsotopeSpec::new(a, b));
                assert_eq!(raw.identity(), l.mul(b, a));
                let iso = principal_isotope(&l, IsotopeSpec::new(a, b));
                assert_eq!(iso.table.identity(), 0);
                assert_eq!(iso.to_original(0), l.mul(b, a));
            }
        }
    }

    #[test]
    fn table1_semi_universal_flexibility() {
        let l = table1();
        let flex = lookup("FLEX").unwrap();
        assert!(semi_universal_check(&l, flex, Side::Left).unwrap().holds);
        let right = semi_universal_check(&l, flex, Side::Right).unwrap();
        assert!(!right.holds);
        assert_eq!(right.failing_isotope.unwrap().a, 0);
        assert!(!semi_universal_check(&l, flex, Side::Both).unwrap().holds);
    }

    #[test]
    fn groups_are_universally_associative() {
        let k = LoopTable::direct_product(&LoopTable::cyclic(2), &LoopTable::cyclic(3));
        let r = universal_check(&k, lookup("ASSOC").unwrap()).unwrap();
        assert!(r.holds);
        assert_eq!(isotope_classes(&LoopTable::cyclic(4), false).unwrap().len(), 1);
    }

    #[test]
    fn trivial_loop_semi_universal() {
        let t = LoopTable::trivial();
        assert!(semi_universal_check(&t, lookup("FLEX").unwrap(), Side::Left).unwrap().holds);
    }

    #[test]
    fn classification_guard() {
        let big = LoopTable::cyclic(65);
        assert!(matches!(
            isotope_classes(&big, false),
            Err(IsotopyError::ResourceLimit { order: 65, .. })
        ));
    }

    #[test]
    fn rl_automorphisms() {
        assert!(rl_automorphism_check(&table1()).holds);
        assert!(rl_automorphism_check(&LoopTable::cyclic(7)).holds);
    }

    #[test]
    fn translated_flexibility_matches_catalog() {
        let flex = lookup("FLEX").unwrap();
        assert_eq!(isotope_identity(flex, None).unwrap(), *lookup("EQ-UFLEX").unwrap());
        assert_eq!(isotope_identity(flex, Some(Side::Left)).unwrap(), *lookup("EQ-LSUF").unwrap());
        assert_eq!(isotope_identity(flex, Some(Side::Right)).unwrap(), *lookup("EQ-RSUF").unwrap());
        assert!(isotope_identity(lookup("AAIP").unwrap(), None).is_none());
    }

    #[test]
    fn translation_agrees_with_isotope_sweep() {
        let l = table1();
        for name in ["LALT", "RALT", "COMM", "LBOL", "MBOL", "ASSOC"] {
            let id = lookup(name).unwrap();
            for side in [None, Some(Side::Left), Some(Side::Right)] {
                let swept = check_isotopes(&l, &Compiled::new(id), &isotope_specs(&l, side), EvalOptions::default())
                    .unwrap()
                    .holds;
                let tr = isotope_identity(id, side).unwrap();
                let direct = crate::identity::eval_identity(&l, &tr).unwrap().holds;
                assert_eq!(swept, direct, "{name} {side:?}");
            }
        }
    }

    #[test]
    fn fresh_names_avoid_clashes() {
        let id = crate::identity::parse_identity("u*v = v*u").unwrap();
        let t = isotope_identity(&id, None).unwrap();
        assert_eq!(t.arity(), 4);
    }
}
