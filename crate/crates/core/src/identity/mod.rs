//! Identity DSL, evaluator and the catalog of named loop identities.

mod eval;
mod term;

use std::sync::LazyLock;

use indexmap::IndexMap;

pub use eval::{
    eval_compiled, eval_identity, eval_identity_with, CheckResult, Compiled, EvalError, EvalOptions, Op,
    Operations,
};
pub use term::{parse_identity, parse_term, Identity, SyntaxError, Term};

use crate::table::LoopTable;

/// Named identities, in report order. `TWOSIDED-INV` comes first so that the
/// inverse-dependent entries can be read against it.
const CATALOG_SOURCE: &[(&str, &str)] = &[
    ("TWOSIDED-INV", "1 / x = x \\ 1"),
    ("FLEX", "x*(y*x) = (x*y)*x"),
    ("LALT", "x*(x*y) = (x*x)*y"),
    ("RALT", "(x*y)*y = x*(y*y)"),
    ("LIP", "x \\ y = x^-1 * y"),
    ("RIP", "x / y = x * y^-1"),
    ("AAIP", "(x*y)^-1 = y^-1 * x^-1"),
    ("M1", "(x*(y*z))*x = (x*y)*(z*x)"),
    ("M2", "x*((y*z)*x) = (x*y)*(z*x)"),
    ("N1", "((x*y)*z)*y = x*(y*(z*y))"),
    ("N2", "x*(y*(x*z)) = ((x*y)*x)*z"),
    ("LBOL", "x*(y*(x*z)) = (x*(y*x))*z"),
    ("RBOL", "((x*y)*z)*y = x*((y*z)*y)"),
    ("MBOL", "x*((y*z) \\ x) = (x / z)*(y \\ x)"),
    // R(xyx)R(y) = R(x)R(yxy) applied to z, maps acting on the right
    ("ARIF-R", "(z*((x*y)*x))*y = (z*x)*((y*x)*y)"),
    ("ARIF-L", "y*((x*(y*x))*z) = (y*(x*y))*(x*z)"),
    // flexibility of every isotope x o y = (x/u)(v\y)
    ("EQ-UFLEX", "(x/u)*(v \\ ((y/u)*(v \\ x))) = (((x/u)*(v \\ y))/u)*(v \\ x)"),
    // flexibility of every left isotope x o y = (x/u) y
    ("EQ-LSUF", "(x/u)*((y/u)*x) = (((x/u)*y)/u)*x"),
    // flexibility of every right isotope x o y = x (v\y)
    ("EQ-RSUF", "x*(v \\ (y*(v \\ x))) = (x*(v \\ y))*(v \\ x)"),
    ("EQ-LSUF3", "(x*(y*u)) / u = (x*(y*(x*u))) / (x*u)"),
    ("EQ-IPHFLEX1", "x*(v*(y*(v*x))) = (x*(v*y))*(v*x)"),
    ("EQ-IPHFLEX2", "(x*u)*((y*u)*x) = (((x*u)*y)*u)*x"),
    ("EQ-IPUFLEX", "(x*u)*(v*((y*u)*(v*x))) = (((x*u)*(v*y))*u)*(v*x)"),
    ("EQ-IPUFLEX2", "u*((v*x)*((y*(x*u))*v)) = ((u*((v*x)*y))*(x*u))*v"),
    ("SAIP", "((x*y)*x)^-1 = (x^-1 * y^-1) * x^-1"),
    ("COMM", "x*y = y*x"),
    ("ASSOC", "x*(y*z) = (x*y)*z"),
];

/// Predicates defined from catalog entries.
pub const DERIVED: &[&str] = &["IP", "ALT", "MOUFANG"];

static CATALOG: LazyLock<Vec<(String, Identity)>> = LazyLock::new(|| {
    CATALOG_SOURCE
        .iter()
        .map(|(name, text)| {
            let id = parse_identity(text).unwrap_or_else(|e| panic!("catalog entry {name}: {e}"));
            (name.to_string(), id)
        })
        .collect()
});

/// Every named identity, in stable order.
pub fn catalog() -> &'static [(String, Identity)] {
    &CATALOG
}

pub fn lookup(name: &str) -> Option<&'static Identity> {
    CATALOG.iter().find(|(n, _)| n == name).map(|(_, id)| id)
}

/// Resolves a catalog name, or parses `text` as an identity when it contains `=`.
pub fn resolve(text: &str) -> Option<Identity> {
    if let Some(id) = lookup(text) {
        return Some(id.clone());
    }
    if text.contains('=') {
        return parse_identity(text).ok();
    }
    None
}

/// Verdicts for every catalog identity plus the derived predicates.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct PropertyReport {
    pub entries: IndexMap<String, CheckResult>,
}

impl PropertyReport {
    pub fn get(&self, name: &str) -> &CheckResult {
        self.entries
            .get(name)
            .unwrap_or_else(|| panic!("no property named {name}"))
    }

    pub fn holds(&self, name: &str) -> bool {
        self.get(name).holds
    }
}

fn conjunction(report: &IndexMap<String, CheckResult>, parts: &[&str]) -> CheckResult {
    for part in parts {
        let r = &report[*part];
        if !r.holds {
            let mut out = r.clone();
            out.detail = Some(match &r.detail {
                Some(d) => format!("{part} fails: {d}"),
                None => format!("{part} fails"),
            });
            return out;
        }
    }
    CheckResult::pass()
}

/// Evaluates the whole catalog on `l`. Catalog identities have at most four
/// variables, so the cost guard never trips.
pub fn property_report(l: &LoopTable) -> PropertyReport {
    let mut entries = IndexMap::new();
    for (name, id) in catalog() {
        let r = eval_identity(l, id).expect("catalog identities stay under the cost guard");
        entries.insert(name.clone(), r);
    }
    let ip = conjunction(&entries, &["LIP", "RIP", "AAIP"]);
    let alt = conjunction(&entries, &["LALT", "RALT"]);
    let moufang_parts = ["M1", "M2", "N1", "N2"];
    let verdicts: Vec<bool> = moufang_parts.iter().map(|p| entries[*p].holds).collect();
    let mut moufang = if verdicts.iter().any(|&v| v) {
        CheckResult::pass()
    } else {
        entries["M1"].clone()
    };
    if verdicts.iter().any(|&v| v != verdicts[0]) {
        moufang.detail = Some(format!(
            "M1/M2/N1/N2 verdicts disagree: {}",
            moufang_parts
                .iter()
                .zip(&verdicts)
                .map(|(p, v)| format!("{p}={v}"))
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    entries.insert("IP".into(), ip);
    entries.insert("ALT".into(), alt);
    entries.insert("MOUFANG".into(), moufang);
    PropertyReport { entries }
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn catalog_parses_and_has_stable_names() {
        let names: Vec<&str> = catalog().iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names[0], "TWOSIDED-INV");
        for required in ["M1", "EQ-UFLEX", "SAIP", "MBOL", "ARIF-R", "EQ-LSUF3", "EQ-IPUFLEX2"] {
            assert!(names.contains(&required), "{required}");
        }
        let m1 = lookup("M1").unwrap();
        let x = || Term::var("x");
        let expected = Identity::new(
            Term::mul(Term::mul(x(), Term::mul(Term::var("y"), Term::var("z"))), x()),
            Term::mul(Term::mul(x(), Term::var("y")), Term::mul(Term::var("z"), x())),
        );
        assert_eq!(*m1, expected);
        assert_eq!(lookup("EQ-UFLEX").unwrap().variables, vec!["x", "u", "v", "y"]);
        assert!(lookup("SAIP").unwrap().mentions_inverse());
    }

    #[test]
    fn arif_sides_are_mirrors() {
        let mirrored = |a: &str, b: &str| lookup(a).unwrap().mirror().canonical() == lookup(b).unwrap().canonical();
        assert!(mirrored("ARIF-R", "ARIF-L"));
        assert!(mirrored("LBOL", "RBOL"));
        assert!(mirrored("LALT", "RALT"));
        assert!(mirrored("LIP", "RIP"));
    }

    #[test]
    fn table1_report() {
        let r = property_report(&table1());
        assert!(r.holds("LIP"));
        assert!(r.holds("LALT"));
        assert!(r.holds("FLEX"));
        assert!(r.holds("EQ-LSUF"));
        assert!(!r.holds("EQ-RSUF"));
        assert!(!r.holds("ASSOC"));
    }

    #[test]
    fn trivial_loop_satisfies_everything() {
        let r = property_report(&LoopTable::trivial());
        for (name, res) in &r.entries {
            assert!(res.holds, "{name}");
            assert!(res.detail.is_none(), "{name}");
        }
    }

    #[test]
    fn group_report() {
        let r = property_report(&LoopTable::cyclic(4));
        assert!(r.entries.values().all(|c| c.holds));
    }

    #[test]
    fn resolve_accepts_names_and_text() {
        assert_eq!(resolve("FLEX").unwrap(), *lookup("FLEX").unwrap());
        assert_eq!(resolve("x = x").unwrap().arity(), 1);
        assert!(resolve("NOPE").is_none());
    }
}
