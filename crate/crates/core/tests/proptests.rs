mod common;

use common::corpus;
use loopkit::io::{parse_table, ReportDocument, TableFile};
use loopkit::isotopy::{isotope_identity, principal_isotope, IsotopeSpec};
use loopkit::structure::are_isomorphic;
use loopkit::{catalog, eval_identity, parse_identity, LoopTable};
use proptest::prelude::*;
use proptest::sample::{select, Index};

fn corpus_loop() -> impl Strategy<Value = LoopTable> {
    select(corpus().to_vec())
}

/// A loop together with a random relabeling of its elements.
fn relabeled() -> impl Strategy<Value = (LoopTable, Vec<usize>)> {
    corpus_loop().prop_flat_map(|l| {
        let n = l.order();
        (Just(l), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn divisions_invert_multiplication(l in corpus_loop(), i in any::<Index>(), j in any::<Index>()) {
        let (x, y) = (i.index(l.order()), j.index(l.order()));
        prop_assert_eq!(l.mul(x, l.ldiv(x, y)), y);
        prop_assert_eq!(l.ldiv(x, l.mul(x, y)), y);
        prop_assert_eq!(l.mul(l.rdiv(y, x), x), y);
        prop_assert_eq!(l.rdiv(l.mul(y, x), x), y);
    }

    #[test]
    fn text_round_trip_with_any_base((l, perm) in relabeled(), base in 0usize..1000) {
        let f = TableFile { name: Some("t".into()), base, table: l.relabel(&perm) };
        prop_assert_eq!(parse_table(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn report_verdicts_survive_relabeling((l, perm) in relabeled()) {
        let verdicts = |t: &LoopTable| -> Vec<(String, bool)> {
            ReportDocument::build(&TableFile::new(t.clone()), false)
                .properties
                .into_iter()
                .map(|e| (e.property, e.holds))
                .collect()
        };
        prop_assert_eq!(verdicts(&l), verdicts(&l.relabel(&perm)));
    }

    #[test]
    fn isomorphism_maps_are_homomorphisms((l, perm) in relabeled()) {
        let m = l.relabel(&perm);
        let map = are_isomorphic(&l, &m).expect("relabeling is an isomorphism");
        for x in l.elements() {
            for y in l.elements() {
                prop_assert_eq!(map[l.mul(x, y)], m.mul(map[x], map[y]));
            }
        }
    }

    #[test]
    fn identities_print_and_reparse(i in any::<Index>()) {
        let (_, id) = &catalog()[i.index(catalog().len())];
        prop_assert_eq!(&parse_identity(&id.to_string()).unwrap(), id);
    }

    /// The translated identity holds in `L` exactly when the original holds
    /// in every principal isotope, computed by building each isotope.
    #[test]
    fn translated_identity_matches_isotope_sweep(l in corpus_loop(), i in any::<Index>()) {
        let inverse_free: Vec<_> = catalog().iter().filter(|(_, id)| !id.mentions_inverse()).collect();
        let (name, id) = inverse_free[i.index(inverse_free.len())];
        let translated = isotope_identity(id, None).unwrap();
        let sweep = l.elements().all(|a| {
            l.elements().all(|b| eval_identity(&principal_isotope(&l, IsotopeSpec::new(a, b)).table, id).unwrap().holds)
        });
        prop_assert_eq!(eval_identity(&l, &translated).unwrap().holds, sweep, "{}", name);
    }
}
