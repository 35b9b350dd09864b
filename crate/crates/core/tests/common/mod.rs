#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use loopkit::io::{load_table, TableFile};
use loopkit::search::{search_loops, IsomorphMode, SearchSpec};
use loopkit::table::LoopTable;

pub fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> TableFile {
    load_table(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// All loops of one order up to isomorphism, from an unconstrained search.
pub fn loops_of_order(n: usize) -> Vec<LoopTable> {
    let out = search_loops(&SearchSpec::new(n).mode(IsomorphMode::CanonicalExtension)).unwrap();
    assert!(out.exhausted);
    out.models
}

/// Every loop of order at most 6 up to isomorphism (1 + 1 + 1 + 2 + 6 + 109).
pub fn corpus() -> &'static [LoopTable] {
    static CORPUS: OnceLock<Vec<LoopTable>> = OnceLock::new();
    CORPUS.get_or_init(|| (1..=6).flat_map(loops_of_order).collect())
}

/// Left Bol loops of order at most 8, up to isomorphism.
pub fn left_bol_corpus() -> Vec<LoopTable> {
    (1..=8)
        .flat_map(|n| {
            let spec = SearchSpec::new(n).require("LBOL").mode(IsomorphMode::CanonicalExtension);
            let out = search_loops(&spec).unwrap();
            assert!(out.exhausted);
            out.models
        })
        .collect()
}

/// Naive generate-and-filter enumeration, independent of the search engine:
/// every square whose first row and column are `0..n`, built row by row from
/// all permutations and filtered for Latin columns.
pub mod naive {
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    /// All normalized Latin squares of order `n`, as row-major cells.
    pub fn normalized_latin_squares(n: usize) -> Vec<Vec<usize>> {
        let perms = permutations(n);
        let mut out = Vec::new();
        let mut rows: Vec<Vec<usize>> = vec![(0..n).collect()];
        extend(n, &perms, &mut rows, &mut out);
        out
    }

    fn extend(n: usize, perms: &[Vec<usize>], rows: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<usize>>) {
        let r = rows.len();
        if r == n {
            out.push(rows.concat());
            return;
        }
        for p in perms {
            if p[0] != r {
                continue;
            }
            if rows.iter().all(|row| row.iter().zip(p).all(|(a, b)| a != b)) {
                rows.push(p.clone());
                extend(n, perms, rows, out);
                rows.pop();
            }
        }
    }

    /// Least relabeling over all `n!` bijections, renormalized so that the
    /// identity is 0 (every table here already has identity 0, so this is the
    /// minimum over bijections fixing 0).
    pub fn canonical_form(n: usize, cells: &[usize]) -> Vec<usize> {
        let mut best: Option<Vec<usize>> = None;
        for p in permutations(n) {
            if p[0] != 0 {
                continue;
            }
            // relabeled(p[x], p[y]) = p[cells(x, y)]
            let mut t = vec![0; n * n];
            for x in 0..n {
                for y in 0..n {
                    t[p[x] * n + p[y]] = p[cells[x * n + y]];
                }
            }
            if best.as_ref().is_none_or(|b| t < *b) {
                best = Some(t);
            }
        }
        best.expect("at least one permutation")
    }

    /// Number of isomorphism classes of loops of order `n`.
    pub fn loop_classes(n: usize) -> usize {
        let mut forms: Vec<Vec<usize>> = normalized_latin_squares(n)
            .iter()
            .map(|c| canonical_form(n, c))
            .collect();
        forms.sort();
        forms.dedup();
        forms.len()
    }
}
