//! Exhaustive, property-pruned search for loops of a fixed order.

mod engine;

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::identity::Compiled;
use crate::property::{Property, PropertyError};
use crate::structure::{are_isomorphic, IsoInvariant};
use crate::table::LoopTable;

use engine::{Board, Engine, Rules, Shared};

/// Largest order the bitset search supports.
pub const MAX_ORDER: usize = 64;
/// Largest order for which canonical-extension mode enumerates relabelings.
pub const MAX_CANONICAL_ORDER: usize = 10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsomorphMode {
    /// Every table with identity 0 is reported.
    None,
    /// Tables are reported once per isomorphism class, first found kept.
    #[default]
    PostDedup,
    /// Only the lexicographically least table of each class is generated.
    CanonicalExtension,
}

impl std::str::FromStr for IsomorphMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(IsomorphMode::None),
            "post-dedup" => Ok(IsomorphMode::PostDedup),
            "canonical-extension" => Ok(IsomorphMode::CanonicalExtension),
            other => Err(format!(
                "unknown isomorph mode {other:?}; expected none, post-dedup or canonical-extension"
            )),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limits {
    /// Maximum number of cell assignments.
    pub nodes: Option<u64>,
    /// Wall-clock budget in seconds.
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    pub order: usize,
    #[serde(default)]
    pub required: Vec<String>,
    #[serde(default)]
    pub forbidden: Vec<String>,
    #[serde(default)]
    pub limits: Limits,
    #[serde(default)]
    pub isomorph_mode: IsomorphMode,
    /// Reserved for randomized value ordering; exhaustive runs ignore it.
    #[serde(default)]
    pub seed: u64,
}

impl SearchSpec {
    pub fn new(order: usize) -> Self {
        SearchSpec {
            order,
            required: Vec::new(),
            forbidden: Vec::new(),
            limits: Limits::default(),
            isomorph_mode: IsomorphMode::default(),
            seed: 0,
        }
    }

    pub fn require(mut self, p: &str) -> Self {
        self.required.push(p.to_string());
        self
    }

    pub fn forbid(mut self, p: &str) -> Self {
        self.forbidden.push(p.to_string());
        self
    }

    pub fn mode(mut self, m: IsomorphMode) -> Self {
        self.isomorph_mode = m;
        self
    }

    pub fn node_budget(mut self, nodes: u64) -> Self {
        self.limits.nodes = Some(nodes);
        self
    }

    pub fn time_budget(mut self, seconds: f64) -> Self {
        self.limits.seconds = Some(seconds);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    #[serde(skip)]
    pub models: Vec<LoopTable>,
    /// True iff the whole space was explored.
    pub exhausted: bool,
    /// Cell assignments made.
    pub nodes: u64,
    /// Complete tables that reached the final verification.
    pub candidates: u64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("invalid search spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error("budget exhausted after {nodes} nodes")]
    BudgetExhausted { nodes: u64 },
}

struct Plan {
    n: usize,
    required: Vec<Property>,
    forbidden: Vec<Property>,
    mode: IsomorphMode,
    rules: Rules,
    node_limit: Option<u64>,
    time_limit: Option<Duration>,
}

fn plan(spec: &SearchSpec) -> Result<Plan, SearchError> {
    let n = spec.order;
    if n == 0 || n > MAX_ORDER {
        return Err(SearchError::InvalidSpec(format!("order must be in 1..={MAX_ORDER}, got {n}")));
    }
    if spec.isomorph_mode == IsomorphMode::CanonicalExtension && n > MAX_CANONICAL_ORDER {
        return Err(SearchError::InvalidSpec(format!(
            "canonical-extension supports order at most {MAX_CANONICAL_ORDER}"
        )));
    }
    if let Some(both) = spec.required.iter().find(|r| spec.forbidden.contains(r)) {
        return Err(SearchError::InvalidSpec(format!("{both} is both required and forbidden")));
    }
    if let Some(s) = spec.limits.seconds {
        if !(s.is_finite() && s >= 0.0) {
            return Err(SearchError::InvalidSpec(format!("bad time budget {s}")));
        }
    }
    let parse = |names: &[String]| names.iter().map(|s| s.parse::<Property>()).collect::<Result<Vec<_>, _>>();
    let required = parse(&spec.required)?;
    let forbidden = parse(&spec.forbidden)?;
    let mut constraints: Vec<Compiled> = Vec::new();
    for p in &required {
        for (_, id) in p.equations().unwrap_or_default() {
            let c = Compiled::new(&id);
            if !constraints.contains(&c) {
                constraints.push(c);
            }
        }
    }
    Ok(Plan {
        n,
        required,
        forbidden,
        mode: spec.isomorph_mode,
        rules: Rules::new(n, constraints, spec.isomorph_mode == IsomorphMode::CanonicalExtension),
        node_limit: spec.limits.nodes,
        time_limit: spec.limits.seconds.map(Duration::from_secs_f64),
    })
}

impl Plan {
    /// Final verification of a complete table against the full property
    /// checkers, independently of the pruning.
    fn accepts(&self, board: &Board) -> Option<LoopTable> {
        let n = self.n;
        let l = LoopTable::from_fn(n, |i, j| board.cells[i * n + j] as usize).expect("search emits Latin squares");
        let ok = |p: &Property| p.check(&l).map(|r| r.holds).unwrap_or(false);
        (self.required.iter().all(ok) && !self.forbidden.iter().any(ok)).then_some(l)
    }
}

struct Raw {
    models: Vec<LoopTable>,
    /// Accepted tables before dedup; equals `models.len()` only when kept.
    accepted: u64,
    candidates: u64,
    nodes: u64,
    exhausted: bool,
}

/// Prefix depth at which the tree is split across workers.
fn split_prefixes(rules: &Rules, shared: &Shared, workers: usize) -> (usize, Vec<Vec<u32>>) {
    let cells = (rules.n - 1) * (rules.n - 1);
    let probe = Shared {
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        node_limit: None,
        deadline: shared.deadline,
    };
    let mut depth = 0;
    loop {
        let mut e = Engine::new(rules, &probe);
        let mut out = Vec::new();
        e.prefixes(depth, &mut out, &mut Vec::new());
        if out.len() >= 16 * workers || depth == cells || out.is_empty() {
            break;
        }
        depth += 1;
    }
    let mut e = Engine::new(rules, shared);
    let mut out = Vec::new();
    e.prefixes(depth, &mut out, &mut Vec::new());
    e.finish();
    (depth, out)
}

fn run(plan: &Plan, keep: bool) -> Raw {
    let shared = Shared {
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        node_limit: plan.node_limit,
        deadline: plan.time_limit.map(|d| Instant::now() + d),
    };
    let workers = rayon::current_num_threads();
    let (_, prefixes) = split_prefixes(&plan.rules, &shared, workers);
    // post-dedup needs the tables even when only counting
    let keep = keep || plan.mode == IsomorphMode::PostDedup;
    let per_prefix: Vec<(Vec<LoopTable>, u64, u64)> = prefixes
        .par_iter()
        .map(|prefix| {
            let mut e = Engine::new(&plan.rules, &shared);
            let mut found = Vec::new();
            let mut accepted = 0u64;
            let mut candidates = 0u64;
            let live = e.replay(prefix);
            debug_assert!(live);
            e.run(&mut |board| {
                candidates += 1;
                if let Some(l) = plan.accepts(board) {
                    accepted += 1;
                    if keep {
                        found.push(l);
                    }
                }
            });
            e.finish();
            (found, accepted, candidates)
        })
        .collect();
    let mut models = Vec::new();
    let (mut accepted, mut candidates) = (0, 0);
    for (found, a, c) in per_prefix {
        models.extend(found);
        accepted += a;
        candidates += c;
    }
    if plan.mode == IsomorphMode::PostDedup {
        models = dedup(models);
        accepted = models.len() as u64;
    }
    Raw {
        models,
        accepted,
        candidates,
        nodes: shared.nodes.load(Ordering::Relaxed),
        exhausted: !shared.stop.load(Ordering::Relaxed),
    }
}

/// Keeps the first table of each isomorphism class, preserving order.
pub fn dedup(tables: Vec<LoopTable>) -> Vec<LoopTable> {
    let invariants: Vec<IsoInvariant> = tables.par_iter().map(IsoInvariant::of).collect();
    let mut buckets: HashMap<IsoInvariant, Vec<usize>> = HashMap::new();
    let mut keep = Vec::new();
    for (i, inv) in invariants.into_iter().enumerate() {
        let reps = buckets.entry(inv).or_default();
        if reps.iter().any(|&r| are_isomorphic(&tables[r], &tables[i]).is_some()) {
            continue;
        }
        reps.push(i);
        keep.push(i);
    }
    let mut tables: Vec<Option<LoopTable>> = tables.into_iter().map(Some).collect();
    keep.into_iter().map(|i| tables[i].take().expect("kept once")).collect()
}

/// Runs the search described by `spec`. A spent budget yields a partial
/// outcome with `exhausted == false`.
pub fn search_loops(spec: &SearchSpec) -> Result<SearchOutcome, SearchError> {
    let plan = plan(spec)?;
    let raw = run(&plan, true);
    Ok(SearchOutcome {
        models: raw.models,
        exhausted: raw.exhausted,
        nodes: raw.nodes,
        candidates: raw.candidates,
    })
}

/// Number of models; an error unless the space was fully explored.
pub fn count_models(spec: &SearchSpec) -> Result<u64, SearchError> {
    let plan = plan(spec)?;
    let raw = run(&plan, false);
    if !raw.exhausted {
        return Err(SearchError::BudgetExhausted { nodes: raw.nodes });
    }
    Ok(raw.accepted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(spec: SearchSpec) -> u64 {
        count_models(&spec).unwrap()
    }

    #[test]
    fn reduced_latin_square_counts() {
        // reduced Latin squares of orders 1..=6
        let expected = [1, 1, 1, 4, 56, 9408];
        for (n, &e) in (1..=6).zip(&expected) {
            assert_eq!(count(SearchSpec::new(n).mode(IsomorphMode::None)), e, "order {n}");
        }
    }

    #[test]
    fn loops_up_to_isomorphism() {
        for (n, e) in [(1, 1), (2, 1), (3, 1), (4, 2), (5, 6)] {
            assert_eq!(count(SearchSpec::new(n)), e, "post-dedup order {n}");
            assert_eq!(
                count(SearchSpec::new(n).mode(IsomorphMode::CanonicalExtension)),
                e,
                "canonical order {n}"
            );
        }
    }

    #[test]
    fn groups_of_order_four() {
        assert_eq!(count(SearchSpec::new(4).require("ASSOC")), 2);
        assert_eq!(count(SearchSpec::new(6).require("ASSOC")), 2);
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(search_loops(&SearchSpec::new(0)), Err(SearchError::InvalidSpec(_))));
        let both = SearchSpec::new(3).require("FLEX").forbid("FLEX");
        assert!(matches!(search_loops(&both), Err(SearchError::InvalidSpec(_))));
        let unknown = SearchSpec::new(3).require("WOBBLY");
        assert!(matches!(search_loops(&unknown), Err(SearchError::Property(_))));
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let spec = SearchSpec::new(6).mode(IsomorphMode::None).node_budget(2000);
        let out = search_loops(&spec).unwrap();
        assert!(!out.exhausted);
        assert!(matches!(count_models(&spec), Err(SearchError::BudgetExhausted { .. })));
    }

    #[test]
    fn emitted_models_are_deterministic() {
        let spec = SearchSpec::new(5).mode(IsomorphMode::None).require("FLEX");
        let a = search_loops(&spec).unwrap();
        let b = search_loops(&spec).unwrap();
        assert_eq!(a.models, b.models);
        assert_eq!(a.nodes, b.nodes);
    }

    #[test]
    fn spec_from_toml() {
        let spec: SearchSpec = toml::from_str(
            r#"
            order = 6
            required = ["left-SUF(FLEX)"]
            forbidden = ["right-SUF(FLEX)"]
            isomorph_mode = "post-dedup"
            [limits]
            seconds = 600
            "#,
        )
        .unwrap();
        assert_eq!(spec.order, 6);
        assert_eq!(spec.limits.seconds, Some(600.0));
    }
}
