//! Depth-first Cayley table filling.
//!
//! Cells `(r, c)` with `r, c >= 1` are filled in row-major order; row 0 and
//! column 0 hold the identity. Every instance of every pruning identity is
//! attached to the first unfilled cell its evaluation needs and re-examined
//! when that cell is assigned, so a violated instance is detected exactly at
//! the assignment that completes it.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

use crate::identity::{Compiled, Operations};
use crate::table::Element;

const UNSET: u32 = u32::MAX;
/// Local node counts are published to the shared counter in batches of this size.
const FLUSH_EVERY: u64 = 1 << 10;

/// Why a partial evaluation stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Block {
    /// Waiting on the cell with this fill index.
    At(usize),
    /// An inverse is provably missing.
    Undefined,
}

/// A partially filled table.
#[derive(Debug, Clone)]
pub(crate) struct Board {
    pub n: usize,
    pub cells: Vec<u32>,
    row_used: Vec<u64>,
    col_used: Vec<u64>,
    /// `row_pos[x * n + y]`: the column holding `y` in row `x`.
    row_pos: Vec<u32>,
    /// `col_pos[x * n + y]`: the row holding `y` in column `x`.
    col_pos: Vec<u32>,
    /// Cells `0..filled` (fill order) are assigned.
    pub filled: usize,
}

impl Board {
    pub fn new(n: usize) -> Self {
        let mut b = Board {
            n,
            cells: vec![UNSET; n * n],
            row_used: vec![0; n],
            col_used: vec![0; n],
            row_pos: vec![UNSET; n * n],
            col_pos: vec![UNSET; n * n],
            filled: 0,
        };
        for x in 0..n {
            b.put(0, x, x as u32);
            if x > 0 {
                b.put(x, 0, x as u32);
            }
        }
        b
    }

    pub fn cell_count(&self) -> usize {
        (self.n - 1) * (self.n - 1)
    }

    #[inline]
    pub fn cell(&self, k: usize) -> (usize, usize) {
        (k / (self.n - 1) + 1, k % (self.n - 1) + 1)
    }

    #[inline]
    fn index(&self, r: usize, c: usize) -> usize {
        (r - 1) * (self.n - 1) + (c - 1)
    }

    fn put(&mut self, r: usize, c: usize, v: u32) {
        let n = self.n;
        self.cells[r * n + c] = v;
        self.row_used[r] |= 1 << v;
        self.col_used[c] |= 1 << v;
        self.row_pos[r * n + v as usize] = c as u32;
        self.col_pos[c * n + v as usize] = r as u32;
    }

    /// Values allowed at fill index `k` by the Latin constraints.
    #[inline]
    pub fn candidates(&self, k: usize) -> u64 {
        let (r, c) = self.cell(k);
        let full = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        !(self.row_used[r] | self.col_used[c]) & full
    }

    pub fn set(&mut self, k: usize, v: u32) {
        debug_assert_eq!(k, self.filled);
        let (r, c) = self.cell(k);
        self.put(r, c, v);
        self.filled = k + 1;
    }

    pub fn clear(&mut self, k: usize) {
        debug_assert_eq!(k + 1, self.filled);
        let n = self.n;
        let (r, c) = self.cell(k);
        let v = self.cells[r * n + c];
        self.cells[r * n + c] = UNSET;
        self.row_used[r] &= !(1 << v);
        self.col_used[c] &= !(1 << v);
        self.row_pos[r * n + v as usize] = UNSET;
        self.col_pos[c * n + v as usize] = UNSET;
        self.filled = k;
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.cells[r * self.n + c]
    }

    /// First unfilled cell of row `r`.
    #[inline]
    fn row_frontier(&self, r: usize) -> usize {
        self.filled.max(self.index(r, 1))
    }

    /// First unfilled cell of column `c`.
    #[inline]
    fn col_frontier(&self, c: usize) -> usize {
        let (cur_r, cur_c) = self.cell(self.filled);
        let r = if c >= cur_c { cur_r } else { cur_r + 1 };
        self.index(r, c)
    }
}

impl Operations for Board {
    type Stop = Block;

    #[inline]
    fn one(&self) -> Element {
        0
    }

    #[inline]
    fn mul(&self, x: Element, y: Element) -> Result<Element, Block> {
        match self.get(x, y) {
            UNSET => Err(Block::At(self.index(x, y))),
            v => Ok(v as Element),
        }
    }

    #[inline]
    fn ldiv(&self, x: Element, y: Element) -> Result<Element, Block> {
        match self.row_pos[x * self.n + y] {
            UNSET => Err(Block::At(self.row_frontier(x))),
            c => Ok(c as Element),
        }
    }

    #[inline]
    fn rdiv(&self, y: Element, x: Element) -> Result<Element, Block> {
        match self.col_pos[x * self.n + y] {
            UNSET => Err(Block::At(self.col_frontier(x))),
            r => Ok(r as Element),
        }
    }

    #[inline]
    fn inv(&self, x: Element) -> Result<Element, Block> {
        let z = self.ldiv(x, 0)?;
        if self.mul(z, x)? == 0 {
            Ok(z)
        } else {
            Err(Block::Undefined)
        }
    }
}

/// Budget and cancellation state shared by all workers.
#[derive(Debug)]
pub(crate) struct Shared {
    pub nodes: AtomicU64,
    pub stop: AtomicBool,
    pub node_limit: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Shared {
    fn publish(&self, local: u64) -> bool {
        let total = self.nodes.fetch_add(local, Ordering::Relaxed) + local;
        let over_nodes = self.node_limit.is_some_and(|lim| total >= lim);
        let over_time = self.deadline.is_some_and(|d| Instant::now() >= d);
        if over_nodes || over_time {
            self.stop.store(true, Ordering::Relaxed);
        }
        !self.stop.load(Ordering::Relaxed)
    }
}

/// Static data for one search: pruning identities and isomorph rejection.
#[derive(Debug)]
pub(crate) struct Rules {
    pub n: usize,
    pub constraints: Vec<Compiled>,
    /// `(first instance id, arity)` per constraint.
    offsets: Vec<(usize, usize)>,
    instances: usize,
    /// Identity-fixing relabelings tried by the canonicity test.
    perms: Option<Vec<Vec<u8>>>,
}

impl Rules {
    pub fn new(n: usize, constraints: Vec<Compiled>, canonical: bool) -> Self {
        let mut offsets = Vec::with_capacity(constraints.len());
        let mut instances = 0usize;
        for c in &constraints {
            offsets.push((instances, c.arity()));
            instances += n.pow(c.arity() as u32);
        }
        let perms = canonical.then(|| nontrivial_perms_fixing_zero(n));
        Rules {
            n,
            constraints,
            offsets,
            instances,
            perms,
        }
    }

    fn decode(&self, id: usize, out: &mut Vec<Element>) -> usize {
        let which = self.offsets.partition_point(|&(start, _)| start <= id) - 1;
        let (start, arity) = self.offsets[which];
        let mut rest = id - start;
        out.clear();
        out.resize(arity, 0);
        for slot in out.iter_mut().rev() {
            *slot = rest % self.n;
            rest /= self.n;
        }
        which
    }
}

fn nontrivial_perms_fixing_zero(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut p: Vec<u8> = (0..n as u8).collect();
    // lexicographic successor on positions 1..n
    while let Some(i) = (1..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) {
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
        p.swap(i, j);
        p[i + 1..].reverse();
        out.push(p.clone());
    }
    out
}

pub(crate) enum Verdict {
    Holds,
    Fails,
    Blocked(usize),
}

/// One depth-first worker.
pub(crate) struct Engine<'a> {
    rules: &'a Rules,
    shared: &'a Shared,
    pub board: Board,
    watch: Vec<Vec<u32>>,
    saved: Vec<Vec<u32>>,
    trail: Vec<u32>,
    stack: Vec<Element>,
    assignment: Vec<Element>,
    local_nodes: u64,
    /// Some instance is violated before any cell is filled.
    dead: bool,
}

impl<'a> Engine<'a> {
    pub fn new(rules: &'a Rules, shared: &'a Shared) -> Self {
        let board = Board::new(rules.n);
        let cells = board.cell_count();
        let depth = rules.constraints.iter().map(|c| c.stack().len()).max().unwrap_or(1);
        let mut e = Engine {
            rules,
            shared,
            board,
            watch: vec![Vec::new(); cells],
            saved: vec![Vec::new(); cells],
            trail: Vec::new(),
            stack: vec![0; depth],
            assignment: Vec::new(),
            local_nodes: 0,
            dead: false,
        };
        for id in 0..rules.instances {
            match e.evaluate(id) {
                Verdict::Holds => {}
                Verdict::Fails => e.dead = true,
                Verdict::Blocked(p) => e.watch[p].push(id as u32),
            }
        }
        e
    }

    fn evaluate(&mut self, id: usize) -> Verdict {
        let which = self.rules.decode(id, &mut self.assignment);
        let c = &self.rules.constraints[which];
        match c.holds_at(&self.board, &self.assignment, &mut self.stack) {
            Ok(true) => Verdict::Holds,
            Ok(false) | Err(Block::Undefined) => Verdict::Fails,
            Err(Block::At(p)) => Verdict::Blocked(p),
        }
    }

    /// Assigns `v` at fill index `k` and re-examines the instances waiting on
    /// it. On `false` the caller must still call [`Engine::unassign`].
    pub fn assign(&mut self, k: usize, v: u32) -> bool {
        self.board.set(k, v);
        let list = std::mem::take(&mut self.watch[k]);
        let mut ok = true;
        for &id in &list {
            match self.evaluate(id as usize) {
                Verdict::Holds => {}
                Verdict::Fails => {
                    ok = false;
                    break;
                }
                Verdict::Blocked(p) => {
                    debug_assert!(p > k);
                    self.watch[p].push(id);
                    self.trail.push(p as u32);
                }
            }
        }
        self.saved[k] = list;
        ok
    }

    pub fn unassign(&mut self, k: usize, mark: usize) {
        while self.trail.len() > mark {
            let p = self.trail.pop().expect("above mark") as usize;
            self.watch[p].pop();
        }
        self.watch[k] = std::mem::take(&mut self.saved[k]);
        self.board.clear(k);
    }

    /// Counts one node; `false` once the budget is spent.
    #[inline]
    fn tick(&mut self) -> bool {
        self.local_nodes += 1;
        if self.local_nodes % FLUSH_EVERY == 0 {
            let ok = self.shared.publish(FLUSH_EVERY);
            return ok;
        }
        true
    }

    pub fn finish(&mut self) {
        let rest = self.local_nodes % FLUSH_EVERY;
        self.shared.publish(rest);
        self.local_nodes -= rest;
    }

    pub fn stopped(&self) -> bool {
        self.shared.stop.load(Ordering::Relaxed)
    }

    /// With rows `1..=r` complete, is there a relabeling fixing 0 whose image
    /// is already known to be lexicographically smaller?
    fn beaten(&self, r: usize) -> bool {
        let Some(perms) = &self.rules.perms else {
            return false;
        };
        let n = self.board.n;
        let mut inv = vec![0usize; n];
        'perm: for p in perms {
            for (x, &px) in p.iter().enumerate() {
                inv[px as usize] = x;
            }
            for i in 1..n {
                let x = inv[i];
                if x > r {
                    continue 'perm;
                }
                for j in 1..n {
                    let image = p[self.board.get(x, inv[j]) as usize] as u32;
                    let mine = self.board.get(i, j);
                    if image < mine {
                        return true;
                    }
                    if image > mine {
                        continue 'perm;
                    }
                }
            }
        }
        false
    }

    fn row_complete_ok(&self, k: usize) -> bool {
        let (r, c) = self.board.cell(k);
        c != self.board.n - 1 || !self.beaten(r)
    }

    /// Replays `prefix` from an empty board; `false` if it is not a live node.
    pub fn replay(&mut self, prefix: &[u32]) -> bool {
        for (k, &v) in prefix.iter().enumerate() {
            if !self.assign(k, v) {
                return false;
            }
        }
        true
    }

    /// Collects live prefixes of length `depth` in search order. Nodes visited
    /// here count towards the budget.
    pub fn prefixes(&mut self, depth: usize, out: &mut Vec<Vec<u32>>, path: &mut Vec<u32>) {
        if self.dead || self.stopped() {
            return;
        }
        let k = path.len();
        if k == depth {
            out.push(path.clone());
            return;
        }
        let mut avail = self.board.candidates(k);
        while avail != 0 {
            let v = avail.trailing_zeros();
            avail &= avail - 1;
            if !self.tick() {
                return;
            }
            let mark = self.trail.len();
            if self.assign(k, v) && self.row_complete_ok(k) {
                path.push(v);
                self.prefixes(depth, out, path);
                path.pop();
            }
            self.unassign(k, mark);
        }
    }

    /// Explores the subtree below the current board, calling `leaf` on each
    /// complete table that survives pruning.
    pub fn run(&mut self, leaf: &mut dyn FnMut(&Board)) {
        if self.dead {
            return;
        }
        self.dfs(self.board.filled, leaf);
    }

    fn dfs(&mut self, k: usize, leaf: &mut dyn FnMut(&Board)) {
        if k == self.board.cell_count() {
            leaf(&self.board);
            return;
        }
        if self.stopped() {
            return;
        }
        let mut avail = self.board.candidates(k);
        while avail != 0 {
            let v = avail.trailing_zeros();
            avail &= avail - 1;
            if !self.tick() {
                return;
            }
            let mark = self.trail.len();
            if self.assign(k, v) && self.row_complete_ok(k) {
                self.dfs(k + 1, leaf);
            }
            self.unassign(k, mark);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_fixing_zero() {
        let p = nontrivial_perms_fixing_zero(4);
        assert_eq!(p.len(), 5);
        assert!(p.iter().all(|q| q[0] == 0));
        assert_eq!(nontrivial_perms_fixing_zero(1).len(), 0);
        assert_eq!(nontrivial_perms_fixing_zero(2).len(), 0);
    }

    #[test]
    fn frontiers() {
        let mut b = Board::new(4);
        // fill index 0 is (1,1)
        assert_eq!(b.row_frontier(2), 3);
        assert_eq!(b.col_frontier(2), 1);
        b.set(0, 0);
        b.set(1, 3);
        assert_eq!(b.row_frontier(1), 2);
        assert_eq!(b.col_frontier(1), 3);
        assert_eq!(b.col_frontier(3), 2);
        assert_eq!(b.ldiv(1, 3), Ok(2));
        assert_eq!(b.rdiv(3, 2), Ok(1));
        assert_eq!(b.inv(1), Ok(1));
        assert_eq!(b.mul(2, 2), Err(Block::At(4)));
        b.clear(1);
        assert_eq!(b.ldiv(1, 3), Err(Block::At(1)));
    }
}
