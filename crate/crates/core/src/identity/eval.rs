use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::term::{Identity, Term};
use crate::table::{Element, LoopTable};

/// Above this many assignments the scan is split across worker threads.
const PARALLEL_THRESHOLD: usize = 1 << 16;
/// Largest order at which identities with five or more variables run unforced.
const UNFORCED_MAX_ORDER: usize = 64;

/// One postfix instruction of a compiled term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Var(u8),
    One,
    Mul,
    LDiv,
    RDiv,
    Inv,
}

/// Primitive operations a compiled term is evaluated against. A full table
/// only stops on a missing inverse; a partial table also stops on an unknown
/// cell.
pub trait Operations {
    type Stop;
    fn one(&self) -> Element;
    fn mul(&self, x: Element, y: Element) -> Result<Element, Self::Stop>;
    fn ldiv(&self, x: Element, y: Element) -> Result<Element, Self::Stop>;
    fn rdiv(&self, x: Element, y: Element) -> Result<Element, Self::Stop>;
    fn inv(&self, x: Element) -> Result<Element, Self::Stop>;
}

impl Operations for LoopTable {
    /// The element whose two-sided inverse is missing.
    type Stop = Element;

    #[inline]
    fn one(&self) -> Element {
        self.identity()
    }
    #[inline]
    fn mul(&self, x: Element, y: Element) -> Result<Element, Element> {
        Ok(LoopTable::mul(self, x, y))
    }
    #[inline]
    fn ldiv(&self, x: Element, y: Element) -> Result<Element, Element> {
        Ok(LoopTable::ldiv(self, x, y))
    }
    #[inline]
    fn rdiv(&self, x: Element, y: Element) -> Result<Element, Element> {
        Ok(LoopTable::rdiv(self, x, y))
    }
    #[inline]
    fn inv(&self, x: Element) -> Result<Element, Element> {
        self.two_sided_inverse(x).ok_or(x)
    }
}

/// An identity flattened into two postfix programs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compiled {
    pub lhs: Vec<Op>,
    pub rhs: Vec<Op>,
    pub variables: Vec<String>,
    stack_depth: usize,
}

fn compile_term(t: &Term, vars: &[String], out: &mut Vec<Op>) -> usize {
    match t {
        Term::Var(name) => {
            let idx = vars.iter().position(|v| v == name).expect("variable collected");
            out.push(Op::Var(idx as u8));
            1
        }
        Term::One => {
            out.push(Op::One);
            1
        }
        Term::Mul(a, b) | Term::LDiv(a, b) | Term::RDiv(a, b) => {
            let da = compile_term(a, vars, out);
            let db = compile_term(b, vars, out);
            out.push(match t {
                Term::Mul(..) => Op::Mul,
                Term::LDiv(..) => Op::LDiv,
                _ => Op::RDiv,
            });
            da.max(db + 1)
        }
        Term::Inv(a) => {
            let d = compile_term(a, vars, out);
            out.push(Op::Inv);
            d
        }
    }
}

impl Compiled {
    pub fn new(id: &Identity) -> Self {
        assert!(id.variables.len() <= u8::MAX as usize, "too many variables");
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        let dl = compile_term(&id.lhs, &id.variables, &mut lhs);
        let dr = compile_term(&id.rhs, &id.variables, &mut rhs);
        Compiled {
            lhs,
            rhs,
            variables: id.variables.clone(),
            stack_depth: dl.max(dr),
        }
    }

    pub fn arity(&self) -> usize {
        self.variables.len()
    }

    /// A stack large enough for [`Compiled::eval_side`].
    pub fn stack(&self) -> Vec<Element> {
        vec![0; self.stack_depth.max(1)]
    }

    #[inline]
    pub fn eval_side<O: Operations>(
        ops: &[Op],
        o: &O,
        assignment: &[Element],
        stack: &mut [Element],
    ) -> Result<Element, O::Stop> {
        let mut sp = 0usize;
        for &op in ops {
            match op {
                Op::Var(i) => {
                    stack[sp] = assignment[i as usize];
                    sp += 1;
                }
                Op::One => {
                    stack[sp] = o.one();
                    sp += 1;
                }
                Op::Inv => {
                    stack[sp - 1] = o.inv(stack[sp - 1])?;
                }
                Op::Mul | Op::LDiv | Op::RDiv => {
                    let b = stack[sp - 1];
                    let a = stack[sp - 2];
                    sp -= 1;
                    stack[sp - 1] = match op {
                        Op::Mul => o.mul(a, b)?,
                        Op::LDiv => o.ldiv(a, b)?,
                        _ => o.rdiv(a, b)?,
                    };
                }
            }
        }
        Ok(stack[0])
    }

    /// Evaluates both sides; `Ok(true)` when they agree.
    #[inline]
    pub fn holds_at<O: Operations>(
        &self,
        o: &O,
        assignment: &[Element],
        stack: &mut [Element],
    ) -> Result<bool, O::Stop> {
        let l = Self::eval_side(&self.lhs, o, assignment, stack)?;
        let r = Self::eval_side(&self.rhs, o, assignment, stack)?;
        Ok(l == r)
    }
}

/// Verdict of a check, with a witness on failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub holds: bool,
    /// Variable (or parameter) name and element, in evaluation order.
    pub witness: Option<Vec<(String, Element)>>,
    pub detail: Option<String>,
}

impl CheckResult {
    pub fn pass() -> Self {
        CheckResult {
            holds: true,
            witness: None,
            detail: None,
        }
    }

    pub fn fail(witness: Vec<(String, Element)>) -> Self {
        CheckResult {
            holds: false,
            witness: Some(witness),
            detail: None,
        }
    }

    pub fn fail_with(witness: Vec<(String, Element)>, detail: impl Into<String>) -> Self {
        CheckResult {
            holds: false,
            witness: Some(witness),
            detail: Some(detail.into()),
        }
    }

    pub fn from_bool(holds: bool) -> Self {
        if holds {
            Self::pass()
        } else {
            Self::fail(Vec::new())
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// Looks up a witness value by name.
    pub fn witness_value(&self, name: &str) -> Option<Element> {
        self.witness
            .as_ref()?
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("identity has {arity} variables; {order}^{arity} assignments need the force flag")]
    TooExpensive { arity: usize, order: usize },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions {
    /// Skip the cost guard.
    pub force: bool,
}

/// Checks `id` on every assignment of elements to its variables.
pub fn eval_identity(l: &LoopTable, id: &Identity) -> Result<CheckResult, EvalError> {
    eval_identity_with(l, id, EvalOptions::default())
}

pub fn eval_identity_with(
    l: &LoopTable,
    id: &Identity,
    opts: EvalOptions,
) -> Result<CheckResult, EvalError> {
    let compiled = Compiled::new(id);
    eval_compiled(l, &compiled, opts)
}

/// Exhaustive check of a compiled identity. The witness is the
/// lexicographically first failing assignment (first variable most
/// significant).
pub fn eval_compiled(l: &LoopTable, c: &Compiled, opts: EvalOptions) -> Result<CheckResult, EvalError> {
    let n = l.order();
    let v = c.arity();
    if v >= 5 && n > UNFORCED_MAX_ORDER && !opts.force {
        return Err(EvalError::TooExpensive { arity: v, order: n });
    }
    if v == 0 {
        let mut stack = c.stack();
        return Ok(match c.holds_at(l, &[], &mut stack) {
            Ok(true) => CheckResult::pass(),
            Ok(false) => CheckResult::fail(Vec::new()),
            Err(x) => CheckResult::fail_with(Vec::new(), format!("inverse undefined at {x}")),
        });
    }
    let total = (n as f64).powi(v as i32);
    let first_failure = if total > PARALLEL_THRESHOLD as f64 && n > 1 {
        (0..n)
            .into_par_iter()
            .find_map_first(|head| scan_block(l, c, head))
    } else {
        (0..n).find_map(|head| scan_block(l, c, head))
    };
    Ok(match first_failure {
        None => CheckResult::pass(),
        Some((assignment, undefined)) => {
            let witness = c.variables.iter().cloned().zip(assignment).collect();
            match undefined {
                Some(x) => CheckResult::fail_with(witness, format!("inverse undefined at {x}")),
                None => CheckResult::fail(witness),
            }
        }
    })
}

/// Scans every assignment whose first variable is `head`, in lexicographic order.
fn scan_block(l: &LoopTable, c: &Compiled, head: Element) -> Option<(Vec<Element>, Option<Element>)> {
    let n = l.order();
    let v = c.arity();
    let mut a = vec![0; v];
    a[0] = head;
    let mut stack = c.stack();
    loop {
        match c.holds_at(l, &a, &mut stack) {
            Ok(true) => {}
            Ok(false) => return Some((a, None)),
            Err(x) => return Some((a, Some(x))),
        }
        // odometer over positions 1..v
        let mut i = v;
        loop {
            if i == 1 {
                return None;
            }
            i -= 1;
            a[i] += 1;
            if a[i] < n {
                break;
            }
            a[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identity::parse_identity;

    #[test]
    fn group_is_associative() {
        let id = parse_identity("x*(y*z) = (x*y)*z").unwrap();
        let z6 = LoopTable::cyclic(6);
        assert!(eval_identity(&z6, &id).unwrap().holds);
    }

    #[test]
    fn witness_is_lexicographically_first() {
        let l = LoopTable::from_rows(&[
            [0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 3, 4, 0, 1],
            [3, 4, 1, 2, 0],
            [4, 2, 0, 1, 3],
        ])
        .unwrap();
        let id = parse_identity("x*y = y*x").unwrap();
        let r = eval_identity(&l, &id).unwrap();
        assert!(!r.holds);
        // brute-force lexicographic scan
        let mut expected = None;
        'outer: for x in 0..5 {
            for y in 0..5 {
                if l.mul(x, y) != l.mul(y, x) {
                    expected = Some((x, y));
                    break 'outer;
                }
            }
        }
        let (x, y) = expected.unwrap();
        assert_eq!(r.witness_value("x"), Some(x));
        assert_eq!(r.witness_value("y"), Some(y));
    }

    #[test]
    fn inverse_undefined_is_a_failure_not_a_panic() {
        let l = LoopTable::from_rows(&[
            [0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 3, 4, 0, 1],
            [3, 4, 1, 2, 0],
            [4, 2, 0, 1, 3],
        ])
        .unwrap();
        let id = parse_identity("x^-1 = x^-1").unwrap();
        let r = eval_identity(&l, &id).unwrap();
        assert!(!r.holds);
        assert!(r.detail.unwrap().contains("inverse undefined"));
    }

    #[test]
    fn closed_identity() {
        let id = parse_identity("1 = 1 * 1").unwrap();
        assert!(eval_identity(&LoopTable::cyclic(3), &id).unwrap().holds);
    }

    #[test]
    fn cost_guard() {
        let id = parse_identity("a*(b*(c*(d*e))) = (((a*b)*c)*d)*e").unwrap();
        let z = LoopTable::cyclic(65);
        assert_eq!(
            eval_identity(&z, &id),
            Err(EvalError::TooExpensive { arity: 5, order: 65 })
        );
        let small = LoopTable::cyclic(4);
        assert!(eval_identity(&small, &id).unwrap().holds);
    }

    #[test]
    fn parallel_and_serial_scans_agree() {
        // 3 variables at order 48 crosses the parallel threshold.
        let t1 = LoopTable::from_rows(&[
            [0, 1, 2, 3, 4, 5],
            [1, 0, 3, 2, 5, 4],
            [2, 5, 0, 4, 3, 1],
            [3, 4, 5, 0, 1, 2],
            [4, 2, 1, 5, 0, 3],
            [5, 3, 4, 1, 2, 0],
        ])
        .unwrap();
        let l = LoopTable::direct_product(&LoopTable::cyclic(8), &t1);
        let id = parse_identity("x*(y*z) = (x*y)*z").unwrap();
        let c = Compiled::new(&id);
        let par = eval_compiled(&l, &c, EvalOptions::default()).unwrap();
        let ser = (0..l.order()).find_map(|h| scan_block(&l, &c, h)).unwrap();
        assert!(!par.holds);
        let got: Vec<Element> = par.witness.unwrap().iter().map(|p| p.1).collect();
        assert_eq!(got, ser.0);
    }
}
