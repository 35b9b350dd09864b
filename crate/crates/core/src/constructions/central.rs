use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::table::{Element, LoopTable};

use super::ConstructionError;

/// Largest number of free cocycle cells [`CocycleIter`] will enumerate.
pub const MAX_ENUMERATED_CELLS: usize = 16;

/// A normalized map `Q x Q -> A` into an abelian group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle {
    pub base: LoopTable,
    pub fiber: LoopTable,
    /// `values[q1 * |Q| + q2]`.
    pub values: Vec<Element>,
}

fn check_fiber(fiber: &LoopTable) -> Result<(), ConstructionError> {
    if fiber.is_commutative() && fiber.is_associative() {
        Ok(())
    } else {
        Err(ConstructionError::FiberNotAbelianGroup)
    }
}

impl Cocycle {
    pub fn new(base: LoopTable, fiber: LoopTable, values: Vec<Element>) -> Result<Self, ConstructionError> {
        check_fiber(&fiber)?;
        let q = base.order();
        if values.len() != q * q {
            return Err(ConstructionError::CocycleShape {
                got: values.len(),
                expected: q * q,
            });
        }
        let (e, zero) = (base.identity(), fiber.identity());
        for q1 in 0..q {
            for q2 in 0..q {
                let value = values[q1 * q + q2];
                if value >= fiber.order() {
                    return Err(ConstructionError::CocycleOutOfRange { q1, q2, value });
                }
                if (q1 == e || q2 == e) && value != zero {
                    return Err(ConstructionError::NotNormalized(q1, q2));
                }
            }
        }
        Ok(Cocycle { base, fiber, values })
    }

    pub fn zero(base: LoopTable, fiber: LoopTable) -> Result<Self, ConstructionError> {
        let values = vec![fiber.identity(); base.order() * base.order()];
        Cocycle::new(base, fiber, values)
    }

    pub fn from_fn(
        base: LoopTable,
        fiber: LoopTable,
        f: impl Fn(Element, Element) -> Element,
    ) -> Result<Self, ConstructionError> {
        let q = base.order();
        let values = (0..q * q).map(|i| f(i / q, i % q)).collect();
        Cocycle::new(base, fiber, values)
    }

    #[inline]
    pub fn value(&self, q1: Element, q2: Element) -> Element {
        self.values[q1 * self.base.order() + q2]
    }

    /// Cells not forced by normalization, in row-major order.
    fn free_cells(base: &LoopTable) -> Vec<usize> {
        let q = base.order();
        let e = base.identity();
        (0..q * q).filter(|&i| i / q != e && i % q != e).collect()
    }
}

/// `(q1, a1)(q2, a2) = (q1 q2, a1 + a2 + theta(q1, q2))` on `Q x A`, with
/// `(q, a)` stored as `q |A| + a`.
pub fn central_extension(c: &Cocycle) -> LoopTable {
    let m = c.fiber.order();
    let (q, a) = (&c.base, &c.fiber);
    LoopTable::from_fn(q.order() * m, |x, y| {
        let (q1, a1) = (x / m, x % m);
        let (q2, a2) = (y / m, y % m);
        q.mul(q1, q2) * m + a.mul(a.mul(a1, a2), c.value(q1, q2))
    })
    .expect("central extensions of loops by abelian groups are loops")
}

/// The copy `{(1, a)}` of the fiber inside the extension.
pub fn fiber_image(c: &Cocycle) -> Vec<Element> {
    let m = c.fiber.order();
    (0..m).map(|a| c.base.identity() * m + a).collect()
}

/// Every normalized cocycle, in odometer order over the free cells.
#[derive(Debug, Clone)]
pub struct CocycleIter {
    base: LoopTable,
    fiber: LoopTable,
    free: Vec<usize>,
    digits: Vec<Element>,
    done: bool,
}

impl CocycleIter {
    pub fn new(base: LoopTable, fiber: LoopTable) -> Result<Self, ConstructionError> {
        check_fiber(&fiber)?;
        let free = Cocycle::free_cells(&base);
        if free.len() > MAX_ENUMERATED_CELLS {
            return Err(ConstructionError::BadParams(format!(
                "{} free cocycle cells exceed the enumeration limit {MAX_ENUMERATED_CELLS}; sample instead",
                free.len()
            )));
        }
        let digits = vec![0; free.len()];
        Ok(CocycleIter {
            base,
            fiber,
            free,
            digits,
            done: false,
        })
    }
}

impl Iterator for CocycleIter {
    type Item = Cocycle;

    fn next(&mut self) -> Option<Cocycle> {
        if self.done {
            return None;
        }
        let q = self.base.order();
        let mut values = vec![self.fiber.identity(); q * q];
        for (&cell, &d) in self.free.iter().zip(&self.digits) {
            values[cell] = d;
        }
        let m = self.fiber.order();
        self.done = true;
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < m {
                self.done = false;
                break;
            }
            *d = 0;
        }
        Some(Cocycle::new(self.base.clone(), self.fiber.clone(), values).expect("normalized by construction"))
    }
}

/// An endless stream of uniformly random normalized cocycles.
#[derive(Debug, Clone)]
pub struct CocycleSampler {
    base: LoopTable,
    fiber: LoopTable,
    free: Vec<usize>,
    rng: ChaCha8Rng,
}

impl CocycleSampler {
    pub fn new(base: LoopTable, fiber: LoopTable, seed: u64) -> Result<Self, ConstructionError> {
        check_fiber(&fiber)?;
        let free = Cocycle::free_cells(&base);
        Ok(CocycleSampler {
            base,
            fiber,
            free,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }
}

impl Iterator for CocycleSampler {
    type Item = Cocycle;

    fn next(&mut self) -> Option<Cocycle> {
        let q = self.base.order();
        let m = self.fiber.order();
        let mut values = vec![self.fiber.identity(); q * q];
        for &cell in &self.free {
            values[cell] = self.rng.gen_range(0..m);
        }
        Some(Cocycle::new(self.base.clone(), self.fiber.clone(), values).expect("normalized by construction"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{are_isomorphic, factor_loop, nuclei};

    fn z(n: usize) -> LoopTable {
        LoopTable::cyclic(n)
    }

    #[test]
    fn zero_cocycle_gives_direct_product() {
        let c = Cocycle::zero(z(2), z(2)).unwrap();
        let e = central_extension(&c);
        assert_eq!(e, LoopTable::direct_product(&z(2), &z(2)));
        assert!(e.is_associative());
        assert!(e.elements().all(|x| e.mul(x, x) == 0));
    }

    #[test]
    fn squaring_cocycle_gives_cyclic_four() {
        let c = Cocycle::from_fn(z(2), z(2), |a, b| usize::from(a == 1 && b == 1)).unwrap();
        let e = central_extension(&c);
        assert!(e.is_associative() && e.is_commutative());
        // an element of order 4
        assert_eq!(e.power(2, 2), Ok(1));
        assert!(are_isomorphic(&e, &z(4)).is_some());
    }

    #[test]
    fn fiber_is_central_and_quotient_is_base() {
        let base = LoopTable::from_rows(&[
            [0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 4, 0, 1, 3],
            [3, 2, 4, 0, 1],
            [4, 3, 1, 2, 0],
        ])
        .unwrap();
        for c in CocycleSampler::new(base.clone(), z(3), 7).unwrap().take(5) {
            let e = central_extension(&c);
            assert_eq!(e.order(), 15);
            let center = nuclei(&e).center;
            let image = fiber_image(&c);
            assert!(image.iter().all(|a| center.contains(a)));
            let q = factor_loop(&e, &image).unwrap();
            assert!(are_isomorphic(&q, &base).is_some());
        }
    }

    #[test]
    fn validation() {
        assert!(matches!(
            Cocycle::new(z(2), z(2), vec![0, 1, 0, 0]),
            Err(ConstructionError::NotNormalized(0, 1))
        ));
        assert!(matches!(
            Cocycle::new(z(2), z(2), vec![0, 0, 0, 5]),
            Err(ConstructionError::CocycleOutOfRange { value: 5, .. })
        ));
        let nonabelian = LoopTable::from_rows(&[
            [0, 1, 2, 3, 4],
            [1, 0, 3, 4, 2],
            [2, 4, 0, 1, 3],
            [3, 2, 4, 0, 1],
            [4, 3, 1, 2, 0],
        ])
        .unwrap();
        assert!(matches!(
            Cocycle::zero(z(2), nonabelian),
            Err(ConstructionError::FiberNotAbelianGroup)
        ));
    }

    #[test]
    fn odometer_enumerates_all_cocycles() {
        let all: Vec<Cocycle> = CocycleIter::new(z(3), z(2)).unwrap().collect();
        // four free cells with two values each
        assert_eq!(all.len(), 16);
        let mut values: Vec<_> = all.iter().map(|c| c.values.clone()).collect();
        values.dedup();
        assert_eq!(values.len(), 16);
        assert!(CocycleIter::new(z(6), z(2)).is_err());
    }

    #[test]
    fn sampler_is_reproducible() {
        let a: Vec<_> = CocycleSampler::new(z(4), z(3), 11).unwrap().take(3).collect();
        let b: Vec<_> = CocycleSampler::new(z(4), z(3), 11).unwrap().take(3).collect();
        assert_eq!(a, b);
    }
}
