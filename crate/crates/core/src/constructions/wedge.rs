use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::table::LoopTable;

use super::ConstructionError;

/// Largest order [`wedge_loop`] materializes.
pub const MAX_WEDGE_ORDER: usize = 4096;

/// Data for the loop on `V + (V ^ V)`, `V = F_p^d`, with
/// `phi_x = I + l(x) N` acting on `V ^ V`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WedgeParams {
    pub p: usize,
    pub d: usize,
    /// The linear form `l`, as `d` coefficients.
    pub ell: Vec<usize>,
    /// `N` as a square matrix on the basis `e_i ^ e_j` (`i < j`, lexicographic).
    pub n: Vec<Vec<usize>>,
}

impl WedgeParams {
    /// `p = 3`, `d = 3`, `l(x) = x_0` and `N = E_{0,2}` (the `e_1 ^ e_2`
    /// coordinate moved to `e_0 ^ e_1`).
    pub fn default_instance() -> Self {
        WedgeParams {
            p: 3,
            d: 3,
            ell: vec![1, 0, 0],
            n: vec![vec![0, 0, 1], vec![0, 0, 0], vec![0, 0, 0]],
        }
    }

    /// Dimension of `V ^ V`.
    pub fn wedge_dim(&self) -> usize {
        self.d * (self.d.saturating_sub(1)) / 2
    }

    pub fn order(&self) -> Option<usize> {
        u32::try_from(self.d + self.wedge_dim())
            .ok()
            .and_then(|e| self.p.checked_pow(e))
    }

    pub fn validate(&self) -> Result<(), ConstructionError> {
        let bad = |m: String| Err(ConstructionError::BadParams(m));
        if self.p < 3 || !(2..self.p).take_while(|k| k * k <= self.p).all(|k| self.p % k != 0) {
            return bad(format!("p = {} must be an odd prime", self.p));
        }
        if self.d < 3 {
            return bad(format!("d = {} must be at least 3", self.d));
        }
        if self.ell.len() != self.d || self.ell.iter().any(|&c| c >= self.p) {
            return bad(format!("ell must have {} coefficients below {}", self.d, self.p));
        }
        let k = self.wedge_dim();
        if self.n.len() != k || self.n.iter().any(|row| row.len() != k || row.iter().any(|&c| c >= self.p)) {
            return bad(format!("N must be a {k} x {k} matrix with entries below {}", self.p));
        }
        let sq = mat_mul(&self.n, &self.n, self.p);
        if sq.iter().flatten().any(|&c| c != 0) {
            return bad("N * N must vanish".to_string());
        }
        match self.order() {
            Some(o) if o <= MAX_WEDGE_ORDER => Ok(()),
            _ => bad(format!("order exceeds {MAX_WEDGE_ORDER}")),
        }
    }
}

fn mat_mul(a: &[Vec<usize>], b: &[Vec<usize>], p: usize) -> Vec<Vec<usize>> {
    let k = a.len();
    (0..k)
        .map(|i| (0..k).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum::<usize>() % p).collect())
        .collect()
}

struct Field {
    p: usize,
}

impl Field {
    fn neg(&self, a: usize) -> usize {
        (self.p - a) % self.p
    }
}

fn digits(mut v: usize, p: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = v % p;
        v /= p;
    }
    out
}

fn undigits(ds: &[usize], p: usize) -> usize {
    ds.iter().fold(0, |acc, &d| acc * p + d)
}

/// `(x, w)(y, h) = (x + y, w + phi_{-x}(h) + phi_{-2x}(x ^ y))`.
///
/// Element `(x, w)` has index `enc(x) p^k + enc(w)`, where `enc` reads
/// coordinates as base-`p` digits, most significant first.
pub fn wedge_loop(w: &WedgeParams) -> Result<LoopTable, ConstructionError> {
    w.validate()?;
    let (p, d, k) = (w.p, w.d, w.wedge_dim());
    let f = Field { p };
    let order = w.order().expect("validated");
    let fiber = p.pow(k as u32);
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let ell = |x: &[usize]| x.iter().zip(&w.ell).map(|(a, b)| a * b).sum::<usize>() % p;
    // phi_t(v) = v + t N v
    let phi = |t: usize, v: &[usize]| -> Vec<usize> {
        (0..k)
            .map(|i| (v[i] + t * (0..k).map(|j| w.n[i][j] * v[j]).sum::<usize>()) % p)
            .collect()
    };
    let vectors: Vec<Vec<usize>> = (0..p.pow(d as u32)).map(|v| digits(v, p, d)).collect();
    let wedges: Vec<Vec<usize>> = (0..fiber).map(|v| digits(v, p, k)).collect();
    let rows: Vec<Vec<usize>> = (0..order)
        .into_par_iter()
        .map(|a| {
            let x = &vectors[a / fiber];
            let om = &wedges[a % fiber];
            let lx = ell(x);
            let minus_x = f.neg(lx);
            let minus_2x = f.neg(2 * lx % p);
            (0..order)
                .map(|b| {
                    let y = &vectors[b / fiber];
                    let eta = &wedges[b % fiber];
                    let sum: Vec<usize> = x.iter().zip(y).map(|(a, b)| (a + b) % p).collect();
                    let xy: Vec<usize> = pairs
                        .iter()
                        .map(|&(i, j)| (x[i] * y[j] + f.neg(x[j] * y[i] % p)) % p)
                        .collect();
                    let t1 = phi(minus_x, eta);
                    let t2 = phi(minus_2x, &xy);
                    let omega: Vec<usize> = (0..k).map(|i| (om[i] + t1[i] + t2[i]) % p).collect();
                    undigits(&sum, p) * fiber + undigits(&omega, p)
                })
                .collect()
        })
        .collect();
    Ok(LoopTable::from_rows(&rows).expect("the wedge construction is a loop"))
}
