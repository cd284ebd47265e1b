//! Linear algebra over F_P for word-sized primes P.

use std::collections::HashMap;

use crate::arith::{inv_mod, mulmod};

const M61: u64 = (1 << 61) - 1;

/// Primes used for the modular computations; the second is only needed when
/// rational reconstruction from the first fails.
pub const MODULI: [u64; 2] = [2_305_843_009_213_693_951, 4_611_686_018_427_387_847];

/// a * b mod p, with a fast path for the Mersenne modulus.
#[inline]
pub fn mulm(a: u64, b: u64, p: u64) -> u64 {
    if p == M61 {
        let z = a as u128 * b as u128;
        let s = (z as u64 & M61) + (z >> 61) as u64;
        if s >= M61 {
            s - M61
        } else {
            s
        }
    } else {
        mulmod(a, b, p)
    }
}

#[inline]
pub fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn from_i64(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

pub fn inv(a: u64, p: u64) -> u64 {
    inv_mod((a % p) as i64, p).expect("nonzero element of a prime field")
}

/// Row echelon form of a sparse system, rows stored with their leading column
/// normalised to 1.
pub struct SparseEchelon {
    p: u64,
    pivots: HashMap<usize, Vec<(usize, u64)>>,
}

fn axpy(row: &[(usize, u64)], c: u64, piv: &[(usize, u64)], p: u64) -> Vec<(usize, u64)> {
    // row - c * piv
    let mut out = Vec::with_capacity(row.len() + piv.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < piv.len() {
        let take_row = j >= piv.len() || (i < row.len() && row[i].0 < piv[j].0);
        let take_piv = i >= row.len() || (j < piv.len() && piv[j].0 < row[i].0);
        if take_row {
            out.push(row[i]);
            i += 1;
        } else if take_piv {
            out.push((piv[j].0, subm(0, mulm(c, piv[j].1, p), p)));
            j += 1;
        } else {
            let v = subm(row[i].1, mulm(c, piv[j].1, p), p);
            if v != 0 {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl SparseEchelon {
    pub fn new(p: u64) -> Self {
        SparseEchelon { p, pivots: HashMap::new() }
    }

    /// Insert a row (sorted by column, nonzero entries).
    pub fn add_row(&mut self, mut row: Vec<(usize, u64)>) {
        let p = self.p;
        loop {
            let Some(&(c, v)) = row.first() else { return };
            match self.pivots.get(&c) {
                Some(piv) => row = axpy(&row, v, piv, p),
                None => {
                    let iv = inv(v, p);
                    for e in row.iter_mut() {
                        e.1 = mulm(e.1, iv, p);
                    }
                    self.pivots.insert(c, row);
                    return;
                }
            }
        }
    }

    /// For every pivot column, its value as a linear form in the free columns
    /// (dense, indexed by position in `free`), for vectors in the kernel.
    pub fn pivot_expressions(&self, ncols: usize) -> (Vec<usize>, HashMap<usize, Vec<u64>>) {
        let p = self.p;
        let free: Vec<usize> = (0..ncols).filter(|c| !self.pivots.contains_key(c)).collect();
        let mut pos = vec![usize::MAX; ncols];
        for (k, &c) in free.iter().enumerate() {
            pos[c] = k;
        }
        let mut cols: Vec<usize> = self.pivots.keys().copied().collect();
        cols.sort_unstable_by(|a, b| b.cmp(a));
        let mut expr: HashMap<usize, Vec<u64>> = HashMap::with_capacity(cols.len());
        for c in cols {
            let row = &self.pivots[&c];
            let mut e = vec![0u64; free.len()];
            for &(col, v) in &row[1..] {
                if pos[col] != usize::MAX {
                    e[pos[col]] = subm(e[pos[col]], v, p);
                } else {
                    let sub = &expr[&col];
                    for (x, &y) in e.iter_mut().zip(sub.iter()) {
                        if y != 0 {
                            *x = subm(*x, mulm(v, y, p), p);
                        }
                    }
                }
            }
            expr.insert(c, e);
        }
        (free, expr)
    }
}

/// Basis of the right kernel of a dense matrix over F_p.
pub fn kernel(mut m: Vec<Vec<u64>>, ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let nrows = m.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(k) = (r..nrows).find(|&k| m[k][c] != 0) else { continue };
        m.swap(r, k);
        let iv = inv(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = mulm(*x, iv, p);
        }
        let pivot_row = m[r].clone();
        for (k, row) in m.iter_mut().enumerate() {
            if k != r && row[c] != 0 {
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(pivot_row.iter()) {
                    if y != 0 {
                        *x = subm(*x, mulm(f, y, p), p);
                    }
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let mut is_pivot = vec![false; ncols];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for f in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u64; ncols];
        v[f] = 1;
        for (row, &c) in pivot_cols.iter().enumerate() {
            v[c] = subm(0, m[row][f], p);
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_prime;

    #[test]
    fn moduli_are_prime() {
        for p in MODULI {
            assert!(is_prime(p));
        }
    }

    #[test]
    fn kernel_small() {
        let p = MODULI[0];
        // [[1,2,3],[2,4,6]] has a 2-dim kernel
        let m = vec![vec![1, 2, 3], vec![2, 4, 6]];
        let k = kernel(m.clone(), 3, p);
        assert_eq!(k.len(), 2);
        for v in &k {
            for row in &m {
                let s = row.iter().zip(v).fold(0, |acc, (&a, &b)| addm(acc, mulm(a, b, p), p));
                assert_eq!(s, 0);
            }
        }
    }

    #[test]
    fn sparse_expressions_solve_system() {
        let p = MODULI[0];
        let mut e = SparseEchelon::new(p);
        // x0 + x1 + x2 = 0 ; x1 - x3 = 0
        e.add_row(vec![(0, 1), (1, 1), (2, 1)]);
        e.add_row(vec![(1, 1), (3, p - 1)]);
        let (free, expr) = e.pivot_expressions(4);
        assert_eq!(free, vec![2, 3]);
        // x1 = x3, x0 = -x2 - x3
        assert_eq!(expr[&1], vec![0, 1]);
        assert_eq!(expr[&0], vec![p - 1, p - 1]);
    }
}
