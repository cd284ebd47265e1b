//! Hermite and Smith normal forms over Z.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Row = Vec<BigInt>;

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

/// Row-echelon Hermite basis of the lattice spanned by `rows`: nonzero rows,
/// strictly increasing pivot columns, positive pivots, entries above a pivot
/// reduced into [0, pivot).
pub fn hnf(rows: &[Row], ncols: usize) -> Vec<Row> {
    let mut work: Vec<Row> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut out: Vec<Row> = Vec::new();
    for c in 0..ncols {
        loop {
            let nz: Vec<usize> = (0..work.len()).filter(|&i| !work[i][c].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| work[i][c].abs()).unwrap();
            let pr = work[piv].clone();
            for &i in &nz {
                if i != piv {
                    let q = floor_div(&work[i][c], &pr[c]);
                    for (x, y) in work[i].iter_mut().zip(pr.iter()) {
                        *x -= &q * y;
                    }
                }
            }
        }
        if let Some(i) = (0..work.len()).find(|&i| !work[i][c].is_zero()) {
            let mut r = work.swap_remove(i);
            if r[c].is_negative() {
                for x in r.iter_mut() {
                    *x = -&*x;
                }
            }
            for prev in out.iter_mut() {
                let q = floor_div(&prev[c], &r[c]);
                if !q.is_zero() {
                    for (x, y) in prev.iter_mut().zip(r.iter()) {
                        *x -= &q * y;
                    }
                }
            }
            out.push(r);
        }
        work.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    out
}

/// Smith form of Z^n / rowspace(a): returns the invariant factors greater than
/// one and, for each of them, the column of the transform V such that the
/// coordinate of x is (x . column) mod factor.
#[derive(Clone, Debug)]
pub struct SmithQuotient {
    pub factors: Vec<BigInt>,
    pub columns: Vec<Row>,
    pub ncols: usize,
}

impl SmithQuotient {
    pub fn coordinates(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.factors
            .iter()
            .zip(self.columns.iter())
            .map(|(f, col)| {
                let s: BigInt = x.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
                s.mod_floor(f)
            })
            .collect()
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().product()
    }
}

/// Smith normal form of a matrix with the column transform tracked. A zero
/// diagonal entry stands for a free summand and is reported as factor 0.
pub fn smith(a: &[Row], ncols: usize) -> (Vec<BigInt>, Vec<Row>) {
    let mut m: Vec<Row> = a.to_vec();
    let nrows = m.len();
    // v is ncols x ncols, starts as identity
    let mut v: Vec<Row> = (0..ncols)
        .map(|i| (0..ncols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut diag = Vec::new();
    let steps = nrows.min(ncols);
    for t in 0..steps {
        // smallest nonzero entry in the lower-right block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nrows {
            for j in t..ncols {
                if !m[i][j].is_zero() && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap(t, bi);
        swap_cols(&mut m, t, bj);
        swap_cols(&mut v, t, bj);
        loop {
            let mut changed = false;
            // clear column t below the pivot
            for i in t + 1..nrows {
                if !m[i][t].is_zero() {
                    let q = floor_div(&m[i][t], &m[t][t]);
                    let pr = m[t].clone();
                    for (x, y) in m[i].iter_mut().zip(pr.iter()) {
                        *x -= &q * y;
                    }
                    if !m[i][t].is_zero() {
                        m.swap(t, i);
                        changed = true;
                    }
                }
            }
            // clear row t right of the pivot
            for j in t + 1..ncols {
                if !m[t][j].is_zero() {
                    let q = floor_div(&m[t][j], &m[t][t]);
                    col_axpy(&mut m, j, t, &q);
                    col_axpy(&mut v, j, t, &q);
                    if !m[t][j].is_zero() {
                        swap_cols(&mut m, t, j);
                        swap_cols(&mut v, t, j);
                        changed = true;
                    }
                }
            }
            if changed {
                continue;
            }
            // divisibility of the remaining block by the pivot
            let p = m[t][t].clone();
            let bad = (t + 1..nrows).find(|&i| (t + 1..ncols).any(|j| !(&m[i][j] % &p).is_zero()));
            match bad {
                Some(i) => {
                    let r = m[i].clone();
                    for (x, y) in m[t].iter_mut().zip(r.iter()) {
                        *x += y;
                    }
                }
                None => break,
            }
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -&*x;
            }
        }
        diag.push(m[t][t].clone());
    }
    while diag.len() < ncols {
        diag.push(BigInt::zero());
    }
    (diag, v)
}

fn swap_cols(m: &mut [Row], a: usize, b: usize) {
    if a != b {
        for r in m.iter_mut() {
            r.swap(a, b);
        }
    }
}

/// column j -= q * column t
fn col_axpy(m: &mut [Row], j: usize, t: usize, q: &BigInt) {
    for r in m.iter_mut() {
        let y = r[t].clone();
        r[j] -= q * y;
    }
}

/// Finite quotient Z^ncols / L for a full-rank lattice L.
pub fn quotient(rows: &[Row], ncols: usize) -> SmithQuotient {
    let h = hnf(rows, ncols);
    let (diag, v) = smith(&h, ncols);
    let mut factors = Vec::new();
    let mut columns = Vec::new();
    for (j, d) in diag.iter().enumerate() {
        if !d.is_one() {
            factors.push(d.clone());
            columns.push(v.iter().map(|r| r[j].clone()).collect());
        }
    }
    SmithQuotient { factors, columns, ncols }
}

/// Coordinates of x in the basis given by an upper-echelon Hermite basis
/// `h` of full rank; None if x is not in the lattice.
pub fn solve_hnf(h: &[Row], x: &[BigInt]) -> Option<Row> {
    let mut rest = x.to_vec();
    let mut coeffs = Vec::with_capacity(h.len());
    for row in h {
        let c = row.iter().position(|v| !v.is_zero())?;
        let (q, r) = rest[c].div_mod_floor(&row[c]);
        if !r.is_zero() {
            return None;
        }
        for (a, b) in rest.iter_mut().zip(row.iter()) {
            *a -= &q * b;
        }
        coeffs.push(q);
    }
    if rest.iter().all(|v| v.is_zero()) {
        Some(coeffs)
    } else {
        None
    }
}

/// Sub-lattice incrementally reduced to echelon form modulo E, for lattices
/// known to contain E Z^n.
#[derive(Clone, Debug)]
pub struct ModLattice {
    e: BigInt,
    /// pivot row for each column; the pivot entry divides E
    rows: Vec<Row>,
}

impl ModLattice {
    pub fn new(n: usize, e: BigInt) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { e.clone() } else { BigInt::zero() }).collect())
            .collect();
        ModLattice { e, rows }
    }

    pub fn insert(&mut self, v: &[BigInt]) {
        let e = self.e.clone();
        let mut v: Row = v.iter().map(|x| x.mod_floor(&e)).collect();
        for c in 0..v.len() {
            if v[c].is_zero() {
                continue;
            }
            let piv = &self.rows[c];
            let ext = piv[c].extended_gcd(&v[c]);
            let (g, s, t) = (ext.gcd, ext.x, ext.y);
            let a = &piv[c] / &g;
            let b = &v[c] / &g;
            let new_piv: Row = piv.iter().zip(v.iter()).map(|(x, y)| (&s * x + &t * y).mod_floor(&e)).collect();
            let new_v: Row = piv.iter().zip(v.iter()).map(|(x, y)| (&a * y - &b * x).mod_floor(&e)).collect();
            let mut np = new_piv;
            if np[c].is_zero() {
                np[c] = e.clone();
            }
            self.rows[c] = np;
            v = new_v;
        }
    }

    /// Square upper-triangular basis.
    pub fn basis(&self) -> Vec<Row> {
        self.rows.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[i64]) -> Row {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn smith_examples() {
        let q = quotient(&[r(&[2, 4]), r(&[6, 8])], 2);
        // det = -8, gcd of entries 2
        assert_eq!(q.factors, vec![BigInt::from(2), BigInt::from(4)]);
        let q = quotient(&[r(&[3, 0]), r(&[0, 5])], 2);
        assert_eq!(q.factors, vec![BigInt::from(15)]);
    }

    #[test]
    fn coordinates_vanish_on_lattice() {
        let rows = [r(&[4, 6, 2]), r(&[0, 3, 9]), r(&[5, 1, 7])];
        let q = quotient(&rows, 3);
        for row in &rows {
            assert!(q.coordinates(row).iter().all(|c| c.is_zero()));
        }
        let total: BigInt = q.order();
        assert_eq!(total, BigInt::from(4 * (21 - 9) - 6 * (0 - 45) + 2 * (0 - 15)).abs());
    }

    #[test]
    fn mod_lattice_matches_hnf() {
        let e = BigInt::from(36);
        let gens = [r(&[2, 3]), r(&[4, 0])];
        let mut ml = ModLattice::new(2, e.clone());
        for g in &gens {
            ml.insert(g);
        }
        let mut all: Vec<Row> = gens.to_vec();
        all.push(r(&[36, 0]));
        all.push(r(&[0, 36]));
        let a = quotient(&ml.basis(), 2);
        let b = quotient(&all, 2);
        assert_eq!(a.factors, b.factors);
    }
}
