//! Direct computations in Z[G] on the basis of group elements, used to
//! cross-check the truncated-polynomial model. Exponential in n; only for
//! small groups.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::group::FiniteAbelianGroup;
use super::intmat::{hnf, quotient, solve_hnf, Row};

fn product_row(group: &FiniteAbelianGroup, factors: &[usize]) -> Row {
    let n = group.order() as usize;
    let mut cur = vec![BigInt::zero(); n];
    cur[group.identity()] = BigInt::from(1);
    for &g in factors {
        let mut next = vec![BigInt::zero(); n];
        for (h, c) in cur.iter().enumerate() {
            if !c.is_zero() {
                next[group.mul(h, g)] += c;
                next[h] -= c;
            }
        }
        cur = next;
    }
    cur
}

fn multisets(k: usize, n: u32, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == n as usize {
        out.push(cur.clone());
        return;
    }
    for i in start..k {
        cur.push(i);
        multisets(k, n, i, cur, out);
        cur.pop();
    }
}

/// Hermite basis of I^n in Z^#G, spanned by products of n elements [g] - [e].
pub fn aug_power_lattice(group: &FiniteAbelianGroup, n: u32) -> Vec<Row> {
    let gens: Vec<usize> = group.elements().filter(|&g| g != group.identity()).collect();
    let mut sets = Vec::new();
    multisets(gens.len(), n, 0, &mut Vec::new(), &mut sets);
    let rows: Vec<Row> = sets
        .iter()
        .map(|s| product_row(group, &s.iter().map(|&i| gens[i]).collect::<Vec<_>>()))
        .collect();
    hnf(&rows, group.order() as usize)
}

/// Invariant factors of I^n / I^(n+1).
pub fn graded_quotient_brute(group: &FiniteAbelianGroup, n: u32) -> Vec<u64> {
    let upper = aug_power_lattice(group, n);
    let lower = aug_power_lattice(group, n + 1);
    let rows: Vec<Row> = lower.iter().map(|v| solve_hnf(&upper, v).expect("nested lattices")).collect();
    quotient(&rows, upper.len()).factors.iter().map(|f| f.to_u64().unwrap()).collect()
}

/// Class of an integral element of I^n in I^n / I^(n+1), as coordinates
/// against the Smith factors returned alongside.
pub fn class_brute(group: &FiniteAbelianGroup, n: u32, x: &[BigInt]) -> Option<(Vec<BigInt>, Vec<BigInt>)> {
    let upper = aug_power_lattice(group, n);
    let lower = aug_power_lattice(group, n + 1);
    let rows: Vec<Row> = lower.iter().map(|v| solve_hnf(&upper, v).expect("nested lattices")).collect();
    let q = quotient(&rows, upper.len());
    let coords = solve_hnf(&upper, x)?;
    Some((q.coordinates(&coords), q.factors))
}
