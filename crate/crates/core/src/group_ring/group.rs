//! Finite abelian groups in invariant-factor form, including G_M = (Z/MZ)^* / <-1>.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::intmat::smith;
use super::quotient::LevelData;
use crate::arith::{factor_u64, gcd, inv_mod, powmod, primitive_root_prime_power, valuation_u64};
use crate::error::{Error, Result};

/// Elements are indexed by their exponent vectors in mixed radix.
#[derive(Debug)]
pub struct FiniteAbelianGroup {
    modulus: Option<u64>,
    invariants: Vec<u64>,
    order: u64,
    /// residue mod M -> element index, usize::MAX for non-units (G_M only)
    index_of: Vec<usize>,
    /// canonical representative min(a, M - a) of each element (G_M only)
    reps: Vec<u64>,
    pub(crate) levels: Mutex<HashMap<u32, Arc<LevelData>>>,
}

impl Clone for FiniteAbelianGroup {
    fn clone(&self) -> Self {
        FiniteAbelianGroup {
            modulus: self.modulus,
            invariants: self.invariants.clone(),
            order: self.order,
            index_of: self.index_of.clone(),
            reps: self.reps.clone(),
            levels: Mutex::new(HashMap::new()),
        }
    }
}

/// Invariant factors (all > 1, each dividing the next) of a product of cyclic groups.
pub fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    let n = orders.len();
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(if i == j { orders[i] } else { 0 })).collect())
        .collect();
    let (diag, _) = smith(&rows, n);
    diag.into_iter().map(|d| d.to_u64().unwrap()).filter(|&d| d > 1).collect()
}

impl FiniteAbelianGroup {
    /// Abstract group with the given invariant factors (normalised first).
    pub fn from_invariants(orders: &[u64]) -> Self {
        let invariants = invariant_factors(orders);
        let order = invariants.iter().product();
        FiniteAbelianGroup {
            modulus: None,
            invariants,
            order,
            index_of: Vec::new(),
            reps: Vec::new(),
            levels: Mutex::new(HashMap::new()),
        }
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Exponent of the group (largest invariant factor).
    pub fn exponent(&self) -> u64 {
        self.invariants.last().copied().unwrap_or(1)
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order as usize
    }

    pub fn exponents(&self, g: usize) -> Vec<u64> {
        let mut g = g as u64;
        self.invariants
            .iter()
            .map(|&d| {
                let x = g % d;
                g /= d;
                x
            })
            .collect()
    }

    pub fn from_exponents(&self, x: &[i64]) -> usize {
        let mut idx = 0u64;
        let mut radix = 1u64;
        for (&xi, &d) in x.iter().zip(self.invariants.iter()) {
            idx += xi.rem_euclid(d as i64) as u64 * radix;
            radix *= d;
        }
        idx as usize
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        let x: Vec<i64> =
            self.exponents(a).iter().zip(self.exponents(b).iter()).map(|(&u, &v)| (u + v) as i64).collect();
        self.from_exponents(&x)
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let x: Vec<i64> = self
            .exponents(a)
            .iter()
            .zip(self.invariants.iter())
            .map(|(&u, &d)| ((u as i128 * k as i128).rem_euclid(d as i128)) as i64)
            .collect();
        self.from_exponents(&x)
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.pow(a, -1)
    }

    pub fn element_order(&self, a: usize) -> u64 {
        self.exponents(a)
            .iter()
            .zip(self.invariants.iter())
            .fold(1u64, |l, (&x, &d)| {
                let o = d / gcd(x, d);
                l / gcd(l, o) * o
            })
    }

    /// Element represented by the residue a (G_M only).
    pub fn element_of(&self, a: i64) -> Option<usize> {
        let m = self.modulus?;
        let r = a.rem_euclid(m as i64) as usize;
        let i = self.index_of[r];
        (i != usize::MAX).then_some(i)
    }

    /// Canonical representative min(a, M - a) (G_M only).
    pub fn representative(&self, g: usize) -> Option<u64> {
        self.reps.get(g).copied()
    }

    /// The l-part of the order: l^k with #G = l^k m, gcd(l, m) = 1.
    pub fn sylow_order(&self, l: u64) -> u64 {
        l.pow(valuation_u64(self.order, l))
    }

    /// Projection onto the l-Sylow subgroup, g -> g^(m (m^-1 mod l^k)).
    pub fn sylow_project(&self, g: usize, l: u64) -> usize {
        let lk = self.sylow_order(l);
        if lk == 1 {
            return self.identity();
        }
        let m = self.order / lk;
        let minv = inv_mod(m as i64, lk).unwrap();
        let e = (m as u128 * minv as u128 % self.order as u128) as i64;
        self.pow(g, e)
    }

    /// Coordinates of the l-Sylow part of g: the i-th exponent modulo the
    /// l-part of the i-th invariant factor.
    pub fn sylow_vector(&self, g: usize, l: u64) -> Vec<u64> {
        self.exponents(g)
            .iter()
            .zip(self.invariants.iter())
            .map(|(&x, &d)| x % l.pow(valuation_u64(d, l)))
            .collect()
    }

    /// l-parts of the invariant factors.
    pub fn sylow_moduli(&self, l: u64) -> Vec<u64> {
        self.invariants.iter().map(|&d| l.pow(valuation_u64(d, l))).collect()
    }

    /// The unique h with h^den = g^num; needs gcd(den, #G) = 1.
    pub fn fractional_power(&self, g: usize, num: i64, den: i64) -> Result<usize> {
        if den == 0 {
            return Err(Error::GroupRing("zero denominator".into()));
        }
        let e = self.exponent().max(1);
        let inv = inv_mod(den, e).ok_or_else(|| {
            Error::GroupRing(format!("denominator {den} is not coprime to the group order {}", self.order))
        })?;
        let k = (num as i128).rem_euclid(e as i128) * inv as i128 % e as i128;
        Ok(self.pow(g, k as i64))
    }
}

/// Process-wide cache of the groups G_M, so that lattice data is shared.
pub fn shared_group(m: u64) -> Result<Arc<FiniteAbelianGroup>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<FiniteAbelianGroup>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(g) = cache.lock().unwrap().get(&m) {
        return Ok(g.clone());
    }
    let g = Arc::new(build_group(m)?);
    Ok(cache.lock().unwrap().entry(m).or_insert(g).clone())
}

/// G_M = (Z/MZ)^* / <-1>.
pub fn build_group(m: u64) -> Result<FiniteAbelianGroup> {
    if m == 0 {
        return Err(Error::Precondition("modulus must be positive".into()));
    }
    if m > 50_000_000 {
        return Err(Error::SizeCap(format!("modulus {m} too large")));
    }
    if m <= 2 {
        let mut index_of = vec![usize::MAX; m as usize];
        index_of[(1 % m) as usize] = 0;
        return Ok(FiniteAbelianGroup {
            modulus: Some(m),
            invariants: Vec::new(),
            order: 1,
            index_of,
            reps: vec![1 % m],
            levels: Mutex::new(HashMap::new()),
        });
    }
    // cyclic generators of (Z/M)^* with their orders, and -1 in those coordinates
    let mut gens: Vec<(u64, u64)> = Vec::new();
    let mut minus_one: Vec<i64> = Vec::new();
    for (p, e) in factor_u64(m) {
        let pe = p.pow(e);
        let lift = |r: u64| crate::arith::crt(&[(r % pe, pe), (1, m / pe)]);
        if p == 2 {
            match e {
                1 => {}
                2 => {
                    gens.push((lift(pe - 1), 2));
                    minus_one.push(1);
                }
                _ => {
                    gens.push((lift(pe - 1), 2));
                    minus_one.push(1);
                    gens.push((lift(5), pe / 4));
                    minus_one.push(0);
                }
            }
        } else {
            let phi = pe / p * (p - 1);
            gens.push((lift(primitive_root_prime_power(p, e)), phi));
            minus_one.push((phi / 2) as i64);
        }
    }
    let k = gens.len();
    let mut rel: Vec<Vec<BigInt>> = (0..k)
        .map(|i| (0..k).map(|j| BigInt::from(if i == j { gens[i].1 } else { 0 })).collect())
        .collect();
    rel.push(minus_one.iter().map(|&x| BigInt::from(x)).collect());
    let (diag, v) = smith(&rel, k);
    let keep: Vec<usize> = (0..k).filter(|&j| diag[j] != BigInt::from(1)).collect();
    let invariants: Vec<u64> = keep.iter().map(|&j| diag[j].to_u64().unwrap()).collect();
    let vcols: Vec<Vec<i64>> = keep
        .iter()
        .map(|&j| v.iter().map(|r| (&r[j]).try_into().expect("small transform entries")).collect())
        .collect();
    let order: u64 = invariants.iter().product();
    let mut g = FiniteAbelianGroup {
        modulus: Some(m),
        invariants,
        order,
        index_of: vec![usize::MAX; m as usize],
        reps: vec![u64::MAX; order as usize],
        levels: Mutex::new(HashMap::new()),
    };
    // walk all exponent vectors of the generators
    let mut x = vec![0u64; k];
    loop {
        let mut r = 1u64;
        for (&(h, _), &xi) in gens.iter().zip(x.iter()) {
            r = r * powmod(h, xi, m) % m;
        }
        let y: Vec<i64> = vcols
            .iter()
            .zip(g.invariants.iter())
            .map(|(col, &d)| {
                let s: i128 = col.iter().zip(x.iter()).map(|(&c, &xi)| c as i128 * xi as i128).sum();
                s.rem_euclid(d as i128) as i64
            })
            .collect();
        let idx = g.from_exponents(&y);
        g.index_of[r as usize] = idx;
        let canon = r.min(m - r);
        if canon < g.reps[idx] {
            g.reps[idx] = canon;
        }
        // next vector
        let mut i = 0;
        while i < k {
            x[i] += 1;
            if x[i] < gens[i].1 {
                break;
            }
            x[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_moduli() {
        let g7 = build_group(7).unwrap();
        assert_eq!(g7.order(), 3);
        let mut reps: Vec<u64> = g7.elements().map(|e| g7.representative(e).unwrap()).collect();
        reps.sort();
        assert_eq!(reps, vec![1, 2, 3]);
        let g5 = build_group(5).unwrap();
        assert_eq!(g5.invariants(), &[2]);
        assert_ne!(g5.element_of(2).unwrap(), g5.identity());
        assert_eq!(build_group(1).unwrap().order(), 1);
        assert_eq!(build_group(2).unwrap().order(), 1);
        assert_eq!(g5.element_of(4), g5.element_of(1));
    }

    #[test]
    fn homomorphism_from_residues() {
        for m in [3u64, 8, 15, 16, 24, 40, 63, 105, 680, 1001] {
            let g = build_group(m).unwrap();
            let phi: u64 = (1..m).filter(|&a| gcd(a, m) == 1).count() as u64;
            assert_eq!(g.order(), if m <= 2 { 1 } else { phi / 2 }, "M = {m}");
            for a in (1..m).filter(|&a| gcd(a, m) == 1) {
                for b in (1..m).filter(|&b| gcd(b, m) == 1).take(12) {
                    let ab = (a * b % m) as i64;
                    assert_eq!(g.mul(g.element_of(a as i64).unwrap(), g.element_of(b as i64).unwrap()), g.element_of(ab).unwrap());
                }
            }
        }
    }

    #[test]
    fn fractional_power_in_g7_units() {
        // In the order-3 subgroup <2> of (Z/7)^*, 2^(1/2) = 4.
        let g = build_group(7).unwrap();
        let two = g.element_of(2).unwrap();
        let h = g.fractional_power(two, 1, 2).unwrap();
        assert_eq!(g.pow(h, 2), two);
        assert_eq!(h, g.element_of(4).unwrap());
        assert!(g.fractional_power(two, 1, 3).is_err());
    }
}
