//! Graded pieces Q_n(R, G) = I^n / I^(n+1) of the augmentation filtration.
//!
//! Writing G = prod Z/d_i with generators x_i and y_i = x_i - 1, the ring Z[G]
//! is Z[y]/((1 + y_i)^d_i - 1) with Z-basis the monomials y^a, a < d. The ideal
//! I^m is spanned by the reductions of all y^b with |b| >= m. Modulo the span
//! W of basis monomials of degree > n, which lies in I^(n+1), everything lives
//! in the free module V_n on basis monomials of degree 1..=n. The quotient
//! V_n / image(I^(n+1)) = I / I^(n+1) is killed by exp(G)^n, so lattices are
//! reduced modulo that number.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::group::FiniteAbelianGroup;
use super::intmat::{hnf, quotient, solve_hnf, ModLattice, Row, SmithQuotient};
use super::ring::{GroupRingElement, SubringOfQ};
use crate::arith::{binomial, inv_mod, valuation_u64};
use crate::error::{Error, Result};

/// Default cap on vanishing-order searches.
pub const DEFAULT_N_MAX: u32 = 8;

/// Element of Q_n(R, G), stored by its l-Sylow components for l in S.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientClass {
    pub level: u32,
    /// l -> coordinates, the i-th taken modulo moduli[l][i]
    pub components: BTreeMap<u64, Vec<u64>>,
    pub moduli: BTreeMap<u64, Vec<u64>>,
}

impl QuotientClass {
    pub fn is_zero(&self) -> bool {
        self.components.values().all(|v| v.iter().all(|&x| x == 0))
    }

    pub fn component_is_zero(&self, l: u64) -> bool {
        self.components.get(&l).is_none_or(|v| v.iter().all(|&x| x == 0))
    }

    /// Action of a rational r whose denominator is prime to every l in S.
    pub fn scale(&self, r: Rational64) -> Result<QuotientClass> {
        let mut out = self.clone();
        for (l, comp) in out.components.iter_mut() {
            let mods = &self.moduli[l];
            for (x, &m) in comp.iter_mut().zip(mods.iter()) {
                if m <= 1 {
                    *x = 0;
                    continue;
                }
                let di = inv_mod(*r.denom(), m).ok_or_else(|| {
                    Error::GroupRing(format!("denominator {} not invertible on the {l}-part", r.denom()))
                })?;
                let num = r.numer().rem_euclid(m as i64) as u128;
                *x = (*x as u128 * num % m as u128 * di as u128 % m as u128) as u64;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &QuotientClass) -> QuotientClass {
        let mut out = self.clone();
        for (l, comp) in out.components.iter_mut() {
            let mods = &self.moduli[l];
            if let Some(o) = other.components.get(l) {
                for ((x, &y), &m) in comp.iter_mut().zip(o.iter()).zip(mods.iter()) {
                    *x = if m <= 1 { 0 } else { (*x + y) % m };
                }
            }
        }
        out
    }

    /// Primes of S where the two classes differ.
    pub fn differing_primes(&self, other: &QuotientClass) -> Vec<u64> {
        self.components
            .keys()
            .filter(|l| self.components.get(l) != other.components.get(l))
            .copied()
            .collect()
    }
}

/// Result of a vanishing-order computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VanishingOrder {
    Exact(u32),
    /// theta lies in I^n for every n up to the bound
    AtLeast(u32),
}

impl VanishingOrder {
    pub fn at_least(&self, r: u32) -> bool {
        match *self {
            VanishingOrder::Exact(v) => v >= r,
            VanishingOrder::AtLeast(v) => v >= r,
        }
    }
}

fn mod_rational(r: &Rational64, m: u64) -> Result<u64> {
    if m <= 1 {
        return Ok(0);
    }
    let di = inv_mod(*r.denom(), m)
        .ok_or_else(|| Error::GroupRing(format!("coefficient {r} has denominator not invertible mod {m}")))?;
    Ok((r.numer().rem_euclid(m as i64) as u128 * di as u128 % m as u128) as u64)
}

fn check_element(theta: &GroupRingElement, group: &FiniteAbelianGroup, ring: &SubringOfQ, level: u32) -> Result<()> {
    if theta.coeffs.len() != group.order() as usize {
        return Err(Error::GroupRing("element and group sizes differ".into()));
    }
    if !theta.in_ring(ring) {
        return Err(Error::Membership { level: 0 });
    }
    if !theta.augmentation().is_zero() {
        return Err(Error::Membership { level: level.min(1) as usize });
    }
    Ok(())
}

/// The isomorphism I/I^2 -> G applied to theta and split into Sylow parts:
/// the l-component is prod_g pi_l(g)^(theta_g), for l in S.
pub fn phi_image(theta: &GroupRingElement, group: &FiniteAbelianGroup, ring: &SubringOfQ) -> Result<QuotientClass> {
    check_element(theta, group, ring, 1)?;
    let mut components = BTreeMap::new();
    let mut moduli = BTreeMap::new();
    for l in ring.s_primes(group) {
        let mods = group.sylow_moduli(l);
        let mut acc = vec![0u64; mods.len()];
        for g in group.elements() {
            let c = &theta.coeffs[g];
            if c.is_zero() {
                continue;
            }
            let v = group.sylow_vector(g, l);
            for ((a, &x), &m) in acc.iter_mut().zip(v.iter()).zip(mods.iter()) {
                if m > 1 {
                    let cm = mod_rational(c, m)?;
                    *a = ((*a as u128 + x as u128 * cm as u128) % m as u128) as u64;
                }
            }
        }
        components.insert(l, acc);
        moduli.insert(l, mods);
    }
    Ok(QuotientClass { level: 1, components, moduli })
}

/// Class of a single group element under phi: its Sylow vectors, for l in S.
pub fn element_class(group: &FiniteAbelianGroup, g: usize, ring: &SubringOfQ) -> QuotientClass {
    let mut components = BTreeMap::new();
    let mut moduli = BTreeMap::new();
    for l in ring.s_primes(group) {
        components.insert(l, group.sylow_vector(g, l));
        moduli.insert(l, group.sylow_moduli(l));
    }
    QuotientClass { level: 1, components, moduli }
}

/// Lattice data for the truncation V_n.
#[derive(Debug)]
pub struct LevelData {
    pub n: u32,
    pub monomials: Vec<Vec<u32>>,
    /// V_n / image(I^(n+1))
    pub ambient: SmithQuotient,
}

struct Reducer<'a> {
    d: &'a [u64],
    n: u32,
    index: &'a HashMap<Vec<u32>, usize>,
    e: BigInt,
    binom: Vec<Vec<BigInt>>,
    memo: HashMap<Vec<u32>, Row>,
}

impl Reducer<'_> {
    /// Coordinates in V_n of the reduction of y^beta, modulo E.
    fn reduce(&mut self, beta: &[u32]) -> Row {
        if let Some(r) = self.memo.get(beta) {
            return r.clone();
        }
        let k = self.index.len();
        let mut out = vec![BigInt::zero(); k];
        match (0..beta.len()).find(|&i| beta[i] as u64 >= self.d[i]) {
            None => {
                let deg: u32 = beta.iter().sum();
                if deg >= 1 && deg <= self.n {
                    out[self.index[beta]] = BigInt::from(1);
                }
            }
            Some(i) => {
                // y_i^d = -sum_{j=1}^{d-1} C(d, j) y_i^j
                let di = self.d[i] as u32;
                let mut b2 = beta.to_vec();
                for j in 1..di {
                    b2[i] = beta[i] - (di - j);
                    let c = self.binom[i][j as usize].clone();
                    if c.is_zero() {
                        continue;
                    }
                    let sub = self.reduce(&b2);
                    for (o, s) in out.iter_mut().zip(sub.iter()) {
                        if !s.is_zero() {
                            *o -= &c * s;
                        }
                    }
                }
                for o in out.iter_mut() {
                    *o = o.mod_floor(&self.e);
                }
            }
        }
        self.memo.insert(beta.to_vec(), out.clone());
        out
    }
}

fn monomials(d: &[u64], n: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; d.len()];
    fn rec(i: usize, left: u32, d: &[u64], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == d.len() {
            let deg: u32 = cur.iter().sum();
            if deg >= 1 {
                out.push(cur.clone());
            }
            return;
        }
        let top = left.min(d[i] as u32 - 1);
        for a in 0..=top {
            cur[i] = a;
            rec(i + 1, left - a, d, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, n, d, &mut cur, &mut out);
    out.sort_by(|a, b| a.iter().sum::<u32>().cmp(&b.iter().sum::<u32>()).then(a.cmp(b)));
    out
}

/// Generators of image(I^m) in V_n, all reduced modulo e.
fn ideal_power_generators(d: &[u64], n: u32, m: u32, e: &BigInt, mons: &[Vec<u32>]) -> Vec<Row> {
    let index: HashMap<Vec<u32>, usize> = mons.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
    let k = mons.len();
    let mut gens = Vec::new();
    for (i, a) in mons.iter().enumerate() {
        if a.iter().sum::<u32>() >= m {
            let mut r = vec![BigInt::zero(); k];
            r[i] = BigInt::from(1);
            gens.push(r);
        }
    }
    if m >= 2 {
        let binom = d
            .iter()
            .map(|&di| (0..=di).map(|j| binomial(di, j).mod_floor(e)).collect())
            .collect();
        let mut red = Reducer { d, n, index: &index, e: e.clone(), binom, memo: HashMap::new() };
        // y^b with b_i = d_i + t (0 <= t <= m - 2), the other entries summing to at most m - 2 - t
        // and |b| >= m; larger b reduce to these.
        for i in 0..d.len() {
            for t in 0..=(m - 2) {
                let rest_max = m - 2 - t;
                let others: Vec<usize> = (0..d.len()).filter(|&j| j != i).collect();
                let mut cur = vec![0u32; d.len()];
                cur[i] = d[i] as u32 + t;
                enumerate_rest(&others, 0, rest_max, &mut cur, &mut |b| {
                    if b.iter().sum::<u32>() >= m {
                        gens.push(red.reduce(b));
                    }
                });
            }
        }
    }
    gens
}

fn enumerate_rest(others: &[usize], pos: usize, left: u32, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if pos == others.len() {
        f(cur);
        return;
    }
    let j = others[pos];
    for a in 0..=left {
        cur[j] = a;
        enumerate_rest(others, pos + 1, left - a, cur, f);
    }
    cur[j] = 0;
}

fn modulus_for(group: &FiniteAbelianGroup, n: u32) -> BigInt {
    num_traits::pow(BigInt::from(group.exponent()), n as usize)
}

fn lattice(group: &FiniteAbelianGroup, n: u32, m: u32, mons: &[Vec<u32>]) -> Vec<Row> {
    let e = modulus_for(group, n);
    let mut ml = ModLattice::new(mons.len(), e.clone());
    for g in ideal_power_generators(group.invariants(), n, m, &e, mons) {
        ml.insert(&g);
    }
    ml.basis()
}

/// Cached lattice data for V_n.
pub fn level_data(group: &FiniteAbelianGroup, n: u32) -> Arc<LevelData> {
    if let Some(d) = group.levels.lock().unwrap().get(&n) {
        return d.clone();
    }
    let mons = monomials(group.invariants(), n);
    let basis = lattice(group, n, n + 1, &mons);
    let ambient = quotient(&basis, mons.len());
    let data = Arc::new(LevelData { n, monomials: mons, ambient });
    group.levels.lock().unwrap().insert(n, data.clone());
    data
}

/// Coordinates in V_n of an integral element sum c_g [g].
fn integral_coordinates(group: &FiniteAbelianGroup, coeffs: &[BigInt], mons: &[Vec<u32>]) -> Row {
    let mut out = vec![BigInt::zero(); mons.len()];
    for g in group.elements() {
        let c = &coeffs[g];
        if c.is_zero() {
            continue;
        }
        let a = group.exponents(g);
        for (o, alpha) in out.iter_mut().zip(mons.iter()) {
            let mut t = c.clone();
            for (&ai, &al) in a.iter().zip(alpha.iter()) {
                if al as u64 > ai {
                    t = BigInt::zero();
                    break;
                }
                if al > 0 {
                    t *= binomial(ai, al as u64);
                }
            }
            *o += t;
        }
    }
    out
}

fn clear_denominators(theta: &GroupRingElement) -> (i64, Vec<BigInt>) {
    let u = theta.denominator();
    let coeffs = theta.coeffs.iter().map(|c| BigInt::from((c * u).to_integer())).collect();
    (u, coeffs)
}

/// Class of an element of I(R, G) in R (x) I/I^(n+1), by Sylow parts over S.
fn ambient_class(theta: &GroupRingElement, group: &FiniteAbelianGroup, ring: &SubringOfQ, n: u32) -> Result<QuotientClass> {
    let s = ring.s_primes(group);
    let data = level_data(group, n);
    let (u, coeffs) = clear_denominators(theta);
    let x = integral_coordinates(group, &coeffs, &data.monomials);
    let c = data.ambient.coordinates(&x);
    let mut components = BTreeMap::new();
    let mut moduli = BTreeMap::new();
    for l in s {
        let mods: Vec<u64> = data
            .ambient
            .factors
            .iter()
            .map(|f| {
                let f = f.to_u64().expect("small invariant factor");
                l.pow(valuation_u64(f, l))
            })
            .collect();
        let comp: Vec<u64> = c
            .iter()
            .zip(mods.iter())
            .map(|(ci, &m)| if m <= 1 { 0 } else { ci.mod_floor(&BigInt::from(m)).to_u64().unwrap() })
            .collect();
        components.insert(l, comp);
        moduli.insert(l, mods);
    }
    let cls = QuotientClass { level: n, components, moduli };
    cls.scale(Rational64::new(1, u))
}

/// Whether theta lies in I(R, G)^m.
pub fn in_power(theta: &GroupRingElement, group: &FiniteAbelianGroup, ring: &SubringOfQ, m: u32) -> Result<bool> {
    check_element(theta, group, ring, 1)?;
    if m <= 1 || group.order() == 1 {
        return Ok(true);
    }
    Ok(ambient_class(theta, group, ring, m - 1)?.is_zero())
}

/// Primes l in S whose Sylow part keeps theta out of I(R, G)^m. An element
/// off the augmentation ideal is obstructed at every l in S.
pub fn obstruction_primes(theta: &GroupRingElement, group: &FiniteAbelianGroup, ring: &SubringOfQ, m: u32) -> Result<Vec<u64>> {
    if !theta.in_ring(ring) {
        return Err(Error::Membership { level: 0 });
    }
    if group.order() == 1 || m == 0 {
        return Ok(Vec::new());
    }
    if !theta.augmentation().is_zero() {
        return Ok(ring.s_primes(group));
    }
    if m == 1 {
        return Ok(Vec::new());
    }
    let cls = ambient_class(theta, group, ring, m - 1)?;
    Ok(cls.components.keys().filter(|&&l| !cls.component_is_zero(l)).copied().collect())
}

/// Image of theta in Q_r(R, G); theta must lie in I(R, G)^r.
pub fn class_in_qr(theta: &GroupRingElement, group: &FiniteAbelianGroup, ring: &SubringOfQ, r: u32) -> Result<QuotientClass> {
    if r == 0 {
        return Err(Error::Precondition("level must be at least 1".into()));
    }
    if !in_power(theta, group, ring, r)? {
        return Err(Error::Membership { level: r as usize });
    }
    ambient_class(theta, group, ring, r)
}

/// ord(theta): 0 off the augmentation ideal, else the r with theta in I^r but not I^(r+1).
pub fn vanishing_order(
    theta: &GroupRingElement,
    group: &FiniteAbelianGroup,
    ring: &SubringOfQ,
    n_max: u32,
) -> Result<VanishingOrder> {
    if !theta.in_ring(ring) {
        return Err(Error::Membership { level: 0 });
    }
    if !theta.augmentation().is_zero() {
        return Ok(VanishingOrder::Exact(0));
    }
    for r in 1..n_max {
        if !in_power(theta, group, ring, r + 1)? {
            return Ok(VanishingOrder::Exact(r));
        }
    }
    Ok(VanishingOrder::AtLeast(n_max))
}

/// Invariant factors of Q_n(Z, G).
pub fn graded_quotient(group: &FiniteAbelianGroup, n: u32) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::Precondition("level must be at least 1".into()));
    }
    if group.order() == 1 {
        return Ok(Vec::new());
    }
    let mons = monomials(group.invariants(), n);
    let upper = lattice(group, n, n, &mons);
    let lower = lattice(group, n, n + 1, &mons);
    let h = hnf(&upper, mons.len());
    let rows: Vec<Row> = lower
        .iter()
        .map(|v| solve_hnf(&h, v).ok_or_else(|| Error::GroupRing("I^(n+1) not inside I^n".into())))
        .collect::<Result<_>>()?;
    let q = quotient(&rows, h.len());
    Ok(q.factors.iter().map(|f| f.to_u64().unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::super::group::{build_group, FiniteAbelianGroup};
    use super::*;

    #[test]
    fn q1_is_the_group() {
        for inv in [vec![4u64], vec![2, 2], vec![2, 6], vec![3, 3], vec![12], vec![2, 2, 2]] {
            let g = FiniteAbelianGroup::from_invariants(&inv);
            assert_eq!(graded_quotient(&g, 1).unwrap(), g.invariants().to_vec());
        }
    }

    #[test]
    fn cyclic_graded_pieces() {
        // For cyclic G every Q_n is cyclic of order #G.
        for d in [2u64, 3, 4, 5, 6, 8, 9] {
            let g = FiniteAbelianGroup::from_invariants(&[d]);
            for n in 1..=4 {
                assert_eq!(graded_quotient(&g, n).unwrap(), vec![d], "d = {d}, n = {n}");
            }
        }
    }

    #[test]
    fn square_of_augmentation_generator() {
        // ([g] - [e])^2 in Z[Z/5] has order exactly 2.
        let g = FiniteAbelianGroup::from_invariants(&[5]);
        let x = GroupRingElement::augmentation_generator(&g, 1);
        let t = x.mul(&x, &g);
        let z = SubringOfQ::integers();
        assert_eq!(vanishing_order(&t, &g, &z, 6).unwrap(), VanishingOrder::Exact(2));
        assert_eq!(vanishing_order(&GroupRingElement::basis(&g, 0), &g, &z, 6).unwrap(), VanishingOrder::Exact(0));
        assert_eq!(vanishing_order(&GroupRingElement::zero(&g), &g, &z, 6).unwrap(), VanishingOrder::AtLeast(6));
    }

    #[test]
    fn phi_of_the_g7_witness() {
        // 0 [1] - 1 [2] + 1 [3] maps to 2^-1 * 3 = 5, which is not trivial in G_7.
        let g = build_group(7).unwrap();
        let theta = GroupRingElement::from_terms(
            &g,
            &[(g.element_of(2).unwrap(), Rational64::from(-1)), (g.element_of(3).unwrap(), Rational64::from(1))],
        );
        let z = SubringOfQ::integers();
        let c = phi_image(&theta, &g, &z).unwrap();
        assert_eq!(c, element_class(&g, g.element_of(5).unwrap(), &z));
        assert!(!c.is_zero());
    }
}
