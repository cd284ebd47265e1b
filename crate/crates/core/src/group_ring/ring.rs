//! Localisations Z[T^-1] of Z and elements of the group ring R[G].

use std::collections::BTreeSet;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::group::FiniteAbelianGroup;
use crate::arith::{factor_u64, prime_divisors};

/// R = Z[T^-1] for a finite set of primes T.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubringOfQ {
    pub inverted: BTreeSet<u64>,
}

impl SubringOfQ {
    pub fn integers() -> Self {
        Self::default()
    }

    pub fn with_primes(primes: impl IntoIterator<Item = u64>) -> Self {
        SubringOfQ { inverted: primes.into_iter().collect() }
    }

    /// Smallest subring containing all the values.
    pub fn smallest(values: &[Rational64]) -> Self {
        let mut inverted = BTreeSet::new();
        for v in values {
            inverted.extend(prime_divisors(v.denom().unsigned_abs()));
        }
        SubringOfQ { inverted }
    }

    pub fn join(&self, other: &SubringOfQ) -> Self {
        SubringOfQ { inverted: self.inverted.union(&other.inverted).copied().collect() }
    }

    pub fn contains(&self, r: &Rational64) -> bool {
        prime_divisors(r.denom().unsigned_abs()).iter().all(|p| self.inverted.contains(p))
    }

    /// Whether n is a unit of R.
    pub fn is_unit(&self, n: u64) -> bool {
        n != 0 && prime_divisors(n).iter().all(|p| self.inverted.contains(p))
    }

    /// Primes l with l | #G and 1/l not in R.
    pub fn s_primes(&self, group: &FiniteAbelianGroup) -> Vec<u64> {
        factor_u64(group.order()).into_iter().map(|(l, _)| l).filter(|l| !self.inverted.contains(l)).collect()
    }
}

/// Element of Q[G] with one coefficient per group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingElement {
    pub coeffs: Vec<Rational64>,
}

impl GroupRingElement {
    pub fn zero(group: &FiniteAbelianGroup) -> Self {
        GroupRingElement { coeffs: vec![Rational64::zero(); group.order() as usize] }
    }

    pub fn basis(group: &FiniteAbelianGroup, g: usize) -> Self {
        let mut e = Self::zero(group);
        e.coeffs[g] = Rational64::one();
        e
    }

    /// [g] - [e].
    pub fn augmentation_generator(group: &FiniteAbelianGroup, g: usize) -> Self {
        let mut e = Self::basis(group, g);
        e.coeffs[group.identity()] -= Rational64::one();
        e
    }

    pub fn from_terms(group: &FiniteAbelianGroup, terms: &[(usize, Rational64)]) -> Self {
        let mut e = Self::zero(group);
        for &(g, c) in terms {
            e.coeffs[g] += c;
        }
        e
    }

    pub fn augmentation(&self) -> Rational64 {
        self.coeffs.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        GroupRingElement { coeffs: self.coeffs.iter().zip(other.coeffs.iter()).map(|(a, b)| a + b).collect() }
    }

    pub fn scale(&self, r: Rational64) -> Self {
        GroupRingElement { coeffs: self.coeffs.iter().map(|a| a * r).collect() }
    }

    pub fn mul(&self, other: &Self, group: &FiniteAbelianGroup) -> Self {
        let mut out = Self::zero(group);
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                if !cb.is_zero() {
                    out.coeffs[group.mul(a, b)] += ca * cb;
                }
            }
        }
        out
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator(&self) -> i64 {
        self.coeffs.iter().fold(1i64, |l, c| l.lcm(c.denom()))
    }

    /// Whether all coefficients lie in R.
    pub fn in_ring(&self, r: &SubringOfQ) -> bool {
        self.coeffs.iter().all(|c| r.contains(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_subrings() {
        let r = SubringOfQ::smallest(&[Rational64::from(0), Rational64::from(-1), Rational64::from(1)]);
        assert!(r.inverted.is_empty());
        let r = SubringOfQ::smallest(&[Rational64::new(1, 2), Rational64::from(3)]);
        assert_eq!(r.inverted, BTreeSet::from([2]));
        let r = SubringOfQ::smallest(&[Rational64::new(8, 8)]);
        assert!(r.inverted.is_empty());
    }

    #[test]
    fn s_primes_of_small_groups() {
        let g7 = super::super::group::build_group(7).unwrap();
        let g5 = super::super::group::build_group(5).unwrap();
        assert_eq!(SubringOfQ::integers().s_primes(&g7), vec![3]);
        assert_eq!(SubringOfQ::integers().s_primes(&g5), vec![2]);
        assert!(SubringOfQ::with_primes([2]).s_primes(&g5).is_empty());
    }
}
