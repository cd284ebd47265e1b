use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over Z.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveModel {
    pub a: [BigInt; 5],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub b2: BigInt,
    pub b4: BigInt,
    pub b6: BigInt,
    pub b8: BigInt,
    pub c4: BigInt,
    pub c6: BigInt,
    pub disc: BigInt,
}

impl CurveModel {
    pub fn new(a: [BigInt; 5]) -> Self {
        CurveModel { a }
    }

    pub fn from_i64(a: [i64; 5]) -> Self {
        CurveModel { a: a.map(BigInt::from) }
    }

    pub fn a1(&self) -> &BigInt {
        &self.a[0]
    }
    pub fn a2(&self) -> &BigInt {
        &self.a[1]
    }
    pub fn a3(&self) -> &BigInt {
        &self.a[2]
    }
    pub fn a4(&self) -> &BigInt {
        &self.a[3]
    }
    pub fn a6(&self) -> &BigInt {
        &self.a[4]
    }

    /// The change of variables x = u^2 x' + r, y = u^3 y' + s u^2 x' + t.
    /// Returns `None` if the result is not integral.
    pub fn transform(&self, r: &BigInt, s: &BigInt, t: &BigInt, u: &BigInt) -> Option<CurveModel> {
        let [a1, a2, a3, a4, a6] = &self.a;
        let n1 = a1 + s * 2u32;
        let n2 = a2 - s * a1 + r * 3u32 - s * s;
        let n3 = a3 + r * a1 + t * 2u32;
        let n4 = a4 - s * a3 + r * a2 * 2u32 - (t + r * s) * a1 + r * r * 3u32 - s * t * 2u32;
        let n6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
        let mut out = [n1, n2, n3, n4, n6];
        let pows = [1u32, 2, 3, 4, 6];
        for (c, &k) in out.iter_mut().zip(pows.iter()) {
            let d = num_traits::pow(u.clone(), k as usize);
            if !(&*c % &d).is_zero() {
                return None;
            }
            *c = &*c / d;
        }
        Some(CurveModel { a: out })
    }

    pub fn rst(&self, r: &BigInt, s: &BigInt, t: &BigInt) -> CurveModel {
        self.transform(r, s, t, &BigInt::one()).unwrap()
    }

    pub fn invariants(&self) -> Invariants {
        compute_invariants(self)
    }

    pub fn discriminant(&self) -> BigInt {
        self.invariants().disc
    }

    pub fn j_invariant(&self) -> Result<num_rational::BigRational> {
        let inv = self.invariants();
        if inv.disc.is_zero() {
            return Err(Error::Singular);
        }
        Ok(num_rational::BigRational::new(&inv.c4 * &inv.c4 * &inv.c4, inv.disc))
    }
}

impl fmt::Display for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{},{},{}]", self.a[0], self.a[1], self.a[2], self.a[3], self.a[4])
    }
}

pub fn compute_invariants(m: &CurveModel) -> Invariants {
    let [a1, a2, a3, a4, a6] = &m.a;
    let b2 = a1 * a1 + a2 * 4u32;
    let b4 = a4 * 2u32 + a1 * a3;
    let b6 = a3 * a3 + a6 * 4u32;
    let b8 = a1 * a1 * a6 + a2 * a6 * 4u32 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    let c4 = &b2 * &b2 - &b4 * 24u32;
    let c6 = -(&b2 * &b2 * &b2) + &b2 * &b4 * 36u32 - &b6 * 216u32;
    let disc = -(&b2 * &b2 * &b8) - &b4 * &b4 * &b4 * 8u32 - &b6 * &b6 * 27u32 + &b2 * &b4 * &b6 * 9u32;
    Invariants { b2, b4, b6, b8, c4, c6, disc }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_11a1() {
        let e = CurveModel::from_i64([0, -1, 1, -10, -20]);
        let inv = e.invariants();
        assert_eq!(inv.c4, BigInt::from(496));
        assert_eq!(inv.c6, BigInt::from(20008));
        assert_eq!(inv.disc, BigInt::from(-161051));
        assert_eq!(&inv.c4 * &inv.c4 * &inv.c4 - &inv.c6 * &inv.c6, inv.disc * 1728u32);
    }

    #[test]
    fn transform_preserves_disc_up_to_u12() {
        let e = CurveModel::from_i64([1, 0, 1, -33, 68]);
        let r = BigInt::from(3);
        let s = BigInt::from(-2);
        let t = BigInt::from(5);
        let e2 = e.rst(&r, &s, &t);
        assert_eq!(e.discriminant(), e2.discriminant());
        assert_eq!(e.invariants().c4, e2.invariants().c4);
    }
}
