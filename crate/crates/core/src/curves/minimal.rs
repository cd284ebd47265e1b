//! Global minimal models via the Laska-Kraus-Connell construction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::model::CurveModel;
use crate::arith::{factor_bigint, valuation};
use crate::error::{Error, Result};

/// Whether (c4, c6) are the invariants of a model integral at p (p = 2 or 3).
fn kraus_ok(c4: &BigInt, c6: &BigInt, p: u64) -> bool {
    match p {
        3 => valuation(c6, 3) != 2,
        2 => {
            let m4 = c6.mod_floor(&BigInt::from(4));
            if m4 == BigInt::from(3) {
                return true;
            }
            let m32 = c6.mod_floor(&BigInt::from(32));
            valuation(c4, 2) >= 4 && (m32.is_zero() || m32 == BigInt::from(8))
        }
        _ => true,
    }
}

/// Reduced global minimal model (a1, a3 in {0,1}, a2 in {-1,0,1}).
pub fn minimal_model(model: &CurveModel) -> Result<CurveModel> {
    let inv = model.invariants();
    if inv.disc.is_zero() {
        return Err(Error::Singular);
    }
    let (c4, c6) = (&inv.c4, &inv.c6);
    let mut u = BigInt::one();
    for (p, e) in factor_bigint(&inv.disc)? {
        let mut d = e / 12u32;
        if !c4.is_zero() {
            d = d.min(valuation(c4, p) / 4u32);
        }
        if !c6.is_zero() {
            d = d.min(valuation(c6, p) / 6u32);
        }
        if d == 0 {
            continue;
        }
        if p == 2 || p == 3 {
            let bp = BigInt::from(p);
            let c4s = c4 / num_traits::pow(bp.clone(), 4 * d as usize);
            let c6s = c6 / num_traits::pow(bp, 6 * d as usize);
            if !kraus_ok(&c4s, &c6s, p) {
                d -= 1;
            }
        }
        u *= num_traits::pow(BigInt::from(p), d as usize);
    }
    let c4 = c4 / num_traits::pow(u.clone(), 4);
    let c6 = c6 / num_traits::pow(u.clone(), 6);
    from_c_invariants(&c4, &c6)
}

/// The reduced model with the given c-invariants.
pub fn from_c_invariants(c4: &BigInt, c6: &BigInt) -> Result<CurveModel> {
    let twelve = BigInt::from(12);
    let mut b2 = (-c6).mod_floor(&twelve);
    if b2 > BigInt::from(6) {
        b2 -= &twelve;
    }
    let b4n = &b2 * &b2 - c4;
    if !(&b4n % 24u32).is_zero() {
        return Err(Error::Precondition("c-invariants do not come from an integral model".into()));
    }
    let b4 = b4n / 24u32;
    let b6n = -(&b2 * &b2 * &b2) + &b2 * &b4 * 36u32 - c6;
    if !(&b6n % 216u32).is_zero() {
        return Err(Error::Precondition("c-invariants do not come from an integral model".into()));
    }
    let b6 = b6n / 216u32;
    let two = BigInt::from(2);
    let a1 = b2.mod_floor(&two);
    let a3 = b6.mod_floor(&two);
    let a2 = (&b2 - &a1) / 4u32;
    let a4 = (&b4 - &a1 * &a3) / 2u32;
    let a6 = (&b6 - &a3) / 4u32;
    let m = CurveModel::new([a1, a2, a3, a4, a6]);
    let inv = m.invariants();
    if &inv.c4 != c4 || &inv.c6 != c6 {
        return Err(Error::Precondition("c-invariants do not come from an integral model".into()));
    }
    Ok(m)
}
