//! Real periods via the arithmetic-geometric mean, and the L-value at s = 1.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::model::CurveModel;
use crate::error::{Error, Result};

/// Bits of precision available from the f64 implementation.
pub const PERIOD_PRECISION_BITS: u32 = 53;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodData {
    /// Least positive real period if the discriminant is positive, half of it
    /// otherwise. Mazur-Tate coefficients are normalised by this number.
    pub omega_plus: f64,
    /// Least positive real period of the lattice.
    pub real_period: f64,
    pub precision_bits: u32,
    /// Whether the period lattice is rectangular (positive discriminant).
    pub rectangular: bool,
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a.abs() {
            break;
        }
        let m = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = m;
    }
    0.5 * (a + b)
}

/// Fixed-point scale for root isolation.
const FIX_BITS: u64 = 256;

/// Cubic 4x^3 + b2 x^2 + 2 b4 x + b6 evaluated at X / 2^FIX_BITS, scaled by 2^(3 FIX_BITS).
fn cubic_fixed(c: &[BigInt; 4], x: &BigInt) -> BigInt {
    let s = BigInt::one() << FIX_BITS;
    ((&c[0] * x + &c[1] * &s) * x + &c[2] * &s * &s) * x + &c[3] * &s * &s * &s
}

/// Root of the cubic in [lo, hi] (fixed point), given a sign change.
fn bisect(c: &[BigInt; 4], mut lo: BigInt, mut hi: BigInt) -> BigInt {
    let flo = cubic_fixed(c, &lo).signum();
    while &hi - &lo > BigInt::one() {
        let mid: BigInt = (&lo + &hi) >> 1;
        let fm = cubic_fixed(c, &mid).signum();
        if fm.is_zero() {
            return mid;
        }
        if fm == flo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Real roots of 4x^3 + b2 x^2 + 2 b4 x + b6 in fixed point, sorted descending.
fn real_roots_fixed(b2: &BigInt, b4: &BigInt, b6: &BigInt) -> Vec<BigInt> {
    let c = [BigInt::from(4), b2.clone(), b4 * 2u32, b6.clone()];
    let one = BigInt::one() << FIX_BITS;
    let bound = (b2.abs().max(b4.abs() * 2u32).max(b6.abs()) + 1u32) * &one;
    // critical points (-b2 +- sqrt(b2^2 - 24 b4)) / 12
    let dd: BigInt = b2 * b2 - b4 * 24u32;
    let mut cuts = vec![-bound.clone()];
    if dd.is_positive() {
        let r = (dd << (2 * FIX_BITS)).sqrt();
        let base = -(b2 * &one);
        cuts.push((&base - &r) / 12);
        cuts.push((&base + &r) / 12);
    }
    cuts.push(bound);
    let mut roots = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let (fl, fh) = (cubic_fixed(&c, lo).signum(), cubic_fixed(&c, hi).signum());
        if fl.is_zero() {
            roots.push(lo.clone());
        } else if !fh.is_zero() && fl != fh {
            roots.push(bisect(&c, lo.clone(), hi.clone()));
        }
    }
    if let Some(f) = cuts.last() {
        if cubic_fixed(&c, f).is_zero() {
            roots.push(f.clone());
        }
    }
    roots.sort_by(|x, y| y.cmp(x));
    roots.dedup();
    roots
}

fn fixed_to_f64(x: &BigInt) -> f64 {
    // keep 64 significant bits before converting
    let bits = x.bits();
    if bits > 64 {
        let sh = bits - 64;
        (x >> sh).to_f64().unwrap() * 2f64.powi(sh as i32 - FIX_BITS as i32)
    } else {
        x.to_f64().unwrap() * 2f64.powi(-(FIX_BITS as i32))
    }
}

pub fn period_data(model: &CurveModel, precision_bits: u32) -> Result<PeriodData> {
    if precision_bits > PERIOD_PRECISION_BITS {
        return Err(Error::PrecisionUnderflow { requested: precision_bits, available: PERIOD_PRECISION_BITS });
    }
    let inv = model.invariants();
    if inv.disc.is_zero() {
        return Err(Error::Singular);
    }
    let pi = std::f64::consts::PI;
    let positive = inv.disc.is_positive();
    // Roots are isolated in fixed point so that their differences keep full
    // precision even when they are close together.
    let r = real_roots_fixed(&inv.b2, &inv.b4, &inv.b6);
    let real_period = if positive {
        if r.len() != 3 {
            return Err(Error::Precondition("expected three real 2-division points".into()));
        }
        let d13 = fixed_to_f64(&(&r[0] - &r[2]));
        let d12 = fixed_to_f64(&(&r[0] - &r[1]));
        pi / agm(d13.sqrt(), d12.sqrt())
    } else {
        let e1 = &r[0];
        let one = BigInt::one() << FIX_BITS;
        // a = 3 e1 + b2 / 4, b^2 = 3 e1^2 + b2 e1 / 2 + b4 / 2, all scaled by 2^FIX_BITS
        let a: BigInt = e1 * 3u32 + ((&inv.b2 * &one) >> 2);
        let b_sq: BigInt = ((e1 * e1 * 3u32) >> FIX_BITS) + ((e1 * &inv.b2) >> 1) + ((&inv.b4 * &one) >> 1);
        let b = (b_sq << FIX_BITS).sqrt();
        let t: BigInt = &b * 2u32 + &a;
        2.0 * pi / agm(2.0 * fixed_to_f64(&b).sqrt(), fixed_to_f64(&t).sqrt())
    };
    Ok(PeriodData {
        omega_plus: if positive { real_period } else { real_period / 2.0 },
        real_period,
        precision_bits: PERIOD_PRECISION_BITS,
        rectangular: positive,
    })
}

/// Partial sum sum_{n <= N} chi(n) a_n / n exp(-2 pi n / (D sqrt(cond))), doubled.
/// With chi trivial and D = 1 this is L(E, 1) when the root number is +1.
pub fn l_series_sum(an: &[i64], conductor: u64, twist: Option<(i64, u64)>) -> f64 {
    let (d, chi): (u64, Box<dyn Fn(u64) -> i32>) = match twist {
        None => (1, Box::new(|_| 1)),
        Some((disc, m)) => (m, Box::new(move |n| crate::arith::kronecker(disc, n))),
    };
    let x = 2.0 * std::f64::consts::PI / (d as f64 * (conductor as f64).sqrt());
    let mut s = 0.0;
    let r = (-x).exp();
    let mut w = 1.0;
    for (n, &a) in an.iter().enumerate().skip(1) {
        w *= r;
        if a != 0 {
            let c = chi(n as u64);
            if c != 0 {
                s += (c as i64 * a) as f64 / n as f64 * w;
            }
        }
    }
    2.0 * s
}

/// Terms needed so that the tail of the series above is below 1e-16.
pub fn terms_needed(conductor: u64, d: u64) -> usize {
    let scale = d as f64 * (conductor as f64).sqrt() / (2.0 * std::f64::consts::PI);
    (scale * 40.0).ceil() as usize + 10
}

/// Root number from the functional equation evaluated at two points.
pub fn root_number(an: &[i64], conductor: u64) -> Result<i32> {
    let sq = (conductor as f64).sqrt();
    let sum = |t: f64| -> (f64, f64) {
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for (n, &a) in an.iter().enumerate().skip(1) {
            if a == 0 {
                continue;
            }
            let nf = n as f64;
            s1 += a as f64 / nf * (-2.0 * std::f64::consts::PI * nf / (t * sq)).exp();
            s2 += a as f64 / nf * (-2.0 * std::f64::consts::PI * nf * t / sq).exp();
        }
        (s1, s2)
    };
    let needed = (terms_needed(conductor, 1) as f64 * 1.2) as usize;
    if an.len() < needed {
        return Err(Error::Convergence { terms: an.len(), needed });
    }
    let (a1, b1) = sum(1.0);
    let (a2, b2) = sum(1.2);
    // L(1) = S(t) + w S'(t) for every t > 0.
    let plus = ((a1 + b1) - (a2 + b2)).abs();
    let minus = ((a1 - b1) - (a2 - b2)).abs();
    if plus < minus {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// L(E, 1), zero when the root number is -1.
pub fn l_value_at_1(an: &[i64], conductor: u64) -> Result<f64> {
    let needed = terms_needed(conductor, 1);
    if an.len() < needed {
        return Err(Error::Convergence { terms: an.len(), needed });
    }
    if root_number(an, conductor)? == -1 {
        return Ok(0.0);
    }
    Ok(l_series_sum(&an[..needed], conductor, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::points::an_list;

    #[test]
    fn periods_11a() {
        let e = CurveModel::from_i64([0, -1, 1, -10, -20]);
        let pd = period_data(&e, 53).unwrap();
        assert!((pd.real_period - 1.26920930427955).abs() < 1e-12);
        assert!((pd.omega_plus - 0.634604652139777).abs() < 1e-12);
        assert!(period_data(&e, 128).is_err());
        // positive discriminant: 37a1 (disc 37)
        let e = CurveModel::from_i64([0, 0, 1, -1, 0]);
        let pd = period_data(&e, 53).unwrap();
        assert!(pd.rectangular);
        assert!((pd.real_period - 2.99345864623196).abs() < 1e-11);
    }

    #[test]
    fn l_values() {
        let e = CurveModel::from_i64([0, -1, 1, -10, -20]);
        let an = an_list(&e, &[(11, 1)], 2000);
        let l = l_value_at_1(&an, 11).unwrap();
        assert!((l - 0.253841860855911).abs() < 1e-12);
        let e = CurveModel::from_i64([0, 0, 1, -1, 0]);
        let an = an_list(&e, &[(37, -1)], 2000);
        assert_eq!(root_number(&an, 37).unwrap(), -1);
        assert_eq!(l_value_at_1(&an, 37).unwrap(), 0.0);
        assert!(l_value_at_1(&an[..5], 37).is_err());
    }
}
