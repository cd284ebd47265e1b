//! Point counts mod p, Hecke eigenvalues a_n and rational torsion.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::model::{CurveModel, Invariants};
use super::tate::{local_data, Reduction};
use crate::arith::{bigint_mod, factor_bigint, gcd, primes_up_to};
use crate::error::{Error, Result};

/// -sum of the quadratic character over x, i.e. a_p, for an odd prime of good
/// reduction, from the b-invariants reduced mod p.
fn ap_odd(b2: u64, b4: u64, b6: u64, p: u64) -> i64 {
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    for y in 1..p {
        chi[((y * y) % p) as usize] = 1;
    }
    let mut s: i64 = 0;
    for x in 0..p {
        let x2 = x * x % p;
        let f = (4 * (x2 * x % p) + b2 * x2 + 2 * b4 % p * x + b6) % p;
        s += chi[f as usize] as i64;
    }
    -s
}

fn ap_two(e: &CurveModel) -> i64 {
    let a: Vec<u64> = e.a.iter().map(|x| bigint_mod(x, 2)).collect();
    let mut count = 1i64;
    for x in 0..2u64 {
        for y in 0..2u64 {
            let v = y * y + a[0] * x * y + a[2] * y + x * x * x + a[1] * x * x + a[3] * x + a[4];
            if v % 2 == 0 {
                count += 1;
            }
        }
    }
    3 - count
}

/// a_p for a prime of good reduction.
pub fn ap_good(e: &CurveModel, inv: &Invariants, p: u64) -> i64 {
    if p == 2 {
        return ap_two(e);
    }
    ap_odd(bigint_mod(&inv.b2, p), bigint_mod(&inv.b4, p), bigint_mod(&inv.b6, p), p)
}

/// a_p for any prime: trace of Frobenius if good, else 1, -1, 0.
pub fn ap(e: &CurveModel, p: u64) -> i64 {
    let inv = e.invariants();
    if bigint_mod(&inv.disc, p) != 0 {
        return ap_good(e, &inv, p);
    }
    let ld = local_data(e, p);
    match ld.reduction {
        Reduction::Good => ap_good(e, &inv, p),
        Reduction::SplitMultiplicative => 1,
        Reduction::NonsplitMultiplicative => -1,
        Reduction::Additive => 0,
    }
}

/// Number of points over F_p, p of good reduction.
pub fn count_points(e: &CurveModel, p: u64) -> u64 {
    let inv = e.invariants();
    (p as i64 + 1 - ap_good(e, &inv, p)) as u64
}

/// Coefficients a_1..a_n of the L-series (index 0 unused), given a_p for the
/// bad primes.
pub fn an_list(e: &CurveModel, bad: &[(u64, i64)], n: usize) -> Vec<i64> {
    let inv = e.invariants();
    let mut a = vec![0i64; n + 1];
    if n == 0 {
        return a;
    }
    a[1] = 1;
    let primes = primes_up_to(n as u64);
    // Smallest prime factor sieve for multiplicativity.
    let mut spf = vec![0u32; n + 1];
    for &p in &primes {
        let mut m = p as usize;
        while m <= n {
            if spf[m] == 0 {
                spf[m] = p as u32;
            }
            m += p as usize;
        }
    }
    let mut aprime = vec![0i64; n + 1];
    for &p in &primes {
        aprime[p as usize] = match bad.iter().find(|(q, _)| *q == p) {
            Some(&(_, v)) => v,
            None => ap_good(e, &inv, p),
        };
    }
    for m in 2..=n {
        let p = spf[m] as usize;
        let mut q = p;
        let mut rest = m / p;
        while rest % p == 0 {
            rest /= p;
            q *= p;
        }
        if rest > 1 {
            a[m] = a[q] * a[rest];
            continue;
        }
        // m = p^k
        if q == p {
            a[m] = aprime[p];
        } else {
            let is_bad = bad.iter().any(|(b, _)| *b as usize == p);
            a[m] = if is_bad {
                a[p] * a[m / p]
            } else {
                a[p] * a[m / p] - p as i64 * a[m / p / p]
            };
        }
    }
    a
}

/// An upper bound for the torsion order: gcd of #E(F_p) over good primes.
pub fn torsion_bound(e: &CurveModel) -> u64 {
    let inv = e.invariants();
    let mut g = 0u64;
    let mut used = 0;
    for p in primes_up_to(1000).into_iter().filter(|&p| p >= 5) {
        if bigint_mod(&inv.disc, p) == 0 {
            continue;
        }
        let n = (p as i64 + 1 - ap_good(e, &inv, p)) as u64;
        g = gcd(g, n);
        used += 1;
        if used == 12 || g == 1 {
            break;
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq)]
enum Pt {
    Inf,
    Aff(BigRational, BigRational),
}

fn add(p: &Pt, q: &Pt, a: &BigRational) -> Pt {
    match (p, q) {
        (Pt::Inf, _) => q.clone(),
        (_, Pt::Inf) => p.clone(),
        (Pt::Aff(x1, y1), Pt::Aff(x2, y2)) => {
            let lambda = if x1 == x2 {
                if (y1 + y2).is_zero() {
                    return Pt::Inf;
                }
                let three = BigRational::from_integer(BigInt::from(3));
                let two = BigRational::from_integer(BigInt::from(2));
                (three * x1 * x1 + a) / (two * y1)
            } else {
                (y2 - y1) / (x2 - x1)
            };
            let x3 = &lambda * &lambda - x1 - x2;
            let y3 = &lambda * (x1 - &x3) - y1;
            Pt::Aff(x3, y3)
        }
    }
}

fn is_torsion(x: &BigInt, y: &BigInt, a: &BigInt) -> bool {
    let a = BigRational::from_integer(a.clone());
    let p = Pt::Aff(BigRational::from_integer(x.clone()), BigRational::from_integer(y.clone()));
    let mut q = p.clone();
    for _ in 1..=12 {
        match &q {
            Pt::Inf => return true,
            Pt::Aff(qx, qy) => {
                if !qx.is_integer() || !qy.is_integer() {
                    return false;
                }
            }
        }
        q = add(&q, &p, &a);
    }
    q == Pt::Inf
}

/// Integer roots of X^3 + a X + c, by exact bisection on the monotone pieces.
fn integer_roots(a: &BigInt, c: &BigInt) -> Vec<BigInt> {
    let eval = |x: &BigInt| x * x * x + a * x + c;
    let one = BigInt::from(1);
    let bound: BigInt = a.abs().max(c.abs()) + 1;
    // zero of an increasing function on integers in [lo, hi]
    let search = |mut lo: BigInt, mut hi: BigInt, increasing: bool| -> Option<BigInt> {
        if lo > hi {
            return None;
        }
        while lo < hi {
            let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
            let v = eval(&mid);
            let below = if increasing { v.is_negative() } else { v.is_positive() };
            if below {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        eval(&lo).is_zero().then_some(lo)
    };
    let mut out: Vec<BigInt> = Vec::new();
    let push = |x: Option<BigInt>, out: &mut Vec<BigInt>| {
        if let Some(x) = x {
            if !out.contains(&x) {
                out.push(x);
            }
        }
    };
    if a.is_negative() {
        // critical points at +-sqrt(-a/3); s_lo <= sqrt(-a/3) < s_lo + 1
        let third: BigInt = -a / 3;
        let s_lo = third.sqrt();
        let s_hi = &s_lo + &one;
        for x in [-&s_hi, -&s_lo, s_lo.clone(), s_hi.clone()] {
            if eval(&x).is_zero() {
                push(Some(x), &mut out);
            }
        }
        push(search(-&bound, -&s_hi, true), &mut out);
        push(search(-&s_lo, s_lo.clone(), false), &mut out);
        push(search(s_hi, bound.clone(), true), &mut out);
    } else {
        push(search(-&bound, bound.clone(), true), &mut out);
    }
    out
}

/// Order of the rational torsion subgroup (Lutz-Nagell on the short model).
pub fn torsion_order(e: &CurveModel) -> Result<u64> {
    let bound = torsion_bound(e);
    if bound == 1 {
        return Ok(1);
    }
    let inv = e.invariants();
    let a = -&inv.c4 * 27;
    let b = -&inv.c6 * 54;
    // 4A^3 + 27B^2 = -2^8 3^12 disc
    let mut fac = factor_bigint(&inv.disc)?;
    for (p, k) in [(2u64, 8u32), (3, 12)] {
        match fac.iter_mut().find(|(q, _)| *q == p) {
            Some((_, e)) => *e += k,
            None => fac.push((p, k)),
        }
    }
    let mut ys: Vec<BigInt> = vec![BigInt::from(1)];
    for &(p, k) in &fac {
        let mut next = Vec::new();
        for y in &ys {
            let mut m = y.clone();
            for _ in 0..=k / 2 {
                next.push(m.clone());
                m *= p;
            }
        }
        ys = next;
    }
    ys.push(BigInt::zero());
    let mut count = 1u64;
    for y in ys {
        for x in integer_roots(&a, &(&b - &y * &y)) {
            if y.is_zero() {
                count += 1;
            } else if is_torsion(&x, &y, &a) {
                count += 2;
            }
        }
    }
    if bound % count != 0 {
        return Err(Error::Precondition(format!(
            "torsion search found {count} points, not dividing the bound {bound}"
        )));
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eleven_a() {
        let e = CurveModel::from_i64([0, -1, 1, -10, -20]);
        assert_eq!(ap(&e, 2), -2);
        assert_eq!(ap(&e, 3), -1);
        assert_eq!(ap(&e, 5), 1);
        assert_eq!(ap(&e, 7), -2);
        assert_eq!(ap(&e, 11), 1);
        assert_eq!(torsion_order(&e).unwrap(), 5);
        let an = an_list(&e, &[(11, 1)], 12);
        // q - 2q^2 - q^3 + 2q^4 + q^5 + 2q^6 - 2q^7 - 2q^9 - 2q^10 + q^11 - 2q^12
        assert_eq!(&an[1..], &[1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2]);
    }

    #[test]
    fn torsion_examples() {
        assert_eq!(torsion_order(&CurveModel::from_i64([1, 0, 1, -33, 68])).unwrap(), 6);
        assert_eq!(torsion_order(&CurveModel::from_i64([0, 1, 1, -1373, 19131])).unwrap(), 3);
        assert_eq!(torsion_order(&CurveModel::from_i64([0, -1, 0, -3540, -79900])).unwrap(), 2);
        // 37a1 has trivial torsion
        assert_eq!(torsion_order(&CurveModel::from_i64([0, 0, 1, -1, 0])).unwrap(), 1);
        // 11a3: two of the x-coordinates on the short model coincide
        assert_eq!(torsion_order(&CurveModel::from_i64([0, -1, 1, 0, 0])).unwrap(), 5);
    }
}
