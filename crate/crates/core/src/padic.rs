//! Finite-precision p-adic numbers and the Tate parameter of a split multiplicative curve.

use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::valuation;
use crate::curves::{CurveRecord, Reduction};
use crate::error::{Error, Result};

/// Extra digits beyond ord_p(disc) used when no precision is requested.
pub const DEFAULT_EXTRA_DIGITS: u32 = 16;

/// Valuation of the zero element.
pub const INFINITE_VALUATION: i64 = i64::MAX;

/// x = p^valuation * unit, with unit known modulo p^(precision - valuation).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicNumber {
    p: u64,
    valuation: i64,
    /// unit part reduced into [0, p^relative_precision)
    unit: BigInt,
    /// absolute precision: x is known modulo p^precision
    precision: i64,
}

fn pow(p: u64, e: i64) -> BigInt {
    num_traits::pow(BigInt::from(p), e.max(0) as usize)
}

impl PadicNumber {
    pub fn zero(p: u64, precision: i64) -> Self {
        PadicNumber { p, valuation: INFINITE_VALUATION, unit: BigInt::zero(), precision }
    }

    /// The rational integer x known modulo p^precision.
    pub fn from_integer(p: u64, x: &BigInt, precision: i64) -> Self {
        if x.is_zero() {
            return Self::zero(p, precision);
        }
        let v = valuation(x, p) as i64;
        if v >= precision {
            return Self::zero(p, precision);
        }
        let unit = x / pow(p, v);
        Self::normalised(p, v, unit, precision)
    }

    /// n / d for integers with d != 0.
    pub fn from_rational(p: u64, n: &BigInt, d: &BigInt, precision: i64) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::Precondition("division by zero".into()));
        }
        let vd = valuation(d, p) as i64;
        let den = Self::from_integer(p, d, precision + 2 * vd);
        let num = Self::from_integer(p, n, precision + vd);
        num.div(&den)
    }

    fn normalised(p: u64, valuation: i64, unit: BigInt, precision: i64) -> Self {
        let m = pow(p, precision - valuation);
        PadicNumber { p, valuation, unit: unit.mod_floor(&m), precision }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.valuation == INFINITE_VALUATION
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn relative_precision(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            self.precision - self.valuation
        }
    }

    /// Base-p digits of the unit part, least significant first.
    pub fn digits(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut u = self.unit.clone();
        let pb = BigInt::from(self.p);
        for _ in 0..self.relative_precision() {
            let (q, r) = u.div_mod_floor(&pb);
            out.push(r.to_u64().unwrap());
            u = q;
        }
        out
    }

    /// Representative in [0, p^precision) when the valuation is non-negative.
    pub fn lift(&self) -> BigInt {
        if self.is_zero() {
            return BigInt::zero();
        }
        &self.unit * pow(self.p, self.valuation)
    }

    fn check_prime(&self, other: &Self) {
        assert_eq!(self.p, other.p, "p-adic numbers for different primes");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_prime(other);
        let prec = self.precision.min(other.precision);
        if self.is_zero() {
            return other.with_precision(prec);
        }
        if other.is_zero() {
            return self.with_precision(prec);
        }
        let v = self.valuation.min(other.valuation);
        let a = &self.unit * pow(self.p, self.valuation - v);
        let b = &other.unit * pow(self.p, other.valuation - v);
        let s = a + b;
        if s.is_zero() {
            return Self::zero(self.p, prec);
        }
        let k = valuation(&s, self.p) as i64;
        if v + k >= prec {
            return Self::zero(self.p, prec);
        }
        Self::normalised(self.p, v + k, s / pow(self.p, k), prec)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self::normalised(self.p, self.valuation, -&self.unit, self.precision)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_prime(other);
        if self.is_zero() || other.is_zero() {
            let prec = match (self.is_zero(), other.is_zero()) {
                (true, true) => self.precision + other.precision,
                (true, false) => self.precision + other.valuation,
                _ => other.precision + self.valuation,
            };
            return Self::zero(self.p, prec);
        }
        let v = self.valuation + other.valuation;
        let rel = self.relative_precision().min(other.relative_precision());
        Self::normalised(self.p, v, &self.unit * &other.unit, v + rel)
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Precondition("inverse of zero".into()));
        }
        let rel = self.relative_precision();
        let m = pow(self.p, rel);
        let inv = mod_inverse(&self.unit, &m)
            .ok_or_else(|| Error::Precondition("unit part is not invertible".into()))?;
        Ok(Self::normalised(self.p, -self.valuation, inv, rel - self.valuation))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }

    /// Same number with precision lowered to `prec` (never raised).
    pub fn with_precision(&self, prec: i64) -> Self {
        let prec = prec.min(self.precision);
        if self.is_zero() || self.valuation >= prec {
            return Self::zero(self.p, prec);
        }
        Self::normalised(self.p, self.valuation, self.unit.clone(), prec)
    }

    /// (ord_p, unit) with the unit of valuation zero.
    pub fn unit_part(&self) -> Result<(i64, PadicNumber)> {
        if self.is_zero() {
            return Err(Error::Precondition("unit part of zero".into()));
        }
        let rel = self.relative_precision();
        Ok((self.valuation, PadicNumber { p: self.p, valuation: 0, unit: self.unit.clone(), precision: rel }))
    }

    /// Residue modulo p^e of a number of valuation zero.
    pub fn unit_residue(&self, e: u32) -> Result<u64> {
        if self.is_zero() || self.valuation != 0 {
            return Err(Error::Precondition("expected a p-adic unit".into()));
        }
        if (e as i64) > self.precision {
            return Err(Error::PrecisionUnderflow { requested: e, available: self.precision.max(0) as u32 });
        }
        Ok(self.unit.mod_floor(&pow(self.p, e as i64)).to_u64().unwrap())
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        let mut terms = Vec::new();
        if !self.is_zero() {
            for (i, d) in self.digits().into_iter().enumerate() {
                if d == 0 {
                    continue;
                }
                let e = self.valuation + i as i64;
                let base = match e {
                    0 => String::new(),
                    1 => format!("{p}"),
                    _ => format!("{p}^{e}"),
                };
                terms.push(match (d, base.is_empty()) {
                    (_, true) => d.to_string(),
                    (1, false) => base,
                    (_, false) => format!("{d}*{base}"),
                });
            }
        }
        let big_o = if self.precision == 1 { format!("O({p})") } else { format!("O({p}^{})", self.precision) };
        terms.push(big_o);
        write!(f, "{}", terms.join(" + "))
    }
}

/// Coefficients of h(q) with 1/j(q) = q h(q), h = prod (1 - q^n)^24 / E4(q)^3.
static H_SERIES: Mutex<Vec<BigInt>> = Mutex::new(Vec::new());

fn sigma3(n: u64) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += BigInt::from(d).pow(3);
            let e = n / d;
            if e != d {
                s += BigInt::from(e).pow(3);
            }
        }
        d += 1;
    }
    s
}

fn mul_trunc(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// First `len` coefficients of h.
pub fn inverse_j_series(len: usize) -> Vec<BigInt> {
    let mut cache = H_SERIES.lock().unwrap();
    if cache.len() < len {
        // prod (1 - q^n)^24
        let mut eta = vec![BigInt::zero(); len];
        eta[0] = BigInt::one();
        for n in 1..len {
            for _ in 0..24 {
                for k in (n..len).rev() {
                    let t = eta[k - n].clone();
                    eta[k] -= t;
                }
            }
        }
        let mut e4 = vec![BigInt::zero(); len];
        e4[0] = BigInt::one();
        for (n, c) in e4.iter_mut().enumerate().skip(1) {
            *c = sigma3(n as u64) * 240u32;
        }
        let e4_3 = mul_trunc(&mul_trunc(&e4, &e4, len), &e4, len);
        // divide eta by e4^3 (leading coefficient 1)
        let mut h = vec![BigInt::zero(); len];
        for k in 0..len {
            let mut c = eta[k].clone();
            for i in 1..=k {
                c -= &e4_3[i] * &h[k - i];
            }
            h[k] = c;
        }
        *cache = h;
    }
    cache[..len].to_vec()
}

/// Evaluate a polynomial with integer coefficients at x modulo m.
fn horner(coeffs: &[BigInt], x: &BigInt, m: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in coeffs.iter().rev() {
        acc = (acc * x + c).mod_floor(m);
    }
    acc
}

/// Tate parameter q_p, known modulo p^precision (absolute precision).
pub fn tate_parameter(record: &CurveRecord, p: u64, precision: u32) -> Result<PadicNumber> {
    let local = record.local_at(p).ok_or(Error::NotSplit { p })?;
    if local.reduction != Reduction::SplitMultiplicative {
        return Err(Error::NotSplit { p });
    }
    let inv = record.model.invariants();
    let v = valuation(&inv.disc, p) as i64;
    let a = precision as i64;
    if a <= v {
        return Err(Error::PrecisionUnderflow { requested: precision, available: v as u32 + 1 });
    }
    let m = pow(p, a);
    // u = 1/j = disc / c4^3, a number of valuation v
    let c4_3 = inv.c4.pow(3);
    let u = PadicNumber::from_rational(p, &inv.disc, &c4_3, a)?.lift().mod_floor(&m);
    let terms = (a / v + 2) as usize;
    let h = inverse_j_series(terms);
    // derivative of q h(q): coefficients (k + 1) h_k
    let dh: Vec<BigInt> = h.iter().enumerate().map(|(k, c)| c * (k as u64 + 1)).collect();
    let mut qh = vec![BigInt::zero()];
    qh.extend(h.iter().cloned());
    // Newton on F(q) = q h(q) - u from q = u; F'(q) is a unit.
    let mut q = u.clone();
    for _ in 0..64 {
        let f = (horner(&qh, &q, &m) - &u).mod_floor(&m);
        if f.is_zero() {
            break;
        }
        let df = horner(&dh, &q, &m);
        let idf = mod_inverse(&df, &m).ok_or_else(|| Error::Precondition("derivative not a unit".into()))?;
        q = (q - f * idf).mod_floor(&m);
    }
    let residual = (horner(&qh, &q, &m) - &u).mod_floor(&m);
    if !residual.is_zero() {
        return Err(Error::Convergence { terms, needed: terms + 1 });
    }
    Ok(PadicNumber::from_integer(p, &q, a))
}

/// q_p with the default precision ord_p(disc) + DEFAULT_EXTRA_DIGITS.
pub fn tate_parameter_default(record: &CurveRecord, p: u64) -> Result<PadicNumber> {
    let v = valuation(&record.discriminant(), p);
    tate_parameter(record, p, v + DEFAULT_EXTRA_DIGITS)
}

/// (ord_p q, unit part of q).
pub fn unit_part(q: &PadicNumber) -> Result<(i64, PadicNumber)> {
    q.unit_part()
}

/// Canonical representative min(a, p - a) of the unit's class in G_p.
pub fn reduce_to_gp(unit: &PadicNumber) -> Result<u64> {
    let r = unit.unit_residue(1)?;
    let p = unit.prime();
    Ok(r.min(p - r))
}

/// Image of a unit of Z_p in (Z/MZ)^*, via (Z/p^e)^* and the CRT embedding
/// that is 1 at the other primes of M.
pub fn unit_to_modulus(unit: &PadicNumber, m: u64) -> Result<u64> {
    let p = unit.prime();
    if m % p != 0 {
        return Err(Error::Precondition(format!("{p} does not divide {m}")));
    }
    let mut pe = 1u64;
    let mut rest = m;
    let mut e = 0u32;
    while rest % p == 0 {
        rest /= p;
        pe *= p;
        e += 1;
    }
    let r = unit.unit_residue(e)?;
    Ok(crate::arith::crt(&[(r, pe), (1, rest)]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::CurveModel;

    #[test]
    fn j_series_known_terms() {
        // j = 1/q + 744 + 196884 q + ..., so 1/j = q - 744 q^2 + 356652 q^3 - ...
        let h = inverse_j_series(4);
        assert_eq!(h[0], BigInt::from(1));
        assert_eq!(h[1], BigInt::from(-744));
        assert_eq!(h[2], BigInt::from(744i64 * 744 - 196884));
    }

    #[test]
    fn tate_680c1() {
        let e = CurveModel::from_i64([0, -1, 0, -3540, -79900]);
        let r = CurveRecord::new("680.c1", e, 0, Some(1)).unwrap();
        let q = tate_parameter(&r, 5, 9).unwrap();
        assert_eq!(q.to_string(), "2*5^4 + 3*5^5 + 2*5^6 + 4*5^7 + 3*5^8 + O(5^9)");
        let (ord, u) = unit_part(&q).unwrap();
        assert_eq!(ord, 4);
        assert_eq!(reduce_to_gp(&u).unwrap(), 2);
    }

    #[test]
    fn display_forms() {
        let x = PadicNumber::from_integer(5, &BigInt::from(1 + 5 + 2 * 25), 4);
        assert_eq!(x.to_string(), "1 + 5 + 2*5^2 + O(5^4)");
        let z = PadicNumber::zero(7, 3);
        assert_eq!(z.to_string(), "O(7^3)");
        let one = PadicNumber::from_integer(3, &BigInt::from(27), 10);
        assert_eq!(one.unit_part().unwrap().0, 3);
        assert_eq!(one.unit_part().unwrap().1.unit_residue(1).unwrap(), 1);
    }
}
