//! Elementary number theory on machine integers and a little on `BigInt`.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let a = a.rem_euclid(m as i64);
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

pub fn rem(a: i64, m: u64) -> u64 {
    a.rem_euclid(m as i64) as u64
}

pub fn bigint_mod(a: &BigInt, m: u64) -> u64 {
    let r = a.mod_floor(&BigInt::from(m));
    r.to_u64().unwrap()
}

/// All primes `<= n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn next_prime(n: u64) -> u64 {
    let mut m = n + 1;
    while !is_prime(m) {
        m += 1;
    }
    m
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorisation as sorted `(p, e)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut stack = vec![n];
    let mut big = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            big.push(m);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    big.sort_unstable();
    for p in big {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out.sort_unstable();
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor_u64(n).into_iter().map(|(p, _)| p).collect()
}

/// Factorisation of a nonzero big integer (sign ignored). Trial division to
/// 10^5, then Pollard rho once the cofactor fits in 64 bits.
pub fn factor_bigint(n: &BigInt) -> Result<Vec<(u64, u32)>> {
    if n.is_zero() {
        return Err(Error::Precondition("cannot factor zero".into()));
    }
    let mut m: BigUint = n.abs().to_biguint().unwrap();
    let mut out = Vec::new();
    for p in primes_up_to(100_000) {
        if m.bits() <= 64 {
            break;
        }
        let bp = BigUint::from(p);
        let mut e = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    match m.to_u64() {
        Some(small) => {
            for (p, e) in factor_u64(small) {
                match out.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, f)) => *f += e,
                    None => out.push((p, e)),
                }
            }
        }
        None => return Err(Error::Factorization(n.to_string())),
    }
    out.sort_unstable();
    Ok(out)
}

pub fn valuation(n: &BigInt, p: u64) -> u32 {
    if n.is_zero() {
        return u32::MAX;
    }
    let bp = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&bp);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Kronecker symbol (a/n) for n > 0.
pub fn kronecker(a: i64, n: u64) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut n = n;
    let mut result = 1i32;
    while n % 2 == 0 {
        n /= 2;
        if a % 2 == 0 {
            return 0;
        }
        let r = a.rem_euclid(8);
        if r == 3 || r == 5 {
            result = -result;
        }
    }
    // Jacobi symbol (a/n), n odd.
    let mut a = a.rem_euclid(n as i64) as u64;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Legendre symbol of a big integer modulo an odd prime.
pub fn legendre_big(a: &BigInt, p: u64) -> i32 {
    kronecker(bigint_mod(a, p) as i64, p)
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 || d == 0 {
        return false;
    }
    let squarefree = |m: u64| factor_u64(m).iter().all(|&(_, e)| e == 1);
    match d.rem_euclid(4) {
        1 => squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            let r = m.rem_euclid(4);
            (r == 2 || r == 3) && squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// A generator of the cyclic group (Z/p^e)^*, p odd.
pub fn primitive_root_prime_power(p: u64, e: u32) -> u64 {
    let phi_p = p - 1;
    let fac = prime_divisors(phi_p);
    let mut g = 2;
    loop {
        if fac.iter().all(|&q| powmod(g, phi_p / q, p) != 1) {
            break;
        }
        g += 1;
    }
    if e >= 2 && powmod(g, p - 1, p * p) == 1 {
        g += p;
    }
    g
}

/// Chinese remainder for pairwise coprime moduli.
pub fn crt(residues: &[(u64, u64)]) -> u64 {
    let mut x: u128 = 0;
    let mut m: u128 = 1;
    for &(r, n) in residues {
        let n = n as u128;
        let t = ((r as u128 + n - x % n) % n) * inv_mod((m % n) as i64, n as u64).unwrap() as u128 % n;
        x += m * t;
        m *= n;
    }
    x as u64
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut r = BigInt::one();
    for i in 0..k {
        r *= n - i;
        r /= i + 1;
    }
    r
}

/// Number of roots in F_p of a monic cubic x^3 + b x^2 + c x + d (distinct roots).
pub fn cubic_root_count(b: u64, c: u64, d: u64, p: u64) -> usize {
    if p <= 2000 {
        return (0..p)
            .filter(|&x| {
                let v = (mulmod(mulmod(x, x, p), (x + b) % p, p) + mulmod(c, x, p) + d) % p;
                v == 0
            })
            .count();
    }
    // degree of gcd(x^p - x, f)
    let f = [d % p, c % p, b % p, 1];
    let xp = poly_pow_x(p, &f, p);
    let mut g = xp;
    // subtract x
    if g.len() < 2 {
        g.resize(2, 0);
    }
    g[1] = (g[1] + p - 1) % p;
    let gg = poly_gcd(f.to_vec(), g, p);
    gg.len().saturating_sub(1)
}

fn poly_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_mulmod_cubic(a: &[u64], b: &[u64], f: &[u64; 4], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mulmod(x, y, p)) % p;
        }
    }
    for k in (3..prod.len()).rev() {
        let c = prod[k];
        if c != 0 {
            for (t, &fc) in f.iter().enumerate().take(3) {
                prod[k - 3 + t] = (prod[k - 3 + t] + p - mulmod(c, fc, p)) % p;
            }
            prod[k] = 0;
        }
    }
    prod.truncate(3);
    poly_trim(prod)
}

fn poly_pow_x(e: u64, f: &[u64; 4], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut base = vec![0u64, 1];
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            result = poly_mulmod_cubic(&result, &base, f, p);
        }
        base = poly_mulmod_cubic(&base, &base, f, p);
        e >>= 1;
    }
    result
}

fn poly_gcd(a: Vec<u64>, b: Vec<u64>, p: u64) -> Vec<u64> {
    let mut a = poly_trim(a);
    let mut b = poly_trim(b);
    while !b.is_empty() {
        // a mod b
        let inv = inv_mod(*b.last().unwrap() as i64, p).unwrap();
        while a.len() >= b.len() {
            let c = mulmod(*a.last().unwrap(), inv, p);
            let shift = a.len() - b.len();
            for (i, &bc) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - mulmod(c, bc, p)) % p;
            }
            a = poly_trim(a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

pub fn bigint_from_sign(neg: bool, m: BigUint) -> BigInt {
    BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, m)
}

/// Best rational approximation with denominator at most `max_den`.
pub fn rational_approx(x: f64, max_den: i64) -> (i64, i64) {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut y = x;
    loop {
        let a = y.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = y - a as f64;
        if frac.abs() < 1e-12 {
            break;
        }
        y = 1.0 / frac;
    }
    (h1, k1)
}

/// Rational reconstruction of `a` mod `m`: n/d with |n|, d <= sqrt(m/2).
pub fn rational_reconstruct(a: u128, m: u128) -> Option<(i128, i128)> {
    let bound = ((m / 2) as f64).sqrt() as i128;
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 > bound {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() > bound {
        return None;
    }
    let (n, d) = if t1 < 0 { (-r1, -t1) } else { (r1, t1) };
    if n.gcd(&d) != 1 {
        return None;
    }
    Some((n, d))
}
