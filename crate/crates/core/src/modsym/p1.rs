//! The projective line over Z/N, which indexes Manin symbols for Gamma_0(N).

use std::collections::HashMap;

use crate::arith::gcd;

#[derive(Clone, Debug)]
pub struct P1List {
    n: u64,
    symbols: Vec<(u64, u64)>,
    /// inverse of x mod N, or 0 when x is not a unit
    inv: Vec<u64>,
    /// index of (1 : y) for non-units y
    one_c: Vec<u32>,
    special: HashMap<(u64, u64), u32>,
}

/// Canonical representative of (c : d) when neither coordinate is a unit.
/// Scales so the first coordinate becomes gcd(c, N), then minimises the second
/// over the units fixing the first.
fn normalize_special(c: u64, d: u64, n: u64) -> Option<(u64, u64)> {
    let (mut u, mut v) = (c % n, d % n);
    if u == 0 {
        return if gcd(v, n) == 1 { Some((0, 1)) } else { None };
    }
    // s*u = g mod N
    let e = extended_gcd(u as i64, n as i64);
    let g = e.0 as u64;
    let mut s = e.1.rem_euclid(n as i64) as u64;
    if gcd(g, v) != 1 {
        return None;
    }
    let ng = n / g;
    while gcd(s, n) != 1 {
        s = (s + ng) % n;
    }
    u = g;
    v = (s as u128 * v as u128 % n as u128) as u64;
    let mut min_v = v;
    let v_ng = (v as u128 * ng as u128 % n as u128) as u64;
    let mut t = 1u64;
    for _ in 2..=g {
        v = (v + v_ng) % n;
        t = (t + ng) % n;
        if v < min_v && gcd(t, n) == 1 {
            min_v = v;
        }
    }
    Some((u, min_v))
}

fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    (old_r, old_s, old_t)
}

impl P1List {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        if n == 1 {
            return P1List { n, symbols: vec![(0, 0)], inv: vec![0], one_c: vec![0], special: HashMap::new() };
        }
        let mut inv = vec![0u64; n as usize];
        for x in 1..n {
            if gcd(x, n) == 1 {
                let e = extended_gcd(x as i64, n as i64);
                inv[x as usize] = e.1.rem_euclid(n as i64) as u64;
            }
        }
        let mut symbols: Vec<(u64, u64)> = (0..n).map(|x| (x, 1)).collect();
        let mut one_c = vec![u32::MAX; n as usize];
        for y in 0..n {
            if inv[y as usize] == 0 {
                one_c[y as usize] = symbols.len() as u32;
                symbols.push((1, y));
            }
        }
        let mut special = HashMap::new();
        for g in 2..n {
            if n % g != 0 {
                continue;
            }
            for v in 0..n {
                if inv[v as usize] != 0 || gcd(g, v) != 1 {
                    continue;
                }
                if let Some(key) = normalize_special(g, v, n) {
                    special.entry(key).or_insert_with(|| {
                        symbols.push(key);
                        (symbols.len() - 1) as u32
                    });
                }
            }
        }
        P1List { n, symbols, inv, one_c, special }
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, i: usize) -> (u64, u64) {
        self.symbols[i]
    }

    /// Index of (c : d), or `None` if the pair does not define a point.
    pub fn index(&self, c: i64, d: i64) -> Option<usize> {
        let n = self.n;
        if n == 1 {
            return Some(0);
        }
        let c = c.rem_euclid(n as i64) as u64;
        let d = d.rem_euclid(n as i64) as u64;
        let id = self.inv[d as usize];
        if id != 0 {
            return Some((c as u128 * id as u128 % n as u128) as usize);
        }
        let ic = self.inv[c as usize];
        if ic != 0 {
            let y = (d as u128 * ic as u128 % n as u128) as usize;
            return Some(self.one_c[y] as usize);
        }
        let key = normalize_special(c, d, n)?;
        self.special.get(&key).map(|&i| i as usize)
    }

    pub fn s(&self, i: usize) -> usize {
        let (c, d) = self.symbols[i];
        self.index(d as i64, -(c as i64)).unwrap()
    }

    pub fn t(&self, i: usize) -> usize {
        let (c, d) = self.symbols[i];
        self.index(d as i64, -(c as i64) - d as i64).unwrap()
    }

    pub fn star(&self, i: usize) -> usize {
        let (c, d) = self.symbols[i];
        self.index(-(c as i64), d as i64).unwrap()
    }
}

/// Index of Gamma_0(N) in SL_2(Z): N prod_{p | N} (1 + 1/p).
pub fn gamma0_index(n: u64) -> u64 {
    let mut r = n;
    for p in crate::arith::prime_divisors(n) {
        r = r / p * (p + 1);
    }
    r
}
