//! The normalised plus modular symbol of an elliptic curve.

use std::sync::Arc;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::hecke::heilbronn_cremona;
use super::linalg::{addm, from_i64, kernel, mulm, subm, MODULI};
use super::p1::{gamma0_index, P1List};
use super::space::{build_space, extend_functional, ManinSymbolSpace};
use crate::arith::{is_fundamental_discriminant, kronecker, primes_up_to, rational_approx, rational_reconstruct};
use crate::curves::{l_series_sum, terms_needed, CurveRecord, PeriodData};
use crate::error::{Error, Result};

/// Tolerance for the analytic certification of the normalisation.
pub const CERT_TOLERANCE: f64 = 1e-6;
/// Largest denominator allowed for the normalising scale.
pub const SCALE_MAX_DEN: i64 = 4096;
/// Largest twist discriminant tried during normalisation.
const MAX_TWIST: i64 = 4000;

/// Primitive integer eigen-functional on Manin symbols, before normalisation.
#[derive(Clone, Debug)]
pub struct IsolatedSymbol {
    pub level: u64,
    /// value on each element of the P^1 list
    pub coords: Vec<i64>,
    /// good primes whose Hecke operators were used to cut out the eigenspace
    pub primes_used: Vec<u64>,
}

/// a/b -> lambda(a, b), stored as a scale times a primitive integer functional.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlusModularSymbol {
    pub level: u64,
    pub curve_label: String,
    pub coords: Vec<i64>,
    pub scale: Rational64,
    #[serde(skip)]
    p1: Option<Arc<P1List>>,
}

fn sturm_cap(n: u64) -> u64 {
    gamma0_index(n).div_ceil(6).max(2)
}

/// (M - a I) restricted to the span of the columns of `basis` (given as rows).
fn restricted(m: &[Vec<u64>], a: u64, basis: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let d = m.len();
    let k = basis.len();
    let mut out = vec![vec![0u64; k]; d];
    for (j, b) in basis.iter().enumerate() {
        for (i, row) in m.iter().enumerate() {
            let mut s = 0u64;
            for (&x, &y) in row.iter().zip(b.iter()) {
                if x != 0 && y != 0 {
                    s = addm(s, mulm(x, y, p), p);
                }
            }
            s = subm(s, mulm(a, b[i], p), p);
            out[i][j] = s;
        }
    }
    out
}

/// Cut out the eigen-functional with the Hecke eigenvalues of `record`.
pub fn isolate_symbol(space: &ManinSymbolSpace, record: &CurveRecord) -> Result<IsolatedSymbol> {
    let n = space.level();
    if record.conductor != n {
        return Err(Error::Precondition(format!("conductor {} differs from level {n}", record.conductor)));
    }
    isolate_with(space, |ell| record.ap(ell))
}

/// As `isolate_symbol`, with the eigenvalues supplied by a function.
pub fn isolate_with(space: &ManinSymbolSpace, ap: impl Fn(u64) -> i64) -> Result<IsolatedSymbol> {
    let n = space.level();
    let which = 0;
    let p = MODULI[which];
    let d = space.dimension();
    if d == 0 {
        return Err(Error::Inconsistent { level: n, detail: "space is zero".into() });
    }
    let cap = sturm_cap(n);
    let mut basis: Option<Vec<Vec<u64>>> = None;
    let mut used = Vec::new();
    for ell in primes_up_to(cap.max(3)) {
        if n % ell == 0 {
            continue;
        }
        let m = space.hecke_matrix_mod(ell, which)?;
        let a = from_i64(ap(ell), p);
        used.push(ell);
        let next = match &basis {
            None => {
                let mut mm = (*m).clone();
                for (i, row) in mm.iter_mut().enumerate() {
                    row[i] = subm(row[i], a, p);
                }
                kernel(mm, d, p)
            }
            Some(b) => {
                let r = restricted(&m, a, b, p);
                kernel(r, b.len(), p)
                    .into_iter()
                    .map(|c| {
                        let mut v = vec![0u64; d];
                        for (ci, bi) in c.iter().zip(b.iter()) {
                            if *ci != 0 {
                                for (x, &y) in v.iter_mut().zip(bi.iter()) {
                                    *x = addm(*x, mulm(*ci, y, p), p);
                                }
                            }
                        }
                        v
                    })
                    .collect()
            }
        };
        if next.is_empty() {
            return Err(Error::Inconsistent { level: n, detail: format!("no eigenvector with a_{ell} = {}", ap(ell)) });
        }
        let done = next.len() == 1;
        basis = Some(next);
        if done {
            break;
        }
    }
    let basis = basis.unwrap_or_default();
    if basis.len() != 1 {
        return Err(Error::Separation { level: n, dim: basis.len(), bound: cap });
    }
    let gens = reconstruct(space, &basis[0], &used, &ap)?;
    let p1 = space.p1();
    let coords: Vec<i64> = (0..p1.len())
        .map(|i| {
            let (g, s) = space.generator_of(i);
            if s == 0 {
                0
            } else {
                s as i64 * gens[g]
            }
        })
        .collect();
    let iso = IsolatedSymbol { level: n, coords, primes_used: used };
    certify_exact(space, &iso, &ap)?;
    Ok(iso)
}

/// Primitive integer vector on generators from its reduction mod the working primes.
fn reconstruct(
    space: &ManinSymbolSpace,
    phi0: &[u64],
    used: &[u64],
    ap: &impl Fn(u64) -> i64,
) -> Result<Vec<i64>> {
    let v0 = extend_functional(space, 0, phi0);
    let Some(pivot) = v0.iter().position(|&x| x != 0) else {
        return Err(Error::Inconsistent { level: space.level(), detail: "zero eigenvector".into() });
    };
    let normalise = |v: &[u64], p: u64| -> Vec<u64> {
        let iv = super::linalg::inv(v[pivot], p);
        v.iter().map(|&x| mulm(x, iv, p)).collect()
    };
    let v0 = normalise(&v0, MODULI[0]);
    let fracs: Option<Vec<(i128, i128)>> =
        v0.iter().map(|&x| rational_reconstruct(x as u128, MODULI[0] as u128)).collect();
    let fracs = match fracs {
        Some(f) => f,
        None => {
            // Repeat modulo the second prime and combine.
            let p = MODULI[1];
            let phi1 = eigen_mod(space, 1, used, ap)?;
            let v1 = normalise(&extend_functional(space, 1, &phi1), p);
            let m = MODULI[0] as u128 * p as u128;
            let inv0 = super::linalg::inv(MODULI[0] % p, p) as u128;
            v0.iter()
                .zip(v1.iter())
                .map(|(&a, &b)| {
                    // x = a + P0 * ((b - a) / P0 mod P1)
                    let t = (b as u128 + p as u128 - (a as u128 % p as u128)) % p as u128 * inv0 % p as u128;
                    rational_reconstruct(a as u128 + MODULI[0] as u128 * t, m)
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Inconsistent {
                    level: space.level(),
                    detail: "rational reconstruction failed".into(),
                })?
        }
    };
    let den = fracs.iter().fold(1i128, |l, &(_, d)| l.lcm(&d));
    let ints: Vec<i128> = fracs.iter().map(|&(n, d)| n * (den / d)).collect();
    let content = ints.iter().fold(0i128, |g, &x| g.gcd(&x));
    ints.iter()
        .map(|&x| (x / content).to_i64())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Inconsistent { level: space.level(), detail: "coordinates overflow".into() })
}

/// Eigenvector for the given primes modulo MODULI[which]; must be one-dimensional.
fn eigen_mod(space: &ManinSymbolSpace, which: usize, used: &[u64], ap: &impl Fn(u64) -> i64) -> Result<Vec<u64>> {
    let p = MODULI[which];
    let d = space.dimension();
    let mut stacked = Vec::new();
    for &ell in used {
        let m = space.hecke_matrix_mod(ell, which)?;
        let a = from_i64(ap(ell), p);
        for (i, row) in m.iter().enumerate() {
            let mut r = row.clone();
            r[i] = subm(r[i], a, p);
            stacked.push(r);
        }
    }
    let k = kernel(stacked, d, p);
    if k.len() != 1 {
        return Err(Error::Separation { level: space.level(), dim: k.len(), bound: sturm_cap(space.level()) });
    }
    Ok(k.into_iter().next().unwrap())
}

/// Exact check that the integer functional kills the relations and is an
/// eigenvector for every Hecke operator used.
fn certify_exact(space: &ManinSymbolSpace, iso: &IsolatedSymbol, ap: &impl Fn(u64) -> i64) -> Result<()> {
    let n = space.level();
    let p1 = space.p1();
    let mut gen_val = vec![0i64; space.num_generators()];
    for (i, &c) in iso.coords.iter().enumerate() {
        let (g, s) = space.generator_of(i);
        if s != 0 {
            gen_val[g] = s as i64 * c;
        }
    }
    for rel in space.relations() {
        let s: i128 = rel.iter().map(|&(g, c)| c as i128 * gen_val[g] as i128).sum();
        if s != 0 {
            return Err(Error::Inconsistent { level: n, detail: "three-term relation fails".into() });
        }
    }
    for &ell in &iso.primes_used {
        let heil = heilbronn_cremona(ell);
        let a = ap(ell) as i128;
        for i in 0..p1.len() {
            let (u, v) = p1.symbol(i);
            let (u, v) = (u as i64, v as i64);
            let mut s = 0i128;
            for h in &heil {
                if let Some(j) = p1.index(u * h[0] + v * h[2], u * h[1] + v * h[3]) {
                    s += iso.coords[j] as i128;
                }
            }
            if s != a * iso.coords[i] as i128 {
                return Err(Error::Inconsistent { level: n, detail: format!("not an eigenvector for T_{ell}") });
            }
        }
    }
    Ok(())
}

/// Sum of coords over the Manin symbols along the continued fraction of a/b,
/// i.e. the functional applied to the path from the cusp at infinity to a/b.
pub fn raw_value(p1: &P1List, coords: &[i64], a: i64, b: i64) -> i64 {
    assert!(b > 0, "denominator must be positive");
    let g = a.gcd(&b);
    let (a, b) = (a / g, b / g);
    let mut num = a.rem_euclid(b);
    let mut den = b;
    // convergent denominators q_{k-1}, q_k of [0; c1, c2, ...]
    let (mut q_prev, mut q) = (0i64, 1i64);
    let mut k = 0u32;
    let mut total = 0i64;
    let sym = |k: u32, qk: i64, qkm1: i64| -> i64 {
        let sgn = if k % 2 == 0 { -1 } else { 1 };
        p1.index(sgn * qk, qkm1).map_or(0, |i| coords[i])
    };
    total += sym(k, q, q_prev);
    while num != 0 {
        let c = den / num;
        (den, num) = (num, den - c * num);
        (q_prev, q) = (q, c * q + q_prev);
        k += 1;
        total += sym(k, q, q_prev);
    }
    total
}

/// Sum over a mod D of chi_D(a) times the raw value at a/D.
fn twisted_raw(p1: &P1List, coords: &[i64], d: i64) -> i64 {
    if d == 1 {
        return raw_value(p1, coords, 0, 1);
    }
    (1..d)
        .map(|a| kronecker(d, a as u64) as i64 * raw_value(p1, coords, a, d))
        .sum()
}

/// sqrt(D) L(E, chi_D, 1) / Omega, using the twisted root number to detect vanishing.
fn twisted_l_ratio(record: &CurveRecord, d: i64, root: i32, omega: f64) -> f64 {
    let n = record.conductor;
    let w = if d == 1 { root } else { root * kronecker(d, n) };
    if w == -1 {
        return 0.0;
    }
    let terms = terms_needed(n, d as u64);
    let an = record.an(terms);
    let twist = if d == 1 { None } else { Some((d, d as u64)) };
    (d as f64).sqrt() * l_series_sum(&an, n, twist) / omega
}

/// Fix the rational scale so the functional computes lambda, and certify it
/// against an independent L-value.
pub fn normalize(iso: &IsolatedSymbol, record: &CurveRecord, period: &PeriodData) -> Result<PlusModularSymbol> {
    let n = iso.level;
    let p1 = Arc::new(P1List::new(n));
    let root = if record.rank % 2 == 0 { 1 } else { -1 };
    let omega = period.omega_plus;
    let cert_err = |detail: String| Error::Certification { label: record.label.clone(), detail };

    let mut usable = (2..MAX_TWIST).filter(|&d| {
        // chi_D(-1) = 1, so the twist has root number w chi_D(N)
        is_fundamental_discriminant(d) && crate::arith::gcd(d as u64, n) == 1 && root * kronecker(d, n) == 1
    });
    let mut first = None;
    for d in usable.by_ref() {
        let t = twisted_raw(&p1, &iso.coords, d);
        if t != 0 {
            first = Some((d, t));
            break;
        }
    }
    let (d1, t1) = first.ok_or_else(|| cert_err("no usable quadratic twist".into()))?;
    let x = twisted_l_ratio(record, d1, root, omega) / t1 as f64;
    let (num, den) = rational_approx(x, SCALE_MAX_DEN);
    if den == 0 || num == 0 {
        return Err(cert_err(format!("scale {x} has no small rational approximation")));
    }
    let scale = Rational64::new(num, den);
    let sf = num as f64 / den as f64;
    if (x - sf).abs() > CERT_TOLERANCE * sf.abs().max(1.0) {
        return Err(cert_err(format!("scale {x} is not close to {scale}")));
    }

    // Independent check: L(E, 1) in rank 0, otherwise a second twist.
    let (d2, t2) = if root == 1 && record.rank == 0 {
        (1, twisted_raw(&p1, &iso.coords, 1))
    } else {
        let mut second = None;
        for d in usable {
            let t = twisted_raw(&p1, &iso.coords, d);
            if t != 0 {
                second = Some((d, t));
                break;
            }
        }
        second.ok_or_else(|| cert_err("no second twist for certification".into()))?
    };
    let analytic = twisted_l_ratio(record, d2, root, omega);
    let exact = sf * t2 as f64;
    if (analytic - exact).abs() > CERT_TOLERANCE * analytic.abs().max(1.0) {
        return Err(cert_err(format!("twist {d2}: symbol gives {exact}, L-series gives {analytic}")));
    }
    Ok(PlusModularSymbol { level: n, curve_label: record.label.clone(), coords: iso.coords.clone(), scale, p1: Some(p1) })
}

/// Build the space, isolate and normalise the plus symbol of a curve.
pub fn plus_symbol(record: &CurveRecord, period: &PeriodData) -> Result<PlusModularSymbol> {
    let space = build_space(record.conductor, 1)?;
    let iso = isolate_symbol(&space, record)?;
    normalize(&iso, record, period)
}

impl PlusModularSymbol {
    pub fn new(level: u64, curve_label: &str, coords: Vec<i64>, scale: Rational64) -> Self {
        let p1 = Arc::new(P1List::new(level));
        PlusModularSymbol { level, curve_label: curve_label.to_string(), coords, scale, p1: Some(p1) }
    }

    fn p1(&self) -> Arc<P1List> {
        match &self.p1 {
            Some(p) => p.clone(),
            None => Arc::new(P1List::new(self.level)),
        }
    }

    /// lambda(a, b) for b > 0.
    pub fn evaluate(&self, a: i64, b: i64) -> Rational64 {
        let p1 = self.p1();
        self.scale * Rational64::from_integer(raw_value(&p1, &self.coords, a, b))
    }

    /// lambda(a, m) for a = 0..m-1.
    pub fn layer(&self, m: u64) -> Vec<Rational64> {
        let p1 = self.p1();
        (0..m as i64)
            .map(|a| self.scale * Rational64::from_integer(raw_value(&p1, &self.coords, a, m as i64)))
            .collect()
    }

    /// Text record: header line then the coordinates.
    pub fn to_text(&self) -> String {
        let coords: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        format!("{} {} {}\n{}\n", self.level, self.curve_label, self.scale, coords.join(" "))
    }

    pub fn from_text(s: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let mut lines = s.lines();
        let head: Vec<&str> = lines.next().ok_or_else(|| bad(1, "empty record"))?.split_whitespace().collect();
        if head.len() != 3 {
            return Err(bad(1, "expected level, label and scale"));
        }
        let level: u64 = head[0].parse().map_err(|_| bad(1, "bad level"))?;
        let scale: Rational64 = head[2].parse().map_err(|_| bad(1, "bad scale"))?;
        let coords = lines
            .next()
            .unwrap_or("")
            .split_whitespace()
            .map(|t| t.parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad(2, "bad coordinate"))?;
        let sym = PlusModularSymbol::new(level, head[1], coords, scale);
        if sym.coords.len() != sym.p1().len() {
            return Err(bad(2, "coordinate count does not match the level"));
        }
        Ok(sym)
    }
}
