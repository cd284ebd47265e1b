//! Weight-2 Manin symbols for Gamma_0(N) modulo the 2-term, 3-term and star relations.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::hecke::heilbronn_cremona;
use super::linalg::{addm, from_i64, mulm, SparseEchelon, MODULI};
use super::p1::P1List;
use crate::arith::is_prime;
use crate::error::{Error, Result};

/// Largest level accepted by `build_space`.
pub const MAX_LEVEL: u64 = 100_000;

pub(crate) struct ModData {
    pub p: u64,
    /// generator indices that form a basis of the quotient
    pub free: Vec<usize>,
    pub free_pos: Vec<usize>,
    /// pivot generator -> linear form in the free generators
    pub expr: HashMap<usize, Vec<u64>>,
}

pub struct ManinSymbolSpace {
    level: u64,
    sign: i8,
    p1: Arc<P1List>,
    /// generator and sign for each symbol; sign 0 means the symbol is zero
    gen_of: Vec<(u32, i8)>,
    /// one symbol representing each generator, with gen = sign * symbol
    gen_rep: Vec<(usize, i8)>,
    relations: Vec<Vec<(usize, i64)>>,
    modular: [OnceLock<ModData>; 2],
    hecke: Mutex<HashMap<(usize, u64), Arc<Vec<Vec<u64>>>>>,
}

impl std::fmt::Debug for ManinSymbolSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManinSymbolSpace").field("level", &self.level).field("sign", &self.sign).finish()
    }
}

/// Space of weight-2 modular symbols for Gamma_0(N) with the given sign
/// (+1 for the plus quotient).
pub fn build_space(level: u64, sign: i8) -> Result<ManinSymbolSpace> {
    if level == 0 || level > MAX_LEVEL {
        return Err(Error::SizeCap(format!("level {level} outside 1..={MAX_LEVEL}")));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::Precondition("sign must be +1 or -1".into()));
    }
    let p1 = Arc::new(P1List::new(level));
    let n = p1.len();

    // 2-term relations x + xS = 0 and x = sign * x*.
    let mut gen_of: Vec<(u32, i8)> = vec![(u32::MAX, 0); n];
    let mut zero_gen: Vec<bool> = Vec::new();
    let mut reps: Vec<(usize, i8)> = Vec::new();
    for i in 0..n {
        if gen_of[i].0 != u32::MAX {
            continue;
        }
        let g = zero_gen.len() as u32;
        zero_gen.push(false);
        reps.push((i, 1));
        gen_of[i] = (g, 1);
        let mut queue = vec![i];
        while let Some(j) = queue.pop() {
            let sj = gen_of[j].1;
            for (k, s) in [(p1.s(j), -1i8), (p1.star(j), sign)] {
                let expect = sj * s;
                if gen_of[k].0 == u32::MAX {
                    gen_of[k] = (g, expect);
                    queue.push(k);
                } else if gen_of[k].1 != expect {
                    zero_gen[g as usize] = true;
                }
            }
        }
    }
    // Compact the nonzero generators.
    let mut new_index = vec![usize::MAX; zero_gen.len()];
    let mut gen_rep = Vec::new();
    for (g, &z) in zero_gen.iter().enumerate() {
        if !z {
            new_index[g] = gen_rep.len();
            gen_rep.push(reps[g]);
        }
    }
    for e in gen_of.iter_mut() {
        let ni = new_index[e.0 as usize];
        *e = if ni == usize::MAX { (0, 0) } else { (ni as u32, e.1) };
    }

    // 3-term relations x + xT + xT^2 = 0.
    let mut seen = vec![false; n];
    let mut relations = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let orbit = [i, p1.t(i), p1.t(p1.t(i))];
        let mut row: Vec<(usize, i64)> = Vec::new();
        for &j in &orbit {
            seen[j] = true;
        }
        let distinct: Vec<usize> = if orbit[0] == orbit[1] { vec![i] } else { orbit.to_vec() };
        for &j in &distinct {
            let (g, s) = gen_of[j];
            if s == 0 {
                continue;
            }
            let mult = if distinct.len() == 1 { 3 } else { 1 };
            match row.iter_mut().find(|(c, _)| *c == g as usize) {
                Some(e) => e.1 += s as i64 * mult,
                None => row.push((g as usize, s as i64 * mult)),
            }
        }
        row.retain(|e| e.1 != 0);
        row.sort_unstable();
        if !row.is_empty() {
            relations.push(row);
        }
    }

    Ok(ManinSymbolSpace {
        level,
        sign,
        p1,
        gen_of,
        gen_rep,
        relations,
        modular: [OnceLock::new(), OnceLock::new()],
        hecke: Mutex::new(HashMap::new()),
    })
}

impl ManinSymbolSpace {
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn p1(&self) -> &Arc<P1List> {
        &self.p1
    }

    pub fn num_symbols(&self) -> usize {
        self.p1.len()
    }

    pub fn num_generators(&self) -> usize {
        self.gen_rep.len()
    }

    /// (generator, sign) of a Manin symbol; sign 0 if it vanishes.
    pub fn generator_of(&self, i: usize) -> (usize, i8) {
        let (g, s) = self.gen_of[i];
        (g as usize, s)
    }

    pub(crate) fn relations(&self) -> &[Vec<(usize, i64)>] {
        &self.relations
    }

    pub(crate) fn mod_data(&self, which: usize) -> &ModData {
        self.modular[which].get_or_init(|| {
            let p = MODULI[which];
            let mut ech = SparseEchelon::new(p);
            for r in &self.relations {
                ech.add_row(r.iter().map(|&(c, v)| (c, from_i64(v, p))).collect());
            }
            let ng = self.num_generators();
            let (free, expr) = ech.pivot_expressions(ng);
            let mut free_pos = vec![usize::MAX; ng];
            for (k, &c) in free.iter().enumerate() {
                free_pos[c] = k;
            }
            ModData { p, free, free_pos, expr }
        })
    }

    /// Dimension of the quotient (over F_P for the first working prime, which
    /// agrees with the rational dimension for all levels in range).
    pub fn dimension(&self) -> usize {
        self.mod_data(0).free.len()
    }

    /// Modulus of the arithmetic behind `hecke_matrix_mod(_, which)`.
    pub fn working_prime(&self, which: usize) -> u64 {
        self.mod_data(which).p
    }

    /// Coordinates (in the free-generator basis) of a generator, scaled by c.
    pub(crate) fn accumulate_generator(&self, which: usize, g: usize, c: u64, out: &mut [u64]) {
        let md = self.mod_data(which);
        let p = md.p;
        let pos = md.free_pos[g];
        if pos != usize::MAX {
            out[pos] = addm(out[pos], c, p);
        } else {
            for (x, &y) in out.iter_mut().zip(md.expr[&g].iter()) {
                if y != 0 {
                    *x = addm(*x, mulm(c, y, p), p);
                }
            }
        }
    }

    /// Matrix of T_ell (ell prime, not dividing the level) on the quotient,
    /// modulo the working prime `which`: row f holds the image of the f-th
    /// basis generator.
    pub fn hecke_matrix_mod(&self, ell: u64, which: usize) -> Result<Arc<Vec<Vec<u64>>>> {
        if !is_prime(ell) || self.level % ell == 0 {
            return Err(Error::Precondition(format!("T_{ell} needs a prime not dividing {}", self.level)));
        }
        if let Some(m) = self.hecke.lock().unwrap().get(&(which, ell)) {
            return Ok(m.clone());
        }
        let md = self.mod_data(which);
        let p = md.p;
        let d = md.free.len();
        let heil = heilbronn_cremona(ell);
        let mut rows = Vec::with_capacity(d);
        for &g in &md.free {
            let (sym, s) = self.gen_rep[g];
            let (u, v) = self.p1.symbol(sym);
            let (u, v) = (u as i64, v as i64);
            let mut row = vec![0u64; d];
            for h in &heil {
                let j = self.p1.index(u * h[0] + v * h[2], u * h[1] + v * h[3]);
                let Some(j) = j else { continue };
                let (gj, sj) = self.generator_of(j);
                if sj == 0 {
                    continue;
                }
                let c = from_i64((s * sj) as i64, p);
                self.accumulate_generator(which, gj, c, &mut row);
            }
            rows.push(row);
        }
        let m = Arc::new(rows);
        self.hecke.lock().unwrap().insert((which, ell), m.clone());
        Ok(m)
    }
}

/// Value of a functional (given on the free generators mod p) on every generator.
pub(crate) fn extend_functional(space: &ManinSymbolSpace, which: usize, phi: &[u64]) -> Vec<u64> {
    let md = space.mod_data(which);
    let p = md.p;
    (0..space.num_generators())
        .map(|g| {
            let pos = md.free_pos[g];
            if pos != usize::MAX {
                phi[pos]
            } else {
                md.expr[&g].iter().zip(phi.iter()).fold(0u64, |acc, (&a, &b)| {
                    if a == 0 || b == 0 {
                        acc
                    } else {
                        addm(acc, mulm(a, b, p), p)
                    }
                })
            }
        })
        .collect()
}
