//! Mazur-Tate elements and the refined conjectures as decidable predicates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{factor_u64, prime_divisors};
use crate::curves::CurveRecord;
use crate::error::{Error, Result};
use crate::group_ring::{
    class_in_qr, element_class, obstruction_primes, phi_image, shared_group, vanishing_order, FiniteAbelianGroup,
    GroupRingElement, QuotientClass, SubringOfQ, VanishingOrder,
};
use crate::modsym::PlusModularSymbol;
use crate::padic::{tate_parameter_default, unit_to_modulus, PadicNumber};

/// theta_M = sum over G_M of lambda(a, M) [a].
#[derive(Clone, Debug)]
pub struct MazurTateElement {
    pub curve_label: String,
    pub layer: u64,
    pub group: Arc<FiniteAbelianGroup>,
    pub theta: GroupRingElement,
}

impl MazurTateElement {
    /// Coefficients as (least positive representative, lambda), by representative.
    pub fn terms(&self) -> Vec<(u64, Rational64)> {
        let mut t: Vec<(u64, Rational64)> = self
            .group
            .elements()
            .map(|g| (self.group.representative(g).unwrap_or(1), self.theta.coeffs[g]))
            .collect();
        t.sort_by_key(|x| x.0);
        t
    }

    /// Smallest subring containing the coefficients.
    pub fn coefficient_ring(&self) -> SubringOfQ {
        SubringOfQ::smallest(&self.theta.coeffs)
    }
}

pub fn mazur_tate_element(sym: &PlusModularSymbol, m: u64) -> Result<MazurTateElement> {
    if m == 0 {
        return Err(Error::Precondition("layer must be positive".into()));
    }
    let group = shared_group(m)?;
    let mut theta = GroupRingElement::zero(&group);
    for g in group.elements() {
        let a = group.representative(g).expect("G_M comes from a modulus");
        theta.coeffs[g] = sym.evaluate(a as i64, m as i64);
    }
    Ok(MazurTateElement { curve_label: sym.curve_label.clone(), layer: m, group, theta })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConjectureId {
    C1_1,
    C4mul,
    C5mul,
    C3_1mod,
    C4gen,
    C6gen,
}

impl ConjectureId {
    pub const ALL: [ConjectureId; 6] = [
        ConjectureId::C1_1,
        ConjectureId::C4mul,
        ConjectureId::C5mul,
        ConjectureId::C3_1mod,
        ConjectureId::C4gen,
        ConjectureId::C6gen,
    ];

    /// Short name used on the command line.
    pub fn cli_name(&self) -> &'static str {
        match self {
            ConjectureId::C1_1 => "c11",
            ConjectureId::C4mul => "c4mul",
            ConjectureId::C5mul => "c5mul",
            ConjectureId::C3_1mod => "c31",
            ConjectureId::C4gen => "c4",
            ConjectureId::C6gen => "c6",
        }
    }

    pub fn from_cli_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.cli_name() == s)
    }
}

impl fmt::Display for ConjectureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
    Skipped,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub conjecture: ConjectureId,
    pub status: Status,
    pub s: Vec<u64>,
    pub failing_primes: Vec<u64>,
    /// R also contains the inverse of the torsion order
    #[serde(default, skip_serializing_if = "is_false")]
    pub torsion_inverted: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lhs: Option<QuotientClass>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rhs: Option<QuotientClass>,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub notes: String,
}

impl Verdict {
    fn new(conjecture: ConjectureId, s: Vec<u64>, failing: Vec<u64>) -> Self {
        let status = if failing.is_empty() { Status::Pass } else { Status::Fail };
        Verdict { conjecture, status, s, failing_primes: failing, torsion_inverted: false, lhs: None, rhs: None, notes: String::new() }
    }

    fn vacuous(conjecture: ConjectureId, s: Vec<u64>) -> Self {
        Verdict {
            conjecture,
            status: Status::Vacuous,
            s,
            failing_primes: Vec::new(),
            torsion_inverted: false,
            lhs: None,
            rhs: None,
            notes: String::new(),
        }
    }

    pub fn skipped(conjecture: ConjectureId, why: &str) -> Self {
        Verdict {
            conjecture,
            status: Status::Skipped,
            s: Vec::new(),
            failing_primes: Vec::new(),
            torsion_inverted: false,
            lhs: None,
            rhs: None,
            notes: why.to_string(),
        }
    }

    fn note(&mut self, text: &str) {
        if !self.notes.is_empty() {
            self.notes.push_str("; ");
        }
        self.notes.push_str(text);
    }
}

/// Which primes are inverted in R on top of the minimal ring.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Variant {
    pub torsion_inverted: bool,
    pub extra_inverted: BTreeSet<u64>,
}

impl Variant {
    pub fn plain() -> Self {
        Self::default()
    }

    pub fn torsion_inverted() -> Self {
        Variant { torsion_inverted: true, extra_inverted: BTreeSet::new() }
    }

    fn apply(&self, ring: SubringOfQ, torsion: u64) -> SubringOfQ {
        let mut r = ring.join(&SubringOfQ::with_primes(self.extra_inverted.iter().copied()));
        if self.torsion_inverted {
            r = r.join(&SubringOfQ::with_primes(prime_divisors(torsion)));
        }
        r
    }
}

/// Tate data at one prime of the layer.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TateDatum {
    pub p: u64,
    /// ord_p(q_p)
    pub ord_q: u64,
    /// Tamagawa number C_p
    pub tamagawa: u64,
    /// image of q_p / p^ord in (Z/M)^*
    pub q_tilde_mod_m: u64,
    /// q_p rendered as a p-adic expansion
    pub q_display: String,
}

/// Everything the checkers consume for one curve and one layer M.
#[derive(Clone, Debug)]
pub struct LayerData {
    pub label: String,
    pub conductor: u64,
    pub rank: u32,
    pub torsion: u64,
    pub sha: Option<u64>,
    pub tamagawa: BTreeMap<u64, u64>,
    pub lambda01: Rational64,
    pub theta: MazurTateElement,
    pub tate: BTreeMap<u64, TateDatum>,
}

impl LayerData {
    /// Collect the inputs at layer M; every prime of M must be split multiplicative.
    pub fn new(record: &CurveRecord, sym: &PlusModularSymbol, m: u64) -> Result<Self> {
        let mut tate = BTreeMap::new();
        for (p, _) in factor_u64(m) {
            if !record.is_split(p) {
                return Err(Error::NotSplit { p });
            }
            let q = tate_parameter_default(record, p)?;
            tate.insert(p, tate_datum(record, &q, m)?);
        }
        Ok(LayerData {
            label: record.label.clone(),
            conductor: record.conductor,
            rank: record.rank,
            torsion: record.torsion_order,
            sha: record.sha_order,
            tamagawa: record.tamagawa.clone(),
            lambda01: sym.evaluate(0, 1),
            theta: mazur_tate_element(sym, m)?,
            tate,
        })
    }

    pub fn layer(&self) -> u64 {
        self.theta.layer
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.theta.group
    }

    /// The single prime of a prime layer.
    fn single_prime(&self) -> Result<&TateDatum> {
        match (self.tate.len(), self.tate.values().next()) {
            (1, Some(t)) if t.p == self.layer() => Ok(t),
            _ => Err(Error::Precondition(format!("layer {} is not a split prime", self.layer()))),
        }
    }

    fn lambda_sum(&self) -> Rational64 {
        self.theta.theta.augmentation()
    }

    fn q_tilde(&self, p: u64) -> Result<usize> {
        let t = &self.tate[&p];
        self.group()
            .element_of(t.q_tilde_mod_m as i64)
            .ok_or_else(|| Error::GroupRing(format!("q~_{p} is not a unit mod {}", self.layer())))
    }
}

fn tate_datum(record: &CurveRecord, q: &PadicNumber, m: u64) -> Result<TateDatum> {
    let p = q.prime();
    let (ord, unit) = q.unit_part()?;
    Ok(TateDatum {
        p,
        ord_q: ord as u64,
        tamagawa: record.tamagawa_at(p),
        q_tilde_mod_m: unit_to_modulus(&unit, m)?,
        q_display: q.to_string(),
    })
}

fn sum_zero(data: &LayerData) -> Result<()> {
    let s = data.lambda_sum();
    if !s.is_zero() {
        return Err(Error::Mismatch {
            label: data.label.clone(),
            detail: format!("sum of lambda(a, {}) is {s}, not 0", data.layer()),
        });
    }
    Ok(())
}

/// Compare phi(theta_p) with pi_l(q~_p)^exponent on each l in S.
fn multiplicative_check(
    id: ConjectureId,
    data: &LayerData,
    ring: &SubringOfQ,
    exponent: Rational64,
    rank_zero_sides: bool,
) -> Result<Verdict> {
    let t = data.single_prime()?;
    let group = data.group();
    let s = ring.s_primes(group);
    if group.order() == 1 || s.is_empty() {
        return Ok(Verdict::vacuous(id, s));
    }
    let lhs = phi_image(&data.theta.theta, group, ring)?;
    let q = data.q_tilde(t.p)?;
    // the scaling by exponent is the fractional power; its denominator lies in R, so avoids S
    let rhs = element_class(group, q, ring).scale(exponent)?;
    let mut failing: BTreeSet<u64> = lhs.differing_primes(&rhs).into_iter().collect();
    if rank_zero_sides {
        for &l in &s {
            if !lhs.component_is_zero(l) || !rhs.component_is_zero(l) {
                failing.insert(l);
            }
        }
    }
    let mut v = Verdict::new(id, s, failing.into_iter().collect());
    v.lhs = Some(lhs);
    v.rhs = Some(rhs);
    Ok(v)
}

fn c11_exponent(data: &LayerData, t: &TateDatum) -> Rational64 {
    data.lambda01 / Rational64::from(2 * t.ord_q as i64)
}

/// The multiplicative form at M = p, with R the smallest ring containing the
/// lambda(a, p) and lambda(0,1) / (2 ord_p q_p).
pub fn check_conj_1_1(data: &LayerData, variant: &Variant) -> Result<Verdict> {
    check_c11_like(ConjectureId::C1_1, data, variant)
}

/// As check_conj_1_1 with the torsion order inverted in R.
pub fn check_conj_3_1(data: &LayerData, variant: &Variant) -> Result<Verdict> {
    let mut v = variant.clone();
    v.torsion_inverted = true;
    check_c11_like(ConjectureId::C3_1mod, data, &v)
}

fn check_c11_like(id: ConjectureId, data: &LayerData, variant: &Variant) -> Result<Verdict> {
    let t = data.single_prime()?;
    sum_zero(data)?;
    let exponent = c11_exponent(data, t);
    let mut values = data.theta.theta.coeffs.clone();
    values.push(exponent);
    let ring = variant.apply(SubringOfQ::smallest(&values), data.torsion);
    multiplicative_check(id, data, &ring, exponent, data.rank > 0)
}

/// Rank > 0: the product of pi_l(a)^lambda(a, p) is trivial on each l in S.
pub fn check_conj4mul(data: &LayerData, variant: &Variant) -> Result<Verdict> {
    data.single_prime()?;
    if data.rank == 0 {
        return Err(Error::Precondition("needs positive rank".into()));
    }
    sum_zero(data)?;
    let ring = variant.apply(data.theta.coefficient_ring(), data.torsion);
    multiplicative_check(ConjectureId::C4mul, data, &ring, Rational64::zero(), true)
}

/// Rank 0: exponent #Sha prod_{p' != p} C_p' / tau^2, with 1/tau in R.
pub fn check_conj5mul(data: &LayerData, variant: &Variant) -> Result<Verdict> {
    let t = data.single_prime()?;
    if data.rank != 0 {
        return Err(Error::Precondition("needs rank 0".into()));
    }
    let Some(sha) = data.sha else {
        return Ok(Verdict::skipped(ConjectureId::C5mul, "order of Sha not available"));
    };
    sum_zero(data)?;
    let tau = data.torsion as i64;
    let away: u64 = data.tamagawa.iter().filter(|(&q, _)| q != t.p).map(|(_, &c)| c).product();
    let exponent = Rational64::new(sha as i64 * away as i64, tau * tau);
    let ring = variant.apply(data.theta.coefficient_ring(), data.torsion);
    let ring = ring.join(&SubringOfQ::with_primes(prime_divisors(data.torsion)));
    let mut v = multiplicative_check(ConjectureId::C5mul, data, &ring, exponent, false)?;
    v.note("uses the ingested order of Sha");
    Ok(v)
}

/// ord(theta_M) >= #S_m + rank, with R the smallest ring containing the lambda(a, M).
pub fn check_conj4_general(data: &LayerData, variant: &Variant) -> Result<Verdict> {
    let group = data.group();
    let ring = variant.apply(data.theta.coefficient_ring(), data.torsion);
    let s = ring.s_primes(group);
    if group.order() == 1 || s.is_empty() {
        return Ok(Verdict::vacuous(ConjectureId::C4gen, s));
    }
    let r = data.tate.len() as u32;
    let target = r + data.rank;
    let failing = obstruction_primes(&data.theta.theta, group, &ring, target)?;
    let mut v = Verdict::new(ConjectureId::C4gen, s, failing);
    let ord = vanishing_order(&data.theta.theta, group, &ring, target)?;
    v.note(&match ord {
        VanishingOrder::Exact(k) => format!("ord = {k}, bound {target}"),
        VanishingOrder::AtLeast(k) => format!("ord >= {k}, bound {target}"),
    });
    if data.rank > 1 {
        v.note("rank above 1 is beyond the multiplicative form");
    }
    Ok(v)
}

/// Image of theta_M in Q_r(R, G_M) against the corrected discriminant
/// prod ([q~_p] - [1]) scaled by lambda(0,1) / (2 prod C_p).
pub fn check_conj6_general(data: &LayerData, variant: &Variant) -> Result<Verdict> {
    let group = data.group();
    let r = data.tate.len() as u32;
    if r == 0 {
        return Err(Error::Precondition("layer has no split primes".into()));
    }
    let cprod: u64 = data.tate.values().map(|t| t.tamagawa).product();
    let exponent = data.lambda01 / Rational64::from(2 * cprod as i64);
    let mut values = data.theta.theta.coeffs.clone();
    values.push(exponent);
    let ring = variant.apply(SubringOfQ::smallest(&values), data.torsion);
    let s = ring.s_primes(group);
    if group.order() == 1 || s.is_empty() {
        return Ok(Verdict::vacuous(ConjectureId::C6gen, s));
    }
    let blocked = obstruction_primes(&data.theta.theta, group, &ring, r)?;
    if !blocked.is_empty() {
        let mut v = Verdict::new(ConjectureId::C6gen, s, blocked);
        v.note(&format!("theta_M is not in I(R, G_M)^{r}"));
        return Ok(v);
    }
    let lhs = class_in_qr(&data.theta.theta, group, &ring, r)?;
    let mut disc = GroupRingElement::basis(group, group.identity());
    for &p in data.tate.keys() {
        let g = data.q_tilde(p)?;
        disc = disc.mul(&GroupRingElement::augmentation_generator(group, g), group);
    }
    let rhs = class_in_qr(&disc, group, &ring, r)?.scale(exponent)?;
    let mut failing: BTreeSet<u64> = lhs.differing_primes(&rhs).into_iter().collect();
    if data.rank > 0 {
        for &l in &s {
            if !lhs.component_is_zero(l) || !rhs.component_is_zero(l) {
                failing.insert(l);
            }
        }
    }
    let mut v = Verdict::new(ConjectureId::C6gen, s, failing.into_iter().collect());
    v.lhs = Some(lhs);
    v.rhs = Some(rhs);
    Ok(v)
}

/// Run one conjecture, mapping unmet preconditions to a skipped verdict.
pub fn run_check(id: ConjectureId, data: &LayerData, variant: &Variant) -> Result<Verdict> {
    let out = match id {
        ConjectureId::C1_1 => check_conj_1_1(data, variant),
        ConjectureId::C4mul => check_conj4mul(data, variant),
        ConjectureId::C5mul => check_conj5mul(data, variant),
        ConjectureId::C3_1mod => check_conj_3_1(data, variant),
        ConjectureId::C4gen => check_conj4_general(data, variant),
        ConjectureId::C6gen => check_conj6_general(data, variant),
    };
    let mut v = match out {
        Err(Error::Precondition(why)) => Verdict::skipped(id, &why),
        other => diagnose(other?, data.torsion),
    };
    v.torsion_inverted = variant.torsion_inverted;
    Ok(v)
}

/// Annotate each failing l with whether it divides the torsion order.
pub fn diagnose(mut verdict: Verdict, torsion: u64) -> Verdict {
    let failing = verdict.failing_primes.clone();
    for l in failing {
        if torsion % l == 0 {
            verdict.note(&format!("{l} | torsion {torsion}"));
        } else {
            verdict.note(&format!("anomaly: {l} does not divide torsion {torsion}"));
        }
    }
    verdict
}

/// lambda(0,1) / (2 C_p) as used by the multiplicative form at a prime layer.
pub fn c11_rhs_exponent(data: &LayerData) -> Result<Rational64> {
    Ok(c11_exponent(data, data.single_prime()?))
}

