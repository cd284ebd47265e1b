//! Elliptic curves over Q: models, local data, torsion, periods, L-values.

mod minimal;
mod model;
mod period;
mod points;
mod tate;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

pub use minimal::{from_c_invariants, minimal_model};
pub use model::{compute_invariants, CurveModel, Invariants};
pub use period::{
    l_series_sum, l_value_at_1, period_data, root_number, terms_needed, PeriodData, PERIOD_PRECISION_BITS,
};
pub use points::{an_list, ap, ap_good, count_points, torsion_bound, torsion_order};
pub use tate::{conductor_from_local, local_data, Kodaira, LocalData, Reduction};

use crate::arith::{factor_bigint, primes_up_to};
use crate::error::{Error, Result};

/// A curve from the dataset together with the arithmetic data derived from it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveRecord {
    pub label: String,
    /// Global minimal model.
    pub model: CurveModel,
    pub conductor: u64,
    pub rank: u32,
    pub torsion_order: u64,
    pub sha_order: Option<u64>,
    /// Tamagawa numbers at the bad primes.
    pub tamagawa: BTreeMap<u64, u64>,
    pub local: Vec<LocalData>,
    /// a_p for the primes below 100.
    pub ap_cache: BTreeMap<u64, i64>,
}

impl CurveRecord {
    /// Build a record from a model, computing conductor, local data and torsion.
    /// The input model must already be globally minimal.
    pub fn new(label: &str, model: CurveModel, rank: u32, sha_order: Option<u64>) -> Result<Self> {
        let disc = model.discriminant();
        if num_traits::Zero::is_zero(&disc) {
            return Err(Error::Singular);
        }
        let min = minimal_model(&model)?;
        if min.discriminant() != disc {
            return Err(Error::Mismatch { label: label.into(), detail: "model is not minimal".into() });
        }
        let local: Vec<LocalData> =
            factor_bigint(&disc)?.into_iter().map(|(p, _)| local_data(&model, p)).collect();
        let conductor = conductor_from_local(&local);
        let tamagawa = local.iter().map(|d| (d.p, d.tamagawa)).collect();
        let torsion_order = torsion_order(&model)?;
        let inv = model.invariants();
        let mut ap_cache = BTreeMap::new();
        for p in primes_up_to(100) {
            let v = match local.iter().find(|d| d.p == p) {
                Some(d) => bad_ap(d),
                None => ap_good(&model, &inv, p),
            };
            ap_cache.insert(p, v);
        }
        Ok(CurveRecord {
            label: label.to_string(),
            model,
            conductor,
            rank,
            torsion_order,
            sha_order,
            tamagawa,
            local,
            ap_cache,
        })
    }

    pub fn ap(&self, p: u64) -> i64 {
        if let Some(&v) = self.ap_cache.get(&p) {
            return v;
        }
        match self.local_at(p) {
            Some(d) => bad_ap(d),
            None => ap_good(&self.model, &self.model.invariants(), p),
        }
    }

    pub fn local_at(&self, p: u64) -> Option<&LocalData> {
        self.local.iter().find(|d| d.p == p)
    }

    pub fn bad_primes(&self) -> Vec<u64> {
        self.local.iter().filter(|d| d.reduction != Reduction::Good).map(|d| d.p).collect()
    }

    pub fn is_split(&self, p: u64) -> bool {
        matches!(self.local_at(p), Some(d) if d.reduction == Reduction::SplitMultiplicative)
    }

    /// Split multiplicative primes in increasing order.
    pub fn split_primes(&self) -> Vec<u64> {
        self.local
            .iter()
            .filter(|d| d.reduction == Reduction::SplitMultiplicative)
            .map(|d| d.p)
            .collect()
    }

    pub fn tamagawa_at(&self, p: u64) -> u64 {
        self.tamagawa.get(&p).copied().unwrap_or(1)
    }

    pub fn tamagawa_product(&self) -> u64 {
        self.tamagawa.values().product()
    }

    /// (p, a_p) for the bad primes, as needed by `an_list`.
    pub fn bad_ap_list(&self) -> Vec<(u64, i64)> {
        self.local.iter().filter(|d| d.reduction != Reduction::Good).map(|d| (d.p, bad_ap(d))).collect()
    }

    pub fn an(&self, n: usize) -> Vec<i64> {
        an_list(&self.model, &self.bad_ap_list(), n)
    }

    pub fn discriminant(&self) -> BigInt {
        self.model.discriminant()
    }
}

fn bad_ap(d: &LocalData) -> i64 {
    match d.reduction {
        Reduction::SplitMultiplicative => 1,
        Reduction::NonsplitMultiplicative => -1,
        Reduction::Additive => 0,
        Reduction::Good => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_680c1() {
        let e = CurveModel::from_i64([0, -1, 0, -3540, -79900]);
        let r = CurveRecord::new("680.c1", e, 0, Some(1)).unwrap();
        assert_eq!(r.conductor, 680);
        assert_eq!(r.torsion_order, 2);
        assert_eq!(r.tamagawa, BTreeMap::from([(2, 4), (5, 4), (17, 1)]));
        assert_eq!(r.split_primes(), vec![5, 17]);
        assert_eq!(r.local_at(5).unwrap().kodaira, Kodaira::I(4));
    }

    #[test]
    fn record_4123b1() {
        let e = CurveModel::from_i64([0, 1, 1, -1373, 19131]);
        let r = CurveRecord::new("4123.b1", e, 2, None).unwrap();
        assert_eq!(r.conductor, 4123);
        assert_eq!(r.torsion_order, 3);
        assert_eq!(r.split_primes(), vec![7, 19, 31]);
    }
}
