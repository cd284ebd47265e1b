use std::path::PathBuf;
use std::sync::OnceLock;

use mtcheck_core::group_ring::{element_class, phi_image, shared_group, GroupRingElement, SubringOfQ};
use mtcheck_core::harness::{parse_dataset, record_for_label, symbol_for};
use mtcheck_core::modsym::PlusModularSymbol;
use mtcheck_core::padic::PadicNumber;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use proptest::prelude::*;

const MODULI: [u64; 8] = [5, 7, 11, 13, 29, 31, 37, 43];

fn symbol(label: &str) -> PlusModularSymbol {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/curves.jsonl");
    let rec = record_for_label(&parse_dataset(&path).unwrap(), label).unwrap();
    symbol_for(&rec, None).unwrap()
}

fn sym_37a() -> &'static PlusModularSymbol {
    static S: OnceLock<PlusModularSymbol> = OnceLock::new();
    S.get_or_init(|| symbol("37.a1"))
}

fn sym_11a() -> &'static PlusModularSymbol {
    static S: OnceLock<PlusModularSymbol> = OnceLock::new();
    S.get_or_init(|| symbol("11.a1"))
}

/// Element of the augmentation ideal: the identity absorbs the coefficient sum.
fn element(m: u64, coeffs: &[i64]) -> GroupRingElement {
    let g = shared_group(m).unwrap();
    let mut terms: Vec<(usize, Rational64)> =
        g.elements().zip(coeffs.iter()).map(|(e, &c)| (e, Rational64::from_integer(c))).collect();
    let total: Rational64 = terms.iter().map(|t| t.1).sum();
    terms.push((g.identity(), -total));
    GroupRingElement::from_terms(&g, &terms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fractional_power_inverts_powering(mi in 0..MODULI.len(), g in 0usize..64, num in -50i64..50, den in 1i64..50) {
        let grp = shared_group(MODULI[mi]).unwrap();
        let g = g % grp.order() as usize;
        prop_assume!(den.gcd(&(grp.order() as i64)) == 1);
        let h = grp.fractional_power(g, num, den).unwrap();
        prop_assert_eq!(grp.pow(h, den), grp.pow(g, num));
    }

    #[test]
    fn element_class_is_a_homomorphism(mi in 0..MODULI.len(), a in 0usize..64, b in 0usize..64) {
        let grp = shared_group(MODULI[mi]).unwrap();
        let (a, b) = (a % grp.order() as usize, b % grp.order() as usize);
        let ring = SubringOfQ::integers();
        let lhs = element_class(&grp, grp.mul(a, b), &ring);
        let rhs = element_class(&grp, a, &ring).add(&element_class(&grp, b, &ring));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn phi_is_additive(mi in 0..MODULI.len(), x in prop::collection::vec(-9i64..9, 21), y in prop::collection::vec(-9i64..9, 21)) {
        let m = MODULI[mi];
        let grp = shared_group(m).unwrap();
        let ring = SubringOfQ::integers();
        let (a, b) = (element(m, &x), element(m, &y));
        let sum = phi_image(&a.add(&b), &grp, &ring).unwrap();
        let parts = phi_image(&a, &grp, &ring).unwrap().add(&phi_image(&b, &grp, &ring).unwrap());
        prop_assert_eq!(sum, parts);
    }

    #[test]
    fn inverting_more_primes_never_adds_obstructions(mi in 0..MODULI.len(), x in prop::collection::vec(-9i64..9, 21), extra in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let m = MODULI[mi];
        let grp = shared_group(m).unwrap();
        let theta = element(m, &x);
        let small = SubringOfQ::integers();
        let big = SubringOfQ::with_primes([extra]);
        let c_small = phi_image(&theta, &grp, &small).unwrap();
        let c_big = phi_image(&theta, &grp, &big).unwrap();
        for l in big.s_primes(&grp) {
            prop_assert!(small.s_primes(&grp).contains(&l));
            prop_assert_eq!(c_big.component_is_zero(l), c_small.component_is_zero(l));
        }
        prop_assert!(!big.s_primes(&grp).contains(&extra));
    }

    #[test]
    fn modular_symbol_is_even_and_periodic(a in -500i64..500, mi in 0..MODULI.len()) {
        let m = MODULI[mi] as i64;
        for sym in [sym_11a(), sym_37a()] {
            prop_assert_eq!(sym.evaluate(a, m), sym.evaluate(-a, m));
            prop_assert_eq!(sym.evaluate(a, m), sym.evaluate(a + m, m));
        }
    }

    #[test]
    fn padic_field_operations(x in -10_000i64..10_000, y in 1i64..10_000, pi in 0usize..4) {
        let p = [2u64, 3, 5, 7][pi];
        prop_assume!(y % p as i64 != 0);
        let a = PadicNumber::from_integer(p, &BigInt::from(x), 20);
        let b = PadicNumber::from_integer(p, &BigInt::from(y), 20);
        prop_assert_eq!(a.add(&b).sub(&b).lift(), a.lift());
        prop_assert_eq!(a.mul(&b).div(&b).unwrap().lift(), a.lift());
        prop_assert!(a.sub(&a).is_zero());
    }
}

#[test]
fn manin_three_term_sum_over_the_layer() {
    // sum of lambda(a, p) over a mod p equals (a_p - 1) lambda(0, 1) at good p
    for (sym, p, ap) in [(sym_11a(), 5i64, 1i64), (sym_11a(), 7, -2), (sym_37a(), 5, -2), (sym_37a(), 3, -3)] {
        let total: Rational64 = (0..p).map(|a| sym.evaluate(a, p)).sum();
        let expect = sym.evaluate(0, 1) * Rational64::from_integer(ap - 1);
        assert_eq!(total, expect, "p = {p}");
    }
    assert!(sym_37a().evaluate(0, 1).is_zero());
}
