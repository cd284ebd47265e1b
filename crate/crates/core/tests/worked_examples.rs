use std::path::PathBuf;

use mtcheck_core::conjectures::{run_check, ConjectureId, LayerData, Status, Variant};
use mtcheck_core::harness::{parse_dataset, record_for_label, symbol_for, DatasetEntry};
use num_rational::Rational64;

fn dataset() -> Vec<DatasetEntry> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/curves.jsonl");
    parse_dataset(&path).unwrap()
}

fn layer(label: &str, p: u64) -> LayerData {
    let rec = record_for_label(&dataset(), label).unwrap();
    let sym = symbol_for(&rec, None).unwrap();
    LayerData::new(&rec, &sym, p).unwrap()
}

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

#[test]
fn curve_4123_b1_at_7() {
    let d = layer("4123.b1", 7);
    assert_eq!(d.theta.terms(), vec![(1, r(0)), (2, r(-1)), (3, r(1))]);
    for id in [ConjectureId::C1_1, ConjectureId::C4mul, ConjectureId::C4gen, ConjectureId::C6gen] {
        let v = run_check(id, &d, &Variant::plain()).unwrap();
        assert_eq!(v.status, Status::Fail, "{id}");
        assert_eq!(v.failing_primes, vec![3], "{id}");
        assert!(v.notes.contains("3 | torsion 3"), "{id}: {}", v.notes);
        // inverting the torsion order removes the only prime in S
        let t = run_check(id, &d, &Variant::torsion_inverted()).unwrap();
        assert_eq!(t.status, Status::Vacuous, "{id}");
        assert!(t.torsion_inverted);
    }
    let c5 = run_check(ConjectureId::C5mul, &d, &Variant::plain()).unwrap();
    assert_eq!(c5.status, Status::Skipped);
}

#[test]
fn curve_680_c1_at_5() {
    let d = layer("680.c1", 5);
    assert_eq!(d.lambda01, r(8));
    assert_eq!(d.theta.terms(), vec![(1, r(0)), (2, r(0))]);
    let t = &d.tate[&5];
    assert_eq!((t.ord_q, t.tamagawa), (4, 4));

    let c11 = run_check(ConjectureId::C1_1, &d, &Variant::plain()).unwrap();
    assert_eq!((c11.status, c11.failing_primes.clone()), (Status::Fail, vec![2]));
    let c6 = run_check(ConjectureId::C6gen, &d, &Variant::plain()).unwrap();
    assert_eq!((c6.status, c6.failing_primes), (Status::Fail, vec![2]));
    let c31 = run_check(ConjectureId::C3_1mod, &d, &Variant::plain()).unwrap();
    assert_eq!(c31.status, Status::Vacuous);
    let c4 = run_check(ConjectureId::C4mul, &d, &Variant::plain()).unwrap();
    assert_eq!(c4.status, Status::Skipped);
}

#[test]
fn trivial_group_at_layer_two_is_vacuous() {
    // G_2 is trivial, so every statement holds for free
    let entries = dataset();
    let d = entries
        .iter()
        .filter(|e| e.conductor % 2 == 0 && e.conductor % 4 != 0 && e.conductor < 100)
        .find_map(|e| {
            let rec = e.to_record().unwrap();
            let sym = symbol_for(&rec, None).unwrap();
            LayerData::new(&rec, &sym, 2).ok()
        })
        .expect("a curve with split reduction at 2");
    for id in [ConjectureId::C1_1, ConjectureId::C3_1mod, ConjectureId::C6gen] {
        assert_eq!(run_check(id, &d, &Variant::plain()).unwrap().status, Status::Vacuous, "{id}");
    }
}
