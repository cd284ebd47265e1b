//! Fixtures shared by the benchmarks in `benches/`.

use std::path::PathBuf;

use mtcheck_core::curves::CurveRecord;
use mtcheck_core::harness::{parse_dataset, record_for_label};

pub fn dataset_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/curves.jsonl")
}

pub fn record(label: &str) -> CurveRecord {
    let entries = parse_dataset(&dataset_path()).expect("bundled dataset parses");
    record_for_label(&entries, label).expect("label in the bundled dataset")
}
