//! Dataset ingestion, pair enumeration, batch sweeps and reports.

mod batch;
mod dataset;
mod report;

pub use batch::{enumerate_pairs, pair_report, record_for_label, run_sweep, run_token, select, symbol_for, RunConfig};
pub use dataset::{
    convert_cremona_table, convert_lmfdb_csv, dataset_digest, parse_dataset, parse_dataset_str, write_dataset,
    DatasetEntry,
};
pub use report::{
    parse_report, read_report, summarize, summary_key, write_report, Counts, Header, PairInputs, PairReport, Report,
    ReportLine, Summary, REPORT_VERSION,
};
