//! Pair enumeration and batch execution.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::dataset::{dataset_digest, parse_dataset, DatasetEntry};
use super::report::{read_report, summarize, write_report, Header, PairInputs, PairReport, Report, ReportLine, Summary, REPORT_VERSION};
use crate::conjectures::{run_check, ConjectureId, LayerData, Variant, Verdict};
use crate::curves::{period_data, CurveRecord, PERIOD_PRECISION_BITS};
use crate::error::{Error, Result};
use crate::group_ring::DEFAULT_N_MAX;
use crate::modsym::{build_space, isolate_symbol, normalize, IsolatedSymbol, ManinSymbolSpace, PlusModularSymbol};

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub max_conductor: u64,
    /// labels swept in addition to the conductor range
    pub include: Vec<String>,
    pub conjectures: Vec<ConjectureId>,
    pub n_max: u32,
    pub jobs: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub resume: Option<String>,
}

impl RunConfig {
    pub fn new(max_conductor: u64) -> Self {
        RunConfig {
            max_conductor,
            include: Vec::new(),
            conjectures: ConjectureId::ALL.to_vec(),
            n_max: DEFAULT_N_MAX,
            jobs: None,
            cache_dir: None,
            resume: None,
        }
    }

    /// (conjecture, variant) pairs evaluated on every pair.
    pub fn checks(&self) -> Vec<(ConjectureId, Variant)> {
        let mut out = Vec::new();
        for &id in &self.conjectures {
            out.push((id, Variant::plain()));
            if matches!(id, ConjectureId::C4mul | ConjectureId::C4gen | ConjectureId::C6gen) {
                out.push((id, Variant::torsion_inverted()));
            }
        }
        out
    }

    fn fingerprint(&self) -> String {
        let mut include = self.include.clone();
        include.sort();
        let names: Vec<&str> = self.conjectures.iter().map(|c| c.cli_name()).collect();
        format!("v{REPORT_VERSION};N<={};+{};{};n_max={}", self.max_conductor, include.join(","), names.join(","), self.n_max)
    }
}

/// Primes of split multiplicative reduction, ascending.
pub fn enumerate_pairs(record: &CurveRecord) -> Vec<u64> {
    record.split_primes()
}

fn cache_path(dir: &Path, label: &str) -> PathBuf {
    let safe: String = label.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' { c } else { '_' }).collect();
    dir.join("symbols").join(format!("{safe}.sym"))
}

fn load_cached(dir: Option<&Path>, record: &CurveRecord) -> Option<PlusModularSymbol> {
    let text = fs::read_to_string(cache_path(dir?, &record.label)).ok()?;
    let sym = PlusModularSymbol::from_text(&text).ok()?;
    (sym.level == record.conductor && sym.curve_label == record.label).then_some(sym)
}

fn store_cached(dir: Option<&Path>, sym: &PlusModularSymbol) {
    if let Some(dir) = dir {
        let path = cache_path(dir, &sym.curve_label);
        // the cache is an optimisation; failures to write it are ignored
        if fs::create_dir_all(path.parent().unwrap()).is_ok() {
            let tmp = path.with_extension("tmp");
            if fs::write(&tmp, sym.to_text()).is_ok() {
                let _ = fs::rename(&tmp, &path);
            }
        }
    }
}

/// Modular-symbol work shared by the curves of one conductor.
struct LevelCache {
    level: u64,
    space: Option<ManinSymbolSpace>,
    isolated: HashMap<Vec<(u64, i64)>, IsolatedSymbol>,
}

impl LevelCache {
    fn new(level: u64) -> Self {
        LevelCache { level, space: None, isolated: HashMap::new() }
    }

    fn symbol(&mut self, record: &CurveRecord, dir: Option<&Path>) -> Result<PlusModularSymbol> {
        if let Some(s) = load_cached(dir, record) {
            return Ok(s);
        }
        // curves with the same Hecke eigenvalues share the eigen-functional
        let key: Vec<(u64, i64)> = record.ap_cache.iter().map(|(&p, &a)| (p, a)).collect();
        if !self.isolated.contains_key(&key) {
            if self.space.is_none() {
                self.space = Some(build_space(self.level, 1)?);
            }
            let iso = isolate_symbol(self.space.as_ref().unwrap(), record)?;
            self.isolated.insert(key.clone(), iso);
        }
        let period = period_data(&record.model, PERIOD_PRECISION_BITS)?;
        let sym = normalize(&self.isolated[&key], record, &period)?;
        store_cached(dir, &sym);
        Ok(sym)
    }
}

/// Normalised plus symbol of a single curve, using the on-disk cache if given.
pub fn symbol_for(record: &CurveRecord, cache_dir: Option<&Path>) -> Result<PlusModularSymbol> {
    LevelCache::new(record.conductor).symbol(record, cache_dir)
}

/// Inputs and verdicts for one (curve, p).
pub fn pair_report(record: &CurveRecord, sym: &PlusModularSymbol, p: u64, checks: &[(ConjectureId, Variant)]) -> PairReport {
    let mut report =
        PairReport { label: record.label.clone(), conductor: record.conductor, p, inputs: None, verdicts: Vec::new(), error: None };
    let data = match LayerData::new(record, sym, p) {
        Ok(d) => d,
        Err(e) => {
            report.error = Some(e.to_string());
            return report;
        }
    };
    let t = &data.tate[&p];
    report.inputs = Some(PairInputs {
        lambda01: data.lambda01.to_string(),
        lambdas: data.theta.terms().into_iter().map(|(a, l)| (a, l.to_string())).collect(),
        q_p: t.q_display.clone(),
        ord_q: t.ord_q,
        tamagawa_p: t.tamagawa,
        torsion: data.torsion,
        rank: data.rank,
        sha: data.sha,
    });
    for (id, variant) in checks {
        match run_check(*id, &data, variant) {
            Ok(v) => report.verdicts.push(v),
            Err(e) => {
                let mut v = Verdict::skipped(*id, &format!("error: {e}"));
                v.torsion_inverted = variant.torsion_inverted;
                report.verdicts.push(v);
                report.error.get_or_insert_with(|| e.to_string());
            }
        }
    }
    report
}

fn panic_text(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

fn error_report(e: &DatasetEntry, p: u64, msg: String) -> PairReport {
    PairReport { label: e.label.clone(), conductor: e.conductor, p, inputs: None, verdicts: Vec::new(), error: Some(msg) }
}

/// All pair reports for the curves of one conductor, sorted by (label, p).
fn process_conductor(level: u64, entries: &[&DatasetEntry], cfg: &RunConfig, checks: &[(ConjectureId, Variant)]) -> Vec<PairReport> {
    let mut cache = LevelCache::new(level);
    let mut out = Vec::new();
    let mut entries = entries.to_vec();
    entries.sort_by(|a, b| a.label.cmp(&b.label));
    for e in entries {
        let record = match catch_unwind(|| e.to_record()) {
            Ok(Ok(r)) => r,
            Ok(Err(err)) => {
                out.push(error_report(e, 0, err.to_string()));
                continue;
            }
            Err(p) => {
                out.push(error_report(e, 0, format!("panic: {}", panic_text(p))));
                continue;
            }
        };
        let primes = enumerate_pairs(&record);
        if primes.is_empty() {
            continue;
        }
        let sym = match catch_unwind(AssertUnwindSafe(|| cache.symbol(&record, cfg.cache_dir.as_deref()))) {
            Ok(Ok(s)) => s,
            Ok(Err(err)) => {
                out.extend(primes.iter().map(|&p| error_report(e, p, err.to_string())));
                continue;
            }
            Err(p) => {
                let msg = format!("panic: {}", panic_text(p));
                out.extend(primes.iter().map(|&q| error_report(e, q, msg.clone())));
                continue;
            }
        };
        for p in primes {
            match catch_unwind(AssertUnwindSafe(|| pair_report(&record, &sym, p, checks))) {
                Ok(r) => out.push(r),
                Err(pn) => out.push(error_report(e, p, format!("panic: {}", panic_text(pn)))),
            }
        }
    }
    out
}

/// Resume token for a dataset digest and configuration.
pub fn run_token(digest: &str, cfg: &RunConfig) -> String {
    let h = Sha256::digest(format!("{digest}\n{}", cfg.fingerprint()).as_bytes());
    hex::encode(&h[..8])
}

/// Entries selected by the configuration, grouped by conductor.
pub fn select<'a>(entries: &'a [DatasetEntry], cfg: &RunConfig) -> Result<BTreeMap<u64, Vec<&'a DatasetEntry>>> {
    let include: BTreeSet<&str> = cfg.include.iter().map(|s| s.as_str()).collect();
    for l in &include {
        if !entries.iter().any(|e| e.label == *l) {
            return Err(Error::UnknownLabel(l.to_string()));
        }
    }
    let mut out: BTreeMap<u64, Vec<&DatasetEntry>> = BTreeMap::new();
    for e in entries {
        if e.conductor <= cfg.max_conductor || include.contains(e.label.as_str()) {
            out.entry(e.conductor).or_default().push(e);
        }
    }
    Ok(out)
}

/// Sweep the dataset, writing the report to `out`. The optional callback
/// receives (conductors done, conductors total) after each chunk.
pub fn run_sweep(dataset: &Path, cfg: &RunConfig, out: &Path, progress: Option<&(dyn Fn(usize, usize) + Sync)>) -> Result<Summary> {
    let digest = dataset_digest(dataset)?;
    let entries = parse_dataset(dataset)?;
    let groups = select(&entries, cfg)?;
    let token = run_token(&digest, cfg);
    let mut include = cfg.include.clone();
    include.sort();
    let header = Header {
        version: REPORT_VERSION,
        token: token.clone(),
        dataset_digest: digest,
        max_conductor: cfg.max_conductor,
        include,
        conjectures: cfg.conjectures.iter().map(|c| c.to_string()).collect(),
        n_max: cfg.n_max,
    };

    let mut kept: Vec<PairReport> = Vec::new();
    let mut done: BTreeSet<u64> = BTreeSet::new();
    if let Some(given) = &cfg.resume {
        let prev = read_report(out)?;
        if *given != token || prev.header != header {
            return Err(Error::ResumeMismatch);
        }
        // only the last conductor written can be incomplete
        let last = prev.pairs.iter().map(|p| p.conductor).max();
        kept = prev.pairs.into_iter().filter(|p| Some(p.conductor) != last).collect();
        if let Some(last) = last {
            done.extend(groups.keys().copied().filter(|&n| n < last));
        }
    }
    write_report(&Report { header: header.clone(), pairs: kept.clone(), summary: None }, out)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    let checks = cfg.checks();
    let todo: Vec<(u64, &Vec<&DatasetEntry>)> = groups.iter().filter(|(n, _)| !done.contains(n)).map(|(n, v)| (*n, v)).collect();
    let total = groups.len();
    let chunk = (pool.current_num_threads() * 8).max(32);
    let mut file = OpenOptions::new().append(true).open(out).map_err(|e| Error::io(out, e))?;
    let mut all = kept;
    for (i, part) in todo.chunks(chunk).enumerate() {
        let results: Vec<Vec<PairReport>> =
            pool.install(|| part.par_iter().map(|(n, es)| process_conductor(*n, es, cfg, &checks)).collect());
        let mut text = String::new();
        for r in results.into_iter().flatten() {
            text.push_str(&ReportLine::Pair(r.clone()).to_line());
            all.push(r);
        }
        file.write_all(text.as_bytes()).map_err(|e| Error::io(out, e))?;
        file.flush().map_err(|e| Error::io(out, e))?;
        if let Some(cb) = progress {
            cb(done.len() + (i * chunk + part.len()).min(todo.len()), total);
        }
    }
    drop(file);
    all.sort_by_key(|p| p.key());
    let summary = summarize(&all);
    write_report(&Report { header, pairs: all, summary: Some(summary.clone()) }, out)?;
    Ok(summary)
}

/// Look up a dataset entry by label and build its record.
pub fn record_for_label(entries: &[DatasetEntry], label: &str) -> Result<CurveRecord> {
    entries.iter().find(|e| e.label == label || e.cremona.as_deref() == Some(label)).ok_or_else(|| Error::UnknownLabel(label.into()))?.to_record()
}
