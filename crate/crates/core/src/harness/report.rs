//! Line-delimited JSON reports: a header, one line per pair, a summary.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::conjectures::{Status, Verdict};
use crate::error::{Error, Result};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub version: u32,
    pub token: String,
    pub dataset_digest: String,
    pub max_conductor: u64,
    pub include: Vec<String>,
    pub conjectures: Vec<String>,
    pub n_max: u32,
}

/// Inputs a pair's verdicts were computed from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairInputs {
    /// lambda(0, 1)
    pub lambda01: String,
    /// (representative a of G_p, lambda(a, p))
    pub lambdas: Vec<(u64, String)>,
    pub q_p: String,
    pub ord_q: u64,
    pub tamagawa_p: u64,
    pub torsion: u64,
    pub rank: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sha: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub label: String,
    pub conductor: u64,
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<PairInputs>,
    pub verdicts: Vec<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PairReport {
    pub fn key(&self) -> (u64, String, u64) {
        (self.conductor, self.label.clone(), self.p)
    }

    /// Verdict for a conjecture and ring variant.
    pub fn verdict(&self, key: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| summary_key(v) == key)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub pass: u64,
    pub fail: u64,
    pub vacuous: u64,
    pub skipped: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pairs: u64,
    pub errors: u64,
    pub counts: BTreeMap<String, Counts>,
    /// failing (label, p) per conjecture key
    pub failures: BTreeMap<String, Vec<(String, u64)>>,
}

/// Conjecture name, suffixed with "+tors" for the torsion-inverted ring.
pub fn summary_key(v: &Verdict) -> String {
    if v.torsion_inverted {
        format!("{}+tors", v.conjecture)
    } else {
        v.conjecture.to_string()
    }
}

pub fn summarize(pairs: &[PairReport]) -> Summary {
    let mut s = Summary { pairs: pairs.len() as u64, ..Default::default() };
    for pr in pairs {
        if pr.error.is_some() {
            s.errors += 1;
        }
        for v in &pr.verdicts {
            let key = summary_key(v);
            let c = s.counts.entry(key.clone()).or_default();
            match v.status {
                Status::Pass => c.pass += 1,
                Status::Fail => {
                    c.fail += 1;
                    s.failures.entry(key).or_default().push((pr.label.clone(), pr.p));
                }
                Status::Vacuous => c.vacuous += 1,
                Status::Skipped => c.skipped += 1,
            }
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ReportLine {
    Header(Header),
    Pair(PairReport),
    Summary(Summary),
}

impl ReportLine {
    /// Parse one line. Dispatches on "type" by hand: serde's tagged-enum
    /// buffering cannot read the integer-keyed maps inside quotient classes.
    pub fn parse(line: &str) -> serde_json::Result<Self> {
        use serde::de::Error as _;
        let mut v: serde_json::Value = serde_json::from_str(line)?;
        let tag = v
            .as_object_mut()
            .and_then(|o| o.remove("type"))
            .ok_or_else(|| serde_json::Error::custom("missing field `type`"))?;
        match tag.as_str() {
            Some("header") => Ok(ReportLine::Header(serde_json::from_value(v)?)),
            Some("pair") => Ok(ReportLine::Pair(serde_json::from_value(v)?)),
            Some("summary") => Ok(ReportLine::Summary(serde_json::from_value(v)?)),
            _ => Err(serde_json::Error::custom(format!("unknown line type {tag}"))),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("report lines serialise") + "\n"
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub header: Header,
    pub pairs: Vec<PairReport>,
    pub summary: Option<Summary>,
}

impl Report {
    pub fn render(&self) -> String {
        let mut out = ReportLine::Header(self.header.clone()).to_line();
        for p in &self.pairs {
            out.push_str(&ReportLine::Pair(p.clone()).to_line());
        }
        if let Some(s) = &self.summary {
            out.push_str(&ReportLine::Summary(s.clone()).to_line());
        }
        out
    }
}

pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(report.render().as_bytes()).map_err(|e| Error::io(path, e))
}

/// Read a report. A truncated final line (from an interrupted run) is dropped.
pub fn read_report(path: &Path) -> Result<Report> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_report(&text)
}

pub fn parse_report(text: &str) -> Result<Report> {
    let mut header = None;
    let mut pairs = Vec::new();
    let mut summary = None;
    let complete = text.ends_with('\n');
    let lines: Vec<&str> = text.lines().collect();
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed = match ReportLine::parse(line) {
            Ok(v) => v,
            Err(_) if i + 1 == lines.len() && !complete => break,
            Err(e) => return Err(Error::Parse { line: i + 1, msg: e.to_string() }),
        };
        match parsed {
            ReportLine::Header(h) if i == 0 => header = Some(h),
            ReportLine::Header(_) => return Err(Error::Parse { line: i + 1, msg: "header after the first line".into() }),
            ReportLine::Pair(p) => pairs.push(p),
            ReportLine::Summary(s) => summary = Some(s),
        }
    }
    let header = header.ok_or_else(|| Error::Parse { line: 1, msg: "missing header".into() })?;
    Ok(Report { header, pairs, summary })
}
