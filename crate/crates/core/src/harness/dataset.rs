//! Curve datasets: one JSON object per line.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::curves::{CurveModel, CurveRecord};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cremona: Option<String>,
    pub ainvs: [i64; 5],
    pub conductor: u64,
    pub rank: u32,
    pub torsion: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sha: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tamagawa: Option<BTreeMap<u64, u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modular_degree: Option<u64>,
}

impl DatasetEntry {
    /// Build the curve record and cross-check the recomputed invariants.
    pub fn to_record(&self) -> Result<CurveRecord> {
        let a = self.ainvs.map(BigInt::from);
        let rec = CurveRecord::new(&self.label, CurveModel::new(a), self.rank, self.sha)?;
        let bad = |detail: String| Error::Mismatch { label: self.label.clone(), detail };
        if rec.conductor != self.conductor {
            return Err(bad(format!("conductor {} recomputed as {}", self.conductor, rec.conductor)));
        }
        if rec.torsion_order != self.torsion {
            return Err(bad(format!("torsion {} recomputed as {}", self.torsion, rec.torsion_order)));
        }
        if let Some(t) = &self.tamagawa {
            if *t != rec.tamagawa {
                return Err(bad(format!("Tamagawa numbers {t:?} recomputed as {:?}", rec.tamagawa)));
            }
        }
        Ok(rec)
    }
}

/// Parse a JSON-lines dataset; blank lines and lines starting with '#' are ignored.
pub fn parse_dataset_str(text: &str) -> Result<Vec<DatasetEntry>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let e: DatasetEntry =
            serde_json::from_str(line).map_err(|err| Error::Parse { line: i + 1, msg: err.to_string() })?;
        if !seen.insert(e.label.clone()) {
            return Err(Error::DuplicateLabel(e.label));
        }
        out.push(e);
    }
    Ok(out)
}

pub fn parse_dataset(path: &Path) -> Result<Vec<DatasetEntry>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset_str(&text)
}

/// Hex SHA-256 of the file contents.
pub fn dataset_digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn parse_ainvs(s: &str, line: usize) -> Result<[i64; 5]> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    let v: Vec<i64> = inner
        .split(',')
        .map(|x| x.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse { line, msg: format!("bad a-invariants {s}") })?;
    v.try_into().map_err(|_| Error::Parse { line, msg: format!("expected five a-invariants in {s}") })
}

/// Convert a Cremona table: `allcurves` rows `N class num [a1,a2,a3,a4,a6] r |T|`,
/// or `allbsd` rows that continue with `cp Omega L Reg Sha`. Labels become
/// Cremona labels; Sha is kept for rank 0 only.
pub fn convert_cremona_table(text: &str) -> Result<Vec<DatasetEntry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let f: Vec<&str> = raw.split_whitespace().collect();
        if f.is_empty() || f[0].starts_with('#') {
            continue;
        }
        if f.len() != 6 && f.len() != 11 {
            return Err(Error::Parse { line, msg: format!("expected 6 or 11 fields, found {}", f.len()) });
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| Error::Parse { line, msg: format!("bad number {s}") });
        let conductor = num(f[0])?;
        let rank = num(f[4])? as u32;
        let sha = if f.len() == 11 && rank == 0 {
            let s: f64 = f[10].parse().map_err(|_| Error::Parse { line, msg: format!("bad Sha {}", f[10]) })?;
            Some(s.round() as u64)
        } else {
            None
        };
        out.push(DatasetEntry {
            label: format!("{}{}{}", f[0], f[1], f[2]),
            cremona: None,
            ainvs: parse_ainvs(f[3], line)?,
            conductor,
            rank,
            torsion: num(f[5])?,
            sha,
            tamagawa: None,
            modular_degree: None,
        });
    }
    Ok(out)
}

/// Convert an LMFDB-style CSV export with a header naming at least
/// `label, ainvs, conductor, rank, torsion` and optionally `sha`; ainvs are
/// written `[a1,a2,a3,a4,a6]` (quoted, or with ';' separators).
pub fn convert_lmfdb_csv(text: &str) -> Result<Vec<DatasetEntry>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, head)) = lines.next() else { return Ok(Vec::new()) };
    let cols: Vec<String> = split_csv(head).into_iter().map(|c| c.trim().to_lowercase()).collect();
    let col = |name: &str| cols.iter().position(|c| c == name);
    let need = |name: &str| col(name).ok_or_else(|| Error::Parse { line: 1, msg: format!("missing column {name}") });
    let (il, ia, ic, ir, it) = (need("label")?, need("ainvs")?, need("conductor")?, need("rank")?, need("torsion")?);
    let is = col("sha");
    let mut out = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        let f = split_csv(raw);
        let get = |k: usize| f.get(k).map(|s| s.trim()).ok_or_else(|| Error::Parse { line, msg: "short row".into() });
        let num = |s: &str| s.parse::<u64>().map_err(|_| Error::Parse { line, msg: format!("bad number {s}") });
        let rank = num(get(ir)?)? as u32;
        let sha = match is {
            Some(k) if rank == 0 && !get(k)?.is_empty() => Some(num(get(k)?)?),
            _ => None,
        };
        out.push(DatasetEntry {
            label: get(il)?.to_string(),
            cremona: None,
            ainvs: parse_ainvs(&get(ia)?.replace(';', ","), line)?,
            conductor: num(get(ic)?)?,
            rank,
            torsion: num(get(it)?)?,
            sha,
            tamagawa: None,
            modular_degree: None,
        });
    }
    Ok(out)
}

fn split_csv(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for ch in line.chars() {
        match ch {
            '"' => quoted = !quoted,
            ',' if !quoted => out.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    out.push(cur);
    out
}

/// Write entries as JSON lines.
pub fn write_dataset(entries: &[DatasetEntry]) -> String {
    entries.iter().map(|e| serde_json::to_string(e).expect("serialisable") + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO: &str = r#"{"label":"680.c1","ainvs":[0,-1,0,-3540,-79900],"conductor":680,"rank":0,"torsion":2,"tamagawa":{"2":4,"5":4,"17":1},"sha":1}
{"label":"4123.b1","ainvs":[0,1,1,-1373,19131],"conductor":4123,"rank":2,"torsion":3}
"#;

    #[test]
    fn parses_entries() {
        let v = parse_dataset_str(TWO).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].tamagawa.as_ref().unwrap()[&5], 4);
        assert!(parse_dataset_str("").unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_rows() {
        let bad = r#"{"label":"x","ainvs":[0,1,0],"conductor":1,"rank":0,"torsion":1}"#;
        assert!(matches!(parse_dataset_str(bad), Err(Error::Parse { line: 1, .. })));
        let dup = format!("{}{}", TWO.lines().next().unwrap(), "\n") + TWO;
        assert!(matches!(parse_dataset_str(&dup), Err(Error::DuplicateLabel(_))));
    }

    #[test]
    fn converts_cremona_rows() {
        let t = "11 a 1 [0,-1,1,-10,-20] 0 5\n";
        let v = convert_cremona_table(t).unwrap();
        assert_eq!(v[0].label, "11a1");
        assert_eq!(v[0].ainvs, [0, -1, 1, -10, -20]);
        let b = "11 a 1 [0,-1,1,-10,-20] 0 5 5 1.26920930427955 0.253841860855911 1 1.00000000000000\n";
        assert_eq!(convert_cremona_table(b).unwrap()[0].sha, Some(1));
    }

    #[test]
    fn converts_csv() {
        let t = "label,ainvs,conductor,rank,torsion,sha\n11.a2,\"[0,-1,1,-10,-20]\",11,0,5,1\n";
        let v = convert_lmfdb_csv(t).unwrap();
        assert_eq!(v[0].label, "11.a2");
        assert_eq!(v[0].sha, Some(1));
    }
}
