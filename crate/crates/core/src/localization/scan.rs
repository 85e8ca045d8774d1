//! Live scans: raw dBm readings keyed by access point identifier.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{normalize_rssi, ApRegistry};
use crate::error::{Error, Result};

/// One scan. Readings keep their input order; lookups ignore it.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Scan {
    pub readings: Vec<(String, f64)>,
}

impl Scan {
    pub fn new(readings: Vec<(String, f64)>) -> Self {
        Self { readings }
    }

    /// Normalized fingerprint over `registry`. Unknown identifiers are
    /// skipped and unseen access points read as no signal. Returns the
    /// vector and how many readings matched the registry.
    pub fn to_fingerprint(&self, registry: &ApRegistry) -> (Vec<f64>, usize) {
        let mut v = vec![0.0; registry.len()];
        let mut known = 0;
        for (id, dbm) in &self.readings {
            if let Some(i) = registry.index_of(id) {
                v[i] = normalize_rssi(*dbm);
                known += 1;
            }
        }
        (v, known)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
            || text.trim_start().starts_with('{');
        if is_json {
            Self::parse_json(&text, &path.display().to_string())
        } else {
            Self::parse_csv(&text, &path.display().to_string())
        }
    }

    /// JSON object mapping identifiers to dBm, e.g. `{"WAP001": -61}`.
    pub fn parse_json(text: &str, source_name: &str) -> Result<Self> {
        let map: BTreeMap<String, f64> =
            serde_json::from_str(text).map_err(|e| Error::ingest(source_name, "document", e.to_string()))?;
        Self::checked(map.into_iter().collect(), source_name)
    }

    /// Either a long layout with header `ap_id,dbm` and one pair per row,
    /// or a wide single record: identifiers on the first row, dBm on the
    /// second.
    pub fn parse_csv(text: &str, source_name: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = rdr
            .records()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::ingest(source_name, "document", e.to_string()))?;
        let header = rows.first().ok_or_else(|| Error::ingest(source_name, "row 1", "empty scan"))?;
        let parse = |raw: &str, loc: String| -> Result<f64> {
            raw.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::ingest(source_name, loc, format!("bad dBm value {raw:?}")))
        };

        let long = header.len() == 2
            && matches!(header[0].trim(), "ap_id" | "ap" | "bssid" | "mac")
            && header[1].trim() == "dbm";
        let readings = if long {
            rows[1..]
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    if r.len() != 2 {
                        return Err(Error::ingest(source_name, format!("row {}", i + 2), "expected ap_id,dbm"));
                    }
                    Ok((r[0].trim().to_owned(), parse(&r[1], format!("row {}", i + 2))?))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            if rows.len() != 2 || rows[1].len() != header.len() {
                return Err(Error::ingest(
                    source_name,
                    "document",
                    "expected a header of access point ids and one row of dBm values",
                ));
            }
            header
                .iter()
                .zip(rows[1].iter())
                .map(|(id, raw)| Ok((id.trim().to_owned(), parse(raw, format!("column {id}"))?)))
                .collect::<Result<Vec<_>>>()?
        };
        Self::checked(readings, source_name)
    }

    fn checked(readings: Vec<(String, f64)>, source_name: &str) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (id, _) in &readings {
            if !seen.insert(id.as_str()) {
                return Err(Error::ingest(source_name, format!("access point {id}"), "duplicate reading"));
            }
        }
        Ok(Self { readings })
    }
}
