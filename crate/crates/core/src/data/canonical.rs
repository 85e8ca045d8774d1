//! Canonical fingerprint CSV: `device,rp_label,x,y,z,<ap ids...>` with RSS in dBm.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use super::{
    denormalize_rssi, is_out_of_range, normalize_rssi, ApRegistry, FingerprintDatabase, FingerprintRecord, Location,
    RssiVector,
};
use crate::error::{Error, Result};

const FIXED_COLUMNS: [&str; 5] = ["device", "rp_label", "x", "y", "z"];

pub fn load_canonical_csv(path: impl AsRef<Path>) -> Result<FingerprintDatabase> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_canonical_csv(file, &path.display().to_string())
}

pub fn parse_canonical_csv<R: Read>(reader: R, source_name: &str) -> Result<FingerprintDatabase> {
    let ingest = |loc: String, msg: String| Error::ingest(source_name, loc, msg);

    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| ingest("header".into(), e.to_string()))?
        .clone();
    if headers.len() < FIXED_COLUMNS.len() {
        return Err(ingest(
            "header".into(),
            format!("expected header starting with {}", FIXED_COLUMNS.join(",")),
        ));
    }
    for (i, want) in FIXED_COLUMNS.iter().enumerate() {
        if headers[i].trim() != *want {
            return Err(ingest(
                format!("header, column {}", i + 1),
                format!("expected {want:?}, found {:?}", &headers[i]),
            ));
        }
    }
    let mut seen = HashSet::new();
    let ap_ids: Vec<String> = headers.iter().skip(FIXED_COLUMNS.len()).map(|h| h.trim().to_owned()).collect();
    for id in &ap_ids {
        if !seen.insert(id.as_str()) {
            return Err(ingest(format!("header, column {id}"), "duplicate access point column".into()));
        }
    }

    let mut records = Vec::new();
    let mut clamped = 0usize;
    for (i, result) in rdr.records().enumerate() {
        let row_no = i + 1;
        // The csv reader reports ragged rows as errors.
        let rec = result.map_err(|e| ingest(format!("row {row_no}"), e.to_string()))?;
        let num = |col: usize| -> Result<f64> {
            let raw = rec[col].trim();
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ingest(format!("row {row_no}, column {}", &headers[col]), format!("bad number {raw:?}")))
        };
        let mut rssi = Vec::with_capacity(ap_ids.len());
        for col in FIXED_COLUMNS.len()..headers.len() {
            let dbm = num(col)?;
            if is_out_of_range(dbm) {
                clamped += 1;
            }
            rssi.push(normalize_rssi(dbm));
        }
        records.push(FingerprintRecord {
            rssi: RssiVector(rssi),
            location: Location::new(num(2)?, num(3)?, num(4)?),
            rp_label: rec[1].trim().to_owned(),
            device: rec[0].trim().to_owned(),
            synthetic: false,
        });
    }

    let registry = ApRegistry::new(ap_ids)?;
    let mut db = FingerprintDatabase::new(registry, records).map_err(|e| ingest("records".into(), e.to_string()))?;
    db.set_clamped_readings(clamped);
    Ok(db)
}

/// Writes `db` in canonical layout, converting fingerprints back to dBm.
pub fn write_canonical_csv<W: Write>(db: &FingerprintDatabase, writer: W) -> Result<()> {
    let to_io = |e: csv::Error| Error::Artifact(format!("csv write failed: {e}"));
    let mut w = csv::Writer::from_writer(writer);
    let header = FIXED_COLUMNS.iter().map(|s| s.to_string()).chain(db.registry().ids().iter().cloned());
    w.write_record(header).map_err(to_io)?;
    for r in db.records() {
        let mut row = vec![
            r.device.clone(),
            r.rp_label.clone(),
            r.location.x.to_string(),
            r.location.y.to_string(),
            r.location.z.to_string(),
        ];
        // Six decimals hides the representation error of the normalization round trip.
        row.extend(
            r.rssi
                .as_slice()
                .iter()
                .map(|&v| ((denormalize_rssi(v) * 1e6).round() / 1e6).to_string()),
        );
        w.write_record(&row).map_err(to_io)?;
    }
    w.flush().map_err(|e| Error::Artifact(format!("csv write failed: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "device,rp_label,x,y,z,ap1,ap2,ap3\n\
                         A,rp1,0,0,0,-100,-50,-20\n\
                         B,rp2,1,0,0,-70,-100,0\n";

    #[test]
    fn small_file_loads() {
        let db = parse_canonical_csv(SMALL.as_bytes(), "mem").unwrap();
        assert_eq!(db.dim(), 3);
        assert_eq!(db.len(), 2);
        assert_eq!(db.records()[0].rssi.as_slice(), &[0.0, 0.5, 0.8]);
        assert_eq!(db.devices(), vec!["A", "B"]);
        assert_eq!(db.rp_coordinates()["rp2"], Location::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn ragged_row_rejected() {
        let csv = "device,rp_label,x,y,z,ap1,ap2\nA,rp1,0,0,0,-100\n";
        let err = parse_canonical_csv(csv.as_bytes(), "mem").unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
    }

    #[test]
    fn duplicate_ap_column_rejected() {
        let csv = "device,rp_label,x,y,z,ap1,ap1\nA,rp1,0,0,0,-100,-90\n";
        assert!(parse_canonical_csv(csv.as_bytes(), "mem").is_err());
    }

    #[test]
    fn conflicting_rp_coordinates_rejected() {
        let csv = "device,rp_label,x,y,z,ap1\nA,rp1,0,0,0,-60\nA,rp1,0,1,0,-60\n";
        assert!(parse_canonical_csv(csv.as_bytes(), "mem").is_err());
    }

    #[test]
    fn write_then_read_reproduces_database() {
        let db = parse_canonical_csv(SMALL.as_bytes(), "mem").unwrap();
        let mut buf = Vec::new();
        write_canonical_csv(&db, &mut buf).unwrap();
        let again = parse_canonical_csv(buf.as_slice(), "mem").unwrap();
        assert_eq!(db, again);
    }
}
