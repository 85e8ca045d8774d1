//! Loader for the UJIIndoorLoc column layout.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use super::{is_out_of_range, normalize_rssi, ApRegistry, FingerprintDatabase, FingerprintRecord, Location, RssiVector};
use crate::error::{Error, Result};

/// Number of `WAPnnn` columns in the layout.
pub const UJI_AP_COUNT: usize = 520;

/// Cell value meaning "access point not detected".
const NOT_DETECTED: f64 = 100.0;

const META_COLUMNS: [&str; 9] = [
    "LONGITUDE",
    "LATITUDE",
    "FLOOR",
    "BUILDINGID",
    "SPACEID",
    "RELATIVEPOSITION",
    "USERID",
    "PHONEID",
    "TIMESTAMP",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UjiOptions {
    /// Vertical distance between floors in meters.
    pub floor_height: f64,
    /// Easting/northing subtracted from every row. `None` uses the minimum
    /// found in the file; pin it when a train and a test file must share a
    /// frame.
    pub origin: Option<(f64, f64)>,
}

impl Default for UjiOptions {
    fn default() -> Self {
        Self {
            floor_height: 4.0,
            origin: None,
        }
    }
}

pub fn load_uji_csv(path: impl AsRef<Path>, opts: &UjiOptions) -> Result<FingerprintDatabase> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_uji_csv(file, &path.display().to_string(), opts)
}

struct RawRow {
    readings: Vec<f64>,
    easting: f64,
    northing: f64,
    floor: f64,
    label: String,
    phone: String,
}

pub fn parse_uji_csv<R: Read>(reader: R, source_name: &str, opts: &UjiOptions) -> Result<FingerprintDatabase> {
    let ingest = |loc: String, msg: String| Error::ingest(source_name, loc, msg);

    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| ingest("header".into(), e.to_string()))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(ingest("header".into(), "empty file".into()));
    }
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);

    let mut wap_cols = Vec::with_capacity(UJI_AP_COUNT);
    let mut ids = Vec::with_capacity(UJI_AP_COUNT);
    for i in 1..=UJI_AP_COUNT {
        let name = format!("WAP{i:03}");
        let col = find(&name).ok_or_else(|| ingest(format!("column {name}"), "missing column".into()))?;
        wap_cols.push(col);
        ids.push(name);
    }
    let mut meta = [0usize; META_COLUMNS.len()];
    for (slot, name) in meta.iter_mut().zip(META_COLUMNS) {
        *slot = find(name).ok_or_else(|| ingest(format!("column {name}"), "missing column".into()))?;
    }
    let [lon_col, lat_col, floor_col, bldg_col, space_col, relpos_col, _, phone_col, _] = meta;

    let mut rows = Vec::new();
    let mut clamped = 0usize;
    for (i, result) in rdr.records().enumerate() {
        let row_no = i + 1;
        let rec = result.map_err(|e| ingest(format!("row {row_no}"), e.to_string()))?;
        let cell = |col: usize| -> Result<f64> {
            let raw = rec
                .get(col)
                .ok_or_else(|| ingest(format!("row {row_no}, column {}", &headers[col]), "missing cell".into()))?;
            let v: f64 = raw.trim().parse().map_err(|_| {
                ingest(
                    format!("row {row_no}, column {}", &headers[col]),
                    format!("non-numeric cell {raw:?}"),
                )
            })?;
            if !v.is_finite() {
                return Err(ingest(
                    format!("row {row_no}, column {}", &headers[col]),
                    format!("non-finite cell {raw:?}"),
                ));
            }
            Ok(v)
        };
        let mut readings = Vec::with_capacity(UJI_AP_COUNT);
        for &col in &wap_cols {
            let mut dbm = cell(col)?;
            if dbm == NOT_DETECTED {
                dbm = super::RSSI_FLOOR_DBM;
            } else if is_out_of_range(dbm) {
                clamped += 1;
            }
            readings.push(normalize_rssi(dbm));
        }
        let int_cell = |col: usize| -> Result<i64> {
            let v = cell(col)?;
            if v.fract() != 0.0 {
                return Err(ingest(
                    format!("row {row_no}, column {}", &headers[col]),
                    format!("expected an integer, got {v}"),
                ));
            }
            Ok(v as i64)
        };
        let floor = int_cell(floor_col)?;
        let label = format!(
            "b{}-f{}-s{}-r{}",
            int_cell(bldg_col)?,
            floor,
            int_cell(space_col)?,
            int_cell(relpos_col)?
        );
        rows.push(RawRow {
            readings,
            easting: cell(lon_col)?,
            northing: cell(lat_col)?,
            floor: floor as f64,
            label,
            phone: int_cell(phone_col)?.to_string(),
        });
    }
    if rows.is_empty() {
        return Err(ingest("row 1".into(), "file has no data rows".into()));
    }

    let (x0, y0) = opts.origin.unwrap_or_else(|| {
        rows.iter().fold((f64::INFINITY, f64::INFINITY), |(x, y), r| {
            (x.min(r.easting), y.min(r.northing))
        })
    });

    let records: Vec<FingerprintRecord> = rows
        .into_iter()
        .map(|r| FingerprintRecord {
            rssi: RssiVector(r.readings),
            location: Location::new(r.easting - x0, r.northing - y0, r.floor * opts.floor_height),
            rp_label: r.label,
            device: r.phone,
            synthetic: false,
        })
        .collect();

    // A reference point's coordinates are the centroid of its rows; the
    // survey occasionally records the same spot with slightly different
    // coordinates.
    let mut sums: BTreeMap<&str, (f64, f64, f64, usize)> = BTreeMap::new();
    for r in &records {
        let e = sums.entry(r.rp_label.as_str()).or_insert((0.0, 0.0, 0.0, 0));
        e.0 += r.location.x;
        e.1 += r.location.y;
        e.2 += r.location.z;
        e.3 += 1;
    }
    let rp_coordinates = sums
        .into_iter()
        .map(|(label, (x, y, z, n))| {
            let n = n as f64;
            (label.to_owned(), Location::new(x / n, y / n, z / n))
        })
        .collect();

    let registry = ApRegistry::new(ids)?;
    let mut db = FingerprintDatabase::with_coordinates(registry, records, rp_coordinates)?;
    db.set_clamped_readings(clamped);
    Ok(db)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> String {
        let mut cols: Vec<String> = (1..=UJI_AP_COUNT).map(|i| format!("WAP{i:03}")).collect();
        cols.extend(META_COLUMNS.iter().map(|s| s.to_string()));
        cols.join(",")
    }

    fn row(overrides: &[(usize, i32)], meta: &str) -> String {
        let mut cells = vec!["100".to_string(); UJI_AP_COUNT];
        for &(i, v) in overrides {
            cells[i] = v.to_string();
        }
        format!("{},{meta}", cells.join(","))
    }

    #[test]
    fn sentinel_and_reading_normalize() {
        let csv = format!(
            "{}\n{}\n",
            header(),
            row(&[(6, -60)], "-7600.5,4864900.25,2,1,106,2,11,13,1371713733")
        );
        let db = parse_uji_csv(csv.as_bytes(), "mem", &UjiOptions::default()).unwrap();
        assert_eq!(db.dim(), 520);
        let v = db.records()[0].rssi.as_slice();
        assert!((v[6] - 0.4).abs() < 1e-15);
        assert!(v.iter().enumerate().all(|(i, &x)| i == 6 || x == 0.0));
        let r = &db.records()[0];
        assert_eq!(r.rp_label, "b1-f2-s106-r2");
        assert_eq!(r.device, "13");
        assert_eq!(r.location, Location::new(0.0, 0.0, 8.0));
    }

    #[test]
    fn locations_are_shifted_to_local_frame() {
        let csv = format!(
            "{}\n{}\n{}\n",
            header(),
            row(&[], "-7600,4864900,0,0,1,1,1,13,0"),
            row(&[], "-7590,4864905,1,0,2,1,1,13,0"),
        );
        let db = parse_uji_csv(csv.as_bytes(), "mem", &UjiOptions { floor_height: 3.0, origin: None }).unwrap();
        assert_eq!(db.records()[1].location, Location::new(10.0, 5.0, 3.0));
    }

    #[test]
    fn below_floor_reading_is_clamped_and_counted() {
        let csv = format!("{}\n{}\n", header(), row(&[(0, -104), (1, -30)], "0,0,0,0,1,1,1,13,0"));
        let db = parse_uji_csv(csv.as_bytes(), "mem", &UjiOptions::default()).unwrap();
        assert_eq!(db.clamped_readings(), 1);
        assert_eq!(db.records()[0].rssi.as_slice()[0], 0.0);
    }

    #[test]
    fn ingestion_errors_name_location() {
        let missing = header().replace(",PHONEID", "");
        let err = parse_uji_csv(format!("{missing}\n").as_bytes(), "mem", &UjiOptions::default()).unwrap_err();
        assert!(err.to_string().contains("PHONEID"), "{err}");

        let bad = format!("{}\n{}\n", header(), row(&[], "0,0,zero,0,1,1,1,13,0"));
        let err = parse_uji_csv(bad.as_bytes(), "mem", &UjiOptions::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 1") && msg.contains("FLOOR"), "{msg}");

        let err = parse_uji_csv("".as_bytes(), "mem", &UjiOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Ingest { .. }));

        let err = parse_uji_csv(format!("{}\n", header()).as_bytes(), "mem", &UjiOptions::default()).unwrap_err();
        assert!(err.to_string().contains("no data rows"));
    }
}
