//! Fingerprint ingestion, RSS normalization and train/test splitting.
//!
//! Raw dBm readings exist only at ingestion time. Every [`RssiVector`] in a
//! [`FingerprintDatabase`] holds unit-interval values where `0.0` is no
//! signal (-100 dBm) and `1.0` is the strongest signal (0 dBm).

mod canonical;
mod split;
mod uji;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use canonical::{load_canonical_csv, parse_canonical_csv, write_canonical_csv};
pub use split::{split_by_device, split_per_rp};
pub use uji::{load_uji_csv, parse_uji_csv, UjiOptions, UJI_AP_COUNT};

/// Weakest representable reading; also the "not detected" value.
pub const RSSI_FLOOR_DBM: f64 = -100.0;
/// Strongest representable reading.
pub const RSSI_CEIL_DBM: f64 = 0.0;

/// Maps a dBm reading onto `[0, 1]`, clamping values outside `[-100, 0]`.
pub fn normalize_rssi(dbm: f64) -> f64 {
    (dbm.clamp(RSSI_FLOOR_DBM, RSSI_CEIL_DBM) - RSSI_FLOOR_DBM) / (RSSI_CEIL_DBM - RSSI_FLOOR_DBM)
}

/// Inverse of [`normalize_rssi`] on `[0, 1]`.
pub fn denormalize_rssi(value: f64) -> f64 {
    value * (RSSI_CEIL_DBM - RSSI_FLOOR_DBM) + RSSI_FLOOR_DBM
}

/// Whether [`normalize_rssi`] has to clamp this reading.
pub fn is_out_of_range(dbm: f64) -> bool {
    !(RSSI_FLOOR_DBM..=RSSI_CEIL_DBM).contains(&dbm)
}

/// Ordered access-point identifiers; the position of an identifier is its
/// feature index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct ApRegistry {
    ids: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl ApRegistry {
    pub fn new(ids: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate access point identifier {id:?}")));
            }
        }
        Ok(Self { ids, index })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }
}

impl TryFrom<Vec<String>> for ApRegistry {
    type Error = Error;

    fn try_from(ids: Vec<String>) -> Result<Self> {
        Self::new(ids)
    }
}

impl From<ApRegistry> for Vec<String> {
    fn from(registry: ApRegistry) -> Self {
        registry.ids
    }
}

/// Normalized fingerprint; one unit-interval value per registered AP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RssiVector(Vec<f64>);

impl RssiVector {
    /// Wraps already-normalized values. Values outside `[0, 1]` are clamped
    /// and non-finite values are rejected.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        for v in &mut values {
            if !v.is_finite() {
                return Err(Error::Config(format!("non-finite fingerprint value {v}")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(Self(values))
    }

    /// Normalizes a vector of dBm readings.
    pub fn from_dbm(readings: &[f64]) -> Self {
        Self(readings.iter().map(|&d| normalize_rssi(d)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// A position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Location {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Location {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerprintRecord {
    pub rssi: RssiVector,
    pub location: Location,
    pub rp_label: String,
    pub device: String,
    /// Set on records produced by autoencoder augmentation.
    #[serde(default)]
    pub synthetic: bool,
}

/// The offline fingerprint database: registry, records and the reference
/// point coordinate map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FingerprintDatabase {
    registry: ApRegistry,
    records: Vec<FingerprintRecord>,
    rp_coordinates: BTreeMap<String, Location>,
    /// Readings that fell outside `[-100, 0]` dBm and were clamped.
    clamped_readings: usize,
}

impl FingerprintDatabase {
    /// Builds a database whose coordinate map is derived from the records.
    /// A label that appears with two different locations is an error.
    pub fn new(registry: ApRegistry, records: Vec<FingerprintRecord>) -> Result<Self> {
        let mut rp_coordinates = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            match rp_coordinates.get(&r.rp_label) {
                Some(loc) if *loc != r.location => {
                    return Err(Error::Config(format!(
                        "record {i}: reference point {:?} has conflicting coordinates {:?} and {:?}",
                        r.rp_label, loc, r.location
                    )));
                }
                Some(_) => {}
                None => {
                    rp_coordinates.insert(r.rp_label.clone(), r.location);
                }
            }
        }
        Self::with_coordinates(registry, records, rp_coordinates)
    }

    /// Builds a database with an explicit coordinate map, which must cover
    /// every label in `records`.
    pub fn with_coordinates(
        registry: ApRegistry,
        records: Vec<FingerprintRecord>,
        rp_coordinates: BTreeMap<String, Location>,
    ) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            if r.rssi.len() != registry.len() {
                return Err(Error::Shape {
                    expected: registry.len(),
                    actual: r.rssi.len(),
                    context: "fingerprint length vs registry size",
                });
            }
            if r.rssi.as_slice().iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::Config(format!("record {i}: fingerprint value outside [0, 1]")));
            }
            if !rp_coordinates.contains_key(&r.rp_label) {
                return Err(Error::Config(format!(
                    "record {i}: reference point {:?} has no coordinates",
                    r.rp_label
                )));
            }
        }
        if let Some((label, loc)) = rp_coordinates.iter().find(|(_, l)| !l.is_finite()) {
            return Err(Error::Config(format!("reference point {label:?} has non-finite coordinates {loc:?}")));
        }
        Ok(Self {
            registry,
            records,
            rp_coordinates,
            clamped_readings: 0,
        })
    }

    pub(crate) fn set_clamped_readings(&mut self, n: usize) {
        self.clamped_readings = n;
    }

    pub fn registry(&self) -> &ApRegistry {
        &self.registry
    }

    pub fn records(&self) -> &[FingerprintRecord] {
        &self.records
    }

    pub fn rp_coordinates(&self) -> &BTreeMap<String, Location> {
        &self.rp_coordinates
    }

    pub fn clamped_readings(&self) -> usize {
        self.clamped_readings
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.registry.len()
    }

    /// Sorted distinct device identifiers.
    pub fn devices(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.records.iter().map(|r| r.device.as_str()).collect();
        set.into_iter().map(str::to_owned).collect()
    }

    /// Sorted distinct reference point labels present in the records.
    pub fn rp_labels(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.records.iter().map(|r| r.rp_label.as_str()).collect();
        set.into_iter().map(str::to_owned).collect()
    }

    /// Fingerprint rows, one per record.
    pub fn fingerprints(&self) -> Vec<Vec<f64>> {
        self.records.iter().map(|r| r.rssi.as_slice().to_vec()).collect()
    }

    /// A database over the same registry holding `records`, with the
    /// coordinate map narrowed to the labels they use.
    pub fn derive(&self, records: Vec<FingerprintRecord>) -> Self {
        let rp_coordinates = records
            .iter()
            .map(|r| (r.rp_label.clone(), self.rp_coordinates[&r.rp_label]))
            .collect();
        Self {
            registry: self.registry.clone(),
            records,
            rp_coordinates,
            clamped_readings: 0,
        }
    }

    /// Records for which `keep` holds, in their original order.
    pub fn filter(&self, mut keep: impl FnMut(&FingerprintRecord) -> bool) -> Self {
        self.derive(self.records.iter().filter(|r| keep(r)).cloned().collect())
    }

    /// Appends records that reuse this database's reference points.
    pub fn extend_records(&mut self, records: impl IntoIterator<Item = FingerprintRecord>) -> Result<()> {
        for r in records {
            if r.rssi.len() != self.registry.len() {
                return Err(Error::Shape {
                    expected: self.registry.len(),
                    actual: r.rssi.len(),
                    context: "fingerprint length vs registry size",
                });
            }
            if !self.rp_coordinates.contains_key(&r.rp_label) {
                return Err(Error::Config(format!("reference point {:?} has no coordinates", r.rp_label)));
            }
            self.records.push(r);
        }
        Ok(())
    }

    /// SHA-256 over registry, records and coordinates, hex encoded.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for id in self.registry.ids() {
            hasher.update(id.as_bytes());
            hasher.update([0]);
        }
        for r in &self.records {
            for v in r.rssi.as_slice() {
                hasher.update(v.to_le_bytes());
            }
            for c in [r.location.x, r.location.y, r.location.z] {
                hasher.update(c.to_le_bytes());
            }
            hasher.update(r.rp_label.as_bytes());
            hasher.update([0]);
            hasher.update(r.device.as_bytes());
            hasher.update([0, u8::from(r.synthetic)]);
        }
        for (label, loc) in &self.rp_coordinates {
            hasher.update(label.as_bytes());
            hasher.update([0]);
            for c in [loc.x, loc.y, loc.z] {
                hasher.update(c.to_le_bytes());
            }
        }
        hex::encode(hasher.finalize())
    }
}
