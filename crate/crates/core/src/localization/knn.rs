use crate::data::{FingerprintDatabase, Location};
use crate::error::{Error, Result};

/// Centroid of the locations of the `k` records closest to `x` in
/// normalized RSS space. Equal distances keep the lower record index.
pub fn knn_predict(train: &FingerprintDatabase, x: &[f64], k: usize) -> Result<Location> {
    if train.is_empty() {
        return Err(Error::Empty("nearest-neighbour training set"));
    }
    if x.len() != train.dim() {
        return Err(Error::Shape {
            expected: train.dim(),
            actual: x.len(),
            context: "query fingerprint width",
        });
    }
    if k == 0 || k > train.len() {
        return Err(Error::Config(format!("k must be in 1..={}, got {k}", train.len())));
    }
    let mut dist: Vec<(f64, usize)> = train
        .records()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let d2: f64 = r.rssi.as_slice().iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2, i)
        })
        .collect();
    let by_distance = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < dist.len() {
        dist.select_nth_unstable_by(k - 1, by_distance);
    }
    dist[..k].sort_unstable_by(by_distance);
    let (mut sx, mut sy, mut sz) = (0.0, 0.0, 0.0);
    for &(_, i) in &dist[..k] {
        let l = train.records()[i].location;
        sx += l.x;
        sy += l.y;
        sz += l.z;
    }
    let kf = k as f64;
    Ok(Location::new(sx / kf, sy / kf, sz / kf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ApRegistry, FingerprintRecord, RssiVector};

    fn db(points: &[(f64, f64)]) -> FingerprintDatabase {
        let reg = ApRegistry::new(vec!["ap".into()]).unwrap();
        let records = points
            .iter()
            .enumerate()
            .map(|(i, &(v, x))| FingerprintRecord {
                rssi: RssiVector::new(vec![v]).unwrap(),
                location: Location::new(x, 0.0, 0.0),
                rp_label: format!("rp{i}"),
                device: "A".into(),
                synthetic: false,
            })
            .collect();
        FingerprintDatabase::new(reg, records).unwrap()
    }

    #[test]
    fn exact_match_with_k1() {
        let d = db(&[(0.1, 0.0), (0.5, 5.0), (0.9, 9.0)]);
        assert_eq!(knn_predict(&d, &[0.5], 1).unwrap(), Location::new(5.0, 0.0, 0.0));
    }

    #[test]
    fn k_equal_to_size_gives_global_centroid() {
        let d = db(&[(0.1, 0.0), (0.5, 3.0), (0.9, 9.0)]);
        assert_eq!(knn_predict(&d, &[0.0], 3).unwrap(), Location::new(4.0, 0.0, 0.0));
    }

    #[test]
    fn collinear_pair_midpoint() {
        // Fingerprints 0.2, 0.4, 0.8 at x = 0, 2, 6; query 0.35 is nearest to
        // the first two (distances 0.15, 0.05, 0.45) so the answer is x = 1.
        let d = db(&[(0.2, 0.0), (0.4, 2.0), (0.8, 6.0)]);
        let q = 0.35;
        let mut order: Vec<usize> = (0..3).collect();
        order.sort_by(|&a, &b| {
            let da = (d.records()[a].rssi.as_slice()[0] - q).abs();
            let db_ = (d.records()[b].rssi.as_slice()[0] - q).abs();
            da.total_cmp(&db_)
        });
        assert_eq!(&order[..2], &[1, 0]);
        assert_eq!(knn_predict(&d, &[q], 2).unwrap(), Location::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn ties_keep_lower_index() {
        let d = db(&[(0.5, 1.0), (0.5, 7.0), (0.5, 9.0)]);
        assert_eq!(knn_predict(&d, &[0.5], 1).unwrap(), Location::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn invalid_inputs() {
        let d = db(&[(0.5, 1.0)]);
        assert!(knn_predict(&d, &[0.5], 0).is_err());
        assert!(knn_predict(&d, &[0.5], 2).is_err());
        assert!(knn_predict(&d, &[0.5, 0.1], 1).is_err());
        assert!(knn_predict(&d.filter(|_| false), &[0.5], 1).is_err());
    }
}
