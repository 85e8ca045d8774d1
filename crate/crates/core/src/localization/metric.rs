use crate::data::Location;

/// Straight-line distance between two positions, in meters.
pub fn euclidean_error(a: &Location, b: &Location) -> f64 {
    let (dx, dy, dz) = (b.x - a.x, b.y - a.y, b.z - a.z);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_distances() {
        let o = Location::new(0.0, 0.0, 0.0);
        assert_eq!(euclidean_error(&o, &o), 0.0);
        assert_eq!(euclidean_error(&o, &Location::new(3.0, 4.0, 0.0)), 5.0);
        assert_eq!(euclidean_error(&Location::new(1.0, 2.0, 2.0), &Location::new(1.0, 2.0, 0.0)), 2.0);
    }

    fn loc() -> impl Strategy<Value = Location> {
        (-1e3f64..1e3, -1e3f64..1e3, -50f64..50.0).prop_map(|(x, y, z)| Location::new(x, y, z))
    }

    proptest! {
        #[test]
        fn is_a_metric(a in loc(), b in loc(), c in loc()) {
            let ab = euclidean_error(&a, &b);
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(ab, euclidean_error(&b, &a));
            prop_assert_eq!(euclidean_error(&a, &a), 0.0);
            prop_assert!(ab <= euclidean_error(&a, &c) + euclidean_error(&c, &b) + 1e-9);
        }
    }
}
