use std::f64::consts::PI;

use proptest::prelude::*;
use quasimodes::cli::output::float;
use quasimodes::flow::{sojourn_measure, SojournVerdict};
use quasimodes::geodesic::{is_elliptic_generic, Classification, PoincareData};

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #[test]
    fn csv_floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        prop_assert_eq!(float(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn sojourn_never_exceeds_with_slope_floor(
        slopes in proptest::collection::vec(1.0f64..20.0, 10..60),
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        let n = slopes.len();
        let t: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let mut f = vec![0.0];
        for s in &slopes {
            let last = *f.last().unwrap();
            f.push(last + s / n as f64);
        }
        let top = *f.last().unwrap();
        let (lo, hi) = (a.min(b) * top, a.max(b) * top);
        let m_floor = slopes.iter().copied().fold(f64::INFINITY, f64::min);
        let r = sojourn_measure(&t, &f, lo, hi, m_floor);
        prop_assert_eq!(r.verdict, SojournVerdict::Within);
        prop_assert!(r.measured <= r.bound * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn rational_rotations_are_suspect(p in 1u32..200, q in 2u32..=50) {
        prop_assume!(p % q != 0);
        let d = q / gcd(p, q);
        let class = is_elliptic_generic(&PoincareData::from_rotation(2.0 * PI * p as f64 / q as f64), 50, 1e-3);
        if d == 2 {
            prop_assert_eq!(class, Classification::Parabolic);
        } else {
            prop_assert!(matches!(class, Classification::RootOfUnitySuspect(k) if k <= d), "{:?} for {}/{}", class, p, q);
        }
    }
}
