use std::f64::consts::PI;

use rotnum_wasm::{conjugacy_points, staircase_points, tongue_rows};

#[test]
fn staircase_is_monotone_with_a_zero_plateau() {
    let pts = staircase_points(0.1, -0.2, 0.2, 41).unwrap();
    assert_eq!(pts.len(), 82);
    let rho: Vec<f64> = pts.chunks(2).map(|c| c[1]).collect();
    assert!(rho.windows(2).all(|w| w[1] >= w[0] - 1e-5));
    for c in pts.chunks(2) {
        if c[0].abs() < 0.095 {
            assert_eq!(c[1], 0.0, "t={}", c[0]);
        }
    }
}

#[test]
fn tongue_rows_open_linearly_for_zero_over_one() {
    let rows = tongue_rows(0, 1, 0.1, 3).unwrap();
    assert_eq!(rows.len(), 9);
    for r in rows.chunks(3) {
        let a = r[0];
        if a == 0.0 {
            assert_eq!(r[1], r[2]);
        } else {
            assert!((r[1] + a).abs() <= 1e-6 && (r[2] - a).abs() <= 1e-6);
        }
    }
}

#[test]
fn recovered_conjugacy_tracks_closed_form() {
    let pts = conjugacy_points("dehn", 1.0 / (4.0 * PI), 0.3141592653589793, 20_000, 50).unwrap();
    assert_eq!(pts.len(), 150);
    for c in pts.chunks(3) {
        assert!((c[1] - c[2]).abs() < 1e-2);
    }
}

#[test]
fn bad_inputs_are_reported() {
    assert!(staircase_points(0.1, 0.2, 0.1, 10).is_err());
    assert!(staircase_points(0.5, 0.0, 0.1, 10).is_err());
    assert!(tongue_rows(0, 0, 0.1, 3).is_err());
    assert!(conjugacy_points("arnold", 0.1, 0.3, 100, 10).is_err());
    assert!(conjugacy_points("rotation", 0.0, 0.25, 100, 10).is_err());
}
