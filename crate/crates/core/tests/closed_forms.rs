//! Closed forms against independent numerical routes.

use sensor_aoi::analytics::{
    aoi_mm1, error_rate_closed_form, pdf_z_given_r2, pdf_z_given_r3, prior_failed,
};
use sensor_aoi::detector::map_threshold;
use sensor_aoi::oracle::{
    bisect_root, formula_agreement, golden_section_min, linear_grid, quadrature_error_rate,
    scan_optimal_threshold,
};
use sensor_aoi::quadrature::{integrate, integrate_to_infinity};

const PARAMS: [(f64, f64, f64); 4] = [
    (0.5, 0.005, 20.0),
    (0.1, 0.05, 5.0),
    (0.9, 0.001, 50.0),
    (0.3, 0.02, 3.0),
];

#[test]
fn densities_are_normalised() {
    for (l, n, r) in PARAMS {
        let r2 = integrate_to_infinity(|z| pdf_z_given_r2(z, l, n).unwrap(), 0.0, 1e-12).unwrap();
        assert!((r2 - 1.0).abs() < 1e-9, "R2 mass {r2}");
        let r3 = integrate(|z| pdf_z_given_r3(z, l, n, r).unwrap(), 0.0, r, 1e-12).unwrap()
            + integrate_to_infinity(|z| pdf_z_given_r3(z, l, n, r).unwrap(), r, 1e-12).unwrap();
        assert!((r3 - 1.0).abs() < 1e-9, "R3 mass {r3}");
        for z in linear_grid(0.0, 3.0 * r, r / 50.0) {
            assert!(pdf_z_given_r2(z, l, n).unwrap() >= 0.0);
            assert!(pdf_z_given_r3(z, l, n, r).unwrap() >= 0.0);
        }
    }
}

#[test]
fn threshold_is_where_weighted_densities_cross() {
    for (l, n, r) in PARAMS {
        let tau = map_threshold(l, n).unwrap();
        // P(s1)/P(s0) = r nu.
        let diff =
            |z: f64| pdf_z_given_r2(z, l, n).unwrap() - r * n * pdf_z_given_r3(z, l, n, r).unwrap();
        if tau < r {
            let root = bisect_root(diff, 0.0, r - 1e-12, 1e-13).unwrap();
            assert!((root - tau).abs() < 1e-9, "root {root} tau {tau}");
            assert!(diff(0.5 * tau) > 0.0);
        }
        // Beyond r the comparison does not depend on z; its sign is that of tau - r.
        let sign = (tau - r).signum();
        for z in linear_grid(r, 10.0 * r, r / 7.0) {
            assert_eq!(diff(z).signum(), sign, "z {z}");
        }
    }
}

#[test]
fn mm1_age_minimiser() {
    let rho = golden_section_min(|x| aoi_mm1(x, 1.0).unwrap(), 0.01, 0.99, 1e-10);
    println!("argmin rho = {rho:.6}");
    assert!((rho - 0.531).abs() < 0.005);
}

#[test]
fn quadrature_agrees_with_closed_form_on_grid() {
    let rows = formula_agreement().unwrap();
    assert!(rows.len() > 30, "only {} non-degenerate cells", rows.len());
    for row in &rows {
        assert!(row.abs_diff < 1e-6, "{row:?}");
    }
}

#[test]
fn map_threshold_is_optimal_among_alternatives() {
    for (l, n, r) in PARAMS {
        let tau = map_threshold(l, n).unwrap();
        if tau >= r {
            continue;
        }
        let at = quadrature_error_rate(l, n, r, tau).unwrap();
        for t in linear_grid(0.0, 2.0 * r, 0.25) {
            assert!(at <= quadrature_error_rate(l, n, r, t).unwrap() + 1e-10);
        }
    }
}

#[test]
fn threshold_scan_at_defaults() {
    let grid = linear_grid(0.0, 20.0, 0.02);
    let best = scan_optimal_threshold(0.5, 0.005, 20.0, &grid).unwrap();
    assert!((best - 9.16).abs() <= 0.02, "{best}");
}

#[test]
fn degenerate_error_is_prior() {
    // tau(0.1, 0.005) = 29.4 > 20.
    let e = error_rate_closed_form(0.1, 0.005, 20.0).unwrap();
    assert!(e.degenerate);
    assert_eq!(e.error_rate, prior_failed(0.005, 20.0));
    let q = quadrature_error_rate(0.1, 0.005, 20.0, 1e6).unwrap();
    assert!((q - e.error_rate).abs() < 1e-9);
}
