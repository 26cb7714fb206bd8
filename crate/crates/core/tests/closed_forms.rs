use std::f64::consts::PI;

use bergman_core::geometry::{build_lattice, pseudo_disk};
use bergman_core::measures::DiscMeasure;
use bergman_core::space::build_kernel_model;
use bergman_core::toeplitz::{assemble, trace_identity_check};
use bergman_core::transforms::berezin;
use bergman_core::{DiscPoint, Weight};
use num_complex::Complex64;

fn pt(re: f64, im: f64) -> DiscPoint {
    DiscPoint::new(re, im).unwrap()
}

fn classical(z: Complex64, w: Complex64) -> Complex64 {
    let d = Complex64::new(1.0, 0.0) - w.conj() * z;
    Complex64::new(1.0 / PI, 0.0) / (d * d)
}

#[test]
fn classical_kernel_on_grid() {
    let m = build_kernel_model(&Weight::constant(), 200).unwrap();
    let axis: Vec<f64> = (0..20).map(|k| -0.49 + 0.98 * k as f64 / 19.0).collect();
    let mut worst = 0.0f64;
    for &x in &axis {
        for &y in &axis {
            let z = pt(x, y);
            let w = pt(y, -x * 0.9);
            let exact = classical(z.to_complex(), w.to_complex());
            worst = worst.max((m.kernel_eval(z, w) - exact).norm() / exact.norm());
        }
    }
    assert!(worst < 1e-6, "{worst:e}");
}

#[test]
fn standard_weight_diagonal() {
    let m = build_kernel_model(&Weight::standard(1.0).unwrap(), 200).unwrap();
    assert!((m.kernel_diag(DiscPoint::ORIGIN) - 2.0 / PI).abs() < 1e-6);
    for k in 0..=12 {
        let z = DiscPoint::from_polar(0.05 * k as f64, 0.3 * k as f64).unwrap();
        let exact = 2.0 / (PI * (1.0 - z.norm_sqr()).powi(3));
        assert!((m.kernel_diag(z) / exact - 1.0).abs() < 1e-5);
    }
}

#[test]
fn reproducing_under_both_weights() {
    for u in [Weight::constant(), Weight::standard(1.0).unwrap()] {
        let m = build_kernel_model(&u, 60).unwrap();
        let f: Vec<Complex64> = (0..40).map(|k| Complex64::new((k as f64).cos(), 1.0 / (k + 1) as f64)).collect();
        for w in [pt(0.0, 0.0), pt(0.5, 0.5), pt(-0.2, 0.85)] {
            assert!(m.reproducing_check(&f, w).unwrap() < 1e-7);
        }
    }
}

#[test]
fn area_measure_has_unit_berezin_on_lattice() {
    let u = Weight::constant();
    let m = build_kernel_model(&u, 120).unwrap();
    let lattice = build_lattice(0.5, 0.8).unwrap();
    let area = DiscMeasure::weighted_area(u);
    for &z in &lattice.points {
        assert!((berezin(&area, &m, z).unwrap() - 1.0).abs() < 1e-6);
    }
}

#[test]
fn point_mass_spectrum() {
    let m = build_kernel_model(&Weight::constant(), 40).unwrap();
    let mu = DiscMeasure::atomic(vec![(DiscPoint::ORIGIN, 2.0)]).unwrap();
    let t = assemble(&mu, &m).unwrap();
    let s = t.spectrum().eigenvalues;
    assert!((s[0] - 2.0 / PI).abs() < 1e-8);
    assert!(s[1..].iter().all(|&l| l.abs() < 1e-8));
    assert!(trace_identity_check(&t, &mu, &m).unwrap() < 1e-10);
}

#[test]
fn pseudo_disk_boundary_is_at_distance_r() {
    let disk = pseudo_disk(pt(0.9, 0.0), 0.3).unwrap();
    // Real-axis endpoints of Δ(0.9, 0.3): Möbius images of ∓0.3.
    let lo = (0.9 - 0.3) / (1.0 - 0.27);
    let hi = (0.9 + 0.3) / (1.0 + 0.27);
    assert!((disk.euclid_center.re - (lo + hi) / 2.0).abs() < 1e-12);
    assert!((disk.euclid_radius - (hi - lo) / 2.0).abs() < 1e-12);
}
