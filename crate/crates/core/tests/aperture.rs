use std::f64::consts::PI;

use ghost_opa_core::optics::{paraxial_limit, sinc};
use ghost_opa_core::quadrature::integrate;
use ghost_opa_core::{presets, DoubleSlitAperture, QuadOptions, TransverseWavevector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Numerical transform of the transmission. The integrand factorises, so the
/// double integral is the product of the x and y integrals.
fn direct_ft(ap: &DoubleSlitAperture, q: TransverseWavevector) -> Complex64 {
    let opts = QuadOptions::with_rel_tol(1e-11);
    let along_x: Complex64 = ap
        .slit_intervals()
        .iter()
        .map(|&(lo, hi)| {
            integrate(
                |x| Complex64::from_polar(1.0, -q.qx * x),
                lo,
                hi,
                |_| q.qx.abs(),
                &opts,
            )
            .unwrap()
            .value
        })
        .sum();
    let half = 0.5 * ap.slit_len;
    let along_y = integrate(
        |y| Complex64::from_polar(1.0, -q.qy * y),
        -half,
        half,
        |_| q.qy.abs(),
        &opts,
    )
    .unwrap()
    .value;
    along_x * along_y
}

#[test]
fn transform_matches_direct_integral_at_random_wavevectors() {
    let ap = presets::aperture();
    let q_max = paraxial_limit(presets::geometry().signal_omega());
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let mut checked = 0;
    while checked < 50 {
        let q = TransverseWavevector::new(
            rng.random_range(-q_max..q_max),
            rng.random_range(-q_max..q_max),
        );
        if q.norm() > q_max {
            continue;
        }
        let closed = ap.ft(q);
        let numeric = direct_ft(&ap, q);
        assert!(
            (numeric - closed).norm() <= 1e-6 * closed.abs(),
            "q = {q:?}: closed {closed:e}, numeric {numeric:e}"
        );
        checked += 1;
    }
}

#[test]
fn parseval_recovers_the_open_area() {
    let ap = presets::aperture();
    let box_x = 2000.0 * PI / ap.b;
    let box_y = 2000.0 * PI / ap.slit_len;
    let power = ap
        .power_in_box(box_x, box_y, &QuadOptions::with_rel_tol(1e-9))
        .unwrap();
    let area = ap.open_area();
    assert!(
        ((power - area) / area).abs() < 1e-3,
        "power {power:e} area {area:e}"
    );
}

#[test]
fn narrow_box_loses_one_percent_to_the_tails() {
    // the ±40π/b, ±40π/L box; independently integrated
    let ap = presets::aperture();
    let power = ap
        .power_in_box(
            40.0 * PI / ap.b,
            40.0 * PI / ap.slit_len,
            &QuadOptions::with_rel_tol(1e-9),
        )
        .unwrap();
    let deficit = power / ap.open_area() - 1.0;
    assert!((deficit + 0.0101056).abs() < 1e-5, "deficit {deficit}");
}

#[test]
fn transform_zeros() {
    let ap = presets::aperture();
    // interference zeros qx·a/2 = π/2 + mπ, envelope zeros qx·b/2 = mπ
    for m in 0..4 {
        let qx = (PI + 2.0 * PI * m as f64) / ap.a;
        assert!(ap.ft_x(qx).abs() < 1e-12 * ap.ft_x(0.0));
        let qx = 2.0 * PI * (m + 1) as f64 / ap.b;
        assert!(ap.ft_x(qx).abs() < 1e-12 * ap.ft_x(0.0));
    }
    let qy = 2.0 * PI / ap.slit_len;
    assert!(ap.ft_y(qy).abs() < 1e-12 * ap.ft_y(0.0));
}

#[test]
fn sinc_limits() {
    assert_eq!(sinc(0.0), 1.0);
    assert!((sinc(1e-9) - 1.0).abs() < 1e-15);
    assert!(sinc(PI).abs() < 1e-15);
}

proptest! {
    #[test]
    fn transform_is_even(qx in -1e6f64..1e6, qy in -1e6f64..1e6) {
        let ap = presets::aperture();
        let v = ap.ft(TransverseWavevector::new(qx, qy));
        prop_assert_eq!(v, ap.ft(TransverseWavevector::new(-qx, qy)));
        prop_assert_eq!(v, ap.ft(TransverseWavevector::new(qx, -qy)));
        prop_assert!(v.abs() <= ap.open_area() * (1.0 + 1e-12));
    }

    #[test]
    fn transmission_is_binary_and_symmetric(x in -1e-3f64..1e-3, y in -6e-3f64..6e-3) {
        let ap = presets::aperture();
        let t = ap.transmission(x, y);
        prop_assert!(t == 0.0 || t == 1.0);
        prop_assert_eq!(t, ap.transmission(-x, y));
        prop_assert_eq!(t, ap.transmission(x, -y));
    }
}
