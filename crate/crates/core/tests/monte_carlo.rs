use ghost_opa_core::coincidence::{count_coincidences, simulate_streams, McSettings, StreamSpec};
use ghost_opa_core::{mc_visibility, presets, DetectionSpec, QuadOptions, RateModel};
use rayon::prelude::*;

fn reference_model(xi: f64) -> RateModel {
    RateModel::new(
        presets::source(xi, 1.0).unwrap(),
        presets::detection(),
        presets::geometry(),
        presets::aperture(),
        &QuadOptions::default(),
    )
    .unwrap()
}

/// The reference setup with the D2 filter narrowed until `A = 2B·ΔT` at 1 nm,
/// which puts the visibility plateau near 1/2 instead of near zero.
fn balanced_model(xi: f64) -> RateModel {
    let wide = reference_model(xi);
    let c = wide.constants().unwrap();
    let q_b = wide.det.q_accept_b * (c.a / (2.0 * c.b * wide.delta_t())).sqrt();
    let det = DetectionSpec::new(wide.det.window_t, (0.0, 0.0), wide.det.q_accept_a, q_b).unwrap();
    RateModel::new(wide.src, det, wide.geom, wide.ap, &QuadOptions::default()).unwrap()
}

fn settings(seed: u64) -> McSettings {
    McSettings {
        seed,
        ..McSettings::default()
    }
}

#[test]
fn stream_sizes_follow_poisson_statistics() {
    let (pair, ua, dur) = (2e4, 3e4, 1.0);
    let counts: Vec<f64> = (0..20u64)
        .map(|seed| {
            let s = StreamSpec::new(pair, 1e-12, ua, 1e4, dur, seed).unwrap();
            simulate_streams(&s).unwrap().a.len() as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / 20.0;
    let expected = (pair + ua) * dur;
    let sigma = (expected / 20.0).sqrt();
    assert!(
        (mean - expected).abs() < 5.0 * sigma,
        "mean {mean} expected {expected}"
    );
}

#[test]
fn accidentals_match_the_two_window_expectation() {
    let (r, t, dur) = (1e5, 1.8e-9, 10.0);
    let total: u64 = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let s = StreamSpec::new(0.0, 0.0, r, r, dur, seed).unwrap();
            count_coincidences(&simulate_streams(&s).unwrap(), t)
                .unwrap()
                .accidental_count
        })
        .sum();
    let expected = 100.0 * r * r * 2.0 * t * dur;
    let sigma = expected.sqrt();
    assert!(
        (total as f64 - expected).abs() < 3.0 * sigma,
        "total {total} expected {expected}"
    );
}

/// Least-squares slope with its standard error for Poisson-distributed `y`.
fn slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| ((a - mx) / sxx).powi(2) * b)
        .sum();
    (sxy / sxx, var.sqrt())
}

#[test]
fn accidentals_are_linear_in_window() {
    let r = 1e5;
    let s = StreamSpec::new(0.0, 0.0, r, r, 20.0, 99).unwrap();
    let streams = simulate_streams(&s).unwrap();
    let ts = [0.5e-9, 1e-9, 2e-9, 4e-9];
    let counts: Vec<f64> = ts
        .iter()
        .map(|&t| count_coincidences(&streams, t).unwrap().accidental_count as f64)
        .collect();
    let (b, se) = slope(&ts, &counts);
    let theory = r * r * 2.0 * 20.0;
    assert!(
        (b - theory).abs() < 3.0 * se,
        "slope {b:e} theory {theory:e} se {se:e}"
    );
}

#[test]
fn accidentals_are_linear_in_duration() {
    let r = 1e5;
    let t = 1.8e-9;
    let durations = [1.0, 2.0, 4.0, 8.0];
    let counts: Vec<f64> = durations
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let s = StreamSpec::new(0.0, 0.0, r, r, d, 1000 + i as u64).unwrap();
            count_coincidences(&simulate_streams(&s).unwrap(), t)
                .unwrap()
                .accidental_count as f64
        })
        .collect();
    let (b, se) = slope(&durations, &counts);
    let theory = r * r * 2.0 * t;
    assert!(
        (b - theory).abs() < 3.0 * se,
        "slope {b} theory {theory} se {se}"
    );
}

#[test]
fn tallies_decompose_and_merge() {
    let s = StreamSpec::new(1e4, 1e-12, 2e5, 2e5, 1.0, 4).unwrap();
    let t1 = count_coincidences(&simulate_streams(&s).unwrap(), 1.8e-9).unwrap();
    let s2 = StreamSpec { seed: 5, ..s };
    let t2 = count_coincidences(&simulate_streams(&s2).unwrap(), 1.8e-9).unwrap();
    for t in [t1, t2, t1.merge(&t2)] {
        assert_eq!(t.total_count, t.true_count + t.accidental_count);
    }
    assert!((t1.true_count as f64 - 1e4).abs() < 5.0 * 100.0);
}

#[test]
fn mc_visibility_is_deterministic() {
    let m = balanced_model(1.0);
    let short = McSettings {
        duration: 0.05,
        bootstrap: 50,
        ..settings(17)
    };
    assert_eq!(
        mc_visibility(&m, &short).unwrap(),
        mc_visibility(&m, &short).unwrap()
    );
}

#[test]
fn mc_visibility_agrees_with_the_law() {
    for (i, xi) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let r = mc_visibility(&balanced_model(xi), &settings(100 + i as u64)).unwrap();
        assert!(
            (r.visibility - r.analytic).abs() < 3.0 * r.std_error,
            "xi {xi}: mc {} ± {} analytic {}",
            r.visibility,
            r.std_error,
            r.analytic
        );
        for (t, e) in r.tallies.iter().zip(&r.expected) {
            assert_eq!(t.total_count, t.true_count + t.accidental_count);
            assert!((t.total_count as f64 - e).abs() < 5.0 * e.sqrt() + 1.0);
        }
    }
}

#[test]
fn mc_visibility_on_the_reference_setup() {
    let r = mc_visibility(&reference_model(1.0), &settings(7)).unwrap();
    assert!((r.visibility - r.analytic).abs() < 3.0 * r.std_error);
}

#[test]
fn mc_visibility_without_accidentals_is_one() {
    let r = mc_visibility(&balanced_model(0.01), &settings(3)).unwrap();
    assert!(
        (r.visibility - 1.0).abs() < 3.0 * r.std_error,
        "{} ± {}",
        r.visibility,
        r.std_error
    );
}

#[test]
fn doubling_the_window_doubles_the_accidental_term() {
    let m = balanced_model(2.0);
    let m2 = m.with_window(2.0 * m.det.window_t).unwrap();
    let r1 = mc_visibility(&m, &settings(41)).unwrap();
    let r2 = mc_visibility(&m2, &settings(42)).unwrap();
    // 1/V − 1 = 2B·ΔT·tanh²ξ / A
    let d = |v: f64| 1.0 / v - 1.0;
    let sd = |v: f64, s: f64| s / (v * v);
    let ratio = d(r2.visibility) / d(r1.visibility);
    let se = ratio
        * ((sd(r1.visibility, r1.std_error) / d(r1.visibility)).powi(2)
            + (sd(r2.visibility, r2.std_error) / d(r2.visibility)).powi(2))
        .sqrt();
    assert!((ratio - 2.0).abs() < 3.0 * se, "ratio {ratio} ± {se}");
    let law = d(r2.analytic) / d(r1.analytic);
    assert!((law - 2.0).abs() < 1e-12);
}

#[test]
fn invalid_scans_are_rejected() {
    let m = balanced_model(1.0);
    assert!(mc_visibility(
        &m,
        &McSettings {
            n_points: 20,
            ..settings(0)
        }
    )
    .is_err());
    let dark = RateModel::new(
        presets::source(0.0, 1.0).unwrap(),
        m.det,
        m.geom,
        m.ap,
        &QuadOptions::default(),
    )
    .unwrap();
    assert!(mc_visibility(&dark, &settings(0)).is_err());
    let huge = McSettings {
        singles_rate: 1e9,
        duration: 10.0,
        ..settings(0)
    };
    assert!(matches!(
        mc_visibility(&reference_model(1.0), &huge),
        Err(ghost_opa_core::Error::Resource(_))
    ));
}
