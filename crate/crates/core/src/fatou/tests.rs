use super::*;
use crate::fnkit::MeroFn;
use crate::orbit::iterate;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn parsed(s: &str) -> MeroFn {
    MeroFn::parse(s).unwrap()
}

#[test]
fn attracting_basin_of_scaled_exponential() {
    let f = parsed("0.3*exp(z)");
    match classify_seed(&f, c(0.0, 0.0), 2000) {
        FateLabel::AttractingBasin { representative, period, multiplier } => {
            assert!((representative - c(0.48940222718021497, 0.0)).norm() < 1e-8);
            assert_eq!(period, 1);
            // the fixed point of 0.3 e^z equals its own multiplier
            assert!((multiplier - representative).norm() < 1e-8);
        }
        other => panic!("expected attracting basin, got {other:?}"),
    }
}

#[test]
fn baker_candidate_for_drift_map() {
    let f = parsed("z + 1 + exp(-z)");
    for seed in [c(1.0, 0.0), c(2.0, 0.0), c(5.0, 1.0)] {
        match classify_seed(&f, seed, 2000) {
            FateLabel::BakerCandidate { period, rate } => {
                assert_eq!(period, 1, "seed {seed}");
                assert!(rate.pass, "seed {seed}: {rate:?}");
                assert_eq!(rate.sequence_name, "log_abs");
                assert!(rate.fitted_slope.abs() < 0.1, "slope {}", rate.fitted_slope);
            }
            other => panic!("seed {seed}: expected Baker candidate, got {other:?}"),
        }
    }
}

#[test]
fn leau_candidate_for_parabolic_exponential() {
    let f = parsed("exp(z) - 1");
    match classify_seed(&f, c(-0.5, 0.0), 2000) {
        FateLabel::LeauCandidate { limit, period, multiplier, q, decay_slope } => {
            assert!(limit.norm() < 1e-5, "limit {limit}");
            assert_eq!(period, 1);
            assert!((multiplier - c(1.0, 0.0)).norm() < 1e-5);
            assert_eq!(q, 1);
            assert!((-1.5..=-0.5).contains(&decay_slope), "slope {decay_slope}");
        }
        other => panic!("expected Leau candidate, got {other:?}"),
    }
}

#[test]
fn wandering_candidate_tracks_two_pi_drift() {
    let f = parsed("z - 1 + exp(-z) + 6.283185307179586*i");
    match classify_seed(&f, c(0.1, 0.0), 2000) {
        FateLabel::WanderingCandidate { drift, deriv_tail } => {
            assert!((drift - c(0.0, std::f64::consts::TAU)).norm() < 1e-3, "drift {drift}");
            assert!(deriv_tail < 0.5);
        }
        other => panic!("expected wandering candidate, got {other:?}"),
    }
    // the orbit shadows 2*pi*i*n
    let rec = iterate(&f, c(0.1, 0.0), 100);
    for (n, z) in rec.points.iter().enumerate() {
        let target = c(0.0, std::f64::consts::TAU * n as f64);
        assert!((z - target).norm() <= 2.0, "step {n}: {z}");
    }
}

#[test]
fn rotation_candidate_for_golden_mean_multiplier() {
    // lambda (e^z - 1) with lambda on the unit circle at the golden-mean
    // angle: 0 is irrationally indifferent and seeds nearby wind around it
    let lam = Complex64::from_polar(1.0, std::f64::consts::TAU * 0.6180339887498949);
    let src = format!("({} - {}*i)*(exp(z) - 1)", lam.re, lam.im.abs());
    let f = parsed(&src);
    match classify_seed(&f, c(0.1, 0.0), 2000) {
        FateLabel::RotationCandidate { center, multiplier, winding_share } => {
            assert!(center.norm() < 1e-8, "center {center}");
            assert!((multiplier - lam).norm() < 1e-8);
            assert!(winding_share >= 0.9);
        }
        other => panic!("expected rotation candidate, got {other:?}"),
    }
}

#[test]
fn seed_on_repelling_fixed_point_stays_undecided() {
    // 0 is fixed for 2 tan z with multiplier 2: Julia set material
    let f = parsed("2*tan(z)");
    assert_eq!(classify_seed(&f, c(0.0, 0.0), 500), FateLabel::JuliaOrUndecided);
}

#[test]
fn prepole_seed_is_undecided() {
    let f = parsed("1/z - exp(z)");
    assert_eq!(classify_seed(&f, c(0.0, 0.0), 500), FateLabel::JuliaOrUndecided);
}

#[test]
fn rate_check_rejects_settled_orbits() {
    let f = parsed("0.3*exp(z)");
    let rec = iterate(&f, c(0.0, 0.0), 2000);
    assert_eq!(escape_rate_check(&rec, true), Err(RateError::NotEscaping));
}

#[test]
fn rate_check_needs_enough_tail() {
    // e^z explodes past the radius in a couple of steps: nothing to fit
    let f = parsed("exp(z)");
    let rec = iterate(&f, c(3.0, 0.0), 2000);
    assert!(matches!(rec.fate, Fate::Escaped { .. }));
    assert!(matches!(
        escape_rate_check(&rec, true),
        Err(RateError::TooShortOrbit { need: 20, .. })
    ));
}

#[test]
fn rate_check_loglog_also_passes_on_linear_drift() {
    let f = parsed("z + 1 + exp(-z)");
    let rec = iterate(&f, c(1.0, 0.0), 2000);
    let rate = escape_rate_check(&rec, false).unwrap();
    assert_eq!(rate.sequence_name, "loglog_abs");
    assert!(rate.pass, "{rate:?}");
}

#[test]
fn upper_half_plane_invariant_under_tan() {
    let f = parsed("tan(z)");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_DEFAULT);
    let mut exceptions = 0;
    for _ in 0..500 {
        let seed = c(rng.gen_range(-10.0..10.0), rng.gen_range(0.0..5.0));
        let rec = iterate(&f, seed, 100);
        if !matches!(rec.fate, Fate::Undecided | Fate::ConvergedTo { .. })
            || rec.points.iter().any(|z| z.im <= 0.0)
        {
            exceptions += 1;
        }
    }
    assert_eq!(exceptions, 0);
}

#[test]
fn baker_two_cycle_sub_orbits() {
    // 1/z - e^z from -10: magnitudes of the even sub-orbit climb while the
    // odd sub-orbit sinks toward the pole at 0
    let f = parsed("1/z - exp(z)");
    let rec = iterate(&f, c(-10.0, 0.0), 80);
    let even: Vec<f64> = rec.points.iter().step_by(2).map(|z| z.norm()).collect();
    let odd: Vec<f64> = rec.points.iter().skip(1).step_by(2).map(|z| z.norm()).collect();
    assert!(even.len() >= 11 && odd.len() >= 11);
    assert!(even[..11].windows(2).all(|w| w[0] < w[1]), "{even:?}");
    assert!(odd[..11].windows(2).all(|w| w[0] > w[1]), "{odd:?}");
    assert!(odd[10] < 0.06);
}

#[test]
fn period_one_baker_growth_corridor() {
    // along the tail, log|f(z)| / log|z| stays within [1/A, A] for a
    // modest A: the growth corridor of an invariant Baker domain
    let f = parsed("z + 1 + exp(-z)");
    let rec = iterate(&f, c(1.0, 0.0), 2000);
    let mut a_fit = 1.0f64;
    for w in rec.points.windows(2) {
        if w[0].norm() > std::f64::consts::E && w[1].norm() > std::f64::consts::E {
            let r = w[1].norm().ln() / w[0].norm().ln();
            a_fit = a_fit.max(r.max(1.0 / r));
        }
    }
    assert!(a_fit <= 4.0, "fitted corridor exponent {a_fit}");
}

#[test]
fn escape_lock_needs_monotone_tail() {
    let up: Vec<Complex64> = (0..40).map(|k| c(3.0 + k as f64, 0.0)).collect();
    assert!(escape_locked(&up));
    let mut wobble = up.clone();
    wobble[35] = c(1.0, 0.0);
    assert!(!escape_locked(&wobble));
    // monotone but still inside |z| = e
    let low: Vec<Complex64> = (0..40).map(|k| c(0.01 * k as f64, 0.0)).collect();
    assert!(!escape_locked(&low));
}

#[test]
fn fit_line_recovers_exact_affine_data() {
    let pts: Vec<(f64, f64)> = (0..50).map(|k| (k as f64, 2.5 * k as f64 - 7.0)).collect();
    let (slope, intercept) = fit_line(&pts);
    assert!((slope - 2.5).abs() < 1e-12);
    assert!((intercept + 7.0).abs() < 1e-10);
}
