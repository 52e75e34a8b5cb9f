use super::*;
use crate::consts::{ESCAPE_RADIUS, SEED_DEFAULT};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_itinerary(rng: &mut ChaCha8Rng, n_bound: i32, depth: usize) -> Vec<i32> {
    (0..depth).map(|_| rng.gen_range(-n_bound..=n_bound)).collect()
}

#[test]
fn configure_matches_hand_checked_constants() {
    let cfg = configure(0.3, 1).unwrap();
    assert_eq!(cfg.c, 4.0);
    assert!((cfg.q - 0.48940222718021497).abs() < 1e-12);
    assert!((cfg.lambda * cfg.q.exp() - cfg.q).abs() < 1e-12);
    // c = 3 fails the reach check for n_bound = 1: 0.3*e^3 < 3 + 3*pi.
    assert!(0.3 * 3.0f64.exp() < 3.0 + 3.0 * PI);
    assert!(0.3 * 4.0f64.exp() > 4.0 + 3.0 * PI);

    let wide = configure(0.3, 2).unwrap();
    assert_eq!(wide.c, 5.0);
    assert!(wide.lambda * wide.c.exp() > wide.c + 5.0 * PI);
}

#[test]
fn configure_requires_lambda_below_one_over_e() {
    for lambda in [0.5, 1.0 / std::f64::consts::E, 0.0, -0.1] {
        assert!(matches!(
            configure(lambda, 1),
            Err(BouquetError::LambdaOutOfRange { .. })
        ));
    }
}

#[test]
fn strip_membership_is_open_and_bounded() {
    let cfg = configure(0.3, 1).unwrap();
    let r1 = cfg.rectangle(1);
    assert_eq!((r1.x0, r1.x1), (1.0, 4.0));
    assert_eq!((r1.y0, r1.y1), (PI, 3.0 * PI));
    assert_eq!(cfg.center(-1), Complex64::new(2.5, -2.0 * PI));

    assert_eq!(cfg.strip_index(cfg.center(1)), Some(1));
    assert_eq!(cfg.strip_index(Complex64::new(2.0, PI)), None); // edge
    assert_eq!(cfg.strip_index(Complex64::new(1.0, 0.0)), None); // Re edge
    assert_eq!(cfg.strip_index(Complex64::new(2.0, 4.0 * PI)), None); // |j| > 1
}

#[test]
fn real_points_have_strip_zero_tags() {
    let cfg = configure(0.3, 1).unwrap();
    assert_eq!(
        itinerary(&cfg, Complex64::new(2.0, 0.0), 1),
        ItineraryOutcome::Symbols { symbols: vec![0] }
    );
}

#[test]
fn the_fixed_point_escapes_immediately() {
    let cfg = configure(0.3, 1).unwrap();
    // q < 1 sits left of every rectangle, so the very first symbol is missing.
    assert_eq!(
        itinerary(&cfg, Complex64::new(cfg.q, 0.0), 5),
        ItineraryOutcome::EscapedStrips { step: 0 }
    );
}

#[test]
fn all_zero_tags_give_a_real_endpoint() {
    let cfg = configure(0.3, 1).unwrap();
    let s = vec![0i32; 10];
    let e = endpoint_from_itinerary(&cfg, &s).unwrap();
    assert!(e.im.abs() < 1e-12);
    assert!(e.re > 1.0 && e.re < cfg.c);
    assert_eq!(itinerary(&cfg, e, 10), ItineraryOutcome::Symbols { symbols: s });
}

#[test]
fn single_tag_endpoint_is_the_rectangle_center() {
    let cfg = configure(0.3, 1).unwrap();
    assert_eq!(endpoint_from_itinerary(&cfg, &[1]).unwrap(), cfg.center(1));
}

#[test]
fn deepening_the_tail_contracts() {
    let cfg = configure(0.3, 1).unwrap();
    let alt: Vec<i32> = (0..12).map(|i| (i + 1) % 2).collect();
    let e4 = endpoint_from_itinerary(&cfg, &alt[..4]).unwrap();
    let e8 = endpoint_from_itinerary(&cfg, &alt[..8]).unwrap();
    let e12 = endpoint_from_itinerary(&cfg, &alt).unwrap();
    let shallow = (e4 - e8).norm();
    let deep = (e8 - e12).norm();
    assert!(deep < 1e-3, "deep gap {deep}");
    assert!(deep < shallow / 10.0, "gaps {shallow} -> {deep}");
}

#[test]
fn first_symbol_perturbations_jump_a_full_band() {
    let cfg = configure(0.3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_DEFAULT);
    for _ in 0..50 {
        let s = random_itinerary(&mut rng, 2, 6);
        let mut t = s.clone();
        t[0] = if t[0] == 2 { 1 } else { t[0] + 1 };
        let base = endpoint_from_itinerary(&cfg, &s).unwrap();
        let moved = endpoint_from_itinerary(&cfg, &t).unwrap();
        assert!((base - moved).norm() >= PI, "separation {}", (base - moved).norm());
    }
}

#[test]
fn deeper_perturbations_separate_less() {
    let cfg = configure(0.3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_DEFAULT);
    let mut quotients = Vec::new();
    for _ in 0..50 {
        let s = random_itinerary(&mut rng, 2, 6);
        let base = endpoint_from_itinerary(&cfg, &s).unwrap();
        let deltas: Vec<f64> = (0..s.len())
            .map(|j| {
                let mut t = s.clone();
                t[j] = if t[j] == 2 { 1 } else { t[j] + 1 };
                (endpoint_from_itinerary(&cfg, &t).unwrap() - base).norm()
            })
            .collect();
        for pair in deltas.windows(2) {
            quotients.push(pair[0] / pair[1]);
        }
    }
    let avg = quotients.iter().sum::<f64>() / quotients.len() as f64;
    assert!(avg >= 1.5, "average separation quotient {avg}");
    assert!(quotients.iter().all(|&q| q > 1.0));
}

#[test]
fn endpoints_shifted_right_escape() {
    let cfg = configure(0.3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_DEFAULT);
    for _ in 0..20 {
        let s = random_itinerary(&mut rng, 2, 8);
        // c + 0.5 to the right of an endpoint sits past every rectangle, out
        // where the hair is; a bare +0.5 would usually drop into the basin.
        let mut z = endpoint_from_itinerary(&cfg, &s).unwrap() + (cfg.c + 0.5);
        let escaped = (0..60).any(|_| {
            z = cfg.apply(z);
            !z.norm().is_finite() || z.norm() > ESCAPE_RADIUS
        });
        assert!(escaped, "stuck near {z} for {s:?}");
    }
}

#[test]
fn shifted_tags_match_the_forward_orbit() {
    let cfg = configure(0.3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED_DEFAULT);
    for _ in 0..100 {
        let s = random_itinerary(&mut rng, 2, 10);
        assert_eq!(verify_conjugacy(&cfg, &s, 8), Ok(true), "itinerary {s:?}");
    }
}

#[test]
fn malformed_tag_sequences_are_rejected() {
    let cfg = configure(0.3, 2).unwrap();
    assert_eq!(
        endpoint_from_itinerary(&cfg, &[0, 3, 1]),
        Err(BouquetError::SymbolOutOfBound {
            index: 1,
            symbol: 3,
            n_bound: 2
        })
    );
    assert_eq!(
        endpoint_from_itinerary(&cfg, &[]),
        Err(BouquetError::TooShort { have: 0, need: 1 })
    );
    assert_eq!(
        verify_conjugacy(&cfg, &[0, 1, 0, 1, 0], 8),
        Err(BouquetError::TooShort { have: 5, need: 9 })
    );
    assert_eq!(
        verify_conjugacy(&cfg, &[0, -3, 0, 0, 0], 4),
        Err(BouquetError::SymbolOutOfBound {
            index: 1,
            symbol: -3,
            n_bound: 2
        })
    );
}

#[test]
fn branch_miss_reports_the_failing_level() {
    // A hand-built config with c far too small: the pullback of R_2's center
    // needs Re = ln(|w|/lambda) ~ 3.7, outside (1, 2.2).
    let cramped = BouquetConfig {
        lambda: 0.3,
        n_bound: 2,
        c: 2.2,
        q: 0.48940222718021497,
    };
    assert_eq!(
        endpoint_from_itinerary(&cramped, &[0, 2]),
        Err(BouquetError::BranchMiss { level: 0 })
    );
}
