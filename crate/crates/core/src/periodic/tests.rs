use super::*;
use crate::fnkit::MeroFn;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn parsed(s: &str) -> MeroFn {
    MeroFn::parse(s).unwrap()
}

#[test]
fn multiplier_classification_bands() {
    use Stability::*;
    assert_eq!(classify_multiplier(c(0.0, 0.0)), Superattracting);
    assert_eq!(classify_multiplier(c(1e-10, 0.0)), Superattracting);
    assert_eq!(classify_multiplier(c(0.5, 0.3)), Attracting);
    assert_eq!(classify_multiplier(c(5.0 / 6.0, 0.0)), Attracting);
    assert_eq!(classify_multiplier(c(1.0, 0.0)), RationallyIndifferent { q: 1 });
    assert_eq!(classify_multiplier(c(-1.0, 0.0)), RationallyIndifferent { q: 2 });
    let third = Complex64::from_polar(1.0, std::f64::consts::TAU / 3.0);
    assert_eq!(classify_multiplier(third), RationallyIndifferent { q: 3 });
    let golden = Complex64::from_polar(1.0, std::f64::consts::TAU * 0.6180339887498949);
    assert_eq!(classify_multiplier(golden), IrrationallyIndifferent);
    assert_eq!(classify_multiplier(c(1.2, 0.0)), Repelling);
    assert_eq!(classify_multiplier(c(0.0, 2.0)), Repelling);
}

#[test]
fn rational_rotation_prefers_smallest_denominator() {
    assert_eq!(rational_rotation(0.0), Some((0, 1)));
    assert_eq!(rational_rotation(0.5), Some((1, 2)));
    assert_eq!(rational_rotation(1.0 / 3.0 + 1e-12), Some((1, 3)));
    assert_eq!(rational_rotation(5.0 / 64.0), Some((5, 64)));
    assert_eq!(rational_rotation(1.0 / 65.0), None);
    assert_eq!(rational_rotation(0.6180339887498949), None);
}

#[test]
fn fixed_points_of_scaled_exponential() {
    // 0.3 e^z: attracting at 0.4894, repelling companion at 1.7806 on R
    let f = parsed("0.3*exp(z)");
    let out = find_periodic(&f, 1, Rect::new(-2.0, 4.0, -2.0, 2.0).unwrap(), 24);
    assert!(out.points.len() >= 2, "{:?}", out.points);
    let attract = out
        .points
        .iter()
        .find(|p| (p.location - c(0.489402227180215, 0.0)).norm() < 1e-8)
        .expect("attracting fixed point");
    assert_eq!(attract.stability, Stability::Attracting);
    assert!((attract.multiplier.norm() - 0.489402227180215).abs() < 1e-8);
    let repel = out
        .points
        .iter()
        .find(|p| (p.location - c(1.7813370234216276, 0.0)).norm() < 1e-6)
        .expect("repelling fixed point");
    assert_eq!(repel.stability, Stability::Repelling);
    for p in &out.points {
        assert!(p.residual < 1e-10);
        assert_eq!(p.cycle.len(), 1);
    }
}

#[test]
fn exp_fixed_point_pair_and_multiplier() {
    let f = parsed("exp(z)");
    let out = find_periodic(&f, 1, Rect::centered(3.0), 24);
    let fp = out
        .points
        .iter()
        .find(|p| (p.location - c(0.3181315052047641, 1.3372357014306895)).norm() < 1e-8)
        .unwrap_or_else(|| panic!("principal fixed point missing from {:?}", out.points));
    // e^z = z there, so |multiplier| = |z|
    assert!((fp.multiplier.norm() - fp.location.norm()).abs() < 1e-10);
    assert_eq!(fp.stability, Stability::Repelling);
    // the conjugate fixed point is its own cycle
    assert!(out
        .points
        .iter()
        .any(|p| (p.location - c(0.3181315052047641, -1.3372357014306895)).norm() < 1e-8));
}

#[test]
fn no_fixed_points_for_exp_plus_z() {
    // e^z + z = z would need e^z = 0
    let f = parsed("exp(z) + z");
    let out = find_periodic(&f, 1, Rect::centered(6.0), 20);
    assert!(out.points.is_empty(), "{:?}", out.points);
    assert_eq!(out.failed_seeds, out.seeds_tried);
}

#[test]
fn flat_guard_rejects_absorbed_pseudo_fixed_points() {
    // on a box wide enough to reach Re z < -37, z + e^z == z holds bitwise
    // and Newton accepts with residual exactly zero; the ring probe is what
    // keeps those out
    let f = parsed("exp(z) + z");
    let out = find_periodic(&f, 1, Rect::centered(50.0), 24);
    assert!(out.points.is_empty(), "{:?}", out.points);
}

#[test]
fn flat_guard_keeps_genuine_parabolic_point() {
    // e^z - 1 fixes 0 with multiplier exactly 1
    let f = parsed("exp(z) - 1");
    let out = find_periodic(&f, 1, Rect::centered(2.0), 16);
    assert_eq!(out.points.len(), 1, "{:?}", out.points);
    let p = &out.points[0];
    assert!(p.location.norm() < 1e-5);
    assert_eq!(p.stability, Stability::RationallyIndifferent { q: 1 });
}

#[test]
fn period_two_cycles_of_exp_plus_z() {
    // period-2 points satisfy e^z = (2k+1)πi, multiplier 1 + (2k+1)²π²
    let f = parsed("exp(z) + z");
    let out = find_periodic(&f, 2, Rect::new(-2.0, 5.0, -10.0, 10.0).unwrap(), 28);
    assert!(!out.points.is_empty());
    for p in &out.points {
        let k_term = f.eval(p.location).finite().unwrap() - p.location; // e^z
        let odd_pi = k_term.im / std::f64::consts::PI;
        assert!(k_term.re.abs() < 1e-8, "e^z should be purely imaginary, got {k_term}");
        assert!(
            (odd_pi.round() - odd_pi).abs() < 1e-8 && (odd_pi.round() as i64) % 2 != 0,
            "e^z = (2k+1)πi violated: {odd_pi}"
        );
        let want = 1.0 + odd_pi * odd_pi * std::f64::consts::PI * std::f64::consts::PI;
        assert!((p.multiplier - c(want, 0.0)).norm() < 1e-6 * want, "{} vs {want}", p.multiplier);
        assert_eq!(p.stability, Stability::Repelling);
        assert_eq!(p.minimal_period, 2);
        assert!(p.residual < 1e-10);
    }
}

#[test]
fn superattracting_newton_cycle() {
    // relaxed Newton for z^3 - z + 1/sqrt(2) at h=1 has the 2-cycle {0, 1/√2}
    let g = "z - (z^3 - z + 0.7071067811865476)/(3*z^2 - 1)";
    let f = parsed(g);
    let out = find_periodic(&f, 2, Rect::centered(1.5), 24);
    let cyc = out
        .points
        .iter()
        .find(|p| p.location.norm() < 1e-8)
        .expect("cycle through the origin");
    assert_eq!(cyc.stability, Stability::Superattracting);
    assert!(cyc.multiplier.norm() < 1e-9);
    assert!(cyc.cycle.iter().any(|m| (m - c(0.7071067811865476, 0.0)).norm() < 1e-8));
    assert!(cyc.residual < 1e-10);
}

#[test]
fn minimality_filter_rejects_fixed_points_at_period_two() {
    // z^2 at period 2: the fixed points 0 and 1 solve f(f(z)) = z but must
    // be filtered out as non-minimal; the single genuine 2-cycle is the
    // pair of primitive cube roots of unity, with multiplier 2ω·2ω² = 4,
    // reported exactly once however many seeds reach it
    let f = parsed("z^2");
    let out = find_periodic(&f, 2, Rect::centered(1.4), 20);
    assert_eq!(out.points.len(), 1, "{:?}", out.points);
    let p = &out.points[0];
    assert_eq!(p.minimal_period, 2);
    assert!((p.location.re + 0.5).abs() < 1e-10);
    assert!((p.location.im.abs() - 0.75f64.sqrt()).abs() < 1e-10);
    assert!((p.multiplier - c(4.0, 0.0)).norm() < 1e-9);
    for fixed in [c(0.0, 0.0), c(1.0, 0.0)] {
        assert!(p.cycle.iter().all(|m| (m - fixed).norm() > 0.5));
    }
}

#[test]
fn multiplier_equals_chain_rule_product() {
    // across maps and periods, the reported multiplier must match the
    // derivative of the n-fold composition at the representative
    let cases: &[(&str, usize)] = &[
        ("z^2 - 1", 1),
        ("z^2 - 1", 2),
        ("0.3*exp(z)", 1),
        ("exp(z)", 1),
        ("exp(z)", 2),
        ("exp(z) + z", 2),
        ("2*tan(z)", 1),
        ("0.5*tan(z)", 1),
        ("z - (z^3 - 1)/(3*z^2)", 1),
        ("z - (z^3 - z + 0.7071067811865476)/(3*z^2 - 1)", 2),
        ("z^2 - 0.25", 1),
        ("1/z - exp(z)", 2),
    ];
    let mut verified = 0;
    for (src, period) in cases {
        let f = parsed(src);
        let out = find_periodic(&f, *period, Rect::centered(3.0), 20);
        for p in &out.points {
            let (_, chain_deriv) = chain(&f, p.location, *period).unwrap();
            assert!(
                (chain_deriv - p.multiplier).norm() <= 1e-8 * (1.0 + p.multiplier.norm()),
                "{src} period {period}: chain {chain_deriv} vs product {}",
                p.multiplier
            );
            verified += 1;
        }
    }
    assert!(verified >= 12, "only {verified} cycles located across the combos");
}

#[test]
fn representative_ordering_is_canonical() {
    let f = parsed("exp(z)");
    let out = find_periodic(&f, 1, Rect::centered(3.0), 16);
    for p in &out.points {
        for m in &p.cycle {
            let better = (m.im.abs(), m.re) < (p.location.im.abs(), p.location.re);
            assert!(!better, "cycle member {m} beats representative {}", p.location);
        }
    }
}

