//! Periodic points: lattice-seeded Newton search on `f^n(z) - z`,
//! multipliers along the cycle, and stability classification.

use crate::consts::*;
use crate::exec;
use crate::fnkit::ComplexMap;
use crate::geom::Rect;
use crate::orbit::cycle_representative;
use crate::rootfind::damped_newton;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Stability of a cycle, decided by the multiplier modulus and, in the
/// indifferent band, by whether the rotation number is rational.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Stability {
    Superattracting,
    Attracting,
    RationallyIndifferent { q: u32 },
    IrrationallyIndifferent,
    Repelling,
}

/// A located cycle. `location` is the canonical representative (smallest
/// |Im|, ties by smallest Re, then smallest Im); `cycle` lists the members
/// from it forward.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicPoint {
    pub location: Complex64,
    pub minimal_period: usize,
    pub multiplier: Complex64,
    pub stability: Stability,
    pub residual: f64,
    pub cycle: Vec<Complex64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicSearch {
    pub period: usize,
    pub points: Vec<PeriodicPoint>,
    pub seeds_tried: usize,
    /// Seeds that produced no accepted cycle of minimal period `period`
    /// (Newton stall or divergence, evaluation failure, or a non-minimal
    /// period). For maps with no such cycles this equals `seeds_tried`.
    pub failed_seeds: usize,
}

/// `(f^n(z), (f^n)'(z))` by forward accumulation; `None` on any pole,
/// overflow, or flight beyond the escape radius.
pub(crate) fn chain(
    f: &(impl ComplexMap + ?Sized),
    z0: Complex64,
    n: usize,
) -> Option<(Complex64, Complex64)> {
    let mut v = z0;
    let mut d = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        let fd = f.apply_deriv(v).finite()?;
        d *= fd;
        v = f.apply(v).finite()?;
        if v.norm() > ESCAPE_RADIUS || !d.norm().is_finite() {
            return None;
        }
    }
    Some((v, d))
}

/// Search for cycles of minimal period `period` from a `grid_n × grid_n`
/// seed lattice over `rect`. A cycle is reported when at least one member
/// lies in `rect`; the rest of the cycle may extend outside the box (the
/// box constrains the seeds and anchors the result, not the whole orbit).
/// Newton hits whose cycle misses the box entirely are dropped: they are
/// artifacts of the search marching away, not cycles *of the region*, and
/// far from the box `f^n(z) - z` can vanish in floating point without a
/// true cycle nearby (e.g. maps of the form `z + g(z)` once `|g|` falls
/// below one ulp of `|z|`).
pub fn find_periodic(
    f: &(impl ComplexMap + ?Sized),
    period: usize,
    rect: Rect,
    grid_n: usize,
) -> PeriodicSearch {
    assert!(period >= 1, "period must be positive");
    let seeds = rect.lattice(grid_n);
    let raw = exec::map_indexed(seeds.len(), |i| {
        damped_newton(seeds[i], |z| {
            let (v, d) = chain(f, z, period)?;
            Some((v - z, d - Complex64::new(1.0, 0.0)))
        })
        .map(|hit| hit.z)
    });
    let seeds_tried = seeds.len();
    let mut accepted: Vec<PeriodicPoint> = Vec::new();
    let mut failed = 0usize;
    for cand in raw {
        match cand.and_then(|z| vet_cycle(f, z, period, rect)) {
            Some(pp) => accepted.push(pp),
            None => failed += 1,
        }
    }
    // one representative per cycle; two hits are the same cycle when any of
    // their members coincide, whatever member each search entered through
    let mut points: Vec<PeriodicPoint> = Vec::new();
    accepted.sort_by(|a, b| {
        a.location
            .re
            .total_cmp(&b.location.re)
            .then(a.location.im.total_cmp(&b.location.im))
    });
    'next: for pp in accepted {
        for kept in &points {
            let shared = pp
                .cycle
                .iter()
                .any(|a| kept.cycle.iter().any(|b| (a - b).norm() < DEDUP_TOL));
            if shared {
                continue 'next;
            }
        }
        points.push(pp);
    }
    points.sort_by(|a, b| {
        a.location
            .im
            .abs()
            .total_cmp(&b.location.im.abs())
            .then(a.location.re.total_cmp(&b.location.re))
            .then(a.location.im.total_cmp(&b.location.im))
    });
    PeriodicSearch { period, points, seeds_tried, failed_seeds: failed }
}

/// Vet a Newton hit: enforce minimality, move to the canonical
/// representative, re-polish there, require the cycle to touch the seed
/// box, and compute multiplier and stability.
fn vet_cycle(
    f: &(impl ComplexMap + ?Sized),
    z: Complex64,
    period: usize,
    rect: Rect,
) -> Option<PeriodicPoint> {
    // minimality against proper divisors
    for m in 1..period {
        if period % m == 0 {
            let (v, _) = chain(f, z, m)?;
            if (v - z).norm() < MINIMALITY_MARGIN {
                return None;
            }
        }
    }
    let members = collect_cycle(f, z, period)?;
    let rep = cycle_representative(&members);
    // re-polish at the representative so the reported residual is the
    // residual *there*, not the seed-side residual amplified along the cycle
    let polished = damped_newton(rep, |w| {
        let (v, d) = chain(f, w, period)?;
        Some((v - w, d - Complex64::new(1.0, 0.0)))
    })?;
    let rep = polished.z;
    let cycle = collect_cycle(f, rep, period)?;
    if !cycle.iter().any(|m| rect.contains(*m)) {
        return None;
    }
    let mut multiplier = Complex64::new(1.0, 0.0);
    for m in &cycle {
        multiplier *= f.apply_deriv(*m).finite()?;
    }
    if !flat_guard_passes(f, rep, period, multiplier) {
        return None;
    }
    Some(PeriodicPoint {
        location: rep,
        minimal_period: period,
        multiplier,
        stability: classify_multiplier(multiplier),
        residual: polished.residual,
        cycle,
    })
}

/// Guard against pseudo-roots created by floating-point absorption. For
/// maps of the form `z + g(z)`, `f(z) == z` holds bitwise wherever |g| is
/// below one ulp of |z|, and there the chain derivative is 1 to roundoff.
/// Probing F_n on a ring separates that case from a genuine parabolic
/// point: absorbed regions read as identically zero, a true multiplier-1
/// point grows quadratically off the root.
fn flat_guard_passes(
    f: &(impl ComplexMap + ?Sized),
    rep: Complex64,
    period: usize,
    multiplier: Complex64,
) -> bool {
    if (multiplier - Complex64::new(1.0, 0.0)).norm() >= FLAT_GUARD_TRIGGER {
        return true;
    }
    let radius = FLAT_GUARD_RADIUS * (1.0 + rep.norm());
    let mut largest = 0.0f64;
    for k in 0..PROBE_COUNT {
        let theta = std::f64::consts::TAU * k as f64 / PROBE_COUNT as f64;
        let w = rep + Complex64::from_polar(radius, theta);
        match chain(f, w, period) {
            Some((v, _)) => largest = largest.max((v - w).norm()),
            // a probe that escapes or hits a pole is anything but flat
            None => return true,
        }
    }
    largest > FLAT_GUARD_FLOOR * (1.0 + rep.norm())
}

fn collect_cycle(
    f: &(impl ComplexMap + ?Sized),
    z: Complex64,
    period: usize,
) -> Option<Vec<Complex64>> {
    let mut members = Vec::with_capacity(period);
    let mut v = z;
    for _ in 0..period {
        members.push(v);
        v = f.apply(v).finite()?;
    }
    Some(members)
}

/// Stability from the multiplier: superattracting below `ZERO_BAND`,
/// indifferent within `INDIFF_BAND` of the unit circle (rational vs.
/// irrational rotation number via continued fractions), attracting or
/// repelling otherwise.
pub fn classify_multiplier(multiplier: Complex64) -> Stability {
    let m = multiplier.norm();
    if m < ZERO_BAND {
        return Stability::Superattracting;
    }
    if (m - 1.0).abs() < INDIFF_BAND {
        let mut t = (multiplier.arg() / std::f64::consts::TAU).rem_euclid(1.0);
        if t >= 1.0 {
            // rem_euclid of a tiny negative rounds up to exactly 1.0
            t = 0.0;
        }
        return match rational_rotation(t) {
            Some((_, q)) => Stability::RationallyIndifferent { q },
            None => Stability::IrrationallyIndifferent,
        };
    }
    if m < 1.0 {
        Stability::Attracting
    } else {
        Stability::Repelling
    }
}

/// Best rational approximation `p/q` of `t ∈ [0, 1)` with `q ≤ Q_MAX` and
/// error below `RATIONAL_TOL`, by walking the continued fraction
/// convergents. Returns the smallest such denominator.
pub(crate) fn rational_rotation(t: f64) -> Option<(u32, u32)> {
    debug_assert!((0.0..1.0).contains(&t));
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, 0i64, 1i64); // (p_{-1}, q_{-1}, p_0, q_0) with a_0 = 0
    let mut x = t;
    for _ in 0..40 {
        let err = (t - p1 as f64 / q1 as f64).abs();
        if q1 as u32 <= Q_MAX && err < RATIONAL_TOL {
            return Some((p1 as u32, q1 as u32));
        }
        let frac = x - x.floor();
        if frac.abs() < 1e-15 {
            break;
        }
        x = 1.0 / frac;
        let a = x.floor() as i64;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > Q_MAX as i64 * 4 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    let err = (t - p1 as f64 / q1 as f64).abs();
    (q1 as u32 <= Q_MAX && err < RATIONAL_TOL).then_some((p1 as u32, q1 as u32))
}

#[cfg(test)]
mod tests;
