//! Seed-fate classification: which kind of Fatou component a seed appears
//! to sit in, with the numerical evidence attached, plus the escape-rate
//! bound check used to vet Baker-type escapes.

use crate::consts::*;
use crate::fnkit::ComplexMap;
use crate::orbit::{self, Fate, OrbitRecord};
use crate::periodic::{chain, classify_multiplier, Stability};
use crate::rootfind::damped_newton;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Verdict of classify_seed. Every variant except the fallback carries the
/// evidence it was decided on. All of these are candidates in the honest
/// sense: finite iteration can support but never prove a component type.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FateLabel {
    /// Orbit converged to a cycle with multiplier modulus below 1.
    AttractingBasin { representative: Complex64, period: usize, multiplier: Complex64 },
    /// Orbit creeps into a rationally indifferent cycle: multiplier within
    /// the indifferent band of a q-th root of unity and the distance to the
    /// limit decays on a log-log slope compatible with n^(-1/q).
    LeauCandidate {
        limit: Complex64,
        period: usize,
        multiplier: Complex64,
        q: u32,
        decay_slope: f64,
    },
    /// Bounded, non-convergent orbit winding monotonically about an
    /// irrationally indifferent fixed point. Siegel-like evidence only;
    /// genuine rotation domains are beyond numerical verification.
    RotationCandidate { center: Complex64, multiplier: Complex64, winding_share: f64 },
    /// Escape locked onto a sub-orbit period with a passing growth-rate
    /// certificate, and all ring probes around the seed escape the same
    /// way.
    BakerCandidate { period: usize, rate: RateCheck },
    /// Orbit drifts by a settled increment larger than `DRIFT_SEP` while
    /// the derivative along the tail contracts: successive near-limits,
    /// never revisited.
    WanderingCandidate { drift: Complex64, deriv_tail: f64 },
    /// No stable verdict at this budget; includes seeds on repelling
    /// cycles, prepoles, and explosive escapes too short to fit.
    JuliaOrUndecided,
}

/// Result of fitting a growth sequence against step count. The fitted line
/// is an upper-envelope certificate: `max_residual` is the largest amount
/// (in log units) by which the sequence rises above the least-squares line,
/// and the check passes when that excess stays within `RATE_RESID_TOL`.
/// Dips below the line are harmless; the claim being certified is an upper
/// bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateCheck {
    /// "log_abs" (log|f^n|, simply connected hint) or "loglog_abs".
    pub sequence_name: String,
    pub fitted_slope: f64,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum RateError {
    #[error("orbit is not escaping: no radius crossing and no monotone tail growth")]
    NotEscaping,
    #[error("only {have} orbit points beyond |z| = e, need {need}")]
    TooShortOrbit { have: usize, need: usize },
}

/// Iterate `f` from `seed` for `budget` steps and decide which Fatou
/// component type the evidence favors, in this order: attracting cycle,
/// Leau petal, rotation, Baker escape, wandering drift, undecided.
pub fn classify_seed(
    f: &(impl ComplexMap + ?Sized),
    seed: Complex64,
    budget: usize,
) -> FateLabel {
    let rec = orbit::iterate(f, seed, budget);
    match rec.fate {
        // a prepole is in the backward orbit of infinity: Julia for any
        // map that has poles at all
        Fate::HitPole { .. } => FateLabel::JuliaOrUndecided,
        Fate::ConvergedTo { value } => settled_point(f, &rec, value),
        Fate::CycleOfPeriod { period, representative } => {
            settled_cycle(f, &rec, representative, period)
        }
        Fate::Escaped { .. } => escaping_side(f, &rec),
        Fate::Undecided => {
            if escape_locked(&rec.points) {
                escaping_side(f, &rec)
            } else {
                bounded_side(f, &rec)
            }
        }
    }
}

/// Growth-rate certificate for an escaping orbit. Fits log|f^n| (hint
/// true: the component is simply connected with infinity on its boundary,
/// where the linear bound applies) or loglog|f^n| (general bound) against
/// n over the tail beyond |z| = e.
pub fn escape_rate_check(
    record: &OrbitRecord,
    simply_connected_hint: bool,
) -> Result<RateCheck, RateError> {
    if !matches!(record.fate, Fate::Escaped { .. }) && !escape_locked(&record.points) {
        return Err(RateError::NotEscaping);
    }
    let tail: Vec<(f64, f64)> = record
        .points
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > std::f64::consts::E)
        .map(|(n, z)| {
            let y = if simply_connected_hint {
                z.norm().ln()
            } else {
                z.norm().ln().ln()
            };
            (n as f64, y)
        })
        .collect();
    if tail.len() < RATE_MIN_POINTS {
        return Err(RateError::TooShortOrbit { have: tail.len(), need: RATE_MIN_POINTS });
    }
    let (slope, intercept) = fit_line(&tail);
    let excess = tail
        .iter()
        .map(|&(x, y)| y - (slope * x + intercept))
        .fold(f64::NEG_INFINITY, f64::max);
    let pass = slope.is_finite() && excess <= RATE_RESID_TOL;
    Ok(RateCheck {
        sequence_name: if simply_connected_hint { "log_abs" } else { "loglog_abs" }.into(),
        fitted_slope: slope,
        max_residual: excess,
        pass,
    })
}

/// Least-squares line through `(x, y)` pairs: `(slope, intercept)`.
fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return (0.0, my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// True when the final `ESCAPE_TAIL_WINDOW` magnitudes grow strictly and
/// end beyond e: an escape in progress that the radius test cannot see.
fn escape_locked(points: &[Complex64]) -> bool {
    if points.len() < ESCAPE_TAIL_WINDOW + 1 {
        return false;
    }
    let tail = &points[points.len() - ESCAPE_TAIL_WINDOW..];
    tail.windows(2).all(|w| w[0].norm() < w[1].norm())
        && tail.last().unwrap().norm() > std::f64::consts::E
}

/// Orbit settled onto a single point: polish the fixed point and label by
/// its multiplier.
fn settled_point(
    f: &(impl ComplexMap + ?Sized),
    rec: &OrbitRecord,
    value: Complex64,
) -> FateLabel {
    let z0 = polish_cycle_point(f, value, 1).unwrap_or(value);
    let Some(mu) = f.apply_deriv(z0).finite() else {
        return FateLabel::JuliaOrUndecided;
    };
    label_settled(f, rec, z0, 1, mu)
}

/// Orbit settled onto a detected cycle of period > 1.
fn settled_cycle(
    f: &(impl ComplexMap + ?Sized),
    rec: &OrbitRecord,
    representative: Complex64,
    period: usize,
) -> FateLabel {
    let z0 = polish_cycle_point(f, representative, period).unwrap_or(representative);
    let Some(members) = cycle_members(f, z0, period) else {
        return FateLabel::JuliaOrUndecided;
    };
    let mut mu = Complex64::new(1.0, 0.0);
    for m in &members {
        match f.apply_deriv(*m).finite() {
            Some(d) => mu *= d,
            None => return FateLabel::JuliaOrUndecided,
        }
    }
    let rep = orbit::cycle_representative(&members);
    label_settled(f, rec, rep, period, mu)
}

fn label_settled(
    f: &(impl ComplexMap + ?Sized),
    rec: &OrbitRecord,
    z0: Complex64,
    period: usize,
    mu: Complex64,
) -> FateLabel {
    match classify_multiplier(mu) {
        Stability::Superattracting | Stability::Attracting => FateLabel::AttractingBasin {
            representative: z0,
            period,
            multiplier: mu,
        },
        Stability::RationallyIndifferent { q } => {
            match decay_slope(f, rec, z0, period, q) {
                Some(slope) => FateLabel::LeauCandidate {
                    limit: z0,
                    period,
                    multiplier: mu,
                    q,
                    decay_slope: slope,
                },
                None => FateLabel::JuliaOrUndecided,
            }
        }
        Stability::IrrationallyIndifferent => {
            let share = winding_share(&rec.points, z0).unwrap_or(1.0);
            FateLabel::RotationCandidate { center: z0, multiplier: mu, winding_share: share }
        }
        // an orbit glued to a repelling cycle started on the Julia set
        Stability::Repelling => FateLabel::JuliaOrUndecided,
    }
}

/// Bounded non-convergent orbit: try a Leau petal, then a rotation.
fn bounded_side(f: &(impl ComplexMap + ?Sized), rec: &OrbitRecord) -> FateLabel {
    let last = *rec.points.last().expect("orbit has the seed");
    for period in 1..=4 {
        if let Some(label) = leau_attempt(f, rec, last, period) {
            return label;
        }
    }
    if let Some(label) = rotation_attempt(f, rec) {
        return label;
    }
    FateLabel::JuliaOrUndecided
}

/// Petal check at one period: locate the cycle the tail creeps toward,
/// require a rationally indifferent multiplier, then fit the decay.
fn leau_attempt(
    f: &(impl ComplexMap + ?Sized),
    rec: &OrbitRecord,
    from: Complex64,
    period: usize,
) -> Option<FateLabel> {
    let z0 = polish_cycle_point(f, from, period)?;
    if (z0 - from).norm() > DRIFT_SEP {
        return None;
    }
    let members = cycle_members(f, z0, period)?;
    let mut mu = Complex64::new(1.0, 0.0);
    for m in &members {
        mu *= f.apply_deriv(*m).finite()?;
    }
    let Stability::RationallyIndifferent { q } = classify_multiplier(mu) else {
        return None;
    };
    let slope = decay_slope(f, rec, z0, period, q)?;
    Some(FateLabel::LeauCandidate {
        limit: orbit::cycle_representative(&members),
        period,
        multiplier: mu,
        q,
        decay_slope: slope,
    })
}

/// Log-log decay fit of the distance from the orbit tail to the located
/// cycle. A rationally indifferent cycle with rotation denominator q pulls
/// petal orbits in like n^(-1/q); accept slopes in [-1.5/q, -0.5/q].
fn decay_slope(
    f: &(impl ComplexMap + ?Sized),
    rec: &OrbitRecord,
    z0: Complex64,
    period: usize,
    q: u32,
) -> Option<f64> {
    let members = cycle_members(f, z0, period)?;
    let n0 = rec.points.len() / 2;
    let pts: Vec<(f64, f64)> = rec
        .points
        .iter()
        .enumerate()
        .skip(n0.max(1))
        .filter_map(|(n, z)| {
            let d = members.iter().map(|m| (z - m).norm()).fold(f64::INFINITY, f64::min);
            (d > 0.0).then(|| ((n as f64).ln(), d.ln()))
        })
        .collect();
    if pts.len() < RATE_MIN_POINTS {
        return None;
    }
    let (slope, _) = fit_line(&pts);
    let lo = -1.5 / q as f64;
    let hi = -0.5 / q as f64;
    (lo..=hi).contains(&slope).then_some(slope)
}

/// Rotation check: an irrationally indifferent fixed point near the tail
/// centroid with the orbit winding monotonically about it.
fn rotation_attempt(f: &(impl ComplexMap + ?Sized), rec: &OrbitRecord) -> Option<FateLabel> {
    let tail = &rec.points[rec.points.len() / 2..];
    let n = tail.len() as f64;
    let centroid = tail.iter().sum::<Complex64>() / n;
    let center = polish_cycle_point(f, centroid, 1)?;
    if (center - centroid).norm() > DRIFT_SEP {
        return None;
    }
    let mu = f.apply_deriv(center).finite()?;
    if classify_multiplier(mu) != Stability::IrrationallyIndifferent {
        return None;
    }
    let share = winding_share(&rec.points, center)?;
    (share >= 0.9).then_some(FateLabel::RotationCandidate {
        center,
        multiplier: mu,
        winding_share: share,
    })
}

/// Share of tail angle increments about `center` that agree with the
/// dominant turning direction. `None` when fewer than 8 increments are
/// measurable (orbit sitting on the center).
fn winding_share(points: &[Complex64], center: Complex64) -> Option<f64> {
    let tail = &points[points.len() / 2..];
    let mut incs = Vec::with_capacity(tail.len());
    for w in tail.windows(2) {
        let (u, v) = (w[0] - center, w[1] - center);
        if u.norm() < 1e-12 || v.norm() < 1e-12 {
            continue;
        }
        // wrapped angle increment in (-pi, pi]
        let d = (v / u).arg();
        if d.abs() > 1e-3 {
            incs.push(d);
        }
    }
    if incs.len() < 8 {
        return None;
    }
    let pos = incs.iter().filter(|d| **d > 0.0).count();
    let dominant = pos.max(incs.len() - pos);
    Some(dominant as f64 / incs.len() as f64)
}

/// Escaping orbit (by radius or by monotone tail): Baker when the tail
/// derivative stays away from zero, wandering when it contracts onto
/// drifting targets.
fn escaping_side(f: &(impl ComplexMap + ?Sized), rec: &OrbitRecord) -> FateLabel {
    let deriv_tail = tail_derivative(f, &rec.points);
    if deriv_tail < DERIV_SPLIT {
        if let Some(drift) = settled_drift(&rec.points) {
            return FateLabel::WanderingCandidate { drift, deriv_tail };
        }
        return FateLabel::JuliaOrUndecided;
    }
    let Some(period) = escape_period(&rec.points) else {
        return FateLabel::JuliaOrUndecided;
    };
    let Ok(rate) = escape_rate_check(rec, true) else {
        return FateLabel::JuliaOrUndecided;
    };
    if !rate.pass || !probes_escape(f, rec) {
        return FateLabel::JuliaOrUndecided;
    }
    FateLabel::BakerCandidate { period, rate }
}

/// Mean |f'| over the final tail window; +inf when nothing evaluates (an
/// orbit that left every representable scale is certainly not contracting).
fn tail_derivative(f: &(impl ComplexMap + ?Sized), points: &[Complex64]) -> f64 {
    let start = points.len().saturating_sub(ESCAPE_TAIL_WINDOW);
    let vals: Vec<f64> = points[start..]
        .iter()
        .filter_map(|z| f.apply_deriv(*z).finite().map(|d| d.norm()))
        .collect();
    if vals.is_empty() {
        return f64::INFINITY;
    }
    vals.iter().sum::<f64>() / vals.len() as f64
}

/// Settled drift increment: the last increments all exceed `DRIFT_SEP` and
/// cluster within 10% of their mean. This is the numerical footprint of an
/// orbit hopping between successive local targets.
fn settled_drift(points: &[Complex64]) -> Option<Complex64> {
    let k = points.len().min(65);
    if k < 9 {
        return None;
    }
    let tail = &points[points.len() - k..];
    let incs: Vec<Complex64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = incs.iter().sum::<Complex64>() / incs.len() as f64;
    let settled = incs
        .iter()
        .all(|d| d.norm() > DRIFT_SEP && (d - mean).norm() <= 0.1 * mean.norm());
    settled.then_some(mean)
}

/// Smallest stride p <= ESCAPE_LOCK_MAX whose sub-orbit magnitudes grow
/// monotonically across the whole recorded tail beyond |z| = e.
fn escape_period(points: &[Complex64]) -> Option<usize> {
    let start = points.len() / 4;
    (1..=ESCAPE_LOCK_MAX).find(|&p| {
        let mags: Vec<f64> = points[start..].iter().step_by(p).map(|z| z.norm()).collect();
        mags.len() >= 4 && mags.windows(2).all(|w| w[0] < w[1])
    })
}

/// Eight ring probes around the seed must escape the same way before a
/// Baker label is trusted: Baker domains are open, so a seed on the Julia
/// set sees disagreement at any positive radius.
fn probes_escape(f: &(impl ComplexMap + ?Sized), rec: &OrbitRecord) -> bool {
    let budget = rec.points.len().max(2) - 1;
    let radius = PROBE_REL_RADIUS * (1.0 + rec.seed.norm());
    (0..PROBE_COUNT).all(|k| {
        let theta = std::f64::consts::TAU * k as f64 / PROBE_COUNT as f64;
        let w = rec.seed + Complex64::from_polar(radius, theta);
        let probe = orbit::iterate(f, w, budget);
        let escaping =
            matches!(probe.fate, Fate::Escaped { .. }) || escape_locked(&probe.points);
        escaping && tail_derivative(f, &probe.points) >= DERIV_SPLIT
    })
}

/// Newton-polish a point toward a nearby cycle of the given period; `None`
/// when the polish stalls or wanders off.
fn polish_cycle_point(
    f: &(impl ComplexMap + ?Sized),
    from: Complex64,
    period: usize,
) -> Option<Complex64> {
    damped_newton(from, |w| {
        let (v, d) = chain(f, w, period)?;
        Some((v - w, d - Complex64::new(1.0, 0.0)))
    })
    .map(|hit| hit.z)
}

fn cycle_members(
    f: &(impl ComplexMap + ?Sized),
    z0: Complex64,
    period: usize,
) -> Option<Vec<Complex64>> {
    let mut members = Vec::with_capacity(period);
    let mut v = z0;
    for _ in 0..period {
        members.push(v);
        v = f.apply(v).finite()?;
    }
    Some(members)
}

#[cfg(test)]
mod tests;
