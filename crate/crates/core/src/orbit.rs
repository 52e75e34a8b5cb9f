//! Forward iteration and backward (preimage) iteration.

use crate::consts::*;
use crate::exec;
use crate::fnkit::{ComplexMap, EvalOutcome, MeroFn};
use crate::geom::Rect;
use crate::rootfind;
use crate::ExtComplex;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// How a forward orbit ended within its iteration budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Fate {
    /// Successive differences stayed below `CONV_TOL` for `SETTLE_WINDOW`
    /// consecutive steps; `value` is the last iterate.
    ConvergedTo { value: Complex64 },
    /// A lag-`period` recurrence was seen twice in a row while consecutive
    /// points stayed separated. `representative` is the cycle member with
    /// smallest |Im|, ties broken by smallest Re, then smallest Im.
    CycleOfPeriod { period: usize, representative: Complex64 },
    /// The orbit crossed `ESCAPE_RADIUS` at `points[step]` and did not come
    /// back within `ESCAPE_GRACE` steps — or overflowed, in which case
    /// `step` is the index the unrepresentable iterate would have had.
    Escaped { step: usize },
    /// Evaluation hit a pole; `step` is the index of the orbit point that
    /// sits within pole tolerance of the pole (0 when the seed itself is).
    HitPole { step: usize },
    Undecided,
}

/// A forward orbit: every computed iterate (`points[0]` is the seed) plus
/// the verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub seed: Complex64,
    pub points: Vec<Complex64>,
    pub fate: Fate,
}

/// Cycle member with smallest |Im|, ties broken by smallest Re, then
/// smallest Im. Key comparisons treat values within `DEDUP_TOL` as tied, so
/// the choice is stable when the same cycle is entered at different members
/// whose coordinates agree only to roundoff.
pub(crate) fn cycle_representative(members: &[Complex64]) -> Complex64 {
    let keys = |a: &Complex64| [a.im.abs(), a.re, a.im];
    *members
        .iter()
        .min_by(|a, b| {
            for (ka, kb) in keys(a).into_iter().zip(keys(b)) {
                if (ka - kb).abs() > DEDUP_TOL {
                    return ka.total_cmp(&kb);
                }
            }
            std::cmp::Ordering::Equal
        })
        .expect("nonempty cycle")
}

/// Iterate `f` from `seed` for at most `max_iters` applications.
pub fn iterate(f: &(impl ComplexMap + ?Sized), seed: Complex64, max_iters: usize) -> OrbitRecord {
    let mut points = Vec::with_capacity(max_iters.min(4096) + 1);
    points.push(seed);
    let mut z = seed;
    let mut settled = 0usize;
    let mut crossed: Option<usize> = None;
    if seed.norm() > ESCAPE_RADIUS {
        crossed = Some(0);
    }
    for k in 1..=max_iters {
        let v = match f.apply(z) {
            EvalOutcome::Finite { value } => value,
            EvalOutcome::PoleHit => {
                return OrbitRecord { seed, points, fate: Fate::HitPole { step: k - 1 } };
            }
            EvalOutcome::Overflow => {
                // an unrepresentable iterate settles a pending radius crossing
                let step = crossed.unwrap_or(k);
                return OrbitRecord { seed, points, fate: Fate::Escaped { step } };
            }
        };
        points.push(v);

        // escape with a grace window: a crossing only counts once the orbit
        // has stayed outside for ESCAPE_GRACE further steps
        if v.norm() > ESCAPE_RADIUS {
            let c = *crossed.get_or_insert(k);
            if k - c >= ESCAPE_GRACE {
                return OrbitRecord { seed, points, fate: Fate::Escaped { step: c } };
            }
        } else {
            crossed = None;
        }

        // convergence by settled successive differences
        let d = (v - z).norm();
        if d < CONV_TOL {
            settled += 1;
            if settled >= SETTLE_WINDOW {
                return OrbitRecord { seed, points, fate: Fate::ConvergedTo { value: v } };
            }
        } else {
            settled = 0;
        }

        // cycle detection: lag-p recurrence confirmed at two consecutive
        // multiples, with consecutive points genuinely moving (otherwise a
        // slowly converging orbit would alias as a short cycle)
        let n = points.len();
        let mut hit: Option<(usize, Complex64)> = None;
        for p in 2..=CYCLE_SCAN_MAX.min((n - 1) / 2) {
            if (points[n - 1] - points[n - 1 - p]).norm() < CYCLE_TOL
                && (points[n - 1 - p] - points[n - 1 - 2 * p]).norm() < CYCLE_TOL
            {
                let members = &points[n - p..];
                let moving = members
                    .windows(2)
                    .all(|w| (w[1] - w[0]).norm() > 100.0 * CYCLE_TOL);
                if moving {
                    hit = Some((p, cycle_representative(members)));
                    break;
                }
            }
        }
        if let Some((period, representative)) = hit {
            return OrbitRecord { seed, points, fate: Fate::CycleOfPeriod { period, representative } };
        }

        z = v;
    }
    let fate = match crossed {
        // still outside the radius when the budget ran out
        Some(c) if points.last().map(|v| v.norm() > ESCAPE_RADIUS) == Some(true) => {
            Fate::Escaped { step: c }
        }
        _ => Fate::Undecided,
    };
    OrbitRecord { seed, points, fate }
}

/// Backward iteration result: every solution of `f^depth(z) = target` that
/// the lattice search located inside the box.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PreimageSet {
    pub target: ExtComplex,
    pub depth: usize,
    pub points: Vec<Complex64>,
    /// Lattice seeds whose Newton run did not land on a solution.
    pub stalled_seeds: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PreimageError {
    /// The target is an omitted (exceptional) value: its backward orbit is
    /// empty or degenerate, e.g. 0 for `0.3*exp(z)` or `∞` for any entire
    /// map.
    #[error("target {target} is an omitted value of the map; its backward orbit is trivial")]
    TargetExceptional { target: ExtComplex },
    #[error("depth must be at least 1")]
    ZeroDepth,
}

/// All preimage levels `f^{-1}(target), …, f^{-depth}(target)` intersected
/// with `rect`.
///
/// Newton runs from a `grid_n × grid_n` seed lattice per target point over
/// the box enlarged by `POLE_BOX_EXPAND` (so chains routing just outside
/// the view survive); completeness is relative to that lattice. Every
/// returned point is forward-verified — `|f^level(z) - target| < 1e-8`, or
/// a pole hit at exactly the right step for `∞` — and unverifiable points
/// are dropped.
pub fn preimage_levels(
    f: &MeroFn,
    target: ExtComplex,
    depth: usize,
    rect: Rect,
    grid_n: usize,
) -> Result<Vec<Vec<Complex64>>, PreimageError> {
    let (levels, _) = run_levels(f, target, depth, rect, grid_n)?;
    Ok(levels
        .iter()
        .enumerate()
        .map(|(li, level)| {
            level
                .iter()
                .copied()
                .filter(|z| rect.contains(*z) && verify_chain(f, *z, li + 1, target))
                .collect()
        })
        .collect())
}

/// Solutions of `f^depth(z) = target` inside `rect`.
pub fn preimages(
    f: &MeroFn,
    target: ExtComplex,
    depth: usize,
    rect: Rect,
    grid_n: usize,
) -> Result<PreimageSet, PreimageError> {
    let (levels, stalled_seeds) = run_levels(f, target, depth, rect, grid_n)?;
    let points = levels
        .last()
        .expect("depth >= 1")
        .iter()
        .copied()
        .filter(|z| rect.contains(*z) && verify_chain(f, *z, depth, target))
        .collect();
    Ok(PreimageSet { target, depth, points, stalled_seeds })
}

/// Levelwise backward solving over the enlarged box; levels are capped but
/// not yet clipped to the viewing box or forward-verified.
fn run_levels(
    f: &MeroFn,
    target: ExtComplex,
    depth: usize,
    rect: Rect,
    grid_n: usize,
) -> Result<(Vec<Vec<Complex64>>, usize), PreimageError> {
    if depth == 0 {
        return Err(PreimageError::ZeroDepth);
    }
    if is_exceptional(f, target) {
        return Err(PreimageError::TargetExceptional { target });
    }
    let search = rect.scaled(POLE_BOX_EXPAND);
    let mut stalled = 0usize;
    let mut levels: Vec<Vec<Complex64>> = Vec::with_capacity(depth);
    let first = match target {
        ExtComplex::Infinity => rootfind::poles_in_rect(f, search, grid_n),
        ExtComplex::Finite { value } => {
            let (pts, st) = solve_for_targets(f, &[value], search, grid_n);
            stalled += st;
            pts
        }
    };
    levels.push(cap_level(first));
    for _ in 1..depth {
        let (next, st) = solve_for_targets(f, levels.last().unwrap(), search, grid_n);
        stalled += st;
        levels.push(cap_level(next));
    }
    Ok((levels, stalled))
}

fn is_exceptional(f: &MeroFn, target: ExtComplex) -> bool {
    match target {
        ExtComplex::Infinity => !crate::fnkit::has_pole_risk(f.ast()),
        ExtComplex::Finite { value } => {
            crate::fnkit::omitted_value(f.ast()).is_some_and(|v| (v - value).norm() == 0.0)
        }
    }
}

/// One backward step: all solutions of `f(z) = t` for each `t`, inside
/// `rect`, from a fresh lattice per target. Returns the deduplicated points
/// and the number of stalled seeds.
fn solve_for_targets(
    f: &MeroFn,
    targets: &[Complex64],
    rect: Rect,
    grid_n: usize,
) -> (Vec<Complex64>, usize) {
    if targets.is_empty() {
        return (Vec::new(), 0);
    }
    let seeds = rect.lattice(grid_n);
    let jobs = targets.len() * seeds.len();
    let found = exec::map_indexed(jobs, |i| {
        let t = targets[i / seeds.len()];
        let seed = seeds[i % seeds.len()];
        rootfind::damped_newton(seed, |z| {
            let fv = f.eval(z).finite()?;
            let fd = f.eval_deriv(z).finite()?;
            Some((fv - t, fd))
        })
        .map(|hit| hit.z)
        .filter(|z| rect.contains(*z))
    });
    let stalled = found.iter().filter(|o| o.is_none()).count();
    (rootfind::dedup_points(found.into_iter().flatten().collect(), DEDUP_TOL), stalled)
}

/// Keep a level below `LEVEL_CAP` by uniform thinning over sort order.
fn cap_level(level: Vec<Complex64>) -> Vec<Complex64> {
    if level.len() <= LEVEL_CAP {
        return level;
    }
    let n = level.len();
    (0..LEVEL_CAP).map(|i| level[i * n / LEVEL_CAP]).collect()
}

/// Forward-verify a backward-orbit point: `f^depth(z)` must come within
/// `1e-8` of a finite target, or hit a pole at exactly step `depth` for `∞`.
fn verify_chain(f: &MeroFn, z0: Complex64, depth: usize, target: ExtComplex) -> bool {
    let mut z = z0;
    for step in 1..=depth {
        match f.eval(z) {
            EvalOutcome::Finite { value } => z = value,
            EvalOutcome::PoleHit => {
                return matches!(target, ExtComplex::Infinity) && step == depth;
            }
            EvalOutcome::Overflow => return false,
        }
    }
    match target {
        ExtComplex::Infinity => false,
        ExtComplex::Finite { value } => (z - value).norm() < 1e-8,
    }
}
