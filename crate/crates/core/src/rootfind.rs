//! Damped Newton iteration and point-set utilities shared by the search
//! modules (preimages, periodic points, root location, singular points).

use crate::consts::{
    DEDUP_TOL, NEWTON_MAX_HALVINGS, NEWTON_MAX_STEPS, NEWTON_RESID_TOL, NEWTON_STEP_TOL,
};
use crate::fnkit::ComplexMap;
use crate::geom::Rect;
use num_complex::Complex64;

#[derive(Clone, Copy, Debug)]
pub struct NewtonHit {
    pub z: Complex64,
    pub residual: f64,
}

/// Division scaled by the largest denominator component; `None` when the
/// quotient is not finite.
pub fn sdiv(a: Complex64, b: Complex64) -> Option<Complex64> {
    let m = b.re.abs().max(b.im.abs());
    if m == 0.0 || !m.is_finite() {
        return None;
    }
    let an = a / m;
    let r = an / (b / m);
    (r.re.is_finite() && r.im.is_finite()).then_some(r)
}

/// Damped Newton on `G` from `seed`. `eval` returns `(G(z), G'(z))` or
/// `None` where `G` cannot be evaluated.
///
/// A point is accepted as a root when the residual is below
/// `NEWTON_RESID_TOL` *and* the proposed correction `G/G'` is below
/// `NEWTON_STEP_TOL · (1 + |z|)`. The correction condition rejects
/// pseudo-roots along escaping drifts where the residual decays without the
/// iteration settling (fixed-point search for `exp(z) + z` is the canonical
/// case: the correction stays at size one forever). Judging the *proposed*
/// correction rather than the last taken step keeps a seed that already
/// sits at the arithmetic floor acceptable even though no strict residual
/// improvement exists there. A residual of exactly zero is accepted on the
/// spot. After first acceptance a few polish steps run so multiple roots,
/// which converge only linearly, land as close as the arithmetic allows.
pub fn damped_newton(
    seed: Complex64,
    mut eval: impl FnMut(Complex64) -> Option<(Complex64, Complex64)>,
) -> Option<NewtonHit> {
    let mut z = seed;
    let (mut gv, mut gd) = eval(z)?;
    let mut resid = gv.norm();
    let mut polish_left = 5usize;
    for _ in 0..NEWTON_MAX_STEPS {
        if resid == 0.0 {
            return Some(NewtonHit { z, residual: resid });
        }
        let full = sdiv(gv, gd)?;
        let met = resid < NEWTON_RESID_TOL && full.norm() < NEWTON_STEP_TOL * (1.0 + z.norm());
        if met {
            if polish_left == 0 {
                return Some(NewtonHit { z, residual: resid });
            }
            polish_left -= 1;
        }
        // damped stepping: halve until the residual strictly decreases
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..=NEWTON_MAX_HALVINGS {
            let cand = z - t * full;
            if let Some((cv, cd)) = eval(cand) {
                if cv.norm() < resid {
                    z = cand;
                    gv = cv;
                    gd = cd;
                    resid = cv.norm();
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            // stalled at the arithmetic floor; fine if the test already held
            return met.then_some(NewtonHit { z, residual: resid });
        }
    }
    if resid == 0.0 {
        return Some(NewtonHit { z, residual: resid });
    }
    let full = sdiv(gv, gd)?;
    let met = resid < NEWTON_RESID_TOL && full.norm() < NEWTON_STEP_TOL * (1.0 + z.norm());
    met.then_some(NewtonHit { z, residual: resid })
}

/// Zeros of `g` inside `rect`, from an `n × n` seed lattice.
pub fn zeros_in_rect(g: &(impl ComplexMap + ?Sized), rect: Rect, n: usize) -> Vec<Complex64> {
    let seeds = rect.lattice(n);
    let found = crate::exec::map_indexed(seeds.len(), |i| {
        damped_newton(seeds[i], |z| {
            let gv = g.apply(z).finite()?;
            let gd = g.apply_deriv(z).finite()?;
            Some((gv, gd))
        })
    });
    let pts = found
        .into_iter()
        .flatten()
        .map(|hit| hit.z)
        .filter(|z| rect.contains(*z))
        .collect();
    dedup_points(pts, DEDUP_TOL)
}

/// Poles of `f` inside `rect`: Newton on `1/f`, seeded from an `n × n`
/// lattice and from the syntactic pole hints.
pub fn poles_in_rect(
    f: &crate::fnkit::MeroFn,
    rect: Rect,
    n: usize,
) -> Vec<Complex64> {
    let mut seeds = rect.lattice(n);
    seeds.extend(f.pole_hints().iter().copied().filter(|p| rect.contains(*p)));
    let found = crate::exec::map_indexed(seeds.len(), |i| {
        damped_newton(seeds[i], |z| reciprocal_pair(f, z))
    });
    let pts = found
        .into_iter()
        .flatten()
        .map(|hit| hit.z)
        .filter(|z| rect.contains(*z))
        .collect();
    dedup_points(pts, DEDUP_TOL)
}

/// `(1/f, (1/f)')` with the derivative formed as `-(f'/f)/f` to dodge
/// premature under/overflow near poles. A pole hit reports an exact zero.
fn reciprocal_pair(f: &crate::fnkit::MeroFn, z: Complex64) -> Option<(Complex64, Complex64)> {
    use crate::fnkit::EvalOutcome;
    match f.eval(z) {
        EvalOutcome::PoleHit => Some((Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))),
        EvalOutcome::Overflow => None,
        EvalOutcome::Finite { value: fv } => {
            let fd = f.eval_deriv(z).finite()?;
            let hv = sdiv(Complex64::new(1.0, 0.0), fv)?;
            let hd = -sdiv(sdiv(fd, fv)?, fv)?;
            Some((hv, hd))
        }
    }
}

/// Sort by (re, im) and merge points closer than `tol`. The first member of
/// each cluster in sort order is kept, so output is deterministic.
pub fn dedup_points(mut pts: Vec<Complex64>, tol: f64) -> Vec<Complex64> {
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut kept: Vec<Complex64> = Vec::with_capacity(pts.len());
    'next: for p in pts {
        for q in kept.iter().rev() {
            if p.re - q.re > tol {
                break;
            }
            if (p - q).norm() < tol {
                continue 'next;
            }
        }
        kept.push(p);
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnkit::MeroFn;

    #[test]
    fn newton_finds_simple_roots_quadratically() {
        let g = MeroFn::parse("z^2 - 2").unwrap();
        let hit = damped_newton(Complex64::new(1.0, 0.5), |z| {
            Some((g.eval(z).finite()?, g.eval_deriv(z).finite()?))
        })
        .unwrap();
        assert!((hit.z - Complex64::new(2f64.sqrt(), 0.0)).norm() < 1e-12);
        assert!(hit.residual < 1e-12);
    }

    #[test]
    fn newton_polishes_multiple_roots() {
        // (z - 1)^3: linear convergence; polish should still get close
        let g = MeroFn::parse("(z - 1)^3").unwrap();
        let hit = damped_newton(Complex64::new(1.4, 0.2), |z| {
            Some((g.eval(z).finite()?, g.eval_deriv(z).finite()?))
        })
        .unwrap();
        assert!((hit.z - Complex64::new(1.0, 0.0)).norm() < 1e-4);
    }

    #[test]
    fn newton_rejects_residual_only_drifts() {
        // exp(z) + z has no fixed points: G = exp(z) shrinks along Re -> -inf
        // but the iteration never settles
        let g = MeroFn::parse("exp(z)").unwrap();
        let out = damped_newton(Complex64::new(-2.0, 1.0), |z| {
            Some((g.eval(z).finite()?, g.eval_deriv(z).finite()?))
        });
        assert!(out.is_none());
    }

    #[test]
    fn lattice_search_recovers_all_roots() {
        let g = MeroFn::parse("z^3 - 1").unwrap();
        let roots = zeros_in_rect(&g, Rect::centered(2.0), 24);
        assert_eq!(roots.len(), 3);
        for r in &roots {
            assert!((g.eval(*r).finite().unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn pole_search_uses_hints_and_lattice()  {
        let f = MeroFn::parse("1/z - exp(z)").unwrap();
        let poles = poles_in_rect(&f, Rect::centered(3.0), 16);
        assert_eq!(poles.len(), 1);
        assert!(poles[0].norm() < 1e-9);

        let t = MeroFn::parse("2*tan(z)").unwrap();
        let poles = poles_in_rect(&t, Rect::centered(4.0), 32);
        let expect = [-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2];
        assert_eq!(poles.len(), 2, "{poles:?}");
        for (p, want) in poles.iter().zip(expect) {
            assert!((p - Complex64::new(want, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn dedup_keeps_cluster_representatives() {
        let pts = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 1e-8),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0 + 5e-7, -5e-7),
            Complex64::new(-1.0, 2.0),
        ];
        let out = dedup_points(pts, 1e-6);
        assert_eq!(out.len(), 3);
    }
}
