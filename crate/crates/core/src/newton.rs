//! Newton and relaxed-Newton iterators for a target function `g`: root
//! location, the singular-orbit convergence criterion, the continuous
//! Newton flow, and basin measurements.

use crate::consts::*;
use crate::exec;
use crate::fnkit::{build, ComplexMap, EvalOutcome, Expr, MeroFn};
use crate::geom::Rect;
use crate::orbit::{self, Fate};
use crate::rootfind::{self, sdiv};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::borrow::Cow;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The function whose zeros the iteration chases. Closed-form targets carry
/// a full expression tree. Integral-curve targets `∫₀ᶻ p·e^q dt + c` have a
/// symbolic derivative `p·e^q` but no closed form for `g` itself, which is
/// recovered by quadrature.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Closed(MeroFn),
    Curve(IntegralCurve),
}

impl Target {
    /// `g(z)`.
    pub fn value(&self, z: Complex64) -> EvalOutcome {
        match self {
            Target::Closed(g) => g.eval(z),
            Target::Curve(c) => c.apply(z),
        }
    }

    /// `g′(z)`.
    pub fn deriv(&self, z: Complex64) -> EvalOutcome {
        match self {
            Target::Closed(g) => g.eval_deriv(z),
            Target::Curve(c) => c.apply_deriv(z),
        }
    }

    /// `g″(z)`.
    fn second(&self, z: Complex64) -> EvalOutcome {
        match self {
            Target::Closed(g) => g.derivative().eval_deriv(z),
            Target::Curve(c) => c.gdd.eval(z),
        }
    }

    /// A map with the same zeros as `g″`. For curve targets that is
    /// `p′ + p·q′`: the `e^q` factor of `g″` never vanishes and only
    /// ill-conditions the search.
    fn second_zero_map(&self) -> MeroFn {
        match self {
            Target::Closed(g) => g.derivative().derivative().clone(),
            Target::Curve(c) => c.sing.clone(),
        }
    }

    /// Expression tree of `z − h·g/g′` when `g` has one.
    fn closed_tree(&self, h: Complex64) -> Option<MeroFn> {
        match self {
            Target::Closed(g) => {
                let quot = build::div(g.ast().clone(), g.derivative().ast().clone());
                Some(MeroFn::from_expr(build::sub(Expr::Z, build::mul(build::const_expr(h), quot))))
            }
            Target::Curve(_) => None,
        }
    }
}

impl ComplexMap for Target {
    fn apply(&self, z: Complex64) -> EvalOutcome {
        self.value(z)
    }

    fn apply_deriv(&self, z: Complex64) -> EvalOutcome {
        self.deriv(z)
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Target::Closed(g) => write!(f, "{g}"),
            Target::Curve(c) => {
                write!(f, "integral of ({})*exp({}) from 0 to z, plus {}", c.p, c.q, c.c)
            }
        }
    }
}

/// Target of the form `g(z) = ∫₀ᶻ p(t)·e^{q(t)} dt + c` with entire `p`,
/// `q` (polynomials in the intended use). `ComplexMap` gives `g` itself:
/// `apply` integrates by adaptive Simpson along the straight segment from
/// the origin, `apply_deriv` evaluates the symbolic `p·e^q`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralCurve {
    p: MeroFn,
    q: MeroFn,
    c: Complex64,
    /// `g′ = p·e^q`.
    gd: MeroFn,
    /// `g″ = (p′ + p·q′)·e^q`.
    gdd: MeroFn,
    /// `p′ + p·q′`, whose zeros are the zeros of `g″`.
    sing: MeroFn,
}

impl IntegralCurve {
    pub fn new(p: MeroFn, q: MeroFn, c: Complex64) -> IntegralCurve {
        let exp_q = Expr::Exp(Box::new(q.ast().clone()));
        let gd = MeroFn::from_expr(build::mul(p.ast().clone(), exp_q.clone()));
        let sing_tree = build::add(
            p.derivative().ast().clone(),
            build::mul(p.ast().clone(), q.derivative().ast().clone()),
        );
        let gdd = MeroFn::from_expr(build::mul(sing_tree.clone(), exp_q));
        let sing = MeroFn::from_expr(sing_tree);
        IntegralCurve { p, q, c, gd, gdd, sing }
    }

    pub fn p(&self) -> &MeroFn {
        &self.p
    }

    pub fn q(&self) -> &MeroFn {
        &self.q
    }

    pub fn offset(&self) -> Complex64 {
        self.c
    }

    fn sample(&self, z: Complex64, t: f64) -> Option<Complex64> {
        self.gd.eval(t * z).finite()
    }

    /// `∫₀¹ g′(tz) dt` by adaptive Simpson; the caller scales by `z`.
    fn unit_integral(&self, z: Complex64) -> Option<Complex64> {
        let fa = self.sample(z, 0.0)?;
        let fm = self.sample(z, 0.5)?;
        let fb = self.sample(z, 1.0)?;
        let whole = simpson(0.0, 1.0, fa, fm, fb);
        let tol = QUAD_TOL * whole.norm().max(1.0);
        self.refine(z, 0.0, fa, 0.5, fm, 1.0, fb, whole, tol, QUAD_DEPTH)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        z: Complex64,
        a: f64,
        fa: Complex64,
        m: f64,
        fm: Complex64,
        b: f64,
        fb: Complex64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Option<Complex64> {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.sample(z, lm)?;
        let frm = self.sample(z, rm)?;
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let err = left + right - whole;
        if depth == 0 || err.norm() <= 15.0 * tol {
            // Richardson tail: the halved rule is 16x more accurate
            return Some(left + right + err / 15.0);
        }
        let l = self.refine(z, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1)?;
        let r = self.refine(z, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1)?;
        Some(l + r)
    }
}

fn simpson(a: f64, b: f64, fa: Complex64, fm: Complex64, fb: Complex64) -> Complex64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

impl ComplexMap for IntegralCurve {
    fn apply(&self, z: Complex64) -> EvalOutcome {
        match self.unit_integral(z) {
            Some(i) => {
                let v = z * i + self.c;
                if v.norm() > OVERFLOW_CAP || !v.norm().is_finite() {
                    EvalOutcome::Overflow
                } else {
                    EvalOutcome::Finite { value: v }
                }
            }
            None => EvalOutcome::Overflow,
        }
    }

    fn apply_deriv(&self, z: Complex64) -> EvalOutcome {
        self.gd.eval(z)
    }
}

/// A zero of the target, as located by the damped Newton search.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LocatedRoot {
    pub location: Complex64,
    /// Estimated from the iterator's multiplier via `m = h / (1 − f_h′)`.
    pub multiplicity: u32,
    /// `|g|` at the located point.
    pub residual: f64,
}

/// An iterator `f_h = z − h·g/g′` with its relaxation and the located zeros
/// of the target. Iterate it through [`NewtonSetup::iterator`].
#[derive(Clone, Debug)]
pub struct NewtonSetup {
    pub g: Target,
    pub h: Complex64,
    /// Closed form of the iterator; `None` for quadrature-backed targets,
    /// which evaluate `z − h·g/g′` directly instead.
    pub f_h: Option<MeroFn>,
    pub roots: Vec<LocatedRoot>,
}

#[derive(Debug, thiserror::Error)]
pub enum SetupError {
    #[error("relaxation must satisfy |h - 1| < 1, got h = {h}")]
    BadRelaxation { h: Complex64 },
    #[error("target does not depend on z")]
    ConstantTarget,
}

/// Build the relaxed iterator for a closed-form target and locate its roots
/// inside `root_box` from a `grid_n × grid_n` seed lattice. An empty root
/// list is not an error: the box may simply miss every zero.
pub fn make_relaxed(
    g: MeroFn,
    h: Complex64,
    root_box: Rect,
    grid_n: usize,
) -> Result<NewtonSetup, SetupError> {
    if build::is_zero(g.derivative().ast()) {
        return Err(SetupError::ConstantTarget);
    }
    assemble(Target::Closed(g), h, root_box, grid_n)
}

/// [`make_relaxed`] for an integral-curve target.
pub fn make_relaxed_curve(
    curve: IntegralCurve,
    h: Complex64,
    root_box: Rect,
    grid_n: usize,
) -> Result<NewtonSetup, SetupError> {
    if build::is_zero(curve.p.ast()) {
        return Err(SetupError::ConstantTarget);
    }
    assemble(Target::Curve(curve), h, root_box, grid_n)
}

fn assemble(
    g: Target,
    h: Complex64,
    root_box: Rect,
    grid_n: usize,
) -> Result<NewtonSetup, SetupError> {
    if (h - ONE).norm() >= 1.0 {
        return Err(SetupError::BadRelaxation { h });
    }
    let f_h = g.closed_tree(h);
    let mut setup = NewtonSetup { g, h, f_h, roots: Vec::new() };
    // a root of multiplicity m is only locatable to within resid^(1/m), so
    // hits from different seeds scatter far past the generic dedup radius;
    // roots closer than the assignment tolerance are indistinguishable
    // downstream anyway
    let zeros = rootfind::dedup_points(
        rootfind::zeros_in_rect(&setup.g, root_box, grid_n),
        ROOT_ASSIGN_TOL,
    );
    setup.roots = zeros
        .into_iter()
        .map(|z| LocatedRoot {
            location: z,
            multiplicity: estimate_multiplicity(&setup, z),
            residual: match setup.g.value(z) {
                EvalOutcome::Finite { value } => value.norm(),
                _ => f64::INFINITY,
            },
        })
        .collect();
    debug_assert!(
        setup.identity_defect(root_box, 100) < 1e-10,
        "iterator tree disagrees with z - h*g/g'"
    );
    Ok(setup)
}

impl NewtonSetup {
    /// The map `f_h`, borrowing the closed-form tree when there is one.
    pub fn iterator(&self) -> NewtonIter<'_> {
        NewtonIter { tree: self.f_h.as_ref(), target: &self.g, h: self.h }
    }

    /// Largest `|f_h(z) − (z − h·g/g′)|` over `samples` random points of
    /// `rect`, skipping points where the formula is ill-conditioned (near
    /// zeros of `g′` the division amplifies roundoff past any fixed bound).
    fn identity_defect(&self, rect: Rect, samples: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED_DEFAULT);
        let it = self.iterator();
        let mut worst = 0.0f64;
        let mut accepted = 0usize;
        for _ in 0..100 * samples {
            if accepted == samples {
                break;
            }
            let z = Complex64::new(
                rect.x0 + rng.gen::<f64>() * rect.width(),
                rect.y0 + rng.gen::<f64>() * rect.height(),
            );
            let (Some(gv), Some(gd)) = (self.g.value(z).finite(), self.g.deriv(z).finite())
            else {
                continue;
            };
            let Some(quot) = sdiv(gv, gd) else { continue };
            if gd.norm() <= ZERO_BAND || quot.norm() > 1e2 * (1.0 + z.norm()) {
                continue;
            }
            let Some(fv) = it.apply(z).finite() else { continue };
            worst = worst.max((fv - (z - self.h * quot)).norm());
            accepted += 1;
        }
        worst
    }
}

/// Evaluation of `f_h`, through the closed tree when the target has one and
/// by the direct formula otherwise.
#[derive(Clone, Copy)]
pub struct NewtonIter<'a> {
    tree: Option<&'a MeroFn>,
    target: &'a Target,
    h: Complex64,
}

impl ComplexMap for NewtonIter<'_> {
    fn apply(&self, z: Complex64) -> EvalOutcome {
        match self.tree {
            Some(t) => t.eval(z),
            None => relaxed_step(self.target, self.h, z),
        }
    }

    fn apply_deriv(&self, z: Complex64) -> EvalOutcome {
        match self.tree {
            Some(t) => t.eval_deriv(z),
            None => relaxed_deriv(self.target, self.h, z),
        }
    }
}

fn relaxed_step(g: &Target, h: Complex64, z: Complex64) -> EvalOutcome {
    let gv = match g.value(z) {
        EvalOutcome::Finite { value } => value,
        other => return other,
    };
    let gd = match g.deriv(z) {
        EvalOutcome::Finite { value } => value,
        other => return other,
    };
    match sdiv(gv, gd) {
        Some(q) => {
            let v = z - h * q;
            if v.norm() > OVERFLOW_CAP {
                EvalOutcome::Overflow
            } else {
                EvalOutcome::Finite { value: v }
            }
        }
        // g' vanished under a nonzero numerator: a pole of the iterator
        None => EvalOutcome::PoleHit,
    }
}

/// `f_h′ = 1 − h + h·(g/g′)·(g″/g′)`.
fn relaxed_deriv(g: &Target, h: Complex64, z: Complex64) -> EvalOutcome {
    let gv = match g.value(z) {
        EvalOutcome::Finite { value } => value,
        other => return other,
    };
    let gd = match g.deriv(z) {
        EvalOutcome::Finite { value } => value,
        other => return other,
    };
    let gdd = match g.second(z) {
        EvalOutcome::Finite { value } => value,
        other => return other,
    };
    match (sdiv(gv, gd), sdiv(gdd, gd)) {
        (Some(a), Some(b)) => {
            let v = ONE - h + h * a * b;
            if v.norm() > OVERFLOW_CAP {
                EvalOutcome::Overflow
            } else {
                EvalOutcome::Finite { value: v }
            }
        }
        _ => EvalOutcome::PoleHit,
    }
}

/// `f_h′` at a located root. At a multiple root the derivative expression
/// is 0/0 at the point itself, so failing a direct evaluation the value is
/// probed just off the root, where the quotient is already within roundoff
/// of its limit `1 − h/m`.
pub fn relaxed_multiplier(setup: &NewtonSetup, root: Complex64) -> Option<Complex64> {
    let it = setup.iterator();
    if let Some(v) = it.apply_deriv(root).finite() {
        return Some(v);
    }
    let r = MULT_PROBE * (1.0 + root.norm());
    for k in 0..4 {
        let theta = std::f64::consts::FRAC_PI_2 * k as f64;
        if let Some(v) = it.apply_deriv(root + Complex64::from_polar(r, theta)).finite() {
            return Some(v);
        }
    }
    None
}

fn estimate_multiplicity(setup: &NewtonSetup, root: Complex64) -> u32 {
    let Some(lam) = relaxed_multiplier(setup, root) else {
        return 1;
    };
    let denom = ONE - lam;
    if denom.norm() < 1e-9 {
        return 1;
    }
    let m = (setup.h / denom).re.round();
    if m.is_finite() && m >= 1.0 {
        (m as u32).min(1000)
    } else {
        1
    }
}

fn nearest_root(roots: &[LocatedRoot], z: Complex64) -> Option<usize> {
    roots
        .iter()
        .enumerate()
        .map(|(i, r)| (i, (r.location - z).norm()))
        .filter(|(_, d)| *d < ROOT_ASSIGN_TOL)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

/// One singular point (zero of `g″` off the zeros of `g′`) and where its
/// orbit under the unrelaxed iterator went.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SingularFate {
    pub point: Complex64,
    pub fate: Fate,
    /// Index into the setup's roots when the orbit converged onto one.
    pub root: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    /// Every singular orbit converged to a located root, so iteration from
    /// any seed in the Fatou set converges to a root.
    Guaranteed,
    /// A singular orbit failed; the whole basin of whatever it found is
    /// lost to root finding.
    Obstructed { point: Complex64, fate: Fate },
}

#[derive(Clone, Debug, Serialize)]
pub struct SmaleReport {
    pub singular: Vec<SingularFate>,
    pub verdict: Verdict,
}

/// The singular-orbit convergence criterion: locate the zeros of `g″` that
/// are not zeros of `g′` inside `bounds` and iterate each under the
/// unrelaxed map `f_1`. If every such orbit converges to a located root the
/// verdict is `Guaranteed`; the first failure (in the deterministic search
/// order) is named otherwise. An empty singular set passes trivially.
pub fn smale_test(
    setup: &NewtonSetup,
    bounds: Rect,
    grid_n: usize,
    max_iters: usize,
) -> SmaleReport {
    let sing_map = setup.g.second_zero_map();
    let singular: Vec<Complex64> = rootfind::zeros_in_rect(&sing_map, bounds, grid_n)
        .into_iter()
        .filter(|z| match setup.g.deriv(*z) {
            EvalOutcome::Finite { value } => value.norm() > ZERO_BAND,
            _ => false,
        })
        .collect();

    let f1: Cow<'_, NewtonSetup> = if setup.h == ONE {
        Cow::Borrowed(setup)
    } else {
        Cow::Owned(NewtonSetup {
            g: setup.g.clone(),
            h: ONE,
            f_h: setup.g.closed_tree(ONE),
            roots: setup.roots.clone(),
        })
    };
    let it = f1.iterator();
    let fates: Vec<SingularFate> = exec::map_indexed(singular.len(), |i| {
        let record = orbit::iterate(&it, singular[i], max_iters);
        let root = match record.fate {
            Fate::ConvergedTo { value } => nearest_root(&setup.roots, value),
            _ => None,
        };
        SingularFate { point: singular[i], fate: record.fate, root }
    });
    let verdict = fates
        .iter()
        .find(|s| s.root.is_none())
        .map_or(Verdict::Guaranteed, |s| Verdict::Obstructed { point: s.point, fate: s.fate });
    SmaleReport { singular: fates, verdict }
}

/// Terminal state of one continuous-flow trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum FlowEnd {
    Root { index: usize, location: Complex64, t: f64 },
    /// Ran past the time horizon, or terminated away from every located
    /// root.
    Diverged,
    /// The step size collapsed below `FLOW_DT_MIN`; the trajectory ran
    /// into a zero of `g′`.
    StepUnderflow,
}

/// Integrate `ż = −g/g′` from `seed` until `|g| < FLOW_TOL` and assign the
/// nearest located root.
///
/// Along exact flow lines `g(z(t)) = g(z(0))·e^{−t}`, which doubles as the
/// step acceptance test: an RK4 trial step whose `g`-value strays from the
/// predicted decay by more than `FLOW_LAW_TOL` (relative) is rejected and
/// the step halved; comfortably accurate steps grow back toward
/// `FLOW_DT_MAX`. Note the termination threshold is on `|g|`, so at a root
/// of multiplicity `m` the final point sits within `FLOW_TOL^(1/m)` of the
/// root, which for `m ≥ 3` is farther than the assignment tolerance.
pub fn flow_basin(setup: &NewtonSetup, seed: Complex64, t_max: f64, dt0: f64) -> FlowEnd {
    flow_impl(setup, seed, t_max, dt0, |_, _| {})
}

fn flow_impl(
    setup: &NewtonSetup,
    seed: Complex64,
    t_max: f64,
    dt0: f64,
    mut observe: impl FnMut(f64, Complex64),
) -> FlowEnd {
    let g = &setup.g;
    let rhs = |z: Complex64| -> Option<Complex64> {
        let gv = g.value(z).finite()?;
        let gd = g.deriv(z).finite()?;
        sdiv(gv, gd).map(|q| -q)
    };
    let mut z = seed;
    let mut t = 0.0f64;
    let mut dt = dt0.clamp(FLOW_DT_MIN, FLOW_DT_MAX);
    // hard cap on accepted steps so a trajectory creeping at the minimum
    // step cannot spin forever (t_max / FLOW_DT_MIN steps is absurd)
    for _ in 0..200_000 {
        let Some(gv) = g.value(z).finite() else { return FlowEnd::Diverged };
        if gv.norm() < FLOW_TOL {
            return match nearest_root(&setup.roots, z) {
                Some(index) => FlowEnd::Root { index, location: setup.roots[index].location, t },
                None => FlowEnd::Diverged,
            };
        }
        if t >= t_max {
            return FlowEnd::Diverged;
        }
        let trial = rk4(&rhs, z, dt);
        let accepted = trial.and_then(|znew| {
            let want = gv * (-dt).exp();
            let got = g.value(znew).finite()?;
            let defect = (got - want).norm();
            (defect <= FLOW_LAW_TOL * want.norm() + 1e-13).then_some((znew, defect, want.norm()))
        });
        match accepted {
            Some((znew, defect, scale)) => {
                z = znew;
                t += dt;
                observe(t, z);
                if defect * 64.0 <= FLOW_LAW_TOL * scale {
                    dt = (2.0 * dt).min(FLOW_DT_MAX);
                }
            }
            None => {
                dt *= 0.5;
                if dt < FLOW_DT_MIN {
                    return FlowEnd::StepUnderflow;
                }
            }
        }
    }
    FlowEnd::Diverged
}

fn rk4(
    rhs: &impl Fn(Complex64) -> Option<Complex64>,
    z: Complex64,
    dt: f64,
) -> Option<Complex64> {
    let k1 = rhs(z)?;
    let k2 = rhs(z + 0.5 * dt * k1)?;
    let k3 = rhs(z + 0.5 * dt * k2)?;
    let k4 = rhs(z + dt * k3)?;
    Some(z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// Basin statistics for one relaxation value over a pixel grid.
#[derive(Clone, Debug, Serialize)]
pub struct BasinReport {
    pub h: Complex64,
    pub bounds: Rect,
    pub width: usize,
    pub height: usize,
    pub max_iters: usize,
    /// Fraction of pixels whose iteration converged to each root (indexed
    /// like the reference root list).
    pub iter_fraction: Vec<f64>,
    /// Fraction of pixels whose flow trajectory reached each root. The
    /// flow does not depend on `h`, so these columns repeat per report.
    pub flow_fraction: Vec<f64>,
    /// Fraction of pixels whose iteration did not converge to any root.
    pub nonconvergent: f64,
    /// Attracting cycles (period ≥ 2) that nonconvergent orbits settled
    /// into, each listed from its canonical representative.
    pub cycles: Vec<Vec<Complex64>>,
}

/// Per-relaxation basin fractions over a `width × height` pixel grid.
/// All setups must share one target; fractions are reported against the
/// root list of the first setup, and the flow baseline is integrated once.
pub fn basin_measures(
    setups: &[NewtonSetup],
    bounds: Rect,
    width: usize,
    height: usize,
    max_iters: usize,
) -> Vec<BasinReport> {
    assert!(!setups.is_empty(), "need at least one setup");
    assert!(
        setups.windows(2).all(|w| w[0].g == w[1].g),
        "basin sweep requires a common target"
    );
    let reference = &setups[0];
    let roots = &reference.roots;
    let total = (width * height) as f64;

    let flow_hits = exec::map_indexed(width * height, |i| {
        let z = bounds.pixel_center(i / width, i % width, width, height);
        match flow_basin(reference, z, FLOW_T_MAX, FLOW_DT) {
            FlowEnd::Root { index, .. } => Some(index),
            _ => None,
        }
    });
    let mut flow_fraction = vec![0.0; roots.len()];
    for hit in flow_hits.into_iter().flatten() {
        flow_fraction[hit] += 1.0;
    }
    for f in &mut flow_fraction {
        *f /= total;
    }

    setups
        .iter()
        .map(|setup| {
            let it = setup.iterator();
            let outs = exec::map_indexed(width * height, |i| {
                let z = bounds.pixel_center(i / width, i % width, width, height);
                let record = orbit::iterate(&it, z, max_iters);
                match record.fate {
                    Fate::ConvergedTo { value } => match nearest_root(roots, value) {
                        Some(idx) => PixelOut::Root(idx),
                        None => PixelOut::Other,
                    },
                    Fate::CycleOfPeriod { period, representative } => {
                        PixelOut::Cycle { representative, period }
                    }
                    _ => PixelOut::Other,
                }
            });
            let mut iter_fraction = vec![0.0; roots.len()];
            let mut cycles: Vec<Vec<Complex64>> = Vec::new();
            let mut converged = 0usize;
            for out in &outs {
                match out {
                    PixelOut::Root(idx) => {
                        iter_fraction[*idx] += 1.0;
                        converged += 1;
                    }
                    PixelOut::Cycle { representative, period } => {
                        let known = cycles
                            .iter()
                            .any(|c| (c[0] - representative).norm() < DEDUP_TOL);
                        if !known {
                            if let Some(members) = cycle_members(&it, *representative, *period) {
                                cycles.push(members);
                            }
                        }
                    }
                    PixelOut::Other => {}
                }
            }
            for f in &mut iter_fraction {
                *f /= total;
            }
            BasinReport {
                h: setup.h,
                bounds,
                width,
                height,
                max_iters,
                iter_fraction,
                flow_fraction: flow_fraction.clone(),
                nonconvergent: (total - converged as f64) / total,
                cycles,
            }
        })
        .collect()
}

enum PixelOut {
    Root(usize),
    Cycle { representative: Complex64, period: usize },
    Other,
}

fn cycle_members(
    f: &(impl ComplexMap + ?Sized),
    representative: Complex64,
    period: usize,
) -> Option<Vec<Complex64>> {
    let mut members = vec![representative];
    let mut z = representative;
    for _ in 1..period {
        z = f.apply(z).finite()?;
        members.push(z);
    }
    Some(members)
}
