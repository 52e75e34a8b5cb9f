//! Numeric thresholds shared across the engine.
//!
//! Everything that decides between qualitative outcomes (pole hit vs. finite,
//! escaped vs. bounded, attracting vs. indifferent, ...) funnels through the
//! constants below so the decision surfaces are documented in one place and
//! the acceptance suite can reference the same values.

/// An evaluation point closer than this to a known pole reports a pole hit.
pub const POLE_TOL: f64 = 1e-9;

/// Component magnitude above which a finite evaluation is declared overflow.
pub const OVERFLOW_CAP: f64 = 1e300;

/// Forward orbits crossing this modulus are marked escaped.
pub const ESCAPE_RADIUS: f64 = 1e8;

/// Steps allowed back inside the escape radius before the crossing is final.
pub const ESCAPE_GRACE: usize = 10;

/// Successive-difference threshold for orbit convergence.
pub const CONV_TOL: f64 = 1e-10;

/// Number of consecutive sub-threshold differences required to settle.
pub const SETTLE_WINDOW: usize = 5;

/// Distance threshold for the cycle-detection lag scan.
pub const CYCLE_TOL: f64 = 1e-8;

/// Largest lag probed by the cycle scan.
pub const CYCLE_SCAN_MAX: usize = 64;

/// Points closer than this are merged when sets are deduplicated.
pub const DEDUP_TOL: f64 = 1e-6;

/// Damped Newton: maximum outer steps.
pub const NEWTON_MAX_STEPS: usize = 200;

/// Damped Newton: maximum step halvings per outer step.
pub const NEWTON_MAX_HALVINGS: usize = 40;

/// Damped Newton: residual magnitude accepted as a root.
pub const NEWTON_RESID_TOL: f64 = 1e-12;

/// Damped Newton: the proposed correction `G/G'` must also be small
/// (relative to `1 + |z|`). Filters pseudo-roots where the residual decays
/// along an escaping drift (e.g. fixed-point search for `exp(z) + z`, which
/// has no fixed points but arbitrarily small residuals far to the left).
pub const NEWTON_STEP_TOL: f64 = 1e-6;

/// A candidate period-`n` point must move at least this far under every
/// proper-divisor iterate to count as minimal.
pub const MINIMALITY_MARGIN: f64 = 1e-4;

/// Multiplier band `||λ| - 1|` treated as indifferent.
pub const INDIFF_BAND: f64 = 1e-6;

/// Multiplier modulus below which a cycle is superattracting.
pub const ZERO_BAND: f64 = 1e-9;

/// Tolerance for recognising `arg λ / 2π` as rational.
pub const RATIONAL_TOL: f64 = 1e-9;

/// Largest denominator tried by the rationality test.
pub const Q_MAX: u32 = 64;

/// Minimum per-step drift modulus for a wandering-candidate label.
pub const DRIFT_SEP: f64 = 1.0;

/// Maximum residual allowed by escape-rate regressions.
pub const RATE_RESID_TOL: f64 = 0.5;

/// Default iteration budget for fate classification.
pub const BUDGET_DEFAULT: usize = 2000;

/// Newton-flow: termination threshold on `|g|`.
pub const FLOW_TOL: f64 = 1e-8;

/// Newton-flow: initial step size.
pub const FLOW_DT: f64 = 1e-2;

/// Newton-flow: step size below which integration aborts.
pub const FLOW_DT_MIN: f64 = 1e-8;

/// Newton-flow: default integration horizon.
pub const FLOW_T_MAX: f64 = 100.0;

/// Newton-flow: ceiling on adaptive step growth. Along exact flow lines
/// `g(z(t)) = g(z(0))·e^{-t}`, so accepted steps are cheap to validate and
/// the step is allowed to grow toward this cap away from critical points.
pub const FLOW_DT_MAX: f64 = 0.25;

/// Newton-flow: relative defect in the `e^{-dt}` decay law above which a
/// trial step is rejected and the step size halved.
pub const FLOW_LAW_TOL: f64 = 1e-8;

/// Relative error target for adaptive Simpson quadrature.
pub const QUAD_TOL: f64 = 1e-13;

/// Bisection depth cap for adaptive Simpson quadrature.
pub const QUAD_DEPTH: u32 = 24;

/// Ring radius (relative) for multiplier probes where the iterator's
/// derivative is 0/0 at the point itself, i.e. at multiple roots.
pub const MULT_PROBE: f64 = 1e-8;

/// A limit is assigned to a located root when within this distance.
pub const ROOT_ASSIGN_TOL: f64 = 1e-3;

/// Per-level cap on preimage sets; beyond it the level is thinned.
pub const LEVEL_CAP: usize = 50_000;

/// Finite-difference step for derivative cross-checks.
pub const FD_H: f64 = 1e-6;

/// Relative tolerance for derivative cross-checks.
pub const FD_TOL: f64 = 1e-6;

/// Tail derivative modulus separating Baker-type escape (`≥`) from the
/// contracting drift of a wandering-domain candidate (`<`).
pub const DERIV_SPLIT: f64 = 0.5;

/// Probe points placed around a seed before an escape label is trusted.
pub const PROBE_COUNT: usize = 8;

/// Probe ring radius relative to `max(1, |seed|)`.
pub const PROBE_REL_RADIUS: f64 = 1e-3;

/// Largest sub-orbit period tried when locking an escape onto a cycle of
/// directions.
pub const ESCAPE_LOCK_MAX: usize = 8;

/// Orbit points beyond |z| = e required before a rate fit is attempted.
pub const RATE_MIN_POINTS: usize = 20;

/// Tail window over which monotone |z| growth counts as an escape in
/// progress even though the radius was never crossed. Linear-drift escapes
/// (|f^n| ~ c·n) never reach the radius inside any reasonable budget.
pub const ESCAPE_TAIL_WINDOW: usize = 16;

/// Pole searches run over the viewing box enlarged by this linear factor, so
/// backward orbits that route through poles just outside the view are kept.
pub const POLE_BOX_EXPAND: f64 = 3.0;

/// Newton seed lattice density (per side, per target) used by the preimage
/// raster. Independent of the pixel resolution: backward solving is about
/// roots, not pixels.
pub const PREIMAGE_GRID_N: usize = 48;

/// When |(f^n)' - 1| at an accepted periodic candidate falls below this, the
/// residual F_n = f^n - id is probed on a small ring before the point is
/// believed: maps like z + g(z) satisfy f(z) == z bitwise wherever |g| drops
/// below one ulp of |z|, and such flat pseudo-roots carry no cycle evidence.
pub const FLAT_GUARD_TRIGGER: f64 = 1e-6;

/// Flat-zero probe ring radius, relative to `1 + |z|`.
pub const FLAT_GUARD_RADIUS: f64 = 1e-4;

/// If |F_n| stays at or below this (relative to `1 + |z|`) on the whole probe
/// ring, F_n is numerically the zero function there and the candidate is
/// dropped. A genuine parabolic point shows quadratic growth on the ring and
/// clears this floor by several orders of magnitude.
pub const FLAT_GUARD_FLOOR: f64 = 1e-13;

/// Default RNG seed for every randomised search.
pub const SEED_DEFAULT: u64 = 42;
