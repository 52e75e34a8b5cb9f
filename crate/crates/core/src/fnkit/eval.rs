//! Tree-walking evaluator with explicit overflow and pole semantics.
//!
//! Every intermediate is kept inside the component cap `OVERFLOW_CAP`; a
//! division that would leave it reports a pole hit, any other operation that
//! would reports overflow. Division is scaled so denominators as small as
//! the subnormal range neither underflow to `0/0` nor overflow prematurely.

use super::{EvalOutcome, Expr};
use crate::consts::{OVERFLOW_CAP, POLE_TOL};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Interrupt {
    Pole,
    Overflow,
}

type Ev = Result<Complex64, Interrupt>;

pub fn eval(e: &Expr, z: Complex64) -> EvalOutcome {
    match ev(e, z) {
        Ok(v) => EvalOutcome::Finite { value: v },
        Err(Interrupt::Pole) => EvalOutcome::PoleHit,
        Err(Interrupt::Overflow) => EvalOutcome::Overflow,
    }
}

fn big(v: Complex64) -> bool {
    !(v.re.abs() <= OVERFLOW_CAP && v.im.abs() <= OVERFLOW_CAP)
}

fn guard(v: Complex64) -> Ev {
    if big(v) {
        Err(Interrupt::Overflow)
    } else {
        Ok(v)
    }
}

fn ev(e: &Expr, z: Complex64) -> Ev {
    match e {
        Expr::Z => Ok(z),
        Expr::Const(c) => Ok(*c),
        Expr::Neg(a) => Ok(-ev(a, z)?),
        Expr::Add(a, b) => guard(ev(a, z)? + ev(b, z)?),
        Expr::Sub(a, b) => guard(ev(a, z)? - ev(b, z)?),
        Expr::Mul(a, b) => guard(ev(a, z)? * ev(b, z)?),
        Expr::Div(a, b) => cdiv(ev(a, z)?, ev(b, z)?),
        Expr::Pow(a, n) => cpow(ev(a, z)?, *n),
        Expr::Exp(a) => guard(ev(a, z)?.exp()),
        Expr::Sin(a) => guard(ev(a, z)?.sin()),
        Expr::Cos(a) => guard(ev(a, z)?.cos()),
        Expr::Tan(a) => ctan(ev(a, z)?),
    }
}

/// `a / b` with the denominator prescaled by its largest component, so the
/// quotient is computed as `(a/m) / (b/m)` with `|b/m|` of order one.
fn cdiv(a: Complex64, b: Complex64) -> Ev {
    let m = b.re.abs().max(b.im.abs());
    if m == 0.0 || !m.is_finite() {
        return Err(Interrupt::Pole);
    }
    let an = a / m;
    if big(an) {
        // scaling up the numerator already left the cap: the quotient would
        // be at least |a|/(2m) in magnitude, i.e. past the cap
        return Err(Interrupt::Pole);
    }
    let r = an / (b / m);
    if big(r) || !(r.re.is_finite() && r.im.is_finite()) {
        Err(Interrupt::Pole)
    } else {
        Ok(r)
    }
}

fn cpow(base: Complex64, n: i32) -> Ev {
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut result = Complex64::new(1.0, 0.0);
    let mut acc = base;
    let mut k = n.unsigned_abs();
    loop {
        if k & 1 == 1 {
            result = guard(result * acc)?;
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        acc = guard(acc * acc)?;
    }
    if n < 0 {
        cdiv(Complex64::new(1.0, 0.0), result)
    } else {
        Ok(result)
    }
}

/// Robust complex tangent.
///
/// For |Im| ≤ 20 the sin/cos quotient is safe (cosh(40) ≈ 1.2e17). Above
/// that, `w = exp(2iz)` has |w| ≤ e^{-40}, and `tan z = -i (w-1)/(w+1)` is
/// evaluated without ever forming the huge hyperbolics; the reflection
/// `tan(-z) = -tan(z)` covers the lower half plane. Poles all lie on the
/// real axis at (k + 1/2)π; points within `POLE_TOL` of one report a pole.
fn ctan(u: Complex64) -> Ev {
    use std::f64::consts::PI;
    if u.im.abs() <= 1e-6 {
        let k = (u.re / PI - 0.5).round();
        let pole_re = (k + 0.5) * PI;
        let d2 = (u.re - pole_re).powi(2) + u.im * u.im;
        if d2 < POLE_TOL * POLE_TOL {
            return Err(Interrupt::Pole);
        }
    }
    if u.im < 0.0 {
        return ctan(-u).map(|t| -t);
    }
    if u.im > 20.0 {
        let w = (Complex64::new(-2.0 * u.im, 2.0 * u.re)).exp();
        let one = Complex64::new(1.0, 0.0);
        let q = cdiv(w - one, w + one)?;
        return Ok(Complex64::new(q.im, -q.re));
    }
    cdiv(u.sin(), u.cos())
}
