//! Syntactic class detection and pole hints.
//!
//! The classifier is deliberately conservative: it only claims a class when
//! the expression tree proves it. Quotients whose denominator is not a
//! recognisable monomial in `z - a` (so pole locations cannot be read off),
//! and shifted-pole forms whose shift does not match the pole, come back as
//! ambiguous and must be annotated by the caller.

use super::Expr;
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("class not decidable from the expression tree; annotate explicitly")]
    Ambiguous,
}

use super::FnClass;

pub fn classify(e: &Expr) -> Result<FnClass, ClassifyError> {
    if !has_transcendental_z(e) {
        return Ok(FnClass::Rational);
    }
    if !pole_risk(e) {
        return Ok(FnClass::EntireTranscendental);
    }
    if let Some(shape) = quotient_shape(e) {
        return if shape.numerator_omits_pole_value {
            Ok(FnClass::PoleOmitted)
        } else {
            // A single monomial pole, but nothing proves its value is
            // omitted there; factorisations like exp(z)/(z-a) with a != 0
            // genuinely take the value a elsewhere or not depending on a.
            Err(ClassifyError::Ambiguous)
        };
    }
    if has_opaque_denominator(e) {
        return Err(ClassifyError::Ambiguous);
    }
    Ok(FnClass::Meromorphic)
}

/// Locations of syntactically visible poles: monomial denominators and
/// negative powers of monomials.
pub fn pole_hints(e: &Expr) -> Vec<Complex64> {
    let mut out = Vec::new();
    collect_hints(e, &mut out);
    out.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    out.dedup_by(|a, b| (*a - *b).norm() < crate::consts::DEDUP_TOL);
    out
}

fn collect_hints(e: &Expr, out: &mut Vec<Complex64>) {
    match e {
        Expr::Div(a, b) => {
            collect_hints(a, out);
            collect_hints(b, out);
            if let Some((shift, _)) = monomial_shift(b) {
                out.push(shift);
            }
        }
        Expr::Pow(a, n) => {
            collect_hints(a, out);
            if *n < 0 {
                if let Some((shift, _)) = monomial_shift(a) {
                    out.push(shift);
                }
            }
        }
        Expr::Neg(a) | Expr::Exp(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Tan(a) => {
            collect_hints(a, out)
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            collect_hints(a, out);
            collect_hints(b, out);
        }
        Expr::Z | Expr::Const(_) => {}
    }
}

fn has_z(e: &Expr) -> bool {
    match e {
        Expr::Z => true,
        Expr::Const(_) => false,
        Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Sin(a) | Expr::Cos(a)
        | Expr::Tan(a) => has_z(a),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            has_z(a) || has_z(b)
        }
    }
}

fn has_transcendental_z(e: &Expr) -> bool {
    match e {
        Expr::Z | Expr::Const(_) => false,
        Expr::Exp(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Tan(a) => {
            has_z(a) || has_transcendental_z(a)
        }
        Expr::Neg(a) | Expr::Pow(a, _) => has_transcendental_z(a),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
            has_transcendental_z(a) || has_transcendental_z(b)
        }
    }
}

/// True when the subtree provably never evaluates to zero: nonzero
/// constants, exponentials, and products / quotients / powers / negations
/// of such.
fn zero_free(e: &Expr) -> bool {
    match e {
        Expr::Const(c) => c.re != 0.0 || c.im != 0.0,
        Expr::Exp(_) => true,
        Expr::Neg(a) => zero_free(a),
        Expr::Mul(a, b) | Expr::Div(a, b) => zero_free(a) && zero_free(b),
        Expr::Pow(a, _) => zero_free(a),
        _ => false,
    }
}

/// True when some subterm can have a pole: a denominator or negative-power
/// base that is not provably zero free, or a tangent of a `z`-dependent
/// argument.
fn pole_risk(e: &Expr) -> bool {
    match e {
        Expr::Z | Expr::Const(_) => false,
        Expr::Neg(a) | Expr::Exp(a) | Expr::Sin(a) | Expr::Cos(a) => pole_risk(a),
        Expr::Tan(a) => pole_risk(a) || has_z(a),
        Expr::Pow(a, n) => pole_risk(a) || (*n < 0 && !zero_free(a)),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => pole_risk(a) || pole_risk(b),
        Expr::Div(a, b) => pole_risk(a) || pole_risk(b) || !zero_free(b),
    }
}

fn const_value(e: &Expr) -> Option<Complex64> {
    match e {
        Expr::Const(c) => Some(*c),
        Expr::Neg(a) => const_value(a).map(|c| -c),
        Expr::Add(a, b) => Some(const_value(a)? + const_value(b)?),
        Expr::Sub(a, b) => Some(const_value(a)? - const_value(b)?),
        Expr::Mul(a, b) => Some(const_value(a)? * const_value(b)?),
        _ => None,
    }
}

/// `(z - a)^m` up to a nonzero constant factor: returns `(a, m)`.
fn monomial_shift(e: &Expr) -> Option<(Complex64, i32)> {
    match e {
        Expr::Z => Some((Complex64::new(0.0, 0.0), 1)),
        Expr::Sub(a, b) => match (&**a, const_value(b)) {
            (Expr::Z, Some(c)) => Some((c, 1)),
            _ => None,
        },
        Expr::Add(a, b) => match (&**a, const_value(b)) {
            (Expr::Z, Some(c)) => Some((-c, 1)),
            _ => None,
        },
        Expr::Pow(a, m) if *m >= 1 => monomial_shift(a).filter(|(_, k)| *k == 1).map(|(c, _)| (c, *m)),
        Expr::Mul(a, b) => {
            if const_value(a).is_some_and(|c| c.norm() > 0.0) {
                monomial_shift(b)
            } else if const_value(b).is_some_and(|c| c.norm() > 0.0) {
                monomial_shift(a)
            } else {
                None
            }
        }
        Expr::Neg(a) => monomial_shift(a),
        _ => None,
    }
}

struct QuotientShape {
    numerator_omits_pole_value: bool,
}

/// Splits an optional additive constant off the top of the tree.
fn split_shift(e: &Expr) -> (Complex64, &Expr) {
    let zero = Complex64::new(0.0, 0.0);
    match e {
        Expr::Add(a, b) => {
            if let Some(c) = const_value(a) {
                (c, &**b)
            } else if let Some(c) = const_value(b) {
                (c, &**a)
            } else {
                (zero, e)
            }
        }
        Expr::Sub(a, b) => match const_value(b) {
            Some(c) => (-c, &**a),
            None => (zero, e),
        },
        _ => (zero, e),
    }
}

/// Matches `shift + N(z) / (z - a)^m` (shift optional) where `N` is entire
/// in the grammar sense, zero free, and transcendental. When the additive
/// shift equals the pole location `a`, the map omits the value `a`, which is
/// the shape with a single pole that is also an omitted value.
fn quotient_shape(e: &Expr) -> Option<QuotientShape> {
    let (shift, body) = split_shift(e);
    let (num, den) = match body {
        Expr::Div(num, den) => (&**num, &**den),
        _ => return None,
    };
    if !(zero_free(num) && !pole_risk(num) && has_transcendental_z(num)) {
        return None;
    }
    let (pole, _m) = monomial_shift(den)?;
    Some(QuotientShape { numerator_omits_pole_value: (pole - shift).norm() == 0.0 })
}

/// Whether any subterm can have a pole (crate-facing wrapper).
pub(crate) fn has_pole_risk(e: &Expr) -> bool {
    pole_risk(e)
}

/// The omitted value of the map, when one is syntactically certain:
/// `shift + R(z)` omits `shift` when `R` is provably zero free, and so does
/// `shift + N(z)/D(z)` with a zero-free numerator (the quotient vanishes
/// nowhere on the finite plane).
pub(crate) fn omitted_value(e: &Expr) -> Option<Complex64> {
    let (shift, rest) = split_shift(e);
    let rest_zero_free = match rest {
        // a pole-free denominator cannot turn the quotient into 0
        Expr::Div(num, den) => zero_free(num) && !pole_risk(den),
        other => zero_free(other),
    };
    rest_zero_free.then_some(shift)
}

/// A `z`-dependent denominator (or negative-power base) that is neither zero
/// free nor a recognisable monomial, so its zero set is opaque to the
/// classifier.
fn has_opaque_denominator(e: &Expr) -> bool {
    match e {
        Expr::Z | Expr::Const(_) => false,
        Expr::Neg(a) | Expr::Exp(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Tan(a) => {
            has_opaque_denominator(a)
        }
        Expr::Pow(a, n) => {
            has_opaque_denominator(a)
                || (*n < 0 && has_z(a) && !zero_free(a) && monomial_shift(a).is_none())
        }
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            has_opaque_denominator(a) || has_opaque_denominator(b)
        }
        Expr::Div(a, b) => {
            has_opaque_denominator(a)
                || has_opaque_denominator(b)
                || (has_z(b) && !zero_free(b) && monomial_shift(b).is_none() && !is_tan_quotient_safe(b))
        }
    }
}

/// `sin`/`cos`/`tan` denominators have well-understood zero lattices; treat
/// them as transparent so maps like `0.5*tan(z)` (written as quotients
/// internally) or `1/sin(z)` classify as meromorphic rather than ambiguous.
fn is_tan_quotient_safe(e: &Expr) -> bool {
    match e {
        Expr::Sin(a) | Expr::Cos(a) | Expr::Tan(a) => !has_transcendental_z(&**a) && has_z(a),
        Expr::Neg(a) => is_tan_quotient_safe(a),
        Expr::Mul(a, b) => {
            (const_value(a).is_some() && is_tan_quotient_safe(b))
                || (const_value(b).is_some() && is_tan_quotient_safe(a))
        }
        _ => false,
    }
}
