//! Expression language for the maps under iteration.
//!
//! Grammar (whitespace free between tokens):
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' integer)?
//! base   := 'z' | number | 'i' | '(' expr ')' | func '(' expr ')'
//! func   := 'exp' | 'sin' | 'cos' | 'tan'
//! ```
//!
//! The optional leading minus is the only extension over the baseline sum /
//! product / power grammar; it makes `exp(-z)` writable. Serialisation emits
//! a string in the same grammar that reparses to a structurally identical
//! tree, so a parse → serialize → parse round trip is exact, including the
//! floating-point evaluation of every intermediate.

mod classify;
mod diff;
mod eval;
mod parse;

pub use classify::ClassifyError;
pub(crate) use classify::{has_pole_risk, omitted_value};
pub use parse::ParseError;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Expression tree. `Const` only ever holds a nonnegative real value or the
/// imaginary unit; every other constant is composed from those via `Neg`,
/// `Add` and `Mul`, which keeps serialisation structurally invertible.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Z,
    Const(Complex64),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Integer power of a base expression; the exponent may be negative.
    Pow(Box<Expr>, i32),
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Tan(Box<Expr>),
}

/// Result of one evaluation of a map at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum EvalOutcome {
    Finite { value: Complex64 },
    /// The point is (numerically) a pole: a division blew past the overflow
    /// cap, a denominator vanished, or the point is within tolerance of a
    /// known pole location.
    PoleHit,
    /// A non-division operation left the representable range.
    Overflow,
}

impl EvalOutcome {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            EvalOutcome::Finite { value } => Some(value),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, EvalOutcome::Finite { .. })
    }
}

/// Syntactic class of a map, decided from the expression tree alone.
///
/// * `Rational` — no transcendental node applied to a `z`-dependent argument;
/// * `EntireTranscendental` — transcendental, and no subterm can introduce a
///   pole (no `z`-dependent denominators, negative powers, or `tan`);
/// * `PoleOmitted` — of the form `a + h(z) / (z - a)^m` with `h` zero-free
///   and entire: one pole whose value `a` is omitted, so the backward orbit
///   of every other point is infinite;
/// * `Meromorphic` — everything else with genuine poles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FnClass {
    Rational,
    EntireTranscendental,
    PoleOmitted,
    Meromorphic,
}

/// A parsed map: expression tree, canonical source text, syntactic class,
/// hinted pole locations, and a lazily materialised symbolic derivative.
#[derive(Debug)]
pub struct MeroFn {
    ast: Expr,
    src: String,
    class: Result<FnClass, ClassifyError>,
    pole_hints: Vec<Complex64>,
    deriv: OnceLock<Box<MeroFn>>,
}

impl Clone for MeroFn {
    fn clone(&self) -> Self {
        MeroFn {
            ast: self.ast.clone(),
            src: self.src.clone(),
            class: self.class,
            pole_hints: self.pole_hints.clone(),
            deriv: OnceLock::new(),
        }
    }
}

impl PartialEq for MeroFn {
    fn eq(&self, other: &Self) -> bool {
        self.ast == other.ast
    }
}

impl MeroFn {
    /// Parse a map from source text.
    pub fn parse(text: &str) -> Result<MeroFn, ParseError> {
        parse::parse(text).map(MeroFn::from_expr)
    }

    /// Wrap an already-built expression tree.
    pub fn from_expr(ast: Expr) -> MeroFn {
        let src = parse::serialize(&ast);
        debug_assert_eq!(parse::parse(&src).as_ref(), Ok(&ast), "serialisation not invertible");
        let class = classify::classify(&ast);
        let pole_hints = classify::pole_hints(&ast);
        MeroFn { ast, src, class, pole_hints, deriv: OnceLock::new() }
    }

    /// Override the syntactic class (annotation for ambiguous trees).
    pub fn with_class(mut self, class: FnClass) -> MeroFn {
        self.class = Ok(class);
        self
    }

    pub fn fn_class(&self) -> Result<FnClass, ClassifyError> {
        self.class
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    /// Canonical source text; reparsing it reproduces the tree exactly.
    pub fn source(&self) -> &str {
        &self.src
    }

    pub fn pole_hints(&self) -> &[Complex64] {
        &self.pole_hints
    }

    /// Evaluate at `z`.
    pub fn eval(&self, z: Complex64) -> EvalOutcome {
        for &p in &self.pole_hints {
            if (z - p).norm() < crate::consts::POLE_TOL {
                return EvalOutcome::PoleHit;
            }
        }
        eval::eval(&self.ast, z)
    }

    /// The symbolic derivative, built on first use and cached.
    pub fn derivative(&self) -> &MeroFn {
        self.deriv.get_or_init(|| Box::new(MeroFn::from_expr(diff::differentiate(&self.ast))))
    }

    /// Evaluate the derivative at `z`.
    pub fn eval_deriv(&self, z: Complex64) -> EvalOutcome {
        self.derivative().eval(z)
    }
}

impl std::fmt::Display for MeroFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.src)
    }
}

impl Serialize for MeroFn {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.src)
    }
}

impl<'de> Deserialize<'de> for MeroFn {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        MeroFn::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Anything that can be iterated: evaluation plus first derivative.
///
/// Implemented by [`MeroFn`] and by the quadrature-backed Newton maps that
/// have no closed-form expression tree.
pub trait ComplexMap: Sync {
    fn apply(&self, z: Complex64) -> EvalOutcome;
    fn apply_deriv(&self, z: Complex64) -> EvalOutcome;
}

impl ComplexMap for MeroFn {
    fn apply(&self, z: Complex64) -> EvalOutcome {
        self.eval(z)
    }

    fn apply_deriv(&self, z: Complex64) -> EvalOutcome {
        self.eval_deriv(z)
    }
}

impl<M: ComplexMap + ?Sized> ComplexMap for &M {
    fn apply(&self, z: Complex64) -> EvalOutcome {
        (**self).apply(z)
    }

    fn apply_deriv(&self, z: Complex64) -> EvalOutcome {
        (**self).apply_deriv(z)
    }
}

// Expression constructors used by the symbolic derivative and by the modules
// that assemble maps (Newton setups, products for singular-point equations).
// They fold the identities of + and * so derivative trees stay compact, and
// they route every constant through `const_expr` to preserve the `Const`
// invariant stated on `Expr`.
pub(crate) mod build {
    use super::Expr;
    use num_complex::Complex64;

    pub fn is_zero(e: &Expr) -> bool {
        matches!(e, Expr::Const(c) if c.re == 0.0 && c.im == 0.0)
    }

    pub fn is_one(e: &Expr) -> bool {
        matches!(e, Expr::Const(c) if c.re == 1.0 && c.im == 0.0)
    }

    pub fn zero() -> Expr {
        Expr::Const(Complex64::new(0.0, 0.0))
    }

    pub fn one() -> Expr {
        Expr::Const(Complex64::new(1.0, 0.0))
    }

    /// Any complex constant as a tree honouring the `Const` invariant.
    pub fn const_expr(c: Complex64) -> Expr {
        let re = |x: f64| Expr::Const(Complex64::new(x, 0.0));
        let unit_i = Expr::Const(Complex64::new(0.0, 1.0));
        let im_part = |y: f64| {
            if y == 1.0 {
                unit_i.clone()
            } else {
                Expr::Mul(Box::new(re(y)), Box::new(unit_i.clone()))
            }
        };
        match (c.re, c.im) {
            (x, y) if y == 0.0 => {
                if x < 0.0 {
                    neg(re(-x))
                } else {
                    re(x)
                }
            }
            (x, y) if x == 0.0 => {
                if y < 0.0 {
                    neg(im_part(-y))
                } else {
                    im_part(y)
                }
            }
            (x, y) if y < 0.0 => Expr::Sub(Box::new(const_expr(Complex64::new(x, 0.0))), Box::new(im_part(-y))),
            (x, y) => Expr::Add(Box::new(const_expr(Complex64::new(x, 0.0))), Box::new(im_part(y))),
        }
    }

    pub fn neg(e: Expr) -> Expr {
        if is_zero(&e) {
            e
        } else {
            Expr::Neg(Box::new(e))
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        if is_zero(&a) {
            b
        } else if is_zero(&b) {
            a
        } else {
            Expr::Add(Box::new(a), Box::new(b))
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if is_zero(&b) {
            a
        } else if is_zero(&a) {
            neg(b)
        } else {
            Expr::Sub(Box::new(a), Box::new(b))
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if is_zero(&a) || is_zero(&b) {
            zero()
        } else if is_one(&a) {
            b
        } else if is_one(&b) {
            a
        } else {
            Expr::Mul(Box::new(a), Box::new(b))
        }
    }

    /// `k * e` with real `k`, folding `0`, `±1`, and negative signs.
    pub fn scale(k: f64, e: Expr) -> Expr {
        if k == 0.0 || is_zero(&e) {
            zero()
        } else if k < 0.0 {
            neg(scale(-k, e))
        } else if k == 1.0 {
            e
        } else {
            Expr::Mul(Box::new(Expr::Const(Complex64::new(k, 0.0))), Box::new(e))
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if is_one(&b) {
            a
        } else {
            Expr::Div(Box::new(a), Box::new(b))
        }
    }

    pub fn pow(e: Expr, n: i32) -> Expr {
        match n {
            0 => one(),
            1 => e,
            _ => Expr::Pow(Box::new(e), n),
        }
    }
}
