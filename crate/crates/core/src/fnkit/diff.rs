//! Symbolic differentiation.
//!
//! Rules are the textbook ones; the `build` constructors fold out additive
//! and multiplicative identities so the resulting trees stay close to what
//! one would write by hand. The quotient rule keeps its literal
//! `(u'v - uv') / v^2` shape — no cancellation is attempted, which preserves
//! pole semantics at zeros of `v`.

use super::build::{add, mul, neg, one, pow, scale, sub, zero};
use super::Expr;

pub fn differentiate(e: &Expr) -> Expr {
    match e {
        Expr::Z => one(),
        Expr::Const(_) => zero(),
        Expr::Neg(a) => neg(differentiate(a)),
        Expr::Add(a, b) => add(differentiate(a), differentiate(b)),
        Expr::Sub(a, b) => sub(differentiate(a), differentiate(b)),
        Expr::Mul(a, b) => add(
            mul(differentiate(a), (**b).clone()),
            mul((**a).clone(), differentiate(b)),
        ),
        Expr::Div(a, b) => Expr::Div(
            Box::new(sub(
                mul(differentiate(a), (**b).clone()),
                mul((**a).clone(), differentiate(b)),
            )),
            Box::new(pow((**b).clone(), 2)),
        ),
        Expr::Pow(a, n) => scale(
            f64::from(*n),
            mul(pow((**a).clone(), n - 1), differentiate(a)),
        ),
        Expr::Exp(a) => mul(Expr::Exp(a.clone()), differentiate(a)),
        Expr::Sin(a) => mul(Expr::Cos(a.clone()), differentiate(a)),
        Expr::Cos(a) => neg(mul(Expr::Sin(a.clone()), differentiate(a))),
        Expr::Tan(a) => mul(
            add(one(), pow(Expr::Tan(a.clone()), 2)),
            differentiate(a),
        ),
    }
}
