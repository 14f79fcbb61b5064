//! Symbolic expressions in the plane variables `x` and `y`.
//!
//! [`Expr`] is a general tree used for demo systems and vector-field
//! components. [`HamFunction`] is the restricted, canonical form that every
//! corpus member takes: a nonzero linear combination of monomials and
//! `sin`/`cos` of a single variable.

mod diff;
mod eval;
mod form;
mod ham;
mod parse;
mod print;
mod simplify;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use eval::Compiled;
pub use form::{LinearForm, TermKey};
pub use ham::{HamError, HamFunction, TermShape, TrigFn};
pub use parse::{parse, parse_with_constants, ParseError};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    X,
    Y,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Ln,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Ln => "ln",
        }
    }
}

/// Expression tree. Sums and products are n-ary; subtraction is `Add` of a
/// `Neg`, division is multiplication by a negative power.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Rational),
    Var(Var),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i32),
    Apply(Func, Box<Expr>),
}

impl Expr {
    pub fn zero() -> Self {
        Expr::Const(Rational::from_integer(0))
    }

    pub fn one() -> Self {
        Expr::Const(Rational::from_integer(1))
    }

    pub fn constant(c: Rational) -> Self {
        Expr::Const(c)
    }

    pub fn var(v: Var) -> Self {
        Expr::Var(v)
    }

    pub fn x() -> Self {
        Expr::Var(Var::X)
    }

    pub fn y() -> Self {
        Expr::Var(Var::Y)
    }

    pub fn neg(e: Expr) -> Self {
        Expr::Neg(Box::new(e))
    }

    pub fn pow(base: Expr, exp: i32) -> Self {
        Expr::Pow(Box::new(base), exp)
    }

    pub fn apply(func: Func, arg: Expr) -> Self {
        Expr::Apply(func, Box::new(arg))
    }

    pub fn sin(arg: Expr) -> Self {
        Expr::apply(Func::Sin, arg)
    }

    pub fn cos(arg: Expr) -> Self {
        Expr::apply(Func::Cos, arg)
    }

    pub fn ln(arg: Expr) -> Self {
        Expr::apply(Func::Ln, arg)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c.numer() == 0)
    }

    /// Exact partial derivative, shallowly simplified.
    pub fn differentiate(&self, var: Var) -> Expr {
        diff::derivative(self, var).simplify()
    }

    /// Constant folding, flattening, and zero/one elimination.
    pub fn simplify(&self) -> Expr {
        simplify::simplify(self)
    }

    /// IEEE evaluation; any non-finite result is reported as NaN.
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        let v = eval::eval(self, x, y);
        if v.is_finite() {
            v
        } else {
            f64::NAN
        }
    }

    pub fn compile(&self) -> Compiled {
        Compiled::new(self)
    }

    /// Canonical normal form when the expression is a linear combination of
    /// Laurent monomials, optionally times one of `sin`, `cos`, `ln` of a
    /// variable; otherwise the shallow simplification.
    pub fn tidy(&self) -> Expr {
        match LinearForm::from_expr(self) {
            Some(form) => form.to_expr(),
            None => self.simplify(),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Add(xs) | Expr::Mul(xs) => 1 + xs.iter().map(Expr::size).sum::<usize>(),
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Apply(_, e) => 1 + e.size(),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
