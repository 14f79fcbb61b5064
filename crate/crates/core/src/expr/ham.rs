use std::cmp::Ordering;
use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use super::form::{signed_term, LinearForm, TermKey};
use super::{parse, Expr, Func, ParseError, Var};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HamError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("expression is not a linear combination of monomials and sin/cos terms")]
    NotLinear,
    #[error("term {0} is not a basis shape")]
    ForeignTerm(String),
    #[error("constant term {0} is not allowed")]
    ConstantTerm(String),
    #[error("constant function is not a Hamiltonian")]
    Constant,
    #[error("shape {0} appears more than once")]
    DuplicateShape(String),
    #[error("zero coefficient on shape {0}")]
    ZeroCoefficient(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrigFn {
    Sin,
    Cos,
}

/// A basis element without its coefficient: `x^h y^k` (`h + k >= 1`) or
/// `sin`/`cos` of one variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TermShape {
    Monomial { h: u32, k: u32 },
    Trig { func: TrigFn, var: Var },
}

impl TermShape {
    pub const TRIG: [TermShape; 4] = [
        TermShape::Trig {
            func: TrigFn::Sin,
            var: Var::X,
        },
        TermShape::Trig {
            func: TrigFn::Sin,
            var: Var::Y,
        },
        TermShape::Trig {
            func: TrigFn::Cos,
            var: Var::X,
        },
        TermShape::Trig {
            func: TrigFn::Cos,
            var: Var::Y,
        },
    ];

    /// All monomial shapes with `1 <= h + k <= max_degree`, in canonical order.
    pub fn monomials(max_degree: u32) -> Vec<TermShape> {
        (1..=max_degree)
            .flat_map(|d| (0..=d).rev().map(move |h| TermShape::Monomial { h, k: d - h }))
            .collect()
    }

    fn sort_key(&self) -> (u8, u32, u32) {
        match *self {
            TermShape::Monomial { h, k } => (0, h + k, u32::MAX - h),
            TermShape::Trig { func, var } => {
                let rank = match (func, var) {
                    (TrigFn::Sin, Var::X) => 0,
                    (TrigFn::Sin, Var::Y) => 1,
                    (TrigFn::Cos, Var::X) => 2,
                    (TrigFn::Cos, Var::Y) => 3,
                };
                (1, rank, 0)
            }
        }
    }

    pub fn factors(&self) -> Vec<Expr> {
        match *self {
            TermShape::Monomial { h, k } => {
                let mut fs = Vec::new();
                for (var, n) in [(Var::X, h), (Var::Y, k)] {
                    match n {
                        0 => {}
                        1 => fs.push(Expr::Var(var)),
                        n => fs.push(Expr::pow(Expr::Var(var), n as i32)),
                    }
                }
                fs
            }
            TermShape::Trig { func, var } => {
                let f = match func {
                    TrigFn::Sin => Func::Sin,
                    TrigFn::Cos => Func::Cos,
                };
                vec![Expr::apply(f, Expr::Var(var))]
            }
        }
    }

    pub fn to_expr(&self) -> Expr {
        let mut fs = self.factors();
        if fs.len() == 1 {
            fs.pop().unwrap()
        } else {
            Expr::Mul(fs)
        }
    }

    fn from_key(key: &TermKey) -> Option<TermShape> {
        match key.func {
            None if key.h >= 0 && key.k >= 0 && key.h + key.k >= 1 => Some(TermShape::Monomial {
                h: key.h as u32,
                k: key.k as u32,
            }),
            Some((func, var)) if key.h == 0 && key.k == 0 => {
                let func = match func {
                    Func::Sin => TrigFn::Sin,
                    Func::Cos => TrigFn::Cos,
                    Func::Ln => return None,
                };
                Some(TermShape::Trig { func, var })
            }
            _ => None,
        }
    }

    pub fn degree(&self) -> Option<u32> {
        match self {
            TermShape::Monomial { h, k } => Some(h + k),
            TermShape::Trig { .. } => None,
        }
    }
}

impl Ord for TermShape {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for TermShape {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TermShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

impl std::str::FromStr for TermShape {
    type Err = HamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let ham = HamFunction::parse(s)?;
        match ham.terms() {
            [(c, shape)] if *c == Rational::from_integer(1) => Ok(*shape),
            _ => Err(HamError::ForeignTerm(s.to_string())),
        }
    }
}

/// A nonconstant linear combination of distinct basis shapes with nonzero
/// exact coefficients, stored in canonical shape order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HamFunction {
    terms: Vec<(Rational, TermShape)>,
}

impl HamFunction {
    pub fn new(mut terms: Vec<(Rational, TermShape)>) -> Result<Self, HamError> {
        if terms.is_empty() {
            return Err(HamError::Constant);
        }
        terms.sort_by_key(|t| t.1);
        for w in terms.windows(2) {
            if w[0].1 == w[1].1 {
                return Err(HamError::DuplicateShape(w[0].1.to_string()));
            }
        }
        if let Some((_, s)) = terms.iter().find(|(c, _)| c.is_zero()) {
            return Err(HamError::ZeroCoefficient(s.to_string()));
        }
        Ok(HamFunction { terms })
    }

    pub fn parse(text: &str) -> Result<Self, HamError> {
        Self::from_expr(&parse(text)?)
    }

    pub fn from_expr(e: &Expr) -> Result<Self, HamError> {
        let form = LinearForm::from_expr(e).ok_or(HamError::NotLinear)?;
        let mut terms = Vec::with_capacity(form.len());
        for (key, c) in form.iter() {
            if *key == TermKey::ONE {
                return Err(HamError::ConstantTerm(c.to_string()));
            }
            let shape = TermShape::from_key(key)
                .ok_or_else(|| HamError::ForeignTerm(LinearForm::term(*key, *c).to_string()))?;
            terms.push((*c, shape));
        }
        Self::new(terms)
    }

    pub fn terms(&self) -> &[(Rational, TermShape)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coefficient(&self, shape: &TermShape) -> Option<Rational> {
        self.terms
            .binary_search_by(|(_, s)| s.cmp(shape))
            .ok()
            .map(|i| self.terms[i].0)
    }

    pub fn to_expr(&self) -> Expr {
        let mut ts: Vec<Expr> = self
            .terms
            .iter()
            .map(|(c, s)| signed_term(*c, s.factors()))
            .collect();
        if ts.len() == 1 {
            ts.pop().unwrap()
        } else {
            Expr::Add(ts)
        }
    }

    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        self.to_expr().evaluate(x, y)
    }
}

impl fmt::Display for HamFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

impl std::str::FromStr for HamFunction {
    type Err = HamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        HamFunction::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn mono(h: u32, k: u32) -> TermShape {
        TermShape::Monomial { h, k }
    }

    #[test]
    fn parses_harmonic_oscillator() {
        let f = HamFunction::parse("1/2*y^2 + 1/2*x^2").unwrap();
        assert_eq!(f.terms(), &[(ratio(1, 2), mono(2, 0)), (ratio(1, 2), mono(0, 2))]);
        assert_eq!(f.to_string(), "1/2*x^2 + 1/2*y^2");
    }

    #[test]
    fn prints_negative_trig() {
        let f = HamFunction::new(vec![(int(-1), TermShape::TRIG[1])]).unwrap();
        assert_eq!(f.to_string(), "-sin(y)");
    }

    #[test]
    fn rejects_constants_and_foreign_terms() {
        assert_eq!(HamFunction::parse("0"), Err(HamError::Constant));
        assert_eq!(HamFunction::parse("x - x"), Err(HamError::Constant));
        assert!(matches!(HamFunction::parse("x + 1"), Err(HamError::ConstantTerm(_))));
        assert!(matches!(HamFunction::parse("1/y"), Err(HamError::ForeignTerm(t)) if t == "y^-1"));
        assert!(matches!(HamFunction::parse("ln(x)"), Err(HamError::ForeignTerm(_))));
        assert_eq!(HamFunction::parse("sin(x)*cos(x)"), Err(HamError::NotLinear));
        assert!(matches!(HamFunction::parse("x +"), Err(HamError::Parse(_))));
    }

    #[test]
    fn constructor_validates() {
        assert!(matches!(
            HamFunction::new(vec![(int(1), mono(1, 0)), (int(2), mono(1, 0))]),
            Err(HamError::DuplicateShape(_))
        ));
        assert!(matches!(
            HamFunction::new(vec![(int(0), mono(1, 0))]),
            Err(HamError::ZeroCoefficient(_))
        ));
        let f = HamFunction::new(vec![(int(1), TermShape::TRIG[3]), (int(-1), mono(1, 1))]).unwrap();
        assert_eq!(f.to_string(), "-x*y + cos(y)");
    }

    #[test]
    fn monomial_order() {
        let shapes: Vec<String> = TermShape::monomials(3).iter().map(|s| s.to_string()).collect();
        assert_eq!(shapes, ["x", "y", "x^2", "x*y", "y^2", "x^3", "x^2*y", "x*y^2", "y^3"]);
        assert!(TermShape::monomials(5).iter().all(|s| *s < TermShape::TRIG[0]));
    }

    #[test]
    fn shape_from_str() {
        assert_eq!("x*y^2".parse::<TermShape>().unwrap(), mono(1, 2));
        assert_eq!("cos(x)".parse::<TermShape>().unwrap(), TermShape::TRIG[2]);
        assert!("2*x".parse::<TermShape>().is_err());
    }
}
