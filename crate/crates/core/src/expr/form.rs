//! Linear combinations of Laurent monomials `x^h y^k`, optionally multiplied
//! by one of `sin`, `cos`, `ln` applied to a bare variable.
//!
//! Every corpus Hamiltonian, its partial derivatives, and the demo systems'
//! fields fall in this class, which gives them a unique printed form.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{CheckedAdd, CheckedMul, One, Signed, Zero};

use super::simplify::checked_powi;
use super::{Expr, Func, Var};
use crate::rational::Rational;

const MAX_TERMS: usize = 4096;
const MAX_EXPANDED_POWER: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TermKey {
    pub func: Option<(Func, Var)>,
    pub h: i32,
    pub k: i32,
}

impl TermKey {
    pub const ONE: TermKey = TermKey {
        func: None,
        h: 0,
        k: 0,
    };

    pub fn monomial(h: i32, k: i32) -> Self {
        TermKey { func: None, h, k }
    }

    fn sort_key(&self) -> (u8, bool, i32, i32) {
        let func_rank = match self.func {
            None => 0,
            Some((Func::Sin, Var::X)) => 1,
            Some((Func::Sin, Var::Y)) => 2,
            Some((Func::Cos, Var::X)) => 3,
            Some((Func::Cos, Var::Y)) => 4,
            Some((Func::Ln, Var::X)) => 5,
            Some((Func::Ln, Var::Y)) => 6,
        };
        let laurent = self.h < 0 || self.k < 0;
        (func_rank, laurent, self.h + self.k, -self.h)
    }

    fn to_expr(self) -> Vec<Expr> {
        let mut factors = Vec::new();
        for (var, n) in [(Var::X, self.h), (Var::Y, self.k)] {
            match n {
                0 => {}
                1 => factors.push(Expr::Var(var)),
                n => factors.push(Expr::pow(Expr::Var(var), n)),
            }
        }
        if let Some((func, var)) = self.func {
            factors.push(Expr::apply(func, Expr::Var(var)));
        }
        factors
    }

    fn times(&self, other: &TermKey) -> Option<TermKey> {
        let func = match (self.func, other.func) {
            (Some(_), Some(_)) => return None,
            (f, None) | (None, f) => f,
        };
        Some(TermKey {
            func,
            h: self.h.checked_add(other.h)?,
            k: self.k.checked_add(other.k)?,
        })
    }
}

impl Ord for TermKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for TermKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse map from term to nonzero exact coefficient, kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearForm {
    terms: BTreeMap<TermKey, Rational>,
}

impl LinearForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(key: TermKey, coeff: Rational) -> Self {
        let mut f = Self::zero();
        if !coeff.is_zero() {
            f.terms.insert(key, coeff);
        }
        f
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &Rational)> {
        self.terms.iter()
    }

    /// `None` when `e` leaves the class (products of transcendental factors,
    /// functions of compound arguments, negative powers of sums, overflow).
    pub fn from_expr(e: &Expr) -> Option<Self> {
        match e {
            Expr::Const(c) => Some(Self::term(TermKey::ONE, *c)),
            Expr::Var(Var::X) => Some(Self::term(TermKey::monomial(1, 0), Rational::one())),
            Expr::Var(Var::Y) => Some(Self::term(TermKey::monomial(0, 1), Rational::one())),
            Expr::Add(ts) => {
                let mut acc = Self::zero();
                for t in ts {
                    acc = acc.add(&Self::from_expr(t)?)?;
                }
                Some(acc)
            }
            Expr::Mul(fs) => {
                let mut acc = Self::term(TermKey::ONE, Rational::one());
                for f in fs {
                    acc = acc.mul(&Self::from_expr(f)?)?;
                }
                Some(acc)
            }
            Expr::Neg(a) => Some(Self::from_expr(a)?.negate()),
            Expr::Pow(b, n) => {
                let base = Self::from_expr(b)?;
                let mut it = base.terms.iter();
                if let (Some((key, coeff)), None) = (it.next(), it.next()) {
                    if key.func.is_none() {
                        let c = checked_powi(*coeff, *n)?;
                        let key =
                            TermKey::monomial(key.h.checked_mul(*n)?, key.k.checked_mul(*n)?);
                        return Some(Self::term(key, c));
                    }
                }
                if *n < 0 || *n > MAX_EXPANDED_POWER {
                    return None;
                }
                let mut acc = Self::term(TermKey::ONE, Rational::one());
                for _ in 0..*n {
                    acc = acc.mul(&base)?;
                }
                Some(acc)
            }
            Expr::Apply(func, arg) => {
                let inner = Self::from_expr(arg)?;
                let mut it = inner.terms.iter();
                let (key, coeff) = it.next()?;
                if it.next().is_some() || !coeff.is_one() || key.func.is_some() {
                    return None;
                }
                let var = match (key.h, key.k) {
                    (1, 0) => Var::X,
                    (0, 1) => Var::Y,
                    _ => return None,
                };
                Some(Self::term(
                    TermKey {
                        func: Some((*func, var)),
                        h: 0,
                        k: 0,
                    },
                    Rational::one(),
                ))
            }
        }
    }

    pub fn add(&self, other: &Self) -> Option<Self> {
        let mut out = self.clone();
        for (key, c) in &other.terms {
            out.accumulate(*key, *c)?;
        }
        Some(out)
    }

    pub fn negate(&self) -> Self {
        LinearForm {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn scale(&self, s: Rational) -> Option<Self> {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            out.accumulate(*k, c.checked_mul(&s)?)?;
        }
        Some(out)
    }

    pub fn mul(&self, other: &Self) -> Option<Self> {
        let mut out = Self::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                out.accumulate(k1.times(k2)?, c1.checked_mul(c2)?)?;
            }
        }
        Some(out)
    }

    fn accumulate(&mut self, key: TermKey, c: Rational) -> Option<()> {
        let slot = self.terms.entry(key).or_insert_with(Rational::zero);
        *slot = slot.checked_add(&c)?;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
        if self.terms.len() > MAX_TERMS {
            return None;
        }
        Some(())
    }

    pub fn to_expr(&self) -> Expr {
        let mut terms: Vec<Expr> = self
            .terms
            .iter()
            .map(|(key, c)| signed_term(*c, key.to_expr()))
            .collect();
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr::Add(terms),
        }
    }
}

/// `c * f1 * f2 * ...` in the shape the simplifier produces: positive
/// coefficient first, sign pulled out as a negation, unit coefficient elided.
pub(super) fn signed_term(c: Rational, mut factors: Vec<Expr>) -> Expr {
    if factors.is_empty() {
        return Expr::Const(c);
    }
    let magnitude = c.abs();
    let body = if magnitude.is_one() {
        if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Mul(factors)
        }
    } else {
        factors.insert(0, Expr::Const(magnitude));
        Expr::Mul(factors)
    };
    if c.is_negative() {
        Expr::neg(body)
    } else {
        body
    }
}

impl std::fmt::Display for LinearForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn form(text: &str) -> Option<LinearForm> {
        LinearForm::from_expr(&parse(text).unwrap())
    }

    #[test]
    fn expands_products() {
        let f = form("x*y*(1 - x) + 1/y").unwrap();
        assert_eq!(f.to_string(), "x*y - x^2*y + y^-1");
        assert_eq!(form("(x + y)^2").unwrap().to_string(), "x^2 + 2*x*y + y^2");
        assert_eq!(form("1/2*(y^2 + x^2)").unwrap().to_string(), "1/2*x^2 + 1/2*y^2");
    }

    #[test]
    fn canonical_order() {
        assert_eq!(
            form("cos(y) + sin(x) + ln(x) + y^3 + 2 + x + x*y^-1").unwrap().to_string(),
            "2 + x + y^3 + x*y^-1 + sin(x) + cos(y) + ln(x)"
        );
    }

    #[test]
    fn outside_the_class() {
        assert!(form("sin(x)*cos(y)").is_none());
        assert!(form("sin(2*x)").is_none());
        assert!(form("(x + y)^-1").is_none());
        assert!(form("ln(x)^2").is_none());
        assert!(form("(x + y)^100").is_none());
        assert_eq!(form("(2*x)^10").unwrap().to_string(), "1024*x^10");
    }

    #[test]
    fn cancellation_gives_zero() {
        assert!(form("x - x").unwrap().is_zero());
        assert_eq!(form("x - x").unwrap().to_expr(), Expr::zero());
    }
}
