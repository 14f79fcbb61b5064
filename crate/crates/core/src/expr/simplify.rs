use num_traits::{CheckedAdd, CheckedMul, One, Signed, Zero};

use super::{Expr, Func};
use crate::rational::Rational;

pub(super) fn simplify(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Var(_) => e.clone(),
        Expr::Neg(a) => negate(simplify(a)),
        Expr::Add(terms) => sum(terms.iter().map(simplify)),
        Expr::Mul(factors) => product(factors.iter().map(simplify)),
        Expr::Pow(base, n) => power(simplify(base), *n),
        Expr::Apply(func, arg) => apply(*func, simplify(arg)),
    }
}

fn negate(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        other => Expr::neg(other),
    }
}

fn sum(terms: impl Iterator<Item = Expr>) -> Expr {
    let mut out = Vec::new();
    let mut constant = Rational::zero();
    let mut pending = terms.collect::<Vec<_>>();
    pending.reverse();
    while let Some(t) = pending.pop() {
        match t {
            Expr::Add(inner) => pending.extend(inner.into_iter().rev()),
            Expr::Const(c) => match constant.checked_add(&c) {
                Some(s) => constant = s,
                None => out.push(Expr::Const(c)),
            },
            other => out.push(other),
        }
    }
    if !constant.is_zero() {
        out.push(Expr::Const(constant));
    }
    match out.len() {
        0 => Expr::zero(),
        1 => out.pop().unwrap(),
        _ => Expr::Add(out),
    }
}

fn product(factors: impl Iterator<Item = Expr>) -> Expr {
    let mut coeff = Rational::one();
    let mut negative = false;
    let mut rest = Vec::new();
    let mut pending = factors.collect::<Vec<_>>();
    pending.reverse();
    while let Some(f) = pending.pop() {
        match f {
            Expr::Mul(inner) => pending.extend(inner.into_iter().rev()),
            Expr::Neg(inner) => {
                negative = !negative;
                pending.push(*inner);
            }
            Expr::Const(c) => match coeff.checked_mul(&c) {
                Some(p) => coeff = p,
                None => rest.push(Expr::Const(c)),
            },
            other => rest.push(other),
        }
    }
    if coeff.is_zero() {
        return Expr::zero();
    }
    if coeff.is_negative() {
        negative = !negative;
        coeff = -coeff;
    }
    let body = if rest.is_empty() {
        Expr::Const(coeff)
    } else if coeff.is_one() {
        if rest.len() == 1 {
            rest.pop().unwrap()
        } else {
            Expr::Mul(rest)
        }
    } else {
        rest.insert(0, Expr::Const(coeff));
        Expr::Mul(rest)
    };
    if negative {
        negate(body)
    } else {
        body
    }
}

pub(super) fn checked_powi(base: Rational, n: i32) -> Option<Rational> {
    if base.is_zero() && n < 0 {
        return None;
    }
    let b = if n < 0 { base.recip() } else { base };
    let mut acc = Rational::one();
    for _ in 0..n.unsigned_abs() {
        acc = acc.checked_mul(&b)?;
    }
    Some(acc)
}

fn power(base: Expr, n: i32) -> Expr {
    if n == 0 {
        return Expr::one();
    }
    if n == 1 {
        return base;
    }
    match base {
        Expr::Const(c) => match checked_powi(c, n) {
            Some(v) => Expr::Const(v),
            None => Expr::pow(Expr::Const(c), n),
        },
        Expr::Pow(inner, m) => match m.checked_mul(n) {
            Some(k) => power(*inner, k),
            None => Expr::pow(Expr::Pow(inner, m), n),
        },
        Expr::Neg(inner) => {
            let p = power(*inner, n);
            if n % 2 == 0 {
                p
            } else {
                negate(p)
            }
        }
        other => Expr::pow(other, n),
    }
}

fn apply(func: Func, arg: Expr) -> Expr {
    match (func, &arg) {
        (Func::Sin, Expr::Const(c)) if c.is_zero() => Expr::zero(),
        (Func::Cos, Expr::Const(c)) if c.is_zero() => Expr::one(),
        (Func::Ln, Expr::Const(c)) if c.is_one() => Expr::zero(),
        (Func::Sin, Expr::Neg(inner)) => negate(Expr::sin((**inner).clone())),
        (Func::Cos, Expr::Neg(inner)) => Expr::cos((**inner).clone()),
        _ => Expr::apply(func, arg),
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse, Expr};
    use crate::rational::ratio;

    fn s(text: &str) -> String {
        parse(text).unwrap().simplify().to_string()
    }

    #[test]
    fn folds_and_eliminates() {
        assert_eq!(s("0*x + y"), "y");
        assert_eq!(s("1*x*1"), "x");
        assert_eq!(s("2*x*3"), "6*x");
        assert_eq!(s("x*(-1)"), "-x");
        assert_eq!(s("1/2 + 1/3 + x"), "x + 5/6");
        assert_eq!(s("x^1 + y^0"), "x + 1");
        assert_eq!(s("(x^2)^3"), "x^6");
        assert_eq!(s("-(-x)"), "x");
        assert_eq!(s("sin(0) + cos(0)*x"), "x");
        assert_eq!(s("(2/3)^2"), "4/9");
        assert_eq!(s("x - x"), "x - x");
    }

    #[test]
    fn zero_to_negative_power_is_kept() {
        let e = parse("0^-1").unwrap().simplify();
        assert_eq!(e, Expr::pow(Expr::Const(ratio(0, 1)), -1));
        assert!(e.evaluate(1.0, 1.0).is_nan());
    }

    #[test]
    fn simplified_output_reparses_identically() {
        for text in ["x*(-2)*y + 3 - 1/2*x", "-(x*y)*(-1/3)", "sin(-x)*cos(-y)"] {
            let e = parse(text).unwrap().simplify();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{e}");
        }
    }
}
