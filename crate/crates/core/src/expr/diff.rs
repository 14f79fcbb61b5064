use super::{Expr, Func, Var};
use crate::rational::Rational;

/// Unsimplified derivative; callers simplify.
pub(super) fn derivative(e: &Expr, var: Var) -> Expr {
    match e {
        Expr::Const(_) => Expr::zero(),
        Expr::Var(v) => {
            if *v == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Add(terms) => Expr::Add(terms.iter().map(|t| derivative(t, var)).collect()),
        Expr::Mul(factors) => {
            // product rule over n factors
            let terms = (0..factors.len())
                .map(|i| {
                    let mut fs = factors.clone();
                    fs[i] = derivative(&factors[i], var);
                    Expr::Mul(fs)
                })
                .collect();
            Expr::Add(terms)
        }
        Expr::Neg(a) => Expr::neg(derivative(a, var)),
        Expr::Pow(base, n) => Expr::Mul(vec![
            Expr::Const(Rational::from_integer(i64::from(*n))),
            Expr::pow((**base).clone(), n - 1),
            derivative(base, var),
        ]),
        Expr::Apply(func, arg) => {
            let inner = derivative(arg, var);
            let outer = match func {
                Func::Sin => Expr::cos((**arg).clone()),
                Func::Cos => Expr::neg(Expr::sin((**arg).clone())),
                Func::Ln => Expr::pow((**arg).clone(), -1),
            };
            Expr::Mul(vec![outer, inner])
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse, Var};

    fn d(text: &str, var: Var) -> String {
        parse(text).unwrap().differentiate(var).to_string()
    }

    #[test]
    fn elementary_rules() {
        assert_eq!(d("1/2*x^2 + cos(y)", Var::Y), "-sin(y)");
        assert_eq!(d("y^3", Var::X), "0");
        assert_eq!(d("y^3", Var::Y), "3*y^2");
        assert_eq!(d("x^2*y", Var::X), "2*x*y");
        assert_eq!(d("sin(x)", Var::X), "cos(x)");
        assert_eq!(d("ln(x)", Var::X), "x^-1");
        assert_eq!(d("1/y", Var::Y), "-y^-2");
        assert_eq!(d("x", Var::X), "1");
    }

    #[test]
    fn chain_rule() {
        let e = parse("sin(x*y)").unwrap().differentiate(Var::X);
        for (x, y) in [(0.3, -1.2), (2.0, 0.5)] {
            let expect = y * f64::cos(x * y);
            assert!((e.evaluate(x, y) - expect).abs() < 1e-14);
        }
    }
}
