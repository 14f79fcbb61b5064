//! Canonical printing. Output is accepted by the parser and, for trees in
//! parser-normal form, parses back to the identical tree.

use std::fmt::{self, Write};

use num_traits::Signed;

use super::Expr;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    /// Body of a summand whose sign has already been written.
    Term,
    Factor { first: bool },
    Base,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, Ctx::Top)
    }
}

fn write_expr<W: Write>(out: &mut W, e: &Expr, ctx: Ctx) -> fmt::Result {
    match e {
        Expr::Const(c) => {
            let negative = c.is_negative();
            let fraction = *c.denom() != 1;
            let paren = match ctx {
                Ctx::Top => false,
                Ctx::Term => negative,
                Ctx::Factor { first } => negative || (fraction && !first),
                Ctx::Base => negative || fraction,
            };
            if paren {
                write!(out, "({c})")
            } else {
                write!(out, "{c}")
            }
        }
        Expr::Var(v) => out.write_str(v.name()),
        Expr::Add(terms) => {
            if ctx == Ctx::Top {
                write_sum(out, terms)
            } else {
                out.write_char('(')?;
                write_sum(out, terms)?;
                out.write_char(')')
            }
        }
        Expr::Neg(inner) => {
            if ctx == Ctx::Top {
                out.write_char('-')?;
                write_expr(out, inner, Ctx::Term)
            } else {
                out.write_str("(-")?;
                write_expr(out, inner, Ctx::Term)?;
                out.write_char(')')
            }
        }
        Expr::Mul(factors) => {
            let paren = matches!(ctx, Ctx::Factor { .. } | Ctx::Base);
            if paren {
                out.write_char('(')?;
            }
            for (i, fac) in factors.iter().enumerate() {
                if i > 0 {
                    out.write_char('*')?;
                }
                write_expr(out, fac, Ctx::Factor { first: i == 0 })?;
            }
            if paren {
                out.write_char(')')?;
            }
            Ok(())
        }
        Expr::Pow(base, n) => {
            let paren = ctx == Ctx::Base;
            if paren {
                out.write_char('(')?;
            }
            write_expr(out, base, Ctx::Base)?;
            write!(out, "^{n}")?;
            if paren {
                out.write_char(')')?;
            }
            Ok(())
        }
        Expr::Apply(func, arg) => {
            write!(out, "{}(", func.name())?;
            write_expr(out, arg, Ctx::Top)?;
            out.write_char(')')
        }
    }
}

fn write_sum<W: Write>(out: &mut W, terms: &[Expr]) -> fmt::Result {
    for (i, t) in terms.iter().enumerate() {
        let (negative, body): (bool, std::borrow::Cow<'_, Expr>) = match t {
            Expr::Neg(inner) => (true, std::borrow::Cow::Borrowed(inner.as_ref())),
            Expr::Const(c) if c.is_negative() => (true, std::borrow::Cow::Owned(Expr::Const(-c))),
            other => (false, std::borrow::Cow::Borrowed(other)),
        };
        match (i, negative) {
            (0, true) => out.write_char('-')?,
            (0, false) => {}
            (_, true) => out.write_str(" - ")?,
            (_, false) => out.write_str(" + ")?,
        }
        write_expr(out, &body, Ctx::Term)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    fn round_trip(s: &str) {
        let e = parse(s).unwrap();
        let printed = e.to_string();
        let again = parse(&printed).unwrap();
        assert_eq!(again, e, "{s} printed as {printed}");
    }

    #[test]
    fn prints_readably() {
        assert_eq!(parse("1/2*x^2 + cos(y)").unwrap().to_string(), "1/2*x^2 + cos(y)");
        assert_eq!(parse("x - y").unwrap().to_string(), "x - y");
        assert_eq!(parse("-x*y").unwrap().to_string(), "-x*y");
        assert_eq!(parse("y^-2").unwrap().to_string(), "y^-2");
        assert_eq!(parse("x - 1/2").unwrap().to_string(), "x - 1/2");
        assert_eq!(parse("x/3").unwrap().to_string(), "x*(1/3)");
    }

    #[test]
    fn round_trips() {
        for s in [
            "1/2*y^2 + 1/2*x^2",
            "x*y*(1 - x) + 1/y",
            "x*ln(x) + y*ln(y) - 1.1*x - 1.1*y - 0.1*x*y",
            "-(x + y)",
            "(x + y) + x",
            "x - (y - x)",
            "-1/2 + x",
            "(x^2)^3",
            "(1/2)^2*x",
            "(-2)^3",
            "x*(-3)",
            "sin(cos(x*y) - 1)",
            "-(-x)",
            "x*(y*x)",
            "2*3/4",
            "x/3",
            "-ln(x)^-2",
        ] {
            round_trip(s);
        }
    }
}
