//! Numerical evaluation. The tree walker and the compiled stack program
//! perform the same floating-point operations in the same order, so they
//! agree bit for bit.

use super::{Expr, Func, Var};
use crate::rational;

/// Integer power by binary exponentiation. A zero base with a negative
/// exponent is a domain error and yields NaN.
pub(crate) fn powi(base: f64, n: i32) -> f64 {
    if n < 0 && base == 0.0 {
        return f64::NAN;
    }
    let mut e = n.unsigned_abs();
    let mut b = base;
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    if n < 0 {
        1.0 / acc
    } else {
        acc
    }
}

fn ln(v: f64) -> f64 {
    if v > 0.0 {
        v.ln()
    } else {
        f64::NAN
    }
}

pub(super) fn eval(e: &Expr, x: f64, y: f64) -> f64 {
    match e {
        Expr::Const(c) => rational::to_f64(c),
        Expr::Var(Var::X) => x,
        Expr::Var(Var::Y) => y,
        Expr::Add(terms) => {
            let mut acc = eval(&terms[0], x, y);
            for t in &terms[1..] {
                acc += eval(t, x, y);
            }
            acc
        }
        Expr::Mul(factors) => {
            let mut acc = eval(&factors[0], x, y);
            for f in &factors[1..] {
                acc *= eval(f, x, y);
            }
            acc
        }
        Expr::Neg(a) => -eval(a, x, y),
        Expr::Pow(b, n) => powi(eval(b, x, y), *n),
        Expr::Apply(func, a) => {
            let v = eval(a, x, y);
            match func {
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
                Func::Ln => ln(v),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Const(f64),
    X,
    Y,
    Add(u32),
    Mul(u32),
    Neg,
    Powi(i32),
    Sin,
    Cos,
    Ln,
}

const INLINE_STACK: usize = 32;

/// Postfix program for fast repeated evaluation of one expression.
#[derive(Debug, Clone, PartialEq)]
pub struct Compiled {
    ops: Vec<Op>,
    depth: usize,
}

impl Compiled {
    pub fn new(e: &Expr) -> Self {
        let mut ops = Vec::with_capacity(e.size());
        emit(e, &mut ops);
        let mut depth = 0usize;
        let mut max = 0usize;
        for op in &ops {
            match op {
                Op::Const(_) | Op::X | Op::Y => depth += 1,
                Op::Add(n) | Op::Mul(n) => depth -= *n as usize - 1,
                _ => {}
            }
            max = max.max(depth);
        }
        Compiled { ops, depth: max }
    }

    /// Same contract as [`Expr::evaluate`]: non-finite results become NaN.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let v = if self.depth <= INLINE_STACK {
            let mut stack = [0.0f64; INLINE_STACK];
            self.run(&mut stack, x, y)
        } else {
            let mut stack = vec![0.0f64; self.depth];
            self.run(&mut stack, x, y)
        };
        if v.is_finite() {
            v
        } else {
            f64::NAN
        }
    }

    fn run(&self, stack: &mut [f64], x: f64, y: f64) -> f64 {
        let mut sp = 0usize;
        for op in &self.ops {
            match *op {
                Op::Const(c) => {
                    stack[sp] = c;
                    sp += 1;
                }
                Op::X => {
                    stack[sp] = x;
                    sp += 1;
                }
                Op::Y => {
                    stack[sp] = y;
                    sp += 1;
                }
                Op::Add(n) => {
                    let start = sp - n as usize;
                    let mut acc = stack[start];
                    for v in &stack[start + 1..sp] {
                        acc += v;
                    }
                    stack[start] = acc;
                    sp = start + 1;
                }
                Op::Mul(n) => {
                    let start = sp - n as usize;
                    let mut acc = stack[start];
                    for v in &stack[start + 1..sp] {
                        acc *= v;
                    }
                    stack[start] = acc;
                    sp = start + 1;
                }
                Op::Neg => stack[sp - 1] = -stack[sp - 1],
                Op::Powi(n) => stack[sp - 1] = powi(stack[sp - 1], n),
                Op::Sin => stack[sp - 1] = stack[sp - 1].sin(),
                Op::Cos => stack[sp - 1] = stack[sp - 1].cos(),
                Op::Ln => stack[sp - 1] = ln(stack[sp - 1]),
            }
        }
        stack[0]
    }
}

fn emit(e: &Expr, ops: &mut Vec<Op>) {
    match e {
        Expr::Const(c) => ops.push(Op::Const(rational::to_f64(c))),
        Expr::Var(Var::X) => ops.push(Op::X),
        Expr::Var(Var::Y) => ops.push(Op::Y),
        Expr::Add(ts) => {
            ts.iter().for_each(|t| emit(t, ops));
            ops.push(Op::Add(ts.len() as u32));
        }
        Expr::Mul(fs) => {
            fs.iter().for_each(|f| emit(f, ops));
            ops.push(Op::Mul(fs.len() as u32));
        }
        Expr::Neg(a) => {
            emit(a, ops);
            ops.push(Op::Neg);
        }
        Expr::Pow(b, n) => {
            emit(b, ops);
            ops.push(Op::Powi(*n));
        }
        Expr::Apply(func, a) => {
            emit(a, ops);
            ops.push(match func {
                Func::Sin => Op::Sin,
                Func::Cos => Op::Cos,
                Func::Ln => Op::Ln,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn basic_values() {
        assert_eq!(parse("1/2*y^2 + 1/2*x^2").unwrap().evaluate(0.0, 0.0), 0.0);
        assert_eq!(parse("1/2*x^2 + cos(y)").unwrap().evaluate(0.0, 0.0), 1.0);
        assert!(parse("ln(x)").unwrap().evaluate(-1.0, 0.0).is_nan());
        assert!(parse("ln(x)").unwrap().evaluate(0.0, 0.0).is_nan());
        assert!(parse("1/y").unwrap().evaluate(1.0, 0.0).is_nan());
        assert!(parse("x*(1/y)^-1").unwrap().evaluate(1.0, 0.0).is_nan());
    }

    #[test]
    fn powi_matches_repeated_products() {
        assert_eq!(powi(3.0, 4), 81.0);
        assert_eq!(powi(2.0, -2), 0.25);
        assert_eq!(powi(-1.5, 3), -3.375);
        assert_eq!(powi(7.0, 0), 1.0);
        assert!(powi(0.0, -1).is_nan());
    }

    #[test]
    fn compiled_agrees_bitwise() {
        let texts = [
            "x*ln(x) + y*ln(y) - 1.1*x - 1.1*y - 0.1*x*y",
            "x*y*(1 - x) + 1/y",
            "-2/3*x^3 + 1/3*x*y^2 - sin(y) + cos(x)",
            "((((x + 1)*(y - 1) + 2)*x + 3)*y + 4)^2",
        ];
        for t in texts {
            let e = parse(t).unwrap();
            let c = e.compile();
            for i in 0..50 {
                let x = -10.0 + 0.41 * f64::from(i);
                let y = 9.7 - 0.37 * f64::from(i);
                let a = e.evaluate(x, y);
                let b = c.eval(x, y);
                assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()), "{t} at ({x},{y})");
            }
        }
    }

    #[test]
    fn deep_expressions_use_heap_stack() {
        let mut text = String::from("x");
        for _ in 0..40 {
            text = format!("(1 + {text}*y)");
        }
        // right-nested so the stack grows
        let mut deep = String::from("x");
        for _ in 0..40 {
            deep = format!("y + x*({deep})");
        }
        for t in [text, deep] {
            let e = parse(&t).unwrap();
            let c = e.compile();
            assert_eq!(c.eval(0.5, 0.25).to_bits(), e.evaluate(0.5, 0.25).to_bits());
        }
    }
}
