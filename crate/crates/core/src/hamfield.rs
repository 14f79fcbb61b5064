//! Hamiltonian vector fields under `dx ^ dy`: `X_H = (-H_y, H_x)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::expr::{parse_with_constants, Compiled, Expr, HamFunction, ParseError, Var};
use crate::rational::{ratio, Rational};

/// Components of `X_H` in the `d/dx`, `d/dy` frame.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldExpr {
    pub dx: Expr,
    pub dy: Expr,
}

impl FieldExpr {
    pub fn compile(&self) -> CompiledField {
        CompiledField {
            dx: self.dx.compile(),
            dy: self.dy.compile(),
        }
    }

    pub fn to_json(&self) -> FieldJson {
        FieldJson {
            dx: self.dx.to_string(),
            dy: self.dy.to_string(),
        }
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dx: {}\ndy: {}", self.dx, self.dy)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub dx: String,
    pub dy: String,
}

#[derive(Debug, Clone)]
pub struct CompiledField {
    dx: Compiled,
    dy: Compiled,
}

impl CompiledField {
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        (self.dx.eval(x, y), self.dy.eval(x, y))
    }
}

pub fn hamiltonian_field(h: &Expr) -> FieldExpr {
    FieldExpr {
        dx: Expr::neg(h.differentiate(Var::Y)).tidy(),
        dy: h.differentiate(Var::X).tidy(),
    }
}

pub fn ham_field(h: &HamFunction) -> FieldExpr {
    hamiltonian_field(&h.to_expr())
}

/// `X_H` sampled on a cloud. A point is flagged when either component is NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub points: Vec<(f64, f64)>,
    pub vectors: Vec<(f64, f64)>,
    pub nan: Vec<bool>,
}

impl FieldSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn nan_count(&self) -> usize {
        self.nan.iter().filter(|f| **f).count()
    }

    /// Largest vector norm over unflagged points (0 when all are flagged).
    pub fn max_norm(&self) -> f64 {
        self.vectors
            .iter()
            .zip(&self.nan)
            .filter(|(_, nan)| !**nan)
            .map(|((u, v), _)| u.hypot(*v))
            .fold(0.0, f64::max)
    }
}

pub fn eval_field(field: &CompiledField, cloud: &PointCloud) -> FieldSample {
    let vectors: Vec<(f64, f64)> = cloud
        .points
        .iter()
        .map(|&(x, y)| field.eval(x, y))
        .collect();
    let nan = vectors.iter().map(|(u, v)| u.is_nan() || v.is_nan()).collect();
    FieldSample {
        points: cloud.points.clone(),
        vectors,
        nan,
    }
}

/// A textbook system whose Hamiltonian carries named constants.
#[derive(Debug, Clone, PartialEq)]
pub struct DemoSystem {
    pub name: &'static str,
    pub template: &'static str,
    pub constants: BTreeMap<String, Rational>,
}

impl DemoSystem {
    fn new(name: &'static str, template: &'static str, constants: &[(&str, Rational)]) -> Self {
        DemoSystem {
            name,
            template,
            constants: constants
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
        }
    }

    /// `1/2*(y^2 + alpha^2*x^2)`, `alpha = 1`
    pub fn harmonic() -> Self {
        Self::new("harmonic", "1/2*(y^2 + alpha^2*x^2)", &[("alpha", ratio(1, 1))])
    }

    pub fn pendulum() -> Self {
        Self::new("pendulum", "1/2*x^2 + cos(y)", &[])
    }

    /// Prey growth `a`, predator death `b`, interaction `c`.
    pub fn lotka_volterra() -> Self {
        Self::new(
            "lotka_volterra",
            "x*ln(x) + y*ln(y) - a*x - b*y - c*x*y",
            &[("a", ratio(11, 10)), ("b", ratio(11, 10)), ("c", ratio(1, 10))],
        )
    }

    pub fn sis() -> Self {
        Self::new("sis", "x*y*(rho0 - x) + 1/y", &[("rho0", ratio(1, 1))])
    }

    pub fn all() -> Vec<DemoSystem> {
        vec![Self::harmonic(), Self::pendulum(), Self::lotka_volterra(), Self::sis()]
    }

    pub fn by_name(name: &str) -> Option<DemoSystem> {
        Self::all().into_iter().find(|d| d.name == name)
    }

    /// Overrides a constant; unknown names are rejected.
    pub fn set(&mut self, name: &str, value: Rational) -> bool {
        match self.constants.get_mut(name) {
            Some(slot) => {
                *slot = value;
                true
            }
            None => false,
        }
    }

    pub fn hamiltonian(&self) -> Result<Expr, ParseError> {
        parse_with_constants(self.template, &self.constants)
    }

    pub fn field(&self) -> Result<FieldExpr, ParseError> {
        Ok(hamiltonian_field(&self.hamiltonian()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::canonical_cloud;
    use crate::expr::parse;

    fn field(text: &str) -> FieldExpr {
        hamiltonian_field(&parse(text).unwrap())
    }

    #[test]
    fn harmonic_rotation() {
        let f = field("1/2*y^2 + 1/2*x^2");
        assert_eq!(f.dx.to_string(), "-y");
        assert_eq!(f.dy.to_string(), "x");
        let c = f.compile();
        assert_eq!(c.eval(0.0, 0.0), (0.0, 0.0));
        assert_eq!(c.eval(1.0, 0.0), (0.0, 1.0));
    }

    #[test]
    fn demo_fields() {
        let f = DemoSystem::pendulum().field().unwrap();
        assert_eq!((f.dx.to_string(), f.dy.to_string()), ("sin(y)".into(), "x".into()));
        let f = DemoSystem::sis().field().unwrap();
        assert_eq!(f.dx.to_string(), "-x + x^2 + y^-2");
        assert_eq!(f.dy.to_string(), "y - 2*x*y");
        let f = DemoSystem::lotka_volterra().field().unwrap();
        assert_eq!(f.dx.to_string(), "1/10 + 1/10*x - ln(y)");
        assert_eq!(f.dy.to_string(), "-1/10 - 1/10*y + ln(x)");
        let f = DemoSystem::harmonic().field().unwrap();
        assert_eq!(f.to_string(), "dx: -y\ndy: x");
    }

    #[test]
    fn constant_override() {
        let mut d = DemoSystem::harmonic();
        assert!(d.set("alpha", ratio(2, 1)));
        assert!(!d.set("beta", ratio(2, 1)));
        assert_eq!(d.field().unwrap().dy.to_string(), "4*x");
    }

    #[test]
    fn nan_points_are_flagged() {
        let f = DemoSystem::lotka_volterra().field().unwrap().compile();
        let s = eval_field(&f, &canonical_cloud());
        assert_eq!(s.len(), 441);
        // ln(x) or ln(y) undefined whenever x <= 0 or y <= 0
        assert_eq!(s.nan_count(), 441 - 100);
        assert!(s.max_norm().is_finite());
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let s = eval_field(&field("x").compile(), &canonical_cloud());
        assert!(s.max_norm() > 0.0);
        let f = FieldExpr {
            dx: Expr::zero(),
            dy: Expr::zero(),
        };
        assert_eq!(eval_field(&f.compile(), &canonical_cloud()).max_norm(), 0.0);
    }
}
