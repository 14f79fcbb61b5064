//! Corpora of Hamiltonians `Ham(B_i, Δ)` and `Ham(B_i*, Δ)`.
//!
//! A corpus member assigns one coefficient from `Δ` to each of the `S` basis
//! shapes, and is not identically zero. Members are indexed by a mixed-radix
//! numeral in base `l = |Δ|`: member `j` is the numeral `j + 1`, least
//! significant digit on the first shape, with digit alphabet
//! `[0, Δ\{0} ascending]`. Numeral 0 is the zero function, so the range
//! `[0, l^S - 1)` covers exactly the nonconstant combinations.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{HamFunction, TermShape};
use crate::rational::{self, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("index {index} out of range for corpus of size {size}")]
    IndexOutOfRange { index: BigUint, size: BigUint },
    #[error("range [{lo}, {hi}) out of bounds for corpus of size {size}")]
    RangeOutOfBounds {
        lo: BigUint,
        hi: BigUint,
        size: BigUint,
    },
    #[error("shape {0} is not in the basis")]
    ForeignShape(String),
    #[error("coefficient {coeff} of {shape} is not in the coefficient set")]
    ForeignCoefficient { coeff: String, shape: String },
    #[error("invalid basis spec: {0}")]
    InvalidSpec(String),
}

/// Coefficient set `Δ`: distinct rationals, ascending, containing 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Delta {
    name: String,
    values: Vec<Rational>,
}

impl Delta {
    pub fn new(name: impl Into<String>, mut values: Vec<Rational>) -> Result<Self, CorpusError> {
        values.sort();
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Err(CorpusError::InvalidSpec("coefficient values must be distinct".into()));
        }
        if !values.iter().any(Zero::is_zero) {
            return Err(CorpusError::InvalidSpec("coefficient set must contain 0".into()));
        }
        if values.len() < 2 {
            return Err(CorpusError::InvalidSpec("coefficient set needs a nonzero value".into()));
        }
        Ok(Delta {
            name: name.into(),
            values,
        })
    }

    /// `{-1, 0, 1}`
    pub fn d3() -> Self {
        Self::uniform("d3", 1)
    }

    /// `{-1, -1/2, 0, 1/2, 1}`
    pub fn d5() -> Self {
        Self::uniform("d5", 2)
    }

    /// `{-1, -2/3, -1/3, 0, 1/3, 2/3, 1}`
    pub fn d7() -> Self {
        Self::uniform("d7", 3)
    }

    /// `{-1, -3/4, ..., 3/4, 1}`
    pub fn d9() -> Self {
        Self::uniform("d9", 4)
    }

    fn uniform(name: &str, steps: i64) -> Self {
        let values = (-steps..=steps).map(|i| ratio(i, steps)).collect();
        Delta {
            name: name.into(),
            values,
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "d3" => Some(Self::d3()),
            "d5" => Some(Self::d5()),
            "d7" => Some(Self::d7()),
            "d9" => Some(Self::d9()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Nonzero values, ascending.
    pub fn nonzero(&self) -> impl Iterator<Item = Rational> + '_ {
        self.values.iter().copied().filter(|v| !v.is_zero())
    }

    /// Coefficient for a mixed-radix digit.
    fn digit_value(&self, digit: usize) -> Rational {
        if digit == 0 {
            Rational::zero()
        } else {
            self.nonzero().nth(digit - 1).expect("digit below radix")
        }
    }

    fn digit_of(&self, value: &Rational) -> Option<usize> {
        if value.is_zero() {
            return Some(0);
        }
        self.nonzero().position(|v| v == *value).map(|p| p + 1)
    }
}

/// A basis `B_i(Δ)` or `B_i*(Δ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisSpec {
    max_degree: u32,
    trig: bool,
    delta: Delta,
    shapes: Vec<TermShape>,
}

impl BasisSpec {
    pub fn new(max_degree: u32, trig: bool, delta: Delta) -> Result<Self, CorpusError> {
        if max_degree == 0 {
            return Err(CorpusError::InvalidSpec("max degree must be at least 1".into()));
        }
        if max_degree > 64 {
            return Err(CorpusError::InvalidSpec("max degree above 64".into()));
        }
        let mut shapes = TermShape::monomials(max_degree);
        if trig {
            shapes.extend(TermShape::TRIG);
        }
        Ok(BasisSpec {
            max_degree,
            trig,
            delta,
            shapes,
        })
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn trig(&self) -> bool {
        self.trig
    }

    pub fn delta(&self) -> &Delta {
        &self.delta
    }

    /// Basis shapes in canonical order; `S = shapes().len()`.
    pub fn shapes(&self) -> &[TermShape] {
        &self.shapes
    }

    pub fn shape_count(&self) -> usize {
        self.shapes.len()
    }

    /// Number of monomial shapes, `(i+1)(i+2)/2 - 1`.
    pub fn monomial_count(&self) -> usize {
        let i = self.max_degree as usize;
        (i + 1) * (i + 2) / 2 - 1
    }

    pub fn radix(&self) -> usize {
        self.delta.len()
    }

    pub fn shape_position(&self, shape: &TermShape) -> Option<usize> {
        self.shapes.binary_search(shape).ok()
    }

    /// Short name such as `b2-d3` or `b2t-d5`.
    pub fn name(&self) -> String {
        format!(
            "b{}{}-{}",
            self.max_degree,
            if self.trig { "t" } else { "" },
            self.delta.name()
        )
    }

    pub fn descriptor(&self) -> SpecDescriptor {
        SpecDescriptor {
            basis: format!("b{}", self.max_degree),
            delta: self.delta.name().to_string(),
            trig: self.trig,
            delta_values: self.delta.values().iter().map(rational::format_pq).collect(),
        }
    }
}

impl fmt::Display for BasisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Serializable form of a [`BasisSpec`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecDescriptor {
    pub basis: String,
    pub delta: String,
    pub trig: bool,
    pub delta_values: Vec<String>,
}

impl SpecDescriptor {
    pub fn to_spec(&self) -> Result<BasisSpec, CorpusError> {
        let degree = parse_basis_name(&self.basis)?;
        let values = self
            .delta_values
            .iter()
            .map(|v| {
                rational::parse_rational(v)
                    .map_err(|_| CorpusError::InvalidSpec(format!("bad coefficient {v:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        BasisSpec::new(degree, self.trig, Delta::new(self.delta.clone(), values)?)
    }
}

pub fn parse_basis_name(s: &str) -> Result<u32, CorpusError> {
    s.strip_prefix('b')
        .and_then(|d| u32::from_str(d).ok())
        .filter(|d| (1..=5).contains(d))
        .ok_or_else(|| CorpusError::InvalidSpec(format!("unknown basis {s:?} (expected b1..b5)")))
}

/// Builds a spec from CLI-style names: `b1..bN`, `d3|d5|d7|d9`.
pub fn spec_from_names(basis: &str, delta: &str, trig: bool) -> Result<BasisSpec, CorpusError> {
    let degree = parse_basis_name(basis)?;
    let delta = Delta::builtin(delta).ok_or_else(|| {
        CorpusError::InvalidSpec(format!("unknown coefficient set {delta:?} (expected d3|d5|d7|d9)"))
    })?;
    BasisSpec::new(degree, trig, delta)
}

/// `l^S - 1`: every coefficient assignment except the zero function.
pub fn cardinality(spec: &BasisSpec) -> BigUint {
    BigUint::from(spec.radix()).pow(spec.shape_count() as u32) - BigUint::one()
}

pub fn function_at(index: &BigUint, spec: &BasisSpec) -> Result<HamFunction, CorpusError> {
    let size = cardinality(spec);
    if *index >= size {
        return Err(CorpusError::IndexOutOfRange {
            index: index.clone(),
            size,
        });
    }
    let radix = BigUint::from(spec.radix());
    let mut numeral = index + BigUint::one();
    let mut terms = Vec::new();
    for shape in spec.shapes() {
        let (q, digit) = numeral.div_rem(&radix);
        numeral = q;
        let digit = digit.to_usize().expect("digit below radix");
        if digit != 0 {
            terms.push((spec.delta.digit_value(digit), *shape));
        }
    }
    Ok(HamFunction::new(terms).expect("nonzero numeral gives a valid function"))
}

pub fn index_of(f: &HamFunction, spec: &BasisSpec) -> Result<BigUint, CorpusError> {
    let mut digits = vec![0usize; spec.shape_count()];
    for (c, shape) in f.terms() {
        let pos = spec
            .shape_position(shape)
            .ok_or_else(|| CorpusError::ForeignShape(shape.to_string()))?;
        digits[pos] = spec.delta.digit_of(c).ok_or_else(|| CorpusError::ForeignCoefficient {
            coeff: c.to_string(),
            shape: shape.to_string(),
        })?;
    }
    let radix = BigUint::from(spec.radix());
    let mut numeral = BigUint::zero();
    for d in digits.iter().rev() {
        numeral = numeral * &radix + BigUint::from(*d);
    }
    // a HamFunction is never zero, so the numeral is at least 1
    Ok(numeral - BigUint::one())
}

/// Streams `function_at(j)` for `j` in `[lo, hi)` with an odometer over the
/// digits, so each step is amortised O(1) and no big-integer division is done
/// after the first item.
pub fn enumerate(
    spec: &BasisSpec,
    lo: &BigUint,
    hi: &BigUint,
) -> Result<CorpusIter, CorpusError> {
    let size = cardinality(spec);
    if lo > hi || *hi > size {
        return Err(CorpusError::RangeOutOfBounds {
            lo: lo.clone(),
            hi: hi.clone(),
            size,
        });
    }
    let radix = BigUint::from(spec.radix());
    let mut numeral = lo + BigUint::one();
    let mut digits = Vec::with_capacity(spec.shape_count());
    for _ in 0..spec.shape_count() {
        let (q, d) = numeral.div_rem(&radix);
        numeral = q;
        digits.push(d.to_usize().expect("digit below radix"));
    }
    Ok(CorpusIter {
        spec: spec.clone(),
        digits,
        index: lo.clone(),
        remaining: hi - lo,
    })
}

pub struct CorpusIter {
    spec: BasisSpec,
    digits: Vec<usize>,
    index: BigUint,
    remaining: BigUint,
}

impl CorpusIter {
    fn current(&self) -> HamFunction {
        let terms = self
            .digits
            .iter()
            .zip(self.spec.shapes())
            .filter(|(d, _)| **d != 0)
            .map(|(d, s)| (self.spec.delta.digit_value(*d), *s))
            .collect();
        HamFunction::new(terms).expect("nonzero numeral gives a valid function")
    }

    fn advance(&mut self) {
        let radix = self.spec.radix();
        for d in self.digits.iter_mut() {
            *d += 1;
            if *d < radix {
                return;
            }
            *d = 0;
        }
    }
}

impl Iterator for CorpusIter {
    /// `(index, function)`
    type Item = (BigUint, HamFunction);

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining.is_zero() {
            return None;
        }
        let item = (self.index.clone(), self.current());
        self.remaining -= 1u32;
        self.index += 1u32;
        if !self.remaining.is_zero() {
            self.advance();
        }
        Some(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn spec(i: u32, d: &str, trig: bool) -> BasisSpec {
        spec_from_names(&format!("b{i}"), d, trig).unwrap()
    }

    fn all(spec: &BasisSpec) -> Vec<HamFunction> {
        enumerate(spec, &BigUint::zero(), &cardinality(spec))
            .unwrap()
            .map(|(_, f)| f)
            .collect()
    }

    #[test]
    fn builtin_deltas() {
        assert_eq!(Delta::d3().values(), &[ratio(-1, 1), ratio(0, 1), ratio(1, 1)]);
        assert_eq!(
            Delta::d7().values(),
            &[ratio(-1, 1), ratio(-2, 3), ratio(-1, 3), ratio(0, 1), ratio(1, 3), ratio(2, 3), ratio(1, 1)]
        );
        assert_eq!(Delta::d9().len(), 9);
        assert_eq!(Delta::d9().values()[1], ratio(-3, 4));
        assert_eq!(Delta::d5().values()[3], ratio(1, 2));
    }

    #[test]
    fn cardinality_examples() {
        assert_eq!(cardinality(&spec(1, "d3", false)), BigUint::from(8u32));
        assert_eq!(cardinality(&spec(3, "d3", false)), BigUint::from(19_682u32));
        assert_eq!(cardinality(&spec(2, "d5", false)), BigUint::from(3_124u32));
        assert_eq!(cardinality(&spec(2, "d3", true)), BigUint::from(19_682u32));
        let big = cardinality(&spec(5, "d9", false));
        assert_eq!(big.to_string(), "12157665459056928800");
        assert!(big > BigUint::from(i64::MAX as u64));
    }

    #[test]
    fn shape_counts() {
        for i in 1..=5 {
            let s = spec(i, "d3", false);
            assert_eq!(s.shape_count(), s.monomial_count());
            assert_eq!(spec(i, "d3", true).shape_count(), s.monomial_count() + 4);
        }
    }

    #[test]
    fn b1_d3_table() {
        let s = spec(1, "d3", false);
        let got: BTreeSet<String> = all(&s).iter().map(|f| f.to_string()).collect();
        let want: BTreeSet<String> = ["-x - y", "-x", "-x + y", "-y", "y", "x - y", "x", "x + y"]
            .into_iter()
            .map(String::from)
            .collect();
        assert_eq!(got, want);
        let last = function_at(&(cardinality(&s) - 1u32), &s).unwrap();
        assert_eq!(last.to_string(), "x + y");
        assert_eq!(index_of(&last, &s).unwrap(), cardinality(&s) - 1u32);
    }

    #[test]
    fn b2_d3_round_trip_exhaustive() {
        let s = spec(2, "d3", false);
        for j in 0..242u32 {
            let j = BigUint::from(j);
            let f = function_at(&j, &s).unwrap();
            assert_eq!(index_of(&f, &s).unwrap(), j);
        }
        assert!(function_at(&BigUint::from(242u32), &s).is_err());
    }

    #[test]
    fn iterator_matches_random_access() {
        let s = spec(2, "d5", true);
        let lo = BigUint::from(123_456u32);
        let hi = BigUint::from(124_000u32);
        for (j, f) in enumerate(&s, &lo, &hi).unwrap() {
            assert_eq!(function_at(&j, &s).unwrap(), f);
        }
    }

    #[test]
    fn membership() {
        let s = spec(2, "d5", false);
        let f = HamFunction::parse("1/2*y^2 + x^2").unwrap();
        let j = index_of(&f, &s).unwrap();
        assert_eq!(function_at(&j, &s).unwrap(), f);

        let s3 = spec(2, "d3", false);
        assert!(matches!(
            index_of(&HamFunction::parse("sin(x)").unwrap(), &s3),
            Err(CorpusError::ForeignShape(_))
        ));
        assert!(matches!(
            index_of(&HamFunction::parse("1/2*x").unwrap(), &s3),
            Err(CorpusError::ForeignCoefficient { .. })
        ));
        assert!(matches!(
            index_of(&HamFunction::parse("x^3").unwrap(), &s3),
            Err(CorpusError::ForeignShape(_))
        ));
    }

    #[test]
    fn ranges() {
        let s = spec(1, "d3", false);
        assert_eq!(enumerate(&s, &BigUint::from(3u32), &BigUint::from(3u32)).unwrap().count(), 0);
        assert!(enumerate(&s, &BigUint::from(0u32), &BigUint::from(9u32)).is_err());
        assert!(enumerate(&s, &BigUint::from(5u32), &BigUint::from(4u32)).is_err());
    }

    #[test]
    fn spec_names() {
        assert!(spec_from_names("b0", "d3", false).is_err());
        assert!(spec_from_names("b2", "d4", false).is_err());
        assert!(spec_from_names("x2", "d3", false).is_err());
        let s = spec(2, "d5", true);
        assert_eq!(s.name(), "b2t-d5");
        assert_eq!(s.descriptor().to_spec().unwrap(), s);
    }

    #[test]
    fn delta_validation() {
        assert!(Delta::new("bad", vec![ratio(1, 1), ratio(2, 1)]).is_err());
        assert!(Delta::new("bad", vec![ratio(0, 1), ratio(0, 1), ratio(1, 1)]).is_err());
        assert!(Delta::new("ok", vec![ratio(2, 1), ratio(0, 1)]).is_ok());
    }
}
