//! Signed terms as words: vocabulary, multi-hot vectors and distances.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::BasisSpec;
use crate::expr::{parse, Expr, HamError, HamFunction, TermShape};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenError {
    #[error("token {0} is not in the vocabulary")]
    ForeignToken(String),
    #[error("vector lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("token index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("bad vocabulary entry: {0}")]
    BadEntry(String),
    #[error(transparent)]
    Ham(#[from] HamError),
}

/// One coefficient on one shape. `x` and `-x` are different tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Token {
    pub coeff: Rational,
    pub shape: TermShape,
}

impl Ord for Token {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.shape, self.coeff).cmp(&(other.shape, other.coeff))
    }
}

impl PartialOrd for Token {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = HamFunction::new(vec![(self.coeff, self.shape)]).map_err(|_| fmt::Error)?;
        write!(f, "{h}")
    }
}

/// Tokens of `f` in canonical order.
pub fn tokens_of(f: &HamFunction) -> Vec<Token> {
    f.terms()
        .iter()
        .map(|(coeff, shape)| Token {
            coeff: *coeff,
            shape: *shape,
        })
        .collect()
}

pub fn token_set(f: &HamFunction) -> BTreeSet<Token> {
    tokens_of(f).into_iter().collect()
}

/// Tokens in the order the summands appear in `text`. A summand that is
/// itself a sum contributes its tokens in canonical order.
pub fn written_tokens(text: &str) -> Result<Vec<Token>, HamError> {
    let e = parse(text)?;
    // validate the whole expression first
    HamFunction::from_expr(&e)?;
    let summands = match e {
        Expr::Add(ts) => ts,
        other => vec![other],
    };
    let mut out = Vec::new();
    for s in &summands {
        match HamFunction::from_expr(s) {
            Ok(h) => out.extend(tokens_of(&h)),
            Err(HamError::Constant) => {}
            Err(err) => return Err(err),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabEntry {
    pub coeff: String,
    pub shape: String,
}

/// All `(b, shape)` with `b` in `Δ\{0}`, ordered by shape then coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenVocab {
    spec: BasisSpec,
    tokens: Vec<Token>,
}

impl TokenVocab {
    pub fn build(spec: &BasisSpec) -> Self {
        let tokens = spec
            .shapes()
            .iter()
            .flat_map(|shape| {
                spec.delta().nonzero().map(move |coeff| Token {
                    coeff,
                    shape: *shape,
                })
            })
            .collect();
        TokenVocab {
            spec: spec.clone(),
            tokens,
        }
    }

    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn index(&self, t: &Token) -> Option<usize> {
        let width = self.spec.radix() - 1;
        let shape = self.spec.shape_position(&t.shape)?;
        let coeff = self.spec.delta().nonzero().position(|c| c == t.coeff)?;
        Some(shape * width + coeff)
    }

    pub fn vectorize(&self, f: &HamFunction) -> Result<TokenVector, TokenError> {
        let mut ones = tokens_of(f)
            .iter()
            .map(|t| self.index(t).ok_or_else(|| TokenError::ForeignToken(t.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        ones.sort_unstable();
        Ok(TokenVector {
            len: self.len(),
            ones,
        })
    }

    pub fn detokenize(&self, v: &TokenVector) -> Result<HamFunction, TokenError> {
        if v.len != self.len() {
            return Err(TokenError::LengthMismatch(v.len, self.len()));
        }
        let terms = v
            .ones
            .iter()
            .map(|i| {
                let t = self.tokens.get(*i).ok_or(TokenError::IndexOutOfRange(*i))?;
                Ok((t.coeff, t.shape))
            })
            .collect::<Result<Vec<_>, TokenError>>()?;
        Ok(HamFunction::new(terms)?)
    }

    pub fn entries(&self) -> Vec<VocabEntry> {
        self.tokens
            .iter()
            .map(|t| VocabEntry {
                coeff: rational::format_pq(&t.coeff),
                shape: t.shape.to_string(),
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries()).expect("vocabulary serializes")
    }

    /// Parses a serialized vocabulary into its token list.
    pub fn parse_entries(entries: &[VocabEntry]) -> Result<Vec<Token>, TokenError> {
        entries
            .iter()
            .map(|e| {
                let coeff = rational::parse_rational(&e.coeff)
                    .map_err(|_| TokenError::BadEntry(format!("coefficient {:?}", e.coeff)))?;
                let shape = e
                    .shape
                    .parse::<TermShape>()
                    .map_err(|_| TokenError::BadEntry(format!("shape {:?}", e.shape)))?;
                Ok(Token { coeff, shape })
            })
            .collect()
    }
}

/// Multi-hot indicator over a vocabulary, stored as sorted set-bit indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenVector {
    len: usize,
    ones: Vec<usize>,
}

impl TokenVector {
    pub fn from_indices(len: usize, mut ones: Vec<usize>) -> Result<Self, TokenError> {
        ones.sort_unstable();
        ones.dedup();
        if let Some(i) = ones.iter().find(|i| **i >= len) {
            return Err(TokenError::IndexOutOfRange(*i));
        }
        Ok(TokenVector { len, ones })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn ones(&self) -> &[usize] {
        &self.ones
    }

    pub fn popcount(&self) -> usize {
        self.ones.len()
    }

    pub fn bits(&self) -> Vec<u8> {
        let mut b = vec![0; self.len];
        for i in &self.ones {
            b[*i] = 1;
        }
        b
    }
}

fn symmetric_difference_len<T: Ord>(a: &[T], b: &[T]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                n += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                n += 1;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    n + (a.len() - i) + (b.len() - j)
}

/// Euclidean distance between binary vectors, `sqrt(hamming(a, b))`.
pub fn distance_euclid(a: &TokenVector, b: &TokenVector) -> Result<f64, TokenError> {
    if a.len != b.len {
        return Err(TokenError::LengthMismatch(a.len, b.len));
    }
    Ok((symmetric_difference_len(&a.ones, &b.ones) as f64).sqrt())
}

/// The same distance computed on token sets, without a vocabulary; also
/// defined for tokens outside any basis.
pub fn token_distance(f: &HamFunction, g: &HamFunction) -> f64 {
    let a: Vec<Token> = token_set(f).into_iter().collect();
    let b: Vec<Token> = token_set(g).into_iter().collect();
    (symmetric_difference_len(&a, &b) as f64).sqrt()
}

/// `1 - |A ∩ B| / |A ∪ B|`, and 0 for two empty sets.
pub fn distance_jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        1.0 - inter as f64 / union as f64
    }
}

/// Unit-cost edit distance over symbol sequences.
pub fn distance_levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, x) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(x != y);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
