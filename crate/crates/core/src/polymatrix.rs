//! Matrix-valued polynomials in `n` scalar variables.
//!
//! Terms are keyed by the sorted multiset of 0-based variable indices and hold
//! the full monomial coefficient `C_S`. For a multilinear term of degree `d`
//! the permutation-symmetric ordered-tuple coefficient is `C_S / d!`.
//!
//! The JSON form uses 1-based indices:
//!
//! ```json
//! {"n": 3, "dims": [2, 2], "multilinear": true,
//!  "terms": [{"vars": [1, 2], "matrix": [[1, 0], [0, 0]]}]}
//! ```

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::numerics::factorial;

/// Sorted variable indices (0-based), repeats encode multiplicity.
pub type Key = Vec<usize>;

/// Limits applied by [`PolyMatrix::parse`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseLimits {
    pub max_degree: usize,
    pub max_n: usize,
    /// Accept an empty `vars` list in a multilinear document.
    pub allow_constant: bool,
}

impl Default for ParseLimits {
    fn default() -> Self {
        ParseLimits {
            max_degree: 6,
            max_n: 64,
            allow_constant: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    n: usize,
    dims: (usize, usize),
    multilinear: bool,
    terms: BTreeMap<Key, Matrix>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    vars: Vec<i64>,
    matrix: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyDoc {
    n: usize,
    dims: [usize; 2],
    #[serde(default)]
    multilinear: bool,
    terms: Vec<TermDoc>,
}

fn has_repeat(key: &[usize]) -> bool {
    key.windows(2).any(|w| w[0] == w[1])
}

impl PolyMatrix {
    pub fn zero(n: usize, dims: (usize, usize), multilinear: bool) -> Self {
        PolyMatrix {
            n,
            dims,
            multilinear,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a polynomial from 0-based keys. Keys are sorted; coefficients of
    /// repeated keys are added. Constant terms are accepted.
    pub fn from_terms<I>(
        n: usize,
        dims: (usize, usize),
        multilinear: bool,
        terms: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (Key, Matrix)>,
    {
        if n == 0 || dims.0 == 0 || dims.1 == 0 {
            return Err(Error::Input("n and both dims must be positive".into()));
        }
        let mut p = PolyMatrix::zero(n, dims, multilinear);
        for (pos, (mut key, m)) in terms.into_iter().enumerate() {
            key.sort_unstable();
            if let Some(&bad) = key.iter().find(|&&i| i >= n) {
                return Err(Error::schema(
                    Some(pos),
                    format!("variable index {bad} out of range"),
                ));
            }
            if multilinear && has_repeat(&key) {
                return Err(Error::schema(
                    Some(pos),
                    "repeated variable in a multilinear term",
                ));
            }
            if m.shape() != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims,
                    got: m.shape(),
                });
            }
            p.add_term(key, &m, 1.0);
        }
        Ok(p)
    }

    /// Adds `alpha * m` to the coefficient of `key`, dropping exact zeros.
    /// The key must already be sorted and valid.
    pub(crate) fn add_term(&mut self, key: Key, m: &Matrix, alpha: f64) {
        if let Some(existing) = self.terms.get_mut(&key) {
            existing
                .add_scaled(m, alpha)
                .expect("coefficient shapes agree");
            if existing.is_zero() {
                self.terms.remove(&key);
            }
        } else if !m.is_zero() && alpha != 0.0 {
            self.terms.insert(key, m.scaled(alpha));
        }
    }

    pub fn parse(json: &str) -> Result<Self> {
        PolyMatrix::parse_with(json, ParseLimits::default())
    }

    pub fn parse_with(json: &str, limits: ParseLimits) -> Result<Self> {
        let doc: PolyDoc =
            serde_json::from_str(json).map_err(|e| Error::schema(None, e.to_string()))?;
        let [d1, d2] = doc.dims;
        if doc.n == 0 || d1 == 0 || d2 == 0 {
            return Err(Error::schema(None, "n and both dims must be positive"));
        }
        if doc.n > limits.max_n {
            return Err(Error::schema(
                None,
                format!("n = {} exceeds the cap {}", doc.n, limits.max_n),
            ));
        }
        let mut terms = BTreeMap::new();
        for (pos, t) in doc.terms.into_iter().enumerate() {
            let mut key = Vec::with_capacity(t.vars.len());
            for v in t.vars {
                if v < 1 || v as usize > doc.n {
                    return Err(Error::schema(
                        Some(pos),
                        format!("variable {v} outside 1..={}", doc.n),
                    ));
                }
                key.push(v as usize - 1);
            }
            key.sort_unstable();
            if key.len() > limits.max_degree {
                return Err(Error::schema(
                    Some(pos),
                    format!("degree {} exceeds the cap {}", key.len(), limits.max_degree),
                ));
            }
            if doc.multilinear && has_repeat(&key) {
                return Err(Error::schema(
                    Some(pos),
                    "repeated variable in a multilinear polynomial",
                ));
            }
            if doc.multilinear && key.is_empty() && !limits.allow_constant {
                return Err(Error::schema(
                    Some(pos),
                    "constant term in a multilinear polynomial",
                ));
            }
            let m = Matrix::from_rows(&t.matrix)
                .map_err(|e| Error::schema(Some(pos), e.to_string()))?;
            if m.shape() != (d1, d2) {
                return Err(Error::schema(
                    Some(pos),
                    format!("matrix is {}x{}, expected {d1}x{d2}", m.rows(), m.cols()),
                ));
            }
            if terms.contains_key(&key) {
                return Err(Error::schema(Some(pos), "duplicate vars key"));
            }
            terms.insert(key, m);
        }
        Ok(PolyMatrix {
            n: doc.n,
            dims: (d1, d2),
            multilinear: doc.multilinear,
            terms,
        })
    }

    pub fn to_json(&self) -> String {
        let doc = PolyDoc {
            n: self.n,
            dims: [self.dims.0, self.dims.1],
            multilinear: self.multilinear,
            terms: self
                .terms
                .iter()
                .map(|(k, m)| TermDoc {
                    vars: k.iter().map(|&i| i as i64 + 1).collect(),
                    matrix: m.to_rows(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("polynomial serializes")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn is_multilinear(&self) -> bool {
        self.multilinear
    }

    pub fn terms(&self) -> &BTreeMap<Key, Matrix> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum term degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn degrees(&self) -> BTreeSet<usize> {
        self.terms.keys().map(Vec::len).collect()
    }

    /// The common degree of all terms. The zero polynomial counts as
    /// homogeneous of degree 0.
    pub fn homogeneous_degree(&self) -> Result<usize> {
        let degs = self.degrees();
        match degs.len() {
            0 => Ok(0),
            1 => Ok(*degs.iter().next().unwrap()),
            _ => Err(Error::NotHomogeneous(degs.into_iter().collect())),
        }
    }

    pub(crate) fn require_multilinear(&self) -> Result<()> {
        if self.multilinear || self.terms.keys().all(|k| !has_repeat(k)) {
            Ok(())
        } else {
            Err(Error::NotMultilinear)
        }
    }

    /// Whether no term repeats a variable (independent of the stored flag).
    pub fn is_multilinear_content(&self) -> bool {
        self.terms.keys().all(|k| !has_repeat(k))
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Input(format!(
                "expected {} variables, got {}",
                self.n,
                x.len()
            )));
        }
        Ok(())
    }

    /// `Σ_S C_S Π_{i∈S} x_i`.
    pub fn evaluate(&self, x: &[f64]) -> Result<Matrix> {
        self.check_len(x)?;
        let mut out = Matrix::zeros(self.dims.0, self.dims.1);
        for (key, c) in &self.terms {
            let w: f64 = key.iter().map(|&i| x[i]).product();
            if w != 0.0 {
                out.add_scaled(c, w).expect("coefficient shapes agree");
            }
        }
        Ok(out)
    }

    /// `Σ_{i_1..i_d} A_{i_1..i_d} x^{(1)}_{i_1} ⋯ x^{(d)}_{i_d}` with
    /// `A_tuple = C_S / d!`.
    pub fn evaluate_decoupled(&self, copies: &[Vec<f64>]) -> Result<Matrix> {
        self.require_multilinear()?;
        let d = self.homogeneous_degree()?;
        if copies.len() != d {
            return Err(Error::Input(format!(
                "expected {d} copies, got {}",
                copies.len()
            )));
        }
        for c in copies {
            self.check_len(c)?;
        }
        // On the diagonal the decoupled polynomial restricts to F itself.
        if copies.iter().all(|c| c == &copies[0]) {
            return match copies.first() {
                Some(x) => self.evaluate(x),
                None => self.evaluate(&vec![0.0; self.n]),
            };
        }
        let scale = 1.0 / factorial(d);
        let mut out = Matrix::zeros(self.dims.0, self.dims.1);
        for (key, c) in &self.terms {
            let w: f64 = key
                .iter()
                .permutations(d)
                .map(|perm| {
                    perm.iter()
                        .zip(copies)
                        .map(|(&&i, x)| x[i])
                        .product::<f64>()
                })
                .sum();
            if w != 0.0 {
                out.add_scaled(c, w * scale)
                    .expect("coefficient shapes agree");
            }
        }
        Ok(out)
    }

    /// Formal `∂/∂x_i` (0-based `i`).
    pub fn partial_derivative(&self, i: usize) -> PolyMatrix {
        let mut out = PolyMatrix::zero(self.n, self.dims, self.multilinear);
        for (key, c) in &self.terms {
            let mult = key.iter().filter(|&&j| j == i).count();
            if mult == 0 {
                continue;
            }
            let pos = key.iter().position(|&j| j == i).unwrap();
            let mut rest = key.clone();
            rest.remove(pos);
            out.add_term(rest, c, mult as f64);
        }
        out
    }

    pub fn homogeneous_part(&self, d: usize) -> PolyMatrix {
        PolyMatrix {
            n: self.n,
            dims: self.dims,
            multilinear: self.multilinear,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.len() == d)
                .map(|(k, m)| (k.clone(), m.clone()))
                .collect(),
        }
    }

    /// `Σ_S C_S Π_i E[x^{mult(i)}]`.
    pub fn expectation(&self, dist: &Distribution) -> Matrix {
        let mut out = Matrix::zeros(self.dims.0, self.dims.1);
        for (key, c) in &self.terms {
            let w: f64 = key
                .iter()
                .dedup_with_count()
                .map(|(mult, _)| dist.moment(mult as u32))
                .product();
            if w != 0.0 {
                out.add_scaled(c, w).expect("coefficient shapes agree");
            }
        }
        out
    }

    /// The constant (empty-key) coefficient, or zero.
    pub fn constant_term(&self) -> Matrix {
        self.terms
            .get(&Vec::new())
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.dims.0, self.dims.1))
    }

    pub fn transpose(&self) -> PolyMatrix {
        PolyMatrix {
            n: self.n,
            dims: (self.dims.1, self.dims.0),
            multilinear: self.multilinear,
            terms: self
                .terms
                .iter()
                .map(|(k, m)| (k.clone(), m.transpose()))
                .collect(),
        }
    }

    pub fn scaled(&self, alpha: f64) -> PolyMatrix {
        let mut out = PolyMatrix::zero(self.n, self.dims, self.multilinear);
        for (k, m) in &self.terms {
            out.add_term(k.clone(), m, alpha);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX22: &str = r#"{"n": 3, "dims": [2, 2], "multilinear": true, "terms": [
        {"vars": [1, 2], "matrix": [[1, 0], [0, 0]]},
        {"vars": [1, 3], "matrix": [[0, 0], [0, 1]]},
        {"vars": [2, 3], "matrix": [[0, 1], [1, 0]]}]}"#;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn parse_example() {
        let f = PolyMatrix::parse(EX22).unwrap();
        assert_eq!(f.n(), 3);
        assert_eq!(f.terms().len(), 3);
        assert_eq!(f.terms()[&vec![0, 1]], m(&[&[1.0, 0.0], &[0.0, 0.0]]));
        assert_eq!(f.terms()[&vec![1, 2]], m(&[&[0.0, 1.0], &[1.0, 0.0]]));
        let ones = f.evaluate(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(ones, m(&[&[1.0, 1.0], &[1.0, 1.0]]));
    }

    #[test]
    fn parse_errors_name_the_term() {
        let bad = r#"{"n": 2, "dims": [1, 1], "multilinear": true,
            "terms": [{"vars": [2], "matrix": [[1]]}, {"vars": [1, 1], "matrix": [[1]]}]}"#;
        match PolyMatrix::parse(bad) {
            Err(Error::Schema { term: Some(1), .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let dup = r#"{"n": 2, "dims": [1, 1], "multilinear": true,
            "terms": [{"vars": [2, 1], "matrix": [[1]]}, {"vars": [1, 2], "matrix": [[2]]}]}"#;
        assert!(matches!(
            PolyMatrix::parse(dup),
            Err(Error::Schema { term: Some(1), .. })
        ));
        let range = r#"{"n": 2, "dims": [1, 1], "terms": [{"vars": [3], "matrix": [[1]]}]}"#;
        assert!(matches!(
            PolyMatrix::parse(range),
            Err(Error::Schema { term: Some(0), .. })
        ));
        let shape = r#"{"n": 2, "dims": [1, 2], "terms": [{"vars": [1], "matrix": [[1]]}]}"#;
        assert!(matches!(
            PolyMatrix::parse(shape),
            Err(Error::Schema { term: Some(0), .. })
        ));
    }

    #[test]
    fn constant_needs_permission_when_multilinear() {
        let doc = r#"{"n": 1, "dims": [1, 1], "multilinear": true, "terms": [{"vars": [], "matrix": [[2]]}]}"#;
        assert!(PolyMatrix::parse(doc).is_err());
        let limits = ParseLimits {
            allow_constant: true,
            ..ParseLimits::default()
        };
        assert!(PolyMatrix::parse_with(doc, limits).is_ok());
        let gauss = r#"{"n": 1, "dims": [1, 1], "terms": [{"vars": [], "matrix": [[2]]}]}"#;
        assert!(PolyMatrix::parse(gauss).is_ok());
    }

    #[test]
    fn caps() {
        let deg7 =
            r#"{"n": 1, "dims": [1, 1], "terms": [{"vars": [1,1,1,1,1,1,1], "matrix": [[1]]}]}"#;
        assert!(PolyMatrix::parse(deg7).is_err());
        let big_n = r#"{"n": 65, "dims": [1, 1], "terms": []}"#;
        assert!(PolyMatrix::parse(big_n).is_err());
    }

    #[test]
    fn empty_terms_is_zero() {
        let f = PolyMatrix::parse(r#"{"n": 4, "dims": [2, 3], "multilinear": true, "terms": []}"#)
            .unwrap();
        assert!(f.is_zero());
        assert!(f.evaluate(&[1.0; 4]).unwrap().is_zero());
    }

    #[test]
    fn derivative_of_example() {
        let f = PolyMatrix::parse(EX22).unwrap();
        let d1 = f.partial_derivative(0);
        let v = d1.evaluate(&[5.0, 2.0, 3.0]).unwrap();
        assert_eq!(v, m(&[&[2.0, 0.0], &[0.0, 3.0]]));
    }

    #[test]
    fn derivative_scales_by_multiplicity() {
        let c = m(&[&[1.0]]);
        let p = PolyMatrix::from_terms(2, (1, 1), false, [(vec![0, 0, 0, 1], c)]).unwrap();
        let d = p.partial_derivative(0);
        assert_eq!(d.terms()[&vec![0, 0, 1]], m(&[&[3.0]]));
        assert!(PolyMatrix::zero(2, (1, 1), false)
            .partial_derivative(0)
            .is_zero());
    }

    #[test]
    fn decoupled_hand_value() {
        let f = PolyMatrix::parse(EX22).unwrap();
        let v = f
            .evaluate_decoupled(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]])
            .unwrap();
        assert_eq!(v, m(&[&[0.5, 0.0], &[0.0, 0.0]]));
        let x = vec![0.3, -1.2, 2.5];
        assert_eq!(
            f.evaluate_decoupled(&[x.clone(), x.clone()]).unwrap(),
            f.evaluate(&x).unwrap()
        );
        assert!(f.evaluate_decoupled(&[x]).is_err());
    }

    #[test]
    fn gaussian_expectation() {
        let a = m(&[&[1.0, 2.0]]);
        let p2 = PolyMatrix::from_terms(1, (1, 2), false, [(vec![0, 0], a.clone())]).unwrap();
        assert_eq!(p2.expectation(&Distribution::Gaussian), a);
        let p4 = PolyMatrix::from_terms(1, (1, 2), false, [(vec![0; 4], a.clone())]).unwrap();
        assert_eq!(p4.expectation(&Distribution::Gaussian), a.scaled(3.0));
        let f = PolyMatrix::parse(EX22).unwrap();
        assert!(f.expectation(&Distribution::Rademacher).is_zero());
    }

    #[test]
    fn roundtrip() {
        let f = PolyMatrix::parse(EX22).unwrap();
        let g = PolyMatrix::parse(&f.to_json()).unwrap();
        assert_eq!(f, g);
    }
}
