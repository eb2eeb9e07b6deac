//! Weighted, finely graded ring presentations and their validation.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::field::is_prime;
use crate::lattice::{positive_functional, zero_combination};
use crate::poly::{parse_polynomial, Monomial, ParseError, Polynomial};

pub type FineDegree = Vec<i64>;

/// The coefficient field of a presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    Prime(u32),
}

impl FieldSpec {
    pub fn characteristic(&self) -> u32 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => *p,
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "QQ"),
            FieldSpec::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        if matches!(t, "QQ" | "Q" | "rationals") {
            return Ok(FieldSpec::Rationals);
        }
        let inner = t
            .strip_prefix("GF(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| format!("unknown field `{t}` (expected QQ or GF(p))"))?;
        let p: u64 = inner.trim().parse().map_err(|_| format!("bad modulus in `{t}`"))?;
        if p >= (1 << 31) || !is_prime(p) {
            return Err(format!("GF({p}): modulus must be a prime below 2^31"));
        }
        Ok(FieldSpec::Prime(p as u32))
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A presentation `k[x_1..x_n] / (relations)` with a fine `Z^d` grading and
/// the wall-crossing character `lambda: Z^d -> Z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradedRingSpec {
    pub field: FieldSpec,
    pub variables: Vec<String>,
    pub fine_degrees: Vec<Vec<i64>>,
    pub lambda: Vec<i64>,
    #[serde(default)]
    pub relations: Vec<String>,
    /// User assertion that the relations form a regular sequence.
    #[serde(default)]
    pub complete_intersection: bool,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RingError {
    #[error("ring has no variables")]
    NoVariables,
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("{what}: expected {expected} entries, found {found}")]
    DimensionMismatch { what: String, expected: usize, found: usize },
    #[error("fine grading must have rank d >= 1")]
    EmptyGrading,
    #[error("relation {index} (`{text}`): {source}")]
    Parse { index: usize, text: String, source: ParseError },
    #[error("relation {index} (`{text}`) is zero")]
    ZeroRelation { index: usize, text: String },
    #[error("relation {index} (`{text}`) is not homogeneous: terms of fine degree {first:?} and {second:?}")]
    InhomogeneousRelation { index: usize, text: String, first: FineDegree, second: FineDegree },
    #[error("fine grading is not positive: {reason}")]
    NonPositiveGrading { reason: String, witness: Option<Vec<u32>> },
}

/// A checked presentation. Immutable; share it behind an `Arc`.
#[derive(Clone, Debug)]
pub struct ValidatedRing {
    spec: GradedRingSpec,
    relations: Vec<Polynomial>,
    relation_degrees: Vec<FineDegree>,
    weights: Vec<i64>,
    sigma: i64,
    flip_vector: FineDegree,
    functional: Vec<i64>,
}

pub fn validate_ring(spec: GradedRingSpec) -> Result<ValidatedRing, RingError> {
    let n = spec.variables.len();
    if n == 0 {
        return Err(RingError::NoVariables);
    }
    let mut seen = HashSet::new();
    for v in &spec.variables {
        if !seen.insert(v) {
            return Err(RingError::DuplicateVariable(v.clone()));
        }
    }
    if spec.fine_degrees.len() != n {
        return Err(RingError::DimensionMismatch {
            what: "fine_degrees".into(),
            expected: n,
            found: spec.fine_degrees.len(),
        });
    }
    let d = spec.lambda.len();
    if d == 0 {
        return Err(RingError::EmptyGrading);
    }
    for (v, deg) in spec.variables.iter().zip(&spec.fine_degrees) {
        if deg.len() != d {
            return Err(RingError::DimensionMismatch {
                what: format!("fine degree of `{v}`"),
                expected: d,
                found: deg.len(),
            });
        }
    }

    let mut relations = Vec::new();
    let mut relation_degrees = Vec::new();
    for (index, text) in spec.relations.iter().enumerate() {
        let mut p = parse_polynomial(text, &spec.variables).map_err(|source| RingError::Parse {
            index,
            text: text.clone(),
            source,
        })?;
        if let FieldSpec::Prime(q) = spec.field {
            p = reduce_mod(&p, q);
        }
        if p.is_zero() {
            return Err(RingError::ZeroRelation { index, text: text.clone() });
        }
        let mut degree: Option<FineDegree> = None;
        for (m, _) in p.terms() {
            let deg = m.degree(&spec.fine_degrees);
            match &degree {
                None => degree = Some(deg),
                Some(first) if *first != deg => {
                    return Err(RingError::InhomogeneousRelation {
                        index,
                        text: text.clone(),
                        first: first.clone(),
                        second: deg,
                    })
                }
                _ => {}
            }
        }
        relations.push(p);
        relation_degrees.push(degree.expect("nonzero relation has a term"));
    }

    let functional = match positive_functional(&spec.fine_degrees) {
        Some(l) => l,
        None => {
            let witness = zero_combination(&spec.fine_degrees, 8);
            let reason = match &witness {
                Some(c) => format!(
                    "the monomial with exponents {c:?} has fine degree 0, so its powers give infinitely many monomials in one degree"
                ),
                None => "the fine degrees do not span a pointed cone".to_string(),
            };
            return Err(RingError::NonPositiveGrading { reason, witness });
        }
    };

    let weights: Vec<i64> = spec.fine_degrees.iter().map(|g| crate::lattice::dot(&spec.lambda, g)).collect();
    let mut flip_vector = vec![0i64; d];
    for g in &spec.fine_degrees {
        for (c, x) in flip_vector.iter_mut().zip(g) {
            *c += x;
        }
    }
    for g in &relation_degrees {
        for (c, x) in flip_vector.iter_mut().zip(g) {
            *c -= x;
        }
    }
    let sigma = crate::lattice::dot(&spec.lambda, &flip_vector);

    Ok(ValidatedRing { spec, relations, relation_degrees, weights, sigma, flip_vector, functional })
}

fn reduce_mod(p: &Polynomial, q: u32) -> Polynomial {
    let q = BigInt::from(q);
    let half = &q / 2;
    let mut out = Polynomial::zero(p.nvars());
    for (m, c) in p.terms() {
        let mut r = c.mod_floor(&q);
        if r > half {
            r -= &q;
        }
        out.add_term(m.clone(), r);
    }
    out
}

impl ValidatedRing {
    pub fn spec(&self) -> &GradedRingSpec {
        &self.spec
    }
    pub fn field(&self) -> FieldSpec {
        self.spec.field
    }
    pub fn nvars(&self) -> usize {
        self.spec.variables.len()
    }
    /// Rank `d` of the fine grading.
    pub fn rank(&self) -> usize {
        self.spec.lambda.len()
    }
    pub fn names(&self) -> &[String] {
        &self.spec.variables
    }
    pub fn degrees(&self) -> &[Vec<i64>] {
        &self.spec.fine_degrees
    }
    pub fn lambda(&self) -> &[i64] {
        &self.spec.lambda
    }
    pub fn relations(&self) -> &[Polynomial] {
        &self.relations
    }
    pub fn relation_degrees(&self) -> &[FineDegree] {
        &self.relation_degrees
    }
    /// `w_i = lambda(deg x_i)`.
    pub fn weights(&self) -> &[i64] {
        &self.weights
    }
    /// `sum_i lambda(deg x_i) - sum_rel lambda(deg rel)`.
    pub fn sigma(&self) -> i64 {
        self.sigma
    }
    /// `sum_i deg x_i - sum_rel deg rel`.
    pub fn flip_vector(&self) -> &[i64] {
        &self.flip_vector
    }
    /// An integer functional that is >= 1 on every variable degree.
    pub fn positive_functional(&self) -> &[i64] {
        &self.functional
    }
    pub fn weight_of(&self, mu: &[i64]) -> i64 {
        crate::lattice::dot(&self.spec.lambda, mu)
    }

    /// Relation-free, a single relation, or asserted by the user.
    pub fn is_complete_intersection(&self) -> bool {
        self.relations.len() <= 1 || self.spec.complete_intersection
    }

    /// Krull dimension, when the complete-intersection count applies.
    pub fn ci_dimension(&self) -> Option<usize> {
        self.is_complete_intersection().then(|| self.nvars().saturating_sub(self.relations.len()))
    }

    pub fn variables_with_sign(&self, positive: bool) -> Vec<usize> {
        (0..self.nvars()).filter(|&i| if positive { self.weights[i] > 0 } else { self.weights[i] < 0 }).collect()
    }
}

/// Variable generators of `I+ = A_{>0} A` and `I- = A_{<0} A`.
pub fn irrelevant_ideals(ring: &ValidatedRing) -> (Vec<Monomial>, Vec<Monomial>) {
    let n = ring.nvars();
    let plus = ring.variables_with_sign(true).into_iter().map(|i| Monomial::var(n, i)).collect();
    let minus = ring.variables_with_sign(false).into_iter().map(|i| Monomial::var(n, i)).collect();
    (plus, minus)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeZeroGenerators {
    pub generators: Vec<Monomial>,
    /// Every weight-0 monomial of total degree at most this is generated.
    pub complete_up_to: u32,
}

/// Minimal weight-0 monomials of total degree at most `bound`, by degree and
/// then decreasing lex order.
pub fn degree_zero_generators(ring: &ValidatedRing, bound: u32) -> DegreeZeroGenerators {
    let n = ring.nvars();
    let mut kept: Vec<Monomial> = Vec::new();
    for t in 1..=bound {
        let mut layer: Vec<Monomial> = compositions(n, t)
            .into_iter()
            .map(Monomial)
            .filter(|m| m.weight(ring.weights()) == 0)
            .filter(|m| !kept.iter().any(|g| g.divides(m)))
            .collect();
        layer.sort_by(|a, b| b.cmp(a));
        kept.extend(layer);
    }
    DegreeZeroGenerators { generators: kept, complete_up_to: bound }
}

/// All exponent vectors of length `n` with entries summing to `t`.
pub(crate) fn compositions(n: usize, t: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, t: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == n {
            cur.push(t);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in 0..=t {
            cur.push(a);
            rec(n, t - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if t == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, t, &mut Vec::with_capacity(n), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn spec(vars: &[&str], degrees: &[&[i64]], lambda: &[i64], relations: &[&str]) -> GradedRingSpec {
        GradedRingSpec {
            field: FieldSpec::Rationals,
            variables: vars.iter().map(|s| s.to_string()).collect(),
            fine_degrees: degrees.iter().map(|d| d.to_vec()).collect(),
            lambda: lambda.to_vec(),
            relations: relations.iter().map(|s| s.to_string()).collect(),
            complete_intersection: false,
        }
    }

    const CONIFOLD_DEGREES: &[&[i64]] = &[&[1, 0], &[1, 0], &[0, 1], &[0, 1]];

    #[test]
    fn conifold_hypersurface_validates_with_sigma_zero() {
        let r = validate_ring(spec(&["x", "y", "u", "v"], CONIFOLD_DEGREES, &[1, -1], &["x*u - y*v"])).unwrap();
        assert_eq!(r.weights(), &[1, 1, -1, -1]);
        assert_eq!(r.sigma(), 0);
        assert_eq!(r.flip_vector(), &[1, 1]);
        assert_eq!(r.relation_degrees(), &[vec![1, 1]]);
    }

    #[test]
    fn inhomogeneous_relation_names_both_degrees() {
        let err = validate_ring(spec(&["x", "y", "u", "v"], CONIFOLD_DEGREES, &[1, -1], &["x*u - y"])).unwrap_err();
        match err {
            RingError::InhomogeneousRelation { index, first, second, .. } => {
                assert_eq!(index, 0);
                assert_eq!(first, vec![1, 1]);
                assert_eq!(second, vec![1, 0]);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn polynomial_ring_is_valid() {
        let r = validate_ring(spec(&["x", "y"], &[&[1, 0], &[0, 1]], &[2, -3], &[])).unwrap();
        assert_eq!(r.sigma(), -1);
        assert!(r.is_complete_intersection());
    }

    #[test]
    fn zero_and_nonpositive_inputs_are_rejected() {
        assert!(matches!(validate_ring(spec(&["x"], &[&[1]], &[1], &["x - x"])), Err(RingError::ZeroRelation { .. })));
        let err = validate_ring(spec(&["x", "y"], &[&[1], &[-1]], &[1], &[])).unwrap_err();
        match err {
            RingError::NonPositiveGrading { witness, .. } => assert_eq!(witness, Some(vec![1, 1])),
            e => panic!("unexpected {e}"),
        }
        assert!(matches!(validate_ring(spec(&["x"], &[&[0]], &[1], &[])), Err(RingError::NonPositiveGrading { .. })));
        assert!(matches!(
            validate_ring(spec(&["x", "x"], &[&[1], &[1]], &[1], &[])),
            Err(RingError::DuplicateVariable(_))
        ));
    }

    #[test]
    fn prime_field_relation_can_vanish() {
        let mut s = spec(&["x"], &[&[1]], &[1], &["7*x"]);
        s.field = FieldSpec::Prime(7);
        assert!(matches!(validate_ring(s), Err(RingError::ZeroRelation { .. })));
    }

    #[test]
    fn field_spec_round_trip() {
        assert_eq!("QQ".parse::<FieldSpec>().unwrap(), FieldSpec::Rationals);
        assert_eq!("GF(32003)".parse::<FieldSpec>().unwrap(), FieldSpec::Prime(32003));
        assert!("GF(4)".parse::<FieldSpec>().is_err());
        assert!("RR".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn irrelevant_ideals_sort_by_sign() {
        let r = validate_ring(spec(&["x", "y", "u", "v"], &[&[2], &[1], &[-1], &[-1]], &[1], &[]));
        // a Z^1 grading with mixed signs is not positive
        assert!(r.is_err());
        let r =
            validate_ring(spec(&["x", "y", "u", "v"], &[&[2, 0], &[1, 0], &[0, 1], &[0, 1]], &[1, -1], &[])).unwrap();
        let (p, m) = irrelevant_ideals(&r);
        assert_eq!(p, vec![Monomial::var(4, 0), Monomial::var(4, 1)]);
        assert_eq!(m, vec![Monomial::var(4, 2), Monomial::var(4, 3)]);

        let r = validate_ring(spec(&["x"], &[&[1]], &[1], &[])).unwrap();
        let (p, m) = irrelevant_ideals(&r);
        assert_eq!(p.len(), 1);
        assert!(m.is_empty());
    }

    #[test]
    fn degree_zero_generators_examples() {
        let r = validate_ring(spec(&["x", "y", "u", "v"], CONIFOLD_DEGREES, &[1, -1], &[])).unwrap();
        let g = degree_zero_generators(&r, 2);
        let names = r.names();
        let shown: Vec<String> = g.generators.iter().map(|m| m.display(names).to_string()).collect();
        assert_eq!(shown, ["x*u", "x*v", "y*u", "y*v"]);

        let r =
            validate_ring(spec(&["x", "y", "u", "v"], &[&[1, 0], &[1, 0], &[0, 1], &[0, 2]], &[1, -1], &[])).unwrap();
        let g = degree_zero_generators(&r, 3);
        let shown: Vec<String> = g.generators.iter().map(|m| m.display(r.names()).to_string()).collect();
        assert_eq!(shown, ["x*u", "y*u", "x^2*v", "x*y*v", "y^2*v"]);

        let r = validate_ring(spec(&["x"], &[&[1]], &[1], &[])).unwrap();
        assert!(degree_zero_generators(&r, 5).generators.is_empty());
    }
}
