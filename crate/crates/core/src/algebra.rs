//! Finite-dimensional algebras given by structure constants.
//!
//! Index 0 always stands for the unit `F_1 = E`. `C[i][j][k]` is the
//! coefficient of `F_k` in the product `F_i F_j`.

use num_traits::{One, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hullrank::AffinorBasis;
use crate::scalarlinalg::{
    format_rational, int, serde_rational, solve_in_span_exact, LinalgError, QMat, Rational,
    SpanSolution,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("structure constants must form an n x n x n array: {0}")]
    Shape(String),
    #[error("product F_{i} F_{j} leaves the span (squared residual {})", format_rational(.residual))]
    NotClosed { i: usize, j: usize, residual: Rational },
    #[error("not a unital associative algebra: {0}")]
    InvalidAlgebra(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstants {
    n: usize,
    c: Vec<Rational>,
}

impl StructureConstants {
    pub fn new(nested: Vec<Vec<Vec<Rational>>>) -> Result<Self, AlgebraError> {
        let n = nested.len();
        if n == 0 {
            return Err(AlgebraError::Shape("empty".into()));
        }
        if nested.iter().any(|p| p.len() != n || p.iter().any(|r| r.len() != n)) {
            return Err(AlgebraError::Shape(format!("ragged array for n = {n}")));
        }
        Ok(StructureConstants {
            n,
            c: nested.into_iter().flatten().flatten().collect(),
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> Rational) -> Self {
        let mut c = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    c.push(f(i, j, k));
                }
            }
        }
        StructureConstants { n, c }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `C_ij^k`: coefficient of `F_k` in `F_i F_j`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[(i * self.n + j) * self.n + k]
    }

    fn set(&mut self, i: usize, j: usize, k: usize, v: Rational) {
        let n = self.n;
        self.c[(i * n + j) * n + k] = v;
    }

    /// Coefficient vector of `F_i F_j`.
    pub fn product_of_basis(&self, i: usize, j: usize) -> Vec<Rational> {
        (0..self.n).map(|k| self.get(i, j, k).clone()).collect()
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<Rational>>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.product_of_basis(i, j)).collect())
            .collect()
    }

    pub fn from_json_str(text: &str) -> Result<Self, AlgebraError> {
        serde_json::from_str(text).map_err(|e| AlgebraError::Shape(e.to_string()))
    }

    /// Returns a copy with one constant replaced; handy for building broken
    /// fixtures.
    pub fn with_entry(&self, i: usize, j: usize, k: usize, v: Rational) -> Self {
        let mut out = self.clone();
        out.set(i, j, k, v);
        out
    }
}

impl Serialize for StructureConstants {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Nested<'a>(&'a StructureConstants);
        impl Serialize for Nested<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                serde_rational::vec3::serialize(&self.0.to_nested(), s)
            }
        }
        let mut st = s.serialize_struct("StructureConstants", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("C", &Nested(self))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for StructureConstants {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            #[serde(rename = "C", with = "serde_rational::vec3")]
            c: Vec<Vec<Vec<Rational>>>,
        }
        let raw = Raw::deserialize(d)?;
        let sc = StructureConstants::new(raw.c).map_err(de::Error::custom)?;
        if sc.n != raw.n {
            return Err(de::Error::custom(format!(
                "field n = {} but C has dimension {}",
                raw.n, sc.n
            )));
        }
        Ok(sc)
    }
}

/// Element `sum_i a_i F_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraElement {
    #[serde(with = "serde_rational::vec")]
    pub coeffs: Vec<Rational>,
}

impl AlgebraElement {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        AlgebraElement { coeffs }
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); n];
        coeffs[i] = Rational::one();
        AlgebraElement { coeffs }
    }

    pub fn unity(n: usize) -> Self {
        Self::basis(n, 0)
    }
}

/// `(ab)_s = sum_{i,j} a_i b_j C_ij^s`.
pub fn multiply(
    sc: &StructureConstants,
    a: &AlgebraElement,
    b: &AlgebraElement,
) -> Result<AlgebraElement, AlgebraError> {
    let n = sc.dim();
    for v in [a, b] {
        if v.coeffs.len() != n {
            return Err(AlgebraError::DimensionMismatch {
                expected: n,
                found: v.coeffs.len(),
            });
        }
    }
    let mut out = vec![Rational::zero(); n];
    for (i, ai) in a.coeffs.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, bj) in b.coeffs.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            let w = ai * bj;
            for (s, o) in out.iter_mut().enumerate() {
                let c = sc.get(i, j, s);
                if !c.is_zero() {
                    *o += &w * c;
                }
            }
        }
    }
    Ok(AlgebraElement::new(out))
}

/// Which unit law an entry violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitySide {
    /// `F_1 F_i = F_i`, i.e. `C_1i^k = delta_i^k`.
    Left,
    /// `F_i F_1 = F_i`, i.e. the first structure matrix is the identity.
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnityViolation {
    pub side: UnitySide,
    pub i: usize,
    pub k: usize,
    #[serde(with = "serde_rational")]
    pub found: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnityReport {
    pub holds: bool,
    pub violations: Vec<UnityViolation>,
}

pub fn verify_unity(sc: &StructureConstants) -> UnityReport {
    let n = sc.dim();
    let mut violations = Vec::new();
    let delta = |i: usize, k: usize| if i == k { Rational::one() } else { Rational::zero() };
    for side in [UnitySide::Left, UnitySide::Right] {
        for i in 0..n {
            for k in 0..n {
                let found = match side {
                    UnitySide::Left => sc.get(0, i, k),
                    UnitySide::Right => sc.get(i, 0, k),
                };
                if *found != delta(i, k) {
                    violations.push(UnityViolation {
                        side,
                        i,
                        k,
                        found: found.clone(),
                    });
                }
            }
        }
    }
    UnityReport {
        holds: violations.is_empty(),
        violations,
    }
}

/// Structure matrices of an algebra.
///
/// `c_hat[i]` has entry `(j, k) = C_ji^k` with `j` the row index; it is the
/// transpose of the matrix of right multiplication by `F_i` acting on
/// coefficient columns. `c_hat_star[i]` has entry `(j, k) = C_ik^j`, the
/// matrix of left multiplication by `F_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChatMatrices {
    pub c_hat: Vec<QMat>,
    pub c_hat_star: Vec<QMat>,
}

impl ChatMatrices {
    /// Matrix of `a -> a F_i` on coefficient columns (`c_hat[i]` transposed).
    pub fn right_operator(&self, i: usize) -> QMat {
        self.c_hat[i].transpose()
    }

    /// Matrix of `a -> F_i a` on coefficient columns.
    pub fn left_operator(&self, i: usize) -> &QMat {
        &self.c_hat_star[i]
    }

    /// Unity in matrix form: the first structure matrix is `E`.
    pub fn unity_holds(&self) -> bool {
        self.c_hat.first().is_some_and(QMat::is_identity)
    }

    /// Reads the structure constants back out of `c_hat`.
    pub fn rebuild(&self) -> StructureConstants {
        let n = self.c_hat.len();
        StructureConstants::from_fn(n, |j, i, k| self.c_hat[i][(j, k)].clone())
    }

    /// Reads the structure constants back out of `c_hat_star`.
    pub fn rebuild_from_star(&self) -> StructureConstants {
        let n = self.c_hat_star.len();
        StructureConstants::from_fn(n, |i, k, j| self.c_hat_star[i][(j, k)].clone())
    }
}

pub fn chat(sc: &StructureConstants) -> ChatMatrices {
    let n = sc.dim();
    let build = |f: &dyn Fn(usize, usize, usize) -> Rational| -> Vec<QMat> {
        (0..n)
            .map(|i| {
                let data = (0..n)
                    .flat_map(|j| (0..n).map(move |k| (j, k)))
                    .map(|(j, k)| f(i, j, k))
                    .collect();
                QMat::from_vec(n, n, data).expect("n x n")
            })
            .collect()
    };
    ChatMatrices {
        c_hat: build(&|i, j, k| sc.get(j, i, k).clone()),
        c_hat_star: build(&|i, j, k| sc.get(i, k, j).clone()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociativityReport {
    /// `c_hat[j] c_hat[k] = sum_s C_jk^s c_hat[s]` for every pair.
    pub holds: bool,
    /// Same identity for the starred matrices.
    pub star_holds: bool,
    /// Pairs `(j, k)` violating the unstarred identity.
    pub violations: Vec<(usize, usize)>,
    pub star_violations: Vec<(usize, usize)>,
    /// Both identities encode full associativity, so they must agree.
    pub consistent: bool,
}

fn combine(sc: &StructureConstants, j: usize, k: usize, mats: &[QMat]) -> QMat {
    let coeffs = sc.product_of_basis(j, k);
    QMat::combination(&coeffs, mats).expect("uniform shapes")
}

pub fn verify_associativity(sc: &StructureConstants) -> AssociativityReport {
    let n = sc.dim();
    let ch = chat(sc);
    let mut violations = Vec::new();
    let mut star_violations = Vec::new();
    for j in 0..n {
        for k in 0..n {
            let lhs = ch.c_hat[j].mul(&ch.c_hat[k]).expect("square");
            if lhs != combine(sc, j, k, &ch.c_hat) {
                violations.push((j, k));
            }
            let lhs = ch.c_hat_star[j].mul(&ch.c_hat_star[k]).expect("square");
            if lhs != combine(sc, j, k, &ch.c_hat_star) {
                star_violations.push((j, k));
            }
        }
    }
    AssociativityReport {
        holds: violations.is_empty(),
        star_holds: star_violations.is_empty(),
        consistent: violations.is_empty() == star_violations.is_empty(),
        violations,
        star_violations,
    }
}

/// Fails with `InvalidAlgebra` unless unity and associativity both hold.
pub fn require_valid(sc: &StructureConstants) -> Result<(), AlgebraError> {
    let u = verify_unity(sc);
    if !u.holds {
        return Err(AlgebraError::InvalidAlgebra(format!(
            "{} unity violations",
            u.violations.len()
        )));
    }
    let a = verify_associativity(sc);
    if !a.holds || !a.star_holds {
        return Err(AlgebraError::InvalidAlgebra(format!(
            "associativity fails for pairs {:?}",
            a.violations
        )));
    }
    Ok(())
}

/// Structure constants of the span of `mats` under composition, or the first
/// pair whose product leaves the span. `mats` must be linearly independent.
pub fn structure_constants_of(mats: &[QMat]) -> Result<StructureConstants, AlgebraError> {
    let n = mats.len();
    let mut sc = StructureConstants::from_fn(n, |_, _, _| Rational::zero());
    for i in 0..n {
        for j in 0..n {
            let prod = mats[i].mul(&mats[j])?;
            match solve_in_span_exact(mats, &prod)? {
                SpanSolution::InSpan(coeffs) => {
                    for (k, c) in coeffs.into_iter().enumerate() {
                        sc.set(i, j, k, c);
                    }
                }
                SpanSolution::NotInSpan { residual } => {
                    return Err(AlgebraError::NotClosed { i, j, residual })
                }
            }
        }
    }
    Ok(sc)
}

/// Structure constants of an affinor basis closed under composition.
pub fn from_affinors(basis: &AffinorBasis) -> Result<StructureConstants, AlgebraError> {
    structure_constants_of(basis.mats())
}

/// Small algebras used throughout tests, docs and the CLI fixtures.
pub mod catalog {
    use super::*;

    fn table(n: usize, products: &[((usize, usize), &[(usize, i64)])]) -> StructureConstants {
        let mut sc = StructureConstants::from_fn(n, |i, j, k| {
            // Unit row and column filled in automatically.
            if (i == 0 && j == k) || (j == 0 && i == k) {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        for &((i, j), terms) in products {
            for &(k, c) in terms {
                sc.set(i, j, k, int(c));
            }
        }
        sc
    }

    /// `<E>`, the one-dimensional algebra.
    pub fn trivial() -> StructureConstants {
        table(1, &[])
    }

    /// Dual numbers `R[x]/(x^2)` on the basis `{1, x}`.
    pub fn dual_numbers() -> StructureConstants {
        table(2, &[])
    }

    /// Complex numbers on `{1, i}`.
    pub fn complex() -> StructureConstants {
        table(2, &[((1, 1), &[(0, -1)])])
    }

    /// Split-complex numbers `R[x]/(x^2 - 1)` on `{1, x}`.
    pub fn split_complex() -> StructureConstants {
        table(2, &[((1, 1), &[(0, 1)])])
    }

    /// `R[x]/(x^2 - x)` on `{1, x}`: one idempotent besides the unit.
    pub fn idempotent_pair() -> StructureConstants {
        table(2, &[((1, 1), &[(1, 1)])])
    }

    /// Quaternions on `{1, i, j, k}`.
    pub fn quaternions() -> StructureConstants {
        table(
            4,
            &[
                ((1, 1), &[(0, -1)]),
                ((2, 2), &[(0, -1)]),
                ((3, 3), &[(0, -1)]),
                ((1, 2), &[(3, 1)]),
                ((2, 1), &[(3, -1)]),
                ((2, 3), &[(1, 1)]),
                ((3, 2), &[(1, -1)]),
                ((3, 1), &[(2, 1)]),
                ((1, 3), &[(2, -1)]),
            ],
        )
    }

    /// `R[x, y]/(x, y)^2` on `{1, x, y}`: all products of `x, y` vanish.
    pub fn local_three() -> StructureConstants {
        table(3, &[])
    }

    /// Unit adjoined to the cross product on `R^3`; not associative.
    pub fn cross_product_with_unity() -> StructureConstants {
        table(
            4,
            &[
                ((1, 2), &[(3, 1)]),
                ((2, 1), &[(3, -1)]),
                ((2, 3), &[(1, 1)]),
                ((3, 2), &[(1, -1)]),
                ((3, 1), &[(2, 1)]),
                ((1, 3), &[(2, -1)]),
            ],
        )
    }

    /// Basis `{E, E11, E12, E21}` of the real 2x2 matrices.
    pub fn matrix_units_2x2() -> Vec<QMat> {
        let e = |r: &[&[i64]]| QMat::from_i64_rows(r).unwrap();
        vec![
            e(&[&[1, 0], &[0, 1]]),
            e(&[&[1, 0], &[0, 0]]),
            e(&[&[0, 1], &[0, 0]]),
            e(&[&[0, 0], &[1, 0]]),
        ]
    }

    /// Full 2x2 matrix algebra, constants read off [`matrix_units_2x2`].
    pub fn matrix_algebra_2x2() -> StructureConstants {
        structure_constants_of(&matrix_units_2x2()).expect("matrix algebra is closed")
    }
}

#[cfg(test)]
mod tests {
    use super::catalog::*;
    use super::*;
    use crate::scalarlinalg::ratio;

    fn el(v: &[i64]) -> AlgebraElement {
        AlgebraElement::new(v.iter().map(|&x| int(x)).collect())
    }

    /// Oracle: `(F_i F_j) F_k == F_i (F_j F_k)` for every basis triple.
    fn associative_by_triples(sc: &StructureConstants) -> bool {
        let n = sc.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    let b = |t| AlgebraElement::basis(n, t);
                    let left = multiply(sc, &multiply(sc, &b(i), &b(j)).unwrap(), &b(k)).unwrap();
                    let right = multiply(sc, &b(i), &multiply(sc, &b(j), &b(k)).unwrap()).unwrap();
                    left == right
                })
            })
        })
    }

    #[test]
    fn unity_checks() {
        assert!(verify_unity(&dual_numbers()).holds);
        assert!(verify_unity(&quaternions()).holds);
        let broken = dual_numbers().with_entry(0, 1, 1, int(0));
        let rep = verify_unity(&broken);
        assert!(!rep.holds);
        assert_eq!(
            rep.violations,
            vec![UnityViolation {
                side: UnitySide::Left,
                i: 1,
                k: 1,
                found: int(0)
            }]
        );
    }

    #[test]
    fn associativity_checks_match_triple_oracle() {
        for sc in [trivial(), dual_numbers(), complex(), quaternions(), local_three(), matrix_algebra_2x2()] {
            assert!(associative_by_triples(&sc));
            let rep = verify_associativity(&sc);
            assert!(rep.holds && rep.star_holds && rep.consistent, "{rep:?}");
        }
        let bad = cross_product_with_unity();
        assert!(!associative_by_triples(&bad));
        let rep = verify_associativity(&bad);
        assert!(!rep.holds && !rep.star_holds && rep.consistent);
    }

    #[test]
    fn chat_orientation_pinned_by_complex_numbers() {
        // Row index j, column index k: c_hat[1][(j, k)] = C_{j,1}^k.
        // 1 * i = i gives entry (0, 1) = 1; i * i = -1 gives entry (1, 0) = -1.
        let ch = chat(&complex());
        assert_eq!(ch.c_hat[1], QMat::from_i64_rows(&[&[0, 1], &[-1, 0]]).unwrap());
        // The right-multiplication operator is its transpose.
        assert_eq!(ch.right_operator(1), QMat::from_i64_rows(&[&[0, -1], &[1, 0]]).unwrap());
        assert!(ch.unity_holds());
    }

    #[test]
    fn chat_dual_numbers() {
        let ch = chat(&dual_numbers());
        assert_eq!(ch.c_hat[1], QMat::from_i64_rows(&[&[0, 1], &[0, 0]]).unwrap());
        assert_eq!(ch.right_operator(1), QMat::from_i64_rows(&[&[0, 0], &[1, 0]]).unwrap());
        assert_eq!(chat(&trivial()).c_hat[0], QMat::identity(1));
    }

    #[test]
    fn chat_rebuild_is_exact() {
        for sc in [quaternions(), matrix_algebra_2x2(), cross_product_with_unity()] {
            let ch = chat(&sc);
            assert_eq!(ch.rebuild(), sc);
            assert_eq!(ch.rebuild_from_star(), sc);
        }
    }

    #[test]
    fn multiplication_examples() {
        let q = quaternions();
        assert_eq!(multiply(&q, &el(&[0, 1, 0, 0]), &el(&[0, 0, 1, 0])).unwrap(), el(&[0, 0, 0, 1]));
        let d = dual_numbers();
        assert_eq!(multiply(&d, &el(&[0, 1]), &el(&[0, 1])).unwrap(), el(&[0, 0]));
        let b = el(&[3, -2]);
        assert_eq!(multiply(&d, &AlgebraElement::unity(2), &b).unwrap(), b);
        assert!(matches!(
            multiply(&d, &el(&[1]), &b),
            Err(AlgebraError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn from_affinors_examples() {
        let i4 = QMat::from_i64_rows(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]).unwrap();
        let b = AffinorBasis::new(vec![QMat::identity(4), i4]).unwrap();
        assert_eq!(from_affinors(&b).unwrap(), complex());

        let p = QMat::diagonal(&[int(1), int(1), int(0), int(0)]);
        let b = AffinorBasis::new(vec![QMat::identity(4), p]).unwrap();
        assert_eq!(from_affinors(&b).unwrap(), idempotent_pair());

        let mut n = QMat::zeros(4, 4);
        n[(0, 1)] = int(1);
        n[(1, 2)] = int(1);
        n[(2, 3)] = int(1);
        let b = AffinorBasis::new(vec![QMat::identity(4), n]).unwrap();
        match from_affinors(&b) {
            Err(AlgebraError::NotClosed { i: 1, j: 1, residual }) => assert!(residual > ratio(0, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_round_trip() {
        let sc = quaternions();
        let text = serde_json::to_string(&sc).unwrap();
        assert!(text.starts_with(r#"{"n":4,"C":[[["1","0","0","0"]"#));
        assert_eq!(StructureConstants::from_json_str(&text).unwrap(), sc);
        assert!(StructureConstants::from_json_str(r#"{"n":2,"C":[[[1]]]}"#).is_err());
    }
}
