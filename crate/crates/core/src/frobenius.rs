//! Frobenius forms of finite-dimensional algebras and their equivalence with
//! the rank of the structure-matrix module.
//!
//! For `lambda` in `R^n` the Gram matrix is `G(lambda)_ij = sum_s C_ij^s lambda_s`.
//! Its rows are the hull rows of `lambda` under the transposed left
//! operators, and its columns are the hull rows under `c_hat`, so
//! `rank G(lambda) = dim B(lambda)` for `B = span{c_hat_i}`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{chat, require_valid, AlgebraError, StructureConstants};
use crate::hullrank::{
    hull, weak_rank_witness, AffinorBasis, SearchOptions, WeakRankOutcome, TRIALS_PER_ROUND,
};
use crate::poly::{self, Poly};
use crate::sampling::{self, doubling_bound, random_int_vector};
use crate::scalarlinalg::{determinant, serde_rational, QMat, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrobeniusError {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(#[from] AlgebraError),
    #[error("lambda has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusCandidate {
    #[serde(with = "serde_rational::vec")]
    pub lambda: Vec<Rational>,
    pub gram: QMat,
    pub regular: bool,
    #[serde(with = "serde_rational")]
    pub det: Rational,
}

/// Summary of a symbolic expansion showing `det G(lambda) = 0` identically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroDeterminantProof {
    pub variables: usize,
    pub matrix_size: usize,
    pub statement: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FrobeniusStatus {
    Frobenius { witness: FrobeniusCandidate, found_by: String },
    NotFrobenius { proof: ZeroDeterminantProof },
    Undetermined { trials: usize, evidence: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusVerdict {
    #[serde(flatten)]
    pub status: FrobeniusStatus,
    /// `epsilon(sum a_i F_i) = sum a_i form_i`, present for Frobenius algebras.
    #[serde(with = "serde_rational::option_vec")]
    pub form: Option<Vec<Rational>>,
}

impl FrobeniusVerdict {
    /// `Some(true)` for Frobenius, `Some(false)` for a proven negative.
    pub fn decided(&self) -> Option<bool> {
        match self.status {
            FrobeniusStatus::Frobenius { .. } => Some(true),
            FrobeniusStatus::NotFrobenius { .. } => Some(false),
            FrobeniusStatus::Undetermined { .. } => None,
        }
    }

    fn positive(witness: FrobeniusCandidate, found_by: String) -> Self {
        let form = Some(witness.lambda.clone());
        FrobeniusVerdict { status: FrobeniusStatus::Frobenius { witness, found_by }, form }
    }
}

pub fn gram_matrix(sc: &StructureConstants, lambda: &[Rational]) -> Result<QMat, FrobeniusError> {
    let n = sc.dim();
    if lambda.len() != n {
        return Err(FrobeniusError::DimensionMismatch { expected: n, found: lambda.len() });
    }
    let mut g = QMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Rational::zero();
            for (s, l) in lambda.iter().enumerate() {
                let c = sc.get(i, j, s);
                if !c.is_zero() && !l.is_zero() {
                    acc += c * l;
                }
            }
            g[(i, j)] = acc;
        }
    }
    Ok(g)
}

pub fn gram(sc: &StructureConstants, lambda: &[Rational]) -> Result<FrobeniusCandidate, FrobeniusError> {
    let g = gram_matrix(sc, lambda)?;
    let det = determinant(&g).expect("square");
    Ok(FrobeniusCandidate {
        lambda: lambda.to_vec(),
        gram: g,
        regular: !det.is_zero(),
        det,
    })
}

/// `det G(lambda)` as a polynomial in `lambda_1..lambda_n`.
pub fn symbolic_gram_determinant(sc: &StructureConstants) -> Poly {
    let n = sc.dim();
    let entries: Vec<Vec<Poly>> = (0..n)
        .map(|i| (0..n).map(|j| Poly::linear(&sc.product_of_basis(i, j))).collect())
        .collect();
    poly::determinant(&entries, n)
}

fn random_bound(n: usize) -> i64 {
    (10 * n * n).max(1) as i64
}

/// Searches for a Frobenius form: unit vectors, all-ones, seeded random
/// integer vectors with entries bounded by `10 n^2` (doubling every
/// [`TRIALS_PER_ROUND`] trials), then the symbolic determinant when
/// `n <= opts.symbolic_threshold`.
pub fn find_frobenius_form(
    sc: &StructureConstants,
    opts: &SearchOptions,
) -> Result<FrobeniusVerdict, FrobeniusError> {
    require_valid(sc)?;
    let n = sc.dim();
    for i in 0..n {
        let c = gram(sc, &sampling::unit_vector(n, i))?;
        if c.regular {
            return Ok(FrobeniusVerdict::positive(c, format!("standard basis vector e_{}", i + 1)));
        }
    }
    let c = gram(sc, &sampling::ones(n))?;
    if c.regular {
        return Ok(FrobeniusVerdict::positive(c, "all-ones vector".into()));
    }
    let mut rng = sampling::rng(opts.seed);
    for t in 0..opts.trials {
        let bound = doubling_bound(random_bound(n), TRIALS_PER_ROUND, t);
        let c = gram(sc, &random_int_vector(&mut rng, n, bound))?;
        if c.regular {
            return Ok(FrobeniusVerdict::positive(
                c,
                format!("random trial {} (seed {}, bound {bound})", t + 1, opts.seed),
            ));
        }
    }
    if n > opts.symbolic_threshold {
        return Ok(FrobeniusVerdict {
            status: FrobeniusStatus::Undetermined {
                trials: opts.trials,
                evidence: vec![
                    format!("{} candidate functionals gave singular Gram matrices", n + 1 + opts.trials),
                    format!("symbolic expansion skipped: n = {n} exceeds threshold {}", opts.symbolic_threshold),
                ],
            },
            form: None,
        });
    }
    let det = symbolic_gram_determinant(sc);
    match poly::nonzero_point(&det) {
        Some(point) => {
            let c = gram(sc, &point)?;
            debug_assert!(c.regular);
            Ok(FrobeniusVerdict::positive(c, "nonzero point of the symbolic determinant".into()))
        }
        None => Ok(FrobeniusVerdict {
            status: FrobeniusStatus::NotFrobenius {
                proof: ZeroDeterminantProof {
                    variables: n,
                    matrix_size: n,
                    statement: format!(
                        "det G(lambda) expands to the zero polynomial in lambda_1..lambda_{n}"
                    ),
                },
            },
            form: None,
        }),
    }
}

/// The structure-matrix module `B = span{c_hat_i}` acting on `R^n`.
pub fn b_module(sc: &StructureConstants) -> Result<AffinorBasis, FrobeniusError> {
    require_valid(sc)?;
    AffinorBasis::with_full_rank_allowed(chat(sc).c_hat)
        .map_err(|e| FrobeniusError::InvalidAlgebra(AlgebraError::InvalidAlgebra(e.to_string())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `c_hat_i`, entry `(j, k) = C_ji^k`.
    CHat,
    /// `c_hat_star_i`, entry `(j, k) = C_ik^j`.
    CHatStar,
}

/// How the hull of `lambda` under one orientation relates to `G(lambda)`,
/// on the sampled `lambda`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientationCheck {
    pub orientation: Orientation,
    pub hull_equals_gram: bool,
    pub hull_equals_gram_transpose: bool,
    pub rank_matches: bool,
    pub samples: usize,
}

/// Compares hull matrices under both orientations with `G(lambda)` on the
/// standard vectors and `samples` seeded random vectors.
pub fn identification_check(
    sc: &StructureConstants,
    samples: usize,
    seed: u64,
) -> Result<Vec<OrientationCheck>, FrobeniusError> {
    require_valid(sc)?;
    let n = sc.dim();
    let ch = chat(sc);
    let mut lambdas: Vec<Vec<Rational>> = (0..n).map(|i| sampling::unit_vector(n, i)).collect();
    lambdas.push(sampling::ones(n));
    let mut rng = sampling::rng(seed);
    for _ in 0..samples {
        lambdas.push(random_int_vector(&mut rng, n, random_bound(n)));
    }
    let hull_of = |mats: &[QMat], x: &[Rational]| -> QMat {
        QMat::from_rows(mats.iter().map(|f| f.mul_vec(x).expect("n")).collect()).expect("rows")
    };
    let mut out = Vec::new();
    for (orientation, mats) in [(Orientation::CHat, &ch.c_hat), (Orientation::CHatStar, &ch.c_hat_star)] {
        let mut check = OrientationCheck {
            orientation,
            hull_equals_gram: true,
            hull_equals_gram_transpose: true,
            rank_matches: true,
            samples: lambdas.len(),
        };
        for l in &lambdas {
            let g = gram_matrix(sc, l)?;
            let h = hull_of(mats, l);
            check.hull_equals_gram &= h == g;
            check.hull_equals_gram_transpose &= h == g.transpose();
            check.rank_matches &= crate::scalarlinalg::exact_rank(&h).rank
                == crate::scalarlinalg::exact_rank(&g).rank;
        }
        out.push(check);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub frobenius: FrobeniusVerdict,
    pub module_rank: WeakRankOutcome,
    pub frobenius_decided: Option<bool>,
    pub module_decided: Option<bool>,
    /// Both sides decided and equal.
    pub agree: bool,
    /// `G(X)` is regular for the module witness `X`, when one exists.
    pub witness_cross_check: Option<bool>,
    pub orientations: Vec<OrientationCheck>,
    pub notes: Vec<String>,
}

impl ConsistencyReport {
    /// Both sides decided and they differ.
    pub fn contradiction(&self) -> bool {
        matches!((self.frobenius_decided, self.module_decided), (Some(a), Some(b)) if a != b)
    }
}

/// Runs the Frobenius search and the weak rank search on the B-module and
/// reports whether the verdicts agree.
pub fn frobenius_iff_generic_rank(
    sc: &StructureConstants,
    opts: &SearchOptions,
) -> Result<ConsistencyReport, FrobeniusError> {
    let frobenius = find_frobenius_form(sc, opts)?;
    let module = b_module(sc)?;
    let module_rank = weak_rank_witness(&module, opts);
    let module_decided = match &module_rank {
        WeakRankOutcome::Witness { .. } => Some(true),
        WeakRankOutcome::RankDeficient { .. } => Some(false),
        WeakRankOutcome::NoWitnessFound { .. } => None,
    };
    let witness_cross_check = match module_rank.certificate() {
        Some(cert) => Some(gram(sc, &cert.witness)?.regular),
        None => None,
    };
    if let FrobeniusStatus::Frobenius { witness, .. } = &frobenius.status {
        debug_assert_eq!(hull(&module, &witness.lambda).expect("n").dim, sc.dim());
    }
    let frobenius_decided = frobenius.decided();
    let orientations = identification_check(sc, 8, opts.seed)?;
    Ok(ConsistencyReport {
        agree: matches!((frobenius_decided, module_decided), (Some(a), Some(b)) if a == b),
        frobenius,
        module_rank,
        frobenius_decided,
        module_decided,
        witness_cross_check,
        orientations,
        notes: vec![
            "module rank is read as existence of X with dim B(X) = n; the pair condition 2n <= n is vacuous for m = n".into(),
            "B is spanned by c_hat_i, entry (j, k) = C_ji^k; its hull of lambda is G(lambda) transposed".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::catalog;
    use crate::scalarlinalg::int;

    fn v(x: &[i64]) -> Vec<Rational> {
        x.iter().map(|&a| int(a)).collect()
    }

    #[test]
    fn dual_number_grams() {
        let sc = catalog::dual_numbers();
        let c = gram(&sc, &v(&[0, 1])).unwrap();
        assert_eq!(c.gram, QMat::from_i64_rows(&[&[0, 1], &[1, 0]]).unwrap());
        assert_eq!(c.det, int(-1));
        assert!(c.regular);
        let c = gram(&sc, &v(&[1, 0])).unwrap();
        assert_eq!(c.gram, QMat::from_i64_rows(&[&[1, 0], &[0, 0]]).unwrap());
        assert!(!c.regular);
        assert!(gram(&sc, &v(&[0, 0])).unwrap().gram.is_zero());
        assert!(matches!(
            gram(&sc, &v(&[1])),
            Err(FrobeniusError::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn verdicts() {
        let o = SearchOptions::default();
        let d = find_frobenius_form(&catalog::dual_numbers(), &o).unwrap();
        assert_eq!(d.form, Some(v(&[0, 1])));
        let l = find_frobenius_form(&catalog::local_three(), &o).unwrap();
        assert!(matches!(l.status, FrobeniusStatus::NotFrobenius { .. }));
        assert_eq!(l.form, None);
        let m = find_frobenius_form(&catalog::matrix_algebra_2x2(), &o).unwrap();
        assert_eq!(m.decided(), Some(true));
    }

    #[test]
    fn local_three_symbolic_det_is_zero() {
        assert!(symbolic_gram_determinant(&catalog::local_three()).is_zero());
        assert!(!symbolic_gram_determinant(&catalog::quaternions()).is_zero());
    }

    #[test]
    fn undetermined_without_symbolic() {
        let o = SearchOptions { symbolic_threshold: 1, trials: 4, ..SearchOptions::default() };
        let l = find_frobenius_form(&catalog::local_three(), &o).unwrap();
        assert!(matches!(l.status, FrobeniusStatus::Undetermined { trials: 4, .. }));
    }

    #[test]
    fn invalid_algebra_rejected() {
        let bad = catalog::dual_numbers().with_entry(1, 1, 1, int(1)).with_entry(0, 0, 0, int(2));
        assert!(matches!(
            find_frobenius_form(&bad, &SearchOptions::default()),
            Err(FrobeniusError::InvalidAlgebra(_))
        ));
    }

    #[test]
    fn equivalence_on_catalog() {
        let o = SearchOptions::default();
        for (sc, expected) in [
            (catalog::trivial(), true),
            (catalog::dual_numbers(), true),
            (catalog::local_three(), false),
            (catalog::matrix_algebra_2x2(), true),
            (catalog::quaternions(), true),
        ] {
            let r = frobenius_iff_generic_rank(&sc, &o).unwrap();
            assert!(r.agree, "{r:?}");
            assert_eq!(r.frobenius_decided, Some(expected));
            assert_ne!(r.witness_cross_check, Some(false));
            let c_hat = &r.orientations[0];
            assert!(c_hat.hull_equals_gram_transpose && c_hat.rank_matches);
        }
    }

    #[test]
    fn dual_number_module_witness() {
        let m = b_module(&catalog::dual_numbers()).unwrap();
        assert_eq!(hull(&m, &v(&[0, 1])).unwrap().dim, 2);
        assert_eq!(hull(&m, &v(&[1, 0])).unwrap().dim, 1);
    }

    #[test]
    fn determinant_is_homogeneous() {
        let sc = catalog::matrix_algebra_2x2();
        let l = v(&[3, -1, 2, 5]);
        let l2: Vec<Rational> = l.iter().map(|x| x * int(2)).collect();
        let (a, b) = (gram(&sc, &l).unwrap().det, gram(&sc, &l2).unwrap().det);
        assert_eq!(b, a * int(16));
    }
}
