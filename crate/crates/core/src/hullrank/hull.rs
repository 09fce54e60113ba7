use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::scalarlinalg::{exact_rank, serde_rational, QMat, RankResult, Rational};

use super::{AffinorBasis, BasisError};

/// The hull `A(X)`: row `i` of `hull_matrix` is `F_i X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hull {
    #[serde(with = "serde_rational::vec")]
    pub base_vector: Vec<Rational>,
    pub hull_matrix: QMat,
    pub dim: usize,
    pub rank: RankResult,
}

fn check_len(basis: &AffinorBasis, x: &[Rational]) -> Result<(), BasisError> {
    if x.len() != basis.m() {
        return Err(BasisError::DimensionMismatch {
            expected: basis.m(),
            found: x.len(),
        });
    }
    Ok(())
}

pub(crate) fn hull_matrix(basis: &AffinorBasis, x: &[Rational]) -> Result<QMat, BasisError> {
    check_len(basis, x)?;
    let rows: Vec<Vec<Rational>> = basis
        .mats()
        .iter()
        .map(|f| f.mul_vec(x).expect("length checked"))
        .collect();
    Ok(QMat::from_rows(rows).expect("uniform rows"))
}

pub fn hull(basis: &AffinorBasis, x: &[Rational]) -> Result<Hull, BasisError> {
    let hull_matrix = hull_matrix(basis, x)?;
    let rank = exact_rank(&hull_matrix);
    Ok(Hull {
        base_vector: x.to_vec(),
        dim: rank.rank,
        hull_matrix,
        rank,
    })
}

/// `dim(A(X) + A(Y))`: rank of the stacked `2n x m` hull matrix.
pub fn pair_span_dim(basis: &AffinorBasis, x: &[Rational], y: &[Rational]) -> Result<usize, BasisError> {
    let hx = hull_matrix(basis, x)?;
    let hy = hull_matrix(basis, y)?;
    let stacked = QMat::vstack(&[hx, hy]).expect("same width");
    Ok(exact_rank(&stacked).rank)
}

/// `Some(q)` when `f = q E`.
pub fn scalar_multiple_of_identity(f: &QMat) -> Option<Rational> {
    if !f.is_square() {
        return None;
    }
    let n = f.rows();
    let q = if n == 0 { Rational::zero() } else { f[(0, 0)].clone() };
    let ok = (0..n).all(|i| (0..n).all(|j| if i == j { f[(i, j)] == q } else { f[(i, j)].is_zero() }));
    ok.then_some(q)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarMultiple {
    pub index: usize,
    #[serde(with = "serde_rational::option")]
    pub multiple: Option<Rational>,
}

impl ScalarMultiple {
    pub fn is_scalar(&self) -> bool {
        self.multiple.is_some()
    }
}

/// For each non-identity affinor, whether it is a scalar multiple of `E`.
pub fn scalar_multiple_check(mats: &[QMat]) -> Vec<ScalarMultiple> {
    mats.iter()
        .enumerate()
        .skip(1)
        .map(|(index, f)| ScalarMultiple {
            index,
            multiple: scalar_multiple_of_identity(f),
        })
        .collect()
}
