//! Rank, determinant and invertibility kernels.
//!
//! Exact rank uses fraction-free (Bareiss) elimination over the integers
//! after clearing row denominators. Float rank uses Gaussian elimination with
//! complete pivoting, which reveals rank well enough at the desk scale this
//! crate targets. A second, independent exact path (rational Gauss-Jordan)
//! backs determinant evaluation and certificate re-checking.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{FMat, Mat, Matrix, QMat};
use super::scalar::Rational;
use super::LinalgError;

/// Default relative tolerance for float rank decisions.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum RankMode {
    Exact,
    Float { tolerance: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankResult {
    pub rank: usize,
    /// Original row indices of the certified minor, ascending.
    pub pivot_rows: Vec<usize>,
    /// Original column indices of the certified minor, ascending.
    pub pivot_cols: Vec<usize>,
    pub mode: RankMode,
}

/// Rank of a mode-tagged matrix. `tol` is ignored in exact mode and required
/// to be positive in float mode.
pub fn rank(m: &Matrix, tol: Option<f64>) -> Result<RankResult, LinalgError> {
    match m {
        Matrix::Exact(q) => Ok(exact_rank(q)),
        Matrix::Float(f) => float_rank(f, tol.unwrap_or(DEFAULT_FLOAT_TOL)),
    }
}

/// Multiplies every row by the lcm of its denominators.
fn integer_rows(m: &QMat) -> Vec<Vec<BigInt>> {
    m.iter_rows()
        .map(|row| {
            let l = row
                .iter()
                .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter()
                .map(|q| q.numer() * (&l / q.denom()))
                .collect()
        })
        .collect()
}

/// Exact rank by Bareiss elimination with row pivoting and column skipping.
pub fn exact_rank(m: &QMat) -> RankResult {
    let (rows, cols) = m.shape();
    let mut a = integer_rows(m);
    let mut perm: Vec<usize> = (0..rows).collect();
    let mut prev = BigInt::one();
    let mut pivot_cols = Vec::new();
    let mut r = 0;

    for c in 0..cols {
        if r == rows {
            break;
        }
        // Smallest nonzero magnitude limits coefficient growth.
        let Some(p) = (r..rows)
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| a[i][c].bits())
        else {
            continue;
        };
        a.swap(r, p);
        perm.swap(r, p);

        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let piv = &pivot_row[c];
        let unit_scale = *piv == prev;
        for row in rest.iter_mut() {
            let lead = std::mem::take(&mut row[c]);
            if lead.is_zero() && unit_scale {
                continue;
            }
            for j in c + 1..cols {
                let x = &row[j];
                let y = &pivot_row[j];
                if lead.is_zero() || y.is_zero() {
                    if x.is_zero() {
                        continue;
                    }
                    row[j] = (piv * x) / &prev;
                } else {
                    let v = piv * x - &lead * y;
                    debug_assert!((&v % &prev).is_zero());
                    row[j] = v / &prev;
                }
            }
        }
        prev = a[r][c].clone();
        pivot_cols.push(c);
        r += 1;
    }

    let mut pivot_rows: Vec<usize> = perm[..r].to_vec();
    pivot_rows.sort_unstable();
    RankResult {
        rank: r,
        pivot_rows,
        pivot_cols,
        mode: RankMode::Exact,
    }
}

/// Float rank with complete pivoting. Pivots at or below `tol * max|a_ij|`
/// count as zero.
pub fn float_rank(m: &FMat, tol: f64) -> Result<RankResult, LinalgError> {
    if !(tol > 0.0) {
        return Err(LinalgError::InvalidTolerance(tol));
    }
    m.check_finite()?;
    let (rows, cols) = m.shape();
    let threshold = tol * m.max_abs();
    let mut a = m.to_rows();
    let mut rperm: Vec<usize> = (0..rows).collect();
    let mut cperm: Vec<usize> = (0..cols).collect();
    let mut r = 0;
    while r < rows.min(cols) {
        let mut best = (r, r, 0.0f64);
        for i in r..rows {
            for j in r..cols {
                if a[i][j].abs() > best.2 {
                    best = (i, j, a[i][j].abs());
                }
            }
        }
        if best.2 <= threshold || best.2 == 0.0 {
            break;
        }
        a.swap(r, best.0);
        rperm.swap(r, best.0);
        for row in a.iter_mut() {
            row.swap(r, best.1);
        }
        cperm.swap(r, best.1);
        for i in r + 1..rows {
            let f = a[i][r] / a[r][r];
            if f == 0.0 {
                continue;
            }
            for j in r..cols {
                a[i][j] -= f * a[r][j];
            }
        }
        r += 1;
    }
    let mut pivot_rows = rperm[..r].to_vec();
    let mut pivot_cols = cperm[..r].to_vec();
    pivot_rows.sort_unstable();
    pivot_cols.sort_unstable();
    Ok(RankResult {
        rank: r,
        pivot_rows,
        pivot_cols,
        mode: RankMode::Float { tolerance: tol },
    })
}

/// Reduced row echelon form over the rationals. Returns the reduced matrix
/// and its pivot columns.
pub fn rref(m: &QMat) -> (QMat, Vec<usize>) {
    let (rows, cols) = m.shape();
    let mut a = m.to_rows();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut().skip(c) {
            *x = &*x * &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in c..cols {
                if !pivot_row[j].is_zero() {
                    row[j] = &row[j] - &f * &pivot_row[j];
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (Mat::from_rows(a).expect("rectangular by construction"), pivots)
}

/// Determinant by rational Gaussian elimination.
pub fn determinant(m: &QMat) -> Result<Rational, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.shape()));
    }
    let n = m.rows();
    let mut a = m.to_rows();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    Ok(det)
}

/// Submatrix on the given rows and columns.
pub fn minor<T: Clone>(m: &Mat<T>, rows: &[usize], cols: &[usize]) -> Mat<T> {
    let data = rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| m[(i, j)].clone()))
        .collect();
    Mat::from_vec(rows.len(), cols.len(), data).expect("sizes match")
}

pub fn exact_invertible(m: &QMat) -> Result<bool, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.shape()));
    }
    Ok(exact_rank(m).rank == m.rows())
}

/// Smallest singular value compared against `tol * max|a_ij|`.
pub fn float_invertible(m: &FMat, tol: f64) -> Result<bool, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.shape()));
    }
    if !(tol > 0.0) {
        return Err(LinalgError::InvalidTolerance(tol));
    }
    m.check_finite()?;
    let n = m.rows();
    if n == 0 {
        return Ok(true);
    }
    let dm = nalgebra::DMatrix::from_row_slice(n, n, m.as_slice());
    let sv = dm.singular_values();
    let smallest = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(smallest > tol * m.max_abs())
}

pub fn invertible(m: &Matrix, tol: Option<f64>) -> Result<bool, LinalgError> {
    match m {
        Matrix::Exact(q) => exact_invertible(q),
        Matrix::Float(f) => float_invertible(f, tol.unwrap_or(DEFAULT_FLOAT_TOL)),
    }
}

/// Exact inverse by Gauss-Jordan; `None` when singular.
pub fn inverse(m: &QMat) -> Result<Option<QMat>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.shape()));
    }
    let n = m.rows();
    let mut aug = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = m.row(i).to_vec();
        row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
        aug.push(row);
    }
    let (red, pivots) = rref(&Mat::from_rows(aug)?);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return Ok(None);
    }
    let data = (0..n)
        .flat_map(|i| red.row(i)[n..].to_vec())
        .collect();
    Ok(Some(Mat::from_vec(n, n, data)?))
}
