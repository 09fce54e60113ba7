use num_traits::Zero;

use super::matrix::{FMat, Mat, Matrix, QMat};
use super::rank::{rref, DEFAULT_FLOAT_TOL};
use super::scalar::{Rational, Scalar};
use super::LinalgError;

/// Outcome of expressing a matrix in the span of other matrices.
#[derive(Clone, Debug, PartialEq)]
pub enum SpanSolution<T> {
    InSpan(Vec<T>),
    /// `residual` is the least-squares distance: squared Frobenius norm in
    /// exact mode, plain Frobenius norm in float mode.
    NotInSpan { residual: T },
}

impl<T> SpanSolution<T> {
    pub fn coefficients(&self) -> Option<&[T]> {
        match self {
            SpanSolution::InSpan(c) => Some(c),
            SpanSolution::NotInSpan { .. } => None,
        }
    }
}

fn check_shapes<T>(basis: &[Mat<T>], target: &Mat<T>) -> Result<(), LinalgError> {
    match basis.iter().find(|b| b.shape() != target.shape()) {
        Some(b) => Err(LinalgError::ShapeMismatch(format!(
            "basis element {:?} vs target {:?}",
            b.shape(),
            target.shape()
        ))),
        None => Ok(()),
    }
}

/// Column matrix whose columns are the vectorized basis elements.
fn span_system<T: Clone>(basis: &[Mat<T>], len: usize) -> Vec<Vec<T>> {
    (0..len)
        .map(|e| basis.iter().map(|b| b.as_slice()[e].clone()).collect())
        .collect()
}

/// Exact span membership. Free coefficients (dependent basis) are set to 0.
pub fn solve_in_span_exact(
    basis: &[QMat],
    target: &QMat,
) -> Result<SpanSolution<Rational>, LinalgError> {
    check_shapes(basis, target)?;
    let n = basis.len();
    let len = target.as_slice().len();
    let mut rows = span_system(basis, len);
    for (row, t) in rows.iter_mut().zip(target.as_slice()) {
        row.push(t.clone());
    }
    let (red, pivots) = rref(&Mat::from_vec(len, n + 1, rows.into_iter().flatten().collect())?);
    if pivots.last() == Some(&n) {
        return Ok(SpanSolution::NotInSpan {
            residual: exact_residual(basis, target, &pivots[..pivots.len() - 1]),
        });
    }
    let mut coeffs = vec![Rational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        coeffs[c] = red[(r, n)].clone();
    }
    Ok(SpanSolution::InSpan(coeffs))
}

/// Squared distance from `target` to the span of the independent subset
/// `cols` of `basis`, via exact normal equations.
fn exact_residual(basis: &[QMat], target: &QMat, cols: &[usize]) -> Rational {
    let dot = |a: &[Rational], b: &[Rational]| -> Rational {
        a.iter()
            .zip(b)
            .filter(|(x, y)| !x.is_zero() && !y.is_zero())
            .map(|(x, y)| x * y)
            .sum()
    };
    let t = target.as_slice();
    if cols.is_empty() {
        return dot(t, t);
    }
    let k = cols.len();
    let mut normal = Vec::with_capacity(k);
    for &i in cols {
        let bi = basis[i].as_slice();
        let mut row: Vec<Rational> = cols.iter().map(|&j| dot(bi, basis[j].as_slice())).collect();
        row.push(dot(bi, t));
        normal.push(row);
    }
    let (red, _) = rref(&Mat::from_rows(normal).expect("square system"));
    let mut diff: Vec<Rational> = t.to_vec();
    for (r, &i) in cols.iter().enumerate() {
        let c = &red[(r, k)];
        if c.is_zero() {
            continue;
        }
        for (d, b) in diff.iter_mut().zip(basis[i].as_slice()) {
            if !b.is_zero() {
                *d -= c * b;
            }
        }
    }
    dot(&diff, &diff)
}

/// Least-squares span membership in floating point.
pub fn solve_in_span_float(
    basis: &[FMat],
    target: &FMat,
    tol: f64,
) -> Result<SpanSolution<f64>, LinalgError> {
    check_shapes(basis, target)?;
    if !(tol > 0.0) {
        return Err(LinalgError::InvalidTolerance(tol));
    }
    target.check_finite()?;
    for b in basis {
        b.check_finite()?;
    }
    let len = target.as_slice().len();
    let t = nalgebra::DVector::from_column_slice(target.as_slice());
    if basis.is_empty() {
        let r = t.norm();
        return Ok(if r <= tol {
            SpanSolution::InSpan(Vec::new())
        } else {
            SpanSolution::NotInSpan { residual: r }
        });
    }
    let a = nalgebra::DMatrix::from_fn(len, basis.len(), |e, i| basis[i].as_slice()[e]);
    let svd = a.clone().svd(true, true);
    let c = svd
        .solve(&t, f64::EPSILON * len as f64)
        .map_err(|e| LinalgError::Parse(e.to_string()))?;
    let residual = (&a * &c - &t).norm();
    Ok(if residual <= tol {
        SpanSolution::InSpan(c.iter().copied().collect())
    } else {
        SpanSolution::NotInSpan { residual }
    })
}

/// Mode-dispatching span membership; mixed modes are rejected.
pub fn solve_in_span(
    basis: &[Matrix],
    target: &Matrix,
    tol: Option<f64>,
) -> Result<SpanSolution<Scalar>, LinalgError> {
    if basis.iter().any(|b| b.mode() != target.mode()) {
        return Err(LinalgError::MixedMode("span basis and target differ in mode".into()));
    }
    match target {
        Matrix::Exact(t) => {
            let b: Vec<QMat> = basis.iter().cloned().map(Matrix::into_exact).collect::<Result<_, _>>()?;
            Ok(match solve_in_span_exact(&b, t)? {
                SpanSolution::InSpan(c) => SpanSolution::InSpan(c.into_iter().map(Scalar::Exact).collect()),
                SpanSolution::NotInSpan { residual } => SpanSolution::NotInSpan {
                    residual: Scalar::Exact(residual),
                },
            })
        }
        Matrix::Float(t) => {
            let b: Vec<FMat> = basis.iter().cloned().map(Matrix::into_float).collect::<Result<_, _>>()?;
            Ok(match solve_in_span_float(&b, t, tol.unwrap_or(DEFAULT_FLOAT_TOL))? {
                SpanSolution::InSpan(c) => SpanSolution::InSpan(c.into_iter().map(Scalar::Float).collect()),
                SpanSolution::NotInSpan { residual } => SpanSolution::NotInSpan {
                    residual: Scalar::Float(residual),
                },
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalarlinalg::scalar::int;

    fn q(rows: &[&[i64]]) -> QMat {
        QMat::from_i64_rows(rows).unwrap()
    }

    #[test]
    fn multiple_of_identity() {
        let e = QMat::identity(2);
        let sol = solve_in_span_exact(&[e.clone()], &e.scale(&int(5))).unwrap();
        assert_eq!(sol, SpanSolution::InSpan(vec![int(5)]));
    }

    #[test]
    fn rotation_squared() {
        let e = QMat::identity(2);
        let f = q(&[&[0, -1], &[1, 0]]);
        let ff = f.mul(&f).unwrap();
        let sol = solve_in_span_exact(&[e, f], &ff).unwrap();
        assert_eq!(sol, SpanSolution::InSpan(vec![int(-1), int(0)]));
    }

    #[test]
    fn outside_span() {
        let e = QMat::identity(3);
        let p = q(&[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]]);
        let t = q(&[&[0, 0, 0], &[0, 0, 0], &[0, 0, 1]]);
        match solve_in_span_exact(&[e, p], &t).unwrap() {
            // Distance from diag(0,0,1) to span{E, diag(1,0,0)} is
            // diag(0,0,1) - (1/2)(E - diag(1,0,0)) = diag(0,-1/2,1/2).
            SpanSolution::NotInSpan { residual } => {
                assert_eq!(residual, crate::scalarlinalg::scalar::ratio(1, 2))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shape_mismatch() {
        let r = solve_in_span_exact(&[QMat::identity(2)], &QMat::identity(3));
        assert!(matches!(r, Err(LinalgError::ShapeMismatch(_))));
    }

    #[test]
    fn float_agrees_with_exact() {
        let e = FMat::identity(2);
        let f = Mat::from_rows(vec![vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let t = Mat::from_rows(vec![vec![2.0, -3.0], vec![3.0, 2.0]]).unwrap();
        let c = solve_in_span_float(&[e.clone(), f], &t, 1e-9).unwrap();
        let c = c.coefficients().unwrap();
        assert!((c[0] - 2.0).abs() < 1e-12 && (c[1] - 3.0).abs() < 1e-12);
        let off = Mat::from_rows(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            solve_in_span_float(&[e], &off, 1e-9).unwrap(),
            SpanSolution::NotInSpan { .. }
        ));
    }

    #[test]
    fn dispatch_rejects_mixed() {
        let r = solve_in_span(
            &[Matrix::Float(FMat::identity(2))],
            &Matrix::Exact(QMat::identity(2)),
            None,
        );
        assert!(matches!(r, Err(LinalgError::MixedMode(_))));
    }
}
