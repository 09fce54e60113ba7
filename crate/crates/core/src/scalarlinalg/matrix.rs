use std::ops::{Index, IndexMut};

use num_traits::{Num, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use super::scalar::{format_rational, rational_from_json, rational_to_f64, Mode, Rational, Scalar};
use super::LinalgError;

/// Dense row-major matrix over a single scalar type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type QMat = Mat<Rational>;
pub type FMat = Mat<f64>;

impl<T> Mat<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Mat { rows, cols, data })
    }

    /// Builds from nested rows; all rows must share one length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::ShapeMismatch("ragged rows".into()));
        }
        Ok(Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T: Clone> Mat<T> {
    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Mat {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.iter_rows().map(<[T]>::to_vec).collect()
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[Mat<T>]) -> Result<Self, LinalgError> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(LinalgError::ShapeMismatch("vstack column mismatch".into()));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let data = blocks.iter().flat_map(|b| b.data.iter().cloned()).collect();
        Ok(Mat { rows, cols, data })
    }
}

impl<T: Num + Clone> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = &self[(i, j)];
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    /// Matrix product; zero entries of `self` are skipped, which keeps
    /// signed-permutation and projector products cheap.
    pub fn mul(&self, rhs: &Mat<T>) -> Result<Mat<T>, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out: Mat<T> = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::ShapeMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(self
            .iter_rows()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    fn zip_with(&self, rhs: &Mat<T>, f: impl Fn(&T, &T) -> T) -> Result<Mat<T>, LinalgError> {
        if self.shape() != rhs.shape() {
            return Err(LinalgError::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, rhs: &Mat<T>) -> Result<Mat<T>, LinalgError> {
        self.zip_with(rhs, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, rhs: &Mat<T>) -> Result<Mat<T>, LinalgError> {
        self.zip_with(rhs, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, c: &T) -> Mat<T> {
        self.map(|a| a.clone() * c.clone())
    }

    /// Block-diagonal sum of square or rectangular blocks.
    pub fn block_diag(blocks: &[Mat<T>]) -> Mat<T> {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Mat::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Linear combination `sum_i coeffs[i] * mats[i]`.
    pub fn combination(coeffs: &[T], mats: &[Mat<T>]) -> Result<Mat<T>, LinalgError> {
        let first = mats
            .first()
            .ok_or_else(|| LinalgError::ShapeMismatch("empty combination".into()))?;
        if coeffs.len() != mats.len() {
            return Err(LinalgError::ShapeMismatch(
                "coefficient count differs from matrix count".into(),
            ));
        }
        let mut acc = Mat::zeros(first.rows, first.cols);
        for (c, m) in coeffs.iter().zip(mats) {
            if c.is_zero() {
                continue;
            }
            acc = acc.add(&m.scale(c))?;
        }
        Ok(acc)
    }
}

impl QMat {
    pub fn to_f64(&self) -> FMat {
        self.map(rational_to_f64)
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self, LinalgError> {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| super::scalar::int(x)).collect())
                .collect(),
        )
    }
}

impl FMat {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn check_finite(&self) -> Result<(), LinalgError> {
        if self.data.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(LinalgError::NonFiniteEntry)
        }
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Mode-tagged matrix as read from and written to JSON.
#[derive(Clone, Debug, PartialEq)]
pub enum Matrix {
    Exact(QMat),
    Float(FMat),
}

impl Matrix {
    pub fn mode(&self) -> Mode {
        match self {
            Matrix::Exact(_) => Mode::Exact,
            Matrix::Float(_) => Mode::Float,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            Matrix::Exact(m) => m.shape(),
            Matrix::Float(m) => m.shape(),
        }
    }

    /// Builds a matrix from scalars; mixed exact/float input is rejected.
    pub fn from_scalars(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self, LinalgError> {
        let mode = entries.first().map_or(Mode::Exact, Scalar::mode);
        if entries.iter().any(|s| s.mode() != mode) {
            return Err(LinalgError::MixedMode("matrix entries mix exact and float".into()));
        }
        match mode {
            Mode::Exact => {
                let data = entries
                    .into_iter()
                    .map(|s| match s {
                        Scalar::Exact(q) => q,
                        Scalar::Float(_) => unreachable!("mode checked above"),
                    })
                    .collect();
                Ok(Matrix::Exact(Mat::from_vec(rows, cols, data)?))
            }
            Mode::Float => {
                let data: Vec<f64> = entries
                    .into_iter()
                    .map(|s| s.as_float().expect("mode checked above"))
                    .collect();
                let m = Mat::from_vec(rows, cols, data)?;
                m.check_finite()?;
                Ok(Matrix::Float(m))
            }
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        match self {
            Matrix::Exact(m) => Scalar::Exact(m[(i, j)].clone()),
            Matrix::Float(m) => Scalar::Float(m[(i, j)]),
        }
    }

    pub fn into_exact(self) -> Result<QMat, LinalgError> {
        match self {
            Matrix::Exact(m) => Ok(m),
            Matrix::Float(_) => Err(LinalgError::MixedMode("expected an exact-mode matrix".into())),
        }
    }

    pub fn into_float(self) -> Result<FMat, LinalgError> {
        match self {
            Matrix::Float(m) => Ok(m),
            Matrix::Exact(_) => Err(LinalgError::MixedMode("expected a float-mode matrix".into())),
        }
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Self, LinalgError> {
        let raw: RawMatrix = serde_json::from_value(value.clone())
            .map_err(|e| LinalgError::Parse(e.to_string()))?;
        raw.into_matrix()
    }
}

#[derive(Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    mode: Mode,
    entries: Vec<Vec<serde_json::Value>>,
}

impl RawMatrix {
    fn into_matrix(self) -> Result<Matrix, LinalgError> {
        if self.entries.len() != self.rows || self.entries.iter().any(|r| r.len() != self.cols) {
            return Err(LinalgError::ShapeMismatch(format!(
                "entries do not form a {}x{} array",
                self.rows, self.cols
            )));
        }
        let flat = self.entries.iter().flatten();
        match self.mode {
            Mode::Exact => {
                let data = flat.map(rational_from_json).collect::<Result<Vec<_>, _>>()?;
                Ok(Matrix::Exact(Mat::from_vec(self.rows, self.cols, data)?))
            }
            Mode::Float => {
                let data = flat
                    .map(|v| match v {
                        serde_json::Value::Number(n) => n.as_f64().ok_or(LinalgError::NonFiniteEntry),
                        other => Err(LinalgError::MixedMode(format!(
                            "non-numeric entry {other} in float-mode matrix"
                        ))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let m = Mat::from_vec(self.rows, self.cols, data)?;
                m.check_finite()?;
                Ok(Matrix::Float(m))
            }
        }
    }
}

fn serialize_with<S: Serializer, E: Serialize>(
    s: S,
    rows: usize,
    cols: usize,
    mode: Mode,
    entries: Vec<Vec<E>>,
) -> Result<S::Ok, S::Error> {
    let mut st = s.serialize_struct("Matrix", 4)?;
    st.serialize_field("rows", &rows)?;
    st.serialize_field("cols", &cols)?;
    st.serialize_field("mode", &mode)?;
    st.serialize_field("entries", &entries)?;
    st.end()
}

impl Serialize for QMat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let entries = self
            .iter_rows()
            .map(|r| r.iter().map(format_rational).collect())
            .collect();
        serialize_with(s, self.rows, self.cols, Mode::Exact, entries)
    }
}

impl Serialize for FMat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_with(s, self.rows, self.cols, Mode::Float, self.to_rows())
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Matrix::Exact(m) => m.serialize(s),
            Matrix::Float(m) => m.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        RawMatrix::deserialize(d)?.into_matrix().map_err(de::Error::custom)
    }
}

impl<'de> Deserialize<'de> for QMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Matrix::deserialize(d)?.into_exact().map_err(de::Error::custom)
    }
}

impl<'de> Deserialize<'de> for FMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Matrix::deserialize(d)?.into_float().map_err(de::Error::custom)
    }
}
