use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::scalarlinalg::{exact_rank, FMat, Matrix, Mode, QMat, Rational};

use super::BasisError;

/// Ordered affinors `F_1 = E, F_2, ..., F_n` acting on an `m`-dimensional
/// space, validated once at construction:
///
/// * `F_1` is exactly the `m x m` identity,
/// * the matrices are linearly independent,
/// * `n < m` (or `n <= m` when built with [`AffinorBasis::with_full_rank_allowed`]).
#[derive(Clone, Debug, PartialEq)]
pub struct AffinorBasis {
    m: usize,
    mats: Vec<QMat>,
    allow_full: bool,
}

impl AffinorBasis {
    pub fn new(mats: Vec<QMat>) -> Result<Self, BasisError> {
        Self::validate(mats, false)
    }

    /// Admits `n = m`. Needed for the structure-matrix module of an algebra,
    /// the regular Clifford representation and fine projector splittings.
    pub fn with_full_rank_allowed(mats: Vec<QMat>) -> Result<Self, BasisError> {
        Self::validate(mats, true)
    }

    fn validate(mats: Vec<QMat>, allow_full: bool) -> Result<Self, BasisError> {
        let first = mats.first().ok_or(BasisError::Empty)?;
        let m = first.rows();
        for (i, f) in mats.iter().enumerate() {
            if f.shape() != (m, m) {
                return Err(BasisError::Shape {
                    index: i,
                    found: f.shape(),
                    expected: m,
                });
            }
        }
        if !first.is_identity() {
            return Err(BasisError::FirstNotIdentity);
        }
        let n = mats.len();
        if n > m || (n == m && !allow_full) {
            return Err(BasisError::RankNotBelowDimension { n, m });
        }
        // An n-dimensional hull of any vector already proves independence.
        let probes = [crate::sampling::unit_vector(m, 0), crate::sampling::ones(m)];
        for x in &probes {
            let rows = mats.iter().map(|f| f.mul_vec(x).expect("square")).collect();
            if exact_rank(&QMat::from_rows(rows).expect("uniform rows")).rank == n {
                return Ok(AffinorBasis { m, mats, allow_full });
            }
        }
        let flat: Vec<Rational> = mats.iter().flat_map(|f| f.as_slice().iter().cloned()).collect();
        let stacked = QMat::from_vec(n, m * m, flat).expect("sizes match");
        let r = exact_rank(&stacked).rank;
        if r < n {
            return Err(BasisError::Dependent { rank: r, n });
        }
        Ok(AffinorBasis { m, mats, allow_full })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[QMat] {
        &self.mats
    }

    pub fn allows_full_rank(&self) -> bool {
        self.allow_full
    }

    pub fn to_f64(&self) -> Vec<FMat> {
        self.mats.iter().map(QMat::to_f64).collect()
    }

    /// The same affinors acting diagonally on `copies` copies of the space.
    pub fn direct_sum(&self, copies: usize) -> Result<AffinorBasis, BasisError> {
        let mats = self
            .mats
            .iter()
            .map(|f| QMat::block_diag(&vec![f.clone(); copies]))
            .collect();
        Self::validate(mats, self.allow_full)
    }

    pub fn from_json_str(text: &str) -> Result<Self, BasisError> {
        serde_json::from_str(text).map_err(|e| BasisError::Parse(e.to_string()))
    }
}

impl Serialize for AffinorBasis {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("AffinorBasis", 5)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("n", &self.n())?;
        st.serialize_field("mode", &Mode::Exact)?;
        if self.allow_full {
            st.serialize_field("allow_full", &true)?;
        } else {
            st.skip_field("allow_full")?;
        }
        st.serialize_field("mats", &self.mats)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct RawBasis {
    m: usize,
    n: usize,
    mode: Mode,
    #[serde(default)]
    allow_full: bool,
    mats: Vec<Matrix>,
}

impl RawBasis {
    fn check_header(&self) -> Result<(), BasisError> {
        if self.n != self.mats.len() {
            return Err(BasisError::Parse(format!(
                "field n = {} but {} matrices given",
                self.n,
                self.mats.len()
            )));
        }
        if let Some(f) = self.mats.iter().find(|f| f.shape() != (self.m, self.m)) {
            return Err(BasisError::Parse(format!(
                "field m = {} but a matrix has shape {:?}",
                self.m,
                f.shape()
            )));
        }
        if self.mats.iter().any(|f| f.mode() != self.mode) {
            return Err(BasisError::Mode("matrix mode differs from basis mode".into()));
        }
        Ok(())
    }
}

impl<'de> Deserialize<'de> for AffinorBasis {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawBasis::deserialize(d)?;
        raw.check_header().map_err(de::Error::custom)?;
        if raw.mode != Mode::Exact {
            return Err(de::Error::custom(BasisError::Mode(
                "certification requires an exact-mode basis".into(),
            )));
        }
        let mats = raw
            .mats
            .into_iter()
            .map(Matrix::into_exact)
            .collect::<Result<Vec<_>, _>>()
            .map_err(de::Error::custom)?;
        AffinorBasis::validate(mats, raw.allow_full).map_err(de::Error::custom)
    }
}

/// Affinors in floating point, for curve numerics. Accepts exact- or
/// float-mode basis JSON; only the identity-first rule is enforced.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatBasis {
    m: usize,
    mats: Vec<FMat>,
}

impl FloatBasis {
    pub fn new(mats: Vec<FMat>) -> Result<Self, BasisError> {
        let first = mats.first().ok_or(BasisError::Empty)?;
        let m = first.rows();
        for (i, f) in mats.iter().enumerate() {
            if f.shape() != (m, m) {
                return Err(BasisError::Shape {
                    index: i,
                    found: f.shape(),
                    expected: m,
                });
            }
            f.check_finite().map_err(|e| BasisError::Mode(e.to_string()))?;
        }
        if !first.is_identity() {
            return Err(BasisError::FirstNotIdentity);
        }
        Ok(FloatBasis { m, mats })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mats(&self) -> &[FMat] {
        &self.mats
    }

    pub fn from_json_str(text: &str) -> Result<Self, BasisError> {
        let raw: RawBasis =
            serde_json::from_str(text).map_err(|e| BasisError::Parse(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawBasis) -> Result<Self, BasisError> {
        raw.check_header()?;
        match raw.mode {
            Mode::Exact => {
                let mats = raw
                    .mats
                    .into_iter()
                    .map(Matrix::into_exact)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| BasisError::Mode(e.to_string()))?;
                let exact = AffinorBasis::validate(mats, true)?;
                Ok(FloatBasis::from(&exact))
            }
            Mode::Float => {
                let mats = raw
                    .mats
                    .into_iter()
                    .map(Matrix::into_float)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| BasisError::Mode(e.to_string()))?;
                FloatBasis::new(mats)
            }
        }
    }
}

impl Serialize for FloatBasis {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FloatBasis", 4)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("n", &self.mats.len())?;
        st.serialize_field("mode", &Mode::Float)?;
        st.serialize_field("mats", &self.mats)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for FloatBasis {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Self::from_raw(RawBasis::deserialize(d)?).map_err(de::Error::custom)
    }
}

impl From<&AffinorBasis> for FloatBasis {
    fn from(b: &AffinorBasis) -> Self {
        FloatBasis {
            m: b.m(),
            mats: b.to_f64(),
        }
    }
}
