use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::PlanarityError;

/// One monomial term `coeff * x^powers` of the symbol `Gamma^k_ij`
/// (indices 0-based).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaTerm {
    pub k: usize,
    pub i: usize,
    pub j: usize,
    pub coeff: f64,
    pub powers: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyGamma {
    pub max_degree: u32,
    pub terms: Vec<GammaTerm>,
}

/// Christoffel symbols, either constant (`constant[k][i][j]`) or polynomial
/// in position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gamma {
    Constant(Vec<Vec<Vec<f64>>>),
    Poly(PolyGamma),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConnection", into = "RawConnection")]
pub struct ConnectionSpec {
    m: usize,
    gamma: Gamma,
}

#[derive(Serialize, Deserialize)]
struct RawConnection {
    m: usize,
    gamma: Gamma,
}

impl TryFrom<RawConnection> for ConnectionSpec {
    type Error = PlanarityError;
    fn try_from(r: RawConnection) -> Result<Self, PlanarityError> {
        ConnectionSpec::new(r.m, r.gamma)
    }
}

impl From<ConnectionSpec> for RawConnection {
    fn from(c: ConnectionSpec) -> Self {
        RawConnection { m: c.m, gamma: c.gamma }
    }
}

impl ConnectionSpec {
    pub fn new(m: usize, gamma: Gamma) -> Result<Self, PlanarityError> {
        let bad = |msg: String| Err(PlanarityError::InvalidConnection(msg));
        if m == 0 {
            return bad("dimension must be positive".into());
        }
        match &gamma {
            Gamma::Constant(g) => {
                let shaped = g.len() == m && g.iter().all(|p| p.len() == m && p.iter().all(|r| r.len() == m));
                if !shaped {
                    return bad(format!("constant symbols must be an {m}x{m}x{m} array"));
                }
                if g.iter().flatten().flatten().any(|x| !x.is_finite()) {
                    return bad("non-finite Christoffel symbol".into());
                }
            }
            Gamma::Poly(p) => {
                for (idx, t) in p.terms.iter().enumerate() {
                    if t.k >= m || t.i >= m || t.j >= m {
                        return bad(format!("term {idx}: index out of range for m = {m}"));
                    }
                    if t.powers.len() != m {
                        return bad(format!("term {idx}: {} powers for {m} coordinates", t.powers.len()));
                    }
                    if t.powers.iter().sum::<u32>() > p.max_degree {
                        return bad(format!("term {idx}: degree exceeds max_degree {}", p.max_degree));
                    }
                    if !t.coeff.is_finite() {
                        return bad(format!("term {idx}: non-finite coefficient"));
                    }
                }
            }
        }
        Ok(ConnectionSpec { m, gamma })
    }

    pub fn flat(m: usize) -> Self {
        ConnectionSpec { m, gamma: Gamma::Constant(vec![vec![vec![0.0; m]; m]; m]) }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn gamma(&self) -> &Gamma {
        &self.gamma
    }

    pub fn from_json_str(text: &str) -> Result<Self, PlanarityError> {
        serde_json::from_str(text).map_err(|e| PlanarityError::InvalidConnection(e.to_string()))
    }

    /// `Gamma^k_ij(x)` as a flat array indexed `(k * m + i) * m + j`.
    pub fn symbols_at(&self, x: &[f64]) -> Vec<f64> {
        let m = self.m;
        match &self.gamma {
            Gamma::Constant(g) => g.iter().flatten().flatten().copied().collect(),
            Gamma::Poly(p) => {
                let mut out = vec![0.0; m * m * m];
                for t in &p.terms {
                    let mono: f64 = t
                        .powers
                        .iter()
                        .zip(x)
                        .map(|(&e, &xi)| xi.powi(e as i32))
                        .product();
                    out[(t.k * m + t.i) * m + t.j] += t.coeff * mono;
                }
                out
            }
        }
    }

    /// `Gamma^k_ij(x) v^i v^j` for each `k`.
    pub fn contract(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        let m = self.m;
        let g = self.symbols_at(x);
        (0..m)
            .map(|k| {
                let mut acc = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        acc += g[(k * m + i) * m + j] * v[i] * v[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// Constant symbols in coordinates `y` with `x = Q y`:
    /// `G^k_ij = (Q^-1)^k_a Gamma^a_bc Q^b_i Q^c_j`.
    pub fn linear_change(&self, q: &DMatrix<f64>) -> Result<ConnectionSpec, PlanarityError> {
        let m = self.m;
        let Gamma::Constant(g) = &self.gamma else {
            return Err(PlanarityError::InvalidConnection(
                "linear change implemented for constant symbols only".into(),
            ));
        };
        if q.shape() != (m, m) {
            return Err(PlanarityError::DimensionMismatch { expected: m, found: q.nrows() });
        }
        let qi = q
            .clone()
            .try_inverse()
            .ok_or_else(|| PlanarityError::InvalidConnection("singular change of basis".into()))?;
        let mut out = vec![vec![vec![0.0; m]; m]; m];
        for (k, plane) in out.iter_mut().enumerate() {
            for (i, row) in plane.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for a in 0..m {
                        for b in 0..m {
                            for c in 0..m {
                                acc += qi[(k, a)] * g[a][b][c] * q[(b, i)] * q[(c, j)];
                            }
                        }
                    }
                    *cell = acc;
                }
            }
        }
        ConnectionSpec::new(m, Gamma::Constant(out))
    }
}
