use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::hullrank::FloatBasis;

use super::{ConnectionSpec, CurveSpec, PlanarityError, MIN_SAMPLES};

pub const DEFAULT_PLANARITY_TOL: f64 = 1e-6;
/// Share of degenerate samples above which the verdict is indeterminate.
pub const MAX_DEGENERATE_FRACTION: f64 = 0.2;
/// Relative singular value cutoff for the hull row space.
const HULL_RANK_TOL: f64 = 1e-10;

/// `(nabla_c' c')^k = c''^k + Gamma^k_ij c'^i c'^j` at `t`.
pub fn covariant_accel(conn: &ConnectionSpec, curve: &CurveSpec, t: f64) -> Result<Vec<f64>, PlanarityError> {
    if curve.dim() != conn.m() {
        return Err(PlanarityError::DimensionMismatch { expected: conn.m(), found: curve.dim() });
    }
    let jet = curve.jet(t)?;
    Ok(accel_from_jet(conn, &jet.position, &jet.velocity, &jet.acceleration))
}

fn accel_from_jet(conn: &ConnectionSpec, x: &[f64], v: &[f64], a: &[f64]) -> Vec<f64> {
    conn.contract(x, v).iter().zip(a).map(|(g, a)| a + g).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Relative distance `|a - proj(a)| / |a|` of `a` to the row space of
/// `rows`, in `[0, 1]`.
pub fn relative_residual(rows: &[Vec<f64>], a: &[f64]) -> f64 {
    let na = norm(a);
    if na == 0.0 {
        return 0.0;
    }
    let m = a.len();
    let h = DMatrix::from_fn(m, rows.len(), |r, c| rows[c][r]);
    let svd = h.svd(true, false);
    let u = svd.u.expect("requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let av = DVector::from_column_slice(a);
    let mut proj = DVector::zeros(m);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > HULL_RANK_TOL * smax {
            let col = u.column(k);
            proj += col * col.dot(&av);
        }
    }
    ((av - proj).norm() / na).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanarityVerdict {
    Planar,
    NotPlanar,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleResult {
    pub index: usize,
    pub t: f64,
    pub speed: f64,
    pub accel_norm: f64,
    /// `None` for degenerate tangents.
    pub residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub index: usize,
    pub t: f64,
    pub residual: f64,
    pub tangent: Vec<f64>,
    pub covariant_acceleration: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarityReport {
    pub tol: f64,
    pub samples: Vec<SampleResult>,
    pub max_residual: f64,
    pub degenerate_samples: Vec<usize>,
    pub verdict: PlanarityVerdict,
    /// Earliest sample whose residual exceeds `tol`.
    pub counterexample: Option<Counterexample>,
}

/// Tests `nabla_c' c' in A(c')` at `samples` parameter values.
///
/// A sample is degenerate when `|c'| <= tol`; its residual is skipped. The
/// residual is 0 when `|nabla_c' c'| <= tol |c'|^2`.
pub fn planarity_check(
    basis: &FloatBasis,
    conn: &ConnectionSpec,
    curve: &CurveSpec,
    samples: usize,
    tol: f64,
) -> Result<PlanarityReport, PlanarityError> {
    if samples < MIN_SAMPLES {
        return Err(PlanarityError::InsufficientSamples { found: samples, min: MIN_SAMPLES });
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(PlanarityError::InvalidTolerance(tol));
    }
    let m = basis.m();
    for (expected, found) in [(m, conn.m()), (m, curve.dim())] {
        if expected != found {
            return Err(PlanarityError::DimensionMismatch { expected, found });
        }
    }

    let mats = basis.mats();
    let mut results = Vec::new();
    let mut degenerate = Vec::new();
    let mut first_failure: Option<Counterexample> = None;
    for (index, t) in curve.sample_times(samples).into_iter().enumerate() {
        let jet = curve.jet(t)?;
        let v = &jet.velocity;
        let accel = accel_from_jet(conn, &jet.position, v, &jet.acceleration);
        let speed = norm(v);
        let accel_norm = norm(&accel);
        let residual = if speed <= tol {
            degenerate.push(index);
            None
        } else if accel_norm <= tol * speed * speed {
            Some(0.0)
        } else {
            let rows: Vec<Vec<f64>> = mats.iter().map(|f| f.mul_vec(v).expect("length m")).collect();
            Some(relative_residual(&rows, &accel))
        };
        if let Some(r) = residual {
            if r > tol && first_failure.is_none() {
                first_failure = Some(Counterexample {
                    index,
                    t: jet.t,
                    residual: r,
                    tangent: v.clone(),
                    covariant_acceleration: accel.clone(),
                });
            }
        }
        results.push(SampleResult { index, t: jet.t, speed, accel_norm, residual });
    }

    let max_residual = results.iter().filter_map(|s| s.residual).fold(0.0, f64::max);
    let verdict = if degenerate.len() as f64 > MAX_DEGENERATE_FRACTION * results.len() as f64 {
        PlanarityVerdict::Indeterminate
    } else if max_residual <= tol {
        PlanarityVerdict::Planar
    } else {
        PlanarityVerdict::NotPlanar
    };
    Ok(PlanarityReport {
        tol,
        samples: results,
        max_residual,
        degenerate_samples: degenerate,
        counterexample: if verdict == PlanarityVerdict::NotPlanar { first_failure } else { None },
        verdict,
    })
}
