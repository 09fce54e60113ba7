use super::{ConnectionSpec, CurveSpec, PlanarityError};

pub const MIN_STEPS: usize = 10;

/// Right-hand side of `x' = v`, `v' = -Gamma(x)(v, v)`.
fn field(conn: &ConnectionSpec, x: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let a = conn.contract(x, v).into_iter().map(|g| -g).collect();
    (v.to_vec(), a)
}

fn axpy(x: &[f64], h: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + h * b).collect()
}

/// Classical Runge-Kutta integration of the geodesic equation on
/// `[0, t1]` with `steps` equal steps. Velocities are attached to the
/// returned samples.
pub fn geodesic_integrate(
    conn: &ConnectionSpec,
    x0: &[f64],
    v0: &[f64],
    t1: f64,
    steps: usize,
) -> Result<CurveSpec, PlanarityError> {
    let m = conn.m();
    for len in [x0.len(), v0.len()] {
        if len != m {
            return Err(PlanarityError::DimensionMismatch { expected: m, found: len });
        }
    }
    if steps < MIN_STEPS {
        return Err(PlanarityError::TooFewSteps { steps, min: MIN_STEPS });
    }
    if !(t1 > 0.0 && t1.is_finite()) {
        return Err(PlanarityError::InvalidCurve("integration end must be positive".into()));
    }
    let h = t1 / steps as f64;
    let mut x = x0.to_vec();
    let mut v = v0.to_vec();
    let mut points = vec![x.clone()];
    let mut velocities = vec![v.clone()];
    for step in 1..=steps {
        let (k1x, k1v) = field(conn, &x, &v);
        let (k2x, k2v) = field(conn, &axpy(&x, h / 2.0, &k1x), &axpy(&v, h / 2.0, &k1v));
        let (k3x, k3v) = field(conn, &axpy(&x, h / 2.0, &k2x), &axpy(&v, h / 2.0, &k2v));
        let (k4x, k4v) = field(conn, &axpy(&x, h, &k3x), &axpy(&v, h, &k3v));
        for k in 0..m {
            x[k] += h / 6.0 * (k1x[k] + 2.0 * k2x[k] + 2.0 * k3x[k] + k4x[k]);
            v[k] += h / 6.0 * (k1v[k] + 2.0 * k2v[k] + 2.0 * k3v[k] + k4v[k]);
        }
        if x.iter().chain(&v).any(|c| !c.is_finite()) {
            return Err(PlanarityError::NonFiniteState { step });
        }
        points.push(x.clone());
        velocities.push(v.clone());
    }
    CurveSpec::sampled(0.0, h, points, Some(velocities))
}
