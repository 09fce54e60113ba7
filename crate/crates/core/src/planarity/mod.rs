//! Numerical A-planarity of curves under a linear connection on a chart of
//! `R^m`: `nabla_c' c'` must lie in the hull `A(c')` at every sample.

mod check;
mod connection;
mod curve;
mod integrate;

use thiserror::Error;

pub use check::{
    covariant_accel, planarity_check, relative_residual, Counterexample, PlanarityReport,
    PlanarityVerdict, SampleResult, DEFAULT_PLANARITY_TOL, MAX_DEGENERATE_FRACTION,
};
pub use connection::{ConnectionSpec, Gamma, GammaTerm, PolyGamma};
pub use curve::{ClosedFormCurve, CurveSpec, CurveTerm, Jet, SampledCurve, MIN_SAMPLES};
pub use integrate::{geodesic_integrate, MIN_STEPS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanarityError {
    #[error("invalid connection: {0}")]
    InvalidConnection(String),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("{found} samples given, at least {min} required")]
    InsufficientSamples { found: usize, min: usize },
    #[error("t = {t} outside the domain {domain:?}")]
    OutOfDomain { t: f64, domain: [f64; 2] },
    #[error("t = {t} is not a grid point of the sampled curve")]
    OffGrid { t: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("{steps} integration steps given, at least {min} required")]
    TooFewSteps { steps: usize, min: usize },
    #[error("integration state became non-finite at step {step}")]
    NonFiniteState { step: usize },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hullrank::FloatBasis;
    use crate::scalarlinalg::FMat;

    fn complex_basis(m: usize) -> FloatBasis {
        let mut i = FMat::zeros(m, m);
        for b in 0..m / 2 {
            i[(2 * b, 2 * b + 1)] = -1.0;
            i[(2 * b + 1, 2 * b)] = 1.0;
        }
        FloatBasis::new(vec![FMat::identity(m), i]).unwrap()
    }

    fn pow(coeff: f64, power: u32) -> CurveTerm {
        CurveTerm::Power { coeff, power }
    }

    fn helix() -> CurveSpec {
        CurveSpec::closed_form(
            [0.0, 6.0],
            vec![
                vec![CurveTerm::Cos { coeff: 1.0, omega: 1.0 }],
                vec![CurveTerm::Sin { coeff: 1.0, omega: 1.0 }],
                vec![pow(1.0, 1)],
                vec![],
            ],
        )
        .unwrap()
    }

    fn single_gamma(m: usize, k: usize, i: usize, j: usize, v: f64) -> ConnectionSpec {
        let mut g = vec![vec![vec![0.0; m]; m]; m];
        g[k][i][j] = v;
        ConnectionSpec::new(m, Gamma::Constant(g)).unwrap()
    }

    #[test]
    fn covariant_acceleration_examples() {
        let line = CurveSpec::closed_form([0.0, 1.0], vec![vec![pow(1.0, 0), pow(2.0, 1)], vec![pow(-1.0, 1)]]).unwrap();
        assert_eq!(covariant_accel(&ConnectionSpec::flat(2), &line, 0.3).unwrap(), vec![0.0, 0.0]);

        let circle = CurveSpec::closed_form(
            [0.0, 6.0],
            vec![
                vec![CurveTerm::Cos { coeff: 1.0, omega: 1.0 }],
                vec![CurveTerm::Sin { coeff: 1.0, omega: 1.0 }],
                vec![],
                vec![],
            ],
        )
        .unwrap();
        let t: f64 = 0.7;
        let a = covariant_accel(&ConnectionSpec::flat(4), &circle, t).unwrap();
        assert!((a[0] + t.cos()).abs() < 1e-15 && (a[1] + t.sin()).abs() < 1e-15);

        let e1 = CurveSpec::closed_form([0.0, 1.0], vec![vec![pow(1.0, 1)], vec![]]).unwrap();
        let a = covariant_accel(&single_gamma(2, 0, 0, 0, 1.0), &e1, 0.5).unwrap();
        assert_eq!(a, vec![1.0, 0.0]);

        assert!(matches!(
            covariant_accel(&ConnectionSpec::flat(2), &e1, 2.0),
            Err(PlanarityError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn helix_is_not_planar() {
        let r = planarity_check(&complex_basis(4), &ConnectionSpec::flat(4), &helix(), 9, 1e-6).unwrap();
        assert_eq!(r.verdict, PlanarityVerdict::NotPlanar);
        let c = r.counterexample.expect("localized");
        assert_eq!((c.index, c.t), (0, 0.0));
        // Oracle at t = 0: c' = (0,1,1,0), c'' = (-1,0,0,0), hull = {c', Ic'} =
        // {(0,1,1,0), (-1,0,0,1)}; the residual vector is (-1/2,0,0,-1/2).
        // The helix is homogeneous, so every sample has this residual.
        assert!((c.residual - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(r.samples.iter().all(|s| (s.residual.unwrap() - 0.5f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn every_curve_is_planar_in_the_plane() {
        let curve = CurveSpec::closed_form(
            [0.0, 2.0],
            vec![
                vec![pow(1.0, 3), CurveTerm::Sin { coeff: 0.5, omega: 2.0 }],
                vec![pow(1.0, 1), CurveTerm::Cos { coeff: 2.0, omega: 0.3 }],
            ],
        )
        .unwrap();
        let r = planarity_check(&complex_basis(2), &single_gamma(2, 1, 0, 1, 0.7), &curve, 25, 1e-6).unwrap();
        assert_eq!(r.verdict, PlanarityVerdict::Planar);
        assert!(r.max_residual < 1e-12);
    }

    #[test]
    fn degenerate_tangents_make_verdict_indeterminate() {
        let still = CurveSpec::closed_form([0.0, 1.0], vec![vec![pow(1.0, 0)], vec![]]).unwrap();
        let r = planarity_check(&complex_basis(2), &ConnectionSpec::flat(2), &still, 5, 1e-6).unwrap();
        assert_eq!(r.verdict, PlanarityVerdict::Indeterminate);
        assert_eq!(r.degenerate_samples.len(), 5);
    }

    #[test]
    fn flat_integration_is_a_line() {
        let c = geodesic_integrate(&ConnectionSpec::flat(3), &[1.0, 0.0, 2.0], &[0.5, -1.0, 0.0], 2.0, 20).unwrap();
        let CurveSpec::Sampled(s) = &c else { panic!() };
        let last = s.points.last().unwrap();
        assert!((last[0] - 2.0).abs() < 1e-14 && (last[1] + 2.0).abs() < 1e-14);
        assert!(matches!(
            geodesic_integrate(&ConnectionSpec::flat(3), &[0.0; 3], &[1.0; 3], 1.0, 5),
            Err(PlanarityError::TooFewSteps { .. })
        ));
    }

    #[test]
    fn blow_up_is_detected() {
        let conn = single_gamma(1, 0, 0, 0, -1.0);
        // x'' = x'^2 with x'(0) = 1 blows up at t = 1.
        assert!(matches!(
            geodesic_integrate(&conn, &[0.0], &[1.0], 3.0, 3000),
            Err(PlanarityError::NonFiniteState { .. })
        ));
    }

    #[test]
    fn sampled_finite_differences() {
        let h = 0.01;
        let pts: Vec<Vec<f64>> = (0..50).map(|i| {
            let t = i as f64 * h;
            vec![t * t, t.sin()]
        }).collect();
        let c = CurveSpec::sampled(0.0, h, pts, None).unwrap();
        let jet = c.jet(0.2).unwrap();
        assert!((jet.acceleration[0] - 2.0).abs() < 1e-9);
        assert!((jet.velocity[1] - 0.2f64.cos()).abs() < 1e-4);
        assert!((c.jet(0.0).unwrap().acceleration[0] - 2.0).abs() < 1e-8);
        assert!(matches!(c.jet(0.205), Err(PlanarityError::OffGrid { .. })));
        assert!(matches!(
            CurveSpec::sampled(0.0, h, vec![vec![0.0]; 4], None),
            Err(PlanarityError::InsufficientSamples { found: 4, min: 5 })
        ));
    }

    #[test]
    fn reparameterization_preserves_geodesics() {
        let line = CurveSpec::closed_form([0.0, 1.0], vec![vec![pow(1.0, 0), pow(2.0, 1)], vec![pow(-1.0, 1)]]).unwrap();
        let re = line.reparameterize(3.0, -0.5).unwrap();
        let r = planarity_check(&complex_basis(2), &ConnectionSpec::flat(2), &re, 7, 1e-9).unwrap();
        assert_eq!(r.max_residual, 0.0);
        let t = 0.4;
        let a = re.jet(t).unwrap().position;
        let b = line.jet(3.0 * t - 0.5).unwrap().position;
        assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    }

    #[test]
    fn json_round_trips() {
        let conn = ConnectionSpec::from_json_str(
            r#"{"m":2,"gamma":{"poly":{"max_degree":1,"terms":[{"k":1,"i":0,"j":0,"coeff":6.0,"powers":[1,0]}]}}}"#,
        )
        .unwrap();
        assert_eq!(conn.symbols_at(&[2.0, 0.0])[4], 12.0);
        assert!(ConnectionSpec::from_json_str(r#"{"m":2,"gamma":{"constant":[[[0]]]}}"#).is_err());
        let text = serde_json::to_string(&helix()).unwrap();
        assert_eq!(CurveSpec::from_json_str(&text).unwrap(), helix());
        assert!(CurveSpec::from_json_str(r#"{"sampled":{"t0":0,"h":-1,"points":[[0],[1],[2],[3],[4]]}}"#).is_err());
    }
}
