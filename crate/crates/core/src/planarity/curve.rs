use serde::{Deserialize, Serialize};

use super::PlanarityError;

pub const MIN_SAMPLES: usize = 5;

/// One term of a closed-form coordinate function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CurveTerm {
    /// `coeff * t^power`
    Power { coeff: f64, power: u32 },
    /// `coeff * cos(omega t)`
    Cos { coeff: f64, omega: f64 },
    /// `coeff * sin(omega t)`
    Sin { coeff: f64, omega: f64 },
}

impl CurveTerm {
    fn eval(&self, t: f64) -> f64 {
        match *self {
            CurveTerm::Power { coeff, power } => coeff * t.powi(power as i32),
            CurveTerm::Cos { coeff, omega } => coeff * (omega * t).cos(),
            CurveTerm::Sin { coeff, omega } => coeff * (omega * t).sin(),
        }
    }

    fn derivative(&self) -> Option<CurveTerm> {
        match *self {
            CurveTerm::Power { power: 0, .. } => None,
            CurveTerm::Power { coeff, power } => Some(CurveTerm::Power {
                coeff: coeff * f64::from(power),
                power: power - 1,
            }),
            CurveTerm::Cos { coeff, omega } => Some(CurveTerm::Sin { coeff: -coeff * omega, omega }),
            CurveTerm::Sin { coeff, omega } => Some(CurveTerm::Cos { coeff: coeff * omega, omega }),
        }
    }

    fn is_finite(&self) -> bool {
        match *self {
            CurveTerm::Power { coeff, .. } => coeff.is_finite(),
            CurveTerm::Cos { coeff, omega } | CurveTerm::Sin { coeff, omega } => {
                coeff.is_finite() && omega.is_finite()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormCurve {
    pub domain: [f64; 2],
    /// `coords[k]` is the sum of its terms.
    pub coords: Vec<Vec<CurveTerm>>,
}

/// Curve samples `points[i] = c(t0 + i h)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    pub t0: f64,
    pub h: f64,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocities: Option<Vec<Vec<f64>>>,
}

impl SampledCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + self.h * i as f64
    }

    /// Grid index of `t`, if `t` lies on the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let x = (t - self.t0) / self.h;
        let i = x.round();
        ((x - i).abs() <= 1e-6 && i >= 0.0 && (i as usize) < self.len()).then_some(i as usize)
    }

    fn diff(&self, weights: &[(isize, f64)], i: usize, scale: f64) -> Vec<f64> {
        let m = self.points[0].len();
        (0..m)
            .map(|k| {
                weights
                    .iter()
                    .map(|&(o, w)| w * self.points[(i as isize + o) as usize][k])
                    .sum::<f64>()
                    / scale
            })
            .collect()
    }

    /// Second-order first derivative (centered inside, one-sided at ends).
    pub fn velocity_at(&self, i: usize) -> Vec<f64> {
        if let Some(v) = &self.velocities {
            return v[i].clone();
        }
        let n = self.len();
        let w: &[(isize, f64)] = if i == 0 {
            &[(0, -3.0), (1, 4.0), (2, -1.0)]
        } else if i == n - 1 {
            &[(0, 3.0), (-1, -4.0), (-2, 1.0)]
        } else {
            &[(-1, -1.0), (1, 1.0)]
        };
        self.diff(w, i, 2.0 * self.h)
    }

    /// Second-order second derivative (centered inside, one-sided at ends).
    pub fn acceleration_at(&self, i: usize) -> Vec<f64> {
        let n = self.len();
        let w: &[(isize, f64)] = if i == 0 {
            &[(0, 2.0), (1, -5.0), (2, 4.0), (3, -1.0)]
        } else if i == n - 1 {
            &[(0, 2.0), (-1, -5.0), (-2, 4.0), (-3, -1.0)]
        } else {
            &[(-1, 1.0), (0, -2.0), (1, 1.0)]
        };
        self.diff(w, i, self.h * self.h)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", try_from = "RawCurve", into = "RawCurve")]
pub enum CurveSpec {
    ClosedForm(ClosedFormCurve),
    Sampled(SampledCurve),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawCurve {
    ClosedForm(ClosedFormCurve),
    Sampled(SampledCurve),
}

impl TryFrom<RawCurve> for CurveSpec {
    type Error = PlanarityError;
    fn try_from(r: RawCurve) -> Result<Self, PlanarityError> {
        match r {
            RawCurve::ClosedForm(c) => CurveSpec::closed_form(c.domain, c.coords),
            RawCurve::Sampled(s) => CurveSpec::sampled(s.t0, s.h, s.points, s.velocities),
        }
    }
}

impl From<CurveSpec> for RawCurve {
    fn from(c: CurveSpec) -> Self {
        match c {
            CurveSpec::ClosedForm(c) => RawCurve::ClosedForm(c),
            CurveSpec::Sampled(s) => RawCurve::Sampled(s),
        }
    }
}

/// Position, velocity and acceleration at one parameter value.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub t: f64,
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub acceleration: Vec<f64>,
}

impl CurveSpec {
    pub fn closed_form(domain: [f64; 2], coords: Vec<Vec<CurveTerm>>) -> Result<Self, PlanarityError> {
        let bad = |m: &str| Err(PlanarityError::InvalidCurve(m.into()));
        if coords.is_empty() {
            return bad("curve needs at least one coordinate");
        }
        if !(domain[0].is_finite() && domain[1].is_finite() && domain[0] < domain[1]) {
            return bad("domain must be a finite interval [t0, t1] with t0 < t1");
        }
        if !coords.iter().flatten().all(CurveTerm::is_finite) {
            return bad("non-finite curve coefficient");
        }
        Ok(CurveSpec::ClosedForm(ClosedFormCurve { domain, coords }))
    }

    pub fn sampled(
        t0: f64,
        h: f64,
        points: Vec<Vec<f64>>,
        velocities: Option<Vec<Vec<f64>>>,
    ) -> Result<Self, PlanarityError> {
        if points.len() < MIN_SAMPLES {
            return Err(PlanarityError::InsufficientSamples { found: points.len(), min: MIN_SAMPLES });
        }
        let bad = |m: &str| Err(PlanarityError::InvalidCurve(m.into()));
        if !(h > 0.0 && h.is_finite() && t0.is_finite()) {
            return bad("grid must be strictly increasing: h > 0");
        }
        let m = points[0].len();
        if m == 0 || points.iter().any(|p| p.len() != m) {
            return bad("all samples must have the same positive dimension");
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return bad("non-finite sample");
        }
        if let Some(v) = &velocities {
            if v.len() != points.len() || v.iter().any(|p| p.len() != m || p.iter().any(|x| !x.is_finite())) {
                return bad("velocity samples must match the position samples");
            }
        }
        Ok(CurveSpec::Sampled(SampledCurve { t0, h, points, velocities }))
    }

    pub fn from_json_str(text: &str) -> Result<Self, PlanarityError> {
        serde_json::from_str(text).map_err(|e| PlanarityError::InvalidCurve(e.to_string()))
    }

    pub fn dim(&self) -> usize {
        match self {
            CurveSpec::ClosedForm(c) => c.coords.len(),
            CurveSpec::Sampled(s) => s.points[0].len(),
        }
    }

    pub fn domain(&self) -> [f64; 2] {
        match self {
            CurveSpec::ClosedForm(c) => c.domain,
            CurveSpec::Sampled(s) => [s.t0, s.time(s.len() - 1)],
        }
    }

    /// Parameter values for `n` samples: evenly spaced over the domain for
    /// closed forms, evenly spread grid points for sampled curves.
    pub fn sample_times(&self, n: usize) -> Vec<f64> {
        match self {
            CurveSpec::ClosedForm(c) => {
                let [a, b] = c.domain;
                if n == 1 {
                    return vec![a];
                }
                (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
            }
            CurveSpec::Sampled(s) => {
                let len = s.len();
                if n >= len {
                    return (0..len).map(|i| s.time(i)).collect();
                }
                let mut idx: Vec<usize> = (0..n)
                    .map(|i| ((i as f64) * (len - 1) as f64 / (n - 1).max(1) as f64).round() as usize)
                    .collect();
                idx.dedup();
                idx.into_iter().map(|i| s.time(i)).collect()
            }
        }
    }

    /// Position and exact (closed form) or finite-difference (sampled)
    /// derivatives at `t`.
    pub fn jet(&self, t: f64) -> Result<Jet, PlanarityError> {
        let [a, b] = self.domain();
        let slack = 1e-9 * (b - a).abs().max(1.0);
        if !(t >= a - slack && t <= b + slack) {
            return Err(PlanarityError::OutOfDomain { t, domain: [a, b] });
        }
        match self {
            CurveSpec::ClosedForm(c) => {
                let eval = |terms: &[CurveTerm]| terms.iter().map(|x| x.eval(t)).sum::<f64>();
                let d1: Vec<Vec<CurveTerm>> =
                    c.coords.iter().map(|ts| ts.iter().filter_map(CurveTerm::derivative).collect()).collect();
                let d2: Vec<Vec<CurveTerm>> =
                    d1.iter().map(|ts| ts.iter().filter_map(CurveTerm::derivative).collect()).collect();
                Ok(Jet {
                    t,
                    position: c.coords.iter().map(|ts| eval(ts)).collect(),
                    velocity: d1.iter().map(|ts| eval(ts)).collect(),
                    acceleration: d2.iter().map(|ts| eval(ts)).collect(),
                })
            }
            CurveSpec::Sampled(s) => {
                let i = s.index_of(t).ok_or(PlanarityError::OffGrid { t })?;
                Ok(Jet {
                    t: s.time(i),
                    position: s.points[i].clone(),
                    velocity: s.velocity_at(i),
                    acceleration: s.acceleration_at(i),
                })
            }
        }
    }

    /// Curve `t -> c(a t + b)` on the preimage of the domain. Closed forms
    /// only; `a` must be positive.
    pub fn reparameterize(&self, a: f64, b: f64) -> Result<CurveSpec, PlanarityError> {
        let CurveSpec::ClosedForm(c) = self else {
            return Err(PlanarityError::InvalidCurve("reparameterization needs a closed form".into()));
        };
        if !(a > 0.0) || a.is_infinite() {
            return Err(PlanarityError::InvalidCurve("scale must be positive".into()));
        }
        let mut coords = Vec::new();
        for terms in &c.coords {
            let mut out = Vec::new();
            for term in terms {
                match *term {
                    CurveTerm::Power { coeff, power } => {
                        // (a t + b)^p by the binomial theorem
                        let mut binom = 1.0;
                        for r in 0..=power {
                            let w = coeff * binom * a.powi(r as i32) * b.powi((power - r) as i32);
                            out.push(CurveTerm::Power { coeff: w, power: r });
                            binom = binom * f64::from(power - r) / f64::from(r + 1);
                        }
                    }
                    CurveTerm::Cos { coeff, omega } => {
                        let (s, cth) = (omega * b).sin_cos();
                        out.push(CurveTerm::Cos { coeff: coeff * cth, omega: omega * a });
                        out.push(CurveTerm::Sin { coeff: -coeff * s, omega: omega * a });
                    }
                    CurveTerm::Sin { coeff, omega } => {
                        let (s, cth) = (omega * b).sin_cos();
                        out.push(CurveTerm::Sin { coeff: coeff * cth, omega: omega * a });
                        out.push(CurveTerm::Cos { coeff: coeff * s, omega: omega * a });
                    }
                }
            }
            coords.push(out);
        }
        let [t0, t1] = c.domain;
        CurveSpec::closed_form([(t0 - b) / a, (t1 - b) / a], coords)
    }
}
