use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{from_affinors, AlgebraError};
use crate::poly::{self, Poly};
use crate::sampling::{self, doubling_bound, random_int_vector, SearchRng};
use crate::scalarlinalg::{exact_invertible, format_rational, serde_rational, QMat, Rational};

use super::certificate::{BasisSource, CertificateKind, GenericSupport, RankCertificate};
use super::hull::{hull, pair_span_dim, scalar_multiple_of_identity, Hull};
use super::AffinorBasis;

pub const DEFAULT_TRIALS: usize = 64;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SYMBOLIC_THRESHOLD: usize = 6;
/// Random trials per bound level.
pub const TRIALS_PER_ROUND: usize = 8;
pub const INITIAL_BOUND: i64 = 4;
/// Upper limit on the number of maximal minors expanded symbolically.
pub const MAX_SYMBOLIC_MINORS: usize = 4096;

pub const THM_WITNESS: &str = "witness_implies_weak_generic_rank";
pub const THM_CLOSED_ALGEBRA: &str = "closed_algebra_with_weak_rank_has_generic_rank";
pub const THM_NONSCALAR_PAIR: &str = "nonscalar_affinor_pair_has_weak_rank_two";
pub const THM_INVERSION: &str = "algebra_with_inversion_has_weak_rank_dim";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub trials: usize,
    pub seed: u64,
    /// Symbolic fallback runs when `n` is at most this value.
    pub symbolic_threshold: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            symbolic_threshold: DEFAULT_SYMBOLIC_THRESHOLD,
        }
    }
}

/// Proof that no vector has an `n`-dimensional hull.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AbsenceProof {
    /// Every maximal minor of the hull matrix with indeterminate entries is
    /// the zero polynomial.
    SymbolicMinorsVanish { minors_checked: usize, variables: usize },
    /// The span is spanned by maps `P_i` with images of ranks `image_ranks`,
    /// and `A(X) + A(Y)` lies in the sum of the spans of `P_i X, P_i Y`, so its
    /// dimension is at most `bound = sum_i min(2, rank P_i) < required`.
    ImageRankBound { image_ranks: Vec<usize>, bound: usize, required: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WeakRankOutcome {
    Witness {
        certificate: RankCertificate,
    },
    NoWitnessFound {
        max_dim_seen: usize,
        #[serde(with = "serde_rational::vec")]
        best_vector: Vec<Rational>,
        trials: usize,
        note: String,
    },
    RankDeficient {
        proof: AbsenceProof,
        max_dim_seen: usize,
    },
}

impl WeakRankOutcome {
    pub fn certificate(&self) -> Option<&RankCertificate> {
        match self {
            WeakRankOutcome::Witness { certificate } => Some(certificate),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Inapplicability {
    DimensionTooSmall { double_rank: usize, m: usize },
    NotAnAlgebra { i: usize, j: usize, #[serde(with = "serde_rational")] residual: Rational },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GenericOutcome {
    Certified {
        certificate: RankCertificate,
    },
    Inapplicable {
        detail: Inapplicability,
    },
    NoWitnessFound {
        stage: String,
        max_dim_seen: usize,
        note: String,
    },
    RankDeficient {
        proof: AbsenceProof,
    },
}

impl GenericOutcome {
    pub fn certificate(&self) -> Option<&RankCertificate> {
        match self {
            GenericOutcome::Certified { certificate } => Some(certificate),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum InversionProbe {
    /// No singular nonzero element among the samples. Evidence, not proof.
    AllSampledInvertible { samples: usize },
    CounterexampleFound {
        #[serde(with = "serde_rational::vec")]
        coefficients: Vec<Rational>,
        element: QMat,
    },
}

/// Deterministic candidate `index` of the witness search: `e_1..e_m`, then
/// the all-ones vector.
fn deterministic_candidate(m: usize, index: usize) -> Option<(Vec<Rational>, String)> {
    if index < m {
        Some((
            sampling::unit_vector(m, index),
            format!("standard basis vector e_{}", index + 1),
        ))
    } else if index == m {
        Some((sampling::ones(m), "all-ones vector".into()))
    } else {
        None
    }
}

fn describe(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

fn nonscalar_pair(basis: &AffinorBasis) -> bool {
    basis.n() == 2 && scalar_multiple_of_identity(&basis.mats()[1]).is_none()
}

fn weak_certificate(basis: &AffinorBasis, source: &BasisSource, h: Hull, how: String) -> RankCertificate {
    let mut theorems = vec![THM_WITNESS.to_string()];
    if nonscalar_pair(basis) {
        theorems.push(THM_NONSCALAR_PAIR.to_string());
    }
    RankCertificate {
        kind: CertificateKind::Weak,
        claimed_rank: basis.n(),
        witness: h.base_vector,
        applicable_theorems: theorems,
        evidence: vec![
            format!("witness: {how}"),
            format!("hull dimension {} equals the number of affinors", h.dim),
        ],
        pivot_rows: h.rank.pivot_rows,
        pivot_cols: h.rank.pivot_cols,
        generic: None,
        basis: source.clone(),
    }
}

/// Weak certificate for a supplied vector, or `None` when its hull has
/// dimension below `n`.
pub fn certificate_for_vector(
    basis: &AffinorBasis,
    x: &[Rational],
    how: &str,
) -> Result<Option<RankCertificate>, super::BasisError> {
    let h = hull(basis, x)?;
    if h.dim < basis.n() {
        return Ok(None);
    }
    let source = BasisSource::Explicit { basis: basis.clone() };
    Ok(Some(weak_certificate(basis, &source, h, how.to_string())))
}

/// Hull matrix with entries linear in indeterminates `x_1..x_m`.
fn symbolic_hull(basis: &AffinorBasis) -> Vec<Vec<Poly>> {
    let m = basis.m();
    basis
        .mats()
        .iter()
        .map(|f| (0..m).map(|r| Poly::linear(f.row(r))).collect())
        .collect()
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[derive(Debug)]
enum SymbolicResult {
    NonZero { point: Vec<Rational>, columns: Vec<usize> },
    AllVanish { checked: usize },
    Skipped(String),
}

fn symbolic_search(basis: &AffinorBasis, opts: &SearchOptions) -> SymbolicResult {
    let (m, n) = (basis.m(), basis.n());
    if n > opts.symbolic_threshold {
        return SymbolicResult::Skipped(format!(
            "symbolic check skipped: n = {n} exceeds threshold {}",
            opts.symbolic_threshold
        ));
    }
    let count = binomial(m, n);
    if count > MAX_SYMBOLIC_MINORS {
        return SymbolicResult::Skipped(format!(
            "symbolic check skipped: {count} maximal minors exceed the limit {MAX_SYMBOLIC_MINORS}"
        ));
    }
    let h = symbolic_hull(basis);
    let mut cols: Vec<usize> = (0..n).collect();
    let mut checked = 0;
    loop {
        let sub: Vec<Vec<Poly>> = h
            .iter()
            .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
            .collect();
        let det = poly::determinant(&sub, m);
        checked += 1;
        if let Some(point) = poly::nonzero_point(&det) {
            return SymbolicResult::NonZero { point, columns: cols };
        }
        if !next_combination(&mut cols, m) {
            break;
        }
    }
    SymbolicResult::AllVanish { checked }
}

pub(crate) fn weak_search(
    basis: &AffinorBasis,
    source: &BasisSource,
    opts: &SearchOptions,
) -> WeakRankOutcome {
    let (m, n) = (basis.m(), basis.n());
    let mut best: (usize, Vec<Rational>) = (0, vec![Rational::zero(); m]);
    let mut consider = |x: Vec<Rational>| -> Option<Hull> {
        let h = hull(basis, &x).expect("length matches");
        if h.dim == n {
            return Some(h);
        }
        if h.dim > best.0 {
            best = (h.dim, x);
        }
        None
    };

    let mut index = 0;
    while let Some((x, how)) = deterministic_candidate(m, index) {
        if let Some(h) = consider(x) {
            return WeakRankOutcome::Witness {
                certificate: weak_certificate(basis, source, h, how),
            };
        }
        index += 1;
    }

    let mut rng: SearchRng = sampling::rng(opts.seed);
    for t in 0..opts.trials {
        let bound = doubling_bound(INITIAL_BOUND, TRIALS_PER_ROUND, t);
        let x = random_int_vector(&mut rng, m, bound);
        if let Some(h) = consider(x) {
            let how = format!("random trial {} (seed {}, bound {bound})", t + 1, opts.seed);
            return WeakRankOutcome::Witness {
                certificate: weak_certificate(basis, source, h, how),
            };
        }
    }

    match symbolic_search(basis, opts) {
        SymbolicResult::NonZero { point, columns } => {
            let h = hull(basis, &point).expect("length matches");
            debug_assert_eq!(h.dim, n);
            let how = format!(
                "nonzero point of the symbolic minor on columns {:?}",
                columns.iter().map(|c| c + 1).collect::<Vec<_>>()
            );
            WeakRankOutcome::Witness {
                certificate: weak_certificate(basis, source, h, how),
            }
        }
        SymbolicResult::AllVanish { checked } => WeakRankOutcome::RankDeficient {
            proof: AbsenceProof::SymbolicMinorsVanish {
                minors_checked: checked,
                variables: m,
            },
            max_dim_seen: best.0,
        },
        SymbolicResult::Skipped(note) => WeakRankOutcome::NoWitnessFound {
            max_dim_seen: best.0,
            best_vector: best.1,
            trials: opts.trials,
            note,
        },
    }
}

/// Searches for `X` with `dim A(X) = n`.
///
/// Order: `e_1..e_m`, the all-ones vector, `opts.trials` seeded random
/// integer vectors with a bound that doubles every [`TRIALS_PER_ROUND`]
/// trials, then (for `n <= opts.symbolic_threshold`) the maximal minors of
/// the symbolic hull matrix, which yield either a witness or a proof that
/// none exists.
pub fn weak_rank_witness(basis: &AffinorBasis, opts: &SearchOptions) -> WeakRankOutcome {
    let source = BasisSource::Explicit { basis: basis.clone() };
    weak_search(basis, &source, opts)
}

/// Samples elements of `span{F_i}` and reports the first singular nonzero
/// one. Tries each `F_i` first, then `opts.trials` random combinations.
pub fn inversion_probe(basis: &AffinorBasis, opts: &SearchOptions) -> InversionProbe {
    let n = basis.n();
    let combine = |coeffs: &[Rational]| -> QMat {
        QMat::combination(coeffs, basis.mats()).expect("lengths match")
    };
    let mut samples = 0;
    for i in 0..n {
        let c = sampling::unit_vector(n, i);
        samples += 1;
        let f = &basis.mats()[i];
        if !exact_invertible(f).expect("square") {
            return InversionProbe::CounterexampleFound {
                coefficients: c,
                element: f.clone(),
            };
        }
    }
    let mut rng = sampling::rng(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    for t in 0..opts.trials {
        let c = random_int_vector(&mut rng, n, doubling_bound(INITIAL_BOUND, TRIALS_PER_ROUND, t));
        samples += 1;
        let f = combine(&c);
        if !exact_invertible(&f).expect("square") {
            return InversionProbe::CounterexampleFound {
                coefficients: c,
                element: f,
            };
        }
    }
    InversionProbe::AllSampledInvertible { samples }
}

fn pair_candidates(m: usize, witness: &[Rational]) -> Vec<(Vec<Rational>, Vec<Rational>, String)> {
    let mut out = Vec::new();
    for j in 0..m {
        out.push((
            witness.to_vec(),
            sampling::unit_vector(m, j),
            format!("(witness, e_{})", j + 1),
        ));
    }
    out.push((witness.to_vec(), sampling::ones(m), "(witness, all-ones)".into()));
    for i in 0..m {
        for j in i + 1..m {
            out.push((
                sampling::unit_vector(m, i),
                sampling::unit_vector(m, j),
                format!("(e_{}, e_{})", i + 1, j + 1),
            ));
        }
    }
    out
}

/// Certifies generic rank `n`.
///
/// Requires `2n <= m` and closure of `span{F_i}` under products; then finds
/// a weak witness `X` and a pair `(X', Y)` with `dim(A(X') + A(Y)) = 2n`.
pub fn certify_generic_rank(basis: &AffinorBasis, opts: &SearchOptions) -> GenericOutcome {
    let (m, n) = (basis.m(), basis.n());
    if 2 * n > m {
        return GenericOutcome::Inapplicable {
            detail: Inapplicability::DimensionTooSmall { double_rank: 2 * n, m },
        };
    }
    let sc = match from_affinors(basis) {
        Ok(sc) => sc,
        Err(AlgebraError::NotClosed { i, j, residual }) => {
            return GenericOutcome::Inapplicable {
                detail: Inapplicability::NotAnAlgebra { i, j, residual },
            }
        }
        Err(e) => unreachable!("validated basis yields only closure errors: {e}"),
    };

    let weak = match weak_rank_witness(basis, opts) {
        WeakRankOutcome::Witness { certificate } => certificate,
        WeakRankOutcome::RankDeficient { proof, .. } => {
            return GenericOutcome::RankDeficient { proof }
        }
        WeakRankOutcome::NoWitnessFound { max_dim_seen, note, .. } => {
            return GenericOutcome::NoWitnessFound {
                stage: "weak_witness".into(),
                max_dim_seen,
                note,
            }
        }
    };

    let mut best = 0;
    let mut found: Option<(Vec<Rational>, Vec<Rational>, String)> = None;
    for (x, y, how) in pair_candidates(m, &weak.witness) {
        let d = pair_span_dim(basis, &x, &y).expect("lengths match");
        best = best.max(d);
        if d == 2 * n {
            found = Some((x, y, how));
            break;
        }
    }
    if found.is_none() {
        let mut rng = sampling::rng(opts.seed.wrapping_add(1));
        for t in 0..opts.trials {
            let bound = doubling_bound(INITIAL_BOUND, TRIALS_PER_ROUND, t);
            let y = random_int_vector(&mut rng, m, bound);
            let x = if t % 2 == 0 {
                weak.witness.clone()
            } else {
                random_int_vector(&mut rng, m, bound)
            };
            let d = pair_span_dim(basis, &x, &y).expect("lengths match");
            best = best.max(d);
            if d == 2 * n {
                found = Some((x, y, format!("random pair trial {} (seed {})", t + 1, opts.seed)));
                break;
            }
        }
    }
    let Some((pair_x, pair_y, how)) = found else {
        return GenericOutcome::NoWitnessFound {
            stage: "pair".into(),
            max_dim_seen: best,
            note: format!("no pair spanning dimension {} among the sampled pairs", 2 * n),
        };
    };

    let mut cert = weak;
    cert.kind = CertificateKind::Generic;
    cert.applicable_theorems.push(THM_CLOSED_ALGEBRA.to_string());
    cert.evidence.push(format!(
        "span of the affinors is closed under products ({n}x{n}x{n} structure constants)"
    ));
    cert.evidence.push(format!(
        "pair {how}: dim(A(X) + A(Y)) = {} with X = {}, Y = {}",
        2 * n,
        describe(&pair_x),
        describe(&pair_y)
    ));
    match inversion_probe(basis, opts) {
        InversionProbe::AllSampledInvertible { samples } => {
            cert.applicable_theorems.push(THM_INVERSION.to_string());
            cert.evidence.push(format!(
                "probabilistic: all {samples} sampled nonzero elements invertible"
            ));
        }
        InversionProbe::CounterexampleFound { coefficients, .. } => {
            cert.evidence.push(format!(
                "singular element with coefficients {}",
                describe(&coefficients)
            ));
        }
    }
    cert.generic = Some(GenericSupport {
        structure_constants: sc,
        double_rank: 2 * n,
        module_dim: m,
        pair_x,
        pair_y,
        pair_dim: 2 * n,
    });
    GenericOutcome::Certified { certificate: cert }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hullrank::verify_certificate;
    use crate::scalarlinalg::int;

    fn m(rows: &[&[i64]]) -> QMat {
        QMat::from_i64_rows(rows).unwrap()
    }

    fn rot4() -> QMat {
        m(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]])
    }

    fn nilpotent3() -> QMat {
        m(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]])
    }

    #[test]
    fn combinations_enumerate_binomial() {
        let mut c = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut c, 5) {
            count += 1;
        }
        assert_eq!(count, binomial(5, 2));
        assert_eq!(binomial(10, 3), 120);
    }

    #[test]
    fn complex_structure_has_generic_rank_two() {
        let b = AffinorBasis::new(vec![QMat::identity(4), rot4()]).unwrap();
        let out = certify_generic_rank(&b, &SearchOptions::default());
        let cert = out.certificate().expect("certified");
        assert_eq!(cert.witness, sampling::unit_vector(4, 0));
        assert!(cert.applicable_theorems.contains(&THM_NONSCALAR_PAIR.to_string()));
        assert!(cert.applicable_theorems.contains(&THM_INVERSION.to_string()));
        assert!(verify_certificate(cert).valid);
    }

    #[test]
    fn generic_rank_needs_room() {
        let b = AffinorBasis::new(vec![QMat::identity(3), nilpotent3()]).unwrap();
        assert!(weak_rank_witness(&b, &SearchOptions::default()).certificate().is_some());
        assert!(matches!(
            certify_generic_rank(&b, &SearchOptions::default()),
            GenericOutcome::Inapplicable {
                detail: Inapplicability::DimensionTooSmall { double_rank: 4, m: 3 }
            }
        ));
    }

    #[test]
    fn not_closed_is_inapplicable() {
        let n = m(&[&[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]]);
        let b = AffinorBasis::new(vec![QMat::identity(4), n]).unwrap();
        assert!(matches!(
            certify_generic_rank(&b, &SearchOptions::default()),
            GenericOutcome::Inapplicable { detail: Inapplicability::NotAnAlgebra { i: 1, j: 1, .. } }
        ));
    }

    #[test]
    fn diagonal_projectors_have_a_witness() {
        let d = |i: usize| {
            let mut v = vec![int(0); 5];
            v[i] = int(1);
            QMat::diagonal(&v)
        };
        let b = AffinorBasis::new(vec![QMat::identity(5), d(0), d(1), d(2)]).unwrap();
        let out = weak_rank_witness(&b, &SearchOptions::default());
        assert_eq!(out.certificate().unwrap().witness, sampling::ones(5));
    }

    #[test]
    fn deficient_basis_gets_a_proof() {
        // F_2 = e_1 e_2^T, F_3 = e_1 e_3^T: F_2 X and F_3 X are both multiples
        // of e_1, so dim A(X) <= 2 < 3 for every X.
        let f2 = m(&[&[0, 1, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]]);
        let f3 = m(&[&[0, 0, 1, 0], &[0, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]]);
        let b = AffinorBasis::new(vec![QMat::identity(4), f2, f3]).unwrap();
        match weak_rank_witness(&b, &SearchOptions::default()) {
            WeakRankOutcome::RankDeficient { proof, max_dim_seen } => {
                assert_eq!(max_dim_seen, 2);
                assert!(matches!(
                    proof,
                    AbsenceProof::SymbolicMinorsVanish { minors_checked: 4, variables: 4 }
                ));
            }
            other => panic!("expected proof of deficiency, got {other:?}"),
        }
    }

    #[test]
    fn symbolic_skip_reports_no_witness() {
        let f2 = m(&[&[0, 1, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]]);
        let f3 = m(&[&[0, 0, 1, 0], &[0, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]]);
        let b = AffinorBasis::new(vec![QMat::identity(4), f2, f3]).unwrap();
        let opts = SearchOptions { symbolic_threshold: 1, ..SearchOptions::default() };
        match weak_rank_witness(&b, &opts) {
            WeakRankOutcome::NoWitnessFound { max_dim_seen, trials, .. } => {
                assert_eq!(max_dim_seen, 2);
                assert_eq!(trials, DEFAULT_TRIALS);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inversion_probe_finds_singular_element() {
        let p = m(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]]);
        let b = AffinorBasis::new(vec![QMat::identity(4), p]).unwrap();
        match inversion_probe(&b, &SearchOptions::default()) {
            InversionProbe::CounterexampleFound { coefficients, .. } => {
                assert_eq!(coefficients, vec![int(0), int(1)])
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn search_is_deterministic() {
        let b = AffinorBasis::new(vec![QMat::identity(4), rot4()]).unwrap();
        let opts = SearchOptions { seed: 42, ..SearchOptions::default() };
        let a = serde_json::to_string(&certify_generic_rank(&b, &opts)).unwrap();
        let c = serde_json::to_string(&certify_generic_rank(&b, &opts)).unwrap();
        assert_eq!(a, c);
    }
}
