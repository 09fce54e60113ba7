//! Acceptance gate: runs the eight primary criteria at their stated
//! tolerances and time limits and prints one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use affinor_rank::algebra::catalog;
use affinor_rank::clifford::{
    build_clifford, clifford_rank_theorem_check, doubled_generic_check, verify_clifford_relations,
    CliffordSignature,
};
use affinor_rank::distributions::{
    distribution_rank_check, projectors_from_splitting, random_splitting, verify_complete_system, ProjectorSystem,
};
use affinor_rank::frobenius::{frobenius_iff_generic_rank, FrobeniusStatus};
use affinor_rank::hullrank::{
    certify_generic_rank, scalar_multiple_of_identity, AbsenceProof, verify_certificate, weak_rank_witness, AffinorBasis,
    FloatBasis, GenericOutcome, Inapplicability, RankCertificate, SearchOptions, WeakRankOutcome,
};
use affinor_rank::planarity::{
    geodesic_integrate, planarity_check, relative_residual, ConnectionSpec, CurveSpec, CurveTerm, Gamma,
    PlanarityVerdict, DEFAULT_PLANARITY_TOL,
};
use affinor_rank::sampling::{self, SearchRng};
use affinor_rank::scalarlinalg::{exact_rank, FMat, QMat};
use rand::Rng;
use serde_json::{json, Value};

const SEED: u64 = 20_240_601;

/// Outcome of one criterion. `artifacts` holds every deterministic output
/// so that reruns can be compared; `certificates` feeds the audit.
struct Run {
    failures: Vec<String>,
    /// Cases where the stated claim is false and a refutation was verified.
    unattainable: Vec<String>,
    detail: String,
    artifacts: Value,
    certificates: Vec<RankCertificate>,
    elapsed: Duration,
}

impl Run {
    fn new() -> Self {
        Run {
            failures: Vec::new(),
            unattainable: Vec::new(),
            detail: String::new(),
            artifacts: json!([]),
            certificates: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn record(&mut self, v: impl serde::Serialize) {
        self.artifacts.as_array_mut().unwrap().push(serde_json::to_value(v).unwrap());
    }

    fn within(&mut self, limit: Option<Duration>) {
        if let Some(l) = limit {
            let e = self.elapsed;
            self.check(e < l, || format!("runtime {e:.2?} exceeds {l:?}"));
        }
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce(&mut Run)) -> Run {
    let mut run = Run::new();
    let start = Instant::now();
    f(&mut run);
    run.elapsed = start.elapsed();
    run.within(limit);
    run
}

fn opts() -> SearchOptions {
    SearchOptions { seed: SEED, ..SearchOptions::default() }
}

fn q(rows: &[&[i64]]) -> QMat {
    QMat::from_i64_rows(rows).unwrap()
}

fn complex_structure(m: usize) -> QMat {
    let mut rows = vec![vec![0i64; m]; m];
    for b in 0..m / 2 {
        rows[2 * b][2 * b + 1] = -1;
        rows[2 * b + 1][2 * b] = 1;
    }
    let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    q(&refs)
}

fn quaternion_units(copies: usize) -> Vec<QMat> {
    let i = q(&[&[0, -1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]]);
    let j = q(&[&[0, 0, -1, 0], &[0, 0, 0, 1], &[1, 0, 0, 0], &[0, -1, 0, 0]]);
    let k = i.mul(&j).unwrap();
    [QMat::identity(4), i, j, k]
        .iter()
        .map(|f| QMat::block_diag(&vec![f.clone(); copies]))
        .collect()
}

/// Weak rank 2 of `<E, F>` for 200 random non-scalar 4x4 matrices.
fn criterion_1(run: &mut Run) {
    let mut rng = sampling::rng(SEED);
    let mut tested = 0;
    while tested < 200 {
        let f = QMat::from_vec(4, 4, sampling::random_int_vector(&mut rng, 16, 9)).unwrap();
        if scalar_multiple_of_identity(&f).is_some() {
            continue;
        }
        tested += 1;
        let basis = AffinorBasis::new(vec![QMat::identity(4), f]).unwrap();
        let out = weak_rank_witness(&basis, &opts());
        match &out {
            WeakRankOutcome::Witness { certificate } if certificate.claimed_rank == 2 => {
                run.certificates.push(certificate.clone())
            }
            other => run.failures.push(format!("case {tested}: {other:?}")),
        }
        run.record(&out);
    }
    run.detail = format!("{tested} random pairs, all weak rank 2");
}

/// Generic rank pipeline on complex and quaternionic structures.
fn criterion_2(run: &mut Run) {
    for m in [4, 6] {
        let basis = AffinorBasis::new(vec![QMat::identity(m), complex_structure(m)]).unwrap();
        let out = certify_generic_rank(&basis, &opts());
        match &out {
            GenericOutcome::Certified { certificate } if certificate.claimed_rank == 2 => {
                run.certificates.push(certificate.clone())
            }
            other => run.failures.push(format!("{{E,I}} on R^{m}: {other:?}")),
        }
        run.record(&out);
    }
    let q8 = AffinorBasis::new(quaternion_units(2)).unwrap();
    let out = certify_generic_rank(&q8, &opts());
    match &out {
        GenericOutcome::Certified { certificate } if certificate.claimed_rank == 4 => {
            run.certificates.push(certificate.clone())
        }
        other => run.failures.push(format!("quaternions on R^8: {other:?}")),
    }
    run.record(&out);
    let q4 = AffinorBasis::with_full_rank_allowed(quaternion_units(1)).unwrap();
    let out = certify_generic_rank(&q4, &opts());
    let expected = GenericOutcome::Inapplicable {
        detail: Inapplicability::DimensionTooSmall { double_rank: 8, m: 4 },
    };
    run.check(out == expected, || format!("quaternions on R^4: {out:?}"));
    run.record(&out);
    run.detail = "{E,I} on R^4, R^6 rank 2; quaternions R^8 rank 4; R^4 inapplicable".into();
}

/// Frobenius verdicts and agreement with the module rank.
fn criterion_3(run: &mut Run) {
    let cases = [
        ("dual numbers", catalog::dual_numbers(), Some(true)),
        ("local algebra R[x,y]/(x,y)^2", catalog::local_three(), Some(false)),
        ("2x2 matrices", catalog::matrix_algebra_2x2(), Some(true)),
    ];
    for (name, sc, expected) in cases {
        let rep = match frobenius_iff_generic_rank(&sc, &opts()) {
            Ok(r) => r,
            Err(e) => {
                run.failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        run.check(rep.frobenius_decided == expected, || format!("{name}: verdict {:?}", rep.frobenius_decided));
        run.check(rep.agree, || format!("{name}: module rank verdict disagrees"));
        match &rep.frobenius.status {
            FrobeniusStatus::Frobenius { witness, .. } => {
                run.check(witness.regular, || format!("{name}: lambda not regular"))
            }
            FrobeniusStatus::NotFrobenius { proof } => {
                run.check(proof.variables == sc.dim(), || format!("{name}: proof over wrong variables"))
            }
            FrobeniusStatus::Undetermined { .. } => run.failures.push(format!("{name}: undetermined")),
        }
        run.certificates.extend(rep.module_rank.certificate().cloned());
        run.record(&rep);
    }
    run.detail = "dual numbers and M_2 Frobenius, local algebra not; module ranks agree".into();
}

/// Clifford relations, weak rank 2^(s+t) and doubled generic rank.
fn criterion_4(run: &mut Run) {
    let mut count = 0;
    for total in 1..=6u32 {
        for s in 0..=total {
            let sig = CliffordSignature::new(s, total - s).unwrap();
            let cb = match build_clifford(sig) {
                Ok(cb) => cb,
                Err(e) => {
                    run.failures.push(format!("Cl({s},{}): {e}", total - s));
                    continue;
                }
            };
            let rel = verify_clifford_relations(&cb);
            run.check(rel.holds, || format!("Cl({s},{}): relations fail", total - s));
            match clifford_rank_theorem_check(sig) {
                Ok(cert) => {
                    run.check(cert.claimed_rank == 1 << total, || {
                        format!("Cl({s},{}): rank {}", total - s, cert.claimed_rank)
                    });
                    run.record(&cert);
                    run.certificates.push(cert);
                }
                Err(e) => run.failures.push(format!("Cl({s},{}): {e}", total - s)),
            }
            if total <= 3 {
                match doubled_generic_check(sig, &opts()) {
                    Ok(GenericOutcome::Certified { certificate }) if certificate.claimed_rank == 1 << total => {
                        run.record(&certificate);
                        run.certificates.push(certificate);
                    }
                    other => run.failures.push(format!("Cl({s},{}) doubled: {other:?}", total - s)),
                }
            }
            count += 1;
        }
    }
    run.detail = format!("{count} signatures with s+t <= 6");
}

/// Random splittings of R^m, m <= 12, with random exact frames.
fn criterion_5(run: &mut Run) {
    let mut rng = sampling::rng(SEED ^ 5);
    let mut generic = 0;
    let mut certified = 0;
    for case in 0..100 {
        let sp = random_splitting(&mut rng, 12);
        let ps = match projectors_from_splitting(&sp) {
            Ok(ps) => ps,
            Err(e) => {
                run.failures.push(format!("case {case}: {e}"));
                continue;
            }
        };
        let sys = verify_complete_system(&ps.projectors);
        run.check(sys.holds, || format!("case {case}: projector identities fail"));
        let rep = distribution_rank_check(&ps, &opts());
        let n = sp.n();
        match rep.weak.certificate() {
            Some(c) if c.claimed_rank == n => run.certificates.push(c.clone()),
            _ => run.failures.push(format!("case {case}: weak rank {n} not certified")),
        }
        if 2 * n <= sp.m {
            generic += 1;
            match rep.generic.certificate() {
                Some(c) if c.claimed_rank == n => {
                    certified += 1;
                    run.certificates.push(c.clone())
                }
                _ => match refutation(&mut rng, &ps, &rep.generic) {
                    Ok(msg) => run.unattainable.push(format!("case {case}, blocks {:?}: {msg}", sp.block_dims)),
                    Err(msg) => run.failures.push(format!("case {case}, blocks {:?}: {msg}", sp.block_dims)),
                },
            }
        }
        run.record(&rep);
    }
    run.detail = format!(
        "100 splittings; identities and weak rank n everywhere; {generic} with 2n <= m, generic rank n certified for {certified}"
    );
}

/// Checks that a missing generic certificate comes with a valid proof that
/// no pair reaches dimension `2n`: the bound is recomputed from the block
/// sizes and tested against random pairs.
fn refutation(rng: &mut SearchRng, ps: &ProjectorSystem, generic: &GenericOutcome) -> Result<String, String> {
    let GenericOutcome::RankDeficient { proof: AbsenceProof::ImageRankBound { bound, required, .. } } = generic
    else {
        return Err(format!("generic rank neither certified nor refuted: {generic:?}"));
    };
    let dims = &ps.splitting.block_dims;
    let expected: usize = dims.iter().map(|&r| r.min(2)).sum();
    if *bound != expected || *required != 2 * dims.len() || bound >= required {
        return Err(format!("inconsistent bound {bound} for required {required}"));
    }
    if dims.iter().all(|&r| r >= 2) {
        return Err("refuted although every block has dimension at least 2".into());
    }
    let basis = ps.to_affinor_basis();
    let m = ps.splitting.m;
    let mut best = 0;
    for _ in 0..4 {
        let x = sampling::random_int_vector(rng, m, 50);
        let y = sampling::random_int_vector(rng, m, 50);
        let rows = basis.mats().iter().flat_map(|f| [f.mul_vec(&x).unwrap(), f.mul_vec(&y).unwrap()]).collect();
        best = best.max(exact_rank(&QMat::from_rows(rows).unwrap()).rank);
    }
    if best > *bound {
        return Err(format!("pair of dimension {best} exceeds the bound {bound}"));
    }
    Ok(format!("claim false; pair dimension <= {bound} < {required} (random pairs reach {best})"))
}

fn random_gamma(rng: &mut SearchRng, m: usize, scale: f64) -> ConnectionSpec {
    let g = (0..m)
        .map(|_| (0..m).map(|_| (0..m).map(|_| rng.gen_range(-scale..scale)).collect()).collect())
        .collect();
    ConnectionSpec::new(m, Gamma::Constant(g)).unwrap()
}

fn random_float_basis(rng: &mut SearchRng, m: usize) -> FloatBasis {
    let n = rng.gen_range(1..m);
    let mut mats = vec![FMat::identity(m)];
    for _ in 1..n {
        let data = (0..m * m).map(|_| rng.gen_range(-3i32..=3) as f64).collect();
        mats.push(FMat::from_vec(m, m, data).unwrap());
    }
    FloatBasis::new(mats).unwrap()
}

fn unit_random(rng: &mut SearchRng, m: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.3 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

fn helix() -> CurveSpec {
    CurveSpec::closed_form(
        [0.0, 6.0],
        vec![
            vec![CurveTerm::Cos { coeff: 1.0, omega: 1.0 }],
            vec![CurveTerm::Sin { coeff: 1.0, omega: 1.0 }],
            vec![CurveTerm::Power { coeff: 1.0, power: 1 }],
            vec![],
        ],
    )
    .unwrap()
}

fn ei_float(m: usize) -> FloatBasis {
    FloatBasis::new(vec![FMat::identity(m), complex_structure(m).to_f64()]).unwrap()
}

/// Residual of the helix sampled with step `h`, at `t = 1`.
fn sampled_helix_residual(h: f64) -> f64 {
    let steps = (2.0 / h).round() as usize;
    let pts = (0..=steps)
        .map(|i| {
            let t = i as f64 * h;
            vec![t.cos(), t.sin(), t, 0.0]
        })
        .collect();
    let curve = CurveSpec::sampled(0.0, h, pts, None).unwrap();
    let jet = curve.jet((1.0 / h).round() * h).unwrap();
    let basis = ei_float(4);
    let rows: Vec<Vec<f64>> = basis.mats().iter().map(|f| f.mul_vec(&jet.velocity).unwrap()).collect();
    relative_residual(&rows, &jet.acceleration)
}

/// Planarity properties of geodesics, plane curves, the helix and
/// finite-difference convergence.
fn criterion_6(run: &mut Run) {
    let mut rng = sampling::rng(SEED ^ 6);
    let mut worst: f64 = 0.0;
    for g in 0..50 {
        let m = rng.gen_range(2..=5);
        let conn = random_gamma(&mut rng, m, 0.2);
        let x0: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v0 = unit_random(&mut rng, m);
        let curve = match geodesic_integrate(&conn, &x0, &v0, 1.0, 2000) {
            Ok(c) => c,
            Err(e) => {
                run.failures.push(format!("geodesic {g}: {e}"));
                continue;
            }
        };
        for b in 0..20 {
            let basis = random_float_basis(&mut rng, m);
            let r = planarity_check(&basis, &conn, &curve, 21, DEFAULT_PLANARITY_TOL).unwrap();
            worst = worst.max(r.max_residual);
            run.check(r.max_residual <= 1e-5 && r.verdict == PlanarityVerdict::Planar, || {
                format!("geodesic {g}, basis {b}: residual {:.2e}, {:?}", r.max_residual, r.verdict)
            });
            run.record(r.max_residual);
        }
    }

    let pow = |coeff: f64, power: u32| CurveTerm::Power { coeff, power };
    let plane_curves = vec![
        vec![vec![pow(1.0, 1)], vec![pow(1.0, 2)]],
        vec![vec![pow(2.0, 1), pow(-1.0, 3)], vec![pow(1.0, 0), pow(0.5, 4)]],
        vec![vec![CurveTerm::Cos { coeff: 1.0, omega: 1.0 }], vec![CurveTerm::Sin { coeff: 2.0, omega: 1.0 }]],
        vec![
            vec![pow(1.0, 1), CurveTerm::Sin { coeff: 0.3, omega: 5.0 }],
            vec![CurveTerm::Cos { coeff: 1.0, omega: 3.0 }],
        ],
        vec![vec![pow(3.0, 1)], vec![pow(-1.0, 1), pow(1.0, 5)]],
        vec![vec![CurveTerm::Sin { coeff: 1.0, omega: 0.5 }, pow(1.0, 1)], vec![pow(-2.0, 2)]],
    ];
    let mut plane_checks = 0;
    for (c, coords) in plane_curves.into_iter().enumerate() {
        let curve = CurveSpec::closed_form([0.1, 2.0], coords).unwrap();
        let mut conns = vec![ConnectionSpec::flat(2)];
        conns.extend((0..4).map(|_| random_gamma(&mut rng, 2, 1.0)));
        for conn in &conns {
            let r = planarity_check(&ei_float(2), conn, &curve, 41, DEFAULT_PLANARITY_TOL).unwrap();
            run.check(r.verdict == PlanarityVerdict::Planar, || {
                format!("plane curve {c}: {:?} (residual {:.2e})", r.verdict, r.max_residual)
            });
            run.record(r.max_residual);
            plane_checks += 1;
        }
    }

    let r = planarity_check(&ei_float(4), &ConnectionSpec::flat(4), &helix(), 33, DEFAULT_PLANARITY_TOL).unwrap();
    run.check(r.verdict == PlanarityVerdict::NotPlanar, || format!("helix verdict {:?}", r.verdict));
    match &r.counterexample {
        Some(ce) => run.check(ce.t == 0.0 && (ce.residual - 0.5f64.sqrt()).abs() < 1e-12, || {
            format!("helix counterexample at t = {}, residual {}", ce.t, ce.residual)
        }),
        None => run.failures.push("helix: no counterexample".into()),
    }
    run.record(&r);

    let exact = 0.5f64.sqrt();
    let errs: Vec<f64> = [0.1, 0.05, 0.025].iter().map(|&h| (sampled_helix_residual(h) - exact).abs()).collect();
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    for r in ratios {
        run.check((3.5..=4.5).contains(&r), || format!("convergence ratio {r:.3} outside [3.5, 4.5]"));
    }
    run.record(&errs);
    run.detail = format!(
        "1000 geodesic checks (max residual {worst:.1e}); {plane_checks} plane curve checks; helix fails at t = 0; ratios {:.2}, {:.2}",
        ratios[0], ratios[1]
    );
}

/// Prints the criterion line; returns false on failures other than
/// verified refutations of the stated claim.
fn line(n: usize, title: &str, run: &Run) -> bool {
    let ok = run.failures.is_empty();
    let status = match (ok, run.unattainable.is_empty()) {
        (true, true) => "PASS".to_string(),
        (true, false) => format!("FAIL (unattainable: claim refuted in {} cases)", run.unattainable.len()),
        (false, _) => "FAIL".to_string(),
    };
    println!("{status} C{n} {title}: {} [{:.2?}]", run.detail, run.elapsed);
    for f in run.failures.iter().take(10) {
        println!("     - {f}");
    }
    for u in run.unattainable.iter().take(5) {
        println!("     - {u}");
    }
    ok
}

type Criterion = (&'static str, Option<Duration>, fn(&mut Run));

fn main() {
    let criteria: [Criterion; 6] = [
        ("pairs <E,F> have weak generic rank 2", Some(Duration::from_secs(5)), criterion_1),
        ("generic rank pipeline", None, criterion_2),
        ("Frobenius iff full module rank", Some(Duration::from_secs(10)), criterion_3),
        ("Clifford regular representations", Some(Duration::from_secs(60)), criterion_4),
        ("complete systems of distributions", Some(Duration::from_secs(30)), criterion_5),
        ("planarity properties", None, criterion_6),
    ];
    let runs: Vec<Run> = criteria.iter().map(|(_, limit, f)| timed(*limit, f)).collect();
    let mut all_ok = true;
    for (i, ((title, _, _), run)) in criteria.iter().zip(&runs).enumerate() {
        all_ok &= line(i + 1, title, run);
    }

    let audit = timed(None, |run| {
        let certs: Vec<&RankCertificate> = runs[..5].iter().flat_map(|r| &r.certificates).collect();
        for (i, c) in certs.iter().enumerate() {
            let a = verify_certificate(c);
            run.check(a.valid, || format!("certificate {i}: {:?}", a.failures));
        }
        run.check(!certs.is_empty(), || "no certificates collected".into());
        run.detail = format!("{} certificates re-verified independently", certs.len());
    });
    all_ok &= line(7, "certificate audit", &audit);

    let determinism = timed(None, |run| {
        for (i, ((_, _, f), first)) in criteria.iter().zip(&runs).enumerate() {
            let mut again = Run::new();
            f(&mut again);
            let (a, b) = (first.artifacts.to_string(), again.artifacts.to_string());
            run.check(a == b, || format!("criterion {} output differs on rerun", i + 1));
        }
        run.detail = "criteria 1-6 rerun with the same seed".into();
    });
    all_ok &= line(8, "determinism", &determinism);

    if !all_ok {
        std::process::exit(1);
    }
}
