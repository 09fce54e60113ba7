use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::json;

use crate::algebra::{verify_associativity, verify_unity, StructureConstants};
use crate::clifford::{
    build_clifford, clifford_rank_theorem_check, doubled_generic_check, verify_clifford_relations,
    CliffordError, CliffordSignature, MAX_MATERIALIZED_GENERATORS,
};
use crate::distributions::{
    distribution_rank_check, projectors_from_splitting, verify_complete_system, DistributionError, Splitting,
};
use crate::frobenius::frobenius_iff_generic_rank;
use crate::hullrank::{
    certify_generic_rank, hull, inversion_probe, verify_certificate, weak_rank_witness, AffinorBasis,
    FloatBasis, GenericOutcome, Inapplicability, InversionProbe, RankCertificate, WeakRankOutcome,
};
use crate::planarity::{planarity_check, ConnectionSpec, CurveSpec, PlanarityVerdict};
use crate::report::{Outcome, Report, ReportError};
use crate::scalarlinalg::{float_rank, QMat};

use super::{parse_json, read_input, AlgebraCommand, CliError, Command, RunConfig};

pub(super) fn run(cfg: &RunConfig, report: &mut Report) -> Result<Outcome, CliError> {
    match &cfg.command {
        Command::Algebra(AlgebraCommand::Verify { file }) => algebra_verify(file, report),
        Command::Rank { file, generic, inversion_probe } => rank(cfg, file, *generic, *inversion_probe, report),
        Command::Frobenius { file } => frobenius(cfg, file, report),
        Command::Clifford { s, t, emit, check_rank, doubled } => {
            clifford(cfg, *s, *t, *emit, *check_rank, *doubled, report)
        }
        Command::Distributions { dims, conjugate, emit } => {
            distributions(cfg, dims, conjugate.as_deref(), *emit, report)
        }
        Command::Planar { basis, connection, curve, samples } => {
            planar(cfg, basis, connection, curve, *samples, report)
        }
        Command::VerifyReport { file } => verify_report(file, report),
    }
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    parse_json(path, &read_input(path)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("results are serializable")
}

fn weak_outcome(w: &WeakRankOutcome) -> Outcome {
    match w {
        WeakRankOutcome::Witness { .. } => Outcome::Positive,
        WeakRankOutcome::RankDeficient { .. } => Outcome::Negative,
        WeakRankOutcome::NoWitnessFound { .. } => Outcome::Inconclusive,
    }
}

fn generic_outcome(g: &GenericOutcome) -> Outcome {
    match g {
        GenericOutcome::Certified { .. } => Outcome::Positive,
        GenericOutcome::RankDeficient { .. } => Outcome::Negative,
        GenericOutcome::Inapplicable { .. } | GenericOutcome::NoWitnessFound { .. } => Outcome::Inconclusive,
    }
}

/// Positive only if every part is positive; negative if any part is.
fn conjunction(parts: &[Outcome]) -> Outcome {
    if parts.contains(&Outcome::Negative) {
        Outcome::Negative
    } else if parts.iter().all(|&o| o == Outcome::Positive) {
        Outcome::Positive
    } else {
        Outcome::Inconclusive
    }
}

fn algebra_verify(file: &Path, report: &mut Report) -> Result<Outcome, CliError> {
    let sc: StructureConstants = load(file)?;
    let unity = verify_unity(&sc);
    let assoc = verify_associativity(&sc);
    if !assoc.consistent {
        return Err(CliError::Internal("starred and unstarred associativity checks disagree".into()));
    }
    let valid = unity.holds && assoc.holds;
    report.summary = if valid {
        format!("unital associative algebra of dimension {}", sc.dim())
    } else {
        format!(
            "not a unital associative algebra: {} unity and {} associativity violations",
            unity.violations.len(),
            assoc.violations.len()
        )
    };
    report.result = json!({ "n": sc.dim(), "valid": valid, "unity": unity, "associativity": assoc });
    Ok(if valid { Outcome::Positive } else { Outcome::Negative })
}

/// Float rank of the certified hull, as a sanity cross-check of the exact
/// claim.
fn float_cross_check(basis: &AffinorBasis, cert: &RankCertificate, tol: f64) -> serde_json::Value {
    let h = hull(basis, &cert.witness).expect("certificate witness has length m");
    let r = float_rank(&h.hull_matrix.to_f64(), tol).map(|r| r.rank).ok();
    json!({ "tol": tol, "float_rank": r, "agrees": r == Some(cert.claimed_rank) })
}

fn rank(
    cfg: &RunConfig,
    file: &Path,
    generic: bool,
    probe: bool,
    report: &mut Report,
) -> Result<Outcome, CliError> {
    let basis: AffinorBasis = load(file)?;
    let opts = cfg.search_options();
    let mut result = json!({ "m": basis.m(), "n": basis.n() });
    let mut outcome = if generic {
        let g = certify_generic_rank(&basis, &opts);
        report.summary = match &g {
            GenericOutcome::Certified { certificate } => {
                format!("generic rank {} certified", certificate.claimed_rank)
            }
            GenericOutcome::Inapplicable { detail: Inapplicability::DimensionTooSmall { double_rank, m } } => {
                format!("generic rank criterion inapplicable: 2n = {double_rank} exceeds m = {m}")
            }
            GenericOutcome::Inapplicable { detail: Inapplicability::NotAnAlgebra { i, j, .. } } => {
                format!("generic rank criterion inapplicable: F_{} F_{} leaves the span", i + 1, j + 1)
            }
            GenericOutcome::NoWitnessFound { stage, .. } => format!("no witness found ({stage})"),
            GenericOutcome::RankDeficient { .. } => "weak generic rank below n proven".into(),
        };
        report.certificates.extend(g.certificate().cloned());
        let o = generic_outcome(&g);
        result["generic"] = to_value(&g);
        o
    } else {
        let w = weak_rank_witness(&basis, &opts);
        report.summary = match &w {
            WeakRankOutcome::Witness { certificate } => {
                format!("weak generic rank {} certified", certificate.claimed_rank)
            }
            WeakRankOutcome::NoWitnessFound { max_dim_seen, .. } => {
                format!("no witness found; largest hull dimension seen {max_dim_seen}")
            }
            WeakRankOutcome::RankDeficient { max_dim_seen, .. } => {
                format!("weak generic rank below n proven; generic hull dimension {max_dim_seen}")
            }
        };
        report.certificates.extend(w.certificate().cloned());
        let o = weak_outcome(&w);
        result["weak"] = to_value(&w);
        o
    };
    if let Some(cert) = report.certificates.first() {
        let check = float_cross_check(&basis, cert, cfg.float_rank_tol());
        if check["agrees"] != json!(true) {
            report.notes.push("float rank of the witness hull differs from the exact rank".into());
        }
        result["float_cross_check"] = check;
    }
    if probe {
        let p = inversion_probe(&basis, &opts);
        if let InversionProbe::CounterexampleFound { .. } = p {
            report.notes.push("a non-invertible nonzero element exists; the span is not an algebra with inversion".into());
            outcome = Outcome::Negative;
        }
        result["inversion_probe"] = to_value(&p);
    }
    report.result = result;
    Ok(outcome)
}

fn frobenius(cfg: &RunConfig, file: &Path, report: &mut Report) -> Result<Outcome, CliError> {
    let sc: StructureConstants = load(file)?;
    let rep = frobenius_iff_generic_rank(&sc, &cfg.search_options()).map_err(|e| CliError::data(file, e))?;
    report.certificates.extend(rep.module_rank.certificate().cloned());
    report.notes.extend(rep.notes.iter().cloned());
    let outcome = if rep.contradiction() {
        report.summary = "Frobenius verdict and module rank verdict contradict each other".into();
        report.error = Some(ReportError {
            kind: "contradiction".into(),
            message: report.summary.clone(),
            path: Some(file.display().to_string()),
            field: None,
        });
        Outcome::Error
    } else {
        let verdict = match rep.frobenius_decided {
            Some(true) => "Frobenius",
            Some(false) => "not Frobenius",
            None => "undetermined",
        };
        report.summary = format!("{verdict}; module rank verdict agrees: {}", rep.agree);
        match rep.frobenius_decided {
            Some(true) => Outcome::Positive,
            Some(false) => Outcome::Negative,
            None => Outcome::Inconclusive,
        }
    };
    report.result = to_value(&rep);
    Ok(outcome)
}

fn clifford_error(e: CliffordError) -> CliError {
    match e {
        CliffordError::EmptySignature | CliffordError::SignatureTooLarge { .. } => CliError::Usage(e.to_string()),
        CliffordError::RelationsViolated(_) => CliError::Internal(e.to_string()),
        CliffordError::NoWitness(_) => unreachable!("handled as inconclusive"),
    }
}

fn clifford(
    cfg: &RunConfig,
    s: u32,
    t: u32,
    emit: bool,
    check_rank: bool,
    doubled: bool,
    report: &mut Report,
) -> Result<Outcome, CliError> {
    let sig = CliffordSignature::new(s, t).map_err(clifford_error)?;
    let build = emit || doubled || !check_rank;
    if build && sig.generators() > MAX_MATERIALIZED_GENERATORS {
        return Err(CliError::Usage(format!(
            "materialized representations need s + t <= {MAX_MATERIALIZED_GENERATORS}; use --check-rank alone"
        )));
    }
    let mut result = json!({ "signature": sig, "dimension": sig.k_plus_1() });
    let mut parts = Vec::new();
    let mut summary = Vec::new();
    if build {
        let cb = build_clifford(sig).map_err(clifford_error)?;
        let rel = verify_clifford_relations(&cb);
        parts.push(if rel.holds { Outcome::Positive } else { Outcome::Negative });
        summary.push(format!("relations {}", if rel.holds { "hold" } else { "fail" }));
        result["relations"] = to_value(&rel);
        if emit {
            result["labels"] = to_value(&cb.labels());
            result["basis"] = to_value(cb.affinor_basis());
        }
    }
    if check_rank {
        match clifford_rank_theorem_check(sig) {
            Ok(cert) => {
                summary.push(format!("weak generic rank {} certified", cert.claimed_rank));
                result["rank"] = to_value(&cert);
                report.certificates.push(cert);
                parts.push(Outcome::Positive);
            }
            Err(CliffordError::NoWitness(msg)) => {
                summary.push("no rank witness found".into());
                result["rank"] = json!({ "status": "no_witness_found", "note": msg });
                parts.push(Outcome::Inconclusive);
            }
            Err(e) => return Err(clifford_error(e)),
        }
    }
    if doubled {
        let g = doubled_generic_check(sig, &cfg.search_options()).map_err(clifford_error)?;
        summary.push(match g.certificate() {
            Some(c) => format!("generic rank {} certified on two copies", c.claimed_rank),
            None => "generic rank on two copies not certified".into(),
        });
        report.certificates.extend(g.certificate().cloned());
        parts.push(generic_outcome(&g));
        result["doubled"] = to_value(&g);
    }
    report.summary = format!("Cl({s},{t}): {}", summary.join("; "));
    report.result = result;
    Ok(conjunction(&parts))
}

fn distributions(
    cfg: &RunConfig,
    dims: &[usize],
    conjugate: Option<&Path>,
    emit: bool,
    report: &mut Report,
) -> Result<Outcome, CliError> {
    let q: Option<QMat> = conjugate.map(load).transpose()?;
    let sp = Splitting::new(dims.to_vec(), q).map_err(|e| match e {
        DistributionError::NoBlocks | DistributionError::EmptyBlock { .. } => CliError::Usage(e.to_string()),
        _ => CliError::Data { path: conjugate.map(|p| p.display().to_string()), message: e.to_string() },
    })?;
    let ps = projectors_from_splitting(&sp).map_err(|e| match e {
        DistributionError::SingularChangeOfBasis => {
            CliError::Data { path: conjugate.map(|p| p.display().to_string()), message: e.to_string() }
        }
        _ => CliError::Internal(e.to_string()),
    })?;
    let system = verify_complete_system(&ps.projectors);
    let ranks = distribution_rank_check(&ps, &cfg.search_options());
    report.certificates.extend(ranks.weak.certificate().cloned());
    report.certificates.extend(ranks.generic.certificate().cloned());
    let generic_part = match &ranks.generic {
        GenericOutcome::Inapplicable { detail: Inapplicability::DimensionTooSmall { .. } } => Outcome::Positive,
        g => generic_outcome(g),
    };
    let system_part = if system.holds { Outcome::Positive } else { Outcome::Negative };
    let outcome = conjunction(&[system_part, weak_outcome(&ranks.weak), generic_part]);
    report.summary = format!(
        "{} blocks in R^{}: identities {}, weak rank {}, generic rank {}",
        ranks.n,
        ranks.m,
        if system.holds { "hold" } else { "fail" },
        if ranks.weak.certificate().is_some() { "certified" } else { "not certified" },
        match &ranks.generic {
            GenericOutcome::Certified { .. } => "certified",
            GenericOutcome::Inapplicable { .. } => "not applicable (2n > m)",
            GenericOutcome::RankDeficient { .. } => "refuted (a block of dimension 1 caps pair dimension)",
            _ => "not certified",
        }
    );
    let mut result = json!({ "splitting": sp, "system": system, "ranks": ranks });
    if emit {
        result["projectors"] = to_value(&ps.projectors);
        result["basis"] = to_value(&ps.to_affinor_basis());
    }
    report.result = result;
    Ok(outcome)
}

fn planar(
    cfg: &RunConfig,
    basis: &Path,
    connection: &Path,
    curve: &Path,
    samples: usize,
    report: &mut Report,
) -> Result<Outcome, CliError> {
    let b: FloatBasis = load(basis)?;
    let conn: ConnectionSpec = load(connection)?;
    let c: CurveSpec = load(curve)?;
    let r = planarity_check(&b, &conn, &c, samples, cfg.planarity_tol())
        .map_err(|e| CliError::Data { path: None, message: e.to_string() })?;
    report.summary = match (&r.verdict, &r.counterexample) {
        (PlanarityVerdict::NotPlanar, Some(ce)) => {
            format!("not planar: counterexample at t = {} (residual {:.3e})", ce.t, ce.residual)
        }
        (PlanarityVerdict::Planar, _) => format!("planar at all samples (max residual {:.3e})", r.max_residual),
        _ => format!("indeterminate: {} degenerate samples", r.degenerate_samples.len()),
    };
    let outcome = match r.verdict {
        PlanarityVerdict::Planar => Outcome::Positive,
        PlanarityVerdict::NotPlanar => Outcome::Negative,
        PlanarityVerdict::Indeterminate => Outcome::Inconclusive,
    };
    let residuals: Vec<Option<f64>> = r.samples.iter().map(|s| s.residual).collect();
    report.result = json!({ "residuals": residuals, "report": r });
    Ok(outcome)
}

fn verify_report(file: &Path, report: &mut Report) -> Result<Outcome, CliError> {
    let value: serde_json::Value = load(file)?;
    let path = file.display().to_string();
    let certs = match value.get("certificates").and_then(|c| c.as_array()) {
        Some(list) if !list.is_empty() => list,
        _ => return Err(CliError::MissingCertificate { path }),
    };
    let mut audits = Vec::new();
    let mut all_valid = true;
    for (i, c) in certs.iter().enumerate() {
        let cert: RankCertificate = serde_path_to_error::deserialize(c).map_err(|e| CliError::Parse {
            path: path.clone(),
            field: Some(format!("certificates[{i}]{}", suffix(&e.path().to_string()))),
            message: e.into_inner().to_string(),
        })?;
        let audit = verify_certificate(&cert);
        all_valid &= audit.valid;
        audits.push(json!({
            "index": i,
            "kind": cert.kind,
            "claimed_rank": cert.claimed_rank,
            "valid": audit.valid,
            "failures": audit.failures,
        }));
    }
    report.summary = format!(
        "{} of {} certificates verified",
        audits.iter().filter(|a| a["valid"] == json!(true)).count(),
        audits.len()
    );
    report.result = json!({ "all_valid": all_valid, "audits": audits });
    Ok(if all_valid { Outcome::Positive } else { Outcome::Negative })
}

fn suffix(inner: &str) -> String {
    match inner {
        "." => String::new(),
        p if p.starts_with('[') => p.to_string(),
        p => format!(".{p}"),
    }
}
