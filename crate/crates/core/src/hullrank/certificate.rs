//! Rank certificates and their independent re-verification.
//!
//! The audit shares no code with the search: hull rows come from plain
//! loops, rank from rational Gauss-Jordan, and closure from direct matrix
//! products against the stored structure constants.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::StructureConstants;
use crate::clifford::{self, CliffordSignature};
use crate::scalarlinalg::{determinant, minor, rref, serde_rational, QMat, Rational};

use super::AffinorBasis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Weak,
    Generic,
}

/// Where the affinors of a certificate come from. Clifford bases are
/// described by their signature and regenerated on audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BasisSource {
    Explicit { basis: AffinorBasis },
    Clifford { s: u32, t: u32 },
}

impl BasisSource {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            BasisSource::Explicit { basis } => (basis.m(), basis.n()),
            BasisSource::Clifford { s, t } => {
                let d = 1usize << (s + t);
                (d, d)
            }
        }
    }
}

/// Supporting data for a generic-rank claim.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenericSupport {
    /// Closure proof: `F_i F_j = sum_k C_ij^k F_k`.
    pub structure_constants: StructureConstants,
    /// `2 n`, which must not exceed `module_dim`.
    pub double_rank: usize,
    pub module_dim: usize,
    #[serde(with = "serde_rational::vec")]
    pub pair_x: Vec<Rational>,
    #[serde(with = "serde_rational::vec")]
    pub pair_y: Vec<Rational>,
    /// `dim(A(pair_x) + A(pair_y))`, equal to `double_rank` when emitted.
    pub pair_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub kind: CertificateKind,
    pub claimed_rank: usize,
    #[serde(with = "serde_rational::vec")]
    pub witness: Vec<Rational>,
    pub applicable_theorems: Vec<String>,
    pub evidence: Vec<String>,
    pub pivot_rows: Vec<usize>,
    pub pivot_cols: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generic: Option<GenericSupport>,
    pub basis: BasisSource,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateAudit {
    pub valid: bool,
    pub failures: Vec<String>,
}

fn apply(f: &QMat, x: &[Rational]) -> Vec<Rational> {
    let m = f.rows();
    let mut out = vec![Rational::zero(); m];
    for (r, o) in out.iter_mut().enumerate() {
        for (c, xc) in x.iter().enumerate() {
            let a = &f[(r, c)];
            if !a.is_zero() && !xc.is_zero() {
                *o += a * xc;
            }
        }
    }
    out
}

fn explicit_hull(basis: &AffinorBasis, x: &[Rational]) -> QMat {
    let rows = basis.mats().iter().map(|f| apply(f, x)).collect();
    QMat::from_rows(rows).expect("uniform rows")
}

fn reference_rank(m: &QMat) -> usize {
    rref(m).1.len()
}

fn audit_basis(basis: &AffinorBasis, failures: &mut Vec<String>) {
    let m = basis.m();
    let n = basis.n();
    let mats = basis.mats();
    if !mats[0].is_identity() {
        failures.push("first affinor is not the identity".into());
    }
    if n > m || (n == m && !basis.allows_full_rank()) {
        failures.push(format!("rank {n} not below dimension {m}"));
    }
    let flat = mats.iter().flat_map(|f| f.as_slice().iter().cloned()).collect();
    let stacked = QMat::from_vec(n, m * m, flat).expect("sizes match");
    if reference_rank(&stacked) != n {
        failures.push("affinors are linearly dependent".into());
    }
}

fn audit_closure(basis: &AffinorBasis, sc: &StructureConstants, failures: &mut Vec<String>) {
    let n = basis.n();
    if sc.dim() != n {
        failures.push(format!("structure constants have dimension {} for {n} affinors", sc.dim()));
        return;
    }
    let mats = basis.mats();
    for i in 0..n {
        for j in 0..n {
            let lhs = mats[i].mul(&mats[j]).expect("square");
            let mut rhs = QMat::zeros(basis.m(), basis.m());
            for (k, f) in mats.iter().enumerate() {
                let c = sc.get(i, j, k);
                if !c.is_zero() {
                    rhs = rhs.add(&f.scale(c)).expect("same shape");
                }
            }
            if lhs != rhs {
                failures.push(format!("closure identity fails for pair ({i}, {j})"));
                return;
            }
        }
    }
}

/// Re-checks a certificate from scratch.
pub fn verify_certificate(cert: &RankCertificate) -> CertificateAudit {
    let mut failures = Vec::new();
    let (m, n) = cert.basis.dims();

    if cert.witness.len() != m {
        failures.push(format!("witness has length {}, expected {m}", cert.witness.len()));
        return CertificateAudit { valid: false, failures };
    }
    if cert.claimed_rank != n {
        failures.push(format!(
            "claimed rank {} differs from the number of affinors {n}",
            cert.claimed_rank
        ));
    }

    let hull = match &cert.basis {
        BasisSource::Explicit { basis } => {
            audit_basis(basis, &mut failures);
            explicit_hull(basis, &cert.witness)
        }
        BasisSource::Clifford { s, t } => match CliffordSignature::new(*s, *t) {
            Ok(sig) => clifford::regular_hull_matrix(sig, &cert.witness),
            Err(e) => {
                failures.push(e.to_string());
                return CertificateAudit { valid: false, failures };
            }
        },
    };

    let dim = reference_rank(&hull);
    if dim != cert.claimed_rank {
        failures.push(format!(
            "witness hull has dimension {dim}, certificate claims {}",
            cert.claimed_rank
        ));
    }

    let k = cert.pivot_rows.len();
    let in_range = cert.pivot_rows.iter().all(|&r| r < hull.rows())
        && cert.pivot_cols.iter().all(|&c| c < hull.cols());
    if k != cert.claimed_rank || cert.pivot_cols.len() != k || !in_range {
        failures.push("pivot data does not describe a claimed_rank-sized minor".into());
    } else {
        let sub = minor(&hull, &cert.pivot_rows, &cert.pivot_cols);
        if determinant(&sub).map_or(true, |d| d.is_zero()) {
            failures.push("certified minor has zero determinant".into());
        }
    }

    match (cert.kind, &cert.generic, &cert.basis) {
        (CertificateKind::Weak, _, _) => {}
        (CertificateKind::Generic, None, _) => {
            failures.push("generic certificate without supporting data".into())
        }
        (CertificateKind::Generic, Some(_), BasisSource::Clifford { .. }) => {
            failures.push("generic certificates must carry an explicit basis".into())
        }
        (CertificateKind::Generic, Some(g), BasisSource::Explicit { basis }) => {
            if g.double_rank != 2 * n || g.module_dim != m || 2 * n > m {
                failures.push(format!("dimension inequality 2*{n} <= {m} not met"));
            }
            audit_closure(basis, &g.structure_constants, &mut failures);
            if g.pair_x.len() != m || g.pair_y.len() != m {
                failures.push("pair vectors have the wrong length".into());
            } else {
                let stacked = QMat::vstack(&[
                    explicit_hull(basis, &g.pair_x),
                    explicit_hull(basis, &g.pair_y),
                ])
                .expect("same width");
                let pd = reference_rank(&stacked);
                if pd != 2 * n || g.pair_dim != pd {
                    failures.push(format!("pair spans dimension {pd}, expected {}", 2 * n));
                }
            }
            if !g.structure_constants.get(0, 0, 0).is_one() && n > 0 {
                failures.push("structure constants do not have the unit first".into());
            }
        }
    }

    CertificateAudit {
        valid: failures.is_empty(),
        failures,
    }
}
