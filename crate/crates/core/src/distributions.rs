//! Projector systems of complete systems of distributions.
//!
//! A splitting `R^m = D_1 + ... + D_n` with `dim D_i = r_i` in the frame `Q`
//! gives projectors `P_i = Q D_i Q^-1` with `D_i` the block-diagonal
//! identity on block `i`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hullrank::{
    certificate_for_vector, certify_generic_rank, weak_rank_witness, AbsenceProof, AffinorBasis,
    GenericOutcome, SearchOptions, WeakRankOutcome,
};
use crate::sampling::SearchRng;
use crate::scalarlinalg::{exact_rank, int, inverse, QMat, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionError {
    #[error("a splitting needs at least one block")]
    NoBlocks,
    #[error("block {index} has dimension zero")]
    EmptyBlock { index: usize },
    #[error("change of basis has shape {found:?}, expected {m}x{m}")]
    Shape { found: (usize, usize), m: usize },
    #[error("change of basis is singular")]
    SingularChangeOfBasis,
    #[error("projector identities fail: {0}")]
    IdentitiesViolated(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Splitting {
    pub m: usize,
    pub block_dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub change_of_basis: Option<QMat>,
}

impl Splitting {
    pub fn new(block_dims: Vec<usize>, change_of_basis: Option<QMat>) -> Result<Self, DistributionError> {
        if block_dims.is_empty() {
            return Err(DistributionError::NoBlocks);
        }
        if let Some(index) = block_dims.iter().position(|&r| r == 0) {
            return Err(DistributionError::EmptyBlock { index });
        }
        let m = block_dims.iter().sum();
        if let Some(q) = &change_of_basis {
            if q.shape() != (m, m) {
                return Err(DistributionError::Shape { found: q.shape(), m });
            }
        }
        Ok(Splitting { m, block_dims, change_of_basis })
    }

    pub fn n(&self) -> usize {
        self.block_dims.len()
    }

    /// First coordinate index of each block.
    pub fn block_starts(&self) -> Vec<usize> {
        self.block_dims
            .iter()
            .scan(0, |acc, &r| {
                let s = *acc;
                *acc += r;
                Some(s)
            })
            .collect()
    }

    pub fn frame(&self) -> QMat {
        self.change_of_basis.clone().unwrap_or_else(|| QMat::identity(self.m))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorSystem {
    pub splitting: Splitting,
    /// `P_1..P_n`.
    pub projectors: Vec<QMat>,
}

impl ProjectorSystem {
    /// `{E, P_1, ..., P_{n-1}}`, spanning the same space as `{P_1..P_n}`.
    pub fn to_affinor_basis(&self) -> AffinorBasis {
        let m = self.splitting.m;
        let mut mats = vec![QMat::identity(m)];
        mats.extend(self.projectors.iter().take(self.projectors.len() - 1).cloned());
        AffinorBasis::with_full_rank_allowed(mats).expect("projector systems are independent")
    }
}

pub fn projectors_from_splitting(sp: &Splitting) -> Result<ProjectorSystem, DistributionError> {
    let q = sp.frame();
    let q_inv = inverse(&q)
        .expect("square")
        .ok_or(DistributionError::SingularChangeOfBasis)?;
    let projectors: Vec<QMat> = sp
        .block_starts()
        .iter()
        .zip(&sp.block_dims)
        .map(|(&start, &r)| {
            let diag: Vec<Rational> = (0..sp.m).map(|k| int(i64::from(k >= start && k < start + r))).collect();
            let d = QMat::diagonal(&diag);
            q.mul(&d).and_then(|qd| qd.mul(&q_inv)).expect("square")
        })
        .collect();
    let report = verify_complete_system(&projectors);
    if !report.holds {
        return Err(DistributionError::IdentitiesViolated(format!("{:?}", report.violations)));
    }
    for (i, (p, &r)) in projectors.iter().zip(&sp.block_dims).enumerate() {
        let rank = exact_rank(p).rank;
        if rank != r {
            return Err(DistributionError::IdentitiesViolated(format!(
                "rank of P_{} is {rank}, expected {r}",
                i + 1
            )));
        }
    }
    Ok(ProjectorSystem { splitting: sp.clone(), projectors })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "relation", rename_all = "snake_case")]
pub enum SystemViolation {
    /// `P_i^2 != P_i` (1-based).
    Idempotent { i: usize },
    /// `P_i P_j != 0` (1-based, `i != j`).
    Orthogonal { i: usize, j: usize },
    /// `sum P_i != E`.
    Sum,
    Shape { i: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemReport {
    pub holds: bool,
    pub violations: Vec<SystemViolation>,
}

pub fn verify_complete_system(projectors: &[QMat]) -> SystemReport {
    let mut violations = Vec::new();
    let m = projectors.first().map_or(0, QMat::rows);
    for (i, p) in projectors.iter().enumerate() {
        if p.shape() != (m, m) {
            violations.push(SystemViolation::Shape { i: i + 1 });
        }
    }
    if !violations.is_empty() || projectors.is_empty() {
        if projectors.is_empty() {
            violations.push(SystemViolation::Sum);
        }
        return SystemReport { holds: false, violations };
    }
    let mut sum = QMat::zeros(m, m);
    for (i, p) in projectors.iter().enumerate() {
        for (j, q) in projectors.iter().enumerate() {
            let pq = p.mul(q).expect("square");
            if i == j {
                if &pq != p {
                    violations.push(SystemViolation::Idempotent { i: i + 1 });
                }
            } else if !pq.is_zero() {
                violations.push(SystemViolation::Orthogonal { i: i + 1, j: j + 1 });
            }
        }
        sum = sum.add(p).expect("same shape");
    }
    if !sum.is_identity() {
        violations.push(SystemViolation::Sum);
    }
    SystemReport { holds: violations.is_empty(), violations }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionRankReport {
    pub n: usize,
    pub m: usize,
    pub weak: WeakRankOutcome,
    /// `Inapplicable` when `2n > m`; `RankDeficient` when a block has
    /// dimension 1, since then no pair reaches dimension `2n`.
    pub generic: GenericOutcome,
}

/// Block witness: `Q x0` with `x0` equal to 1 at the first coordinate of
/// each block and 0 elsewhere.
pub fn block_witness(sp: &Splitting) -> Vec<Rational> {
    let mut x0 = vec![Rational::zero(); sp.m];
    for s in sp.block_starts() {
        x0[s] = Rational::one();
    }
    sp.frame().mul_vec(&x0).expect("m")
}

/// Weak rank from the block witness; generic rank from the pair pipeline
/// unless [`pair_dimension_bound`] already rules out dimension `2n`.
pub fn distribution_rank_check(ps: &ProjectorSystem, opts: &SearchOptions) -> DistributionRankReport {
    let basis = ps.to_affinor_basis();
    let x = block_witness(&ps.splitting);
    let weak = match certificate_for_vector(&basis, &x, "one unit coordinate per block in the splitting frame")
        .expect("length m")
    {
        Some(certificate) => WeakRankOutcome::Witness { certificate },
        None => weak_rank_witness(&basis, opts),
    };
    let n = ps.splitting.n();
    let generic = match pair_dimension_bound(ps) {
        AbsenceProof::ImageRankBound { bound, .. } if 2 * n > ps.splitting.m || bound == 2 * n => {
            certify_generic_rank(&basis, opts)
        }
        proof => GenericOutcome::RankDeficient { proof },
    };
    DistributionRankReport { n, m: ps.splitting.m, weak, generic }
}

/// Upper bound `sum_i min(2, rank P_i)` on `dim(A(X) + A(Y))`, with the
/// projector ranks recomputed exactly.
pub fn pair_dimension_bound(ps: &ProjectorSystem) -> AbsenceProof {
    let image_ranks: Vec<usize> = ps.projectors.iter().map(|p| exact_rank(p).rank).collect();
    AbsenceProof::ImageRankBound {
        bound: image_ranks.iter().map(|&r| r.min(2)).sum(),
        required: 2 * ps.projectors.len(),
        image_ranks,
    }
}

/// Random exact invertible matrix with integer entries in `[-bound, bound]`.
pub fn random_invertible(rng: &mut SearchRng, m: usize, bound: i64) -> QMat {
    loop {
        let data = crate::sampling::random_int_vector(rng, m * m, bound);
        let q = QMat::from_vec(m, m, data).expect("m x m");
        if crate::scalarlinalg::exact_invertible(&q).expect("square") {
            return q;
        }
    }
}

/// Random splitting with `m` in `1..=max_m`, random block sizes and a random
/// invertible frame.
pub fn random_splitting(rng: &mut SearchRng, max_m: usize) -> Splitting {
    use rand::Rng;
    let m = rng.gen_range(1..=max_m.max(1));
    let mut dims = Vec::new();
    let mut left = m;
    while left > 0 {
        let r = rng.gen_range(1..=left);
        dims.push(r);
        left -= r;
    }
    let q = random_invertible(rng, m, 3);
    Splitting::new(dims, Some(q)).expect("valid by construction")
}
