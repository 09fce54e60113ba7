//! Real Clifford algebras `Cl(s,t)` in their left regular representation.
//!
//! Blades are bitmasks over generators `e_1..e_{s+t}`; bit `g` set means
//! `e_{g+1}` is a factor. Generators `e_1..e_s` square to `+E`, the rest to
//! `-E`. Basis order is graded-lex: `E`, the generators, then products of
//! two, three, ... generators in lexicographic order of their indices.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::StructureConstants;
use crate::hullrank::{
    certify_generic_rank, weak_search, AffinorBasis, BasisSource, CertificateKind, GenericOutcome,
    RankCertificate, SearchOptions, WeakRankOutcome, THM_WITNESS,
};
use crate::scalarlinalg::{exact_rank, int, QMat, Rational};

/// Hard cap on `s + t` for any signature.
pub const MAX_GENERATORS: u32 = 16;
/// Cap on `s + t` for building dense `2^(s+t)`-square matrices.
pub const MAX_MATERIALIZED_GENERATORS: u32 = 6;
/// Cap on `s + t` for the exact rank check.
pub const MAX_RANK_CHECK_GENERATORS: u32 = 10;

pub const THM_CLIFFORD: &str = "clifford_regular_representation_has_weak_rank_dim";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliffordError {
    #[error("a Clifford signature needs at least one generator")]
    EmptySignature,
    #[error("Cl({s},{t}) has {} generators, limit is {limit}", s + t)]
    SignatureTooLarge { s: u32, t: u32, limit: u32 },
    #[error("generator relations violated: {0}")]
    RelationsViolated(String),
    #[error("no rank witness found: {0}")]
    NoWitness(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSignature", into = "RawSignature")]
pub struct CliffordSignature {
    s: u32,
    t: u32,
}

#[derive(Serialize, Deserialize)]
struct RawSignature {
    s: u32,
    t: u32,
    #[serde(default, skip_deserializing)]
    k_plus_1: usize,
}

impl TryFrom<RawSignature> for CliffordSignature {
    type Error = CliffordError;
    fn try_from(r: RawSignature) -> Result<Self, CliffordError> {
        CliffordSignature::new(r.s, r.t)
    }
}

impl From<CliffordSignature> for RawSignature {
    fn from(c: CliffordSignature) -> Self {
        RawSignature { s: c.s, t: c.t, k_plus_1: c.k_plus_1() }
    }
}

impl CliffordSignature {
    pub fn new(s: u32, t: u32) -> Result<Self, CliffordError> {
        if s + t == 0 {
            return Err(CliffordError::EmptySignature);
        }
        if s.saturating_add(t) > MAX_GENERATORS {
            return Err(CliffordError::SignatureTooLarge { s, t, limit: MAX_GENERATORS });
        }
        Ok(CliffordSignature { s, t })
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn generators(&self) -> u32 {
        self.s + self.t
    }

    /// Algebra dimension `2^(s+t)`.
    pub fn k_plus_1(&self) -> usize {
        1usize << self.generators()
    }

    /// `+1` if generator `g` (0-based) squares to `+E`, else `-1`.
    pub fn square_sign(&self, g: u32) -> i64 {
        if g < self.s {
            1
        } else {
            -1
        }
    }

    fn too_large(&self, limit: u32) -> CliffordError {
        CliffordError::SignatureTooLarge { s: self.s, t: self.t, limit }
    }
}

fn blade_indices(mask: u32) -> Vec<u32> {
    (0..32).filter(|g| mask & (1 << g) != 0).collect()
}

/// Blade masks in basis order.
pub fn blade_order(sig: CliffordSignature) -> Vec<u32> {
    let mut blades: Vec<u32> = (0..(1u32 << sig.generators())).collect();
    blades.sort_by_key(|&b| (b.count_ones(), blade_indices(b)));
    blades
}

fn position_table(blades: &[u32]) -> Vec<usize> {
    let mut pos = vec![0; blades.len()];
    for (i, &b) in blades.iter().enumerate() {
        pos[b as usize] = i;
    }
    pos
}

/// `a * b = sign * (a xor b)` for blade masks.
pub fn blade_product(sig: CliffordSignature, a: u32, b: u32) -> (i64, u32) {
    let mut swaps = 0u32;
    for g in blade_indices(b) {
        // factors of `a` after position g must move past e_g
        swaps += (a >> (g + 1)).count_ones();
    }
    let mut sign = if swaps % 2 == 0 { 1 } else { -1 };
    for g in blade_indices(a & b) {
        sign *= sig.square_sign(g);
    }
    (sign, a ^ b)
}

/// Human-readable name of a blade, `E` for the unit.
pub fn blade_label(mask: u32) -> String {
    if mask == 0 {
        return "E".into();
    }
    blade_indices(mask).iter().map(|g| format!("e{}", g + 1)).collect()
}

/// Multiplication table of `Cl(s,t)` in basis order.
pub fn clifford_structure_constants(sig: CliffordSignature) -> StructureConstants {
    let blades = blade_order(sig);
    let pos = position_table(&blades);
    StructureConstants::from_fn(blades.len(), |i, j, k| {
        let (sign, r) = blade_product(sig, blades[i], blades[j]);
        if pos[r as usize] == k {
            int(sign)
        } else {
            Rational::zero()
        }
    })
}

/// Rows `L_b x` for every blade `b`, computed from the multiplication table
/// without materializing the representation matrices.
pub fn regular_hull_matrix(sig: CliffordSignature, x: &[Rational]) -> QMat {
    let blades = blade_order(sig);
    let pos = position_table(&blades);
    let d = blades.len();
    assert_eq!(x.len(), d, "vector length must equal the algebra dimension");
    let mut out = QMat::zeros(d, d);
    for (row, &b) in blades.iter().enumerate() {
        for (c, &bc) in blades.iter().enumerate() {
            if x[c].is_zero() {
                continue;
            }
            let (sign, r) = blade_product(sig, b, bc);
            let target = pos[r as usize];
            if sign > 0 {
                out[(row, target)] += &x[c];
            } else {
                out[(row, target)] -= &x[c];
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliffordBasis {
    signature: CliffordSignature,
    blades: Vec<u32>,
    basis: AffinorBasis,
}

impl CliffordBasis {
    pub fn signature(&self) -> CliffordSignature {
        self.signature
    }

    pub fn blades(&self) -> &[u32] {
        &self.blades
    }

    pub fn labels(&self) -> Vec<String> {
        self.blades.iter().map(|&b| blade_label(b)).collect()
    }

    pub fn affinor_basis(&self) -> &AffinorBasis {
        &self.basis
    }

    pub fn into_affinor_basis(self) -> AffinorBasis {
        self.basis
    }

    /// Matrix of generator `e_{g+1}`.
    pub fn generator(&self, g: u32) -> &QMat {
        &self.basis.mats()[1 + g as usize]
    }

    pub fn generators(&self) -> Vec<QMat> {
        (0..self.signature.generators()).map(|g| self.generator(g).clone()).collect()
    }
}

/// Left regular representation: `L_b[r][c]` is the coefficient of blade `r`
/// in `b * blade_c`. Entries lie in `{-1, 0, 1}`.
pub fn build_clifford(sig: CliffordSignature) -> Result<CliffordBasis, CliffordError> {
    if sig.generators() > MAX_MATERIALIZED_GENERATORS {
        return Err(sig.too_large(MAX_MATERIALIZED_GENERATORS));
    }
    let blades = blade_order(sig);
    let pos = position_table(&blades);
    let d = blades.len();
    let mats: Vec<QMat> = blades
        .iter()
        .map(|&b| {
            let mut l = QMat::zeros(d, d);
            for (c, &bc) in blades.iter().enumerate() {
                let (sign, r) = blade_product(sig, b, bc);
                l[(pos[r as usize], c)] = int(sign);
            }
            l
        })
        .collect();
    let basis = AffinorBasis::with_full_rank_allowed(mats)
        .map_err(|e| CliffordError::RelationsViolated(e.to_string()))?;
    let cb = CliffordBasis { signature: sig, blades, basis };
    let report = verify_clifford_relations(&cb);
    if !report.holds {
        return Err(CliffordError::RelationsViolated(format!("{:?}", report.violations)));
    }
    Ok(cb)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationViolation {
    /// 1-based generator indices; `i == j` marks a square relation.
    pub i: usize,
    pub j: usize,
    pub relation: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationReport {
    pub holds: bool,
    pub violations: Vec<RelationViolation>,
}

/// Checks `e_i^2 = +-E` with the signs of `sig` and `e_i e_j = -e_j e_i`.
pub fn verify_generator_relations(sig: CliffordSignature, generators: &[QMat]) -> RelationReport {
    let mut violations = Vec::new();
    let k = sig.generators() as usize;
    if generators.len() != k {
        violations.push(RelationViolation {
            i: 0,
            j: 0,
            relation: format!("expected {k} generators, found {}", generators.len()),
        });
        return RelationReport { holds: false, violations };
    }
    let d = generators.first().map_or(0, |g| g.rows());
    let e = QMat::identity(d);
    for i in 0..k {
        let sq = generators[i].mul(&generators[i]).expect("square");
        let sign = sig.square_sign(i as u32);
        if sq != e.scale(&int(sign)) {
            violations.push(RelationViolation {
                i: i + 1,
                j: i + 1,
                relation: format!("e{}^2 = {}E", i + 1, if sign > 0 { "+" } else { "-" }),
            });
        }
        for j in i + 1..k {
            let ab = generators[i].mul(&generators[j]).expect("square");
            let ba = generators[j].mul(&generators[i]).expect("square");
            if !ab.add(&ba).expect("same shape").is_zero() {
                violations.push(RelationViolation {
                    i: i + 1,
                    j: j + 1,
                    relation: format!("e{}e{} = -e{}e{}", i + 1, j + 1, j + 1, i + 1),
                });
            }
        }
    }
    RelationReport { holds: violations.is_empty(), violations }
}

pub fn verify_clifford_relations(cb: &CliffordBasis) -> RelationReport {
    verify_generator_relations(cb.signature, &cb.generators())
}

/// Certificate that the regular representation has weak rank `2^(s+t)`.
/// The unit vector is tried first; its hull is the whole space.
pub fn clifford_rank_theorem_check(sig: CliffordSignature) -> Result<RankCertificate, CliffordError> {
    if sig.generators() > MAX_RANK_CHECK_GENERATORS {
        return Err(sig.too_large(MAX_RANK_CHECK_GENERATORS));
    }
    let d = sig.k_plus_1();
    let source = BasisSource::Clifford { s: sig.s, t: sig.t };
    let unit = crate::sampling::unit_vector(d, 0);
    let h = regular_hull_matrix(sig, &unit);
    let rank = exact_rank(&h);
    if rank.rank == d {
        return Ok(RankCertificate {
            kind: CertificateKind::Weak,
            claimed_rank: d,
            witness: unit,
            applicable_theorems: vec![THM_WITNESS.to_string(), THM_CLIFFORD.to_string()],
            evidence: vec![
                "witness: algebra unit (standard basis vector e_1)".into(),
                format!("hull dimension {d} equals the algebra dimension 2^{}", sig.generators()),
                format!(
                    "regular representation of Cl({},{}); affinors F_0..F_{} sit at positions 1..{} with F_0 = E",
                    sig.s,
                    sig.t,
                    d - 1,
                    d
                ),
            ],
            pivot_rows: rank.pivot_rows,
            pivot_cols: rank.pivot_cols,
            generic: None,
            basis: source,
        });
    }
    let cb = build_clifford(sig)?;
    match weak_search(cb.affinor_basis(), &source, &SearchOptions::default()) {
        WeakRankOutcome::Witness { certificate } => Ok(certificate),
        other => Err(CliffordError::NoWitness(format!("{other:?}"))),
    }
}

/// Generic rank check for the representation acting diagonally on two
/// copies of the algebra (`m = 2^(s+t+1)`).
pub fn doubled_generic_check(
    sig: CliffordSignature,
    opts: &SearchOptions,
) -> Result<GenericOutcome, CliffordError> {
    let cb = build_clifford(sig)?;
    let doubled = cb
        .affinor_basis()
        .direct_sum(2)
        .map_err(|e| CliffordError::RelationsViolated(e.to_string()))?;
    Ok(certify_generic_rank(&doubled, opts))
}
