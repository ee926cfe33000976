//! Assembles the tightest applicable cardinality certificate for a point set.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::chains::{chain_certificate, ConeFamily};
use crate::cover::general_bound;
use crate::decompose::decompose_recursive_bound;
use crate::error::Result;
use crate::norm::{NormKind, NormSpec};
use crate::planar::planar_bound_certificate;
use crate::spectrum::{distance_spectrum, PointSet};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `(k+1)^d` for ℓ∞ via coordinate chain heights.
    GridHeights,
    /// `(k+1)^2` in the plane via the normalized quadrant cones.
    PlanarQuadrants,
    /// `min(2^{kd}, (k+1)^{(11^d - 9^d)/2})` with the cluster recursion.
    ConeCover,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubCheck {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub bound: BoundKind,
    pub tool_version: String,
    /// SHA-256 of the canonical JSON of the norm and the points.
    pub inputs_digest: String,
    pub k: usize,
    /// Decimal, since the general bound overflows machine integers.
    pub claimed: String,
    pub observed: usize,
    pub checks: Vec<SubCheck>,
    pub witnesses: Value,
    pub pass: bool,
}

pub fn inputs_digest(spec: &NormSpec, set: &PointSet) -> Result<String> {
    let canonical = serde_json::to_vec(&json!({ "norm": spec, "points": set }))?;
    Ok(hex::encode(Sha256::digest(canonical)))
}

fn check(name: &str, pass: bool) -> SubCheck {
    SubCheck { name: name.into(), pass }
}

/// ℓ∞ → chain heights, exact planar norms → quadrant cones, anything else →
/// the general bound together with the cluster recursion trace.
///
/// Falsification errors from the components propagate; a certificate with
/// `pass == false` means a sub-check or the cardinality comparison failed.
pub fn bound_certificate(spec: &NormSpec, set: &PointSet) -> Result<BoundCertificate> {
    let k = distance_spectrum(spec, set)?.k();
    let d = set.dim();
    let observed = set.len();
    let (bound, claimed, checks, witnesses) = match &spec.kind {
        NormKind::LInfinity => {
            let cert = chain_certificate(spec, set, &ConeFamily::linf(d))?;
            let claimed = BigUint::from(k + 1).pow(d as u32);
            let checks = vec![
                check("heights_injective", cert.injective),
                check("equal_norm_condition", cert.conditions_hold()),
                check("height_at_most_k", cert.h <= k),
                check("size_within_height_bound", observed as u128 <= cert.bound),
            ];
            (BoundKind::GridHeights, claimed, checks, serde_json::to_value(&cert)?)
        }
        _ if d == 2 && spec.is_exact() => {
            let cert = planar_bound_certificate(spec, set, k)?;
            let claimed = BigUint::from(cert.claimed);
            let checks = vec![
                check("normalization", cert.normalization.checks.all()),
                check("quadrant_cones", cert.cones.report.holds()),
                check("heights_injective", cert.heights.injective),
                check("size_within_height_bound", observed as u128 <= cert.heights.bound),
            ];
            (BoundKind::PlanarQuadrants, claimed, checks, serde_json::to_value(&cert)?)
        }
        _ => {
            let trace = decompose_recursive_bound(spec, set)?;
            let claimed = general_bound(k as u32, d as u32);
            let checks = vec![check("recursion_bound", BigUint::from(observed) <= trace.computed_bound())];
            (BoundKind::ConeCover, claimed, checks, json!({ "decomposition": trace }))
        }
    };
    let pass = BigUint::from(observed) <= claimed && checks.iter().all(|c| c.pass);
    Ok(BoundCertificate {
        bound,
        tool_version: TOOL_VERSION.into(),
        inputs_digest: inputs_digest(spec, set)?,
        k,
        claimed: claimed.to_string(),
        observed,
        checks,
        witnesses,
        pass,
    })
}
