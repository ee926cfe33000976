//! Cone orders, chain heights, and the height-vector certificate.
//!
//! An acute cone `P` orders space by `y < x ⟺ x - y ∈ P \ {0}`. For a
//! family of cones whose union with their negatives covers space, the map
//! `x ↦ (h_1(x), …, h_m(x))` sending a point to its longest descending
//! chain lengths is injective on every finite set, so `|S| ≤ (h + 1)^m`.
//! When in addition equal-norm vectors of one cone never differ by a vector
//! of that cone, a descending chain from `x` sees pairwise distinct
//! distances, which caps `h` by the number of distances.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::{norm_eval, rank, Magnitude, NormSpec};
use crate::rational::{self, Rational};
use crate::spectrum::{DistanceTable, PointSet};
use crate::vector::Vector;

/// `v = 0` or `max_j |v_j| = v_i` (coordinate `i` is 0-based).
pub fn linf_cone_contains(i: usize, v: &Vector) -> bool {
    v.is_zero() || v.coords()[i] == v.max_abs()
}

/// A closed polyhedral cone `{x : c·x ≥ 0 for every facet c}` with some
/// open boundary rays `{t r : t > 0}` taken out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyhedralCone {
    pub dim: usize,
    pub facets: Vec<Vector>,
    #[serde(default)]
    pub excluded_rays: Vec<Vector>,
}

impl PolyhedralCone {
    pub fn new(dim: usize, facets: Vec<Vector>, excluded_rays: Vec<Vector>) -> Result<Self> {
        let cone = PolyhedralCone {
            dim,
            facets,
            excluded_rays,
        };
        cone.validate()?;
        Ok(cone)
    }

    pub fn contains(&self, v: &Vector) -> bool {
        self.facets.iter().all(|c| !c.dot(v).is_negative())
            && !self.excluded_rays.iter().any(|r| v.is_positive_multiple_of(r))
    }

    fn in_closure(&self, v: &Vector) -> bool {
        self.facets.iter().all(|c| !c.dot(v).is_negative())
    }

    /// Pointedness of the closed cone (full-rank facets, so no line inside)
    /// and extremality of every removed ray. Removing an extreme ray keeps
    /// the set convex; removing any other ray would not.
    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.facets.iter().chain(&self.excluded_rays).find(|v| v.dim() != self.dim) {
            return Err(Error::input(format!("cone datum {bad} has the wrong dimension")));
        }
        if rank(&self.facets) < self.dim {
            return Err(Error::geometry("cone contains a line (facets do not have full rank)"));
        }
        for r in &self.excluded_rays {
            if r.is_zero() || !self.in_closure(r) {
                return Err(Error::geometry(format!("excluded ray {r} is not a ray of the cone")));
            }
            let tight: Vec<Vector> = self.facets.iter().filter(|c| c.dot(r).is_zero()).cloned().collect();
            if rank(&tight) + 1 < self.dim {
                return Err(Error::geometry(format!("excluded ray {r} is not an extreme ray")));
            }
        }
        Ok(())
    }

    /// The closed coordinate orthant with the given signs (`true` = positive).
    pub fn orthant(signs: &[bool]) -> Self {
        let dim = signs.len();
        let facets = signs
            .iter()
            .enumerate()
            .map(|(i, &pos)| {
                let e = Vector::unit(dim, i);
                if pos {
                    e
                } else {
                    -&e
                }
            })
            .collect();
        PolyhedralCone {
            dim,
            facets,
            excluded_rays: Vec::new(),
        }
    }
}

/// One cone of a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Cone {
    /// `{λ : max_j |λ_j| = λ_index}` (0-based index).
    LInf { dim: usize, index: usize },
    Polyhedral(PolyhedralCone),
}

impl Cone {
    pub fn contains(&self, v: &Vector) -> bool {
        match self {
            Cone::LInf { index, .. } => linf_cone_contains(*index, v),
            Cone::Polyhedral(p) => p.contains(v),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Cone::LInf { dim, .. } => *dim,
            Cone::Polyhedral(p) => p.dim,
        }
    }
}

/// An indexed family of acute cones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeFamily {
    pub cones: Vec<Cone>,
}

impl ConeFamily {
    pub fn new(cones: Vec<Cone>) -> Result<Self> {
        let Some(first) = cones.first() else {
            return Err(Error::input("a cone family needs at least one cone"));
        };
        let dim = first.dim();
        if cones.iter().any(|c| c.dim() != dim) {
            return Err(Error::input("cones of a family must share the ambient dimension"));
        }
        for c in &cones {
            if let Cone::Polyhedral(p) = c {
                p.validate()?;
            }
        }
        Ok(ConeFamily { cones })
    }

    /// The `d` cones `P_i = {max_j |λ_j| = λ_i}` of ℓ∞.
    pub fn linf(dim: usize) -> Self {
        ConeFamily {
            cones: (0..dim).map(|index| Cone::LInf { dim, index }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.cones[0].dim()
    }

    /// First index `i` with `v ∈ P_i ∪ -P_i`.
    pub fn covering_index(&self, v: &Vector) -> Option<usize> {
        let neg = -v;
        self.cones.iter().position(|c| c.contains(v) || c.contains(&neg))
    }
}

/// Two equal-norm vectors of one cone whose difference lies in that cone
/// (up to sign).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SameNormViolation {
    pub cone: usize,
    pub x: Vector,
    pub y: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeConditionReport {
    pub vectors: usize,
    /// Vectors outside every `P_i ∪ -P_i`.
    pub uncovered: Vec<Vector>,
    pub same_norm: Vec<SameNormViolation>,
}

impl ConeConditionReport {
    pub fn holds(&self) -> bool {
        self.uncovered.is_empty() && self.same_norm.is_empty()
    }
}

/// Checks the covering condition on every vector and the equal-norm
/// condition on every pair of vectors that share a cone.
pub fn check_cone_conditions(family: &ConeFamily, spec: &NormSpec, vectors: &[Vector]) -> Result<ConeConditionReport> {
    if vectors.is_empty() {
        return Err(Error::input("no vectors to check"));
    }
    let uncovered = vectors
        .iter()
        .filter(|v| !v.is_zero() && family.covering_index(v).is_none())
        .cloned()
        .collect();
    let norms = vectors
        .iter()
        .map(|v| norm_eval(spec, v))
        .collect::<Result<Vec<_>>>()?;
    let mut same_norm = Vec::new();
    for (ci, cone) in family.cones.iter().enumerate() {
        let mut members: Vec<usize> = (0..vectors.len()).filter(|&i| cone.contains(&vectors[i])).collect();
        members.sort_by(|&a, &b| norms[a].compare(&norms[b]));
        let mut start = 0;
        while start < members.len() {
            let mut end = start + 1;
            while end < members.len() && norms[members[end]].same(&norms[members[start]]) {
                end += 1;
            }
            let group = &members[start..end];
            for (a, &i) in group.iter().enumerate() {
                for &j in &group[a + 1..] {
                    let diff = &vectors[i] - &vectors[j];
                    if !diff.is_zero() && (cone.contains(&diff) || cone.contains(&-&diff)) {
                        same_norm.push(SameNormViolation {
                            cone: ci,
                            x: vectors[i].clone(),
                            y: vectors[j].clone(),
                        });
                    }
                }
            }
            start = end;
        }
    }
    Ok(ConeConditionReport {
        vectors: vectors.len(),
        uncovered,
        same_norm,
    })
}

/// The strict orders of a family evaluated on a point set:
/// `below[c][x]` lists the `y` with `p_x - p_y ∈ P_c`, `y ≠ x`.
struct OrderRelation {
    below: Vec<Vec<Vec<usize>>>,
    member: Vec<Vec<bool>>,
    n: usize,
}

impl OrderRelation {
    fn build(points: &[Vector], family: &ConeFamily) -> Self {
        let n = points.len();
        let mut below = vec![vec![Vec::new(); n]; family.len()];
        let mut member = vec![vec![false; n * n]; family.len()];
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let diff = &points[x] - &points[y];
                for (c, cone) in family.cones.iter().enumerate() {
                    if cone.contains(&diff) {
                        below[c][x].push(y);
                        member[c][x * n + y] = true;
                    }
                }
            }
        }
        OrderRelation { below, member, n }
    }

    fn less(&self, cone: usize, y: usize, x: usize) -> bool {
        self.member[cone][x * self.n + y]
    }
}

/// Heights and chain successors for each cone.
struct Heights {
    height: Vec<Vec<usize>>,
    next: Vec<Vec<Option<usize>>>,
}

fn compute_heights(points: &[Vector], rel: &OrderRelation) -> Result<Heights> {
    let n = points.len();
    let cones = rel.below.len();
    let mut height = vec![vec![0; n]; cones];
    let mut next = vec![vec![None; n]; cones];
    for c in 0..cones {
        // 0 = unvisited, 1 = on the stack, 2 = done
        let mut state = vec![0u8; n];
        for start in 0..n {
            visit(c, start, points, rel, &mut state, &mut height[c], &mut next[c])?;
        }
    }
    Ok(Heights { height, next })
}

fn visit(
    c: usize,
    x: usize,
    points: &[Vector],
    rel: &OrderRelation,
    state: &mut [u8],
    height: &mut [usize],
    next: &mut [Option<usize>],
) -> Result<()> {
    match state[x] {
        2 => return Ok(()),
        1 => {
            return Err(Error::certificate(format!(
                "cone {c} induces a cycle through {}; the cone is not acute",
                points[x]
            )))
        }
        _ => {}
    }
    state[x] = 1;
    let mut best: Option<usize> = None;
    for &y in &rel.below[c][x] {
        visit(c, y, points, rel, state, height, next)?;
        best = match best {
            None => Some(y),
            Some(b) if height[y] > height[b] || (height[y] == height[b] && points[y] < points[b]) => Some(y),
            keep => keep,
        };
    }
    height[x] = best.map_or(0, |b| height[b] + 1);
    next[x] = best;
    state[x] = 2;
    Ok(())
}

/// `(h_1(x), …, h_m(x))` for a point `x` of `set`.
pub fn height_vector(set: &PointSet, x: &Vector, family: &ConeFamily) -> Result<Vec<usize>> {
    let idx = set
        .points()
        .iter()
        .position(|p| p == x)
        .ok_or_else(|| Error::input(format!("{x} is not a point of the set")))?;
    if family.dim() != set.dim() {
        return Err(Error::input("cone family and point set differ in dimension"));
    }
    let rel = OrderRelation::build(set.points(), family);
    let h = compute_heights(set.points(), &rel)?;
    Ok(h.height.iter().map(|col| col[idx]).collect())
}

/// The height-vector certificate of a point set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightCertificate {
    #[serde(with = "heights_json")]
    pub heights: Vec<(Vector, Vec<usize>)>,
    /// Largest height over all points and cones.
    pub h: usize,
    /// Number of cones in the family.
    pub cones: usize,
    /// Number of distinct distances of the set.
    pub k: usize,
    /// `(h + 1)^cones`
    pub bound: u128,
    pub injective: bool,
    /// Violations of the equal-norm condition found on the set. When empty,
    /// `h ≤ k` is guaranteed.
    pub violations: Vec<SameNormViolation>,
}

impl HeightCertificate {
    pub fn conditions_hold(&self) -> bool {
        self.violations.is_empty()
    }

    /// `(k + 1)^cones`, the bound the certificate proves when the
    /// conditions hold.
    pub fn distance_bound(&self) -> u128 {
        (self.k as u128 + 1).pow(self.cones as u32)
    }
}

/// Builds the height certificate for `set` under `family`.
///
/// Covering is required on every difference of the set. The equal-norm
/// condition is checked on every pair of differences `x - y`, `x - z`
/// sharing a base point `x`, which are the only pairs a descending chain
/// from `x` can involve; failures are recorded rather than raised.
pub fn chain_certificate(spec: &NormSpec, set: &PointSet, family: &ConeFamily) -> Result<HeightCertificate> {
    set.check_norm(spec)?;
    if family.dim() != set.dim() {
        return Err(Error::input("cone family and point set differ in dimension"));
    }
    let points = set.points();
    let n = points.len();
    let table = DistanceTable::build(spec, points)?;
    let rel = OrderRelation::build(points, family);

    for x in 0..n {
        for y in x + 1..n {
            if !(0..family.len()).any(|c| rel.less(c, y, x) || rel.less(c, x, y)) {
                return Err(Error::certificate(format!(
                    "no cone of the family contains ±({} - {})",
                    points[x], points[y]
                )));
            }
        }
    }

    let mut violations = Vec::new();
    for c in 0..family.len() {
        for x in 0..n {
            let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &y in &rel.below[c][x] {
                by_class.entry(table.class(x, y).unwrap()).or_default().push(y);
            }
            for group in by_class.values() {
                for (a, &y) in group.iter().enumerate() {
                    for &z in &group[a + 1..] {
                        if rel.less(c, y, z) || rel.less(c, z, y) {
                            violations.push(SameNormViolation {
                                cone: c,
                                x: &points[x] - &points[y],
                                y: &points[x] - &points[z],
                            });
                        }
                    }
                }
            }
        }
    }

    let hs = compute_heights(points, &rel)?;
    let vectors: Vec<Vec<usize>> = (0..n).map(|i| hs.height.iter().map(|col| col[i]).collect()).collect();
    let injective = vectors.iter().collect::<BTreeSet<_>>().len() == n;
    let h = vectors.iter().flatten().copied().max().unwrap_or(0);
    let bound = (h as u128 + 1).pow(family.len() as u32);
    let k = table.num_classes();

    if !injective {
        return Err(Error::falsification(
            "height vectors collide although the cones cover every difference",
        ));
    }
    if n as u128 > bound {
        return Err(Error::falsification(format!("{n} points exceed (h+1)^m = {bound}")));
    }
    if violations.is_empty() && h > k {
        return Err(Error::falsification(format!(
            "chain of length {h} in a {k}-distance set although the equal-norm condition holds"
        )));
    }
    Ok(HeightCertificate {
        heights: points.iter().cloned().zip(vectors).collect(),
        h,
        cones: family.len(),
        k,
        bound,
        injective,
        violations,
    })
}

/// A longest descending chain and the distances from its head.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainWitness {
    pub cone: usize,
    pub chain: Vec<Vector>,
    pub distances: Vec<Magnitude>,
}

impl ChainWitness {
    /// Number of steps in the chain (points minus one).
    pub fn length(&self) -> usize {
        self.chain.len().saturating_sub(1)
    }
}

/// Longest descending chain over all cones (ties: lowest cone index, then
/// lexicographically smallest head, then smallest successors) together with
/// the distances from its head, which must be pairwise distinct.
pub fn chain_distinct_distances(spec: &NormSpec, set: &PointSet, family: &ConeFamily) -> Result<ChainWitness> {
    let cert = chain_certificate(spec, set, family)?;
    let points = set.points();
    let rel = OrderRelation::build(points, family);
    let hs = compute_heights(points, &rel)?;
    let mut head: Option<(usize, usize)> = None;
    for c in 0..family.len() {
        for x in 0..points.len() {
            let better = match head {
                None => true,
                Some((bc, bx)) => {
                    let (hx, hb) = (hs.height[c][x], hs.height[bc][bx]);
                    hx > hb || (hx == hb && c == bc && points[x] < points[bx])
                }
            };
            if better {
                head = Some((c, x));
            }
        }
    }
    let Some((cone, mut x)) = head else {
        return Err(Error::input("empty point set"));
    };
    let mut chain = vec![points[x].clone()];
    while let Some(y) = hs.next[cone][x] {
        chain.push(points[y].clone());
        x = y;
    }
    let distances = chain[1..]
        .iter()
        .map(|p| norm_eval(spec, &(&chain[0] - p)))
        .collect::<Result<Vec<_>>>()?;
    for (i, a) in distances.iter().enumerate() {
        if distances[i + 1..].iter().any(|b| a.same(b)) {
            return Err(Error::certificate(format!(
                "distances from {} along the chain repeat; the equal-norm condition fails on this set",
                chain[0]
            )));
        }
    }
    let witness = ChainWitness { cone, chain, distances };
    let floor = rational::ceil_root(points.len() as u64, family.len() as u32).saturating_sub(1);
    if (witness.length() as u64) < floor || witness.length() != cert.h {
        return Err(Error::falsification(format!(
            "longest chain has length {} but injectivity forces at least {floor}",
            witness.length()
        )));
    }
    Ok(witness)
}

/// Heights serialise as an object keyed by the point's display form,
/// e.g. `{"(0, 1/2)": [0, 1]}`.
mod heights_json {
    use super::*;

    pub fn serialize<S: Serializer>(hs: &[(Vector, Vec<usize>)], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(hs.len()))?;
        for (p, h) in hs {
            map.serialize_entry(&p.to_string(), h)?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<(Vector, Vec<usize>)>, D::Error> {
        let raw = serde_json::Map::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                let p = parse_point(&k).map_err(de::Error::custom)?;
                let h = Vec::<usize>::deserialize(v).map_err(de::Error::custom)?;
                Ok((p, h))
            })
            .collect()
    }
}

/// Inverse of `Vector`'s `Display`.
pub fn parse_point(s: &str) -> std::result::Result<Vector, String> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| format!("not a point: {s:?}"))?;
    inner
        .split(',')
        .map(|c| c.trim().parse::<Rational>().map_err(|e| format!("{c:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(Vector::new)
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cone::LInf { index, .. } => write!(f, "P_{}", index + 1),
            Cone::Polyhedral(p) => write!(f, "cone({} facets, {} rays removed)", p.facets.len(), p.excluded_rays.len()),
        }
    }
}

/// Heights by fixpoint relaxation of `h(x) = max_{y < x} h(y) + 1`,
/// independent of the memoised search. Used as a test oracle.
#[doc(hidden)]
pub fn relaxation_heights(points: &[Vector], cone: &Cone) -> Vec<usize> {
    let n = points.len();
    let below: Vec<Vec<usize>> = (0..n)
        .map(|x| (0..n).filter(|&y| y != x && cone.contains(&(&points[x] - &points[y]))).collect())
        .collect();
    let mut h = vec![0usize; n];
    for _ in 0..n {
        let mut changed = false;
        for x in 0..n {
            let best = below[x].iter().map(|&y| h[y] + 1).max().unwrap_or(0);
            if best != h[x] {
                h[x] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::lattice_cube;
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> Vector {
        Vector::from_ints(xs)
    }

    fn grid(m: i64, d: usize) -> PointSet {
        PointSet::new(d, lattice_cube(m, d)).unwrap()
    }

    #[test]
    fn linf_cone_membership() {
        assert!(linf_cone_contains(0, &v(&[3, 1])));
        assert!(!linf_cone_contains(0, &v(&[-3, 1])));
        assert!(linf_cone_contains(1, &v(&[2, 2])));
        assert!(linf_cone_contains(0, &v(&[2, 2])));
        assert!(linf_cone_contains(1, &v(&[0, 0])));
    }

    #[test]
    fn grid_heights_are_coordinates_by_brute_force() {
        for d in 1..=3 {
            for m in 1..=3i64 {
                let g = grid(m, d);
                let fam = ConeFamily::linf(d);
                let rel = OrderRelation::build(g.points(), &fam);
                let hs = compute_heights(g.points(), &rel).unwrap();
                for c in 0..d {
                    let oracle = relaxation_heights(g.points(), &fam.cones[c]);
                    for (x, p) in g.points().iter().enumerate() {
                        assert_eq!(hs.height[c][x], oracle[x]);
                        assert_eq!(crate::rational::int(oracle[x] as i64), p.coords()[c]);
                    }
                }
            }
        }
    }

    #[test]
    fn height_vector_examples() {
        let one = PointSet::from_ints(&[&[4, 4]]).unwrap();
        assert_eq!(height_vector(&one, &v(&[4, 4]), &ConeFamily::linf(2)).unwrap(), vec![0, 0]);
        let two = PointSet::from_ints(&[&[0, 0], &[3, 1]]).unwrap();
        assert_eq!(height_vector(&two, &v(&[3, 1]), &ConeFamily::linf(2)).unwrap(), vec![1, 0]);
        assert!(height_vector(&two, &v(&[9, 9]), &ConeFamily::linf(2)).is_err());
    }

    #[test]
    fn certificate_examples() {
        let c = chain_certificate(&NormSpec::linf(2), &grid(2, 2), &ConeFamily::linf(2)).unwrap();
        assert_eq!((c.h, c.bound, c.injective, c.k), (2, 9, true, 2));
        assert!(c.conditions_hold());

        let two = PointSet::from_ints(&[&[0, 0], &[1, 1]]).unwrap();
        let c = chain_certificate(&NormSpec::linf(2), &two, &ConeFamily::linf(2)).unwrap();
        assert_eq!((c.h, c.bound, c.injective), (1, 4, true));

        let c = chain_certificate(&NormSpec::linf(2), &grid(3, 2), &ConeFamily::linf(2)).unwrap();
        assert_eq!((c.h, c.bound, c.k), (3, 16, 3));
    }

    #[test]
    fn certificate_rejects_uncovered_difference() {
        let half = ConeFamily::new(vec![Cone::LInf { dim: 2, index: 0 }]).unwrap();
        let s = PointSet::from_ints(&[&[0, 0], &[0, 1]]).unwrap();
        let err = chain_certificate(&NormSpec::linf(2), &s, &half).unwrap_err();
        assert!(matches!(err, Error::Certificate(_)));
    }

    #[test]
    fn condition_report_examples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let vs: Vec<Vector> = (0..100)
            .map(|_| loop {
                let p = v(&[rng.random_range(-50..=50), rng.random_range(-50..=50)]);
                if !p.is_zero() {
                    break p;
                }
            })
            .collect();
        let r = check_cone_conditions(&ConeFamily::linf(2), &NormSpec::linf(2), &vs).unwrap();
        assert!(r.uncovered.is_empty());

        let r = check_cone_conditions(&ConeFamily::linf(2), &NormSpec::linf(2), &[v(&[2, 1]), v(&[2, -1])]).unwrap();
        assert!(r.holds());

        let single = ConeFamily::new(vec![Cone::LInf { dim: 2, index: 0 }]).unwrap();
        let r = check_cone_conditions(&single, &NormSpec::linf(2), &[v(&[0, 1])]).unwrap();
        assert_eq!(r.uncovered, vec![v(&[0, 1])]);
    }

    #[test]
    fn equal_norm_violation_is_reported() {
        // Closed first quadrant under the hexagon gauge: (1,1) and (1,0)
        // both have norm 1 and differ by (0,1), inside the quadrant.
        let q1 = Cone::Polyhedral(PolyhedralCone::orthant(&[true, true]));
        let fam = ConeFamily::new(vec![q1]).unwrap();
        let r = check_cone_conditions(&fam, &NormSpec::hexagon(), &[v(&[1, 1]), v(&[1, 0])]).unwrap();
        assert_eq!(r.same_norm.len(), 1);
    }

    #[test]
    fn excluded_rays_must_be_extreme() {
        let ok = PolyhedralCone::new(2, vec![v(&[1, 0]), v(&[0, 1])], vec![v(&[1, 0]), v(&[0, 3])]);
        assert!(ok.is_ok());
        let c = ok.unwrap();
        assert!(!c.contains(&v(&[2, 0])));
        assert!(c.contains(&v(&[0, 0])));
        assert!(c.contains(&v(&[1, 1])));
        assert!(PolyhedralCone::new(2, vec![v(&[1, 0]), v(&[0, 1])], vec![v(&[1, 1])]).is_err());
        // A half-plane is not acute.
        assert!(PolyhedralCone::new(2, vec![v(&[1, 0])], vec![]).is_err());
    }

    #[test]
    fn cycle_in_non_acute_family_is_detected() {
        // A half-plane "cone" (skipping validation) orders (0,0) and (0,1)
        // both ways.
        let fam = ConeFamily {
            cones: vec![Cone::Polyhedral(PolyhedralCone { dim: 2, facets: vec![v(&[1, 0])], excluded_rays: vec![] })],
        };
        let s = PointSet::from_ints(&[&[0, 0], &[0, 1]]).unwrap();
        assert!(matches!(height_vector(&s, &v(&[0, 0]), &fam), Err(Error::Certificate(_))));
    }

    #[test]
    fn chain_witness_examples() {
        let w = chain_distinct_distances(&NormSpec::linf(2), &grid(2, 2), &ConeFamily::linf(2)).unwrap();
        assert_eq!(w.cone, 0);
        assert_eq!(w.chain, vec![v(&[2, 0]), v(&[1, 0]), v(&[0, 0])]);
        let ds: Vec<f64> = w.distances.iter().map(Magnitude::to_f64).collect();
        assert_eq!(ds, vec![1.0, 2.0]);

        let two = PointSet::from_ints(&[&[0, 0], &[4, 1]]).unwrap();
        assert_eq!(chain_distinct_distances(&NormSpec::linf(2), &two, &ConeFamily::linf(2)).unwrap().length(), 1);

        let line = grid(7, 1);
        let w = chain_distinct_distances(&NormSpec::linf(1), &line, &ConeFamily::linf(1)).unwrap();
        assert_eq!(w.length(), 7);
        assert_eq!(w.distances.iter().map(Magnitude::to_f64).collect::<Vec<_>>(), (1..=7).map(f64::from).collect::<Vec<_>>());
    }

    #[test]
    fn certificate_json_round_trip() {
        let c = chain_certificate(&NormSpec::linf(2), &grid(1, 2), &ConeFamily::linf(2)).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"(0, 1)\":[0,1]"));
        let mut back: HeightCertificate = serde_json::from_str(&text).unwrap();
        back.heights.sort();
        let mut orig = c.clone();
        orig.heights.sort();
        assert_eq!(back, orig);
    }

    fn point_set(d: usize) -> impl Strategy<Value = PointSet> {
        prop::collection::btree_set(prop::collection::vec(0i64..=5, d), 1..14).prop_map(move |pts| {
            PointSet::new(d, pts.into_iter().map(|p| Vector::from_ints(&p)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn linf_certificate_bounds_every_set(s in point_set(2)) {
            let c = chain_certificate(&NormSpec::linf(2), &s, &ConeFamily::linf(2)).unwrap();
            prop_assert!(c.injective);
            prop_assert!(c.conditions_hold());
            prop_assert!(c.h <= c.k);
            prop_assert!((s.len() as u128) <= c.distance_bound());
        }

        #[test]
        fn heights_invariant_under_translation_and_scaling(
            s in point_set(2),
            t in prop::collection::vec(-7i64..=7, 2),
            num in 1i64..=5,
            den in 1i64..=4,
        ) {
            let fam = ConeFamily::linf(2);
            let lambda = crate::rational::q(num, den);
            let t = Vector::from_ints(&t);
            let moved = PointSet::new(2, s.points().iter().map(|p| &p.scale(&lambda) + &t).collect()).unwrap();
            let a = chain_certificate(&NormSpec::linf(2), &s, &fam).unwrap();
            let b = chain_certificate(&NormSpec::linf(2), &moved, &fam).unwrap();
            let ha: Vec<_> = a.heights.iter().map(|(_, h)| h.clone()).collect();
            let hb: Vec<_> = b.heights.iter().map(|(_, h)| h.clone()).collect();
            prop_assert_eq!(ha, hb);
        }

        #[test]
        fn cone_order_is_strict_partial_order(s in point_set(3)) {
            let fam = ConeFamily::linf(3);
            let rel = OrderRelation::build(s.points(), &fam);
            let n = s.len();
            for c in 0..3 {
                for x in 0..n {
                    prop_assert!(!rel.less(c, x, x));
                    for y in 0..n {
                        if !rel.less(c, y, x) { continue; }
                        prop_assert!(!rel.less(c, x, y));
                        for z in 0..n {
                            if rel.less(c, z, y) {
                                prop_assert!(rel.less(c, z, x));
                            }
                        }
                    }
                }
            }
        }
    }
}
