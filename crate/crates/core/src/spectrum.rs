//! Distance spectra, the k-distance predicate, and distinct-distance
//! witnesses.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::{approx_eq, norm_eval, Magnitude, NormSpec};
use crate::vector::Vector;

/// A finite set of pairwise distinct points of a common dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPointSet")]
pub struct PointSet {
    dim: usize,
    points: Vec<Vector>,
}

#[derive(Deserialize)]
struct RawPointSet {
    dim: usize,
    points: Vec<Vector>,
}

impl TryFrom<RawPointSet> for PointSet {
    type Error = Error;
    fn try_from(raw: RawPointSet) -> Result<Self> {
        PointSet::new(raw.dim, raw.points)
    }
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<Vector>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("dimension must be at least 1"));
        }
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::input(format!(
                "point {p} has dimension {}, expected {dim}",
                p.dim()
            )));
        }
        let mut seen = BTreeSet::new();
        for p in &points {
            if !seen.insert(p) {
                return Err(Error::input(format!("duplicate point {p}")));
            }
        }
        Ok(PointSet { dim, points })
    }

    /// Infers the dimension from the first point.
    pub fn from_points(points: Vec<Vector>) -> Result<Self> {
        let dim = points
            .first()
            .map(Vector::dim)
            .ok_or_else(|| Error::input("cannot infer the dimension of an empty point set"))?;
        PointSet::new(dim, points)
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        PointSet::from_points(rows.iter().map(|r| Vector::from_ints(r)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<Vector> {
        self.points
    }

    /// Same points, sorted lexicographically.
    pub fn sorted(&self) -> PointSet {
        let mut points = self.points.clone();
        points.sort();
        PointSet { dim: self.dim, points }
    }

    /// `S + t`
    pub fn translate(&self, t: &Vector) -> PointSet {
        PointSet {
            dim: self.dim,
            points: self.points.iter().map(|p| p + t).collect(),
        }
    }

    pub fn subset(&self, indices: &[usize]) -> PointSet {
        PointSet {
            dim: self.dim,
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
        }
    }

    pub(crate) fn check_norm(&self, spec: &NormSpec) -> Result<()> {
        if spec.dim != self.dim {
            return Err(Error::input(format!(
                "point set has dimension {}, norm has dimension {}",
                self.dim, spec.dim
            )));
        }
        Ok(())
    }
}

/// Pairwise distances of a point set, bucketed into classes numbered in
/// increasing order of distance.
#[derive(Clone, Debug)]
pub struct DistanceTable {
    n: usize,
    class: Vec<u32>,
    values: Vec<Magnitude>,
    multiplicities: Vec<usize>,
}

impl DistanceTable {
    /// Exact norms are grouped by equality. Float norms are grouped by
    /// single linkage over the sorted list: consecutive values within the
    /// relative tolerance fall into one class.
    pub fn build(spec: &NormSpec, points: &[Vector]) -> Result<Self> {
        let n = points.len();
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                let d = norm_eval(spec, &(&points[i] - &points[j]))?;
                if d.is_zero() {
                    return Err(Error::input(format!("points {} and {} coincide", points[i], points[j])));
                }
                pairs.push((d, i, j));
            }
        }
        pairs.sort_by(|a, b| a.0.compare(&b.0));
        let mut class = vec![u32::MAX; n * n];
        let mut values: Vec<Magnitude> = Vec::new();
        let mut multiplicities = Vec::new();
        let mut prev: Option<&Magnitude> = None;
        for (d, i, j) in &pairs {
            let fresh = match prev {
                None => true,
                Some(Magnitude::Exact(p)) if d.is_exact() => d.as_exact() != Some(p),
                Some(p) => !approx_eq(p.to_f64(), d.to_f64()),
            };
            if fresh {
                values.push(d.clone());
                multiplicities.push(0);
            }
            prev = Some(d);
            let c = (values.len() - 1) as u32;
            *multiplicities.last_mut().unwrap() += 1;
            class[i * n + j] = c;
            class[j * n + i] = c;
        }
        Ok(DistanceTable {
            n,
            class,
            values,
            multiplicities,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Class index of the pair `(i, j)`, `None` on the diagonal.
    pub fn class(&self, i: usize, j: usize) -> Option<usize> {
        let c = self.class[i * self.n + j];
        (c != u32::MAX).then_some(c as usize)
    }

    pub(crate) fn class_raw(&self, i: usize, j: usize) -> u32 {
        self.class[i * self.n + j]
    }

    pub fn value(&self, class: usize) -> &Magnitude {
        &self.values[class]
    }

    pub fn distance(&self, i: usize, j: usize) -> Option<&Magnitude> {
        self.class(i, j).map(|c| &self.values[c])
    }

    pub fn num_classes(&self) -> usize {
        self.values.len()
    }

    pub fn spectrum(&self) -> DistanceSpectrum {
        DistanceSpectrum {
            distances: self.values.clone(),
            multiplicities: self.multiplicities.clone(),
        }
    }

    /// Number of distinct distance classes among the pairs of `indices`.
    pub fn classes_within(&self, indices: &[usize]) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for (a, &i) in indices.iter().enumerate() {
            for &j in &indices[a + 1..] {
                out.extend(self.class(i, j));
            }
        }
        out
    }
}

/// Sorted distinct nonzero distances `ρ_1 < … < ρ_k` and how many pairs
/// realise each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceSpectrum {
    pub distances: Vec<Magnitude>,
    pub multiplicities: Vec<usize>,
}

impl DistanceSpectrum {
    pub fn k(&self) -> usize {
        self.distances.len()
    }

    pub fn pairs(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn min(&self) -> Option<&Magnitude> {
        self.distances.first()
    }

    pub fn max(&self) -> Option<&Magnitude> {
        self.distances.last()
    }
}

pub fn distance_spectrum(spec: &NormSpec, set: &PointSet) -> Result<DistanceSpectrum> {
    set.check_norm(spec)?;
    Ok(DistanceTable::build(spec, set.points())?.spectrum())
}

/// `true` iff the set has exactly `k` distinct nonzero distances.
pub fn is_k_distance_set(spec: &NormSpec, set: &PointSet, k: usize) -> Result<bool> {
    Ok(distance_spectrum(spec, set)?.k() == k)
}

/// A point with the most distinct distances to the rest of the set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinctWitness {
    pub point: Vector,
    pub count: usize,
    pub distances: Vec<Magnitude>,
}

/// Maximises `#{‖x - y‖ : y ∈ S, y ≠ x}` over `x ∈ S`; ties go to the
/// lexicographically smallest point.
pub fn best_distinct_witness(spec: &NormSpec, set: &PointSet) -> Result<DistinctWitness> {
    set.check_norm(spec)?;
    if set.len() < 2 {
        return Err(Error::input("a distinct-distance witness needs at least two points"));
    }
    let table = DistanceTable::build(spec, set.points())?;
    let mut best: Option<(usize, BTreeSet<usize>)> = None;
    for i in 0..set.len() {
        let classes: BTreeSet<usize> = (0..set.len()).filter_map(|j| table.class(i, j)).collect();
        let better = match &best {
            None => true,
            Some((b, bc)) => {
                classes.len() > bc.len()
                    || (classes.len() == bc.len() && set.points()[i] < set.points()[*b])
            }
        };
        if better {
            best = Some((i, classes));
        }
    }
    let (i, classes) = best.unwrap();
    Ok(DistinctWitness {
        point: set.points()[i].clone(),
        count: classes.len(),
        distances: classes.iter().map(|&c| table.value(c).clone()).collect(),
    })
}

/// All points of `{0, …, m}^d`, lexicographically ordered.
pub fn lattice_cube(m: i64, d: usize) -> Vec<Vector> {
    lattice_box(&vec![(0, m); d])
}

/// All integer points of the box `∏ [lo_i, hi_i]`, lexicographically ordered.
pub fn lattice_box(ranges: &[(i64, i64)]) -> Vec<Vector> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for &(lo, hi) in ranges {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (lo..=hi).map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out.iter().map(|p| Vector::from_ints(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};
    use proptest::prelude::*;

    fn grid(m: i64, d: usize) -> PointSet {
        PointSet::new(d, lattice_cube(m, d)).unwrap()
    }

    fn exact(xs: &[i64]) -> Vec<Magnitude> {
        xs.iter().map(|&x| Magnitude::Exact(int(x))).collect()
    }

    #[test]
    fn grid_spectrum() {
        let s = distance_spectrum(&NormSpec::linf(2), &grid(2, 2)).unwrap();
        assert_eq!(s.distances, exact(&[1, 2]));
        assert_eq!(s.pairs(), 36);
        // 20 pairs at distance 1: 12 axis-neighbours and 8 diagonal ones.
        assert_eq!(s.multiplicities, vec![20, 16]);
    }

    #[test]
    fn unit_square_is_equilateral() {
        let s = PointSet::from_ints(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]).unwrap();
        assert_eq!(distance_spectrum(&NormSpec::linf(2), &s).unwrap().distances, exact(&[1]));
        assert!(is_k_distance_set(&NormSpec::linf(2), &s, 1).unwrap());
    }

    #[test]
    fn single_point_has_empty_spectrum() {
        let s = PointSet::from_ints(&[&[3]]).unwrap();
        let spec = distance_spectrum(&NormSpec::linf(1), &s).unwrap();
        assert_eq!(spec.k(), 0);
        assert!(is_k_distance_set(&NormSpec::linf(1), &s, 0).unwrap());
    }

    #[test]
    fn k_distance_predicate() {
        for k in 1..=3 {
            for d in 1..=2 {
                assert!(is_k_distance_set(&NormSpec::linf(d), &grid(k, d), k as usize).unwrap());
            }
        }
        assert!(!is_k_distance_set(&NormSpec::linf(2), &grid(2, 2), 1).unwrap());
        let two = PointSet::from_ints(&[&[0, 0], &[5, 3]]).unwrap();
        assert!(is_k_distance_set(&NormSpec::linf(2), &two, 1).unwrap());
    }

    #[test]
    fn rejects_bad_sets() {
        assert!(PointSet::from_ints(&[&[0, 0], &[0, 0]]).is_err());
        assert!(PointSet::from_ints(&[&[0, 0], &[0]]).is_err());
        let s = PointSet::from_ints(&[&[0, 0], &[1, 0]]).unwrap();
        assert!(matches!(distance_spectrum(&NormSpec::linf(3), &s), Err(Error::Input(_))));
    }

    #[test]
    fn witness_examples() {
        let w = best_distinct_witness(&NormSpec::linf(2), &grid(2, 2)).unwrap();
        assert_eq!(w.count, 2);
        assert_eq!(w.point, Vector::from_ints(&[0, 0]));
        let two = PointSet::from_ints(&[&[0, 0], &[5, 0]]).unwrap();
        assert_eq!(best_distinct_witness(&NormSpec::linf(2), &two).unwrap().count, 1);
        let line = grid(7, 1);
        let w = best_distinct_witness(&NormSpec::linf(1), &line).unwrap();
        assert_eq!((w.count, w.point), (7, Vector::from_ints(&[0])));
        assert!(best_distinct_witness(&NormSpec::linf(1), &grid(0, 1)).is_err());
    }

    #[test]
    fn float_grouping_merges_round_off() {
        // Euclidean distances sqrt(2) computed along two different diagonals.
        let s = PointSet::from_ints(&[&[0, 0], &[1, 1], &[2, 0]]).unwrap();
        let spec = distance_spectrum(&NormSpec::lp(2, 2.0).unwrap(), &s).unwrap();
        assert_eq!(spec.k(), 2);
        assert_eq!(spec.multiplicities, vec![2, 1]);
    }

    fn point_set(d: usize) -> impl Strategy<Value = PointSet> {
        prop::collection::btree_set(prop::collection::vec(-6i64..=6, d), 1..10).prop_map(move |pts| {
            PointSet::new(d, pts.into_iter().map(|p| Vector::from_ints(&p)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn translation_invariance(s in point_set(2), t in prop::collection::vec(-9i64..=9, 2)) {
            for spec in [NormSpec::linf(2), NormSpec::l1(2), NormSpec::hexagon()] {
                let a = distance_spectrum(&spec, &s).unwrap();
                let b = distance_spectrum(&spec, &s.translate(&Vector::from_ints(&t))).unwrap();
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn scaling_covariance(s in point_set(2), num in 1i64..=7, den in 1i64..=5) {
            let lambda = q(num, den);
            let scaled = PointSet::new(2, s.points().iter().map(|p| p.scale(&lambda)).collect()).unwrap();
            let a = distance_spectrum(&NormSpec::hexagon(), &s).unwrap();
            let b = distance_spectrum(&NormSpec::hexagon(), &scaled).unwrap();
            prop_assert_eq!(&a.multiplicities, &b.multiplicities);
            for (x, y) in a.distances.iter().zip(&b.distances) {
                prop_assert_eq!(x.as_exact().unwrap() * &lambda, y.as_exact().unwrap().clone());
            }
        }

        #[test]
        fn multiplicities_count_all_pairs(s in point_set(3)) {
            let sp = distance_spectrum(&NormSpec::linf(3), &s).unwrap();
            prop_assert_eq!(sp.pairs(), s.len() * (s.len() - 1) / 2);
        }

        #[test]
        fn witness_meets_chain_bound(s in point_set(2)) {
            prop_assume!(s.len() >= 2);
            let w = best_distinct_witness(&NormSpec::linf(2), &s).unwrap();
            let r = crate::rational::ceil_root(s.len() as u64, 2) as usize;
            prop_assert!(w.count + 1 >= r);
        }
    }
}
