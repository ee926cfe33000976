//! Cluster decomposition of metric k-distance sets, the volume bound
//! `m ≤ (1 + ρ_k/ρ_1)^d`, the recursive `2^{kd}` bound, and a Monte Carlo
//! check of the Brunn–Minkowski inequality on the union of half-balls.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::{cross, polygon_vertices_2d, Magnitude, NormKind, NormSpec, REL_EPS};
use crate::rational::{self, Rational};
use crate::spectrum::{DistanceSpectrum, DistanceTable, PointSet};
use crate::vector::Vector;

/// Partition of a set by `x ~ y ⟺ ρ(x, y) ≤ ρ_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterDecomposition {
    /// `i`, 1-based: the relation keeps the `i` smallest distances.
    pub threshold: usize,
    pub threshold_distance: Magnitude,
    /// Clusters ordered by their representative.
    pub clusters: Vec<Vec<Vector>>,
    /// Lexicographically smallest point of each cluster.
    pub representatives: Vec<Vector>,
}

/// Whether `x ~ y ⟺ class(x, y) < i` is transitive on the table.
fn is_transitive(table: &DistanceTable, i: usize) -> bool {
    let n = table.len();
    let related = |x: usize, y: usize| x == y || table.class(x, y).is_some_and(|c| c < i);
    for y in 0..n {
        let nbrs: Vec<usize> = (0..n).filter(|&x| x != y && related(x, y)).collect();
        for (a, &x) in nbrs.iter().enumerate() {
            for &z in &nbrs[a + 1..] {
                if !related(x, z) {
                    return false;
                }
            }
        }
    }
    true
}

fn clusters_at(points: &[Vector], table: &DistanceTable, i: usize) -> (Vec<Vec<usize>>, Vec<usize>) {
    let n = points.len();
    let mut seen = vec![false; n];
    let mut clusters = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        // The relation is transitive, so the class of `start` is its
        // neighbourhood.
        let members: Vec<usize> = (0..n)
            .filter(|&y| y == start || table.class(start, y).is_some_and(|c| c < i))
            .collect();
        for &m in &members {
            seen[m] = true;
        }
        clusters.push(members);
    }
    let reps: Vec<usize> = clusters
        .iter()
        .map(|c| *c.iter().min_by(|&&a, &&b| points[a].cmp(&points[b])).unwrap())
        .collect();
    let mut order: Vec<usize> = (0..clusters.len()).collect();
    order.sort_by(|&a, &b| points[reps[a]].cmp(&points[reps[b]]));
    (
        order.iter().map(|&o| clusters[o].clone()).collect(),
        order.iter().map(|&o| reps[o]).collect(),
    )
}

fn ratio(spectrum: &DistanceSpectrum) -> Option<Magnitude> {
    let (lo, hi) = (spectrum.min()?, spectrum.max()?);
    Some(match (lo, hi) {
        (Magnitude::Exact(a), Magnitude::Exact(b)) => Magnitude::Exact(b / a),
        _ => Magnitude::Approx(hi.to_f64() / lo.to_f64()),
    })
}

/// `ρ_k / ρ_1 > 2^{k-1}`, the hypothesis that guarantees a threshold.
fn spread_exceeds(spectrum: &DistanceSpectrum) -> bool {
    let Some(r) = ratio(spectrum) else {
        return false;
    };
    let limit = rational::pow(&rational::int(2), spectrum.k() as u32 - 1);
    match r {
        Magnitude::Exact(q) => q > limit,
        Magnitude::Approx(x) => x > rational::to_f64(&limit) * (1.0 + REL_EPS),
    }
}

/// Smallest `i ∈ [1, k-1]` for which `ρ(x, y) ≤ ρ_i` is an equivalence
/// relation on the set, with the resulting clusters.
///
/// Returns a falsification error if none exists although
/// `ρ_k / ρ_1 > 2^{k-1}`.
pub fn find_equivalence_threshold(spec: &NormSpec, set: &PointSet) -> Result<Option<ClusterDecomposition>> {
    set.check_norm(spec)?;
    let table = DistanceTable::build(spec, set.points())?;
    let k = table.num_classes();
    if k < 2 {
        return Err(Error::input(format!("a cluster threshold needs k >= 2, the set has k = {k}")));
    }
    let Some(i) = (1..k).find(|&i| is_transitive(&table, i)) else {
        if spread_exceeds(&table.spectrum()) {
            return Err(Error::falsification(
                "no equivalence threshold although rho_k / rho_1 > 2^(k-1)",
            ));
        }
        return Ok(None);
    };
    let points = set.points();
    let (clusters, reps) = clusters_at(points, &table, i);
    Ok(Some(ClusterDecomposition {
        threshold: i,
        threshold_distance: table.value(i - 1).clone(),
        clusters: clusters
            .iter()
            .map(|c| c.iter().map(|&j| points[j].clone()).collect())
            .collect(),
        representatives: reps.iter().map(|&j| points[j].clone()).collect(),
    }))
}

/// `(1 + ρ_k / ρ_1)^d`
pub fn volume_ratio_bound(spectrum: &DistanceSpectrum, d: usize) -> Result<Magnitude> {
    let r = ratio(spectrum).ok_or_else(|| Error::input("the volume bound needs at least one distance"))?;
    Ok(match r {
        Magnitude::Exact(q) => Magnitude::Exact(rational::pow(&(q + rational::one()), d as u32)),
        Magnitude::Approx(x) => Magnitude::Approx((1.0 + x).powi(d as i32)),
    })
}

fn floor_big(m: &Magnitude) -> BigUint {
    match m {
        Magnitude::Exact(q) => q.floor().to_integer().to_biguint().unwrap_or_default(),
        Magnitude::Approx(x) => BigUint::from((x * (1.0 + REL_EPS)).floor().max(0.0) as u128),
    }
}

/// One node of the recursive bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundTrace {
    pub size: usize,
    pub k: usize,
    /// `ρ_k / ρ_1`, absent for a single point.
    pub ratio: Option<Magnitude>,
    pub step: TraceStep,
    /// Bound produced by this node: the floored volume bound, or the
    /// product of the representative bound and the largest cluster bound.
    pub computed: String,
    /// `2^{kd}`
    pub certified: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceStep {
    Point,
    Volume {
        bound: Magnitude,
    },
    Split {
        threshold: usize,
        threshold_distance: Magnitude,
        clusters: Vec<BoundTrace>,
        representatives: Box<BoundTrace>,
    },
}

impl BoundTrace {
    pub fn depth(&self) -> usize {
        match &self.step {
            TraceStep::Split { clusters, representatives, .. } => {
                1 + clusters.iter().map(BoundTrace::depth).chain([representatives.depth()]).max().unwrap_or(0)
            }
            _ => 0,
        }
    }

    pub fn computed_bound(&self) -> BigUint {
        self.computed.parse().expect("decimal")
    }
}

/// Certifies `|S| ≤ 2^{kd}` for a k-distance set.
///
/// When `1 + ρ_k/ρ_1 ≤ 2^k` the volume bound already suffices. Otherwise the
/// cluster threshold splits the set into clusters with at most `i`
/// distances and representatives with at most `k - i`, and the two bounds
/// multiply. Every node asserts its size against both bounds.
pub fn decompose_recursive_bound(spec: &NormSpec, set: &PointSet) -> Result<BoundTrace> {
    set.check_norm(spec)?;
    let d = set.dim();
    let table = DistanceTable::build(spec, set.points())?;
    let spectrum = table.spectrum();
    let k = spectrum.k();
    let certified = BigUint::one() << (k * d);
    let n = set.len();
    if k == 0 {
        return Ok(BoundTrace {
            size: n,
            k,
            ratio: None,
            step: TraceStep::Point,
            computed: "1".into(),
            certified: certified.to_string(),
        });
    }
    let r = ratio(&spectrum).unwrap();
    let volume = volume_ratio_bound(&spectrum, d)?;
    let two_k = rational::pow(&rational::int(2), k as u32);
    let small_spread = match &r {
        Magnitude::Exact(q) => q + rational::one() <= two_k,
        Magnitude::Approx(x) => 1.0 + x <= rational::to_f64(&two_k) * (1.0 + REL_EPS),
    };
    let (step, computed) = if small_spread {
        let floor = floor_big(&volume);
        (TraceStep::Volume { bound: volume }, floor)
    } else {
        let Some(dec) = find_equivalence_threshold(spec, set)? else {
            return Err(Error::falsification(format!(
                "rho_k / rho_1 = {} exceeds 2^k - 1 but no threshold exists",
                r.to_f64()
            )));
        };
        let clusters = dec
            .clusters
            .iter()
            .map(|c| decompose_recursive_bound(spec, &PointSet::new(d, c.clone())?))
            .collect::<Result<Vec<_>>>()?;
        let reps = decompose_recursive_bound(spec, &PointSet::new(d, dec.representatives.clone())?)?;
        let widest = clusters.iter().map(BoundTrace::computed_bound).max().unwrap_or_default();
        let product = reps.computed_bound() * widest;
        (
            TraceStep::Split {
                threshold: dec.threshold,
                threshold_distance: dec.threshold_distance,
                clusters,
                representatives: Box::new(reps),
            },
            product,
        )
    };
    if BigUint::from(n) > computed || computed > certified {
        return Err(Error::falsification(format!(
            "{n} points against computed bound {computed} and 2^(kd) = {certified}"
        )));
    }
    Ok(BoundTrace {
        size: n,
        k,
        ratio: Some(r),
        step,
        computed: computed.to_string(),
        certified: certified.to_string(),
    })
}

/// Monte Carlo estimate of a volume, with a 99% confidence half-width.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub estimate: f64,
    pub half_width: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrunnMinkowskiReport {
    pub dim: usize,
    pub points: usize,
    /// Radius `ρ_1 / 2` of the balls forming `V` (1/2 for a single point).
    pub radius: f64,
    pub unit_ball_volume: f64,
    pub volume_v: VolumeEstimate,
    pub volume_v_minus_v: VolumeEstimate,
    /// `m (ρ_1/2)^d vol(B)`; exact since the balls have disjoint interiors.
    pub predicted_v: f64,
    /// `(ρ_1 + ρ_k)^d vol(B)`
    pub difference_body_bound: f64,
    /// Exact union areas, for ℓ∞ in the plane.
    pub exact_v: Option<f64>,
    pub exact_v_minus_v: Option<f64>,
    pub volume_formula_ok: bool,
    pub difference_body_ok: bool,
    pub brunn_minkowski_ok: bool,
    /// Set when a half-width exceeds 5% of its estimate: the sample budget
    /// is too small for the checks to mean much.
    pub budget_flag: bool,
}

impl BrunnMinkowskiReport {
    pub fn holds(&self) -> bool {
        self.volume_formula_ok && self.difference_body_ok && self.brunn_minkowski_ok
    }
}

const Z99: f64 = 2.576;

/// Volume of the unit ball: exact for ℓ∞, ℓ1 and planar polygons,
/// estimated otherwise.
fn unit_ball_volume<R: Rng>(spec: &NormSpec, samples: usize, rng: &mut R) -> Result<f64> {
    let d = spec.dim as i32;
    Ok(match &spec.kind {
        NormKind::LInfinity => 2f64.powi(d),
        NormKind::LOne => 2f64.powi(d) / (1..=spec.dim).map(|i| i as f64).product::<f64>(),
        NormKind::Polytopal(_) if spec.dim == 2 => {
            let poly = polygon_vertices_2d(spec)?;
            let m = poly.len();
            let twice: Rational = (0..m).map(|i| cross(&poly[i], &poly[(i + 1) % m])).sum();
            rational::to_f64(&twice) / 2.0
        }
        _ => {
            let r = linf_radius(spec);
            let centers = [vec![0.0; spec.dim]];
            monte_carlo_union(spec, &centers, 1.0, r, samples, rng).estimate
        }
    })
}

/// An `R` with `‖x‖_∞ ≤ R ‖x‖` for every `x`.
fn linf_radius(spec: &NormSpec) -> f64 {
    match &spec.kind {
        NormKind::LInfinity | NormKind::LOne | NormKind::LpFloat(_) => 1.0,
        NormKind::Polytopal(fs) => {
            // Pick `d` independent functionals A; then |Ax|_∞ ≤ ‖x‖ and
            // ‖x‖_∞ ≤ ‖A^{-1}‖_{∞→∞} ‖x‖.
            let d = spec.dim;
            let mut chosen: Vec<Vector> = Vec::new();
            for f in fs {
                let mut trial = chosen.clone();
                trial.push(f.clone());
                if crate::norm::rank(&trial) == trial.len() {
                    chosen = trial;
                }
                if chosen.len() == d {
                    break;
                }
            }
            let a: Vec<Vec<f64>> = chosen.iter().map(Vector::to_f64).collect();
            let inv = invert(a);
            inv.iter().map(|row| row.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max) * (1.0 + 1e-9)
        }
    }
}

fn invert(mut a: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        a.swap(c, p);
        inv.swap(c, p);
        let pivot = a[c][c];
        for j in 0..n {
            a[c][j] /= pivot;
            inv[c][j] /= pivot;
        }
        for i in 0..n {
            if i != c {
                let f = a[i][c];
                for j in 0..n {
                    a[i][j] -= f * a[c][j];
                    inv[i][j] -= f * inv[c][j];
                }
            }
        }
    }
    inv
}

/// Hit-or-miss estimate of the volume of `⋃ B(c, radius)`.
fn monte_carlo_union<R: Rng>(spec: &NormSpec, centers: &[Vec<f64>], radius: f64, linf_r: f64, samples: usize, rng: &mut R) -> VolumeEstimate {
    let d = spec.dim;
    let reach = radius * linf_r;
    let lo: Vec<f64> = (0..d).map(|j| centers.iter().map(|c| c[j]).fold(f64::INFINITY, f64::min) - reach).collect();
    let hi: Vec<f64> = (0..d).map(|j| centers.iter().map(|c| c[j]).fold(f64::NEG_INFINITY, f64::max) + reach).collect();
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let mut hits = 0usize;
    let mut p = vec![0.0; d];
    let mut diff = vec![0.0; d];
    for _ in 0..samples {
        for j in 0..d {
            p[j] = rng.random_range(lo[j]..hi[j]);
        }
        let inside = centers.iter().any(|c| {
            // Cheap ℓ∞ rejection before the real norm.
            for j in 0..d {
                diff[j] = p[j] - c[j];
                if diff[j].abs() > reach {
                    return false;
                }
            }
            spec.eval_f64(&diff) <= radius
        });
        if inside {
            hits += 1;
        }
    }
    let frac = hits as f64 / samples as f64;
    VolumeEstimate {
        estimate: frac * box_volume,
        half_width: Z99 * box_volume * (frac * (1.0 - frac) / samples as f64).sqrt(),
        samples,
    }
}

/// Exact area of a union of axis-parallel squares `c + [-h, h]^2`.
pub fn union_area_of_squares(centers: &[Vector], half_side: &Rational) -> Rational {
    let mut xs: Vec<Rational> = centers
        .iter()
        .flat_map(|c| [&c.coords()[0] - half_side, &c.coords()[0] + half_side])
        .collect();
    xs.sort();
    xs.dedup();
    let mut area = rational::zero();
    for w in xs.windows(2) {
        let (x0, x1) = (&w[0], &w[1]);
        let mid = (x0 + x1) / rational::int(2);
        let mut spans: Vec<(Rational, Rational)> = centers
            .iter()
            .filter(|c| (&c.coords()[0] - &mid).abs() < *half_side)
            .map(|c| (&c.coords()[1] - half_side, &c.coords()[1] + half_side))
            .collect();
        spans.sort();
        let mut covered = rational::zero();
        let mut current: Option<(Rational, Rational)> = None;
        for (a, b) in spans {
            match &mut current {
                Some((_, end)) if a <= *end => {
                    if b > *end {
                        *end = b;
                    }
                }
                _ => {
                    if let Some((s, e)) = current.take() {
                        covered += e - s;
                    }
                    current = Some((a, b));
                }
            }
        }
        if let Some((s, e)) = current {
            covered += e - s;
        }
        area += covered * (x1 - x0);
    }
    area
}

/// Estimates `vol V` and `vol (V - V)` for `V = ⋃ B(x_i, ρ_1/2)` and checks
/// the volume identity, the containment `V - V ⊆ B(0, ρ_1 + ρ_k)`, and
/// `vol(V - V)^{1/d} ≥ 2 vol(V)^{1/d}`, each up to the 99% half-widths.
///
/// `V - V` is the union of the balls `B(x_i - x_j, ρ_1)`, since
/// `B(a, r) - B(b, r) = B(a - b, 2r)` for a symmetric convex unit ball.
pub fn brunn_minkowski_mc_check(spec: &NormSpec, set: &PointSet, samples: usize, seed: u64) -> Result<BrunnMinkowskiReport> {
    set.check_norm(spec)?;
    let d = set.dim();
    if !(2..=3).contains(&d) {
        return Err(Error::input("the Monte Carlo check supports dimensions 2 and 3"));
    }
    if samples == 0 {
        return Err(Error::input("need at least one sample"));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let spectrum = DistanceTable::build(spec, set.points())?.spectrum();
    let (rho1, rhok) = match (spectrum.min(), spectrum.max()) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => (Magnitude::Exact(rational::one()), Magnitude::Exact(rational::one())),
    };
    let radius = rho1.to_f64() / 2.0;
    let ball = unit_ball_volume(spec, samples, &mut rng)?;
    let linf_r = linf_radius(spec);

    let centers: Vec<Vec<f64>> = set.points().iter().map(Vector::to_f64).collect();
    let diffs: BTreeSet<Vector> = set
        .points()
        .iter()
        .flat_map(|a| set.points().iter().map(move |b| a - b))
        .collect();
    let diff_centers: Vec<Vec<f64>> = diffs.iter().map(Vector::to_f64).collect();

    let volume_v = monte_carlo_union(spec, &centers, radius, linf_r, samples, &mut rng);
    let volume_vv = monte_carlo_union(spec, &diff_centers, 2.0 * radius, linf_r, samples, &mut rng);

    let m = set.len() as f64;
    let predicted_v = m * radius.powi(d as i32) * ball;
    let difference_body_bound = (rho1.to_f64() + rhok.to_f64()).powi(d as i32) * ball;

    let (exact_v, exact_vv) = match (&spec.kind, &rho1) {
        (NormKind::LInfinity, Magnitude::Exact(r1)) if d == 2 => {
            let half = r1 / rational::int(2);
            let v = union_area_of_squares(set.points(), &half);
            let diffs: Vec<Vector> = diffs.iter().cloned().collect();
            let vv = union_area_of_squares(&diffs, r1);
            (Some(rational::to_f64(&v)), Some(rational::to_f64(&vv)))
        }
        _ => (None, None),
    };

    let slack = 1e-9 * predicted_v.max(1.0);
    let volume_formula_ok = (volume_v.estimate - predicted_v).abs() <= volume_v.half_width + slack
        && exact_v.is_none_or(|e| (e - predicted_v).abs() <= slack);
    let difference_body_ok = volume_vv.estimate <= difference_body_bound + volume_vv.half_width + slack
        && exact_vv.is_none_or(|e| e <= difference_body_bound + slack);
    let lhs = (volume_vv.estimate + volume_vv.half_width).powf(1.0 / d as f64);
    let rhs = 2.0 * (volume_v.estimate - volume_v.half_width).max(0.0).powf(1.0 / d as f64);
    let brunn_minkowski_ok = lhs + 1e-12 >= rhs;
    let budget_flag = volume_v.half_width > 0.05 * volume_v.estimate || volume_vv.half_width > 0.05 * volume_vv.estimate;

    Ok(BrunnMinkowskiReport {
        dim: d,
        points: set.len(),
        radius,
        unit_ball_volume: ball,
        volume_v,
        volume_v_minus_v: volume_vv,
        predicted_v,
        difference_body_bound,
        exact_v,
        exact_v_minus_v: exact_vv,
        volume_formula_ok,
        difference_body_ok,
        brunn_minkowski_ok,
        budget_flag,
    })
}
