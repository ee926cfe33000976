//! Covering the unit sphere by cones in any dimension.
//!
//! A maximal set of unit vectors that are pairwise `1/5`-separated in both
//! `c_i - c_j` and `c_i + c_j` yields, for each centre, the cone generated by
//! the unit vectors within `1/5` of it. Every normalized element of such a
//! cone stays within `1/2` of its centre, and a packing argument limits the
//! number of centres to `(11^d - 9^d) / 2`.

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::{approx_eq, norm_eval, polygon_vertices_2d, Magnitude, NormSpec};
use crate::rational::{self, Rational};
use crate::vector::Vector;

/// The separation constant `1/5`.
pub fn separation() -> Rational {
    rational::q(1, 5)
}

/// Pairwise `1/5`-separated unit vectors (in both signs).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatedSet {
    pub dim: usize,
    pub centers: Vec<Vector>,
    #[serde(with = "rational::serde_rational")]
    pub separation: Rational,
    /// Number of samples the greedy pass scanned.
    pub samples: usize,
}

impl SeparatedSet {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

fn is_unit(spec: &NormSpec, v: &Vector) -> Result<bool> {
    Ok(match norm_eval(spec, v)? {
        Magnitude::Exact(q) => q == rational::one(),
        Magnitude::Approx(x) => approx_eq(x, 1.0),
    })
}

fn require_unit(spec: &NormSpec, v: &Vector) -> Result<()> {
    if !is_unit(spec, v)? {
        return Err(Error::input(format!("{v} is not a unit vector")));
    }
    Ok(())
}

/// `v / ‖v‖`; exact for the exact kinds, rounded through f64 for ℓp.
pub fn normalize(spec: &NormSpec, v: &Vector) -> Result<Vector> {
    match norm_eval(spec, v)? {
        Magnitude::Exact(n) => Ok(v.scale(&(rational::one() / n))),
        Magnitude::Approx(n) => {
            let coords = v
                .to_f64()
                .iter()
                .map(|x| rational::from_f64(x / n).ok_or_else(|| Error::input("non-finite coordinate")))
                .collect::<Result<Vec<_>>>()?;
            Ok(Vector::new(coords))
        }
    }
}

/// Deterministic unit samples in a fixed order. Exact planar norms are
/// sampled along the boundary polygon by uniform rational subdivision
/// (sample `j` sits at parameter `j * m / count` around the `m` edges);
/// other norms normalize a seeded pseudo-random lattice direction.
pub fn sphere_samples(spec: &NormSpec, count: usize, seed: u64) -> Result<Vec<Vector>> {
    if spec.dim == 2 && spec.is_exact() {
        let poly = polygon_vertices_2d(spec)?;
        let m = poly.len();
        return Ok((0..count)
            .map(|j| {
                let pos = j * m;
                let (edge, rem) = (pos / count, pos % count);
                let (a, b) = (&poly[edge], &poly[(edge + 1) % m]);
                a + &(b - a).scale(&rational::q(rem as i64, count as i64))
            })
            .collect());
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    random_sphere_samples(spec, count, &mut rng)
}

/// Independent unit samples: random rational points of the boundary
/// polygon for exact planar norms, normalized random directions otherwise.
pub fn random_sphere_samples<R: Rng>(spec: &NormSpec, count: usize, rng: &mut R) -> Result<Vec<Vector>> {
    if spec.dim == 2 && spec.is_exact() {
        let poly = polygon_vertices_2d(spec)?;
        let m = poly.len();
        return Ok((0..count)
            .map(|_| {
                let e = rng.random_range(0..m);
                let den = rng.random_range(1..=10_007i64);
                let t = rational::q(rng.random_range(0..den), den);
                let (a, b) = (&poly[e], &poly[(e + 1) % m]);
                a + &(b - a).scale(&t)
            })
            .collect());
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let dir = Vector::from_ints(&(0..spec.dim).map(|_| rng.random_range(-1000..=1000)).collect::<Vec<_>>());
        if !dir.is_zero() {
            out.push(normalize(spec, &dir)?);
        }
    }
    Ok(out)
}

fn separated_from(spec: &NormSpec, c: &Vector, x: &Vector, sep: &Rational) -> Result<bool> {
    Ok(norm_eval(spec, &(c - x))?.ge_rational(sep) && norm_eval(spec, &(c + x))?.ge_rational(sep))
}

/// One greedy pass in input order: a sample is kept when it is at distance
/// at least `1/5` from every kept vector and its negative. The result is
/// maximal with respect to the samples; other orders give other, equally
/// valid, sets.
pub fn greedy_separated_set(spec: &NormSpec, samples: &[Vector]) -> Result<SeparatedSet> {
    let sep = separation();
    let mut centers: Vec<Vector> = Vec::new();
    for s in samples {
        require_unit(spec, s)?;
        let mut keep = true;
        for c in &centers {
            if !separated_from(spec, c, s, &sep)? {
                keep = false;
                break;
            }
        }
        if keep {
            centers.push(s.clone());
        }
    }
    Ok(SeparatedSet {
        dim: spec.dim,
        centers,
        separation: sep,
        samples: samples.len(),
    })
}

/// Index of a centre `c_i` with `‖c_i - sign·x‖ < 1/5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub index: usize,
    /// `+1` when `‖c_i - x‖ < 1/5`, `-1` when only `‖c_i + x‖ < 1/5`.
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub tested: usize,
    pub assignments: Vec<Option<Assignment>>,
    pub unassigned: Vec<Vector>,
}

/// Assigns each unit test vector to the first centre within `1/5` of it or
/// of its negative.
pub fn cover_assignment(set: &SeparatedSet, spec: &NormSpec, tests: &[Vector]) -> Result<CoverReport> {
    let sep = separation();
    let mut assignments = Vec::with_capacity(tests.len());
    let mut unassigned = Vec::new();
    for x in tests {
        require_unit(spec, x)?;
        let mut found = None;
        for (i, c) in set.centers.iter().enumerate() {
            if norm_eval(spec, &(c - x))?.lt_rational(&sep) {
                found = Some(Assignment { index: i, sign: 1 });
                break;
            }
            if norm_eval(spec, &(c + x))?.lt_rational(&sep) {
                found = Some(Assignment { index: i, sign: -1 });
                break;
            }
        }
        if found.is_none() {
            unassigned.push(x.clone());
        }
        assignments.push(found);
    }
    Ok(CoverReport {
        tested: tests.len(),
        assignments,
        unassigned,
    })
}

/// The cone generated by the unit samples within `1/5` of a centre.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratedCone {
    pub center: Vector,
    pub generators: Vec<Vector>,
}

/// Generators are the centre itself plus every unit sample `x` with
/// `‖c - x‖ < 1/5`.
pub fn generated_cone(spec: &NormSpec, center: &Vector, samples: &[Vector]) -> Result<GeneratedCone> {
    require_unit(spec, center)?;
    let sep = separation();
    let mut generators = vec![center.clone()];
    for x in samples {
        if x != center && norm_eval(spec, &(center - x))?.lt_rational(&sep) {
            generators.push(x.clone());
        }
    }
    Ok(GeneratedCone {
        center: center.clone(),
        generators,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfwidthReport {
    pub trials: usize,
    /// Largest `‖c - u‖` over the sampled normalized combinations `u`.
    pub max_distance: f64,
    /// Largest coefficient sum of a normalized combination.
    pub max_coefficient_sum: f64,
    /// Largest `‖u - u'‖` over consecutive sampled unit pairs of the cone.
    pub max_pair_distance: f64,
}

/// Samples random nonnegative combinations of the generators, normalizes
/// them, and checks `‖c - u‖ < 1/2` and `Σ λ_j < 5/4`; consecutive samples
/// also give unit pairs `a, b` of the cone, checked for `‖a - b‖ < 1`. Any
/// failure is a certificate error.
pub fn cone_halfwidth_check<R: Rng>(cone: &GeneratedCone, spec: &NormSpec, trials: usize, rng: &mut R) -> Result<HalfwidthReport> {
    if cone.generators.is_empty() {
        return Err(Error::input("cone has no generators"));
    }
    let half = rational::q(1, 2);
    let five_fourths = rational::q(5, 4);
    let one = rational::one();
    let mut report = HalfwidthReport {
        trials,
        max_distance: 0.0,
        max_coefficient_sum: 0.0,
        max_pair_distance: 0.0,
    };
    let mut previous: Option<Vector> = None;
    let g = cone.generators.len();
    for _ in 0..trials {
        let terms = rng.random_range(1..=g.min(4));
        let mut combo = Vector::zero(spec.dim);
        let mut weight_sum = rational::zero();
        for _ in 0..terms {
            let x = &cone.generators[rng.random_range(0..g)];
            let w = rational::q(rng.random_range(1..=20), rng.random_range(1..=20));
            combo = &combo + &x.scale(&w);
            weight_sum += w;
        }
        let n = norm_eval(spec, &combo)?;
        if n.is_zero() {
            return Err(Error::certificate("a nonnegative combination of generators vanished"));
        }
        let (u, coefficient_sum) = match &n {
            Magnitude::Exact(q) => (combo.scale(&(&one / q)), Magnitude::Exact(&weight_sum / q)),
            Magnitude::Approx(x) => (
                normalize(spec, &combo)?,
                Magnitude::Approx(rational::to_f64(&weight_sum) / x),
            ),
        };
        let dist = norm_eval(spec, &(&cone.center - &u))?;
        if !dist.lt_rational(&half) {
            return Err(Error::certificate(format!(
                "normalized combination {u} lies at distance {} >= 1/2 from centre {}",
                dist.to_f64(),
                cone.center
            )));
        }
        if !coefficient_sum.lt_rational(&five_fourths) {
            return Err(Error::certificate(format!(
                "coefficient sum {} of a normalized combination reaches 5/4",
                coefficient_sum.to_f64()
            )));
        }
        report.max_distance = report.max_distance.max(dist.to_f64());
        report.max_coefficient_sum = report.max_coefficient_sum.max(coefficient_sum.to_f64());
        if let Some(prev) = &previous {
            let pair = norm_eval(spec, &(prev - &u))?;
            if !pair.lt_rational(&one) {
                return Err(Error::certificate(format!("unit vectors {prev} and {u} of one cone are at distance >= 1")));
            }
            report.max_pair_distance = report.max_pair_distance.max(pair.to_f64());
        }
        previous = Some(u);
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub m: usize,
    /// `(11^d - 9^d) / 2`, as a decimal string.
    pub limit: String,
    pub within_limit: bool,
    /// All centres unit and pairwise `1/5`-separated in both signs, so the
    /// balls `B(±c_i, 1/10)` have disjoint interiors.
    pub disjoint: bool,
}

impl PackingReport {
    pub fn holds(&self) -> bool {
        self.within_limit && self.disjoint
    }
}

/// `(11^d - 9^d) / 2`
pub fn packing_limit(d: u32) -> BigUint {
    (BigUint::from(11u32).pow(d) - BigUint::from(9u32).pow(d)) / BigUint::from(2u32)
}

/// Verifies the packing bound on a separated set. A violation means the
/// set is not what the construction says, and is raised as a falsification.
pub fn packing_bound_check(set: &SeparatedSet, spec: &NormSpec) -> Result<PackingReport> {
    let sep = separation();
    let limit = packing_limit(set.dim as u32);
    let mut disjoint = true;
    for (i, c) in set.centers.iter().enumerate() {
        if !is_unit(spec, c)? {
            disjoint = false;
        }
        for d in &set.centers[i + 1..] {
            if !separated_from(spec, c, d, &sep)? {
                disjoint = false;
            }
        }
    }
    let report = PackingReport {
        m: set.len(),
        limit: limit.to_string(),
        within_limit: BigUint::from(set.len()) <= limit,
        disjoint,
    };
    if !report.holds() {
        return Err(Error::falsification(format!("packing check failed: {report:?}")));
    }
    Ok(report)
}

/// `min(2^{kd}, (k + 1)^{(11^d - 9^d) / 2})`, exactly.
///
/// When `kd` does not exceed the cone count `E = (11^d - 9^d)/2`,
/// `2^{kd} ≤ 2^E ≤ (k+1)^E` and the second power is never formed. Panics
/// if `k * d` overflows `u32`.
pub fn general_bound(k: u32, d: u32) -> BigUint {
    let kd = k.checked_mul(d).expect("k * d overflows u32");
    let volume = BigUint::one() << kd as usize;
    let cones = packing_limit(d);
    if BigUint::from(kd) <= cones {
        return volume;
    }
    let exp: u32 = u32::try_from(&cones).expect("cone count fits in u32 when it is below k*d");
    let cone_bound = BigUint::from(k + 1).pow(exp);
    volume.min(cone_bound)
}
