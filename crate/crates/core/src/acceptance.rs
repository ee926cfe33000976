//! The acceptance suite: ten numbered checks over constructed and searched
//! instances, shared by the `selftest` subcommand and the test target.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chains::{chain_certificate, ConeFamily};
use crate::cover::{
    cone_halfwidth_check, cover_assignment, general_bound, generated_cone, greedy_separated_set, packing_bound_check,
    random_sphere_samples, sphere_samples,
};
use crate::decompose::{
    brunn_minkowski_mc_check, decompose_recursive_bound, find_equivalence_threshold, union_area_of_squares,
    volume_ratio_bound,
};
use crate::error::Result;
use crate::norm::{angle_cmp, Magnitude, NormKind, NormSpec};
use crate::planar::{max_area_normalization, planar_bound_certificate, quadrant_cones, random_symmetric_polygon};
use crate::rational::{self, ceil_root, Rational};
use crate::search::{branch_and_bound, brute_force_oracle, verify_extremal_uniqueness, SearchConfig, SearchProblem};
use crate::spectrum::{best_distinct_witness, distance_spectrum, lattice_box, lattice_cube, PointSet};
use crate::vector::Vector;

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u8,
    pub title: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub seed: u64,
    pub outcomes: Vec<Outcome>,
}

impl Summary {
    pub fn all_pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass)
    }

    pub fn table(&self) -> String {
        self.outcomes
            .iter()
            .map(|o| {
                format!(
                    "{} criterion {:>2} {:<28} {:>7.2}s  {}",
                    if o.pass { "PASS" } else { "FAIL" },
                    o.id,
                    o.title,
                    o.seconds,
                    o.detail
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Every set the suite has produced, with its norm, for the checks that
/// sweep all of them.
#[derive(Default)]
struct Corpus {
    sets: Vec<(NormSpec, PointSet)>,
}

impl Corpus {
    fn add(&mut self, spec: &NormSpec, set: &PointSet) {
        self.sets.push((spec.clone(), set.clone()));
    }
}

type Check = fn(&mut ChaCha8Rng, &mut Corpus) -> Result<(bool, String)>;

const CRITERIA: [(u8, &str, Check); 10] = [
    (1, "grid extremality", grid_extremality),
    (2, "height-map certificate", height_certificates),
    (3, "distinct-distance witness", distinct_witness),
    (4, "planar bound", planar_bound),
    (5, "normalization", normalization),
    (6, "cluster decomposition", cluster_decomposition),
    (7, "volume bound", volume_bound),
    (8, "cone cover", cone_cover),
    (9, "search oracle agreement", oracle_agreement),
    (10, "extremal uniqueness", extremal_uniqueness),
];

/// Runs all criteria in order. Later criteria sweep the sets produced by
/// earlier ones, so individual criteria are not exposed separately.
pub fn run_all(seed: u64) -> Summary {
    let mut corpus = Corpus::default();
    let outcomes = CRITERIA
        .iter()
        .map(|&(id, title, check)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(id as u64));
            let start = Instant::now();
            let (pass, detail) = match check(&mut rng, &mut corpus) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            Outcome {
                id,
                title: title.into(),
                pass,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect();
    Summary { seed, outcomes }
}

const PLAIN: SearchConfig = SearchConfig { use_bound_pruning: false, enumerate_optima: false };

fn grid_extremality(_: &mut ChaCha8Rng, corpus: &mut Corpus) -> Result<(bool, String)> {
    let start = Instant::now();
    let cases = [(1, 1), (1, 2), (1, 3), (1, 4), (2, 1), (2, 2), (3, 1)];
    let mut failures = Vec::new();
    for (d, k) in cases {
        let spec = NormSpec::linf(d);
        let ground = PointSet::new(d, lattice_cube(k as i64 + 1, d))?;
        let result = branch_and_bound(&SearchProblem::new(spec.clone(), ground, k)?, PLAIN)?;
        let expected = (k + 1).pow(d as u32);
        if result.size() != expected || !result.optimal {
            failures.push(format!("(d={d},k={k}) found {} want {expected}", result.size()));
        }
        corpus.add(&spec, &result.best);
    }
    let elapsed = start.elapsed();
    let in_time = elapsed < Duration::from_secs(120);
    let pass = failures.is_empty() && in_time;
    Ok((pass, format!("{} cases, {} mismatches, {:.2}s {}", cases.len(), failures.len(), elapsed.as_secs_f64(), failures.join("; "))))
}

fn random_subset(rng: &mut ChaCha8Rng, pool: &[Vector], max: usize) -> Vec<Vector> {
    let size = rng.random_range(1..=max.min(pool.len()));
    sample(rng, pool.len(), size).into_iter().map(|i| pool[i].clone()).collect()
}

fn height_certificates(rng: &mut ChaCha8Rng, corpus: &mut Corpus) -> Result<(bool, String)> {
    let mut failures = 0;
    let mut max_n = 0;
    for _ in 0..200 {
        let d = rng.random_range(1..=3);
        let pool = lattice_cube(5, d);
        let set = PointSet::new(d, random_subset(rng, &pool, 30))?;
        let spec = NormSpec::linf(d);
        let k = distance_spectrum(&spec, &set)?.k();
        let ok = match chain_certificate(&spec, &set, &ConeFamily::linf(d)) {
            Ok(cert) => {
                cert.injective && cert.conditions_hold() && cert.h <= k && (set.len() as u128) <= (k as u128 + 1).pow(d as u32)
            }
            Err(_) => false,
        };
        failures += usize::from(!ok);
        max_n = max_n.max(set.len());
        corpus.add(&spec, &set);
    }
    Ok((failures == 0, format!("200 sets up to {max_n} points, {failures} failures")))
}

/// `{0,…,m-2}^d ⊊ S ⊆ {0,…,m-1}^d` with `|S| = n`, the extra points drawn
/// from the outer shell.
fn half_open_grid(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Result<PointSet> {
    let m = ceil_root(n as u64, d as u32) as i64;
    let inner = if m >= 2 { lattice_cube(m - 2, d) } else { Vec::new() };
    let shell: Vec<Vector> = lattice_cube(m - 1, d)
        .into_iter()
        .filter(|p| p.coords().iter().any(|c| *c == rational::int(m - 1)))
        .collect();
    let extra = sample(rng, shell.len(), n - inner.len()).into_iter().map(|i| shell[i].clone());
    PointSet::new(d, inner.into_iter().chain(extra).collect())
}

fn distinct_witness(rng: &mut ChaCha8Rng, corpus: &mut Corpus) -> Result<(bool, String)> {
    let mut failures = 0;
    for _ in 0..200 {
        let d = rng.random_range(1..=3);
        let n = rng.random_range(2..=64);
        let den = rng.random_range(1..=3);
        let pool: Vec<Vector> = lattice_box(&vec![(-12, 12); d]).iter().map(|p| p.scale(&rational::q(1, den))).collect();
        let picked: Vec<Vector> = sample(rng, pool.len(), n.min(pool.len())).into_iter().map(|i| pool[i].clone()).collect();
        let set = PointSet::new(d, picked)?;
        let witness = best_distinct_witness(&NormSpec::linf(d), &set)?;
        if (witness.count as u64) + 1 < ceil_root(set.len() as u64, d as u32) {
            failures += 1;
        }
        corpus.add(&NormSpec::linf(d), &set);
    }
    let mut equality_misses = Vec::new();
    for n in 5..=16 {
        for _ in 0..3 {
            let set = half_open_grid(rng, n, 2)?;
            let want = ceil_root(n as u64, 2) as usize - 1;
            let k = distance_spectrum(&NormSpec::linf(2), &set)?.k();
            let count = best_distinct_witness(&NormSpec::linf(2), &set)?.count;
            if k != want || count != want {
                equality_misses.push(format!("n={n}: k={k}, witness {count}, want {want}"));
            }
        }
    }
    let pass = failures == 0 && equality_misses.is_empty();
    Ok((
        pass,
        format!(
            "200 random sets, {failures} below bound; half-open grids n=5..16: {} misses {}",
            equality_misses.len(),
            equality_misses.join("; ")
        ),
    ))
}

fn planar_bound(_: &mut ChaCha8Rng, corpus: &mut Corpus) -> Result<(bool, String)> {
    let start = Instant::now();
    let cases = [
        ("square", NormSpec::linf(2), lattice_cube(3, 2)),
        ("diamond", NormSpec::l1(2), lattice_box(&[(0, 4), (-2, 2)])),
        ("hexagon", NormSpec::hexagon(), lattice_box(&[(-2, 2), (-2, 2)])),
    ];
    let mut notes = Vec::new();
    let mut pass = true;
    let mut certified = 0;
    for (name, spec, ground) in cases {
        for k in 1..=2usize {
            let ground = PointSet::new(2, ground.clone())?;
            let problem = SearchProblem::new(spec.clone(), ground, k)?;
            let result = branch_and_bound(&problem, SearchConfig { use_bound_pruning: false, enumerate_optima: true })?;
            let claimed = (k as u128 + 1).pow(2);
            for set in result.optima.iter().flatten() {
                let set_k = distance_spectrum(&spec, set)?.k();
                let cert = planar_bound_certificate(&spec, set, set_k.max(1))?;
                pass &= cert.pass && cert.claimed <= claimed && (set.len() as u128) <= claimed;
                certified += 1;
                corpus.add(&spec, set);
            }
            if name == "hexagon" && k == 1 && result.size() != 3 {
                pass = false;
            }
            notes.push(format!("{name} k={k}: {}", result.size()));
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    Ok((pass, format!("optima {}; {certified} certificates, {:.2}s", notes.join(", "), elapsed.as_secs_f64())))
}

fn normalization(rng: &mut ChaCha8Rng, _: &mut Corpus) -> Result<(bool, String)> {
    let mut failures = 0;
    let mut cone_failures = 0;
    for _ in 0..50 {
        let polygon = random_symmetric_polygon(rng, 6, 12);
        match max_area_normalization(&polygon) {
            Ok(n) if n.checks.all() => {
                if quadrant_cones(&n.polygon).is_err() {
                    cone_failures += 1;
                }
            }
            _ => failures += 1,
        }
    }
    Ok((
        failures == 0 && cone_failures == 0,
        format!("50 polygons, {failures} normalization failures, {cone_failures} cone failures"),
    ))
}

/// Clusters drawn from `{0,1}^d` placed at `L·t` for translates `t` drawn
/// from `{0,1}^d`, with `L ≥ 10`: distances `1` inside clusters and
/// `L-1, L, L+1` across.
fn clustered_set(rng: &mut ChaCha8Rng, d: usize) -> Result<PointSet> {
    let unit = lattice_cube(1, d);
    let pick_two = |rng: &mut ChaCha8Rng| {
        let size = rng.random_range(2..=unit.len());
        sample(rng, unit.len(), size).into_iter().map(|i| unit[i].clone()).collect::<Vec<_>>()
    };
    let cluster = pick_two(rng);
    let translates = pick_two(rng);
    let spread = rational::int(rng.random_range(10..=40));
    let points = translates
        .iter()
        .flat_map(|t| cluster.iter().map(|c| &t.scale(&spread) + c).collect::<Vec<_>>())
        .collect();
    PointSet::new(d, points)
}

fn cluster_decomposition(rng: &mut ChaCha8Rng, corpus: &mut Corpus) -> Result<(bool, String)> {
    let mut constructed = 0;
    let mut threshold_failures = 0;
    while constructed < 100 {
        let d = rng.random_range(1..=3);
        let set = clustered_set(rng, d)?;
        let spec = NormSpec::linf(d);
        let spectrum = distance_spectrum(&spec, &set)?;
        let k = spectrum.k();
        let spread = match (spectrum.min(), spectrum.max()) {
            (Some(Magnitude::Exact(a)), Some(Magnitude::Exact(b))) => b / a,
            _ => continue,
        };
        if !(2..=4).contains(&k) || spread <= rational::pow(&rational::int(2), k as u32 - 1) {
            continue;
        }
        constructed += 1;
        let ok = matches!(find_equivalence_threshold(&spec, &set), Ok(Some(_)))
            && decompose_recursive_bound(&spec, &set).is_ok();
        threshold_failures += usize::from(!ok);
        corpus.add(&spec, &set);
    }
    let mut swept = 0;
    let mut sweep_failures = 0;
    for (spec, set) in corpus.sets.iter() {
        swept += 1;
        match decompose_recursive_bound(spec, set) {
            Ok(trace) => {
                let certified = BigUint::one() << (trace.k * set.dim());
                if BigUint::from(set.len()) > certified {
                    sweep_failures += 1;
                }
            }
            Err(_) => sweep_failures += 1,
        }
    }
    Ok((
        threshold_failures == 0 && sweep_failures == 0,
        format!("100 clustered sets, {threshold_failures} failures; {swept} suite sets, {sweep_failures} failures"),
    ))
}

fn volume_bound(_: &mut ChaCha8Rng, corpus: &mut Corpus) -> Result<(bool, String)> {
    let mut checked = 0;
    let mut failures = 0;
    let mut box_checked = 0;
    let mut box_failures = 0;
    for (spec, set) in &corpus.sets {
        let spectrum = distance_spectrum(spec, set)?;
        if spectrum.k() == 0 {
            continue;
        }
        checked += 1;
        let within = match volume_ratio_bound(&spectrum, set.dim())? {
            Magnitude::Exact(b) => rational::int(set.len() as i64) <= b,
            Magnitude::Approx(b) => set.len() as f64 <= b * (1.0 + 1e-9),
        };
        failures += usize::from(!within);
        if matches!(spec.kind, NormKind::LInfinity) && set.dim() == 2 {
            let rho1 = spectrum.min().and_then(Magnitude::as_exact).cloned().unwrap_or_else(rational::one);
            let half: Rational = &rho1 / rational::int(2);
            let predicted = rational::int(4 * set.len() as i64) * &half * &half;
            box_checked += 1;
            box_failures += usize::from(union_area_of_squares(set.points(), &half) != predicted);
        }
    }
    let mc_sets = [
        PointSet::new(2, lattice_cube(2, 2))?,
        PointSet::from_ints(&[&[0, 0], &[1, 0]])?,
        PointSet::from_ints(&[&[0, 0], &[3, 1], &[1, 4], &[5, 5], &[2, 2]])?,
    ];
    let mut worst: f64 = 0.0;
    let mut mc_ok = true;
    for (i, set) in mc_sets.iter().enumerate() {
        let r = brunn_minkowski_mc_check(&NormSpec::linf(2), set, 1_000_000, DEFAULT_SEED + i as u64)?;
        let exact_v = r.exact_v.unwrap_or(f64::NAN);
        let exact_vv = r.exact_v_minus_v.unwrap_or(f64::NAN);
        let err_v = (r.volume_v.estimate - exact_v).abs() / exact_v;
        let err_vv = (r.volume_v_minus_v.estimate - exact_vv).abs() / exact_vv;
        worst = worst.max(err_v).max(err_vv);
        mc_ok &= r.holds() && err_v <= 0.02 && err_vv <= 0.02;
    }
    let pass = failures == 0 && box_failures == 0 && mc_ok;
    Ok((
        pass,
        format!(
            "{checked} sets, {failures} over bound; {box_checked} exact unions, {box_failures} mismatches; MC worst relative error {:.4}",
            worst
        ),
    ))
}

/// Repeated multiplication, kept separate from the library arithmetic.
fn general_bound_oracle(k: u32, d: u32) -> BigUint {
    let mut volume = BigUint::one();
    for _ in 0..k * d {
        volume *= 2u32;
    }
    let (mut eleven, mut nine) = (BigUint::one(), BigUint::one());
    for _ in 0..d {
        eleven *= 11u32;
        nine *= 9u32;
    }
    let exponent: BigUint = (eleven - nine) / 2u32;
    let mut cones = BigUint::one();
    let mut i = BigUint::default();
    while i < exponent && cones <= volume {
        cones *= k + 1;
        i += 1u32;
    }
    volume.min(cones)
}

fn cone_cover(rng: &mut ChaCha8Rng, _: &mut Corpus) -> Result<(bool, String)> {
    let norms = [NormSpec::linf(2), NormSpec::l1(2), NormSpec::hexagon(), NormSpec::lp(2, 2.0)?];
    let mut notes = Vec::new();
    let mut pass = true;
    for spec in &norms {
        let mut samples = sphere_samples(spec, 10_000, rng.random())?;
        if !spec.is_exact() {
            samples.sort_by(angle_cmp);
        }
        let set = greedy_separated_set(spec, &samples)?;
        let packing = packing_bound_check(&set, spec)?;
        let fresh = random_sphere_samples(spec, 1_000, rng)?;
        let cover = cover_assignment(&set, spec, &fresh)?;
        let mut widths = 0.0f64;
        for c in &set.centers {
            let cone = generated_cone(spec, c, &samples)?;
            let report = cone_halfwidth_check(&cone, spec, 1_000, rng)?;
            widths = widths.max(report.max_distance);
        }
        pass &= set.len() <= 20 && packing.holds() && cover.unassigned.is_empty();
        notes.push(format!("m={} unassigned={} width={widths:.3}", set.len(), cover.unassigned.len()));
    }
    let mut arithmetic = 0;
    for k in 1..=4 {
        for d in 1..=4 {
            arithmetic += usize::from(general_bound(k, d) != general_bound_oracle(k, d));
        }
    }
    pass &= arithmetic == 0;
    Ok((pass, format!("{}; general bound mismatches {arithmetic}", notes.join(", "))))
}

fn random_norm(rng: &mut ChaCha8Rng, d: usize) -> Result<NormSpec> {
    Ok(match rng.random_range(0..4) {
        0 => NormSpec::linf(d),
        1 => NormSpec::l1(d),
        2 => NormSpec::lp(d, [1.5, 2.0, 3.0][rng.random_range(0..3)])?,
        _ if d == 2 => NormSpec::hexagon(),
        _ => NormSpec::linf(d),
    })
}

fn oracle_agreement(rng: &mut ChaCha8Rng, corpus: &mut Corpus) -> Result<(bool, String)> {
    let mut mismatches = 0;
    let mut nodes = (0u64, 0u64);
    for _ in 0..100 {
        let d = rng.random_range(1..=3);
        let spec = random_norm(rng, d)?;
        let pool = lattice_box(&vec![(-3, 3); d]);
        let n = rng.random_range(1..=18usize.min(pool.len()));
        let ground = PointSet::new(d, sample(rng, pool.len(), n).into_iter().map(|i| pool[i].clone()).collect())?;
        let k = rng.random_range(1..=3);
        let problem = SearchProblem::new(spec.clone(), ground, k)?;
        let oracle = brute_force_oracle(&problem, PLAIN)?;
        let bb = branch_and_bound(&problem, PLAIN)?;
        let pruned = branch_and_bound(&problem, SearchConfig { use_bound_pruning: true, enumerate_optima: false })?;
        if oracle.best != bb.best || oracle.size() != pruned.size() || bb.spectrum.k() > k {
            mismatches += 1;
        }
        nodes.0 += oracle.nodes;
        nodes.1 += bb.nodes;
        corpus.add(&spec, &bb.best);
    }
    Ok((mismatches == 0, format!("100 problems, {mismatches} mismatches, nodes oracle {} vs search {}", nodes.0, nodes.1)))
}

fn extremal_uniqueness(_: &mut ChaCha8Rng, _: &mut Corpus) -> Result<(bool, String)> {
    let mut notes = Vec::new();
    for k in 1..=2usize {
        for m in k as i64..=4 {
            let r = verify_extremal_uniqueness(2, k, m)?;
            if r.optimum != (k + 1).pow(2) {
                return Ok((false, format!("k={k} m={m}: optimum {}", r.optimum)));
            }
            notes.push(format!("k={k} m={m}: {}", r.optima));
        }
    }
    Ok((true, format!("all optima are grid homothets ({})", notes.join(", "))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_open_grids_have_the_right_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for n in 5..=16 {
            let s = half_open_grid(&mut rng, n, 2).unwrap();
            assert_eq!(s.len(), n);
        }
    }

    #[test]
    fn general_bound_oracle_small_values() {
        assert_eq!(general_bound_oracle(1, 1), BigUint::from(2u32));
        assert_eq!(general_bound_oracle(2, 2), BigUint::from(16u32));
        assert_eq!(general_bound_oracle(4, 4), BigUint::from(65536u32));
    }

    #[test]
    fn clustered_sets_are_spread() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = clustered_set(&mut rng, 2).unwrap();
        let sp = distance_spectrum(&NormSpec::linf(2), &s).unwrap();
        assert!(sp.k() <= 4);
    }
}
