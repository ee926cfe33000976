//! Exact maximum-cardinality k-distance subsets of a finite ground set.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::cover::general_bound;
use crate::error::{Error, Result};
use crate::norm::{NormKind, NormSpec};
use crate::rational::{self, Rational};
use crate::spectrum::{DistanceSpectrum, DistanceTable, PointSet};
use crate::vector::Vector;

/// Largest ground the brute-force oracle accepts.
pub const ORACLE_LIMIT: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchProblem {
    pub spec: NormSpec,
    pub ground: PointSet,
    pub k: usize,
    /// Only subsets of at least this size are of interest; used to prune
    /// from the start when enumerating optima.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<usize>,
}

impl SearchProblem {
    pub fn new(spec: NormSpec, ground: PointSet, k: usize) -> Result<Self> {
        let problem = SearchProblem { spec, ground, k, goal: None };
        problem.validate()?;
        Ok(problem)
    }

    pub fn with_goal(mut self, goal: usize) -> Self {
        self.goal = Some(goal);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::input("k must be at least 1"));
        }
        if self.ground.is_empty() {
            return Err(Error::input("the ground set is empty"));
        }
        self.ground.check_norm(&self.spec)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Stop as soon as the incumbent meets the applicable cardinality bound.
    pub use_bound_pruning: bool,
    /// Collect every subset of maximum size.
    pub enumerate_optima: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best: PointSet,
    pub spectrum: DistanceSpectrum,
    pub nodes: u64,
    pub optimal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optima: Option<Vec<PointSet>>,
}

impl SearchResult {
    pub fn size(&self) -> usize {
        self.best.len()
    }
}

/// Smallest cardinality bound known for k-distance sets of the norm.
pub fn cardinality_cap(spec: &NormSpec, k: usize) -> BigUint {
    let d = spec.dim;
    let grid = BigUint::from(k + 1).pow(d as u32);
    let mut cap = general_bound(k as u32, d as u32);
    if matches!(spec.kind, NormKind::LInfinity) {
        cap = cap.min(grid.clone());
    }
    if d == 2 && spec.is_exact() {
        cap = cap.min(grid);
    }
    cap
}

struct Prepared {
    ground: Vec<Vector>,
    table: DistanceTable,
}

fn prepare(problem: &SearchProblem) -> Result<Prepared> {
    problem.validate()?;
    let ground = problem.ground.sorted().into_points();
    let table = DistanceTable::build(&problem.spec, &ground)?;
    Ok(Prepared { ground, table })
}

fn finish(prep: &Prepared, spec: &NormSpec, best: &[usize], nodes: u64, optima: Option<Vec<Vec<usize>>>) -> Result<SearchResult> {
    let pick = |ix: &[usize]| PointSet::new(prep.ground[0].dim(), ix.iter().map(|&i| prep.ground[i].clone()).collect());
    let best = pick(best)?;
    let spectrum = DistanceTable::build(spec, best.points())?.spectrum();
    let optima = optima
        .map(|all| all.iter().map(|o| pick(o)).collect::<Result<Vec<_>>>())
        .transpose()?;
    Ok(SearchResult {
        best,
        spectrum,
        nodes,
        optimal: true,
        optima,
    })
}

/// Classes `x` adds to `used` against `chosen`, or `None` past `k`.
fn extend_classes(table: &DistanceTable, chosen: &[usize], used: &[u32], x: usize, k: usize) -> Option<Vec<u32>> {
    let mut out = used.to_vec();
    for &c in chosen {
        let cls = table.class_raw(c, x);
        if !out.contains(&cls) {
            if out.len() == k {
                return None;
            }
            out.push(cls);
        }
    }
    Some(out)
}

/// Exhaustive include/exclude enumeration, pruned only when a partial
/// subset already spans more than `k` distances.
pub fn brute_force_oracle(problem: &SearchProblem, config: SearchConfig) -> Result<SearchResult> {
    if problem.ground.len() > ORACLE_LIMIT {
        return Err(Error::input(format!(
            "the oracle enumerates at most {ORACLE_LIMIT} ground points, got {}",
            problem.ground.len()
        )));
    }
    let prep = prepare(problem)?;
    struct Oracle<'a> {
        table: &'a DistanceTable,
        n: usize,
        k: usize,
        best: Vec<usize>,
        optima: Vec<Vec<usize>>,
        nodes: u64,
    }
    impl Oracle<'_> {
        fn walk(&mut self, i: usize, chosen: &mut Vec<usize>, used: &[u32]) {
            self.nodes += 1;
            if i == self.n {
                let better = chosen.len() > self.best.len() || (chosen.len() == self.best.len() && *chosen < self.best);
                if chosen.len() > self.best.len() {
                    self.optima.clear();
                }
                if chosen.len() == self.best.len() || chosen.len() > self.best.len() {
                    self.optima.push(chosen.clone());
                }
                if better {
                    self.best = chosen.clone();
                }
                return;
            }
            if let Some(next) = extend_classes(self.table, chosen, used, i, self.k) {
                chosen.push(i);
                self.walk(i + 1, chosen, &next);
                chosen.pop();
            }
            self.walk(i + 1, chosen, used);
        }
    }
    let mut oracle = Oracle {
        table: &prep.table,
        n: prep.ground.len(),
        k: problem.k,
        best: Vec::new(),
        optima: Vec::new(),
        nodes: 0,
    };
    oracle.walk(0, &mut Vec::new(), &[]);
    let mut optima = oracle.optima;
    optima.sort();
    finish(&prep, &problem.spec, &oracle.best, oracle.nodes, config.enumerate_optima.then_some(optima))
}

struct Search<'a> {
    table: &'a DistanceTable,
    k: usize,
    enumerate: bool,
    cap: usize,
    best: Option<Vec<usize>>,
    best_size: usize,
    optima: Vec<Vec<usize>>,
    nodes: u64,
    done: bool,
}

impl Search<'_> {
    /// Greedy colouring of the candidates where two candidates conflict when
    /// their distance is one of the classes already in use. Only such pairs
    /// can coexist once all `k` classes are spent, so the colour count bounds
    /// the number of further points.
    fn colour_bound(&self, used: &[u32], cand: &[usize]) -> usize {
        let mut colours: Vec<Vec<usize>> = Vec::new();
        for &y in cand {
            let slot = colours
                .iter_mut()
                .find(|class| class.iter().all(|&z| !used.contains(&self.table.class_raw(y, z))));
            match slot {
                Some(class) => class.push(y),
                None => colours.push(vec![y]),
            }
        }
        colours.len()
    }

    fn hopeless(&self, upper: usize) -> bool {
        upper < self.best_size || (upper == self.best_size && !self.enumerate)
    }

    fn visit(&mut self, chosen: &mut Vec<usize>, used: &[u32], cand: &[usize]) {
        if self.done {
            return;
        }
        self.nodes += 1;
        let size = chosen.len();
        if size > self.best_size {
            self.best_size = size;
            self.best = Some(chosen.clone());
            self.optima.clear();
            if self.enumerate {
                self.optima.push(chosen.clone());
            }
            if !self.enumerate && size >= self.cap {
                self.done = true;
                return;
            }
        } else if size == self.best_size && self.enumerate && size > 0 {
            if self.best.is_none() {
                self.best = Some(chosen.clone());
            }
            self.optima.push(chosen.clone());
        }
        let mut upper = size + cand.len();
        if used.len() == self.k && !cand.is_empty() && !self.hopeless(upper) {
            upper = upper.min(size + self.colour_bound(used, cand));
        }
        if self.hopeless(upper) {
            return;
        }
        for (idx, &x) in cand.iter().enumerate() {
            if self.hopeless(size + cand.len() - idx) || self.done {
                break;
            }
            let next_used = extend_classes(self.table, chosen, used, x, self.k).expect("candidates stay feasible");
            chosen.push(x);
            let next: Vec<usize> = cand[idx + 1..]
                .iter()
                .copied()
                .filter(|&y| extend_classes(self.table, chosen, &next_used, y, self.k).is_some())
                .collect();
            self.visit(chosen, &next_used, &next);
            chosen.pop();
        }
    }
}

/// Branch and bound over lexicographically sorted candidates.
///
/// A branch is cut when its chosen points plus all remaining candidates
/// cannot beat the incumbent, tightened by a colouring bound once `k`
/// classes are in use. Candidates that would push the subset past `k`
/// distances are filtered out as soon as a point is added. Depth-first order
/// visits subsets lexicographically, so the first maximum found is the
/// lexicographically smallest one.
pub fn branch_and_bound(problem: &SearchProblem, config: SearchConfig) -> Result<SearchResult> {
    let prep = prepare(problem)?;
    let n = prep.ground.len();
    let cap = if config.use_bound_pruning {
        cardinality_cap(&problem.spec, problem.k).to_usize().unwrap_or(usize::MAX)
    } else {
        usize::MAX
    };
    let enumerate = config.enumerate_optima || problem.goal.is_some();
    let all: Vec<usize> = (0..n).collect();
    let run = |floor: usize| {
        let mut s = Search {
            table: &prep.table,
            k: problem.k,
            enumerate,
            cap,
            best: None,
            best_size: floor,
            optima: Vec::new(),
            nodes: 0,
            done: false,
        };
        s.visit(&mut Vec::new(), &[], &all);
        s
    };
    let mut search = run(problem.goal.map_or(0, |g| g.saturating_sub(1)));
    let mut nodes = search.nodes;
    if search.best.is_none() {
        search = run(0);
        nodes += search.nodes;
    }
    let mut optima = search.optima;
    optima.sort();
    let best = if enumerate { optima[0].clone() } else { search.best.expect("a single point always fits") };
    let keep = config.enumerate_optima || problem.goal.is_some();
    finish(&prep, &problem.spec, &best, nodes, keep.then_some(optima))
}

/// `a + λ{0,…,k}^d`
pub fn extremal_grid(k: usize, d: usize, offset: &Vector, scale: &Rational) -> Result<PointSet> {
    if k == 0 || d == 0 {
        return Err(Error::input("k and d must be positive"));
    }
    if offset.dim() != d {
        return Err(Error::input("offset dimension differs from d"));
    }
    if *scale <= rational::zero() {
        return Err(Error::input("scale must be positive"));
    }
    let points = crate::spectrum::lattice_cube(k as i64, d)
        .iter()
        .map(|p| offset + &p.scale(scale))
        .collect();
    PointSet::new(d, points)
}

/// Whether the set equals `a + λ{0,…,k}^d` for some `a` and `λ > 0`.
pub fn is_grid_homothet(set: &PointSet, k: usize) -> bool {
    let d = set.dim();
    if set.len() != (k + 1).pow(d as u32) {
        return false;
    }
    let lo: Vec<Rational> = (0..d)
        .map(|j| set.points().iter().map(|p| p.coords()[j].clone()).min().unwrap())
        .collect();
    let hi: Vec<Rational> = (0..d)
        .map(|j| set.points().iter().map(|p| p.coords()[j].clone()).max().unwrap())
        .collect();
    let scale = (&hi[0] - &lo[0]) / rational::int(k as i64);
    if scale <= rational::zero() {
        return false;
    }
    let Ok(grid) = extremal_grid(k, d, &Vector::new(lo), &scale) else {
        return false;
    };
    grid.sorted().points() == set.sorted().points()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub dim: usize,
    pub k: usize,
    pub m: i64,
    pub optimum: usize,
    pub optima: usize,
    pub counterexamples: Vec<PointSet>,
    pub nodes: u64,
}

/// Enumerates every maximum k-distance subset of `{0,…,m}^d` under ℓ∞ and
/// checks that each one is a homothet of `{0,…,k}^d`.
pub fn verify_extremal_uniqueness(d: usize, k: usize, m: i64) -> Result<UniquenessReport> {
    if d == 0 || k == 0 || m < 1 {
        return Err(Error::input("need d, k, m >= 1"));
    }
    let ground = PointSet::new(d, crate::spectrum::lattice_cube(m, d))?;
    let target = (k + 1).pow(d as u32);
    let problem = SearchProblem::new(NormSpec::linf(d), ground, k)?.with_goal(target);
    let result = branch_and_bound(&problem, SearchConfig { use_bound_pruning: false, enumerate_optima: true })?;
    let optima = result.optima.unwrap_or_default();
    let counterexamples: Vec<PointSet> = optima
        .iter()
        .filter(|s| s.len() >= target && !is_grid_homothet(s, k))
        .cloned()
        .collect();
    let report = UniquenessReport {
        dim: d,
        k,
        m,
        optimum: result.best.len(),
        optima: optima.len(),
        counterexamples,
        nodes: result.nodes,
    };
    if !report.counterexamples.is_empty() || report.optimum > target {
        return Err(Error::falsification(format!(
            "{} maximum subsets of size {} are not grid homothets",
            report.counterexamples.len(),
            report.optimum
        )));
    }
    Ok(report)
}
