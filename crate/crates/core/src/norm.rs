//! Minkowski norms: exact gauges (ℓ∞, ℓ1, facet-functional polytopes) and
//! a floating-point ℓp fallback.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::vector::Vector;

/// Relative tolerance for comparing values produced by the float ℓp norm.
pub const REL_EPS: f64 = 1e-9;

/// The value of a norm: exact for polytopal kinds, a float for ℓp.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Magnitude {
    Exact(#[serde(with = "rational::serde_rational")] Rational),
    Approx(f64),
}

impl Magnitude {
    pub fn to_f64(&self) -> f64 {
        match self {
            Magnitude::Exact(q) => rational::to_f64(q),
            Magnitude::Approx(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Magnitude::Exact(q) => Some(q),
            Magnitude::Approx(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Magnitude::Exact(_))
    }

    /// Equality, exact when both sides are exact and within [`REL_EPS`]
    /// otherwise.
    pub fn same(&self, other: &Magnitude) -> bool {
        match (self, other) {
            (Magnitude::Exact(a), Magnitude::Exact(b)) => a == b,
            _ => approx_eq(self.to_f64(), other.to_f64()),
        }
    }

    /// Total comparison; mixed or float operands compare as floats.
    pub fn compare(&self, other: &Magnitude) -> Ordering {
        match (self, other) {
            (Magnitude::Exact(a), Magnitude::Exact(b)) => a.cmp(b),
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }

    /// `self < bound`, with float values needing to clear the bound by the
    /// tolerance.
    pub fn lt_rational(&self, bound: &Rational) -> bool {
        match self {
            Magnitude::Exact(a) => a < bound,
            Magnitude::Approx(x) => {
                let b = rational::to_f64(bound);
                *x < b && !approx_eq(*x, b)
            }
        }
    }

    /// `self >= bound`, with float values allowed to fall short by the
    /// tolerance.
    pub fn ge_rational(&self, bound: &Rational) -> bool {
        match self {
            Magnitude::Exact(a) => a >= bound,
            Magnitude::Approx(x) => {
                let b = rational::to_f64(bound);
                *x >= b || approx_eq(*x, b)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Magnitude::Exact(a) => a.is_zero(),
            Magnitude::Approx(x) => *x == 0.0,
        }
    }
}

pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_EPS * a.abs().max(b.abs()).max(1.0)
}

/// Which family the norm belongs to.
#[derive(Clone, Debug, PartialEq)]
pub enum NormKind {
    LInfinity,
    LOne,
    /// `‖x‖ = max_i |a_i · x|` for the listed covectors `a_i`.
    Polytopal(Vec<Vector>),
    /// Floating-point `ℓp`, `p > 1`.
    LpFloat(f64),
}

/// A norm on `R^dim`.
///
/// [`NormSpec::new`] and JSON parsing check the input. Building the struct
/// directly skips the checks, which [`validate_norm`] can then audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNorm", into = "RawNorm")]
pub struct NormSpec {
    pub dim: usize,
    pub kind: NormKind,
}

#[derive(Serialize, Deserialize)]
struct RawNorm {
    dim: usize,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    functionals: Option<Vec<Vector>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
}

impl TryFrom<RawNorm> for NormSpec {
    type Error = Error;

    fn try_from(raw: RawNorm) -> Result<Self> {
        let kind = match raw.kind.as_str() {
            "linf" => NormKind::LInfinity,
            "l1" => NormKind::LOne,
            "polytopal" => NormKind::Polytopal(
                raw.functionals
                    .ok_or_else(|| Error::input("polytopal norm needs \"functionals\""))?,
            ),
            "lp" => NormKind::LpFloat(
                raw.p.ok_or_else(|| Error::input("lp norm needs \"p\""))?,
            ),
            other => return Err(Error::input(format!("unknown norm kind {other:?}"))),
        };
        NormSpec::new(raw.dim, kind)
    }
}

impl From<NormSpec> for RawNorm {
    fn from(spec: NormSpec) -> Self {
        let (kind, functionals, p) = match spec.kind {
            NormKind::LInfinity => ("linf", None, None),
            NormKind::LOne => ("l1", None, None),
            NormKind::Polytopal(f) => ("polytopal", Some(f), None),
            NormKind::LpFloat(p) => ("lp", None, Some(p)),
        };
        RawNorm {
            dim: spec.dim,
            kind: kind.to_string(),
            functionals,
            p,
        }
    }
}

impl NormSpec {
    /// Builds a norm, rejecting gauges that are not positive definite.
    pub fn new(dim: usize, kind: NormKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("dimension must be at least 1"));
        }
        match &kind {
            NormKind::Polytopal(fs) => {
                if let Some(bad) = fs.iter().find(|f| f.dim() != dim) {
                    return Err(Error::input(format!(
                        "functional {bad} has dimension {}, expected {dim}",
                        bad.dim()
                    )));
                }
                if rank(fs) < dim {
                    return Err(Error::input(
                        "polytopal functionals do not span the dual space; the gauge is not definite",
                    ));
                }
            }
            NormKind::LpFloat(p) => {
                if !(p.is_finite() && *p > 1.0) {
                    return Err(Error::input(format!("lp norm needs finite p > 1, got {p}")));
                }
            }
            NormKind::LInfinity | NormKind::LOne => {}
        }
        Ok(NormSpec { dim, kind })
    }

    pub fn linf(dim: usize) -> Self {
        NormSpec { dim, kind: NormKind::LInfinity }
    }

    pub fn l1(dim: usize) -> Self {
        NormSpec { dim, kind: NormKind::LOne }
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        NormSpec::new(dim, NormKind::LpFloat(p))
    }

    pub fn polytopal(dim: usize, functionals: Vec<Vector>) -> Result<Self> {
        NormSpec::new(dim, NormKind::Polytopal(functionals))
    }

    /// The planar hexagon gauge `max(|x|, |y|, |x - y|)`.
    pub fn hexagon() -> Self {
        NormSpec::polytopal(
            2,
            vec![
                Vector::from_ints(&[1, 0]),
                Vector::from_ints(&[0, 1]),
                Vector::from_ints(&[1, -1]),
            ],
        )
        .expect("hexagon gauge is definite")
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self.kind, NormKind::LpFloat(_))
    }

    fn check_dim(&self, v: &Vector) -> Result<()> {
        if v.dim() != self.dim {
            return Err(Error::input(format!(
                "vector {v} has dimension {}, norm has dimension {}",
                v.dim(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Exact value of the norm; an input error for the float ℓp kind.
    pub fn exact(&self, v: &Vector) -> Result<Rational> {
        self.check_dim(v)?;
        match &self.kind {
            NormKind::LInfinity => Ok(v.max_abs()),
            NormKind::LOne => Ok(v.coords().iter().map(Signed::abs).sum()),
            NormKind::Polytopal(fs) => Ok(fs
                .iter()
                .map(|a| a.dot(v).abs())
                .max()
                .unwrap_or_else(Rational::zero)),
            NormKind::LpFloat(_) => Err(Error::input("the lp norm has no exact value")),
        }
    }

    /// Norm of a float vector; no dimension check.
    pub fn eval_f64(&self, v: &[f64]) -> f64 {
        match &self.kind {
            NormKind::LInfinity => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            NormKind::LOne => v.iter().map(|x| x.abs()).sum(),
            NormKind::Polytopal(fs) => fs
                .iter()
                .map(|a| {
                    a.coords()
                        .iter()
                        .zip(v)
                        .map(|(c, x)| rational::to_f64(c) * x)
                        .sum::<f64>()
                        .abs()
                })
                .fold(0.0, f64::max),
            NormKind::LpFloat(p) => v.iter().map(|x| x.abs().powf(*p)).sum::<f64>().powf(1.0 / p),
        }
    }

    /// Covectors `a_i` with `‖x‖ = max_i |a_i · x|`, for the exact kinds in
    /// dimension 2.
    pub fn planar_functionals(&self) -> Result<Vec<Vector>> {
        if self.dim != 2 {
            return Err(Error::input("planar functionals need dimension 2"));
        }
        match &self.kind {
            NormKind::LInfinity => Ok(vec![Vector::unit(2, 0), Vector::unit(2, 1)]),
            NormKind::LOne => Ok(vec![Vector::from_ints(&[1, 1]), Vector::from_ints(&[1, -1])]),
            NormKind::Polytopal(fs) => Ok(fs.clone()),
            NormKind::LpFloat(_) => Err(Error::input("the lp norm is not polygonal")),
        }
    }
}

/// `‖v‖` under `spec`.
pub fn norm_eval(spec: &NormSpec, v: &Vector) -> Result<Magnitude> {
    match spec.kind {
        NormKind::LpFloat(_) => {
            spec.check_dim(v)?;
            Ok(Magnitude::Approx(spec.eval_f64(&v.to_f64())))
        }
        _ => spec.exact(v).map(Magnitude::Exact),
    }
}

/// Rank of a list of rational vectors, by fraction-exact elimination.
pub(crate) fn rank(vectors: &[Vector]) -> usize {
    let mut rows: Vec<Vec<Rational>> = vectors.iter().map(|v| v.coords().to_vec()).collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = &row[c] / &pivot_row[c];
                for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= p * &f;
                }
            }
        }
        r += 1;
    }
    r
}

/// One failed norm axiom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum NormViolation {
    DimensionMismatch { v: Vector },
    PositiveDefiniteness { v: Vector },
    Symmetry { v: Vector },
    Homogeneity {
        v: Vector,
        #[serde(with = "rational::serde_rational")]
        lambda: Rational,
    },
    Triangle { u: Vector, v: Vector },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub samples: usize,
    pub violations: Vec<NormViolation>,
}

impl NormReport {
    pub fn is_norm(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks definiteness, symmetry, homogeneity and the triangle inequality
/// on `samples` (all pairs for the triangle inequality). Float norms are
/// compared with [`REL_EPS`].
pub fn validate_norm(spec: &NormSpec, samples: &[Vector]) -> NormReport {
    let scalars = [rational::int(-3), rational::q(1, 2), rational::q(7, 5)];
    let mut violations = Vec::new();
    let mut ok: Vec<(&Vector, Magnitude)> = Vec::new();
    for v in samples {
        let Ok(n) = norm_eval(spec, v) else {
            violations.push(NormViolation::DimensionMismatch { v: v.clone() });
            continue;
        };
        if n.is_zero() != v.is_zero() {
            violations.push(NormViolation::PositiveDefiniteness { v: v.clone() });
        }
        if !norm_eval(spec, &-v).unwrap().same(&n) {
            violations.push(NormViolation::Symmetry { v: v.clone() });
        }
        for lambda in &scalars {
            let lhs = norm_eval(spec, &v.scale(lambda)).unwrap();
            let rhs = scale_magnitude(&n, &lambda.abs());
            if !lhs.same(&rhs) {
                violations.push(NormViolation::Homogeneity {
                    v: v.clone(),
                    lambda: lambda.clone(),
                });
            }
        }
        ok.push((v, n));
    }
    for (i, (u, nu)) in ok.iter().enumerate() {
        for (v, nv) in &ok[i + 1..] {
            let sum = norm_eval(spec, &(*u + *v)).unwrap();
            let holds = match (&sum, nu, nv) {
                (Magnitude::Exact(s), Magnitude::Exact(a), Magnitude::Exact(b)) => *s <= a + b,
                _ => {
                    let bound = nu.to_f64() + nv.to_f64();
                    sum.to_f64() <= bound || approx_eq(sum.to_f64(), bound)
                }
            };
            if !holds {
                violations.push(NormViolation::Triangle {
                    u: (*u).clone(),
                    v: (*v).clone(),
                });
            }
        }
    }
    NormReport {
        samples: samples.len(),
        violations,
    }
}

pub(crate) fn scale_magnitude(m: &Magnitude, s: &Rational) -> Magnitude {
    match m {
        Magnitude::Exact(x) => Magnitude::Exact(x * s),
        Magnitude::Approx(x) => Magnitude::Approx(x * rational::to_f64(s)),
    }
}

/// 2D cross product `a.x * b.y - a.y * b.x`.
pub fn cross(a: &Vector, b: &Vector) -> Rational {
    let (a, b) = (a.coords(), b.coords());
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// Counterclockwise angular order starting at the positive x-axis.
pub fn angle_cmp(a: &Vector, b: &Vector) -> Ordering {
    fn half(v: &Vector) -> u8 {
        let (x, y) = (&v.coords()[0], &v.coords()[1]);
        if y.is_positive() || (y.is_zero() && x.is_positive()) {
            0
        } else {
            1
        }
    }
    half(a).cmp(&half(b)).then_with(|| {
        let c = cross(a, b);
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

/// Vertices of the unit ball of a planar exact norm, counterclockwise from
/// the positive x-axis.
pub fn polygon_vertices_2d(spec: &NormSpec) -> Result<Vec<Vector>> {
    let functionals = spec.planar_functionals()?;
    if rank(&functionals) < 2 {
        return Err(Error::geometry("facet functionals leave the unit ball unbounded"));
    }
    let lines: Vec<Vector> = functionals
        .iter()
        .filter(|a| !a.is_zero())
        .flat_map(|a| [a.clone(), -a])
        .collect();
    let mut vertices = BTreeSet::new();
    for (i, a) in lines.iter().enumerate() {
        for b in &lines[i + 1..] {
            let det = cross(a, b);
            if det.is_zero() {
                continue;
            }
            // Solve a·x = 1, b·x = 1.
            let (ac, bc) = (a.coords(), b.coords());
            let x = (&bc[1] - &ac[1]) / &det;
            let y = (&ac[0] - &bc[0]) / &det;
            let p = Vector::new(vec![x, y]);
            if functionals.iter().all(|f| f.dot(&p).abs() <= rational::one()) {
                vertices.insert(p);
            }
        }
    }
    let mut vertices: Vec<Vector> = vertices.into_iter().collect();
    if vertices.len() < 4 {
        return Err(Error::geometry("unit ball is degenerate"));
    }
    vertices.sort_by(angle_cmp);
    Ok(vertices)
}

/// The norm whose unit ball is the given centrally symmetric convex polygon
/// (vertices counterclockwise, origin in the interior).
pub fn gauge_of_polygon(vertices: &[Vector]) -> Result<NormSpec> {
    let m = vertices.len();
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::geometry("a symmetric polygon has an even number (>= 4) of vertices"));
    }
    let half = m / 2;
    for i in 0..half {
        if vertices[i + half] != -&vertices[i] {
            return Err(Error::geometry("polygon is not centrally symmetric"));
        }
    }
    let mut functionals = Vec::with_capacity(half);
    for i in 0..half {
        let (a, b) = (&vertices[i], &vertices[(i + 1) % m]);
        let det = cross(a, b);
        if !det.is_positive() {
            return Err(Error::geometry("polygon is not counterclockwise around the origin"));
        }
        let (ac, bc) = (a.coords(), b.coords());
        functionals.push(Vector::new(vec![
            (&bc[1] - &ac[1]) / &det,
            (&ac[0] - &bc[0]) / &det,
        ]));
    }
    NormSpec::polytopal(2, functionals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn v(xs: &[i64]) -> Vector {
        Vector::from_ints(xs)
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(norm_eval(&NormSpec::linf(2), &v(&[3, -4])).unwrap(), Magnitude::Exact(int(4)));
        assert_eq!(norm_eval(&NormSpec::l1(2), &v(&[3, -4])).unwrap(), Magnitude::Exact(int(7)));
        // |2|, |-1|, |2 - (-1)| = 3
        assert_eq!(norm_eval(&NormSpec::hexagon(), &v(&[2, -1])).unwrap(), Magnitude::Exact(int(3)));
    }

    #[test]
    fn dimension_mismatch_is_input_error() {
        assert!(matches!(norm_eval(&NormSpec::linf(3), &v(&[1, 2])), Err(Error::Input(_))));
    }

    #[test]
    fn lp_is_approximate() {
        let spec = NormSpec::lp(2, 2.0).unwrap();
        let n = norm_eval(&spec, &v(&[3, 4])).unwrap();
        assert!(!n.is_exact());
        assert!(approx_eq(n.to_f64(), 5.0));
        assert!(spec.exact(&v(&[3, 4])).is_err());
    }

    #[test]
    fn rejects_indefinite_gauge() {
        assert!(NormSpec::polytopal(2, vec![v(&[1, 0])]).is_err());
        assert!(NormSpec::polytopal(2, vec![v(&[1, 0]), v(&[2, 0])]).is_err());
        assert!(NormSpec::lp(2, 1.0).is_err());
    }

    #[test]
    fn validate_linf_clean() {
        let samples: Vec<Vector> = (-3..=3).flat_map(|x| (-2..=2).map(move |y| v(&[x, y]))).collect();
        assert!(validate_norm(&NormSpec::linf(2), &samples).is_norm());
    }

    #[test]
    fn validate_flags_semi_norm() {
        let broken = NormSpec { dim: 2, kind: NormKind::Polytopal(vec![v(&[1, 0])]) };
        let report = validate_norm(&broken, &[v(&[1, 1]), v(&[0, 1])]);
        assert!(report
            .violations
            .contains(&NormViolation::PositiveDefiniteness { v: v(&[0, 1]) }));
    }

    #[test]
    fn validate_lp_random_samples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let samples: Vec<Vector> = (0..100)
            .map(|_| {
                Vector::new(
                    (0..3)
                        .map(|_| q(rng.random_range(-1000..=1000), rng.random_range(1..=50)))
                        .collect(),
                )
            })
            .collect();
        let report = validate_norm(&NormSpec::lp(3, 2.0).unwrap(), &samples);
        assert!(report.is_norm(), "{:?}", report.violations);
    }

    #[test]
    fn validate_catches_non_convex_gauge() {
        // Not a norm: triangle inequality fails for a "star" gauge that we
        // fake by using an lp exponent below one.
        let broken = NormSpec { dim: 2, kind: NormKind::LpFloat(0.5) };
        let report = validate_norm(&broken, &[v(&[1, 0]), v(&[0, 1])]);
        assert!(report.violations.iter().any(|x| matches!(x, NormViolation::Triangle { .. })));
    }

    #[test]
    fn vertices_of_standard_balls() {
        assert_eq!(
            polygon_vertices_2d(&NormSpec::linf(2)).unwrap(),
            vec![v(&[1, 1]), v(&[-1, 1]), v(&[-1, -1]), v(&[1, -1])]
        );
        assert_eq!(
            polygon_vertices_2d(&NormSpec::l1(2)).unwrap(),
            vec![v(&[1, 0]), v(&[0, 1]), v(&[-1, 0]), v(&[0, -1])]
        );
        assert_eq!(
            polygon_vertices_2d(&NormSpec::hexagon()).unwrap(),
            vec![v(&[1, 0]), v(&[1, 1]), v(&[0, 1]), v(&[-1, 0]), v(&[-1, -1]), v(&[0, -1])]
        );
    }

    #[test]
    fn vertices_reject_bad_input() {
        let unbounded = NormSpec { dim: 2, kind: NormKind::Polytopal(vec![v(&[1, 1])]) };
        assert!(matches!(polygon_vertices_2d(&unbounded), Err(Error::Geometry(_))));
        assert!(polygon_vertices_2d(&NormSpec::linf(3)).is_err());
        assert!(polygon_vertices_2d(&NormSpec::lp(2, 3.0).unwrap()).is_err());
    }

    #[test]
    fn redundant_functionals_are_ignored() {
        let spec = NormSpec::polytopal(2, vec![v(&[1, 0]), v(&[0, 1]), Vector::new(vec![q(1, 2), q(1, 2)])])
            .unwrap();
        assert_eq!(polygon_vertices_2d(&spec).unwrap(), polygon_vertices_2d(&NormSpec::linf(2)).unwrap());
    }

    #[test]
    fn polygon_gauge_matches_facet_gauge() {
        let hex = NormSpec::hexagon();
        let verts = polygon_vertices_2d(&hex).unwrap();
        let gauge = gauge_of_polygon(&verts).unwrap();
        for x in -4..=4 {
            for y in -4..=4 {
                let p = v(&[x, y]);
                assert_eq!(gauge.exact(&p).unwrap(), hex.exact(&p).unwrap());
            }
        }
    }

    #[test]
    fn json_schema() {
        let spec: NormSpec = serde_json::from_str(
            r#"{"dim": 2, "kind": "polytopal", "functionals": [[[1,1],[0,1]], [[0,1],[1,1]], [[1,1],[-1,1]]]}"#,
        )
        .unwrap();
        assert_eq!(spec, NormSpec::hexagon());
        let lp: NormSpec = serde_json::from_str(r#"{"dim": 3, "kind": "lp", "p": 2.5}"#).unwrap();
        assert_eq!(lp.kind, NormKind::LpFloat(2.5));
        assert!(serde_json::from_str::<NormSpec>(r#"{"dim": 2, "kind": "polytopal", "functionals": [[1, 0]]}"#).is_err());
        let back: NormSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    fn small_vec(d: usize) -> impl Strategy<Value = Vector> {
        prop::collection::vec((-20i64..=20, 1i64..=6), d)
            .prop_map(|cs| Vector::new(cs.into_iter().map(|(n, d)| q(n, d)).collect()))
    }

    fn exact_specs() -> Vec<NormSpec> {
        vec![
            NormSpec::linf(2),
            NormSpec::l1(2),
            NormSpec::hexagon(),
            NormSpec::polytopal(2, vec![v(&[2, 1]), v(&[1, 3]), v(&[-1, 1])]).unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn exact_norm_axioms(a in small_vec(2), b in small_vec(2), s in (-9i64..=9, 1i64..=5)) {
            let s = q(s.0, s.1);
            for spec in exact_specs() {
                let na = spec.exact(&a).unwrap();
                prop_assert_eq!(spec.exact(&-&a).unwrap(), na.clone());
                prop_assert_eq!(spec.exact(&a.scale(&s)).unwrap(), s.abs() * &na);
                prop_assert!(spec.exact(&(&a + &b)).unwrap() <= &na + spec.exact(&b).unwrap());
                prop_assert_eq!(na.is_zero(), a.is_zero());
            }
        }

        #[test]
        fn polygon_vertices_on_unit_sphere(fs in prop::collection::vec(small_vec(2), 2..6)) {
            prop_assume!(rank(&fs) == 2);
            let spec = NormSpec::polytopal(2, fs).unwrap();
            let verts = polygon_vertices_2d(&spec).unwrap();
            let m = verts.len();
            for (i, p) in verts.iter().enumerate() {
                prop_assert_eq!(spec.exact(p).unwrap(), int(1));
                prop_assert!(verts.contains(&-p));
                let mid = (p + &verts[(i + 1) % m]).scale(&q(1, 2));
                prop_assert!(spec.exact(&mid).unwrap() <= int(1));
            }
        }
    }
}
