//! Planar normalization of a symmetric polygon and the two quadrant cones
//! that bound planar k-distance sets by `(k + 1)^2`.
//!
//! The normalization picks two vertices `x0`, `y0` spanning a triangle
//! `0, x0, y0` of maximal area and maps them to `e1`, `e2`. Maximality makes
//! the lines through `x0` parallel to `y0` (and vice versa) support lines,
//! so the image lies between the cross-polytope and the square, and the
//! boundary meets the axes only at the vertices `±e1`, `±e2`.

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chains::{chain_certificate, check_cone_conditions, Cone, ConeConditionReport, ConeFamily, HeightCertificate, PolyhedralCone};
use crate::error::{Error, Result};
use crate::norm::{angle_cmp, cross, gauge_of_polygon, polygon_vertices_2d, NormSpec};
use crate::rational::{self, Rational};
use crate::spectrum::{distance_spectrum, PointSet};
use crate::vector::Vector;

/// A 2×2 rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix2 {
    #[serde(with = "rational::serde_rational_vec")]
    pub entries: Vec<Rational>,
}

impl Matrix2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Matrix2 { entries: vec![a, b, c, d] }
    }

    pub fn identity() -> Self {
        Matrix2::new(rational::one(), rational::zero(), rational::zero(), rational::one())
    }

    pub fn det(&self) -> Rational {
        let e = &self.entries;
        &e[0] * &e[3] - &e[1] * &e[2]
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let e = &self.entries;
        let (x, y) = (&v.coords()[0], &v.coords()[1]);
        Vector::new(vec![&e[0] * x + &e[1] * y, &e[2] * x + &e[3] * y])
    }

    pub fn inverse(&self) -> Option<Matrix2> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        let e = &self.entries;
        Some(Matrix2::new(&e[3] / &det, -&e[1] / &det, -&e[2] / &det, &e[0] / &det))
    }
}

/// Outcome of the three exact checks on a normalized polygon.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationChecks {
    /// Every vertex lies in `[-1, 1]^2`.
    pub inside_square: bool,
    /// `±e1`, `±e2` lie in the polygon.
    pub contains_cross_polytope: bool,
    /// Every edge lies in one closed coordinate quadrant.
    pub single_quadrant_edges: bool,
}

impl NormalizationChecks {
    pub fn all(&self) -> bool {
        self.inside_square && self.contains_cross_polytope && self.single_quadrant_edges
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization2D {
    pub x0: Vector,
    pub y0: Vector,
    /// Linear map with `T x0 = e1`, `T y0 = e2`.
    pub transform: Matrix2,
    /// Image of the input polygon, counterclockwise from `e1`.
    pub polygon: Vec<Vector>,
    pub checks: NormalizationChecks,
}

impl Normalization2D {
    pub fn apply(&self, v: &Vector) -> Vector {
        self.transform.apply(v)
    }
}

/// Checks that `polygon` is a strictly convex, counterclockwise, centrally
/// symmetric polygon with the origin in its interior.
pub fn validate_symmetric_polygon(polygon: &[Vector]) -> Result<()> {
    let m = polygon.len();
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::geometry(format!("a symmetric polygon needs an even number >= 4 of vertices, got {m}")));
    }
    if polygon.iter().any(|v| v.dim() != 2) {
        return Err(Error::input("polygon vertices must be planar"));
    }
    let half = m / 2;
    for i in 0..half {
        if polygon[i + half] != -&polygon[i] {
            return Err(Error::geometry("polygon is not centrally symmetric"));
        }
    }
    for i in 0..m {
        let (a, b, c) = (&polygon[i], &polygon[(i + 1) % m], &polygon[(i + 2) % m]);
        if !cross(a, b).is_positive() {
            return Err(Error::geometry("polygon is degenerate or not counterclockwise around the origin"));
        }
        if !cross(&(b - a), &(c - b)).is_positive() {
            return Err(Error::geometry(format!("polygon is not strictly convex at {b}")));
        }
    }
    Ok(())
}

fn in_closed_quadrant_pair(a: &Vector, b: &Vector) -> bool {
    let (ac, bc) = (a.coords(), b.coords());
    !(&ac[0] * &bc[0]).is_negative() && !(&ac[1] * &bc[1]).is_negative()
}

/// Whether `p` lies in the convex polygon (counterclockwise vertices).
fn polygon_contains(polygon: &[Vector], p: &Vector) -> bool {
    let m = polygon.len();
    (0..m).all(|i| !cross(&(&polygon[(i + 1) % m] - &polygon[i]), &(p - &polygon[i])).is_negative())
}

fn normalization_checks(polygon: &[Vector]) -> NormalizationChecks {
    let one = rational::one();
    let m = polygon.len();
    let axes = [
        Vector::unit(2, 0),
        Vector::unit(2, 1),
        -&Vector::unit(2, 0),
        -&Vector::unit(2, 1),
    ];
    NormalizationChecks {
        inside_square: polygon.iter().all(|v| v.max_abs() <= one),
        contains_cross_polytope: axes.iter().all(|e| polygon_contains(polygon, e)),
        single_quadrant_edges: (0..m).all(|i| in_closed_quadrant_pair(&polygon[i], &polygon[(i + 1) % m])),
    }
}

/// Maps a symmetric polygon to one squeezed between the cross-polytope and
/// the square, with every boundary edge inside a single quadrant.
///
/// `x0`, `y0` maximise `|cross(x0, y0)|` over vertex pairs, first maximum in
/// `(index of x0, index of y0)` order, swapped if needed so that the map
/// preserves orientation.
pub fn max_area_normalization(polygon: &[Vector]) -> Result<Normalization2D> {
    validate_symmetric_polygon(polygon)?;
    let mut best: Option<(usize, usize, Rational)> = None;
    for i in 0..polygon.len() {
        for j in 0..polygon.len() {
            let area = cross(&polygon[i], &polygon[j]).abs();
            if best.as_ref().is_none_or(|(_, _, b)| area > *b) {
                best = Some((i, j, area));
            }
        }
    }
    let (i, j, area) = best.unwrap();
    if area.is_zero() {
        return Err(Error::geometry("polygon has zero area"));
    }
    let (mut x0, mut y0) = (polygon[i].clone(), polygon[j].clone());
    if cross(&x0, &y0).is_negative() {
        std::mem::swap(&mut x0, &mut y0);
    }
    let basis = Matrix2::new(
        x0.coords()[0].clone(),
        y0.coords()[0].clone(),
        x0.coords()[1].clone(),
        y0.coords()[1].clone(),
    );
    let transform = basis.inverse().expect("maximal area is positive");
    let mut image: Vec<Vector> = polygon.iter().map(|v| transform.apply(v)).collect();
    image.sort_by(angle_cmp);
    let checks = normalization_checks(&image);
    if !checks.all() {
        return Err(Error::falsification(format!(
            "max-area normalization failed its invariants: {checks:?}"
        )));
    }
    Ok(Normalization2D {
        x0,
        y0,
        transform,
        polygon: image,
        checks,
    })
}

/// A removed open axis ray, recorded with the cone it was removed from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovedRay {
    /// 0 for the first-quadrant cone, 1 for the second.
    pub cone: usize,
    pub ray: Vector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadrantCones {
    pub first: PolyhedralCone,
    pub second: PolyhedralCone,
    pub removed: Vec<RemovedRay>,
    /// Both cone conditions on unit boundary samples and vertex-pair
    /// differences of the polygon.
    pub report: ConeConditionReport,
}

impl QuadrantCones {
    pub fn family(&self) -> ConeFamily {
        ConeFamily {
            cones: vec![Cone::Polyhedral(self.first.clone()), Cone::Polyhedral(self.second.clone())],
        }
    }
}

/// Closed first and second quadrants, each minus the open axis ray along
/// which an axis-parallel boundary edge inside it would let two equal-norm
/// vectors differ by a vector of the cone.
pub fn quadrant_cones(polygon: &[Vector]) -> Result<QuadrantCones> {
    validate_symmetric_polygon(polygon)?;
    let m = polygon.len();
    let mut removed: Vec<RemovedRay> = Vec::new();
    let mut remove = |cone: usize, ray: Vector| {
        if !removed.iter().any(|r| r.cone == cone && r.ray == ray) {
            removed.push(RemovedRay { cone, ray });
        }
    };
    for i in 0..m {
        let (a, b) = (&polygon[i], &polygon[(i + 1) % m]);
        if !in_closed_quadrant_pair(a, b) {
            return Err(Error::geometry(format!(
                "edge {a}–{b} spans two quadrants; normalize the polygon first"
            )));
        }
        let (ac, bc) = (a.coords(), b.coords());
        let nonneg = |v: &Rational| !v.is_negative();
        let nonpos = |v: &Rational| !v.is_positive();
        let upper = nonneg(&ac[1]) && nonneg(&bc[1]);
        let in_first = upper && nonneg(&ac[0]) && nonneg(&bc[0]);
        let in_second = upper && nonpos(&ac[0]) && nonpos(&bc[0]);
        let horizontal = ac[1] == bc[1];
        let vertical = ac[0] == bc[0];
        if in_first && horizontal {
            remove(0, Vector::from_ints(&[1, 0]));
        }
        if in_first && vertical {
            remove(0, Vector::from_ints(&[0, 1]));
        }
        if in_second && horizontal {
            remove(1, Vector::from_ints(&[-1, 0]));
        }
        if in_second && vertical {
            remove(1, Vector::from_ints(&[0, 1]));
        }
    }
    let rays_for = |cone: usize| removed.iter().filter(|r| r.cone == cone).map(|r| r.ray.clone()).collect();
    let first = PolyhedralCone::new(2, PolyhedralCone::orthant(&[true, true]).facets, rays_for(0))?;
    let second = PolyhedralCone::new(2, PolyhedralCone::orthant(&[false, true]).facets, rays_for(1))?;

    let gauge = gauge_of_polygon(polygon)?;
    let mut vectors = boundary_samples(polygon, 4);
    for a in polygon {
        for b in polygon {
            if a != b {
                vectors.push(a - b);
            }
        }
    }
    let family = ConeFamily {
        cones: vec![Cone::Polyhedral(first.clone()), Cone::Polyhedral(second.clone())],
    };
    let report = check_cone_conditions(&family, &gauge, &vectors)?;
    if !report.holds() {
        return Err(Error::falsification(format!(
            "quadrant cones fail the cone conditions: {} uncovered, {} equal-norm violations",
            report.uncovered.len(),
            report.same_norm.len()
        )));
    }
    Ok(QuadrantCones {
        first,
        second,
        removed,
        report,
    })
}

/// Points `a + (t/parts)(b - a)`, `t = 0..parts`, on every edge.
pub fn boundary_samples(polygon: &[Vector], parts: i64) -> Vec<Vector> {
    let m = polygon.len();
    let mut out = Vec::with_capacity(m * parts as usize);
    for i in 0..m {
        let (a, b) = (&polygon[i], &polygon[(i + 1) % m]);
        let step = b - a;
        for t in 0..parts {
            out.push(a + &step.scale(&rational::q(t, parts)));
        }
    }
    out
}

/// Everything that goes into the `(k + 1)^2` certificate of a planar set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarCertificate {
    pub normalization: Normalization2D,
    pub cones: QuadrantCones,
    /// `T(S)`
    pub transformed: Vec<Vector>,
    pub heights: HeightCertificate,
    pub k: usize,
    /// `(k + 1)^2`
    pub claimed: u128,
    pub observed: usize,
    pub pass: bool,
}

/// Normalizes the unit ball, builds the quadrant cones, and runs the
/// height certificate on the transformed set under the normalized gauge.
pub fn planar_bound_certificate(spec: &NormSpec, set: &PointSet, k: usize) -> Result<PlanarCertificate> {
    if spec.dim != 2 || !spec.is_exact() {
        return Err(Error::input("the planar certificate needs an exact norm in dimension 2"));
    }
    let actual = distance_spectrum(spec, set)?.k();
    if actual > k {
        return Err(Error::input(format!("the set has {actual} distances, more than k = {k}")));
    }
    let normalization = max_area_normalization(&polygon_vertices_2d(spec)?)?;
    let cones = quadrant_cones(&normalization.polygon)?;
    let gauge = gauge_of_polygon(&normalization.polygon)?;
    let transformed: Vec<Vector> = set.points().iter().map(|p| normalization.apply(p)).collect();
    let image = PointSet::new(2, transformed.clone())?;
    let heights = chain_certificate(&gauge, &image, &cones.family())?;
    if !heights.conditions_hold() {
        return Err(Error::falsification(
            "normalized quadrant cones violate the equal-norm condition on the set",
        ));
    }
    let claimed = (k as u128 + 1).pow(2);
    let observed = set.len();
    let pass = heights.injective && heights.bound <= claimed && observed as u128 <= heights.bound;
    Ok(PlanarCertificate {
        normalization,
        cones,
        transformed,
        heights,
        k,
        claimed,
        observed,
        pass,
    })
}

/// Convex hull with collinear points dropped, counterclockwise.
pub fn convex_hull(points: &[Vector]) -> Vec<Vector> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: &Vector, a: &Vector, b: &Vector| cross(&(a - o), &(b - o));
    let mut lower: Vec<Vector> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !turn(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vector> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !turn(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Random centrally symmetric, strictly convex polygon with rational
/// vertices and a vertex count in `[min_vertices, max_vertices]`, ordered
/// counterclockwise from the positive x-axis.
pub fn random_symmetric_polygon<R: Rng>(rng: &mut R, min_vertices: usize, max_vertices: usize) -> Vec<Vector> {
    loop {
        let half = rng.random_range(min_vertices / 2..=max_vertices / 2);
        let mut pts = Vec::new();
        for _ in 0..half + 2 {
            let den = rng.random_range(1..=7);
            let p = Vector::new(vec![
                rational::q(rng.random_range(-30..=30), den),
                rational::q(rng.random_range(-30..=30), den),
            ]);
            if !p.is_zero() {
                pts.push(-&p);
                pts.push(p);
            }
        }
        let mut hull = convex_hull(&pts);
        if hull.len() < min_vertices || hull.len() > max_vertices {
            continue;
        }
        if !hull.iter().all(|v| hull.contains(&-v)) {
            continue;
        }
        hull.sort_by(angle_cmp);
        if validate_symmetric_polygon(&hull).is_ok() {
            return hull;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormKind;
    use crate::spectrum::lattice_cube;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn v(xs: &[i64]) -> Vector {
        Vector::from_ints(xs)
    }

    fn square() -> Vec<Vector> {
        polygon_vertices_2d(&NormSpec::linf(2)).unwrap()
    }

    fn diamond() -> Vec<Vector> {
        polygon_vertices_2d(&NormSpec::l1(2)).unwrap()
    }

    fn hexagon() -> Vec<Vector> {
        polygon_vertices_2d(&NormSpec::hexagon()).unwrap()
    }

    #[test]
    fn square_normalizes_to_diamond() {
        let n = max_area_normalization(&square()).unwrap();
        assert_eq!((n.x0.clone(), n.y0.clone()), (v(&[1, 1]), v(&[-1, 1])));
        assert_eq!(n.polygon, diamond());
        assert_eq!(n.apply(&v(&[1, 1])), v(&[1, 0]));
        assert_eq!(n.apply(&v(&[-1, 1])), v(&[0, 1]));
        assert!(n.checks.all());
    }

    #[test]
    fn diamond_is_already_normalized() {
        let n = max_area_normalization(&diamond()).unwrap();
        assert_eq!(n.transform, Matrix2::identity());
        assert_eq!((n.x0, n.y0), (v(&[1, 0]), v(&[0, 1])));
    }

    #[test]
    fn hexagon_admits_identity() {
        let hex = hexagon();
        let checks = normalization_checks(&hex);
        assert!(checks.all());
        let n = max_area_normalization(&hex).unwrap();
        assert!(n.checks.all());
        assert!(n.transform.det().is_positive());
    }

    #[test]
    fn rejects_bad_polygons() {
        assert!(max_area_normalization(&[v(&[1, 0]), v(&[0, 1]), v(&[-1, 0])]).is_err());
        let skew = vec![v(&[1, 0]), v(&[0, 1]), v(&[-1, 0]), v(&[0, -2])];
        assert!(max_area_normalization(&skew).is_err());
        let clockwise: Vec<Vector> = diamond().into_iter().rev().collect();
        assert!(max_area_normalization(&clockwise).is_err());
        let kite = vec![v(&[1, 0]), v(&[1, 1]), v(&[0, 2]), v(&[-1, 0]), v(&[-1, -1]), v(&[0, -2])];
        assert!(validate_symmetric_polygon(&kite).is_ok());
        let flat = vec![v(&[2, 0]), v(&[1, 1]), v(&[0, 2]), v(&[-2, 0]), v(&[-1, -1]), v(&[0, -2])];
        assert!(validate_symmetric_polygon(&flat).is_err());
    }

    #[test]
    fn diamond_needs_no_removal() {
        let qc = quadrant_cones(&diamond()).unwrap();
        assert!(qc.removed.is_empty());
        assert!(qc.report.holds());
    }

    #[test]
    fn hexagon_first_quadrant_loses_both_axes() {
        let qc = quadrant_cones(&hexagon()).unwrap();
        let mut rays: Vec<_> = qc.removed.iter().map(|r| (r.cone, r.ray.clone())).collect();
        rays.sort();
        assert_eq!(rays, vec![(0, v(&[0, 1])), (0, v(&[1, 0]))]);
        // Without the removal the pair (1,1), (1,0) breaks the equal-norm condition.
        let closed = ConeFamily {
            cones: vec![
                Cone::Polyhedral(PolyhedralCone::orthant(&[true, true])),
                Cone::Polyhedral(PolyhedralCone::orthant(&[false, true])),
            ],
        };
        let r = check_cone_conditions(&closed, &NormSpec::hexagon(), &[v(&[1, 1]), v(&[1, 0])]).unwrap();
        assert!(!r.same_norm.is_empty());
    }

    #[test]
    fn square_is_not_a_valid_cone_input() {
        assert!(matches!(quadrant_cones(&square()), Err(Error::Geometry(_))));
    }

    #[test]
    fn planar_certificates() {
        let grid = PointSet::new(2, lattice_cube(2, 2)).unwrap();
        let c = planar_bound_certificate(&NormSpec::linf(2), &grid, 2).unwrap();
        assert!(c.pass);
        assert_eq!((c.claimed, c.observed, c.heights.bound), (9, 9, 9));

        let tri = PointSet::from_ints(&[&[0, 0], &[1, 0], &[1, 1]]).unwrap();
        let c = planar_bound_certificate(&NormSpec::hexagon(), &tri, 1).unwrap();
        assert!(c.pass);
        assert_eq!((c.claimed, c.observed), (4, 3));

        let two = PointSet::from_ints(&[&[0, 0], &[3, 1]]).unwrap();
        let c = planar_bound_certificate(&NormSpec::linf(2), &two, 1).unwrap();
        assert_eq!((c.claimed, c.observed), (4, 2));

        assert!(planar_bound_certificate(&NormSpec::linf(2), &grid, 1).is_err());
        assert!(planar_bound_certificate(&NormSpec::lp(2, 2.0).unwrap(), &two, 1).is_err());
    }

    #[test]
    fn hull_drops_collinear_points() {
        let pts = vec![v(&[0, 0]), v(&[1, 0]), v(&[2, 0]), v(&[2, 2]), v(&[0, 2]), v(&[1, 1])];
        assert_eq!(convex_hull(&pts), vec![v(&[0, 0]), v(&[2, 0]), v(&[2, 2]), v(&[0, 2])]);
    }

    #[test]
    fn random_polygons_normalize() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let poly = random_symmetric_polygon(&mut rng, 6, 12);
            assert!((6..=12).contains(&poly.len()));
            let n = max_area_normalization(&poly).unwrap();
            assert!(n.checks.all());
            quadrant_cones(&n.polygon).unwrap();
        }
    }

    proptest! {
        #[test]
        fn gauge_covariance(seed in 0u64..1000, x in -20i64..=20, y in -20i64..=20) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let poly = random_symmetric_polygon(&mut rng, 4, 10);
            let n = max_area_normalization(&poly).unwrap();
            let before = gauge_of_polygon(&poly).unwrap();
            let after = gauge_of_polygon(&n.polygon).unwrap();
            let p = v(&[x, y]);
            prop_assert_eq!(after.exact(&n.apply(&p)).unwrap(), before.exact(&p).unwrap());
        }

        #[test]
        fn ray_removal_keeps_cone_convex(a in (0i64..=5, 0i64..=5), b in (0i64..=5, 0i64..=5), t in 0i64..=4) {
            let qc = quadrant_cones(&hexagon()).unwrap();
            let (pa, pb) = (v(&[a.0, a.1]), v(&[b.0, b.1]));
            if qc.first.contains(&pa) && qc.first.contains(&pb) {
                let mix = &pa.scale(&rational::q(t, 4)) + &pb.scale(&rational::q(4 - t, 4));
                prop_assert!(qc.first.contains(&mix));
                prop_assert!(mix.is_zero() || !qc.first.contains(&-&mix));
            }
        }
    }

    #[test]
    fn polytopal_kind_round_trips_through_vertices() {
        let spec = gauge_of_polygon(&hexagon()).unwrap();
        assert!(matches!(spec.kind, NormKind::Polytopal(_)));
        assert_eq!(polygon_vertices_2d(&spec).unwrap(), hexagon());
    }
}
