//! Generalized barycentric shape functions on polygons.
//!
//! Strictly convex cells use Wachspress coordinates. A cell with a straight
//! vertex (typically a hanging node left by quadtree refinement) would give
//! that vertex an identically zero Wachspress function, so in `Auto` mode
//! such cells switch to mean-value coordinates, which stay well defined,
//! linearly complete and interpolatory on weakly convex polygons.

use crate::error::{Error, Result};
use crate::geometry::{self, Convexity, Point2};
use crate::quadrature::EdgeQuadRule;

/// Sine of the turning angle below which a vertex counts as straight.
pub const CONVEXITY_EPS: f64 = 1e-8;

/// Relative distance (× polygon diameter) treated as lying on the boundary.
pub const BOUNDARY_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ShapeMode {
    #[default]
    Auto,
    Wachspress,
    MeanValue,
}

/// Shape function values at one point, one per polygon vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeEval {
    pub values: Vec<f64>,
}

/// Raw Wachspress weights `w_k = det(n_{k-1}, n_k) / (h_{k-1} h_k)` at a
/// point strictly inside a strictly convex CCW polygon.
pub fn wachspress_weights(poly: &[Point2], x: Point2) -> Result<Vec<f64>> {
    if geometry::convexity(poly, CONVEXITY_EPS) != Convexity::Strict {
        return Err(Error::NotStrictlyConvex);
    }
    let normals = outward_normals(poly);
    let h: Vec<f64> = poly.iter().zip(&normals).map(|(&v, &n)| (v - x).dot(n)).collect();
    if h.iter().any(|&d| d <= 0.0) {
        return Err(Error::PointOnBoundary);
    }
    Ok(wachspress_from_distances(&normals, &h))
}

fn wachspress_from_distances(normals: &[Point2], h: &[f64]) -> Vec<f64> {
    let n = normals.len();
    (0..n)
        .map(|k| {
            let km = (k + n - 1) % n;
            normals[km].cross(normals[k]) / (h[km] * h[k])
        })
        .collect()
}

/// Outward unit normal of edge `i -> i+1` of a CCW loop.
pub fn outward_normals(poly: &[Point2]) -> Vec<Point2> {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let d = poly[(i + 1) % n] - poly[i];
            Point2::new(d.y, -d.x) * (1.0 / d.norm())
        })
        .collect()
}

/// Raw mean-value weights at a point strictly inside the polygon and off
/// its vertices and edges.
pub fn mean_value_weights(poly: &[Point2], x: Point2) -> Vec<f64> {
    let n = poly.len();
    let d: Vec<Point2> = poly.iter().map(|&v| v - x).collect();
    let r: Vec<f64> = d.iter().map(|v| v.norm()).collect();
    // tan(alpha_i / 2) for the angle subtended by edge i -> i+1
    let t: Vec<f64> = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            d[i].cross(d[j]) / (r[i] * r[j] + d[i].dot(d[j]))
        })
        .collect();
    (0..n).map(|i| (t[(i + n - 1) % n] + t[i]) / r[i]).collect()
}

/// Precomputed per-polygon data for repeated shape evaluation.
#[derive(Clone, Debug)]
pub struct PolygonBasis {
    pts: Vec<Point2>,
    normals: Vec<Point2>,
    kind: ShapeMode,
    tol: f64,
}

impl PolygonBasis {
    /// Resolves `mode` for the polygon. `Auto` picks Wachspress for strictly
    /// convex loops and mean-value for weakly convex ones; reflex polygons
    /// are rejected except in explicit `MeanValue` mode.
    pub fn new(pts: Vec<Point2>, mode: ShapeMode) -> Result<Self> {
        let conv = geometry::convexity(&pts, CONVEXITY_EPS);
        let kind = match (mode, conv) {
            (ShapeMode::MeanValue, _) => ShapeMode::MeanValue,
            (_, Convexity::Reflex) => return Err(Error::ReflexPolygon),
            (ShapeMode::Wachspress, Convexity::Weak) => return Err(Error::NotStrictlyConvex),
            (_, Convexity::Strict) => ShapeMode::Wachspress,
            (ShapeMode::Auto, Convexity::Weak) => ShapeMode::MeanValue,
        };
        let tol = BOUNDARY_EPS * geometry::diameter(&pts);
        let normals = outward_normals(&pts);
        Ok(PolygonBasis { pts, normals, kind, tol })
    }

    /// The family actually used (never `Auto`).
    pub fn kind(&self) -> ShapeMode {
        self.kind
    }

    pub fn points(&self) -> &[Point2] {
        &self.pts
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    /// Writes the shape values at `x` into `out` (length = vertex count).
    pub fn eval_into(&self, x: Point2, out: &mut [f64]) -> Result<()> {
        let n = self.pts.len();
        out.iter_mut().for_each(|v| *v = 0.0);
        // vertices: Kronecker delta
        for (k, &v) in self.pts.iter().enumerate() {
            if v.dist(x) <= self.tol {
                out[k] = 1.0;
                return Ok(());
            }
        }
        // edges: linear interpolation between the endpoints
        for i in 0..n {
            let j = (i + 1) % n;
            let (d, t) = geometry::point_segment_distance(x, self.pts[i], self.pts[j]);
            if d <= self.tol {
                out[i] = 1.0 - t;
                out[j] = t;
                return Ok(());
            }
        }
        if !geometry::point_in_polygon(x, &self.pts) {
            return Err(Error::OutsidePolygon { x: x.x, y: x.y });
        }
        let w = match self.kind {
            ShapeMode::Wachspress => {
                let h: Vec<f64> = self.pts.iter().zip(&self.normals).map(|(&v, &nrm)| (v - x).dot(nrm)).collect();
                wachspress_from_distances(&self.normals, &h)
            }
            _ => mean_value_weights(&self.pts, x),
        };
        let s: f64 = w.iter().sum();
        for (o, wi) in out.iter_mut().zip(w) {
            *o = wi / s;
        }
        Ok(())
    }

    pub fn eval(&self, x: Point2) -> Result<ShapeEval> {
        let mut values = vec![0.0; self.pts.len()];
        self.eval_into(x, &mut values)?;
        Ok(ShapeEval { values })
    }

    /// `∫_a^b N_I dΓ` for every vertex `I` by Gauss quadrature. The
    /// segment must lie in the closed polygon.
    pub fn edge_integrals(&self, a: Point2, b: Point2, rule: &EdgeQuadRule) -> Result<Vec<f64>> {
        let n = self.pts.len();
        let mut acc = vec![0.0; n];
        self.edge_integrals_into(a, b, rule, &mut acc)?;
        Ok(acc)
    }

    pub(crate) fn edge_integrals_into(&self, a: Point2, b: Point2, rule: &EdgeQuadRule, acc: &mut [f64]) -> Result<()> {
        acc.iter_mut().for_each(|v| *v = 0.0);
        let len = a.dist(b);
        if len == 0.0 {
            return Ok(());
        }
        let mut vals = vec![0.0; self.pts.len()];
        for (&xi, &w) in rule.points.iter().zip(&rule.weights) {
            let p = a.lerp(b, xi);
            self.eval_into(p, &mut vals).map_err(|e| match e {
                Error::OutsidePolygon { .. } => Error::SegmentOutside,
                other => other,
            })?;
            for (s, v) in acc.iter_mut().zip(&vals) {
                *s += v * w * len;
            }
        }
        Ok(())
    }
}

/// Shape function values of `poly` at `x`.
pub fn shape_eval(poly: &[Point2], x: Point2, mode: ShapeMode) -> Result<ShapeEval> {
    PolygonBasis::new(poly.to_vec(), mode)?.eval(x)
}

/// Per-vertex edge integrals over segment `a`–`b` inside `poly`.
pub fn edge_shape_integral(poly: &[Point2], a: Point2, b: Point2, rule: &EdgeQuadRule) -> Result<Vec<f64>> {
    let basis = PolygonBasis::new(poly.to_vec(), ShapeMode::Auto)?;
    for p in [a, b] {
        if basis.eval(p).is_err() {
            return Err(Error::SegmentOutside);
        }
    }
    basis.edge_integrals(a, b, rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_square() -> Vec<Point2> {
        vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)]
    }

    fn regular(n: usize, r: f64) -> Vec<Point2> {
        (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.3;
                Point2::new(r * t.cos(), r * t.sin())
            })
            .collect()
    }

    fn hanging_pentagon() -> Vec<Point2> {
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ]
    }

    #[test]
    fn square_center_is_uniform() {
        let w = wachspress_weights(&unit_square(), Point2::new(0.5, 0.5)).unwrap();
        assert!(w.iter().all(|&v| (v - w[0]).abs() < 1e-14));
        let e = shape_eval(&unit_square(), Point2::new(0.5, 0.5), ShapeMode::Auto).unwrap();
        assert!(e.values.iter().all(|&v| (v - 0.25).abs() < 1e-15));
    }

    #[test]
    fn pentagon_centroid_is_uniform() {
        let p = regular(5, 1.0);
        let e = shape_eval(&p, Point2::new(0.0, 0.0), ShapeMode::Wachspress).unwrap();
        assert!(e.values.iter().all(|&v| (v - 0.2).abs() < 1e-14));
    }

    #[test]
    fn square_matches_bilinear() {
        let e = shape_eval(&unit_square(), Point2::new(0.25, 0.25), ShapeMode::Auto).unwrap();
        let expect = [0.5625, 0.1875, 0.0625, 0.1875];
        for (v, x) in e.values.iter().zip(expect) {
            assert!((v - x).abs() < 1e-15);
        }
        // bilinear oracle at arbitrary points
        for &(x, y) in &[(0.1, 0.7), (0.93, 0.02), (0.5, 0.31)] {
            let e = shape_eval(&unit_square(), Point2::new(x, y), ShapeMode::Auto).unwrap();
            let bl = [(1.0 - x) * (1.0 - y), x * (1.0 - y), x * y, (1.0 - x) * y];
            for (v, b) in e.values.iter().zip(bl) {
                assert!((v - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn vertex_gives_kronecker_delta() {
        let p = regular(6, 2.0);
        for k in 0..6 {
            let e = shape_eval(&p, p[k], ShapeMode::Auto).unwrap();
            for (i, v) in e.values.iter().enumerate() {
                assert_eq!(*v, if i == k { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn hanging_vertex_switches_to_mean_value() {
        let b = PolygonBasis::new(hanging_pentagon(), ShapeMode::Auto).unwrap();
        assert_eq!(b.kind(), ShapeMode::MeanValue);
        assert!(matches!(PolygonBasis::new(hanging_pentagon(), ShapeMode::Wachspress), Err(Error::NotStrictlyConvex)));
        let e = b.eval(Point2::new(0.5, 0.0)).unwrap();
        assert_eq!(e.values, vec![0.0, 1.0, 0.0, 0.0, 0.0]);
        // piecewise linear along the split edge
        for &x in &[0.1, 0.3, 0.6, 0.85] {
            let e = b.eval(Point2::new(x, 0.0)).unwrap();
            let hat = if x < 0.5 { x / 0.5 } else { (1.0 - x) / 0.5 };
            assert!((e.values[1] - hat).abs() < 1e-12);
            assert!(e.values[3].abs() < 1e-12 && e.values[4].abs() < 1e-12);
        }
        // interior: hanging vertex keeps a positive function
        let e = b.eval(Point2::new(0.5, 0.1)).unwrap();
        assert!(e.values[1] > 0.1);
    }

    #[test]
    fn reflex_polygon_is_rejected() {
        let dart = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.5), Point2::new(2.0, 0.0), Point2::new(1.0, 2.0)];
        assert!(matches!(PolygonBasis::new(dart, ShapeMode::Auto), Err(Error::ReflexPolygon)));
    }

    #[test]
    fn wachspress_errors() {
        assert!(matches!(wachspress_weights(&hanging_pentagon(), Point2::new(0.5, 0.5)), Err(Error::NotStrictlyConvex)));
        assert!(matches!(wachspress_weights(&unit_square(), Point2::new(0.5, 0.0)), Err(Error::PointOnBoundary)));
        assert!(matches!(
            shape_eval(&unit_square(), Point2::new(1.5, 0.5), ShapeMode::Auto),
            Err(Error::OutsidePolygon { .. })
        ));
    }

    #[test]
    fn mean_value_equals_wachspress_on_triangles() {
        let tri = vec![Point2::new(0.1, 0.0), Point2::new(1.3, 0.2), Point2::new(0.4, 0.9)];
        let w = PolygonBasis::new(tri.clone(), ShapeMode::Wachspress).unwrap();
        let m = PolygonBasis::new(tri, ShapeMode::MeanValue).unwrap();
        for &(x, y) in &[(0.5, 0.3), (0.4, 0.5), (0.9, 0.25), (0.6, 0.6)] {
            let a = w.eval(Point2::new(x, y)).unwrap();
            let b = m.eval(Point2::new(x, y)).unwrap();
            for (u, v) in a.values.iter().zip(&b.values) {
                assert!((u - v).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bottom_edge_integrals() {
        for n in 2..6 {
            let r = EdgeQuadRule::gauss(n);
            let s = edge_shape_integral(&unit_square(), Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), &r).unwrap();
            let expect = [0.5, 0.5, 0.0, 0.0];
            for (v, e) in s.iter().zip(expect) {
                assert!((v - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_length_segment() {
        let p = Point2::new(0.3, 0.4);
        let s = edge_shape_integral(&unit_square(), p, p, &EdgeQuadRule::default()).unwrap();
        assert!(s.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn segment_outside_is_rejected() {
        let r = EdgeQuadRule::default();
        let e = edge_shape_integral(&unit_square(), Point2::new(0.5, 0.5), Point2::new(1.5, 0.5), &r);
        assert!(matches!(e, Err(Error::SegmentOutside)));
    }

    #[test]
    fn interior_segment_quadrature_against_high_order_oracle() {
        let p = regular(5, 1.0);
        // chords well inside the cell; near the boundary the rational
        // functions vary faster and three points are not enough
        for k in 0..5 {
            let a = p[k] * 0.3;
            let b = p[(k + 2) % 5] * 0.3;
            let low = edge_shape_integral(&p, a, b, &EdgeQuadRule::gauss(3)).unwrap();
            let high = edge_shape_integral(&p, a, b, &EdgeQuadRule::gauss(64)).unwrap();
            for (l, h) in low.iter().zip(&high) {
                assert!((l - h).abs() <= 1e-6 * h.abs().max(1e-3), "{l} vs {h}");
            }
        }
    }

    fn random_convex(n: usize, seed: &[f64]) -> Vec<Point2> {
        // sorted random angles on an ellipse give a strictly convex loop
        let mut ang: Vec<f64> = seed.iter().take(n).map(|s| s * 2.0 * std::f64::consts::PI).collect();
        ang.sort_by(|a, b| a.total_cmp(b));
        ang.iter().map(|t| Point2::new(1.7 * t.cos() + 0.4, 0.9 * t.sin() - 0.2)).collect()
    }

    proptest! {
        #[test]
        fn partition_of_unity_and_linear_precision(
            angles in proptest::collection::vec(0.0f64..1.0, 7),
            bary in proptest::collection::vec(0.01f64..1.0, 7),
            mode in prop_oneof![Just(ShapeMode::Wachspress), Just(ShapeMode::MeanValue)],
        ) {
            let poly = random_convex(7, &angles);
            prop_assume!(geometry::convexity(&poly, CONVEXITY_EPS) == Convexity::Strict);
            prop_assume!((0..7).all(|i| poly[i].dist(poly[(i + 1) % 7]) > 1e-3));
            let s: f64 = bary.iter().sum();
            let x = poly.iter().zip(&bary).fold(Point2::default(), |acc, (&p, &w)| acc + p * (w / s));
            let b = PolygonBasis::new(poly.clone(), mode).unwrap();
            let e = b.eval(x).unwrap();
            let sum: f64 = e.values.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            let rx = poly.iter().zip(&e.values).fold(Point2::default(), |acc, (&p, &v)| acc + p * v);
            prop_assert!(rx.dist(x) < 1e-10);
            if mode == ShapeMode::Wachspress {
                prop_assert!(e.values.iter().all(|&v| v >= 0.0));
            }
        }

        #[test]
        fn restriction_to_edges_is_linear(
            angles in proptest::collection::vec(0.0f64..1.0, 6),
            xi in 0.0f64..1.0,
            edge in 0usize..6,
        ) {
            let poly = random_convex(6, &angles);
            prop_assume!(geometry::convexity(&poly, CONVEXITY_EPS) == Convexity::Strict);
            let b = PolygonBasis::new(poly.clone(), ShapeMode::Wachspress).unwrap();
            let j = (edge + 1) % 6;
            let e = b.eval(poly[edge].lerp(poly[j], xi)).unwrap();
            for (k, v) in e.values.iter().enumerate() {
                let expect = if k == edge { 1.0 - xi } else if k == j { xi } else { 0.0 };
                prop_assert!((v - expect).abs() < 1e-10);
            }
        }
    }
}
