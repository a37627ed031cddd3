//! Planar geometry primitives shared by the mesh, shape-function and
//! free-surface code.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// A point (or vector) in the vertical x–y plane. `y` is the elevation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        Point2::new(self.x + t * (o.x - self.x), self.y + t * (o.y - self.y))
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

/// Shoelace signed area; positive for counter-clockwise loops.
pub fn signed_area(pts: &[Point2]) -> f64 {
    let n = pts.len();
    if n < 3 {
        return 0.0;
    }
    // shifted to the first vertex to limit cancellation for far-off-origin cells
    let o = pts[0];
    let mut a = 0.0;
    for i in 1..n - 1 {
        a += (pts[i] - o).cross(pts[i + 1] - o);
    }
    0.5 * a
}

/// Shoelace area and centroid of a simple polygon.
pub fn area_centroid(pts: &[Point2]) -> (f64, Point2) {
    let n = pts.len();
    let o = pts[0];
    let mut a = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 1..n.saturating_sub(1) {
        let p = pts[i] - o;
        let q = pts[i + 1] - o;
        let c = p.cross(q);
        a += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    if a == 0.0 {
        let s = pts.iter().fold(Point2::default(), |acc, &p| acc + p);
        return (0.0, s * (1.0 / n as f64));
    }
    let area = 0.5 * a;
    (area, Point2::new(o.x + cx / (3.0 * a), o.y + cy / (3.0 * a)))
}

/// Largest vertex-to-vertex distance.
pub fn diameter(pts: &[Point2]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            d = d.max(p.dist(*q));
        }
    }
    d
}

/// Axis-aligned bounding box as (min, max).
pub fn bbox(pts: &[Point2]) -> (Point2, Point2) {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

/// Distance from `p` to the closed segment `a`–`b`, with the segment parameter
/// of the closest point.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> (f64, f64) {
    let d = b - a;
    let l2 = d.dot(d);
    if l2 == 0.0 {
        return (p.dist(a), 0.0);
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    (p.dist(a + d * t), t)
}

/// Crossing-number point-in-polygon test. Points on the boundary may go
/// either way; callers needing boundary semantics check edges first.
pub fn point_in_polygon(p: Point2, pts: &[Point2]) -> bool {
    let n = pts.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (pts[i], pts[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Convexity class of a counter-clockwise loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convexity {
    /// Every vertex turns left by more than the tolerance.
    Strict,
    /// No reflex vertex, but at least one (near-)straight vertex.
    Weak,
    /// At least one reflex vertex.
    Reflex,
}

/// Classifies a CCW loop by the sine of the turning angle at each vertex.
pub fn convexity(pts: &[Point2], eps: f64) -> Convexity {
    let n = pts.len();
    let mut weak = false;
    for i in 0..n {
        let a = pts[(i + n - 1) % n];
        let b = pts[i];
        let c = pts[(i + 1) % n];
        let e0 = b - a;
        let e1 = c - b;
        let s = e0.cross(e1) / (e0.norm() * e1.norm());
        if s < -eps {
            return Convexity::Reflex;
        }
        if s < eps {
            weak = true;
        }
    }
    if weak {
        Convexity::Weak
    } else {
        Convexity::Strict
    }
}

/// True when two closed segments properly cross (touching at endpoints of
/// adjacent edges is not reported).
pub fn segments_cross(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = (b - a).cross(c - a);
    let d2 = (b - a).cross(d - a);
    let d3 = (d - c).cross(a - c);
    let d4 = (d - c).cross(b - c);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// True when a loop has two non-adjacent edges that cross.
pub fn is_self_intersecting(pts: &[Point2]) -> bool {
    let n = pts.len();
    if n < 4 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            if segments_cross(a, b, c, d) {
                return true;
            }
        }
    }
    false
}

/// Clips `poly` to the half-plane `{p : (p - origin)·normal <= 0}`
/// (Sutherland–Hodgman, one boundary).
pub fn clip_half_plane(poly: &[Point2], origin: Point2, normal: Point2) -> Vec<Point2> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    if n == 0 {
        return out;
    }
    let side = |p: Point2| (p - origin).dot(normal);
    for i in 0..n {
        let cur = poly[i];
        let nxt = poly[(i + 1) % n];
        let sc = side(cur);
        let sn = side(nxt);
        if sc <= 0.0 {
            out.push(cur);
        }
        if (sc < 0.0 && sn > 0.0) || (sc > 0.0 && sn < 0.0) {
            let t = sc / (sc - sn);
            out.push(cur.lerp(nxt, t));
        }
    }
    out
}

/// Clips a polygon to an axis-aligned box. The subject may be non-convex.
pub fn clip_to_box(poly: &[Point2], lo: Point2, hi: Point2) -> Vec<Point2> {
    let mut p = clip_axis(poly, 0, lo.x, true);
    p = clip_axis(&p, 0, hi.x, false);
    p = clip_axis(&p, 1, lo.y, true);
    clip_axis(&p, 1, hi.y, false)
}

// Axis-aligned clip with intersections computed on the fixed coordinate so
// that neighbouring boxes produce bit-identical crossing points.
fn clip_axis(poly: &[Point2], axis: usize, c: f64, keep_above: bool) -> Vec<Point2> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    let coord = |p: Point2| if axis == 0 { p.x } else { p.y };
    let inside = |p: Point2| if keep_above { coord(p) >= c } else { coord(p) <= c };
    for i in 0..n {
        let cur = poly[i];
        let nxt = poly[(i + 1) % n];
        let (ic, inx) = (inside(cur), inside(nxt));
        if ic {
            out.push(cur);
        }
        if ic != inx && coord(cur) != c && coord(nxt) != c {
            // order endpoints canonically so both neighbours compute the same point
            let (p, q) = if (cur.x, cur.y) < (nxt.x, nxt.y) { (cur, nxt) } else { (nxt, cur) };
            let t = (c - coord(p)) / (coord(q) - coord(p));
            let mut r = p.lerp(q, t);
            if axis == 0 {
                r.x = c;
            } else {
                r.y = c;
            }
            out.push(r);
        }
    }
    out
}

/// Removes consecutive duplicates (within `tol`) and exactly collinear
/// back-tracking spikes produced by clipping.
pub fn clean_loop(pts: &[Point2], tol: f64) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in pts {
        if out.last().is_none_or(|q: &Point2| q.dist(p) > tol) {
            out.push(p);
        }
    }
    while out.len() > 1 && out[0].dist(*out.last().unwrap()) <= tol {
        out.pop();
    }
    // drop zero-width spikes a -> b -> a
    let mut changed = true;
    while changed && out.len() >= 3 {
        changed = false;
        let n = out.len();
        for i in 0..n {
            let a = out[(i + n - 1) % n];
            let b = out[i];
            let c = out[(i + 1) % n];
            let e0 = b - a;
            let e1 = c - b;
            if e0.cross(e1).abs() <= tol * (e0.norm() + e1.norm()) && e0.dot(e1) < 0.0 {
                out.remove(i);
                changed = true;
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Vec<Point2> {
        vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)]
    }

    #[test]
    fn square_area_centroid() {
        let (a, c) = area_centroid(&unit_square());
        assert_eq!(a, 1.0);
        assert!((c.x - 0.5).abs() < 1e-15 && (c.y - 0.5).abs() < 1e-15);
    }

    #[test]
    fn triangle_area_centroid() {
        let t = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        let (a, c) = area_centroid(&t);
        assert!((a - 0.5).abs() < 1e-15);
        assert!((c.x - 1.0 / 3.0).abs() < 1e-15 && (c.y - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn hexagon_area() {
        let hex: Vec<Point2> = (0..6)
            .map(|k| {
                let t = std::f64::consts::PI / 3.0 * k as f64;
                Point2::new(t.cos(), t.sin())
            })
            .collect();
        let (a, c) = area_centroid(&hex);
        assert!((a - 2.598_076_211_353_316).abs() < 1e-12);
        assert!(c.norm() < 1e-15);
    }

    #[test]
    fn clockwise_is_negative() {
        let mut s = unit_square();
        s.reverse();
        assert_eq!(signed_area(&s), -1.0);
    }

    #[test]
    fn convexity_classes() {
        assert_eq!(convexity(&unit_square(), 1e-8), Convexity::Strict);
        let penta = vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        assert_eq!(convexity(&penta, 1e-8), Convexity::Weak);
        let dart = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.5), Point2::new(2.0, 0.0), Point2::new(1.0, 2.0)];
        assert_eq!(convexity(&dart, 1e-8), Convexity::Reflex);
    }

    #[test]
    fn bowtie_self_intersects() {
        let bow = [Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        assert!(is_self_intersecting(&bow));
        assert!(!is_self_intersecting(&unit_square()));
    }

    #[test]
    fn box_clip_of_triangle() {
        let tri = [Point2::new(0.0, 0.0), Point2::new(2.0, 0.0), Point2::new(0.0, 2.0)];
        let c = clip_to_box(&tri, Point2::new(0.5, 0.0), Point2::new(1.5, 1.0));
        let c = clean_loop(&c, 1e-12);
        assert!((signed_area(&c) - 0.875).abs() < 1e-14);
    }

    #[test]
    fn point_in_polygon_basic() {
        assert!(point_in_polygon(Point2::new(0.3, 0.7), &unit_square()));
        assert!(!point_in_polygon(Point2::new(1.3, 0.7), &unit_square()));
    }
}
