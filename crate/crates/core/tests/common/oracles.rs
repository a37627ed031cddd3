//! Independent oracles for element-level checks.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use polyseep::geometry::{self, Point2};
use polyseep::quadrature::EdgeQuadRule;
use polyseep::shape::{PolygonBasis, ShapeMode};
use polyseep::smoothing::{Conductivity, ElementSmoothing, SmoothingCell};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Strictly convex CCW polygon: points on a rotated ellipse at sorted
/// angles with a minimum spacing.
pub fn convex_polygon(gaps: &[f64], a: f64, b: f64, rot: f64, shift: Point2) -> Vec<Point2> {
    let total: f64 = gaps.iter().sum();
    let mut t: f64 = 0.0;
    gaps.iter()
        .map(|g| {
            let p = Point2::new(a * t.cos(), b * t.sin());
            t += 2.0 * PI * g / total;
            let (s, c) = rot.sin_cos();
            Point2::new(c * p.x - s * p.y, s * p.x + c * p.y) + shift
        })
        .collect()
}

/// Convex polygon with the midpoint of one edge inserted as a hanging node.
pub fn with_hanging_node(poly: &[Point2], edge: usize) -> Vec<Point2> {
    let n = poly.len();
    let mut out = poly.to_vec();
    out.insert(edge + 1, poly[edge].lerp(poly[(edge + 1) % n], 0.5));
    out
}

pub fn random_point_inside(poly: &[Point2], rng: &mut ChaCha8Rng) -> Point2 {
    let (lo, hi) = geometry::bbox(poly);
    loop {
        let p = Point2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if geometry::point_in_polygon(p, poly) {
            return p;
        }
    }
}

pub fn tri_area(a: Point2, b: Point2, c: Point2) -> f64 {
    0.5 * (b - a).cross(c - a)
}

/// Wachspress gradients from the triangle-area form
/// `w_i = C_i / (A_{i-1}(x) A_i(x))`, differentiated by hand.
pub fn wachspress_gradients(poly: &[Point2], x: Point2) -> Vec<Point2> {
    let n = poly.len();
    let area = |i: usize| tri_area(x, poly[i % n], poly[(i + 1) % n]);
    // ∇ of area(x, a, b) with respect to x
    let grad_area = |i: usize| {
        let (a, b) = (poly[i % n], poly[(i + 1) % n]);
        Point2::new(0.5 * (a.y - b.y), 0.5 * (b.x - a.x))
    };
    let mut w = vec![0.0; n];
    let mut gw = vec![Point2::default(); n];
    for i in 0..n {
        let im = (i + n - 1) % n;
        let c = tri_area(poly[im], poly[i], poly[(i + 1) % n]);
        let (a0, a1) = (area(im), area(i));
        w[i] = c / (a0 * a1);
        gw[i] = (grad_area(im) * (1.0 / a0) + grad_area(i) * (1.0 / a1)) * -w[i];
    }
    let sw: f64 = w.iter().sum();
    let sg = gw.iter().fold(Point2::default(), |acc, &g| acc + g);
    (0..n).map(|i| (gw[i] * sw - sg * w[i]) * (1.0 / (sw * sw))).collect()
}

/// Collapsed (Duffy) Gauss rule on a triangle, `m × m` points.
pub fn duffy_points(t: [Point2; 3], m: usize) -> Vec<(Point2, f64)> {
    let r = EdgeQuadRule::gauss(m);
    let jac = 2.0 * tri_area(t[0], t[1], t[2]).abs();
    let mut out = Vec::with_capacity(m * m);
    for (&u, &wu) in r.points.iter().zip(&r.weights) {
        for (&v, &wv) in r.points.iter().zip(&r.weights) {
            // (u, v) ∈ [0,1]² ↦ (s, t) = (u, (1 − u) v)
            let (s, tt) = (u, (1.0 - u) * v);
            let p = t[0] + (t[1] - t[0]) * s + (t[2] - t[0]) * tt;
            out.push((p, wu * wv * (1.0 - u) * jac));
        }
    }
    out
}

/// `(1/A_C) ∫_C ∇N dA` by area quadrature of the analytic gradient.
pub fn area_oracle(poly: &[Point2], sc: &SmoothingCell) -> (Vec<f64>, Vec<f64>) {
    let n = poly.len();
    let (mut bx, mut by) = (vec![0.0; n], vec![0.0; n]);
    // the gradient is smooth inside the polygon but varies quickly near its
    // corners, so split the subcell once more before integrating
    let [a, b, c] = sc.tri;
    let (ab, bc, ca) = (a.lerp(b, 0.5), b.lerp(c, 0.5), c.lerp(a, 0.5));
    for t in [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]] {
        for (p, w) in duffy_points(t, 24) {
            for (i, g) in wachspress_gradients(poly, p).into_iter().enumerate() {
                bx[i] += w * g.x;
                by[i] += w * g.y;
            }
        }
    }
    let inv = 1.0 / sc.area;
    (bx.iter().map(|v| v * inv).collect(), by.iter().map(|v| v * inv).collect())
}

pub fn element(poly: &[Point2], points: usize) -> ElementSmoothing {
    let basis = PolygonBasis::new(poly.to_vec(), ShapeMode::Auto).unwrap();
    ElementSmoothing::new(basis, &EdgeQuadRule::gauss(points)).unwrap()
}

/// Largest diameter-scaled difference between B̃ and the area oracle.
pub fn oracle_error(poly: &[Point2], points: usize) -> f64 {
    let scale = geometry::diameter(poly);
    let el = element(poly, points);
    assert_eq!(el.basis.kind(), ShapeMode::Wachspress);
    let mut worst: f64 = 0.0;
    for (c, sc) in el.cells.iter().enumerate() {
        let (ox, oy) = area_oracle(poly, sc);
        for i in 0..poly.len() {
            worst = worst.max((el.ops[c].bx[i] - ox[i]).abs().max((el.ops[c].by[i] - oy[i]).abs()) * scale);
        }
    }
    worst
}

/// Checks subcell areas, `Σ B̃ = 0`, linear reproduction of `B̃`, symmetry,
/// zero row sums and semi-definiteness of `Ke`, and the capacity total.
pub fn check_element(poly: &[Point2], ss: f64) -> Result<(), String> {
    let n = poly.len();
    let el = element(poly, 6);
    let area = geometry::signed_area(poly);
    let scale = geometry::diameter(poly);

    let sub: f64 = el.cells.iter().map(|c| c.area).sum();
    ensure!((sub - area).abs() <= 1e-12 * area, "subcell areas {sub} vs {area}");

    for op in &el.ops {
        let (sx, sy): (f64, f64) = (op.bx.iter().sum(), op.by.iter().sum());
        ensure!(sx.abs() * scale < 1e-12 && sy.abs() * scale < 1e-12, "sum of B~ = ({sx:e}, {sy:e})");
        let hx: Vec<f64> = poly.iter().map(|p| p.x).collect();
        let hy: Vec<f64> = poly.iter().map(|p| p.y).collect();
        let gx = op.apply(&hx);
        let gy = op.apply(&hy);
        ensure!((gx.x - 1.0).abs() < 1e-10 && gx.y.abs() < 1e-10, "grad x = {gx:?}");
        ensure!(gy.x.abs() < 1e-10 && (gy.y - 1.0).abs() < 1e-10, "grad y = {gy:?}");
    }

    let k = Conductivity { kxx: 2.0, kxy: 0.3, kyy: 0.7 };
    let ke = el.stiffness(&k).unwrap();
    let kmax = ke.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for a in 0..n {
        let row: f64 = (0..n).map(|b| ke[a * n + b]).sum();
        ensure!(row.abs() <= 1e-12 * kmax, "row sum {row:e}");
        for b in 0..n {
            ensure!(ke[a * n + b] == ke[b * n + a], "Ke not symmetric at ({a}, {b})");
        }
    }
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, &ke)).eigenvalues;
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure!(min >= -1e-12 * kmax, "min eigenvalue {min:e}");

    let me = el.capacity(ss).unwrap();
    let total: f64 = me.iter().sum();
    ensure!((total - ss * area).abs() <= 1e-8 * ss * area, "mass total {total} vs {}", ss * area);
    Ok(())
}

/// Partition of unity to 1e-12 and linear reproduction to 1e-10 (relative
/// to the diameter) at `count` random interior points.
pub fn check_basis(poly: &[Point2], rng: &mut ChaCha8Rng, count: usize) -> Result<(), String> {
    let basis = PolygonBasis::new(poly.to_vec(), ShapeMode::Auto).map_err(|e| e.to_string())?;
    let scale = geometry::diameter(poly);
    for _ in 0..count {
        let x = random_point_inside(poly, rng);
        let v = basis.eval(x).map_err(|e| e.to_string())?.values;
        let sum: f64 = v.iter().sum();
        ensure!((sum - 1.0).abs() < 1e-12, "sum of shape functions {sum}");
        let rx = poly.iter().zip(&v).fold(Point2::default(), |acc, (&p, &w)| acc + p * w);
        ensure!(rx.dist(x) < 1e-10 * scale.max(1.0), "reproduction error {:e}", rx.dist(x));
    }
    Ok(())
}

/// The two pentagons on which the 6-point edge rule must match the area
/// oracle to 1e-8.
pub fn test_pentagons() -> [Vec<Point2>; 2] {
    [
        convex_polygon(&[1.0; 5], 1.0, 1.0, 0.1, Point2::default()),
        convex_polygon(&[0.8, 1.0, 0.7, 1.0, 0.9], 1.4, 0.9, 0.6, Point2::new(2.0, 1.0)),
    ]
}

/// Random strictly convex polygon with 3 to 9 vertices.
pub fn random_polygon(rng: &mut ChaCha8Rng) -> Vec<Point2> {
    let n = rng.gen_range(3..=9);
    let gaps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.3..1.0)).collect();
    let shift = Point2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
    convex_polygon(&gaps, rng.gen_range(0.5..3.0), rng.gen_range(0.5..3.0), rng.gen_range(0.0..PI), shift)
}
