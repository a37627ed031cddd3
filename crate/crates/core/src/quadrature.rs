//! Gauss–Legendre rules on [0, 1] and a symmetric triangle rule.

use crate::geometry::Point2;

/// Default number of Gauss points per smoothing-cell edge.
pub const DEFAULT_EDGE_POINTS: usize = 4;

/// One-dimensional rule on [0, 1]; weights sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeQuadRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl EdgeQuadRule {
    /// `n`-point Gauss–Legendre rule mapped to [0, 1].
    pub fn gauss(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one point");
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Newton on P_n from the Chebyshev-like initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]
            points[i] = 0.5 * (1.0 - x);
            points[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        EdgeQuadRule { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for EdgeQuadRule {
    fn default() -> Self {
        EdgeQuadRule::gauss(DEFAULT_EDGE_POINTS)
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Six-point symmetric rule, exact for degree 4, as barycentric
/// coordinates and weights summing to one.
pub const TRIANGLE6: [([f64; 3], f64); 6] = {
    const A: f64 = 0.445_948_490_915_964_9;
    const WA: f64 = 0.223_381_589_678_011_5;
    const B: f64 = 0.091_576_213_509_770_74;
    const WB: f64 = 0.109_951_743_655_321_87;
    [
        ([A, A, 1.0 - 2.0 * A], WA),
        ([A, 1.0 - 2.0 * A, A], WA),
        ([1.0 - 2.0 * A, A, A], WA),
        ([B, B, 1.0 - 2.0 * B], WB),
        ([B, 1.0 - 2.0 * B, B], WB),
        ([1.0 - 2.0 * B, B, B], WB),
    ]
};

/// Quadrature points and area-scaled weights on triangle `t`.
pub fn triangle_points(t: [Point2; 3]) -> [(Point2, f64); 6] {
    let area = 0.5 * (t[1] - t[0]).cross(t[2] - t[0]).abs();
    TRIANGLE6.map(|(l, w)| {
        let p = Point2::new(l[0] * t[0].x + l[1] * t[1].x + l[2] * t[2].x, l[0] * t[0].y + l[1] * t[1].y + l[2] * t[2].y);
        (p, w * area)
    })
}
