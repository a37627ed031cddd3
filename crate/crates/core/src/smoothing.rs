//! Cell-based gradient smoothing and element matrices.
//!
//! Each polygon is split into triangles `(v_i, v_{i+1}, c)` around its area
//! centroid `c`. On every triangle the gradient is replaced by its average,
//! which the divergence theorem turns into edge integrals of the shape
//! functions, so no shape-function derivatives are ever evaluated.

use crate::error::{Error, Result};
use crate::geometry::{self, Point2};
use crate::quadrature::{self, EdgeQuadRule};
use crate::shape::PolygonBasis;

/// Number of Gauss points per smoothing-cell edge used by default.
pub const DEFAULT_SMOOTHING_POINTS: usize = 6;

/// Triangles below this fraction of the element area are dropped.
const SUBCELL_DROP: f64 = 1e-14;

/// One triangular smoothing cell. Vertices are CCW: `(v_edge, v_edge+1, c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothingCell {
    pub tri: [Point2; 3],
    pub area: f64,
    /// Local index of the polygon edge the cell sits on.
    pub edge: usize,
}

impl SmoothingCell {
    /// Outward unit normals and lengths of the three edges, in vertex order.
    pub fn edges(&self) -> [(Point2, f64); 3] {
        std::array::from_fn(|j| {
            let d = self.tri[(j + 1) % 3] - self.tri[j];
            let len = d.norm();
            (Point2::new(d.y / len, -d.x / len), len)
        })
    }
}

/// Centroid fan of a CCW polygon; zero-area triangles are dropped.
pub fn build_smoothing_cells(pts: &[Point2]) -> Result<Vec<SmoothingCell>> {
    let (area, c) = geometry::area_centroid(pts);
    if !(area > 0.0) {
        return Err(Error::DegenerateCell { cell: usize::MAX, area });
    }
    let n = pts.len();
    Ok((0..n)
        .filter_map(|i| {
            let tri = [pts[i], pts[(i + 1) % n], c];
            let a = 0.5 * (tri[1] - tri[0]).cross(tri[2] - tri[0]);
            (a > SUBCELL_DROP * area).then_some(SmoothingCell { tri, area: a, edge: i })
        })
        .collect())
}

/// Smoothed gradient operator of one smoothing cell: column `I` is
/// `(bx[I], by[I])`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothedGradOp {
    pub bx: Vec<f64>,
    pub by: Vec<f64>,
}

impl SmoothedGradOp {
    fn zeros(n: usize) -> Self {
        SmoothedGradOp { bx: vec![0.0; n], by: vec![0.0; n] }
    }

    /// Smoothed gradient of the nodal field `h`.
    pub fn apply(&self, h: &[f64]) -> Point2 {
        let gx = self.bx.iter().zip(h).map(|(b, v)| b * v).sum();
        let gy = self.by.iter().zip(h).map(|(b, v)| b * v).sum();
        Point2::new(gx, gy)
    }
}

/// `B̃_I = (1/A_C) Σ_e (∫_e N_I dΓ) n_e` over the three edges of `sc`.
pub fn smoothed_grad_op(basis: &PolygonBasis, sc: &SmoothingCell, rule: &EdgeQuadRule) -> Result<SmoothedGradOp> {
    let n = basis.len();
    let mut op = SmoothedGradOp::zeros(n);
    let mut s = vec![0.0; n];
    for (j, (nrm, _)) in sc.edges().iter().enumerate() {
        basis.edge_integrals_into(sc.tri[j], sc.tri[(j + 1) % 3], rule, &mut s)?;
        for i in 0..n {
            op.bx[i] += s[i] * nrm.x;
            op.by[i] += s[i] * nrm.y;
        }
    }
    let inv = 1.0 / sc.area;
    op.bx.iter_mut().chain(op.by.iter_mut()).for_each(|v| *v *= inv);
    Ok(op)
}

/// Symmetric 2×2 conductivity tensor (m/s).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Conductivity {
    pub kxx: f64,
    pub kxy: f64,
    pub kyy: f64,
}

impl Conductivity {
    pub fn isotropic(k: f64) -> Self {
        Conductivity { kxx: k, kxy: 0.0, kyy: k }
    }

    pub fn scaled(self, s: f64) -> Self {
        Conductivity { kxx: self.kxx * s, kxy: self.kxy * s, kyy: self.kyy * s }
    }

    pub fn is_spd(&self) -> bool {
        self.kxx.is_finite()
            && self.kxy.is_finite()
            && self.kyy.is_finite()
            && self.kxx > 0.0
            && self.kxx * self.kyy - self.kxy * self.kxy > 0.0
    }

    pub fn apply(&self, g: Point2) -> Point2 {
        Point2::new(self.kxx * g.x + self.kxy * g.y, self.kxy * g.x + self.kyy * g.y)
    }
}

/// Smoothing data of one polygonal element, reused for stiffness, flux
/// recovery and the wet/dry rescaling of the stiffness.
#[derive(Clone, Debug)]
pub struct ElementSmoothing {
    pub basis: PolygonBasis,
    pub cells: Vec<SmoothingCell>,
    pub ops: Vec<SmoothedGradOp>,
}

impl ElementSmoothing {
    /// Builds subcells and their gradient operators. Edge integrals along
    /// the centroid spokes are shared by neighbouring subcells, and the
    /// polygon edges carry exact linear traces.
    pub fn new(basis: PolygonBasis, rule: &EdgeQuadRule) -> Result<Self> {
        let pts = basis.points().to_vec();
        let n = pts.len();
        let cells = build_smoothing_cells(&pts)?;
        let (_, c) = geometry::area_centroid(&pts);
        let mut spokes = vec![vec![0.0; n]; n];
        for (k, s) in spokes.iter_mut().enumerate() {
            basis.edge_integrals_into(pts[k], c, rule, s)?;
        }
        let ops = cells
            .iter()
            .map(|sc| {
                let i = sc.edge;
                let j = (i + 1) % n;
                let [(n0, l0), (n1, _), (n2, _)] = sc.edges();
                let mut op = SmoothedGradOp::zeros(n);
                // polygon edge: N restricted to it is the linear hat pair
                for (node, w) in [(i, 0.5 * l0), (j, 0.5 * l0)] {
                    op.bx[node] += w * n0.x;
                    op.by[node] += w * n0.y;
                }
                for (s, nrm) in [(&spokes[j], n1), (&spokes[i], n2)] {
                    for m in 0..n {
                        op.bx[m] += s[m] * nrm.x;
                        op.by[m] += s[m] * nrm.y;
                    }
                }
                let inv = 1.0 / sc.area;
                op.bx.iter_mut().chain(op.by.iter_mut()).for_each(|v| *v *= inv);
                op
            })
            .collect();
        Ok(ElementSmoothing { basis, cells, ops })
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// `Ke = Σ_C A_C B̃ᵀ k B̃`, row-major `n × n`.
    pub fn stiffness(&self, k: &Conductivity) -> Result<Vec<f64>> {
        if !k.is_spd() {
            return Err(Error::NonSpdConductivity { region: u32::MAX });
        }
        let n = self.len();
        let mut ke = vec![0.0; n * n];
        for (sc, op) in self.cells.iter().zip(&self.ops) {
            for a in 0..n {
                let kb = k.apply(Point2::new(op.bx[a], op.by[a])) * sc.area;
                for b in 0..n {
                    ke[a * n + b] += kb.x * op.bx[b] + kb.y * op.by[b];
                }
            }
        }
        // symmetrize exactly
        for a in 0..n {
            for b in a + 1..n {
                let m = 0.5 * (ke[a * n + b] + ke[b * n + a]);
                ke[a * n + b] = m;
                ke[b * n + a] = m;
            }
        }
        Ok(ke)
    }

    /// Consistent capacity matrix `∫ S_s Nᵀ N` with the six-point rule on
    /// every subcell.
    pub fn capacity(&self, ss: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let mut me = vec![0.0; n * n];
        if ss == 0.0 {
            return Ok(me);
        }
        let mut vals = vec![0.0; n];
        for sc in &self.cells {
            for (p, w) in quadrature::triangle_points(sc.tri) {
                self.basis.eval_into(p, &mut vals)?;
                for a in 0..n {
                    let wa = ss * w * vals[a];
                    for b in 0..n {
                        me[a * n + b] += wa * vals[b];
                    }
                }
            }
        }
        Ok(me)
    }

    /// Source load `∫ p N` over the element plus `∫ q̄ N` over each listed
    /// local edge `(edge index, q̄)`.
    pub fn loads(&self, p: f64, neumann: &[(usize, f64)], rule: &EdgeQuadRule) -> Result<Vec<f64>> {
        let n = self.len();
        let mut fe = vec![0.0; n];
        let mut vals = vec![0.0; n];
        if p != 0.0 {
            for sc in &self.cells {
                for (x, w) in quadrature::triangle_points(sc.tri) {
                    self.basis.eval_into(x, &mut vals)?;
                    for (f, v) in fe.iter_mut().zip(&vals) {
                        *f += p * w * v;
                    }
                }
            }
        }
        let pts = self.basis.points();
        for &(e, q) in neumann {
            if q == 0.0 {
                continue;
            }
            self.basis.edge_integrals_into(pts[e], pts[(e + 1) % n], rule, &mut vals)?;
            for (f, v) in fe.iter_mut().zip(&vals) {
                *f += q * v;
            }
        }
        Ok(fe)
    }
}
