//! Steady and backward-Euler transient drivers, error norms, probes and
//! Darcy flux recovery.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::assembly::{self, Discretization};
use crate::error::{Error, Result};
use crate::geometry::{self, Point2};
use crate::mesh::{CellLocator, PolyMesh, Tag};
use crate::problem::{HeadField, SeepageProblem};
use crate::shape::{PolygonBasis, ShapeMode};
use crate::sparse::CsrMatrix;

fn start_time(problem: &SeepageProblem) -> f64 {
    problem.time.map_or(0.0, |t| t.t0)
}

/// Steady solution `K H = F` with the prescribed heads at the start time.
pub fn solve_steady(problem: &SeepageProblem) -> Result<HeadField> {
    let disc = Discretization::new(problem)?;
    solve_steady_with(problem, &disc, start_time(problem), None)
}

/// Steady solve reusing precomputed element data, optionally warm started.
pub fn solve_steady_with(problem: &SeepageProblem, disc: &Discretization, t: f64, x0: Option<&[f64]>) -> Result<HeadField> {
    let bc = problem.dirichlet_values(t)?;
    if bc.is_empty() {
        return Err(Error::SingularSystem);
    }
    let k = disc.stiffness(None);
    let (h, _) = assembly::solve_constrained(&k, &disc.load(), &bc, x0, problem.solver)?;
    Ok(HeadField::new(h, t))
}

/// Backward-Euler stepper: `(K + M/Δt) H = F + (M/Δt) H_prev`.
#[derive(Clone, Debug)]
pub struct TransientStepper<'a> {
    problem: &'a SeepageProblem,
    k: CsrMatrix,
    m: CsrMatrix,
    f: Vec<f64>,
}

impl<'a> TransientStepper<'a> {
    pub fn new(problem: &'a SeepageProblem) -> Result<Self> {
        let disc = Discretization::new(problem)?;
        Ok(TransientStepper { problem, k: disc.stiffness(None), m: disc.capacity(), f: disc.load() })
    }

    pub fn step(&self, prev: &HeadField, t_next: f64) -> Result<HeadField> {
        let dt = t_next - prev.t;
        if !(dt > 0.0) {
            return Err(Error::NonPositiveTimeStep { dt });
        }
        if prev.values.len() != self.k.dim() {
            return Err(Error::DimensionMismatch { expected: self.k.dim(), got: prev.values.len() });
        }
        let lhs = self.k.combine(1.0, &self.m, 1.0 / dt)?;
        let mh = self.m.mul_vec(&prev.values);
        let rhs: Vec<f64> = self.f.iter().zip(&mh).map(|(f, m)| f + m / dt).collect();
        let bc = self.problem.dirichlet_values(t_next)?;
        if bc.is_empty() && self.m.nnz() == 0 {
            return Err(Error::SingularSystem);
        }
        let (h, _) = assembly::solve_constrained(&lhs, &rhs, &bc, Some(&prev.values), self.problem.solver)?;
        Ok(HeadField::new(h, t_next))
    }
}

/// One backward-Euler step from `prev` to `t_next`.
pub fn step_transient(problem: &SeepageProblem, prev: &HeadField, t_next: f64) -> Result<HeadField> {
    TransientStepper::new(problem)?.step(prev, t_next)
}

/// Snapshots and probe time series of a transient run.
#[derive(Clone, Debug)]
pub struct TransientResult {
    pub history: Vec<HeadField>,
    pub probes: Vec<Point2>,
    /// `probe_values[n][j]`: probe `j` at snapshot `n`.
    pub probe_values: Vec<Vec<f64>>,
}

impl TransientResult {
    /// CSV `t,probe_0,probe_1,…` at full precision.
    pub fn probe_csv(&self) -> String {
        let mut s = String::from("t");
        for j in 0..self.probes.len() {
            let _ = write!(s, ",probe_{j}");
        }
        s.push('\n');
        for (h, vals) in self.history.iter().zip(&self.probe_values) {
            let _ = write!(s, "{:?}", h.t);
            for v in vals {
                let _ = write!(s, ",{v:?}");
            }
            s.push('\n');
        }
        s
    }
}

/// Runs the configured time grid. Without `h0` the initial field is the
/// steady solution of the boundary data at the start time.
pub fn run_transient(problem: &SeepageProblem, h0: Option<HeadField>, probes: &[Point2]) -> Result<TransientResult> {
    let grid = problem.time.ok_or_else(|| Error::Validation(vec!["transient run needs a time grid".into()]))?;
    if !(grid.dt > 0.0) {
        return Err(Error::NonPositiveTimeStep { dt: grid.dt });
    }
    let sampler = ProbeSampler::new(&problem.mesh, probes, problem.shape_mode)?;
    let stepper = TransientStepper::new(problem)?;
    let mut cur = match h0 {
        Some(h) => h,
        None => solve_steady(problem)?,
    };
    cur.t = grid.t0;
    let mut probe_values = vec![sampler.sample(&cur.values)];
    let mut history = vec![cur.clone()];
    for n in 1..=grid.n_steps {
        let t = grid.t0 + n as f64 * grid.dt;
        cur = stepper.step(&cur, t)?;
        probe_values.push(sampler.sample(&cur.values));
        history.push(cur.clone());
    }
    Ok(TransientResult { history, probes: probes.to_vec(), probe_values })
}

/// Interpolates nodal fields at fixed points with the element shape
/// functions of the containing cell (lowest cell id on shared edges).
#[derive(Clone, Debug)]
pub struct ProbeSampler {
    stencils: Vec<(Vec<usize>, Vec<f64>)>,
}

impl ProbeSampler {
    pub fn new(mesh: &PolyMesh, probes: &[Point2], mode: ShapeMode) -> Result<Self> {
        let loc = CellLocator::new(mesh);
        let stencils = probes
            .iter()
            .map(|&p| interpolation_stencil(mesh, &loc, p, mode).ok_or(Error::ProbeOutsideDomain { x: p.x, y: p.y }))
            .collect::<Result<_>>()?;
        Ok(ProbeSampler { stencils })
    }

    pub fn sample(&self, h: &[f64]) -> Vec<f64> {
        self.stencils.iter().map(|(ids, w)| ids.iter().zip(w).map(|(&i, w)| h[i] * w).sum()).collect()
    }
}

/// Node ids and weights interpolating a nodal field at `p`. Points that
/// round-off puts just outside their cell are projected onto its nearest
/// edge.
pub fn interpolation_stencil(mesh: &PolyMesh, loc: &CellLocator, p: Point2, mode: ShapeMode) -> Option<(Vec<usize>, Vec<f64>)> {
    let c = loc.locate(mesh, p)?;
    let pts = mesh.cell_points(c);
    let ids = mesh.cells()[c].vertices.clone();
    if let Ok(w) = PolygonBasis::new(pts.clone(), mode).and_then(|b| b.eval(p)) {
        return Some((ids, w.values));
    }
    let n = pts.len();
    let (e, t) = (0..n)
        .map(|i| (i, geometry::point_segment_distance(p, pts[i], pts[(i + 1) % n])))
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .map(|(i, (_, t))| (i, t))?;
    let mut w = vec![0.0; n];
    w[e] = 1.0 - t;
    w[(e + 1) % n] = t;
    Some((ids, w))
}

/// Field values at arbitrary points of the mesh.
pub fn probe(mesh: &PolyMesh, h: &[f64], points: &[Point2]) -> Result<Vec<f64>> {
    Ok(ProbeSampler::new(mesh, points, ShapeMode::Auto)?.sample(h))
}

/// `‖H_num − H_ref‖₂ / ‖H_ref‖₂` over all nodes.
pub fn relative_error_l2(num: &HeadField, reference: &HeadField) -> Result<f64> {
    relative_error_values(&num.values, &reference.values)
}

/// `‖a − b‖₂ / ‖b‖₂` for any paired values, e.g. monitoring points.
pub fn relative_error_values(num: &[f64], reference: &[f64]) -> Result<f64> {
    if num.len() != reference.len() {
        return Err(Error::DimensionMismatch { expected: reference.len(), got: num.len() });
    }
    let den: f64 = reference.iter().map(|v| v * v).sum::<f64>().sqrt();
    if den == 0.0 {
        return Err(Error::ZeroReference);
    }
    let num: f64 = num.iter().zip(reference).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    Ok(num / den)
}

/// Mean of pointwise relative errors `|a_i − b_i| / |b_i|`.
pub fn mean_relative_error(num: &[f64], reference: &[f64]) -> Result<f64> {
    if num.len() != reference.len() {
        return Err(Error::DimensionMismatch { expected: reference.len(), got: num.len() });
    }
    if reference.is_empty() || reference.iter().any(|&r| r == 0.0) {
        return Err(Error::ZeroReference);
    }
    Ok(num.iter().zip(reference).map(|(a, b)| ((a - b) / b).abs()).sum::<f64>() / num.len() as f64)
}

/// Darcy velocity per smoothing cell and net outflow per boundary tag.
#[derive(Clone, Debug)]
pub struct FluxField {
    /// `cells[e][c]`: velocity in subcell `c` of element `e`.
    pub cells: Vec<Vec<Point2>>,
    /// Area-weighted mean velocity magnitude per element.
    pub element_magnitude: Vec<f64>,
    /// Volumetric outflow per unit thickness through each tag (negative
    /// for inflow).
    pub boundary: BTreeMap<Tag, f64>,
}

/// Recovers `v = −k B̃ h` on every smoothing cell. Boundary fluxes are the
/// negated consistent nodal reactions `F − K H` at prescribed nodes, so the
/// balance exact up to the solver tolerance; flux through Neumann tags is
/// the prescribed data.
pub fn darcy_flux(problem: &SeepageProblem, h: &HeadField) -> Result<FluxField> {
    let disc = Discretization::new(problem)?;
    darcy_flux_with(problem, &disc, h, None)
}

/// As [`darcy_flux`] with precomputed element data and optional per-element
/// conductivity multipliers.
pub fn darcy_flux_with(problem: &SeepageProblem, disc: &Discretization, h: &HeadField, scale: Option<&[f64]>) -> Result<FluxField> {
    let mesh = &problem.mesh;
    if h.values.len() != mesh.num_nodes() {
        return Err(Error::DimensionMismatch { expected: mesh.num_nodes(), got: h.values.len() });
    }
    let mut cells = Vec::with_capacity(mesh.num_cells());
    let mut element_magnitude = Vec::with_capacity(mesh.num_cells());
    for (e, el) in disc.elements.iter().enumerate() {
        let cell = &mesh.cells()[e];
        let mat = problem.materials.get(&cell.region).ok_or(Error::MissingMaterial { region: cell.region })?;
        let k = mat.k.scaled(scale.map_or(1.0, |s| s[e]));
        let he: Vec<f64> = cell.vertices.iter().map(|&i| h.values[i]).collect();
        let vs: Vec<Point2> = el.ops.iter().map(|op| k.apply(op.apply(&he)) * -1.0).collect();
        let area: f64 = el.cells.iter().map(|c| c.area).sum();
        let mag = el.cells.iter().zip(&vs).map(|(c, v)| c.area * v.norm()).sum::<f64>() / area;
        cells.push(vs);
        element_magnitude.push(mag);
    }

    let kmat = disc.stiffness(scale);
    let kh = kmat.mul_vec(&h.values);
    let f = disc.load();
    let bc = problem.dirichlet_values(h.t)?;
    let mut boundary: BTreeMap<Tag, f64> = BTreeMap::new();
    for e in mesh.boundary_edges() {
        boundary.entry(e.tag.clone()).or_insert(0.0);
    }
    // each prescribed node reports to the first head spec that covers it
    let mut owner: BTreeMap<usize, &Tag> = BTreeMap::new();
    for (tag, _) in &problem.dirichlet {
        for i in mesh.tagged_nodes(tag.as_str()) {
            owner.entry(i).or_insert(tag);
        }
    }
    for &i in bc.keys() {
        if let Some(t) = owner.get(&i) {
            *boundary.get_mut(*t).expect("tag registered") += f[i] - kh[i];
        }
    }
    for (tag, q) in &problem.neumann {
        let len: f64 = mesh
            .boundary_edges()
            .iter()
            .filter(|e| e.tag == *tag)
            .map(|e| mesh.vertices()[e.a].dist(mesh.vertices()[e.b]))
            .sum();
        *boundary.entry(tag.clone()).or_insert(0.0) -= q * len;
    }
    Ok(FluxField { cells, element_magnitude, boundary })
}
