//! Unconfined seepage on a fixed mesh: the wetted region is tracked by
//! switching element conductivity between `k` (wet) and `αk` (dry), the
//! seepage face is an active set of atmospheric nodes, and the iteration
//! stops once the overflow point settles. An optional outer loop refines a
//! quadtree mesh around the phreatic line.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::assembly::{self, Discretization};
use crate::error::{Error, Result};
use crate::geometry::{self, Point2};
use crate::mesh::{CellLocator, PolyMesh, Tag};
use crate::problem::{HeadField, SeepageProblem};
use crate::quadtree::Quadtree;
use crate::seepage::interpolation_stencil;
use crate::shape::{PolygonBasis, ShapeMode};
use crate::smoothing::{Conductivity, ElementSmoothing};

/// Default refinement band as a multiple of the element size.
pub const DEFAULT_BAND_FACTOR: f64 = 0.5;

/// Iteration controls. `None` fields take mesh-dependent defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FreeSurfaceConfig {
    /// Dry-element conductivity multiplier.
    pub alpha: f64,
    /// Overflow-point tolerance (m); defaults to 1e-3 × domain height.
    pub eps_x: Option<f64>,
    pub max_inner: usize,
    /// Half-width of the refinement band around `ψ = 0` (m); defaults to
    /// [`DEFAULT_BAND_FACTOR`] times the local element size.
    pub band_width: Option<f64>,
    /// Elements whose gradient exceeds this multiple of the median are
    /// refined as well.
    pub grad_threshold: f64,
    pub max_outer: usize,
    /// Boundary tag of the seepage face.
    pub seepage_tag: String,
}

impl Default for FreeSurfaceConfig {
    fn default() -> Self {
        FreeSurfaceConfig {
            alpha: 1e-3,
            eps_x: None,
            max_inner: 100,
            band_width: None,
            grad_threshold: 3.0,
            max_outer: 5,
            seepage_tag: "G4".into(),
        }
    }
}

impl FreeSurfaceConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            errs.push(format!("alpha must lie in (0, 1) (got {})", self.alpha));
        }
        if let Some(e) = self.eps_x {
            if !(e > 0.0) {
                errs.push(format!("eps_x must be positive (got {e})"));
            }
        }
        if let Some(b) = self.band_width {
            if !(b >= 0.0) {
                errs.push(format!("band_width must be non-negative (got {b})"));
            }
        }
        if !(self.grad_threshold >= 0.0) {
            errs.push(format!("grad_threshold must be non-negative (got {})", self.grad_threshold));
        }
        if self.max_inner == 0 {
            errs.push("max_inner must be at least 1".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn eps_for(&self, mesh: &PolyMesh) -> f64 {
        self.eps_x.unwrap_or_else(|| {
            let (lo, hi) = geometry::bbox(mesh.vertices());
            1e-3 * (hi.y - lo.y)
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FreeSurfaceState {
    pub wet: Vec<bool>,
    pub k_mult: Vec<f64>,
    /// Seepage-face nodes currently held at `h = y`.
    pub seepage_active: BTreeSet<usize>,
    /// Overflow coordinate: elevation on a vertical face, arc length from
    /// the lower face end otherwise.
    pub x_o: f64,
    pub exit: Point2,
    pub iter: usize,
    pub converged: bool,
    /// `|x_o|` change of the last iteration.
    pub last_increment: f64,
    /// Times a repeated wet/dry state froze oscillating elements.
    pub oscillation_guards: usize,
}

/// One line of the iteration log.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub x_o: f64,
    pub wet_count: usize,
    pub active_seepage_nodes: usize,
    pub solver_iterations: usize,
}

#[derive(Clone, Debug)]
pub struct FreeSurfaceResult {
    pub head: HeadField,
    pub state: FreeSurfaceState,
    /// Phreatic line `ψ = 0`, ordered by x.
    pub surface: Vec<Point2>,
    pub log: Vec<IterationRecord>,
    /// Assembly and solve time (s).
    pub wall_time: f64,
}

impl FreeSurfaceResult {
    pub fn log_csv(&self) -> String {
        let mut s = String::from("iter,x_o,wet_count,active_seepage_nodes\n");
        for r in &self.log {
            let _ = writeln!(s, "{},{:?},{},{}", r.iter, r.x_o, r.wet_count, r.active_seepage_nodes);
        }
        s
    }

    pub fn surface_csv(&self) -> String {
        polyline_csv(&self.surface)
    }

    pub fn pressure_head(&self, mesh: &PolyMesh) -> Vec<f64> {
        pressure_head(mesh, &self.head.values)
    }
}

pub fn polyline_csv(pts: &[Point2]) -> String {
    let mut s = String::from("x,y\n");
    for p in pts {
        let _ = writeln!(s, "{:?},{:?}", p.x, p.y);
    }
    s
}

/// `ψ_i = h_i − y_i`.
pub fn pressure_head(mesh: &PolyMesh, h: &[f64]) -> Vec<f64> {
    h.iter().zip(mesh.vertices()).map(|(h, p)| h - p.y).collect()
}

/// Shape-function stencils at element centroids, reused every iteration.
#[derive(Clone, Debug)]
struct CentroidStencils {
    weights: Vec<Vec<f64>>,
}

impl CentroidStencils {
    fn new(mesh: &PolyMesh, mode: ShapeMode) -> Result<Self> {
        let weights = (0..mesh.num_cells())
            .map(|c| {
                let pts = mesh.cell_points(c);
                let centroid = geometry::area_centroid(&pts).1;
                Ok(PolygonBasis::new(pts, mode)?.eval(centroid)?.values)
            })
            .collect::<Result<_>>()?;
        Ok(CentroidStencils { weights })
    }

    fn values(&self, mesh: &PolyMesh, nodal: &[f64]) -> Vec<f64> {
        mesh.cells()
            .iter()
            .zip(&self.weights)
            .map(|(c, w)| c.vertices.iter().zip(w).map(|(&i, w)| w * nodal[i]).sum())
            .collect()
    }
}

/// Wet flags (centroid `ψ ≥ 0`) and nodal pressure head.
pub fn classify_wet_dry(mesh: &PolyMesh, h: &HeadField, mode: ShapeMode) -> Result<(Vec<bool>, Vec<f64>)> {
    if h.values.len() != mesh.num_nodes() {
        return Err(Error::DimensionMismatch { expected: mesh.num_nodes(), got: h.values.len() });
    }
    let psi = pressure_head(mesh, &h.values);
    let wet = CentroidStencils::new(mesh, mode)?.values(mesh, &psi).iter().map(|&p| p >= 0.0).collect();
    Ok((wet, psi))
}

/// Conductivity multipliers: 1 for wet elements, `α` for dry ones.
pub fn k_multipliers(wet: &[bool], alpha: f64) -> Vec<f64> {
    wet.iter().map(|&w| if w { 1.0 } else { alpha }).collect()
}

/// Effective per-element conductivity.
pub fn permeability_field(wet: &[bool], base: &[Conductivity], alpha: f64) -> Vec<Conductivity> {
    wet.iter().zip(base).map(|(&w, k)| if w { *k } else { k.scaled(alpha) }).collect()
}

/// Ordered chain of seepage-face nodes from the lower end upwards.
#[derive(Clone, Debug)]
pub struct SeepageFace {
    pub tag: Tag,
    pub nodes: Vec<usize>,
    /// Arc length of every node from the lower end.
    pub arc: Vec<f64>,
    pub vertical: bool,
    /// Nodes not already fixed by another head condition.
    free: Vec<bool>,
}

/// Active set and crossing found on a seepage face.
#[derive(Clone, Debug, PartialEq)]
pub struct SeepageUpdate {
    /// Face nodes below the crossing, lowest first.
    pub active: Vec<usize>,
    /// `h = y` on the active nodes.
    pub bc: BTreeMap<usize, f64>,
    /// Arc coordinate of the `ψ = 0` crossing.
    pub crossing_arc: f64,
    pub exit: Point2,
    /// False when the face is uniformly wet or dry and the endpoint is
    /// reported instead of a crossing.
    pub crossed: bool,
}

impl SeepageFace {
    pub fn new(problem: &SeepageProblem, tag: &str) -> Result<Self> {
        let mesh = &problem.mesh;
        let verts = mesh.vertices();
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for e in mesh.boundary_edges().iter().filter(|e| e.tag.as_str() == tag) {
            adj.entry(e.a).or_default().push(e.b);
            adj.entry(e.b).or_default().push(e.a);
        }
        if adj.is_empty() {
            return Err(Error::MissingSeepageFace { tag: tag.into() });
        }
        let not_chain = || Error::Validation(vec![format!("seepage face '{tag}' is not a simple open chain")]);
        let ends: Vec<usize> = adj.iter().filter(|(_, n)| n.len() == 1).map(|(&v, _)| v).collect();
        if ends.len() != 2 || adj.values().any(|n| n.len() > 2) {
            return Err(not_chain());
        }
        let lower = |a: usize, b: usize| {
            let (p, q) = (verts[a], verts[b]);
            if (p.y, p.x) <= (q.y, q.x) {
                a
            } else {
                b
            }
        };
        let start = lower(ends[0], ends[1]);
        let mut nodes = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while let Some(&next) = adj[&cur].iter().find(|&&n| n != prev) {
            prev = cur;
            cur = next;
            nodes.push(cur);
            if nodes.len() > adj.len() {
                return Err(not_chain());
            }
        }
        if nodes.len() != adj.len() {
            return Err(not_chain());
        }
        let mut arc = vec![0.0];
        for w in nodes.windows(2) {
            arc.push(arc.last().unwrap() + verts[w[0]].dist(verts[w[1]]));
        }
        let (lo, hi) = geometry::bbox(&nodes.iter().map(|&i| verts[i]).collect::<Vec<_>>());
        let vertical = hi.x - lo.x <= 1e-9 * (hi.y - lo.y).max(f64::MIN_POSITIVE);

        let fixed = problem.dirichlet_values(problem.time.map_or(0.0, |t| t.t0))?;
        let free = nodes.iter().map(|i| !fixed.contains_key(i)).collect();
        Ok(SeepageFace { tag: Tag::from(tag), nodes, arc, vertical, free })
    }

    /// Contact-type update used by the iteration. `indicator` holds, per
    /// face node, the nodal outflow for currently active nodes and `ψ` for
    /// the others; the face stays active up to the first negative entry and
    /// the exit point is the highest active node.
    pub fn update_active(&self, mesh: &PolyMesh, indicator: &[f64]) -> SeepageUpdate {
        let verts = mesh.vertices();
        let n = self.nodes.len();
        let j = indicator.iter().position(|&v| v < 0.0).unwrap_or(n);
        let top = j.saturating_sub(1);
        let active: Vec<usize> = (0..j).filter(|&k| self.free[k]).map(|k| self.nodes[k]).collect();
        let bc = active.iter().map(|&i| (i, verts[i].y)).collect();
        SeepageUpdate { active, bc, crossing_arc: self.arc[top], exit: verts[self.nodes[top]], crossed: j > 0 && j < n }
    }

    /// Active set below the first sign change of `psi` (one value per
    /// face node, lowest first).
    pub fn update(&self, mesh: &PolyMesh, psi: &[f64]) -> SeepageUpdate {
        let verts = mesh.vertices();
        let n = self.nodes.len();
        let first_neg = psi.iter().position(|&v| v < 0.0);
        let (crossing_arc, exit, crossed, n_below) = match first_neg {
            None => (self.arc[n - 1], verts[self.nodes[n - 1]], false, n),
            Some(0) => (0.0, verts[self.nodes[0]], false, 0),
            Some(j) => {
                let (a, b) = (psi[j - 1], psi[j]);
                let t = a / (a - b);
                let s = self.arc[j - 1] + t * (self.arc[j] - self.arc[j - 1]);
                (s, verts[self.nodes[j - 1]].lerp(verts[self.nodes[j]], t), true, j)
            }
        };
        let active: Vec<usize> = (0..n_below).filter(|&k| self.free[k]).map(|k| self.nodes[k]).collect();
        let bc = active.iter().map(|&i| (i, verts[i].y)).collect();
        SeepageUpdate { active, bc, crossing_arc, exit, crossed }
    }

    /// Overflow coordinate of an update: elevation on vertical faces, arc
    /// coordinate otherwise.
    pub fn coordinate(&self, u: &SeepageUpdate) -> f64 {
        if self.vertical {
            u.exit.y
        } else {
            u.crossing_arc
        }
    }
}

/// Active set of a seepage face from nodal pressure heads.
pub fn update_seepage_face(problem: &SeepageProblem, psi: &[f64], tag: &str) -> Result<SeepageUpdate> {
    let face = SeepageFace::new(problem, tag)?;
    let vals: Vec<f64> = face.nodes.iter().map(|&i| psi[i]).collect();
    Ok(face.update(&problem.mesh, &vals))
}

/// Overflow coordinate of the nodal `ψ = 0` crossing on a face, with the
/// flag false when no sign change exists.
pub fn overflow_point(problem: &SeepageProblem, psi: &[f64], tag: &str) -> Result<(f64, bool)> {
    let face = SeepageFace::new(problem, tag)?;
    let vals: Vec<f64> = face.nodes.iter().map(|&i| psi[i]).collect();
    let u = face.update(&problem.mesh, &vals);
    Ok((face.coordinate(&u), u.crossed))
}

/// `ψ = 0` points on element edges, deduplicated and sorted by x. Zero
/// counts as wet, so an atmospheric node next to a dry one is a crossing.
pub fn extract_free_surface(mesh: &PolyMesh, psi: &[f64]) -> Vec<Point2> {
    let verts = mesh.vertices();
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut pts = Vec::new();
    for c in mesh.cells() {
        let n = c.vertices.len();
        for k in 0..n {
            let (a, b) = (c.vertices[k], c.vertices[(k + 1) % n]);
            if !seen.insert((a.min(b), a.max(b))) {
                continue;
            }
            let (pa, pb) = (psi[a], psi[b]);
            if (pa >= 0.0) != (pb >= 0.0) {
                let t = pa / (pa - pb);
                pts.push(verts[a].lerp(verts[b], t));
            }
        }
    }
    let (lo, hi) = geometry::bbox(verts);
    let tol = 1e-10 * (hi.x - lo.x).max(hi.y - lo.y);
    pts.sort_by(|p, q| p.x.total_cmp(&q.x).then(q.y.total_cmp(&p.y)));
    pts.dedup_by(|p, q| p.dist(*q) <= tol);
    pts
}

/// Area-averaged smoothed head gradient of every element.
pub fn element_gradients(mesh: &PolyMesh, elements: &[ElementSmoothing], h: &[f64]) -> Vec<Point2> {
    elements
        .iter()
        .zip(mesh.cells())
        .map(|(el, c)| {
            let he: Vec<f64> = c.vertices.iter().map(|&i| h[i]).collect();
            let area: f64 = el.cells.iter().map(|s| s.area).sum();
            el.cells.iter().zip(&el.ops).fold(Point2::default(), |g, (s, op)| g + op.apply(&he) * (s.area / area))
        })
        .collect()
}

/// Elements to refine: nodal `ψ` changes sign, centroid `|ψ|` lies inside
/// the band, or the gradient is at least `grad_threshold` times the
/// median. `band_width = None` scales with the element size.
pub fn mark_band(
    mesh: &PolyMesh,
    elements: &[ElementSmoothing],
    h: &[f64],
    band_width: Option<f64>,
    grad_threshold: f64,
    mode: ShapeMode,
) -> Result<Vec<usize>> {
    let psi = pressure_head(mesh, h);
    let psi_c = CentroidStencils::new(mesh, mode)?.values(mesh, &psi);
    let grads: Vec<f64> = element_gradients(mesh, elements, h).iter().map(|g| g.norm()).collect();
    let mut sorted = grads.clone();
    sorted.sort_by(f64::total_cmp);
    let median = if sorted.is_empty() { 0.0 } else { sorted[sorted.len() / 2] };
    // round-off gradients of a flat field never count as large
    let (lo, hi) = geometry::bbox(mesh.vertices());
    let hmax = h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-10 * hmax / (hi.x - lo.x).max(hi.y - lo.y);
    let steep = |g: f64| grad_threshold == 0.0 || (g > floor && g >= grad_threshold * median);
    Ok((0..mesh.num_cells())
        .filter(|&c| {
            let vs = &mesh.cells()[c].vertices;
            let wet = vs.iter().filter(|&&i| psi[i] >= 0.0).count();
            let band = band_width.unwrap_or_else(|| DEFAULT_BAND_FACTOR * mesh.polygon_area_centroid(c).0.sqrt());
            (wet > 0 && wet < vs.len()) || psi_c[c].abs() < band || steep(grads[c])
        })
        .collect())
}

/// Interpolates a head field onto a mesh that refines the old one.
pub fn transfer_solution(h_old: &HeadField, mesh_old: &PolyMesh, mesh_new: &PolyMesh, mode: ShapeMode) -> Result<HeadField> {
    if h_old.values.len() != mesh_old.num_nodes() {
        return Err(Error::DimensionMismatch { expected: mesh_old.num_nodes(), got: h_old.values.len() });
    }
    let loc = CellLocator::new(mesh_old);
    let values = mesh_new
        .vertices()
        .iter()
        .map(|&p| {
            let (ids, w) =
                interpolation_stencil(mesh_old, &loc, p, mode).ok_or(Error::NodeOutsideOldMesh { x: p.x, y: p.y })?;
            Ok(ids.iter().zip(&w).map(|(&i, w)| w * h_old.values[i]).sum())
        })
        .collect::<Result<_>>()?;
    Ok(HeadField::new(values, h_old.t))
}

/// Period of the most recent earlier occurrence of `state` in `history`.
fn repeat_period<T: PartialEq>(history: &[T], state: &T) -> Option<usize> {
    history.iter().rev().position(|s| s == state).map(|p| p + 1)
}

/// Fixed-mesh iteration starting from a saturated domain and an
/// impermeable seepage face.
pub fn run_fixed_mesh(problem: &SeepageProblem, cfg: &FreeSurfaceConfig) -> Result<FreeSurfaceResult> {
    let disc = Discretization::new(problem)?;
    run_fixed_mesh_from(problem, &disc, cfg, None)
}

fn run_fixed_mesh_from(
    problem: &SeepageProblem,
    disc: &Discretization,
    cfg: &FreeSurfaceConfig,
    start: Option<&HeadField>,
) -> Result<FreeSurfaceResult> {
    cfg.validate()?;
    let mesh = &problem.mesh;
    let t0 = problem.time.map_or(0.0, |t| t.t0);
    let base = problem.dirichlet_values(t0)?;
    if base.is_empty() {
        return Err(Error::SingularSystem);
    }
    let face = SeepageFace::new(problem, &cfg.seepage_tag)?;
    let stencils = CentroidStencils::new(mesh, problem.shape_mode)?;
    let eps = cfg.eps_for(mesh);
    let f = disc.load();
    let mut wall = 0.0;

    let (mut wet, mut update, mut h) = match start {
        Some(h0) => {
            let psi = pressure_head(mesh, &h0.values);
            let wet = stencils.values(mesh, &psi).iter().map(|&p| p >= 0.0).collect();
            let face_psi: Vec<f64> = face.nodes.iter().map(|&i| psi[i]).collect();
            (wet, face.update_active(mesh, &face_psi), Some(h0.values.clone()))
        }
        None => (vec![true; mesh.num_cells()], face.update_active(mesh, &[-1.0]), None),
    };
    // elements caught in a wet/dry limit cycle, held wet from then on
    let mut frozen = vec![false; mesh.num_cells()];
    let mut history: Vec<(Vec<bool>, Vec<usize>)> = vec![(wet.clone(), update.active.clone())];
    let mut xs: Vec<f64> = Vec::new();
    let mut log = Vec::new();
    let mut guards = 0;
    let mut converged = false;
    let mut last_increment = f64::INFINITY;

    let mut it = 0;
    while it < cfg.max_inner {
        it += 1;
        let clock = Instant::now();
        let k_mult = k_multipliers(&wet, cfg.alpha);
        let mut bc = base.clone();
        bc.extend(update.bc.iter().map(|(&i, &v)| (i, v)));
        let k = disc.stiffness(Some(&k_mult));
        let (sol, stats) = assembly::solve_constrained(&k, &f, &bc, h.as_deref(), problem.solver)?;
        let kh = k.mul_vec(&sol);
        wall += clock.elapsed().as_secs_f64();

        let psi = pressure_head(mesh, &sol);
        let mut new_wet: Vec<bool> = stencils.values(mesh, &psi).iter().map(|&p| p >= 0.0).collect();
        for (w, &fz) in new_wet.iter_mut().zip(&frozen) {
            *w |= fz;
        }
        let outflow: Vec<f64> = face.nodes.iter().map(|&i| f[i] - kh[i]).collect();
        let scale = outflow.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let indicator: Vec<f64> = face
            .nodes
            .iter()
            .zip(&outflow)
            .map(|(i, &q)| if update.bc.contains_key(i) { q + 1e-10 * scale } else { psi[*i] })
            .collect();
        let new_update = face.update_active(mesh, &indicator);
        let x = face.coordinate(&new_update);
        if let Some(&prev) = xs.last() {
            last_increment = (x - prev).abs();
        }
        xs.push(x);
        let settled = new_wet == wet && new_update.active == update.active;
        wet = new_wet;
        update = new_update;
        h = Some(sol);
        log.push(IterationRecord {
            iter: it,
            x_o: x,
            wet_count: wet.iter().filter(|&&w| w).count(),
            active_seepage_nodes: update.active.len(),
            solver_iterations: stats.iterations,
        });
        if xs.len() >= 2 && last_increment < eps && settled {
            converged = true;
            break;
        }
        let state = (wet.clone(), update.active.clone());
        if let Some(p) = repeat_period(&history, &state) {
            let window = &history[history.len() - p..];
            let mut n = 0;
            for e in 0..wet.len() {
                if !frozen[e] && window.iter().any(|(w, _)| w[e] != wet[e]) {
                    frozen[e] = true;
                    wet[e] = true;
                    n += 1;
                }
            }
            if n > 0 {
                guards += 1;
            }
        }
        history.push((wet.clone(), update.active.clone()));
    }

    let h = HeadField::new(h.expect("at least one iteration"), t0);
    let psi = pressure_head(mesh, &h.values);
    let surface = extract_free_surface(mesh, &psi);
    let state = FreeSurfaceState {
        k_mult: k_multipliers(&wet, cfg.alpha),
        wet,
        seepage_active: update.active.iter().copied().collect(),
        x_o: *xs.last().unwrap(),
        exit: update.exit,
        iter: it,
        converged,
        last_increment,
        oscillation_guards: guards,
    };
    Ok(FreeSurfaceResult { head: h, state, surface, log, wall_time: wall })
}

/// Size and outcome of one adaptive cycle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleStats {
    pub cycle: usize,
    pub elements: usize,
    pub dofs: usize,
    pub inner_iterations: usize,
    pub x_o: f64,
    pub converged: bool,
    /// Assembly and solve time (s).
    pub wall_time: f64,
}

#[derive(Clone, Debug)]
pub struct AdaptiveResult {
    pub tree: Quadtree,
    pub problem: SeepageProblem,
    pub result: FreeSurfaceResult,
    pub cycles: Vec<CycleStats>,
}

impl AdaptiveResult {
    pub fn cycles_csv(&self) -> String {
        cycles_csv(&self.cycles)
    }
}

/// Per-cycle table without timings, so that it is reproducible.
pub fn cycles_csv(cycles: &[CycleStats]) -> String {
    let mut s = String::from("cycle,elements,dofs,inner_iterations,x_o,converged\n");
    for c in cycles {
        let _ = writeln!(s, "{},{},{},{},{:?},{}", c.cycle, c.elements, c.dofs, c.inner_iterations, c.x_o, c.converged);
    }
    s
}

/// Free-surface iteration with band refinement of the quadtree that
/// produced `problem.mesh`. Each cycle refines the marked leaves once,
/// transfers the converged head and iterates again from it.
pub fn run_adaptive(problem: &SeepageProblem, tree: &Quadtree, cfg: &FreeSurfaceConfig) -> Result<AdaptiveResult> {
    cfg.validate()?;
    let mut qm = tree.to_mesh()?;
    if qm.mesh != problem.mesh {
        return Err(Error::NotQuadtreeBacked);
    }
    let mut tree = tree.clone();
    let mut problem = problem.clone();
    let mut disc = Discretization::new(&problem)?;
    let mut result = run_fixed_mesh_from(&problem, &disc, cfg, None)?;
    let stats = |cycle: usize, p: &SeepageProblem, r: &FreeSurfaceResult| CycleStats {
        cycle,
        elements: p.mesh.num_cells(),
        dofs: p.mesh.num_nodes(),
        inner_iterations: r.state.iter,
        x_o: r.state.x_o,
        converged: r.state.converged,
        wall_time: r.wall_time,
    };
    let mut cycles = vec![stats(0, &problem, &result)];
    let mut quiet = 0;

    for cycle in 1..=cfg.max_outer {
        let marked = mark_band(
            &problem.mesh,
            &disc.elements,
            &result.head.values,
            cfg.band_width,
            cfg.grad_threshold,
            problem.shape_mode,
        )?;
        if marked.is_empty() {
            break;
        }
        let before = tree.leaves().len();
        let (refined, _) = tree.refine_cells(&qm.leaves_of(&marked));
        if refined.leaves().len() == before {
            break;
        }
        let new_qm = refined.to_mesh()?;
        let h0 = transfer_solution(&result.head, &problem.mesh, &new_qm.mesh, problem.shape_mode)?;
        let mut next = problem.clone();
        next.mesh = new_qm.mesh.clone();
        let new_disc = Discretization::new(&next)?;
        let new_result = run_fixed_mesh_from(&next, &new_disc, cfg, Some(&h0))?;
        let prev_x = result.state.x_o;
        tree = refined;
        qm = new_qm;
        problem = next;
        disc = new_disc;
        result = new_result;
        cycles.push(stats(cycle, &problem, &result));
        // the exit point moves in steps of the face spacing, so one quiet
        // cycle can be a coincidence; two in a row are not
        if (result.state.x_o - prev_x).abs() < cfg.eps_for(&problem.mesh) {
            quiet += 1;
            if quiet == 2 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Ok(AdaptiveResult { tree, problem, result, cycles })
}
