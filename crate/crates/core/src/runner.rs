//! Configuration-driven runs: builds the mesh and problem, executes the
//! matching driver and writes the artifacts.
//!
//! Exit codes used by the command-line front end:
//!
//! | code | meaning                                        |
//! |------|------------------------------------------------|
//! | 0    | success                                        |
//! | 2    | usage error (bad command line)                 |
//! | 3    | configuration or input file syntax error       |
//! | 4    | invalid configuration or problem definition    |
//! | 5    | mesh generation or mesh file error             |
//! | 6    | linear solver failure                          |
//! | 7    | free-surface iteration did not converge        |
//! | 8    | I/O error                                      |

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::assembly::{self, Discretization};
use crate::benchmarks::{foundation, patch, rect_dam, trapezoid_dam};
use crate::config::{read_domain_file, Benchmark, MeshSpec, ProblemKind, RunConfig};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::free_surface::{self, CycleStats, FreeSurfaceResult};
use crate::mesh::{PolyMesh, Tag};
use crate::problem::{HeadField, SeepageProblem};
use crate::quadtree::{generate_quadtree, Quadtree};
use crate::seepage::{self, FluxField, ProbeSampler};
use crate::voronoi::{voronoi_mesh, VoronoiOptions};
use crate::vtk;

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const PARSE: i32 = 3;
    pub const VALIDATION: i32 = 4;
    pub const MESH: i32 = 5;
    pub const SOLVER: i32 = 6;
    pub const NOT_CONVERGED: i32 = 7;
    pub const IO: i32 = 8;
}

pub fn exit_code(e: &Error) -> i32 {
    use Error::*;
    match e {
        Parse { .. } => exit::PARSE,
        Io(_) => exit::IO,
        NotConverged { .. } | NonSpdDetected | DimensionMismatch { .. } => exit::SOLVER,
        IndexOutOfRange { .. }
        | SelfIntersecting { .. }
        | DegenerateCell { .. }
        | DanglingVertex { .. }
        | NonManifoldEdge { .. }
        | NotABoundaryEdge { .. }
        | NonFiniteVertex { .. }
        | EmptyDomain
        | ClipFailure { .. }
        | MeshFormat { .. }
        | NotStrictlyConvex
        | ReflexPolygon
        | PointOnBoundary
        | OutsidePolygon { .. }
        | SegmentOutside
        | NodeOutsideOldMesh { .. } => exit::MESH,
        _ => exit::VALIDATION,
    }
}

/// A generated mesh, with the tree it came from when quadtree based.
#[derive(Clone, Debug)]
pub struct MeshBuild {
    pub mesh: PolyMesh,
    pub tree: Option<Quadtree>,
}

pub fn build_domain(cfg: &RunConfig) -> Result<Option<Domain>> {
    Ok(match (cfg.benchmark(), &cfg.geometry.file) {
        (Some(Benchmark::Patch), _) => Some(patch::domain()),
        (Some(Benchmark::Foundation), _) => Some(foundation::domain()),
        (Some(Benchmark::RectDam), _) => Some(rect_dam::domain()),
        (Some(Benchmark::TrapezoidDam), _) => Some(trapezoid_dam::domain()),
        (None, Some(f)) => Some(read_domain_file(f)?),
        (None, None) => None,
    })
}

const DEFAULT_MAX_DEPTH: u32 = 12;

pub fn build_mesh(cfg: &RunConfig) -> Result<MeshBuild> {
    let bench = cfg.benchmark();
    let domain = build_domain(cfg)?;
    let need_domain = || domain.clone().ok_or_else(|| Error::Validation(vec!["geometry is required for this mesh type".into()]));
    let from_tree = |tree: Quadtree| -> Result<MeshBuild> { Ok(MeshBuild { mesh: tree.to_mesh()?.mesh, tree: Some(tree) }) };
    match &cfg.mesh {
        MeshSpec::File { path } => {
            Ok(MeshBuild { mesh: PolyMesh::from_text(&std::fs::read_to_string(path)?)?, tree: None })
        }
        MeshSpec::Voronoi { size, lloyd_iters } => {
            let (def_size, def_lloyd) = match bench {
                Some(Benchmark::Patch) => (0.25, 5),
                Some(Benchmark::Foundation) => (5.0, 3),
                _ => (f64::NAN, 3),
            };
            let opts = VoronoiOptions {
                size: size.unwrap_or(def_size),
                seed: cfg.seed,
                lloyd_iters: lloyd_iters.unwrap_or(def_lloyd),
            };
            Ok(MeshBuild { mesh: voronoi_mesh(&need_domain()?, &opts)?, tree: None })
        }
        MeshSpec::GradedVoronoi => {
            let mesh = match bench {
                Some(Benchmark::RectDam) => rect_dam::polygonal_mesh(cfg.seed)?,
                Some(Benchmark::TrapezoidDam) => trapezoid_dam::polygonal_mesh(cfg.seed)?,
                _ => return Err(Error::Validation(vec!["graded_voronoi needs a dam benchmark".into()])),
            };
            Ok(MeshBuild { mesh, tree: None })
        }
        MeshSpec::Quadtree { size, graded, max_depth, .. } => {
            let tree = match (graded, bench, size) {
                (true, Some(Benchmark::Patch), _) => patch::quadtree()?,
                (true, Some(Benchmark::RectDam), _) => rect_dam::quadtree()?,
                (true, Some(Benchmark::TrapezoidDam), _) => trapezoid_dam::quadtree()?,
                (true, ..) => return Err(Error::Validation(vec!["mesh.graded is not available for this geometry".into()])),
                (false, Some(Benchmark::RectDam), None) => rect_dam::coarse_quadtree()?,
                (false, Some(Benchmark::TrapezoidDam), None) => trapezoid_dam::coarse_quadtree()?,
                (false, _, Some(s)) => {
                    let s = *s;
                    generate_quadtree(&need_domain()?, &|_| s, max_depth.unwrap_or(DEFAULT_MAX_DEPTH))?.0.balanced()
                }
                (false, _, None) => return Err(Error::Validation(vec!["mesh.size is required for this geometry".into()])),
            };
            from_tree(tree)
        }
    }
}

pub fn build_problem(cfg: &RunConfig, mesh: PolyMesh) -> Result<SeepageProblem> {
    let mut p = match cfg.benchmark() {
        Some(Benchmark::Patch) => patch::problem(mesh),
        Some(Benchmark::Foundation) => foundation::problem(mesh),
        Some(Benchmark::RectDam) => rect_dam::problem(mesh),
        Some(Benchmark::TrapezoidDam) => trapezoid_dam::problem(mesh),
        None => {
            let mut p = SeepageProblem::new(mesh, crate::problem::Material::isotropic(1.0));
            p.materials.clear();
            p
        }
    };
    if !cfg.materials.is_empty() {
        p.materials = cfg.materials.iter().filter_map(|m| m.material().map(|mat| (m.region, mat))).collect();
    }
    if !cfg.heads.is_empty() {
        p.dirichlet = cfg.head_specs();
    }
    p.neumann.extend(cfg.fluxes.iter().map(|f| (Tag::new(f.tag.clone()), f.q)));
    p.time = cfg.time;
    p.shape_mode = cfg.shape_mode();
    p.edge_points = cfg.solver.edge_points;
    p.solver = cfg.solver.options();
    p.validate()?;
    Ok(p)
}

/// Everything a run computes, before anything is written.
#[derive(Clone, Debug)]
pub struct RunResult {
    /// Problem on the final mesh.
    pub problem: SeepageProblem,
    pub head: HeadField,
    pub wet: Vec<bool>,
    pub k_mult: Vec<f64>,
    pub flux: FluxField,
    pub probe_csv: Option<String>,
    pub free_surface: Option<FreeSurfaceResult>,
    pub cycles: Vec<CycleStats>,
    pub summary: RunSummary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub kind: ProblemKind,
    pub geometry: String,
    pub elements: usize,
    pub dofs: usize,
    /// Solver iterations (steady), time steps (transient) or inner
    /// free-surface iterations summed over cycles.
    pub iterations: usize,
    pub converged: bool,
    /// Assembly and solve time (s), excluding mesh generation and I/O.
    pub wall_time: f64,
    /// Headline numbers, including errors against built-in references.
    pub metrics: Vec<(String, f64)>,
}

fn kind_name(k: ProblemKind) -> &'static str {
    match k {
        ProblemKind::Steady => "steady",
        ProblemKind::Transient => "transient",
        ProblemKind::FreeSurface => "free_surface",
    }
}

impl RunSummary {
    /// Reproducible summary: everything except the timing.
    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind {}", kind_name(self.kind));
        let _ = writeln!(s, "geometry {}", self.geometry);
        let _ = writeln!(s, "elements {}", self.elements);
        let _ = writeln!(s, "dofs {}", self.dofs);
        let _ = writeln!(s, "iterations {}", self.iterations);
        let _ = writeln!(s, "converged {}", self.converged);
        for (k, v) in &self.metrics {
            let _ = writeln!(s, "{k} {v:?}");
        }
        s
    }

    /// Human-readable table including wall time.
    pub fn table(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("kind".into(), kind_name(self.kind).into()),
            ("geometry".into(), self.geometry.clone()),
            ("elements".into(), self.elements.to_string()),
            ("dofs".into(), self.dofs.to_string()),
            ("iterations".into(), self.iterations.to_string()),
            ("converged".into(), self.converged.to_string()),
            ("wall time (s)".into(), format!("{:.3}", self.wall_time)),
        ];
        rows.extend(self.metrics.iter().map(|(k, v)| (k.clone(), format!("{v:.6e}"))));
        let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut s = String::new();
        for (k, v) in rows {
            let _ = writeln!(s, "{k:<w$}  {v}");
        }
        s
    }
}

fn flux_csv(flux: &FluxField) -> String {
    let mut s = String::from("tag,outflow\n");
    for (t, q) in &flux.boundary {
        let _ = writeln!(s, "{t},{q:?}");
    }
    s
}

fn single_row_probe_csv(t: f64, values: &[f64]) -> String {
    let mut s = String::from("t");
    for j in 0..values.len() {
        let _ = write!(s, ",probe_{j}");
    }
    let _ = write!(s, "\n{t:?}");
    for v in values {
        let _ = write!(s, ",{v:?}");
    }
    s.push('\n');
    s
}

fn benchmark_metrics(cfg: &RunConfig, problem: &SeepageProblem, head: &HeadField, fs: Option<&FreeSurfaceResult>) -> Result<Vec<(String, f64)>> {
    let mut m = Vec::new();
    match cfg.benchmark() {
        Some(Benchmark::Patch) if cfg.heads.is_empty() && cfg.kind == ProblemKind::Steady => {
            let exact: Vec<f64> = problem.mesh.vertices().iter().map(|&p| patch::exact(p)).collect();
            m.push(("relative_error_l2".into(), seepage::relative_error_values(&head.values, &exact)?));
        }
        Some(Benchmark::Foundation) if cfg.heads.is_empty() && cfg.kind == ProblemKind::Steady => {
            let pts = foundation::monitoring_points();
            let num = seepage::probe(&problem.mesh, &head.values, &pts)?;
            let exact: Vec<f64> = pts.iter().map(|p| foundation::exact_base(p.x)).collect();
            for ((p, n), e) in pts.iter().zip(&num).zip(&exact) {
                m.push((format!("head({},{})", p.x, p.y), *n));
                m.push((format!("relative_error({},{})", p.x, p.y), ((n - e) / e).abs()));
            }
            m.push(("monitoring_error_l2".into(), seepage::relative_error_values(&num, &exact)?));
        }
        _ => {}
    }
    if let Some(fs) = fs {
        m.push(("x_o".into(), fs.state.x_o));
        m.push(("exit_x".into(), fs.state.exit.x));
        m.push(("exit_y".into(), fs.state.exit.y));
        if cfg.benchmark() == Some(Benchmark::RectDam) && cfg.heads.is_empty() {
            m.push(("x_o_relative_error".into(), ((fs.state.x_o - rect_dam::EXIT) / rect_dam::EXIT).abs()));
        }
    }
    Ok(m)
}

/// Runs the configured problem without touching the file system.
pub fn execute(cfg: &RunConfig) -> Result<RunResult> {
    let built = build_mesh(cfg)?;
    let problem = build_problem(cfg, built.mesh)?;
    let probes = cfg.probe_points();
    // fail on bad probes before any solve
    ProbeSampler::new(&problem.mesh, &probes, problem.shape_mode)?;
    let geometry = match (cfg.benchmark(), &cfg.geometry.file) {
        (Some(b), _) => b.name().to_string(),
        (None, Some(f)) => f.file_name().map_or_else(|| f.display().to_string(), |n| n.to_string_lossy().into_owned()),
        (None, None) => "mesh file".into(),
    };

    let t0 = problem.time.map_or(0.0, |t| t.t0);
    let mut probe_csv = None;
    let (problem, head, wet, k_mult, fs, cycles, iterations, converged, wall) = match cfg.kind {
        ProblemKind::Steady => {
            let clock = Instant::now();
            let disc = Discretization::new(&problem)?;
            let bc = problem.dirichlet_values(t0)?;
            if bc.is_empty() {
                return Err(Error::SingularSystem);
            }
            let (h, stats) = assembly::solve_constrained(&disc.stiffness(None), &disc.load(), &bc, None, problem.solver)?;
            let wall = clock.elapsed().as_secs_f64();
            let n = problem.mesh.num_cells();
            (problem, HeadField::new(h, t0), vec![true; n], vec![1.0; n], None, vec![], stats.iterations, true, wall)
        }
        ProblemKind::Transient => {
            let clock = Instant::now();
            let r = seepage::run_transient(&problem, None, &probes)?;
            let wall = clock.elapsed().as_secs_f64();
            let n = problem.mesh.num_cells();
            let steps = r.history.len() - 1;
            let head = r.history.last().cloned().expect("initial state recorded");
            if !probes.is_empty() {
                probe_csv = Some(r.probe_csv());
            }
            (problem, head, vec![true; n], vec![1.0; n], None, vec![], steps, true, wall)
        }
        ProblemKind::FreeSurface => {
            let fcfg = cfg.free_surface_config();
            if cfg.is_adaptive() {
                let tree = built.tree.as_ref().ok_or(Error::NotQuadtreeBacked)?;
                let r = free_surface::run_adaptive(&problem, tree, &fcfg)?;
                let iters = r.cycles.iter().map(|c| c.inner_iterations).sum();
                let wall = r.cycles.iter().map(|c| c.wall_time).sum();
                let res = r.result;
                (
                    r.problem,
                    res.head.clone(),
                    res.state.wet.clone(),
                    res.state.k_mult.clone(),
                    Some(res.clone()),
                    r.cycles,
                    iters,
                    res.state.converged,
                    wall,
                )
            } else {
                let res = free_surface::run_fixed_mesh(&problem, &fcfg)?;
                (
                    problem,
                    res.head.clone(),
                    res.state.wet.clone(),
                    res.state.k_mult.clone(),
                    Some(res.clone()),
                    vec![],
                    res.state.iter,
                    res.state.converged,
                    res.wall_time,
                )
            }
        }
    };
    if probe_csv.is_none() && !probes.is_empty() {
        let s = ProbeSampler::new(&problem.mesh, &probes, problem.shape_mode)?;
        probe_csv = Some(single_row_probe_csv(head.t, &s.sample(&head.values)));
    }
    finish(cfg, geometry, (problem, head, wet, k_mult, fs, cycles, iterations, converged, wall), probe_csv)
}

type Outcome = (SeepageProblem, HeadField, Vec<bool>, Vec<f64>, Option<FreeSurfaceResult>, Vec<CycleStats>, usize, bool, f64);

fn finish(cfg: &RunConfig, geometry: String, o: Outcome, probe_csv: Option<String>) -> Result<RunResult> {
    let (problem, head, wet, k_mult, fs, cycles, iterations, converged, wall_time) = o;
    let disc = Discretization::new(&problem)?;
    let flux = seepage::darcy_flux_with(&problem, &disc, &head, Some(&k_mult))?;
    let mut metrics = benchmark_metrics(cfg, &problem, &head, fs.as_ref())?;
    if cfg.kind == ProblemKind::Steady {
        let inflow: f64 = flux.boundary.values().filter(|&&q| q < 0.0).map(|q| -q).sum();
        let net: f64 = flux.boundary.values().sum();
        if inflow > 0.0 {
            metrics.push(("flux_imbalance".into(), net.abs() / inflow));
        }
    }
    if let (Some(first), Some(last)) = (cycles.first(), cycles.last()) {
        metrics.push(("initial_dofs".into(), first.dofs as f64));
        metrics.push(("final_dofs".into(), last.dofs as f64));
        // the pre-refined tree is the fixed-mesh reference for the DOF ratio
        let reference = match cfg.benchmark() {
            Some(Benchmark::RectDam) => Some(rect_dam::quadtree()?),
            Some(Benchmark::TrapezoidDam) => Some(trapezoid_dam::quadtree()?),
            _ => None,
        };
        if let Some(t) = reference {
            let n = t.to_mesh()?.mesh.num_nodes();
            metrics.push(("prerefined_dofs".into(), n as f64));
            metrics.push(("dof_ratio".into(), last.dofs as f64 / n as f64));
        }
    }
    let summary = RunSummary {
        kind: cfg.kind,
        geometry,
        elements: problem.mesh.num_cells(),
        dofs: problem.mesh.num_nodes(),
        iterations,
        converged,
        wall_time,
        metrics,
    };
    Ok(RunResult { problem, head, wet, k_mult, flux, probe_csv, free_surface: fs, cycles, summary })
}

/// Writes all artifacts of a finished run into `out`, returning the
/// written paths in a fixed order.
pub fn write_artifacts(r: &RunResult, out: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out)?;
    let mut written = Vec::new();
    let mut put = |name: &str, contents: &str| -> Result<()> {
        let p = out.join(name);
        std::fs::write(&p, contents)?;
        written.push(p);
        Ok(())
    };
    let mesh = &r.problem.mesh;
    put("mesh.txt", &mesh.to_text())?;
    let psi = free_surface::pressure_head(mesh, &r.head.values);
    let wet: Vec<f64> = r.wet.iter().map(|&w| if w { 1.0 } else { 0.0 }).collect();
    let text = vtk::vtk_string(
        mesh,
        &[("head", &r.head.values), ("psi", &psi)],
        &[("wet", &wet), ("k_mult", &r.k_mult), ("flux_magnitude", &r.flux.element_magnitude)],
    )?;
    put("solution.vtk", &text)?;
    if let Some(p) = &r.probe_csv {
        put("probes.csv", p)?;
    }
    if r.summary.kind != ProblemKind::FreeSurface {
        put("fluxes.csv", &flux_csv(&r.flux))?;
    }
    if let Some(fs) = &r.free_surface {
        put("free_surface.csv", &fs.surface_csv())?;
        put("iterations.csv", &fs.log_csv())?;
    }
    if !r.cycles.is_empty() {
        put("cycles.csv", &free_surface::cycles_csv(&r.cycles))?;
    }
    put("summary.txt", &r.summary.text())?;
    Ok(written)
}

/// Default output directory: `output` from the config, else
/// `out/<config file stem>`.
pub fn output_dir(cfg: &RunConfig, config_path: &Path) -> PathBuf {
    cfg.output.clone().unwrap_or_else(|| {
        let stem = config_path.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
        PathBuf::from("out").join(stem)
    })
}

/// Runs and writes artifacts.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<RunResult> {
    let r = execute(cfg)?;
    write_artifacts(&r, out)?;
    Ok(r)
}

/// Builds the mesh only and writes `mesh.txt` and `mesh.vtk`.
pub fn preview_mesh(cfg: &RunConfig, out: &Path) -> Result<MeshBuild> {
    let b = build_mesh(cfg)?;
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("mesh.txt"), b.mesh.to_text())?;
    vtk::write_vtk(&b.mesh, &[], &[], out.join("mesh.vtk"))?;
    Ok(b)
}
