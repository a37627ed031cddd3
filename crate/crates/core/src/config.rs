//! Run configuration files.
//!
//! Configurations are TOML documents:
//!
//! ```toml
//! kind = "steady"            # steady | transient | free_surface
//! seed = 1                   # mesh generator seed
//! output = "out/patch"       # optional, relative to the config file
//!
//! [geometry]
//! benchmark = "patch"        # patch | foundation | rect_dam | trapezoid_dam
//! # file = "domain.txt"      # or a polygon file, one `x y tag` per line
//!
//! [mesh]
//! type = "voronoi"           # voronoi | graded_voronoi | quadtree | file
//! size = 0.25
//!
//! [[heads]]
//! tag = "top"
//! value = 3.0                # or `series = [[t, h], ...]` or `elevation = true`
//! ```
//!
//! Syntax errors are reported as [`Error::Parse`] with the offending line;
//! everything else that is wrong is collected into one [`Error::Validation`].

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::free_surface::FreeSurfaceConfig;
use crate::geometry::Point2;
use crate::mesh::Tag;
use crate::problem::{HeadSpec, Material, TimeGrid};
use crate::shape::ShapeMode;
use crate::smoothing::{Conductivity, DEFAULT_SMOOTHING_POINTS};
use crate::solver::{SolverOptions, DEFAULT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Steady,
    Transient,
    FreeSurface,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    Patch,
    Foundation,
    RectDam,
    TrapezoidDam,
}

impl Benchmark {
    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Patch => "patch",
            Benchmark::Foundation => "foundation",
            Benchmark::RectDam => "rect_dam",
            Benchmark::TrapezoidDam => "trapezoid_dam",
        }
    }

    pub fn is_dam(self) -> bool {
        matches!(self, Benchmark::RectDam | Benchmark::TrapezoidDam)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub benchmark: Option<Benchmark>,
    /// Outer boundary, one `x y tag` line per vertex; the tag labels the
    /// edge to the next vertex.
    pub file: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSpec {
    /// Lloyd-relaxed Voronoi mesh of a convex domain.
    Voronoi {
        size: Option<f64>,
        lloyd_iters: Option<usize>,
    },
    /// Voronoi mesh seeded from the benchmark's pre-refined quadtree.
    GradedVoronoi,
    Quadtree {
        /// Uniform leaf size; ignored when `graded`.
        size: Option<f64>,
        /// Use the benchmark's pre-refined size field.
        #[serde(default)]
        graded: bool,
        /// Refine around the free surface between iterations.
        #[serde(default)]
        adaptive: bool,
        max_depth: Option<u32>,
    },
    /// Mesh in the `polymesh 1` text format.
    File { path: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    #[serde(default)]
    pub region: u32,
    /// Isotropic conductivity; alternatively give `kxx`, `kyy`, `kxy`.
    pub k: Option<f64>,
    pub kxx: Option<f64>,
    pub kyy: Option<f64>,
    pub kxy: Option<f64>,
    #[serde(default)]
    pub ss: f64,
    #[serde(default)]
    pub source: f64,
}

impl MaterialSpec {
    fn conductivity(&self) -> std::result::Result<Conductivity, String> {
        match (self.k, self.kxx, self.kyy) {
            (Some(k), None, None) if self.kxy.is_none() => Ok(Conductivity::isotropic(k)),
            (None, Some(kxx), Some(kyy)) => Ok(Conductivity { kxx, kyy, kxy: self.kxy.unwrap_or(0.0) }),
            _ => Err(format!(
                "materials (region {}): give either `k` or both `kxx` and `kyy`",
                self.region
            )),
        }
    }

    pub fn material(&self) -> Option<Material> {
        self.conductivity().ok().map(|k| Material { k, ss: self.ss, source: self.source })
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeadEntry {
    pub tag: String,
    pub value: Option<f64>,
    pub series: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub elevation: bool,
}

impl HeadEntry {
    pub fn spec(&self) -> Option<HeadSpec> {
        match (self.value, &self.series, self.elevation) {
            (Some(v), None, false) => Some(HeadSpec::Constant(v)),
            (None, Some(s), false) => Some(HeadSpec::Series(s.iter().map(|&[t, h]| (t, h)).collect())),
            (None, None, true) => Some(HeadSpec::Elevation),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxEntry {
    pub tag: String,
    /// Prescribed normal flux `k∇h·n` (m/s).
    pub q: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ShapeChoice {
    #[default]
    Auto,
    Wachspress,
    MeanValue,
}

impl From<ShapeChoice> for ShapeMode {
    fn from(s: ShapeChoice) -> Self {
        match s {
            ShapeChoice::Auto => ShapeMode::Auto,
            ShapeChoice::Wachspress => ShapeMode::Wachspress,
            ShapeChoice::MeanValue => ShapeMode::MeanValue,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub shape: ShapeChoice,
    /// Gauss points per smoothing-cell edge.
    pub edge_points: usize,
    pub tol: f64,
    pub max_iter: Option<usize>,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec { shape: ShapeChoice::Auto, edge_points: DEFAULT_SMOOTHING_POINTS, tol: DEFAULT_TOL, max_iter: None }
    }
}

impl SolverSpec {
    pub fn options(&self) -> SolverOptions {
        SolverOptions { tol: self.tol, max_iter: self.max_iter }
    }
}

/// A validated run configuration. Relative paths have been resolved
/// against the directory of the configuration file.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: ProblemKind,
    #[serde(default)]
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub geometry: GeometrySpec,
    pub mesh: MeshSpec,
    #[serde(default)]
    pub materials: Vec<MaterialSpec>,
    #[serde(default)]
    pub heads: Vec<HeadEntry>,
    #[serde(default)]
    pub fluxes: Vec<FluxEntry>,
    pub time: Option<TimeGrid>,
    pub probes: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub solver: SolverSpec,
    pub free_surface: Option<FreeSurfaceConfig>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// Parses and validates a configuration held in memory. `base` anchors
/// relative paths.
pub fn parse_config_str(text: &str, base: &Path) -> Result<RunConfig> {
    if let Err(e) = text.parse::<toml::Table>() {
        let line = e.span().map_or(0, |s| line_of(text, s.start));
        return Err(Error::Parse { line, msg: e.message().trim().to_string() });
    }
    let mut cfg: RunConfig = toml::from_str(text).map_err(|e| {
        let at = e.span().map(|s| format!("line {}: ", line_of(text, s.start))).unwrap_or_default();
        Error::Validation(vec![format!("{at}{}", e.message().trim())])
    })?;
    cfg.resolve_paths(base);
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text, path.parent().unwrap_or(Path::new(".")))
}

impl RunConfig {
    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(f) = self.geometry.file.as_mut() {
            fix(f);
        }
        if let MeshSpec::File { path } = &mut self.mesh {
            fix(path);
        }
        if let Some(o) = self.output.as_mut() {
            fix(o);
        }
    }

    pub fn benchmark(&self) -> Option<Benchmark> {
        self.geometry.benchmark
    }

    /// Free-surface controls, defaulted when the section is absent.
    pub fn free_surface_config(&self) -> FreeSurfaceConfig {
        self.free_surface.clone().unwrap_or_default()
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(self.mesh, MeshSpec::Quadtree { adaptive: true, .. })
    }

    pub fn shape_mode(&self) -> ShapeMode {
        self.solver.shape.into()
    }

    /// Explicit heads, or the benchmark's when none are given.
    pub fn head_specs(&self) -> Vec<(Tag, HeadSpec)> {
        self.heads.iter().filter_map(|h| h.spec().map(|s| (Tag::new(h.tag.clone()), s))).collect()
    }

    pub fn probe_points(&self) -> Vec<Point2> {
        match (&self.probes, self.benchmark()) {
            (Some(p), _) => p.iter().map(|&[x, y]| Point2::new(x, y)).collect(),
            (None, Some(Benchmark::Foundation)) => crate::benchmarks::foundation::monitoring_points().to_vec(),
            _ => Vec::new(),
        }
    }

    /// Checks every constraint and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs: Vec<String> = Vec::new();
        let bench = self.benchmark();
        match (&self.geometry.benchmark, &self.geometry.file) {
            (Some(_), Some(_)) => errs.push("geometry: give either `benchmark` or `file`, not both".into()),
            (None, None) => {
                if !matches!(self.mesh, MeshSpec::File { .. }) {
                    errs.push("geometry: `benchmark` or `file` is required unless the mesh is read from a file".into())
                }
            }
            (None, Some(f)) => {
                if !f.is_file() {
                    errs.push(format!("geometry.file: '{}' does not exist", f.display()));
                }
            }
            _ => {}
        }

        match &self.mesh {
            MeshSpec::Voronoi { size, .. } => {
                if let Some(s) = size {
                    if !(*s > 0.0) {
                        errs.push(format!("mesh.size must be positive (got {s})"));
                    }
                } else if !matches!(bench, Some(Benchmark::Patch | Benchmark::Foundation)) {
                    errs.push("mesh.size is required for this geometry".into());
                }
            }
            MeshSpec::GradedVoronoi => {
                if !bench.is_some_and(Benchmark::is_dam) {
                    errs.push("mesh.type = \"graded_voronoi\" needs a dam benchmark geometry".into());
                }
            }
            MeshSpec::Quadtree { size, graded, adaptive, max_depth } => {
                if *graded {
                    if !matches!(bench, Some(Benchmark::Patch | Benchmark::RectDam | Benchmark::TrapezoidDam)) {
                        errs.push("mesh.graded needs the patch or a dam benchmark geometry".into());
                    }
                } else if let Some(s) = size {
                    if !(*s > 0.0) {
                        errs.push(format!("mesh.size must be positive (got {s})"));
                    }
                } else if !bench.is_some_and(Benchmark::is_dam) {
                    errs.push("mesh.size is required for this geometry".into());
                }
                if *adaptive && self.kind != ProblemKind::FreeSurface {
                    errs.push("mesh.adaptive is only supported for free_surface runs".into());
                }
                if max_depth.is_some_and(|d| d == 0) {
                    errs.push("mesh.max_depth must be at least 1".into());
                }
            }
            MeshSpec::File { path } => {
                if !path.is_file() {
                    errs.push(format!("mesh.path: '{}' does not exist", path.display()));
                }
            }
        }

        for m in &self.materials {
            match m.conductivity() {
                Err(e) => errs.push(e),
                Ok(k) if !k.is_spd() => {
                    errs.push(format!("materials (region {}): conductivity is not positive definite", m.region))
                }
                Ok(_) => {}
            }
            if !(m.ss >= 0.0) {
                errs.push(format!("materials (region {}): ss must be non-negative", m.region));
            }
        }
        if self.materials.is_empty() && bench.is_none() {
            errs.push("materials: at least one material is required".into());
        }
        let mut regions: Vec<u32> = self.materials.iter().map(|m| m.region).collect();
        regions.sort_unstable();
        if regions.windows(2).any(|w| w[0] == w[1]) {
            errs.push("materials: duplicate region".into());
        }

        for h in &self.heads {
            if h.spec().is_none() {
                errs.push(format!("heads (tag '{}'): give exactly one of `value`, `series`, `elevation = true`", h.tag));
            }
            if let Some(s) = &h.series {
                if s.is_empty() || s.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                    errs.push(format!("heads (tag '{}'): series times must be non-empty and increasing", h.tag));
                }
            }
        }
        if self.heads.is_empty() && bench.is_none() {
            errs.push(format!(
                "heads: a {} run needs at least one prescribed head",
                match self.kind {
                    ProblemKind::Steady => "steady",
                    ProblemKind::Transient => "transient",
                    ProblemKind::FreeSurface => "free_surface",
                }
            ));
        }
        for f in &self.fluxes {
            if !f.q.is_finite() {
                errs.push(format!("fluxes (tag '{}'): q must be finite", f.tag));
            }
        }

        match (self.kind, &self.time) {
            (ProblemKind::Transient, None) => errs.push("time: a transient run needs a [time] section".into()),
            (_, Some(t)) => {
                if !(t.dt > 0.0) {
                    errs.push(format!("time.dt must be positive (got {})", t.dt));
                }
                if t.n_steps == 0 {
                    errs.push("time.n_steps must be at least 1".into());
                }
            }
            _ => {}
        }
        if let Some(fs) = &self.free_surface {
            if self.kind != ProblemKind::FreeSurface {
                errs.push("free_surface: section given for a run that is not free_surface".into());
            }
            if let Err(Error::Validation(v)) = fs.validate() {
                errs.extend(v.into_iter().map(|m| format!("free_surface.{m}")));
            }
        }
        if let Some(p) = &self.probes {
            if p.iter().flatten().any(|v| !v.is_finite()) {
                errs.push("probes: coordinates must be finite".into());
            }
        }
        if self.solver.edge_points == 0 {
            errs.push("solver.edge_points must be at least 1".into());
        }
        if !(self.solver.tol > 0.0) {
            errs.push(format!("solver.tol must be positive (got {})", self.solver.tol));
        }

        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}

/// Reads an outer boundary polygon: one `x y tag` line per vertex, `#`
/// starts a comment.
pub fn read_domain_file(path: impl AsRef<Path>) -> Result<Domain> {
    let text = std::fs::read_to_string(path)?;
    parse_domain(&text)
}

pub fn parse_domain(text: &str) -> Result<Domain> {
    let mut pts = Vec::new();
    let mut tags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse { line: i + 1, msg: "expected 'x y tag'".into() };
        if toks.len() != 3 {
            return Err(bad());
        }
        let x: f64 = toks[0].parse().map_err(|_| bad())?;
        let y: f64 = toks[1].parse().map_err(|_| bad())?;
        pts.push(Point2::new(x, y));
        tags.push(Tag::from(toks[2]));
    }
    if pts.len() < 3 {
        return Err(Error::EmptyDomain);
    }
    Domain::new(pts, tags, vec![])
}
