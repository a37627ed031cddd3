//! Built-in benchmark problems generated from their stated dimensions:
//! the linear patch test, a dam foundation under a flat impervious dam, and
//! the rectangular and trapezoidal free-surface dams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::Domain;
use crate::error::Result;
use crate::geometry::Point2;
use crate::mesh::{PolyMesh, Tag};
use crate::problem::{HeadSpec, Material, SeepageProblem};
use crate::quadtree::{generate_quadtree_in, Quadtree};
use crate::voronoi::{voronoi_mesh, voronoi_mesh_from_seeds, VoronoiOptions};

fn tags(names: &[&str]) -> Vec<Tag> {
    names.iter().map(|&n| Tag::from(n)).collect()
}

/// Quadtree leaf centres, jittered by up to `jitter` of the leaf side and
/// kept when inside the domain. Seeds a Voronoi mesh with the grading of
/// the tree.
pub fn graded_seeds(tree: &Quadtree, domain: &Domain, jitter: f64, seed: u64) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    tree.leaves()
        .into_iter()
        .filter_map(|id| {
            let n = tree.node(id);
            let d = Point2::new(rng.gen_range(-jitter..=jitter), rng.gen_range(-jitter..=jitter)) * n.side;
            let p = n.center() + d;
            domain.contains(p).then_some(p)
        })
        .collect()
}

pub mod patch {
    //! Linear head `h = 1 + 2y` on `[0, 2] × [0, 1]`: 3 m on top, 1 m at
    //! the bottom, no flow through the sides.

    use super::*;

    pub const K: f64 = 1e-5;

    pub fn domain() -> Domain {
        let outer = vec![Point2::new(0.0, 0.0), Point2::new(2.0, 0.0), Point2::new(2.0, 1.0), Point2::new(0.0, 1.0)];
        Domain::new(outer, tags(&["bottom", "right", "top", "left"]), vec![]).expect("valid rectangle")
    }

    pub fn exact(p: Point2) -> f64 {
        1.0 + 2.0 * p.y
    }

    pub fn problem(mesh: PolyMesh) -> SeepageProblem {
        SeepageProblem::new(mesh, Material::isotropic(K))
            .with_head("top", HeadSpec::Constant(3.0))
            .with_head("bottom", HeadSpec::Constant(1.0))
    }

    /// Unstructured Voronoi mesh with about 30 cells.
    pub fn polygonal_mesh(seed: u64) -> Result<PolyMesh> {
        voronoi_mesh(&domain(), &VoronoiOptions { size: 0.25, seed, lloyd_iters: 5 })
    }

    /// Quadtree mesh refined towards the lower left corner, so that
    /// coarse cells carry hanging nodes.
    pub fn quadtree_mesh() -> Result<PolyMesh> {
        Ok(quadtree()?.to_mesh()?.mesh)
    }

    pub fn quadtree() -> Result<Quadtree> {
        let size = |p: Point2| if p.x < 0.6 && p.y < 0.6 { 0.125 } else { 0.5 };
        let (tree, _) = generate_quadtree_in(&domain(), Point2::new(0.0, 0.0), 2.0, &size, 6)?;
        Ok(tree.balanced())
    }
}

pub mod foundation {
    //! Confined flow beneath a flat impervious dam of base 80 m centred at
    //! x = 120 m, with 80 m of head upstream and 20 m downstream. The
    //! closed-form reference is the half-plane solution
    //! `h = 20 + (60/π)·arccos((x − 120)/40)` along the dam base; the
    //! layer is made deep and wide enough that truncation stays well
    //! below the mesh error.

    use std::f64::consts::PI;

    use super::*;

    /// 1e-5 cm/s.
    pub const K: f64 = 1e-7;
    pub const H_UP: f64 = 80.0;
    pub const H_DOWN: f64 = 20.0;
    pub const SURFACE: f64 = 80.0;
    pub const DAM: (f64, f64) = (80.0, 160.0);
    /// Layer extent: `x ∈ [X0, X1]`, `y ∈ [Y0, SURFACE]`.
    pub const X0: f64 = -200.0;
    pub const X1: f64 = 440.0;
    pub const Y0: f64 = -160.0;
    pub const SIZES: [f64; 4] = [20.0, 10.0, 5.0, 2.5];

    pub fn monitoring_points() -> [Point2; 2] {
        [Point2::new(100.0, 80.0), Point2::new(140.0, 80.0)]
    }

    pub fn domain() -> Domain {
        let outer = vec![
            Point2::new(X0, Y0),
            Point2::new(X1, Y0),
            Point2::new(X1, SURFACE),
            Point2::new(DAM.1, SURFACE),
            Point2::new(DAM.0, SURFACE),
            Point2::new(X0, SURFACE),
        ];
        Domain::new(outer, tags(&["impervious", "impervious", "downstream", "dam", "upstream", "impervious"]), vec![])
            .expect("valid rectangle")
    }

    /// Head along the dam base of the half-plane problem.
    pub fn exact_base(x: f64) -> f64 {
        let c = 0.5 * (DAM.0 + DAM.1);
        let b = 0.5 * (DAM.1 - DAM.0);
        H_DOWN + (H_UP - H_DOWN) / PI * ((x - c) / b).clamp(-1.0, 1.0).acos()
    }

    pub fn problem(mesh: PolyMesh) -> SeepageProblem {
        SeepageProblem::new(mesh, Material::isotropic(K))
            .with_head("upstream", HeadSpec::Constant(H_UP))
            .with_head("downstream", HeadSpec::Constant(H_DOWN))
    }

    pub fn mesh(size: f64, seed: u64) -> Result<PolyMesh> {
        voronoi_mesh(&domain(), &VoronoiOptions { size, seed, lloyd_iters: 3 })
    }
}

pub mod rect_dam {
    //! Homogeneous dam 0.5 m wide and 1 m high: 1 m of head upstream,
    //! 0.5 m tailwater, impervious base. The seepage face runs from the
    //! tailwater level to the crest on the downstream side.

    use super::*;

    pub const WIDTH: f64 = 0.5;
    pub const HEIGHT: f64 = 1.0;
    pub const H1: f64 = 1.0;
    pub const H2: f64 = 0.5;
    pub const FINE: f64 = 0.0125;
    pub const COARSE: f64 = 0.05;
    /// Exit-point elevation of the closed-form solution.
    pub const EXIT: f64 = 0.662382;
    /// Root square `[0, 1.6]²`: depth 5 gives 0.05 m, depth 7 0.0125 m.
    pub const ROOT_SIDE: f64 = 1.6;
    pub const MAX_DEPTH: u32 = 7;

    pub fn domain() -> Domain {
        let outer = vec![
            Point2::new(0.0, 0.0),
            Point2::new(WIDTH, 0.0),
            Point2::new(WIDTH, H2),
            Point2::new(WIDTH, HEIGHT),
            Point2::new(0.0, HEIGHT),
        ];
        Domain::new(outer, tags(&["G2", "G5", "G4", "G2", "G1"]), vec![]).expect("valid rectangle")
    }

    pub fn problem(mesh: PolyMesh) -> SeepageProblem {
        SeepageProblem::new(mesh, Material::isotropic(1.0))
            .with_head("G1", HeadSpec::Constant(H1))
            .with_head("G5", HeadSpec::Constant(H2))
    }

    /// Fine cells over the potential phreatic zone above the tailwater.
    pub fn size_field(p: Point2) -> f64 {
        if p.y > H2 - COARSE {
            FINE
        } else {
            COARSE
        }
    }

    fn tree(size: &dyn Fn(Point2) -> f64) -> Result<Quadtree> {
        let (t, _) = generate_quadtree_in(&domain(), Point2::new(0.0, 0.0), ROOT_SIDE, size, MAX_DEPTH)?;
        Ok(t.balanced())
    }

    /// Pre-refined quadtree.
    pub fn quadtree() -> Result<Quadtree> {
        tree(&size_field)
    }

    /// Uniform coarse tree, the start of the adaptive run.
    pub fn coarse_quadtree() -> Result<Quadtree> {
        tree(&|_| COARSE)
    }

    /// Voronoi mesh with the grading of the pre-refined tree.
    pub fn polygonal_mesh(seed: u64) -> Result<PolyMesh> {
        let seeds = graded_seeds(&quadtree()?, &domain(), 0.2, seed);
        voronoi_mesh_from_seeds(&domain(), &seeds)
    }
}

pub mod trapezoid_dam {
    //! Trapezoidal dam with 5 m of head upstream and 1 m downstream,
    //! k = 1 m/s: base 10 m, crest 2 m at 6 m height, symmetric 4:6 slopes.
    //! The upstream slope above the reservoir and the crest are impervious;
    //! the downstream slope above the tailwater is the seepage face.

    use super::*;

    pub const H1: f64 = 5.0;
    pub const H2: f64 = 1.0;
    pub const BASE: f64 = 10.0;
    pub const CREST: (f64, f64) = (4.0, 6.0);
    pub const HEIGHT: f64 = 6.0;
    pub const FINE: f64 = 0.0625;
    pub const COARSE: f64 = 0.25;
    /// Root square of side 16: depth 6 gives 0.25 m, depth 8 0.0625 m.
    pub const ROOT_SIDE: f64 = 16.0;
    pub const MAX_DEPTH: u32 = 8;
    /// Half-width of the pre-refined band about the Dupuit line (m).
    pub const BAND: f64 = 1.5;

    fn upstream_x(y: f64) -> f64 {
        CREST.0 * y / HEIGHT
    }

    fn downstream_x(y: f64) -> f64 {
        BASE - (BASE - CREST.1) * y / HEIGHT
    }

    pub fn domain() -> Domain {
        let outer = vec![
            Point2::new(0.0, 0.0),
            Point2::new(BASE, 0.0),
            Point2::new(downstream_x(H2), H2),
            Point2::new(CREST.1, HEIGHT),
            Point2::new(CREST.0, HEIGHT),
            Point2::new(upstream_x(H1), H1),
        ];
        Domain::new(outer, tags(&["G2", "G5", "G4", "G2", "G2", "G1"]), vec![]).expect("valid trapezoid")
    }

    pub fn problem(mesh: PolyMesh) -> SeepageProblem {
        SeepageProblem::new(mesh, Material::isotropic(1.0))
            .with_head("G1", HeadSpec::Constant(H1))
            .with_head("G5", HeadSpec::Constant(H2))
    }

    /// Dupuit parabola between the reservoir and tailwater shore lines,
    /// used only to place the pre-refined band.
    pub fn dupuit(x: f64) -> f64 {
        let (x1, x2) = (upstream_x(H1), downstream_x(H2));
        let t = ((x - x1) / (x2 - x1)).clamp(0.0, 1.0);
        (H1 * H1 - (H1 * H1 - H2 * H2) * t).sqrt()
    }

    pub fn size_field(p: Point2) -> f64 {
        if (p.y - dupuit(p.x)).abs() < BAND {
            FINE
        } else {
            COARSE
        }
    }

    fn tree(size: &dyn Fn(Point2) -> f64) -> Result<Quadtree> {
        let (t, _) = generate_quadtree_in(&domain(), Point2::new(0.0, 0.0), ROOT_SIDE, size, MAX_DEPTH)?;
        Ok(t.balanced())
    }

    pub fn quadtree() -> Result<Quadtree> {
        tree(&size_field)
    }

    pub fn coarse_quadtree() -> Result<Quadtree> {
        tree(&|_| COARSE)
    }

    pub fn polygonal_mesh(seed: u64) -> Result<PolyMesh> {
        let seeds = graded_seeds(&quadtree()?, &domain(), 0.2, seed);
        voronoi_mesh_from_seeds(&domain(), &seeds)
    }
}
