//! Clipped Voronoi meshes of convex domains.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geometry::{self, Convexity, Point2};
use crate::mesh::{build_poly_mesh, MeshInput, PolyMesh};
use crate::quadtree::VertexPool;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VoronoiOptions {
    /// Target cell diameter (m).
    pub size: f64,
    /// Seed of the jitter generator.
    pub seed: u64,
    /// Lloyd relaxation sweeps applied to the seeds.
    pub lloyd_iters: usize,
}

impl Default for VoronoiOptions {
    fn default() -> Self {
        VoronoiOptions { size: 1.0, seed: 0, lloyd_iters: 3 }
    }
}

fn check_domain(domain: &Domain) -> Result<()> {
    if !domain.holes.is_empty() || geometry::convexity(&domain.outer, 1e-12) == Convexity::Reflex {
        return Err(Error::Validation(vec!["Voronoi meshing needs a convex domain without holes".into()]));
    }
    Ok(())
}

/// Jittered-grid seeds: one per grid cell of side `size` whose jittered
/// point falls inside the domain.
pub fn jittered_seeds(domain: &Domain, size: f64, seed: u64) -> Vec<Point2> {
    let (lo, hi) = domain.bbox();
    let nx = ((hi.x - lo.x) / size).ceil().max(1.0) as usize;
    let ny = ((hi.y - lo.y) / size).ceil().max(1.0) as usize;
    let dx = (hi.x - lo.x) / nx as f64;
    let dy = (hi.y - lo.y) / ny as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let p = Point2::new(
                lo.x + (i as f64 + 0.5 + rng.gen_range(-0.3..0.3)) * dx,
                lo.y + (j as f64 + 0.5 + rng.gen_range(-0.3..0.3)) * dy,
            );
            if domain.contains(p) {
                out.push(p);
            }
        }
    }
    out
}

/// `n` uniformly random seeds inside the domain.
pub fn random_seeds(domain: &Domain, n: usize, seed: u64) -> Vec<Point2> {
    let (lo, hi) = domain.bbox();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point2::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if domain.contains(p) {
            out.push(p);
        }
    }
    out
}

/// Voronoi region of every seed clipped to the domain, in seed order.
pub fn voronoi_cells(domain: &Domain, seeds: &[Point2]) -> Result<Vec<Vec<Point2>>> {
    check_domain(domain)?;
    if seeds.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let (lo, hi) = domain.bbox();
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    let bucket = extent / (seeds.len() as f64).sqrt().max(1.0);
    let cell_of = |p: Point2| (((p.x - lo.x) / bucket).floor() as i64, ((p.y - lo.y) / bucket).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, &s) in seeds.iter().enumerate() {
        grid.entry(cell_of(s)).or_default().push(i);
    }
    let max_ring = (extent / bucket).ceil() as i64 + 2;
    let tol = 1e-12 * extent;

    let mut cells = Vec::with_capacity(seeds.len());
    for (i, &s) in seeds.iter().enumerate() {
        let mut poly = domain.outer.clone();
        let (ci, cj) = cell_of(s);
        for r in 0..=max_ring {
            let radius = poly.iter().map(|p| p.dist(s)).fold(0.0, f64::max);
            if (r - 1) as f64 * bucket > 2.0 * radius {
                break;
            }
            for gj in cj - r..=cj + r {
                for gi in ci - r..=ci + r {
                    if (gi - ci).abs() != r && (gj - cj).abs() != r {
                        continue;
                    }
                    let Some(ids) = grid.get(&(gi, gj)) else { continue };
                    for &k in ids {
                        if k == i {
                            continue;
                        }
                        let o = seeds[k];
                        if o.dist(s) == 0.0 {
                            continue;
                        }
                        let mid = s.lerp(o, 0.5);
                        poly = geometry::clip_half_plane(&poly, mid, o - s);
                    }
                }
            }
        }
        cells.push(geometry::clean_loop(&poly, tol));
    }
    Ok(cells)
}

/// Moves each seed to the centroid of its clipped cell.
pub fn lloyd_step(domain: &Domain, seeds: &[Point2]) -> Result<Vec<Point2>> {
    Ok(voronoi_cells(domain, seeds)?
        .iter()
        .zip(seeds)
        .map(|(c, &s)| if c.len() >= 3 { geometry::area_centroid(c).1 } else { s })
        .collect())
}

/// Conforming polygonal mesh from explicit seeds.
pub fn voronoi_mesh_from_seeds(domain: &Domain, seeds: &[Point2]) -> Result<PolyMesh> {
    let polys = voronoi_cells(domain, seeds)?;
    let (lo, hi) = domain.bbox();
    let extent = (hi.x - lo.x).max(hi.y - lo.y);
    let mut pool = VertexPool::new(1e-9 * extent);
    let total = domain.area();
    let mut loops = Vec::new();
    for poly in &polys {
        if poly.len() < 3 || geometry::signed_area(poly) <= 1e-12 * total {
            continue;
        }
        let mut l: Vec<usize> = poly.iter().map(|&p| pool.insert(p)).collect();
        l.dedup();
        while l.len() > 1 && l[0] == *l.last().unwrap() {
            l.pop();
        }
        if l.len() >= 3 {
            loops.push(l);
        }
    }
    let verts = pool.pts;
    let mut uses: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for l in &loops {
        for i in 0..l.len() {
            let (a, b) = (l[i], l[(i + 1) % l.len()]);
            *uses.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let tag_tol = 1e-7 * extent;
    let tags = uses
        .into_iter()
        .filter(|&(_, n)| n == 1)
        .map(|((a, b), _)| ((a, b), domain.tag_for_segment(verts[a], verts[b], tag_tol)))
        .collect();
    build_poly_mesh(MeshInput { vertices: verts, cells: loops, regions: vec![], tags })
}

/// Jittered seeds relaxed by Lloyd sweeps, then meshed.
pub fn voronoi_mesh(domain: &Domain, opts: &VoronoiOptions) -> Result<PolyMesh> {
    check_domain(domain)?;
    if !(opts.size > 0.0) {
        return Err(Error::Validation(vec![format!("mesh size must be positive (got {})", opts.size)]));
    }
    let mut seeds = jittered_seeds(domain, opts.size, opts.seed);
    for _ in 0..opts.lloyd_iters {
        seeds = lloyd_step(domain, &seeds)?;
    }
    voronoi_mesh_from_seeds(domain, &seeds)
}
