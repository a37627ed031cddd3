//! Quadtree meshing: size-driven generation over a clipped domain, 2:1
//! balancing, local refinement, and conversion to a conforming polygonal
//! mesh in which hanging nodes become ordinary collinear vertices.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geometry::{self, Convexity, Point2};
use crate::mesh::{build_poly_mesh, MeshInput, PolyMesh};

/// Hard cap on tree depth.
pub const MAX_DEPTH_LIMIT: u32 = 20;

/// Clipped cells smaller than this fraction of their leaf are merged away.
pub const SLIVER_FRACTION: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct QuadNode {
    pub lo: Point2,
    pub side: f64,
    pub depth: u32,
    pub parent: Option<usize>,
    /// SW, SE, NW, NE.
    pub children: Option<[usize; 4]>,
    /// Whether the box overlaps the domain with positive area.
    pub active: bool,
}

impl QuadNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }

    pub fn center(&self) -> Point2 {
        Point2::new(self.lo.x + 0.5 * self.side, self.lo.y + 0.5 * self.side)
    }

    pub fn hi(&self) -> Point2 {
        Point2::new(self.lo.x + self.side, self.lo.y + self.side)
    }
}

#[derive(Clone, Debug)]
pub struct Quadtree {
    nodes: Vec<QuadNode>,
    max_depth: u32,
    domain: Domain,
}

/// Outcome flags of tree construction or refinement.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TreeReport {
    /// Leaves that wanted to split but sit at `max_depth`.
    pub depth_exceeded: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BoxStatus {
    Outside,
    Inside,
    Cut,
}

fn box_status(domain: &Domain, lo: Point2, side: f64) -> BoxStatus {
    let hi = Point2::new(lo.x + side, lo.y + side);
    let full = side * side;
    let a = geometry::signed_area(&geometry::clip_to_box(&domain.outer, lo, hi)).abs();
    if a <= 1e-14 * full {
        return BoxStatus::Outside;
    }
    let mut cut = a < full * (1.0 - 1e-12);
    for h in &domain.holes {
        let ha = geometry::signed_area(&geometry::clip_to_box(h, lo, hi)).abs();
        if ha >= a * (1.0 - 1e-12) {
            return BoxStatus::Outside;
        }
        if ha > 1e-14 * full {
            cut = true;
        }
    }
    if cut {
        BoxStatus::Cut
    } else {
        BoxStatus::Inside
    }
}

/// Builds a tree over the domain bounding square.
pub fn generate_quadtree(
    domain: &Domain,
    size_field: &dyn Fn(Point2) -> f64,
    max_depth: u32,
) -> Result<(Quadtree, TreeReport)> {
    let (lo, hi) = domain.bbox();
    let side = (hi.x - lo.x).max(hi.y - lo.y);
    generate_quadtree_in(domain, lo, side, size_field, max_depth)
}

/// Builds a tree over an explicit root square `[lo, lo + side]²`.
pub fn generate_quadtree_in(
    domain: &Domain,
    root_lo: Point2,
    root_side: f64,
    size_field: &dyn Fn(Point2) -> f64,
    max_depth: u32,
) -> Result<(Quadtree, TreeReport)> {
    if domain.area() <= 0.0 || !(root_side > 0.0) {
        return Err(Error::EmptyDomain);
    }
    let max_depth = max_depth.min(MAX_DEPTH_LIMIT);
    let root_active = box_status(domain, root_lo, root_side) != BoxStatus::Outside;
    if !root_active {
        return Err(Error::EmptyDomain);
    }
    let mut qt = Quadtree {
        nodes: vec![QuadNode { lo: root_lo, side: root_side, depth: 0, parent: None, children: None, active: true }],
        max_depth,
        domain: domain.clone(),
    };
    let mut report = TreeReport::default();
    let mut stack = vec![0usize];
    while let Some(id) = stack.pop() {
        let n = &qt.nodes[id];
        if !n.active {
            continue;
        }
        let target = size_field(n.center());
        if n.side > target * (1.0 + 1e-12) {
            if n.depth >= max_depth {
                report.depth_exceeded.push(id);
                continue;
            }
            let kids = qt.split(id);
            stack.extend(kids.iter().rev());
        }
    }
    report.depth_exceeded.sort_unstable();
    Ok((qt, report))
}

impl Quadtree {
    pub fn nodes(&self) -> &[QuadNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &QuadNode {
        &self.nodes[id]
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Ids of leaves overlapping the domain, in depth-first order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let n = &self.nodes[id];
            if !n.active {
                continue;
            }
            match n.children {
                Some(c) => stack.extend(c.iter().rev()),
                None => out.push(id),
            }
        }
        out
    }

    fn split(&mut self, id: usize) -> [usize; 4] {
        debug_assert!(self.nodes[id].is_leaf());
        let QuadNode { lo, side, depth, .. } = self.nodes[id];
        let h = 0.5 * side;
        let mut kids = [0usize; 4];
        for (k, (dx, dy)) in [(0.0, 0.0), (h, 0.0), (0.0, h), (h, h)].into_iter().enumerate() {
            let clo = Point2::new(lo.x + dx, lo.y + dy);
            let active = box_status(&self.domain, clo, h) != BoxStatus::Outside;
            kids[k] = self.nodes.len();
            self.nodes.push(QuadNode { lo: clo, side: h, depth: depth + 1, parent: Some(id), children: None, active });
        }
        self.nodes[id].children = Some(kids);
        kids
    }

    /// Leaf whose closed box contains `p`, descending from the root.
    pub fn leaf_at(&self, p: Point2) -> Option<usize> {
        let r = &self.nodes[0];
        if p.x < r.lo.x || p.y < r.lo.y || p.x > r.lo.x + r.side || p.y > r.lo.y + r.side {
            return None;
        }
        let mut id = 0;
        while let Some(c) = self.nodes[id].children {
            let m = self.nodes[id].center();
            let k = (p.x >= m.x) as usize + 2 * (p.y >= m.y) as usize;
            id = c[k];
        }
        Some(id)
    }

    /// Refines until every pair of edge-adjacent active leaves differs by
    /// at most one level. Only ever splits.
    pub fn balance(&mut self) {
        loop {
            let mut changed = false;
            let leaves = self.leaves();
            for id in leaves {
                if !self.nodes[id].is_leaf() {
                    continue;
                }
                let n = self.nodes[id].clone();
                let c = n.center();
                let off = 0.5 * n.side * (1.0 + 1e-6);
                for probe in [
                    Point2::new(c.x - off, c.y),
                    Point2::new(c.x + off, c.y),
                    Point2::new(c.x, c.y - off),
                    Point2::new(c.x, c.y + off),
                ] {
                    if let Some(nb) = self.leaf_at(probe) {
                        let nn = &self.nodes[nb];
                        if nn.active && nn.depth + 1 < n.depth {
                            self.split(nb);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    /// Returns a balanced copy.
    pub fn balanced(&self) -> Quadtree {
        let mut q = self.clone();
        q.balance();
        q
    }

    /// Splits each marked leaf once and re-balances. Leaves at the depth
    /// cap are left alone and reported.
    pub fn refine_cells(&self, marked: &[usize]) -> (Quadtree, TreeReport) {
        let mut q = self.clone();
        let mut report = TreeReport::default();
        let mut ids: Vec<usize> = marked.to_vec();
        ids.sort_unstable();
        ids.dedup();
        let mut any = false;
        for id in ids {
            let n = &q.nodes[id];
            if !n.is_leaf() || !n.active {
                continue;
            }
            if n.depth >= q.max_depth {
                report.depth_exceeded.push(id);
                continue;
            }
            q.split(id);
            any = true;
        }
        if any {
            q.balance();
        }
        (q, report)
    }

    /// Pairs of active leaves sharing an edge segment of positive length.
    pub fn adjacent_leaf_pairs(&self) -> Vec<(usize, usize)> {
        let leaves = self.leaves();
        let mut out = Vec::new();
        for (i, &a) in leaves.iter().enumerate() {
            for &b in &leaves[i + 1..] {
                if boxes_share_edge(&self.nodes[a], &self.nodes[b]) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn is_balanced(&self) -> bool {
        self.adjacent_leaf_pairs()
            .iter()
            .all(|&(a, b)| self.nodes[a].depth.abs_diff(self.nodes[b].depth) <= 1)
    }

    /// Converts the active leaves into a conforming polygonal mesh.
    pub fn to_mesh(&self) -> Result<QuadMesh> {
        quadtree_to_mesh(self)
    }
}

fn boxes_share_edge(a: &QuadNode, b: &QuadNode) -> bool {
    let (alo, ahi, blo, bhi) = (a.lo, a.hi(), b.lo, b.hi());
    let tol = 1e-12 * a.side.max(b.side);
    let overlap = |l0: f64, h0: f64, l1: f64, h1: f64| h0.min(h1) - l0.max(l1) > tol;
    ((ahi.x - blo.x).abs() <= tol || (bhi.x - alo.x).abs() <= tol) && overlap(alo.y, ahi.y, blo.y, bhi.y)
        || ((ahi.y - blo.y).abs() <= tol || (bhi.y - alo.y).abs() <= tol) && overlap(alo.x, ahi.x, blo.x, bhi.x)
}

/// A mesh produced from a quadtree, remembering which leaf each cell came
/// from so that element marks can be mapped back to the tree.
#[derive(Clone, Debug)]
pub struct QuadMesh {
    pub mesh: PolyMesh,
    pub leaf_of_cell: Vec<usize>,
}

impl QuadMesh {
    pub fn leaves_of(&self, cells: &[usize]) -> Vec<usize> {
        let mut v: Vec<usize> = cells.iter().map(|&c| self.leaf_of_cell[c]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

pub(crate) struct VertexPool {
    pub(crate) pts: Vec<Point2>,
    grid: HashMap<(i64, i64), Vec<usize>>,
    h: f64,
    tol: f64,
}

impl VertexPool {
    pub(crate) fn new(tol: f64) -> Self {
        VertexPool { pts: Vec::new(), grid: HashMap::new(), h: 4.0 * tol, tol }
    }

    fn key(&self, p: Point2) -> (i64, i64) {
        ((p.x / self.h).floor() as i64, (p.y / self.h).floor() as i64)
    }

    pub(crate) fn insert(&mut self, p: Point2) -> usize {
        let (i, j) = self.key(p);
        for dj in -1..=1 {
            for di in -1..=1 {
                if let Some(ids) = self.grid.get(&(i + di, j + dj)) {
                    for &id in ids {
                        if self.pts[id].dist(p) <= self.tol {
                            return id;
                        }
                    }
                }
            }
        }
        let id = self.pts.len();
        self.pts.push(p);
        self.grid.entry((i, j)).or_default().push(id);
        id
    }
}

/// Region of the leaf box inside the domain. Holes are clipped by a single
/// crossing edge where possible; leaves holding a hole corner fall back to
/// keep-or-drop by centroid.
fn leaf_polygon(domain: &Domain, node: &QuadNode) -> Vec<Point2> {
    let lo = node.lo;
    let hi = node.hi();
    let tol = 1e-12 * node.side;
    let mut poly = geometry::clean_loop(&geometry::clip_to_box(&domain.outer, lo, hi), tol);
    for h in &domain.holes {
        let (hlo, hhi) = geometry::bbox(h);
        if hhi.x <= lo.x || hlo.x >= hi.x || hhi.y <= lo.y || hlo.y >= hi.y || poly.len() < 3 {
            continue;
        }
        let corner_inside = h.iter().any(|p| p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y);
        let n = h.len();
        let crossing: Vec<usize> = (0..n)
            .filter(|&i| {
                let seg = [h[i], h[(i + 1) % n]];
                geometry::signed_area(&geometry::clip_to_box(&poly, lo, hi)) > 0.0
                    && segment_hits_polygon(seg[0], seg[1], &poly)
            })
            .collect();
        if !corner_inside && crossing.len() == 1 {
            let i = crossing[0];
            let (a, b) = (h[i], h[(i + 1) % n]);
            // hole loops are clockwise, so the hole interior lies right of a->b
            let d = b - a;
            let right = Point2::new(d.y, -d.x);
            poly = geometry::clean_loop(&geometry::clip_half_plane(&poly, a, right), tol);
        } else if crossing.is_empty() && !corner_inside {
            if geometry::point_in_polygon(geometry::area_centroid(&poly).1, h) {
                poly.clear();
            }
        } else {
            let c = geometry::area_centroid(&poly).1;
            if geometry::point_in_polygon(c, h) {
                poly.clear();
            }
        }
    }
    poly
}

fn segment_hits_polygon(a: Point2, b: Point2, poly: &[Point2]) -> bool {
    let n = poly.len();
    if geometry::point_in_polygon(a, poly) || geometry::point_in_polygon(b, poly) {
        return true;
    }
    (0..n).any(|i| geometry::segments_cross(a, b, poly[i], poly[(i + 1) % n]))
}

/// Converts the active leaves of a (balanced) tree into a conforming mesh.
pub fn quadtree_to_mesh(qt: &Quadtree) -> Result<QuadMesh> {
    let root_side = qt.nodes[0].side;
    let eps_v = 1e-9 * root_side;
    let domain = &qt.domain;
    let leaves = qt.leaves();

    // clip leaves
    let mut polys: Vec<(usize, Vec<Point2>, bool)> = Vec::with_capacity(leaves.len());
    for &id in &leaves {
        let node = &qt.nodes[id];
        let poly = leaf_polygon(domain, node);
        if poly.len() < 3 {
            continue;
        }
        let a = geometry::signed_area(&poly);
        let full = node.side * node.side;
        if a <= 1e-12 * full {
            continue;
        }
        polys.push((id, poly, a < SLIVER_FRACTION * full));
    }
    if polys.is_empty() {
        return Err(Error::EmptyDomain);
    }

    // shared vertices
    let mut pool = VertexPool::new(eps_v);
    let mut loops: Vec<Vec<usize>> = Vec::with_capacity(polys.len());
    for (_, poly, _) in &polys {
        let mut l: Vec<usize> = poly.iter().map(|&p| pool.insert(p)).collect();
        l.dedup();
        while l.len() > 1 && l[0] == *l.last().unwrap() {
            l.pop();
        }
        loops.push(l);
    }
    let verts = pool.pts;

    // hanging nodes and other T-junctions become loop vertices
    let min_side = leaves.iter().map(|&id| qt.nodes[id].side).fold(f64::INFINITY, f64::min);
    let bucket = min_side;
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in verts.iter().enumerate() {
        grid.entry(((p.x / bucket).floor() as i64, (p.y / bucket).floor() as i64)).or_default().push(i);
    }
    for l in loops.iter_mut() {
        let n = l.len();
        let mut out = Vec::with_capacity(n + 4);
        for i in 0..n {
            let (va, vb) = (l[i], l[(i + 1) % n]);
            out.push(va);
            let (a, b) = (verts[va], verts[vb]);
            let (lo, hi) = geometry::bbox(&[a, b]);
            let (i0, i1) = ((lo.x / bucket).floor() as i64 - 1, (hi.x / bucket).floor() as i64 + 1);
            let (j0, j1) = ((lo.y / bucket).floor() as i64 - 1, (hi.y / bucket).floor() as i64 + 1);
            let mut on: Vec<(f64, usize)> = Vec::new();
            for gj in j0..=j1 {
                for gi in i0..=i1 {
                    if let Some(ids) = grid.get(&(gi, gj)) {
                        for &v in ids {
                            if v == va || v == vb {
                                continue;
                            }
                            let (d, t) = geometry::point_segment_distance(verts[v], a, b);
                            if d <= eps_v && t > 0.0 && t < 1.0 {
                                on.push((t, v));
                            }
                        }
                    }
                }
            }
            on.sort_by(|x, y| x.0.total_cmp(&y.0));
            out.extend(on.into_iter().map(|(_, v)| v));
        }
        out.dedup();
        *l = out;
    }

    let mut leaf_of: Vec<usize> = polys.iter().map(|p| p.0).collect();
    let mut alive: Vec<bool> = vec![true; loops.len()];

    // merge slivers into the neighbour with the longest shared edge
    for s in 0..loops.len() {
        if !polys[s].2 {
            continue;
        }
        let sedges = directed_edges(&loops[s]);
        let skeys: HashSet<(usize, usize)> = sedges.iter().map(|&(a, b)| key(a, b)).collect();
        let mut best: Option<(usize, f64)> = None;
        for (c, l) in loops.iter().enumerate() {
            if c == s || !alive[c] {
                continue;
            }
            let shared: f64 = directed_edges(l)
                .iter()
                .filter(|&&(a, b)| skeys.contains(&key(a, b)))
                .map(|&(a, b)| verts[a].dist(verts[b]))
                .sum();
            if shared > 0.0 && best.is_none_or(|(_, bl)| shared > bl) {
                best = Some((c, shared));
            }
        }
        let merged = best.and_then(|(c, _)| merge_loops(&loops[c], &loops[s], &verts).map(|m| (c, m)));
        match merged {
            Some((c, m)) => {
                loops[c] = m;
            }
            None => {}
        }
        alive[s] = false;
    }

    // compact
    let mut cells = Vec::new();
    let mut kept_leaf = Vec::new();
    for (i, l) in loops.into_iter().enumerate() {
        if alive[i] {
            cells.push(l);
            kept_leaf.push(leaf_of[i]);
        }
    }
    leaf_of = kept_leaf;
    let mut remap = vec![usize::MAX; verts.len()];
    let mut new_verts = Vec::new();
    for l in &cells {
        for &v in l {
            if remap[v] == usize::MAX {
                remap[v] = new_verts.len();
                new_verts.push(verts[v]);
            }
        }
    }
    // renumber in original pool order so ids are independent of cell order
    let mut order: Vec<usize> = (0..verts.len()).filter(|&v| remap[v] != usize::MAX).collect();
    order.sort_unstable();
    new_verts.clear();
    for (k, &v) in order.iter().enumerate() {
        remap[v] = k;
        new_verts.push(verts[v]);
    }
    for l in cells.iter_mut() {
        for v in l.iter_mut() {
            *v = remap[*v];
        }
    }

    // boundary tags
    let mut uses: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for l in &cells {
        for (a, b) in directed_edges(l) {
            *uses.entry(key(a, b)).or_default() += 1;
        }
    }
    let tag_tol = 1e-7 * root_side;
    let tags = uses
        .into_iter()
        .filter(|&(_, n)| n == 1)
        .map(|((a, b), _)| ((a, b), domain.tag_for_segment(new_verts[a], new_verts[b], tag_tol)))
        .collect();

    let mesh = build_poly_mesh(MeshInput { vertices: new_verts, cells, regions: vec![], tags })?;
    Ok(QuadMesh { mesh, leaf_of_cell: leaf_of })
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn directed_edges(l: &[usize]) -> Vec<(usize, usize)> {
    let n = l.len();
    (0..n).map(|i| (l[i], l[(i + 1) % n])).collect()
}

/// Union of two CCW loops sharing one contiguous chain of edges. Returns
/// `None` if the union is not a single loop or has a reflex corner.
fn merge_loops(a: &[usize], b: &[usize], verts: &[Point2]) -> Option<Vec<usize>> {
    let ea = directed_edges(a);
    let eb = directed_edges(b);
    let shared: HashSet<(usize, usize)> =
        ea.iter().filter(|&&(x, y)| eb.contains(&(y, x))).map(|&(x, y)| key(x, y)).collect();
    if shared.is_empty() {
        return None;
    }
    let mut next: HashMap<usize, usize> = HashMap::new();
    for &(x, y) in ea.iter().chain(eb.iter()) {
        if !shared.contains(&key(x, y)) && next.insert(x, y).is_some() {
            return None;
        }
    }
    let start = *next.keys().min()?;
    let mut out = vec![start];
    let mut cur = next[&start];
    while cur != start {
        out.push(cur);
        cur = *next.get(&cur)?;
        if out.len() > next.len() {
            return None;
        }
    }
    if out.len() != next.len() {
        return None;
    }
    let pts: Vec<Point2> = out.iter().map(|&v| verts[v]).collect();
    if geometry::convexity(&pts, 1e-8) == Convexity::Reflex {
        return None;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_domain(s: f64) -> Domain {
        Domain::simple(vec![Point2::new(0.0, 0.0), Point2::new(s, 0.0), Point2::new(s, s), Point2::new(0.0, s)], "wall")
            .unwrap()
    }

    fn leaf_depths(q: &Quadtree) -> Vec<u32> {
        q.leaves().iter().map(|&l| q.node(l).depth).collect()
    }

    #[test]
    fn uniform_quarter_size_gives_sixteen_leaves() {
        let d = square_domain(1.0);
        let (q, rep) = generate_quadtree(&d, &|_| 0.25, 10).unwrap();
        assert_eq!(q.leaves().len(), 16);
        assert!(rep.depth_exceeded.is_empty());
        assert!(leaf_depths(&q).iter().all(|&d| d == 2));
    }

    #[test]
    fn depth_cap_is_reported_not_fatal() {
        let d = square_domain(1.0);
        let (q, rep) = generate_quadtree(&d, &|_| 0.01, 2).unwrap();
        assert_eq!(q.leaves().len(), 16);
        assert_eq!(rep.depth_exceeded.len(), 16);
    }

    #[test]
    fn single_leaf_mesh() {
        let d = square_domain(2.0);
        let (q, _) = generate_quadtree(&d, &|_| 10.0, 5).unwrap();
        let m = q.to_mesh().unwrap().mesh;
        assert_eq!(m.num_cells(), 1);
        assert_eq!(m.num_nodes(), 4);
        assert_eq!(m.total_area(), 4.0);
    }

    #[test]
    fn one_refined_quadrant_gives_pentagons() {
        let d = square_domain(1.0);
        let (q, _) = generate_quadtree(&d, &|p| if p.x < 0.5 && p.y < 0.5 { 0.25 } else { 0.5 }, 6).unwrap();
        let m = q.balanced().to_mesh().unwrap().mesh;
        let mut counts: Vec<usize> = m.cells().iter().map(|c| c.vertices.len()).collect();
        counts.sort_unstable();
        // four fine squares, the far quadrant square, two neighbours with one hanging node each
        assert_eq!(counts, vec![4, 4, 4, 4, 4, 5, 5]);
        assert_eq!(m.num_nodes(), 14);
    }

    #[test]
    fn refine_nothing_is_identity() {
        let d = square_domain(1.0);
        let (q, _) = generate_quadtree(&d, &|_| 0.5, 6).unwrap();
        let (r, rep) = q.refine_cells(&[]);
        assert_eq!(r.leaves(), q.leaves());
        assert!(rep.depth_exceeded.is_empty());
    }

    #[test]
    fn refine_all_goes_one_level_deeper() {
        let d = square_domain(1.0);
        let (q, _) = generate_quadtree(&d, &|_| 0.5, 6).unwrap();
        let (r, _) = q.refine_cells(&q.leaves());
        assert_eq!(r.leaves().len(), 16);
        assert!(leaf_depths(&r).iter().all(|&d| d == 2));
    }

    #[test]
    fn clipped_triangle_domain_is_tiled() {
        let d = Domain::simple(vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 0.7)], "w").unwrap();
        let (q, _) = generate_quadtree(&d, &|_| 0.1, 8).unwrap();
        let m = q.balanced().to_mesh().unwrap().mesh;
        assert!((m.total_area() - 0.35).abs() < 1e-3 * 0.35);
    }
}
