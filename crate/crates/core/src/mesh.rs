//! Polygonal meshes: construction, validation, text serialization and
//! point location.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{self, Point2};

/// Label attached to boundary edges. The free-surface driver uses the
/// conventional names `G1`..`G5`; any whitespace-free token is accepted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tag(pub String);

impl Tag {
    pub fn new(s: impl Into<String>) -> Self {
        Tag(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Tag {
    fn from(s: &str) -> Self {
        Tag(s.to_string())
    }
}

impl std::fmt::Display for Tag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyCell {
    /// Counter-clockwise vertex loop.
    pub vertices: Vec<usize>,
    pub region: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub tag: Tag,
}

/// Immutable, validated polygonal mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMesh {
    vertices: Vec<Point2>,
    cells: Vec<PolyCell>,
    boundary: Vec<BoundaryEdge>,
}

/// Raw input to [`build_poly_mesh`].
#[derive(Clone, Debug, Default)]
pub struct MeshInput {
    pub vertices: Vec<Point2>,
    pub cells: Vec<Vec<usize>>,
    /// One region id per cell; empty means region 0 everywhere.
    pub regions: Vec<u32>,
    /// Tags keyed by unordered vertex pair.
    pub tags: BTreeMap<(usize, usize), Tag>,
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Validates and orients raw mesh data.
pub fn build_poly_mesh(input: MeshInput) -> Result<PolyMesh> {
    let MeshInput { vertices, cells, regions, tags } = input;
    let nv = vertices.len();
    for (i, p) in vertices.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::NonFiniteVertex { vertex: i });
        }
    }
    let mut used = vec![false; nv];
    let mut out_cells = Vec::with_capacity(cells.len());
    let mut areas = Vec::with_capacity(cells.len());
    for (ci, mut loop_) in cells.into_iter().enumerate() {
        if loop_.len() < 3 {
            return Err(Error::DegenerateCell { cell: ci, area: 0.0 });
        }
        for &v in &loop_ {
            if v >= nv {
                return Err(Error::IndexOutOfRange { index: v, count: nv });
            }
            used[v] = true;
        }
        let mut sorted = loop_.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DegenerateCell { cell: ci, area: 0.0 });
        }
        let pts: Vec<Point2> = loop_.iter().map(|&v| vertices[v]).collect();
        if geometry::is_self_intersecting(&pts) {
            return Err(Error::SelfIntersecting { cell: ci });
        }
        let mut a = geometry::signed_area(&pts);
        if a < 0.0 {
            loop_.reverse();
            a = -a;
        }
        areas.push(a);
        let region = regions.get(ci).copied().unwrap_or(0);
        out_cells.push(PolyCell { vertices: loop_, region });
    }
    if let Some(v) = used.iter().position(|u| !u) {
        return Err(Error::DanglingVertex { vertex: v });
    }
    let total: f64 = areas.iter().sum();
    if out_cells.is_empty() || total <= 0.0 {
        return Err(Error::EmptyDomain);
    }
    let eps_area = 1e-12 * total;
    for (ci, &a) in areas.iter().enumerate() {
        if a <= eps_area {
            return Err(Error::DegenerateCell { cell: ci, area: a });
        }
    }

    let mut uses: HashMap<(usize, usize), usize> = HashMap::new();
    for c in &out_cells {
        let n = c.vertices.len();
        for i in 0..n {
            *uses.entry(edge_key(c.vertices[i], c.vertices[(i + 1) % n])).or_default() += 1;
        }
    }
    let mut bad: Vec<_> = uses.iter().filter(|(_, &n)| n > 2).map(|(&k, &n)| (k, n)).collect();
    bad.sort();
    if let Some(((a, b), count)) = bad.first().copied() {
        return Err(Error::NonManifoldEdge { a, b, count });
    }

    let mut boundary = Vec::with_capacity(tags.len());
    for ((a, b), tag) in tags {
        let k = edge_key(a, b);
        if uses.get(&k).copied() != Some(1) {
            return Err(Error::NotABoundaryEdge { a, b });
        }
        boundary.push(BoundaryEdge { a: k.0, b: k.1, tag });
    }

    Ok(PolyMesh { vertices, cells: out_cells, boundary })
}

impl PolyMesh {
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn cells(&self) -> &[PolyCell] {
        &self.cells
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    pub fn num_nodes(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_points(&self, cell: usize) -> Vec<Point2> {
        self.cells[cell].vertices.iter().map(|&v| self.vertices[v]).collect()
    }

    /// Shoelace area and centroid of a cell.
    pub fn polygon_area_centroid(&self, cell: usize) -> (f64, Point2) {
        geometry::area_centroid(&self.cell_points(cell))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.cells.len()).map(|c| self.polygon_area_centroid(c).0).sum()
    }

    /// Sorted, de-duplicated node ids touched by edges carrying `tag`.
    pub fn tagged_nodes(&self, tag: &str) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .boundary
            .iter()
            .filter(|e| e.tag.as_str() == tag)
            .flat_map(|e| [e.a, e.b])
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.boundary.iter().any(|e| e.tag.as_str() == tag)
    }

    /// Map from undirected boundary edge to tag.
    pub fn edge_tags(&self) -> HashMap<(usize, usize), &Tag> {
        self.boundary.iter().map(|e| (edge_key(e.a, e.b), &e.tag)).collect()
    }

    /// Edges used by exactly one cell, as (cell, local edge index).
    pub fn free_edges(&self) -> Vec<(usize, usize)> {
        let mut uses: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (ci, c) in self.cells.iter().enumerate() {
            let n = c.vertices.len();
            for i in 0..n {
                uses.entry(edge_key(c.vertices[i], c.vertices[(i + 1) % n])).or_default().push((ci, i));
            }
        }
        let mut out: Vec<_> = uses.into_values().filter(|v| v.len() == 1).map(|v| v[0]).collect();
        out.sort_unstable();
        out
    }

    /// Returns a copy with different region labels.
    pub fn with_regions(&self, regions: &[u32]) -> PolyMesh {
        let mut m = self.clone();
        for (c, &r) in m.cells.iter_mut().zip(regions) {
            c.region = r;
        }
        m
    }

    /// Text serialization (`polymesh 1` format). Coordinates use the
    /// shortest decimal that round-trips exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "polymesh 1");
        let _ = writeln!(s, "{} {} {}", self.vertices.len(), self.cells.len(), self.boundary.len());
        for p in &self.vertices {
            let _ = writeln!(s, "{:?} {:?}", p.x, p.y);
        }
        for c in &self.cells {
            let _ = write!(s, "{} {}", c.vertices.len(), c.region);
            for v in &c.vertices {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        for e in &self.boundary {
            let _ = writeln!(s, "{} {} {}", e.a, e.b, e.tag);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<PolyMesh> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut next = |what: &str| {
            lines
                .next()
                .map(|(i, l)| (i + 1, l))
                .ok_or_else(|| Error::MeshFormat { line: 0, msg: format!("unexpected end of file, expected {what}") })
        };
        let (ln, header) = next("header")?;
        if header.trim() != "polymesh 1" {
            return Err(Error::MeshFormat { line: ln, msg: format!("bad header '{}'", header.trim()) });
        }
        let (ln, counts) = next("counts")?;
        let counts: Vec<usize> = parse_tokens(counts, ln)?;
        if counts.len() != 3 {
            return Err(Error::MeshFormat { line: ln, msg: "expected 'nv nc nb'".into() });
        }
        let (nv, nc, nb) = (counts[0], counts[1], counts[2]);
        let mut input = MeshInput::default();
        for _ in 0..nv {
            let (ln, l) = next("vertex")?;
            let xy: Vec<f64> = parse_tokens(l, ln)?;
            if xy.len() != 2 {
                return Err(Error::MeshFormat { line: ln, msg: "expected 'x y'".into() });
            }
            input.vertices.push(Point2::new(xy[0], xy[1]));
        }
        for _ in 0..nc {
            let (ln, l) = next("cell")?;
            let toks: Vec<usize> = parse_tokens(l, ln)?;
            if toks.len() < 2 || toks.len() != toks[0] + 2 {
                return Err(Error::MeshFormat { line: ln, msg: "expected 'k region v0 .. v(k-1)'".into() });
            }
            input.regions.push(toks[1] as u32);
            input.cells.push(toks[2..].to_vec());
        }
        for _ in 0..nb {
            let (ln, l) = next("boundary edge")?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::MeshFormat { line: ln, msg: "expected 'va vb tag'".into() });
            }
            let a = toks[0].parse().map_err(|_| Error::MeshFormat { line: ln, msg: "bad index".into() })?;
            let b = toks[1].parse().map_err(|_| Error::MeshFormat { line: ln, msg: "bad index".into() })?;
            input.tags.insert(edge_key(a, b), Tag::new(toks[2]));
        }
        build_poly_mesh(input)
    }

    pub fn builder_input(&self) -> MeshInput {
        MeshInput {
            vertices: self.vertices.clone(),
            cells: self.cells.iter().map(|c| c.vertices.clone()).collect(),
            regions: self.cells.iter().map(|c| c.region).collect(),
            tags: self.boundary.iter().map(|e| (edge_key(e.a, e.b), e.tag.clone())).collect(),
        }
    }
}

fn parse_tokens<T: std::str::FromStr>(line: &str, ln: usize) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|t| t.parse::<T>().map_err(|_| Error::MeshFormat { line: ln, msg: format!("cannot parse '{t}'") }))
        .collect()
}

/// Bucket grid over cell bounding boxes for point location.
#[derive(Clone, Debug)]
pub struct CellLocator {
    lo: Point2,
    inv_h: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
    tol: f64,
}

impl CellLocator {
    pub fn new(mesh: &PolyMesh) -> Self {
        let (lo, hi) = geometry::bbox(mesh.vertices());
        let w = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
        let n = ((mesh.num_cells() as f64).sqrt().ceil() as usize).clamp(1, 512);
        let h = w / n as f64;
        let nx = (((hi.x - lo.x) / h).floor() as usize + 1).min(n + 1);
        let ny = (((hi.y - lo.y) / h).floor() as usize + 1).min(n + 1);
        let tol = 1e-10 * w;
        let mut buckets = vec![Vec::new(); nx * ny];
        let inv_h = 1.0 / h;
        for c in 0..mesh.num_cells() {
            let (clo, chi) = geometry::bbox(&mesh.cell_points(c));
            let i0 = (((clo.x - tol - lo.x) * inv_h).floor().max(0.0) as usize).min(nx - 1);
            let i1 = (((chi.x + tol - lo.x) * inv_h).floor().max(0.0) as usize).min(nx - 1);
            let j0 = (((clo.y - tol - lo.y) * inv_h).floor().max(0.0) as usize).min(ny - 1);
            let j1 = (((chi.y + tol - lo.y) * inv_h).floor().max(0.0) as usize).min(ny - 1);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(c);
                }
            }
        }
        CellLocator { lo, inv_h, nx, ny, buckets, tol }
    }

    /// Lowest-id cell containing `p` (boundary inclusive).
    pub fn locate(&self, mesh: &PolyMesh, p: Point2) -> Option<usize> {
        let i = ((p.x - self.lo.x) * self.inv_h).floor();
        let j = ((p.y - self.lo.y) * self.inv_h).floor();
        if i < -1.0 || j < -1.0 {
            return None;
        }
        let i = (i.max(0.0) as usize).min(self.nx - 1);
        let j = (j.max(0.0) as usize).min(self.ny - 1);
        // buckets hold ids in ascending order
        self.buckets[j * self.nx + i].iter().copied().find(|&c| cell_contains(mesh, c, p, self.tol))
    }
}

/// Boundary-inclusive containment test for one cell.
pub fn cell_contains(mesh: &PolyMesh, cell: usize, p: Point2, tol: f64) -> bool {
    let pts = mesh.cell_points(cell);
    let n = pts.len();
    for i in 0..n {
        if geometry::point_segment_distance(p, pts[i], pts[(i + 1) % n]).0 <= tol {
            return true;
        }
    }
    geometry::point_in_polygon(p, &pts)
}
