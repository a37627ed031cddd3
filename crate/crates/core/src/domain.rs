//! Domain description used by the mesh generators: one outer loop, optional
//! hole loops, and a tag per loop edge.

use crate::error::{Error, Result};
use crate::geometry::{self, Point2};
use crate::mesh::Tag;

#[derive(Clone, Debug)]
pub struct Domain {
    /// Counter-clockwise outer boundary.
    pub outer: Vec<Point2>,
    /// Clockwise hole boundaries.
    pub holes: Vec<Vec<Point2>>,
    /// `outer_tags[i]` labels edge `outer[i] -> outer[i+1]`.
    pub outer_tags: Vec<Tag>,
    pub hole_tags: Vec<Vec<Tag>>,
}

/// A boundary segment of the domain with its tag.
#[derive(Clone, Debug)]
pub struct DomainEdge<'a> {
    pub a: Point2,
    pub b: Point2,
    pub tag: &'a Tag,
}

impl Domain {
    /// Builds a domain from closed loops (first outer, rest holes), each
    /// with one tag per edge. Orientation is normalized.
    pub fn new(outer: Vec<Point2>, outer_tags: Vec<Tag>, holes: Vec<(Vec<Point2>, Vec<Tag>)>) -> Result<Self> {
        let (outer, outer_tags) = normalize_loop(outer, outer_tags, true)?;
        let mut hs = Vec::new();
        let mut hts = Vec::new();
        for (h, t) in holes {
            let (h, t) = normalize_loop(h, t, false)?;
            if !h.iter().all(|&p| geometry::point_in_polygon(p, &outer)) {
                return Err(Error::EmptyDomain);
            }
            hs.push(h);
            hts.push(t);
        }
        Ok(Domain { outer, holes: hs, outer_tags, hole_tags: hts })
    }

    /// Outer loop with a single tag on every edge.
    pub fn simple(outer: Vec<Point2>, tag: &str) -> Result<Self> {
        let tags = vec![Tag::from(tag); outer.len()];
        Domain::new(outer, tags, vec![])
    }

    pub fn area(&self) -> f64 {
        geometry::signed_area(&self.outer) + self.holes.iter().map(|h| geometry::signed_area(h)).sum::<f64>()
    }

    pub fn bbox(&self) -> (Point2, Point2) {
        geometry::bbox(&self.outer)
    }

    pub fn contains(&self, p: Point2) -> bool {
        geometry::point_in_polygon(p, &self.outer) && !self.holes.iter().any(|h| geometry::point_in_polygon(p, h))
    }

    pub fn edges(&self) -> Vec<DomainEdge<'_>> {
        let loops = std::iter::once((&self.outer, &self.outer_tags)).chain(self.holes.iter().zip(&self.hole_tags));
        let mut out = Vec::new();
        for (pts, tags) in loops {
            let n = pts.len();
            for i in 0..n {
                out.push(DomainEdge { a: pts[i], b: pts[(i + 1) % n], tag: &tags[i] });
            }
        }
        out
    }

    /// Tag of the domain edge carrying segment `a`–`b`; falls back to the
    /// edge nearest to the midpoint when the segment lies on no edge.
    pub fn tag_for_segment(&self, a: Point2, b: Point2, tol: f64) -> Tag {
        let edges = self.edges();
        for e in &edges {
            if geometry::point_segment_distance(a, e.a, e.b).0 <= tol
                && geometry::point_segment_distance(b, e.a, e.b).0 <= tol
            {
                return e.tag.clone();
            }
        }
        let m = a.lerp(b, 0.5);
        edges
            .iter()
            .min_by(|x, y| {
                let dx = geometry::point_segment_distance(m, x.a, x.b).0;
                let dy = geometry::point_segment_distance(m, y.a, y.b).0;
                dx.total_cmp(&dy)
            })
            .map(|e| e.tag.clone())
            .unwrap_or_else(|| Tag::from("boundary"))
    }
}

fn normalize_loop(mut pts: Vec<Point2>, mut tags: Vec<Tag>, ccw: bool) -> Result<(Vec<Point2>, Vec<Tag>)> {
    if pts.len() > 1 && pts[0] == *pts.last().unwrap() {
        pts.pop();
    }
    if pts.len() < 3 || pts.iter().any(|p| !p.is_finite()) {
        return Err(Error::EmptyDomain);
    }
    if tags.len() != pts.len() {
        return Err(Error::Validation(vec![format!(
            "domain loop has {} vertices but {} edge tags",
            pts.len(),
            tags.len()
        )]));
    }
    let a = geometry::signed_area(&pts);
    if a == 0.0 {
        return Err(Error::EmptyDomain);
    }
    if (a > 0.0) != ccw {
        // reversing the vertices maps edge i -> i+1 onto edge n-2-i
        pts.reverse();
        let n = tags.len();
        let mut t2 = Vec::with_capacity(n);
        for i in 0..n {
            t2.push(tags[(2 * n - 2 - i) % n].clone());
        }
        tags = t2;
    }
    Ok((pts, tags))
}
