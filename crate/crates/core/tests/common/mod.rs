//! Mesh fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use polyseep::domain::Domain;
use polyseep::mesh::{build_poly_mesh, MeshInput, PolyMesh, Tag};
use polyseep::quadtree::generate_quadtree;
use polyseep::Point2;

pub mod oracles;

/// Structured `nx × ny` quad grid on `[0, w] × [0, ht]` with edges tagged
/// `bottom`, `right`, `top`, `left`.
pub fn grid(nx: usize, ny: usize, w: f64, ht: f64) -> PolyMesh {
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut vertices = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push(Point2::new(w * i as f64 / nx as f64, ht * j as f64 / ny as f64));
        }
    }
    let mut cells = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut tags = BTreeMap::new();
    for i in 0..nx {
        tags.insert((id(i, 0), id(i + 1, 0)), Tag::from("bottom"));
        tags.insert((id(i, ny), id(i + 1, ny)), Tag::from("top"));
    }
    for j in 0..ny {
        tags.insert((id(0, j), id(0, j + 1)), Tag::from("left"));
        tags.insert((id(nx, j), id(nx, j + 1)), Tag::from("right"));
    }
    build_poly_mesh(MeshInput { vertices, cells, regions: vec![], tags }).unwrap()
}

pub fn rectangle(w: f64, ht: f64) -> Domain {
    let pts = vec![Point2::new(0.0, 0.0), Point2::new(w, 0.0), Point2::new(w, ht), Point2::new(0.0, ht)];
    let tags = ["bottom", "right", "top", "left"].map(Tag::from).to_vec();
    Domain::new(pts, tags, vec![]).unwrap()
}

/// Balanced quadtree mesh of the unit square, refined to `fine` inside the
/// disc of radius 0.3 around (0.3, 0.3) and `coarse` elsewhere, so that it
/// carries hanging nodes.
pub fn graded_square(coarse: f64, fine: f64) -> PolyMesh {
    let size = move |p: Point2| if (p - Point2::new(0.3, 0.3)).norm() < 0.3 { fine } else { coarse };
    let (tree, _) = generate_quadtree(&rectangle(1.0, 1.0), &size, 12).unwrap();
    tree.balanced().to_mesh().unwrap().mesh
}
