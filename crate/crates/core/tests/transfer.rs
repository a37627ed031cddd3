//! Interpolating head fields onto refined quadtree meshes.

mod common;

use polyseep::free_surface::transfer_solution;
use polyseep::mesh::PolyMesh;
use polyseep::problem::HeadField;
use polyseep::quadtree::{generate_quadtree, Quadtree};
use polyseep::shape::ShapeMode;
use polyseep::{Error, Point2};
use proptest::prelude::*;

fn uniform_tree(h: f64) -> Quadtree {
    generate_quadtree(&common::rectangle(1.0, 1.0), &|_| h, 12).unwrap().0.balanced()
}

/// Quadtree with hanging nodes around a refined disc.
fn graded_tree() -> Quadtree {
    let size = |p: Point2| if (p - Point2::new(0.3, 0.3)).norm() < 0.3 { 0.0625 } else { 0.25 };
    generate_quadtree(&common::rectangle(1.0, 1.0), &size, 12).unwrap().0.balanced()
}

fn mesh(t: &Quadtree) -> PolyMesh {
    t.to_mesh().unwrap().mesh
}

fn sample(m: &PolyMesh, f: impl Fn(Point2) -> f64) -> HeadField {
    HeadField::new(m.vertices().iter().map(|&p| f(p)).collect(), 0.0)
}

fn max_error(h: &HeadField, m: &PolyMesh, f: impl Fn(Point2) -> f64) -> f64 {
    h.values.iter().zip(m.vertices()).map(|(v, &p)| (v - f(p)).abs()).fold(0.0, f64::max)
}

/// Marks the leaves whose centre lies in the band `|x + y − 1| < w`.
fn band(t: &Quadtree, w: f64) -> Vec<usize> {
    t.leaves().into_iter().filter(|&id| {
        let c = t.node(id).center();
        (c.x + c.y - 1.0).abs() < w
    }).collect()
}

#[test]
fn linear_fields_transfer_exactly() {
    let f = |p: Point2| 2.0 - 0.7 * p.x + 1.3 * p.y;
    let old_tree = graded_tree();
    let (new_tree, _) = old_tree.refine_cells(&band(&old_tree, 0.3));
    let (mo, mn) = (mesh(&old_tree), mesh(&new_tree));
    assert!(mn.num_nodes() > mo.num_nodes());
    for mode in [ShapeMode::Auto, ShapeMode::MeanValue] {
        let h = transfer_solution(&sample(&mo, f), &mo, &mn, mode).unwrap();
        let err = max_error(&h, &mn, f);
        assert!(err <= 1e-10, "{mode:?}: {err:e}");
    }
}

#[test]
fn retained_nodes_keep_their_values() {
    let f = |p: Point2| (4.0 * p.x).sin() * (3.0 * p.y).cos();
    let old_tree = graded_tree();
    let (new_tree, _) = old_tree.refine_cells(&band(&old_tree, 0.2));
    let (mo, mn) = (mesh(&old_tree), mesh(&new_tree));
    let old = sample(&mo, f);
    let h = transfer_solution(&old, &mo, &mn, ShapeMode::Auto).unwrap();
    let mut retained = 0;
    for (i, p) in mo.vertices().iter().enumerate() {
        if let Some(j) = mn.vertices().iter().position(|q| q.dist(*p) < 1e-12) {
            assert_eq!(h.values[j], old.values[i]);
            retained += 1;
        }
    }
    assert_eq!(retained, mo.num_nodes());
}

#[test]
fn quadratic_interpolation_error_shrinks_like_h_squared() {
    let f = |p: Point2| p.x * p.x + 0.5 * p.x * p.y - p.y * p.y;
    let mut errs = Vec::new();
    for h in [0.25, 0.125, 0.0625, 0.03125] {
        let t = uniform_tree(h);
        let (fine, _) = t.refine_cells(&t.leaves());
        let (mo, mn) = (mesh(&t), mesh(&fine));
        let moved = transfer_solution(&sample(&mo, f), &mo, &mn, ShapeMode::Auto).unwrap();
        errs.push(max_error(&moved, &mn, f));
    }
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        println!("error {:.3e} -> {:.3e}, ratio {ratio:.2}", w[0], w[1]);
        assert!(w[1] < w[0]);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn identical_meshes_and_outside_nodes() {
    let t = graded_tree();
    let m = mesh(&t);
    let h = sample(&m, |p| p.x * p.y);
    assert_eq!(transfer_solution(&h, &m, &m, ShapeMode::Auto).unwrap(), h);

    let wider = mesh(&generate_quadtree(&common::rectangle(1.5, 1.0), &|_| 0.25, 12).unwrap().0.balanced());
    assert!(matches!(transfer_solution(&h, &m, &wider, ShapeMode::Auto), Err(Error::NodeOutsideOldMesh { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_linear_fields_survive_random_refinement(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, w in 0.05f64..0.5) {
        let f = move |p: Point2| a + b * p.x + c * p.y;
        let t = graded_tree();
        let (fine, _) = t.refine_cells(&band(&t, w));
        let (mo, mn) = (mesh(&t), mesh(&fine));
        let h = transfer_solution(&sample(&mo, f), &mo, &mn, ShapeMode::Auto).unwrap();
        prop_assert!(max_error(&h, &mn, f) <= 1e-10 * (1.0 + a.abs() + b.abs() + c.abs()));
    }
}
