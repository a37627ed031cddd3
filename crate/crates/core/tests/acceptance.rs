//! Acceptance suite: one PASS/FAIL line per criterion, with the measured
//! numbers and runtimes. Exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use common::oracles::{check_basis, check_element, oracle_error, random_polygon, test_pentagons, with_hanging_node};
use nalgebra::{DMatrix, DVector};
use polyseep::benchmarks::{foundation, patch, rect_dam, trapezoid_dam};
use polyseep::config::parse_config;
use polyseep::free_surface::FreeSurfaceResult;
use polyseep::geometry;
use polyseep::mesh::{CellLocator, PolyMesh};
use polyseep::problem::{HeadField, HeadSpec, Material, SeepageProblem, TimeGrid};
use polyseep::runner::{self, RunResult};
use polyseep::seepage::{darcy_flux, probe, relative_error_values, run_transient, solve_steady, step_transient};
use polyseep::solver::{solve_spd, SolverOptions};
use polyseep::sparse::CsrMatrix;
use polyseep::Point2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn record(&mut self, id: &str, pass: bool, text: String, secs: f64) {
        let line = format!("{} {id:<3} {text} [{secs:.2} s]", if pass { "PASS" } else { "FAIL" });
        println!("{line}");
        self.lines.push((pass, line));
    }

    fn detail(&self, text: impl AsRef<str>) {
        println!("         {}", text.as_ref());
    }
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn execute(name: &str) -> (RunResult, f64) {
    let cfg = parse_config(configs().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    let t = Instant::now();
    let r = runner::execute(&cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
    (r, t.elapsed().as_secs_f64())
}

fn fs(r: &RunResult) -> &FreeSurfaceResult {
    r.free_surface.as_ref().expect("free-surface run")
}

fn patch_test(rep: &mut Report) {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    let mut hanging = false;
    for (name, mesh) in [("polygonal", patch::polygonal_mesh(1).unwrap()), ("quadtree", patch::quadtree_mesh().unwrap())] {
        if name == "quadtree" {
            hanging = mesh.cells().iter().any(|c| c.vertices.len() > 4);
        }
        let exact: Vec<f64> = mesh.vertices().iter().map(|&p| patch::exact(p)).collect();
        let h = solve_steady(&patch::problem(mesh)).unwrap();
        let e = relative_error_values(&h.values, &exact).unwrap();
        worst = worst.max(e);
        parts.push(format!("{name} e_L2 = {e:.2e}"));
    }
    let secs = t.elapsed().as_secs_f64();
    let pass = worst <= 1e-7 && hanging && secs < 1.0;
    rep.record("1", pass, format!("patch test: {} (limit 1e-7, hanging nodes: {hanging}, < 1 s)", parts.join(", ")), secs);
}

fn foundation_test(rep: &mut Report) {
    let t = Instant::now();
    let pts = foundation::monitoring_points();
    let exact: Vec<f64> = pts.iter().map(|p| foundation::exact_base(p.x)).collect();
    let mut errs = Vec::new();
    let mut at5 = None;
    for size in foundation::SIZES {
        let mesh = foundation::mesh(size, 1).unwrap();
        let p = foundation::problem(mesh);
        let h = solve_steady(&p).unwrap();
        let num = probe(&p.mesh, &h.values, &pts).unwrap();
        let e = relative_error_values(&num, &exact).unwrap();
        rep.detail(format!(
            "{size:>4} m: {} elements, h1 = {:.4}, h2 = {:.4}, e_L2 = {e:.3e}",
            p.mesh.num_cells(),
            num[0],
            num[1]
        ));
        if size == 5.0 {
            at5 = Some((num.clone(), e));
        }
        errs.push(e);
    }
    let secs = t.elapsed().as_secs_f64();
    let (num, e5) = at5.expect("5 m mesh in the series");
    let rel: Vec<f64> = num.iter().zip(&exact).map(|(n, x)| ((n - x) / x).abs()).collect();
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let pass = rel.iter().all(|&r| r <= 0.01) && e5 <= 2e-2 && monotone && secs < 30.0;
    rep.record(
        "2",
        pass,
        format!(
            "dam foundation at 5 m: {:.4} / {:.4} m (errors {:.2}% / {:.2}%, limit 1%), e_L2 = {e5:.2e} (limit 2e-2), refinement monotone: {monotone} (< 30 s)",
            num[0],
            num[1],
            100.0 * rel[0],
            100.0 * rel[1]
        ),
        secs,
    );
}

struct DamRuns {
    quadtree_error: f64,
    quadtree_dofs: usize,
    adaptive: RunResult,
}

fn x_o_error(r: &RunResult) -> f64 {
    ((fs(r).state.x_o - rect_dam::EXIT) / rect_dam::EXIT).abs()
}

fn rect_dam_test(rep: &mut Report) -> DamRuns {
    let mut all = true;
    let mut parts = Vec::new();
    let mut total = 0.0;
    let mut keep = BTreeMap::new();
    for (label, name) in [
        ("polygonal", "rect_dam_polygonal.toml"),
        ("quadtree", "rect_dam_quadtree.toml"),
        ("adaptive", "rect_dam_adaptive.toml"),
    ] {
        let alpha = parse_config(configs().join(name)).unwrap().free_surface_config().alpha;
        let (r, secs) = execute(name);
        total += secs;
        let f = fs(&r);
        let inner: Vec<usize> =
            if r.cycles.is_empty() { vec![f.state.iter] } else { r.cycles.iter().map(|c| c.inner_iterations).collect() };
        let converged = r.summary.converged && r.cycles.iter().all(|c| c.converged);
        let err = x_o_error(&r);
        let ok = err <= 0.05 && converged && inner.iter().all(|&n| n <= 100) && alpha == 1e-3 && secs < 60.0;
        all &= ok;
        rep.detail(format!(
            "{label}: {} DOFs, x_o = {:.6}, error {err:.2e}, inner iterations {inner:?}, converged {converged}, {secs:.2} s",
            r.summary.dofs,
            f.state.x_o
        ));
        parts.push(format!("{label} {:.2}%", 100.0 * err));
        keep.insert(label, r);
    }
    rep.record("3", all, format!("rectangular dam x_o error vs 0.662382: {} (limit 5%, <= 100 iterations, alpha 1e-3, < 60 s each)", parts.join(", ")), total);
    let quad = &keep["quadtree"];
    DamRuns { quadtree_error: x_o_error(quad), quadtree_dofs: quad.summary.dofs, adaptive: keep.remove("adaptive").unwrap() }
}

fn adaptive_efficiency(rep: &mut Report, runs: &DamRuns) {
    let t = Instant::now();
    let prerefined = rect_dam::quadtree().unwrap().to_mesh().unwrap().mesh.num_nodes();
    assert_eq!(prerefined, runs.quadtree_dofs);
    let final_dofs = runs.adaptive.summary.dofs;
    let ratio = final_dofs as f64 / prerefined as f64;
    let err = x_o_error(&runs.adaptive);
    let pass = ratio <= 0.5 && err <= 2.0 * runs.quadtree_error;
    rep.record(
        "4",
        pass,
        format!(
            "adaptive efficiency: {final_dofs} / {prerefined} DOFs = {:.1}% (limit 50%), x_o error {err:.2e} vs pre-refined {:.2e} (limit 2x)",
            100.0 * ratio,
            runs.quadtree_error
        ),
        t.elapsed().as_secs_f64(),
    );
}

/// Diameter of the cell containing `p`, or of the nearest cell by centroid.
fn local_size(mesh: &PolyMesh, p: Point2) -> f64 {
    let loc = CellLocator::new(mesh);
    let c = loc.locate(mesh, p).unwrap_or_else(|| {
        (0..mesh.num_cells())
            .min_by(|&a, &b| {
                let da = mesh.polygon_area_centroid(a).1.dist(p);
                let db = mesh.polygon_area_centroid(b).1.dist(p);
                da.total_cmp(&db)
            })
            .expect("non-empty mesh")
    });
    geometry::diameter(&mesh.cell_points(c))
}

fn surface_shape(r: &RunResult) -> (bool, bool, f64, f64) {
    let s = &fs(r).surface;
    let single = s.windows(2).all(|w| w[1].x > w[0].x - 1e-12 && (w[1].x - w[0].x > 1e-12 || (w[1].y - w[0].y).abs() < 1e-9));
    let monotone = s.windows(2).all(|w| w[1].y <= w[0].y + 1e-9);
    let anchor = Point2::new(trapezoid_dam::CREST.0 * trapezoid_dam::H1 / trapezoid_dam::HEIGHT, trapezoid_dam::H1);
    let first = s.first().copied().unwrap_or(Point2::new(f64::NAN, f64::NAN));
    (single, monotone, first.dist(anchor), local_size(&r.problem.mesh, anchor))
}

fn trapezoid_test(rep: &mut Report) {
    let (quad, t1) = execute("trapezoid_dam_quadtree.toml");
    let (adapt, t2) = execute("trapezoid_dam_adaptive.toml");
    let mut shape_ok = true;
    for (label, r) in [("quadtree", &quad), ("adaptive", &adapt)] {
        let (single, monotone, d, size) = surface_shape(r);
        shape_ok &= single && monotone && d <= size && r.summary.converged;
        let exit = fs(r).state.exit;
        rep.detail(format!(
            "{label}: {} DOFs, single-valued {single}, non-increasing {monotone}, anchor offset {d:.3e} m (element size {size:.3}), exit ({:.3}, {:.3}), converged {}",
            r.summary.dofs, exit.x, exit.y, r.summary.converged
        ));
    }
    let ratio = adapt.summary.dofs as f64 / quad.summary.dofs as f64;
    let pass = shape_ok && ratio < 0.25;
    rep.record(
        "5",
        pass,
        format!("trapezoidal dam: free surface shape ok {shape_ok}, adaptive DOFs {} / {} = {:.1}% (limit 25%)", adapt.summary.dofs, quad.summary.dofs, 100.0 * ratio),
        t1 + t2,
    );
}

fn box_problem(n: usize, left: HeadSpec) -> SeepageProblem {
    SeepageProblem::new(common::grid(n, n, 1.0, 1.0), Material { ss: 1.0, ..Material::isotropic(1.0) })
        .with_head("left", left)
        .with_head("right", HeadSpec::Constant(0.0))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn property_suite(rep: &mut Report) {
    let t = Instant::now();
    let mut checks: Vec<(&str, Result<String, String>)> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let polys: Vec<Vec<Point2>> = (0..40)
        .flat_map(|_| {
            let p = random_polygon(&mut rng);
            let e = rng.gen_range(0..p.len());
            [with_hanging_node(&p, e), p]
        })
        .collect();

    let basis = polys.iter().try_for_each(|p| check_basis(p, &mut rng, 1000));
    checks.push(("partition of unity 1e-12, linear completeness 1e-10 at 1000 points", basis.map(|_| format!("{} polygons", polys.len()))));

    let elems = polys.iter().try_for_each(|p| check_element(p, 0.37));
    checks.push(("sum B~ = 0, Ke symmetric/PSD/zero row sum, sum A_C = area, mass total", elems.map(|_| format!("{} elements", polys.len()))));

    let oracle = test_pentagons().iter().map(|p| oracle_error(p, polyseep::smoothing::DEFAULT_SMOOTHING_POINTS)).fold(0.0, f64::max);
    checks.push((
        "B~ boundary form vs area-integral oracle (pentagons) <= 1e-8",
        if oracle <= 1e-8 { Ok(format!("{oracle:.2e}")) } else { Err(format!("{oracle:.2e}")) },
    ));

    let fixed = {
        let p = box_problem(8, HeadSpec::Constant(2.0));
        let h = solve_steady(&p).unwrap();
        let d = max_abs_diff(&step_transient(&p, &h, 1.0).unwrap().values, &h.values);
        if d < 1e-10 { Ok(format!("{d:.1e}")) } else { Err(format!("{d:.1e}")) }
    };
    checks.push(("backward Euler fixed point", fixed));

    let order = {
        let run = |dt: f64| {
            let mut p = box_problem(8, HeadSpec::Constant(1.0));
            let steady = solve_steady(&p).unwrap();
            let h0: Vec<f64> =
                p.mesh.vertices().iter().zip(&steady.values).map(|(v, h)| h + (std::f64::consts::PI * v.x).sin()).collect();
            p.time = Some(TimeGrid { t0: 0.0, dt, n_steps: (0.1 / dt).round() as usize });
            run_transient(&p, Some(HeadField::new(h0, 0.0)), &[]).unwrap().history.pop().unwrap().values
        };
        let f: Vec<Vec<f64>> = [0.01, 0.005, 0.0025].iter().map(|&dt| run(dt)).collect();
        let o = (max_abs_diff(&f[0], &f[1]) / max_abs_diff(&f[1], &f[2])).log2();
        if (0.8..=1.2).contains(&o) { Ok(format!("{o:.3}")) } else { Err(format!("{o:.3}")) }
    };
    checks.push(("backward Euler observed order in [0.8, 1.2]", order));

    let balance = {
        let mut worst: f64 = 0.0;
        for p in [foundation::problem(foundation::mesh(10.0, 1).unwrap()), patch::problem(patch::quadtree_mesh().unwrap())] {
            let h = solve_steady(&p).unwrap();
            let b = darcy_flux(&p, &h).unwrap().boundary;
            let inflow: f64 = b.values().filter(|&&q| q < 0.0).map(|q| -q).sum();
            worst = worst.max(b.values().sum::<f64>().abs() / inflow);
        }
        if worst <= 1e-6 { Ok(format!("{worst:.1e}")) } else { Err(format!("{worst:.1e}")) }
    };
    checks.push(("steady flux balance <= 1e-6 relative", balance));

    let cg = {
        let n = 2000;
        let mut r = ChaCha8Rng::seed_from_u64(5);
        let mut b = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            b[(i, i)] = r.gen_range(0.5..2.0);
            for _ in 0..3 {
                let j = r.gen_range(0..n);
                b[(i, j)] += r.gen_range(-1.0..1.0);
            }
        }
        let a = b.transpose() * &b + DMatrix::identity(n, n);
        let trip: Vec<(usize, usize, f64)> =
            (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| a[(i, j)] != 0.0).map(|(i, j)| (i, j, a[(i, j)])).collect();
        let rhs: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let (x, _) = solve_spd(&CsrMatrix::from_triplets(n, &trip).unwrap(), &rhs, None, SolverOptions::default()).unwrap();
        let oracle = a.cholesky().unwrap().solve(&DVector::from_column_slice(&rhs));
        let e = (DVector::from_column_slice(&x) - &oracle).norm() / oracle.norm();
        if e <= 1e-9 { Ok(format!("n = {n}: {e:.1e}")) } else { Err(format!("n = {n}: {e:.1e}")) }
    };
    checks.push(("CG vs dense Cholesky <= 1e-9", cg));

    let mut all = true;
    for (name, res) in &checks {
        let (ok, msg) = match res {
            Ok(m) => (true, m),
            Err(m) => (false, m),
        };
        all &= ok;
        rep.detail(format!("{} {name}: {msg}", if ok { "ok  " } else { "FAIL" }));
    }
    let secs = t.elapsed().as_secs_f64();
    rep.record("6", all && secs < 300.0, format!("property suite: {} checks (< 5 min)", checks.len()), secs);
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect()
}

fn determinism(rep: &mut Report) {
    let t = Instant::now();
    let mut names: Vec<PathBuf> = std::fs::read_dir(configs())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "toml"))
        .collect();
    names.sort();
    let mut differing = Vec::new();
    for path in &names {
        let cfg = parse_config(path).unwrap();
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        runner::run(&cfg, a.path()).unwrap();
        runner::run(&cfg, b.path()).unwrap();
        if dir_bytes(a.path()) != dir_bytes(b.path()) {
            differing.push(path.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    rep.record(
        "7",
        differing.is_empty(),
        format!("determinism: {} shipped configs run twice, differing artifacts: {differing:?}", names.len()),
        t.elapsed().as_secs_f64(),
    );
}

fn main() {
    let mut rep = Report { lines: Vec::new() };
    let t = Instant::now();
    patch_test(&mut rep);
    foundation_test(&mut rep);
    let dams = rect_dam_test(&mut rep);
    adaptive_efficiency(&mut rep, &dams);
    trapezoid_test(&mut rep);
    property_suite(&mut rep);
    determinism(&mut rep);

    let failed = rep.lines.iter().filter(|(p, _)| !p).count();
    println!("\n{} of {} criteria passed in {:.1} s", rep.lines.len() - failed, rep.lines.len(), t.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
