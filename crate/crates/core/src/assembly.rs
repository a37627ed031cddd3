//! Element computations and global assembly.
//!
//! Element matrices are computed in parallel and scattered in element order
//! through a precomputed index map, so the assembled values do not depend
//! on thread scheduling.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::PolyMesh;
use crate::problem::SeepageProblem;
use crate::quadrature::EdgeQuadRule;
use crate::shape::{PolygonBasis, ShapeMode};
use crate::smoothing::ElementSmoothing;
use crate::solver::{self, SolveStats, SolverOptions};
use crate::sparse::CsrMatrix;

/// Smoothing data for every cell of a mesh.
pub fn element_smoothings(mesh: &PolyMesh, mode: ShapeMode, rule: &EdgeQuadRule) -> Result<Vec<ElementSmoothing>> {
    (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| ElementSmoothing::new(PolygonBasis::new(mesh.cell_points(c), mode)?, rule))
        .collect()
}

/// Sparsity pattern of a mesh plus the position of every element entry in
/// the CSR value array.
#[derive(Clone, Debug)]
pub struct Assembler {
    pattern: CsrMatrix,
    scatter: Vec<Vec<usize>>,
    conn: Vec<Vec<usize>>,
}

impl Assembler {
    pub fn new(mesh: &PolyMesh) -> Self {
        let n = mesh.num_nodes();
        let conn: Vec<Vec<usize>> = mesh.cells().iter().map(|c| c.vertices.clone()).collect();
        let mut trip = Vec::new();
        for vs in &conn {
            for &a in vs {
                for &b in vs {
                    trip.push((a, b, 0.0));
                }
            }
        }
        let pattern = CsrMatrix::from_triplets(n, &trip).expect("cell vertices are valid node ids");
        let scatter = conn
            .iter()
            .map(|vs| {
                let mut idx = Vec::with_capacity(vs.len() * vs.len());
                for &a in vs {
                    for &b in vs {
                        idx.push(pattern.position(a, b).expect("entry is in the pattern"));
                    }
                }
                idx
            })
            .collect();
        Assembler { pattern, scatter, conn }
    }

    pub fn num_nodes(&self) -> usize {
        self.pattern.dim()
    }

    /// `Σ_e scale_e · A_e` with `A_e` row-major dense element matrices.
    pub fn matrix(&self, elems: &[Vec<f64>], scale: Option<&[f64]>) -> CsrMatrix {
        let mut m = self.pattern.clone();
        let vals = m.values_mut();
        for (e, (ae, idx)) in elems.iter().zip(&self.scatter).enumerate() {
            let s = scale.map_or(1.0, |s| s[e]);
            for (v, &k) in ae.iter().zip(idx) {
                vals[k] += s * v;
            }
        }
        m
    }

    pub fn vector(&self, elems: &[Vec<f64>]) -> Vec<f64> {
        let mut f = vec![0.0; self.num_nodes()];
        for (fe, vs) in elems.iter().zip(&self.conn) {
            for (v, &i) in fe.iter().zip(vs) {
                f[i] += v;
            }
        }
        f
    }
}

/// Assembled semi-discrete system `K H + M Ḣ = F` with prescribed heads.
#[derive(Clone, Debug)]
pub struct GlobalSystem {
    pub k: CsrMatrix,
    pub m: CsrMatrix,
    pub f: Vec<f64>,
    pub dirichlet: BTreeMap<usize, f64>,
}

/// Element data of a problem, computed once and reused for every solve.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub elements: Vec<ElementSmoothing>,
    pub ke: Vec<Vec<f64>>,
    pub me: Vec<Vec<f64>>,
    pub fe: Vec<Vec<f64>>,
    pub assembler: Assembler,
}

impl Discretization {
    pub fn new(problem: &SeepageProblem) -> Result<Self> {
        problem.validate()?;
        let mesh = &problem.mesh;
        let rule = EdgeQuadRule::gauss(problem.edge_points.max(1));
        let elements = element_smoothings(mesh, problem.shape_mode, &rule)?;

        // Neumann edges per cell as (local edge, q̄)
        let tags = mesh.edge_tags();
        let flux: BTreeMap<&str, f64> = problem.neumann.iter().map(|(t, q)| (t.as_str(), *q)).collect();
        let mut cell_flux: Vec<Vec<(usize, f64)>> = vec![Vec::new(); mesh.num_cells()];
        for (c, e) in mesh.free_edges() {
            let vs = &mesh.cells()[c].vertices;
            let (a, b) = (vs[e], vs[(e + 1) % vs.len()]);
            if let Some(t) = tags.get(&(a.min(b), a.max(b))) {
                if let Some(&q) = flux.get(t.as_str()) {
                    cell_flux[c].push((e, q));
                }
            }
        }

        let per_elem: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = elements
            .par_iter()
            .enumerate()
            .map(|(c, el)| {
                let region = mesh.cells()[c].region;
                let mat = problem.materials.get(&region).ok_or(Error::MissingMaterial { region })?;
                let ke = el.stiffness(&mat.k).map_err(|_| Error::NonSpdConductivity { region })?;
                let me = el.capacity(mat.ss)?;
                let fe = el.loads(mat.source, &cell_flux[c], &rule)?;
                Ok((ke, me, fe))
            })
            .collect::<Result<_>>()?;
        let (mut ke, mut me, mut fe) = (Vec::new(), Vec::new(), Vec::new());
        for (k, m, f) in per_elem {
            ke.push(k);
            me.push(m);
            fe.push(f);
        }
        Ok(Discretization { elements, ke, me, fe, assembler: Assembler::new(mesh) })
    }

    pub fn stiffness(&self, scale: Option<&[f64]>) -> CsrMatrix {
        self.assembler.matrix(&self.ke, scale)
    }

    pub fn capacity(&self) -> CsrMatrix {
        self.assembler.matrix(&self.me, None)
    }

    pub fn load(&self) -> Vec<f64> {
        self.assembler.vector(&self.fe)
    }
}

/// Assembles `K`, `M`, `F` and the prescribed heads at time `t`.
pub fn assemble(problem: &SeepageProblem, t: f64) -> Result<GlobalSystem> {
    let d = Discretization::new(problem)?;
    Ok(GlobalSystem { k: d.stiffness(None), m: d.capacity(), f: d.load(), dirichlet: problem.dirichlet_values(t)? })
}

/// Modified system with prescribed values eliminated symmetrically:
/// prescribed rows and columns become unit rows and columns.
pub fn apply_dirichlet(lhs: &CsrMatrix, rhs: &[f64], dirichlet: &BTreeMap<usize, f64>) -> (CsrMatrix, Vec<f64>) {
    let fixed = fixed_vector(lhs.dim(), dirichlet);
    let mut b = rhs.to_vec();
    let a = lhs.eliminate(&mut b, &fixed);
    (a, b)
}

fn fixed_vector(n: usize, dirichlet: &BTreeMap<usize, f64>) -> Vec<Option<f64>> {
    let mut fixed = vec![None; n];
    for (&i, &v) in dirichlet {
        fixed[i] = Some(v);
    }
    fixed
}

/// Solves `lhs x = rhs` with the prescribed entries of `x` fixed. Only the
/// free block is handed to the iterative solver, so the residual contract
/// applies to the free equations alone.
pub fn solve_constrained(
    lhs: &CsrMatrix,
    rhs: &[f64],
    dirichlet: &BTreeMap<usize, f64>,
    x0: Option<&[f64]>,
    opts: SolverOptions,
) -> Result<(Vec<f64>, SolveStats)> {
    let n = lhs.dim();
    let fixed = fixed_vector(n, dirichlet);
    let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
    let mut x: Vec<f64> = fixed.iter().map(|f| f.unwrap_or(0.0)).collect();
    if free.is_empty() {
        return Ok((x, SolveStats { iterations: 0, residual: 0.0 }));
    }
    // b_f − A_fp g
    let mut b = Vec::with_capacity(free.len());
    for &i in &free {
        let mut s = rhs[i];
        for (j, v) in lhs.row(i) {
            if let Some(g) = fixed[j] {
                s -= v * g;
            }
        }
        b.push(s);
    }
    let a = lhs.restrict(&free);
    let guess: Option<Vec<f64>> = x0.map(|x0| free.iter().map(|&i| x0[i]).collect());
    let (xf, stats) = match solver::solve_spd(&a, &b, guess.as_deref(), opts) {
        Ok(r) => r,
        Err(Error::NotConverged { iterations, residual, best }) => {
            for (&i, v) in free.iter().zip(best) {
                x[i] = v;
            }
            return Err(Error::NotConverged { iterations, residual, best: x });
        }
        Err(e) => return Err(e),
    };
    for (&i, v) in free.iter().zip(xf) {
        x[i] = v;
    }
    Ok((x, stats))
}
