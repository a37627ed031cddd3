//! Problem description shared by the steady, transient and free-surface
//! drivers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::mesh::{PolyMesh, Tag};
use crate::shape::ShapeMode;
use crate::smoothing::{Conductivity, DEFAULT_SMOOTHING_POINTS};
use crate::solver::SolverOptions;

/// Per-region material data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub k: Conductivity,
    /// Specific storage (1/m).
    #[serde(default)]
    pub ss: f64,
    /// Volumetric source (1/s).
    #[serde(default)]
    pub source: f64,
}

impl Material {
    pub fn isotropic(k: f64) -> Self {
        Material { k: Conductivity::isotropic(k), ss: 0.0, source: 0.0 }
    }
}

/// Prescribed head on a tagged boundary.
#[derive(Clone, Debug, PartialEq)]
pub enum HeadSpec {
    Constant(f64),
    /// Piecewise-linear `(t, h)` samples, held constant outside the range.
    Series(Vec<(f64, f64)>),
    /// `h = y`, the atmospheric condition.
    Elevation,
}

impl HeadSpec {
    pub fn value(&self, t: f64, p: Point2) -> f64 {
        match self {
            HeadSpec::Constant(h) => *h,
            HeadSpec::Elevation => p.y,
            HeadSpec::Series(s) => interpolate_series(s, t),
        }
    }
}

fn interpolate_series(s: &[(f64, f64)], t: f64) -> f64 {
    match s {
        [] => 0.0,
        [(_, h)] => *h,
        _ => {
            if t <= s[0].0 {
                return s[0].1;
            }
            for w in s.windows(2) {
                let ((t0, h0), (t1, h1)) = (w[0], w[1]);
                if t <= t1 {
                    return if t1 > t0 { h0 + (h1 - h0) * (t - t0) / (t1 - t0) } else { h1 };
                }
            }
            s[s.len() - 1].1
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n_steps: usize,
}

#[derive(Clone, Debug)]
pub struct SeepageProblem {
    pub mesh: PolyMesh,
    pub materials: BTreeMap<u32, Material>,
    /// Prescribed heads; on shared nodes all specs must agree.
    pub dirichlet: Vec<(Tag, HeadSpec)>,
    /// Prescribed normal flux `q̄ = k∇h·n` (m/s) per tag.
    pub neumann: Vec<(Tag, f64)>,
    pub time: Option<TimeGrid>,
    pub shape_mode: ShapeMode,
    pub edge_points: usize,
    pub solver: SolverOptions,
}

impl SeepageProblem {
    /// Single-material problem with default numerics.
    pub fn new(mesh: PolyMesh, material: Material) -> Self {
        let mut materials = BTreeMap::new();
        for c in mesh.cells() {
            materials.insert(c.region, material);
        }
        SeepageProblem {
            mesh,
            materials,
            dirichlet: Vec::new(),
            neumann: Vec::new(),
            time: None,
            shape_mode: ShapeMode::Auto,
            edge_points: DEFAULT_SMOOTHING_POINTS,
            solver: SolverOptions::default(),
        }
    }

    pub fn with_head(mut self, tag: &str, spec: HeadSpec) -> Self {
        self.dirichlet.push((Tag::from(tag), spec));
        self
    }

    pub fn with_flux(mut self, tag: &str, q: f64) -> Self {
        self.neumann.push((Tag::from(tag), q));
        self
    }

    /// Checks tags and materials against the mesh.
    pub fn validate(&self) -> Result<()> {
        for c in self.mesh.cells() {
            let m = self.materials.get(&c.region).ok_or(Error::MissingMaterial { region: c.region })?;
            if !m.k.is_spd() {
                return Err(Error::NonSpdConductivity { region: c.region });
            }
            if !(m.ss >= 0.0) {
                return Err(Error::Validation(vec![format!("negative storage in region {}", c.region)]));
            }
        }
        for (tag, _) in &self.dirichlet {
            if !self.mesh.has_tag(tag.as_str()) {
                return Err(Error::UnknownTag { tag: tag.0.clone() });
            }
        }
        for (tag, _) in &self.neumann {
            if !self.mesh.has_tag(tag.as_str()) {
                return Err(Error::UntaggedNeumannEdge { tag: tag.0.clone() });
            }
        }
        if let Some(tg) = &self.time {
            if !(tg.dt > 0.0) {
                return Err(Error::NonPositiveTimeStep { dt: tg.dt });
            }
        }
        Ok(())
    }

    /// Node → prescribed head at time `t`, with conflicts rejected.
    pub fn dirichlet_values(&self, t: f64) -> Result<BTreeMap<usize, f64>> {
        let mut out: BTreeMap<usize, f64> = BTreeMap::new();
        let verts = self.mesh.vertices();
        for (tag, spec) in &self.dirichlet {
            let nodes = self.mesh.tagged_nodes(tag.as_str());
            if nodes.is_empty() {
                return Err(Error::UnknownTag { tag: tag.0.clone() });
            }
            for i in nodes {
                let v = spec.value(t, verts[i]);
                if let Some(&old) = out.get(&i) {
                    if (old - v).abs() > 1e-9 * f64::max(1.0, old.abs().max(v.abs())) {
                        return Err(Error::ConflictingDirichlet { node: i, a: old, b: v });
                    }
                } else {
                    out.insert(i, v);
                }
            }
        }
        Ok(out)
    }
}

/// Nodal heads at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct HeadField {
    pub values: Vec<f64>,
    pub t: f64,
}

impl HeadField {
    pub fn new(values: Vec<f64>, t: f64) -> Self {
        HeadField { values, t }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_is_piecewise_linear_and_clamped() {
        let s = HeadSpec::Series(vec![(0.0, 1.0), (10.0, 3.0), (20.0, 3.0)]);
        let p = Point2::default();
        assert_eq!(s.value(-5.0, p), 1.0);
        assert_eq!(s.value(5.0, p), 2.0);
        assert_eq!(s.value(15.0, p), 3.0);
        assert_eq!(s.value(50.0, p), 3.0);
        assert_eq!(HeadSpec::Elevation.value(0.0, Point2::new(3.0, 0.7)), 0.7);
    }
}
