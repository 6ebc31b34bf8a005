use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::Float;
use serde::Serialize;

use super::tower::TowerOf;
use super::LimitError;
use crate::hfset::HfSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Json,
}

/// Vertices in 3D and faces as vertex indices.
#[derive(Debug, Clone, Serialize)]
pub struct Mesh {
    pub stage: usize,
    pub labels: Vec<String>,
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn to_off(&self) -> String {
        let mut s = String::from("OFF\n");
        writeln!(s, "{} {} 0", self.vertices.len(), self.faces.len()).unwrap();
        for v in &self.vertices {
            writeln!(s, "{} {} {}", v[0], v[1], v[2]).unwrap();
        }
        for f in &self.faces {
            let idx: Vec<String> = f.iter().map(usize::to_string).collect();
            writeln!(s, "{} {}", f.len(), idx.join(" ")).unwrap();
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).unwrap()
    }

    pub fn triangles(&self) -> usize {
        self.faces.iter().filter(|f| f.len() == 3).count()
    }
}

/// Coordinates in `R^m` sent to `R^3`. Up to three coordinates are padded; with
/// four the standard simplex sits in `Σx = 1`, so dropping the last is injective
/// there; beyond that basis vector `i` goes to the moment curve at `i`.
fn to_3d<F: Float>(x: &[F]) -> [f64; 3] {
    let m = x.len();
    let v: Vec<f64> = x.iter().map(|c| c.to_f64().unwrap()).collect();
    match m {
        0..=3 => {
            let mut out = [0.0; 3];
            out[..m].copy_from_slice(&v);
            out
        }
        4 => [v[0], v[1], v[2]],
        _ => {
            let mut out = [0.0; 3];
            for (i, c) in v.iter().enumerate() {
                let t = i as f64 / (m - 1) as f64;
                out[0] += c * t;
                out[1] += c * t * t;
                out[2] += c * t * t * t;
            }
            out
        }
    }
}

/// Maximal faces of stage `n` as polygons; tetrahedra become their four boundary triangles.
pub fn export_mesh<F: Float>(tower: &TowerOf<F>, n: usize, format: MeshFormat) -> Result<(Mesh, String), LimitError> {
    let ground = tower.complex(0);
    let dim = ground.dimension().unwrap_or(0);
    if dim > 3 {
        return Err(LimitError::DimensionTooHigh(dim));
    }
    tower.epsilon(n)?;
    let c = tower.complex(n);
    let r = tower.realization(n);
    let verts: Vec<&HfSet> = c.vertices().iter().collect();
    let index = |v: &HfSet| verts.binary_search(&v).unwrap();
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for t in c.maximal_faces() {
        let idx: Vec<usize> = t.iter().map(index).collect();
        if idx.len() == 4 {
            for skip in 0..4 {
                let mut tri = idx.clone();
                tri.remove(skip);
                faces.insert(tri);
            }
        } else {
            faces.insert(idx);
        }
    }
    let mesh = Mesh {
        stage: n,
        labels: verts.iter().map(|v| v.to_string()).collect(),
        vertices: verts.iter().map(|v| to_3d(r.point(v))).collect(),
        faces: faces.into_iter().collect(),
    };
    let text = match format {
        MeshFormat::Off => mesh.to_off(),
        MeshFormat::Json => mesh.to_json(),
    };
    Ok((mesh, text))
}
