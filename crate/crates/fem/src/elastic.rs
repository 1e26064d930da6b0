//! Assembled corotational elasticity over a whole mesh.

use nalgebra::Vector3;

use crate::element::{
    element_stiffness, energy_density, polar, project_psd, stress, stress_derivative, Mat12, TetElement,
};
use crate::mesh::{Point, TetMesh};
use crate::sparse::CsrMatrix;
use crate::{Error, MaterialParams, Result};

/// Precomputed rest-state element data for one mesh and material.
#[derive(Debug, Clone)]
pub struct ElasticModel {
    elements: Vec<TetElement>,
    mu: f64,
    lambda: f64,
    node_count: usize,
}

impl ElasticModel {
    pub fn new(mesh: &TetMesh, mat: &MaterialParams) -> Result<Self> {
        mat.validate()?;
        let (mu, lambda) = mat.lame();
        let elements = mesh
            .tets
            .iter()
            .enumerate()
            .map(|(t, &tet)| {
                TetElement::new(tet, tet.map(|i| &mesh.nodes[i])).ok_or(Error::InvertedElement {
                    element: t,
                    volume: mesh.tet_volume(t),
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            elements,
            mu,
            lambda,
            node_count: mesh.nodes.len(),
        })
    }

    pub fn lame(&self) -> (f64, f64) {
        (self.mu, self.lambda)
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub(crate) fn elements(&self) -> &[TetElement] {
        &self.elements
    }

    /// Strain energy (N mm) at deformed positions `x`.
    pub fn energy(&self, x: &[Point]) -> Result<f64> {
        let mut e = 0.0;
        for (t, el) in self.elements.iter().enumerate() {
            let f = el.deformation_gradient(x);
            let p = polar(&f).ok_or_else(|| inverted(t, el, x))?;
            e += el.volume * energy_density(&f, &p, self.mu, self.lambda);
        }
        Ok(e)
    }

    /// Elastic forces `-dE/dx` at `x`.
    pub fn forces(&self, x: &[Point]) -> Result<Vec<Vector3<f64>>> {
        let mut out = vec![Vector3::zeros(); self.node_count];
        for (t, el) in self.elements.iter().enumerate() {
            let f = el.deformation_gradient(x);
            let p = polar(&f).ok_or_else(|| inverted(t, el, x))?;
            let pk = stress(&f, &p, self.mu, self.lambda);
            for a in 0..4 {
                out[el.nodes[a]] -= el.volume * pk * el.grads[a];
            }
        }
        Ok(out)
    }

    /// Forces and per-element 12x12 stiffness blocks. With `project` each
    /// block is made positive semidefinite.
    pub(crate) fn forces_and_blocks(&self, x: &[Point], project: bool) -> Result<(Vec<Vector3<f64>>, Vec<Mat12>)> {
        let mut out = vec![Vector3::zeros(); self.node_count];
        let mut blocks = Vec::with_capacity(self.elements.len());
        for (t, el) in self.elements.iter().enumerate() {
            let f = el.deformation_gradient(x);
            let p = polar(&f).ok_or_else(|| inverted(t, el, x))?;
            let pk = stress(&f, &p, self.mu, self.lambda);
            for a in 0..4 {
                out[el.nodes[a]] -= el.volume * pk * el.grads[a];
            }
            let mut h = stress_derivative(&p, self.mu, self.lambda);
            if project {
                h = project_psd(&h);
            }
            blocks.push(element_stiffness(el, &h));
        }
        Ok((out, blocks))
    }
}

fn inverted(t: usize, el: &TetElement, x: &[Point]) -> Error {
    let [a, b, c, d] = el.nodes;
    Error::InvertedElement {
        element: t,
        volume: crate::mesh::signed_tet_volume([&x[a], &x[b], &x[c], &x[d]]),
    }
}

fn positions(mesh: &TetMesh, u: &[Vector3<f64>]) -> Result<Vec<Point>> {
    if u.len() != mesh.nodes.len() {
        return Err(Error::InvalidMesh(format!(
            "displacement field has {} entries for {} nodes",
            u.len(),
            mesh.nodes.len()
        )));
    }
    Ok(mesh.nodes.iter().zip(u).map(|(x, d)| x + d).collect())
}

/// Strain energy of the displacement field `u`.
pub fn elastic_energy(mesh: &TetMesh, mat: &MaterialParams, u: &[Vector3<f64>]) -> Result<f64> {
    ElasticModel::new(mesh, mat)?.energy(&positions(mesh, u)?)
}

/// Elastic forces `-dE/du` and the consistent tangent `d^2E/du^2` over all
/// `3 n` degrees of freedom (node-major, fixed nodes included).
pub fn elastic_force_and_stiffness(
    mesh: &TetMesh,
    mat: &MaterialParams,
    u: &[Vector3<f64>],
) -> Result<(Vec<Vector3<f64>>, CsrMatrix)> {
    let model = ElasticModel::new(mesh, mat)?;
    let (forces, blocks) = model.forces_and_blocks(&positions(mesh, u)?, false)?;
    let mut triplets = Vec::with_capacity(blocks.len() * 144);
    for (el, k) in model.elements.iter().zip(&blocks) {
        for a in 0..4 {
            for b in 0..4 {
                for i in 0..3 {
                    for j in 0..3 {
                        triplets.push((3 * el.nodes[a] + i, 3 * el.nodes[b] + j, k[(3 * a + i, 3 * b + j)]));
                    }
                }
            }
        }
    }
    let n = 3 * mesh.nodes.len();
    Ok((forces, CsrMatrix::from_triplets(n, n, triplets)))
}
