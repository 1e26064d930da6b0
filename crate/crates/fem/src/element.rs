//! Corotated linear tetrahedron.
//!
//! Energy density `mu |F - R|^2 + lambda/2 (tr(R^T F) - 3)^2` with `F = R S`
//! the polar decomposition. It reduces to linear elasticity for small
//! strains and is invariant under rigid motions.

use nalgebra::{Matrix3, SMatrix, Vector3};

use crate::mesh::{signed_tet_volume, Point};

pub(crate) type Mat9 = SMatrix<f64, 9, 9>;
pub(crate) type Mat12 = SMatrix<f64, 12, 12>;

#[derive(Debug, Clone)]
pub(crate) struct TetElement {
    pub nodes: [usize; 4],
    pub volume: f64,
    /// Gradients of the linear shape functions in the rest configuration.
    pub grads: [Vector3<f64>; 4],
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Polar {
    pub r: Matrix3<f64>,
    pub s: Matrix3<f64>,
}

impl TetElement {
    /// `None` for a degenerate or inverted rest element.
    pub fn new(nodes: [usize; 4], rest: [&Point; 4]) -> Option<Self> {
        let volume = signed_tet_volume(rest);
        if !(volume > 0.0) {
            return None;
        }
        let dm = Matrix3::from_columns(&[rest[1] - rest[0], rest[2] - rest[0], rest[3] - rest[0]]);
        let inv = dm.try_inverse()?;
        let g1: Vector3<f64> = inv.row(0).transpose();
        let g2: Vector3<f64> = inv.row(1).transpose();
        let g3: Vector3<f64> = inv.row(2).transpose();
        Some(Self {
            nodes,
            volume,
            grads: [-(g1 + g2 + g3), g1, g2, g3],
        })
    }

    pub fn deformation_gradient(&self, x: &[Point]) -> Matrix3<f64> {
        let mut f = Matrix3::zeros();
        for a in 0..4 {
            f += x[self.nodes[a]] * self.grads[a].transpose();
        }
        f
    }
}

/// `None` when `det F <= 0`.
pub(crate) fn polar(f: &Matrix3<f64>) -> Option<Polar> {
    if !(f.determinant() > 0.0) {
        return None;
    }
    let svd = f.svd(true, true);
    let r = svd.u? * svd.v_t?;
    let s = r.transpose() * f;
    Some(Polar {
        r,
        s: 0.5 * (s + s.transpose()),
    })
}

pub(crate) fn energy_density(f: &Matrix3<f64>, p: &Polar, mu: f64, lambda: f64) -> f64 {
    let t = p.s.trace() - 3.0;
    mu * (f - p.r).norm_squared() + 0.5 * lambda * t * t
}

/// First Piola-Kirchhoff stress.
pub(crate) fn stress(f: &Matrix3<f64>, p: &Polar, mu: f64, lambda: f64) -> Matrix3<f64> {
    2.0 * mu * (f - p.r) + lambda * (p.s.trace() - 3.0) * p.r
}

fn axial(a: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(a[(2, 1)], a[(0, 2)], a[(1, 0)])
}

/// `dP/dF` as a 9x9 matrix, row/column index `3 i + j` for entry `(i, j)`.
///
/// Uses `dR = R [w]x` with `(tr(S) I - S) w = axial(R^T dF - dF^T R)`.
pub(crate) fn stress_derivative(p: &Polar, mu: f64, lambda: f64) -> Mat9 {
    let tr = p.s.trace();
    let inv = (Matrix3::identity() * tr - p.s)
        .try_inverse()
        .unwrap_or_else(Matrix3::zeros);
    let rt = p.r.transpose();
    let mut h = Mat9::zeros();
    for k in 0..3 {
        for l in 0..3 {
            let mut df = Matrix3::zeros();
            df[(k, l)] = 1.0;
            let m = rt * df;
            let w = inv * axial(&(m - m.transpose()));
            let dr = p.r * w.cross_matrix();
            let dp = 2.0 * mu * (df - dr) + lambda * m.trace() * p.r + lambda * (tr - 3.0) * dr;
            for i in 0..3 {
                for j in 0..3 {
                    h[(3 * i + j, 3 * k + l)] = dp[(i, j)];
                }
            }
        }
    }
    h
}

/// Projects a symmetric matrix onto the positive semidefinite cone.
pub(crate) fn project_psd(h: &Mat9) -> Mat9 {
    let sym = 0.5 * (h + h.transpose());
    if sym.cholesky().is_some() {
        return sym;
    }
    let mut eig = sym.symmetric_eigen();
    for v in eig.eigenvalues.iter_mut() {
        *v = v.max(0.0);
    }
    eig.recompose()
}

/// Element stiffness `V G^T H G`, node-major `3 a + i` ordering.
pub(crate) fn element_stiffness(el: &TetElement, h: &Mat9) -> Mat12 {
    let mut k = Mat12::zeros();
    for a in 0..4 {
        for b in 0..4 {
            let (ga, gb) = (&el.grads[a], &el.grads[b]);
            for i in 0..3 {
                for kk in 0..3 {
                    let mut acc = 0.0;
                    for j in 0..3 {
                        for l in 0..3 {
                            acc += h[(3 * i + j, 3 * kk + l)] * ga[j] * gb[l];
                        }
                    }
                    k[(3 * a + i, 3 * b + kk)] = el.volume * acc;
                }
            }
        }
    }
    k
}
