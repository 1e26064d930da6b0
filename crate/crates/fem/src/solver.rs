//! Quasi-static equilibrium under a displacement-driven cable.
//!
//! The cable is an inextensible polyline through mesh nodes. Its length
//! `L(u)` is held at `L0 - s` by a Lagrange multiplier (the cable tension),
//! and `s` is ramped over `load_steps`. Every step runs Newton iterations on
//! the KKT system with a backtracking line search.

use nalgebra::{Matrix3, Vector3};

use crate::cholesky::{SpdFactor, SpdMatrix, SpdPattern};
use crate::elastic::ElasticModel;
use crate::element::Mat12;
use crate::mesh::{CablePoint, Point, TetMesh};
use crate::{Error, MaterialParams, Result};

/// Weight of cured silicone per unit volume, 1.1 mg/mm^3 under 9.81 m/s^2,
/// in N/mm^3.
pub const SILICONE_WEIGHT_DENSITY: f64 = 1.1e-6 * 9.81;

/// Relative bound on the cable length error of a converged solve.
pub const CABLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ActuationSpec {
    /// Cable shortening `s` in mm.
    pub cable_displacement: f64,
    pub load_steps: usize,
    /// Bound on the force residual norm, N.
    pub tolerance: f64,
    /// Newton iterations allowed per load step.
    pub max_iterations: usize,
    /// Self-weight along `-z`.
    pub gravity: bool,
    /// External nodal forces in N, ramped together with the cable.
    pub point_loads: Vec<(usize, Vector3<f64>)>,
    /// Drops the cable constraint entirely.
    pub cable_released: bool,
}

impl Default for ActuationSpec {
    fn default() -> Self {
        Self {
            cable_displacement: 0.0,
            load_steps: 5,
            tolerance: 1e-8,
            max_iterations: 30,
            gravity: false,
            point_loads: Vec::new(),
            cable_released: false,
        }
    }
}

impl ActuationSpec {
    pub fn cable(displacement: f64) -> Self {
        Self {
            cable_displacement: displacement,
            ..Self::default()
        }
    }

    /// Point loads only, no cable.
    pub fn loads(point_loads: Vec<(usize, Vector3<f64>)>) -> Self {
        Self {
            point_loads,
            cable_released: true,
            ..Self::default()
        }
    }

    pub fn validate(&self, mesh: &TetMesh) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidActuation(m));
        if self.load_steps == 0 {
            return bad("load_steps must be at least 1".into());
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1".into());
        }
        if !(self.tolerance > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if !self.cable_released {
            let l0 = mesh.cable_length(None);
            if !(self.cable_displacement >= 0.0 && self.cable_displacement < l0) {
                return bad(format!(
                    "cable displacement {} mm must lie in [0, {l0}) mm",
                    self.cable_displacement
                ));
            }
        }
        for (node, f) in &self.point_loads {
            if *node >= mesh.nodes.len() || !f.iter().all(|c| c.is_finite()) {
                return bad(format!("point load on node {node} is invalid"));
            }
        }
        Ok(())
    }
}

/// Merit function values around one accepted Newton step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeritRecord {
    pub load_step: usize,
    pub before: f64,
    pub after: f64,
    pub step_length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticSolution {
    pub displacements: Vec<Vector3<f64>>,
    pub converged: bool,
    /// Newton iterations summed over load steps.
    pub iterations: usize,
    /// Force residual norm, N.
    pub residual: f64,
    /// `L(u) - (L0 - s)`, mm (zero when the cable is released).
    pub constraint_residual: f64,
    /// Cable tension, N.
    pub tension: f64,
    pub merit_history: Vec<MeritRecord>,
    /// Why the solve stopped early, when it did.
    pub failure: Option<String>,
}

impl StaticSolution {
    pub fn rest(node_count: usize) -> Self {
        Self {
            displacements: vec![Vector3::zeros(); node_count],
            converged: true,
            iterations: 0,
            residual: 0.0,
            constraint_residual: 0.0,
            tension: 0.0,
            merit_history: Vec::new(),
            failure: None,
        }
    }

    pub fn deformed_positions(&self, mesh: &TetMesh) -> Vec<Point> {
        mesh.nodes.iter().zip(&self.displacements).map(|(x, u)| x + u).collect()
    }
}

pub fn solve_static(mesh: &TetMesh, mat: &MaterialParams, act: &ActuationSpec) -> Result<StaticSolution> {
    mesh.validate()?;
    act.validate(mesh)?;
    let model = ElasticModel::new(mesh, mat)?;
    Solver::new(mesh, model, act)?.run()
}

struct Solver<'a> {
    mesh: &'a TetMesh,
    model: ElasticModel,
    act: &'a ActuationSpec,
    /// First equation number of each node, `None` for fixed nodes.
    dof: Vec<Option<usize>>,
    ndof: usize,
    pattern: SpdPattern,
    external: Vec<Vector3<f64>>,
    l0: f64,
    cable_points: Vec<CablePoint>,
}

/// Cable length, gradient and segment data at positions `x`.
struct CableState {
    length: f64,
    grad: Vec<(usize, Vector3<f64>)>,
    /// Segment end point indices, unit direction and length.
    segments: Vec<(usize, usize, Vector3<f64>, f64)>,
}

fn point_position(p: &CablePoint, x: &[Point]) -> Point {
    p.iter().map(|&(i, w)| w * x[i]).sum()
}

fn cable_state(points: &[CablePoint], x: &[Point]) -> CableState {
    let pos: Vec<Point> = points.iter().map(|p| point_position(p, x)).collect();
    let mut length = 0.0;
    let mut grad: Vec<(usize, Vector3<f64>)> = Vec::new();
    let mut segments = Vec::with_capacity(points.len());
    for a in 0..points.len().saturating_sub(1) {
        let d = pos[a + 1] - pos[a];
        let l = d.norm();
        let t = d / l;
        length += l;
        grad.extend(points[a].iter().map(|&(i, w)| (i, -w * t)));
        grad.extend(points[a + 1].iter().map(|&(i, w)| (i, w * t)));
        segments.push((a, a + 1, t, l));
    }
    CableState { length, grad, segments }
}

impl<'a> Solver<'a> {
    fn new(mesh: &'a TetMesh, model: ElasticModel, act: &'a ActuationSpec) -> Result<Self> {
        let n = mesh.nodes.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut link = |a: usize, b: usize| {
            if a != b {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        };
        for tet in &mesh.tets {
            for i in 0..4 {
                for j in i + 1..4 {
                    link(tet[i], tet[j]);
                }
            }
        }
        let cable_points = mesh.cable_points();
        if !act.cable_released {
            for w in cable_points.windows(2) {
                let nodes: Vec<usize> = w.iter().flatten().map(|&(i, _)| i).collect();
                for (k, &a) in nodes.iter().enumerate() {
                    for &b in &nodes[k + 1..] {
                        link(a, b);
                    }
                }
            }
        }
        let mut dof = vec![None; n];
        let mut ndof = 0;
        for (i, d) in dof.iter_mut().enumerate() {
            if !mesh.is_fixed(i) {
                *d = Some(ndof);
                ndof += 3;
            }
        }
        let mut coupled = vec![Vec::new(); ndof];
        for i in 0..n {
            let Some(di) = dof[i] else { continue };
            for dj in adjacency[i].iter().filter_map(|&j| dof[j]).chain([di]) {
                for a in 0..3 {
                    coupled[di + a].extend((0..3).map(|b| dj + b));
                }
            }
        }
        let pattern = SpdPattern::new(&coupled)?;

        let mut external = vec![Vector3::zeros(); n];
        if act.gravity {
            for (t, tet) in mesh.tets.iter().enumerate() {
                let w = mesh.tet_volume(t) * SILICONE_WEIGHT_DENSITY / 4.0;
                for &i in tet {
                    external[i].z -= w;
                }
            }
        }
        for (i, f) in &act.point_loads {
            external[*i] += f;
        }

        Ok(Self {
            mesh,
            model,
            act,
            dof,
            ndof,
            pattern,
            external,
            l0: mesh.cable_length(None),
            cable_points,
        })
    }

    fn cable_active(&self) -> bool {
        !self.act.cable_released
    }

    fn scatter(&self, out: &mut [f64], node: usize, v: &Vector3<f64>) {
        if let Some(d) = self.dof[node] {
            for k in 0..3 {
                out[d + k] += v[k];
            }
        }
    }

    fn positions(&self, u: &[Vector3<f64>]) -> Vec<Point> {
        self.mesh.nodes.iter().zip(u).map(|(x, d)| x + d).collect()
    }

    /// `E - f.u + tau c + rho/2 c^2`; infinite if an element inverts.
    fn merit(&self, u: &[Vector3<f64>], scale: f64, target: f64, tau: f64, rho: f64) -> f64 {
        let x = self.positions(u);
        let Ok(e) = self.model.energy(&x) else {
            return f64::INFINITY;
        };
        let work: f64 = self.external.iter().zip(u).map(|(f, d)| scale * f.dot(d)).sum();
        let mut phi = e - work;
        if self.cable_active() {
            let c = self.mesh.cable_length(Some(u)) - target;
            phi += tau * c + 0.5 * rho * c * c;
        }
        phi
    }

    fn assemble(&self, blocks: &[Mat12], cable: Option<(&CableState, f64)>) -> SpdMatrix<'_> {
        let mut a = self.pattern.zeros();
        for (el, k) in self.model.elements().iter().zip(blocks) {
            for (ia, &na) in el.nodes.iter().enumerate() {
                let Some(da) = self.dof[na] else { continue };
                for (ib, &nb) in el.nodes.iter().enumerate() {
                    let Some(db) = self.dof[nb] else { continue };
                    if db > da + 2 {
                        continue;
                    }
                    for i in 0..3 {
                        for j in 0..3 {
                            a.add(da + i, db + j, k[(3 * ia + i, 3 * ib + j)]);
                        }
                    }
                }
            }
        }
        if let Some((cs, tau)) = cable {
            if tau > 0.0 {
                for &(p, q, t, l) in &cs.segments {
                    let h: Matrix3<f64> = (Matrix3::identity() - t * t.transpose()) * (tau / l);
                    // Segment vector d = sum of signed weights times nodes.
                    let coeffs: Vec<(usize, f64)> = self.cable_points[p]
                        .iter()
                        .map(|&(i, w)| (i, -w))
                        .chain(self.cable_points[q].iter().copied())
                        .collect();
                    for &(na, ca) in &coeffs {
                        let Some(da) = self.dof[na] else { continue };
                        for &(nb, cb) in &coeffs {
                            let Some(db) = self.dof[nb] else { continue };
                            if db > da {
                                continue;
                            }
                            for i in 0..3 {
                                for j in 0..3 {
                                    a.add(da + i, db + j, ca * cb * h[(i, j)]);
                                }
                            }
                        }
                    }
                }
            }
        }
        a
    }

    fn factor(&self, x: &[Point], blocks: Vec<Mat12>, cable: Option<(&CableState, f64)>) -> Result<SpdFactor<'_>> {
        match self.assemble(&blocks, cable).factorize() {
            Ok(f) => Ok(f),
            Err(_) => {
                let (_, projected) = self.model.forces_and_blocks(x, true)?;
                let mut a = self.assemble(&projected, cable);
                // Guard against a singular projection (e.g. a mechanism).
                let shift = 1e-10 * self.model_scale();
                for i in 0..self.ndof {
                    a.add(i, i, shift);
                }
                a.factorize()
            }
        }
    }

    /// Rough stiffness scale (N/mm) used for regularization and slack.
    fn model_scale(&self) -> f64 {
        let (mu, lambda) = self.model.lame();
        (2.0 * mu + lambda) * self.l0.max(1.0)
    }

    fn run(&self) -> Result<StaticSolution> {
        let n = self.mesh.nodes.len();
        let mut u = vec![Vector3::zeros(); n];
        let mut tau = 0.0;
        let mut iterations = 0;
        let mut merit_history = Vec::new();
        let mut converged = true;
        let mut residual = 0.0;
        let mut constraint_residual = 0.0;
        let mut failure = None;
        let steps = self.act.load_steps;
        let cable_tol = CABLE_TOLERANCE * self.l0;

        'steps: for step in 1..=steps {
            let scale = step as f64 / steps as f64;
            let target = self.l0 - scale * self.act.cable_displacement;
            let mut it = 0;
            loop {
                let x = self.positions(&u);
                let (forces, blocks) = self.model.forces_and_blocks(&x, false)?;
                let mut r = vec![0.0; self.ndof];
                for (i, f) in forces.iter().enumerate() {
                    self.scatter(&mut r, i, &(-f - scale * self.external[i]));
                }
                let cs = self.cable_active().then(|| cable_state(&self.cable_points, &x));
                let mut g = vec![0.0; self.ndof];
                let mut c = 0.0;
                if let Some(cs) = &cs {
                    for (i, v) in &cs.grad {
                        self.scatter(&mut g, *i, v);
                    }
                    c = cs.length - target;
                    for (ri, gi) in r.iter_mut().zip(&g) {
                        *ri += tau * gi;
                    }
                }
                residual = norm(&r);
                constraint_residual = c;
                if residual <= self.act.tolerance && c.abs() <= cable_tol {
                    break;
                }
                if it == self.act.max_iterations {
                    log::warn!(
                        "load step {step}/{steps}: no convergence after {it} iterations (residual {residual:e} N, cable error {c:e} mm)"
                    );
                    failure = Some(format!("load step {step}/{steps}: iteration limit reached"));
                    converged = false;
                    break 'steps;
                }
                it += 1;
                iterations += 1;

                let chol = self.factor(&x, blocks, cs.as_ref().map(|cs| (cs, tau)))?;
                let a = chol.solve(&r);
                let (du, dtau, rho) = if cs.is_some() {
                    let b = chol.solve(&g);
                    let gb = dot(&g, &b);
                    let dtau = (c - dot(&g, &a)) / gb;
                    let du: Vec<f64> = a.iter().zip(&b).map(|(ai, bi)| -ai - dtau * bi).collect();
                    (du, dtau, 10.0 / gb)
                } else {
                    (a.iter().map(|v| -v).collect(), 0.0, 0.0)
                };
                let tau_new = tau + dtau;
                // A du = -(r + dtau g)
                let curvature: f64 = du
                    .iter()
                    .zip(r.iter().zip(&g))
                    .map(|(d, (ri, gi))| -d * (ri + dtau * gi))
                    .sum();
                let slope = -curvature - rho * c * c;

                let phi0 = self.merit(&u, scale, target, tau_new, rho);
                let slack = 1e-12 * phi0.abs().max(self.model_scale() * 1e-12);
                let mut alpha = 1.0;
                let mut accepted = None;
                let mut all_inverted = true;
                for _ in 0..40 {
                    let trial = self.step(&u, &du, alpha);
                    let phi = self.merit(&trial, scale, target, tau_new, rho);
                    if phi.is_finite() {
                        all_inverted = false;
                        if phi <= phi0 + 1e-4 * alpha * slope + slack {
                            accepted = Some((trial, phi));
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
                match accepted {
                    Some((trial, phi)) => {
                        merit_history.push(MeritRecord {
                            load_step: step,
                            before: phi0,
                            after: phi,
                            step_length: alpha,
                        });
                        u = trial;
                        tau += alpha * dtau;
                    }
                    None => {
                        let why = if all_inverted {
                            match self.model.energy(&self.positions(&self.step(&u, &du, 1.0))) {
                                Err(e) => format!("every trial step fails: {e}"),
                                Ok(_) => "every trial step gives a non-finite merit".to_string(),
                            }
                        } else {
                            "no sufficient decrease".to_string()
                        };
                        log::warn!("load step {step}/{steps}: line search failed, {why} (residual {residual:e} N)");
                        failure = Some(format!("load step {step}/{steps}: line search failed, {why}"));
                        converged = false;
                        break 'steps;
                    }
                }
            }
        }

        if self.cable_active() && converged && tau < 0.0 {
            log::warn!("cable tension is negative ({tau:e} N): the cable pushes");
        }
        Ok(StaticSolution {
            displacements: u,
            converged,
            iterations,
            residual,
            constraint_residual,
            tension: if self.cable_active() { tau } else { 0.0 },
            merit_history,
            failure,
        })
    }

    fn step(&self, u: &[Vector3<f64>], du: &[f64], alpha: f64) -> Vec<Vector3<f64>> {
        u.iter()
            .enumerate()
            .map(|(i, v)| match self.dof[i] {
                Some(d) => v + alpha * Vector3::new(du[d], du[d + 1], du[d + 2]),
                None => *v,
            })
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
