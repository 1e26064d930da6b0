//! Cavity volumes and tip angles of deformed meshes.

use nalgebra::Vector3;

use crate::mesh::{surface_defects, Point, TetMesh};
use crate::solver::StaticSolution;
use crate::{Error, Result};

/// Signed volume enclosed by a triangle surface, `1/6 sum p1.(p2 x p3)`.
/// Positive for outward orientation. Does not check closedness.
pub fn surface_volume(points: &[Point], triangles: &[[usize; 3]]) -> f64 {
    triangles
        .iter()
        .map(|t| points[t[0]].dot(&points[t[1]].cross(&points[t[2]])))
        .sum::<f64>()
        / 6.0
}

/// Errors with the offending edges if the surface is not closed and
/// consistently oriented.
pub fn check_closed(cavity: usize, triangles: &[[usize; 3]]) -> Result<()> {
    let edges = surface_defects(triangles);
    if edges.is_empty() && !triangles.is_empty() {
        Ok(())
    } else {
        Err(Error::OpenSurface { cavity, edges })
    }
}

/// Volume of cavity `cavity_id` with the nodes displaced by `u` (mm^3).
pub fn cavity_volume_displaced(mesh: &TetMesh, u: &[Vector3<f64>], cavity_id: usize) -> Result<f64> {
    let cav = mesh.cavities.get(cavity_id).ok_or(Error::UnknownCavity(cavity_id))?;
    check_closed(cavity_id, &cav.triangles)?;
    if u.len() != mesh.nodes.len() {
        return Err(Error::InvalidMesh(
            "displacement field size does not match the mesh".into(),
        ));
    }
    // Shifting by a surface point keeps the sum well conditioned far from
    // the origin; the closed-surface sum is translation invariant.
    let origin = cav
        .triangles
        .first()
        .map(|t| mesh.nodes[t[0]] + u[t[0]])
        .unwrap_or_else(Point::zeros);
    let v: f64 = cav
        .triangles
        .iter()
        .map(|t| {
            let p = t.map(|i| mesh.nodes[i] + u[i] - origin);
            p[0].dot(&p[1].cross(&p[2]))
        })
        .sum();
    Ok(v / 6.0)
}

pub fn cavity_volume(mesh: &TetMesh, solution: &StaticSolution, cavity_id: usize) -> Result<f64> {
    cavity_volume_displaced(mesh, &solution.displacements, cavity_id)
}

/// Rest-state volume of a cavity.
pub fn rest_cavity_volume(mesh: &TetMesh, cavity_id: usize) -> Result<f64> {
    cavity_volume_displaced(mesh, &vec![Vector3::zeros(); mesh.nodes.len()], cavity_id)
}

/// Angle in degrees between the vertical and the segment from the fixed
/// nodes' centroid to the tip node.
pub fn tip_angle_displaced(mesh: &TetMesh, u: &[Vector3<f64>]) -> Result<f64> {
    if mesh.fixed_nodes.is_empty() {
        return Err(Error::InvalidMesh("no fixed nodes".into()));
    }
    let pos = |i: usize| mesh.nodes[i] + u.get(i).copied().unwrap_or_else(Vector3::zeros);
    let base = mesh.fixed_nodes.iter().map(|&i| pos(i)).sum::<Point>() / mesh.fixed_nodes.len() as f64;
    let v = pos(mesh.tip_node) - base;
    let len = v.norm();
    if !(len > 1e-12 * (1.0 + base.norm())) {
        return Err(Error::TipAtBase);
    }
    Ok((v.z.abs() / len).clamp(0.0, 1.0).acos().to_degrees())
}

pub fn tip_angle(mesh: &TetMesh, solution: &StaticSolution) -> Result<f64> {
    tip_angle_displaced(mesh, &solution.displacements)
}

/// `tip_angle(solution) - tip_angle(rest)`, degrees.
pub fn angular_displacement(mesh: &TetMesh, solution: &StaticSolution) -> Result<f64> {
    Ok(tip_angle(mesh, solution)? - tip_angle_displaced(mesh, &[])?)
}
