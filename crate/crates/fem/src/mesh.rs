//! Tetrahedral meshes with tagged cavity surfaces, a fixed node set, a cable
//! path and a tip reference node.

use std::collections::HashMap;

use nalgebra::Vector3;

use crate::{Error, Result};

pub type Point = Vector3<f64>;

/// Local corner indices of the six tetrahedra of a hexahedron split along
/// its 0-6 diagonal. Corners follow the usual ordering: 0-3 on the bottom
/// face counter-clockwise from the minimum corner, 4-7 above them. Every
/// face is cut along the diagonal through its minimum corner, so neighbouring
/// hexes split the same way produce a conforming mesh. All six tets are
/// positively oriented for a right-handed hex.
pub const HEX_TO_TETS: [[usize; 4]; 6] = [
    [0, 1, 2, 6],
    [0, 2, 3, 6],
    [0, 3, 7, 6],
    [0, 7, 4, 6],
    [0, 4, 5, 6],
    [0, 5, 1, 6],
];

#[derive(Debug, Clone, PartialEq)]
pub struct CavitySurface {
    pub name: String,
    /// Outward-oriented triangles (normals point away from the enclosed void).
    pub triangles: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TetMesh {
    pub nodes: Vec<Point>,
    pub tets: Vec<[usize; 4]>,
    pub cavities: Vec<CavitySurface>,
    /// Sorted, deduplicated.
    pub fixed_nodes: Vec<usize>,
    pub cable_path: Vec<usize>,
    /// Optional weighted node set whose weighted mean is the cable's end
    /// point, after the last path node. Spreads the pull over a patch
    /// instead of loading a single node. Weights sum to one.
    pub cable_anchor: Vec<(usize, f64)>,
    pub tip_node: usize,
}

/// A point on the cable: a weighted combination of node positions.
pub type CablePoint = Vec<(usize, f64)>;

pub fn signed_tet_volume(p: [&Point; 4]) -> f64 {
    (p[1] - p[0]).dot(&(p[2] - p[0]).cross(&(p[3] - p[0]))) / 6.0
}

/// Directed edges that break the closed-and-consistently-oriented property:
/// each directed edge must occur exactly once and its reverse exactly once.
pub fn surface_defects(triangles: &[[usize; 3]]) -> Vec<(usize, usize)> {
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for t in triangles {
        for k in 0..3 {
            *count.entry((t[k], t[(k + 1) % 3])).or_default() += 1;
        }
    }
    let mut bad: Vec<(usize, usize)> = count
        .iter()
        .filter(|(&(a, b), &n)| n != 1 || count.get(&(b, a)).copied() != Some(1))
        .map(|(&e, _)| e)
        .collect();
    bad.sort_unstable();
    bad
}

impl TetMesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn tet_volume(&self, t: usize) -> f64 {
        let [a, b, c, d] = self.tets[t];
        signed_tet_volume([&self.nodes[a], &self.nodes[b], &self.nodes[c], &self.nodes[d]])
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.tets.len()).map(|t| self.tet_volume(t)).sum()
    }

    pub fn is_fixed(&self, node: usize) -> bool {
        self.fixed_nodes.binary_search(&node).is_ok()
    }

    /// Path nodes followed by the anchor, if any.
    pub fn cable_points(&self) -> Vec<CablePoint> {
        let mut pts: Vec<CablePoint> = self.cable_path.iter().map(|&i| vec![(i, 1.0)]).collect();
        if !self.cable_anchor.is_empty() {
            pts.push(self.cable_anchor.clone());
        }
        pts
    }

    pub fn cable_length(&self, displacements: Option<&[Point]>) -> f64 {
        let pos = |p: &CablePoint| -> Point {
            p.iter()
                .map(|&(i, w)| {
                    w * match displacements {
                        Some(u) => self.nodes[i] + u[i],
                        None => self.nodes[i],
                    }
                })
                .sum()
        };
        self.cable_points()
            .windows(2)
            .map(|w| (pos(&w[1]) - pos(&w[0])).norm())
            .sum()
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        let in_range = |i: usize| i < n;
        if n == 0 || self.tets.is_empty() {
            return Err(Error::InvalidMesh("mesh has no nodes or no tetrahedra".into()));
        }
        if let Some(p) = self.nodes.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidMesh(format!("node {p} has non-finite coordinates")));
        }
        for (t, tet) in self.tets.iter().enumerate() {
            if !tet.iter().all(|&i| in_range(i)) {
                return Err(Error::InvalidMesh(format!("tet {t} references a missing node")));
            }
            let v = self.tet_volume(t);
            if !(v > 0.0) {
                return Err(Error::InvertedElement { element: t, volume: v });
            }
        }
        for (c, cav) in self.cavities.iter().enumerate() {
            if cav.triangles.iter().flatten().any(|&i| !in_range(i)) {
                return Err(Error::InvalidMesh(format!("cavity {c} references a missing node")));
            }
            let edges = surface_defects(&cav.triangles);
            if !edges.is_empty() || cav.triangles.is_empty() {
                return Err(Error::OpenSurface { cavity: c, edges });
            }
        }
        if self.fixed_nodes.is_empty() {
            return Err(Error::InvalidMesh("no fixed nodes".into()));
        }
        if self.fixed_nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMesh("fixed node list must be sorted and unique".into()));
        }
        if !self.fixed_nodes.iter().all(|&i| in_range(i)) {
            return Err(Error::InvalidMesh("fixed node out of range".into()));
        }
        if self.cable_path.len() < 2 {
            return Err(Error::InvalidMesh("cable path needs at least two nodes".into()));
        }
        if !self.cable_path.iter().all(|&i| in_range(i)) {
            return Err(Error::InvalidMesh("cable node out of range".into()));
        }
        if self.cable_path.iter().skip(1).all(|&i| self.is_fixed(i)) {
            return Err(Error::InvalidMesh("every cable node past the first is fixed".into()));
        }
        if !self.cable_anchor.is_empty() {
            let total: f64 = self.cable_anchor.iter().map(|a| a.1).sum();
            if !self.cable_anchor.iter().all(|&(i, w)| in_range(i) && w.is_finite()) || (total - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidMesh(
                    "cable anchor weights must be finite and sum to one".into(),
                ));
            }
        }
        if !(self.cable_length(None) > 0.0) {
            return Err(Error::InvalidMesh("cable has zero rest length".into()));
        }
        if !in_range(self.tip_node) {
            return Err(Error::InvalidMesh("tip node out of range".into()));
        }
        Ok(())
    }

    /// Structured box `[0, size]` split into `cells` hexes of six tets each.
    /// Nodes on `z = 0` are fixed, the cable runs up the `x = 0, y = 0`
    /// edge and the tip is the top-face node nearest the axis. No cavities.
    pub fn structured_box(size: [f64; 3], cells: [usize; 3]) -> Self {
        let [nx, ny, nz] = cells.map(|c| c.max(1));
        let id = |i: usize, j: usize, k: usize| (k * (ny + 1) + j) * (nx + 1) + i;
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
        for k in 0..=nz {
            for j in 0..=ny {
                for i in 0..=nx {
                    nodes.push(Point::new(
                        size[0] * i as f64 / nx as f64,
                        size[1] * j as f64 / ny as f64,
                        size[2] * k as f64 / nz as f64,
                    ));
                }
            }
        }
        let mut tets = Vec::with_capacity(6 * nx * ny * nz);
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let v = [
                        id(i, j, k),
                        id(i + 1, j, k),
                        id(i + 1, j + 1, k),
                        id(i, j + 1, k),
                        id(i, j, k + 1),
                        id(i + 1, j, k + 1),
                        id(i + 1, j + 1, k + 1),
                        id(i, j + 1, k + 1),
                    ];
                    tets.extend(HEX_TO_TETS.iter().map(|t| t.map(|c| v[c])));
                }
            }
        }
        Self {
            nodes,
            tets,
            cavities: Vec::new(),
            fixed_nodes: (0..=ny).flat_map(|j| (0..=nx).map(move |i| id(i, j, 0))).collect(),
            cable_path: (0..=nz).map(|k| id(0, 0, k)).collect(),
            cable_anchor: Vec::new(),
            tip_node: id(nx / 2, ny / 2, nz),
        }
    }
}
