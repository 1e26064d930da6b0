//! Procedural tetrahedral mesher for the finger.
//!
//! The body is a structured hex grid whose x and y lines are shared by all
//! layers while the z coordinates of each node column follow the cavity
//! roof. Every hex is split into six tetrahedra. Along the finger the grid
//! is a stack of segments: the base block, then per bellow a lower cap, the
//! cavity band and an upper cap, corks between bellows and the tip block.
//! Inside a bellow the cavity footprint is void, the walls around it and the
//! back spine are solid, and the strip in front of the front wall is an open
//! slot. The cavity roof depends on `x` only, so it is represented exactly
//! at every resolution.
//!
//! The grid lines start from the feature breakpoints. Node targets are met
//! by graded levels that split the intervals next to the cavities, or by a
//! uniform nominal cell size when no level is close enough.

use softopt_fem::{CavitySurface, Point, TetMesh, HEX_TO_TETS};

use crate::design::{FingerDesign, Layout};
use crate::{Error, Result};

/// Breakpoints closer than this are merged.
const MERGE_DISTANCE: f64 = 0.3;

/// Smallest nominal cell size tried when searching for a node target, mm.
const MIN_CELL_SIZE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshingSpec {
    pub target_nodes: usize,
    /// Cells near the cavities are this many times smaller.
    pub refinement_factor: f64,
}

impl Default for MeshingSpec {
    fn default() -> Self {
        Self {
            target_nodes: 500,
            refinement_factor: 2.0,
        }
    }
}

impl MeshingSpec {
    pub fn new(target_nodes: usize) -> Self {
        Self {
            target_nodes,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_nodes < 100 {
            return Err(Error::InvalidMeshing(format!(
                "target_nodes must be at least 100, got {}",
                self.target_nodes
            )));
        }
        if !(self.refinement_factor >= 1.0 && self.refinement_factor.is_finite()) {
            return Err(Error::InvalidMeshing(format!(
                "refinement_factor must be at least 1, got {}",
                self.refinement_factor
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Footprint,
    Ring,
    Spine,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Band {
    Solid,
    Cap,
    Cavity(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cell {
    Air,
    Solid,
    Cavity(usize),
}

/// How finely the breakpoint intervals are divided. An interval gets
/// enough cells to stay below the nominal size (`h / rf` next to a
/// cavity), times its split count.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Resolution {
    h: f64,
    hz: f64,
    rf: f64,
    /// Per axis: split of intervals away from and next to the cavities.
    split: [[usize; 2]; 3],
}

impl Resolution {
    fn uniform(h: f64, hz: f64, rf: f64) -> Self {
        Self {
            h,
            hz,
            rf,
            split: [[1; 2]; 3],
        }
    }

    /// Level `k` splits every cavity-adjacent interval across the footprint
    /// (y) and through the cavity and cap layers (z) into `k` cells. The
    /// rest of the grid is only split once those cells are more than
    /// `3 rf` times finer.
    fn graded(k: usize, rf: f64) -> Self {
        let c = (k as f64 / (3.0 * rf)).ceil().max(1.0) as usize;
        Self {
            h: f64::INFINITY,
            hz: f64::INFINITY,
            rf,
            split: [[c, c], [c, k], [c, k]],
        }
    }

    fn cells(&self, len: f64, size: f64, split: usize) -> usize {
        ((len / size) - 1e-9).ceil().max(1.0) as usize * split
    }
}

/// Grid lines through `breaks`, with `fine` marking the intervals next to
/// a cavity.
fn subdivide(breaks: &[f64], fine: impl Fn(f64, f64) -> bool, res: &Resolution, axis: usize) -> Vec<f64> {
    let mut lines = vec![breaks[0]];
    for w in breaks.windows(2) {
        let len = w[1] - w[0];
        let f = fine(w[0], w[1]);
        let size = if f { res.h / res.rf } else { res.h };
        let n = res.cells(len, size, res.split[axis][f as usize]);
        for k in 1..=n {
            lines.push(if k == n { w[1] } else { w[0] + len * k as f64 / n as f64 });
        }
    }
    lines
}

/// Adds `v` unless a line lies within the merge distance; returns the line
/// that represents `v`.
fn insert_break(lines: &mut Vec<f64>, v: f64) -> f64 {
    if let Some(&near) = lines.iter().find(|&&l| (l - v).abs() < MERGE_DISTANCE) {
        return near;
    }
    lines.push(v);
    lines.sort_by(f64::total_cmp);
    v
}

struct Grid {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Node level -> (segment, local index, sublayer count).
    levels: Vec<(usize, usize, usize)>,
    /// Per segment: band kind.
    bands: Vec<Band>,
    cells: Vec<Cell>,
    ix_cable: usize,
    ix_tip: usize,
    iy_mid: usize,
    design: FingerDesign,
    layout: Layout,
}

impl Grid {
    fn new(design: &FingerDesign, layout: &Layout, res: &Resolution) -> Self {
        let g = &design.globals;
        let (r, w) = (design.outer_radius, design.wall_thickness);

        let mut xb = vec![0.0, layout.x_ring, layout.x_front, layout.x_back, g.height];
        xb.sort_by(f64::total_cmp);
        xb.dedup();
        let x_tip = insert_break(&mut xb, layout.x_mid);
        let x_cable = insert_break(&mut xb, layout.x_cable);
        if layout.q_peak < layout.x_back - layout.x_front {
            insert_break(&mut xb, layout.x_front + layout.q_peak);
        }
        let half = g.width / 2.0;
        let yb = [-half, -r, 0.0, r, half];
        let x_fine_from = layout.x_ring - 1e-9;
        let xs = subdivide(&xb, |a, _| a >= x_fine_from, res, 0);
        let ys = subdivide(&yb, |a, b| a >= -r - 1e-9 && b <= r + 1e-9, res, 1);

        // Segments along z with their nominal (largest) length.
        let n = g.cavity_count;
        let mut bands = vec![Band::Solid];
        let mut nominal = vec![g.base_thickness + (design.cavity_height - design.plateau_height) / 2.0];
        for i in 0..n {
            bands.extend([Band::Cap, Band::Cavity(i), Band::Cap]);
            nominal.extend([w, design.cavity_height, w]);
            if i + 1 < n {
                bands.push(Band::Solid);
                nominal.push(design.cork_thickness + design.cavity_height - design.plateau_height);
            }
        }
        bands.push(Band::Solid);
        let last = layout.z_centers[n - 1] + design.cavity_height / 2.0 + w;
        nominal.push(g.length - last + (design.cavity_height - design.plateau_height) / 2.0);

        let mut levels = vec![(0, 0, 1)];
        for (s, (&band, &len)) in bands.iter().zip(&nominal).enumerate() {
            let fine = band != Band::Solid;
            let size = if fine { res.hz / res.rf } else { res.hz };
            let count = res.cells(len, size, res.split[2][fine as usize]);
            for t in 1..=count {
                levels.push(if t == count { (s + 1, 0, 1) } else { (s, t, count) });
            }
        }
        // The last level closes the final segment.
        let top = levels.len() - 1;
        levels[top] = (bands.len() - 1, 1, 1);

        let find = |lines: &[f64], v: f64| {
            lines
                .iter()
                .position(|&l| (l - v).abs() < 1e-12)
                .expect("breakpoint is a grid line")
        };
        let mut grid = Self {
            ix_cable: find(&xs, x_cable),
            ix_tip: find(&xs, x_tip),
            iy_mid: find(&ys, 0.0),
            xs,
            ys,
            levels,
            bands,
            cells: Vec::new(),
            design: *design,
            layout: layout.clone(),
        };
        grid.classify();
        grid
    }

    fn dims(&self) -> (usize, usize, usize) {
        (self.xs.len() - 1, self.ys.len() - 1, self.levels.len() - 1)
    }

    fn region(&self, x: f64, y: f64) -> Region {
        let r = self.design.outer_radius;
        let l = &self.layout;
        if x > l.x_back {
            Region::Spine
        } else if x > l.x_front && y.abs() < r {
            Region::Footprint
        } else if x > l.x_ring {
            Region::Ring
        } else {
            Region::Outside
        }
    }

    /// Band of the cell layer above node level `k`.
    fn layer_band(&self, k: usize) -> Band {
        self.bands[self.levels[k].0]
    }

    fn classify(&mut self) {
        let (nx, ny, nz) = self.dims();
        let mut cells = Vec::with_capacity(nx * ny * nz);
        for k in 0..nz {
            let band = self.layer_band(k);
            for j in 0..ny {
                let yc = 0.5 * (self.ys[j] + self.ys[j + 1]);
                for i in 0..nx {
                    let xc = 0.5 * (self.xs[i] + self.xs[i + 1]);
                    let region = self.region(xc, yc);
                    cells.push(match (band, region) {
                        (Band::Solid, _) => Cell::Solid,
                        (_, Region::Outside) => Cell::Air,
                        (Band::Cavity(c), Region::Footprint) => Cell::Cavity(c),
                        _ => Cell::Solid,
                    });
                }
            }
        }
        self.cells = cells;
    }

    fn cell(&self, i: usize, j: usize, k: usize) -> Cell {
        let (nx, ny, _) = self.dims();
        self.cells[(k * ny + j) * nx + i]
    }

    fn node_id(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.ys.len() + j) * self.xs.len() + i
    }

    /// Cavity half height at `x`: the plateau at the front rim, rising at
    /// the slope angle until the peak height.
    fn half_height(&self, x: f64) -> f64 {
        let d = &self.design;
        let l = &self.layout;
        let q = (x.min(l.x_back) - l.x_front).max(0.0);
        let tan = d.joint_slope_angle.to_radians().tan();
        (d.plateau_height / 2.0 + q * tan).min(d.cavity_height / 2.0)
    }

    /// Segment boundaries of the node columns at `x`.
    fn column(&self, x: f64) -> Vec<f64> {
        let hh = self.half_height(x);
        let hw = hh + self.design.wall_thickness;
        let mut b = vec![0.0];
        for &zc in &self.layout.z_centers {
            b.extend([zc - hw, zc - hh, zc + hh, zc + hw]);
        }
        b.push(self.design.globals.length);
        b
    }

    fn used_nodes(&self) -> Vec<bool> {
        let (nx, ny, nz) = self.dims();
        let mut used = vec![false; self.xs.len() * self.ys.len() * (nz + 1)];
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    if self.cell(i, j, k) == Cell::Solid {
                        for (di, dj, dk) in CORNERS {
                            used[self.node_id(i + di, j + dj, k + dk)] = true;
                        }
                    }
                }
            }
        }
        used
    }

    fn node_count(&self) -> usize {
        self.used_nodes().iter().filter(|&&u| u).count()
    }

    fn build(&self) -> Result<TetMesh> {
        let (nx, ny, nz) = self.dims();
        let used = self.used_nodes();
        let mut index = vec![usize::MAX; used.len()];
        let mut nodes = Vec::new();
        for j in 0..=ny {
            for i in 0..=nx {
                let (x, y) = (self.xs[i], self.ys[j]);
                let col = self.column(x);
                for k in 0..=nz {
                    let id = self.node_id(i, j, k);
                    if !used[id] {
                        continue;
                    }
                    let (s, t, n) = self.levels[k];
                    let z = col[s] + (col[s + 1] - col[s]) * t as f64 / n as f64;
                    nodes.push((id, Point::new(x, y, z)));
                }
            }
        }
        // Number nodes level by level so the base comes first.
        nodes.sort_by_key(|&(id, _)| id);
        let mut points = Vec::with_capacity(nodes.len());
        for (n, (id, p)) in nodes.into_iter().enumerate() {
            index[id] = n;
            points.push(p);
        }

        let corner_ids =
            |i: usize, j: usize, k: usize| CORNERS.map(|(di, dj, dk)| index[self.node_id(i + di, j + dj, k + dk)]);
        let mut tets = Vec::new();
        let mut cavities: Vec<Vec<[usize; 3]>> = vec![Vec::new(); self.design.globals.cavity_count];
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    match self.cell(i, j, k) {
                        Cell::Solid => {
                            let v = corner_ids(i, j, k);
                            tets.extend(HEX_TO_TETS.iter().map(|t| t.map(|c| v[c])));
                        }
                        Cell::Cavity(c) => self.cavity_faces([i, j, k], c, &index, &points, &mut cavities[c])?,
                        Cell::Air => {}
                    }
                }
            }
        }

        let fixed_nodes = (0..points.len()).filter(|&n| points[n].z == 0.0).collect();
        // The cable runs up its column and ends on a patch of the top face,
        // which spreads its pull instead of loading a single node.
        let cable_path: Vec<usize> = (0..nz)
            .map(|k| index[self.node_id(self.ix_cable, self.iy_mid, k)])
            .filter(|&n| n != usize::MAX)
            .collect();
        let cable_anchor = self.cable_anchor(&index);
        let tip_node = index[self.node_id(self.ix_tip, self.iy_mid, nz)];
        let mesh = TetMesh {
            nodes: points,
            tets,
            cavities: cavities
                .into_iter()
                .enumerate()
                .map(|(c, triangles)| CavitySurface {
                    name: format!("cavity{}", c + 1),
                    triangles,
                })
                .collect(),
            fixed_nodes,
            cable_path,
            cable_anchor,
            tip_node,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Top-face nodes in front of the cavities within the footprint width,
    /// weighted like a traction that varies linearly in `x` and whose
    /// centroid lies on the cable column (the cable line after snapping to
    /// the grid).
    fn cable_anchor(&self, index: &[usize]) -> Vec<(usize, f64)> {
        let l = &self.layout;
        let r = self.design.outer_radius;
        let nz = self.dims().2;
        let xs: Vec<usize> = (0..self.xs.len()).filter(|&i| self.xs[i] <= l.x_front + 1e-9).collect();
        let ys: Vec<usize> = (0..self.ys.len()).filter(|&j| self.ys[j].abs() <= r + 1e-9).collect();
        let span = l.x_front;
        let x_cable = self.xs[self.ix_cable];
        let beta = 12.0 * (x_cable - span / 2.0) / (span * span);
        let p = |x: f64| 1.0 + beta * (x - span / 2.0);
        let mut wx = vec![0.0; xs.len()];
        for a in 0..xs.len() - 1 {
            let (x0, x1) = (self.xs[xs[a]], self.xs[xs[a + 1]]);
            let dx = x1 - x0;
            wx[a] += dx / 6.0 * (2.0 * p(x0) + p(x1));
            wx[a + 1] += dx / 6.0 * (p(x0) + 2.0 * p(x1));
        }
        let mut wy = vec![0.0; ys.len()];
        for b in 0..ys.len() - 1 {
            let dy = self.ys[ys[b + 1]] - self.ys[ys[b]];
            wy[b] += dy / 2.0;
            wy[b + 1] += dy / 2.0;
        }
        let mut anchor = Vec::new();
        for (a, &i) in xs.iter().enumerate() {
            for (b, &j) in ys.iter().enumerate() {
                anchor.push((index[self.node_id(i, j, nz)], wx[a] * wy[b]));
            }
        }
        let total: f64 = anchor.iter().map(|&(_, w)| w).sum();
        anchor.iter_mut().for_each(|(_, w)| *w /= total);
        anchor
    }

    /// Emits the faces of cavity cell `ijk` that border solid cells,
    /// each split along the diagonal through its lowest corner and oriented
    /// from the void into the solid.
    fn cavity_faces(
        &self,
        ijk: [usize; 3],
        c: usize,
        index: &[usize],
        points: &[Point],
        out: &mut Vec<[usize; 3]>,
    ) -> Result<()> {
        let (nx, ny, nz) = self.dims();
        let dims = [nx, ny, nz];
        for axis in 0..3 {
            for side in [0usize, 1] {
                let mut nb = ijk;
                let inside = if side == 0 {
                    nb[axis] > 0 && {
                        nb[axis] -= 1;
                        true
                    }
                } else {
                    nb[axis] + 1 < dims[axis] && {
                        nb[axis] += 1;
                        true
                    }
                };
                let neighbour = if inside {
                    self.cell(nb[0], nb[1], nb[2])
                } else {
                    Cell::Air
                };
                match neighbour {
                    Cell::Cavity(d) if d == c => continue,
                    Cell::Solid => {}
                    _ => {
                        return Err(Error::Infeasible {
                            clearance: "cavity enclosure",
                            detail: format!("cavity {} is not enclosed by material", c + 1),
                        })
                    }
                }
                // Face corners in the two remaining axes, lowest first.
                let (a, b) = match axis {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                let corner = |da: usize, db: usize| {
                    let mut p = ijk;
                    p[axis] += side;
                    p[a] += da;
                    p[b] += db;
                    index[self.node_id(p[0], p[1], p[2])]
                };
                let quad = [corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)];
                let mut normal_dir = [0.0; 3];
                normal_dir[axis] = if side == 0 { -1.0 } else { 1.0 };
                let outward = Point::from(normal_dir);
                for tri in [[quad[0], quad[1], quad[2]], [quad[0], quad[2], quad[3]]] {
                    let [p, q, r] = tri.map(|n| points[n]);
                    if (q - p).cross(&(r - p)).dot(&outward) > 0.0 {
                        out.push(tri);
                    } else {
                        out.push([tri[0], tri[2], tri[1]]);
                    }
                }
            }
        }
        Ok(())
    }
}

const CORNERS: [(usize, usize, usize); 8] = [
    (0, 0, 0),
    (1, 0, 0),
    (1, 1, 0),
    (0, 1, 0),
    (0, 0, 1),
    (1, 0, 1),
    (1, 1, 1),
    (0, 1, 1),
];

/// Used node count for a nominal cell size `h`.
pub fn node_count_for_size(design: &FingerDesign, cell_size: f64, refinement_factor: f64) -> Result<usize> {
    let layout = design.layout()?;
    let res = Resolution::uniform(cell_size, cell_size, refinement_factor);
    Ok(Grid::new(design, &layout, &res).node_count())
}

/// Meshes `design` with a node count within 20% of `spec.target_nodes`.
pub fn build_finger(design: &FingerDesign, spec: &MeshingSpec) -> Result<TetMesh> {
    spec.validate()?;
    let layout = design.layout()?;
    let res = resolution_for_target(design, &layout, spec)?;
    Grid::new(design, &layout, &res).build()
}

/// Meshes `design` at an explicit nominal cell size.
pub fn build_finger_with_size(design: &FingerDesign, cell_size: f64, refinement_factor: f64) -> Result<TetMesh> {
    let layout = design.layout()?;
    Grid::new(
        design,
        &layout,
        &Resolution::uniform(cell_size, cell_size, refinement_factor),
    )
    .build()
}

/// Meshes `design` at graded level `level` (at least 1).
pub fn build_finger_at_level(design: &FingerDesign, level: usize, refinement_factor: f64) -> Result<TetMesh> {
    if level == 0 {
        return Err(Error::InvalidMeshing("graded level must be at least 1".into()));
    }
    let layout = design.layout()?;
    Grid::new(design, &layout, &Resolution::graded(level, refinement_factor)).build()
}

/// Aspect ratios `hz / h` tried, isotropic first. Node counts jump when
/// many equal intervals gain a cell at once; a second ratio moves the jumps.
const ASPECTS: [f64; 7] = [1.0, 0.9, 1.1, 0.8, 1.25, 0.7, 1.4];

/// Highest graded level tried.
const MAX_LEVEL: usize = 64;

/// Largest mesh the target search will build.
const MAX_NODES: usize = 400_000;

/// The graded level closest to the target when one is within 20% of it.
/// Graded levels refine where the cavity walls bend, so successive levels
/// converge smoothly. Targets between levels fall back to the uniform cell
/// size closest to the target.
fn resolution_for_target(design: &FingerDesign, layout: &Layout, spec: &MeshingSpec) -> Result<Resolution> {
    let target = spec.target_nodes as f64;
    let tolerance = 0.2 * target;
    let mut best: Option<(f64, Resolution)> = None;
    for k in 1..=MAX_LEVEL {
        let res = Resolution::graded(k, spec.refinement_factor);
        let n = Grid::new(design, layout, &res).node_count() as f64;
        if (n - target).abs() <= tolerance && best.is_none_or(|(e, _)| (n - target).abs() < e) {
            best = Some(((n - target).abs(), res));
        }
        if n > target + tolerance || n as usize > MAX_NODES {
            break;
        }
    }
    if let Some((_, res)) = best {
        return Ok(res);
    }

    let mut best = (f64::INFINITY, Resolution::uniform(0.0, 0.0, 1.0));
    let (mut n_min, mut n_max) = (usize::MAX, 0);
    for aspect in ASPECTS {
        let res = |h: f64| Resolution::uniform(h, h * aspect, spec.refinement_factor);
        let count = |h: f64| Grid::new(design, layout, &res(h)).node_count();
        let mut consider = |h: f64, n: usize| {
            let err = (n as f64 - target).abs();
            if err < best.0 {
                best = (err, res(h));
            }
        };
        let mut hi = design.globals.length;
        let mut n_hi = count(hi);
        consider(hi, n_hi);
        n_min = n_min.min(n_hi);
        // Halve the size until the target is bracketed.
        let mut lo = hi;
        let mut n_lo = n_hi;
        while (n_lo as f64) < target && lo > MIN_CELL_SIZE && n_lo <= MAX_NODES {
            hi = lo;
            n_hi = n_lo;
            lo /= 2.0;
            n_lo = count(lo);
            consider(lo, n_lo);
        }
        n_max = n_max.max(n_lo);
        if (n_lo as f64) >= target && n_hi as f64 <= target {
            for _ in 0..40 {
                let mid = (lo * hi).sqrt();
                let n = count(mid);
                consider(mid, n);
                if (n as f64) < target {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi / lo < 1.0 + 1e-6 {
                    break;
                }
            }
        }
        if best.0 <= 0.05 * target {
            break;
        }
    }
    if best.0 > tolerance {
        return Err(Error::NodeTarget {
            target: spec.target_nodes,
            min: n_min,
            max: n_max,
        });
    }
    Ok(best.1)
}
