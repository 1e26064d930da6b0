//! Finger design parameters, fixed body dimensions and feasibility rules.
//!
//! Axes: `x` runs from the front face (cable side, `x = 0`) to the back
//! face, `y` across the width (centred on 0) and `z` from the clamped base
//! (`z = 0`) to the tip.

use std::path::Path;

use serde::{Deserialize, Serialize};
use softopt_core::{DesignSpace, DesignVector, Param};

use crate::{Error, Result};

/// Parameter names in design-vector order.
pub const PARAM_NAMES: [&str; 7] = [
    "cavity_height",
    "outer_radius",
    "cork_thickness",
    "joint_height",
    "joint_slope_angle",
    "plateau_height",
    "wall_thickness",
];

/// Body dimensions shared by every design, in mm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FingerGlobals {
    pub length: f64,
    pub width: f64,
    pub height: f64,
    pub cavity_count: usize,
    /// Distance from the cavity's front extent to the cable.
    pub cable_offset: f64,
    /// Solid block between the clamp and the first bellow.
    pub base_thickness: f64,
    pub min_tip_thickness: f64,
}

impl Default for FingerGlobals {
    fn default() -> Self {
        Self {
            length: 60.0,
            width: 20.0,
            height: 20.0,
            cavity_count: 3,
            cable_offset: 2.0,
            base_thickness: 6.0,
            min_tip_thickness: 4.0,
        }
    }
}

/// Lengths in mm, the slope angle in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FingerDesign {
    /// Peak height of each cavity.
    pub cavity_height: f64,
    /// Cavity extent from the body mid-plane towards the front and sides.
    pub outer_radius: f64,
    /// Solid spacer between consecutive bellows.
    pub cork_thickness: f64,
    /// Thickness of the continuous back spine.
    pub joint_height: f64,
    /// Slope of the cavity roof from its rim towards the peak.
    pub joint_slope_angle: f64,
    /// Cavity height at its rim.
    pub plateau_height: f64,
    pub wall_thickness: f64,
    #[serde(skip)]
    pub globals: FingerGlobals,
}

/// Resolved positions derived from a feasible design.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Layout {
    pub x_front: f64,
    pub x_back: f64,
    pub x_ring: f64,
    pub x_cable: f64,
    pub x_mid: f64,
    /// Distance behind the rim at which the roof reaches its peak height.
    pub q_peak: f64,
    pub z_centers: Vec<f64>,
}

fn infeasible(clearance: &'static str, detail: String) -> Error {
    Error::Infeasible { clearance, detail }
}

impl FingerDesign {
    pub fn new(values: [f64; 7]) -> Self {
        Self {
            cavity_height: values[0],
            outer_radius: values[1],
            cork_thickness: values[2],
            joint_height: values[3],
            joint_slope_angle: values[4],
            plateau_height: values[5],
            wall_thickness: values[6],
            globals: FingerGlobals::default(),
        }
    }

    pub fn with_globals(mut self, globals: FingerGlobals) -> Self {
        self.globals = globals;
        self
    }

    pub fn values(&self) -> [f64; 7] {
        [
            self.cavity_height,
            self.outer_radius,
            self.cork_thickness,
            self.joint_height,
            self.joint_slope_angle,
            self.plateau_height,
            self.wall_thickness,
        ]
    }

    pub fn to_vector(&self) -> DesignVector {
        DesignVector::from_unchecked(self.values().to_vec())
    }

    pub fn from_vector(x: &DesignVector, globals: FingerGlobals) -> Result<Self> {
        let v: [f64; 7] = x
            .values()
            .try_into()
            .map_err(|_| Error::DesignFile(format!("expected 7 parameters, got {}", x.len())))?;
        Ok(Self::new(v).with_globals(globals))
    }

    /// Lower-bound radius and cavity height, other parameters at their
    /// preset values.
    pub fn slim() -> Self {
        Self::new([3.0, 3.0, 3.5, 3.0, 45.0, 2.0, 3.0])
    }

    /// Upper-bound radius and cavity height.
    pub fn large() -> Self {
        Self::new([7.0, 6.0, 3.5, 3.0, 45.0, 2.0, 3.0])
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "slim" => Some(Self::slim()),
            "large" => Some(Self::large()),
            _ => None,
        }
    }

    /// Bellow pitch along the finger.
    pub fn pitch(&self) -> f64 {
        self.cavity_height + 2.0 * self.wall_thickness + self.cork_thickness
    }

    pub(crate) fn layout(&self) -> Result<Layout> {
        let g = &self.globals;
        for (name, v) in PARAM_NAMES.iter().zip(self.values()) {
            if !(v > 0.0 && v.is_finite()) {
                return Err(infeasible("positive lengths", format!("{name} = {v} must be positive")));
            }
        }
        for (name, v) in [
            ("length", g.length),
            ("width", g.width),
            ("height", g.height),
            ("cable_offset", g.cable_offset),
            ("base_thickness", g.base_thickness),
            ("min_tip_thickness", g.min_tip_thickness),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(infeasible(
                    "positive lengths",
                    format!("global {name} = {v} must be positive"),
                ));
            }
        }
        if g.cavity_count == 0 {
            return Err(infeasible("cavity count", "at least one cavity is required".into()));
        }
        if self.joint_slope_angle >= 80.0 {
            return Err(infeasible(
                "slope angle",
                format!(
                    "joint_slope_angle = {} deg must be below 80 deg",
                    self.joint_slope_angle
                ),
            ));
        }
        if self.plateau_height > self.cavity_height {
            return Err(infeasible(
                "plateau height",
                format!(
                    "plateau_height = {} exceeds cavity_height = {}",
                    self.plateau_height, self.cavity_height
                ),
            ));
        }
        let (r, w) = (self.outer_radius, self.wall_thickness);
        if r + w >= g.width / 2.0 {
            return Err(infeasible(
                "side wall",
                format!(
                    "outer_radius + wall_thickness = {} must stay below half the width {}",
                    r + w,
                    g.width / 2.0
                ),
            ));
        }
        let x_mid = g.height / 2.0;
        let x_front = x_mid - r;
        let x_ring = x_front - w;
        if x_ring <= 0.0 {
            return Err(infeasible(
                "front wall",
                format!(
                    "outer_radius + wall_thickness = {} must stay below half the height {x_mid}",
                    r + w
                ),
            ));
        }
        let x_back = g.height - self.joint_height;
        if x_back <= x_front {
            return Err(infeasible(
                "joint",
                format!("joint_height = {} leaves no room for the cavity", self.joint_height),
            ));
        }
        let x_cable = x_front - g.cable_offset;
        if x_cable < 0.0 {
            return Err(infeasible(
                "cable",
                format!("cable at x = {x_cable} lies outside the body"),
            ));
        }
        let n = g.cavity_count as f64;
        let span = self.cavity_height + 2.0 * w;
        let needed = g.base_thickness + n * span + (n - 1.0) * self.cork_thickness + g.min_tip_thickness;
        if needed > g.length {
            return Err(infeasible(
                "length",
                format!("bellows need {needed} mm but the finger is {} mm long", g.length),
            ));
        }
        let z0 = g.base_thickness + span / 2.0;
        let z_centers = (0..g.cavity_count).map(|i| z0 + i as f64 * self.pitch()).collect();
        let tan = self.joint_slope_angle.to_radians().tan();
        Ok(Layout {
            x_front,
            x_back,
            x_ring,
            x_cable,
            x_mid,
            q_peak: (self.cavity_height - self.plateau_height) / (2.0 * tan),
            z_centers,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.layout().map(|_| ())
    }

    /// Key-value text with a units header.
    pub fn to_file_string(&self) -> String {
        let mut s = String::from("# finger design\n# lengths in mm, joint_slope_angle in degrees\n");
        for (name, v) in PARAM_NAMES.iter().zip(self.values()) {
            s.push_str(&format!("{name} = {v:?}\n"));
        }
        if self.globals != FingerGlobals::default() {
            s.push_str("\n[globals]\n");
            s.push_str(&toml::to_string(&self.globals).unwrap_or_default());
        }
        s
    }

    pub fn from_file_str(text: &str) -> Result<Self> {
        let err = |e: toml::de::Error| Error::DesignFile(e.to_string());
        let mut table: toml::Table = toml::from_str(text).map_err(err)?;
        let globals = match table.remove("globals") {
            Some(g) => g.try_into().map_err(err)?,
            None => FingerGlobals::default(),
        };
        let design: FingerDesign = table.try_into().map_err(err)?;
        Ok(design.with_globals(globals))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_file_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }
}

/// Default search box for the seven parameters.
pub fn default_bounds() -> DesignSpace {
    let p = |name: &str, lo: f64, hi: f64, unit: &str| Param::new(name, lo, hi, unit);
    DesignSpace::new(vec![
        p(PARAM_NAMES[0], 3.0, 7.0, "mm"),
        p(PARAM_NAMES[1], 3.0, 6.0, "mm"),
        p(PARAM_NAMES[2], 2.0, 5.0, "mm"),
        p(PARAM_NAMES[3], 2.0, 4.0, "mm"),
        p(PARAM_NAMES[4], 30.0, 60.0, "deg"),
        p(PARAM_NAMES[5], 1.0, 3.0, "mm"),
        p(PARAM_NAMES[6], 1.5, 3.0, "mm"),
    ])
    .expect("default bounds are valid")
}
