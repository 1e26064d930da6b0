use crate::{Error, Result};

/// Isotropic linear-elastic constants. Lengths are in mm, so a modulus in
/// MPa yields forces in N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub young_modulus: f64,
    pub poisson_ratio: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self {
            young_modulus: 3.0,
            poisson_ratio: 0.30,
        }
    }
}

impl MaterialParams {
    pub fn new(young_modulus: f64, poisson_ratio: f64) -> Result<Self> {
        let m = Self {
            young_modulus,
            poisson_ratio,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.young_modulus > 0.0) || !self.young_modulus.is_finite() {
            return Err(Error::InvalidMaterial(format!(
                "Young's modulus must be positive, got {}",
                self.young_modulus
            )));
        }
        if !(self.poisson_ratio > 0.0 && self.poisson_ratio < 0.5) {
            return Err(Error::InvalidMaterial(format!(
                "Poisson's ratio must lie in (0, 0.5), got {}",
                self.poisson_ratio
            )));
        }
        Ok(())
    }

    /// Lamé constants `(mu, lambda)`.
    pub fn lame(&self) -> (f64, f64) {
        let (e, nu) = (self.young_modulus, self.poisson_ratio);
        let mu = e / (2.0 * (1.0 + nu));
        let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        (mu, lambda)
    }
}
