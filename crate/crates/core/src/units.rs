//! Internal unit system: picoseconds, ångström, meV.
//!
//! The consistent mass unit (c.m.u.) is 1 meV·ps²/Å², which is about
//! 9.648 atomic mass units. All computation inside the crate happens in
//! these units; conversions are done only when reading or writing data.

use crate::error::{Error, Result};

/// Reduced Planck constant in meV·ps.
pub const HBAR: f64 = 0.658_211_956_9;

/// Boltzmann constant in meV/K.
pub const K_B: f64 = 0.086_173_332_62;

const AMU_KG: f64 = 1.660_539_066_60e-27;
const MEV_J: f64 = 1.602_176_634e-22;

/// One c.m.u. expressed in kg: 1 meV × (1 ps)² / (1 Å)².
const CMU_KG: f64 = MEV_J * 1e-24 / 1e-20;

/// Atomic mass units to c.m.u.
pub const AMU_TO_CMU: f64 = AMU_KG / CMU_KG;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub hbar: f64,
    pub k_b: f64,
    pub amu_to_cmu: f64,
}

impl UnitSystem {
    pub const INTERNAL: UnitSystem = UnitSystem {
        hbar: HBAR,
        k_b: K_B,
        amu_to_cmu: AMU_TO_CMU,
    };
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::INTERNAL
    }
}

/// Converts a mass in amu to c.m.u.
pub fn mass_cmu(mass_amu: f64) -> Result<f64> {
    if !(mass_amu > 0.0) || !mass_amu.is_finite() {
        return Err(Error::domain(format!("mass must be positive, got {mass_amu} amu")));
    }
    Ok(mass_amu * AMU_TO_CMU)
}

/// k_B·T in meV.
pub fn thermal_energy(temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::domain(format!(
            "temperature must be positive, got {temperature} K"
        )));
    }
    Ok(K_B * temperature)
}

/// β = 1/(k_B·T) in meV⁻¹.
pub fn inverse_temperature(temperature: f64) -> Result<f64> {
    thermal_energy(temperature).map(|e| 1.0 / e)
}
