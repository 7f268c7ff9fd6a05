//! Analytic VACF and recoil function for a flat surface with the
//! exponentially decaying friction kernel `γ(t) = γω_c e^{−ω_c t}`.
//!
//! The Laplace transform of the normalised VACF is
//! `φ̂(s) = (s + ω_c)/(s² + ω_c s + γω_c)`, so `φ` is a sum of two
//! exponentials at the roots `s₁, s₂` of the denominator.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;
use crate::units;

/// Relative root separation below which the double-root formulas are used.
pub const CRITICAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceRoots {
    /// Root of smaller magnitude (positive imaginary part when complex).
    pub s1: Complex64,
    pub s2: Complex64,
    pub p1: Complex64,
    pub p2: Complex64,
    pub critical: bool,
}

/// Roots of `s² + ω_c s + γω_c = 0` and the residues of `φ̂` at them.
pub fn solve_roots(gamma: f64, omega_c: f64) -> Result<LaplaceRoots> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("friction must be non-negative, got {gamma}")));
    }
    if !(omega_c > 0.0 && omega_c.is_finite()) {
        return Err(Error::domain(format!("cutoff must be positive, got {omega_c}")));
    }
    let b = omega_c;
    let c = gamma * omega_c;
    let disc = b * b - 4.0 * c;
    let (s1, s2) = if disc >= 0.0 {
        let q = -0.5 * (b + disc.sqrt());
        (Complex64::new(c / q, 0.0), Complex64::new(q, 0.0))
    } else {
        let im = 0.5 * (-disc).sqrt();
        (Complex64::new(-0.5 * b, im), Complex64::new(-0.5 * b, -im))
    };
    let critical = (s1 - s2).norm() < CRITICAL_TOLERANCE * s1.norm();
    let (p1, p2) = if critical {
        (Complex64::new(f64::NAN, 0.0), Complex64::new(f64::NAN, 0.0))
    } else {
        ((s1 + omega_c) / (s1 - s2), (s2 + omega_c) / (s2 - s1))
    };
    Ok(LaplaceRoots {
        s1,
        s2,
        p1,
        p2,
        critical,
    })
}

/// `(e^{st} − 1)/s`, continuous through `s = 0`.
fn expm1_over(s: Complex64, t: f64) -> Complex64 {
    let z = s * t;
    if z.norm() < 1e-5 {
        t * (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0)
    } else {
        (z.exp() - 1.0) / s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialKernelModel {
    pub gamma: f64,
    pub omega_c: f64,
    /// Adsorbate mass, c.m.u.
    pub mass: f64,
    pub roots: LaplaceRoots,
}

impl ExponentialKernelModel {
    pub fn new(gamma: f64, omega_c: f64, mass: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::domain(format!("mass must be positive, got {mass}")));
        }
        Ok(ExponentialKernelModel {
            gamma,
            omega_c,
            mass,
            roots: solve_roots(gamma, omega_c)?,
        })
    }

    pub fn kernel(&self, t: f64) -> f64 {
        self.gamma * self.omega_c * (-self.omega_c * t.abs()).exp()
    }

    /// Normalised VACF `φ(t)`, even in `t`.
    pub fn phi(&self, t: f64) -> f64 {
        let t = t.abs();
        let r = &self.roots;
        if r.critical {
            let s = -0.5 * self.omega_c;
            return (1.0 + 0.5 * self.omega_c * t) * (s * t).exp();
        }
        let v = r.p1 * (r.s1 * t).exp() + r.p2 * (r.s2 * t).exp();
        debug_assert!(v.im.abs() <= 1e-9 * v.re.abs().max(1.0));
        v.re
    }

    /// `m·Y(t) = ∫_0^t φ`, odd in `t`, ps.
    pub fn mass_recoil(&self, t: f64) -> f64 {
        let sign = t.signum();
        let t = t.abs();
        let r = &self.roots;
        let v = if r.critical {
            let s = -0.5 * self.omega_c;
            2.0 * (s * t).exp_m1() / s - t * (s * t).exp()
        } else {
            (r.p1 * expm1_over(r.s1, t) + r.p2 * expm1_over(r.s2, t)).re
        };
        sign * v
    }

    /// Recoil function `Y(t)`, Å²/(meV·ps).
    pub fn recoil(&self, t: f64) -> f64 {
        self.mass_recoil(t) / self.mass
    }

    /// Classical VACF `ψ(t) = (k_BT/m) φ(t)`.
    pub fn psi(&self, temperature: f64, t: f64) -> Result<f64> {
        Ok(units::thermal_energy(temperature)? / self.mass * self.phi(t))
    }

    /// `D = k_BT/(mγ)`, Å²/ps.
    pub fn diffusion_coefficient(&self, temperature: f64) -> Result<f64> {
        diffusion_coefficient(temperature, self.mass, self.gamma)
    }

    /// `∫_0^∞ ψ(t) dt` by adaptive quadrature.
    pub fn kubo_integral(&self, temperature: f64) -> Result<f64> {
        let kt = units::thermal_energy(temperature)?;
        let decay = -self.roots.s1.re.max(self.roots.s2.re);
        if !(decay > 0.0) {
            return Err(Error::domain("VACF does not decay; no diffusion limit"));
        }
        let t_end = 60.0 / decay;
        let res = quad::adaptive_gk(|t| self.phi(t), 0.0, t_end, 1e-13, 1e-12, 2000);
        Ok(kt / self.mass * res.value)
    }
}

pub fn vacf_closed(gamma: f64, omega_c: f64, t: f64) -> Result<f64> {
    Ok(ExponentialKernelModel::new(gamma, omega_c, 1.0)?.phi(t))
}

/// `Y(t)` for the exponential kernel; at zero friction this is the
/// ballistic `t/m`.
pub fn recoil_closed(gamma: f64, omega_c: f64, mass: f64, t: f64) -> Result<f64> {
    if gamma == 0.0 {
        return ballistic_recoil(mass, t);
    }
    Ok(ExponentialKernelModel::new(gamma, omega_c, mass)?.recoil(t))
}

pub fn ballistic_recoil(mass: f64, t: f64) -> Result<f64> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::domain(format!("mass must be positive, got {mass}")));
    }
    Ok(t / mass)
}

pub fn diffusion_coefficient(temperature: f64, mass: f64, gamma: f64) -> Result<f64> {
    let kt = units::thermal_energy(temperature)?;
    if !(mass > 0.0) {
        return Err(Error::domain(format!("mass must be positive, got {mass}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("friction must be positive, got {gamma}")));
    }
    Ok(kt / (mass * gamma))
}

/// Indices of strict interior local extrema of a sampled curve.
pub fn interior_extrema(values: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    if values.len() < 3 {
        return out;
    }
    let mut prev = values[1] - values[0];
    for i in 1..values.len() - 1 {
        let next = values[i + 1] - values[i];
        if prev * next < 0.0 {
            out.push(i);
        }
        if next != 0.0 {
            prev = next;
        }
    }
    out
}
