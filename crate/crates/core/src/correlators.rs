//! Time-domain functions of the coupled system summed over normal modes:
//! the classical VACF `ψ` and its normalised form `φ`, the quantum-filtered
//! VACF `ψ_Q`, the real and imaginary ISF exponents `X(t)` and `Y(t)`, and
//! the assembled ISF
//!
//! ```text
//! I(ΔK, t) = exp(½ΔK² X(t)) · exp(½ i ħ ΔK² Y(t))
//! ```

use std::path::Path;

use num_complex::Complex64;

use crate::error::Result;
use crate::grid::TimeGrid;
use crate::normal_modes::NormalModeSpectrum;
use crate::output;
use crate::quad;
use crate::units::{self, HBAR};

/// Below this `βħΩ` the occupation filter uses its series expansion.
pub const SERIES_THRESHOLD: f64 = 1e-6;
/// Below this frequency (ps⁻¹) a mode is treated as free.
pub const ZERO_FREQUENCY: f64 = 1e-8;

/// `(1 − cos Ωt)/Ω²`, written as `2 sin²(Ωt/2)/Ω²` to avoid cancellation.
fn one_minus_cos_over_sq(omega: f64, t: f64) -> f64 {
    if omega < ZERO_FREQUENCY {
        0.5 * t * t
    } else {
        let s = (0.5 * omega * t).sin() / omega;
        2.0 * s * s
    }
}

/// `sin(Ωt)/Ω`.
fn sin_over(omega: f64, t: f64) -> f64 {
    if omega < ZERO_FREQUENCY {
        t
    } else {
        (omega * t).sin() / omega
    }
}

/// `x coth x` at `x = ½βħΩ`.
pub fn occupation_filter(beta_hbar_omega: f64) -> f64 {
    if beta_hbar_omega < SERIES_THRESHOLD {
        1.0 + beta_hbar_omega * beta_hbar_omega / 12.0
    } else {
        let x = 0.5 * beta_hbar_omega;
        x / x.tanh()
    }
}

/// A normal-mode spectrum at a fixed temperature, with the per-mode
/// occupation filters precomputed.
#[derive(Debug, Clone)]
pub struct Correlators<'a> {
    spec: &'a NormalModeSpectrum,
    temperature: f64,
    kt: f64,
    filters: Vec<f64>,
}

impl<'a> Correlators<'a> {
    pub fn new(spec: &'a NormalModeSpectrum, temperature: f64) -> Result<Self> {
        let kt = units::thermal_energy(temperature)?;
        let filters = spec
            .omegas
            .iter()
            .map(|&w| occupation_filter(HBAR * w / kt))
            .collect();
        Ok(Correlators {
            spec,
            temperature,
            kt,
            filters,
        })
    }

    pub fn spectrum(&self) -> &NormalModeSpectrum {
        self.spec
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// `⟨v²⟩ = k_BT/m` in Å²/ps².
    pub fn mean_square_velocity(&self) -> f64 {
        self.kt / self.spec.mass
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.spec.phi(t)
    }

    /// Classical VACF `ψ(t)` in Å²/ps².
    pub fn psi(&self, t: f64) -> f64 {
        self.mean_square_velocity() * self.phi(t)
    }

    /// VACF filtered by `½βħω coth(½βħω)`, Å²/ps².
    pub fn psi_q(&self, t: f64) -> f64 {
        let s: f64 = self
            .spec
            .modes()
            .zip(&self.filters)
            .map(|((w, d2), f)| d2 * f * (w * t).cos())
            .sum();
        self.mean_square_velocity() * s
    }

    /// Real exponent `X(t) = Σ_k (d_k²ħ/mΩ_k)[cos Ω_k t − 1] coth(½βħΩ_k)`, Å².
    pub fn x(&self, t: f64) -> f64 {
        let s: f64 = self
            .spec
            .modes()
            .zip(&self.filters)
            .map(|((w, d2), f)| d2 * f * one_minus_cos_over_sq(w, t))
            .sum();
        -2.0 * self.mean_square_velocity() * s
    }

    /// Recoil function `Y(t) = Σ_k d_k² sin(Ω_k t)/(mΩ_k)`, ps/c.m.u.
    pub fn y(&self, t: f64) -> f64 {
        y_recoil(self.spec, t)
    }

    /// Symmetrised quantum mean-square displacement `−X(t)`, Å².
    pub fn msd(&self, t: f64) -> f64 {
        -self.x(t)
    }

    /// `X(t) = −2 ∫_0^t (t − t′) ψ_Q(t′) dt′` by composite Simpson with a
    /// step close to `step`.
    pub fn x_via_cumulant(&self, t: f64, step: f64) -> f64 {
        let t_abs = t.abs();
        let n = (t_abs / step).round().max(1.0) as usize;
        if t_abs == 0.0 {
            return 0.0;
        }
        let h = t_abs / n as f64;
        let nodes = uniform_nodes(n);
        let values: Vec<f64> = (0..nodes)
            .map(|k| {
                let tp = k as f64 * h;
                (t_abs - tp) * self.psi_q(tp)
            })
            .collect();
        -2.0 * quad::integrate_uniform(&values, n, h)
    }

    /// The cumulant route on every grid node, integrating `ψ_Q` on a grid
    /// `refine` times finer. Uses `X = −2[t C₀(t) − C₁(t)]` with the running
    /// moments `C_j = ∫_0^t t′^j ψ_Q`.
    pub fn x_via_cumulant_on(&self, grid: &TimeGrid, refine: usize) -> Vec<f64> {
        let refine = refine.max(1);
        let h = grid.dt() / refine as f64;
        let steps = (grid.max_steps() * refine).max(2);
        let psi_q: Vec<f64> = (0..=steps).map(|k| self.psi_q(k as f64 * h)).collect();
        let moment: Vec<f64> = psi_q.iter().enumerate().map(|(k, p)| k as f64 * h * p).collect();
        let c0 = quad::cumulative_uniform(&psi_q, h);
        let c1 = quad::cumulative_uniform(&moment, h);
        (0..grid.len())
            .map(|i| {
                let k = grid.offset(i).unsigned_abs() as usize * refine;
                let t = k as f64 * h;
                -2.0 * (t * c0[k] - c1[k])
            })
            .collect()
    }

    /// `(φ, ψ_Q, X, Y)` at one time, sharing the trigonometry.
    fn all_at(&self, t: f64) -> (f64, f64, f64, f64) {
        let (mut phi, mut psi_q, mut x, mut y) = (0.0, 0.0, 0.0, 0.0);
        for ((w, d2), f) in self.spec.modes().zip(&self.filters) {
            let (s, c) = (w * t).sin_cos();
            phi += d2 * c;
            psi_q += d2 * f * c;
            x += d2 * f * one_minus_cos_over_sq(w, t);
            y += d2 * if w < ZERO_FREQUENCY { t } else { s / w };
        }
        let v2 = self.mean_square_velocity();
        (phi, v2 * psi_q, -2.0 * v2 * x, y / self.spec.mass)
    }

    pub fn table(&self, grid: &TimeGrid) -> CorrelatorTable {
        let half: Vec<(f64, f64, f64, f64)> = (0..=grid.max_steps())
            .map(|k| self.all_at(k as f64 * grid.dt()))
            .collect();
        let n = grid.len();
        let mut table = CorrelatorTable {
            times: grid.times(),
            phi: Vec::with_capacity(n),
            psi: Vec::with_capacity(n),
            psi_q: Vec::with_capacity(n),
            x: Vec::with_capacity(n),
            y: Vec::with_capacity(n),
            temperature: self.temperature,
            mass: self.spec.mass,
        };
        let v2 = self.mean_square_velocity();
        for i in 0..n {
            let k = grid.offset(i);
            let (phi, psi_q, x, y) = half[k.unsigned_abs() as usize];
            table.phi.push(phi);
            table.psi.push(v2 * phi);
            table.psi_q.push(psi_q);
            table.x.push(x);
            table.y.push(if k < 0 { -y } else { y });
        }
        table
    }

    pub fn isf(&self, dk: f64, grid: &TimeGrid) -> IsfResult {
        let x = grid.map_even(|t| self.x(t));
        let y = grid.map_odd(|t| self.y(t));
        IsfResult::from_exponents(dk, grid.times(), &x, &y)
    }

    /// ISF with the recoil exponent removed (`Y ≡ 0`): real and even.
    pub fn isf_without_recoil(&self, dk: f64, grid: &TimeGrid) -> IsfResult {
        let x = grid.map_even(|t| self.x(t));
        let y = vec![0.0; x.len()];
        IsfResult::from_exponents(dk, grid.times(), &x, &y)
    }
}

/// Number of samples a composite rule over `n` intervals reads.
fn uniform_nodes(n: usize) -> usize {
    if n == 1 {
        3
    } else {
        n + 1
    }
}

pub fn x_real_exponent(spec: &NormalModeSpectrum, temperature: f64, t: f64) -> Result<f64> {
    Ok(Correlators::new(spec, temperature)?.x(t))
}

pub fn y_recoil(spec: &NormalModeSpectrum, t: f64) -> f64 {
    let s: f64 = spec.modes().map(|(w, d2)| d2 * sin_over(w, t)).sum();
    s / spec.mass
}

pub fn psi_quantum(spec: &NormalModeSpectrum, temperature: f64, t: f64) -> Result<f64> {
    Ok(Correlators::new(spec, temperature)?.psi_q(t))
}

pub fn x_via_cumulant(spec: &NormalModeSpectrum, temperature: f64, t: f64, step: f64) -> Result<f64> {
    Ok(Correlators::new(spec, temperature)?.x_via_cumulant(t, step))
}

pub fn quantum_msd(spec: &NormalModeSpectrum, temperature: f64, t: f64) -> Result<f64> {
    Ok(Correlators::new(spec, temperature)?.msd(t))
}

pub fn assemble_isf(
    spec: &NormalModeSpectrum,
    temperature: f64,
    dk: f64,
    grid: &TimeGrid,
) -> Result<IsfResult> {
    Ok(Correlators::new(spec, temperature)?.isf(dk, grid))
}

/// Sampled correlators on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorTable {
    pub times: Vec<f64>,
    pub phi: Vec<f64>,
    /// Å²/ps²
    pub psi: Vec<f64>,
    /// Å²/ps²
    pub psi_q: Vec<f64>,
    /// Å²
    pub x: Vec<f64>,
    /// Å²/(meV·ps)
    pub y: Vec<f64>,
    pub temperature: f64,
    pub mass: f64,
}

impl CorrelatorTable {
    pub const HEADER: [&'static str; 6] =
        ["t_ps", "phi", "psi_A2ps2", "psiQ_A2ps2", "X_A2", "Y_A2_per_meVps"];

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        output::write_csv_file(
            path,
            &Self::HEADER,
            &[&self.times, &self.phi, &self.psi, &self.psi_q, &self.x, &self.y],
        )?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsfResult {
    /// Momentum transfer, Å⁻¹.
    pub dk: f64,
    pub times: Vec<f64>,
    pub isf: Vec<Complex64>,
    /// `exp(½ i ħ ΔK² Y(t))`.
    pub recoil_factor: Vec<Complex64>,
}

impl IsfResult {
    pub const HEADER: [&'static str; 5] = ["t_ps", "re_isf", "im_isf", "re_recoil", "im_recoil"];

    pub fn from_exponents(dk: f64, times: Vec<f64>, x: &[f64], y: &[f64]) -> Self {
        let k2 = dk * dk;
        let recoil_factor: Vec<Complex64> = y
            .iter()
            .map(|&y| Complex64::from_polar(1.0, 0.5 * HBAR * k2 * y))
            .collect();
        let isf = x
            .iter()
            .zip(&recoil_factor)
            .map(|(&x, r)| r * (0.5 * k2 * x).exp())
            .collect();
        IsfResult {
            dk,
            times,
            isf,
            recoil_factor,
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let re: Vec<f64> = self.isf.iter().map(|z| z.re).collect();
        let im: Vec<f64> = self.isf.iter().map(|z| z.im).collect();
        let rre: Vec<f64> = self.recoil_factor.iter().map(|z| z.re).collect();
        let rim: Vec<f64> = self.recoil_factor.iter().map(|z| z.im).collect();
        output::write_csv_file(path, &Self::HEADER, &[&self.times, &re, &im, &rre, &rim])?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{mass_cmu, thermal_energy, K_B};
    use approx::assert_relative_eq;

    fn single(omega: f64, mass: f64) -> NormalModeSpectrum {
        NormalModeSpectrum::from_modes(vec![omega], vec![1.0], mass, omega).unwrap()
    }

    #[test]
    fn free_mode_limits() {
        let m = mass_cmu(7.0).unwrap();
        let free = NormalModeSpectrum::free_particle(m).unwrap();
        // −k_BT t²/m
        assert_relative_eq!(
            x_real_exponent(&free, 150.0, 1.0).unwrap(),
            -17.8168,
            max_relative = 1e-4
        );
        assert_relative_eq!(
            x_real_exponent(&free, 150.0, 1.0).unwrap(),
            -thermal_energy(150.0).unwrap() / m,
            max_relative = 1e-12
        );
        assert_relative_eq!(y_recoil(&free, 1.0), 1.378362, max_relative = 1e-6);
        assert_relative_eq!(quantum_msd(&free, 150.0, 2.0).unwrap(), 4.0 * 17.8168, max_relative = 1e-4);
        assert_eq!(x_real_exponent(&free, 150.0, 0.0).unwrap(), 0.0);
        assert_eq!(y_recoil(&free, 0.0), 0.0);
    }

    #[test]
    fn tiny_frequency_matches_free_limit() {
        let m = 0.7;
        let soft = single(1e-7, m);
        let free = NormalModeSpectrum::free_particle(m).unwrap();
        for &t in &[0.5, 3.0, -2.0] {
            assert_relative_eq!(y_recoil(&soft, t), y_recoil(&free, t), max_relative = 1e-9);
            assert_relative_eq!(
                x_real_exponent(&soft, 100.0, t).unwrap(),
                x_real_exponent(&free, 100.0, t).unwrap(),
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn classical_limit_of_x() {
        let s = single(1.0, 1.0);
        let t_hot = 1e5;
        let kt = K_B * t_hot;
        for &t in &[0.3f64, 1.0, 2.5] {
            let classical = -2.0 * kt * (1.0 - t.cos());
            let ratio = x_real_exponent(&s, t_hot, t).unwrap() / classical;
            assert!((ratio - 1.0).abs() < 1e-6);
            let psi_ratio = psi_quantum(&s, t_hot, t).unwrap() / (kt * t.cos());
            assert!((psi_ratio - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn psi_quantum_zero_point() {
        // (ħΩ/2) coth(ħΩ/2k_BT) for Ω = 10 ps⁻¹, T = 10 K, m = 1
        let s = single(10.0, 1.0);
        let x = HBAR * 10.0 / 2.0;
        let expect = x / (x / (K_B * 10.0)).tanh();
        assert_relative_eq!(psi_quantum(&s, 10.0, 0.0).unwrap(), expect, max_relative = 1e-12);
        assert_relative_eq!(expect, 3.294232, max_relative = 1e-6);
    }

    #[test]
    fn single_mode_cumulant_identity() {
        // ∫_0^t (t − t′) cos Ωt′ dt′ = (1 − cos Ωt)/Ω²
        let s = single(2.0, 1.3);
        let c = Correlators::new(&s, 80.0).unwrap();
        for &t in &[0.0, 0.4, 1.7, 5.0] {
            let direct = c.x(t);
            let cum = c.x_via_cumulant(t, 1e-3);
            assert!((direct - cum).abs() <= 1e-9 * direct.abs().max(1e-12), "t={t}");
            let expect = -2.0 * c.psi_q(0.0) * (1.0 - (2.0 * t).cos()) / 4.0;
            assert_relative_eq!(direct, expect, max_relative = 1e-12, epsilon = 1e-15);
        }
    }

    #[test]
    fn table_invariants() {
        let s = NormalModeSpectrum::from_modes(vec![0.0, 0.7, 3.0], vec![0.2, 0.5, 0.3], 0.9, 0.0).unwrap();
        let c = Correlators::new(&s, 120.0).unwrap();
        let g = TimeGrid::symmetric(6.0, 601).unwrap();
        let tab = c.table(&g);
        let z = g.zero_index();
        assert_relative_eq!(tab.phi[z], 1.0, max_relative = 1e-15);
        assert_eq!(tab.x[z], 0.0);
        assert_eq!(tab.y[z], 0.0);
        let n = tab.times.len();
        for i in 0..n {
            assert_eq!(tab.y[i], -tab.y[n - 1 - i]);
            assert_eq!(tab.x[i], tab.x[n - 1 - i]);
            assert!(tab.x[i] <= 0.0);
            assert_relative_eq!(tab.x[i], c.x(tab.times[i]), max_relative = 1e-12, epsilon = 1e-14);
            assert_relative_eq!(tab.y[i], c.y(tab.times[i]), max_relative = 1e-12, epsilon = 1e-14);
            assert_relative_eq!(tab.psi_q[i], c.psi_q(tab.times[i]), max_relative = 1e-12, epsilon = 1e-14);
        }
        let cum = c.x_via_cumulant_on(&g, 2);
        for i in 0..n {
            assert!((cum[i] - tab.x[i]).abs() <= 1e-6 * tab.x[i].abs().max(1e-9));
        }
    }

    #[test]
    fn isf_properties() {
        let m = mass_cmu(7.0).unwrap();
        let free = NormalModeSpectrum::free_particle(m).unwrap();
        let g = TimeGrid::symmetric(2.0, 201).unwrap();
        let isf = assemble_isf(&free, 150.0, 1.0, &g).unwrap();
        let z = g.zero_index();
        assert_eq!(isf.isf[z], Complex64::new(1.0, 0.0));
        // ballistic phase advances at E_r/ħ with E_r = ħ²ΔK²/2m
        let e_r = HBAR * HBAR / (2.0 * m);
        assert_relative_eq!(e_r, 0.298583, max_relative = 1e-5);
        for i in 0..g.len() {
            let t = g.time(i);
            assert_relative_eq!(isf.recoil_factor[i].arg(), e_r * t / HBAR, epsilon = 1e-12);
            assert!(isf.isf[i].norm() <= 1.0);
            assert_eq!(isf.isf[i], isf.isf[g.len() - 1 - i].conj());
        }
    }
}
