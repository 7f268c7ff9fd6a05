//! Dynamic structure factor
//!
//! ```text
//! S(ω) = (1/2π) ∫ I(t) e^{−iωt} dt,    E = ħω
//! ```
//!
//! evaluated by FFT from ISF samples on a uniform grid symmetric about 0.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::correlators::IsfResult;
use crate::error::{Error, Result};
use crate::grid::check_uniform_symmetric;
use crate::output;
use crate::units::{self, HBAR};

/// Bins weaker than this fraction of the maximum are ignored by the
/// balance and symmetry residuals.
pub const BALANCE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    /// Periodic DFT of the raw samples, no padding.
    None,
    /// `exp(−t²/2σ²)` apodization and zero padding.
    Gaussian { sigma_ps: f64 },
}

impl Window {
    pub fn default_gaussian(t_max: f64) -> Self {
        Window::Gaussian {
            sigma_ps: t_max / 4.0,
        }
    }

    fn weight(&self, t: f64) -> f64 {
        match *self {
            Window::None => 1.0,
            Window::Gaussian { sigma_ps } => (-0.5 * (t / sigma_ps).powi(2)).exp(),
        }
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::None => write!(f, "none"),
            Window::Gaussian { sigma_ps } => write!(f, "gaussian({sigma_ps})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DsfResult {
    /// meV, ascending and symmetric about 0.
    pub energies: Vec<f64>,
    /// Real part of `S`, in ps.
    pub s_values: Vec<f64>,
    pub dk: f64,
    pub window: Window,
    /// `max |Im S| / max |S|`.
    pub imag_residual: f64,
    pub balance_residual: Option<f64>,
}

pub fn isf_to_dsf(isf: &IsfResult, window: Window) -> Result<DsfResult> {
    let dt = check_uniform_symmetric(&isf.times)?;
    if isf.isf.len() != isf.times.len() {
        return Err(Error::domain("ISF and time samples differ in length"));
    }
    if let Window::Gaussian { sigma_ps } = window {
        if !(sigma_ps > 0.0 && sigma_ps.is_finite()) {
            return Err(Error::domain(format!("window width must be positive, got {sigma_ps}")));
        }
    }
    let n = isf.times.len();
    let len = match window {
        Window::None => n,
        Window::Gaussian { .. } => (4 * n).next_power_of_two(),
    };
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (slot, (&t, &v)) in buf.iter_mut().zip(isf.times.iter().zip(&isf.isf)) {
        *slot = v * window.weight(t);
    }
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);

    let t_min = isf.times[0];
    let half = ((len - 1) / 2) as i64;
    let d_omega = 2.0 * std::f64::consts::PI / (len as f64 * dt);
    let scale = dt / (2.0 * std::f64::consts::PI);
    let mut energies = Vec::with_capacity(2 * half as usize + 1);
    let mut values = Vec::with_capacity(energies.capacity());
    for j in -half..=half {
        let omega = j as f64 * d_omega;
        let a = buf[j.rem_euclid(len as i64) as usize];
        values.push(a * Complex64::from_polar(scale, -omega * t_min));
        energies.push(HBAR * omega);
    }
    let max_re = values.iter().fold(0.0f64, |m, z| m.max(z.re.abs()));
    let max_im = values.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    Ok(DsfResult {
        energies,
        s_values: values.iter().map(|z| z.re).collect(),
        dk: isf.dk,
        window,
        imag_residual: if max_re > 0.0 { max_im / max_re } else { max_im },
        balance_residual: None,
    })
}

impl DsfResult {
    pub const HEADER: [&'static str; 2] = ["E_meV", "S_ps"];

    fn max_s(&self) -> f64 {
        self.s_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    fn pairs(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let n = self.s_values.len();
        let mid = n / 2;
        (1..=mid).map(move |j| (self.energies[mid + j], self.s_values[mid + j], self.s_values[mid - j]))
    }

    /// Stores the detailed-balance residual at temperature `T`.
    pub fn with_balance(mut self, temperature: f64) -> Result<Self> {
        self.balance_residual = Some(detailed_balance_residual(&self, temperature)?);
        Ok(self)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        output::write_csv_file(path, &Self::HEADER, &[&self.energies, &self.s_values])?;
        Ok(())
    }
}

/// `max_{E>0} |S(−E) − e^{−E/k_BT} S(E)| / max S`.
pub fn detailed_balance_residual(dsf: &DsfResult, temperature: f64) -> Result<f64> {
    let kt = units::thermal_energy(temperature)?;
    let max = dsf.max_s();
    let floor = BALANCE_FLOOR * max;
    Ok(dsf
        .pairs()
        .filter(|&(_, up, down)| up.abs() >= floor || down.abs() >= floor)
        .map(|(e, up, down)| (down - (-e / kt).exp() * up).abs() / max)
        .fold(0.0, f64::max))
}

/// `max_E |S(E) − S(−E)| / max S`.
pub fn symmetry_residual(dsf: &DsfResult) -> f64 {
    let max = dsf.max_s();
    dsf.pairs()
        .map(|(_, up, down)| (up - down).abs() / max)
        .fold(0.0, f64::max)
}

/// Position of the spectral maximum by parabolic interpolation.
pub fn peak_energy(dsf: &DsfResult) -> Result<f64> {
    let s = &dsf.s_values;
    if s.len() < 3 {
        return Err(Error::domain("need at least three spectral bins"));
    }
    let (imax, _) = s
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    if imax == 0 || imax == s.len() - 1 {
        return Err(Error::Boundary(imax));
    }
    let (a, b, c) = (s[imax - 1], s[imax], s[imax + 1]);
    let denom = a - 2.0 * b + c;
    let delta = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
    let de = dsf.energies[imax + 1] - dsf.energies[imax];
    Ok(dsf.energies[imax] + delta * de)
}
