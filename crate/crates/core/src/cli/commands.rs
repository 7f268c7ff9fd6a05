use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bath::{DensityShape, DiscretizedBath, SpectralDensity};
use crate::closed_form::{self, ExponentialKernelModel};
use crate::correlators::{Correlators, IsfResult};
use crate::dsf;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::normal_modes::{self, DiagonalizeOptions, EigenReport, NormalModeSpectrum};
use crate::oracle::{self, McConfig};
use crate::output;
use crate::units::{self, HBAR};

use super::config::RunConfig;

pub const FIGURE_CUTOFFS: [f64; 4] = [0.2, 1.0, 5.0, 50.0];
pub const MC_STEP_PS: f64 = 0.05;

/// Outcome of a command that completed without an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    ValidationFailed,
}

pub struct Context<'w> {
    pub cfg: RunConfig,
    pub mass: f64,
    pub grid: TimeGrid,
    pub out: &'w mut dyn Write,
}

impl<'w> Context<'w> {
    pub fn new(cfg: RunConfig, out: &'w mut dyn Write) -> Result<Self> {
        cfg.validate()?;
        let mass = units::mass_cmu(cfg.mass_amu)?;
        let grid = cfg.grid()?;
        Ok(Context { cfg, mass, grid, out })
    }

    fn density(&self) -> Result<SpectralDensity> {
        match &self.cfg.density_file {
            Some(p) => SpectralDensity::from_table_file(p, self.mass),
            None => SpectralDensity::drude(self.cfg.gamma_ps_inv, self.cfg.omega_c_ps_inv, self.mass),
        }
    }

    fn is_drude(&self) -> bool {
        self.cfg.density_file.is_none()
    }

    fn discretize(&mut self, n_modes: usize) -> Result<DiscretizedBath> {
        let density = self.density()?;
        let omega_max = self
            .cfg
            .omega_max_ps_inv
            .unwrap_or_else(|| density.default_omega_max(self.cfg.omega0_ps_inv));
        let bath = density.discretize(n_modes, omega_max)?;
        if bath.truncation_warning {
            writeln!(
                self.out,
                "warning: {:.2}% of the friction spectrum lies above omega_max = {} ps^-1",
                100.0 * bath.tail_fraction,
                omega_max
            )?;
        }
        Ok(bath)
    }

    fn spectrum_with(&mut self, n_modes: usize) -> Result<(NormalModeSpectrum, EigenReport)> {
        let bath = self.discretize(n_modes)?;
        let v = bath.build_matrix(self.cfg.omega0_ps_inv)?;
        normal_modes::diagonalize_with(&v, DiagonalizeOptions::default())
    }

    fn spectrum(&mut self) -> Result<NormalModeSpectrum> {
        let n = self.cfg.n_modes;
        Ok(self.spectrum_with(n)?.0)
    }

    fn path(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.cfg.output_dir)?;
        Ok(self.cfg.output_dir.join(name))
    }

    fn wrote(&mut self, path: &Path) -> Result<()> {
        writeln!(self.out, "wrote {}", path.display())?;
        Ok(())
    }

    fn positive_times(&self) -> Vec<f64> {
        (self.grid.zero_index()..self.grid.len()).map(|i| self.grid.time(i)).collect()
    }

    pub fn kernel(&mut self) -> Result<Outcome> {
        let density = self.density()?;
        let bath = self.discretize(self.cfg.n_modes)?;
        let times = self.positive_times();
        let exact = times
            .iter()
            .map(|&t| match density.shape {
                DensityShape::Drude { .. } => density.kernel_analytic(t),
                DensityShape::Tabulated(_) => density.kernel_from_density(t),
            })
            .collect::<Result<Vec<f64>>>()?;
        let discrete: Vec<f64> = times.iter().map(|&t| bath.kernel(t)).collect();
        let path = self.path("kernel.csv")?;
        output::write_csv_file(
            &path,
            &["t_ps", "gamma_ps_inv2", "gamma_discrete_ps_inv2"],
            &[&times, &exact, &discrete],
        )?;
        self.wrote(&path)?;
        Ok(Outcome::Ok)
    }

    pub fn modes(&mut self) -> Result<Outcome> {
        let (spec, report) = self.spectrum_with(self.cfg.n_modes)?;
        let path = self.path("modes.csv")?;
        spec.write_csv(&path)?;
        writeln!(
            self.out,
            "{} modes, orthogonality defect {}, residual {}",
            spec.len(),
            report.orthogonality_defect.map_or("n/a".into(), output::sci),
            report.max_residual.map_or("n/a".into(), output::sci),
        )?;
        self.wrote(&path)?;
        Ok(Outcome::Ok)
    }

    pub fn correlate(&mut self) -> Result<Outcome> {
        let spec = self.spectrum()?;
        let table = Correlators::new(&spec, self.cfg.temperature_k)?.table(&self.grid);
        let path = self.path("correlators.csv")?;
        table.write_csv(&path)?;
        self.wrote(&path)?;
        Ok(Outcome::Ok)
    }

    fn quantum_isf(&mut self) -> Result<IsfResult> {
        let spec = self.spectrum()?;
        Ok(Correlators::new(&spec, self.cfg.temperature_k)?.isf(self.cfg.dk_inv_a, &self.grid))
    }

    pub fn isf(&mut self) -> Result<Outcome> {
        let isf = self.quantum_isf()?;
        let path = self.path("isf.csv")?;
        isf.write_csv(&path)?;
        self.wrote(&path)?;
        Ok(Outcome::Ok)
    }

    pub fn dsf(&mut self) -> Result<Outcome> {
        let isf = self.quantum_isf()?;
        let s = dsf::isf_to_dsf(&isf, self.cfg.window())?.with_balance(self.cfg.temperature_k)?;
        let path = self.path("dsf.csv")?;
        s.write_csv(&path)?;
        writeln!(
            self.out,
            "window {}, peak {} meV, detailed-balance residual {}",
            s.window,
            dsf::peak_energy(&s).map_or("n/a".into(), output::sci),
            output::sci(s.balance_residual.unwrap_or(f64::NAN)),
        )?;
        self.wrote(&path)?;
        Ok(Outcome::Ok)
    }

    /// Closed-form `Y` curves: ballistic first, then each cutoff.
    fn figure_curves(&self) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
        let mut names = vec!["ballistic".to_string()];
        let mut curves = vec![self.grid.map_odd(|t| t / self.mass)];
        for &wc in &FIGURE_CUTOFFS {
            let model = ExponentialKernelModel::new(self.cfg.gamma_ps_inv, wc, self.mass)?;
            names.push(format!("wc{wc}"));
            curves.push(self.grid.map_odd(|t| model.recoil(t)));
        }
        Ok((names, curves))
    }

    fn write_figure(&mut self, file: &str, prefix: &str, unit: &str, curves: &[Vec<f64>], names: &[String]) -> Result<()> {
        let times = self.grid.times();
        let header: Vec<String> = std::iter::once("t_ps".to_string())
            .chain(names.iter().map(|n| format!("{prefix}_{n}{unit}")))
            .collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut columns: Vec<&[f64]> = vec![&times];
        columns.extend(curves.iter().map(Vec::as_slice));
        let path = self.path(file)?;
        output::write_csv_file(&path, &header, &columns)?;
        self.wrote(&path)
    }

    pub fn figure1(&mut self) -> Result<Outcome> {
        let (names, curves) = self.figure_curves()?;
        let z = self.grid.zero_index();
        let h = self.grid.dt();
        for (name, y) in names.iter().zip(&curves) {
            let slope = (y[z + 1] - y[z - 1]) / (2.0 * h);
            let extrema = closed_form::interior_extrema(&y[z..]).len();
            writeln!(
                self.out,
                "{name}: slope at 0 {}, Y(t_max) {}, interior extrema {extrema}",
                output::sci(slope),
                output::sci(*y.last().unwrap()),
            )?;
        }
        self.write_figure("figure1.csv", "Y", "_A2_per_meVps", &curves, &names)?;
        Ok(Outcome::Ok)
    }

    pub fn figure2(&mut self) -> Result<Outcome> {
        let (names, curves) = self.figure_curves()?;
        let phase = 0.5 * HBAR * self.cfg.dk_inv_a * self.cfg.dk_inv_a;
        let im: Vec<Vec<f64>> = curves
            .iter()
            .map(|c| c.iter().map(|y| (phase * y).sin()).collect())
            .collect();
        self.write_figure("figure2.csv", "im_recoil", "", &im, &names)?;
        Ok(Outcome::Ok)
    }

    pub fn validate(&mut self) -> Result<Outcome> {
        let report = self.validation_report()?;
        let path = self.path("validate.json")?;
        let mut json = serde_json::to_string_pretty(&report).map_err(|e| Error::Numerical(e.to_string()))?;
        json.push('\n');
        fs::write(&path, json)?;
        for c in &report.checks {
            writeln!(
                self.out,
                "{} {:<28} {} (threshold {})",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                output::sci(c.value),
                output::sci(c.threshold)
            )?;
        }
        self.wrote(&path)?;
        Ok(if report.pass {
            Outcome::Ok
        } else {
            Outcome::ValidationFailed
        })
    }

    fn validation_report(&mut self) -> Result<ValidationReport> {
        let mut checks = Vec::new();
        let t_k = self.cfg.temperature_k;
        let kt = units::thermal_energy(t_k)?;
        let density = self.density()?;
        let bath = self.discretize(self.cfg.n_modes)?;
        let v = bath.build_matrix(self.cfg.omega0_ps_inv)?;
        let (spec, eig) = normal_modes::diagonalize_with(&v, DiagonalizeOptions::default())?;

        checks.push(Check::below("weight_sum", (spec.weight_sum() - 1.0).abs(), 1e-10));
        checks.push(Check::below("orthogonality", eig.orthogonality_defect.unwrap_or(f64::NAN), normal_modes::ORTHOGONALITY_TOLERANCE));
        checks.push(Check::below("eigen_residual", eig.max_residual.unwrap_or(f64::NAN), normal_modes::RESIDUAL_TOLERANCE));

        let k0 = density.kernel_from_density(0.0)?;
        let mut kernel_err = 0.0f64;
        for i in 0..=49 {
            let t = 0.1 + 0.1 * i as f64;
            kernel_err = kernel_err.max((bath.kernel(t) - density.kernel_from_density(t)?).abs());
        }
        checks.push(Check::below("kernel_reconstruction", kernel_err / k0.max(f64::MIN_POSITIVE), 1e-3));

        let corr = Correlators::new(&spec, t_k)?;
        let table = corr.table(&self.grid);
        let cumulant = corr.x_via_cumulant_on(&self.grid, 4);
        let x_rel = table
            .x
            .iter()
            .zip(&cumulant)
            .filter(|(x, _)| **x != 0.0)
            .map(|(x, c)| ((x - c) / x).abs())
            .fold(0.0, f64::max);
        checks.push(Check::below("x_cumulant_rel", x_rel, 1e-4));

        let y_quad = oracle::quad_recoil(&self.grid, &table.phi, self.mass)?;
        let y_quad_err = y_quad.iter().zip(&table.y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        checks.push(Check::below("quad_recoil_abs", y_quad_err, 1e-5));

        let closed = self.is_drude() && self.cfg.omega0_ps_inv == 0.0 && self.cfg.gamma_ps_inv > 0.0;
        if closed {
            let model = ExponentialKernelModel::new(self.cfg.gamma_ps_inv, self.cfg.omega_c_ps_inv, self.mass)?;
            let mut phi_err = 0.0f64;
            let mut my_err = 0.0f64;
            for (i, &t) in table.times.iter().enumerate() {
                phi_err = phi_err.max((table.phi[i] - model.phi(t)).abs());
                my_err = my_err.max(self.mass * (table.y[i] - model.recoil(t)).abs());
            }
            checks.push(Check::below("phi_closed_abs", phi_err, 1e-3));
            checks.push(Check::below("mY_closed_abs", my_err, 2e-3));
            let d = model.diffusion_coefficient(t_k)?;
            let y_inf = 1.0 / (self.mass * self.cfg.gamma_ps_inv);
            let kubo = model.kubo_integral(t_k)?;
            checks.push(Check::below("kubo_rel", (kt * y_inf - kubo).abs() / d, 1e-10));
        }

        let (mc_spec, _) = self.spectrum_with(self.cfg.mc_modes)?;
        let mc_grid = TimeGrid::non_negative(self.cfg.t_max_ps, MC_STEP_PS)?;
        let mc = oracle::mc_vacf(
            &mc_spec,
            &McConfig {
                n_samples: self.cfg.mc_samples,
                seed: self.cfg.seed,
                temperature: t_k,
                grid: mc_grid,
            },
        )?;
        let inside = mc
            .times
            .iter()
            .zip(mc.phi.iter().zip(&mc.stderr))
            .filter(|(&t, (p, e))| (*p - mc_spec.phi(t)).abs() < 4.0 * **e)
            .count();
        let fraction = inside as f64 / mc.times.len() as f64;
        checks.push(Check::above("mc_fraction_within_4se", fraction, 0.99));

        let isf = corr.isf(self.cfg.dk_inv_a, &self.grid);
        let n = isf.isf.len();
        let herm = (0..n)
            .map(|i| (isf.isf[i] - isf.isf[n - 1 - i].conj()).norm())
            .fold(0.0, f64::max);
        let modulus = isf.isf.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if self.grid.is_symmetric() {
            checks.push(Check::below("isf_hermiticity", herm, 0.0));
        }
        checks.push(Check::below("isf_modulus_excess", (modulus - 1.0).max(0.0), 1e-12));

        if self.grid.is_symmetric() {
            let window = self.cfg.window();
            let quantum = dsf::isf_to_dsf(&isf, window)?;
            checks.push(Check::below("detailed_balance", dsf::detailed_balance_residual(&quantum, t_k)?, 5e-3));
            let classical = dsf::isf_to_dsf(&corr.isf_without_recoil(self.cfg.dk_inv_a, &self.grid), window)?;
            checks.push(Check::below("classical_symmetry", dsf::symmetry_residual(&classical), 1e-10));
            let free = NormalModeSpectrum::free_particle(self.mass)?;
            let ballistic = Correlators::new(&free, t_k)?.isf(self.cfg.dk_inv_a, &self.grid);
            let peak = dsf::peak_energy(&dsf::isf_to_dsf(&ballistic, window)?)?;
            let e_r = HBAR * HBAR * self.cfg.dk_inv_a.powi(2) / (2.0 * self.mass);
            checks.push(Check::below("ballistic_peak_meV", (peak - e_r).abs(), 3e-3));
        }

        let pass = checks.iter().all(|c| c.pass);
        Ok(ValidationReport {
            n_modes: self.cfg.n_modes,
            temperature_k: t_k,
            gamma_ps_inv: self.cfg.gamma_ps_inv,
            omega_c_ps_inv: self.cfg.omega_c_ps_inv,
            omega_max_ps_inv: bath.omega_max,
            tail_fraction: bath.tail_fraction,
            window: self.cfg.window().to_string(),
            checks,
            pass,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn below(name: &'static str, value: f64, threshold: f64) -> Self {
        Check {
            name,
            value,
            threshold,
            pass: value <= threshold,
        }
    }

    fn above(name: &'static str, value: f64, threshold: f64) -> Self {
        Check {
            name,
            value,
            threshold,
            pass: value >= threshold,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub n_modes: usize,
    pub temperature_k: f64,
    pub gamma_ps_inv: f64,
    pub omega_c_ps_inv: f64,
    pub omega_max_ps_inv: f64,
    pub tail_fraction: f64,
    pub window: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}
