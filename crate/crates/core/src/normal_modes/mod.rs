//! Normal modes of the coupled system: only the system row of the
//! orthogonal transform is retained, as weights `d_k²` against mode
//! frequencies `Ω_k`.

pub mod arrowhead;
mod jacobi;

use std::path::Path;

use ndarray::Array2;

pub use arrowhead::{arrowhead_eigen, ArrowheadEigen};
pub use jacobi::{jacobi_eigen, JacobiEigen};

use crate::bath::CoupledPotentialMatrix;
use crate::error::{Error, Result};
use crate::output;

/// Eigenvalues down to `-NEGATIVE_TOLERANCE·max|V|` are treated as zero.
pub const NEGATIVE_TOLERANCE: f64 = 1e-9;
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-9;
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct NormalModeSpectrum {
    /// Mode frequencies Ω_k in ps⁻¹, ascending.
    pub omegas: Vec<f64>,
    /// Squared system components d_k².
    pub weights: Vec<f64>,
    /// System mass in c.m.u.
    pub mass: f64,
    /// Bare confinement frequency of the system, ps⁻¹.
    pub omega0: f64,
}

impl NormalModeSpectrum {
    /// Spectrum from explicit mode data. Weights must be non-negative and
    /// sum to one.
    pub fn from_modes(omegas: Vec<f64>, weights: Vec<f64>, mass: f64, omega0: f64) -> Result<Self> {
        if omegas.len() != weights.len() || omegas.is_empty() {
            return Err(Error::domain("need equal, non-zero numbers of frequencies and weights"));
        }
        if !(mass > 0.0) {
            return Err(Error::domain(format!("mass must be > 0, got {mass}")));
        }
        if omegas.iter().any(|w| !(*w >= 0.0)) || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::domain("frequencies and weights must be ≥ 0"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!("weights sum to {total}, expected 1")));
        }
        let mut idx: Vec<usize> = (0..omegas.len()).collect();
        idx.sort_by(|&i, &j| omegas[i].total_cmp(&omegas[j]));
        Ok(NormalModeSpectrum {
            omegas: idx.iter().map(|&i| omegas[i]).collect(),
            weights: idx.iter().map(|&i| weights[i]).collect(),
            mass,
            omega0,
        })
    }

    /// A free particle: one zero-frequency mode carrying all the weight.
    pub fn free_particle(mass: f64) -> Result<Self> {
        Self::from_modes(vec![0.0], vec![1.0], mass, 0.0)
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn modes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.omegas.iter().copied().zip(self.weights.iter().copied())
    }

    /// Normalised classical VACF `φ(t) = Σ_k d_k² cos(Ω_k t)`.
    pub fn phi(&self, t: f64) -> f64 {
        self.modes().map(|(w, d2)| d2 * (w * t).cos()).sum()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        output::write_csv_file(path, &["omega_k_ps_inv", "dk_sq"], &[&self.omegas, &self.weights])?;
        Ok(())
    }
}

/// `φ(t)` summed over the normal modes.
pub fn classical_vacf_modes(spec: &NormalModeSpectrum, t: f64) -> f64 {
    spec.phi(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Eigensolver {
    /// Secular-equation solver exploiting the arrowhead structure, O(n²).
    #[default]
    Arrowhead,
    /// Dense cyclic Jacobi, O(n³) per sweep.
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagonalizeOptions {
    pub solver: Eigensolver,
    /// Build the full eigenvector matrix and check orthogonality and
    /// eigen-residuals.
    pub verify: bool,
}

impl Default for DiagonalizeOptions {
    fn default() -> Self {
        DiagonalizeOptions {
            solver: Eigensolver::Arrowhead,
            verify: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub solver: Eigensolver,
    pub min_eigenvalue: f64,
    /// Number of slightly negative eigenvalues set to zero.
    pub clamped: usize,
    /// `max |OᵀO − I|`, when verified.
    pub orthogonality_defect: Option<f64>,
    /// `max_k ‖V o_k − λ_k o_k‖ / max|V|`, when verified.
    pub max_residual: Option<f64>,
    pub sweeps: Option<usize>,
}

/// Diagonalises `V` and returns the normal-mode spectrum, with full
/// orthogonality and residual checks.
pub fn diagonalize(v: &CoupledPotentialMatrix) -> Result<NormalModeSpectrum> {
    diagonalize_with(v, DiagonalizeOptions::default()).map(|(s, _)| s)
}

pub fn diagonalize_with(
    v: &CoupledPotentialMatrix,
    options: DiagonalizeOptions,
) -> Result<(NormalModeSpectrum, EigenReport)> {
    let scale = v.max_abs_entry();
    let (values, head_sq, vectors, sweeps) = match options.solver {
        Eigensolver::Arrowhead => {
            let e = arrowhead_eigen(v.system_diag, &v.bath_diag, &v.coupling, options.verify);
            (e.values, e.head_sq, e.vectors, None)
        }
        Eigensolver::Jacobi => {
            let e = jacobi_eigen(&v.to_dense())?;
            let head = e.vectors.row(0).iter().map(|x| x * x).collect();
            (e.values, head, Some(e.vectors), Some(e.sweeps))
        }
    };

    let min_eigenvalue = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -NEGATIVE_TOLERANCE * scale {
        return Err(Error::model(format!(
            "potential is not positive semidefinite: eigenvalue {min_eigenvalue:.6e} (max |V| = {scale:.3e})"
        )));
    }
    let clamped = values.iter().filter(|&&x| x < 0.0).count();

    let (orthogonality_defect, max_residual) = match (&vectors, options.verify) {
        (Some(o), true) => {
            let (ortho, resid) = verify_decomposition(v, &values, o);
            if ortho > ORTHOGONALITY_TOLERANCE {
                return Err(Error::Numerical(format!(
                    "eigenvectors not orthogonal: max |OᵀO − I| = {ortho:.3e}"
                )));
            }
            if resid > RESIDUAL_TOLERANCE {
                return Err(Error::Numerical(format!(
                    "eigen-residual {resid:.3e} exceeds {RESIDUAL_TOLERANCE:.0e}·max|V|"
                )));
            }
            (Some(ortho), Some(resid))
        }
        _ => (None, None),
    };

    let omegas = values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let spectrum = NormalModeSpectrum {
        omegas,
        weights: head_sq,
        mass: v.mass,
        omega0: v.omega0,
    };
    let total = spectrum.weight_sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Numerical(format!("Σ d_k² = {total:.15}, expected 1")));
    }
    Ok((
        spectrum,
        EigenReport {
            solver: options.solver,
            min_eigenvalue,
            clamped,
            orthogonality_defect,
            max_residual,
            sweeps,
        },
    ))
}

/// `(max |OᵀO − I|, max_k ‖V o_k − λ_k o_k‖₂ / max|V|)`.
pub fn verify_decomposition(v: &CoupledPotentialMatrix, values: &[f64], o: &Array2<f64>) -> (f64, f64) {
    let gram = o.t().dot(o);
    let ortho = gram
        .indexed_iter()
        .map(|((i, j), g)| (g - if i == j { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    let scale = v.max_abs_entry().max(f64::MIN_POSITIVE);
    let resid = (0..values.len())
        .map(|k| {
            let col: Vec<f64> = o.column(k).to_vec();
            let vc = v.apply(&col);
            vc.iter()
                .zip(&col)
                .map(|(a, b)| (a - values[k] * b).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    (ortho, resid / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{CoupledPotentialMatrix, SpectralDensity};
    use approx::assert_relative_eq;

    fn golden() -> CoupledPotentialMatrix {
        // ω₀ = 1, one mode ω₁ = 1 with c²/(mω₁²) = 1, m = m₁ = 1
        CoupledPotentialMatrix::from_parts(2.0, vec![1.0], vec![-1.0], 1.0, 1.0).unwrap()
    }

    #[test]
    fn golden_ratio_modes() {
        for solver in [Eigensolver::Arrowhead, Eigensolver::Jacobi] {
            let (s, rep) = diagonalize_with(&golden(), DiagonalizeOptions { solver, verify: true }).unwrap();
            assert_relative_eq!(s.omegas[0], 0.618034, max_relative = 1e-6);
            assert_relative_eq!(s.omegas[1], 1.618034, max_relative = 1e-6);
            // d² = 1/(1 + (2 − λ)²): the soft mode is mostly bath
            assert_relative_eq!(s.weights[0], 0.276393, max_relative = 1e-5);
            assert_relative_eq!(s.weights[1], 0.723607, max_relative = 1e-5);
            assert!(rep.orthogonality_defect.unwrap() < 1e-14);
        }
    }

    #[test]
    fn decoupled_system() {
        let v = CoupledPotentialMatrix::from_parts(0.81, vec![0.25, 4.0], vec![0.0, 0.0], 0.9, 2.0).unwrap();
        let s = diagonalize(&v).unwrap();
        assert_eq!(s.omegas, vec![0.5, 0.9, 2.0]);
        assert_eq!(s.weights, vec![0.0, 1.0, 0.0]);
        assert_eq!(s.mass, 2.0);
    }

    #[test]
    fn negative_potential_is_a_model_error() {
        let v = CoupledPotentialMatrix::from_parts(0.1, vec![1.0], vec![-1.0], 0.0, 1.0).unwrap();
        assert!(matches!(diagonalize(&v), Err(Error::Model(_))));
    }

    #[test]
    fn single_mode_vacf() {
        let s = NormalModeSpectrum::from_modes(vec![2.0], vec![1.0], 1.0, 2.0).unwrap();
        assert_relative_eq!(classical_vacf_modes(&s, std::f64::consts::FRAC_PI_2), -1.0);
        assert_eq!(s.phi(0.0), 1.0);
    }

    #[test]
    fn solvers_agree_on_a_drude_bath() {
        let sd = SpectralDensity::drude(1.0, 2.0, 0.7).unwrap();
        let v = sd.discretize(120, 30.0).unwrap().build_matrix(0.5).unwrap();
        let (a, ra) = diagonalize_with(&v, DiagonalizeOptions::default()).unwrap();
        let (j, rj) = diagonalize_with(
            &v,
            DiagonalizeOptions {
                solver: Eigensolver::Jacobi,
                verify: true,
            },
        )
        .unwrap();
        assert!(rj.sweeps.unwrap() < jacobi::MAX_SWEEPS);
        assert!(ra.max_residual.unwrap() < 1e-12);
        for k in 0..a.len() {
            assert!((a.omegas[k] - j.omegas[k]).abs() < 1e-10 * 30.0);
            assert!((a.weights[k] - j.weights[k]).abs() < 1e-10);
        }
        for &t in &[0.3, 1.0, 4.0] {
            assert!((a.phi(t) - j.phi(t)).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_mode_is_clamped() {
        let sd = SpectralDensity::drude(1.0, 2.0, 0.7).unwrap();
        let v = sd.discretize(400, 100.0).unwrap().build_matrix(0.0).unwrap();
        let (s, rep) = diagonalize_with(&v, DiagonalizeOptions::default()).unwrap();
        assert!(rep.min_eigenvalue.abs() <= NEGATIVE_TOLERANCE * v.max_abs_entry());
        assert!(s.omegas[0] < 1e-4);
        assert!((s.weight_sum() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn free_mode_weight_follows_grid_spacing() {
        // translation mode of a flat surface: d₀² = 1/(1 + Σ w_α/ω_α²) ≈ Δω/(πγ)
        let sd = SpectralDensity::drude(1.0, 2.0, 0.7).unwrap();
        let mut previous = None;
        for n in [1000, 2000] {
            let bath = sd.discretize(n, 100.0).unwrap();
            let s = diagonalize(&bath.build_matrix(0.0).unwrap()).unwrap();
            let series: f64 = bath.omegas.iter().zip(&bath.weights).map(|(w, c)| c / (w * w)).sum();
            assert_relative_eq!(s.weights[0], 1.0 / (1.0 + series), max_relative = 1e-9);
            let dw = 100.0 / n as f64;
            assert_relative_eq!(s.weights[0], dw / std::f64::consts::PI, max_relative = 0.02);
            if let Some(p) = previous {
                assert_relative_eq!(s.weights[0] / p, 0.5, max_relative = 0.02);
            }
            previous = Some(s.weights[0]);
        }
    }

    #[test]
    fn spectrum_validation() {
        assert!(NormalModeSpectrum::from_modes(vec![1.0], vec![0.5], 1.0, 0.0).is_err());
        assert!(NormalModeSpectrum::from_modes(vec![1.0, 2.0], vec![0.5], 1.0, 0.0).is_err());
        let s = NormalModeSpectrum::from_modes(vec![2.0, 1.0], vec![0.25, 0.75], 1.0, 0.0).unwrap();
        assert_eq!(s.omegas, vec![1.0, 2.0]);
        assert_eq!(s.weights, vec![0.75, 0.25]);
    }
}
