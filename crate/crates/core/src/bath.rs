//! Bath coupling: spectral densities, friction kernels, discretization into
//! explicit oscillators and the coupled-oscillator potential matrix.
//!
//! All bath oscillators carry the system mass, so couplings only ever enter
//! through the kernel weights `c_α² / (m m_α ω_α²)`, which are rates in ps⁻¹.

use std::f64::consts::FRAC_2_PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::quad;

/// Fraction of `∫ J/(mω) dω` beyond the cutoff above which a discretized
/// bath is flagged as truncated.
pub const TRUNCATION_WARNING_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub enum DensityShape {
    /// Drude form `J(ω) = m γ ω ω_c² / (ω² + ω_c²)`, whose friction kernel is
    /// `γ ω_c e^{-ω_c t}`.
    Drude { gamma: f64, omega_c: f64 },
    /// Points `(ω, J(ω)/m)` with strictly increasing `ω > 0`; linear in between
    /// and zero outside.
    Tabulated(Vec<(f64, f64)>),
}

/// Bath spectral density together with the system mass (c.m.u.).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    pub shape: DensityShape,
    pub mass: f64,
}

impl SpectralDensity {
    pub fn drude(gamma: f64, omega_c: f64, mass: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::domain(format!("gamma must be ≥ 0, got {gamma}")));
        }
        if !(omega_c > 0.0) || !omega_c.is_finite() {
            return Err(Error::domain(format!("omega_c must be > 0, got {omega_c}")));
        }
        check_mass(mass)?;
        Ok(SpectralDensity {
            shape: DensityShape::Drude { gamma, omega_c },
            mass,
        })
    }

    pub fn tabulated(points: Vec<(f64, f64)>, mass: f64) -> Result<Self> {
        check_mass(mass)?;
        if points.is_empty() {
            return Err(Error::domain("tabulated spectral density is empty"));
        }
        for (i, &(w, j)) in points.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::domain(format!("frequency at row {i} must be > 0, got {w}")));
            }
            if !(j >= 0.0) || !j.is_finite() {
                return Err(Error::domain(format!("J at row {i} must be ≥ 0, got {j}")));
            }
            if i > 0 && w <= points[i - 1].0 {
                return Err(Error::domain(format!(
                    "frequencies must be strictly increasing (row {i})"
                )));
            }
        }
        Ok(SpectralDensity {
            shape: DensityShape::Tabulated(points),
            mass,
        })
    }

    /// Parses two whitespace- or comma-separated columns `ω J/m`; `#` starts
    /// a comment.
    pub fn parse_table(text: &str, mass: f64) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Parse(format!(
                    "line {}: expected 2 columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}: {s:?}", lineno + 1)))
            };
            points.push((parse(cols[0])?, parse(cols[1])?));
        }
        Self::tabulated(points, mass)
    }

    pub fn from_table_file(path: &Path, mass: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_table(&text, mass)
    }

    /// `J(ω)/m`.
    pub fn j_over_mass(&self, omega: f64) -> f64 {
        match &self.shape {
            DensityShape::Drude { gamma, omega_c } => {
                gamma * omega * omega_c * omega_c / (omega * omega + omega_c * omega_c)
            }
            DensityShape::Tabulated(points) => interpolate(points, omega),
        }
    }

    /// `J(ω)` in c.m.u.·ps⁻².
    pub fn j(&self, omega: f64) -> f64 {
        self.mass * self.j_over_mass(omega)
    }

    /// Characteristic rate used to pick default cutoffs.
    pub fn scale_rate(&self) -> f64 {
        match &self.shape {
            DensityShape::Drude { gamma, omega_c } => gamma.max(*omega_c),
            DensityShape::Tabulated(points) => points.last().map(|p| p.0).unwrap_or(1.0),
        }
    }

    /// Default discretization cutoff: 50 × the largest of (ω_c, γ, ω₀).
    pub fn default_omega_max(&self, omega0: f64) -> f64 {
        match &self.shape {
            DensityShape::Drude { .. } => 50.0 * self.scale_rate().max(omega0),
            // a table carries its own support
            DensityShape::Tabulated(points) => {
                points.last().map(|p| p.0).unwrap_or(1.0).max(50.0 * omega0)
            }
        }
    }

    /// `γ ω_c e^{-ω_c t}` for the Drude form.
    pub fn kernel_analytic(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("kernel time must be ≥ 0, got {t}")));
        }
        match self.shape {
            DensityShape::Drude { gamma, omega_c } => Ok(gamma * omega_c * (-omega_c * t).exp()),
            DensityShape::Tabulated(_) => Err(Error::domain(
                "analytic kernel is only defined for the Drude form",
            )),
        }
    }

    /// `γ(t) = (2/π) ∫_0^∞ J(ω)/(mω) cos(ωt) dω`.
    ///
    /// Parametric forms use [`quad::cosine_transform`]; tabulated forms use
    /// the trapezoid rule on the table.
    pub fn kernel_from_density(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("kernel time must be ≥ 0, got {t}")));
        }
        match &self.shape {
            DensityShape::Drude { omega_c, .. } => {
                let scale = self.j_over_mass(*omega_c);
                let r = quad::cosine_transform(
                    |w| self.j_over_mass(w) / w,
                    t,
                    *omega_c,
                    1e-13 * scale,
                    1e-12,
                );
                Ok(FRAC_2_PI * r.value)
            }
            DensityShape::Tabulated(points) => {
                let f = |(w, j): (f64, f64)| j / w * (w * t).cos();
                let sum: f64 = points
                    .windows(2)
                    .map(|p| 0.5 * (p[1].0 - p[0].0) * (f(p[0]) + f(p[1])))
                    .sum();
                Ok(FRAC_2_PI * sum)
            }
        }
    }

    /// Fraction of `∫_0^∞ J/(mω) dω` lying above `omega_max`.
    pub fn tail_fraction(&self, omega_max: f64) -> f64 {
        match &self.shape {
            DensityShape::Drude { gamma, omega_c } => {
                if *gamma == 0.0 {
                    0.0
                } else {
                    1.0 - FRAC_2_PI * (omega_max / omega_c).atan()
                }
            }
            DensityShape::Tabulated(points) => {
                let g = |w: f64| interpolate(points, w) / w;
                let mut total = 0.0;
                let mut tail = 0.0;
                for p in points.windows(2) {
                    let (a, b) = (p[0].0, p[1].0);
                    total += 0.5 * (b - a) * (g(a) + g(b));
                    if b > omega_max {
                        let lo = a.max(omega_max);
                        tail += 0.5 * (b - lo) * (g(lo) + g(b));
                    }
                }
                if total > 0.0 {
                    tail / total
                } else {
                    0.0
                }
            }
        }
    }

    /// Midpoint discretization: `ω_α = (α − ½)Δω`, `Δω = ω_max/n`, with kernel
    /// weights `(2/π) (J(ω_α)/m) Δω / ω_α`.
    pub fn discretize(&self, n_modes: usize, omega_max: f64) -> Result<DiscretizedBath> {
        if n_modes == 0 {
            return Err(Error::domain("n_modes must be ≥ 1"));
        }
        if !(omega_max > 0.0) || !omega_max.is_finite() {
            return Err(Error::domain(format!("omega_max must be > 0, got {omega_max}")));
        }
        let dw = omega_max / n_modes as f64;
        let omegas: Vec<f64> = (1..=n_modes).map(|a| (a as f64 - 0.5) * dw).collect();
        let weights = omegas
            .iter()
            .map(|&w| FRAC_2_PI * self.j_over_mass(w) * dw / w)
            .collect();
        let tail = self.tail_fraction(omega_max);
        Ok(DiscretizedBath {
            omegas,
            weights,
            omega_max,
            mass: self.mass,
            tail_fraction: tail,
            truncation_warning: tail > TRUNCATION_WARNING_FRACTION,
        })
    }
}

fn check_mass(mass: f64) -> Result<()> {
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::domain(format!("mass must be > 0, got {mass}")));
    }
    Ok(())
}

fn interpolate(points: &[(f64, f64)], x: f64) -> f64 {
    let (first, last) = match (points.first(), points.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return 0.0,
    };
    if x < first.0 || x > last.0 {
        return 0.0;
    }
    let i = points.partition_point(|p| p.0 <= x);
    if i == 0 {
        return first.1;
    }
    if i == points.len() {
        return last.1;
    }
    let (x0, y0) = points[i - 1];
    let (x1, y1) = points[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Explicit bath oscillators with equal masses.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedBath {
    /// Bath frequencies ω_α in ps⁻¹.
    pub omegas: Vec<f64>,
    /// Kernel weights `c_α²/(m m_α ω_α²)` in ps⁻¹.
    pub weights: Vec<f64>,
    pub omega_max: f64,
    pub mass: f64,
    /// Fraction of the friction spectrum above `omega_max`.
    pub tail_fraction: f64,
    pub truncation_warning: bool,
}

impl DiscretizedBath {
    pub fn n_modes(&self) -> usize {
        self.omegas.len()
    }

    /// Kernel represented by the oscillators, `Σ_α w_α cos(ω_α t)`.
    pub fn kernel(&self, t: f64) -> f64 {
        self.omegas
            .iter()
            .zip(&self.weights)
            .map(|(w, c)| c * (w * t).cos())
            .sum()
    }

    /// Potential matrix `V/m` of the global quadratic Hamiltonian with the
    /// system coordinate first.
    pub fn build_matrix(&self, omega0: f64) -> Result<CoupledPotentialMatrix> {
        if !(omega0 >= 0.0) || !omega0.is_finite() {
            return Err(Error::domain(format!("omega0 must be ≥ 0, got {omega0}")));
        }
        // counter-term: completing the square adds Σ c²/(m m_α ω_α²) to ω₀²
        let counter: f64 = self.weights.iter().sum();
        let bath_diag = self.omegas.iter().map(|w| w * w).collect();
        // -c_α/m = -ω_α √w_α when m_α = m
        let coupling = self
            .omegas
            .iter()
            .zip(&self.weights)
            .map(|(w, c)| -w * c.sqrt())
            .collect();
        Ok(CoupledPotentialMatrix {
            system_diag: omega0 * omega0 + counter,
            bath_diag,
            coupling,
            omega0,
            mass: self.mass,
        })
    }
}

/// Real symmetric `V/m` (ps⁻²) stored in arrowhead form: the system
/// coordinate couples to every bath oscillator, bath oscillators only to
/// the system.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledPotentialMatrix {
    pub system_diag: f64,
    pub bath_diag: Vec<f64>,
    pub coupling: Vec<f64>,
    pub omega0: f64,
    pub mass: f64,
}

impl CoupledPotentialMatrix {
    /// Builds the matrix directly from its arrowhead parts.
    pub fn from_parts(
        system_diag: f64,
        bath_diag: Vec<f64>,
        coupling: Vec<f64>,
        omega0: f64,
        mass: f64,
    ) -> Result<Self> {
        if bath_diag.len() != coupling.len() {
            return Err(Error::domain("bath diagonal and coupling lengths differ"));
        }
        check_mass(mass)?;
        let finite = std::iter::once(system_diag)
            .chain(bath_diag.iter().copied())
            .chain(coupling.iter().copied())
            .all(f64::is_finite);
        if !finite {
            return Err(Error::domain("matrix entries must be finite"));
        }
        Ok(CoupledPotentialMatrix {
            system_diag,
            bath_diag,
            coupling,
            omega0,
            mass,
        })
    }

    pub fn dim(&self) -> usize {
        self.bath_diag.len() + 1
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => self.system_diag,
            (0, k) | (k, 0) => self.coupling[k - 1],
            (a, b) if a == b => self.bath_diag[a - 1],
            _ => 0.0,
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        std::iter::once(self.system_diag)
            .chain(self.bath_diag.iter().copied())
            .chain(self.coupling.iter().copied())
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        let s: f64 = self.system_diag.powi(2)
            + self.bath_diag.iter().map(|x| x * x).sum::<f64>()
            + 2.0 * self.coupling.iter().map(|x| x * x).sum::<f64>();
        s.sqrt()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> ndarray::Array2<f64> {
        let n = self.dim();
        ndarray::Array2::from_shape_fn((n, n), |(i, j)| self.entry(i, j))
    }

    /// `V·x` in O(n).
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = Vec::with_capacity(x.len());
        let head = self.system_diag * x[0]
            + self.coupling.iter().zip(&x[1..]).map(|(c, v)| c * v).sum::<f64>();
        y.push(head);
        for (k, (&d, &c)) in self.bath_diag.iter().zip(&self.coupling).enumerate() {
            y.push(c * x[0] + d * x[k + 1]);
        }
        y
    }
}
