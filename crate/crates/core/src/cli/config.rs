use std::fmt;
use std::path::{Path, PathBuf};

use crate::dsf::Window;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;

#[derive(Debug, Clone, PartialEq)]
pub enum WindowSetting {
    None,
    /// Gaussian of the given width, or `t_max/4` when unset.
    Gaussian(Option<f64>),
}

impl fmt::Display for WindowSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSetting::None => write!(f, "none"),
            WindowSetting::Gaussian(None) => write!(f, "gaussian"),
            WindowSetting::Gaussian(Some(s)) => write!(f, "gaussian({s})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mass_amu: f64,
    pub temperature_k: f64,
    pub gamma_ps_inv: f64,
    pub omega_c_ps_inv: f64,
    pub omega0_ps_inv: f64,
    pub dk_inv_a: f64,
    pub n_modes: usize,
    /// `None` selects the density's default cutoff.
    pub omega_max_ps_inv: Option<f64>,
    pub t_min_ps: f64,
    pub t_max_ps: f64,
    pub n_t: usize,
    pub seed: u64,
    pub window: WindowSetting,
    pub output_dir: PathBuf,
    /// Two-column `ω  J(ω)/m` table replacing the Drude density.
    pub density_file: Option<PathBuf>,
    pub mc_samples: usize,
    pub mc_modes: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mass_amu: 7.0,
            temperature_k: 150.0,
            gamma_ps_inv: 1.0,
            omega_c_ps_inv: 2.0,
            omega0_ps_inv: 0.0,
            dk_inv_a: 1.0,
            n_modes: 2000,
            omega_max_ps_inv: None,
            t_min_ps: -10.0,
            t_max_ps: 10.0,
            n_t: 2001,
            seed: 20_240_917,
            window: WindowSetting::None,
            output_dir: PathBuf::from("out"),
            density_file: None,
            mc_samples: 100_000,
            mc_modes: 200,
        }
    }
}

fn bad(key: &str, value: &str, why: &str) -> Error {
    Error::Parse(format!("{key}: invalid value '{value}' ({why})"))
}

fn number(key: &str, value: &str) -> Result<f64> {
    let x: f64 = value.parse().map_err(|_| bad(key, value, "expected a number"))?;
    if !x.is_finite() {
        return Err(bad(key, value, "must be finite"));
    }
    Ok(x)
}

fn count(key: &str, value: &str) -> Result<usize> {
    value.parse().map_err(|_| bad(key, value, "expected a non-negative integer"))
}

fn parse_window(value: &str) -> Result<WindowSetting> {
    let v = value.trim().to_ascii_lowercase();
    if v == "none" {
        return Ok(WindowSetting::None);
    }
    if v == "gaussian" {
        return Ok(WindowSetting::Gaussian(None));
    }
    if let Some(inner) = v.strip_prefix("gaussian(").and_then(|r| r.strip_suffix(')')) {
        let s = number("window", inner)?;
        if s > 0.0 {
            return Ok(WindowSetting::Gaussian(Some(s)));
        }
    }
    Err(bad("window", value, "expected none, gaussian or gaussian(<sigma_ps>)"))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "mass_amu" => self.mass_amu = number(key, value)?,
            "temperature_K" => self.temperature_k = number(key, value)?,
            "gamma_ps_inv" => self.gamma_ps_inv = number(key, value)?,
            "omega_c_ps_inv" => self.omega_c_ps_inv = number(key, value)?,
            "omega0_ps_inv" => self.omega0_ps_inv = number(key, value)?,
            "dK_inv_A" => self.dk_inv_a = number(key, value)?,
            "n_modes" => self.n_modes = count(key, value)?,
            "omega_max_ps_inv" => {
                self.omega_max_ps_inv = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(number(key, value)?)
                }
            }
            "t_min_ps" => self.t_min_ps = number(key, value)?,
            "t_max_ps" => self.t_max_ps = number(key, value)?,
            "n_t" => self.n_t = count(key, value)?,
            "seed" => self.seed = value.parse().map_err(|_| bad(key, value, "expected a 64-bit unsigned integer"))?,
            "window" => self.window = parse_window(value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "density_file" => {
                self.density_file = if value.is_empty() || value == "none" {
                    None
                } else {
                    Some(PathBuf::from(value))
                }
            }
            "mc_samples" => self.mc_samples = count(key, value)?,
            "mc_modes" => self.mc_modes = count(key, value)?,
            other => return Err(Error::Parse(format!("unknown configuration key '{other}'"))),
        }
        Ok(())
    }

    /// Applies a `key=value` assignment.
    pub fn assign(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got '{assignment}'")))?;
        self.set(k, v)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            self.assign(line).map_err(|e| match e {
                Error::Parse(msg) => Error::Parse(format!("line {}: {msg}", lineno + 1)),
                e => e,
            })?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Range checks; the error names the offending key.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass_amu", self.mass_amu),
            ("temperature_K", self.temperature_k),
            ("omega_c_ps_inv", self.omega_c_ps_inv),
            ("dK_inv_A", self.dk_inv_a),
        ];
        for (k, v) in positive {
            if !(v > 0.0) {
                return Err(Error::Parse(format!("{k}: must be positive, got {v}")));
            }
        }
        for (k, v) in [("gamma_ps_inv", self.gamma_ps_inv), ("omega0_ps_inv", self.omega0_ps_inv)] {
            if !(v >= 0.0) {
                return Err(Error::Parse(format!("{k}: must be non-negative, got {v}")));
            }
        }
        if self.n_modes == 0 {
            return Err(Error::Parse("n_modes: must be at least 1".into()));
        }
        if let Some(w) = self.omega_max_ps_inv {
            if !(w > 0.0) {
                return Err(Error::Parse(format!("omega_max_ps_inv: must be positive, got {w}")));
            }
        }
        if !(self.t_min_ps < 0.0) {
            return Err(Error::Parse(format!("t_min_ps: must be negative, got {}", self.t_min_ps)));
        }
        if !(self.t_max_ps > 0.0) {
            return Err(Error::Parse(format!("t_max_ps: must be positive, got {}", self.t_max_ps)));
        }
        if self.n_t < 3 || self.n_t.is_multiple_of(2) {
            return Err(Error::Parse(format!("n_t: must be odd and at least 3, got {}", self.n_t)));
        }
        self.grid().map_err(|e| Error::Parse(format!("t_min_ps/t_max_ps/n_t: {e}")))?;
        if self.mc_samples == 0 {
            return Err(Error::Parse("mc_samples: must be at least 1".into()));
        }
        if self.mc_modes == 0 {
            return Err(Error::Parse("mc_modes: must be at least 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.t_min_ps, self.t_max_ps, self.n_t)
    }

    pub fn window(&self) -> Window {
        match self.window {
            WindowSetting::None => Window::None,
            WindowSetting::Gaussian(Some(s)) => Window::Gaussian { sigma_ps: s },
            WindowSetting::Gaussian(None) => Window::default_gaussian(self.t_max_ps),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        let text = "# bath\nmass_amu = 14\n  gamma_ps_inv=0.5  # weak\n\nwindow = gaussian(2.5)\nomega_max_ps_inv = auto\n";
        let mut cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.mass_amu, 14.0);
        assert_eq!(cfg.gamma_ps_inv, 0.5);
        assert_eq!(cfg.window, WindowSetting::Gaussian(Some(2.5)));
        assert_eq!(cfg.window(), Window::Gaussian { sigma_ps: 2.5 });
        assert_eq!(cfg.omega_max_ps_inv, None);
        cfg.assign("n_t=401").unwrap();
        assert_eq!(cfg.n_t, 401);
        cfg.validate().unwrap();
    }

    #[test]
    fn errors_name_the_key() {
        let e = RunConfig::parse("mass_amu = 7\nbogus = 1\n").unwrap_err().to_string();
        assert!(e.contains("bogus") && e.contains("line 2"), "{e}");
        let e = RunConfig::parse("temperature_K = hot").unwrap_err().to_string();
        assert!(e.contains("temperature_K"));
        let mut cfg = RunConfig::default();
        cfg.n_t = 2000;
        assert!(cfg.validate().unwrap_err().to_string().contains("n_t"));
        cfg = RunConfig::default();
        cfg.t_min_ps = 1.0;
        assert!(cfg.validate().unwrap_err().to_string().contains("t_min_ps"));
        assert!(RunConfig::default().assign("seed").is_err());
    }

    #[test]
    fn defaults_are_valid() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.window(), Window::None);
        let g = cfg.grid().unwrap();
        assert_eq!(g.len(), 2001);
        assert_eq!(g.zero_index(), 1000);
    }
}
