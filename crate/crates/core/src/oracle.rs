//! Independent checks on the normal-mode route: a Monte Carlo estimate of
//! the classical VACF from thermally sampled normal-mode trajectories, and
//! a quadrature of `φ` for the recoil function.
//!
//! Random numbers come from ChaCha8 seeded with `seed` and one stream per
//! partition; normal variates use the Marsaglia polar method. Samples are
//! split over a fixed number of partitions that are summed in order, so a
//! result depends only on the seed and the sample count.

use ndarray::{Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::correlators::ZERO_FREQUENCY;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::normal_modes::NormalModeSpectrum;
use crate::quad;
use crate::units;

pub const PARTITIONS: u64 = 8;
const BATCH: usize = 512;

#[derive(Debug, Clone)]
pub struct McConfig {
    pub n_samples: usize,
    pub seed: u64,
    /// K
    pub temperature: f64,
    pub grid: TimeGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McVacf {
    pub times: Vec<f64>,
    pub phi: Vec<f64>,
    /// Standard error of each `phi` entry; NaN for a single sample.
    pub stderr: Vec<f64>,
    pub n_samples: usize,
}

struct Polar {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Polar {
    fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Polar { rng, spare: None }
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.rng.gen::<f64>() - 1.0;
            let v = 2.0 * self.rng.gen::<f64>() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }
}

/// Per-time sums of `v(t)v(0)` and its square over one partition.
fn partition_sums(
    spec: &NormalModeSpectrum,
    cos_t: &Array2<f64>,
    sin_t: &Array2<f64>,
    n: usize,
    seed: u64,
    stream: u64,
) -> (Vec<f64>, Vec<f64>) {
    let k = spec.len();
    let nt = cos_t.ncols();
    let mut gauss = Polar::new(seed, stream);
    let d: Vec<f64> = spec.weights.iter().map(|w| w.sqrt()).collect();
    let mut sum = vec![0.0; nt];
    let mut sum_sq = vec![0.0; nt];
    let mut done = 0;
    while done < n {
        let b = BATCH.min(n - done);
        let mut a = Array2::<f64>::zeros((b, k));
        let mut q = Array2::<f64>::zeros((b, k));
        let mut v0 = vec![0.0; b];
        for s in 0..b {
            for j in 0..k {
                // velocity and scaled displacement of mode j, both N(0,1)
                let vel = gauss.next();
                let pos = gauss.next();
                a[[s, j]] = d[j] * vel;
                q[[s, j]] = d[j] * pos;
                v0[s] += d[j] * vel;
            }
        }
        let v = a.dot(cos_t) - q.dot(sin_t);
        for (row, &v0) in v.axis_iter(Axis(0)).zip(&v0) {
            for ((acc, acc_sq), &vt) in sum.iter_mut().zip(sum_sq.iter_mut()).zip(row) {
                let c = v0 * vt;
                *acc += c;
                *acc_sq += c * c;
            }
        }
        done += b;
    }
    (sum, sum_sq)
}

/// Monte Carlo estimate of `φ(t) = ⟨v(t)v(0)⟩/(k_BT/m)`.
pub fn mc_vacf(spec: &NormalModeSpectrum, cfg: &McConfig) -> Result<McVacf> {
    units::thermal_energy(cfg.temperature)?;
    if cfg.n_samples == 0 {
        return Err(Error::domain("at least one sample is required"));
    }
    if spec.omega0 > 0.0 && spec.omegas.iter().any(|&w| w < ZERO_FREQUENCY) {
        return Err(Error::model(
            "zero-frequency normal mode in a confining potential",
        ));
    }
    let times = cfg.grid.times();
    let k = spec.len();
    let cos_t = Array2::from_shape_fn((k, times.len()), |(j, i)| (spec.omegas[j] * times[i]).cos());
    let sin_t = Array2::from_shape_fn((k, times.len()), |(j, i)| (spec.omegas[j] * times[i]).sin());

    let n = cfg.n_samples;
    let per = n / PARTITIONS as usize;
    let extra = n % PARTITIONS as usize;
    let parts: Vec<(Vec<f64>, Vec<f64>)> = (0..PARTITIONS)
        .into_par_iter()
        .map(|p| {
            let count = per + usize::from((p as usize) < extra);
            partition_sums(spec, &cos_t, &sin_t, count, cfg.seed, p)
        })
        .collect();

    let nt = times.len();
    let mut sum = vec![0.0; nt];
    let mut sum_sq = vec![0.0; nt];
    for (s, sq) in &parts {
        for i in 0..nt {
            sum[i] += s[i];
            sum_sq[i] += sq[i];
        }
    }
    let nf = n as f64;
    let phi: Vec<f64> = sum.iter().map(|s| s / nf).collect();
    let stderr = if n == 1 {
        vec![f64::NAN; nt]
    } else {
        phi.iter()
            .zip(&sum_sq)
            .map(|(m, sq)| ((sq - nf * m * m).max(0.0) / (nf - 1.0) / nf).sqrt())
            .collect()
    };
    Ok(McVacf {
        times,
        phi,
        stderr,
        n_samples: n,
    })
}

/// `Y(t) = (1/m) ∫_0^t φ` on a grid through 0, by composite Simpson from
/// the origin; the result is exactly odd.
pub fn quad_recoil(grid: &TimeGrid, phi: &[f64], mass: f64) -> Result<Vec<f64>> {
    if phi.len() != grid.len() {
        return Err(Error::domain("φ samples do not match the grid"));
    }
    if !(mass > 0.0) {
        return Err(Error::domain(format!("mass must be positive, got {mass}")));
    }
    let z = grid.zero_index();
    let half: Vec<f64> = (0..=grid.max_steps())
        .map(|k| if k <= grid.n_pos() { phi[z + k] } else { phi[z - k] })
        .collect();
    let integral = quad::cumulative_uniform(&half, grid.dt());
    Ok((0..grid.len())
        .map(|i| {
            let k = grid.offset(i);
            let v = integral[k.unsigned_abs() as usize] / mass;
            if k < 0 {
                -v
            } else {
                v
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::ExponentialKernelModel;
    use crate::units::mass_cmu;
    use approx::assert_relative_eq;

    #[test]
    fn polar_moments() {
        let mut g = Polar::new(3, 0);
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| g.next()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| x * x).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01);
        assert!((var - 1.0).abs() < 0.01);
    }

    #[test]
    fn single_mode_cosine() {
        let spec = NormalModeSpectrum::from_modes(vec![1.0], vec![1.0], 1.0, 1.0).unwrap();
        let cfg = McConfig {
            n_samples: 20_000,
            seed: 11,
            temperature: 300.0,
            grid: TimeGrid::non_negative(6.0, 0.1).unwrap(),
        };
        let mc = mc_vacf(&spec, &cfg).unwrap();
        for ((t, p), e) in mc.times.iter().zip(&mc.phi).zip(&mc.stderr) {
            assert!((p - t.cos()).abs() < 5.0 * e, "t={t}");
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let spec = NormalModeSpectrum::from_modes(vec![0.5, 2.0], vec![0.3, 0.7], 1.0, 0.0).unwrap();
        let mut cfg = McConfig {
            n_samples: 1,
            seed: 42,
            temperature: 100.0,
            grid: TimeGrid::non_negative(1.0, 0.25).unwrap(),
        };
        let a = mc_vacf(&spec, &cfg).unwrap();
        let b = mc_vacf(&spec, &cfg).unwrap();
        assert_eq!(a.phi, b.phi);
        assert!(a.stderr.iter().all(|e| e.is_nan()));
        cfg.seed = 43;
        assert_ne!(mc_vacf(&spec, &cfg).unwrap().phi, a.phi);
    }

    #[test]
    fn zero_mode_in_well_is_rejected() {
        let spec = NormalModeSpectrum::from_modes(vec![0.0, 2.0], vec![0.3, 0.7], 1.0, 1.0).unwrap();
        let cfg = McConfig {
            n_samples: 10,
            seed: 1,
            temperature: 100.0,
            grid: TimeGrid::non_negative(1.0, 0.5).unwrap(),
        };
        assert!(matches!(mc_vacf(&spec, &cfg), Err(Error::Model(_))));
    }

    #[test]
    fn recoil_quadrature() {
        let g = TimeGrid::symmetric(4.0, 801).unwrap();
        let ones = vec![1.0; g.len()];
        let y = quad_recoil(&g, &ones, 2.0).unwrap();
        for (t, y) in g.times().iter().zip(&y) {
            assert!((y - t / 2.0).abs() < 1e-13);
        }

        let m = mass_cmu(7.0).unwrap();
        let model = ExponentialKernelModel::new(1.0, 2.0, m).unwrap();
        let g = TimeGrid::symmetric(10.0, 4001).unwrap();
        let phi = g.map_even(|t| model.phi(t));
        let y = quad_recoil(&g, &phi, m).unwrap();
        let i1 = g.zero_index() + 200;
        assert_relative_eq!(g.time(i1), 1.0);
        assert!((y[i1] - 1.1043903).abs() < 1e-6);
        for i in 0..g.len() {
            assert_eq!(y[i], -y[g.len() - 1 - i]);
            assert!((y[i] - model.recoil(g.time(i))).abs() < 1e-9);
        }
    }
}
