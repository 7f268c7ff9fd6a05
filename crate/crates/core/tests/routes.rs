//! Cross-route and invariant checks on randomly drawn problems.

use proptest::prelude::*;
use quantum_recoil::bath::{CoupledPotentialMatrix, SpectralDensity};
use quantum_recoil::closed_form::ExponentialKernelModel;
use quantum_recoil::correlators::Correlators;
use quantum_recoil::dsf::{self, Window};
use quantum_recoil::normal_modes::{diagonalize_with, DiagonalizeOptions, Eigensolver, NormalModeSpectrum};
use quantum_recoil::oracle::quad_recoil;
use quantum_recoil::TimeGrid;

fn spectrum(gamma: f64, omega_c: f64, omega0: f64, n: usize) -> NormalModeSpectrum {
    let sd = SpectralDensity::drude(gamma, omega_c, 0.8).unwrap();
    let wmax = sd.default_omega_max(omega0);
    let v = sd.discretize(n, wmax).unwrap().build_matrix(omega0).unwrap();
    diagonalize_with(&v, DiagonalizeOptions::default()).unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn arrowhead_and_jacobi_agree(
        a in 0.0f64..20.0,
        poles in prop::collection::vec(0.0f64..10.0, 1..25),
        seed in prop::collection::vec(-2.0f64..2.0, 25),
    ) {
        let z: Vec<f64> = poles.iter().zip(&seed).map(|(_, s)| *s).collect();
        let v = CoupledPotentialMatrix::from_parts(a + z.iter().map(|x| x * x).sum::<f64>(), poles.clone(), z, 1.0, 1.0).unwrap();
        let fast = diagonalize_with(&v, DiagonalizeOptions::default());
        let slow = diagonalize_with(&v, DiagonalizeOptions { solver: Eigensolver::Jacobi, verify: true });
        match (fast, slow) {
            (Ok((f, _)), Ok((s, _))) => {
                let scale = v.max_abs_entry();
                for k in 0..f.len() {
                    prop_assert!((f.omegas[k].powi(2) - s.omegas[k].powi(2)).abs() <= 1e-9 * scale);
                }
                for &t in &[0.5, 2.0, 7.0] {
                    prop_assert!((f.phi(t) - s.phi(t)).abs() < 1e-8);
                }
            }
            (Err(_), Err(_)) => {}
            (f, s) => prop_assert!(false, "solvers disagree on success: {:?} / {:?}", f.is_ok(), s.is_ok()),
        }
    }

    #[test]
    fn spectrum_invariants(gamma in 0.0f64..3.0, wc in 0.1f64..20.0, w0 in 0.0f64..3.0, n in 5usize..150) {
        let s = spectrum(gamma, wc, w0, n);
        prop_assert!((s.weight_sum() - 1.0).abs() < 1e-10);
        prop_assert!(s.weights.iter().all(|&w| w >= 0.0));
        prop_assert!(s.omegas.windows(2).all(|p| p[0] <= p[1]));
        prop_assert_eq!(s.len(), n + 1);
    }

    #[test]
    fn correlator_invariants(gamma in 0.05f64..3.0, wc in 0.1f64..20.0, w0 in 0.0f64..2.0, temp in 5.0f64..2000.0, dk in 0.1f64..3.0) {
        let s = spectrum(gamma, wc, w0, 80);
        let grid = TimeGrid::symmetric(6.0, 241).unwrap();
        let c = Correlators::new(&s, temp).unwrap();
        let table = c.table(&grid);
        let other = Correlators::new(&s, 3.0 * temp).unwrap().table(&grid);
        let n = grid.len();
        prop_assert_eq!(&table.y, &other.y);
        for i in 0..n {
            prop_assert_eq!(table.y[i], -table.y[n - 1 - i]);
            prop_assert!(table.x[i] <= 0.0);
            // the quantum filter only raises the fluctuation amplitude
            prop_assert!(table.psi_q[grid.zero_index()] >= table.psi[grid.zero_index()]);
        }
        let isf = c.isf(dk, &grid);
        for i in 0..n {
            prop_assert!(isf.isf[i].norm() <= 1.0);
            prop_assert_eq!(isf.isf[i], isf.isf[n - 1 - i].conj());
            prop_assert!((isf.recoil_factor[i].norm() - 1.0).abs() < 1e-14);
        }
        let y = quad_recoil(&grid, &table.phi, s.mass).unwrap();
        for i in 0..n {
            prop_assert!((y[i] - table.y[i]).abs() < 1e-3 * (1.0 + table.y[i].abs()));
        }
    }

    #[test]
    fn cumulant_route_matches_mode_sum(gamma in 0.1f64..2.0, wc in 0.2f64..10.0, temp in 10.0f64..500.0) {
        let s = spectrum(gamma, wc, 0.0, 60);
        let grid = TimeGrid::symmetric(5.0, 501).unwrap();
        let c = Correlators::new(&s, temp).unwrap();
        let direct = grid.map_even(|t| c.x(t));
        // Simpson needs Ω·h ≲ 0.05 on the fastest mode for 1e-6 relative accuracy
        let refine = (s.omegas.last().unwrap() * grid.dt() / 0.05).ceil() as usize;
        let cumulant = c.x_via_cumulant_on(&grid, refine);
        for (d, q) in direct.iter().zip(&cumulant) {
            prop_assert!((d - q).abs() <= 1e-6 * d.abs().max(1e-8));
        }
    }

    #[test]
    fn mode_sum_approaches_closed_form(wc in 0.3f64..6.0) {
        let m = 0.8;
        let model = ExponentialKernelModel::new(1.0, wc, m).unwrap();
        let s = spectrum(1.0, wc, 0.0, 1500);
        for &t in &[0.0, 0.5, 1.0, 3.0, 6.0] {
            prop_assert!((s.phi(t) - model.phi(t)).abs() < 2e-3);
            let y = Correlators::new(&s, 100.0).unwrap().y(t);
            prop_assert!(m * (y - model.recoil(t)).abs() < 3e-3);
        }
    }
}

#[test]
fn windowed_spectrum_keeps_detailed_balance() {
    let s = spectrum(1.0, 2.0, 0.0, 1000);
    let grid = TimeGrid::symmetric(10.0, 1001).unwrap();
    let c = Correlators::new(&s, 150.0).unwrap();
    let isf = c.isf(1.0, &grid);
    let plain = dsf::isf_to_dsf(&isf, Window::None).unwrap();
    let smooth = dsf::isf_to_dsf(&isf, Window::default_gaussian(10.0)).unwrap();
    assert!(smooth.energies.len() > plain.energies.len());
    assert!(smooth.imag_residual < 1e-10);
    assert!(dsf::detailed_balance_residual(&plain, 150.0).unwrap() < 5e-3);
    assert!(dsf::detailed_balance_residual(&smooth, 150.0).unwrap() < 5e-3);

    // a symmetric spectrum violates detailed balance at finite temperature
    let classical = dsf::isf_to_dsf(&c.isf_without_recoil(1.0, &grid), Window::None).unwrap();
    assert!(dsf::symmetry_residual(&classical) < 1e-10);
    assert!(dsf::detailed_balance_residual(&classical, 150.0).unwrap() > 1e-2);
}

#[test]
fn harmonic_well_has_no_zero_mode() {
    let s = spectrum(1.0, 2.0, 1.5, 400);
    assert!(s.omegas[0] > 0.1);
    let c = Correlators::new(&s, 150.0).unwrap();
    // a confined particle's mean-square displacement stays bounded
    let late: Vec<f64> = (0..20).map(|k| c.msd(20.0 + k as f64)).collect();
    let kt_over_mw2 = 0.0861733 * 150.0 / (0.8 * 1.5 * 1.5);
    assert!(late.iter().all(|&x| x < 10.0 * kt_over_mw2));
}
