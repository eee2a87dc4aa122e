//! Invariants over randomized inputs.

use num_complex::Complex64;
use proptest::prelude::*;

use snv_core::defect::{
    build_hamiltonian, eigensystem_in_defect_frame, lab_to_defect_frame, DefectParameters, FieldConfig, Manifold,
    AXIS_111,
};
use snv_core::dynamics::{peak_lorentzian, pumping_trace, t1_phonon_model, RateModel};
use snv_core::fitting::{
    fit_exponential_decay, fit_lorentzian_multi, fit_t1_vs_temperature, ActivationEnergy, DataSeries,
};
use snv_core::numerics::{hermitian_eigensystem, nlls_fit, ComplexMatrix, DataPoint, LsqOptions};
use snv_core::spectra::{thermal_weights, transition_table_with};

fn complex() -> impl Strategy<Value = Complex64> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn hermitian(dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (proptest::collection::vec(complex(), dim * dim)).prop_map(move |raw| {
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = if i == j {
                    Complex64::new(raw[i * dim + j].re, 0.0)
                } else if i < j {
                    raw[i * dim + j]
                } else {
                    raw[j * dim + i].conj()
                };
            }
        }
        m
    })
}

fn vector3(scale: f64) -> impl Strategy<Value = [f64; 3]> {
    (-scale..scale, -scale..scale, -scale..scale).prop_map(|(x, y, z)| [x, y, z])
}

fn strained() -> impl Strategy<Value = DefectParameters> {
    (
        400.0..1200.0f64,
        1000.0..3000.0f64,
        -400.0..400.0f64,
        -400.0..400.0f64,
        -900.0..900.0f64,
        -900.0..900.0f64,
        0.0..1.0f64,
    )
        .prop_map(|(lg, le, gx, gy, ex, ey, q)| DefectParameters {
            lambda_g: lg,
            lambda_e: le,
            jt_g: [gx, gy],
            jt_e: [ex, ey],
            quench_g: q,
            quench_e: 1.0 - q,
            ..DefectParameters::snv()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(m in (2usize..=8).prop_flat_map(hermitian)) {
        let dim = m.dim();
        let eig = hermitian_eigensystem(&m).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&m) < 1e-9 * m.frobenius_norm().max(1.0));
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        for a in 0..dim {
            for b in 0..dim {
                let dot: Complex64 = (0..dim).map(|i| eig.vectors[(i, a)].conj() * eig.vectors[(i, b)]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                prop_assert!((dot - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn two_by_two_closed_form(a in -10.0..10.0f64, c in -10.0..10.0f64, b in complex()) {
        let m = ComplexMatrix::from_rows(&[vec![Complex64::new(a, 0.0), b], vec![b.conj(), Complex64::new(c, 0.0)]]);
        let eig = hermitian_eigensystem(&m).unwrap();
        let r = (((a - c) / 2.0).powi(2) + b.norm_sqr()).sqrt();
        prop_assert!((eig.values[0] - ((a + c) / 2.0 - r)).abs() < 1e-12 * (1.0 + r));
        prop_assert!((eig.values[1] - ((a + c) / 2.0 + r)).abs() < 1e-12 * (1.0 + r));
    }

    #[test]
    fn kramers_pairs_and_splitting(p in strained(), excited in any::<bool>()) {
        let manifold = if excited { Manifold::Excited } else { Manifold::Ground };
        let sys = eigensystem_in_defect_frame(&p, manifold, [0.0; 3]).unwrap();
        let e = &sys.energies;
        let scale = e[3].abs().max(1.0);
        prop_assert!((e[1] - e[0]).abs() < 1e-9 * scale);
        prop_assert!((e[3] - e[2]).abs() < 1e-9 * scale);
        let c = p.manifold(manifold);
        let analytic = (c.lambda.powi(2) + 4.0 * (c.jt[0].powi(2) + c.jt[1].powi(2))).sqrt();
        prop_assert!((e[2] - e[0] - analytic).abs() < 1e-9 * analytic);
        prop_assert!(build_hamiltonian(&p, manifold, [0.0; 3]).trace().norm() < 1e-12);
    }

    #[test]
    fn jahn_teller_orientation_is_invisible_at_zero_field(p in strained(), angle in 0.0..6.3f64) {
        let rotate = |v: [f64; 2]| [v[0] * angle.cos() - v[1] * angle.sin(), v[0] * angle.sin() + v[1] * angle.cos()];
        let q = DefectParameters { jt_g: rotate(p.jt_g), jt_e: rotate(p.jt_e), ..p };
        for m in [Manifold::Ground, Manifold::Excited] {
            let a = eigensystem_in_defect_frame(&p, m, [0.0; 3]).unwrap().energies;
            let b = eigensystem_in_defect_frame(&q, m, [0.0; 3]).unwrap().energies;
            for k in 0..4 {
                prop_assert!((a[k] - b[k]).abs() < 1e-9 * a[3].abs().max(1.0));
            }
        }
    }

    #[test]
    fn frame_change_preserves_norm_and_angle(b in vector3(10.0), axis in vector3(1.0)) {
        let axis_norm = axis.iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assume!(axis_norm > 1e-3);
        let out = lab_to_defect_frame(b, axis).unwrap();
        let norm = |v: [f64; 3]| v.iter().map(|c| c * c).sum::<f64>().sqrt();
        prop_assert!((norm(out) - norm(b)).abs() < 1e-12 * (1.0 + norm(b)));
        prop_assert_eq!(out[1], 0.0);
        let along = b.iter().zip(&axis).map(|(x, y)| x * y).sum::<f64>() / axis_norm;
        prop_assert!((out[2] - along).abs() < 1e-12 * (1.0 + norm(b)));
    }

    #[test]
    fn sum_rule_and_gauge_invariance(p in strained(), b in vector3(9.0), c in 0.0..2.0f64, phase in 0.0..6.3f64) {
        let field = FieldConfig::new(b, AXIS_111);
        let b_def = field.defect_frame().unwrap();
        let gs = eigensystem_in_defect_frame(&p, Manifold::Ground, b_def).unwrap();
        let es = eigensystem_in_defect_frame(&p, Manifold::Excited, b_def).unwrap();
        let lines = transition_table_with(&gs, &es, 4.0, c).unwrap();
        for from in ["A", "B", "C", "D"] {
            let total: f64 = lines.iter().filter(|l| l.from_label == from).map(|l| l.intensity).sum();
            prop_assert!((total - (2.0 + c * c)).abs() < 1e-9);
        }
        let weights: f64 = thermal_weights(&es.energies, 4.0).iter().sum();
        prop_assert!((weights - 1.0).abs() < 1e-12);

        let rotor = Complex64::from_polar(1.0, phase);
        let mut es2 = es.clone();
        es2.states[1].iter_mut().for_each(|z| *z *= rotor);
        let mut gs2 = gs.clone();
        gs2.states[2].iter_mut().for_each(|z| *z *= rotor.conj());
        let rephased = transition_table_with(&gs2, &es2, 4.0, c).unwrap();
        for (x, y) in lines.iter().zip(&rephased) {
            prop_assert!((x.intensity - y.intensity).abs() < 1e-12);
        }
    }

    #[test]
    fn rate_models_conserve_population(rates in proptest::collection::vec(0.0..0.5f64, 12), init in proptest::collection::vec(0.0..1.0f64, 4)) {
        let total: f64 = init.iter().sum();
        prop_assume!(total > 1e-3);
        let init: Vec<f64> = init.iter().map(|p| p / total).collect();
        let mut transitions = Vec::new();
        let mut k = 0;
        for from in 0..4 {
            for to in 0..4 {
                if from != to {
                    transitions.push((from, to, rates[k]));
                    k += 1;
                }
            }
        }
        let labels = ["1", "2", "A", "B"].map(String::from).to_vec();
        let model = RateModel::from_transitions(labels, &transitions, vec![0.0, 0.0, 0.2, 0.2]).unwrap();
        let result = pumping_trace(&model, &init, 50.0, "A1").unwrap();
        prop_assert!(result.population_drift() < 1e-9);
        let min = result.populations.states.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(min >= -1e-12);
    }

    #[test]
    fn nlls_history_never_increases(a in 0.5..3.0f64, k in 0.1..2.0f64, start in 0.2..5.0f64) {
        let data: Vec<DataPoint> = (0..30).map(|i| {
            let x = 0.1 * i as f64;
            DataPoint::new(x, a * (-k * x).exp() + 0.01 * ((i * 7919) % 13) as f64 / 13.0)
        }).collect();
        let fit = nlls_fit(|p, x| p[0] * (-p[1] * x).exp(), &[1.0, start], &data, None, &LsqOptions::default()).unwrap();
        prop_assert!(fit.residual_history.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(fit.iterations <= LsqOptions::default().max_iterations);
        prop_assert!(fit.std_errors.iter().all(|e| *e >= 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lorentzian_fit_is_translation_and_scale_equivariant(shift in -50.0..50.0f64, scale in 0.2..5.0f64) {
        let base: Vec<f64> = (0..=200).map(|k| k as f64).collect();
        let y: Vec<f64> = base.iter().map(|&x| peak_lorentzian(x, 80.0, 12.0, 1.0) + peak_lorentzian(x, 130.0, 20.0, 0.6) + 0.1).collect();
        let reference = fit_lorentzian_multi(&DataSeries::new(base.clone(), y.clone()).unwrap(), 2, None).unwrap();
        let moved: Vec<f64> = base.iter().map(|x| x * scale + shift).collect();
        let fit = fit_lorentzian_multi(&DataSeries::new(moved, y).unwrap(), 2, None).unwrap();
        for peak in 0..2 {
            let (c0, w0) = (reference.params[3 * peak], reference.params[3 * peak + 1]);
            prop_assert!((fit.params[3 * peak] - (c0 * scale + shift)).abs() < 1e-6 * (1.0 + c0 * scale));
            prop_assert!((fit.params[3 * peak + 1] / (w0 * scale) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn decay_fit_round_trip(amplitude in 0.5..2.0f64, tau in 1.0..10.0f64, floor in 0.0..0.5f64) {
        let x: Vec<f64> = (0..300).map(|k| 0.1 * k as f64).collect();
        let y = x.iter().map(|t| amplitude * (-t / tau).exp() + floor).collect();
        let fit = fit_exponential_decay(&DataSeries::new(x, y).unwrap(), true).unwrap();
        prop_assert!((fit.params[0] / amplitude - 1.0).abs() < 1e-6);
        prop_assert!((fit.params[1] / tau - 1.0).abs() < 1e-6);
        prop_assert!((fit.params[2] - floor).abs() < 1e-6 * (1.0 + floor));
    }

    #[test]
    fn t1_fit_round_trip(gamma0 in 1e3..1e5f64, delta in 600.0..1100.0f64) {
        let temps = [3.25, 4.0, 5.0, 6.0];
        let t1: Vec<f64> = temps.iter().map(|&t| t1_phonon_model(t, delta, gamma0)).collect();
        let fit = fit_t1_vs_temperature(&DataSeries::new(temps.to_vec(), t1).unwrap(), ActivationEnergy::Free(delta * 1.05)).unwrap();
        prop_assert!((fit.gamma0() / gamma0 - 1.0).abs() < 1e-6);
        prop_assert!((fit.delta_ghz() / delta - 1.0).abs() < 1e-6);
    }

    #[test]
    fn peak_fit_round_trip(center in -20.0..20.0f64, fwhm in 5.0..40.0f64, amplitude in 0.2..5.0f64) {
        let x: Vec<f64> = (-150..=150).map(f64::from).collect();
        let y = x.iter().map(|&v| peak_lorentzian(v, center, fwhm, amplitude) + 0.3).collect();
        let fit = fit_lorentzian_multi(&DataSeries::new(x, y).unwrap(), 1, None).unwrap();
        prop_assert!((fit.params[0] - center).abs() < 1e-6 * (1.0 + center.abs()));
        prop_assert!((fit.params[1] / fwhm - 1.0).abs() < 1e-6);
        prop_assert!((fit.params[2] / amplitude - 1.0).abs() < 1e-6);
    }

    #[test]
    fn reported_residual_is_reproducible(amplitude in 0.5..2.0f64, tau in 1.0..10.0f64) {
        let x: Vec<f64> = (0..100).map(|k| 0.2 * k as f64).collect();
        let y: Vec<f64> = x.iter().enumerate().map(|(k, t)| amplitude * (-t / tau).exp() + 0.01 * ((k * 31) % 7) as f64).collect();
        let fit = fit_exponential_decay(&DataSeries::new(x.clone(), y.clone()).unwrap(), true).unwrap();
        let p = &fit.params;
        let recomputed = x.iter().zip(&y).map(|(t, v)| (p[0] * (-t / p[1]).exp() + p[2] - v).powi(2)).sum::<f64>().sqrt();
        prop_assert!((recomputed - fit.residual_norm).abs() <= 1e-10 * fit.residual_norm.max(1e-300));
    }
}
