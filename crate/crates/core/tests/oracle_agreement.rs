use cvtelefi_core::fock::{chi12_numeric, cm_numeric, fidelity_numeric, QuadratureScheme, ORACLE_TAIL_EPS};
use cvtelefi_core::nongauss::non_gaussianity_from_cm;
use cvtelefi_core::resource::fock_coefficients_truncated;
use cvtelefi_core::{chi12, covariance_matrix, fidelity_general, fock_coefficients, FockState, SubtractionSpec};
use num_complex::Complex64;

const ORACLE_LAMS: [f64; 8] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];

fn spec(m: u32, n: u32, lam: f64) -> SubtractionSpec {
    SubtractionSpec::new(m, n, lam).unwrap()
}

fn oracle_state(s: &SubtractionSpec) -> FockState {
    fock_coefficients(s, ORACLE_TAIL_EPS).unwrap()
}

fn oracle(s: &SubtractionSpec, mu: Complex64) -> f64 {
    let st = oracle_state(s);
    fidelity_numeric(&st, mu, &QuadratureScheme::for_orders(s.m(), s.n())).unwrap()
}

#[test]
fn oracle_matches_engine() {
    for m in 0..=3 {
        for n in 0..=3 {
            for lam in ORACLE_LAMS {
                let s = spec(m, n, lam);
                let e = fidelity_general(&s).unwrap();
                let o = oracle(&s, Complex64::new(0.0, 0.0));
                assert!((e - o).abs() < 1e-8, "({m},{n}) lam={lam}: engine {e} oracle {o}");
            }
        }
    }
}

#[test]
fn oracle_is_independent_of_the_input_amplitude() {
    let mus = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(1.0, 2.0),
        Complex64::new(0.0, -3.0),
    ];
    for (m, n) in [(0, 0), (0, 1), (1, 1), (2, 2), (1, 3)] {
        let s = spec(m, n, 0.5);
        let values: Vec<f64> = mus.iter().map(|&mu| oracle(&s, mu)).collect();
        let spread = values.iter().cloned().fold(f64::MIN, f64::max) - values.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-8, "({m},{n}): {values:?}");
    }
}

#[test]
fn truncation_has_converged() {
    for (m, n) in [(0, 0), (1, 2), (3, 3)] {
        for lam in [0.3, 0.6, 0.8] {
            let s = spec(m, n, lam);
            let k = oracle_state(&s).truncation();
            let scheme = QuadratureScheme::for_orders(m, n);
            let mu = Complex64::new(0.0, 0.0);
            let a = fidelity_numeric(&fock_coefficients_truncated(&s, k).unwrap(), mu, &scheme).unwrap();
            let b = fidelity_numeric(&fock_coefficients_truncated(&s, k + 20).unwrap(), mu, &scheme).unwrap();
            assert!((a - b).abs() < 1e-9, "({m},{n}) lam={lam}");
        }
    }
}

#[test]
fn characteristic_functions_agree() {
    let s = spec(1, 1, 0.5);
    let st = oracle_state(&s);
    for i in 0..20 {
        let t = i as f64;
        let a = Complex64::from_polar(0.15 * t, 0.7 * t);
        let b = Complex64::from_polar(2.5 - 0.1 * t, -1.3 * t + 0.4);
        let e = chi12(&s, a, b);
        let o = chi12_numeric(&st, a, b);
        assert!((e - o).norm() < 1e-9, "point {i}: engine {e} oracle {o}");
    }
    for (m, n) in [(0, 2), (3, 1)] {
        let s = spec(m, n, 0.7);
        let st = oracle_state(&s);
        let (a, b) = (Complex64::new(0.4, -0.9), Complex64::new(-0.2, 0.5));
        assert!((chi12(&s, a, b) - chi12_numeric(&st, a, b)).norm() < 1e-9);
    }
}

#[test]
fn covariance_paths_agree() {
    for m in 0..=4 {
        for n in 0..=4 {
            for lam in [0.1, 0.3, 0.5, 0.7, 0.8] {
                let s = spec(m, n, lam);
                let closed = covariance_matrix(&s);
                let numeric = cm_numeric(&oracle_state(&s)).unwrap();
                assert!(closed.max_abs_diff(&numeric) < 1e-8, "({m},{n}) lam={lam}");
                let d1 = non_gaussianity_from_cm(&closed).unwrap();
                let d2 = non_gaussianity_from_cm(&numeric).unwrap();
                assert!((d1 - d2).abs() < 1e-6, "({m},{n}) lam={lam}: {d1} vs {d2}");
            }
        }
    }
}
