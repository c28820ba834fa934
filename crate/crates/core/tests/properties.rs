use num_complex::Complex64;
use proptest::prelude::*;

use xxring::entanglement::wootters_lambdas;
use xxring::linalg::{hermitian_eigen, psd_sqrt, ComplexMatrix};
use xxring::{concurrence_general, concurrence_pair, concurrence_x, ModelParams, Pair, ThermalParams, XElements};

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |raw| {
        let data: Vec<Complex64> = raw.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        let a = ComplexMatrix::from_vec(n, n, data).unwrap();
        a.hermitian_part()
    })
}

fn sized_hermitian() -> impl Strategy<Value = ComplexMatrix> {
    (1usize..=16).prop_flat_map(hermitian)
}

fn general(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |raw| {
        let data = raw.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        ComplexMatrix::from_vec(n, n, data).unwrap()
    })
}

/// A valid X state: non-negative populations and a coherence within `√(w1·w2)`.
fn x_state() -> impl Strategy<Value = XElements> {
    (1e-3f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, -1.0f64..1.0).prop_map(|(u, v, w1, w2, s)| {
        let z = u + v + w1 + w2;
        XElements { u, v, w1, w2, y: s * (w1 * w2).sqrt(), z }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigen_reconstructs(m in sized_hermitian()) {
        let e = hermitian_eigen(&m).unwrap();
        let scale = m.max_abs().max(1.0);
        prop_assert!(e.reconstruct().max_abs_diff(&m) < 1e-10 * scale);
        let v = ComplexMatrix::from_columns(&(0..m.rows()).map(|k| e.vector(k)).collect::<Vec<_>>()).unwrap();
        let gram = &v.adjoint() * &v;
        prop_assert!(gram.max_abs_diff(&ComplexMatrix::identity(m.rows())) < 1e-10);
        let sum: f64 = e.values.iter().sum();
        prop_assert!((sum - m.trace().re).abs() < 1e-10 * scale * m.rows() as f64);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn psd_sqrt_squares_back(a in (1usize..=8).prop_flat_map(general)) {
        let m = (&a.adjoint() * &a).hermitian_part();
        let s = psd_sqrt(&m).unwrap();
        prop_assert!(s.hermiticity_deviation() < 1e-12);
        let scale = m.max_abs().max(1.0);
        prop_assert!((&s * &s).max_abs_diff(&m) < 1e-9 * scale);
    }

    #[test]
    fn concurrence_bounded_and_even_in_field(
        j in prop::sample::select(vec![1.0, -1.0]),
        b in -20.0f64..20.0,
        tau in 0.01f64..5.0,
        pair in prop::sample::select(Pair::ALL.to_vec()),
    ) {
        let tp = ThermalParams::new(tau).unwrap();
        let c = concurrence_pair(&ModelParams::new(j, b).unwrap(), &tp, pair).unwrap();
        let c_neg = concurrence_pair(&ModelParams::new(j, -b).unwrap(), &tp, pair).unwrap();
        prop_assert!(c.is_finite() && (0.0..=1.0).contains(&c));
        prop_assert!((c - c_neg).abs() < 1e-12);
    }

    #[test]
    fn x_state_routes_agree(e in x_state()) {
        let rho = e.density_matrix();
        let closed = concurrence_x(&e).unwrap();
        let general = concurrence_general(&rho).unwrap();
        prop_assert!((closed - general).abs() < 1e-9, "{} vs {}", closed, general);

        let lambdas = wootters_lambdas(&rho).unwrap();
        let (u, v, w1, w2, y) = (e.u / e.z, e.v / e.z, e.w1 / e.z, e.w2 / e.z, e.y / e.z);
        let mut expected = [
            (w1 * w2).sqrt() + y.abs(),
            ((w1 * w2).sqrt() - y.abs()).abs(),
            (u * v).sqrt(),
            (u * v).sqrt(),
        ];
        expected.sort_by(|a, b| b.total_cmp(a));
        for (l, x) in lambdas.iter().zip(expected) {
            prop_assert!((l - x).abs() < 1e-8, "{:?} vs {:?}", lambdas, expected);
        }
    }
}
