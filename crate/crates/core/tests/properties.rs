use dissipon::field::{self, FieldGrid, ModeAmplitudes};
use dissipon::oscillator::{self, OscillatorParams};
use dissipon::par::{self, Exec};
use dissipon::quadrature::{integrate_interval, QuadratureConfig};
use dissipon::reservoir::{self, CouplingFunction};
use dissipon::tls::{self, CoherenceModel};
use dissipon::{Complex64, Vector3};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrature_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, w in 0.1f64..5.0) {
        let cfg = QuadratureConfig::default().with_tolerances(1e-13, 1e-12);
        let f = |x: f64| (w * x).sin();
        let g = |x: f64| (-x * x).exp();
        let lhs = integrate_interval(|x| a * f(x) + b * g(x), 0.0, 2.0, &cfg).unwrap().value;
        let rhs = a * integrate_interval(f, 0.0, 2.0, &cfg).unwrap().value + b * integrate_interval(g, 0.0, 2.0, &cfg).unwrap().value;
        prop_assert!((lhs - rhs).abs() < 1e-11 * (1.0 + lhs.abs()));
    }

    #[test]
    fn stimulated_minus_absorbed_is_one(x in 1e-6f64..60.0) {
        let n = reservoir::bose_einstein(x);
        let n1 = reservoir::bose_einstein_plus_one(x);
        prop_assert!((n1 - n - 1.0).abs() < 1e-12 * n1.max(1.0));
        prop_assert!(n >= 0.0);
    }

    #[test]
    fn modes_survive_the_field_round_trip(seed in any::<u64>()) {
        let g = FieldGrid::new(8, 16, 0.4).unwrap();
        let n = g.modes().len();
        let mut s = seed | 1;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let a = ModeAmplitudes::from_values(&g, (0..n).map(|_| Complex64::new(next(), next())).collect()).unwrap();
        let f = field::field_from_modes(&a, &g, Exec::Serial).unwrap();
        let back = field::modes_from_fields(&f, &g, Exec::Parallel).unwrap();
        let err = a.values.iter().zip(&back.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12, "{err}");
        prop_assert!(field::hamiltonian_identity_check(&a, &g, Exec::Serial).unwrap().relative() < 1e-12);
    }

    #[test]
    fn deterministic_reductions(n in 0usize..20_000, w in 0.01f64..3.0) {
        let f = |i: usize| (i as f64 * w).sin() / (1.0 + i as f64);
        prop_assert_eq!(par::sum_range(Exec::Serial, n, f).to_bits(), par::sum_range(Exec::Parallel, n, f).to_bits());
    }

    #[test]
    fn kernel_peaks_at_zero_lag(t in 0.0f64..20.0, lambda in 5.0f64..200.0) {
        let c = CouplingFunction::canonical(0.2).unwrap().with_uv_cutoff(lambda);
        let cfg = QuadratureConfig::default();
        let g0 = reservoir::memory_kernel(&c, 0.0, &cfg).unwrap();
        let g = reservoir::memory_kernel(&c, t, &cfg).unwrap();
        prop_assert!(g.abs() <= g0 * (1.0 + 1e-14));
    }

    #[test]
    fn damped_mean_never_gains_energy(beta in 0.01f64..1.5, x in -2.0f64..2.0, p in -2.0f64..2.0) {
        let op = OscillatorParams::new(1.0, 1.0, beta).unwrap();
        let tr = oscillator::sample_mean_trajectory(&op, Vector3::new(x, 0.0, 0.0), Vector3::new(p, 0.0, 0.0), 0.05, 400).unwrap();
        let e: Vec<f64> = tr.x.iter().zip(&tr.v).map(|(x, v)| 0.5 * v.norm_squared() + 0.5 * x.norm_squared()).collect();
        prop_assert!(e.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-15));
    }

    #[test]
    fn population_stays_in_range(mu in 1e-3f64..0.5, sz0 in -1.0f64..1.0) {
        let model = CoherenceModel::new(mu, 1.0, 1.0);
        let h = tls::evolve_bloch_markov(&model, dissipon::tls::BlochState::new(sz0, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)).unwrap(), 0.05, 2000, 100).unwrap();
        prop_assert!(h.states.iter().all(|s| s.sz >= -1.0 && s.sz <= sz0.max(-1.0) + 1e-15));
    }
}
