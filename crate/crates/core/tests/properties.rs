use std::f64::consts::PI;

use nhcoupler::config::{parse_config, CircuitConfig, RunConfig};
use nhcoupler::dynamics::{propagator, Eigenbasis};
use nhcoupler::ep::DegeneracyKind;
use nhcoupler::fuzz::circuit_at;
use nhcoupler::model::derive_effective_model;
use nhcoupler::nonreciprocity::directional_coupling;
use nhcoupler::output::format_num;
use nhcoupler::spectrum::{direct_eigenvalues, discriminant, eigenmodes, scan_2d};
use nhcoupler::{Axis, CircuitParams, EffectiveModel, Execution, Scenario, SweepSpec, C64};
use proptest::prelude::*;

fn model() -> impl Strategy<Value = EffectiveModel> {
    (
        prop::array::uniform2(-50.0..50.0f64),
        prop::array::uniform2(-5.0..5.0f64),
        -5.0..5.0f64,
        0.0..5.0f64,
        -PI..PI,
    )
        .prop_map(|(dp, gm, g, om, dt)| EffectiveModel::from_parts(dp, gm, g, om, dt))
}

fn circuit() -> impl Strategy<Value = CircuitParams> {
    (any::<u64>(), 0usize..64).prop_map(|(s, k)| circuit_at(s, k))
}

fn sorted(mut v: [C64; 2]) -> [C64; 2] {
    v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn closed_form_matches_trace_and_determinant(m in model()) {
        let sp = eigenmodes(&m).unwrap();
        let h = m.h_non;
        let scale = h.norm().max(1.0);
        prop_assert!((sp.omega_plus + sp.omega_minus - h.trace()).norm() <= 1e-12 * scale);
        prop_assert!((sp.omega_plus * sp.omega_minus - h.det()).norm() <= 1e-10 * scale * scale);
        let d = sorted(direct_eigenvalues(&h));
        let c = sorted([sp.omega_plus, sp.omega_minus]);
        prop_assert!((d[0] - c[0]).norm() <= 1e-6 * scale && (d[1] - c[1]).norm() <= 1e-6 * scale);
    }

    #[test]
    fn splitting_squares_to_discriminant(m in model()) {
        let sp = eigenmodes(&m).unwrap();
        let (r, i) = discriminant(&m);
        let gap = sp.omega_plus - sp.omega_minus;
        let lhs = gap * gap;
        let tol = 1e-10 * (r.abs() + i.abs()).max(1.0);
        prop_assert!((lhs - C64::new(r, i)).norm() <= tol, "{lhs} vs {r} + {i}i");
        prop_assert!((sp.delta_e - 2.0 * gap.re).abs() <= 1e-9 * gap.norm().max(1.0));
    }

    #[test]
    fn eigenvectors_are_unit_and_satisfy_the_eigen_equation(m in model()) {
        let sp = eigenmodes(&m).unwrap();
        for (w, v) in [(sp.omega_plus, sp.eigvecs[0]), (sp.omega_minus, sp.eigvecs[1])] {
            let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            prop_assert!((n - 1.0).abs() < 1e-12);
            let hv = m.h_non.mul_vec(v);
            let res = ((hv[0] - w * v[0]).norm_sqr() + (hv[1] - w * v[1]).norm_sqr()).sqrt();
            prop_assert!(res <= 1e-10 * m.h_non.norm().max(1.0));
        }
    }

    #[test]
    fn classification_is_total_on_the_i_zero_set(r in -1e3..1e3f64, i in -1e-3..1e-3f64) {
        let tol = 1e-9;
        let k = DegeneracyKind::classify(r, i, tol);
        prop_assert_eq!(k.is_some(), i.abs() <= tol);
        if let Some(k) = k {
            prop_assert_eq!(k == DegeneracyKind::ExceptionalPoint, r.abs() < tol);
        }
    }

    #[test]
    fn label_swap_preserves_the_spectrum(p in circuit()) {
        let a = eigenmodes(&derive_effective_model(&p).unwrap()).unwrap();
        let b = eigenmodes(&derive_effective_model(&p.swapped()).unwrap()).unwrap();
        let s = a.omega_plus.norm().max(1.0);
        prop_assert!((a.omega_plus + a.omega_minus - b.omega_plus - b.omega_minus).norm() <= 1e-12 * s);
        prop_assert!((a.omega_plus * a.omega_minus - b.omega_plus * b.omega_minus).norm() <= 1e-12 * s * s);
    }

    #[test]
    fn frequencies_scale_linearly(p in circuit(), s in 0.1..10.0f64) {
        let a = derive_effective_model(&p).unwrap();
        let b = derive_effective_model(&p.scaled(s)).unwrap();
        prop_assert!((b.g_e - s * a.g_e).abs() <= 1e-12 * s * a.g_e.abs().max(1.0));
        prop_assert!((b.omega_n - s * a.omega_n).abs() <= 1e-12 * s * a.omega_n.max(1.0));
        prop_assert!(b.h_non.max_abs_diff(&(a.h_non * s)) <= 1e-11 * s * a.h_non.norm().max(1.0));
    }

    #[test]
    fn directional_couplings_obey_the_gain_identity(m in model()) {
        let d = directional_coupling(&m);
        let lhs = d.g_fwd.norm_sqr() - d.g_bwd.norm_sqr();
        let rhs = -4.0 * m.g_e * m.omega_n * m.delta_theta.sin();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (d.g_fwd.norm_sqr() + d.g_bwd.norm_sqr()).max(1.0));
    }

    #[test]
    fn phase_flip_inverts_the_ratio(m in model()) {
        let a = directional_coupling(&m);
        let b = directional_coupling(&m.with_delta_theta(-m.delta_theta));
        prop_assert!((a.log10_ratio() + b.log10_ratio()).abs() <= 1e-9);
    }

    #[test]
    fn propagator_is_a_semigroup(m in model(), t1 in 0.0..2.0f64, t2 in 0.0..2.0f64) {
        let u12 = propagator(&m, t1 + t2);
        let u = propagator(&m, t2) * propagator(&m, t1);
        prop_assert!(u12.max_abs_diff(&u) <= 1e-9 * u12.norm().max(1.0));
        if let Some(eb) = Eigenbasis::of_model(&m) {
            prop_assert!(eb.propagator(0.0).max_abs_diff(&nhcoupler::Mat2::identity()) <= 1e-9);
        }
    }

    #[test]
    fn resolved_config_round_trips(p in circuit(), seed in 0..=i64::MAX as u64) {
        let cfg = RunConfig { circuit: CircuitConfig::from(p), seed, ..RunConfig::default() };
        let back = parse_config(&cfg.to_toml(), "echo", &[]).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn numbers_round_trip_through_text(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let y: f64 = format_num(x).parse().unwrap();
        prop_assert!(y == x || (x == 0.0 && y == 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn grids_do_not_depend_on_execution_policy(p in circuit()) {
        let sc = Scenario::new(p);
        let a1 = SweepSpec::linspace(Axis::GE, -3.0, 3.0, 17);
        let a2 = SweepSpec::delta_theta_pi(0.0, 1.0, 13);
        let s = scan_2d(&sc, &a1, &a2, Execution::Sequential).unwrap();
        let q = scan_2d(&sc, &a1, &a2, Execution::Parallel).unwrap();
        prop_assert_eq!(s.cells, q.cells);
    }
}
