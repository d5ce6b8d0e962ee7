//! Acceptance criteria, one PASS/FAIL line each. Tolerances are pinned here.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nhcoupler::config::RunConfig;
use nhcoupler::dynamics::{evolve_scenario, Engine, EvolveSpec, PopulationFeedback, TimeUnit};
use nhcoupler::ep::{
    damping_exchange, eigenvector_angle, find_degeneracies_1d, find_ep_2d, DegeneracyKind, DegeneracyLocus,
    EpOptions,
};
use nhcoupler::figures::{fig5_configs, fig7a_config, FIG7_G_E};
use nhcoupler::fuzz::circuit_at;
use nhcoupler::model::derive_effective_model;
use nhcoupler::nonreciprocity::{asymmetry_dynamics, directional_coupling, spectral_peak_share};
use nhcoupler::oracle::{compare_reduction, offdiag_identity_residual, DetuningConvention};
use nhcoupler::spectrum::{scan_2d, sweep_1d};
use nhcoupler::{Axis, CircuitParams, Execution, Scenario, SweepSpec};

const SEED: u64 = 20_240_601;
const FUZZ_DRAWS: usize = 10_000;

const EP_LOCATION_TOL: f64 = 1e-6;
const FIG2_THETA_WINDOW: f64 = 0.05;
const FIG2_GE_BAND: (f64, f64) = (0.8, 1.8);
const ELIMINATION_TOL: f64 = 1e-12;
const REDUCTION_FINAL_TOL: f64 = 0.05;
const ENGINE_TOL: f64 = 1e-8;
const RK4_HALVING_GAIN: f64 = 14.0;
const RABI_TOL: f64 = 1e-8;
const NONRECIP_TOL: f64 = 1e-12;
const ASYM_NUMERICAL_TOL: f64 = 1e-10;
const PEAK_SHARE_MIN: f64 = 0.5;
const EV_ANGLE_TOL: f64 = 1e-3;
const G_E_EXPECTED: f64 = 2.6968;
const G_E_TOL: f64 = 1e-4;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, budget: Option<f64>) -> bool {
    budget.is_none_or(|b| elapsed.as_secs_f64() < b)
}

fn symmetric_circuit() -> CircuitParams {
    CircuitParams {
        omega_q: [4500.0, 4500.0],
        gamma_q: [1.0, 1.0],
        g_qc: [30.0, 30.0],
        ..CircuitParams::fig2()
    }
}

fn symmetric_eps() -> (Scenario, SweepSpec, Vec<DegeneracyLocus>) {
    let sc = Scenario::new(symmetric_circuit()).with_delta_theta(PI / 2.0);
    let axis = SweepSpec::linspace(Axis::GE, -3.0, 3.0, 601);
    let loci = find_degeneracies_1d(&sc, &axis, &EpOptions::default()).unwrap_or_default();
    (sc, axis, loci)
}

fn c1_symmetric_ep() -> Outcome {
    let (sc, _, loci) = symmetric_eps();
    let m = derive_effective_model(&sc.circuit).unwrap();
    let expected = 11.0 * 11.0 / 65.0;
    let eps: Vec<f64> = loci
        .iter()
        .filter(|l| l.kind == DegeneracyKind::ExceptionalPoint)
        .map(|l| l.location[0])
        .collect();
    let symmetric = m.delta_prime[0] == m.delta_prime[1] && m.big_gamma[0] == m.big_gamma[1];
    let err = if eps.len() == 2 {
        (eps[0] + expected).abs().max((eps[1] - expected).abs())
    } else {
        f64::INFINITY
    };
    outcome(
        symmetric && err <= EP_LOCATION_TOL,
        format!("EPs at {eps:?}, expected +-{expected:.9} (+-1.86153), max error {err:.2e} <= {EP_LOCATION_TOL:e}"),
    )
}

fn c2_fig2_minima() -> Outcome {
    let sc = Scenario::new(CircuitParams::fig2());
    let a1 = SweepSpec::linspace(Axis::GE, -3.0, 3.0, 201);
    let a2 = SweepSpec::delta_theta_pi(0.0, 1.0, 201);
    let grid = match scan_2d(&sc, &a1, &a2, Execution::Parallel) {
        Ok(g) => g,
        Err(e) => return outcome(false, format!("scan failed: {e}")),
    };
    let (n1, n2) = grid.shape();
    let dg = |i: usize, j: usize| grid.get(i, j).map_or(f64::NAN, |p| p.delta_gamma);
    let mut minima = Vec::new();
    for i in 1..n1 - 1 {
        for j in 1..n2 - 1 {
            let c = dg(i, j);
            let strict = (0..3).all(|di| {
                (0..3).all(|dj| (di == 1 && dj == 1) || c < dg(i + di - 1, j + dj - 1))
            });
            if strict {
                minima.push(grid.coords(i, j));
            }
        }
    }
    let inside = |&(g, t): &(f64, f64)| {
        (t - PI / 2.0).abs() <= FIG2_THETA_WINDOW && (FIG2_GE_BAND.0..=FIG2_GE_BAND.1).contains(&g.abs())
    };
    let n_inside = minima.iter().filter(|m| inside(m)).count();
    outcome(
        !minima.is_empty() && n_inside == minima.len(),
        format!(
            "{} strict interior minima of dGq, {} inside |dtheta - pi/2| <= {FIG2_THETA_WINDOW}, |g_e| in {FIG2_GE_BAND:?}",
            minima.len(),
            n_inside
        ),
    )
}

fn c3_fig3_pattern() -> Outcome {
    let axis = SweepSpec::linspace(Axis::GE, -3.0, 3.0, 1201);
    let opts = EpOptions::default();
    let base = |dt_pi: f64| Scenario::new(CircuitParams::fig3()).with_delta_theta(dt_pi * PI);
    let min_de = sweep_1d(&base(0.5), &axis, Execution::Parallel)
        .iter()
        .filter_map(|p| p.as_ref().ok())
        .map(|p| p.delta_e.abs())
        .fold(f64::INFINITY, f64::min);
    let mut ok = min_de > opts.tol_disc;
    let mut detail = format!("0.500pi: min dEq = {min_de:.4e}");
    for dt in [0.501, 0.502] {
        let sc = base(dt);
        let loci = find_degeneracies_1d(&sc, &axis, &opts).unwrap_or_default();
        let levels: Vec<_> = loci
            .iter()
            .filter(|l| l.kind == DegeneracyKind::LevelDegeneracy)
            .collect();
        let exchanges = levels
            .iter()
            .filter(|l| damping_exchange(&sc, &axis, l.location[0], 1e-3).unwrap_or(false))
            .count();
        let kinds: Vec<String> = loci
            .iter()
            .map(|l| format!("{}@{:.4}", l.kind.name(), l.location[0]))
            .collect();
        ok &= !levels.is_empty() && exchanges == levels.len();
        detail += &format!(
            "; {dt}pi: {} level degeneracies ({} with damping exchange), all loci {kinds:?}",
            levels.len(),
            exchanges
        );
    }
    outcome(ok, detail)
}

fn c4_elimination_identity() -> Outcome {
    let worst = Execution::Parallel
        .map(FUZZ_DRAWS, |k| offdiag_identity_residual(&circuit_at(SEED, k)).unwrap_or(f64::INFINITY))
        .into_iter()
        .fold(0.0, f64::max);
    outcome(
        worst <= ELIMINATION_TOL,
        format!("{FUZZ_DRAWS} draws, worst residual {worst:.2e} <= {ELIMINATION_TOL:e}"),
    )
}

fn c5_reduction_convergence() -> Outcome {
    let schedule = [65.0, 130.0, 260.0, 520.0];
    match compare_reduction(
        &CircuitParams::fig2(),
        &schedule,
        DetuningConvention::Effective,
        Execution::Parallel,
    ) {
        Ok(r) => {
            let errs: Vec<f64> = r.iter().map(|x| x.rel_error).collect();
            let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
            let last = *errs.last().unwrap();
            outcome(
                decreasing && last <= REDUCTION_FINAL_TOL,
                format!("rel_error over gamma_a {schedule:?}: {errs:.4?}, last <= {REDUCTION_FINAL_TOL}"),
            )
        }
        Err(e) => outcome(false, format!("oracle failed: {e}")),
    }
}

fn trajectory_rho(sc: &Scenario, engine: Engine, n_steps: usize) -> Option<Vec<(f64, [[nhcoupler::C64; 2]; 2])>> {
    let spec = EvolveSpec {
        t_max: 20.0,
        n_steps,
        engine,
        ..EvolveSpec::default()
    };
    let ev = evolve_scenario(sc, &spec).ok()?;
    Some(
        ev.states()
            .map(|s| {
                let r = s.rho;
                (s.trace, [[r[(0, 0)], r[(0, 1)]], [r[(1, 0)], r[(1, 1)]]])
            })
            .collect(),
    )
}

/// Largest elementwise difference of `rho`, relative to the trace.
fn rho_distance(a: &[(f64, [[nhcoupler::C64; 2]; 2])], b: &[(f64, [[nhcoupler::C64; 2]; 2])]) -> f64 {
    a.iter()
        .zip(b)
        .map(|((ta, ra), (_, rb))| {
            let d = (0..2)
                .flat_map(|i| (0..2).map(move |j| (ra[i][j] - rb[i][j]).norm()))
                .fold(0.0, f64::max);
            d / ta.abs().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

fn c6_engines_agree() -> Outcome {
    let mut worst = 0.0_f64;
    let mut min_gain = f64::INFINITY;
    for (_, cfg) in fig5_configs(&RunConfig::default()) {
        let sc = cfg.scenario().unwrap();
        let (Some(exact), Some(rk4)) = (
            trajectory_rho(&sc, Engine::Exact, 400),
            trajectory_rho(&sc, Engine::Rk4 { substeps: None }, 400),
        ) else {
            return outcome(false, "evolution failed");
        };
        worst = worst.max(rho_distance(&exact, &rk4));
        let coarse_exact = trajectory_rho(&sc, Engine::Exact, 200).unwrap();
        let e1 = rho_distance(&coarse_exact, &trajectory_rho(&sc, Engine::Rk4 { substeps: Some(1) }, 200).unwrap());
        let e2 = rho_distance(&coarse_exact, &trajectory_rho(&sc, Engine::Rk4 { substeps: Some(2) }, 200).unwrap());
        min_gain = min_gain.min(e1 / e2);
    }
    outcome(
        worst <= ENGINE_TOL && min_gain >= RK4_HALVING_GAIN,
        format!(
            "8 Fig. 5 sets over Omega_n t in [0, 20]: max |rho_exact - rho_rk4| / tr = {worst:.2e} <= {ENGINE_TOL:e}; min error ratio on step halving {min_gain:.2} >= {RK4_HALVING_GAIN}"
        ),
    )
}

fn c7_rabi() -> Outcome {
    let g = 0.8;
    let p = CircuitParams {
        omega_q: [4500.0, 4500.0],
        gamma_q: [0.0, 0.0],
        g_qc: [30.0, 30.0],
        lambda_q: [0.0, 0.0],
        ..CircuitParams::fig2()
    };
    let sc = Scenario::new(p).with_g_e(g);
    let mut worst = 0.0_f64;
    for engine in [Engine::Exact, Engine::Rk4 { substeps: None }] {
        let spec = EvolveSpec {
            t_max: 10.0,
            n_steps: 500,
            engine,
            feedback: PopulationFeedback::Off,
            time_unit: TimeUnit::Raw,
            ..EvolveSpec::default()
        };
        match evolve_scenario(&sc, &spec) {
            Ok(ev) => {
                for r in ev.rows() {
                    worst = worst.max((r.p1 - (g * r.t).cos().powi(2)).abs());
                }
            }
            Err(e) => return outcome(false, format!("evolution failed: {e}")),
        }
    }
    outcome(
        worst <= RABI_TOL,
        format!("max |p1 - cos^2(g_e t)| = {worst:.2e} <= {RABI_TOL:e} (exact and RK4)"),
    )
}

fn c8_nonreciprocity() -> Outcome {
    let worst = Execution::Parallel
        .map(FUZZ_DRAWS, |k| {
            let Ok(m) = derive_effective_model(&circuit_at(SEED, k)) else {
                return f64::INFINITY;
            };
            let d = directional_coupling(&m);
            let lhs = d.g_fwd.norm_sqr() - d.g_bwd.norm_sqr();
            let rhs = -4.0 * m.g_e * m.omega_n * m.delta_theta.sin();
            let scale = d.g_fwd.norm_sqr() + d.g_bwd.norm_sqr();
            if scale == 0.0 {
                lhs.abs()
            } else {
                (lhs - rhs).abs() / scale
            }
        })
        .into_iter()
        .fold(0.0, f64::max);
    let sc = Scenario::new(CircuitParams::fig2()).with_delta_theta(PI / 2.0);
    let omega_n = sc.model().unwrap().omega_n;
    let at = directional_coupling(&sc.with_g_e(omega_n).model().unwrap());
    let uni = at.g_fwd.norm() / omega_n;
    outcome(
        worst <= NONRECIP_TOL && uni <= NONRECIP_TOL,
        format!(
            "{FUZZ_DRAWS} draws, worst relative identity error {worst:.2e}; |g_fwd|/Omega_n at the unidirectional point {uni:.2e}; both <= {NONRECIP_TOL:e}"
        ),
    )
}

fn c9_fig7_asymmetry() -> Outcome {
    let cfg = fig7a_config(&RunConfig::default());
    let sc = cfg.scenario().unwrap();
    let spec = cfg.evolve.to_spec().unwrap();
    let axis = SweepSpec::new(Axis::DeltaTheta, vec![PI / 2.0, 0.0]);
    let map = match asymmetry_dynamics(&sc.with_g_e(FIG7_G_E), &axis, &spec, Execution::Parallel) {
        Ok(m) => m,
        Err(e) => return outcome(false, format!("evolution failed: {e}")),
    };
    let peak = |v: &[f64]| v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let (a, b) = (peak(&map.values[0]), peak(&map.values[1]));
    let share = spectral_peak_share(&map.values[0]);
    outcome(
        a > 100.0 * ASYM_NUMERICAL_TOL && share >= PEAK_SHARE_MIN && b <= ASYM_NUMERICAL_TOL,
        format!(
            "pi/2: max |P2 - P1| = {a:.4e} (> {:e}), peak share {share:.3} (>= {PEAK_SHARE_MIN}); 0: max |P2 - P1| = {b:.2e} (<= {ASYM_NUMERICAL_TOL:e})",
            100.0 * ASYM_NUMERICAL_TOL
        ),
    )
}

fn c10_coalescence() -> Outcome {
    let mut angles = Vec::new();
    let (sc, axis, loci) = symmetric_eps();
    for l in loci.iter().filter(|l| l.kind == DegeneracyKind::ExceptionalPoint) {
        angles.push(eigenvector_angle(&sc, &[&axis], l).unwrap_or(f64::INFINITY));
    }
    let fig2 = Scenario::new(CircuitParams::fig2());
    let a1 = SweepSpec::linspace(Axis::GE, -3.0, 3.0, 201);
    let a2 = SweepSpec::delta_theta_pi(0.0, 1.0, 201);
    let eps2 = find_ep_2d(&fig2, &a1, &a2, &EpOptions::default(), Execution::Parallel).unwrap_or_default();
    for l in &eps2 {
        angles.push(eigenvector_angle(&fig2, &[&a1, &a2], l).unwrap_or(f64::INFINITY));
    }
    let worst = angles.iter().copied().fold(0.0, f64::max);
    outcome(
        !angles.is_empty() && worst <= EV_ANGLE_TOL,
        format!(
            "{} EPs (symmetric sweep and Fig. 2 plane), max eigenvector angle {worst:.2e} rad <= {EV_ANGLE_TOL:e}",
            angles.len()
        ),
    )
}

fn c11_g_e() -> Outcome {
    let g = derive_effective_model(&CircuitParams::fig2()).map_or(f64::NAN, |m| m.g_e);
    outcome(
        (g - G_E_EXPECTED).abs() <= G_E_TOL,
        format!("g_e = {g:.6} MHz, expected {G_E_EXPECTED} +- {G_E_TOL:e}"),
    )
}

type Criterion = (u32, &'static str, Option<f64>, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "symmetric-case EP closed form", Some(1.0), c1_symmetric_ep),
        (2, "Fig. 2 damping-difference minima", Some(10.0), c2_fig2_minima),
        (3, "Fig. 3 degeneracy pattern", None, c3_fig3_pattern),
        (4, "elimination identity", Some(5.0), c4_elimination_identity),
        (5, "reduction convergence", None, c5_reduction_convergence),
        (6, "dynamics engines agree", Some(5.0), c6_engines_agree),
        (7, "Hermitian Rabi oracle", None, c7_rabi),
        (8, "nonreciprocity identity", None, c8_nonreciprocity),
        (9, "Fig. 7 asymmetry", None, c9_fig7_asymmetry),
        (10, "eigenvector coalescence at EPs", None, c10_coalescence),
        (11, "g_e derivation", None, c11_g_e),
    ];
    let mut passed = 0;
    for (n, name, budget, f) in criteria {
        let t0 = Instant::now();
        let o = f();
        let dt = t0.elapsed();
        let ok = o.passed && within(dt, budget);
        passed += ok as usize;
        let budget = budget.map_or(String::new(), |b| format!(", budget {b} s"));
        println!(
            "{} [{n}] {name}: {} ({:.3} s{budget})",
            if ok { "PASS" } else { "FAIL" },
            o.detail,
            dt.as_secs_f64()
        );
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed == criteria.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
