//! Invariant checks over seeded random circuits and closed-form cases.

use std::f64::consts::PI;

use crate::dynamics::{evolve, Engine, EvolveSpec, TimeUnit};
use crate::ep::{find_degeneracies_1d, DegeneracyKind, EpOptions};
use crate::fuzz::circuit_at;
use crate::model::{derive_effective_model, EffectiveModel};
use crate::nonreciprocity::directional_coupling;
use crate::oracle::offdiag_identity_residual;
use crate::params::{CircuitParams, Scenario};
use crate::spectrum::{direct_eigenvalues, eigenmodes};
use crate::sweep::{Axis, SweepSpec};
use crate::Execution;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Measured worst case.
    pub value: f64,
    pub bound: f64,
    pub detail: String,
}

impl Check {
    fn bounded(name: &'static str, value: f64, bound: f64, detail: impl Into<String>) -> Self {
        Check {
            name,
            passed: value <= bound,
            value,
            bound,
            detail: detail.into(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {:e} (bound {:e}) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.bound,
            self.detail
        )
    }
}

/// Worst value over `draws` seeded circuits; non-finite or failed draws
/// count as infinitely bad.
fn worst(seed: u64, draws: usize, exec: Execution, f: impl Fn(&CircuitParams) -> Option<f64> + Sync) -> (f64, usize) {
    let vals = exec.map(draws, |k| f(&circuit_at(seed, k)).filter(|v| v.is_finite()));
    let mut w = 0.0_f64;
    let mut arg = 0;
    for (k, v) in vals.into_iter().enumerate() {
        let v = v.unwrap_or(f64::INFINITY);
        if v > w {
            w = v;
            arg = k;
        }
    }
    (w, arg)
}

fn elimination_identity(seed: u64, draws: usize, exec: Execution) -> Check {
    let (w, k) = worst(seed, draws, exec, |p| offdiag_identity_residual(p).ok());
    Check::bounded("elimination_identity", w, 1e-12, format!("{draws} draws, worst #{k}"))
}

fn nonreciprocity_identity(seed: u64, draws: usize, exec: Execution) -> Check {
    let (w, k) = worst(seed, draws, exec, |p| {
        let m = derive_effective_model(p).ok()?;
        let d = directional_coupling(&m);
        let lhs = d.g_fwd.norm_sqr() - d.g_bwd.norm_sqr();
        let rhs = -4.0 * m.g_e * m.omega_n * m.delta_theta.sin();
        let scale = d.g_fwd.norm_sqr() + d.g_bwd.norm_sqr();
        Some(if scale == 0.0 { lhs.abs() } else { (lhs - rhs).abs() / scale })
    });
    Check::bounded("nonreciprocity_identity", w, 1e-12, format!("{draws} draws, worst #{k}"))
}

fn closed_form_eigenvalues(seed: u64, draws: usize, exec: Execution) -> Check {
    let (w, k) = worst(seed, draws, exec, |p| {
        let m = derive_effective_model(p).ok()?;
        let sp = eigenmodes(&m).ok()?;
        let mut d = direct_eigenvalues(&m.h_non);
        let mut c = [sp.omega_plus, sp.omega_minus];
        let key = |z: &crate::C64| (z.re, z.im);
        d.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        c.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        let scale = m.h_non.norm().max(1.0);
        Some(((d[0] - c[0]).norm().max((d[1] - c[1]).norm())) / scale)
    });
    Check::bounded("closed_form_eigenvalues", w, 1e-10, format!("{draws} draws, worst #{k}"))
}

fn label_swap_symmetry(seed: u64, draws: usize, exec: Execution) -> Check {
    let (w, k) = worst(seed, draws, exec, |p| {
        let a = eigenmodes(&derive_effective_model(p).ok()?).ok()?;
        let b = eigenmodes(&derive_effective_model(&p.swapped()).ok()?).ok()?;
        let scale = a.omega_plus.norm().max(1.0);
        let tr = (a.omega_plus + a.omega_minus - b.omega_plus - b.omega_minus).norm();
        let det = (a.omega_plus * a.omega_minus - b.omega_plus * b.omega_minus).norm() / scale;
        Some(tr.max(det) / scale)
    });
    Check::bounded("label_swap_symmetry", w, 1e-12, format!("{draws} draws, worst #{k}"))
}

fn symmetric_exceptional_points() -> Check {
    let p = CircuitParams {
        omega_q: [4500.0, 4500.0],
        gamma_q: [1.0, 1.0],
        g_qc: [30.0, 30.0],
        ..CircuitParams::fig2()
    };
    let sc = Scenario::new(p).with_delta_theta(PI / 2.0);
    let expected = 121.0 / 65.0;
    let axis = SweepSpec::linspace(Axis::GE, -3.0, 3.0, 601);
    let value = match find_degeneracies_1d(&sc, &axis, &EpOptions::default()) {
        Ok(loci) => {
            let eps: Vec<f64> = loci
                .iter()
                .filter(|l| l.kind == DegeneracyKind::ExceptionalPoint)
                .map(|l| l.location[0])
                .collect();
            if eps.len() == 2 {
                (eps[0] + expected).abs().max((eps[1] - expected).abs())
            } else {
                f64::INFINITY
            }
        }
        Err(_) => f64::INFINITY,
    };
    Check::bounded("symmetric_exceptional_points", value, 1e-6, "g_e = +-lambda^2/gamma_a")
}

fn rabi_oracle() -> Check {
    let g = 0.8;
    let m = EffectiveModel::from_parts([20.0, 20.0], [0.0, 0.0], g, 0.0, 0.0);
    let mut w = 0.0_f64;
    for engine in [Engine::Exact, Engine::Rk4 { substeps: None }] {
        let spec = EvolveSpec {
            t_max: 10.0,
            n_steps: 200,
            engine,
            time_unit: TimeUnit::Raw,
            ..EvolveSpec::default()
        };
        match evolve(&m, &spec) {
            Ok(traj) => {
                for s in &traj {
                    w = w.max((s.p1 - (g * s.t).cos().powi(2)).abs());
                }
            }
            Err(_) => w = f64::INFINITY,
        }
    }
    Check::bounded("hermitian_rabi", w, 1e-8, "p1 = cos^2(g_e t), both engines")
}

fn trajectory_invariants(seed: u64, draws: usize, exec: Execution) -> Check {
    let spec = EvolveSpec {
        t_max: 5.0,
        n_steps: 100,
        ..EvolveSpec::default()
    };
    let bad = exec.map(draws, |k| {
        let Ok(m) = derive_effective_model(&circuit_at(seed, k)) else {
            return 1usize;
        };
        if m.omega_n == 0.0 {
            return 0;
        }
        match evolve(&m, &spec) {
            Ok(t) => t.iter().filter(|s| s.check_invariants().is_err()).count().min(1),
            Err(_) => 1,
        }
    });
    let n_bad: usize = bad.into_iter().sum();
    Check::bounded(
        "trajectory_invariants",
        n_bad as f64,
        0.0,
        format!("{draws} draws, failing trajectories"),
    )
}

/// Run every check. `draws` random circuits feed the identity checks.
pub fn run_selftest(seed: u64, draws: usize, exec: Execution) -> Vec<Check> {
    let traj_draws = (draws / 50).max(10);
    vec![
        elimination_identity(seed, draws, exec),
        nonreciprocity_identity(seed, draws, exec),
        closed_form_eigenvalues(seed, draws, exec),
        label_swap_symmetry(seed, draws, exec),
        symmetric_exceptional_points(),
        rabi_oracle(),
        trajectory_invariants(seed, traj_draws, exec),
    ]
}
