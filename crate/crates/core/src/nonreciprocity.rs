//! Directional qubit-qubit couplings `g_{1->2} = g_e - i W exp(-i dtheta)` and
//! `g_{1<-2} = g_e - i W exp(+i dtheta)`, their ratio, and the asymmetric
//! population dynamics they produce.
//!
//! `g_{1->2}` drives amplitude from qubit 1 into qubit 2, so it is the
//! `(1, 0)` entry of `H_non`; `g_{1<-2}` is the `(0, 1)` entry. Since
//! `|g_fwd|^2 - |g_bwd|^2 = -4 g_e W sin(dtheta)`, the coupling is reciprocal
//! exactly when `g_e W sin(dtheta) = 0`.

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve_scenario, EvolveSpec};
use crate::error::Result;
use crate::exec::Execution;
use crate::model::EffectiveModel;
use crate::params::Scenario;
use crate::sweep::{eval_grid, Grid, SweepSpec};

/// Clip for `log10(ratio)` in tabular output.
pub const LOG10_RATIO_CLIP: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionalCoupling {
    /// `g_{1->2}`, MHz.
    pub g_fwd: C64,
    /// `g_{1<-2}`, MHz.
    pub g_bwd: C64,
    /// `|g_bwd| / |g_fwd|`; infinite when `g_fwd = 0`, 1 when both vanish.
    pub ratio: f64,
}

impl DirectionalCoupling {
    /// `log10(ratio)` clipped to `+-12`.
    pub fn log10_ratio(&self) -> f64 {
        if self.ratio == 0.0 {
            -LOG10_RATIO_CLIP
        } else {
            self.ratio.log10().clamp(-LOG10_RATIO_CLIP, LOG10_RATIO_CLIP)
        }
    }
}

pub fn directional_coupling(m: &EffectiveModel) -> DirectionalCoupling {
    let g_fwd = m.h_non[(1, 0)];
    let g_bwd = m.h_non[(0, 1)];
    let (f, b) = (g_fwd.norm(), g_bwd.norm());
    let ratio = if f == 0.0 && b == 0.0 { 1.0 } else { b / f };
    DirectionalCoupling { g_fwd, g_bwd, ratio }
}

/// Location and value of one grid extremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub axis1: f64,
    pub axis2: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapExtrema {
    pub min_abs_g_fwd: Extremum,
    pub min_abs_g_bwd: Extremum,
    pub max_log10_ratio: Extremum,
    pub min_log10_ratio: Extremum,
}

#[derive(Debug, Clone)]
pub struct NonrecipMap {
    pub grid: Grid<DirectionalCoupling>,
    /// `None` when every cell is masked.
    pub extrema: Option<MapExtrema>,
}

fn extremum(grid: &Grid<DirectionalCoupling>, key: impl Fn(&DirectionalCoupling) -> f64, max: bool) -> Option<Extremum> {
    let mut best: Option<Extremum> = None;
    for (i, j, cell) in grid.iter() {
        let Ok(c) = cell else { continue };
        let v = key(c);
        let better = match best {
            None => true,
            Some(b) => (max && v > b.value) || (!max && v < b.value),
        };
        if better {
            let (a1, a2) = grid.coords(i, j);
            best = Some(Extremum { axis1: a1, axis2: a2, value: v });
        }
    }
    best
}

pub fn nonrecip_map(base: &Scenario, axis1: &SweepSpec, axis2: &SweepSpec, exec: Execution) -> Result<NonrecipMap> {
    let grid = eval_grid(base, axis1, axis2, exec, |sc| Ok(directional_coupling(&sc.model()?)))?;
    let extrema = (|| {
        Some(MapExtrema {
            min_abs_g_fwd: extremum(&grid, |c| c.g_fwd.norm(), false)?,
            min_abs_g_bwd: extremum(&grid, |c| c.g_bwd.norm(), false)?,
            max_log10_ratio: extremum(&grid, |c| c.log10_ratio(), true)?,
            min_log10_ratio: extremum(&grid, |c| c.log10_ratio(), false)?,
        })
    })();
    Ok(NonrecipMap { grid, extrema })
}

/// `P2 - P1` over time for each value of a sweep axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryMap {
    pub axis: SweepSpec,
    /// `Omega_n t` at each output time (raw time when `Omega_n = 0`).
    pub times: Vec<f64>,
    /// `values[k][n]`: axis value `k`, output time `n`.
    pub values: Vec<Vec<f64>>,
}

/// Run the dynamics for each axis value and record `P2 - P1`.
pub fn asymmetry_dynamics(
    base: &Scenario,
    axis: &SweepSpec,
    spec: &EvolveSpec,
    exec: Execution,
) -> Result<AsymmetryMap> {
    axis.require_len(1)?;
    let runs = exec.map(axis.len(), |k| {
        let ev = evolve_scenario(&axis.scenario_at(base, k), spec)?;
        Ok(ev.rows())
    });
    let runs: Vec<_> = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let times = runs[0]
        .iter()
        .map(|r| if r.omega_n_t == 0.0 && r.t != 0.0 { r.t } else { r.omega_n_t })
        .collect();
    let values = runs
        .iter()
        .map(|rows| rows.iter().map(|r| r.p2 - r.p1).collect())
        .collect();
    Ok(AsymmetryMap {
        axis: axis.clone(),
        times,
        values,
    })
}

/// Share of the total (mean-removed, one-sided) power carried by the single
/// strongest discrete frequency. Close to 1 for a periodic signal sampled
/// over whole periods, small for steps and broadband transients.
pub fn spectral_peak_share(signal: &[f64]) -> f64 {
    let n = signal.len();
    if n < 4 {
        return 0.0;
    }
    let mean = signal.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<C64> = signal.iter().map(|&x| C64::new(x - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let power: Vec<f64> = buf[1..=n / 2].iter().map(|c| c.norm_sqr()).collect();
    let total: f64 = power.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    power.iter().copied().fold(0.0, f64::max) / total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::InitialState;
    use crate::params::CircuitParams;
    use crate::sweep::Axis;
    use std::f64::consts::PI;

    fn model(g_e: f64, dtheta: f64) -> EffectiveModel {
        Scenario::new(CircuitParams::fig2())
            .with_g_e(g_e)
            .with_delta_theta(dtheta)
            .model()
            .unwrap()
    }

    #[test]
    fn reciprocal_at_zero_phase() {
        let m = model(1.0, 0.0);
        let d = directional_coupling(&m);
        assert_eq!(d.g_fwd, d.g_bwd);
        assert_eq!(d.ratio, 1.0);
        assert!((d.g_fwd - C64::new(1.0, -m.omega_n)).norm() < 1e-15);
    }

    #[test]
    fn unidirectional_point() {
        let w = 121.0 / 65.0;
        let d = directional_coupling(&model(w, PI / 2.0));
        assert!(d.g_fwd.norm() <= 1e-12 * w);
        assert!((d.g_bwd.norm() - 2.0 * w).abs() < 1e-12);
        assert!(d.ratio > 1e12);
        assert_eq!(d.log10_ratio(), LOG10_RATIO_CLIP);
    }

    #[test]
    fn pure_dissipative_coupling_has_equal_magnitudes() {
        let d = directional_coupling(&model(0.0, PI / 2.0));
        assert!((d.g_fwd.norm() - d.g_bwd.norm()).abs() < 1e-15);
    }

    #[test]
    fn magnitude_identity() {
        for &(g, th) in &[(1.3, 0.4), (-0.7, 2.9), (2.2, -1.1)] {
            let m = model(g, th);
            let d = directional_coupling(&m);
            let lhs = d.g_fwd.norm_sqr() - d.g_bwd.norm_sqr();
            let rhs = -4.0 * g * m.omega_n * th.sin();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
        }
    }

    #[test]
    fn phase_reversal_swaps_directions() {
        let a = directional_coupling(&model(0.9, 1.2));
        let b = directional_coupling(&model(0.9, -1.2));
        assert!((a.g_fwd - b.g_bwd).norm() < 1e-15);
        assert!((a.g_bwd - b.g_fwd).norm() < 1e-15);
    }

    #[test]
    fn ratio_curve_at_right_angle_peaks_at_plus_omega_n() {
        let w = 121.0 / 65.0;
        let base = Scenario::new(CircuitParams::fig2());
        let a1 = SweepSpec::new(Axis::DeltaTheta, vec![PI / 2.0, PI / 2.0]);
        let a2 = SweepSpec::linspace(Axis::GE, -3.0, 3.0, 601);
        let map = nonrecip_map(&base, &a1, &a2, Execution::Parallel).unwrap();
        let ex = map.extrema.unwrap();
        assert!((ex.max_log10_ratio.axis2 - w).abs() < 0.01);
        assert!((ex.min_log10_ratio.axis2 + w).abs() < 0.01);
    }

    #[test]
    fn minima_do_not_coincide_off_the_real_axis() {
        let base = Scenario::new(CircuitParams::fig2());
        let a1 = SweepSpec::delta_theta_pi(0.05, 0.95, 91);
        let a2 = SweepSpec::linspace(Axis::GE, -3.0, 3.0, 121);
        let ex = nonrecip_map(&base, &a1, &a2, Execution::Parallel)
            .unwrap()
            .extrema
            .unwrap();
        let (f, b) = (ex.min_abs_g_fwd, ex.min_abs_g_bwd);
        assert!((f.axis1 - b.axis1).abs() > 1e-9 || (f.axis2 - b.axis2).abs() > 1e-9);
    }

    #[test]
    fn peak_share_of_a_pure_tone_and_a_step() {
        let n = 512;
        let tone: Vec<f64> = (0..n).map(|k| (2.0 * PI * 8.0 * k as f64 / n as f64).sin()).collect();
        assert!(spectral_peak_share(&tone) > 0.99);
        let step: Vec<f64> = (0..n).map(|k| if k < 5 { 0.0 } else { 1.0 }).collect();
        assert!(spectral_peak_share(&step) < 0.5);
        assert_eq!(spectral_peak_share(&[1.0; 16]), 0.0);
    }

    #[test]
    fn asymmetry_vanishes_without_a_dissipative_channel() {
        let p = CircuitParams {
            lambda_q: [0.0, 0.0],
            ..CircuitParams::fig7()
        };
        let axis = SweepSpec::new(Axis::DeltaTheta, vec![0.0, PI / 2.0]);
        let spec = EvolveSpec {
            initial: InitialState::BothExcited,
            t_max: 5.0,
            n_steps: 50,
            time_unit: crate::dynamics::TimeUnit::Raw,
            ..EvolveSpec::default()
        };
        let map = asymmetry_dynamics(&Scenario::new(p).with_g_e(0.3), &axis, &spec, Execution::Parallel).unwrap();
        for row in &map.values {
            assert!(row.iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn asymmetry_flips_with_the_phase() {
        let sc = Scenario::new(CircuitParams::fig7()).with_g_e(0.0053);
        let axis = SweepSpec::new(Axis::DeltaTheta, vec![0.4 * PI, -0.4 * PI]);
        let spec = EvolveSpec {
            initial: InitialState::BothExcited,
            t_max: 20.0,
            n_steps: 200,
            ..EvolveSpec::default()
        };
        let map = asymmetry_dynamics(&sc, &axis, &spec, Execution::Sequential).unwrap();
        for (a, b) in map.values[0].iter().zip(&map.values[1]) {
            assert!((a + b).abs() < 1e-10);
        }
        assert!(map.values[0].iter().any(|v| v.abs() > 1e-6));
    }
}
