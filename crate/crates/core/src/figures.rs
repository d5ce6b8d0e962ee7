//! Figure presets. Each preset fixes the caption's circuit and axes and
//! keeps only `format`, `output` and `seed` from the user configuration.
//! Every dataset carries its own resolved configuration, so any file can be
//! regenerated by feeding its header back to the matching command.

use crate::commands::{self, Dataset, RunResult};
use crate::config::{AxisConfig, AxisUnit, CircuitConfig, EpMode, RunConfig};
use crate::dynamics::{InitialState, PopulationFeedback, TimeUnit};
use crate::ep::find_degeneracies_1d;
use crate::output::{self, Header};
use crate::params::CircuitParams;
use crate::Execution;

/// Caption parameters on top of a default configuration.
pub fn preset(user: &RunConfig, circuit: CircuitParams) -> RunConfig {
    RunConfig {
        output: user.output.clone(),
        seed: user.seed,
        format: user.format,
        circuit: CircuitConfig::from(circuit),
        ..RunConfig::default()
    }
}

fn with_note(mut d: Dataset, name: &str, key: &str, value: &str) -> Dataset {
    d.name = name.to_string();
    d.header = d.header.note(key, value);
    d
}

fn rename(mut d: Dataset, command: &str, name: &str) -> Dataset {
    d.name = name.to_string();
    d.header.command = command.to_string();
    d
}

/// `g_e` x `delta_theta` spectrum grid (201 x 201) and the exceptional
/// points found on it.
pub fn fig2(user: &RunConfig, exec: Execution) -> RunResult<Vec<Dataset>> {
    let mut cfg = preset(user, CircuitParams::fig2());
    cfg.scan.axis1 = AxisConfig::range("g_e", -3.0, 3.0, 201, AxisUnit::Native);
    cfg.scan.axis2 = AxisConfig::range("delta_theta", 0.0, 1.0, 201, AxisUnit::Pi);
    cfg.ep.mode = EpMode::TwoD;
    let grid = rename(commands::scan2d(&cfg, exec)?, "fig2", "fig2_grid");
    let loci = rename(commands::epfind(&cfg, exec)?, "fig2", "fig2_loci");
    Ok(vec![grid, loci])
}

pub const FIG3_DELTA_THETA_PI: [f64; 3] = [0.5, 0.501, 0.502];

/// Spectrum along `g_e` for each caption phase, plus every degeneracy
/// found along those sweeps (`axis2` holds the phase).
pub fn fig3(user: &RunConfig, exec: Execution) -> RunResult<Vec<Dataset>> {
    let mut out = Vec::new();
    let mut loci_all = Vec::new();
    let mut loci_cfg = None;
    for dt in FIG3_DELTA_THETA_PI {
        let mut cfg = preset(user, CircuitParams::fig3());
        cfg.model.delta_theta_pi = Some(dt);
        cfg.sweep = AxisConfig::range("g_e", -3.0, 3.0, 1201, AxisUnit::Native);
        cfg.ep.mode = EpMode::OneD;
        let d = rename(commands::spectrum(&cfg, exec)?, "fig3", "");
        out.push(with_note(d, &format!("fig3_dtheta_{dt:.3}pi"), "delta_theta_pi", &dt.to_string()));
        let base = cfg.scenario()?;
        let axis = cfg.sweep.to_spec("sweep")?;
        for mut l in find_degeneracies_1d(&base, &axis, &cfg.ep.options()?)? {
            l.location.push(dt * std::f64::consts::PI);
            loci_all.push(l);
        }
        loci_cfg.get_or_insert(cfg);
    }
    let mut cfg = loci_cfg.expect("three phases");
    cfg.model.delta_theta_pi = None;
    out.push(Dataset::new(
        "fig3_loci",
        Header::new("fig3", &cfg).note("axis2", "delta_theta of the sweep, radians"),
        output::loci_table(&loci_all),
    ));
    Ok(out)
}

struct Curve {
    name: &'static str,
    delta_theta_pi: f64,
    g_e: f64,
    gamma_a: f64,
    gamma_ratio: Option<f64>,
    lambda: f64,
}

fn curve_spectrum(user: &RunConfig, exec: Execution, fig: &str, axis: AxisConfig, c: &Curve) -> RunResult<Dataset> {
    let mut p = CircuitParams::fig2();
    p.gamma_a = c.gamma_a;
    p.lambda_q = [c.lambda, c.lambda];
    let mut cfg = preset(user, p);
    cfg.model.delta_theta_pi = Some(c.delta_theta_pi);
    cfg.model.g_e = Some(c.g_e);
    cfg.model.gamma_ratio = c.gamma_ratio;
    cfg.sweep = axis;
    let d = rename(commands::spectrum(&cfg, exec)?, fig, &format!("{fig}_{}", c.name));
    Ok(with_note(d, &format!("{fig}_{}", c.name), "curve", c.name))
}

/// `Re(omega)` against a common `lambda` in [0, 20] MHz, four curves.
pub fn fig4a(user: &RunConfig, exec: Execution) -> RunResult<Vec<Dataset>> {
    let blue = Curve {
        name: "blue",
        delta_theta_pi: 0.5,
        g_e: 1.137,
        gamma_a: 65.0,
        gamma_ratio: Some(1.0),
        lambda: 11.0,
    };
    let curves = [
        Curve { g_e: 1.224, name: "green", ..blue },
        Curve { gamma_a: 66.0, name: "red", ..blue },
        Curve { gamma_ratio: Some(0.99), name: "black", ..blue },
    ];
    let axis = AxisConfig::range("lambda", 0.0, 20.0, 401, AxisUnit::Native);
    std::iter::once(&blue)
        .chain(&curves)
        .map(|c| curve_spectrum(user, exec, "fig4a", axis.clone(), c))
        .collect()
}

/// `Re(omega)` against `<sigma_z> = <sigma_z^(1)> = -<sigma_z^(2)>` in
/// [-1, 1], three curves.
pub fn fig4b(user: &RunConfig, exec: Execution) -> RunResult<Vec<Dataset>> {
    let blue = Curve {
        name: "blue",
        delta_theta_pi: 0.5,
        g_e: 1.137,
        gamma_a: 65.0,
        gamma_ratio: None,
        lambda: 11.0,
    };
    let curves = [
        Curve { delta_theta_pi: 0.5005, name: "red", ..blue },
        Curve { g_e: 1.224, lambda: 10.6, name: "black", ..blue },
    ];
    let axis = AxisConfig::range("sigma_z_anti", -1.0, 1.0, 401, AxisUnit::Native);
    std::iter::once(&blue)
        .chain(&curves)
        .map(|c| curve_spectrum(user, exec, "fig4b", axis.clone(), c))
        .collect()
}

pub const FIG5_G_E_KHZ: [f64; 4] = [-80.0, -35.0, 21.0, 90.0];
pub const FIG5_DELTA_THETA_PI: [f64; 4] = [0.46, 0.48, 0.50, 0.52];

fn fig5_cfg(user: &RunConfig, g_e: f64, delta_theta_pi: f64) -> RunConfig {
    let mut cfg = preset(user, CircuitParams::fig2());
    cfg.model.g_e = Some(g_e);
    cfg.model.delta_theta_pi = Some(delta_theta_pi);
    cfg.evolve.initial_sigma_z = [1.0, -1.0];
    cfg.evolve.feedback = PopulationFeedback::Frozen;
    cfg.evolve.time_unit = TimeUnit::OmegaN;
    cfg.evolve.t_max = 50.0;
    cfg.evolve.n_steps = 1000;
    cfg
}

/// Every Fig. 5 configuration: four `g_e` at `delta_theta = 5pi/12`, then
/// four phases at `g_e = -31 kHz`.
pub fn fig5_configs(user: &RunConfig) -> Vec<(String, RunConfig)> {
    let a = FIG5_G_E_KHZ
        .map(|k| (format!("fig5a_ge_{k:+}kHz"), fig5_cfg(user, k * 1e-3, 5.0 / 12.0)));
    let c = FIG5_DELTA_THETA_PI
        .map(|dt| (format!("fig5c_dtheta_{dt:.2}pi"), fig5_cfg(user, -0.031, dt)));
    a.into_iter().chain(c).collect()
}

/// Eight trajectories, each with both qubit populations.
pub fn fig5(user: &RunConfig) -> RunResult<Vec<Dataset>> {
    fig5_configs(user)
        .into_iter()
        .map(|(name, cfg)| Ok(rename(commands::evolve(&cfg)?, "fig5", &name)))
        .collect()
}

/// Directional couplings over (`delta_theta` in [0, 2pi], `g_e` in
/// [-3, 3] MHz), and along `g_e` at `delta_theta = pi/2` and `pi/3`.
pub fn fig6(user: &RunConfig, exec: Execution) -> RunResult<Vec<Dataset>> {
    let mut cfg = preset(user, CircuitParams::fig2());
    cfg.scan.axis1 = AxisConfig::range("delta_theta", 0.0, 2.0, 201, AxisUnit::Pi);
    cfg.scan.axis2 = AxisConfig::range("g_e", -3.0, 3.0, 201, AxisUnit::Native);
    let mut out = vec![rename(commands::nonrecip(&cfg, exec)?, "fig6", "fig6_map")];
    for (name, dt) in [("fig6_dtheta_pi_2", 0.5), ("fig6_dtheta_pi_3", 1.0 / 3.0)] {
        let mut c = preset(user, CircuitParams::fig2());
        c.model.delta_theta_pi = Some(dt);
        c.sweep = AxisConfig::range("g_e", -3.0, 3.0, 601, AxisUnit::Native);
        let (header, table) = commands::nonrecip_sweep(&c, exec, "fig6")?;
        out.push(Dataset::new(name, header, table));
    }
    Ok(out)
}

pub const FIG7_G_E: f64 = 0.0053;

fn fig7_cfg(user: &RunConfig) -> RunConfig {
    let mut cfg = preset(user, CircuitParams::fig7());
    cfg.evolve.initial_sigma_z = InitialState::BothExcited.sigma_pair();
    cfg.evolve.feedback = PopulationFeedback::Frozen;
    cfg.evolve.t_max = 50.0;
    cfg.evolve.n_steps = 500;
    cfg
}

/// `(a)`: `delta_theta = pi/2`, configuration for the `g_e` axis.
pub fn fig7a_config(user: &RunConfig) -> RunConfig {
    let mut cfg = fig7_cfg(user);
    cfg.model.delta_theta_pi = Some(0.5);
    cfg.sweep = AxisConfig::range("g_e", -0.1, 0.1, 81, AxisUnit::Native);
    cfg
}

/// `(b)`: `g_e = 5.3 kHz`, configuration for the phase axis.
pub fn fig7b_config(user: &RunConfig) -> RunConfig {
    let mut cfg = fig7_cfg(user);
    cfg.model.g_e = Some(FIG7_G_E);
    cfg.sweep = AxisConfig::range("delta_theta", 0.0, 1.0, 91, AxisUnit::Pi);
    cfg
}

/// Two `P2 - P1` maps over `Omega_n t` in [0, 50].
pub fn fig7(user: &RunConfig, exec: Execution) -> RunResult<Vec<Dataset>> {
    Ok(vec![
        rename(commands::asym(&fig7a_config(user), exec)?, "fig7", "fig7a_ge"),
        rename(commands::asym(&fig7b_config(user), exec)?, "fig7", "fig7b_dtheta"),
    ])
}
