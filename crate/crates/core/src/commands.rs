//! Command pipelines: resolved configuration in, named tables out.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::config::{ConfigError, EpMode, RunConfig};
use crate::dynamics::evolve_scenario;
use crate::ep::{find_degeneracies_1d, find_ep_2d};
use crate::nonreciprocity::{asymmetry_dynamics, directional_coupling, nonrecip_map};
use crate::oracle::{compare_coupler_reduction, compare_reduction};
use crate::output::{self, Header, Table};
use crate::spectrum::{scan_2d, sweep_1d};
use crate::sweep::eval_sweep;
use crate::{figures, Execution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Numerical(#[from] crate::Error),
}

pub type RunResult<T> = std::result::Result<T, RunError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Spectrum,
    Scan2d,
    EpFind,
    Evolve,
    Nonrecip,
    Asym,
    Oracle,
    Fig2,
    Fig3,
    Fig4a,
    Fig4b,
    Fig5,
    Fig6,
    Fig7,
}

impl Command {
    pub const ALL: [Command; 14] = [
        Command::Spectrum,
        Command::Scan2d,
        Command::EpFind,
        Command::Evolve,
        Command::Nonrecip,
        Command::Asym,
        Command::Oracle,
        Command::Fig2,
        Command::Fig3,
        Command::Fig4a,
        Command::Fig4b,
        Command::Fig5,
        Command::Fig6,
        Command::Fig7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Scan2d => "scan2d",
            Command::EpFind => "epfind",
            Command::Evolve => "evolve",
            Command::Nonrecip => "nonrecip",
            Command::Asym => "asym",
            Command::Oracle => "oracle",
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Fig4a => "fig4a",
            Command::Fig4b => "fig4b",
            Command::Fig5 => "fig5",
            Command::Fig6 => "fig6",
            Command::Fig7 => "fig7",
        }
    }

    pub fn is_figure(self) -> bool {
        self.name().starts_with("fig")
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

/// One output file: `name` is the file stem.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub header: Header,
    pub table: Table,
}

impl Dataset {
    pub fn new(name: impl Into<String>, header: Header, table: Table) -> Self {
        Dataset {
            name: name.into(),
            header,
            table,
        }
    }
}

pub fn run(command: Command, cfg: &RunConfig, exec: Execution) -> RunResult<Vec<Dataset>> {
    match command {
        Command::Spectrum => spectrum(cfg, exec).map(|d| vec![d]),
        Command::Scan2d => scan2d(cfg, exec).map(|d| vec![d]),
        Command::EpFind => epfind(cfg, exec).map(|d| vec![d]),
        Command::Evolve => evolve(cfg).map(|d| vec![d]),
        Command::Nonrecip => nonrecip(cfg, exec).map(|d| vec![d]),
        Command::Asym => asym(cfg, exec).map(|d| vec![d]),
        Command::Oracle => oracle(cfg, exec),
        Command::Fig2 => figures::fig2(cfg, exec),
        Command::Fig3 => figures::fig3(cfg, exec),
        Command::Fig4a => figures::fig4a(cfg, exec),
        Command::Fig4b => figures::fig4b(cfg, exec),
        Command::Fig5 => figures::fig5(cfg),
        Command::Fig6 => figures::fig6(cfg, exec),
        Command::Fig7 => figures::fig7(cfg, exec),
    }
}

/// Fail the whole command when every point is masked; a partly masked
/// sweep is still a result.
fn require_some<T>(cells: &[crate::Result<T>]) -> RunResult<()> {
    if !cells.is_empty() && cells.iter().all(|c| c.is_err()) {
        let e = cells[0].as_ref().err().cloned().expect("all masked");
        return Err(e.into());
    }
    Ok(())
}

pub fn spectrum(cfg: &RunConfig, exec: Execution) -> RunResult<Dataset> {
    let base = cfg.scenario()?;
    let axis = cfg.sweep.to_spec("sweep")?;
    let pts = sweep_1d(&base, &axis, exec);
    require_some(&pts)?;
    Ok(Dataset::new(
        "spectrum",
        Header::new("spectrum", cfg),
        output::spectrum_sweep_table(&axis, &pts),
    ))
}

pub fn scan2d(cfg: &RunConfig, exec: Execution) -> RunResult<Dataset> {
    let base = cfg.scenario()?;
    let a1 = cfg.scan.axis1.to_spec("scan.axis1")?;
    let a2 = cfg.scan.axis2.to_spec("scan.axis2")?;
    let grid = scan_2d(&base, &a1, &a2, exec)?;
    require_some(&grid.cells)?;
    Ok(Dataset::new(
        "scan2d",
        Header::new("scan2d", cfg),
        output::spectrum_grid_table(&grid),
    ))
}

pub fn epfind(cfg: &RunConfig, exec: Execution) -> RunResult<Dataset> {
    let base = cfg.scenario()?;
    let opts = cfg.ep.options()?;
    let loci = match cfg.ep.mode {
        EpMode::OneD => find_degeneracies_1d(&base, &cfg.sweep.to_spec("sweep")?, &opts)?,
        EpMode::TwoD => {
            let a1 = cfg.scan.axis1.to_spec("scan.axis1")?;
            let a2 = cfg.scan.axis2.to_spec("scan.axis2")?;
            find_ep_2d(&base, &a1, &a2, &opts, exec)?
        }
    };
    Ok(Dataset::new(
        "loci",
        Header::new("epfind", cfg).note("loci", loci.len().to_string()),
        output::loci_table(&loci),
    ))
}

pub fn evolve(cfg: &RunConfig) -> RunResult<Dataset> {
    let base = cfg.scenario()?;
    let spec = cfg.evolve.to_spec()?;
    let ev = evolve_scenario(&base, &spec)?;
    Ok(Dataset::new(
        "trajectory",
        Header::new("evolve", cfg),
        output::trajectory_table(&ev.rows()),
    ))
}

pub fn nonrecip(cfg: &RunConfig, exec: Execution) -> RunResult<Dataset> {
    let base = cfg.scenario()?;
    let a1 = cfg.scan.axis1.to_spec("scan.axis1")?;
    let a2 = cfg.scan.axis2.to_spec("scan.axis2")?;
    let map = nonrecip_map(&base, &a1, &a2, exec)?;
    require_some(&map.grid.cells)?;
    let mut header = Header::new("nonrecip", cfg);
    if let Some(x) = &map.extrema {
        for (k, e) in [
            ("min_abs_g_fwd", x.min_abs_g_fwd),
            ("min_abs_g_bwd", x.min_abs_g_bwd),
            ("max_log10_ratio", x.max_log10_ratio),
            ("min_log10_ratio", x.min_log10_ratio),
        ] {
            header = header.note(
                k,
                format!(
                    "{} at ({}, {})",
                    output::format_num(e.value),
                    output::format_num(e.axis1),
                    output::format_num(e.axis2)
                ),
            );
        }
    }
    Ok(Dataset::new("map", header, output::map_table(&map)))
}

/// Directional couplings along the `[sweep]` axis.
pub fn nonrecip_sweep(cfg: &RunConfig, exec: Execution, command: &str) -> RunResult<(Header, Table)> {
    let base = cfg.scenario()?;
    let axis = cfg.sweep.to_spec("sweep")?;
    let cells = eval_sweep(&base, &axis, exec, |sc| Ok(directional_coupling(&sc.model()?)));
    require_some(&cells)?;
    Ok((Header::new(command, cfg), output::map_sweep_table(&axis, &cells)))
}

pub fn asym(cfg: &RunConfig, exec: Execution) -> RunResult<Dataset> {
    let base = cfg.scenario()?;
    let axis = cfg.sweep.to_spec("sweep")?;
    let spec = cfg.evolve.to_spec()?;
    let map = asymmetry_dynamics(&base, &axis, &spec, exec)?;
    Ok(Dataset::new(
        "asymmetry",
        Header::new("asym", cfg),
        output::asymmetry_table(&map),
    ))
}

pub fn oracle(cfg: &RunConfig, exec: Execution) -> RunResult<Vec<Dataset>> {
    let p = cfg.scenario()?.circuit;
    if cfg.oracle.gamma_a_schedule.is_empty() {
        return Err(ConfigError::Invalid {
            key: "oracle.gamma_a_schedule".into(),
            reason: "must not be empty".into(),
        }
        .into());
    }
    let reports = compare_reduction(&p, &cfg.oracle.gamma_a_schedule, cfg.oracle.convention, exec)?;
    let mut out = vec![Dataset::new(
        "reduction",
        Header::new("oracle", cfg),
        output::reduction_table(&reports),
    )];
    if !cfg.oracle.omega_c_values.is_empty() {
        let coupler = compare_coupler_reduction(&p, &cfg.oracle.omega_c_values)?;
        out.push(Dataset::new(
            "coupler",
            Header::new("oracle", cfg).note("dataset", "coupler-resolved vs g_e-reduced splitting"),
            output::coupler_table(&coupler),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, AxisConfig, AxisUnit};

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("fig8".parse::<Command>().is_err());
    }

    #[test]
    fn small_commands_run() {
        let mut cfg = RunConfig {
            sweep: AxisConfig::range("g_e", -3.0, 3.0, 64, AxisUnit::Native),
            ..RunConfig::default()
        };
        cfg.scan.axis1.n = 9;
        cfg.scan.axis2.n = 9;
        cfg.evolve.n_steps = 50;
        for c in [
            Command::Spectrum,
            Command::Scan2d,
            Command::Evolve,
            Command::Nonrecip,
            Command::Oracle,
        ] {
            let ds = run(c, &cfg, Execution::Sequential).unwrap();
            assert!(!ds.is_empty() && ds.iter().all(|d| !d.table.rows.is_empty()), "{c}");
        }
    }

    #[test]
    fn epfind_1d_finds_symmetric_points() {
        let cfg = parse_config(
            "[circuit]\nomega_2 = 4500\ngamma_2 = 1.0\ng_2 = 30\n[model]\ndelta_theta_pi = 0.5\n[ep]\nmode = \"1d\"\n",
            "t",
            &[],
        )
        .unwrap();
        let d = epfind(&cfg, Execution::Sequential).unwrap();
        let kinds = d.table.column("kind").unwrap();
        assert_eq!(kinds.len(), 2);
        assert!(kinds.iter().all(|k| **k == output::Cell::Text("exceptional_point".into())));
    }
}
