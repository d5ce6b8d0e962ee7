//! Tabular output: fixed column sets, CSV or JSON, each preceded by a header
//! that echoes the resolved parameters.
//!
//! Numbers use Rust's shortest round-trip formatting, so output is
//! independent of locale and of the number of worker threads. Masked cells
//! are written as `NaN` in CSV and `null` in JSON; the unused second axis of
//! a 1-D sweep is empty.

use std::io::{self, Write};

use serde_json::{json, Value};

use crate::config::{OutputFormat, RunConfig};
use crate::dynamics::PopulationRow;
use crate::ep::DegeneracyLocus;
use crate::nonreciprocity::{AsymmetryMap, DirectionalCoupling, NonrecipMap};
use crate::oracle::{CouplerReport, ReductionReport};
use crate::spectrum::SpectrumPoint;
use crate::sweep::{Grid, SweepSpec};
use crate::Result;

pub const GRID_COLUMNS: [&str; 10] = [
    "axis1", "axis2", "re_wp", "im_wp", "re_wm", "im_wm", "R", "I", "dEq", "dGq",
];
pub const LOCI_COLUMNS: [&str; 6] = ["kind", "axis1", "axis2", "R_residual", "I_residual", "bracket_width"];
pub const TRAJECTORY_COLUMNS: [&str; 6] = ["omega_n_t", "p1", "p2", "p1_raw", "p2_raw", "trace"];
pub const MAP_COLUMNS: [&str; 6] = ["axis1", "axis2", "abs_g_fwd", "abs_g_bwd", "ratio", "log10_ratio"];
pub const ASYMMETRY_COLUMNS: [&str; 3] = ["omega_n_t", "axis", "p2_minus_p1"];
pub const REDUCTION_COLUMNS: [&str; 7] = [
    "gamma_a", "re_eff", "im_eff", "re_full", "im_full", "rel_error", "offdiag_residual",
];
pub const COUPLER_COLUMNS: [&str; 7] = [
    "omega_c", "dispersive_ratio", "re_reduced", "im_reduced", "re_full", "im_full", "rel_error",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_num(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) | Cell::Empty => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

pub fn format_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x == 0.0 {
        "0".into()
    } else if x.is_finite() && (1e-4..1e15).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }
}

/// Comment block written before the table.
#[derive(Debug, Clone, PartialEq)]
pub struct Header {
    pub command: String,
    /// Extra `key: value` lines, e.g. the dataset within a figure.
    pub notes: Vec<(String, String)>,
    pub config: RunConfig,
}

impl Header {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Header {
            command: command.to_string(),
            notes: Vec::new(),
            config: config.clone(),
        }
    }

    pub fn note(mut self, key: &str, value: impl Into<String>) -> Self {
        self.notes.push((key.to_string(), value.into()));
        self
    }

    fn derived(&self) -> Option<Vec<(String, String)>> {
        let m = self.config.scenario().ok()?.model().ok()?;
        let pair = |a: [f64; 2]| format!("[{}, {}]", format_num(a[0]), format_num(a[1]));
        Some(vec![
            ("delta_prime".into(), pair(m.delta_prime)),
            ("big_gamma".into(), pair(m.big_gamma)),
            ("g_e".into(), format_num(m.g_e)),
            ("omega_n".into(), format_num(m.omega_n)),
            ("delta_theta".into(), format_num(m.delta_theta)),
        ])
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("nhcoupler {} {}", env!("CARGO_PKG_VERSION"), self.command),
            "units: MHz (linear frequencies), radians".to_string(),
        ];
        out.extend(self.notes.iter().map(|(k, v)| format!("{k}: {v}")));
        if let Some(d) = self.derived() {
            out.extend(d.iter().map(|(k, v)| format!("derived.{k} = {v}")));
        }
        out.push("resolved configuration:".into());
        out.extend(self.config.to_toml().lines().map(str::to_string));
        out
    }

    pub fn json(&self) -> Value {
        let notes: serde_json::Map<String, Value> =
            self.notes.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let derived: serde_json::Map<String, Value> = self
            .derived()
            .unwrap_or_default()
            .into_iter()
            .map(|(k, v)| (k, json!(v)))
            .collect();
        json!({
            "program": format!("nhcoupler {}", env!("CARGO_PKG_VERSION")),
            "command": self.command,
            "notes": notes,
            "derived": derived,
            "config": self.config.to_json(),
        })
    }
}

pub fn write_csv<W: Write>(mut w: W, header: &Header, table: &Table) -> io::Result<()> {
    for l in header.lines() {
        if l.is_empty() {
            writeln!(w, "#")?;
        } else {
            writeln!(w, "# {l}")?;
        }
    }
    let mut cw = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    cw.write_record(&table.columns)?;
    for row in &table.rows {
        cw.write_record(row.iter().map(Cell::csv))?;
    }
    cw.flush()
}

pub fn write_json<W: Write>(mut w: W, header: &Header, table: &Table) -> io::Result<()> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
        .collect();
    let doc = json!({
        "header": header.json(),
        "columns": table.columns,
        "rows": rows,
    });
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)
}

pub fn write_table<W: Write>(w: W, format: OutputFormat, header: &Header, table: &Table) -> io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(w, header, table),
        OutputFormat::Json => write_json(w, header, table),
    }
}

pub fn render(format: OutputFormat, header: &Header, table: &Table) -> String {
    let mut buf = Vec::new();
    write_table(&mut buf, format, header, table).expect("write to memory");
    String::from_utf8(buf).expect("utf-8 output")
}

fn num(x: f64) -> Cell {
    Cell::Num(x)
}

fn spectrum_cells(p: Option<&SpectrumPoint>) -> [Cell; 8] {
    match p {
        Some(p) => [
            num(p.omega_plus.re),
            num(p.omega_plus.im),
            num(p.omega_minus.re),
            num(p.omega_minus.im),
            num(p.r_disc),
            num(p.i_disc),
            num(p.delta_e),
            num(p.delta_gamma),
        ],
        None => std::array::from_fn(|_| num(f64::NAN)),
    }
}

/// Spectrum along one axis (`axis2` empty).
pub fn spectrum_sweep_table(axis: &SweepSpec, points: &[Result<SpectrumPoint>]) -> Table {
    let mut t = Table::new(&GRID_COLUMNS);
    for (x, p) in axis.values.iter().zip(points) {
        let mut row = vec![num(*x), Cell::Empty];
        row.extend(spectrum_cells(p.as_ref().ok()));
        t.push(row);
    }
    t
}

/// Spectrum grid, row-major with `axis1` slow.
pub fn spectrum_grid_table(grid: &Grid<SpectrumPoint>) -> Table {
    let mut t = Table::new(&GRID_COLUMNS);
    for (i, j, cell) in grid.iter() {
        let (a, b) = grid.coords(i, j);
        let mut row = vec![num(a), num(b)];
        row.extend(spectrum_cells(cell.as_ref().ok()));
        t.push(row);
    }
    t
}

pub fn loci_table(loci: &[DegeneracyLocus]) -> Table {
    let mut t = Table::new(&LOCI_COLUMNS);
    for l in loci {
        t.push(vec![
            Cell::Text(l.kind.name().to_string()),
            num(l.location[0]),
            l.location.get(1).map_or(Cell::Empty, |&v| num(v)),
            num(l.r_residual),
            num(l.i_residual),
            num(l.refinement_width.iter().copied().fold(0.0, f64::max)),
        ]);
    }
    t
}

pub fn trajectory_table(rows: &[PopulationRow]) -> Table {
    let mut t = Table::new(&TRAJECTORY_COLUMNS);
    for r in rows {
        t.push(vec![
            num(r.omega_n_t),
            num(r.p1),
            num(r.p2),
            num(r.p1_raw),
            num(r.p2_raw),
            num(r.trace),
        ]);
    }
    t
}

fn map_cells(c: Option<&DirectionalCoupling>) -> [Cell; 4] {
    match c {
        Some(c) => [
            num(c.g_fwd.norm()),
            num(c.g_bwd.norm()),
            num(c.ratio),
            num(c.log10_ratio()),
        ],
        None => std::array::from_fn(|_| num(f64::NAN)),
    }
}

pub fn map_table(map: &NonrecipMap) -> Table {
    let mut t = Table::new(&MAP_COLUMNS);
    for (i, j, cell) in map.grid.iter() {
        let (a, b) = map.grid.coords(i, j);
        let mut row = vec![num(a), num(b)];
        row.extend(map_cells(cell.as_ref().ok()));
        t.push(row);
    }
    t
}

/// Directional couplings along one axis (`axis2` empty).
pub fn map_sweep_table(axis: &SweepSpec, couplings: &[Result<DirectionalCoupling>]) -> Table {
    let mut t = Table::new(&MAP_COLUMNS);
    for (x, c) in axis.values.iter().zip(couplings) {
        let mut row = vec![num(*x), Cell::Empty];
        row.extend(map_cells(c.as_ref().ok()));
        t.push(row);
    }
    t
}

/// Long format, axis value slow and time fast.
pub fn asymmetry_table(map: &AsymmetryMap) -> Table {
    let mut t = Table::new(&ASYMMETRY_COLUMNS);
    for (x, series) in map.axis.values.iter().zip(&map.values) {
        for (tn, v) in map.times.iter().zip(series) {
            t.push(vec![num(*tn), num(*x), num(*v)]);
        }
    }
    t
}

pub fn reduction_table(reports: &[ReductionReport]) -> Table {
    let mut t = Table::new(&REDUCTION_COLUMNS);
    for r in reports {
        t.push(vec![
            num(r.gamma_a),
            num(r.eff_splitting.re),
            num(r.eff_splitting.im),
            num(r.full_splitting.re),
            num(r.full_splitting.im),
            num(r.rel_error),
            num(r.offdiag_residual),
        ]);
    }
    t
}

pub fn coupler_table(reports: &[CouplerReport]) -> Table {
    let mut t = Table::new(&COUPLER_COLUMNS);
    for r in reports {
        t.push(vec![
            num(r.omega_c),
            num(r.dispersive_ratio),
            num(r.reduced_splitting.re),
            num(r.reduced_splitting.im),
            num(r.full_splitting.re),
            num(r.full_splitting.im),
            num(r.rel_error),
        ]);
    }
    t
}
