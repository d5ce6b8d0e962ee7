//! Sweep axes and dense parameter grids.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::Scenario;

/// How a `<sigma_z>` axis value is distributed over the two qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaPattern {
    /// `(s, s)`.
    Common,
    /// `(s, -s)`.
    Antisymmetric,
}

/// A parameter that a sweep can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Coherent coupling `g_e`, set directly (MHz).
    GE,
    /// Phase difference `theta_1 - theta_2` (radians).
    DeltaTheta,
    /// Common resonator coupling `lambda_1 = lambda_2` (MHz).
    Lambda,
    /// Qubit populations.
    SigmaZ(SigmaPattern),
    /// Coupler frequency (MHz); drives `g_e` physically.
    OmegaC,
    /// Resonator decay (MHz).
    GammaA,
}

impl Axis {
    pub const NAMES: [&'static str; 7] = [
        "g_e",
        "delta_theta",
        "lambda",
        "sigma_z",
        "sigma_z_anti",
        "omega_c",
        "gamma_a",
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axis::GE => "g_e",
            Axis::DeltaTheta => "delta_theta",
            Axis::Lambda => "lambda",
            Axis::SigmaZ(SigmaPattern::Common) => "sigma_z",
            Axis::SigmaZ(SigmaPattern::Antisymmetric) => "sigma_z_anti",
            Axis::OmegaC => "omega_c",
            Axis::GammaA => "gamma_a",
        }
    }

    /// Write `value` into the scenario.
    pub fn apply(self, sc: &mut Scenario, value: f64) {
        let c = &mut sc.circuit;
        match self {
            Axis::GE => sc.overrides.g_e = Some(value),
            Axis::DeltaTheta => c.theta_q[0] = c.theta_q[1] + value,
            Axis::Lambda => c.lambda_q = [value, value],
            Axis::SigmaZ(SigmaPattern::Common) => c.sigma_z = [value, value],
            Axis::SigmaZ(SigmaPattern::Antisymmetric) => c.sigma_z = [value, -value],
            Axis::OmegaC => c.omega_c = value,
            Axis::GammaA => c.gamma_a = value,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "g_e" | "ge" => Axis::GE,
            "delta_theta" | "dtheta" => Axis::DeltaTheta,
            "lambda" => Axis::Lambda,
            "sigma_z" => Axis::SigmaZ(SigmaPattern::Common),
            "sigma_z_anti" => Axis::SigmaZ(SigmaPattern::Antisymmetric),
            "omega_c" => Axis::OmegaC,
            "gamma_a" => Axis::GammaA,
            other => {
                return Err(Error::InvalidSpec(format!(
                    "unknown axis `{other}` (expected one of {})",
                    Axis::NAMES.join(", ")
                )))
            }
        })
    }
}

/// One sweep axis with explicit sample values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
}

impl SweepSpec {
    pub fn new(axis: Axis, values: Vec<f64>) -> Self {
        SweepSpec { axis, values }
    }

    /// `n` evenly spaced values from `min` to `max` inclusive.
    pub fn linspace(axis: Axis, min: f64, max: f64, n: usize) -> Self {
        SweepSpec::new(axis, linspace(min, max, n))
    }

    /// `delta_theta` over `[min_pi, max_pi] * pi`.
    pub fn delta_theta_pi(min_pi: f64, max_pi: f64, n: usize) -> Self {
        SweepSpec::linspace(Axis::DeltaTheta, min_pi * PI, max_pi * PI, n)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn span(&self) -> f64 {
        self.max() - self.min()
    }

    pub fn scenario_at(&self, base: &Scenario, k: usize) -> Scenario {
        let mut sc = *base;
        self.axis.apply(&mut sc, self.values[k]);
        sc
    }

    pub(crate) fn require_len(&self, min: usize) -> Result<()> {
        if self.values.len() < min {
            return Err(Error::InvalidSpec(format!(
                "axis `{}` needs at least {min} points, got {}",
                self.axis,
                self.values.len()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec(format!("axis `{}` has non-finite values", self.axis)));
        }
        Ok(())
    }
}

pub fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![min],
        _ => {
            let step = (max - min) / (n - 1) as f64;
            (0..n)
                .map(|k| if k == n - 1 { max } else { min + step * k as f64 })
                .collect()
        }
    }
}

/// Row-major 2-D grid: `axis1` is the slow (outer) index.
///
/// Cells that could not be evaluated (e.g. a coupler sweep crossing
/// `Delta_jc = 0`) are kept as errors instead of aborting the scan.
#[derive(Debug, Clone)]
pub struct Grid<T> {
    pub axis1: SweepSpec,
    pub axis2: SweepSpec,
    pub cells: Vec<Result<T>>,
}

impl<T> Grid<T> {
    pub fn shape(&self) -> (usize, usize) {
        (self.axis1.len(), self.axis2.len())
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.axis2.len() + j
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&T> {
        self.cells[self.index(i, j)].as_ref().ok()
    }

    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        (self.axis1.values[i], self.axis2.values[j])
    }

    pub fn masked_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_err()).count()
    }

    /// Iterate `(i, j, cell)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Result<T>)> {
        let n2 = self.axis2.len();
        self.cells.iter().enumerate().map(move |(k, c)| (k / n2, k % n2, c))
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Grid<U> {
        Grid {
            axis1: self.axis1.clone(),
            axis2: self.axis2.clone(),
            cells: self
                .cells
                .iter()
                .map(|c| c.as_ref().map(&f).map_err(Clone::clone))
                .collect(),
        }
    }
}

/// Evaluate `f` on every 1-D sweep point, in order.
pub fn eval_sweep<T, F>(base: &Scenario, axis: &SweepSpec, exec: Execution, f: F) -> Vec<Result<T>>
where
    T: Send,
    F: Fn(&Scenario) -> Result<T> + Sync,
{
    exec.map(axis.len(), |k| f(&axis.scenario_at(base, k)))
}

/// Evaluate `f` on the dense `axis1 x axis2` grid. Axis 1 is applied first.
pub fn eval_grid<T, F>(
    base: &Scenario,
    axis1: &SweepSpec,
    axis2: &SweepSpec,
    exec: Execution,
    f: F,
) -> Result<Grid<T>>
where
    T: Send,
    F: Fn(&Scenario) -> Result<T> + Sync,
{
    axis1.require_len(2)?;
    axis2.require_len(2)?;
    let n2 = axis2.len();
    let cells = exec.map(axis1.len() * n2, |k| {
        let mut sc = *base;
        axis1.axis.apply(&mut sc, axis1.values[k / n2]);
        axis2.axis.apply(&mut sc, axis2.values[k % n2]);
        f(&sc)
    });
    Ok(Grid {
        axis1: axis1.clone(),
        axis2: axis2.clone(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::CircuitParams;

    #[test]
    fn linspace_hits_both_ends() {
        let v = linspace(-3.0, 3.0, 201);
        assert_eq!(v.len(), 201);
        assert_eq!(v[0], -3.0);
        assert_eq!(v[200], 3.0);
        assert!((v[100]).abs() < 1e-15);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
    }

    #[test]
    fn axis_names_round_trip() {
        for name in Axis::NAMES {
            let axis: Axis = name.parse().unwrap();
            assert_eq!(axis.name(), name);
        }
        assert!("gee".parse::<Axis>().is_err());
    }

    #[test]
    fn axes_write_the_intended_fields() {
        let base = Scenario::new(CircuitParams::fig2());
        let mut sc = base;
        Axis::SigmaZ(SigmaPattern::Antisymmetric).apply(&mut sc, 0.3);
        assert_eq!(sc.circuit.sigma_z, [0.3, -0.3]);
        Axis::Lambda.apply(&mut sc, 10.6);
        assert_eq!(sc.circuit.lambda_q, [10.6, 10.6]);
        Axis::GE.apply(&mut sc, 1.224);
        assert_eq!(sc.overrides.g_e, Some(1.224));
        Axis::OmegaC.apply(&mut sc, 6000.0);
        assert_eq!(sc.circuit.omega_c, 6000.0);
    }
}
