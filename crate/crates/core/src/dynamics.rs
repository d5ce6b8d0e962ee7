//! No-jump dynamics `d rho/dt = -i (H rho - rho H^dagger)` in the basis
//! `{|eg>, |ge>}`.
//!
//! Two engines: the exact propagator `rho(t) = V rho(0) V^dagger` with
//! `V = exp(-i H t)`, and fixed-step RK4. Populations are reported both raw
//! (diagonal of `rho`) and normalized by the trace.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{Mat2, ONE, ZERO};
use crate::model::EffectiveModel;
use crate::params::Scenario;
use crate::spectrum::{direct_eigenvalues, eigenmodes, eigenvector};

/// Condition number of the eigenvector matrix above which the exact engine
/// switches to the Taylor propagator.
pub const COND_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `sigma_z = (1, -1)`: `rho(0) = |eg><eg|`.
    Qubit1Excited,
    /// `sigma_z = (-1, 1)`: `rho(0) = |ge><ge|`.
    Qubit2Excited,
    /// `sigma_z = (1, 1)`. Run as two single-excitation trajectories, one per
    /// initially excited qubit; `p1` is read from the first and `p2` from the
    /// second.
    BothExcited,
}

impl InitialState {
    pub fn from_sigma_pair(s: [f64; 2]) -> Result<Self> {
        match (s[0], s[1]) {
            (a, b) if a == 1.0 && b == -1.0 => Ok(InitialState::Qubit1Excited),
            (a, b) if a == -1.0 && b == 1.0 => Ok(InitialState::Qubit2Excited),
            (a, b) if a == 1.0 && b == 1.0 => Ok(InitialState::BothExcited),
            _ => Err(invalid(
                "initial_sigma_z",
                format!("expected (1, -1), (-1, 1) or (1, 1), got ({}, {})", s[0], s[1]),
            )),
        }
    }

    pub fn sigma_pair(self) -> [f64; 2] {
        match self {
            InitialState::Qubit1Excited => [1.0, -1.0],
            InitialState::Qubit2Excited => [-1.0, 1.0],
            InitialState::BothExcited => [1.0, 1.0],
        }
    }

    fn rho(q: usize) -> Mat2 {
        if q == 0 {
            Mat2::diag(ONE, ZERO)
        } else {
            Mat2::diag(ZERO, ONE)
        }
    }
}

/// How `<sigma_z^(j)>` inside `Gamma_j` is treated during a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationFeedback {
    /// Keep the scenario's own `<sigma_z>`.
    Off,
    /// Fix `<sigma_z>` at the initial pair for the whole run.
    #[default]
    Frozen,
    /// Rebuild `H` every RK4 stage from `<sigma_z^(j)> = 2 rho_jj - 1`
    /// (clamped to `[-1, 1]`). Not part of the reduced model; a probe only.
    SelfConsistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Exact,
    /// RK4 with `substeps` steps per output interval (`None`: chosen so that
    /// `h |H'| <= 0.005`, with `H'` the trace-shifted Hamiltonian).
    Rk4 { substeps: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    /// `t_max` is given as `Omega_n t`.
    #[default]
    OmegaN,
    /// `t_max` is raw time, `1/(2 pi MHz)`.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveSpec {
    pub initial: InitialState,
    pub t_max: f64,
    /// Number of output intervals; `n_steps + 1` states are reported.
    pub n_steps: usize,
    pub feedback: PopulationFeedback,
    pub engine: Engine,
    pub time_unit: TimeUnit,
}

impl Default for EvolveSpec {
    fn default() -> Self {
        EvolveSpec {
            initial: InitialState::Qubit1Excited,
            t_max: 50.0,
            n_steps: 1000,
            feedback: PopulationFeedback::Frozen,
            engine: Engine::Exact,
            time_unit: TimeUnit::OmegaN,
        }
    }
}

impl EvolveSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(invalid("t_max", format!("must be positive, got {}", self.t_max)));
        }
        if self.n_steps < 2 {
            return Err(invalid("n_steps", format!("must be >= 2, got {}", self.n_steps)));
        }
        if let Engine::Rk4 { substeps: Some(0) } = self.engine {
            return Err(invalid("substeps", "must be >= 1"));
        }
        Ok(())
    }

    /// Raw end time for a model with dissipative scale `omega_n`.
    pub fn raw_t_max(&self, omega_n: f64) -> Result<f64> {
        match self.time_unit {
            TimeUnit::Raw => Ok(self.t_max),
            TimeUnit::OmegaN if omega_n > 0.0 => Ok(self.t_max / omega_n),
            TimeUnit::OmegaN => Err(invalid(
                "time_unit",
                "Omega_n t is undefined for Omega_n = 0; use raw time",
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryState {
    /// Raw time.
    pub t: f64,
    pub omega_n_t: f64,
    pub rho: Mat2,
    pub trace: f64,
    pub p1: f64,
    pub p2: f64,
    pub p1_raw: f64,
    pub p2_raw: f64,
}

impl TrajectoryState {
    fn new(t: f64, omega_n: f64, rho: Mat2) -> Self {
        let p1_raw = rho[(0, 0)].re;
        let p2_raw = rho[(1, 1)].re;
        let trace = p1_raw + p2_raw;
        TrajectoryState {
            t,
            omega_n_t: omega_n * t,
            rho,
            trace,
            p1: p1_raw / trace,
            p2: p2_raw / trace,
            p1_raw,
            p2_raw,
        }
    }

    /// Hermiticity, positivity and normalization, relative to the trace.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let scale = self.trace.abs().max(1.0);
        let herm = self.rho.max_abs_diff(&self.rho.adjoint());
        if herm > 1e-12 * scale {
            return Err(format!("rho not Hermitian at t = {}: {herm:e}", self.t));
        }
        let min_eig = self.rho.hermitian_eigenvalues()[0];
        if min_eig < -1e-10 * scale {
            return Err(format!("rho not positive at t = {}: {min_eig:e}", self.t));
        }
        if (self.p1 + self.p2 - 1.0).abs() > 1e-12 {
            return Err(format!("p1 + p2 = {} at t = {}", self.p1 + self.p2, self.t));
        }
        Ok(())
    }
}

/// Result of a scenario run: one trajectory, or two for `BothExcited`.
#[derive(Debug, Clone, PartialEq)]
pub enum Evolution {
    Single(Vec<TrajectoryState>),
    Paired {
        from_q1: Vec<TrajectoryState>,
        from_q2: Vec<TrajectoryState>,
    },
}

/// One output row: `p1`, `p1_raw` and `trace` come from the qubit-1 run and
/// `p2`, `p2_raw` from the qubit-2 run when the evolution is paired.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationRow {
    pub t: f64,
    pub omega_n_t: f64,
    pub p1: f64,
    pub p2: f64,
    pub p1_raw: f64,
    pub p2_raw: f64,
    pub trace: f64,
}

impl Evolution {
    pub fn rows(&self) -> Vec<PopulationRow> {
        let row = |a: &TrajectoryState, b: &TrajectoryState| PopulationRow {
            t: a.t,
            omega_n_t: a.omega_n_t,
            p1: a.p1,
            p2: b.p2,
            p1_raw: a.p1_raw,
            p2_raw: b.p2_raw,
            trace: a.trace,
        };
        match self {
            Evolution::Single(s) => s.iter().map(|x| row(x, x)).collect(),
            Evolution::Paired { from_q1, from_q2 } => {
                from_q1.iter().zip(from_q2).map(|(a, b)| row(a, b)).collect()
            }
        }
    }

    pub fn states(&self) -> impl Iterator<Item = &TrajectoryState> {
        let (a, b): (&[TrajectoryState], &[TrajectoryState]) = match self {
            Evolution::Single(s) => (s, &[]),
            Evolution::Paired { from_q1, from_q2 } => (from_q1, from_q2),
        };
        a.iter().chain(b)
    }
}

/// `exp(-i H t)` by scaling and squaring of a Taylor series.
pub fn taylor_propagator(h: &Mat2, t: f64) -> Mat2 {
    let a = *h * C64::new(0.0, -t);
    let norm = a.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let a = a * (0.5f64).powi(squarings as i32);
    let mut term = Mat2::identity();
    let mut sum = Mat2::identity();
    for k in 1..=30 {
        term = term * a * (1.0 / k as f64);
        sum = sum + term;
        if term.norm() <= f64::EPSILON * 1e-2 * sum.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// Eigendecomposition of `h` for propagation, or `None` when the
/// eigenvector matrix is too ill-conditioned.
#[derive(Debug, Clone, Copy)]
pub struct Eigenbasis {
    pub values: [C64; 2],
    pub vectors: Mat2,
    pub inverse: Mat2,
}

impl Eigenbasis {
    pub fn new(h: &Mat2, values: [C64; 2], vecs: [[C64; 2]; 2]) -> Option<Self> {
        let s = Mat2::from_columns(vecs[0], vecs[1]);
        let inv = s.inverse()?;
        let cond = s.norm() * inv.norm();
        if cond.is_nan() || cond > COND_LIMIT || !h.is_finite() {
            return None;
        }
        Some(Eigenbasis {
            values,
            vectors: s,
            inverse: inv,
        })
    }

    /// From the trace/determinant eigenvalues of an arbitrary 2x2 matrix.
    pub fn of_matrix(h: &Mat2) -> Option<Self> {
        let w = direct_eigenvalues(h);
        Self::new(h, w, [eigenvector(h, w[0]), eigenvector(h, w[1])])
    }

    pub fn of_model(m: &EffectiveModel) -> Option<Self> {
        let sp = eigenmodes(m).ok()?;
        Self::new(&m.h_non, [sp.omega_plus, sp.omega_minus], sp.eigvecs)
    }

    pub fn propagator(&self, t: f64) -> Mat2 {
        let phase = |w: C64| (w * C64::new(0.0, -t)).exp();
        self.vectors * Mat2::diag(phase(self.values[0]), phase(self.values[1])) * self.inverse
    }
}

/// `exp(-i H t)` for the effective model, via the eigenbasis when it is
/// well conditioned and via the Taylor series otherwise.
pub fn propagator(m: &EffectiveModel, t: f64) -> Mat2 {
    match Eigenbasis::of_model(m) {
        Some(eb) => eb.propagator(t),
        None => taylor_propagator(&m.h_non, t),
    }
}

fn rhs(h: &Mat2, rho: &Mat2) -> Mat2 {
    (*h * *rho - *rho * h.adjoint()) * C64::new(0.0, -1.0)
}

fn rk4_step(h_at: &dyn Fn(&Mat2) -> Mat2, rho: &Mat2, dt: f64) -> Mat2 {
    let k1 = rhs(&h_at(rho), rho);
    let r2 = *rho + k1 * (0.5 * dt);
    let k2 = rhs(&h_at(&r2), &r2);
    let r3 = *rho + k2 * (0.5 * dt);
    let k3 = rhs(&h_at(&r3), &r3);
    let r4 = *rho + k3 * dt;
    let k4 = rhs(&h_at(&r4), &r4);
    *rho + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
}

/// A real shift `c` of `H` leaves the equation of motion unchanged; removing
/// the mean detuning keeps RK4 steps small.
fn shifted(h: &Mat2, c: f64) -> Mat2 {
    *h - Mat2::diag(C64::new(c, 0.0), C64::new(c, 0.0))
}

fn auto_substeps(h_norm: f64, dt: f64) -> usize {
    ((dt * h_norm / 0.005).ceil() as usize).max(1)
}

fn run(
    h0: &Mat2,
    h_at: Option<&dyn Fn(&Mat2) -> Mat2>,
    omega_n: f64,
    rho0: Mat2,
    t_max: f64,
    spec: &EvolveSpec,
) -> Result<Vec<TrajectoryState>> {
    let n = spec.n_steps;
    let dt = t_max / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    out.push(TrajectoryState::new(0.0, omega_n, rho0));
    match (spec.engine, h_at) {
        (Engine::Exact, None) => {
            let m_basis = Eigenbasis::of_matrix(h0);
            for k in 1..=n {
                let t = if k == n { t_max } else { dt * k as f64 };
                let v = match &m_basis {
                    Some(eb) => eb.propagator(t),
                    None => taylor_propagator(h0, t),
                };
                let rho = v * rho0 * v.adjoint();
                if !rho.is_finite() {
                    return Err(Error::NonFiniteState { step: k });
                }
                out.push(TrajectoryState::new(t, omega_n, rho));
            }
        }
        (Engine::Exact, Some(_)) => {
            return Err(invalid(
                "engine",
                "self-consistent feedback needs the RK4 engine (H changes in time)",
            ))
        }
        (Engine::Rk4 { substeps }, h_at) => {
            let c = 0.5 * h0.trace().re;
            let h0s = shifted(h0, c);
            let subs = substeps.unwrap_or_else(|| auto_substeps(h0s.norm() * 2.0, dt));
            let h = dt / subs as f64;
            let fixed = move |_: &Mat2| h0s;
            let dynamic = |r: &Mat2| shifted(&(h_at.unwrap())(r), c);
            let f: &dyn Fn(&Mat2) -> Mat2 = if h_at.is_some() { &dynamic } else { &fixed };
            let mut rho = rho0;
            for k in 1..=n {
                for _ in 0..subs {
                    rho = rk4_step(f, &rho, h);
                }
                if !rho.is_finite() {
                    return Err(Error::NonFiniteState { step: k });
                }
                let t = if k == n { t_max } else { dt * k as f64 };
                out.push(TrajectoryState::new(t, omega_n, rho));
            }
        }
    }
    Ok(out)
}

/// Evolve under a fixed effective Hamiltonian from `|eg>` or `|ge>`.
///
/// Population feedback is a scenario-level notion; use [`evolve_scenario`]
/// for it. Here `BothExcited` and `SelfConsistent` are rejected.
pub fn evolve(m: &EffectiveModel, spec: &EvolveSpec) -> Result<Vec<TrajectoryState>> {
    spec.validate()?;
    let q = match spec.initial {
        InitialState::Qubit1Excited => 0,
        InitialState::Qubit2Excited => 1,
        InitialState::BothExcited => {
            return Err(invalid("initial", "the paired run needs evolve_scenario"));
        }
    };
    if spec.feedback == PopulationFeedback::SelfConsistent {
        return Err(invalid("feedback", "self-consistent feedback needs evolve_scenario"));
    }
    let t_max = spec.raw_t_max(m.omega_n)?;
    run(&m.h_non, None, m.omega_n, InitialState::rho(q), t_max, spec)
}

/// Evolve a scenario, applying the population-feedback mode.
pub fn evolve_scenario(sc: &Scenario, spec: &EvolveSpec) -> Result<Evolution> {
    spec.validate()?;
    let mut sc = *sc;
    if spec.feedback != PopulationFeedback::Off {
        sc.circuit.sigma_z = spec.initial.sigma_pair();
    }
    let m = sc.model()?;
    let t_max = spec.raw_t_max(m.omega_n)?;
    let one = |q: usize| -> Result<Vec<TrajectoryState>> {
        let rho0 = InitialState::rho(q);
        if spec.feedback == PopulationFeedback::SelfConsistent {
            let h_at = |r: &Mat2| -> Mat2 {
                let mut s = sc;
                s.circuit.sigma_z = [0, 1].map(|j| (2.0 * r[(j, j)].re - 1.0).clamp(-1.0, 1.0));
                s.model().map(|m| m.h_non).unwrap_or(m.h_non)
            };
            let spec = EvolveSpec {
                engine: match spec.engine {
                    Engine::Exact => Engine::Rk4 { substeps: None },
                    e => e,
                },
                ..*spec
            };
            run(&m.h_non, Some(&h_at), m.omega_n, rho0, t_max, &spec)
        } else {
            run(&m.h_non, None, m.omega_n, rho0, t_max, spec)
        }
    };
    Ok(match spec.initial {
        InitialState::Qubit1Excited => Evolution::Single(one(0)?),
        InitialState::Qubit2Excited => Evolution::Single(one(1)?),
        InitialState::BothExcited => Evolution::Paired {
            from_q1: one(0)?,
            from_q2: one(1)?,
        },
    })
}

/// Normalized populations of the slowest-decaying eigenmode, the
/// `t -> infinity` limit of the normalized populations.
pub fn steady_populations(m: &EffectiveModel) -> Result<(f64, f64)> {
    let sp = eigenmodes(m)?;
    let gap = (sp.omega_plus.im - sp.omega_minus.im).abs();
    if gap < 1e-9 {
        return Err(Error::DegenerateDecay(gap));
    }
    let v = if sp.omega_plus.im > sp.omega_minus.im {
        sp.eigvecs[0]
    } else {
        sp.eigvecs[1]
    };
    let n = v[0].norm_sqr() + v[1].norm_sqr();
    Ok((v[0].norm_sqr() / n, v[1].norm_sqr() / n))
}
