//! Resolved single-excitation models used to check the two reductions: the
//! adiabatic elimination of the resonator and the coupler-mediated `g_e`.
//!
//! Amplitudes evolve as `dx/dt = -i M x` in the frame rotating at `omega_a`.
//! The photon diagonal is `-i gamma_a` and the qubit-photon edges are
//! `lambda_j exp(+i theta_j)` (qubit row) and `lambda_j exp(-i theta_j)`
//! (photon row). Large eigenproblems go through nalgebra (complex Schur form
//! plus an SVD null vector); nothing here reuses the closed forms of
//! [`crate::spectrum`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::Mat2;
use crate::model::{coupler_mediated_coupling, derive_effective_model};
use crate::params::CircuitParams;
use crate::spectrum::{branch_sqrt, eigenmodes};

/// Qubit diagonal convention for the resonator-resolved model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetuningConvention {
    /// `(D'_j - i gamma_j)/2`, the normalization of the effective
    /// Hamiltonian's diagonal. With it the `lambda = 0` block reproduces the
    /// effective model exactly.
    #[default]
    Effective,
    /// `D'_j - i gamma_j/2`, the amplitude equations term by term.
    Physical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullModel {
    pub dim: usize,
    pub matrix: DMatrix<C64>,
    pub basis_labels: Vec<&'static str>,
}

impl FullModel {
    /// Indices of the qubit amplitudes.
    pub const QUBITS: [usize; 2] = [0, 1];
    pub const PHOTON: usize = 2;
}

/// Build the single-excitation matrix `M`.
///
/// Without the coupler: basis `(q1, q2, photon)`, qubit-qubit edge `g_e`, qubit
/// detunings `D'_ja`. With the coupler: basis `(q1, q2, photon, coupler)`,
/// bare detunings `Delta_ja`, coupler diagonal `Delta_ca - i gamma_c/2`, edges
/// `g_xy`, `g_1`, `g_2`, and no coupler-photon edge. The coupler model always
/// uses the physical convention.
pub fn build_full_model(p: &CircuitParams, with_coupler: bool, conv: DetuningConvention) -> Result<FullModel> {
    p.validate()?;
    let c = |re: f64, im: f64| C64::new(re, im);
    let dim = if with_coupler { 4 } else { 3 };
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for j in 0..2 {
        let (det, half) = if with_coupler {
            (p.detuning_qa(j), false)
        } else {
            let dp = p.detuning_qa(j) + p.g_qc[j] * p.g_qc[j] / p.detuning_qc(j);
            (dp, conv == DetuningConvention::Effective)
        };
        m[(j, j)] = if half {
            c(det, -p.gamma_q[j]) * 0.5
        } else {
            c(det, -0.5 * p.gamma_q[j])
        };
        m[(j, 2)] = C64::from_polar(p.lambda_q[j], p.theta_q[j]);
        m[(2, j)] = C64::from_polar(p.lambda_q[j], -p.theta_q[j]);
    }
    m[(2, 2)] = c(0.0, -p.gamma_a);
    let mut labels = vec!["q1", "q2", "photon"];
    if with_coupler {
        m[(0, 1)] = c(p.g_xy, 0.0);
        m[(1, 0)] = c(p.g_xy, 0.0);
        m[(3, 3)] = c(p.detuning_ca(), -0.5 * p.gamma_c);
        for j in 0..2 {
            m[(j, 3)] = c(p.g_qc[j], 0.0);
            m[(3, j)] = c(p.g_qc[j], 0.0);
        }
        labels.push("coupler");
    } else {
        let g_e = coupler_mediated_coupling(p)?;
        m[(0, 1)] = c(g_e, 0.0);
        m[(1, 0)] = c(g_e, 0.0);
    }
    Ok(FullModel {
        dim,
        matrix: m,
        basis_labels: labels,
    })
}

/// Eigenvalues (Schur diagonal) and unit right eigenvectors.
pub fn eigensystem(m: &DMatrix<C64>) -> Vec<(C64, DVector<C64>)> {
    let n = m.nrows();
    let (_, t) = nalgebra::Schur::new(m.clone()).unpack();
    (0..n)
        .map(|k| {
            let w = t[(k, k)];
            let shifted = m - DMatrix::<C64>::identity(n, n) * w;
            let svd = shifted.svd(false, true);
            let v_t = svd.v_t.expect("requested V^T");
            let idx = svd
                .singular_values
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap_or(0);
            let v: DVector<C64> = v_t.row(idx).transpose().map(|z| z.conj());
            let norm = v.norm();
            (w, v / C64::new(norm, 0.0))
        })
        .collect()
}

fn qubit_weight(v: &DVector<C64>) -> f64 {
    FullModel::QUBITS.iter().map(|&q| v[q].norm_sqr()).sum::<f64>() / v.norm_squared()
}

/// The two eigenpairs with the largest qubit-subspace weight.
fn slow_modes(fm: &FullModel) -> Result<[(C64, DVector<C64>); 2]> {
    let mut modes = eigensystem(&fm.matrix);
    modes.sort_by(|a, b| qubit_weight(&b.1).total_cmp(&qubit_weight(&a.1)));
    let weakest = qubit_weight(&modes[1].1);
    if weakest < 0.5 {
        return Err(Error::SlowModeAmbiguity(weakest));
    }
    let mut it = modes.into_iter();
    Ok([it.next().unwrap(), it.next().unwrap()])
}

/// Difference of two eigenvalues on the same branch as the effective
/// splitting (`Re >= 0`, then `Im >= 0`).
fn oriented_gap(a: C64, b: C64) -> C64 {
    let d = a - b;
    // branch_sqrt(d^2) picks +-d by the same rule as the effective model.
    let s = branch_sqrt(d * d);
    if (s - d).norm() <= (s + d).norm() {
        d
    } else {
        -d
    }
}

fn qubit_block(m: &DMatrix<C64>) -> Mat2 {
    Mat2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

/// Zeroth-order elimination of the photon: `a = -M_pq x / M_pp` with
/// `M_pp -> -i gamma_a`. Returns the reduced generator `-i M_red`, where
/// `M_red = M_qq - i M_qp M_pq / gamma_a`.
pub fn adiabatic_elimination(fm: &FullModel) -> Result<Mat2> {
    if fm.dim != 3 {
        return Err(Error::InvalidSpec(format!(
            "adiabatic elimination needs the 3-mode model, got dim {}",
            fm.dim
        )));
    }
    let m = &fm.matrix;
    let gamma_a = -m[(2, 2)].im;
    let mut red = qubit_block(m);
    for r in 0..2 {
        for c in 0..2 {
            red[(r, c)] -= C64::i() * m[(r, 2)] * m[(2, c)] / gamma_a;
        }
    }
    Ok(red * C64::new(0.0, -1.0))
}

/// Exact frequency-dependent Schur complement
/// `M_qq - M_qp (M_pp - omega)^(-1) M_pq` over all non-qubit modes.
pub fn exact_schur(fm: &FullModel, omega: C64) -> Result<Mat2> {
    let n = fm.dim;
    let m = &fm.matrix;
    let rest = n - 2;
    let pp = DMatrix::from_fn(rest, rest, |r, c| m[(r + 2, c + 2)])
        - DMatrix::<C64>::identity(rest, rest) * omega;
    let inv = pp
        .try_inverse()
        .ok_or_else(|| Error::InvalidSpec(format!("photon block singular at omega = {omega}")))?;
    let qp = DMatrix::from_fn(2, rest, |r, c| m[(r, c + 2)]);
    let pq = DMatrix::from_fn(rest, 2, |r, c| m[(r + 2, c)]);
    let corr = qp * inv * pq;
    let mut out = qubit_block(m);
    for r in 0..2 {
        for c in 0..2 {
            out[(r, c)] -= corr[(r, c)];
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub gamma_a: f64,
    /// `omega_+ - omega_-` of the effective model.
    pub eff_splitting: C64,
    /// Gap of the two slow eigenvalues of the resolved model.
    pub full_splitting: C64,
    pub rel_error: f64,
    /// Max deviation of the eliminated off-diagonals from `-i h_non`.
    pub offdiag_residual: f64,
    /// Smallest overlap of the slow eigenvectors with those at the previous
    /// schedule entry (`None` for the first entry).
    pub tracking_overlap: Option<f64>,
}

/// Off-diagonal elimination identity residual for one parameter set.
pub fn offdiag_identity_residual(p: &CircuitParams) -> Result<f64> {
    let fm = build_full_model(p, false, DetuningConvention::Effective)?;
    let red = adiabatic_elimination(&fm)?;
    let h = derive_effective_model(p)?.h_non;
    let mi = C64::new(0.0, -1.0);
    Ok((red[(0, 1)] - mi * h[(0, 1)])
        .norm()
        .max((red[(1, 0)] - mi * h[(1, 0)]).norm()))
}

fn slow_qubit_vectors(modes: &[(C64, DVector<C64>); 2]) -> [[C64; 2]; 2] {
    modes
        .each_ref()
        .map(|(_, v)| crate::linalg::normalized([v[0], v[1]]))
}

/// Effective vs resolved splitting along a schedule of resonator losses.
pub fn compare_reduction(
    p: &CircuitParams,
    gamma_a_schedule: &[f64],
    conv: DetuningConvention,
    exec: Execution,
) -> Result<Vec<ReductionReport>> {
    let per_point = exec.map_slice(gamma_a_schedule, |&gamma_a| -> Result<_> {
        let q = CircuitParams { gamma_a, ..*p };
        let sp = eigenmodes(&derive_effective_model(&q)?)?;
        let eff = sp.omega_plus - sp.omega_minus;
        let fm = build_full_model(&q, false, conv)?;
        let slow = slow_modes(&fm)?;
        let full = oriented_gap(slow[0].0, slow[1].0);
        let rel_error = (eff - full).norm() / full.norm();
        let offdiag = offdiag_identity_residual(&q)?;
        Ok((gamma_a, eff, full, rel_error, offdiag, slow_qubit_vectors(&slow)))
    });
    let mut out = Vec::with_capacity(per_point.len());
    let mut prev: Option<[[C64; 2]; 2]> = None;
    for r in per_point {
        let (gamma_a, eff, full, rel_error, offdiag, vecs) = r?;
        let tracking_overlap = prev.map(|pv| {
            let ov = |a: [C64; 2], b: [C64; 2]| crate::linalg::inner(a, b).norm();
            pv.iter()
                .map(|&a| ov(a, vecs[0]).max(ov(a, vecs[1])))
                .fold(f64::INFINITY, f64::min)
        });
        prev = Some(vecs);
        out.push(ReductionReport {
            gamma_a,
            eff_splitting: eff,
            full_splitting: full,
            rel_error,
            offdiag_residual: offdiag,
            tracking_overlap,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplerReport {
    pub omega_c: f64,
    /// `max_j g_j / |Delta_jc|`.
    pub dispersive_ratio: f64,
    /// Slow splitting of the 3-mode model with `g_e` on the qubit edge.
    pub reduced_splitting: C64,
    /// Slow splitting of the coupler-resolved model.
    pub full_splitting: C64,
    pub rel_error: f64,
}

/// Coupler-resolved vs `g_e`-reduced qubit splitting with the resonator
/// decoupled, for each coupler frequency.
pub fn compare_coupler_reduction(p: &CircuitParams, omega_c_values: &[f64]) -> Result<Vec<CouplerReport>> {
    omega_c_values
        .iter()
        .map(|&omega_c| {
            let q = CircuitParams {
                omega_c,
                lambda_q: [0.0, 0.0],
                ..*p
            };
            let reduced = slow_modes(&build_full_model(&q, false, DetuningConvention::Physical)?)?;
            let full = slow_modes(&build_full_model(&q, true, DetuningConvention::Physical)?)?;
            let rs = oriented_gap(reduced[0].0, reduced[1].0);
            let fs = oriented_gap(full[0].0, full[1].0);
            Ok(CouplerReport {
                omega_c,
                dispersive_ratio: q.coupler_dispersive_ratio(),
                reduced_splitting: rs,
                full_splitting: fs,
                rel_error: (rs - fs).norm() / fs.norm(),
            })
        })
        .collect()
}
