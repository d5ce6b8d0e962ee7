//! Complex eigenmodes of the effective Hamiltonian.
//!
//! The eigenvalues are `omega_pm = tr(H)/2 +- s/2` with `s = sqrt(R + iI)`,
//! where `R` and `I` are the discriminant components
//!
//! ```text
//! R = (D'_1 - D'_2)^2/4 - (G_1 - G_2)^2/4 + 4 g_e^2 - 4 W^2
//! I = -8 g_e W cos(dtheta) - (G_1 - G_2)(D'_1 - D'_2)/2
//! ```
//!
//! so `(omega_+ - omega_-)^2 = R + iI`. The splittings are reported as
//! `delta_e = 2 Re s` and `delta_gamma = 2 Im s`, i.e. twice the eigenvalue
//! gaps. `s` is taken on the branch with `Re s >= 0` (and `Im s >= 0` when
//! `Re s = 0`), so `delta_e >= 0` and `delta_gamma` carries the sign.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{normalized, vec_norm, Mat2, ONE, ZERO};
use crate::model::EffectiveModel;
use crate::params::Scenario;
use crate::sweep::{eval_grid, eval_sweep, Grid, SweepSpec};

/// Relative bound on `|(H - w) v| / |H|` for the closed-form eigenpairs.
pub const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub omega_plus: C64,
    pub omega_minus: C64,
    pub r_disc: f64,
    pub i_disc: f64,
    pub delta_e: f64,
    pub delta_gamma: f64,
    /// Unit right eigenvectors for `omega_plus` and `omega_minus`.
    pub eigvecs: [[C64; 2]; 2],
}

/// `(R, I)` from the model fields.
pub fn discriminant(m: &EffectiveModel) -> (f64, f64) {
    let dd = m.delta_prime[0] - m.delta_prime[1];
    let dg = m.big_gamma[0] - m.big_gamma[1];
    let g = m.g_e;
    let w = m.omega_n;
    let r = dd * dd / 4.0 - dg * dg / 4.0 + 4.0 * g * g - 4.0 * w * w;
    let i = -8.0 * g * w * m.delta_theta.cos() - dg * dd / 2.0;
    (r, i)
}

/// Square root with `Re >= 0`, and `Im >= 0` on the imaginary axis.
pub fn branch_sqrt(z: C64) -> C64 {
    let s = z.sqrt();
    if s.re < 0.0 || (s.re == 0.0 && s.im < 0.0) {
        -s
    } else {
        s
    }
}

/// Right eigenvector of `h` for eigenvalue `w`, unit norm.
///
/// Built from whichever row of `h - w` gives the better-conditioned null
/// vector; falls back to a basis vector when `h` is (numerically) diagonal.
pub fn eigenvector(h: &Mat2, w: C64) -> [C64; 2] {
    let (a, b, c, d) = (h[(0, 0)], h[(0, 1)], h[(1, 0)], h[(1, 1)]);
    let from_row0 = [b, w - a];
    let from_row1 = [w - d, c];
    let v = if vec_norm(from_row0) >= vec_norm(from_row1) {
        from_row0
    } else {
        from_row1
    };
    let scale = h.norm().max(f64::MIN_POSITIVE);
    if vec_norm(v) > 1e-12 * scale {
        return normalized(v);
    }
    let e = [[ONE, ZERO], [ZERO, ONE]];
    let res = |u: [C64; 2]| {
        let hu = h.mul_vec(u);
        vec_norm([hu[0] - w * u[0], hu[1] - w * u[1]])
    };
    if res(e[0]) <= res(e[1]) {
        e[0]
    } else {
        e[1]
    }
}

fn residual(h: &Mat2, w: C64, v: [C64; 2]) -> f64 {
    let hv = h.mul_vec(v);
    vec_norm([hv[0] - w * v[0], hv[1] - w * v[1]]) / vec_norm(v)
}

/// Closed-form eigenmodes, checked against the matrix itself.
pub fn eigenmodes(m: &EffectiveModel) -> Result<SpectrumPoint> {
    let (r, i) = discriminant(m);
    let s = branch_sqrt(C64::new(r, i));
    let centre = m.h_non.trace() * 0.5;
    let omega_plus = centre + s * 0.5;
    let omega_minus = centre - s * 0.5;
    let h = &m.h_non;
    let eigvecs = [eigenvector(h, omega_plus), eigenvector(h, omega_minus)];
    let bound = RESIDUAL_TOL * h.norm();
    let worst = residual(h, omega_plus, eigvecs[0]).max(residual(h, omega_minus, eigvecs[1]));
    if worst.is_nan() || worst > bound {
        return Err(Error::ResidualCheckFailed {
            residual: worst,
            bound,
        });
    }
    Ok(SpectrumPoint {
        omega_plus,
        omega_minus,
        r_disc: r,
        i_disc: i,
        delta_e: 2.0 * s.re,
        delta_gamma: 2.0 * s.im,
        eigvecs,
    })
}

/// Eigenvalues from the trace and determinant of `h` alone, ordered by the
/// same branch rule. Used as an independent route in checks.
pub fn direct_eigenvalues(h: &Mat2) -> [C64; 2] {
    let tr = h.trace();
    let disc = tr * tr - h.det() * 4.0;
    let s = branch_sqrt(disc);
    [(tr + s) * 0.5, (tr - s) * 0.5]
}

/// Spectrum of a scenario.
pub fn spectrum_at(sc: &Scenario) -> Result<SpectrumPoint> {
    eigenmodes(&sc.model()?)
}

pub fn sweep_1d(base: &Scenario, axis: &SweepSpec, exec: Execution) -> Vec<Result<SpectrumPoint>> {
    eval_sweep(base, axis, exec, spectrum_at)
}

/// Dense spectrum grid; cells whose parameters are singular stay masked.
pub fn scan_2d(
    base: &Scenario,
    axis1: &SweepSpec,
    axis2: &SweepSpec,
    exec: Execution,
) -> Result<Grid<SpectrumPoint>> {
    eval_grid(base, axis1, axis2, exec, spectrum_at)
}

/// Continuous eigenvalue branches along a sweep.
///
/// Consecutive points are paired by the smaller total complex distance, so
/// branches do not jump where the branch-rule labels flip. Masked points
/// (`None`) break nothing: pairing resumes from the last good point.
pub fn track_branches(points: &[Option<SpectrumPoint>]) -> Vec<Option<[C64; 2]>> {
    let mut prev: Option<[C64; 2]> = None;
    points
        .iter()
        .map(|p| {
            let p = p.as_ref()?;
            let cur = [p.omega_plus, p.omega_minus];
            let out = match prev {
                None => cur,
                Some([a, b]) => {
                    let keep = (cur[0] - a).norm() + (cur[1] - b).norm();
                    let swap = (cur[1] - a).norm() + (cur[0] - b).norm();
                    if swap < keep {
                        [cur[1], cur[0]]
                    } else {
                        cur
                    }
                }
            };
            prev = Some(out);
            Some(out)
        })
        .collect()
}
