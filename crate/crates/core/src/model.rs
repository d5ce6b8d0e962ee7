//! Effective non-Hermitian two-qubit Hamiltonian.
//!
//! The coupler is removed by a Schrieffer-Wolff reduction, which shifts each
//! qubit by `g_j^2 / Delta_jc` and leaves the coherent coupling
//! `g_e = g_xy + g_1 g_2 / Delta_e` with `2 / Delta_e = 1/Delta_1c + 1/Delta_2c`.
//! The lossy resonator is then eliminated adiabatically, which leaves
//!
//! ```text
//! H_non = [ (D'_1 - i G_1)/2             g_e - i W exp(+i dtheta) ]
//!         [ g_e - i W exp(-i dtheta)     (D'_2 - i G_2)/2         ]
//! ```
//!
//! with `D'_j = Delta_ja + g_j^2/Delta_jc`, `G_j = gamma_j + lambda_j^2 <sigma_z^j> / gamma_a`,
//! `W = Omega_n = lambda_1 lambda_2 / gamma_a` and `dtheta = theta_1 - theta_2`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::Mat2;
use crate::params::{CircuitParams, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveModel {
    /// `Delta'_ja`, MHz.
    pub delta_prime: [f64; 2],
    /// `Gamma_j`, MHz. Negative values are effective gain.
    pub big_gamma: [f64; 2],
    /// Coherent qubit-qubit coupling, MHz.
    pub g_e: f64,
    /// Dissipative coupling scale `lambda_1 lambda_2 / gamma_a`, MHz.
    pub omega_n: f64,
    /// `theta_1 - theta_2`, radians.
    pub delta_theta: f64,
    pub h_non: Mat2,
}

impl EffectiveModel {
    pub fn from_parts(
        delta_prime: [f64; 2],
        big_gamma: [f64; 2],
        g_e: f64,
        omega_n: f64,
        delta_theta: f64,
    ) -> Self {
        let half = |j: usize| C64::new(delta_prime[j], -big_gamma[j]) * 0.5;
        let i = C64::i();
        let h_non = Mat2::new(
            half(0),
            g_e - i * omega_n * C64::from_polar(1.0, delta_theta),
            g_e - i * omega_n * C64::from_polar(1.0, -delta_theta),
            half(1),
        );
        EffectiveModel {
            delta_prime,
            big_gamma,
            g_e,
            omega_n,
            delta_theta,
            h_non,
        }
    }

    pub fn with_g_e(&self, g_e: f64) -> Self {
        Self::from_parts(self.delta_prime, self.big_gamma, g_e, self.omega_n, self.delta_theta)
    }

    pub fn with_big_gamma(&self, big_gamma: [f64; 2]) -> Self {
        Self::from_parts(self.delta_prime, big_gamma, self.g_e, self.omega_n, self.delta_theta)
    }

    pub fn with_delta_prime(&self, delta_prime: [f64; 2]) -> Self {
        Self::from_parts(delta_prime, self.big_gamma, self.g_e, self.omega_n, self.delta_theta)
    }

    pub fn with_delta_theta(&self, delta_theta: f64) -> Self {
        Self::from_parts(self.delta_prime, self.big_gamma, self.g_e, self.omega_n, delta_theta)
    }

    /// Anti-Hermitian part `(H - H^dagger) / 2i`; the trace of `rho` decays at
    /// rate `2 tr(K rho)` with `K` this matrix.
    pub fn loss_operator(&self) -> Mat2 {
        (self.h_non - self.h_non.adjoint()) * C64::new(0.0, -0.5)
    }
}

/// Coupler-mediated coherent coupling `g_e = g_xy + g_1 g_2 / Delta_e`.
pub fn coupler_mediated_coupling(p: &CircuitParams) -> Result<f64> {
    let d1 = p.detuning_qc(0);
    let d2 = p.detuning_qc(1);
    if d1 == 0.0 || d2 == 0.0 {
        return Err(Error::DegenerateDetuning(format!(
            "qubit-coupler detuning vanishes at omega_c = {}",
            p.omega_c
        )));
    }
    // 1/Delta_e = (1/Delta_1c + 1/Delta_2c) / 2; finite even when Delta_e is not.
    let inv_delta_e = 0.5 * (1.0 / d1 + 1.0 / d2);
    Ok(p.g_xy + p.g_qc[0] * p.g_qc[1] * inv_delta_e)
}

pub fn derive_effective_model(p: &CircuitParams) -> Result<EffectiveModel> {
    p.validate()?;
    let g_e = coupler_mediated_coupling(p)?;
    let delta_prime = [0, 1].map(|j| p.detuning_qa(j) + p.g_qc[j] * p.g_qc[j] / p.detuning_qc(j));
    let big_gamma =
        [0, 1].map(|j| p.gamma_q[j] + p.lambda_q[j] * p.lambda_q[j] * p.sigma_z[j] / p.gamma_a);
    let omega_n = p.lambda_q[0] * p.lambda_q[1] / p.gamma_a;
    Ok(EffectiveModel::from_parts(
        delta_prime,
        big_gamma,
        g_e,
        omega_n,
        p.delta_theta(),
    ))
}

impl Scenario {
    /// Effective model with overrides applied.
    pub fn model(&self) -> Result<EffectiveModel> {
        let mut m = derive_effective_model(&self.circuit)?;
        if let Some(g_e) = self.overrides.g_e {
            if !g_e.is_finite() {
                return Err(invalid("g_e", "must be finite"));
            }
            m = m.with_g_e(g_e);
        }
        if let Some(r) = self.overrides.gamma_ratio {
            if !r.is_finite() {
                return Err(invalid("gamma_ratio", "must be finite"));
            }
            m = m.with_big_gamma([m.big_gamma[0], r * m.big_gamma[0]]);
        }
        Ok(m)
    }

    /// `g_e` in effect for this scenario.
    pub fn g_e(&self) -> Result<f64> {
        match self.overrides.g_e {
            Some(g) => Ok(g),
            None => coupler_mediated_coupling(&self.circuit),
        }
    }
}

/// Map a coupler-frequency sweep to the induced coherent coupling.
pub fn sweep_ge_via_coupler(p: &CircuitParams, omega_c_values: &[f64]) -> Result<Vec<(f64, f64)>> {
    omega_c_values
        .iter()
        .map(|&omega_c| {
            let q = CircuitParams { omega_c, ..*p };
            coupler_mediated_coupling(&q).map(|g| (omega_c, g))
        })
        .collect()
}

/// Drive parameters that set the effective resonator-qubit coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Bare coupling `lambda_j^(0)`, MHz.
    pub lambda0: f64,
    /// Qubit anharmonicity, MHz (negative for transmons).
    pub alpha: f64,
    /// Drive amplitude `|Omega_j|`, MHz.
    pub drive_amp: f64,
    /// `Delta_ja = omega_j - omega_a`, MHz.
    pub delta_ja: f64,
}

pub const DEFAULT_DISPERSIVE_RATIO: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveCoupling {
    /// `|lambda_j|`; the phase lives in `theta_j`.
    pub magnitude: f64,
    /// The formula value before taking the magnitude.
    pub signed: f64,
    /// `lambda0 / min(|Delta_ja|, |Delta_ja + alpha|)`.
    pub dispersive_ratio: f64,
    /// False when `dispersive_ratio` exceeds the threshold. Not an error.
    pub dispersive_ok: bool,
}

/// `lambda_j = (1/sqrt2) lambda0 alpha |Omega| / (Delta_ja (Delta_ja + alpha))`.
pub fn lambda_from_drive(d: &DriveParams, ratio_threshold: f64) -> Result<DriveCoupling> {
    let shifted = d.delta_ja + d.alpha;
    if d.delta_ja == 0.0 || shifted == 0.0 {
        return Err(Error::DegenerateDetuning(format!(
            "drive conversion needs Delta_ja != 0 and Delta_ja + alpha != 0 (got {}, {})",
            d.delta_ja, shifted
        )));
    }
    let signed =
        std::f64::consts::FRAC_1_SQRT_2 * d.lambda0 * d.alpha * d.drive_amp / (d.delta_ja * shifted);
    let dispersive_ratio = d.lambda0.abs() / d.delta_ja.abs().min(shifted.abs());
    let dispersive_ok = dispersive_ratio <= ratio_threshold;
    if !dispersive_ok {
        log::warn!(
            "drive conversion outside the dispersive regime: lambda0/|detuning| = {dispersive_ratio:.3}"
        );
    }
    Ok(DriveCoupling {
        magnitude: signed.abs(),
        signed,
        dispersive_ok,
        dispersive_ratio,
    })
}
