//! Physical circuit parameters.
//!
//! Every frequency-like quantity is a linear frequency in MHz, exactly as the
//! values appear in figure captions (`omega/2pi`). All model formulas are
//! homogeneous of degree one or two in these quantities, so no `2pi` factors
//! appear anywhere; time is measured in units of `1/(2pi MHz)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    /// Resonator fundamental mode.
    pub omega_a: f64,
    /// Qubit transition frequencies.
    pub omega_q: [f64; 2],
    /// Coupler transition frequency.
    pub omega_c: f64,
    /// Bare qubit amplitude decay rates.
    pub gamma_q: [f64; 2],
    /// Resonator decay rate.
    pub gamma_a: f64,
    /// Coupler decay rate. Only the coupler-resolved oracle uses it.
    pub gamma_c: f64,
    /// Direct qubit-qubit coupling.
    pub g_xy: f64,
    /// Qubit-coupler couplings.
    pub g_qc: [f64; 2],
    /// Effective resonator-qubit couplings (magnitudes).
    pub lambda_q: [f64; 2],
    /// Resonator-qubit coupling phases, radians.
    pub theta_q: [f64; 2],
    /// Static qubit population expectations `<sigma_z>`, in `[-1, 1]`.
    pub sigma_z: [f64; 2],
}

impl Default for CircuitParams {
    fn default() -> Self {
        Self::fig2()
    }
}

impl CircuitParams {
    /// Working point of Fig. 2: both qubits in the ground state.
    pub fn fig2() -> Self {
        CircuitParams {
            omega_a: 4475.0,
            omega_q: [4500.0, 4505.0],
            omega_c: 5200.0,
            gamma_q: [1.00, 1.01],
            gamma_a: 65.0,
            gamma_c: 0.0,
            g_xy: 4.0,
            g_qc: [30.0, 30.3],
            lambda_q: [11.0, 11.0],
            theta_q: [0.0, 0.0],
            sigma_z: [-1.0, -1.0],
        }
    }

    /// Fig. 3: Fig. 2 with unequal resonator couplings.
    pub fn fig3() -> Self {
        CircuitParams {
            lambda_q: [11.3, 11.6],
            ..Self::fig2()
        }
    }

    /// Fig. 7: two identical qubits, both initially excited.
    pub fn fig7() -> Self {
        CircuitParams {
            omega_q: [4500.0, 4500.0],
            gamma_q: [1.0, 1.0],
            g_qc: [30.0, 30.0],
            lambda_q: [11.0, 11.0],
            sigma_z: [1.0, 1.0],
            ..Self::fig2()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_a", self.omega_a),
            ("omega_1", self.omega_q[0]),
            ("omega_2", self.omega_q[1]),
            ("omega_c", self.omega_c),
            ("gamma_1", self.gamma_q[0]),
            ("gamma_2", self.gamma_q[1]),
            ("gamma_a", self.gamma_a),
            ("gamma_c", self.gamma_c),
            ("g_xy", self.g_xy),
            ("g_1", self.g_qc[0]),
            ("g_2", self.g_qc[1]),
            ("lambda_1", self.lambda_q[0]),
            ("lambda_2", self.lambda_q[1]),
            ("theta_1", self.theta_q[0]),
            ("theta_2", self.theta_q[1]),
            ("sigma_z_1", self.sigma_z[0]),
            ("sigma_z_2", self.sigma_z[1]),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.gamma_a <= 0.0 {
            return Err(Error::NonPositiveResonatorLoss(self.gamma_a));
        }
        for j in 0..2 {
            if self.gamma_q[j] < 0.0 {
                return Err(invalid(["gamma_1", "gamma_2"][j], "must be >= 0"));
            }
            if self.lambda_q[j] < 0.0 {
                return Err(invalid(["lambda_1", "lambda_2"][j], "must be >= 0"));
            }
            if !(-1.0..=1.0).contains(&self.sigma_z[j]) {
                return Err(invalid(["sigma_z_1", "sigma_z_2"][j], "must lie in [-1, 1]"));
            }
            if self.omega_q[j] == self.omega_c {
                return Err(Error::DegenerateDetuning(format!(
                    "qubit {} is resonant with the coupler (omega = {})",
                    j + 1,
                    self.omega_c
                )));
            }
        }
        if self.gamma_c < 0.0 {
            return Err(invalid("gamma_c", "must be >= 0"));
        }
        Ok(())
    }

    /// `Delta_ja = omega_j - omega_a`.
    pub fn detuning_qa(&self, j: usize) -> f64 {
        self.omega_q[j] - self.omega_a
    }

    /// `Delta_jc = omega_j - omega_c`.
    pub fn detuning_qc(&self, j: usize) -> f64 {
        self.omega_q[j] - self.omega_c
    }

    /// `Delta_ca = omega_c - omega_a`.
    pub fn detuning_ca(&self) -> f64 {
        self.omega_c - self.omega_a
    }

    pub fn delta_theta(&self) -> f64 {
        self.theta_q[0] - self.theta_q[1]
    }

    /// Largest dispersive ratio `g_j / |Delta_jc|`.
    pub fn coupler_dispersive_ratio(&self) -> f64 {
        (0..2)
            .map(|j| self.g_qc[j].abs() / self.detuning_qc(j).abs())
            .fold(0.0, f64::max)
    }

    /// Exchange the qubit labels.
    pub fn swapped(&self) -> Self {
        let sw = |a: [f64; 2]| [a[1], a[0]];
        CircuitParams {
            omega_q: sw(self.omega_q),
            gamma_q: sw(self.gamma_q),
            g_qc: sw(self.g_qc),
            lambda_q: sw(self.lambda_q),
            theta_q: sw(self.theta_q),
            sigma_z: sw(self.sigma_z),
            ..*self
        }
    }

    /// Scale every frequency-like field by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let sc = |a: [f64; 2]| [a[0] * s, a[1] * s];
        CircuitParams {
            omega_a: self.omega_a * s,
            omega_q: sc(self.omega_q),
            omega_c: self.omega_c * s,
            gamma_q: sc(self.gamma_q),
            gamma_a: self.gamma_a * s,
            gamma_c: self.gamma_c * s,
            g_xy: self.g_xy * s,
            g_qc: sc(self.g_qc),
            lambda_q: sc(self.lambda_q),
            theta_q: self.theta_q,
            sigma_z: self.sigma_z,
        }
    }
}

/// Direct overrides of derived model quantities, used for figure axes that
/// are stated in terms of `g_e` or `Gamma_j` rather than circuit parameters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelOverrides {
    /// Replace the coupler-derived `g_e`.
    pub g_e: Option<f64>,
    /// Force `Gamma_2 = gamma_ratio * Gamma_1`.
    pub gamma_ratio: Option<f64>,
}

/// Circuit parameters plus model overrides: everything a pipeline needs to
/// build one effective Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Scenario {
    pub circuit: CircuitParams,
    pub overrides: ModelOverrides,
}

impl Scenario {
    pub fn new(circuit: CircuitParams) -> Self {
        Scenario {
            circuit,
            overrides: ModelOverrides::default(),
        }
    }

    pub fn with_g_e(mut self, g_e: f64) -> Self {
        self.overrides.g_e = Some(g_e);
        self
    }

    pub fn with_gamma_ratio(mut self, ratio: f64) -> Self {
        self.overrides.gamma_ratio = Some(ratio);
        self
    }

    pub fn with_delta_theta(mut self, delta_theta: f64) -> Self {
        self.circuit.theta_q[0] = self.circuit.theta_q[1] + delta_theta;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig2_defaults_validate() {
        CircuitParams::fig2().validate().unwrap();
        CircuitParams::fig3().validate().unwrap();
        CircuitParams::fig7().validate().unwrap();
    }

    #[test]
    fn caption_detunings() {
        let p = CircuitParams::fig2();
        assert_eq!(p.detuning_qa(0), 25.0);
        assert_eq!(p.detuning_qa(1), 30.0);
        assert_eq!(p.detuning_qc(0), -700.0);
        assert_eq!(p.detuning_ca(), 725.0);
    }

    #[test]
    fn rejects_invalid_fields() {
        let mut p = CircuitParams::fig2();
        p.gamma_a = 0.0;
        assert_eq!(p.validate(), Err(Error::NonPositiveResonatorLoss(0.0)));

        let mut p = CircuitParams::fig2();
        p.omega_c = p.omega_q[1];
        assert!(matches!(p.validate(), Err(Error::DegenerateDetuning(_))));

        let mut p = CircuitParams::fig2();
        p.sigma_z[0] = 1.5;
        assert!(matches!(
            p.validate(),
            Err(Error::InvalidParameter { name: "sigma_z_1", .. })
        ));

        let mut p = CircuitParams::fig2();
        p.lambda_q[1] = -1.0;
        assert!(p.validate().is_err());

        let mut p = CircuitParams::fig2();
        p.g_xy = f64::NAN;
        assert!(p.validate().is_err());
    }

    #[test]
    fn swap_is_an_involution() {
        let mut p = CircuitParams::fig3();
        p.theta_q = [0.3, -0.2];
        assert_eq!(p.swapped().swapped(), p);
        assert_eq!(p.swapped().delta_theta(), -p.delta_theta());
    }

    #[test]
    fn delta_theta_axis_keeps_theta_2() {
        let mut sc = Scenario::new(CircuitParams::fig2());
        sc.circuit.theta_q[1] = 0.4;
        let sc = sc.with_delta_theta(1.0);
        assert!((sc.circuit.delta_theta() - 1.0).abs() < 1e-15);
        assert_eq!(sc.circuit.theta_q[1], 0.4);
    }
}
