//! Seeded random circuits for property checks and the self-test.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::params::CircuitParams;

/// One valid circuit around the caption working point, widened so that every
/// term of the model is exercised (gain and loss, any phase, any sign of
/// `g_xy`, coupler above or below the qubits).
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R) -> CircuitParams {
    let omega_a: f64 = rng.random_range(4000.0..5000.0);
    let omega_q = [0, 1].map(|_| omega_a + rng.random_range(-100.0..100.0));
    let above = rng.random_bool(0.5);
    let omega_c = loop {
        let off: f64 = rng.random_range(300.0..1500.0);
        let c = if above { omega_a + off } else { omega_a - off };
        if omega_q.iter().all(|&q| (q - c).abs() > 100.0) {
            break c;
        }
    };
    CircuitParams {
        omega_a,
        omega_q,
        omega_c,
        gamma_q: [0, 1].map(|_| rng.random_range(0.0..3.0)),
        gamma_a: rng.random_range(10.0..200.0),
        gamma_c: rng.random_range(0.0..2.0),
        g_xy: rng.random_range(-10.0..10.0),
        g_qc: [0, 1].map(|_| rng.random_range(0.0..60.0)),
        lambda_q: [0, 1].map(|_| rng.random_range(0.0..30.0)),
        theta_q: [0, 1].map(|_| rng.random_range(-PI..PI)),
        sigma_z: [0, 1].map(|_| rng.random_range(-1.0..=1.0)),
    }
}

/// `n` circuits from a fixed seed; draw `k` depends only on `(seed, k)`.
pub fn circuits(seed: u64, n: usize) -> Vec<CircuitParams> {
    (0..n).map(|k| circuit_at(seed, k)).collect()
}

pub fn circuit_at(seed: u64, k: usize) -> CircuitParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    random_circuit(&mut rng)
}
