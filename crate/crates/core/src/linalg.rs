//! Small dense complex 2x2 algebra used by the effective model and the
//! dynamics engines.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Row-major complex 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn zeros() -> Self {
        Mat2::default()
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2::new(a, ZERO, ZERO, d)
    }

    /// Outer product `u v^dagger`.
    pub fn outer(u: [C64; 2], v: [C64; 2]) -> Self {
        Mat2([
            [u[0] * v[0].conj(), u[0] * v[1].conj()],
            [u[1] * v[0].conj(), u[1] * v[1].conj()],
        ])
    }

    pub fn from_columns(c0: [C64; 2], c1: [C64; 2]) -> Self {
        Mat2::new(c0[0], c1[0], c0[1], c1[1])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.norm() == 0.0 || !det.is_finite() {
            return None;
        }
        let m = &self.0;
        let inv = det.inv();
        Some(Mat2::new(m[1][1] * inv, -m[0][1] * inv, -m[1][0] * inv, m[0][0] * inv))
    }

    pub fn mul_vec(&self, v: [C64; 2]) -> [C64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }

    /// Largest elementwise distance to `other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }

    /// Eigenvalues of a Hermitian matrix in ascending order. Only the
    /// Hermitian part is used.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = 0.5 * (self.0[0][1] + self.0[1][0].conj());
        let mean = 0.5 * (a + d);
        let half = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - half, mean + half]
    }
}

impl Index<(usize, usize)> for Mat2 {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.0[r][c]
    }
}

impl IndexMut<(usize, usize)> for Mat2 {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.0[r][c]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<C64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: C64) -> Mat2 {
        self.scale(s)
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self.scale(C64::new(s, 0.0))
    }
}

pub fn vec_norm(v: [C64; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

pub fn normalized(v: [C64; 2]) -> [C64; 2] {
    let n = vec_norm(v);
    [v[0] / n, v[1] / n]
}

/// `<u, v>` with the first argument conjugated.
pub fn inner(u: [C64; 2], v: [C64; 2]) -> C64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

/// Angle between two complex rays, in radians, in `[0, pi/2]`.
///
/// Computed as `atan2(|v_perp|, |<u, v>|)` so that nearly parallel vectors keep
/// full relative precision.
pub fn ray_angle(u: [C64; 2], v: [C64; 2]) -> f64 {
    let u = normalized(u);
    let v = normalized(v);
    let proj = inner(u, v);
    let perp = [v[0] - u[0] * proj, v[1] - u[1] * proj];
    vec_norm(perp).atan2(proj.norm())
}
