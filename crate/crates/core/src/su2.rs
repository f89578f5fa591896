//! The su(2) algebra in the basis τᵃ = σᵃ/(2i).
//!
//! Elements are carried as real coefficient triples; in this basis the
//! structure constants are the Levi-Civita symbol, so the commutator is the
//! cross product. The 2×2 complex realization exists for cross-checks and for
//! the SO(3) → SU(2) lift used to realize gauge rotations.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{orthogonality_defect, MatR, EPS_ORTH};

/// Absolute tolerance for algebraic identities on unit-scale elements.
pub const EPS_ALG: f64 = 1e-12;

/// su(2) element `c_a τᵃ`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Su2Element(pub [f64; 3]);

impl Su2Element {
    pub const ZERO: Self = Self([0.0; 3]);

    /// The basis element τᵃ, `a ∈ {0, 1, 2}`.
    pub fn basis(a: usize) -> Self {
        let mut c = [0.0; 3];
        c[a] = 1.0;
        Self(c)
    }

    pub fn coeffs(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        commutator(*self, *other)
    }
}

impl From<[f64; 3]> for Su2Element {
    fn from(c: [f64; 3]) -> Self {
        Self(c)
    }
}

impl Add for Su2Element {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
        ])
    }
}

impl Sub for Su2Element {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self([
            self.0[0] - rhs.0[0],
            self.0[1] - rhs.0[1],
            self.0[2] - rhs.0[2],
        ])
    }
}

impl Neg for Su2Element {
    type Output = Self;
    fn neg(self) -> Self {
        Self([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<f64> for Su2Element {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// Levi-Civita symbol ε^{abc} with ε^{123} = 1 (zero-based indices).
#[inline]
pub fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `[u, v] = u_a v_b ε^{ab}_c τᶜ`, i.e. the cross product of coefficients.
pub fn commutator(u: Su2Element, v: Su2Element) -> Su2Element {
    let (a, b) = (u.0, v.0);
    Su2Element([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// 2×2 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Complex2x2(pub [[Complex64; 2]; 2]);

impl Complex2x2 {
    pub fn zero() -> Self {
        Self([[Complex64::new(0.0, 0.0); 2]; 2])
    }

    pub fn identity() -> Self {
        let o = Complex64::new(1.0, 0.0);
        let z = Complex64::new(0.0, 0.0);
        Self([[o, z], [z, o]])
    }

    pub fn dagger(&self) -> Self {
        let m = self.0;
        Self([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Inverse via the adjugate; panics if singular.
    pub fn inverse(&self) -> Self {
        let d = self.det();
        assert!(d.norm() > 0.0, "inverse of a singular 2x2 matrix");
        let m = self.0;
        Self([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = self.0;
        Self([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Matrix commutator `self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        *self * *rhs - *rhs * *self
    }
}

impl Mul for Complex2x2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self(out)
    }
}

impl Add for Complex2x2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = (self.0, rhs.0);
        Self([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Complex2x2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(Complex64::new(-1.0, 0.0))
    }
}

/// Pauli matrix σᵃ, `a ∈ {0, 1, 2}`.
pub fn pauli(a: usize) -> Complex2x2 {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match a {
        0 => Complex2x2([[z, o], [o, z]]),
        1 => Complex2x2([[z, -i], [i, z]]),
        2 => Complex2x2([[o, z], [z, -o]]),
        _ => panic!("pauli index {a} out of range"),
    }
}

/// τᵃ = σᵃ / (2i).
pub fn tau(a: usize) -> Complex2x2 {
    pauli(a).scale(Complex64::new(0.0, -0.5))
}

/// `u_a τᵃ` as a traceless anti-Hermitian 2×2 matrix.
pub fn embed(u: Su2Element) -> Complex2x2 {
    (0..3).fold(Complex2x2::zero(), |acc, a| {
        acc + tau(a).scale(Complex64::new(u.0[a], 0.0))
    })
}

/// Reads the τ-coefficients back from a 2×2 matrix: `u_a = −2 tr(τᵃ M)`.
pub fn extract(m: &Complex2x2) -> Su2Element {
    let mut c = [0.0; 3];
    for (a, x) in c.iter_mut().enumerate() {
        *x = -2.0 * (tau(a) * *m).trace().re;
    }
    Su2Element(c)
}

/// Unit quaternion `(w, x, y, z)` of a rotation matrix, using the largest of
/// the four Shepperd pivots. The sign is fixed so `w ≥ 0`.
fn rotation_to_quaternion(p: &MatR) -> [f64; 4] {
    let m = |i, j| p[(i, j)];
    let tr = m(0, 0) + m(1, 1) + m(2, 2);
    let pivots = [tr, m(0, 0), m(1, 1), m(2, 2)];
    let k = (0..4)
        .max_by(|&a, &b| pivots[a].total_cmp(&pivots[b]))
        .unwrap();
    let mut q = match k {
        0 => {
            let s = 2.0 * (1.0 + tr).sqrt();
            [
                0.25 * s,
                (m(2, 1) - m(1, 2)) / s,
                (m(0, 2) - m(2, 0)) / s,
                (m(1, 0) - m(0, 1)) / s,
            ]
        }
        1 => {
            let s = 2.0 * (1.0 + m(0, 0) - m(1, 1) - m(2, 2)).sqrt();
            [
                (m(2, 1) - m(1, 2)) / s,
                0.25 * s,
                (m(0, 1) + m(1, 0)) / s,
                (m(0, 2) + m(2, 0)) / s,
            ]
        }
        2 => {
            let s = 2.0 * (1.0 - m(0, 0) + m(1, 1) - m(2, 2)).sqrt();
            [
                (m(0, 2) - m(2, 0)) / s,
                (m(0, 1) + m(1, 0)) / s,
                0.25 * s,
                (m(1, 2) + m(2, 1)) / s,
            ]
        }
        _ => {
            let s = 2.0 * (1.0 - m(0, 0) - m(1, 1) + m(2, 2)).sqrt();
            [
                (m(1, 0) - m(0, 1)) / s,
                (m(0, 2) + m(2, 0)) / s,
                (m(1, 2) + m(2, 1)) / s,
                0.25 * s,
            ]
        }
    };
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sign = if q[0] < 0.0 { -1.0 } else { 1.0 };
    q.iter_mut().for_each(|x| *x *= sign / n);
    q
}

/// Lifts `P ∈ SO(3)` to `S ∈ SU(2)` with `S⁻¹ τᵃ S = pᵃ_b τᵇ`.
///
/// Of the two preimages `±S` this returns the one whose quaternion scalar
/// part is non-negative.
pub fn covering_lift(p: &MatR) -> Result<Complex2x2> {
    if p.rows() != 3 || p.cols() != 3 {
        return Err(Error::Dimension(format!(
            "covering_lift needs 3x3, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    let defect = orthogonality_defect(p)?;
    let det = p.det3();
    if defect > EPS_ORTH * 100.0 || (det - 1.0).abs() > 1e-9 {
        return Err(Error::NotSpecialOrthogonal { defect, det });
    }
    let [w, x, y, z] = rotation_to_quaternion(p);
    // S = w·1 − i (x σ¹ + y σ² + z σ³)
    Ok(Complex2x2([
        [Complex64::new(w, -z), Complex64::new(-y, -x)],
        [Complex64::new(y, -x), Complex64::new(w, z)],
    ]))
}

/// Gauge action `S⁻¹ M S` on a 2×2 matrix.
pub fn conjugate(s: &Complex2x2, m: &Complex2x2) -> Complex2x2 {
    s.inverse() * *m * *s
}
