//! Complex 2×2 matrices, row-major.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2C {
    pub m: [[C64; 2]; 2],
}

impl Default for Mat2C {
    fn default() -> Self {
        Self::ZERO
    }
}

const Z: C64 = C64::new(0.0, 0.0);

impl Mat2C {
    pub const ZERO: Self = Self { m: [[Z, Z], [Z, Z]] };
    pub const IDENTITY: Self = Self {
        m: [[C64::new(1.0, 0.0), Z], [Z, C64::new(1.0, 0.0)]],
    };

    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { m: [[a, b], [c, d]] }
    }

    /// Traceless matrix `[[α, β], [γ, −α]]`.
    pub fn traceless(alpha: C64, beta: C64, gamma: C64) -> Self {
        Self::new(alpha, beta, gamma, -alpha)
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Self::new(a, Z, Z, d)
    }

    pub fn offdiag(b: C64, c: C64) -> Self {
        Self::new(Z, b, c, Z)
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(s * self.m[0][0], s * self.m[0][1], s * self.m[1][0], s * self.m[1][1])
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        let [[a, b], [c, e]] = self.m;
        Some(Self::new(e, -b, -c, a).scale(1.0 / d))
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, o: &Self) -> Self {
        *self * *o - *o * *self
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Matrix exponential of a traceless matrix:
    /// `exp M = cosh(s) I + sinh(s)/s M` with `s² = −det M`.
    pub fn exp_traceless(&self) -> Self {
        let s = (-self.det()).sqrt();
        let (ch, shs) = if s.norm() < 1e-8 {
            let s2 = s * s;
            (1.0 + s2 / 2.0 + s2 * s2 / 24.0, 1.0 + s2 / 6.0 + s2 * s2 / 120.0)
        } else {
            (s.cosh(), s.sinh() / s)
        };
        Self::IDENTITY.scale(ch) + self.scale(shs)
    }
}

impl Mul for Mat2C {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Add for Mat2C {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] += o.m[i][j];
            }
        }
        r
    }
}

impl Sub for Mat2C {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for Mat2C {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }
}
