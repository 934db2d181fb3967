//! Hamilton quaternions in the basis 1, 𝕚, 𝕛, 𝕜.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    /// Builds `p₁ + 𝕛p₂` from its complex split.
    pub fn from_split(p1: C64, p2: C64) -> Self {
        Self::new(p1.re, p1.im, p2.re, -p2.im)
    }

    /// The pair `(p₁, p₂)` with `p = p₁ + 𝕛p₂`.
    pub fn split(self) -> (C64, C64) {
        (C64::new(self.w, self.x), C64::new(self.y, -self.z))
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Euclidean inner product on ℝ⁴.
    pub fn dot(self, o: Self) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(s * self.w, s * self.x, s * self.y, s * self.z)
    }

    pub fn normalized(self) -> Self {
        self.scale(1.0 / self.norm())
    }

    /// `e^{𝕚t} = cos t + 𝕚 sin t`.
    pub fn exp_i(t: f64) -> Self {
        Self::new(t.cos(), t.sin(), 0.0, 0.0)
    }

    pub fn max_abs_diff(self, o: Self) -> f64 {
        let d = self - o;
        d.w.abs().max(d.x.abs()).max(d.y.abs()).max(d.z.abs())
    }
}

/// Hamilton product with 𝕚𝕛 = 𝕜.
pub fn quat_mul(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion::new(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        quat_mul(self, rhs)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        rhs.scale(self)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn quat() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-2.0f64..2.0).prop_map(Quaternion::from_array)
    }

    #[test]
    fn defining_relations() {
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        assert_eq!(Quaternion::I * Quaternion::I, -Quaternion::ONE);
        let q = Quaternion::new(0.3, -1.2, 2.0, 0.7);
        assert_eq!(Quaternion::ONE * q, q);
        assert_eq!(q * Quaternion::ONE, q);
    }

    #[test]
    fn associativity_on_random_units() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut unit = || {
            Quaternion::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
            .normalized()
        };
        for _ in 0..100 {
            let (p, q, r) = (unit(), unit(), unit());
            assert!(((p * q) * r).max_abs_diff(p * (q * r)) < 1e-14);
        }
    }

    #[test]
    fn j_conjugates_complex_scalars() {
        let c = C64::new(0.4, -1.3);
        let cq = Quaternion::from_split(c, C64::new(0.0, 0.0));
        let cbar = Quaternion::from_split(c.conj(), C64::new(0.0, 0.0));
        assert!((Quaternion::J * cq).max_abs_diff(cbar * Quaternion::J) < 1e-15);
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(p in quat(), q in quat()) {
            prop_assert!(((p * q).norm() - p.norm() * q.norm()).abs() < 1e-12);
        }

        #[test]
        fn complex_split_reproduces_complex_product(a in -3.0f64..3.0, b in -3.0f64..3.0,
                                                    c in -3.0f64..3.0, d in -3.0f64..3.0) {
            let z0 = C64::new(0.0, 0.0);
            let p = Quaternion::from_split(C64::new(a, b), z0);
            let q = Quaternion::from_split(C64::new(c, d), z0);
            let (r1, r2) = (p * q).split();
            prop_assert_eq!(r1, C64::new(a, b) * C64::new(c, d));
            prop_assert_eq!(r2, z0);
        }

        #[test]
        fn split_round_trips(p in quat()) {
            let (p1, p2) = p.split();
            prop_assert_eq!(Quaternion::from_split(p1, p2), p);
        }
    }
}
