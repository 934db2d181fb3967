//! Fixed-step classical Runge–Kutta integration.

use num_complex::Complex64 as C64;

use crate::algebra::Mat2C;

/// A state that supports `self + a·other`.
pub trait OdeState: Clone {
    fn axpy(&self, a: f64, other: &Self) -> Self;
}

impl<const N: usize> OdeState for [f64; N] {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        std::array::from_fn(|k| self[k] + a * other[k])
    }
}

impl OdeState for Mat2C {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        *self + other.scale(C64::new(a, 0.0))
    }
}

/// One classical RK4 step of `s′ = f(y, s)`.
pub fn rk4_step<S: OdeState>(f: &impl Fn(f64, &S) -> S, y: f64, s: &S, h: f64) -> S {
    let k1 = f(y, s);
    let k2 = f(y + 0.5 * h, &s.axpy(0.5 * h, &k1));
    let k3 = f(y + 0.5 * h, &s.axpy(0.5 * h, &k2));
    let k4 = f(y + h, &s.axpy(h, &k3));
    s.axpy(h / 6.0, &k1)
        .axpy(h / 3.0, &k2)
        .axpy(h / 3.0, &k3)
        .axpy(h / 6.0, &k4)
}

/// Number of uniform steps covering `length` with spacing as close to `step` as possible.
pub fn step_count(length: f64, step: f64) -> usize {
    ((length / step).round() as usize).max(1)
}
