//! Numerical kernels: quaternions, complex 2×2 matrices, complex polynomials.

mod mat2;
mod poly;
mod quaternion;

pub use mat2::Mat2C;
pub use poly::{poly_odd_order_roots, poly_roots, CPoly, Root};
pub use quaternion::{quat_mul, Quaternion};
