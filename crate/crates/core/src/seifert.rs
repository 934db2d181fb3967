//! Geometry of the (m,n) Seifert fibration of S³.
//!
//! The circle action is `a ↦ e^{𝕚l₁t} a e^{𝕚l₂t}` with `l₁ = (m+n)/2`,
//! `l₂ = (m−n)/2`. A horizontal curve γ carries the frame
//! `T = γ′/√h`, `B = (l₁𝕚γ + l₂γ𝕚)/√h`, `N = Bγ̄T`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::Quaternion;
use crate::{fd, Error, Result};

/// Fiber lengths below this are treated as the singular fiber.
pub const SINGULAR_FIBER: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeifertType {
    pub m: u32,
    pub n: u32,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl SeifertType {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if gcd(m, n) != 1 {
            return Err(Error::InvalidInput("gcd(m,n) must be 1".into()));
        }
        Ok(Self { m, n })
    }

    pub fn l1(&self) -> f64 {
        (self.m + self.n) as f64 / 2.0
    }

    pub fn l2(&self) -> f64 {
        (self.m as f64 - self.n as f64) / 2.0
    }

    pub fn mn(&self) -> f64 {
        (self.m * self.n) as f64
    }

    /// `e^{𝕚l₁t} p e^{𝕚l₂t}`.
    pub fn act(&self, t: f64, p: Quaternion) -> Quaternion {
        Quaternion::exp_i(self.l1() * t) * p * Quaternion::exp_i(self.l2() * t)
    }

    /// Gradient of `h = m²(w²+x²) + n²(y²+z²)` in ℝ⁴.
    pub fn grad_h(&self, g: Quaternion) -> Quaternion {
        let (m2, n2) = ((self.m * self.m) as f64, (self.n * self.n) as f64);
        Quaternion::new(2.0 * m2 * g.w, 2.0 * m2 * g.x, 2.0 * n2 * g.y, 2.0 * n2 * g.z)
    }
}

/// A point of a curve in S³ with its velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSampleS3 {
    pub gamma: Quaternion,
    pub dgamma: Quaternion,
    pub y: f64,
}

/// Orthonormal frame of the tangent space at γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub t: Quaternion,
    pub n: Quaternion,
    pub b: Quaternion,
}

/// Fiber length squared, `h = m²|γ₁|² + n²|γ₂|²`.
pub fn fiber_speed(gamma: Quaternion, st: SeifertType) -> Result<f64> {
    let (g1, g2) = gamma.split();
    let h = (st.m * st.m) as f64 * g1.norm_sqr() + (st.n * st.n) as f64 * g2.norm_sqr();
    if h < SINGULAR_FIBER {
        return Err(Error::SingularFiber { h });
    }
    Ok(h)
}

/// Unit fiber direction `B = (l₁𝕚γ + l₂γ𝕚)/√h`.
pub fn fiber_direction(gamma: Quaternion, st: SeifertType) -> Result<Quaternion> {
    let h = fiber_speed(gamma, st)?;
    let i = Quaternion::I;
    Ok((st.l1() * (i * gamma) + st.l2() * (gamma * i)).scale(1.0 / h.sqrt()))
}

/// The frame `(T, N, B)` at a conformally parametrized sample.
pub fn frame(sample: &CurveSampleS3, st: SeifertType) -> Result<Frame> {
    let h = fiber_speed(sample.gamma, st)?;
    let speed2 = sample.dgamma.norm_sqr();
    if ((speed2 - h) / h).abs() > 1e-6 {
        return Err(Error::NonConformal { speed2, h });
    }
    let b = fiber_direction(sample.gamma, st)?;
    let t = sample.dgamma.scale(1.0 / h.sqrt());
    let n = b * sample.gamma.conj() * t;
    Ok(Frame { t, n, b })
}

/// Surface normal `N = Bγ̄T`.
pub fn surface_normal(sample: &CurveSampleS3, st: SeifertType) -> Result<Quaternion> {
    Ok(frame(sample, st)?.n)
}

/// `Re q = κ_{m,n}/4` from the S³ curvature `κ_{S³}`.
pub(crate) fn re_q_from_kappa(kappa_s3: f64, gamma: Quaternion, n: Quaternion, h: f64, st: SeifertType) -> f64 {
    let i = Quaternion::I;
    let sh = h.sqrt();
    (sh * kappa_s3 - 2.0 * st.l1() * st.l2() / sh * n.dot(i * gamma * i)) / 4.0
}

/// Conformal Hopf differential `q = ¼(κ_{m,n} + 2i·mn/√h)` of the equivariant
/// torus over a uniformly sampled horizontal curve. `periodic` selects wrapped
/// stencils; otherwise the stencil shifts inward at the ends.
pub fn hopf_differential_from_curve(
    curve: &[CurveSampleS3],
    st: SeifertType,
    periodic: bool,
) -> Result<Vec<C64>> {
    if curve.len() < 5 {
        return Err(Error::TooFewSamples { need: 5, got: curve.len() });
    }
    let step = (curve[curve.len() - 1].y - curve[0].y) / (curve.len() - 1) as f64;
    let vel: Vec<[f64; 4]> = curve.iter().map(|s| s.dgamma.to_array()).collect();
    curve
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let h = fiber_speed(s.gamma, st)?;
            let speed2 = s.dgamma.norm_sqr();
            if ((speed2 - h) / h).abs() > 1e-5 {
                return Err(Error::NonConformal { speed2, h });
            }
            let b = fiber_direction(s.gamma, st)?;
            let n = b * s.gamma.conj() * s.dgamma.scale(1.0 / h.sqrt());
            let acc = Quaternion::from_array(fd::derivative(&vel, k, step, 1, periodic));
            let kappa = acc.dot(n) / h;
            let re = re_q_from_kappa(kappa, s.gamma, n, h, st);
            Ok(C64::new(re, st.mn() / (2.0 * h.sqrt())))
        })
        .collect()
}
