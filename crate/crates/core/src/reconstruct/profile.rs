//! Profile curves: horizontal lifts rebuilt from `Re q` by a frame ODE.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::Quaternion;
use crate::elflow::Trajectory;
use crate::ode::{rk4_step, step_count};
use crate::seifert::{fiber_direction, fiber_speed, CurveSampleS3, SeifertType, SINGULAR_FIBER};
use crate::{Error, Result};

/// Drift tolerated before renormalization.
pub const DIVERGENCE_TOL: f64 = 1e-4;
/// Largest accepted relative mismatch between `√h` and `mn/(2 Im q)`.
pub const COUPLING_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub samples: Vec<CurveSampleS3>,
    pub st: SeifertType,
    pub step: f64,
    /// Largest `|√h − mn/(2 Im q)|/√h` seen; `None` when `mn = 0`.
    pub coupling_residual: Option<f64>,
}

impl ProfileCurve {
    pub fn length(&self) -> f64 {
        self.step * (self.samples.len().saturating_sub(1)) as f64
    }

    /// Same curve moved by the circle action at parameter `t`.
    pub fn acted(&self, t: f64) -> Self {
        let mut c = self.clone();
        for s in &mut c.samples {
            s.gamma = self.st.act(t, s.gamma);
            s.dgamma = self.st.act(t, s.dgamma);
        }
        c
    }
}

fn gram_schmidt(fixed: &[Quaternion]) -> Vec<Quaternion> {
    let mut basis: Vec<Quaternion> = fixed.to_vec();
    for cand in [Quaternion::J, Quaternion::K, Quaternion::I, Quaternion::ONE] {
        let mut v = cand;
        for b in &basis {
            v = v - b.scale(v.dot(*b));
        }
        if v.norm() > 1e-6 {
            basis.push(v.normalized());
        }
        if basis.len() == 4 {
            break;
        }
    }
    basis[fixed.len()..].to_vec()
}

/// Initial point and velocity of a profile curve with Hopf differential `q0`
/// and derivative `dq0` at the start.
///
/// `γ₀ = cos θ + 𝕛 sin θ` with `m²cos²θ + n²sin²θ = h₀`, where
/// `h₀ = (mn/(2 Im q0))²` unless `mn = 0`, in which case `h0` must be given.
/// The tangent is fixed up to the sign `branch` by the slope of h implied by
/// `Im q′`.
pub fn init_profile(q0: C64, dq0: C64, st: SeifertType, branch: Branch, h0: Option<f64>) -> Result<CurveSampleS3> {
    let mn = st.mn();
    let h0 = if mn != 0.0 {
        if q0.im <= 0.0 {
            return Err(Error::IncompatibleImQ);
        }
        (mn / (2.0 * q0.im)).powi(2)
    } else {
        h0.ok_or_else(|| Error::InvalidInput("mn = 0 requires an explicit h0".into()))?
    };
    let (m2, n2) = ((st.m * st.m) as f64, (st.n * st.n) as f64);
    let (lo, hi) = (m2.min(n2), m2.max(n2));
    let slack = 1e-12 * hi.max(1.0);
    if h0 < lo - slack || h0 > hi + slack || h0 < SINGULAR_FIBER {
        return Err(Error::IncompatibleImQ);
    }
    let theta = if st.m == st.n {
        0.0
    } else {
        ((h0 - n2) / (m2 - n2)).clamp(0.0, 1.0).sqrt().acos()
    };
    let gamma = Quaternion::new(theta.cos(), 0.0, theta.sin(), 0.0);
    let h = fiber_speed(gamma, st)?;
    let b = fiber_direction(gamma, st)?;
    let grad = st.grad_h(gamma);
    let grad_t = grad - gamma.scale(grad.dot(gamma)) - b.scale(grad.dot(b));
    // Slope of h along the curve from Im q = mn/(2√h).
    let hp = if mn != 0.0 { -4.0 * h.powf(1.5) * dq0.im / mn } else { 0.0 };
    let sh = h.sqrt();
    let t = if grad_t.norm() > 1e-9 {
        let e1 = grad_t.normalized();
        let e2 = gram_schmidt(&[gamma, b, e1])[0];
        let a = hp / (sh * grad.dot(e1));
        if a.abs() > 1.0 + 1e-12 {
            return Err(Error::IncompatibleImQ);
        }
        let a = a.clamp(-1.0, 1.0);
        e1.scale(a) + e2.scale(branch.sign() * (1.0 - a * a).sqrt())
    } else {
        if hp.abs() > 1e-9 {
            return Err(Error::IncompatibleImQ);
        }
        gram_schmidt(&[gamma, b])[0].scale(branch.sign())
    };
    Ok(CurveSampleS3 { gamma, dgamma: t.scale(sh), y: 0.0 })
}

fn h_of(g: Quaternion, st: SeifertType) -> f64 {
    let (g1, g2) = g.split();
    (st.m * st.m) as f64 * g1.norm_sqr() + (st.n * st.n) as f64 * g2.norm_sqr()
}

/// `γ″ = (√h)′T + hκN − hγ` with `κ = (4 Re q + (2l₁l₂/√h)⟨N, 𝕚γ𝕚⟩)/√h`.
fn acceleration(g: Quaternion, v: Quaternion, re_q: f64, st: SeifertType) -> Quaternion {
    let i = Quaternion::I;
    let h = h_of(g, st);
    let sh = h.sqrt();
    let dsh = st.grad_h(g).dot(v) / (2.0 * sh);
    let t = v.scale(1.0 / sh);
    let b = (st.l1() * (i * g) + st.l2() * (g * i)).scale(1.0 / sh);
    let n = b * g.conj() * t;
    let kappa = (4.0 * re_q + 2.0 * st.l1() * st.l2() / sh * n.dot(i * g * i)) / sh;
    t.scale(dsh) + n.scale(h * kappa) - g.scale(h)
}

fn unpack(s: &[f64; 8]) -> (Quaternion, Quaternion) {
    (
        Quaternion::new(s[0], s[1], s[2], s[3]),
        Quaternion::new(s[4], s[5], s[6], s[7]),
    )
}

fn pack(g: Quaternion, v: Quaternion) -> [f64; 8] {
    [g.w, g.x, g.y, g.z, v.w, v.x, v.y, v.z]
}

/// Integrates the frame ODE along `traj` from `init` with per-step projection
/// back onto unit, fiber-orthogonal, conformal data.
pub fn integrate_profile(traj: &Trajectory, st: SeifertType, init: &CurveSampleS3, step: f64) -> Result<ProfileCurve> {
    let length = traj.length();
    if step.is_nan() || step <= 0.0 || length <= 0.0 {
        return Err(Error::InvalidInput("need step > 0 and a nonempty trajectory".into()));
    }
    let n = step_count(length, step);
    let h = length / n as f64;
    let y0 = traj.jets[0].y;
    let rhs = |y: f64, s: &[f64; 8]| {
        let (g, v) = unpack(s);
        let a = acceleration(g, v, traj.interp(y).0.re, st);
        pack(v, a)
    };
    let mut samples = Vec::with_capacity(n + 1);
    let mut state = pack(init.gamma, init.dgamma);
    let mn = st.mn();
    let mut coupling = 0.0f64;
    for k in 0..=n {
        let y = y0 + k as f64 * h;
        let (g, v) = unpack(&state);
        let hv = h_of(g, st);
        if hv < SINGULAR_FIBER {
            return Err(Error::SingularFiber { h: hv });
        }
        let b = fiber_direction(g, st)?;
        let drift = [
            (g.norm() - 1.0).abs(),
            v.dot(g).abs() / hv.sqrt(),
            v.dot(b).abs() / hv.sqrt(),
            (v.norm_sqr() - hv).abs() / hv,
        ];
        if let Some(worst) = drift.iter().cloned().reduce(f64::max).filter(|w| *w > DIVERGENCE_TOL || !w.is_finite()) {
            return Err(Error::ReconstructionDiverged { y, what: format!("invariant drift {worst:.3e}") });
        }
        let g = g.normalized();
        let b = fiber_direction(g, st)?;
        let mut v = v - g.scale(v.dot(g));
        v = v - b.scale(v.dot(b));
        let hv = h_of(g, st);
        v = v.scale(hv.sqrt() / v.norm());
        if mn != 0.0 {
            let im_q = traj.interp(y).0.im;
            coupling = coupling.max((hv.sqrt() - mn / (2.0 * im_q)).abs() / hv.sqrt());
        }
        samples.push(CurveSampleS3 { gamma: g, dgamma: v, y });
        state = pack(g, v);
        if k < n {
            state = rk4_step(&rhs, y, &state, h);
        }
    }
    if mn != 0.0 && (coupling.is_nan() || coupling > COUPLING_TOL) {
        return Err(Error::IncompatibleImQ);
    }
    Ok(ProfileCurve { samples, st, step: h, coupling_residual: (mn != 0.0).then_some(coupling) })
}

/// Fiber rotation relating the end of a profile curve to its start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monodromy {
    pub theta: f64,
    pub residual: f64,
    /// `θ/2π` reduced to `[0, 1)`.
    pub rotation_number: f64,
    /// Continued-fraction convergents `p/q` of the rotation number.
    pub convergents: Vec<(u64, u64)>,
}

/// Finds θ minimizing `‖γ(L) − R_θγ(0)‖² + ‖γ′(L) − R_θγ′(0)‖²` where
/// `R_θ p = e^{𝕚l₁θ} p e^{𝕚l₂θ}`.
pub fn profile_monodromy(curve: &ProfileCurve) -> Result<Monodromy> {
    let (Some(first), Some(last)) = (curve.samples.first(), curve.samples.last()) else {
        return Err(Error::InvalidInput("empty profile curve".into()));
    };
    let st = curve.st;
    // R_θ(u₁ + 𝕛u₂) = e^{imθ}u₁ + 𝕛e^{−inθ}u₂, so ⟨R_θu, w⟩ = Re(A e^{imθ}) + Re(B e^{−inθ}).
    let mut a = C64::default();
    let mut b = C64::default();
    for (u, w) in [(first.gamma, last.gamma), (first.dgamma, last.dgamma)] {
        let (u1, u2) = u.split();
        let (w1, w2) = w.split();
        a += u1 * w1.conj();
        b += u2 * w2.conj();
    }
    let (m, n) = (st.m as f64, st.n as f64);
    let f = |t: f64| (a * C64::from_polar(1.0, m * t)).re + (b * C64::from_polar(1.0, -n * t)).re;
    let samples = 4096 * (st.m.max(st.n).max(1) as usize);
    let tau = 2.0 * std::f64::consts::PI;
    let cell = tau / samples as f64;
    let k = (0..samples)
        .max_by(|&i, &j| f(i as f64 * cell).total_cmp(&f(j as f64 * cell)))
        .unwrap_or(0);
    // Newton on F′ from the best grid point.
    let mut theta = k as f64 * cell;
    for _ in 0..50 {
        let ea = a * C64::from_polar(1.0, m * theta);
        let eb = b * C64::from_polar(1.0, -n * theta);
        let d1 = -m * ea.im + n * eb.im;
        let d2 = -m * m * ea.re - n * n * eb.re;
        if d2 >= 0.0 {
            break;
        }
        let dt = (d1 / d2).clamp(-cell, cell);
        theta -= dt;
        if dt.abs() < 1e-16 {
            break;
        }
    }
    let theta = theta.rem_euclid(tau);
    let residual = ((last.gamma - st.act(theta, first.gamma)).norm_sqr()
        + (last.dgamma - st.act(theta, first.dgamma)).norm_sqr())
    .sqrt();
    if residual > 1e-3 {
        return Err(Error::NotFiberRotation(residual));
    }
    let rotation_number = theta / tau;
    Ok(Monodromy { theta, residual, rotation_number, convergents: convergents(rotation_number, 12, 1e-9) })
}

/// Continued-fraction convergents of `x ∈ [0, 1)`, stopping after `max_terms`
/// or once the approximation error drops below `tol`.
pub fn convergents(x: f64, max_terms: usize, tol: f64) -> Vec<(u64, u64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut r = x;
    let mut out = Vec::new();
    for _ in 0..max_terms {
        let a = r.floor();
        if a > 1e12 {
            break;
        }
        let a = a as u64;
        let (p, q) = (a * p1 + p0, a * q1 + q0);
        out.push((p, q));
        if (x - p as f64 / q as f64).abs() < tol {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p, q);
        let frac = r - r.floor();
        if frac < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}
