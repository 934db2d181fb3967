//! The Euler–Lagrange system for the conformal Hopf differential.
//!
//! `q″ = 2Re(λq) − 8(|q|²+C)q + 8ξq`, `ξ′ = (q̄′q − q′q̄)/2`, with `ξ = ir`
//! purely imaginary.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::killing::GenusConstants;
use crate::ode::{rk4_step, step_count};
use crate::{Error, Result};

const I: C64 = C64::new(0.0, 1.0);

/// Below this sup-norm q counts as identically zero.
pub const UMBILIC_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ELParams {
    pub lambda: C64,
    pub c: f64,
}

impl ELParams {
    pub fn new(lambda: C64, c: f64) -> Self {
        Self { lambda, c }
    }

    /// True once λ has been rotated onto the real axis.
    pub fn is_canonical(&self) -> bool {
        self.lambda.im == 0.0
    }

    pub(crate) fn real_lambda(&self) -> Result<f64> {
        if self.lambda.im.abs() > 1e-12 * (1.0 + self.lambda.norm()) {
            return Err(Error::LambdaNotReal { re: self.lambda.re, im: self.lambda.im });
        }
        Ok(self.lambda.re)
    }
}

/// Value of q and its derivatives at `y`, together with `ξ = ir`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HopfJet {
    pub y: f64,
    pub q: C64,
    pub dq: C64,
    pub d2q: C64,
    pub d3q: C64,
    pub d4q: C64,
    pub r: f64,
}

impl HopfJet {
    pub fn xi(&self) -> C64 {
        C64::new(0.0, self.r)
    }

    /// q and derivatives in order, `[q, q′, q″, q‴, q⁗]`.
    pub fn derivs(&self) -> [C64; 5] {
        [self.q, self.dq, self.d2q, self.d3q, self.d4q]
    }
}

/// What generated a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Dynamics {
    El(ELParams),
    Flow { genus: usize, constants: GenusConstants },
    Sampled,
}

/// Jets at uniform spacing `step`, starting at `jets[0].y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub jets: Vec<HopfJet>,
    pub step: f64,
    /// Set when the trajectory spans exactly one period of q.
    pub period: Option<f64>,
    pub dynamics: Dynamics,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.jets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jets.is_empty()
    }

    /// Parameter length covered by the samples.
    pub fn length(&self) -> f64 {
        self.step * (self.jets.len().saturating_sub(1)) as f64
    }

    pub fn q_values(&self) -> Vec<C64> {
        self.jets.iter().map(|j| j.q).collect()
    }

    pub fn q_sup(&self) -> f64 {
        self.jets.iter().map(|j| j.q.norm()).fold(0.0, f64::max)
    }

    pub fn el_params(&self) -> Option<ELParams> {
        match self.dynamics {
            Dynamics::El(p) => Some(p),
            _ => None,
        }
    }

    /// Samples an analytic q given as a closure returning `[q, q′, q″, q‴, q⁗]`.
    pub fn from_fn(f: impl Fn(f64) -> [C64; 5], length: f64, step: f64) -> Self {
        let n = step_count(length, step);
        let h = length / n as f64;
        let jets = (0..=n)
            .map(|k| {
                let y = k as f64 * h;
                let d = f(y);
                HopfJet { y, q: d[0], dq: d[1], d2q: d[2], d3q: d[3], d4q: d[4], r: 0.0 }
            })
            .collect();
        Self { jets, step: h, period: None, dynamics: Dynamics::Sampled }
    }

    /// Largest jump between the first and last jet in `(q, q′, q″)`.
    pub fn endpoint_mismatch(&self) -> f64 {
        let (a, b) = (self.jets[0], self.jets[self.jets.len() - 1]);
        (a.q - b.q).norm().max((a.dq - b.dq).norm()).max((a.d2q - b.d2q).norm())
    }

    /// Quintic Hermite interpolation of `(q, q′)` at `y`.
    pub fn interp(&self, y: f64) -> (C64, C64) {
        let y0 = self.jets[0].y;
        let n = self.jets.len();
        let s = ((y - y0) / self.step).clamp(0.0, (n - 1) as f64);
        let k = (s.floor() as usize).min(n - 2);
        let t = s - k as f64;
        let (a, b) = (&self.jets[k], &self.jets[k + 1]);
        hermite5(t, self.step, [a.q, a.dq, a.d2q], [b.q, b.dq, b.d2q])
    }
}

/// Quintic Hermite value and derivative on a cell of width `h` at relative position `t`.
pub(crate) fn hermite5(t: f64, h: f64, a: [C64; 3], b: [C64; 3]) -> (C64, C64) {
    let (t2, t3) = (t * t, t * t * t);
    let (t4, t5) = (t3 * t, t3 * t2);
    let w = [
        1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
        t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
        0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5),
        0.5 * (t3 - 2.0 * t4 + t5),
        -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
        10.0 * t3 - 15.0 * t4 + 6.0 * t5,
    ];
    let dw = [
        -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
        1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
        0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4),
        0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4),
        -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
        30.0 * t2 - 60.0 * t3 + 30.0 * t4,
    ];
    let basis = [a[0], h * a[1], h * h * a[2], h * h * b[2], h * b[1], b[0]];
    let v = basis.iter().zip(w).map(|(c, w)| c * w).sum();
    let d: C64 = basis.iter().zip(dw).map(|(c, w)| c * w).sum();
    (v, d / h)
}

/// First derivatives of `(q, q′, r)` under the EL system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElRhs {
    pub dq: C64,
    pub d2q: C64,
    /// `ξ′ = i·dr`.
    pub dr: f64,
}

impl ElRhs {
    pub fn dxi(&self) -> C64 {
        C64::new(0.0, self.dr)
    }
}

pub fn el_rhs(jet: &HopfJet, params: &ELParams) -> ElRhs {
    let (q, dq) = (jet.q, jet.dq);
    let d2q = 2.0 * (params.lambda * q).re - 8.0 * (q.norm_sqr() + params.c) * q + 8.0 * jet.xi() * q;
    ElRhs { dq, d2q, dr: (dq.conj() * q).im }
}

/// Completes a jet from `(q, q′, r)` using the EL system and its derivatives.
pub fn el_jet(y: f64, q: C64, dq: C64, r: f64, params: &ELParams) -> HopfJet {
    let (lam, c) = (params.lambda, params.c);
    let nq = q.norm_sqr();
    let d2q = 2.0 * (lam * q).re - 8.0 * (nq + c) * q + 8.0 * I * r * q;
    let dr = (dq.conj() * q).im;
    let dnq = 2.0 * (q.conj() * dq).re;
    let d3q = 2.0 * (lam * dq).re - 8.0 * dnq * q - 8.0 * (nq + c) * dq + 8.0 * I * (dr * q + r * dq);
    let d2r = (d2q.conj() * q).im;
    let d2nq = 2.0 * (dq.conj() * dq + q.conj() * d2q).re;
    let d4q = 2.0 * (lam * d2q).re - 8.0 * d2nq * q - 16.0 * dnq * dq - 8.0 * (nq + c) * d2q
        + 8.0 * I * (d2r * q + 2.0 * dr * dq + r * d2q);
    HopfJet { y, q, dq, d2q, d3q, d4q, r }
}

/// Residual `|q″ − (2Re(λq) − 8(|q|²+C)q + 8ξq)|` of a stored jet.
pub fn el_residual(jet: &HopfJet, params: &ELParams) -> f64 {
    (jet.d2q - el_rhs(jet, params).d2q).norm()
}

fn pack(j: &HopfJet) -> [f64; 5] {
    [j.q.re, j.q.im, j.dq.re, j.dq.im, j.r]
}

/// Classical RK4 solution of the EL system over `[y₀, y₀ + length]`.
pub fn integrate_el(initial: &HopfJet, params: &ELParams, length: f64, step: f64) -> Result<Trajectory> {
    if !(step > 0.0 && length > 0.0) || step > length / 100.0 + 1e-15 {
        return Err(Error::InvalidInput(format!(
            "need step > 0, length > 0 and step ≤ length/100 (step {step}, length {length})"
        )));
    }
    let n = step_count(length, step);
    let h = length / n as f64;
    let rhs = |_: f64, s: &[f64; 5]| {
        let q = C64::new(s[0], s[1]);
        let dq = C64::new(s[2], s[3]);
        let jet = HopfJet { q, dq, r: s[4], ..Default::default() };
        let d = el_rhs(&jet, params);
        [dq.re, dq.im, d.d2q.re, d.d2q.im, d.dr]
    };
    let y0 = initial.y;
    let mut state = pack(initial);
    let mut jets = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let y = y0 + k as f64 * h;
        if state.iter().any(|v| !v.is_finite() || v.abs() > 1e150) {
            return Err(Error::BlowUp { y });
        }
        jets.push(el_jet(y, C64::new(state[0], state[1]), C64::new(state[2], state[3]), state[4], params));
        if k < n {
            state = rk4_step(&rhs, y, &state, h);
        }
    }
    Ok(Trajectory { jets, step: h, period: None, dynamics: Dynamics::El(*params) })
}

/// `d̃ = −|q′|² − 4|q|⁴ + 8ξ² − 8C|q|² + 2λ Re(q)²`, conserved for real λ.
pub fn first_integral(jet: &HopfJet, params: &ELParams) -> Result<f64> {
    let lam = params.real_lambda()?;
    let nq = jet.q.norm_sqr();
    Ok(-jet.dq.norm_sqr() - 4.0 * nq * nq - 8.0 * jet.r * jet.r - 8.0 * params.c * nq
        + 2.0 * lam * jet.q.re * jet.q.re)
}

fn check_unit(mu: C64) -> Result<()> {
    if (mu.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::NotUnimodular(mu.norm()));
    }
    Ok(())
}

/// Constants of the associated surface `q_μ = qμ`, and the shift of ξ.
pub fn associated_params(params: &ELParams, mu: C64) -> Result<(ELParams, f64)> {
    check_unit(mu)?;
    let w = (mu * mu - 1.0) * params.lambda.conj() / 8.0;
    let p = ELParams::new(mu.conj() * mu.conj() * params.lambda, params.c + w.re);
    Ok((p, w.im))
}

/// One jet of the associated family member `q_μ = qμ`.
pub fn associated_jet(jet: &HopfJet, params: &ELParams, mu: C64) -> Result<(HopfJet, ELParams)> {
    let (p, dr) = associated_params(params, mu)?;
    let j = HopfJet {
        y: jet.y,
        q: jet.q * mu,
        dq: jet.dq * mu,
        d2q: jet.d2q * mu,
        d3q: jet.d3q * mu,
        d4q: jet.d4q * mu,
        r: jet.r + dr,
    };
    Ok((j, p))
}

/// Applies the associated-family transform to a whole EL trajectory. Returns
/// the new trajectory, its constants, and `ξ_μ(y₀)`.
pub fn associated_family(traj: &Trajectory, mu: C64) -> Result<(Trajectory, ELParams, C64)> {
    let params = traj
        .el_params()
        .ok_or_else(|| Error::InvalidInput("associated family needs an EL trajectory".into()))?;
    let (p, _) = associated_params(&params, mu)?;
    let jets = traj
        .jets
        .iter()
        .map(|j| associated_jet(j, &params, mu).map(|r| r.0))
        .collect::<Result<Vec<_>>>()?;
    let xi0 = jets.first().map(|j| j.xi()).unwrap_or_default();
    Ok((Trajectory { jets, step: traj.step, period: traj.period, dynamics: Dynamics::El(p) }, p, xi0))
}

/// The unit μ with `μ̄²λ` real and nonnegative.
pub fn canonical_rotation(params: &ELParams) -> C64 {
    if params.lambda.norm() == 0.0 {
        return C64::new(1.0, 0.0);
    }
    C64::from_polar(1.0, params.lambda.arg() / 2.0)
}

/// Rotates an EL trajectory so that λ becomes real.
pub fn canonicalize(traj: &Trajectory) -> Result<Trajectory> {
    let params = traj
        .el_params()
        .ok_or_else(|| Error::InvalidInput("canonicalization needs an EL trajectory".into()))?;
    let (mut t, mut p, _) = associated_family(traj, canonical_rotation(&params))?;
    p.lambda = C64::new(p.lambda.re, 0.0);
    t.dynamics = Dynamics::El(p);
    Ok(t)
}

/// Returns μ with `max|Im(qμ)| < tol` when q stays on a line through 0.
/// The sign of μ makes `Re(qμ) ≥ 0` at the first sample of maximal |q|.
pub fn isothermic_detect(traj: &Trajectory, tol: f64) -> Result<Option<C64>> {
    let qs = traj.q_values();
    let Some(kmax) = (0..qs.len()).reduce(|a, b| if qs[b].norm() > qs[a].norm() { b } else { a }) else {
        return Err(Error::InvalidInput("empty trajectory".into()));
    };
    if qs[kmax].norm() < UMBILIC_THRESHOLD.max(tol) {
        return Err(Error::TotallyUmbilic);
    }
    // Principal axis of the point cloud {q} about the origin.
    let s: C64 = qs.iter().map(|q| q * q).sum();
    let phi = if s.norm() > 0.0 { s.arg() / 2.0 } else { qs[kmax].arg() };
    let mut mu = C64::from_polar(1.0, -phi);
    if (qs[kmax] * mu).re < 0.0 {
        mu = -mu;
    }
    let off = qs.iter().map(|q| (q * mu).im.abs()).fold(0.0, f64::max);
    Ok((off < tol).then_some(mu))
}

/// CMC-family shift `(C, H) ↦ (C + r, H + r)`.
pub fn cmc_family_shift(ch: (f64, f64), r: f64) -> (f64, f64) {
    (ch.0 + r, ch.1 + r)
}

/// The shift taking `C` to `−¼`.
pub fn revolution_shift(c: f64) -> f64 {
    -0.25 - c
}

/// Residual of the isothermic equation `q″ + 8q³ + Cq − Hq` for real q.
pub fn isothermic_residual(q: f64, d2q: f64, c: f64, h: f64) -> f64 {
    d2q + 8.0 * q * q * q + c * q - h * q
}

/// Space form of an elastic-curve reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElasticKind {
    Hyperbolic,
    Sphere,
}

/// Max interior residual of the elastic-curve equation for curvature samples at spacing `step`:
/// hyperbolic `κ″ + ½κ³ − κ − λ₁κ`, sphere `κ″ + ½κ³ + 2κ − λ₁κ − λ₂`.
pub fn elastic_residual(kind: ElasticKind, kappa: &[f64], step: f64, l1: f64, l2: f64) -> Result<f64> {
    if kappa.len() < 5 {
        return Err(Error::TooFewSamples { need: 5, got: kappa.len() });
    }
    let vals: Vec<[f64; 1]> = kappa.iter().map(|&k| [k]).collect();
    Ok((2..kappa.len() - 2)
        .map(|i| {
            let k = kappa[i];
            let d2 = crate::fd::derivative(&vals, i, step, 2, false)[0];
            let r = match kind {
                ElasticKind::Hyperbolic => d2 + 0.5 * k * k * k - k - l1 * k,
                ElasticKind::Sphere => d2 + 0.5 * k * k * k + 2.0 * k - l1 * k - l2,
            };
            r.abs()
        })
        .fold(0.0, f64::max))
}

/// Squared distance of jet `b` from `a` in `(q, q′, q″)`.
fn jet_distance(a: &HopfJet, b: (C64, C64, C64)) -> f64 {
    (a.q - b.0).norm_sqr() + (a.dq - b.1).norm_sqr() + (a.d2q - b.2).norm_sqr()
}

/// First return time of `(q, q′, q″)` to its initial value, refined between samples.
/// `None` when no return within `1e-6` relative is found.
pub fn find_period(traj: &Trajectory) -> Option<f64> {
    let j0 = traj.jets[0];
    let scale = 1.0 + j0.q.norm_sqr() + j0.dq.norm_sqr() + j0.d2q.norm_sqr();
    let d: Vec<f64> = traj.jets.iter().map(|j| jet_distance(&j0, (j.q, j.dq, j.d2q))).collect();
    let far = d.iter().cloned().fold(0.0, f64::max);
    if far < 1e-20 * scale {
        return None;
    }
    let mut left = false;
    for k in 1..d.len() - 1 {
        if d[k] > 0.05 * far {
            left = true;
        }
        if left && d[k] <= d[k - 1] && d[k] <= d[k + 1] && d[k] < 1e-3 * far {
            let y = refine_return(traj, &j0, k);
            let (q, dq, d2q) = jet_at(traj, y);
            if jet_distance(&j0, (q, dq, d2q)) < 1e-12 * scale {
                return Some(y - j0.y);
            }
        }
    }
    None
}

fn jet_at(traj: &Trajectory, y: f64) -> (C64, C64, C64) {
    let (q, dq) = traj.interp(y);
    // q″ from a cubic Hermite fit of (q″, q‴).
    let s = ((y - traj.jets[0].y) / traj.step).clamp(0.0, (traj.len() - 1) as f64);
    let k = (s.floor() as usize).min(traj.len() - 2);
    let t = s - k as f64;
    let (a, b) = (&traj.jets[k], &traj.jets[k + 1]);
    let h = traj.step;
    let d2q = (2.0 * t * t * t - 3.0 * t * t + 1.0) * a.d2q
        + (t * t * t - 2.0 * t * t + t) * h * a.d3q
        + (-2.0 * t * t * t + 3.0 * t * t) * b.d2q
        + (t * t * t - t * t) * h * b.d3q;
    (q, dq, d2q)
}

fn refine_return(traj: &Trajectory, j0: &HopfJet, k: usize) -> f64 {
    let f = |y: f64| {
        let v = jet_at(traj, y);
        jet_distance(j0, v)
    };
    let (mut a, mut b) = (traj.jets[k - 1].y, traj.jets[k + 1].y);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - g * (b - a);
        let e = a + g * (b - a);
        if f(c) < f(e) {
            b = e;
        } else {
            a = c;
        }
        if b - a < 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Integrates `(initial, params)` over exactly one detected period of q.
pub fn integrate_el_period(initial: &HopfJet, params: &ELParams, step: f64, max_length: f64) -> Result<Trajectory> {
    let probe = integrate_el(initial, params, max_length, step)?;
    let period = find_period(&probe)
        .ok_or_else(|| Error::InvalidInput(format!("no period of q found within length {max_length}")))?;
    let mut t = integrate_el(initial, params, period, step.min(period / 100.0))?;
    t.period = Some(period);
    Ok(t)
}
