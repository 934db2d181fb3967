//! Polynomial Killing fields `X(a) = Σ Xᵢ aⁱ` of spectral genus 0–3.
//!
//! Coefficients are assembled from the top down: with `Yⱼ = X_{p+1−j}`,
//! `Y₀ = diag(−i, i)`, `Y₁ = offdiag(2iq̄, 2iq)`, and each further row
//! `[[α, β], [γ, −α]]` follows from `X′ = [X, L]`,
//! `L(a) = [[−ia, 2iq̄], [2iq, ia]]`, expanded in jet coordinates.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::Mat2C;
use crate::elflow::{find_period, Dynamics, ELParams, HopfJet, Trajectory};
use crate::ode::{rk4_step, step_count};
use crate::{Error, Result};

const I: C64 = C64::new(0.0, 1.0);

/// Default absolute tolerance on flow residuals, scaled by `max(1, |q|∞⁴)`.
pub const FLOW_TOL: f64 = 1e-6;
/// Default tolerance on the relative odd-coefficient residual of det X.
pub const SYMMETRY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GenusConstants {
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub dtilde: f64,
}

impl GenusConstants {
    pub fn new(c: f64, d: f64, e: f64) -> Self {
        Self { c, d, e, dtilde: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillingField {
    pub genus: usize,
    /// `coeffs[i]` multiplies `aⁱ`; length `genus + 2`.
    pub coeffs: Vec<Mat2C>,
    pub constants: GenusConstants,
    pub y: f64,
}

impl KillingField {
    pub fn eval(&self, a: C64) -> Mat2C {
        self.coeffs
            .iter()
            .rev()
            .fold(Mat2C::ZERO, |acc, x| acc * Mat2C::IDENTITY.scale(a) + *x)
    }
}

/// Rows `Y₀..Y₄` as `(α, β, γ)`.
fn rows(jet: &HopfJet, k: &GenusConstants) -> [(C64, C64, C64); 5] {
    let [q, q1, q2, q3, _] = jet.derivs();
    let (qb, q1b, q2b, q3b) = (q.conj(), q1.conj(), q2.conj(), q3.conj());
    let nq = q.norm_sqr();
    let (c, d, e) = (k.c, k.d, k.e);
    let zero = C64::new(0.0, 0.0);
    [
        (-I, zero, zero),
        (zero, 2.0 * I * qb, 2.0 * I * q),
        (2.0 * I * (nq + c), q1b, -q1),
        (
            q1b * q - q1 * qb - I * d,
            -4.0 * I * nq * qb - 4.0 * I * c * qb - 0.5 * I * q2b,
            -4.0 * I * nq * q - 4.0 * I * c * q - 0.5 * I * q2,
        ),
        (
            -6.0 * I * nq * nq - 4.0 * I * c * nq - 0.5 * I * (qb * q2 - q1b * q1 + q2b * q) - I * e,
            -6.0 * nq * q1b + 2.0 * I * d * qb - 2.0 * c * q1b - 0.25 * q3b,
            6.0 * nq * q1 + 2.0 * c * q1 + 2.0 * I * d * q + 0.25 * q3,
        ),
    ]
}

pub fn build_killing_field(jet: &HopfJet, constants: &GenusConstants, genus: usize) -> Result<KillingField> {
    if genus > 3 {
        return Err(Error::InsufficientJet(genus));
    }
    let r = rows(jet, constants);
    let coeffs = (0..=genus + 1)
        .map(|i| {
            let (a, b, g) = r[genus + 1 - i];
            Mat2C::traceless(a, b, g)
        })
        .collect();
    Ok(KillingField { genus, coeffs, constants: *constants, y: jet.y })
}

/// The Lax matrix `L(a) = [[−ia, 2iq̄], [2iq, ia]]`.
pub fn lax_matrix(q: C64, a: C64) -> Mat2C {
    Mat2C::new(-I * a, 2.0 * I * q.conj(), 2.0 * I * q, I * a)
}

/// Spectral parameters used for the Lax residual.
pub const LAX_GRID: [C64; 7] = [
    C64::new(0.0, 0.0),
    C64::new(1.0, 0.0),
    C64::new(-1.0, 0.0),
    C64::new(0.0, 1.0),
    C64::new(0.0, -1.0),
    C64::new(2.0, 0.0),
    C64::new(-2.0, 0.0),
];

/// `max ‖dX/dy − [X, L]‖` over interior samples and [`LAX_GRID`], with `dX/dy`
/// from five-point central differences of the pointwise fields.
pub fn lax_residual(traj: &Trajectory, constants: &GenusConstants, genus: usize) -> Result<f64> {
    if traj.len() < 5 {
        return Err(Error::TooFewSamples { need: 5, got: traj.len() });
    }
    let fields = traj
        .jets
        .iter()
        .map(|j| build_killing_field(j, constants, genus))
        .collect::<Result<Vec<_>>>()?;
    let h = traj.step;
    let w = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
    let mut worst = 0.0f64;
    for k in 2..fields.len() - 2 {
        for &a in &LAX_GRID {
            let x = fields[k].eval(a);
            let dx = (0..5).fold(Mat2C::ZERO, |acc, s| {
                acc + fields[k + s - 2].eval(a).scale(C64::new(w[s] / h, 0.0))
            });
            let l = lax_matrix(traj.jets[k].q, a);
            worst = worst.max((dx - x.commutator(&l)).max_abs());
        }
    }
    Ok(worst)
}

/// Absolute residuals of the genus 0–3 flows and the symmetry conditions at one jet.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FlowResiduals {
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub sym1: f64,
    pub sym2: f64,
    pub sym3: f64,
}

impl FlowResiduals {
    pub fn flow(&self, genus: usize) -> f64 {
        [self.g0, self.g1, self.g2, self.g3][genus]
    }
}

/// Splits the genus-`p` flow as `A + Σ kᵢ Bᵢ` over the constants it involves.
fn flow_terms(jet: &HopfJet, genus: usize) -> (C64, Vec<C64>) {
    let [q, q1, q2, q3, q4] = jet.derivs();
    let nq = q.norm_sqr();
    match genus {
        0 => (q1, vec![]),
        1 => (q2 + 8.0 * nq * q, vec![8.0 * q]),
        2 => (q3 + 24.0 * nq * q1, vec![8.0 * q1, 8.0 * I * q]),
        _ => (
            q4 + 96.0 * nq * nq * q
                + 16.0 * q1.norm_sqr() * q
                + 24.0 * q1 * q1 * q.conj()
                + 8.0 * q2.conj() * q * q
                + 32.0 * nq * q2,
            vec![8.0 * q2 + 64.0 * nq * q, 8.0 * I * q1, 16.0 * q],
        ),
    }
}

fn flow_value(jet: &HopfJet, k: &GenusConstants, genus: usize) -> C64 {
    let (a, b) = flow_terms(jet, genus);
    let ks = [k.c, k.d, k.e];
    a + b.iter().zip(ks).map(|(b, k)| b * k).sum::<C64>()
}

pub fn flow_residuals(jet: &HopfJet, k: &GenusConstants) -> FlowResiduals {
    let [q, q1, q2, q3, _] = jet.derivs();
    let qb = q.conj();
    let nq = q.norm_sqr();
    FlowResiduals {
        g0: flow_value(jet, k, 0).norm(),
        g1: flow_value(jet, k, 1).norm(),
        g2: flow_value(jet, k, 2).norm(),
        g3: flow_value(jet, k, 3).norm(),
        sym1: (q1 * qb).im.abs(),
        sym2: (q2 * q1.conj()).im.abs() / 4.0,
        sym3: (q3 * qb + 24.0 * nq * qb * q1 + 8.0 * k.c * qb * q1 + q2.conj() * q1).im.abs(),
    }
}

/// Solves the small symmetric system `G x = b`; `None` when near singular.
#[allow(clippy::needless_range_loop)]
fn solve_sym(mut g: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = (0..n).map(|i| g[i][i].abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| g[i][c].abs().total_cmp(&g[j][c].abs()))?;
        g.swap(p, c);
        b.swap(p, c);
        if g[c][c].abs() < 1e-10 * scale {
            return None;
        }
        for r in c + 1..n {
            let f = g[r][c] / g[c][c];
            for k in c..n {
                g[r][k] -= f * g[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        x[r] = (b[r] - (r + 1..n).map(|k| g[r][k] * x[k]).sum::<f64>()) / g[r][r];
    }
    Some(x)
}

/// Least-squares constants for the genus-`p` flow over all samples, and the
/// largest remaining flow residual.
pub fn fit_constants(traj: &Trajectory, genus: usize) -> Result<(GenusConstants, f64)> {
    if genus > 3 {
        return Err(Error::InsufficientJet(genus));
    }
    if traj.is_empty() {
        return Err(Error::InvalidInput("empty trajectory".into()));
    }
    let terms: Vec<(C64, Vec<C64>)> = traj.jets.iter().map(|j| flow_terms(j, genus)).collect();
    let n = genus.min(3);
    let mut g = vec![vec![0.0; n]; n];
    let mut rhs = vec![0.0; n];
    for (a, b) in &terms {
        for i in 0..n {
            for k in 0..n {
                g[i][k] += (b[i].conj() * b[k]).re;
            }
            rhs[i] -= (b[i].conj() * a).re;
        }
    }
    let x = if n == 0 { vec![] } else { solve_sym(g, rhs).ok_or(Error::Unidentifiable)? };
    let mut k = GenusConstants::default();
    for (slot, v) in [&mut k.c, &mut k.d, &mut k.e].into_iter().zip(&x) {
        *slot = *v;
    }
    let resid = traj.jets.iter().map(|j| flow_value(j, &k, genus).norm()).fold(0.0, f64::max);
    Ok((k, resid))
}

/// Genus-3 constants of a real-λ EL solution: `4c − 8C + λ = 0` and
/// `2e + d̃ + 8C² − 8cC = 0`.
pub fn constants_from_el(params: &ELParams, dtilde: f64) -> Result<GenusConstants> {
    let lam = params.real_lambda()?;
    let big_c = params.c;
    let c = (8.0 * big_c - lam) / 4.0;
    let e = -(dtilde + 8.0 * big_c * big_c - 8.0 * c * big_c) / 2.0;
    Ok(GenusConstants { c, d: 0.0, e, dtilde })
}

/// Outcome of [`genus_classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenusClass {
    Genus(usize),
    Above3,
}

/// Residuals recorded for one candidate genus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenusEvidence {
    pub genus: usize,
    pub constants: Option<GenusConstants>,
    pub flow_residual: f64,
    pub symmetry_residual: f64,
    pub flow_tol: f64,
    pub symmetry_tol: f64,
    pub passed: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub genus: GenusClass,
    pub isothermic: Option<C64>,
    pub evidence: Vec<GenusEvidence>,
}

/// Largest relative odd coefficient of det X over all samples.
pub fn symmetry_residual(traj: &Trajectory, k: &GenusConstants, genus: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for j in &traj.jets {
        let p = crate::spectral::det_killing(&build_killing_field(j, k, genus)?);
        let (even, real) = crate::spectral::check_symmetries(&p)?;
        worst = worst.max(even).max(real);
    }
    Ok(worst)
}

/// Smallest genus whose fitted flow and σ-symmetry residuals pass.
pub fn genus_classify(traj: &Trajectory, tol: f64) -> Result<Classification> {
    let isothermic = crate::elflow::isothermic_detect(traj, 1e-8 * traj.q_sup().max(1.0))?;
    let scale = traj.q_sup().powi(4).max(1.0);
    let flow_tol = tol * scale;
    let mut evidence = Vec::new();
    let mut genus = GenusClass::Above3;
    for p in 0..=3 {
        let ev = match fit_constants(traj, p) {
            Ok((k, flow)) => {
                let sym = symmetry_residual(traj, &k, p)?;
                GenusEvidence {
                    genus: p,
                    constants: Some(k),
                    flow_residual: flow,
                    symmetry_residual: sym,
                    flow_tol,
                    symmetry_tol: SYMMETRY_TOL,
                    passed: flow < flow_tol && sym < SYMMETRY_TOL,
                    note: None,
                }
            }
            Err(Error::Unidentifiable) => GenusEvidence {
                genus: p,
                constants: None,
                flow_residual: f64::NAN,
                symmetry_residual: f64::NAN,
                flow_tol,
                symmetry_tol: SYMMETRY_TOL,
                passed: false,
                note: Some("constants unidentifiable".into()),
            },
            Err(e) => return Err(e),
        };
        let passed = ev.passed;
        evidence.push(ev);
        if passed {
            genus = GenusClass::Genus(p);
            break;
        }
    }
    Ok(Classification { genus, isothermic, evidence })
}

/// Completes a jet of the genus-`p` stationary flow from its state.
pub fn flow_jet(genus: usize, k: &GenusConstants, y: f64, d: [C64; 4], r: f64) -> HopfJet {
    let (c, dd, e) = (k.c, k.d, k.e);
    let [q, q1, mut q2, mut q3] = d;
    let nq = q.norm_sqr();
    let dnq = 2.0 * (q.conj() * q1).re;
    match genus {
        0 => {
            return HopfJet { y, q, r, ..Default::default() };
        }
        1 => {
            q2 = -8.0 * (nq + c) * q;
            q3 = -8.0 * (dnq * q + (nq + c) * q1);
        }
        2 => {
            q3 = -24.0 * nq * q1 - 8.0 * c * q1 - 8.0 * I * dd * q;
        }
        _ => {}
    }
    let mut jet = HopfJet { y, q, dq: q1, d2q: q2, d3q: q3, d4q: C64::default(), r };
    jet.d4q = match genus {
        1 => {
            let d2nq = 2.0 * (q1.norm_sqr() + (q.conj() * q2).re);
            -8.0 * (d2nq * q + 2.0 * dnq * q1 + (nq + c) * q2)
        }
        2 => -24.0 * (dnq * q1 + nq * q2) - 8.0 * c * q2 - 8.0 * I * dd * q1,
        _ => {
            let zero = GenusConstants { c, d: dd, e, dtilde: 0.0 };
            -flow_value(&jet, &zero, 3)
        }
    };
    jet
}

/// Integrates the genus-`p` stationary flow from the lowest `p+1` derivatives of `initial`.
pub fn integrate_flow(
    genus: usize,
    k: &GenusConstants,
    initial: &HopfJet,
    length: f64,
    step: f64,
) -> Result<Trajectory> {
    if genus > 3 {
        return Err(Error::InsufficientJet(genus));
    }
    if !(step > 0.0 && length > 0.0) {
        return Err(Error::InvalidInput("need step > 0 and length > 0".into()));
    }
    let n = step_count(length, step);
    let h = length / n as f64;
    let order = genus + 1;
    let unpack = |s: &[f64; 9]| -> [C64; 4] { std::array::from_fn(|i| C64::new(s[2 * i], s[2 * i + 1])) };
    let rhs = |y: f64, s: &[f64; 9]| -> [f64; 9] {
        let d = unpack(s);
        let jet = flow_jet(genus, k, y, d, s[8]);
        let all = jet.derivs();
        let mut out = [0.0; 9];
        for i in 0..order.min(4) {
            out[2 * i] = all[i + 1].re;
            out[2 * i + 1] = all[i + 1].im;
        }
        out[8] = (jet.dq.conj() * jet.q).im;
        out
    };
    let init = initial.derivs();
    let mut state = [0.0; 9];
    for i in 0..4 {
        state[2 * i] = init[i].re;
        state[2 * i + 1] = init[i].im;
    }
    state[8] = initial.r;
    let mut jets = Vec::with_capacity(n + 1);
    for s in 0..=n {
        let y = initial.y + s as f64 * h;
        if state.iter().any(|v| !v.is_finite() || v.abs() > 1e150) {
            return Err(Error::BlowUp { y });
        }
        jets.push(flow_jet(genus, k, y, unpack(&state), state[8]));
        if s < n {
            state = rk4_step(&rhs, y, &state, h);
        }
    }
    Ok(Trajectory { jets, step: h, period: None, dynamics: Dynamics::Flow { genus, constants: *k } })
}

/// Integrates a stationary flow over exactly one detected period of q.
pub fn integrate_flow_period(
    genus: usize,
    k: &GenusConstants,
    initial: &HopfJet,
    step: f64,
    max_length: f64,
) -> Result<Trajectory> {
    let probe = integrate_flow(genus, k, initial, max_length, step)?;
    let period = find_period(&probe)
        .ok_or_else(|| Error::InvalidInput(format!("no period of q found within length {max_length}")))?;
    let mut t = integrate_flow(genus, k, initial, period, step.min(period / 100.0))?;
    t.period = Some(period);
    Ok(t)
}
