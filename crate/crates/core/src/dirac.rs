//! The spectral curve from the monodromy side.
//!
//! The Dirac-type operator `∂_y + L(a, y)` has fundamental solution
//! `Φ′ = −LΦ`, `Φ(0) = I`; the transfer matrix over one period is `H(a) = Φ(L)`
//! and the discriminant is `Δ(a) = tr H(a)`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Mat2C;
use crate::elflow::Trajectory;
use crate::killing::{build_killing_field, lax_matrix, GenusConstants};
use crate::ode::{rk4_step, step_count};
use crate::spectral::SpectralCurveData;
use crate::{Error, Result};

/// Endpoint jet mismatch above which a potential is rejected as aperiodic.
pub const PERIODICITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferSample {
    pub a: C64,
    pub h: Mat2C,
    pub delta: C64,
}

impl TransferSample {
    /// `Δ² − 4`.
    pub fn discriminant(&self) -> C64 {
        self.delta * self.delta - 4.0
    }
}

fn check_periodic(traj: &Trajectory) -> Result<()> {
    let gap = traj.endpoint_mismatch();
    if gap > PERIODICITY_TOL {
        return Err(Error::AperiodicPotential(gap));
    }
    Ok(())
}

fn transfer_unchecked(traj: &Trajectory, a: C64, step: f64) -> TransferSample {
    let length = traj.length();
    let n = step_count(length, step.min(traj.step));
    let h = length / n as f64;
    let y0 = traj.jets[0].y;
    let f = |y: f64, phi: &Mat2C| -(lax_matrix(traj.interp(y).0, a) * *phi);
    let mut phi = Mat2C::IDENTITY;
    for k in 0..n {
        phi = rk4_step(&f, y0 + k as f64 * h, &phi, h);
    }
    TransferSample { a, h: phi, delta: phi.trace() }
}

/// Transfer matrix over the trajectory, which must span one period of q.
pub fn transfer_matrix(traj: &Trajectory, a: C64, step: f64) -> Result<TransferSample> {
    if traj.len() < 2 {
        return Err(Error::TooFewSamples { need: 2, got: traj.len() });
    }
    check_periodic(traj)?;
    Ok(transfer_unchecked(traj, a, step))
}

/// Transfer samples on a grid, computed in parallel and returned in grid order.
pub fn discriminant_scan(traj: &Trajectory, grid: &[C64], step: f64) -> Result<Vec<TransferSample>> {
    check_periodic(traj)?;
    Ok(grid.par_iter().map(|&a| transfer_unchecked(traj, a, step)).collect())
}

/// One branch point of det X and the matching zero of `Δ² − 4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchMatch {
    pub branch_point: C64,
    pub zero: C64,
    pub distance: f64,
    /// Winding number of `Δ² − 4` around the located zero.
    pub order: i64,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub matches: Vec<BranchMatch>,
    pub all_matched: bool,
    /// Largest relative commutator `‖[X(a), H(a)]‖/(‖X‖‖H‖)` over regular scan points.
    pub commutator: Option<f64>,
}

/// Rectangle in the a-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl SearchBox {
    pub fn contains(&self, a: C64) -> bool {
        a.re >= self.re.0 && a.re <= self.re.1 && a.im >= self.im.0 && a.im <= self.im.1
    }
}

/// Winding number of `f` around the circle of radius `r` about `z`.
fn winding(f: &impl Fn(C64) -> C64, z: C64, r: f64) -> i64 {
    let n = 64;
    let mut total = 0.0;
    let mut prev = f(z + r).arg();
    for k in 1..=n {
        let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let cur = f(z + C64::from_polar(r, th)).arg();
        let mut d = cur - prev;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d < -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        total += d;
        prev = cur;
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

/// Newton iteration on an analytic `f` with a central-difference derivative.
fn newton(f: &impl Fn(C64) -> C64, mut z: C64) -> C64 {
    for _ in 0..40 {
        let fz = f(z);
        let eps = 1e-6 * (1.0 + z.norm());
        let df = (f(z + eps) - f(z - eps)) / (2.0 * eps);
        if df.norm() == 0.0 {
            break;
        }
        let dz = fz / df;
        z -= dz;
        if dz.norm() < 1e-13 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Matches each branch point of det X inside `search` with an odd-order zero of `Δ² − 4`.
/// The scan seeds a Newton refinement; the order of the refined zero is read off
/// a winding number.
pub fn branch_match(
    curve: &SpectralCurveData,
    traj: &Trajectory,
    scan: &[TransferSample],
    search: SearchBox,
    step: f64,
    tol: f64,
) -> Result<MatchReport> {
    check_periodic(traj)?;
    let spacing = grid_spacing(scan);
    let disc = |a: C64| transfer_unchecked(traj, a, step).discriminant();
    let mut matches = Vec::new();
    for &bp in curve.branch_points.iter().filter(|b| search.contains(**b)) {
        let seed = scan
            .iter()
            .filter(|s| (s.a - bp).norm() <= 2.0 * spacing)
            .min_by(|x, y| x.discriminant().norm().total_cmp(&y.discriminant().norm()))
            .ok_or(Error::RefineGrid { re: bp.re, im: bp.im })?;
        let mut zero = newton(&disc, seed.a);
        if !zero.is_finite() || (zero - bp).norm() > spacing {
            zero = newton(&disc, bp);
        }
        let distance = (zero - bp).norm();
        let radius = (0.25 * spacing).clamp(1e-4, 1e-2);
        let order = winding(&disc, zero, radius);
        matches.push(BranchMatch {
            branch_point: bp,
            zero,
            distance,
            order,
            matched: distance < tol && order % 2 != 0,
        });
    }
    let all_matched = !matches.is_empty() && matches.iter().all(|m| m.matched);
    Ok(MatchReport { matches, all_matched, commutator: None })
}

fn grid_spacing(scan: &[TransferSample]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in scan.iter().enumerate() {
        for b in &scan[i + 1..] {
            let d = (a.a - b.a).norm();
            if d > 0.0 {
                best = best.min(d);
            }
        }
    }
    if best.is_finite() {
        best
    } else {
        1.0
    }
}

/// Largest `‖[X(a;y₀), H(a)]‖/(‖X‖‖H‖)` over samples with `|Δ² − 4| > near`.
pub fn commutator_check(
    traj: &Trajectory,
    constants: &GenusConstants,
    genus: usize,
    scan: &[TransferSample],
    near: f64,
) -> Result<f64> {
    let field = build_killing_field(&traj.jets[0], constants, genus)?;
    Ok(scan
        .iter()
        .filter(|s| s.discriminant().norm() > near)
        .map(|s| {
            let x = field.eval(s.a);
            x.commutator(&s.h).frobenius() / (x.frobenius() * s.h.frobenius())
        })
        .fold(0.0, f64::max))
}

/// Uniform `nx × ny` grid over a rectangle, row-major in the imaginary direction.
pub fn rect_grid(re: (f64, f64), im: (f64, f64), nx: usize, ny: usize) -> Vec<C64> {
    let lin = |(a, b): (f64, f64), n: usize, k: usize| {
        if n <= 1 {
            a
        } else {
            a + (b - a) * k as f64 / (n - 1) as f64
        }
    };
    (0..ny)
        .flat_map(|j| (0..nx).map(move |i| C64::new(lin(re, nx, i), lin(im, ny, j))))
        .collect()
}
