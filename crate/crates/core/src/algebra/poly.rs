//! Univariate complex polynomials, low degree first.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative threshold below which trailing coefficients do not count toward the degree.
pub const DEGREE_THRESHOLD: f64 = 1e-10;

/// Single-link clustering radius is `CLUSTER_SCALE · s · tol^(1/k)` for a candidate
/// cluster of size `k`, with `s = 1 + max|root|`.
pub const CLUSTER_SCALE: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CPoly {
    pub coeffs: Vec<C64>,
}

/// A root together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub root: C64,
    pub multiplicity: usize,
}

impl CPoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    /// Monic polynomial `Π (a − rᵢ)`.
    pub fn from_roots(roots: &[C64]) -> Self {
        roots.iter().fold(Self::from_real(&[1.0]), |acc, &r| {
            acc * Self::new(vec![-r, C64::new(1.0, 0.0)])
        })
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Degree under the default relative truncation threshold; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.degree_with(DEGREE_THRESHOLD * self.max_coeff())
    }

    /// Index of the last coefficient whose modulus exceeds `threshold`.
    pub fn degree_with(&self, threshold: f64) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm() > threshold)
    }

    pub fn eval(&self, a: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * a + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Drops coefficients above the detected degree.
    pub fn trimmed(&self) -> Self {
        match self.degree() {
            Some(d) => Self::new(self.coeffs[..=d].to_vec()),
            None => Self::new(vec![]),
        }
    }

    /// Divides by the leading coefficient (after trimming).
    pub fn monic(&self) -> Self {
        let t = self.trimmed();
        let lead = *t.coeffs.last().unwrap_or(&C64::new(1.0, 0.0));
        Self::new(t.coeffs.iter().map(|&c| c / lead).collect())
    }
}

impl Add for CPoly {
    type Output = CPoly;
    fn add(self, o: CPoly) -> CPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        CPoly::new((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }
}

impl Sub for CPoly {
    type Output = CPoly;
    fn sub(self, o: CPoly) -> CPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        CPoly::new((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }
}

impl Mul for CPoly {
    type Output = CPoly;
    fn mul(self, o: CPoly) -> CPoly {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return CPoly::new(vec![]);
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CPoly::new(out)
    }
}

/// Simultaneous Aberth–Ehrlich iteration for all roots of a monic polynomial.
fn aberth(p: &CPoly) -> Vec<C64> {
    let n = p.coeffs.len() - 1;
    let dp = p.derivative();
    // Cauchy-type radius for the starting circle.
    let radius = 1.0
        + p.coeffs[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let r0 = radius.min(
        p.coeffs[..n]
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm().powf(1.0 / (n - k) as f64))
            .fold(0.0, f64::max)
            * 2.0
            + 1e-3,
    );
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(r0, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let pk = p.eval(z[k]);
            if pk.norm() == 0.0 {
                continue;
            }
            let ratio = pk / dp.eval(z[k]);
            let s: C64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if w.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    z
}

/// Newton polish of `z` on `p`, keeping the better of the two iterates.
fn polish(p: &CPoly, mut z: C64) -> C64 {
    let dp = p.derivative();
    for _ in 0..8 {
        let d = dp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let step = p.eval(z) / d;
        let cand = z - step;
        if !cand.is_finite() || p.eval(cand).norm() > p.eval(z).norm() {
            break;
        }
        z = cand;
    }
    z
}

/// Roots with multiplicities; multiplicities come from clustering numerically split roots.
pub fn poly_roots(p: &CPoly, tol: f64) -> Result<Vec<Root>> {
    let max = p.max_coeff();
    let deg = p.degree_with(tol.max(DEGREE_THRESHOLD) * max).filter(|&d| d >= 1);
    let Some(deg) = deg else {
        return Err(Error::DegeneratePolynomial);
    };
    if p.coeff(deg).norm() <= tol {
        return Err(Error::DegeneratePolynomial);
    }
    let lead = p.coeff(deg);
    let monic = CPoly::new(p.coeffs[..=deg].iter().map(|&c| c / lead).collect());
    let raw = aberth(&monic);

    let scale = 1.0 + raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut clusters: Vec<Vec<C64>> = raw.into_iter().map(|z| vec![z]).collect();
    loop {
        let centroid = |c: &Vec<C64>| c.iter().sum::<C64>() / c.len() as f64;
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let k = clusters[i].len() + clusters[j].len();
                let gap = (centroid(&clusters[i]) - centroid(&clusters[j])).norm();
                let radius = CLUSTER_SCALE * scale * tol.powf(1.0 / k as f64);
                let ratio = gap / radius;
                if ratio < 1.0 && best.is_none_or(|b| ratio < b.2) {
                    best = Some((i, j, ratio));
                }
            }
        }
        match best {
            Some((i, j, _)) => {
                let tail = clusters.swap_remove(j);
                clusters[i].extend(tail);
            }
            None => break,
        }
    }

    let mut roots: Vec<Root> = clusters
        .into_iter()
        .map(|c| {
            let k = c.len();
            let mean = c.iter().sum::<C64>() / k as f64;
            // A k-fold root is a simple root of the (k−1)-th derivative.
            let mut dk = monic.clone();
            for _ in 1..k {
                dk = dk.derivative();
            }
            let refined = polish(&dk, mean);
            let root = if (refined - mean).norm() < CLUSTER_SCALE * scale * tol.powf(1.0 / k as f64) {
                refined
            } else {
                mean
            };
            Root { root, multiplicity: k }
        })
        .collect();
    roots.sort_by(|a, b| {
        a.root
            .re
            .total_cmp(&b.root.re)
            .then(a.root.im.total_cmp(&b.root.im))
    });
    Ok(roots)
}

/// Roots of odd multiplicity.
pub fn poly_odd_order_roots(p: &CPoly, tol: f64) -> Result<Vec<C64>> {
    Ok(poly_roots(p, tol)?
        .into_iter()
        .filter(|r| r.multiplicity % 2 == 1)
        .map(|r| r.root)
        .collect())
}
