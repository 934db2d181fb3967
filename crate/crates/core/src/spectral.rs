//! The spectral curve `η² = det X(a)` seen from the Killing-field side.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{poly_roots, CPoly, Root};
use crate::elflow::Trajectory;
use crate::killing::{build_killing_field, GenusConstants, KillingField};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCurveData {
    pub p: CPoly,
    /// All roots of P with multiplicities.
    pub roots: Vec<Root>,
    /// Odd-order roots; the branch points of the normalized curve.
    pub branch_points: Vec<C64>,
    /// `#branch_points/2 − 1`; `None` when P is a perfect square.
    pub genus: Option<usize>,
    /// Set when P has a repeated root or no odd-order root at all.
    pub singular: bool,
    pub evenness_residual: f64,
    pub reality_residual: f64,
}

/// `det X(a) = −α(a)² − β(a)γ(a)` for `X = [[α, β], [γ, −α]]`.
pub fn det_killing(field: &KillingField) -> CPoly {
    let entry = |r: usize, c: usize| CPoly::new(field.coeffs.iter().map(|x| x.m[r][c]).collect());
    let (a, b, g) = (entry(0, 0), entry(0, 1), entry(1, 0));
    let zero = CPoly::new(vec![]);
    zero - a.clone() * a - b * g
}

/// `(max|odd coeff|, max|Im coeff|)`, each relative to the largest coefficient.
pub fn check_symmetries(p: &CPoly) -> Result<(f64, f64)> {
    let max = p.max_coeff();
    if max == 0.0 {
        return Err(Error::DegeneratePolynomial);
    }
    let odd = p.coeffs.iter().skip(1).step_by(2).map(|c| c.norm()).fold(0.0, f64::max);
    let imag = p.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    Ok((odd / max, imag / max))
}

/// Branch points and genus of `det X`.
pub fn curve_from_field(field: &KillingField, tol: f64) -> Result<SpectralCurveData> {
    let p = det_killing(field);
    curve_from_poly(p, tol)
}

pub fn curve_from_poly(p: CPoly, tol: f64) -> Result<SpectralCurveData> {
    let (evenness_residual, reality_residual) = check_symmetries(&p)?;
    if evenness_residual > 1e-6 || reality_residual > 1e-6 {
        return Err(Error::InvalidInput(format!(
            "det X is not even and real (odd {evenness_residual:.3e}, imaginary {reality_residual:.3e})"
        )));
    }
    let roots = poly_roots(&p, tol)?;
    let branch_points: Vec<C64> = roots.iter().filter(|r| r.multiplicity % 2 == 1).map(|r| r.root).collect();
    let genus = (!branch_points.is_empty()).then(|| branch_points.len() / 2 - 1);
    let singular = branch_points.is_empty() || roots.iter().any(|r| r.multiplicity > 1);
    Ok(SpectralCurveData { p, roots, branch_points, genus, singular, evenness_residual, reality_residual })
}

/// Largest set distance of `points` from their images under `a ↦ −a` and `a ↦ ā`.
pub fn involution_residual(points: &[C64]) -> f64 {
    let nearest = |z: C64| points.iter().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min);
    points
        .iter()
        .map(|&p| nearest(-p).max(nearest(p.conj())))
        .fold(0.0, f64::max)
}

/// Coefficientwise drift of det X along a trajectory, relative to the largest coefficient at the start.
pub fn spectral_invariance(traj: &Trajectory, constants: &GenusConstants, genus: usize) -> Result<f64> {
    let p0 = det_killing(&build_killing_field(&traj.jets[0], constants, genus)?);
    let scale = p0.max_coeff();
    let mut worst = 0.0f64;
    for j in &traj.jets[1..] {
        let p = det_killing(&build_killing_field(j, constants, genus)?);
        for k in 0..p0.coeffs.len().max(p.coeffs.len()) {
            worst = worst.max((p.coeff(k) - p0.coeff(k)).norm() / scale);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elflow::HopfJet;
    use crate::killing::integrate_flow;

    fn field(q: C64, dq: C64, c: f64, genus: usize) -> KillingField {
        let j = HopfJet { q, dq, ..Default::default() };
        build_killing_field(&j, &GenusConstants::new(c, 0.0, 0.0), genus).unwrap()
    }

    #[test]
    fn genus0_determinants() {
        let p = det_killing(&field(C64::new(0.0, 0.5), C64::default(), 0.0, 0));
        assert_eq!(p.coeffs.len(), 3);
        assert!((p.coeff(0) - 1.0).norm() < 1e-15 && p.coeff(1).norm() < 1e-15 && (p.coeff(2) - 1.0).norm() < 1e-15);
        let q0 = C64::new(0.3, -0.7);
        let p = det_killing(&field(q0, C64::default(), 0.0, 0));
        assert!((p.coeff(0) - 4.0 * q0.norm_sqr()).norm() < 1e-14);
    }

    #[test]
    fn genus1_critical_point() {
        let p = det_killing(&field(C64::new(0.5, 0.0), C64::default(), -0.25, 1));
        let want = [0.0, 0.0, 1.0, 0.0, 1.0];
        for (k, w) in want.iter().enumerate() {
            assert!((p.coeff(k) - w).norm() < 1e-15);
        }
        let curve = curve_from_poly(p, 1e-10).unwrap();
        assert_eq!(curve.genus, Some(0));
        assert!(curve.singular);
        assert_eq!(curve.branch_points.len(), 2);
    }

    #[test]
    fn symmetry_examples() {
        assert_eq!(check_symmetries(&CPoly::from_real(&[1.0, 0.0, 1.0])).unwrap(), (0.0, 0.0));
        assert_eq!(check_symmetries(&CPoly::from_real(&[0.0, 0.0, 1.0, 1.0])).unwrap(), (1.0, 0.0));
        assert!(check_symmetries(&CPoly::from_real(&[0.0])).is_err());
    }

    #[test]
    fn homogeneous_curve() {
        let c = curve_from_field(&field(C64::new(0.0, 0.5), C64::default(), 0.0, 0), 1e-10).unwrap();
        assert_eq!(c.genus, Some(0));
        assert!(!c.singular);
        let mut b = c.branch_points.clone();
        b.sort_by(|x, y| x.im.total_cmp(&y.im));
        assert!((b[0] + C64::new(0.0, 1.0)).norm() < 1e-12 && (b[1] - C64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn invariance_along_elastic_run() {
        let k = GenusConstants::new(0.2, 0.0, 0.0);
        let j = HopfJet { q: C64::new(0.7, 0.0), ..Default::default() };
        let t = integrate_flow(1, &k, &j, 3.0, 1e-3).unwrap();
        assert!(spectral_invariance(&t, &k, 1).unwrap() < 1e-6);
        let t = Trajectory::from_fn(|_| [C64::new(0.1, 0.4), C64::default(), C64::default(), C64::default(), C64::default()], 1.0, 0.1);
        assert_eq!(spectral_invariance(&t, &GenusConstants::default(), 0).unwrap(), 0.0);
    }

    #[test]
    fn involution_residual_of_symmetric_set() {
        let pts = [C64::new(1.0, 2.0), C64::new(-1.0, 2.0), C64::new(1.0, -2.0), C64::new(-1.0, -2.0)];
        assert_eq!(involution_residual(&pts), 0.0);
        assert!(involution_residual(&pts[..3]) > 1.0);
    }
}
