//! Willmore energy from the Hopf differential and from a torus mesh.

use serde::{Deserialize, Serialize};

use super::mesh::TorusMesh;
use crate::algebra::Quaternion;
use crate::elflow::Trajectory;
use crate::fd::stencil;
use crate::Result;

/// Observed ratio `W_mesh / W_curve`, fixed once for every surface.
pub const KAPPA_FIX: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WillmoreEnergy {
    /// `16π ∫|q|² dy`.
    pub w_curve: f64,
    /// `∫(H² + 1) dA` over the mesh.
    pub w_mesh: Option<f64>,
}

/// Composite Simpson on an odd number of samples, trapezoid otherwise.
fn integrate(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    if n % 2 == 1 && n >= 3 {
        let inner: f64 = values[1..n - 1]
            .iter()
            .enumerate()
            .map(|(k, v)| if k % 2 == 0 { 4.0 * v } else { 2.0 * v })
            .sum();
        h / 3.0 * (values[0] + values[n - 1] + inner)
    } else {
        h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1]))
    }
}

/// Unit vector orthogonal to three vectors of ℝ⁴ (generalized cross product).
fn normal4(a: Quaternion, b: Quaternion, c: Quaternion) -> Quaternion {
    let (a, b, c) = (a.to_array(), b.to_array(), c.to_array());
    let minor = |i: usize, j: usize, k: usize| {
        a[i] * (b[j] * c[k] - b[k] * c[j]) - a[j] * (b[i] * c[k] - b[k] * c[i]) + a[k] * (b[i] * c[j] - b[j] * c[i])
    };
    Quaternion::new(-minor(1, 2, 3), minor(0, 2, 3), -minor(0, 1, 3), minor(0, 1, 2)).normalized()
}

fn mesh_energy(mesh: &TorusMesh) -> f64 {
    let (nx, ny) = (mesh.nx, mesh.ny);
    let at = |i: usize, j: usize| mesh.vertex(i, j);
    let combine = |terms: Vec<(usize, usize, f64)>| {
        terms.into_iter().fold(Quaternion::ZERO, |acc, (i, j, w)| acc + at(i, j).scale(w))
    };
    let mut rows = Vec::with_capacity(ny);
    for j in 0..ny {
        let sy1 = stencil(ny, j, mesh.dy, 1, mesh.wrap_y);
        let sy2 = stencil(ny, j, mesh.dy, 2, mesh.wrap_y);
        let mut row = 0.0;
        for i in 0..nx {
            let sx1 = stencil(nx, i, mesh.dx, 1, true);
            let sx2 = stencil(nx, i, mesh.dx, 2, true);
            let fx = combine(sx1.iter().map(|&(ii, w)| (ii, j, w)).collect());
            let fy = combine(sy1.iter().map(|&(jj, w)| (i, jj, w)).collect());
            let fxx = combine(sx2.iter().map(|&(ii, w)| (ii, j, w)).collect());
            let fyy = combine(sy2.iter().map(|&(jj, w)| (i, jj, w)).collect());
            let fxy = combine(
                sx1.iter()
                    .flat_map(|&(ii, wx)| sy1.iter().map(move |&(jj, wy)| (ii, jj, wx * wy)))
                    .collect(),
            );
            let nu = normal4(at(i, j), fx, fy);
            let (e, f, g) = (fx.norm_sqr(), fx.dot(fy), fy.norm_sqr());
            let (l, m, n) = (fxx.dot(nu), fxy.dot(nu), fyy.dot(nu));
            let det = e * g - f * f;
            let hmean = (l * g - 2.0 * m * f + n * e) / (2.0 * det);
            row += (hmean * hmean + 1.0) * det.sqrt();
        }
        rows.push(row * mesh.dx);
    }
    if mesh.wrap_y {
        rows.iter().sum::<f64>() * mesh.dy
    } else {
        integrate(&rows, mesh.dy)
    }
}

/// `W_curve = 16π∫|q|²dy` over the trajectory, and the mesh integral when a mesh is given.
pub fn willmore_energy(traj: &Trajectory, mesh: Option<&TorusMesh>) -> Result<WillmoreEnergy> {
    let dens: Vec<f64> = traj.jets.iter().map(|j| j.q.norm_sqr()).collect();
    let w_curve = 16.0 * std::f64::consts::PI * integrate(&dens, traj.step);
    Ok(WillmoreEnergy { w_curve, w_mesh: mesh.map(mesh_energy) })
}
