//! Quad meshes of the equivariant torus `f(x, y) = e^{𝕚l₁x} γ(y) e^{𝕚l₂x}`.

use serde::{Deserialize, Serialize};

use super::profile::ProfileCurve;
use crate::algebra::Quaternion;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusMesh {
    /// `vertices[j * nx + i] = f(xᵢ, yⱼ)`.
    pub vertices: Vec<Quaternion>,
    /// Quads as 0-based vertex indices.
    pub faces: Vec<[usize; 4]>,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    /// True when the profile curve closes and rows wrap around.
    pub wrap_y: bool,
}

impl TorusMesh {
    pub fn vertex(&self, i: usize, j: usize) -> Quaternion {
        self.vertices[j * self.nx + i]
    }
}

/// Start and end samples agree to this tolerance for a closed profile curve.
pub const CLOSURE_TOL: f64 = 1e-8;

fn is_closed(curve: &ProfileCurve) -> bool {
    match (curve.samples.first(), curve.samples.last()) {
        (Some(a), Some(b)) if curve.samples.len() > 2 => {
            a.gamma.max_abs_diff(b.gamma) < CLOSURE_TOL && a.dgamma.max_abs_diff(b.dgamma) < CLOSURE_TOL
        }
        _ => false,
    }
}

/// Orbit of the profile curve under the circle action, `x ∈ [0, 2π)` in `nx` steps.
/// Rows wrap in y only when the curve is closed; its duplicate endpoint is then dropped.
pub fn build_torus_mesh(curve: &ProfileCurve, nx: usize) -> Result<TorusMesh> {
    if nx < 8 {
        return Err(Error::InvalidInput(format!("n_x must be at least 8, got {nx}")));
    }
    let wrap_y = is_closed(curve);
    let rows = if wrap_y { &curve.samples[..curve.samples.len() - 1] } else { &curve.samples[..] };
    let ny = rows.len();
    let dx = 2.0 * std::f64::consts::PI / nx as f64;
    let vertices: Vec<Quaternion> = rows
        .iter()
        .flat_map(|s| (0..nx).map(move |i| curve.st.act(i as f64 * dx, s.gamma)))
        .collect();
    let face_rows = if wrap_y { ny } else { ny.saturating_sub(1) };
    let faces = (0..face_rows)
        .flat_map(|j| {
            let j1 = (j + 1) % ny;
            (0..nx).map(move |i| {
                let i1 = (i + 1) % nx;
                [j * nx + i, j * nx + i1, j1 * nx + i1, j1 * nx + i]
            })
        })
        .collect();
    Ok(TorusMesh { vertices, faces, nx, ny, dx, dy: curve.step, wrap_y })
}
