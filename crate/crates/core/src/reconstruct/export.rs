//! OBJ and CSV writers.

use std::fmt::Write;

use super::mesh::TorusMesh;
use super::profile::ProfileCurve;
use crate::algebra::Quaternion;
use crate::elflow::Trajectory;
use crate::seifert::fiber_speed;

/// Header data recorded in OBJ comments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjHeader {
    pub m: u32,
    pub n: u32,
    pub period: f64,
    pub theta: Option<f64>,
}

/// Vertices closer than this to the projection pole trigger a pole change.
pub const POLE_CLEARANCE: f64 = 1e-3;

/// The projection pole: `(0,0,0,1)` unless some vertex comes within
/// [`POLE_CLEARANCE`] of it, in which case the candidate pole farthest from
/// the mesh is used.
pub fn stereographic_pole(vertices: &[Quaternion]) -> Quaternion {
    let clearance = |p: Quaternion| vertices.iter().map(|v| (*v - p).norm()).fold(f64::INFINITY, f64::min);
    let default = Quaternion::K;
    if clearance(default) >= POLE_CLEARANCE {
        return default;
    }
    let mut candidates = vec![];
    for k in 0..4 {
        for s in [1.0, -1.0] {
            let mut a = [0.0; 4];
            a[k] = s;
            candidates.push(Quaternion::from_array(a));
        }
    }
    for bits in 0..16u32 {
        let a: [f64; 4] = std::array::from_fn(|k| if bits >> k & 1 == 1 { -0.5 } else { 0.5 });
        candidates.push(Quaternion::from_array(a));
    }
    candidates
        .into_iter()
        .max_by(|a, b| clearance(*a).total_cmp(&clearance(*b)))
        .unwrap_or(default)
}

fn complement(pole: Quaternion) -> [Quaternion; 3] {
    let mut basis: Vec<Quaternion> = Vec::with_capacity(3);
    for cand in [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K] {
        let mut v = cand - pole.scale(cand.dot(pole));
        for b in &basis {
            v = v - b.scale(v.dot(*b));
        }
        if v.norm() > 1e-6 && basis.len() < 3 {
            basis.push(v.normalized());
        }
    }
    [basis[0], basis[1], basis[2]]
}

/// Stereographic image of `v` from `pole`.
pub fn project(v: Quaternion, pole: Quaternion, basis: &[Quaternion; 3]) -> [f64; 3] {
    let s = 1.0 - v.dot(pole);
    [v.dot(basis[0]) / s, v.dot(basis[1]) / s, v.dot(basis[2]) / s]
}

/// Wavefront OBJ of the mesh in stereographic coordinates.
pub fn mesh_obj(mesh: &TorusMesh, header: &ObjHeader) -> String {
    let pole = stereographic_pole(&mesh.vertices);
    let basis = complement(pole);
    let mut out = String::new();
    let _ = writeln!(out, "# ewlab torus mesh");
    let _ = writeln!(out, "# seifert m={} n={}", header.m, header.n);
    let _ = writeln!(out, "# period {:.16e}", header.period);
    let _ = writeln!(out, "# pole {:.16e} {:.16e} {:.16e} {:.16e}", pole.w, pole.x, pole.y, pole.z);
    match header.theta {
        Some(t) => {
            let _ = writeln!(out, "# monodromy theta {t:.16e}");
        }
        None => {
            let _ = writeln!(out, "# monodromy theta unavailable");
        }
    }
    let _ = writeln!(out, "# grid {} x {} wrap_y={}", mesh.nx, mesh.ny, mesh.wrap_y);
    for v in &mesh.vertices {
        let p = project(*v, pole, &basis);
        let _ = writeln!(out, "v {:.16e} {:.16e} {:.16e}", p[0], p[1], p[2]);
    }
    for f in &mesh.faces {
        let _ = writeln!(out, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1);
    }
    out
}

/// Curve samples with the Hopf differential interpolated at each sample.
pub fn curve_csv(curve: &ProfileCurve, traj: &Trajectory) -> String {
    let mut out = String::from("y,gamma_w,gamma_x,gamma_y,gamma_z,re_q,im_q,h\n");
    for s in &curve.samples {
        let q = traj.interp(s.y).0;
        let h = fiber_speed(s.gamma, curve.st).unwrap_or(0.0);
        let g = s.gamma;
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            s.y, g.w, g.x, g.y, g.z, q.re, q.im, h
        );
    }
    out
}
