//! Mode dispatch and artifact emission.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::{Mode, RunConfig, Source};
use crate::dirac::{self, TransferSample};
use crate::elflow::{self, el_jet, el_residual, first_integral, HopfJet, Trajectory};
use crate::fd::stencil;
use crate::killing::{self, Classification, GenusClass, GenusConstants, SYMMETRY_TOL};
use crate::reconstruct::{self, ObjHeader, KAPPA_FIX};
use crate::spectral;
use crate::{Error, Result};

/// Branch-point/zero distance accepted by the scan report.
pub const MATCH_TOL: f64 = 1e-4;
/// Scan points with `|Δ² − 4|` below this are left out of the commutator check.
pub const COMMUTATOR_NEAR: f64 = 0.1;
/// FD-versus-stored derivative mismatch tolerated at step `h`.
pub fn jet_tol(h: f64) -> f64 {
    10.0 * h * h
}

/// Exit status of a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 1,
        Error::Invariant(_) => 3,
        _ => 2,
    }
}

pub fn config_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Everything a run needs besides the parsed config.
pub struct RunContext {
    pub config_text: String,
    pub out_dir: PathBuf,
    pub threads: Option<usize>,
}

/// Paths written and a one-line summary.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub artifacts: Vec<PathBuf>,
    pub summary: String,
}

#[derive(Serialize)]
struct Report<'a> {
    tool: &'static str,
    version: &'static str,
    config_hash: String,
    mode: &'static str,
    config: &'a RunConfig,
    result: Value,
}

struct Sink<'a> {
    dir: &'a Path,
    hash: String,
    mode: Mode,
    config: &'a RunConfig,
    written: Vec<PathBuf>,
}

impl Sink<'_> {
    fn file(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, body)?;
        self.written.push(path);
        Ok(())
    }

    fn report(&mut self, result: Value) -> Result<()> {
        let report = Report {
            tool: "ewlab",
            version: env!("CARGO_PKG_VERSION"),
            config_hash: self.hash.clone(),
            mode: self.mode.name(),
            config: self.config,
            result,
        };
        let mut body = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
        body.push('\n');
        let name = format!("{}.json", self.mode.name());
        self.file(&name, &body)
    }
}

fn initial_jet(cfg: &RunConfig) -> HopfJet {
    match cfg.source {
        Source::El(p) => el_jet(0.0, cfg.q, cfg.dq, cfg.r0, &p),
        Source::Flow { genus, constants } => {
            killing::flow_jet(genus, &constants, 0.0, [cfg.q, cfg.dq, cfg.d2q, cfg.d3q], cfg.r0)
        }
    }
}

/// Integrates the configured trajectory, optionally over exactly one period,
/// and applies the configured perturbation.
pub fn build_trajectory(cfg: &RunConfig) -> Result<Trajectory> {
    let init = initial_jet(cfg);
    let mut traj = match (cfg.source, cfg.one_period) {
        (Source::El(p), false) => elflow::integrate_el(&init, &p, cfg.length, cfg.step)?,
        (Source::El(p), true) => elflow::integrate_el_period(&init, &p, cfg.step, cfg.length)?,
        (Source::Flow { genus, constants }, false) => {
            killing::integrate_flow(genus, &constants, &init, cfg.length, cfg.step)?
        }
        (Source::Flow { genus, constants }, true) => {
            killing::integrate_flow_period(genus, &constants, &init, cfg.step, cfg.length)?
        }
    };
    if let Some((index, dq)) = cfg.perturb {
        let n = traj.len();
        let jet = traj
            .jets
            .get_mut(index)
            .ok_or_else(|| Error::Config(format!("perturb.index {index} out of range (trajectory has {n} samples)")))?;
        jet.q += dq;
    }
    Ok(traj)
}

fn classified(class: &Classification) -> Result<(usize, GenusConstants)> {
    match class.genus {
        GenusClass::Genus(p) => {
            let k = class.evidence.iter().find(|e| e.genus == p).and_then(|e| e.constants).unwrap_or_default();
            Ok((p, k))
        }
        GenusClass::Above3 => Err(Error::InsufficientJet(4)),
    }
}

fn genus_value(class: &Classification) -> Value {
    match class.genus {
        GenusClass::Genus(p) => json!(p),
        GenusClass::Above3 => json!(">3"),
    }
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::from("y,re_q,im_q,re_dq,im_dq,re_d2q,im_d2q,r\n");
    for j in &traj.jets {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            j.y, j.q.re, j.q.im, j.dq.re, j.dq.im, j.d2q.re, j.d2q.im, j.r
        );
    }
    s
}

fn scan_csv(scan: &[TransferSample]) -> String {
    let mut s = String::from("re_a,im_a,re_delta,im_delta,re_disc,im_disc,re_det,im_det\n");
    for t in scan {
        let d = t.discriminant();
        let det = t.h.det();
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            t.a.re, t.a.im, t.delta.re, t.delta.im, d.re, d.im, det.re, det.im
        );
    }
    s
}

/// One named property of the invariant suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub value: Option<f64>,
    pub tol: f64,
    pub passed: Option<bool>,
    pub note: Option<String>,
}

impl PropertyCheck {
    fn measured(name: &'static str, value: f64, tol: f64) -> Self {
        PropertyCheck { name, value: Some(value), tol, passed: Some(value.is_finite() && value < tol), note: None }
    }

    fn skipped(name: &'static str, tol: f64, why: &str) -> Self {
        PropertyCheck { name, value: None, tol, passed: None, note: Some(why.into()) }
    }
}

/// Stored q′ and q″ against 5-point differences of q, relative to the jet size.
pub fn jet_consistency(traj: &Trajectory) -> f64 {
    let n = traj.len();
    if n < 5 {
        return 0.0;
    }
    let q = traj.q_values();
    let h = traj.step;
    let apply = |i: usize, d: usize| stencil(n, i, h, d, false).iter().map(|&(k, w)| q[k] * w).sum::<C64>();
    let scale = 1.0 + traj.q_sup();
    (0..n)
        .map(|i| {
            let j = &traj.jets[i];
            let e1 = (apply(i, 1) - j.dq).norm() / (scale + j.d3q.norm() * h);
            let e2 = (apply(i, 2) - j.d2q).norm() / (scale + j.d4q.norm() * h);
            e1.max(e2 * h)
        })
        .fold(0.0, f64::max)
}

/// The full invariant suite on one trajectory.
pub fn invariant_suite(traj: &Trajectory, tol: f64) -> Result<(Vec<PropertyCheck>, Classification)> {
    let mut checks = vec![PropertyCheck::measured("jet_consistency", jet_consistency(traj), jet_tol(traj.step))];
    let params = traj.el_params();
    match params {
        Some(p) => {
            let el = traj.jets.iter().map(|j| el_residual(j, &p)).fold(0.0, f64::max);
            checks.push(PropertyCheck::measured("el_residual", el / (1.0 + traj.q_sup().powi(3)), tol));
            let canon = elflow::canonicalize(traj)?;
            let cp = canon.el_params().unwrap_or(p);
            let vals = canon.jets.iter().map(|j| first_integral(j, &cp)).collect::<Result<Vec<_>>>()?;
            let d0 = vals[0];
            let drift = vals.iter().map(|v| (v - d0).abs()).fold(0.0, f64::max) / (1.0 + d0.abs());
            checks.push(PropertyCheck::measured("first_integral", drift, tol));
        }
        None => {
            checks.push(PropertyCheck::skipped("el_residual", tol, "trajectory not generated by the EL system"));
            checks.push(PropertyCheck::skipped("first_integral", tol, "trajectory not generated by the EL system"));
        }
    }
    let class = killing::genus_classify(traj, tol)?;
    match classified(&class) {
        Ok((p, k)) => {
            let ev = class.evidence.iter().find(|e| e.genus == p).cloned();
            if let Some(ev) = ev {
                checks.push(PropertyCheck::measured("flow_residual", ev.flow_residual, ev.flow_tol));
                checks.push(PropertyCheck::measured("sigma_symmetry", ev.symmetry_residual, SYMMETRY_TOL));
            }
            let scale = traj.q_sup().powi(2).max(1.0);
            checks.push(PropertyCheck::measured("lax_residual", killing::lax_residual(traj, &k, p)? / scale, tol));
            checks.push(PropertyCheck::measured(
                "spectral_invariance",
                spectral::spectral_invariance(traj, &k, p)?,
                tol,
            ));
        }
        Err(_) => {
            checks.push(PropertyCheck {
                name: "flow_residual",
                value: class.evidence.iter().filter_map(|e| e.flow_residual.is_finite().then_some(e.flow_residual)).reduce(f64::min),
                tol,
                passed: Some(false),
                note: Some("no stationary flow of genus ≤ 3 fits".into()),
            });
            for name in ["sigma_symmetry", "lax_residual", "spectral_invariance"] {
                checks.push(PropertyCheck::skipped(name, tol, "genus not identified"));
            }
        }
    }
    Ok((checks, class))
}

/// Runs `mode` on `cfg`, writing artifacts into `ctx.out_dir`. The command-line
/// mode takes precedence over `cfg.mode`.
pub fn run(cfg: &RunConfig, mode: Mode, ctx: &RunContext) -> Result<RunOutcome> {
    std::fs::create_dir_all(&ctx.out_dir)?;
    let mut sink = Sink { dir: &ctx.out_dir, hash: config_hash(&ctx.config_text), mode, config: cfg, written: vec![] };
    let traj = build_trajectory(cfg)?;
    let summary = match mode {
        Mode::Simulate => simulate(&traj, &mut sink)?,
        Mode::Classify => classify(&traj, cfg, &mut sink)?,
        Mode::Spectral => spectral_mode(&traj, cfg, &mut sink)?,
        Mode::Scan => scan(&traj, cfg, ctx, &mut sink)?,
        Mode::Reconstruct => reconstruct_mode(&traj, cfg, &mut sink, false)?,
        Mode::Energy => reconstruct_mode(&traj, cfg, &mut sink, true)?,
        Mode::Check => check(&traj, cfg, &mut sink)?,
    };
    Ok(RunOutcome { artifacts: sink.written, summary })
}

fn simulate(traj: &Trajectory, sink: &mut Sink) -> Result<String> {
    sink.file("trajectory.csv", &trajectory_csv(traj))?;
    sink.report(json!({
        "samples": traj.len(),
        "step": traj.step,
        "length": traj.length(),
        "period": traj.period,
        "endpoint_mismatch": traj.endpoint_mismatch(),
        "q_sup": traj.q_sup(),
    }))?;
    Ok(format!("simulate: {} samples over length {}", traj.len(), traj.length()))
}

fn classify(traj: &Trajectory, cfg: &RunConfig, sink: &mut Sink) -> Result<String> {
    let class = killing::genus_classify(traj, cfg.tol)?;
    let genus = genus_value(&class);
    sink.report(json!({
        "genus": genus,
        "isothermic": class.isothermic.map(pair),
        "evidence": class.evidence,
    }))?;
    Ok(format!("classify: genus {genus}"))
}

fn spectral_mode(traj: &Trajectory, cfg: &RunConfig, sink: &mut Sink) -> Result<String> {
    let class = killing::genus_classify(traj, cfg.tol)?;
    let (p, k) = classified(&class)?;
    let field = killing::build_killing_field(&traj.jets[0], &k, p)?;
    let curve = spectral::curve_from_field(&field, cfg.tol)?;
    let invariance = spectral::spectral_invariance(traj, &k, p)?;
    let genus = curve.genus;
    sink.report(json!({
        "flow_genus": p,
        "constants": k,
        "coefficients": curve.p.coeffs.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
        "branch_points": curve.branch_points.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
        "roots": curve.roots,
        "genus": genus,
        "singular": curve.singular,
        "evenness_residual": curve.evenness_residual,
        "reality_residual": curve.reality_residual,
        "spectral_invariance": invariance,
    }))?;
    Ok(format!("spectral: flow genus {p}, curve genus {}", genus.map_or("undetermined".into(), |g| g.to_string())))
}

fn scan(traj: &Trajectory, cfg: &RunConfig, ctx: &RunContext, sink: &mut Sink) -> Result<String> {
    let class = killing::genus_classify(traj, cfg.tol)?;
    let (p, k) = classified(&class)?;
    let field = killing::build_killing_field(&traj.jets[0], &k, p)?;
    let curve = spectral::curve_from_field(&field, cfg.tol)?;
    let grid = cfg.grid.points();
    let run_scan = || dirac::discriminant_scan(traj, &grid, cfg.step);
    let mut samples = match ctx.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("EWLAB_THREADS: {e}")))?
            .install(run_scan)?,
        None => run_scan()?,
    };
    samples.sort_by(|x, y| x.a.re.total_cmp(&y.a.re).then(x.a.im.total_cmp(&y.a.im)));
    sink.file("discriminant.csv", &scan_csv(&samples))?;
    let mut report = dirac::branch_match(&curve, traj, &samples, cfg.grid.bounds(), cfg.step, MATCH_TOL)?;
    report.commutator = Some(dirac::commutator_check(traj, &k, p, &samples, COMMUTATOR_NEAR)?);
    let n = report.matches.len();
    let ok = report.all_matched;
    sink.report(json!({
        "flow_genus": p,
        "constants": k,
        "grid": cfg.grid,
        "grid_points": grid.len(),
        "match_tol": MATCH_TOL,
        "branch_points": curve.branch_points.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
        "matches": report.matches,
        "all_matched": ok,
        "commutator": report.commutator,
    }))?;
    Ok(format!("scan: {n} branch points, all matched: {ok}"))
}

fn reconstruct_mode(traj: &Trajectory, cfg: &RunConfig, sink: &mut Sink, energy_only: bool) -> Result<String> {
    let j0 = traj.jets[0];
    let init = reconstruct::init_profile(j0.q, j0.dq, cfg.seifert, cfg.branch, cfg.h0)?;
    let curve = reconstruct::integrate_profile(traj, cfg.seifert, &init, cfg.profile_step)?;
    let mono = reconstruct::profile_monodromy(&curve);
    let mesh = reconstruct::build_torus_mesh(&curve, cfg.nx)?;
    let (mono_json, theta) = match &mono {
        Ok(m) => (json!(m), Some(m.theta)),
        Err(e) => (json!({ "error": e.to_string() }), None),
    };
    if energy_only {
        let w = reconstruct::willmore_energy(traj, Some(&mesh))?;
        let rel = w.w_mesh.map(|m| (m - KAPPA_FIX * w.w_curve).abs() / m.abs().max(f64::MIN_POSITIVE));
        sink.report(json!({
            "w_curve": w.w_curve,
            "w_mesh": w.w_mesh,
            "relative_difference": rel,
            "kappa_fix": KAPPA_FIX,
            "mesh": { "nx": mesh.nx, "ny": mesh.ny, "closed": mesh.wrap_y },
        }))?;
        return Ok(format!("energy: W_curve {:.12}, W_mesh {}", w.w_curve, w.w_mesh.map_or("n/a".into(), |m| format!("{m:.12}"))));
    }
    let header = ObjHeader { m: cfg.seifert.m, n: cfg.seifert.n, period: traj.length(), theta };
    sink.file("torus.obj", &reconstruct::mesh_obj(&mesh, &header))?;
    sink.file("curve.csv", &reconstruct::curve_csv(&curve, traj))?;
    sink.report(json!({
        "seifert": cfg.seifert,
        "branch": cfg.branch,
        "period": traj.length(),
        "coupling_residual": curve.coupling_residual,
        "closed": mesh.wrap_y,
        "monodromy": mono_json,
    }))?;
    Ok(format!(
        "reconstruct: {} profile samples, monodromy {}",
        curve.samples.len(),
        theta.map_or("unavailable".into(), |t| format!("θ = {t:.12}"))
    ))
}

fn check(traj: &Trajectory, cfg: &RunConfig, sink: &mut Sink) -> Result<String> {
    let (checks, class) = invariant_suite(traj, cfg.tol)?;
    let failed: Vec<&str> = checks.iter().filter(|c| c.passed == Some(false)).map(|c| c.name).collect();
    sink.report(json!({
        "genus": genus_value(&class),
        "properties": checks,
        "failed": failed,
    }))?;
    if failed.is_empty() {
        Ok(format!("check: {} properties passed", checks.iter().filter(|c| c.passed == Some(true)).count()))
    } else {
        Err(Error::Invariant(failed.join(", ")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 1);
        assert_eq!(exit_code(&Error::BlowUp { y: 1.0 }), 2);
        assert_eq!(exit_code(&Error::Invariant("x".into())), 3);
    }

    #[test]
    fn hash_is_sha256_hex() {
        assert_eq!(config_hash(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn jet_consistency_flags_a_kink() {
        let f = |y: f64| {
            let (s, c) = y.sin_cos();
            [C64::new(s, 0.0), C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(-c, 0.0), C64::new(s, 0.0)]
        };
        let mut t = Trajectory::from_fn(f, 3.0, 1e-2);
        assert!(jet_consistency(&t) < jet_tol(t.step));
        t.jets[100].q += C64::new(1e-4, 0.0);
        assert!(jet_consistency(&t) > jet_tol(t.step));
    }
}
