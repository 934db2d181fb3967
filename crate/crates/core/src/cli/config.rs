//! TOML run configuration.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::elflow::ELParams;
use crate::killing::GenusConstants;
use crate::reconstruct::Branch;
use crate::seifert::SeifertType;
use crate::{Error, Result};

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_LENGTH: f64 = 10.0;
pub const DEFAULT_NX: usize = 64;
pub const DEFAULT_GRID_N: usize = 41;
pub const DEFAULT_GRID_EXTENT: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Simulate,
    Classify,
    Spectral,
    Scan,
    Reconstruct,
    Energy,
    Check,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Classify => "classify",
            Mode::Spectral => "spectral",
            Mode::Scan => "scan",
            Mode::Reconstruct => "reconstruct",
            Mode::Energy => "energy",
            Mode::Check => "check",
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    mode: Option<Mode>,
    jet: Option<RawJet>,
    params: Option<RawParams>,
    flow: Option<RawFlow>,
    seifert: Option<RawSeifert>,
    numerics: Option<RawNumerics>,
    grid: Option<RawGrid>,
    output: Option<RawOutput>,
    perturb: Option<RawPerturb>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJet {
    q: Option<[f64; 2]>,
    dq: Option<[f64; 2]>,
    d2q: Option<[f64; 2]>,
    d3q: Option<[f64; 2]>,
    xi: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    lambda_re: f64,
    #[serde(default)]
    lambda_im: f64,
    c: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFlow {
    genus: usize,
    c: f64,
    #[serde(default)]
    d: f64,
    #[serde(default)]
    e: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeifert {
    m: u32,
    n: u32,
    h0: Option<f64>,
    branch: Option<Branch>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNumerics {
    step: Option<f64>,
    length: Option<f64>,
    tol: Option<f64>,
    one_period: Option<bool>,
    profile_step: Option<f64>,
    nx: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    re: Option<[f64; 2]>,
    im: Option<[f64; 2]>,
    n_re: Option<usize>,
    n_im: Option<usize>,
    points: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPerturb {
    index: usize,
    dq: [f64; 2],
}

/// Where the trajectory comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Source {
    El(ELParams),
    Flow { genus: usize, constants: GenusConstants },
}

/// A spectral-parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GridSpec {
    Rect { re: (f64, f64), im: (f64, f64), n_re: usize, n_im: usize },
    List { points: Vec<(f64, f64)> },
}

impl GridSpec {
    pub fn points(&self) -> Vec<C64> {
        match self {
            GridSpec::Rect { re, im, n_re, n_im } => crate::dirac::rect_grid(*re, *im, *n_re, *n_im),
            GridSpec::List { points } => points.iter().map(|&(a, b)| C64::new(a, b)).collect(),
        }
    }

    /// Bounding box of the grid.
    pub fn bounds(&self) -> crate::dirac::SearchBox {
        let pts = self.points();
        let fold = |f: fn(&C64) -> f64| {
            pts.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        crate::dirac::SearchBox { re: fold(|z| z.re), im: fold(|z| z.im) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub q: C64,
    pub dq: C64,
    pub d2q: C64,
    pub d3q: C64,
    /// `ξ₀ = i·r0`.
    pub r0: f64,
    pub source: Source,
    pub seifert: SeifertType,
    pub h0: Option<f64>,
    pub branch: Branch,
    pub step: f64,
    pub length: f64,
    pub tol: f64,
    pub one_period: bool,
    pub profile_step: f64,
    pub nx: usize,
    pub grid: GridSpec,
    pub out_dir: Option<String>,
    pub perturb: Option<(usize, C64)>,
}

fn pair(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be finite")))
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if finite(name, v)? > 0.0 {
        Ok(v)
    } else {
        Err(Error::Config(format!("{name} must be > 0")))
    }
}

/// Parses and validates a TOML run configuration.
///
/// Required: `jet.q` and either `[params]` (Euler–Lagrange source) or `[flow]`
/// (stationary flow of a given genus). Defaults: `step = 1e-3`, `tol = 1e-6`,
/// `length = 10`, Seifert type (1,1), grid 41×41 over [−3,3]².
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let mut missing = Vec::new();
    let jet = raw.jet.unwrap_or_default();
    if jet.q.is_none() {
        missing.push("jet.q");
    }
    if raw.params.is_none() && raw.flow.is_none() {
        missing.push("params (lambda_re, c) or flow (genus, c)");
    }
    if !missing.is_empty() {
        return Err(Error::Config(format!("missing required keys: {}", missing.join(", "))));
    }
    let q = pair(jet.q.unwrap_or_default());
    let dq = pair(jet.dq.unwrap_or_default());
    let d2q = pair(jet.d2q.unwrap_or_default());
    let d3q = pair(jet.d3q.unwrap_or_default());
    let xi = jet.xi.unwrap_or_default();
    if xi[0] != 0.0 {
        return Err(Error::Config("jet.xi must be purely imaginary (xi = [0, r])".into()));
    }
    for (name, z) in [("jet.q", q), ("jet.dq", dq), ("jet.d2q", d2q), ("jet.d3q", d3q)] {
        finite(name, z.re)?;
        finite(name, z.im)?;
    }
    finite("jet.xi", xi[1])?;

    let source = match (raw.flow, raw.params) {
        (Some(_), Some(_)) => return Err(Error::Config("give either [params] or [flow], not both".into())),
        (Some(f), None) => {
            if f.genus > 3 {
                return Err(Error::Config(format!("flow.genus must be 0..=3, got {}", f.genus)));
            }
            let k = GenusConstants::new(finite("flow.c", f.c)?, finite("flow.d", f.d)?, finite("flow.e", f.e)?);
            Source::Flow { genus: f.genus, constants: k }
        }
        (None, Some(p)) => Source::El(ELParams::new(
            C64::new(finite("params.lambda_re", p.lambda_re)?, finite("params.lambda_im", p.lambda_im)?),
            finite("params.c", p.c)?,
        )),
        (None, None) => unreachable!(),
    };

    let (seifert, h0, branch) = match raw.seifert {
        Some(s) => (
            SeifertType::new(s.m, s.n).map_err(|_| Error::Config("gcd(m,n) must be 1".into()))?,
            s.h0.map(|h| positive("seifert.h0", h)).transpose()?,
            s.branch.unwrap_or(Branch::Plus),
        ),
        None => (SeifertType { m: 1, n: 1 }, None, Branch::Plus),
    };

    let num = raw.numerics.unwrap_or_default();
    let step = positive("numerics.step", num.step.unwrap_or(DEFAULT_STEP))?;
    let length = positive("numerics.length", num.length.unwrap_or(DEFAULT_LENGTH))?;
    let tol = positive("numerics.tol", num.tol.unwrap_or(DEFAULT_TOL))?;
    let profile_step = positive("numerics.profile_step", num.profile_step.unwrap_or(step))?;
    let nx = num.nx.unwrap_or(DEFAULT_NX);
    if nx < 8 {
        return Err(Error::Config("numerics.nx must be at least 8".into()));
    }

    let g = raw.grid.unwrap_or_default();
    let grid = match g.points {
        Some(points) => {
            if g.re.is_some() || g.im.is_some() || g.n_re.is_some() || g.n_im.is_some() {
                return Err(Error::Config("grid.points excludes the rectangle keys".into()));
            }
            GridSpec::List { points: points.iter().map(|p| (p[0], p[1])).collect() }
        }
        None => {
            let e = DEFAULT_GRID_EXTENT;
            let re = g.re.unwrap_or([-e, e]);
            let im = g.im.unwrap_or([-e, e]);
            GridSpec::Rect {
                re: (re[0], re[1]),
                im: (im[0], im[1]),
                n_re: g.n_re.unwrap_or(DEFAULT_GRID_N),
                n_im: g.n_im.unwrap_or(DEFAULT_GRID_N),
            }
        }
    };

    Ok(RunConfig {
        mode: raw.mode,
        q,
        dq,
        d2q,
        d3q,
        r0: xi[1],
        source,
        seifert,
        h0,
        branch,
        step,
        length,
        tol,
        one_period: num.one_period.unwrap_or(false),
        profile_step,
        nx,
        grid,
        out_dir: raw.output.and_then(|o| o.dir),
        perturb: raw.perturb.map(|p| (p.index, pair(p.dq))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
mode = "simulate"
[jet]
q = [0.0, 0.5]
[params]
lambda_re = 0.0
c = -0.25
"#;

    #[test]
    fn empty_document_lists_required_keys() {
        let err = parse_config("").unwrap_err();
        let Error::Config(msg) = err else { panic!("{err:?}") };
        assert!(msg.contains("jet.q") && msg.contains("params"), "{msg}");
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.mode, Some(Mode::Simulate));
        assert_eq!((c.step, c.tol, c.length), (DEFAULT_STEP, DEFAULT_TOL, DEFAULT_LENGTH));
        assert_eq!(c.seifert, SeifertType { m: 1, n: 1 });
        assert_eq!(c.grid.points().len(), 41 * 41);
        assert_eq!(c.source, Source::El(ELParams::new(C64::new(0.0, 0.0), -0.25)));
    }

    #[test]
    fn gcd_is_validated() {
        let text = format!("{MINIMAL}\n[seifert]\nm = 2\nn = 4\n");
        assert_eq!(parse_config(&text), Err(Error::Config("gcd(m,n) must be 1".into())));
    }

    #[test]
    fn unknown_keys_rejected_with_location() {
        let text = format!("{MINIMAL}\n[numerics]\nstepp = 0.1\n");
        let Err(Error::Config(msg)) = parse_config(&text) else { panic!() };
        assert!(msg.contains("stepp") && msg.contains("line"), "{msg}");
    }

    #[test]
    fn domain_errors() {
        let text = format!("{MINIMAL}\n[numerics]\nstep = -1.0\n");
        assert!(parse_config(&text).is_err());
        let text = MINIMAL.replace("q = [0.0, 0.5]", "q = [0.0, 0.5]\nxi = [1.0, 0.0]");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn flow_source_and_point_grid() {
        let text = r#"
[jet]
q = [0.5, 0.0]
[flow]
genus = 1
c = 0.3
[grid]
points = [[0.0, 1.0], [1.0, 0.0]]
"#;
        let c = parse_config(text).unwrap();
        assert!(matches!(c.source, Source::Flow { genus: 1, .. }));
        assert_eq!(c.grid.points().len(), 2);
    }
}
