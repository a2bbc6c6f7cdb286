//! Run configuration (TOML).

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::algebra::Mat2;
use crate::error::{Error, Result};
use crate::frame::{GridSpec, Representation};
use crate::ode::Tolerances;
use crate::painleve::{airy_alpha, integrate, rational_alpha, Equation, Host, PainleveParams, PainleveState, Trajectory};
use crate::symmetry::{solve_determining, Polynomial, RSolution, SymmetryChoice};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub equation: EquationSection,
    pub solution: SolutionSection,
    #[serde(default)]
    pub tolerance: ToleranceSection,
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub symmetry: SymmetrySection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSection {
    pub name: Equation,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    Ivp,
    Rational,
    Airy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionSection {
    pub kind: SolutionKind,
    pub t0: f64,
    pub t_end: f64,
    /// Initial values, ivp only.
    pub x0: Option<f64>,
    pub xt0: Option<f64>,
    /// 1 or 2, rational only.
    pub index: Option<u32>,
    /// ±1, airy only.
    pub epsilon: Option<f64>,
    /// Output rows for closed-form solutions.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    201
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        let t = Tolerances::default();
        ToleranceSection { rtol: t.rtol, atol: t.atol }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub n_lambda: usize,
    pub t_base: f64,
    pub lambda_base: f64,
    #[serde(default)]
    pub exclude_t: Vec<[f64; 2]>,
    #[serde(default)]
    pub exclude_lambda: Vec<[f64; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentationName {
    Conjugated,
    MovingFrame,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RKind {
    /// Integrate the determining equation from (r0, rt0) at t_min.
    Numeric,
    Bessel,
    Airy,
    P3R1,
    P3R2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetrySection {
    pub alpha: [f64; 6],
    /// Polynomial coefficients of r(t) and s(λ), lowest degree first.
    #[serde(default = "one")]
    pub r_weight: Vec<f64>,
    #[serde(default = "one")]
    pub s_weight: Vec<f64>,
    #[serde(default = "closed_form")]
    pub method: Method,
    #[serde(default = "conjugated")]
    pub representation: RepresentationName,
    pub r: Option<RKind>,
    pub r0: Option<f64>,
    pub rt0: Option<f64>,
    /// Constant tangents [[a11, a12], [a21, a22]] in place of a symmetry.
    pub custom_a: Option<[[f64; 2]; 2]>,
    pub custom_b: Option<[[f64; 2]; 2]>,
}

fn one() -> Vec<f64> {
    vec![1.0]
}

fn closed_form() -> Method {
    Method::ClosedForm
}

fn conjugated() -> RepresentationName {
    RepresentationName::Conjugated
}

impl Default for SymmetrySection {
    fn default() -> Self {
        SymmetrySection {
            alpha: [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            r_weight: one(),
            s_weight: one(),
            method: Method::ClosedForm,
            representation: RepresentationName::Conjugated,
            r: None,
            r0: None,
            rt0: None,
            custom_a: None,
            custom_b: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
}

fn default_dir() -> PathBuf {
    PathBuf::from(".")
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: default_dir() }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn params(&self) -> PainleveParams {
        let e = &self.equation;
        match e.name {
            Equation::P1 => PainleveParams::p1(),
            Equation::P2 => PainleveParams::p2(e.alpha),
            Equation::P3 => PainleveParams::p3(e.alpha, e.beta, e.gamma, e.delta),
        }
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances { rtol: self.tolerance.rtol, atol: self.tolerance.atol }
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.solution;
        let e = &self.equation;
        if !(self.tolerance.rtol > 0.0 && self.tolerance.atol > 0.0) {
            return Err(bad("tolerance.rtol and tolerance.atol must be positive"));
        }
        if s.t0 == s.t_end || !s.t0.is_finite() || !s.t_end.is_finite() {
            return Err(bad("solution.t0 and solution.t_end must be finite and distinct"));
        }
        match s.kind {
            SolutionKind::Ivp => {
                if s.x0.is_none() || s.xt0.is_none() {
                    return Err(bad("solution.x0 and solution.xt0 are required for kind = \"ivp\""));
                }
            }
            SolutionKind::Rational => {
                let n = s.index.ok_or_else(|| bad("solution.index is required for kind = \"rational\""))?;
                if e.name != Equation::P2 || !(n == 1 || n == 2) {
                    return Err(bad("rational solutions exist for P2 with solution.index 1 or 2"));
                }
                if e.alpha != rational_alpha(n) {
                    return Err(bad(format!("equation.alpha must be {} for rational index {n}", rational_alpha(n))));
                }
            }
            SolutionKind::Airy => {
                let eps = s.epsilon.ok_or_else(|| bad("solution.epsilon is required for kind = \"airy\""))?;
                if e.name != Equation::P2 || eps.abs() != 1.0 {
                    return Err(bad("Airy solutions exist for P2 with solution.epsilon = 1 or -1"));
                }
                if e.alpha != airy_alpha(eps) {
                    return Err(bad(format!("equation.alpha must be {} for epsilon = {eps}", airy_alpha(eps))));
                }
            }
        }
        if s.kind != SolutionKind::Ivp && s.samples < 2 {
            return Err(bad("solution.samples must be at least 2"));
        }
        if let Some(g) = &self.grid {
            self.grid_spec_of(g).validate().map_err(|e| bad(format!("grid: {e}")))?;
        }
        let sym = &self.symmetry;
        SymmetryChoice::new(sym.alpha).validate().map_err(|e| bad(format!("symmetry: {e}")))?;
        if sym.custom_a.is_some() != sym.custom_b.is_some() {
            return Err(bad("symmetry.custom_a and symmetry.custom_b go together"));
        }
        if sym.alpha[5] != 0.0 && sym.custom_a.is_none() {
            match sym.r {
                None => return Err(bad("symmetry.r is required when alpha6 is nonzero")),
                Some(RKind::Numeric) if sym.r0.is_none() || sym.rt0.is_none() => {
                    return Err(bad("symmetry.r0 and symmetry.rt0 are required for r = \"numeric\""))
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn grid_spec_of(&self, g: &GridSection) -> GridSpec {
        let mut spec = GridSpec::new((g.t_min, g.t_max, g.n_t), (g.lambda_min, g.lambda_max, g.n_lambda), (g.t_base, g.lambda_base));
        spec.exclude_t = g.exclude_t.iter().map(|b| (b[0], b[1])).collect();
        spec.exclude_lambda = g.exclude_lambda.iter().map(|b| (b[0], b[1])).collect();
        spec
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        let g = self.grid.as_ref().ok_or_else(|| bad("a [grid] section is required"))?;
        Ok(self.grid_spec_of(g))
    }

    pub fn choice(&self) -> SymmetryChoice {
        let s = &self.symmetry;
        SymmetryChoice {
            alpha: s.alpha,
            r_weight: Polynomial(s.r_weight.clone()),
            s_weight: Polynomial(s.s_weight.clone()),
        }
    }

    pub fn representation(&self) -> Representation {
        match self.symmetry.representation {
            RepresentationName::Conjugated => Representation::Conjugated,
            RepresentationName::MovingFrame => Representation::MovingFrame,
        }
    }

    pub fn custom_tangents(&self) -> Option<(Mat2, Mat2)> {
        let m = |v: [[f64; 2]; 2]| Mat2::real(v[0][0], v[0][1], v[1][0], v[1][1]);
        Some((m(self.symmetry.custom_a?), m(self.symmetry.custom_b?)))
    }

    /// The solution on [t0, t_end] (as `solve` reports it).
    pub fn trajectory(&self) -> Result<Trajectory> {
        let s = &self.solution;
        let params = self.params();
        match s.kind {
            SolutionKind::Ivp => {
                let init = PainleveState::new(s.t0, s.x0.unwrap(), s.xt0.unwrap());
                integrate(&params, init, s.t_end, self.tolerances())
            }
            _ => {
                let host = self.closed_host();
                let mut samples = Vec::with_capacity(s.samples);
                for k in 0..s.samples {
                    let t = s.t0 + (s.t_end - s.t0) * k as f64 / (s.samples - 1) as f64;
                    match host.state(t) {
                        Ok(st) => samples.push(st),
                        Err(Error::PoleEncountered(p)) => return Trajectory::from_samples(params, samples, Some(p)),
                        Err(e) => return Err(e),
                    }
                }
                Trajectory::from_samples(params, samples, None)
            }
        }
    }

    fn closed_host(&self) -> Host {
        match self.solution.kind {
            SolutionKind::Rational => Host::Rational(self.solution.index.unwrap()),
            SolutionKind::Airy => Host::Airy(self.solution.epsilon.unwrap()),
            SolutionKind::Ivp => unreachable!(),
        }
    }

    /// Host covering `[a, b]` in addition to the initial time.
    pub fn host_covering(&self, a: f64, b: f64) -> Result<Host> {
        let s = &self.solution;
        if s.kind != SolutionKind::Ivp {
            return Ok(self.closed_host());
        }
        let params = self.params();
        let init = PainleveState::new(s.t0, s.x0.unwrap(), s.xt0.unwrap());
        let (lo, hi) = (a.min(s.t0), b.max(s.t0));
        let fw = if hi > s.t0 { Some(integrate(&params, init, hi, self.tolerances())?) } else { None };
        let bw = if lo < s.t0 { Some(integrate(&params, init, lo, self.tolerances())?) } else { None };
        let mut samples: Vec<PainleveState> = bw.as_ref().map(|b| b.samples().iter().rev().copied().collect()).unwrap_or_default();
        match &fw {
            Some(f) => {
                if !samples.is_empty() {
                    samples.pop();
                }
                samples.extend_from_slice(f.samples());
            }
            None if samples.is_empty() => samples.push(init),
            None => {}
        }
        let pole = fw.as_ref().and_then(Trajectory::pole_flag).or_else(|| bw.as_ref().and_then(Trajectory::pole_flag));
        Ok(Host::Numeric(Trajectory::from_samples(params, samples, pole)?))
    }

    /// Host covering the grid's t range.
    pub fn host(&self) -> Result<Host> {
        let spec = self.grid_spec()?;
        self.host_covering(spec.t_min, spec.t_max)
    }

    /// R for the α₆ term, if one is needed.
    pub fn r_solution(&self, host: &Host) -> Result<Option<RSolution>> {
        if self.symmetry.alpha[5] == 0.0 {
            return Ok(None);
        }
        Ok(Some(match self.symmetry.r {
            None => return Err(Error::MissingRSolution),
            Some(RKind::Bessel) => RSolution::BesselAlpha1,
            Some(RKind::Airy) => match self.solution.epsilon {
                Some(eps) if self.solution.kind == SolutionKind::Airy => RSolution::AiryEps(eps),
                _ => return Err(bad("symmetry.r = \"airy\" needs an Airy solution")),
            },
            Some(RKind::P3R1) => RSolution::P3ScaleR1,
            Some(RKind::P3R2) => RSolution::P3ScaleR2,
            Some(RKind::Numeric) => {
                let spec = self.grid_spec()?;
                let nodes = spec.t_nodes();
                solve_determining(host, &nodes, self.symmetry.r0.unwrap(), self.symmetry.rt0.unwrap(), self.tolerances())?
            }
        }))
    }
}

/// A commented starting point listing every key.
pub const TEMPLATE: &str = r#"# soliton run configuration

[equation]
name = "P1"            # P1, P2 or P3
alpha = 0.0
beta = 0.0
gamma = 0.0
delta = 0.0

[solution]
kind = "ivp"           # ivp, rational (P2, index 1|2) or airy (P2, epsilon = ±1)
t0 = 0.0
t_end = 1.0
x0 = 0.1
xt0 = 0.0
# index = 1
# epsilon = 1.0
samples = 201          # output rows for rational/airy

[tolerance]
rtol = 1e-10
atol = 1e-12

[grid]
t_min = 0.0
t_max = 1.0
n_t = 50
lambda_min = -1.0
lambda_max = 1.0
n_lambda = 50
t_base = 0.0
lambda_base = 0.0
exclude_t = []         # e.g. [[-0.01, 0.01]]
exclude_lambda = []

[symmetry]
alpha = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]
r_weight = [1.0]       # r(t), coefficients lowest degree first
s_weight = [1.0]       # s(lambda)
method = "closed_form" # closed_form or quadrature (alpha6 always uses quadrature)
representation = "conjugated"   # conjugated or moving_frame
# r = "numeric"        # numeric, bessel, airy, p3_r1, p3_r2 (needed when alpha6 != 0)
# r0 = 1.0
# rt0 = 0.0
# custom_a = [[1.0, 0.0], [0.0, -1.0]]
# custom_b = [[0.0, 1.0], [1.0, 0.0]]

[output]
dir = "."
"#;

const FIG1: &str = r#"# F1 on the first rational solution of P2.
# For F2 set alpha = [0, 1, 0, 0, 0, 0]; for the second rational solution set
# equation.alpha = 2, solution.index = 2 and add [-1.5974, -1.5774] to exclude_t.

[equation]
name = "P2"
alpha = 1.0

[solution]
kind = "rational"
index = 1
t0 = 0.5
t_end = 30.0

[grid]
t_min = -30.0
t_max = 30.0
n_t = 121
lambda_min = -30.0
lambda_max = 30.0
n_lambda = 121
t_base = 1.0
lambda_base = 1.0
exclude_t = [[-0.01, 0.01]]
exclude_lambda = [[-0.01, 0.01]]

[symmetry]
alpha = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]
representation = "moving_frame"

[output]
dir = "."
"#;

const FIG2: &str = r#"# F6 for P3 with alpha = 0, beta = 1, gamma = 2/5, delta = 0.
# x(t) from an initial value problem, R from the determining equation.

[equation]
name = "P3"
alpha = 0.0
beta = 1.0
gamma = 0.4
delta = 0.0

[solution]
kind = "ivp"
t0 = 1.0
t_end = 2.0
x0 = 1.0
xt0 = 0.0

[grid]
t_min = 0.6
t_max = 2.0
n_t = 41
lambda_min = 0.2
lambda_max = 2.0
n_lambda = 41
t_base = 1.0
lambda_base = 1.0

[symmetry]
alpha = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]
method = "quadrature"
r = "numeric"
r0 = 1.0
rt0 = 0.0

[output]
dir = "."
"#;

pub fn preset(name: &str) -> Option<&'static str> {
    match name {
        "fig1" => Some(FIG1),
        "fig2" => Some(FIG2),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_and_presets_parse() {
        let t = RunConfig::parse(TEMPLATE).unwrap();
        assert_eq!(t.equation.name, Equation::P1);
        assert_eq!(t.grid_spec().unwrap().n_t, 50);
        for name in ["fig1", "fig2"] {
            RunConfig::parse(preset(name).unwrap()).unwrap();
        }
        assert!(preset("fig3").is_none());
    }

    #[test]
    fn roundtrip_through_toml() {
        let c = RunConfig::parse(preset("fig1").unwrap()).unwrap();
        assert_eq!(RunConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_equation_names_the_key() {
        let text = TEMPLATE.replace("name = \"P1\"", "name = \"P7\"");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("name") && err.contains("P7"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = TEMPLATE.replace("[output]", "[output]\ncolour = \"red\"");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
    }

    #[test]
    fn inconsistent_solutions_are_rejected() {
        let fig1 = preset("fig1").unwrap();
        assert!(RunConfig::parse(&fig1.replace("alpha = 1.0", "alpha = 0.5")).is_err());
        assert!(RunConfig::parse(&fig1.replace("index = 1", "index = 3")).is_err());
        let t = TEMPLATE.replace("alpha = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]", "alpha = [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]");
        assert!(RunConfig::parse(&t).is_err());
    }

    #[test]
    fn two_sided_host() {
        let mut c = RunConfig::parse(TEMPLATE).unwrap();
        c.solution.t0 = 0.5;
        let host = c.host_covering(0.0, 1.0).unwrap();
        let Host::Numeric(tr) = &host else { panic!() };
        assert_eq!(tr.t_range(), (0.0, 1.0));
        assert_eq!(host.state(0.5).unwrap().x, 0.1);
    }
}
