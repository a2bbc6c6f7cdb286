//! Painlevé P1, P2, P3: right-hand sides, trajectories and special solutions.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{Jet, Scalar};
use crate::ode::{Control, Solver, Tolerances};
use crate::special::airy;

/// |x| or |x_t| beyond this stops integration at a pole.
pub const POLE_THRESHOLD: f64 = 1e8;
const SINGULAR_CUTOFF: f64 = 1e-12;
const AIRY_ZERO_CUTOFF: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Equation {
    P1,
    P2,
    P3,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Equation::P1 => "P1",
            Equation::P2 => "P2",
            Equation::P3 => "P3",
        };
        f.write_str(s)
    }
}

impl FromStr for Equation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "P1" | "p1" => Ok(Equation::P1),
            "P2" | "p2" => Ok(Equation::P2),
            "P3" | "p3" => Ok(Equation::P3),
            other => Err(Error::Parse(format!("unknown equation {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PainleveParams {
    pub equation: Equation,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl PainleveParams {
    pub fn p1() -> Self {
        PainleveParams { equation: Equation::P1, alpha: 0.0, beta: 0.0, gamma: 0.0, delta: 0.0 }
    }

    pub fn p2(alpha: f64) -> Self {
        PainleveParams { equation: Equation::P2, alpha, ..Self::p1() }
    }

    pub fn p3(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        PainleveParams { equation: Equation::P3, alpha, beta, gamma, delta }
    }

    /// P3 parameter sets with a vanishing pair among (γ,δ), (β,δ), (α,γ).
    pub fn is_degenerate(&self) -> bool {
        self.equation == Equation::P3
            && ((self.gamma == 0.0 && self.delta == 0.0)
                || (self.beta == 0.0 && self.delta == 0.0)
                || (self.alpha == 0.0 && self.gamma == 0.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PainleveState {
    pub t: f64,
    pub x: f64,
    pub x_t: f64,
}

impl PainleveState {
    pub fn new(t: f64, x: f64, x_t: f64) -> Self {
        PainleveState { t, x, x_t }
    }
}

/// Checks the points where the right-hand side has explicit poles.
pub fn check_admissible(params: &PainleveParams, t: f64, x: f64) -> Result<()> {
    match params.equation {
        Equation::P1 => Ok(()),
        Equation::P2 => Ok(()),
        Equation::P3 => {
            if t.abs() < SINGULAR_CUTOFF {
                Err(Error::SingularInput(format!("P3 needs t != 0 (t = {t})")))
            } else if x.abs() < SINGULAR_CUTOFF {
                Err(Error::SingularInput(format!("P3 needs x != 0 (x = {x})")))
            } else {
                Ok(())
            }
        }
    }
}

/// x_tt for any scalar type; no admissibility checks.
pub fn rhs_generic<S: Scalar>(params: &PainleveParams, t: S, x: S, x_t: S) -> S {
    match params.equation {
        Equation::P1 => x * x * 6.0 + t,
        Equation::P2 => x * x * x * 2.0 + t * x - params.alpha,
        Equation::P3 => {
            x_t * x_t / x - x_t / t
                + (x * x * params.alpha + params.beta) / t
                + x * x * x * params.gamma
                + S::from(params.delta) / x
        }
    }
}

pub fn rhs(params: &PainleveParams, state: &PainleveState) -> Result<f64> {
    // t = 0 is a regular point of P2 as printed; only P3 has 1/t and 1/x terms
    check_admissible(params, state.t, state.x)?;
    Ok(rhs_generic(params, state.t, state.x, state.x_t))
}

/// On-shell derivatives [x, x_t, x_tt, x_ttt, x⁽⁴⁾, x⁽⁵⁾] at a state, from
/// the Taylor recursion of the equation.
pub fn derivatives(params: &PainleveParams, state: &PainleveState) -> Result<[f64; 6]> {
    check_admissible(params, state.t, state.x)?;
    let mut c = [0.0; 6];
    c[0] = state.x;
    c[1] = state.x_t;
    let t = Jet::var_s(state.t);
    for n in 0..4 {
        let mut x = Jet::constant(0.0);
        let mut xt = Jet::constant(0.0);
        for k in 0..=(n + 1).min(4) {
            x.set(k, 0, 0, c[k]);
        }
        for k in 0..=n {
            xt.set(k, 0, 0, (k + 1) as f64 * c[k + 1]);
        }
        let f = rhs_generic(params, t, x, xt);
        c[n + 2] = f.coeff(n, 0, 0) / ((n + 2) * (n + 1)) as f64;
    }
    let mut fact = 1.0;
    for (k, v) in c.iter_mut().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        *v *= fact;
    }
    Ok(c)
}

/// Derivatives [R, R_t, R_tt, R_ttt] of a solution of the linearized
/// equation about the solution with derivatives `x`, given (R, R_t).
pub fn linearized_derivatives(params: &PainleveParams, t: f64, x: &[f64; 6], r: f64, r_t: f64) -> [f64; 4] {
    let mut c = [r, r_t, 0.0, 0.0];
    let tj = Jet::var_s(t);
    for n in 0..2 {
        let mut xr: Vec<f64> = vec![0.0; 4];
        xr[..=n + 1].copy_from_slice(&c[..=n + 1]);
        let mut rt = vec![0.0; 3];
        for k in 0..=n {
            rt[k] = (k + 1) as f64 * c[k + 1];
        }
        let xj = Jet::from_t_derivatives(x, &taylor_to_derivs(&xr));
        let xtj = Jet::from_t_derivatives(&x[1..], &taylor_to_derivs(&rt));
        let f = rhs_generic(params, tj, xj, xtj);
        c[n + 2] = f.coeff(n, 0, 1) / ((n + 2) * (n + 1)) as f64;
    }
    let d = taylor_to_derivs(&c);
    [d[0], d[1], d[2], d[3]]
}

fn taylor_to_derivs(c: &[f64]) -> Vec<f64> {
    let mut fact = 1.0;
    c.iter()
        .enumerate()
        .map(|(k, v)| {
            if k > 0 {
                fact *= k as f64;
            }
            v * fact
        })
        .collect()
}

/// Sampled solution with quintic Hermite dense output.
#[derive(Clone, Debug)]
pub struct Trajectory {
    params: PainleveParams,
    samples: Vec<PainleveState>,
    // x_tt, x_ttt at each sample, for interpolation
    higher: Vec<[f64; 2]>,
    pole_flag: Option<f64>,
}

fn quintic_hermite(y0: [f64; 3], y1: [f64; 3], h: f64, u: f64) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u3 * u;
    let u5 = u4 * u;
    let h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
    let h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
    let h2 = 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5);
    let h3 = 0.5 * (u3 - 2.0 * u4 + u5);
    let h4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
    let h5 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
    y0[0] * h0 + h * y0[1] * h1 + h * h * y0[2] * h2 + h * h * y1[2] * h3 + h * y1[1] * h4 + y1[0] * h5
}

impl Trajectory {
    /// Builds a trajectory from samples of an on-shell solution.
    pub fn from_samples(params: PainleveParams, samples: Vec<PainleveState>, pole_flag: Option<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::DomainError("trajectory needs at least one sample".into()));
        }
        let dir = if samples.len() > 1 { (samples[1].t - samples[0].t).signum() } else { 1.0 };
        for w in samples.windows(2) {
            if (w[1].t - w[0].t) * dir <= 0.0 {
                return Err(Error::DomainError("trajectory samples must be strictly monotone in t".into()));
            }
        }
        let higher = samples
            .iter()
            .map(|s| derivatives(&params, s).map(|d| [d[2], d[3]]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory { params, samples, higher, pole_flag })
    }

    pub fn params(&self) -> &PainleveParams {
        &self.params
    }

    pub fn samples(&self) -> &[PainleveState] {
        &self.samples
    }

    pub fn pole_flag(&self) -> Option<f64> {
        self.pole_flag
    }

    /// Sampled range as (min, max).
    pub fn t_range(&self) -> (f64, f64) {
        let a = self.samples[0].t;
        let b = self.samples[self.samples.len() - 1].t;
        (a.min(b), a.max(b))
    }

    pub fn state_at(&self, t: f64) -> Result<PainleveState> {
        let (lo, hi) = self.t_range();
        if !(t >= lo && t <= hi) {
            let end = self.samples[self.samples.len() - 1].t;
            return Err(match self.pole_flag {
                // past the end where integration stopped
                Some(p) if (t - end).signum() == (p - end).signum() => Error::PoleEncountered(p),
                _ => Error::DomainError(format!("t = {t} outside trajectory range [{lo}, {hi}]")),
            });
        }
        let n = self.samples.len();
        if n == 1 {
            return Ok(self.samples[0]);
        }
        let increasing = self.samples[1].t > self.samples[0].t;
        // index of the first sample beyond t in the direction of travel
        let k = self
            .samples
            .partition_point(|s| if increasing { s.t < t } else { s.t > t })
            .clamp(1, n - 1);
        let (a, b) = (&self.samples[k - 1], &self.samples[k]);
        if t == a.t {
            return Ok(*a);
        }
        if t == b.t {
            return Ok(*b);
        }
        let (ha, hb) = (&self.higher[k - 1], &self.higher[k]);
        let h = b.t - a.t;
        let u = (t - a.t) / h;
        let x = quintic_hermite([a.x, a.x_t, ha[0]], [b.x, b.x_t, hb[0]], h, u);
        let x_t = quintic_hermite([a.x_t, ha[0], ha[1]], [b.x_t, hb[0], hb[1]], h, u);
        Ok(PainleveState::new(t, x, x_t))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,x,x_t")?;
        for s in &self.samples {
            writeln!(w, "{},{},{}", fmt17(s.t), fmt17(s.x), fmt17(s.x_t))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(params: PainleveParams, r: R) -> Result<Self> {
        let rows = read_csv_rows(r, &["t", "x", "x_t"])?;
        let samples = rows.iter().map(|v| PainleveState::new(v[0], v[1], v[2])).collect();
        Trajectory::from_samples(params, samples, None)
    }
}

/// Full double precision in scientific notation (17 significant digits).
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Reads a numeric CSV with the given header.
pub fn read_csv_rows<R: BufRead>(r: R, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut lines = r.lines();
    let head = lines.next().ok_or_else(|| Error::Parse("empty csv".into()))??;
    let cols: Vec<&str> = head.trim().split(',').collect();
    if cols != header {
        return Err(Error::Parse(format!("expected header {}, found {head}", header.join(","))));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("row {}: {e}", i + 2)))?;
        if vals.len() != header.len() {
            return Err(Error::Parse(format!("row {}: expected {} fields", i + 2, header.len())));
        }
        rows.push(vals);
    }
    Ok(rows)
}

fn pole_stop(y: &[f64]) -> bool {
    !(y[0].abs() <= POLE_THRESHOLD && y[1].abs() <= POLE_THRESHOLD)
}

fn field(params: PainleveParams) -> impl FnMut(f64, &[f64], &mut [f64]) -> Result<()> {
    move |t, y, d| {
        d[0] = y[1];
        d[1] = rhs(&params, &PainleveState::new(t, y[0], y[1]))?;
        Ok(())
    }
}

/// Integrates from `initial` to `t_end`, keeping every accepted step.
pub fn integrate(params: &PainleveParams, initial: PainleveState, t_end: f64, tol: Tolerances) -> Result<Trajectory> {
    rhs(params, &initial)?;
    let mut samples = vec![initial];
    let mut pole = None;
    let mut solver = Solver::new(tol);
    solver.run(field(*params), initial.t, &[initial.x, initial.x_t], t_end, |t, y, _| {
        if pole_stop(y) {
            pole = Some(t);
            Control::Stop
        } else {
            samples.push(PainleveState::new(t, y[0], y[1]));
            Control::Continue
        }
    })?;
    Trajectory::from_samples(*params, samples, pole)
}

/// Integrates through the monotone nodes `ts` (the first must be the initial
/// time) and keeps exactly those nodes.
pub fn integrate_on(params: &PainleveParams, initial: PainleveState, ts: &[f64], tol: Tolerances) -> Result<Trajectory> {
    rhs(params, &initial)?;
    if ts.first() != Some(&initial.t) {
        return Err(Error::DomainError("first node must equal the initial time".into()));
    }
    let mut samples = vec![initial];
    let mut solver = Solver::new(tol);
    let mut y = vec![initial.x, initial.x_t];
    for w in ts.windows(2) {
        let mut pole = None;
        let out = solver.run(field(*params), w[0], &y, w[1], |t, y, _| {
            if pole_stop(y) {
                pole = Some(t);
                Control::Stop
            } else {
                Control::Continue
            }
        })?;
        if let Some(p) = pole {
            return Trajectory::from_samples(*params, samples, Some(p));
        }
        y = out.y;
        samples.push(PainleveState::new(w[1], y[0], y[1]));
    }
    Trajectory::from_samples(*params, samples, None)
}

/// Rational solutions of P2 for α = 1 and α = 2.
pub fn rational_p2(n: u32, t: f64) -> Result<PainleveState> {
    if t.abs() < SINGULAR_CUTOFF {
        return Err(Error::SingularInput("rational P2 solution has a pole at t = 0".into()));
    }
    match n {
        1 => Ok(PainleveState::new(t, 1.0 / t, -1.0 / (t * t))),
        2 => {
            let t3 = t * t * t;
            if (t3 + 4.0).abs() < SINGULAR_CUTOFF {
                return Err(Error::SingularInput("rational P2 solution has a pole at t^3 = -4".into()));
            }
            let num = 2.0 * (t3 - 2.0);
            let den = t * (t3 + 4.0);
            let dnum = 6.0 * t * t;
            let dden = 4.0 * t3 + 4.0;
            Ok(PainleveState::new(t, num / den, (dnum * den - num * dden) / (den * den)))
        }
        _ => Err(Error::DomainError(format!("rational P2 solution of order {n} not available"))),
    }
}

/// α for the rational solution of order n.
pub fn rational_alpha(n: u32) -> f64 {
    n as f64
}

/// 2^{-1/3}
pub const AIRY_SCALE: f64 = 0.793_700_525_984_099_7;

/// One-parameter Airy solutions of P2, x = -ε d/dt ln Ai(-2^{-1/3} t),
/// solving the Riccati equation x_t = εx² + εt/2 (α = -ε/2).
pub fn airy_p2(epsilon: f64, t: f64) -> Result<PainleveState> {
    if epsilon != 1.0 && epsilon != -1.0 {
        return Err(Error::DomainError(format!("epsilon must be +1 or -1, got {epsilon}")));
    }
    let (ai, aip) = airy(-AIRY_SCALE * t)?;
    if ai.abs() < AIRY_ZERO_CUTOFF {
        return Err(Error::NearAiryZero(t));
    }
    let x = epsilon * AIRY_SCALE * aip / ai;
    Ok(PainleveState::new(t, x, epsilon * x * x + epsilon * t / 2.0))
}

pub fn airy_alpha(epsilon: f64) -> f64 {
    -epsilon / 2.0
}

/// The solution a surface is built on.
#[derive(Clone, Debug)]
pub enum Host {
    Numeric(Trajectory),
    Rational(u32),
    Airy(f64),
}

impl Host {
    pub fn params(&self) -> PainleveParams {
        match self {
            Host::Numeric(tr) => *tr.params(),
            Host::Rational(n) => PainleveParams::p2(rational_alpha(*n)),
            Host::Airy(eps) => PainleveParams::p2(airy_alpha(*eps)),
        }
    }

    pub fn state(&self, t: f64) -> Result<PainleveState> {
        match self {
            Host::Numeric(tr) => tr.state_at(t),
            Host::Rational(n) => rational_p2(*n, t).map_err(|_| Error::PoleEncountered(t)),
            Host::Airy(eps) => airy_p2(*eps, t).map_err(|e| match e {
                Error::NearAiryZero(t) => Error::PoleEncountered(t),
                other => other,
            }),
        }
    }

    /// Fails if the solution has a pole in [a, b].
    pub fn check_pole_free(&self, a: f64, b: f64) -> Result<()> {
        let (a, b) = (a.min(b), a.max(b));
        match self {
            Host::Numeric(tr) => {
                let (lo, hi) = tr.t_range();
                if a < lo || b > hi {
                    return Err(match tr.pole_flag() {
                        Some(p) => Error::PoleEncountered(p),
                        None => Error::DomainError(format!(
                            "trajectory covers [{lo}, {hi}], surface needs [{a}, {b}]"
                        )),
                    });
                }
                Ok(())
            }
            Host::Rational(n) => {
                let mut poles = vec![0.0];
                if *n == 2 {
                    poles.push(-(4f64.cbrt()));
                }
                match poles.into_iter().find(|p| *p >= a && *p <= b) {
                    Some(p) => Err(Error::PoleEncountered(p)),
                    None => Ok(()),
                }
            }
            Host::Airy(_) => {
                // zeros of Ai are simple, so a sign change brackets each one
                let n = (((b - a) / 0.01).ceil() as usize).max(1);
                let mut prev = airy(-AIRY_SCALE * a)?.0;
                for i in 0..=n {
                    let t = a + (b - a) * i as f64 / n as f64;
                    let v = airy(-AIRY_SCALE * t)?.0;
                    if v.abs() < AIRY_ZERO_CUTOFF || v.signum() != prev.signum() {
                        return Err(Error::PoleEncountered(t));
                    }
                    prev = v;
                }
                Ok(())
            }
        }
    }
}
