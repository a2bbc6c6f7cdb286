//! Dormand–Prince 5(4) with PI step-size control.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-10, atol: 1e-12 }
    }
}

impl Tolerances {
    /// Relative tolerance `tol` with absolute tolerance a hundred times smaller.
    pub fn uniform(tol: f64) -> Self {
        Tolerances { rtol: tol, atol: tol * 1e-2 }
    }
}

/// What an observer wants after an accepted step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub t: f64,
    pub y: Vec<f64>,
    /// The observer asked to stop before reaching the end point.
    pub stopped: bool,
    pub steps: usize,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const MIN_STEP: f64 = 1e-13;

/// Adaptive solver; keeps the last step size between calls so that
/// integrating through a sequence of nodes does not restart the controller.
#[derive(Clone, Debug)]
pub struct Solver {
    pub tol: Tolerances,
    h_hint: Option<f64>,
}

impl Solver {
    pub fn new(tol: Tolerances) -> Self {
        Solver { tol, h_hint: None }
    }

    fn norm(&self, v: &[f64], y: &[f64], y2: &[f64]) -> f64 {
        let n = v.len() as f64;
        let s: f64 = v
            .iter()
            .zip(y.iter().zip(y2))
            .map(|(e, (a, b))| {
                let sc = self.tol.atol + self.tol.rtol * a.abs().max(b.abs());
                (e / sc).powi(2)
            })
            .sum();
        (s / n).sqrt()
    }

    fn initial_step<F>(&self, f: &mut F, t0: f64, y0: &[f64], f0: &[f64], dir: f64) -> Result<f64>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        let d0 = self.norm(y0, y0, y0);
        let d1 = self.norm(f0, y0, y0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, k)| y + dir * h0 * k).collect();
        let mut f1 = vec![0.0; y0.len()];
        f(t0 + dir * h0, &y1, &mut f1)?;
        let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
        let d2 = self.norm(&diff, y0, y0) / h0;
        let m = d1.max(d2);
        let h1 = if m <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / m).powf(0.2) };
        Ok((100.0 * h0).min(h1))
    }

    /// Integrate `y' = f(t, y)` from `t0` to exactly `t1`. The observer sees
    /// every accepted step as `(t, y, y')`.
    pub fn run<F, O>(&mut self, mut f: F, t0: f64, y0: &[f64], t1: f64, mut observer: O) -> Result<Outcome>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
        O: FnMut(f64, &[f64], &[f64]) -> Control,
    {
        let n = y0.len();
        let mut y = y0.to_vec();
        if t1 == t0 {
            return Ok(Outcome { t: t0, y, stopped: false, steps: 0 });
        }
        let dir = (t1 - t0).signum();
        let span = (t1 - t0).abs();
        let mut k = vec![vec![0.0; n]; 7];
        f(t0, &y, &mut k[0])?;
        let mut h = match self.h_hint {
            Some(h) => h,
            None => self.initial_step(&mut f, t0, &y, &k[0].clone(), dir)?,
        }
        .min(span);
        let mut t = t0;
        let mut ytmp = vec![0.0; n];
        let mut ynew = vec![0.0; n];
        let mut err = vec![0.0; n];
        let mut facold: f64 = 1e-4;
        let mut rejected = false;
        let mut steps = 0;
        loop {
            let remaining = (t1 - t).abs();
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }
            if h < MIN_STEP * t.abs().max(1.0) && !last {
                return Err(Error::StepSizeUnderflow { t, h });
            }
            let hs = dir * h;
            let mut finite = true;
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += hs * A[s][j] * kj[i];
                    }
                    ytmp[i] = acc;
                }
                if f(t + C[s] * hs, &ytmp, &mut k[s]).is_err() {
                    finite = false;
                    break;
                }
            }
            let e = if finite {
                ynew.copy_from_slice(&ytmp);
                for i in 0..n {
                    err[i] = hs * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
                }
                let e = self.norm(&err, &y, &ynew);
                if e.is_finite() && ynew.iter().all(|v| v.is_finite()) {
                    e
                } else {
                    f64::INFINITY
                }
            } else {
                f64::INFINITY
            };
            if e <= 1.0 {
                t = if last { t1 } else { t + hs };
                y.copy_from_slice(&ynew);
                let k6 = k[6].clone();
                k[0].copy_from_slice(&k6);
                steps += 1;
                let fac11 = e.max(1e-16).powf(0.2 - BETA * 0.75);
                let mut fac = fac11 / facold.powf(BETA);
                fac = (fac / SAFETY).clamp(0.1, 5.0);
                let mut hnew = h / fac;
                if rejected {
                    hnew = hnew.min(h);
                }
                facold = e.max(1e-4);
                rejected = false;
                if !last || self.h_hint.is_none() {
                    self.h_hint = Some(hnew);
                }
                if observer(t, &y, &k[0]) == Control::Stop {
                    return Ok(Outcome { t, y, stopped: true, steps });
                }
                if last {
                    return Ok(Outcome { t, y, stopped: false, steps });
                }
                h = hnew;
            } else {
                let shrink = if e.is_finite() {
                    (e.powf(0.2 - BETA * 0.75) / SAFETY).min(5.0)
                } else {
                    10.0
                };
                h /= shrink.max(1.0 + 1e-3);
                rejected = true;
                if h < MIN_STEP * t.abs().max(1.0) {
                    return Err(Error::StepSizeUnderflow { t, h });
                }
            }
        }
    }
}
