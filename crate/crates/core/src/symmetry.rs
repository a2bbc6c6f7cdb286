//! Deformations (A, B) of the zero-curvature condition: the six-term
//! symmetry combination, gauge characteristics and the determining equation.

use std::io::{BufRead, Write};

use crate::algebra::Mat2;
use crate::error::{Error, Result};
use crate::jet::{Jet, JetMat, Scalar};
use crate::laxpair::{LaxPair, LaxPoint, PotentialJets};
use crate::ode::{Control, Solver, Tolerances};
use crate::painleve::{
    airy_p2, derivatives, fmt17, linearized_derivatives, read_csv_rows, rhs_generic, Equation, Host, PainleveParams,
    PainleveState, AIRY_SCALE,
};
use crate::special::{airy, bessel_i};

/// Polynomial weight Σ c_k v^k.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn one() -> Self {
        Polynomial(vec![1.0])
    }

    pub fn eval<S: Scalar>(&self, v: S) -> S {
        self.0.iter().rev().fold(S::from(0.0), |acc, c| acc * v + *c)
    }
}

impl Default for Polynomial {
    fn default() -> Self {
        Polynomial::one()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryChoice {
    /// Weights of the translation (t, λ), dilation (t, λ), second-order and
    /// R-direction terms.
    pub alpha: [f64; 6],
    /// r(t) multiplying the t-translation family.
    pub r_weight: Polynomial,
    /// s(λ) multiplying the λ-translation family.
    pub s_weight: Polynomial,
}

impl SymmetryChoice {
    pub fn new(alpha: [f64; 6]) -> Self {
        SymmetryChoice { alpha, r_weight: Polynomial::one(), s_weight: Polynomial::one() }
    }

    /// Only the k-th coefficient (1-based) set to one.
    pub fn single(k: usize) -> Self {
        let mut alpha = [0.0; 6];
        alpha[k - 1] = 1.0;
        SymmetryChoice::new(alpha)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.iter().all(|a| *a == 0.0) {
            return Err(Error::DomainError("all symmetry coefficients are zero".into()));
        }
        Ok(())
    }
}

/// Value of a characteristic R and its t-derivative at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RValue {
    pub r: f64,
    pub r_t: f64,
}

/// Representations of the second derivatives of F at a point
/// (before conjugation by the wave function).
#[derive(Clone, Copy, Debug)]
pub struct SecondDerivatives {
    /// D_tA + [A, U¹]
    pub tt: Mat2,
    /// D_λA + [A, U²]
    pub tl: Mat2,
    /// D_tB + [B, U¹]
    pub lt: Mat2,
    /// D_λB + [B, U²]
    pub ll: Mat2,
}

/// A deformation (A, B) as jets in (t, λ), with the potentials it lives on.
#[derive(Clone, Copy, Debug)]
pub struct Deformation {
    pub a: JetMat,
    pub b: JetMat,
    pub u: PotentialJets,
}

impl Deformation {
    pub fn a(&self) -> Mat2 {
        self.a.value()
    }

    pub fn b(&self) -> Mat2 {
        self.b.value()
    }

    pub fn residual_jet(&self) -> JetMat {
        self.a.d_lambda() - self.b.d_t() + self.a.commutator(&self.u.u2) + self.u.u1.commutator(&self.b)
    }

    /// D_λA − D_tB + [A, U²] + [U¹, B]
    pub fn residual(&self) -> Mat2 {
        self.residual_jet().value()
    }

    pub fn second_derivatives(&self) -> SecondDerivatives {
        let (u1, u2) = (&self.u.u1, &self.u.u2);
        SecondDerivatives {
            tt: (self.a.d_t() + self.a.commutator(u1)).value(),
            tl: (self.a.d_lambda() + self.a.commutator(u2)).value(),
            lt: (self.b.d_t() + self.b.commutator(u1)).value(),
            ll: (self.b.d_lambda() + self.b.commutator(u2)).value(),
        }
    }

    /// Largest entry among A, B, U¹, U², for scale-aware bounds.
    pub fn scale(&self) -> f64 {
        [self.a(), self.b(), self.u.u1.value(), self.u.u2.value()]
            .iter()
            .map(Mat2::max_abs)
            .fold(1.0, f64::max)
    }
}

fn r_derivatives(pair: &LaxPair, p: &LaxPoint, r: &RValue) -> [f64; 4] {
    linearized_derivatives(pair.params(), p.t, &p.x_derivatives(), r.r, r.r_t)
}

/// The six-term combination (A, B) at `p`; `r` is required when α₆ ≠ 0.
pub fn build_ab(pair: &LaxPair, choice: &SymmetryChoice, p: &LaxPoint, r: Option<&RValue>) -> Result<Deformation> {
    let [a1, a2, a3, a4, a5, a6] = choice.alpha;
    let variation = match (a6 != 0.0, r) {
        (true, None) => return Err(Error::MissingRSolution),
        (true, Some(r)) => Some(r_derivatives(pair, p, r)),
        (false, _) => None,
    };
    let u = pair.jets(p, variation.as_ref())?;
    let (u1, u2) = (u.u1, u.u2);
    let t = Jet::var_s(p.t);
    let lam = Jet::var_l(p.lambda);
    let mut a = JetMat::zero();
    let mut b = JetMat::zero();
    if a1 != 0.0 {
        let rw = choice.r_weight.eval(t);
        a = a + u1.scale_jet(&rw).d_t().scale(a1);
        b = b + u2.d_t().scale_jet(&rw).scale(a1);
    }
    if a2 != 0.0 {
        let sw = choice.s_weight.eval(lam);
        a = a + u1.d_lambda().scale_jet(&sw).scale(a2);
        b = b + u2.scale_jet(&sw).d_lambda().scale(a2);
    }
    if a3 != 0.0 {
        a = a + (u1.d_t().scale_jet(&t) + u1).scale(a3);
        b = b + u2.d_t().scale_jet(&t).scale(a3);
    }
    if a4 != 0.0 {
        a = a + u1.d_lambda().scale_jet(&lam).scale(a4);
        b = b + (u2.d_lambda().scale_jet(&lam) + u2).scale(a4);
    }
    if a5 != 0.0 {
        let d1 = u1.d_t();
        a = a + (d1.d_t() + d1.commutator(&u1)).scale(a5);
        b = b + (u2.d_t().d_t() + u2.d_t().commutator(&u1)).scale(a5);
    }
    if a6 != 0.0 {
        a = a + u1.variation().scale(a6);
        b = b + u2.variation().scale(a6);
    }
    Ok(Deformation { a, b, u })
}

/// A sl(2)-valued function S(t, λ, x, x_t) usable on jets.
pub trait GaugeFunction {
    fn eval<S: Scalar>(&self, pair: &LaxPair, t: S, lam: S, x: S, x_t: S) -> [[S; 2]; 2];
}

/// A constant gauge matrix.
#[derive(Clone, Copy, Debug)]
pub struct ConstantGauge(pub Mat2);

impl GaugeFunction for ConstantGauge {
    fn eval<S: Scalar>(&self, _: &LaxPair, _: S, _: S, _: S, _: S) -> [[S; 2]; 2] {
        let r = self.0.re_rows();
        [[S::from(r[0][0]), S::from(r[0][1])], [S::from(r[1][0]), S::from(r[1][1])]]
    }
}

/// S = r(t) U¹.
#[derive(Clone, Debug)]
pub struct WeightedPotential(pub Polynomial);

impl GaugeFunction for WeightedPotential {
    fn eval<S: Scalar>(&self, pair: &LaxPair, t: S, lam: S, x: S, x_t: S) -> [[S; 2]; 2] {
        let w = self.0.eval(t);
        let u = pair.potentials(t, lam, x, x_t).0;
        [[u[0][0] * w, u[0][1] * w], [u[1][0] * w, u[1][1] * w]]
    }
}

/// S = Σ_k f_k(t, λ, x, x_t) e_k with each f_k a quadratic polynomial
/// divided by (1 + λ²).
#[derive(Clone, Debug)]
pub struct PolynomialGauge {
    /// Coefficients of 1, t, λ, x, x_t and their pairwise products, per basis element.
    pub coeffs: [[f64; 15]; 3],
}

impl GaugeFunction for PolynomialGauge {
    fn eval<S: Scalar>(&self, _: &LaxPair, t: S, lam: S, x: S, x_t: S) -> [[S; 2]; 2] {
        let vars = [t, lam, x, x_t];
        let mut monos = vec![S::from(1.0)];
        monos.extend_from_slice(&vars);
        for i in 0..4 {
            for j in i..4 {
                monos.push(vars[i] * vars[j]);
            }
        }
        let den = lam * lam + 1.0;
        let f: Vec<S> = self
            .coeffs
            .iter()
            .map(|c| monos.iter().zip(c).fold(S::from(0.0), |acc, (m, k)| acc + *m * *k) / den)
            .collect();
        // c1 e1 + c2 e2 + c3 e3
        [[f[0], f[1] - f[2]], [f[1] + f[2], -f[0]]]
    }
}

/// Q¹ = D_tS + [S, U¹], Q² = D_λS + [S, U²].
pub fn gauge_characteristics<G: GaugeFunction>(gauge: &G, pair: &LaxPair, p: &LaxPoint) -> Result<Deformation> {
    let u = pair.jets(p, None)?;
    let d = p.x_derivatives();
    let t = Jet::var_s(p.t);
    let lam = Jet::var_l(p.lambda);
    let x = Jet::from_t_derivatives(&d, &[]);
    let xt = Jet::from_t_derivatives(&d[1..], &[]);
    let s = JetMat(gauge.eval(pair, t, lam, x, xt));
    let a = s.d_t() + s.commutator(&u.u1);
    let b = s.d_lambda() + s.commutator(&u.u2);
    Ok(Deformation { a, b, u })
}

/// Which P3 point symmetry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum P3Symmetry {
    /// R = x + t x_t, for β = δ = 0
    R1,
    /// R = x − t x_t, for α = γ = 0
    R2,
}

pub fn p3_point_symmetry(which: P3Symmetry, params: &PainleveParams, state: &PainleveState) -> Result<RValue> {
    if params.equation != Equation::P3 {
        return Err(Error::WrongParameterRegime(format!("point symmetries are for P3, not {}", params.equation)));
    }
    let d = derivatives(params, state)?;
    let (t, x, xt, xtt) = (state.t, d[0], d[1], d[2]);
    match which {
        P3Symmetry::R1 => {
            if params.beta != 0.0 || params.delta != 0.0 {
                return Err(Error::WrongParameterRegime("R1 needs beta = delta = 0".into()));
            }
            Ok(RValue { r: x + t * xt, r_t: 2.0 * xt + t * xtt })
        }
        P3Symmetry::R2 => {
            if params.alpha != 0.0 || params.gamma != 0.0 {
                return Err(Error::WrongParameterRegime("R2 needs alpha = gamma = 0".into()));
            }
            Ok(RValue { r: x - t * xt, r_t: -t * xtt })
        }
    }
}

/// A solution R of the determining (linearized) equation along a host.
#[derive(Clone, Debug, PartialEq)]
pub enum RSolution {
    /// Samples [t, R, R_t, R_tt, R_ttt].
    Sampled(Vec<[f64; 5]>),
    /// √t I_{5/3}(2 t^{3/2} / 3) on the rational α = 1 solution of P2.
    BesselAlpha1,
    /// Ai(-2^{-1/3} t)^{-2} on the Airy solution with the given ε.
    AiryEps(f64),
    P3ScaleR1,
    P3ScaleR2,
}

fn bessel_r(t: f64) -> Result<RValue> {
    if t <= 0.0 {
        return Err(Error::DomainError(format!("Bessel characteristic needs t > 0, got {t}")));
    }
    let nu = 5.0 / 3.0;
    let z = 2.0 * t.powf(1.5) / 3.0;
    let i = bessel_i(nu, z)?;
    let di = bessel_i(nu + 1.0, z)? + nu / z * i;
    let sq = t.sqrt();
    Ok(RValue { r: sq * i, r_t: i / (2.0 * sq) + t * di })
}

fn airy_r(eps: f64, t: f64) -> Result<RValue> {
    let x = airy_p2(eps, t)?.x;
    let ai = airy(-AIRY_SCALE * t)?.0;
    let r = 1.0 / (ai * ai);
    Ok(RValue { r, r_t: 2.0 * eps * x * r })
}

fn hermite5(a: &[f64; 5], b: &[f64; 5], t: f64, slot: usize) -> f64 {
    let h = b[0] - a[0];
    let u = (t - a[0]) / h;
    let (u2, u3) = (u * u, u * u * u);
    let (u4, u5) = (u3 * u, u3 * u2);
    let h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
    let h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
    let h2 = 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5);
    let h3 = 0.5 * (u3 - 2.0 * u4 + u5);
    let h4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
    let h5 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
    let s = slot;
    a[s] * h0 + h * a[s + 1] * h1 + h * h * a[s + 2] * h2 + h * h * b[s + 2] * h3 + h * b[s + 1] * h4 + b[s] * h5
}

impl RSolution {
    pub fn value(&self, params: &PainleveParams, state: &PainleveState) -> Result<RValue> {
        match self {
            RSolution::BesselAlpha1 => bessel_r(state.t),
            RSolution::AiryEps(eps) => airy_r(*eps, state.t),
            RSolution::P3ScaleR1 => p3_point_symmetry(P3Symmetry::R1, params, state),
            RSolution::P3ScaleR2 => p3_point_symmetry(P3Symmetry::R2, params, state),
            RSolution::Sampled(s) => {
                let t = state.t;
                let n = s.len();
                let (lo, hi) = (s[0][0].min(s[n - 1][0]), s[0][0].max(s[n - 1][0]));
                if !(t >= lo && t <= hi) {
                    return Err(Error::DomainError(format!("R sampled on [{lo}, {hi}], needed at {t}")));
                }
                if n == 1 {
                    return Ok(RValue { r: s[0][1], r_t: s[0][2] });
                }
                let inc = s[1][0] > s[0][0];
                let k = s.partition_point(|v| if inc { v[0] < t } else { v[0] > t }).clamp(1, n - 1);
                let (a, b) = (&s[k - 1], &s[k]);
                if t == a[0] {
                    return Ok(RValue { r: a[1], r_t: a[2] });
                }
                if t == b[0] {
                    return Ok(RValue { r: b[1], r_t: b[2] });
                }
                Ok(RValue { r: hermite5(a, b, t, 1), r_t: hermite5(a, b, t, 2) })
            }
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let RSolution::Sampled(s) = self else {
            return Err(Error::DomainError("only sampled R solutions are exported".into()));
        };
        writeln!(w, "t,R,R_t")?;
        for v in s {
            writeln!(w, "{},{},{}", fmt17(v[0]), fmt17(v[1]), fmt17(v[2]))?;
        }
        Ok(())
    }

    /// Reads `t,R,R_t` samples; higher derivatives come from the host.
    pub fn read_csv<R: BufRead>(r: R, host: &Host) -> Result<Self> {
        let rows = read_csv_rows(r, &["t", "R", "R_t"])?;
        let params = host.params();
        let mut out = Vec::with_capacity(rows.len());
        for v in rows {
            let st = host.state(v[0])?;
            let d = derivatives(&params, &st)?;
            let l = linearized_derivatives(&params, v[0], &d, v[1], v[2]);
            out.push([v[0], l[0], l[1], l[2], l[3]]);
        }
        Ok(RSolution::Sampled(out))
    }
}

/// f_x R + f_{x_t} R_t, the linearized right-hand side.
fn linearized_rhs(params: &PainleveParams, st: &PainleveState, r: f64, r_t: f64) -> f64 {
    let mut x = Jet::constant(st.x);
    x.set(0, 0, 1, r);
    let mut xt = Jet::constant(st.x_t);
    xt.set(0, 0, 1, r_t);
    rhs_generic(params, Jet::constant(st.t), x, xt).coeff(0, 0, 1)
}

/// Integrates the determining equation along `host` through the nodes `grid`
/// (monotone, starting where (r0, rt0) are given).
pub fn solve_determining(host: &Host, grid: &[f64], r0: f64, rt0: f64, tol: Tolerances) -> Result<RSolution> {
    let params = host.params();
    if grid.is_empty() {
        return Err(Error::DomainError("empty grid".into()));
    }
    let mut solver = Solver::new(tol);
    let mut out = Vec::with_capacity(grid.len());
    let mut y = vec![r0, rt0];
    let push = |t: f64, y: &[f64], out: &mut Vec<[f64; 5]>| -> Result<()> {
        let st = host.state(t)?;
        let d = derivatives(&params, &st)?;
        let l = linearized_derivatives(&params, t, &d, y[0], y[1]);
        out.push([t, l[0], l[1], l[2], l[3]]);
        Ok(())
    };
    push(grid[0], &y, &mut out)?;
    for w in grid.windows(2) {
        let res = solver.run(
            |t, y, dy| {
                let st = host.state(t)?;
                dy[0] = y[1];
                dy[1] = linearized_rhs(&params, &st, y[0], y[1]);
                Ok(())
            },
            w[0],
            &y,
            w[1],
            |_, _, _| Control::Continue,
        )?;
        y = res.y;
        push(w[1], &y, &mut out)?;
    }
    Ok(RSolution::Sampled(out))
}

/// Same as [`solve_determining`] on the sample times of a numeric host.
pub fn solve_determining_on(host: &crate::painleve::Trajectory, r0: f64, rt0: f64, tol: Tolerances) -> Result<RSolution> {
    let grid: Vec<f64> = host.samples().iter().map(|s| s.t).collect();
    solve_determining(&Host::Numeric(host.clone()), &grid, r0, rt0, tol)
}

/// R_tt − (f_x R + f_{x_t} R_t) along the host, for checking a characteristic.
pub fn determining_residual(params: &PainleveParams, st: &PainleveState, r: &RValue, r_tt: f64) -> f64 {
    r_tt - linearized_rhs(params, st, r.r, r.r_t)
}
