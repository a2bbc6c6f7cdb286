//! Wave function Φ on a (t, λ) grid and the immersion F built from it.

use crate::algebra::{decompose, AlgebraVector, Mat2};
use crate::error::{Error, Result};
use crate::laxpair::{LaxPair, LaxPoint};
use crate::ode::{Control, Solver, Tolerances};
use crate::painleve::{Equation, Host, PainleveState};
use crate::symmetry::{build_ab, Deformation, RSolution, SymmetryChoice};

/// Entries beyond this count as an overflowing wave function.
pub const FRAME_LIMIT: f64 = 1e150;

/// Rectangular grid with optional bands of excluded t or λ values.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub n_t: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub n_lambda: usize,
    pub t_base: f64,
    pub lambda_base: f64,
    /// Closed intervals of t whose nodes are dropped.
    pub exclude_t: Vec<(f64, f64)>,
    pub exclude_lambda: Vec<(f64, f64)>,
}

/// A rectangle of consecutive kept nodes, inclusive index ranges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Patch {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
    pub base: (usize, usize),
}

fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| if k == n - 1 { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
        .collect()
}

fn runs(values: &[f64], bands: &[(f64, f64)]) -> Vec<(usize, usize)> {
    let kept: Vec<bool> = values.iter().map(|v| !bands.iter().any(|(a, b)| *v >= *a && *v <= *b)).collect();
    let mut out = Vec::new();
    let mut start = None;
    for (k, keep) in kept.iter().enumerate() {
        match (keep, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                out.push((s, k - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, kept.len() - 1));
    }
    out
}

fn nearest(values: &[f64], lo: usize, hi: usize, v: f64) -> usize {
    (lo..=hi)
        .min_by(|a, b| (values[*a] - v).abs().total_cmp(&(values[*b] - v).abs()))
        .unwrap()
}

impl GridSpec {
    pub fn new(t: (f64, f64, usize), lambda: (f64, f64, usize), base: (f64, f64)) -> Self {
        GridSpec {
            t_min: t.0,
            t_max: t.1,
            n_t: t.2,
            lambda_min: lambda.0,
            lambda_max: lambda.1,
            n_lambda: lambda.2,
            t_base: base.0,
            lambda_base: base.1,
            exclude_t: Vec::new(),
            exclude_lambda: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |lo: f64, hi: f64, n: usize| lo.is_finite() && hi.is_finite() && n >= 2 && hi > lo;
        if !ok(self.t_min, self.t_max, self.n_t) || !ok(self.lambda_min, self.lambda_max, self.n_lambda) {
            return Err(Error::DomainError("grid needs finite ranges with max > min and at least 2 nodes".into()));
        }
        if self.patches().is_empty() {
            return Err(Error::DomainError("exclusion bands remove every grid node".into()));
        }
        Ok(())
    }

    pub fn t_nodes(&self) -> Vec<f64> {
        nodes(self.t_min, self.t_max, self.n_t)
    }

    pub fn lambda_nodes(&self) -> Vec<f64> {
        nodes(self.lambda_min, self.lambda_max, self.n_lambda)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_lambda + j
    }

    pub fn h_t(&self) -> f64 {
        (self.t_max - self.t_min) / (self.n_t - 1) as f64
    }

    pub fn h_lambda(&self) -> f64 {
        (self.lambda_max - self.lambda_min) / (self.n_lambda - 1) as f64
    }

    pub fn patches(&self) -> Vec<Patch> {
        let (t, l) = (self.t_nodes(), self.lambda_nodes());
        let mut out = Vec::new();
        for (i0, i1) in runs(&t, &self.exclude_t) {
            for (j0, j1) in runs(&l, &self.exclude_lambda) {
                let base = (nearest(&t, i0, i1, self.t_base), nearest(&l, j0, j1, self.lambda_base));
                out.push(Patch { i0, i1, j0, j1, base });
            }
        }
        out
    }

    /// Whether node (i, j) is kept.
    pub fn is_kept(&self, i: usize, j: usize) -> bool {
        self.patches().iter().any(|p| i >= p.i0 && i <= p.i1 && j >= p.j0 && j <= p.j1)
    }

    /// `is_kept` for every node, row-major.
    pub fn kept_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n_t * self.n_lambda];
        for p in self.patches() {
            for i in p.i0..=p.i1 {
                for j in p.j0..=p.j1 {
                    mask[self.index(i, j)] = true;
                }
            }
        }
        mask
    }
}

/// Order of the two legs of the L-shaped paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathOrder {
    /// Along t at the base λ first, then along λ.
    TimeFirst,
    /// Along λ at the base t first, then along t.
    SpectralFirst,
}

#[derive(Clone, Debug)]
pub struct FrameGrid {
    pub spec: GridSpec,
    pub t: Vec<f64>,
    pub lambda: Vec<f64>,
    pub patches: Vec<Patch>,
    phi: Vec<Option<Mat2>>,
    states: Vec<Option<PainleveState>>,
}

impl FrameGrid {
    pub fn phi(&self, i: usize, j: usize) -> Option<&Mat2> {
        self.phi[self.spec.index(i, j)].as_ref()
    }

    pub fn state(&self, i: usize) -> Option<&PainleveState> {
        self.states[i].as_ref()
    }

    /// max |det Φ − 1| over kept nodes.
    pub fn max_det_drift(&self) -> f64 {
        self.phi.iter().flatten().map(|p| (p.det().re - 1.0).abs()).fold(0.0, f64::max)
    }
}

fn singular_lambdas(pair: &LaxPair) -> Vec<f64> {
    match pair.params().equation {
        Equation::P1 => vec![],
        Equation::P2 => vec![0.0],
        Equation::P3 => {
            let (g, d) = pair.p3_coefficients();
            let mut v = vec![0.0];
            if g * d < 0.0 {
                let r = (-g * d).sqrt();
                v.push(r);
                v.push(-r);
            }
            v
        }
    }
}

/// Host states along the kept t nodes, after checking the rectangle is
/// free of poles and Lax singularities.
fn patch_states(pair: &LaxPair, host: &Host, spec: &GridSpec, t: &[f64], l: &[f64]) -> Result<Vec<Option<PainleveState>>> {
    let mut states = vec![None; t.len()];
    let patches = spec.patches();
    let params = host.params();
    for p in &patches {
        host.check_pole_free(t[p.i0], t[p.i1])?;
        let (la, lb) = (l[p.j0], l[p.j1]);
        if let Some(s) = singular_lambdas(pair).into_iter().find(|s| *s >= la && *s <= lb) {
            return Err(Error::SingularInput(format!("grid crosses the Lax singularity lambda = {s}")));
        }
        if params.equation == Equation::P3 && t[p.i0] <= 0.0 && t[p.i1] >= 0.0 {
            return Err(Error::SingularInput("P3 grid crosses t = 0".into()));
        }
        for i in p.i0..=p.i1 {
            if states[i].is_none() {
                states[i] = Some(host.state(t[i])?);
            }
        }
        if params.equation == Equation::P3 {
            for i in p.i0..p.i1 {
                let (a, b) = (states[i].unwrap().x, states[i + 1].unwrap().x);
                if a * b <= 0.0 {
                    return Err(Error::SingularInput(format!("solution crosses x = 0 near t = {}", t[i])));
                }
            }
        }
        for i in p.i0..=p.i1 {
            for j in p.j0..=p.j1 {
                pair.check(&LaxPoint::on_shell(&params, &states[i].unwrap(), l[j])?)?;
            }
        }
    }
    Ok(states)
}

fn to_vec(m: &Mat2) -> [f64; 4] {
    [m.a11.re, m.a12.re, m.a21.re, m.a22.re]
}

fn from_vec(v: &[f64]) -> Mat2 {
    Mat2::real(v[0], v[1], v[2], v[3])
}

/// Solves Φ' = U(s) Φ through the nodes `path` (the first holding `phi0`).
fn propagate<U>(u: U, path: &[f64], phi0: Mat2, tol: Tolerances, at: impl Fn(f64) -> (f64, f64)) -> Result<Vec<Mat2>>
where
    U: Fn(f64) -> Result<Mat2>,
{
    let mut out = vec![phi0];
    let mut y = to_vec(&phi0).to_vec();
    let mut solver = Solver::new(tol);
    for w in path.windows(2) {
        let mut overflow = false;
        let res = solver.run(
            |s, y, d| {
                let m = u(s)? * from_vec(y);
                d.copy_from_slice(&to_vec(&m));
                Ok(())
            },
            w[0],
            &y,
            w[1],
            |_, y, _| {
                if y.iter().all(|v| v.abs() <= FRAME_LIMIT) {
                    Control::Continue
                } else {
                    overflow = true;
                    Control::Stop
                }
            },
        );
        let res = match res {
            Err(Error::StepSizeUnderflow { t, .. }) => {
                let (tt, ll) = at(t);
                return Err(Error::FrameOverflow { t: tt, lambda: ll });
            }
            other => other?,
        };
        if overflow {
            let (tt, ll) = at(res.t);
            return Err(Error::FrameOverflow { t: tt, lambda: ll });
        }
        y = res.y;
        out.push(from_vec(&y));
    }
    Ok(out)
}

fn outward(lo: usize, hi: usize, base: usize) -> [Vec<usize>; 2] {
    [(base..=hi).collect(), (lo..=base).rev().collect()]
}

/// Integrates D_tΦ = U¹Φ, D_λΦ = U²Φ with Φ = I at each patch base.
pub fn integrate_frame(pair: &LaxPair, host: &Host, spec: &GridSpec, tol: Tolerances, order: PathOrder) -> Result<FrameGrid> {
    spec.validate()?;
    let t = spec.t_nodes();
    let l = spec.lambda_nodes();
    let states = patch_states(pair, host, spec, &t, &l)?;
    let params = host.params();
    let mut phi = vec![None; spec.n_t * spec.n_lambda];
    let u1_at = |lam: f64| {
        move |s: f64| -> Result<Mat2> {
            let st = host.state(s)?;
            pair.u1(&LaxPoint::new(s, lam, st.x, st.x_t, 0.0))
        }
    };
    let u2_at = |st: PainleveState| move |lam: f64| pair.u2(&LaxPoint::new(st.t, lam, st.x, st.x_t, 0.0));
    let patches = spec.patches();
    for p in &patches {
        let (ib, jb) = p.base;
        phi[spec.index(ib, jb)] = Some(Mat2::IDENTITY);
        match order {
            PathOrder::TimeFirst => {
                for leg in outward(p.i0, p.i1, ib) {
                    let ts: Vec<f64> = leg.iter().map(|i| t[*i]).collect();
                    let lam = l[jb];
                    let res = propagate(u1_at(lam), &ts, Mat2::IDENTITY, tol, |s| (s, lam))?;
                    for (k, i) in leg.iter().enumerate() {
                        phi[spec.index(*i, jb)] = Some(res[k]);
                    }
                }
                for i in p.i0..=p.i1 {
                    let st = states[i].unwrap();
                    let start = phi[spec.index(i, jb)].unwrap();
                    for leg in outward(p.j0, p.j1, jb) {
                        let ls: Vec<f64> = leg.iter().map(|j| l[*j]).collect();
                        let res = propagate(u2_at(st), &ls, start, tol, |s| (st.t, s))?;
                        for (k, j) in leg.iter().enumerate() {
                            phi[spec.index(i, *j)] = Some(res[k]);
                        }
                    }
                }
            }
            PathOrder::SpectralFirst => {
                let st = states[ib].unwrap();
                for leg in outward(p.j0, p.j1, jb) {
                    let ls: Vec<f64> = leg.iter().map(|j| l[*j]).collect();
                    let res = propagate(u2_at(st), &ls, Mat2::IDENTITY, tol, |s| (st.t, s))?;
                    for (k, j) in leg.iter().enumerate() {
                        phi[spec.index(ib, *j)] = Some(res[k]);
                    }
                }
                for j in p.j0..=p.j1 {
                    let start = phi[spec.index(ib, j)].unwrap();
                    let lam = l[j];
                    for leg in outward(p.i0, p.i1, ib) {
                        let ts: Vec<f64> = leg.iter().map(|i| t[*i]).collect();
                        let res = propagate(u1_at(lam), &ts, start, tol, |s| (s, lam))?;
                        for (k, i) in leg.iter().enumerate() {
                            phi[spec.index(*i, j)] = Some(res[k]);
                        }
                    }
                }
            }
        }
    }
    let _ = params;
    Ok(FrameGrid { spec: spec.clone(), t, lambda: l, patches, phi, states })
}

/// Tangent data at a node, before conjugation by Φ.
#[derive(Clone, Copy, Debug)]
pub struct TangentField {
    pub a: Mat2,
    pub b: Mat2,
    /// D_tA + [A, U¹]
    pub tt: Mat2,
    /// D_λA + [A, U²]
    pub tl: Mat2,
    /// D_tB + [B, U¹]
    pub lt: Mat2,
    /// D_λB + [B, U²]
    pub ll: Mat2,
    /// D_λA − D_tB + [A, U²] + [U¹, B]
    pub residual: Mat2,
    pub scale: f64,
}

impl From<&Deformation> for TangentField {
    fn from(d: &Deformation) -> Self {
        let s = d.second_derivatives();
        TangentField { a: d.a(), b: d.b(), tt: s.tt, tl: s.tl, lt: s.lt, ll: s.ll, residual: d.residual(), scale: d.scale() }
    }
}

/// On-shell point at node (i, j) of a grid, if kept.
fn node_point(spec: &GridSpec, kept: &[bool], host: &Host, t: &[f64], l: &[f64], i: usize, j: usize) -> Result<Option<LaxPoint>> {
    if !kept[spec.index(i, j)] {
        return Ok(None);
    }
    let st = host.state(t[i])?;
    Ok(Some(LaxPoint::on_shell(&host.params(), &st, l[j])?))
}

/// (A, B) of a symmetry at every kept node.
pub fn tangent_field(
    pair: &LaxPair,
    host: &Host,
    spec: &GridSpec,
    choice: &SymmetryChoice,
    r: Option<&RSolution>,
) -> Result<Vec<Option<TangentField>>> {
    let (t, l) = (spec.t_nodes(), spec.lambda_nodes());
    let params = host.params();
    let mut out = vec![None; spec.n_t * spec.n_lambda];
    let kept = spec.kept_mask();
    for i in 0..spec.n_t {
        if !(0..spec.n_lambda).any(|j| kept[spec.index(i, j)]) {
            continue;
        }
        let st = host.state(t[i])?;
        let rv = match (choice.alpha[5] != 0.0, r) {
            (true, Some(r)) => Some(r.value(&params, &st)?),
            (true, None) => return Err(Error::MissingRSolution),
            _ => None,
        };
        for j in 0..spec.n_lambda {
            if !kept[spec.index(i, j)] {
                continue;
            }
            let p = LaxPoint::on_shell(&params, &st, l[j])?;
            let d = build_ab(pair, choice, &p, rv.as_ref())?;
            out[spec.index(i, j)] = Some(TangentField::from(&d));
        }
    }
    Ok(out)
}

/// Constant, user-supplied (A, B) at every kept node.
pub fn constant_tangent_field(pair: &LaxPair, host: &Host, spec: &GridSpec, a: Mat2, b: Mat2) -> Result<Vec<Option<TangentField>>> {
    use crate::algebra::commutator;
    let (t, l) = (spec.t_nodes(), spec.lambda_nodes());
    let kept = spec.kept_mask();
    let mut out = vec![None; spec.n_t * spec.n_lambda];
    for i in 0..spec.n_t {
        for j in 0..spec.n_lambda {
            let Some(p) = node_point(spec, &kept, host, &t, &l, i, j)? else { continue };
            let u1 = pair.u1(&p)?;
            let u2 = pair.u2(&p)?;
            let scale = [a, b, u1, u2].iter().map(Mat2::max_abs).fold(1.0, f64::max);
            out[spec.index(i, j)] = Some(TangentField {
                a,
                b,
                tt: commutator(&a, &u1),
                tl: commutator(&a, &u2),
                lt: commutator(&b, &u1),
                ll: commutator(&b, &u2),
                residual: commutator(&a, &u2) + commutator(&u1, &b),
                scale,
            });
        }
    }
    Ok(out)
}

/// How surface coordinates are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    /// F = Φ⁻¹ S Φ, the immersion itself.
    Conjugated,
    /// S alone, the surface seen in the frame moving with Φ.
    MovingFrame,
}

#[derive(Clone, Copy, Debug)]
pub struct SurfaceNode {
    pub f: AlgebraVector,
    pub tangent: TangentField,
}

#[derive(Clone, Debug)]
pub struct SurfaceGrid {
    pub spec: GridSpec,
    pub t: Vec<f64>,
    pub lambda: Vec<f64>,
    pub nodes: Vec<Option<SurfaceNode>>,
    /// Richardson estimate of the quadrature error (zero for closed forms).
    pub error_estimate: f64,
    /// Loop integral of dF around each cell, where all four corners exist.
    pub circulation: Vec<Option<f64>>,
}

impl SurfaceGrid {
    pub fn node(&self, i: usize, j: usize) -> Option<&SurfaceNode> {
        self.nodes[self.spec.index(i, j)].as_ref()
    }

    pub fn max_circulation(&self) -> f64 {
        self.circulation.iter().flatten().fold(0.0, |a, b| a.max(*b))
    }
}

/// The gauge S with F = Φ⁻¹ S Φ for the α₁..α₅ terms.
fn closed_form_gauge(pair: &LaxPair, choice: &SymmetryChoice, p: &LaxPoint) -> Result<Mat2> {
    let [a1, a2, a3, a4, a5, a6] = choice.alpha;
    if a6 != 0.0 {
        return Err(Error::UnsupportedAlpha6);
    }
    let u1 = pair.u1(p)?;
    let u2 = pair.u2(p)?;
    let r = choice.r_weight.eval(p.t);
    let s = choice.s_weight.eval(p.lambda);
    let mut g = u1.scale(a1 * r + a3 * p.t) + u2.scale(a2 * s + a4 * p.lambda);
    if a5 != 0.0 {
        g += pair.partials(p)?.dt_u1.scale(a5);
    }
    Ok(g)
}

/// F = Φ⁻¹(α₁rU¹ + α₂sU² + α₃tU¹ + α₄λU² + α₅D_tU¹)Φ, or the bracket alone
/// for the moving-frame representation (then `frame` may be `None`).
pub fn immersion_closed_form(
    frame: Option<&FrameGrid>,
    pair: &LaxPair,
    host: &Host,
    spec: &GridSpec,
    choice: &SymmetryChoice,
) -> Result<SurfaceGrid> {
    choice.validate()?;
    if choice.alpha[5] != 0.0 {
        return Err(Error::UnsupportedAlpha6);
    }
    spec.validate()?;
    let (t, l) = (spec.t_nodes(), spec.lambda_nodes());
    if frame.is_none() {
        patch_states(pair, host, spec, &t, &l)?;
    }
    let field = tangent_field(pair, host, spec, choice, None)?;
    let kept = spec.kept_mask();
    let mut nodes = vec![None; field.len()];
    for i in 0..spec.n_t {
        for j in 0..spec.n_lambda {
            let k = spec.index(i, j);
            let Some(tangent) = field[k] else { continue };
            let p = node_point(spec, &kept, host, &t, &l, i, j)?.unwrap();
            let s = closed_form_gauge(pair, choice, &p)?;
            let m = match frame {
                Some(fr) => {
                    let phi = fr.phi(i, j).ok_or_else(|| Error::DomainError("frame missing a node".into()))?;
                    s.conjugate(phi, &phi.inverse()?)
                }
                None => s,
            };
            nodes[k] = Some(SurfaceNode { f: decompose(&m)?, tangent });
        }
    }
    Ok(SurfaceGrid {
        spec: spec.clone(),
        t,
        lambda: l,
        nodes,
        error_estimate: 0.0,
        circulation: vec![None; (spec.n_t - 1) * (spec.n_lambda - 1)],
    })
}

/// Conjugated tangent fields and their derivatives along t and λ.
struct Conj {
    ft: Mat2,
    dft: Mat2,
    fl: Mat2,
    dfl: Mat2,
}

/// Endpoint-corrected trapezoid ∫ f over one step of signed length h.
fn step(h: f64, f0: &Mat2, d0: &Mat2, f1: &Mat2, d1: &Mat2) -> Mat2 {
    (*f0 + *f1).scale(h / 2.0) - (*d1 - *d0).scale(h * h / 12.0)
}

/// Deformation residual allowed before the form is declared non-closed.
pub const RESIDUAL_BOUND: f64 = 1e-6;

/// Integrates dF = Φ⁻¹AΦ dt + Φ⁻¹BΦ dλ along the L-paths from each base.
pub fn immersion_quadrature(frame: &FrameGrid, field: &[Option<TangentField>]) -> Result<SurfaceGrid> {
    let spec = &frame.spec;
    let n = spec.n_t * spec.n_lambda;
    if field.len() != n {
        return Err(Error::DomainError("tangent field does not match the grid".into()));
    }
    let mut conj: Vec<Option<Conj>> = Vec::with_capacity(n);
    for k in 0..n {
        let (i, j) = (k / spec.n_lambda, k % spec.n_lambda);
        match (frame.phi(i, j), &field[k]) {
            (Some(phi), Some(tf)) => {
                let res = tf.residual.max_abs();
                if res > RESIDUAL_BOUND * tf.scale {
                    return Err(Error::NonClosedForm { measure: res, bound: RESIDUAL_BOUND * tf.scale });
                }
                let inv = phi.inverse()?;
                conj.push(Some(Conj {
                    ft: tf.a.conjugate(phi, &inv),
                    dft: tf.tt.conjugate(phi, &inv),
                    fl: tf.b.conjugate(phi, &inv),
                    dfl: tf.ll.conjugate(phi, &inv),
                }));
            }
            (None, None) => conj.push(None),
            _ => return Err(Error::DomainError("tangent field and frame disagree on kept nodes".into())),
        }
    }
    let c = |i: usize, j: usize| conj[spec.index(i, j)].as_ref().unwrap();
    let (t, l) = (&frame.t, &frame.lambda);
    let edge_t = |i: usize, j: usize| {
        let (a, b) = (c(i, j), c(i + 1, j));
        step(t[i + 1] - t[i], &a.ft, &a.dft, &b.ft, &b.dft)
    };
    let edge_l = |i: usize, j: usize| {
        let (a, b) = (c(i, j), c(i, j + 1));
        step(l[j + 1] - l[j], &a.fl, &a.dfl, &b.fl, &b.dfl)
    };
    let mut f: Vec<Option<Mat2>> = vec![None; n];
    let mut estimate: f64 = 0.0;
    // Richardson: the same rule with doubled steps along a leg
    let mut leg_estimate = |idx: &[usize], fine: &[Mat2], coarse_at: &dyn Fn(usize, usize) -> Mat2| {
        let m = (idx.len() - 1) / 2 * 2;
        if m >= 2 {
            let coarse = (0..m / 2).fold(Mat2::ZERO, |acc, q| acc + coarse_at(idx[2 * q], idx[2 * q + 2]));
            let diff = (fine[m] - fine[0]) - coarse;
            estimate = estimate.max(diff.max_abs() / 15.0);
        }
    };
    for p in &frame.patches {
        let (ib, jb) = p.base;
        f[spec.index(ib, jb)] = Some(Mat2::ZERO);
        for leg in outward(p.i0, p.i1, ib) {
            let mut acc = vec![Mat2::ZERO];
            for w in leg.windows(2) {
                let e = if w[1] > w[0] { edge_t(w[0], jb) } else { -edge_t(w[1], jb) };
                acc.push(*acc.last().unwrap() + e);
            }
            for (k, i) in leg.iter().enumerate() {
                f[spec.index(*i, jb)] = Some(acc[k]);
            }
            leg_estimate(&leg, &acc, &|a, b| {
                let (x, y) = (c(a, jb), c(b, jb));
                step(t[b] - t[a], &x.ft, &x.dft, &y.ft, &y.dft)
            });
        }
        for i in p.i0..=p.i1 {
            let start = f[spec.index(i, jb)].unwrap();
            for leg in outward(p.j0, p.j1, jb) {
                let mut acc = vec![start];
                for w in leg.windows(2) {
                    let e = if w[1] > w[0] { edge_l(i, w[0]) } else { -edge_l(i, w[1]) };
                    acc.push(*acc.last().unwrap() + e);
                }
                for (k, j) in leg.iter().enumerate() {
                    f[spec.index(i, *j)] = Some(acc[k]);
                }
                leg_estimate(&leg, &acc, &|a, b| {
                    let (x, y) = (c(i, a), c(i, b));
                    step(l[b] - l[a], &x.fl, &x.dfl, &y.fl, &y.dfl)
                });
            }
        }
    }
    let mut circulation = vec![None; (spec.n_t - 1) * (spec.n_lambda - 1)];
    let mut scale: f64 = 1.0;
    for v in f.iter().flatten() {
        scale = scale.max(v.max_abs());
    }
    let bound = 10.0 * estimate.max(1e-9 * scale);
    let mut worst: f64 = 0.0;
    for p in &frame.patches {
        for i in p.i0..p.i1 {
            for j in p.j0..p.j1 {
                let loop_sum = edge_t(i, j) + edge_l(i + 1, j) - edge_t(i, j + 1) - edge_l(i, j);
                let v = decompose(&loop_sum)?.max_abs();
                worst = worst.max(v);
                circulation[i * (spec.n_lambda - 1) + j] = Some(v);
            }
        }
    }
    if worst > bound {
        return Err(Error::NonClosedForm { measure: worst, bound });
    }
    let mut nodes = vec![None; n];
    for k in 0..n {
        if let (Some(m), Some(tf)) = (&f[k], &field[k]) {
            nodes[k] = Some(SurfaceNode { f: decompose(m)?, tangent: *tf });
        }
    }
    Ok(SurfaceGrid {
        spec: spec.clone(),
        t: t.clone(),
        lambda: l.clone(),
        nodes,
        error_estimate: estimate,
        circulation,
    })
}
