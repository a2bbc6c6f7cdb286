//! Self-checks run by `soliton verify`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{commutator, decompose, e1, e2, e3, killing, AlgebraVector, Mat2};
use crate::error::{Error, Result};
use crate::frame::{immersion_closed_form, immersion_quadrature, integrate_frame, tangent_field, GridSpec, PathOrder, TangentField};
use crate::geometry::{curvatures, fundamental_forms, normal};
use crate::laxpair::{LaxPair, LaxPoint};
use crate::ode::Tolerances;
use crate::painleve::{integrate, rational_p2, Host, PainleveParams, PainleveState, AIRY_SCALE};
use crate::special::airy;
use crate::symmetry::{build_ab, gauge_characteristics, solve_determining, PolynomialGauge, RSolution, RValue, SymmetryChoice};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Zcc,
    Symmetry,
    Frame,
    Geometry,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "algebra" => Suite::Algebra,
            "zcc" => Suite::Zcc,
            "symmetry" => Suite::Symmetry,
            "frame" => Suite::Frame,
            "geometry" => Suite::Geometry,
            "all" => Suite::All,
            _ => return Err(Error::Parse(format!("unknown suite {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
}

impl Check {
    fn new(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Check { name: name.into(), measured, bound }
    }

    pub fn passed(&self) -> bool {
        self.measured <= self.bound
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{} {:.3e} {:.3e} {verdict}", self.name, self.measured, self.bound)
    }
}

/// A failed computation counts as an infinitely bad measurement.
fn measure<F: FnOnce() -> Result<f64>>(name: &str, bound: f64, f: F) -> Check {
    let v = f().unwrap_or(f64::INFINITY);
    Check::new(name, if v.is_nan() { f64::INFINITY } else { v }, bound)
}

pub fn run(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Algebra => algebra_checks(),
        Suite::Zcc => zcc_checks(),
        Suite::Symmetry => symmetry_checks(),
        Suite::Frame => frame_checks(),
        Suite::Geometry => geometry_checks(),
        Suite::All => [algebra_checks(), zcc_checks(), symmetry_checks(), frame_checks(), geometry_checks()].concat(),
    }
}

fn random_traceless(rng: &mut ChaCha8Rng) -> Mat2 {
    AlgebraVector::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)).reconstruct()
}

fn algebra_checks() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let basis = [e1(), e2(), e3()];
    let metric = [1.0, 1.0, -1.0];
    let mut out = vec![measure("algebra.killing_basis", 1e-15, || {
        let mut worst: f64 = 0.0;
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate() {
                let want = if i == j { metric[i] } else { 0.0 };
                worst = worst.max((killing(x, y)? - want).abs());
            }
        }
        Ok(worst)
    })];
    out.push(measure("algebra.commutator_basis", 1e-15, || {
        Ok((commutator(&e1(), &e2()) + e3().scale(2.0)).max_abs() + (commutator(&e2(), &e3()) - e1().scale(2.0)).max_abs())
    }));
    let triples: Vec<[Mat2; 3]> = (0..200).map(|_| [0; 3].map(|_| random_traceless(&mut rng))).collect();
    out.push(measure("algebra.jacobi", 1e-12, || {
        Ok(triples
            .iter()
            .map(|[x, y, z]| {
                let s = commutator(x, &commutator(y, z)) + commutator(y, &commutator(z, x)) + commutator(z, &commutator(x, y));
                s.max_abs() / (x.max_abs() * y.max_abs() * z.max_abs()).max(1.0)
            })
            .fold(0.0, f64::max))
    }));
    out.push(measure("algebra.ad_invariance", 1e-12, || {
        let mut worst: f64 = 0.0;
        for [x, y, z] in &triples {
            let v = killing(&commutator(z, x), y)? + killing(x, &commutator(z, y))?;
            worst = worst.max(v.abs() / (x.max_abs() * y.max_abs() * z.max_abs()).max(1.0));
        }
        Ok(worst)
    }));
    out.push(measure("algebra.killing_components", 1e-12, || {
        let mut worst: f64 = 0.0;
        for [x, y, _] in &triples {
            let v = killing(x, y)? - decompose(x)?.killing_dot(&decompose(y)?);
            worst = worst.max(v.abs());
        }
        Ok(worst)
    }));
    out.push(measure("algebra.conjugation_invariance", 1e-10, || {
        let mut worst: f64 = 0.0;
        for [x, y, z] in &triples {
            let (a, b, c) = (z.a11.re, z.a12.re, z.a21.re);
            if a.abs() < 0.1 {
                continue;
            }
            let g = Mat2::real(a, b, c, (1.0 + b * c) / a);
            let gi = g.inverse()?;
            let v = killing(&x.conjugate(&g, &gi), &y.conjugate(&g, &gi))? - killing(x, y)?;
            worst = worst.max(v.abs() / killing(x, x)?.abs().max(killing(y, y)?.abs()).max(1.0));
        }
        Ok(worst)
    }));
    out
}

/// Off-shell point with independent x_tt.
fn random_point(rng: &mut ChaCha8Rng, pair: &LaxPair) -> LaxPoint {
    loop {
        let mut v = [0.0; 5];
        for c in v.iter_mut() {
            *c = rng.gen_range(-2.0..2.0);
        }
        let p = LaxPoint::new(v[0], v[1], v[2], v[3], v[4]);
        let away = [p.t, p.lambda, p.x].iter().all(|c| c.abs() > 0.05);
        if pair.check(&p).is_ok() && away {
            return p;
        }
    }
}

fn on_shell_points(params: &PainleveParams, n: usize, seed: u64) -> Vec<LaxPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pair = LaxPair::new(*params).expect("real Lax pair");
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let st = PainleveState::new(rng.gen_range(0.3..2.0), rng.gen_range(0.3..1.5), rng.gen_range(-1.0..1.0));
        let lam = rng.gen_range(0.3..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let Ok(p) = LaxPoint::on_shell(params, &st, lam) else { continue };
        let (g, d) = pair.p3_coefficients();
        if pair.check(&p).is_ok() && (lam * lam + g * d).abs() > 0.1 {
            out.push(p);
        }
    }
    out
}

fn zcc_checks() -> Vec<Check> {
    let mut out = vec![measure("zcc.p1_factorization", 1e-10, || {
        let pair = LaxPair::new(PainleveParams::p1())?;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let p = random_point(&mut rng, &pair);
            let want = e1().scale(p.x_tt - 6.0 * p.x * p.x - p.t);
            worst = worst.max((pair.zcc_residual(&p)? - want).max_abs());
        }
        Ok(worst)
    })];
    out.push(measure("zcc.p3_factorization", 1e-9, || {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let params = PainleveParams::p3(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(-1.0..0.0));
            let pair = LaxPair::new(params)?;
            let p = random_point(&mut rng, &pair);
            let (g, d) = pair.p3_coefficients();
            if (p.lambda * p.lambda + g * d).abs() < 0.05 {
                continue;
            }
            let m = pair.structure_matrix(&p)?.expect("P3 has a structure matrix");
            let want = m.scale(pair.equation_residual(&p));
            let got = pair.zcc_residual(&p)?;
            worst = worst.max((got - want).max_abs() / want.max_abs().max(1.0));
        }
        Ok(worst)
    }));
    out.push(measure("zcc.p2_on_shell", 1e-10, || {
        let params = PainleveParams::p2(0.7);
        let pair = LaxPair::new(params)?;
        let mut worst: f64 = 0.0;
        for p in on_shell_points(&params, 1000, 4) {
            let scale = pair.u1(&p)?.max_abs().max(pair.u2(&p)?.max_abs()).max(1.0);
            worst = worst.max(pair.zcc_residual(&p)?.max_abs() / scale);
        }
        Ok(worst)
    }));
    out
}

fn test_params() -> [PainleveParams; 3] {
    [PainleveParams::p1(), PainleveParams::p2(0.7), PainleveParams::p3(0.4, -0.5, 1.0, -1.0)]
}

fn symmetry_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let r = RValue { r: 0.3, r_t: -0.8 };
    for params in test_params() {
        for k in 1..=6 {
            out.push(measure(&format!("symmetry.alpha{k}_{}", params.equation), 1e-8, || {
                let pair = LaxPair::new(params)?;
                let mut worst: f64 = 0.0;
                for p in on_shell_points(&params, 20, 5) {
                    let d = build_ab(&pair, &SymmetryChoice::single(k), &p, Some(&r))?;
                    worst = worst.max(d.residual().max_abs() / d.scale());
                }
                Ok(worst)
            }));
        }
        out.push(measure(&format!("symmetry.combinations_{}", params.equation), 1e-8, || {
            let pair = LaxPair::new(params)?;
            let mut rng = ChaCha8Rng::seed_from_u64(6);
            let mut worst: f64 = 0.0;
            for p in on_shell_points(&params, 100, 7) {
                let mut alpha = [0.0; 6];
                for a in alpha.iter_mut().take(5) {
                    *a = rng.gen_range(-1.0..1.0);
                }
                let d = build_ab(&pair, &SymmetryChoice::new(alpha), &p, None)?;
                worst = worst.max(d.residual().max_abs() / d.scale());
            }
            Ok(worst)
        }));
        out.push(measure(&format!("symmetry.gauges_{}", params.equation), 1e-8, || {
            let pair = LaxPair::new(params)?;
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            let mut worst: f64 = 0.0;
            for p in on_shell_points(&params, 100, 9) {
                let mut coeffs = [[0.0; 15]; 3];
                for c in coeffs.iter_mut().flatten() {
                    *c = rng.gen_range(-1.0..1.0);
                }
                let d = gauge_characteristics(&PolynomialGauge { coeffs }, &pair, &p)?;
                worst = worst.max(d.residual().max_abs() / d.scale());
            }
            Ok(worst)
        }));
    }
    out.push(measure("symmetry.bessel_r", 1e-8, || {
        let host = Host::Rational(1);
        let params = host.params();
        let grid: Vec<f64> = (0..=40).map(|k| 1.0 + 0.05 * k as f64).collect();
        let exact = RSolution::BesselAlpha1;
        let r0 = exact.value(&params, &host.state(1.0)?)?;
        let num = solve_determining(&host, &grid, r0.r, r0.r_t, Tolerances::uniform(1e-12))?;
        let mut worst: f64 = 0.0;
        for t in grid {
            let st = host.state(t)?;
            let (a, b) = (exact.value(&params, &st)?, num.value(&params, &st)?);
            worst = worst.max((a.r - b.r).abs() / a.r.abs().max(1.0));
        }
        Ok(worst)
    }));
    out.push(measure("symmetry.airy_r_relation", 1e-10, || {
        let mut worst: f64 = 0.0;
        for eps in [1.0, -1.0] {
            let host = Host::Airy(eps);
            let params = host.params();
            for k in 0..=30 {
                let t = -1.0 + 0.1 * k as f64;
                let st = host.state(t)?;
                let (ai, aip) = airy(-AIRY_SCALE * t)?;
                let r_t = 2.0 * AIRY_SCALE * aip / ai.powi(3);
                let r = RSolution::AiryEps(eps).value(&params, &st)?;
                worst = worst.max((r_t - 2.0 * eps * st.x * r.r).abs() / r.r.abs().max(1.0));
            }
        }
        Ok(worst)
    }));
    out
}

fn p1_host(t_end: f64) -> Result<Host> {
    let fw = integrate(&PainleveParams::p1(), PainleveState::new(0.0, 0.1, 0.0), t_end, Tolerances::default())?;
    Ok(Host::Numeric(fw))
}

fn frame_checks() -> Vec<Check> {
    let spec = GridSpec::new((0.0, 1.0, 30), (-0.5, 0.5, 30), (0.5, 0.0));
    let setup = || -> Result<_> {
        let host = p1_host(1.1)?;
        let pair = LaxPair::new(host.params())?;
        let a = integrate_frame(&pair, &host, &spec, Tolerances::default(), PathOrder::TimeFirst)?;
        Ok((host, pair, a))
    };
    let Ok((host, pair, fr)) = setup() else {
        return vec![Check::new("frame.setup", f64::INFINITY, 0.0)];
    };
    let nodes = || (0..spec.n_t).flat_map(|i| (0..spec.n_lambda).map(move |j| (i, j)));
    let mut out = vec![Check::new("frame.det_drift", fr.max_det_drift(), 1e-8)];
    out.push(measure("frame.path_transposition", 1e-6, || {
        let b = integrate_frame(&pair, &host, &spec, Tolerances::default(), PathOrder::SpectralFirst)?;
        Ok(nodes().map(|(i, j)| (*fr.phi(i, j).unwrap() - *b.phi(i, j).unwrap()).max_abs()).fold(0.0, f64::max))
    }));
    let choice = SymmetryChoice::single(1);
    let quad = tangent_field(&pair, &host, &spec, &choice, None).and_then(|f| immersion_quadrature(&fr, &f));
    out.push(measure("frame.quadrature_vs_closed_form", 1e-6, || {
        let q = quad.clone()?;
        let cf = immersion_closed_form(Some(&fr), &pair, &host, &spec, &choice)?;
        let (ib, jb) = fr.patches[0].base;
        let off = cf.node(ib, jb).unwrap().f;
        Ok(nodes()
            .map(|(i, j)| (q.node(i, j).unwrap().f - (cf.node(i, j).unwrap().f - off)).max_abs())
            .fold(0.0, f64::max))
    }));
    out.push(measure("frame.plaquette_circulation", 1e-8, || Ok(quad.clone()?.max_circulation())));
    out
}

fn tangent(params: &PainleveParams, choice: &SymmetryChoice, p: &LaxPoint) -> Result<TangentField> {
    let pair = LaxPair::new(*params)?;
    Ok(TangentField::from(&build_ab(&pair, choice, p, None)?))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn geometry_checks() -> Vec<Check> {
    let p1 = PainleveParams::p1();
    let pts = on_shell_points(&p1, 200, 10);
    let mut out = vec![measure("geometry.p1_f2_gaussian", 1e-6, || {
        let mut worst: f64 = 0.0;
        for p in &pts {
            let (k, _) = curvatures(&fundamental_forms(&tangent(&p1, &SymmetryChoice::single(2), p)?)?)?;
            worst = worst.max(rel(k, 2.0 * p.x_tt));
        }
        Ok(worst)
    })];
    out.push(measure("geometry.p1_f2_mean", 1e-6, || {
        let mut worst: f64 = 0.0;
        for p in &pts {
            let (_, h) = curvatures(&fundamental_forms(&tangent(&p1, &SymmetryChoice::single(2), p)?)?)?;
            worst = worst.max(rel(h, 2.0 * (2.0 * p.x + p.lambda)));
        }
        Ok(worst)
    }));
    out.push(measure("geometry.p1_f1_isotropy", 1e-12, || {
        let mut worst: f64 = 0.0;
        for p in &pts {
            let tf = tangent(&p1, &SymmetryChoice::single(1), p)?;
            worst = worst.max(killing(&tf.a, &tf.a)?.abs());
        }
        Ok(worst)
    }));
    out.push(measure("geometry.p1_f5_degenerate", 1e-9, || {
        let mut worst: f64 = 0.0;
        for p in &pts {
            let tf = tangent(&p1, &SymmetryChoice::single(5), p)?;
            normal(&tf.a, &tf.b)?;
            let f = fundamental_forms(&tf)?;
            worst = worst.max(f.det_g.abs() / f.scale().powi(2));
        }
        Ok(worst)
    }));
    out.push(measure("geometry.p2_f2_det", 1e-8, || {
        let params = PainleveParams::p2(1.0);
        let mut worst: f64 = 0.0;
        for k in 0..50 {
            let t = 0.5 + 0.05 * k as f64;
            let st = rational_p2(1, t)?;
            let lam = 0.3 + 0.04 * k as f64;
            let p = LaxPoint::on_shell(&params, &st, lam)?;
            let f = fundamental_forms(&tangent(&params, &SymmetryChoice::single(2), &p)?)?;
            let want = (1.0 / (lam * lam) + 4.0 * st.x).powi(2);
            worst = worst.max((f.det_g - want).abs() / f.scale().powi(2).max(1.0));
        }
        Ok(worst)
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes() {
        for suite in [Suite::Algebra, Suite::Zcc, Suite::Symmetry, Suite::Frame, Suite::Geometry] {
            for c in run(suite) {
                assert!(c.passed(), "{c}");
            }
        }
    }

    #[test]
    fn report_lines() {
        assert_eq!(Check::new("x", 1.0, 2.0).to_string(), "x 1.000e0 2.000e0 PASS");
        assert!(!Check::new("x", f64::INFINITY, 2.0).passed());
        assert_eq!("zcc".parse::<Suite>().unwrap(), Suite::Zcc);
        assert!("nope".parse::<Suite>().is_err());
    }
}
