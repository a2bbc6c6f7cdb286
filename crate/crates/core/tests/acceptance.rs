//! Acceptance criteria. Each test prints one line:
//! `criterion <n> <name>: PASS|FAIL measured=<v> bound=<b>`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soliton_core::algebra::{e1, killing, Mat2};
use soliton_core::frame::{
    immersion_closed_form, immersion_quadrature, integrate_frame, tangent_field, GridSpec, PathOrder, SurfaceGrid,
    TangentField,
};
use soliton_core::geometry::{curvatures, fundamental_forms, tangent_at, tangent_rank, umbilic_locus, CurvatureField, NodeGeometry};
use soliton_core::ode::Tolerances;
use soliton_core::painleve::{airy_p2, derivatives, integrate, AIRY_SCALE};
use soliton_core::special::airy;
use soliton_core::symmetry::{
    build_ab, determining_residual, gauge_characteristics, p3_point_symmetry, P3Symmetry, PolynomialGauge, RSolution,
    RValue, SymmetryChoice,
};
use soliton_core::{Host, LaxPair, LaxPoint, PainleveParams, PainleveState};

fn verdict(n: &str, name: &str, measured: f64, bound: f64) {
    let ok = measured <= bound;
    println!(
        "criterion {n} {name}: {} measured={measured:.3e} bound={bound:.3e}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} {name}: measured {measured:e} exceeds {bound:e}");
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent (t, λ, x, x_t, x_tt) in [-2, 2]⁵, kept away from the pair's
/// singular set.
fn random_point(r: &mut ChaCha8Rng, pair: &LaxPair) -> LaxPoint {
    loop {
        let v: [f64; 5] = [0; 5].map(|_| r.gen_range(-2.0..2.0));
        let p = LaxPoint::new(v[0], v[1], v[2], v[3], v[4]);
        let (g, d) = pair.p3_coefficients();
        let clear = [p.t, p.lambda, p.x, p.lambda * p.lambda + g * d].iter().all(|c| c.abs() > 0.05);
        if clear && pair.check(&p).is_ok() {
            return p;
        }
    }
}

fn on_shell(params: &PainleveParams, r: &mut ChaCha8Rng, n: usize) -> Vec<LaxPoint> {
    let pair = LaxPair::new(*params).unwrap();
    let mut out = Vec::new();
    while out.len() < n {
        let st = PainleveState::new(r.gen_range(0.3..2.0), r.gen_range(0.3..1.5), r.gen_range(-1.0..1.0));
        let lam = r.gen_range(0.3..2.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        let Ok(p) = LaxPoint::on_shell(params, &st, lam) else { continue };
        let (g, d) = pair.p3_coefficients();
        if pair.check(&p).is_ok() && (lam * lam + g * d).abs() > 0.1 {
            out.push(p);
        }
    }
    out
}

fn p1_host(t0: f64, x0: f64, t_end: f64) -> Host {
    p1_host_with_slope(t0, x0, 0.0, t_end)
}

fn p1_host_with_slope(t0: f64, x0: f64, xt0: f64, t_end: f64) -> Host {
    let fw = integrate(&PainleveParams::p1(), PainleveState::new(t0, x0, xt0), t_end, Tolerances::default()).unwrap();
    Host::Numeric(fw)
}

fn kept(spec: &GridSpec) -> Vec<(usize, usize)> {
    (0..spec.n_t)
        .flat_map(|i| (0..spec.n_lambda).map(move |j| (i, j)))
        .filter(|(i, j)| spec.is_kept(*i, *j))
        .collect()
}

#[test]
fn criterion_01_p1_factorization() {
    let pair = LaxPair::new(PainleveParams::p1()).unwrap();
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_point(&mut r, &pair);
        let want = e1().scale(p.x_tt - 6.0 * p.x * p.x - p.t);
        worst = worst.max((pair.zcc_residual(&p).unwrap() - want).max_abs());
    }
    verdict("1", "P1 zero-curvature factorization", worst, 1e-10);
}

fn p3_factorization(canonical: bool, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (al, be) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        let pair = if canonical {
            let params = PainleveParams::p3(al, be, r.gen_range(0.0..1.0), r.gen_range(-1.0..0.0));
            LaxPair::new(params).unwrap()
        } else {
            // the pair and structure matrix as displayed, with γ and δ
            // entering where the real pair has √γ and -√(-δ)
            let (ga, de) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            LaxPair::p3_with_coefficients(PainleveParams::p3(al, be, ga, de), ga, de).unwrap()
        };
        let p = random_point(&mut r, &pair);
        let m = pair.structure_matrix(&p).unwrap().unwrap();
        let want = m.scale(pair.equation_residual(&p));
        let got = pair.zcc_residual(&p).unwrap();
        worst = worst.max((got - want).max_abs() / want.max_abs().max(1.0));
    }
    worst
}

#[test]
fn criterion_02_p3_factorization() {
    verdict("2", "P3 factorization, displayed pair, (alpha,beta,gamma,delta) in [-1,1]^4", p3_factorization(false, 2), 1e-9);
}

#[test]
fn criterion_02b_p3_factorization_real_pair() {
    verdict("2b", "P3 factorization, real pair, gamma in [0,1], delta in [-1,0]", p3_factorization(true, 2), 1e-9);
}

#[test]
fn criterion_03_p2_on_shell() {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let params = PainleveParams::p2(r.gen_range(-1.0..1.0));
        let pair = LaxPair::new(params).unwrap();
        let q = random_point(&mut r, &pair);
        let p = LaxPoint::on_shell(&params, &q.state(), q.lambda).unwrap();
        worst = worst.max(pair.zcc_residual(&p).unwrap().max_abs());
    }
    verdict("3", "P2 on-shell zero curvature", worst, 1e-10);
}

#[test]
fn criterion_04_deformations() {
    let all = [PainleveParams::p1(), PainleveParams::p2(0.7), PainleveParams::p3(0.4, -0.5, 1.0, -1.0)];
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for params in all {
        let pair = LaxPair::new(params).unwrap();
        for p in on_shell(&params, &mut r, 20) {
            for k in 1..=5 {
                let d = build_ab(&pair, &SymmetryChoice::single(k), &p, None).unwrap();
                worst = worst.max(d.residual().max_abs() / d.scale());
            }
        }
        let pts = on_shell(&params, &mut r, 100);
        for p in &pts {
            let mut alpha = [0.0; 6];
            for a in alpha.iter_mut().take(5) {
                *a = r.gen_range(-1.0..1.0);
            }
            let d = build_ab(&pair, &SymmetryChoice::new(alpha), p, None).unwrap();
            worst = worst.max(d.residual().max_abs() / d.scale());
        }
        for p in &pts {
            let mut coeffs = [[0.0; 15]; 3];
            for c in coeffs.iter_mut().flatten() {
                *c = r.gen_range(-1.0..1.0);
            }
            let d = gauge_characteristics(&PolynomialGauge { coeffs }, &pair, p).unwrap();
            worst = worst.max(d.residual().max_abs() / d.scale());
        }
    }
    verdict("4", "deformation residual of symmetry and gauge pairs", worst, 1e-8);
}

fn closed_surface(host: &Host, spec: &GridSpec, k: usize) -> SurfaceGrid {
    let pair = LaxPair::new(host.params()).unwrap();
    let fr = integrate_frame(&pair, host, spec, Tolerances::default(), PathOrder::TimeFirst).unwrap();
    immersion_closed_form(Some(&fr), &pair, host, spec, &SymmetryChoice::single(k)).unwrap()
}

#[test]
fn criterion_05_p1_f2_curvatures() {
    let host = p1_host(0.0, 0.1, 1.1);
    let spec = GridSpec::new((0.0, 1.0, 50), (-1.0, 1.0, 50), (0.5, 0.0));
    let field = CurvatureField::from_surface(&closed_surface(&host, &spec, 2)).unwrap();
    let (mut wk, mut wh): (f64, f64) = (0.0, 0.0);
    for (i, j) in kept(&spec) {
        let g = field.node(i, j).unwrap();
        let (t, l) = (field.t[i], field.lambda[j]);
        let x = host.state(t).unwrap().x;
        let (k, h) = (g.k.unwrap(), g.h.unwrap());
        wk = wk.max((k - 2.0 * (6.0 * x * x + t)).abs() / k.abs().max(1.0));
        wh = wh.max((h - 2.0 * (2.0 * x + l)).abs() / h.abs().max(1.0));
    }
    verdict("5", "P1 F2 curvature regression", wk.max(wh), 1e-6);
}

#[test]
fn criterion_06_p2_f2_metric() {
    let host = Host::Rational(1);
    let pair = LaxPair::new(host.params()).unwrap();
    let spec = GridSpec::new((0.5, 3.0, 50), (0.2, 2.0, 50), (1.0, 1.0));
    let field = tangent_field(&pair, &host, &spec, &SymmetryChoice::single(2), None).unwrap();
    let geo = CurvatureField::from_tangents(&spec, &field).unwrap();
    let mut worst: f64 = 0.0;
    for (i, j) in kept(&spec) {
        let f = geo.node(i, j).unwrap().forms;
        let (x, l) = (host.state(geo.t[i]).unwrap().x, geo.lambda[j]);
        let want = (1.0 / (l * l) + 4.0 * x).powi(2);
        worst = worst.max((f.det_g - want).abs() / f.scale().powi(2));
    }
    verdict("6", "P2 F2 metric determinant", worst, 1e-8);
}

#[test]
fn criterion_07_p1_f1_isotropy() {
    let host = p1_host(0.0, 0.1, 1.1);
    let pair = LaxPair::new(host.params()).unwrap();
    let spec = GridSpec::new((0.0, 1.0, 50), (-1.0, 1.0, 50), (0.5, 0.0));
    let mut worst: f64 = 0.0;
    for (i, j) in kept(&spec) {
        let (t, l) = (spec.t_nodes()[i], spec.lambda_nodes()[j]);
        let p = LaxPoint::on_shell(&host.params(), &host.state(t).unwrap(), l).unwrap();
        let a = pair.partials(&p).unwrap().dt_u1;
        worst = worst.max(killing(&a, &a).unwrap().abs());
    }
    verdict("7", "P1 F1 isotropic t-tangent", worst, 1e-12);
}

fn degeneracy(host: &Host, spec: &GridSpec, choice: &SymmetryChoice, r: Option<&RSolution>) -> f64 {
    let pair = LaxPair::new(host.params()).unwrap();
    let field = tangent_field(&pair, host, spec, choice, r).unwrap();
    let mut worst: f64 = 0.0;
    for tf in field.iter().flatten() {
        assert_eq!(tangent_rank(&tf.a, &tf.b).unwrap(), 2);
        let f = fundamental_forms(tf).unwrap();
        worst = worst.max(f.det_g.abs() / f.scale().powi(2));
    }
    worst
}

fn p3_host(params: PainleveParams) -> Host {
    let fw = integrate(&params, PainleveState::new(1.0, 1.0, 0.0), 2.0, Tolerances::default()).unwrap();
    assert!(fw.pole_flag().is_none());
    Host::Numeric(fw)
}

#[test]
fn criterion_08_degenerate_metrics() {
    let mut worst: f64 = 0.0;
    let p1 = p1_host_with_slope(0.0, 0.1, 0.5, 1.1);
    worst = worst.max(degeneracy(&p1, &GridSpec::new((0.0, 1.0, 20), (-1.0, 1.0, 20), (0.0, 0.0)), &SymmetryChoice::single(5), None));
    for eps in [1.0, -1.0] {
        let airy = Host::Airy(eps);
        let spec = GridSpec::new((-1.0, 2.0, 20), (0.2, 2.0, 20), (0.0, 1.0));
        worst = worst.max(degeneracy(&airy, &spec, &SymmetryChoice::single(1), None));
        worst = worst.max(degeneracy(&airy, &spec, &SymmetryChoice::single(6), Some(&RSolution::AiryEps(eps))));
    }
    let spec = GridSpec::new((1.0, 2.0, 20), (0.3, 2.0, 20), (1.0, 1.0));
    let r1 = p3_host(PainleveParams::p3(0.7, 0.0, 1.0, 0.0));
    worst = worst.max(degeneracy(&r1, &spec, &SymmetryChoice::single(6), Some(&RSolution::P3ScaleR1)));
    let r2 = p3_host(PainleveParams::p3(0.0, 0.5, 0.0, -1.0));
    worst = worst.max(degeneracy(&r2, &spec, &SymmetryChoice::single(6), Some(&RSolution::P3ScaleR2)));
    verdict("8", "degenerate metrics with rank-2 tangents", worst, 1e-9);
}

#[test]
fn criterion_09_wave_function() {
    let host = p1_host(0.0, 0.1, 1.1);
    let pair = LaxPair::new(host.params()).unwrap();
    let spec = GridSpec::new((0.0, 1.0, 50), (-1.0, 1.0, 50), (0.5, 0.0));
    let a = integrate_frame(&pair, &host, &spec, Tolerances::default(), PathOrder::TimeFirst).unwrap();
    let b = integrate_frame(&pair, &host, &spec, Tolerances::default(), PathOrder::SpectralFirst).unwrap();
    let path = kept(&spec)
        .into_iter()
        .map(|(i, j)| (*a.phi(i, j).unwrap() - *b.phi(i, j).unwrap()).max_abs())
        .fold(0.0, f64::max);
    let det = a.max_det_drift();
    println!("criterion 9 det drift {det:.3e} (bound 1e-8), path transposition {path:.3e} (bound 1e-6)");
    verdict("9", "wave function unimodular and path independent", (det / 1e-8).max(path / 1e-6), 1.0);
}

#[test]
fn criterion_10_quadrature_vs_closed_form() {
    let host = p1_host(0.0, 0.1, 1.1);
    let pair = LaxPair::new(host.params()).unwrap();
    let spec = GridSpec::new((0.0, 1.0, 50), (-0.5, 0.5, 50), (0.5, 0.0));
    let fr = integrate_frame(&pair, &host, &spec, Tolerances::default(), PathOrder::TimeFirst).unwrap();
    let choice = SymmetryChoice::single(1);
    let cf = immersion_closed_form(Some(&fr), &pair, &host, &spec, &choice).unwrap();
    let field = tangent_field(&pair, &host, &spec, &choice, None).unwrap();
    let q = immersion_quadrature(&fr, &field).unwrap();
    let (ib, jb) = fr.patches[0].base;
    let offset = cf.node(ib, jb).unwrap().f;
    let diff = kept(&spec)
        .into_iter()
        .map(|(i, j)| (q.node(i, j).unwrap().f - (cf.node(i, j).unwrap().f - offset)).max_abs())
        .fold(0.0, f64::max);
    let circ = q.max_circulation();
    println!("criterion 10 agreement {diff:.3e} (bound 1e-6), circulation {circ:.3e} (bound 1e-8)");
    verdict("10", "quadrature agrees with closed form and is closed", (diff / 1e-6).max(circ / 1e-8), 1.0);
}

/// Central 5-point derivative.
fn d5<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> f64 {
    (f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h)
}

#[test]
fn criterion_11_special_solutions() {
    // rational α = 1: x = 1/t
    let fw = integrate(&PainleveParams::p2(1.0), PainleveState::new(1.0, 1.0, -1.0), 3.0, Tolerances::default()).unwrap();
    let rational = fw.samples().iter().map(|s| (s.x - 1.0 / s.t).abs()).fold(0.0, f64::max);
    let mut first_integral: f64 = 0.0;
    let mut relation: f64 = 0.0;
    for eps in [1.0, -1.0] {
        for k in 0..=60 {
            let t = -1.0 + 0.05 * k as f64;
            let s = airy_p2(eps, t).unwrap();
            first_integral = first_integral.max((s.x_t - (eps * s.x * s.x + eps * t / 2.0)).abs());
            let (ai, aip) = airy(-AIRY_SCALE * t).unwrap();
            let r = 1.0 / (ai * ai);
            let r_t = 2.0 * AIRY_SCALE * aip / ai.powi(3);
            relation = relation.max((r_t - 2.0 * eps * s.x * r).abs() / r.max(1.0));
        }
    }
    let host = Host::Rational(1);
    let params = host.params();
    let bessel = RSolution::BesselAlpha1;
    let mut det: f64 = 0.0;
    for k in 0..=40 {
        let t = 1.0 + 0.05 * k as f64;
        let st = host.state(t).unwrap();
        let rv = bessel.value(&params, &st).unwrap();
        let r_tt = d5(|s| bessel.value(&params, &host.state(s).unwrap()).unwrap().r_t, t, 1e-3);
        det = det.max(determining_residual(&params, &st, &rv, r_tt).abs() / rv.r.abs().max(1.0));
    }
    println!(
        "criterion 11 rational {rational:.3e} (1e-8), first integral {first_integral:.3e} (1e-10), Bessel {det:.3e} (1e-8), Airy R {relation:.3e} (1e-10)"
    );
    let m = (rational / 1e-8).max(first_integral / 1e-10).max(det / 1e-8).max(relation / 1e-10);
    verdict("11", "special-solution residuals", m, 1.0);
}

#[test]
fn criterion_12_umbilic_curve() {
    let host = p1_host(0.0, 0.1, 1.1);
    let pair = LaxPair::new(host.params()).unwrap();
    let choice = SymmetryChoice::single(2);
    let measure = |t: f64, l: f64| {
        let tf = tangent_at(&pair, &host, &choice, None, t, l).ok()?;
        NodeGeometry::from_tangent(&tf).ok()?.umbilic_measure()
    };
    let spec = GridSpec::new((0.2, 1.0, 41), (-2.0, 2.0, 81), (0.5, 0.0));
    let field = tangent_field(&pair, &host, &spec, &choice, None).unwrap();
    let found = umbilic_locus(&CurvatureField::from_tangents(&spec, &field).unwrap(), measure);
    let (ht, hl) = (spec.h_t(), spec.h_lambda());
    let mut worst: f64 = 0.0;
    let mut hits = 0;
    for k in 0..20 {
        let t = 0.25 + 0.7 * k as f64 / 19.0;
        let st = host.state(t).unwrap();
        let xtt = 6.0 * st.x * st.x + t;
        assert!(xtt > 0.0);
        let l = -2.0 * st.x + (xtt / 2.0).sqrt();
        worst = worst.max(measure(t, l).unwrap().abs());
        if found.iter().any(|(a, b)| (a - t).abs() <= ht && (b - l).abs() <= hl) {
            hits += 1;
        }
    }
    // x_tt < 0 for t < -6x²
    let neg = p1_host(-2.5, 0.1, -2.2);
    let neg_pair = LaxPair::new(neg.params()).unwrap();
    let neg_spec = GridSpec::new((-2.5, -2.2, 21), (-3.0, 3.0, 41), (-2.4, 0.0));
    let neg_field = tangent_field(&neg_pair, &neg, &neg_spec, &choice, None).unwrap();
    let neg_measure = |t: f64, l: f64| {
        let tf = tangent_at(&neg_pair, &neg, &choice, None, t, l).ok()?;
        NodeGeometry::from_tangent(&tf).ok()?.umbilic_measure()
    };
    let neg_found = umbilic_locus(&CurvatureField::from_tangents(&neg_spec, &neg_field).unwrap(), neg_measure);
    println!("criterion 12 |H^2-K| on curve {worst:.3e} (1e-6), recovered {hits}/20 (>= 18), umbilics where x_tt < 0: {}", neg_found.len());
    let ok = worst < 1e-6 && hits >= 18 && neg_found.is_empty();
    verdict("12", "umbilic curve of P1 F2", if ok { 0.0 } else { 1.0 }, 0.0);
}

#[test]
fn criterion_13_parabolic_line() {
    let host = p1_host_with_slope(0.0, 0.1, 0.5, 1.1);
    let pair = LaxPair::new(host.params()).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..=50 {
        let t = 0.02 * k as f64;
        let x = host.state(t).unwrap().x;
        let tf = tangent_at(&pair, &host, &SymmetryChoice::single(1), None, t, x).unwrap();
        let f = fundamental_forms(&tf).unwrap();
        let (kk, _) = curvatures(&f).unwrap();
        worst = worst.max(kk.abs() / f.scale().max(1.0));
    }
    verdict("13", "P1 F1 parabolic along lambda = x(t)", worst, 1e-6);
}

fn tangents(pair: &LaxPair, p: &LaxPoint, r: &RValue) -> TangentField {
    TangentField::from(&build_ab(pair, &SymmetryChoice::single(6), p, Some(r)).unwrap())
}

fn linearized_residual(which: P3Symmetry, params: &PainleveParams, st: &PainleveState) -> f64 {
    let d = derivatives(params, st).unwrap();
    let t = st.t;
    let rv = p3_point_symmetry(which, params, st).unwrap();
    // R_tt from R = x ± t x_t
    let r_tt = match which {
        P3Symmetry::R1 => 3.0 * d[2] + t * d[3],
        P3Symmetry::R2 => -d[2] - t * d[3],
    };
    determining_residual(params, st, &rv, r_tt).abs() / rv.r.abs().max(1.0)
}

/// Displayed (A, B) for R₂ at δ = -1, with `beta_sign` multiplying β.
fn r2_display(alpha_beta: f64, t: f64, l: f64, x: f64, xt: f64) -> (Mat2, Mat2) {
    let delta = -1.0;
    let f = (delta * t * xt - x * delta + alpha_beta * x + delta * delta * t) / (2.0 * x * x);
    let a = Mat2::real(f, 0.0, 0.0, -f);
    let b = Mat2::real(t / l, 0.0, -(t * xt - x + delta * t) / (l * l * x), -t / l).scale(f);
    (a, b)
}

fn point_symmetries(beta_sign: f64) -> f64 {
    let mut r = rng(14);
    let mut lin: f64 = 0.0;
    let mut display: f64 = 0.0;
    // R₁: β = δ = 0, γ = 1
    let alpha = r.gen_range(-1.0..1.0);
    let params = PainleveParams::p3(alpha, 0.0, 1.0, 0.0);
    let Host::Numeric(tr) = p3_host(params) else { unreachable!() };
    let pair = LaxPair::new(params).unwrap();
    for st in tr.samples() {
        lin = lin.max(linearized_residual(P3Symmetry::R1, &params, st));
        let l = r.gen_range(0.3..2.0);
        let p = LaxPoint::on_shell(&params, st, l).unwrap();
        let tf = tangents(&pair, &p, &p3_point_symmetry(P3Symmetry::R1, &params, st).unwrap());
        let (t, x, xt, g) = (st.t, st.x, st.x_t, 1.0);
        let f = 0.5 * (g * g * t * x * x + (g + alpha) * x + g * t * xt);
        let a = e1().scale(f);
        let b = Mat2::real(t / l, -(x + t * xt + g * t * x * x) / (x * l * l), 0.0, -t / l).scale(f);
        let s = tf.a.max_abs().max(tf.b.max_abs()).max(1.0);
        display = display.max(((tf.a - a).max_abs()).max((tf.b - b).max_abs()) / s);
    }
    // R₂: α = γ = 0, δ = -1
    let beta = r.gen_range(-1.0..1.0);
    let params = PainleveParams::p3(0.0, beta, 0.0, -1.0);
    let Host::Numeric(tr) = p3_host(params) else { unreachable!() };
    let pair = LaxPair::new(params).unwrap();
    for st in tr.samples() {
        lin = lin.max(linearized_residual(P3Symmetry::R2, &params, st));
        let l = r.gen_range(0.3..2.0);
        let p = LaxPoint::on_shell(&params, st, l).unwrap();
        let tf = tangents(&pair, &p, &p3_point_symmetry(P3Symmetry::R2, &params, st).unwrap());
        let (a, b) = r2_display(beta_sign * beta, st.t, l, st.x, st.x_t);
        let s = tf.a.max_abs().max(tf.b.max_abs()).max(1.0);
        display = display.max(((tf.a - a).max_abs()).max((tf.b - b).max_abs()) / s);
    }
    println!("criterion 14 linearized P3 residual {lin:.3e} (1e-8), display mismatch {display:.3e} (1e-10)");
    (lin / 1e-8).max(display / 1e-10)
}

#[test]
fn criterion_14_p3_point_symmetries() {
    verdict("14", "P3 point symmetries and displayed (A,B)", point_symmetries(1.0), 1.0);
}

#[test]
fn criterion_14b_p3_point_symmetries_beta_corrected() {
    verdict("14b", "P3 point symmetries, R2 display with beta sign corrected", point_symmetries(-1.0), 1.0);
}
