//! Lax pairs (U¹, U²) of P1, P2 and P3 and their zero-curvature residual.

use crate::algebra::{commutator, e1, Mat2};
use crate::error::{Error, Result};
use crate::jet::{Jet, JetMat, Scalar};
use crate::painleve::{derivatives, rhs_generic, Equation, PainleveParams, PainleveState};

const SINGULAR_CUTOFF: f64 = 1e-12;

/// A point of the jet space: (t, λ) plus the solution and its t-derivatives.
/// `x_tt` and higher are free coordinates unless built with [`LaxPoint::on_shell`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaxPoint {
    pub t: f64,
    pub lambda: f64,
    pub x: f64,
    pub x_t: f64,
    pub x_tt: f64,
    /// x_ttt, x⁽⁴⁾, x⁽⁵⁾
    pub x_higher: [f64; 3],
}

impl LaxPoint {
    pub fn new(t: f64, lambda: f64, x: f64, x_t: f64, x_tt: f64) -> Self {
        LaxPoint { t, lambda, x, x_t, x_tt, x_higher: [0.0; 3] }
    }

    /// Fills x_tt and the higher derivatives from the equation.
    pub fn on_shell(params: &PainleveParams, state: &PainleveState, lambda: f64) -> Result<Self> {
        let d = derivatives(params, state)?;
        Ok(LaxPoint {
            t: state.t,
            lambda,
            x: d[0],
            x_t: d[1],
            x_tt: d[2],
            x_higher: [d[3], d[4], d[5]],
        })
    }

    pub fn x_derivatives(&self) -> [f64; 6] {
        [self.x, self.x_t, self.x_tt, self.x_higher[0], self.x_higher[1], self.x_higher[2]]
    }

    pub fn state(&self) -> PainleveState {
        PainleveState::new(self.t, self.x, self.x_t)
    }
}

type Entries<S> = [[S; 2]; 2];

/// U¹ and U² of the jet-valued pair together.
#[derive(Clone, Copy, Debug)]
pub struct PotentialJets {
    pub u1: JetMat,
    pub u2: JetMat,
}

impl PotentialJets {
    /// D_λU¹ − D_tU² + [U¹, U²] as a jet.
    pub fn zcc(&self) -> JetMat {
        self.u1.d_lambda() - self.u2.d_t() + self.u1.commutator(&self.u2)
    }
}

/// Total derivatives of the potentials at a point.
#[derive(Clone, Copy, Debug)]
pub struct Partials {
    pub dt_u1: Mat2,
    pub dl_u1: Mat2,
    pub dt_u2: Mat2,
    pub dl_u2: Mat2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaxPair {
    params: PainleveParams,
    // P3 coefficients: g = √γ, d = -√(-δ)
    g: f64,
    d: f64,
}

impl LaxPair {
    pub fn new(params: PainleveParams) -> Result<Self> {
        let (mut g, mut d) = (0.0, 0.0);
        if params.equation == Equation::P3 {
            if params.gamma < 0.0 || params.delta > 0.0 {
                return Err(Error::NonRealLaxPair { gamma: params.gamma, delta: params.delta });
            }
            g = params.gamma.sqrt();
            d = -(-params.delta).sqrt();
        }
        Ok(LaxPair { params, g, d })
    }

    /// P3 pair with (g, d) set directly in place of (√γ, -√(-δ)).
    ///
    /// Only `g² = γ` and `d² = -δ` give a pair whose zero-curvature condition
    /// is P3; other values are useful for checking that.
    pub fn p3_with_coefficients(params: PainleveParams, g: f64, d: f64) -> Result<Self> {
        if params.equation != Equation::P3 {
            return Err(Error::WrongParameterRegime("explicit coefficients are for P3".into()));
        }
        Ok(LaxPair { params, g, d })
    }

    pub fn params(&self) -> &PainleveParams {
        &self.params
    }

    /// The P3 coefficients (g, d) with g² = γ, d² = -δ.
    pub fn p3_coefficients(&self) -> (f64, f64) {
        (self.g, self.d)
    }

    pub fn check(&self, p: &LaxPoint) -> Result<()> {
        let bad = |what: &str| Err(Error::SingularInput(format!("{} Lax pair: {what}", self.params.equation)));
        match self.params.equation {
            Equation::P1 => Ok(()),
            Equation::P2 => {
                if p.lambda.abs() < SINGULAR_CUTOFF {
                    bad("lambda = 0")
                } else {
                    Ok(())
                }
            }
            Equation::P3 => {
                if p.x.abs() < SINGULAR_CUTOFF {
                    bad("x = 0")
                } else if p.t.abs() < SINGULAR_CUTOFF {
                    bad("t = 0")
                } else if p.lambda.abs() < SINGULAR_CUTOFF {
                    bad("lambda = 0")
                } else if (p.lambda * p.lambda + self.g * self.d).abs() < SINGULAR_CUTOFF {
                    bad("lambda^2 + gamma delta = 0")
                } else {
                    Ok(())
                }
            }
        }
    }

    /// U¹ and U² over any scalar type, without admissibility checks.
    pub fn potentials<S: Scalar>(&self, t: S, lam: S, x: S, xt: S) -> (Entries<S>, Entries<S>) {
        let zero = S::from(0.0);
        match self.params.equation {
            Equation::P1 => (
                [[zero, lam + x * 2.0], [S::from(1.0), zero]],
                [
                    [-xt, lam * lam * 2.0 + lam * x * 2.0 + t + x * x * 2.0],
                    [(lam - x) * 2.0, xt],
                ],
            ),
            Equation::P2 => {
                let alpha = self.params.alpha;
                let diag = lam * lam * 4.0 - x * x * 2.0 - t;
                let off = -(x * lam * 4.0) + S::from(alpha) / lam;
                (
                    [[-lam, x], [x, lam]],
                    [[diag, off + xt * 2.0], [off - xt * 2.0, -diag]],
                )
            }
            Equation::P3 => {
                let (al, be, g, d) = (self.params.alpha, self.params.beta, self.g, self.d);
                let a1 = (xt / x + x * g + S::from(d) / x) * 0.5;
                let l2 = lam * lam;
                let den = l2 + g * d;
                let a = (t * l2 * xt * 2.0 + t * l2 * x * x * (2.0 * g) + t * l2 * (2.0 * d) - x * (al * d)
                    + x * (be * g))
                    / (lam * x * den * 4.0);
                let b = -(-(t * l2 * 2.0) + t * xt * g + x * g + t * x * x * (g * g) - t * (g * d) + x * al)
                    / (den * 2.0);
                let c = -(-(t * x * x * l2 * 2.0) + t * xt * d - x * d + t * (d * d) - t * x * x * (g * d) - x * be)
                    / (x * x * den * 2.0);
                ([[a1, lam], [lam, -a1]], [[a, b], [c, -a]])
            }
        }
    }

    pub fn u1(&self, p: &LaxPoint) -> Result<Mat2> {
        self.check(p)?;
        Ok(to_mat(self.potentials(p.t, p.lambda, p.x, p.x_t).0))
    }

    pub fn u2(&self, p: &LaxPoint) -> Result<Mat2> {
        self.check(p)?;
        Ok(to_mat(self.potentials(p.t, p.lambda, p.x, p.x_t).1))
    }

    /// Taylor jets of U¹, U² in (t, λ) around `p`, optionally along a
    /// variation of the solution with derivatives `variation` = [R, R_t, R_tt, R_ttt].
    pub fn jets(&self, p: &LaxPoint, variation: Option<&[f64; 4]>) -> Result<PotentialJets> {
        self.check(p)?;
        let d = p.x_derivatives();
        let v = variation.copied().unwrap_or([0.0; 4]);
        let t = Jet::var_s(p.t);
        let lam = Jet::var_l(p.lambda);
        let x = Jet::from_t_derivatives(&d, &v);
        let xt = Jet::from_t_derivatives(&d[1..], &v[1..]);
        let (u1, u2) = self.potentials(t, lam, x, xt);
        Ok(PotentialJets { u1: JetMat(u1), u2: JetMat(u2) })
    }

    pub fn partials(&self, p: &LaxPoint) -> Result<Partials> {
        let j = self.jets(p, None)?;
        Ok(Partials {
            dt_u1: j.u1.deriv(1, 0, 0),
            dl_u1: j.u1.deriv(0, 1, 0),
            dt_u2: j.u2.deriv(1, 0, 0),
            dl_u2: j.u2.deriv(0, 1, 0),
        })
    }

    /// D_λU¹ − D_tU² + [U¹, U²] at `p` (x_tt taken from `p`, not from the equation).
    pub fn zcc_residual(&self, p: &LaxPoint) -> Result<Mat2> {
        let d = self.partials(p)?;
        let u1 = self.u1(p)?;
        let u2 = self.u2(p)?;
        Ok(d.dl_u1 - d.dt_u2 + commutator(&u1, &u2))
    }

    /// The equation residual x_tt - f(t, x, x_t) at `p`.
    pub fn equation_residual(&self, p: &LaxPoint) -> f64 {
        p.x_tt - rhs_generic(&self.params, p.t, p.x, p.x_t)
    }

    /// Matrix M with zcc_residual = (x_tt - f) · M, where one is known in
    /// closed form (P1 and P3).
    pub fn structure_matrix(&self, p: &LaxPoint) -> Result<Option<Mat2>> {
        self.check(p)?;
        Ok(match self.params.equation {
            Equation::P1 => Some(e1()),
            Equation::P2 => None,
            Equation::P3 => {
                let (t, l, x) = (p.t, p.lambda, p.x);
                let den = l * l + self.g * self.d;
                Some(
                    Mat2::real(
                        -l * t / (x * den),
                        self.g * t / den,
                        self.d * t / (x * x * den),
                        l * t / (x * den),
                    )
                    .scale(0.5),
                )
            }
        })
    }
}

fn to_mat(m: Entries<f64>) -> Mat2 {
    Mat2::real(m[0][0], m[0][1], m[1][0], m[1][1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::painleve::rhs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (*a - *b).max_abs() <= tol
    }

    #[test]
    fn printed_values() {
        let p1 = LaxPair::new(PainleveParams::p1()).unwrap();
        let p2 = LaxPair::new(PainleveParams::p2(0.0)).unwrap();
        assert_eq!(p1.u1(&LaxPoint::new(0.0, 2.0, 1.0, 0.0, 0.0)).unwrap(), Mat2::real(0.0, 4.0, 1.0, 0.0));
        assert_eq!(p2.u1(&LaxPoint::new(0.0, 3.0, 2.0, 0.0, 0.0)).unwrap(), Mat2::real(-3.0, 2.0, 2.0, 3.0));
        assert_eq!(p1.u2(&LaxPoint::new(0.0, 1.0, 0.0, 0.0, 0.0)).unwrap(), Mat2::real(0.0, 2.0, 2.0, 0.0));
        assert_eq!(p2.u2(&LaxPoint::new(0.0, 1.0, 1.0, 0.0, 0.0)).unwrap(), Mat2::real(2.0, -4.0, -4.0, -2.0));
        assert!(matches!(p2.u2(&LaxPoint::new(0.0, 0.0, 1.0, 0.0, 0.0)), Err(Error::SingularInput(_))));
        let p3 = LaxPair::new(PainleveParams::p3(1.0, 1.0, 1.0, -1.0)).unwrap();
        assert!(matches!(p3.u1(&LaxPoint::new(1.0, 2.0, 0.0, 0.0, 0.0)), Err(Error::SingularInput(_))));
        assert!(matches!(p3.u1(&LaxPoint::new(1.0, 1.0, 0.5, 0.0, 0.0)), Err(Error::SingularInput(_))));
    }

    #[test]
    fn p3_pair_needs_real_coefficients() {
        assert!(matches!(
            LaxPair::new(PainleveParams::p3(0.0, 0.0, -1.0, 0.0)),
            Err(Error::NonRealLaxPair { .. })
        ));
        assert!(matches!(
            LaxPair::new(PainleveParams::p3(0.0, 0.0, 0.0, 0.5)),
            Err(Error::NonRealLaxPair { .. })
        ));
    }

    #[test]
    fn p1_factorization_examples() {
        let pair = LaxPair::new(PainleveParams::p1()).unwrap();
        let r = pair.zcc_residual(&LaxPoint::new(1.0, 0.3, 1.0, 0.0, 8.0)).unwrap();
        assert!(close(&r, &e1(), 1e-12));
        let r = pair.zcc_residual(&LaxPoint::new(1.0, 0.3, 1.0, 0.0, 7.0)).unwrap();
        assert!(r.max_abs() < 1e-12);
    }

    fn random_point(rng: &mut ChaCha8Rng) -> LaxPoint {
        let mut v = || rng.gen_range(-2.0..2.0);
        LaxPoint::new(v(), v(), v(), v(), v())
    }

    #[test]
    fn p1_factorization_off_shell() {
        let pair = LaxPair::new(PainleveParams::p1()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let p = random_point(&mut rng);
            let want = e1().scale(p.x_tt - 6.0 * p.x * p.x - p.t);
            assert!(close(&pair.zcc_residual(&p).unwrap(), &want, 1e-10));
        }
    }

    #[test]
    fn p2_vanishes_on_shell() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let alpha = rng.gen_range(-2.0..2.0);
            let pair = LaxPair::new(PainleveParams::p2(alpha)).unwrap();
            let mut p = random_point(&mut rng);
            if p.lambda.abs() < 1e-3 {
                continue;
            }
            p.x_tt = rhs(pair.params(), &p.state()).unwrap();
            assert!(pair.zcc_residual(&p).unwrap().max_abs() < 1e-10);
        }
    }

    #[test]
    fn p3_factorization_off_shell() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 200 {
            let params = PainleveParams::p3(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.0..1.0),
                rng.gen_range(-1.0..0.0),
            );
            let pair = LaxPair::new(params).unwrap();
            let p = random_point(&mut rng);
            if pair.check(&p).is_err() || p.x.abs() < 0.05 || (p.lambda * p.lambda + pair.g * pair.d).abs() < 0.05 {
                continue;
            }
            let m = pair.structure_matrix(&p).unwrap().unwrap();
            let want = m.scale(pair.equation_residual(&p));
            let got = pair.zcc_residual(&p).unwrap();
            assert!(close(&got, &want, 1e-9 * want.max_abs().max(1.0)), "{got:?} vs {want:?}");
            checked += 1;
        }
    }

    #[test]
    fn canonical_p3_on_shell() {
        let pair = LaxPair::new(PainleveParams::p3(0.7, -0.4, 1.0, -1.0)).unwrap();
        let p = LaxPoint::on_shell(pair.params(), &PainleveState::new(1.3, 0.8, -0.6), 0.4).unwrap();
        assert!(pair.zcc_residual(&p).unwrap().max_abs() < 1e-9);
    }

    #[test]
    fn traceless_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for params in [PainleveParams::p1(), PainleveParams::p2(0.5), PainleveParams::p3(0.3, 0.2, 0.5, -0.5)] {
            let pair = LaxPair::new(params).unwrap();
            for _ in 0..50 {
                let p = random_point(&mut rng);
                if pair.check(&p).is_err() {
                    continue;
                }
                assert!(pair.u1(&p).unwrap().trace().norm() < 1e-13);
                assert!(pair.u2(&p).unwrap().trace().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn partials_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-3;
        let five = |f: &dyn Fn(f64) -> Mat2| {
            (f(-2.0 * h) - f(-h).scale(8.0) + f(h).scale(8.0) - f(2.0 * h)).scale(1.0 / (12.0 * h))
        };
        for params in [PainleveParams::p1(), PainleveParams::p2(0.8), PainleveParams::p3(0.3, -0.6, 0.7, -0.2)] {
            let pair = LaxPair::new(params).unwrap();
            let mut done = 0;
            while done < 30 {
                let p = random_point(&mut rng);
                if p.x.abs() < 0.3 || p.t.abs() < 0.3 || p.lambda.abs() < 0.3 {
                    continue;
                }
                if (p.lambda * p.lambda + pair.g * pair.d).abs() < 0.3 {
                    continue;
                }
                let d = pair.partials(&p).unwrap();
                // total t-derivative: move (t, x, x_t) along (1, x_t, x_tt)
                let along_t = |s: f64| LaxPoint::new(p.t + s, p.lambda, p.x + s * p.x_t, p.x_t + s * p.x_tt, p.x_tt);
                let along_l = |s: f64| LaxPoint { lambda: p.lambda + s, ..p };
                let fd_t1 = five(&|s| pair.u1(&along_t(s)).unwrap());
                let fd_t2 = five(&|s| pair.u2(&along_t(s)).unwrap());
                let fd_l1 = five(&|s| pair.u1(&along_l(s)).unwrap());
                let fd_l2 = five(&|s| pair.u2(&along_l(s)).unwrap());
                for (exact, fd) in [(d.dt_u1, fd_t1), (d.dt_u2, fd_t2), (d.dl_u1, fd_l1), (d.dl_u2, fd_l2)] {
                    let scale = exact.max_abs().max(1.0);
                    assert!(close(&exact, &fd, 1e-6 * scale), "{:?}: {exact:?} vs {fd:?}", params.equation);
                }
                done += 1;
            }
        }
    }
}
