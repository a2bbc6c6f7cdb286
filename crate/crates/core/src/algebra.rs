//! 2×2 complex matrices, the sl(2,R) basis and the Killing form.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for tracelessness and reality checks.
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Determinants below this are treated as singular.
pub const SINGULAR_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a11: Complex64,
    pub a12: Complex64,
    pub a21: Complex64,
    pub a22: Complex64,
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2::real(0.0, 0.0, 0.0, 0.0);
    pub const IDENTITY: Mat2 = Mat2::real(1.0, 0.0, 0.0, 1.0);

    pub fn new(a11: Complex64, a12: Complex64, a21: Complex64, a22: Complex64) -> Self {
        Mat2 { a11, a12, a21, a22 }
    }

    pub const fn real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2 {
            a11: Complex64::new(a11, 0.0),
            a12: Complex64::new(a12, 0.0),
            a21: Complex64::new(a21, 0.0),
            a22: Complex64::new(a22, 0.0),
        }
    }

    pub fn from_rows(rows: [[f64; 2]; 2]) -> Self {
        Mat2::real(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub fn trace(&self) -> Complex64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> Complex64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        self.scale_c(re(s))
    }

    pub fn scale_c(&self, s: Complex64) -> Mat2 {
        Mat2::new(self.a11 * s, self.a12 * s, self.a21 * s, self.a22 * s)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        [self.a11, self.a12, self.a21, self.a22]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        [self.a11, self.a12, self.a21, self.a22]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Real parts as rows.
    pub fn re_rows(&self) -> [[f64; 2]; 2] {
        [[self.a11.re, self.a12.re], [self.a21.re, self.a22.re]]
    }

    pub fn inverse(&self) -> Result<Mat2> {
        let d = self.det();
        if d.norm() <= SINGULAR_TOL {
            return Err(Error::SingularMatrix(d.norm()));
        }
        let inv = d.inv();
        Ok(Mat2::new(self.a22 * inv, -self.a12 * inv, -self.a21 * inv, self.a11 * inv))
    }

    /// `g⁻¹ · self · g` given both `g` and its inverse.
    pub fn conjugate(&self, g: &Mat2, g_inv: &Mat2) -> Mat2 {
        *g_inv * *self * *g
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Mul<f64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: f64) -> Mat2 {
        self.scale(s)
    }
}

impl Mul<Mat2> for f64 {
    type Output = Mat2;
    fn mul(self, m: Mat2) -> Mat2 {
        m.scale(self)
    }
}

pub fn e1() -> Mat2 {
    Mat2::real(1.0, 0.0, 0.0, -1.0)
}

pub fn e2() -> Mat2 {
    Mat2::real(0.0, 1.0, 1.0, 0.0)
}

pub fn e3() -> Mat2 {
    Mat2::real(0.0, -1.0, 1.0, 0.0)
}

pub fn commutator(x: &Mat2, y: &Mat2) -> Mat2 {
    *x * *y - *y * *x
}

/// Components of a traceless matrix in the basis e1, e2, e3.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AlgebraVector {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl AlgebraVector {
    pub const ZERO: AlgebraVector = AlgebraVector { c1: 0.0, c2: 0.0, c3: 0.0 };

    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        AlgebraVector { c1, c2, c3 }
    }

    pub fn reconstruct(&self) -> Mat2 {
        Mat2::real(self.c1, self.c2 - self.c3, self.c2 + self.c3, -self.c1)
    }

    /// The Killing product written in components, signature (2,1).
    pub fn killing_dot(&self, o: &AlgebraVector) -> f64 {
        self.c1 * o.c1 + self.c2 * o.c2 - self.c3 * o.c3
    }

    pub fn max_abs(&self) -> f64 {
        self.c1.abs().max(self.c2.abs()).max(self.c3.abs())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }
}

impl Add for AlgebraVector {
    type Output = AlgebraVector;
    fn add(self, o: Self) -> Self {
        AlgebraVector::new(self.c1 + o.c1, self.c2 + o.c2, self.c3 + o.c3)
    }
}

impl Sub for AlgebraVector {
    type Output = AlgebraVector;
    fn sub(self, o: Self) -> Self {
        AlgebraVector::new(self.c1 - o.c1, self.c2 - o.c2, self.c3 - o.c3)
    }
}

impl Mul<f64> for AlgebraVector {
    type Output = AlgebraVector;
    fn mul(self, s: f64) -> Self {
        AlgebraVector::new(self.c1 * s, self.c2 * s, self.c3 * s)
    }
}

// Tolerances scale with the entries so that conjugated matrices with large
// entries are not rejected over rounding.
fn structural_bound(x: &Mat2) -> f64 {
    STRUCTURAL_TOL * x.max_abs().max(1.0)
}

pub fn decompose(x: &Mat2) -> Result<AlgebraVector> {
    let tr = x.trace().norm();
    if tr >= structural_bound(x) {
        return Err(Error::NotTraceless(tr));
    }
    let c1 = (x.a11 - x.a22) * 0.5;
    let c2 = (x.a12 + x.a21) * 0.5;
    let c3 = (x.a21 - x.a12) * 0.5;
    let im = c1.im.abs().max(c2.im.abs()).max(c3.im.abs());
    if im >= structural_bound(x) {
        return Err(Error::NonRealComponents(im));
    }
    Ok(AlgebraVector::new(c1.re, c2.re, c3.re))
}

/// ½ tr(XY) for traceless matrices with real components.
pub fn killing(x: &Mat2, y: &Mat2) -> Result<f64> {
    let u = decompose(x)?;
    let v = decompose(y)?;
    let k = u.killing_dot(&v);
    if cfg!(feature = "fault-killing-sign") {
        Ok(-k)
    } else {
        Ok(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (*a - *b).max_abs() <= tol
    }

    #[test]
    fn brackets_of_basis() {
        assert!(close(&commutator(&e1(), &e2()), &(e3() * -2.0), 0.0));
        assert!(close(&commutator(&e2(), &e3()), &(e1() * 2.0), 0.0));
        let x = Mat2::real(0.3, -1.2, 4.0, -0.3);
        assert_eq!(commutator(&x, &x), Mat2::ZERO);
    }

    #[test]
    fn killing_on_basis() {
        assert_eq!(killing(&e1(), &e1()).unwrap(), 1.0);
        assert_eq!(killing(&e3(), &e3()).unwrap(), -1.0);
        assert_eq!(killing(&e1(), &e2()).unwrap(), 0.0);
    }

    #[test]
    fn killing_is_half_trace() {
        let x = Mat2::real(0.7, 2.0, -1.5, -0.7);
        let y = Mat2::real(-1.1, 0.4, 3.0, 1.1);
        let half_tr = 0.5 * (x * y).trace().re;
        assert_abs_diff_eq!(killing(&x, &y).unwrap(), half_tr, epsilon = 1e-14);
    }

    #[test]
    fn killing_rejects_complex_components() {
        let mut x = e2();
        x.a12 = Complex64::new(1.0, 0.5);
        assert!(matches!(killing(&x, &e1()), Err(Error::NonRealComponents(_))));
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(decompose(&e1()).unwrap(), AlgebraVector::new(1.0, 0.0, 0.0));
        assert_eq!(
            decompose(&Mat2::real(0.0, 1.0, 0.0, 0.0)).unwrap(),
            AlgebraVector::new(0.0, 0.5, -0.5)
        );
        assert!(matches!(decompose(&Mat2::IDENTITY), Err(Error::NotTraceless(_))));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Mat2::IDENTITY.inverse().unwrap(), Mat2::IDENTITY);
        let d = Mat2::real(2.0, 0.0, 0.0, 0.5).inverse().unwrap();
        assert!(close(&d, &Mat2::real(0.5, 0.0, 0.0, 2.0), 1e-15));
        assert!(matches!(
            Mat2::real(1.0, 1.0, 1.0, 1.0).inverse(),
            Err(Error::SingularMatrix(_))
        ));
    }

    fn traceless() -> impl Strategy<Value = Mat2> {
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
            .prop_map(|(a, b, c)| AlgebraVector::new(a, b, c).reconstruct())
    }

    fn unimodular() -> impl Strategy<Value = Mat2> {
        (-2.0..2.0f64, -2.0..2.0f64, 0.3..2.0f64)
            .prop_map(|(b, c, a)| Mat2::real(a, b, c, (1.0 + b * c) / a))
    }

    proptest! {
        #[test]
        fn jacobi_identity(x in traceless(), y in traceless(), z in traceless()) {
            let j = commutator(&x, &commutator(&y, &z))
                + commutator(&y, &commutator(&z, &x))
                + commutator(&z, &commutator(&x, &y));
            prop_assert!(j.max_abs() < 1e-12);
        }

        #[test]
        fn killing_ad_invariant(x in traceless(), y in traceless(), z in traceless()) {
            let s = killing(&commutator(&z, &x), &y).unwrap()
                + killing(&x, &commutator(&z, &y)).unwrap();
            prop_assert!(s.abs() < 1e-12);
        }

        #[test]
        fn killing_conjugation_invariant(x in traceless(), y in traceless(), g in unimodular()) {
            let gi = g.inverse().unwrap();
            let a = killing(&x.conjugate(&g, &gi), &y.conjugate(&g, &gi)).unwrap();
            let b = killing(&x, &y).unwrap();
            prop_assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()) * g.max_abs().powi(2).max(1.0));
        }

        #[test]
        fn decompose_reconstruct_roundtrip(a in -1e3..1e3f64, b in -1e3..1e3f64, c in -1e3..1e3f64) {
            // a12 = c2 - c3 and a21 = c2 + c3 round, so equality holds to an ulp
            let v = AlgebraVector::new(a, b, c);
            let w = decompose(&v.reconstruct()).unwrap();
            prop_assert_eq!(w.c1, v.c1);
            prop_assert!((w - v).max_abs() <= 4.0 * f64::EPSILON * v.max_abs());
        }

        #[test]
        fn killing_matches_components(x in traceless(), y in traceless()) {
            let half_tr = 0.5 * (x * y).trace().re;
            let k = killing(&x, &y).unwrap();
            prop_assert!((k - half_tr).abs() < 1e-12);
        }

        #[test]
        fn inverse_is_inverse(g in unimodular()) {
            let p = g * g.inverse().unwrap();
            prop_assert!((p - Mat2::IDENTITY).max_abs() < 1e-12 * g.max_abs().powi(2).max(1.0));
        }
    }
}
