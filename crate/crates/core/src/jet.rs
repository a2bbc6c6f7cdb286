//! Truncated multivariate Taylor arithmetic.
//!
//! A [`Jet`] is a polynomial of total degree at most [`DEGREE`] in three
//! small shifts: `s` (in t), `l` (in λ) and `e` (along a variation of the
//! solution). Evaluating a formula on jets instead of floats yields all of
//! its partial derivatives up to that order, exactly up to rounding. The Lax
//! matrices are written once over [`Scalar`] and differentiated this way.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::algebra::Mat2;

pub const DEGREE: usize = 4;
pub const LEN: usize = 35;
const PAIRS: usize = 210;

const fn monomials() -> [[u8; 3]; LEN] {
    let mut out = [[0u8; 3]; LEN];
    let mut n = 0;
    let mut d = 0;
    while d <= DEGREE {
        let mut i = d as i32;
        while i >= 0 {
            let mut j = d as i32 - i;
            while j >= 0 {
                let k = d as i32 - i - j;
                out[n] = [i as u8, j as u8, k as u8];
                n += 1;
                j -= 1;
            }
            i -= 1;
        }
        d += 1;
    }
    out
}

const MONO: [[u8; 3]; LEN] = monomials();

const fn index_table() -> [[[u8; 5]; 5]; 5] {
    let mut t = [[[u8::MAX; 5]; 5]; 5];
    let mut n = 0;
    while n < LEN {
        let m = MONO[n];
        t[m[0] as usize][m[1] as usize][m[2] as usize] = n as u8;
        n += 1;
    }
    t
}

const INDEX: [[[u8; 5]; 5]; 5] = index_table();

const fn degree(n: usize) -> usize {
    (MONO[n][0] + MONO[n][1] + MONO[n][2]) as usize
}

const fn product_table() -> [[u8; 3]; PAIRS] {
    let mut out = [[0u8; 3]; PAIRS];
    let mut n = 0;
    let mut a = 0;
    while a < LEN {
        let mut b = 0;
        while b < LEN {
            if degree(a) + degree(b) <= DEGREE {
                let i = (MONO[a][0] + MONO[b][0]) as usize;
                let j = (MONO[a][1] + MONO[b][1]) as usize;
                let k = (MONO[a][2] + MONO[b][2]) as usize;
                out[n] = [a as u8, b as u8, INDEX[i][j][k]];
                n += 1;
            }
            b += 1;
        }
        a += 1;
    }
    assert!(n == PAIRS);
    out
}

const PRODUCTS: [[u8; 3]; PAIRS] = product_table();

fn index(i: usize, j: usize, k: usize) -> Option<usize> {
    if i + j + k > DEGREE {
        return None;
    }
    Some(INDEX[i][j][k] as usize)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// Field operations shared by `f64` and [`Jet`].
pub trait Scalar:
    Copy
    + From<f64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// Value at the expansion point.
    fn value(&self) -> f64;
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    c: [f64; LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Jet {
        let mut c = [0.0; LEN];
        c[0] = v;
        Jet { c }
    }

    /// `v + s`.
    pub fn var_s(v: f64) -> Jet {
        let mut j = Jet::constant(v);
        j.set(1, 0, 0, 1.0);
        j
    }

    /// `v + l`.
    pub fn var_l(v: f64) -> Jet {
        let mut j = Jet::constant(v);
        j.set(0, 1, 0, 1.0);
        j
    }

    /// Σ d[k] s^k / k! + e · Σ v[k] s^k / k!, from derivative values in t.
    pub fn from_t_derivatives(d: &[f64], v: &[f64]) -> Jet {
        let mut j = Jet::constant(0.0);
        for (k, x) in d.iter().enumerate().take(DEGREE + 1) {
            j.set(k, 0, 0, x / factorial(k));
        }
        for (k, x) in v.iter().enumerate().take(DEGREE) {
            j.set(k, 0, 1, x / factorial(k));
        }
        j
    }

    pub fn coeff(&self, i: usize, j: usize, k: usize) -> f64 {
        index(i, j, k).map_or(0.0, |n| self.c[n])
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = index(i, j, k).expect("monomial beyond truncation degree");
        self.c[n] = v;
    }

    /// ∂^{i+j+k} / ∂s^i ∂l^j ∂e^k at the origin.
    pub fn deriv(&self, i: usize, j: usize, k: usize) -> f64 {
        self.coeff(i, j, k) * factorial(i) * factorial(j) * factorial(k)
    }

    fn shift(&self, axis: usize) -> Jet {
        let mut out = Jet::constant(0.0);
        for n in 0..LEN {
            let mut m = MONO[n].map(|v| v as usize);
            if degree(n) == DEGREE {
                continue;
            }
            m[axis] += 1;
            let src = index(m[0], m[1], m[2]).unwrap();
            out.c[n] = self.c[src] * m[axis] as f64;
        }
        out
    }

    /// ∂/∂s, losing the top degree.
    pub fn d_s(&self) -> Jet {
        self.shift(0)
    }

    pub fn d_l(&self) -> Jet {
        self.shift(1)
    }

    pub fn d_e(&self) -> Jet {
        self.shift(2)
    }

    pub fn recip(&self) -> Jet {
        let a0 = self.c[0];
        let mut tail = *self;
        tail.c[0] = 0.0;
        let q = tail * (1.0 / a0);
        // 1/(1+q) = 1 - q + q² - ..., exact because q is nilpotent
        let mut r = Jet::constant(1.0);
        for _ in 0..DEGREE {
            r = Jet::constant(1.0) - q * r;
        }
        r * (1.0 / a0)
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Jet {
        Jet::constant(v)
    }
}

impl Scalar for Jet {
    fn value(&self) -> f64 {
        self.c[0]
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, o: Jet) -> Jet {
        for (a, b) in self.c.iter_mut().zip(o.c.iter()) {
            *a += b;
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, o: Jet) -> Jet {
        for (a, b) in self.c.iter_mut().zip(o.c.iter()) {
            *a -= b;
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for a in self.c.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut out = [0.0; LEN];
        for p in PRODUCTS.iter() {
            out[p[2] as usize] += self.c[p[0] as usize] * o.c[p[1] as usize];
        }
        Jet { c: out }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, v: f64) -> Jet {
        self.c[0] += v;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, v: f64) -> Jet {
        self.c[0] -= v;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, v: f64) -> Jet {
        for a in self.c.iter_mut() {
            *a *= v;
        }
        self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, v: f64) -> Jet {
        self * (1.0 / v)
    }
}

/// A 2×2 matrix of jets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JetMat(pub [[Jet; 2]; 2]);

impl JetMat {
    pub fn zero() -> JetMat {
        JetMat([[Jet::constant(0.0); 2]; 2])
    }

    pub fn constant(m: &Mat2) -> JetMat {
        let r = m.re_rows();
        JetMat([
            [Jet::constant(r[0][0]), Jet::constant(r[0][1])],
            [Jet::constant(r[1][0]), Jet::constant(r[1][1])],
        ])
    }

    fn map(&self, f: impl Fn(&Jet) -> Jet) -> JetMat {
        let m = &self.0;
        JetMat([[f(&m[0][0]), f(&m[0][1])], [f(&m[1][0]), f(&m[1][1])]])
    }

    pub fn d_t(&self) -> JetMat {
        self.map(Jet::d_s)
    }

    pub fn d_lambda(&self) -> JetMat {
        self.map(Jet::d_l)
    }

    /// Directional derivative along the variation.
    pub fn variation(&self) -> JetMat {
        self.map(Jet::d_e)
    }

    pub fn scale(&self, v: f64) -> JetMat {
        self.map(|j| *j * v)
    }

    pub fn scale_jet(&self, s: &Jet) -> JetMat {
        self.map(|j| *j * *s)
    }

    pub fn commutator(&self, o: &JetMat) -> JetMat {
        *self * *o - *o * *self
    }

    /// Matrix of the given partial derivative at the origin.
    pub fn deriv(&self, i: usize, j: usize, k: usize) -> Mat2 {
        let m = &self.0;
        Mat2::real(
            m[0][0].deriv(i, j, k),
            m[0][1].deriv(i, j, k),
            m[1][0].deriv(i, j, k),
            m[1][1].deriv(i, j, k),
        )
    }

    pub fn value(&self) -> Mat2 {
        self.deriv(0, 0, 0)
    }
}

impl Add for JetMat {
    type Output = JetMat;
    fn add(self, o: JetMat) -> JetMat {
        let (a, b) = (&self.0, &o.0);
        JetMat([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for JetMat {
    type Output = JetMat;
    fn sub(self, o: JetMat) -> JetMat {
        self + o.scale(-1.0)
    }
}

impl Mul for JetMat {
    type Output = JetMat;
    fn mul(self, o: JetMat) -> JetMat {
        let (a, b) = (&self.0, &o.0);
        JetMat([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}
