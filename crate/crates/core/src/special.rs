//! Gamma, Airy and modified Bessel functions on desk-scale domains.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ode::{Control, Solver, Tolerances};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || is_nonpositive_integer(x) {
        return Err(Error::DomainError(format!("gamma undefined at {x}")));
    }
    if x < 0.5 {
        return Ok(PI / ((PI * x).sin() * gamma(1.0 - x)?));
    }
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    Ok((2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a)
}

/// 1/Γ(x), zero at the poles of Γ.
fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma(x).unwrap_or(f64::INFINITY)
    }
}

const MACLAURIN_RADIUS: f64 = 4.0;
const ASYMPTOTIC_START: f64 = 9.0;
const AIRY_MIN: f64 = -60.0;

fn airy_maclaurin(z: f64) -> (f64, f64) {
    let c1 = 3f64.powf(-2.0 / 3.0) / gamma(2.0 / 3.0).unwrap();
    let c2 = 3f64.powf(-1.0 / 3.0) / gamma(1.0 / 3.0).unwrap();
    let z3 = z * z * z;
    // f = Σ F_k z^{3k}, g = Σ G_k z^{3k+1}
    let (mut f, mut fp, mut g, mut gp) = (0.0, 0.0, 0.0, 0.0);
    let mut fk = 1.0;
    let mut gk = 1.0;
    let mut pow = 1.0; // z^{3k}
    let mut prev = 0.0; // z^{3k-3}
    for k in 0..200 {
        let kf = k as f64;
        f += fk * pow;
        fp += 3.0 * kf * fk * z * z * prev;
        g += gk * pow * z;
        gp += (3.0 * kf + 1.0) * gk * pow;
        let next = fk * pow;
        fk /= (3.0 * kf + 2.0) * (3.0 * kf + 3.0);
        gk /= (3.0 * kf + 3.0) * (3.0 * kf + 4.0);
        prev = pow;
        pow *= z3;
        if k > 2 && next.abs() < 1e-18 * f.abs().max(1.0) && (gk * pow * z).abs() < 1e-18 {
            break;
        }
    }
    (c1 * f - c2 * g, c1 * fp - c2 * gp)
}

fn airy_asymptotic(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let (mut su, mut sv) = (1.0, 1.0);
    let mut u = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..40 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        let term = u / zeta.powi(k);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        su += sign * term;
        sv += sign * v / zeta.powi(k);
        if term.abs() < 1e-17 {
            break;
        }
    }
    let pre = (-zeta).exp() / (2.0 * PI.sqrt());
    (pre * su / z.powf(0.25), -pre * z.powf(0.25) * sv)
}

fn airy_ode(z0: f64, y0: (f64, f64), z: f64) -> Result<(f64, f64)> {
    let mut s = Solver::new(Tolerances { rtol: 1e-13, atol: 1e-30 });
    let out = s.run(
        |x, y, d| {
            d[0] = y[1];
            d[1] = x * y[0];
            Ok(())
        },
        z0,
        &[y0.0, y0.1],
        z,
        |_, _, _| Control::Continue,
    )?;
    Ok((out.y[0], out.y[1]))
}

/// Ai(z) and Ai'(z).
pub fn airy(z: f64) -> Result<(f64, f64)> {
    if !z.is_finite() || z < AIRY_MIN {
        return Err(Error::DomainError(format!("airy evaluated outside [{AIRY_MIN}, inf) at {z}")));
    }
    if z.abs() <= MACLAURIN_RADIUS {
        Ok(airy_maclaurin(z))
    } else if z >= ASYMPTOTIC_START {
        Ok(airy_asymptotic(z))
    } else if z > 0.0 {
        // integrate towards the origin, where Ai grows: the stable direction
        airy_ode(ASYMPTOTIC_START, airy_asymptotic(ASYMPTOTIC_START), z)
    } else {
        airy_ode(-MACLAURIN_RADIUS, airy_maclaurin(-MACLAURIN_RADIUS), z)
    }
}

/// Modified Bessel function of the first kind by its ascending series.
pub fn bessel_i(nu: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) || !nu.is_finite() {
        return Err(Error::DomainError(format!("bessel_i needs z > 0, got {z}")));
    }
    if nu < 0.0 && nu == nu.round() {
        return bessel_i(-nu, z);
    }
    let q = z * z / 4.0;
    // term_k = q^k / (k! Γ(k+ν+1))
    let mut sum = 0.0;
    let mut term = rgamma(nu + 1.0);
    let mut k = 0usize;
    loop {
        sum += term;
        k += 1;
        term *= q / (k as f64 * (k as f64 + nu));
        if k > 10 && term.abs() < 1e-17 * sum.abs() {
            break;
        }
        if k > 2000 {
            break;
        }
    }
    let v = (z / 2.0).powf(nu) * sum;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::DomainError(format!("bessel_i({nu}, {z}) overflows")))
    }
}
