//! Fundamental forms, curvatures and umbilics under the Killing pseudo-metric.
//!
//! Everything is computed from the un-conjugated tangent representations;
//! conjugation by Φ leaves every Killing product unchanged.

use std::fmt;
use std::io::Write;

use crate::algebra::{commutator, decompose, killing, Mat2};
use crate::error::{Error, Result};
use crate::frame::{GridSpec, SurfaceGrid, TangentField};
use crate::laxpair::{LaxPair, LaxPoint};
use crate::painleve::{fmt17, Host};
use crate::symmetry::{build_ab, RSolution, SymmetryChoice};

/// Global orientation of the unit normal.
pub const ORIENTATION: f64 = -1.0;

const RANK_TOL: f64 = 1e-10;
const ISOTROPY_TOL: f64 = 1e-10;
const DEGENERACY_TOL: f64 = 1e-12;
const MIXED_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Regular,
    DegenerateMetric,
    IsotropicNormal,
    DegenerateTangents,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::Regular => "Regular",
            Classification::DegenerateMetric => "DegenerateMetric",
            Classification::IsotropicNormal => "IsotropicNormal",
            Classification::DegenerateTangents => "DegenerateTangents",
        };
        f.write_str(s)
    }
}

pub fn first_fundamental(a: &Mat2, b: &Mat2) -> Result<(f64, f64, f64)> {
    Ok((killing(a, a)?, killing(a, b)?, killing(b, b)?))
}

/// Rank of the pair of tangents as vectors of basis components.
pub fn tangent_rank(a: &Mat2, b: &Mat2) -> Result<usize> {
    let (u, v) = (decompose(a)?.as_array(), decompose(b)?.as_array());
    let norm = |w: &[f64; 3]| w.iter().map(|c| c * c).sum::<f64>().sqrt();
    let cross = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    let (nu, nv) = (norm(&u), norm(&v));
    Ok(if norm(&cross) > RANK_TOL * nu * nv && nu > 0.0 && nv > 0.0 {
        2
    } else if nu > 0.0 || nv > 0.0 {
        1
    } else {
        0
    })
}

#[derive(Clone, Copy, Debug)]
pub struct Normal {
    /// [A, B]
    pub raw: Mat2,
    pub norm_sq: f64,
    /// Unit normal, absent for an isotropic [A, B].
    pub unit: Option<Mat2>,
}

impl Normal {
    pub fn is_isotropic(&self) -> bool {
        self.unit.is_none()
    }

    /// Negative Killing square.
    pub fn is_timelike(&self) -> bool {
        self.norm_sq < 0.0
    }
}

pub fn normal(a: &Mat2, b: &Mat2) -> Result<Normal> {
    if tangent_rank(a, b)? < 2 {
        return Err(Error::DegenerateTangents);
    }
    let (g11, g12, g22) = first_fundamental(a, b)?;
    let scale = g11.abs().max(g12.abs()).max(g22.abs());
    let raw = commutator(a, b);
    let norm_sq = killing(&raw, &raw)?;
    let unit = (norm_sq.abs() >= ISOTROPY_TOL * scale * scale).then(|| raw.scale(ORIENTATION / norm_sq.abs().sqrt()));
    Ok(Normal { raw, norm_sq, unit })
}

pub fn second_fundamental(tf: &TangentField, n: &Mat2) -> Result<(f64, f64, f64)> {
    let l11 = killing(&tf.tt, n)?;
    let l12a = killing(&tf.tl, n)?;
    let l12b = killing(&tf.lt, n)?;
    let l22 = killing(&tf.ll, n)?;
    let gap = (l12a - l12b).abs();
    if gap > MIXED_TOL * l12a.abs().max(l12b.abs()).max(1.0) {
        return Err(Error::AsymmetricMixedDerivatives(gap));
    }
    Ok((l11, 0.5 * (l12a + l12b), l22))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FundamentalForms {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub det_g: f64,
    /// (L11, L12, L22), only for regular points.
    pub second: Option<(f64, f64, f64)>,
    pub classification: Classification,
    pub timelike_normal: bool,
}

impl FundamentalForms {
    pub fn scale(&self) -> f64 {
        self.g11.abs().max(self.g12.abs()).max(self.g22.abs())
    }
}

pub fn fundamental_forms(tf: &TangentField) -> Result<FundamentalForms> {
    let (g11, g12, g22) = first_fundamental(&tf.a, &tf.b)?;
    let det_g = g11 * g22 - g12 * g12;
    let mut forms = FundamentalForms {
        g11,
        g12,
        g22,
        det_g,
        second: None,
        classification: Classification::Regular,
        timelike_normal: false,
    };
    let scale = forms.scale();
    let n = match normal(&tf.a, &tf.b) {
        Err(Error::DegenerateTangents) => {
            forms.classification = Classification::DegenerateTangents;
            return Ok(forms);
        }
        other => other?,
    };
    forms.timelike_normal = n.is_timelike();
    if det_g.abs() <= DEGENERACY_TOL * scale * scale {
        forms.classification = Classification::DegenerateMetric;
    } else if let Some(unit) = n.unit {
        forms.second = Some(second_fundamental(tf, &unit)?);
    } else {
        forms.classification = Classification::IsotropicNormal;
    }
    Ok(forms)
}

/// Gaussian and mean curvature.
pub fn curvatures(forms: &FundamentalForms) -> Result<(f64, f64)> {
    let scale = forms.scale();
    match (forms.classification, forms.second) {
        (Classification::Regular, Some((l11, l12, l22))) if forms.det_g.abs() > DEGENERACY_TOL * scale * scale => {
            let d = forms.det_g;
            let k = (l11 * l22 - l12 * l12) / d;
            let h = (forms.g22 * l11 - 2.0 * forms.g12 * l12 + forms.g11 * l22) / (2.0 * d);
            Ok((k, h))
        }
        (Classification::IsotropicNormal, _) => Err(Error::IsotropicNormal),
        _ => Err(Error::DegenerateMetric(forms.det_g)),
    }
}

/// Tangent data of a surface at an arbitrary on-shell point.
pub fn tangent_at(
    pair: &LaxPair,
    host: &Host,
    choice: &SymmetryChoice,
    r: Option<&RSolution>,
    t: f64,
    lambda: f64,
) -> Result<TangentField> {
    let params = host.params();
    let st = host.state(t)?;
    let p = LaxPoint::on_shell(&params, &st, lambda)?;
    let rv = match (choice.alpha[5] != 0.0, r) {
        (true, Some(r)) => Some(r.value(&params, &st)?),
        (true, None) => return Err(Error::MissingRSolution),
        _ => None,
    };
    Ok(TangentField::from(&build_ab(pair, choice, &p, rv.as_ref())?))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeGeometry {
    pub forms: FundamentalForms,
    pub k: Option<f64>,
    pub h: Option<f64>,
}

impl NodeGeometry {
    pub fn from_tangent(tf: &TangentField) -> Result<Self> {
        let forms = fundamental_forms(tf)?;
        let (k, h) = match curvatures(&forms) {
            Ok((k, h)) => (Some(k), Some(h)),
            Err(_) => (None, None),
        };
        Ok(NodeGeometry { forms, k, h })
    }

    /// H² − K, where both are defined.
    pub fn umbilic_measure(&self) -> Option<f64> {
        Some(self.h? * self.h? - self.k?)
    }
}

#[derive(Clone, Debug)]
pub struct CurvatureField {
    pub spec: GridSpec,
    pub t: Vec<f64>,
    pub lambda: Vec<f64>,
    pub nodes: Vec<Option<NodeGeometry>>,
}

impl CurvatureField {
    pub fn from_surface(surface: &SurfaceGrid) -> Result<Self> {
        let nodes = surface
            .nodes
            .iter()
            .map(|n| n.as_ref().map(|n| NodeGeometry::from_tangent(&n.tangent)).transpose())
            .collect::<Result<Vec<_>>>()?;
        Ok(CurvatureField { spec: surface.spec.clone(), t: surface.t.clone(), lambda: surface.lambda.clone(), nodes })
    }

    pub fn from_tangents(spec: &GridSpec, field: &[Option<TangentField>]) -> Result<Self> {
        let nodes = field.iter().map(|n| n.as_ref().map(NodeGeometry::from_tangent).transpose()).collect::<Result<Vec<_>>>()?;
        Ok(CurvatureField { spec: spec.clone(), t: spec.t_nodes(), lambda: spec.lambda_nodes(), nodes })
    }

    pub fn node(&self, i: usize, j: usize) -> Option<&NodeGeometry> {
        self.nodes[self.spec.index(i, j)].as_ref()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,lambda,g11,g12,g22,det_g,L11,L12,L22,K,H,class")?;
        let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
        for i in 0..self.spec.n_t {
            for j in 0..self.spec.n_lambda {
                let Some(n) = self.node(i, j) else { continue };
                let f = &n.forms;
                let (l11, l12, l22) = match f.second {
                    Some((a, b, c)) => (Some(a), Some(b), Some(c)),
                    None => (None, None, None),
                };
                let fields = [
                    fmt17(self.t[i]),
                    fmt17(self.lambda[j]),
                    fmt17(f.g11),
                    fmt17(f.g12),
                    fmt17(f.g22),
                    fmt17(f.det_g),
                    opt(l11),
                    opt(l12),
                    opt(l22),
                    opt(n.k),
                    opt(n.h),
                    f.classification.to_string(),
                ];
                writeln!(w, "{}", fields.join(","))?;
            }
        }
        Ok(())
    }
}

/// Zeros of H² − K located by sign changes between neighbouring nodes along
/// grid lines, refined by bisection with `measure(t, λ)`.
pub fn umbilic_locus<M>(field: &CurvatureField, measure: M) -> Vec<(f64, f64)>
where
    M: Fn(f64, f64) -> Option<f64>,
{
    let spec = &field.spec;
    let value = |i: usize, j: usize| field.node(i, j).and_then(NodeGeometry::umbilic_measure);
    let mut out = Vec::new();
    for i in 0..spec.n_t {
        for j in 0..spec.n_lambda {
            let Some(v0) = value(i, j) else { continue };
            if v0 == 0.0 {
                out.push((field.t[i], field.lambda[j]));
                continue;
            }
            if i + 1 < spec.n_t {
                if let Some(v1) = value(i + 1, j) {
                    if v0 * v1 < 0.0 {
                        let lam = field.lambda[j];
                        let f = |t: f64| measure(t, lam);
                        if let Some(t) = bisect(f, field.t[i], field.t[i + 1], v0) {
                            out.push((t, lam));
                        }
                    }
                }
            }
            if j + 1 < spec.n_lambda {
                if let Some(v1) = value(i, j + 1) {
                    if v0 * v1 < 0.0 {
                        let t = field.t[i];
                        let f = |l: f64| measure(t, l);
                        if let Some(l) = bisect(f, field.lambda[j], field.lambda[j + 1], v0) {
                            out.push((t, l));
                        }
                    }
                }
            }
        }
    }
    out
}

fn bisect<F: Fn(f64) -> Option<f64>>(f: F, mut a: f64, mut b: f64, fa: f64) -> Option<f64> {
    let sa = fa.signum();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm.abs() < 1e-8 || m == a || m == b {
            return (fm.abs() < 1e-8).then_some(m);
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    None
}
