//! The Fefferman metric on chart × circle and its Ricci curvature.
//!
//! The circle coordinate `v` is appended as the last variable; chart jets do not
//! depend on it. The connection form is `ϖ = i dv + weyl`, and
//! `g_F = iϖ⊙θ + ½γ` with `γ = Σ θ^α⊙θ^ᾱ` and `u⊙v = u⊗v + v⊗u`.

use alloc::vec;
use alloc::vec::Vec;

use crate::coframe::Coframe;
use crate::error::{Error, Result};
use crate::form::Form;
use crate::jet::{Jet, JetSpace, C64, I};
use crate::linalg::{self, JetMatrix};
use crate::pseudohermitian::Geometry;

/// Coordinate components of a symmetric (or general) bilinear form.
pub type Bilinear = JetMatrix;

/// Coframe `(ϖ, θ, θ^α, θ^ᾱ)` lifted to chart × circle.
#[derive(Clone, Debug)]
pub struct FeffermanFrame {
    pub space: JetSpace,
    /// `ϖ`, `θ`, `θ^α`, `θ^ᾱ` in that order.
    pub forms: Vec<Form>,
}

impl FeffermanFrame {
    pub fn new(geom: &Geometry) -> FeffermanFrame {
        let base = geom.coframe.space();
        let m = base.nvars();
        let space = JetSpace::new(m + 1, base.max_order());
        let lift = |f: &Form| {
            let mut cs: Vec<Jet> = f.comps().iter().map(|j| j.lift(&space)).collect();
            cs.push(space.zero());
            Form::one_form(&space, cs)
        };
        let mut varpi = lift(&geom.weyl_form);
        let mut cs = varpi.comps().to_vec();
        cs[m] = space.constant(I);
        varpi = Form::one_form(&space, cs);
        let n = geom.n();
        let mut forms = vec![varpi];
        forms.extend((0..geom.coframe.dim()).map(|a| lift(&geom.coframe.basis(a))));
        debug_assert_eq!(forms.len(), 2 * n + 2);
        FeffermanFrame { space, forms }
    }

    pub fn dim(&self) -> usize {
        self.forms.len()
    }

    pub fn n(&self) -> usize {
        (self.dim() - 2) / 2
    }

    /// `u ⊗ v` as a coordinate matrix.
    pub fn tensor(&self, u: &Form, v: &Form) -> Bilinear {
        let d = self.dim();
        (0..d).map(|i| (0..d).map(|j| &u.comps()[i] * &v.comps()[j]).collect()).collect()
    }

    /// `u ⊙ v = u⊗v + v⊗u`.
    pub fn sym(&self, u: &Form, v: &Form) -> Bilinear {
        add(&self.tensor(u, v), &self.tensor(v, u))
    }

    /// Components `B(e_a, e_b)` on the frame dual to `(ϖ, θ, θ^α, θ^ᾱ)`.
    pub fn frame_components(&self, b: &Bilinear) -> Result<Bilinear> {
        let d = self.dim();
        let mat: JetMatrix = self.forms.iter().map(|f| f.comps().to_vec()).collect();
        let inv = linalg::inverse(&mat, "Fefferman coframe")?;
        // e_a has coordinate components inv[.][a]
        let mut out = vec![vec![self.space.zero(); d]; d];
        for a in 0..d {
            for c in 0..d {
                let mut acc = self.space.zero();
                for i in 0..d {
                    for j in 0..d {
                        if b[i][j].max_abs() == 0.0 {
                            continue;
                        }
                        acc += &(&inv[i][a] * &b[i][j]) * &inv[j][c];
                    }
                }
                out[a][c] = acc;
            }
        }
        Ok(out)
    }
}

pub fn add(a: &Bilinear, b: &Bilinear) -> Bilinear {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

pub fn scale(a: &Bilinear, s: C64) -> Bilinear {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn scale_fn(a: &Bilinear, f: &Jet) -> Bilinear {
    a.iter().map(|r| r.iter().map(|x| x * f).collect()).collect()
}

pub fn max_diff(a: &Bilinear, b: &Bilinear) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).fold(0.0, |m, (x, y)| m.max(x.max_diff(y)))
}

/// Largest base-point difference.
pub fn max_value_diff(a: &Bilinear, b: &Bilinear) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).fold(0.0, |m, (x, y)| m.max((x.value() - y.value()).norm()))
}

/// `g_F = iϖ⊙θ + ½γ` in coordinates.
pub fn fefferman_metric(fr: &FeffermanFrame) -> Bilinear {
    let n = fr.n();
    let varpi = &fr.forms[0];
    let theta = &fr.forms[1];
    let mut g = scale(&fr.sym(varpi, theta), I);
    for a in 0..n {
        let gam = fr.sym(&fr.forms[2 + a], &fr.forms[2 + n + a]);
        g = add(&g, &scale(&gam, C64::new(0.5, 0.0)));
    }
    g
}

#[derive(Clone, Debug)]
pub struct RicciReport {
    /// Coordinate components.
    pub ricci: Bilinear,
    pub scalar: Jet,
}

/// Ricci and scalar curvature of a coordinate metric by the Levi-Civita connection.
pub fn levi_civita_ricci(g: &Bilinear) -> Result<RicciReport> {
    let d = g.len();
    let space = g[0][0].space().clone();
    let ginv = linalg::inverse(g, "metric")?;
    let dg: Vec<Vec<Vec<Jet>>> = (0..d)
        .map(|k| (0..d).map(|i| (0..d).map(|j| g[i][j].partial(k)).collect::<Result<Vec<_>>>()).collect())
        .collect::<Result<_>>()?;
    // christoffel[k][i][j] = Γ^k_{ij}
    let mut chr = vec![vec![vec![space.zero(); d]; d]; d];
    for i in 0..d {
        for j in i..d {
            let low: Vec<Jet> = (0..d).map(|l| &(&dg[i][j][l] + &dg[j][i][l]) - &dg[l][i][j]).collect();
            for k in 0..d {
                let mut acc = space.zero();
                for l in 0..d {
                    acc += &ginv[k][l] * &low[l];
                }
                let v = acc * 0.5;
                chr[k][j][i] = v.clone();
                chr[k][i][j] = v;
            }
        }
    }
    let mut ric = vec![vec![space.zero(); d]; d];
    for i in 0..d {
        for j in i..d {
            let mut acc = space.zero();
            for k in 0..d {
                acc += chr[k][i][j].partial(k)?;
                acc -= chr[k][i][k].partial(j)?;
                for l in 0..d {
                    acc += &chr[k][k][l] * &chr[l][i][j];
                    acc -= &chr[k][j][l] * &chr[l][i][k];
                }
            }
            ric[j][i] = acc.clone();
            ric[i][j] = acc;
        }
    }
    let mut scalar = space.zero();
    for i in 0..d {
        for j in 0..d {
            scalar += &ginv[i][j] * &ric[i][j];
        }
    }
    Ok(RicciReport { ricci: ric, scalar })
}

/// Ricci curvature assembled from the pseudo-hermitian invariants:
///
/// `Ric_F / n = R/(n(n+1)) iϖ⊙θ − 2(ϖ² + Sθ²) + (P_{αβ̄} + R/(2n(n+1)) δ_{αβ̄}) θ^α⊙θ^β̄
///   + i(A_{αβ} θ^α⊗θ^β − A_{ᾱβ̄} θ^ᾱ⊗θ^β̄) + 2i(T_α θ^α⊙θ − T_ᾱ θ^ᾱ⊙θ)`.
pub fn ricci_formula(geom: &Geometry, fr: &FeffermanFrame) -> Bilinear {
    let n = geom.n();
    let nf = n as f64;
    let sp = &fr.space;
    let lift = |j: &Jet| j.lift(sp);
    let varpi = &fr.forms[0];
    let theta = &fr.forms[1];
    let ta = |a: usize| &fr.forms[2 + a];
    let tb = |a: usize| &fr.forms[2 + n + a];
    let r = lift(&geom.scalar);
    let s = lift(&geom.s);

    let mut out = scale_fn(&fr.sym(varpi, theta), &(&r * (I * (1.0 / (nf * (nf + 1.0))))));
    out = add(&out, &scale(&fr.tensor(varpi, varpi), C64::new(-2.0, 0.0)));
    out = add(&out, &scale_fn(&fr.tensor(theta, theta), &(&s * -2.0)));
    for a in 0..n {
        for b in 0..n {
            let mut p = lift(geom.schouten.get(&[geom.z(a), geom.zb(b)]));
            if a == b {
                p += &r * (1.0 / (2.0 * nf * (nf + 1.0)));
            }
            out = add(&out, &scale_fn(&fr.sym(ta(a), tb(b)), &p));
            let aab = lift(geom.torsion.get(&[geom.z(a), geom.z(b)])) * I;
            out = add(&out, &scale_fn(&fr.tensor(ta(a), ta(b)), &aab));
            let abb = lift(geom.torsion.get(&[geom.zb(a), geom.zb(b)])) * (-I);
            out = add(&out, &scale_fn(&fr.tensor(tb(a), tb(b)), &abb));
        }
        let t = lift(geom.t.get(&[geom.z(a)])) * (I * 2.0);
        out = add(&out, &scale_fn(&fr.sym(ta(a), theta), &t));
        let tbar = lift(geom.t.get(&[geom.zb(a)])) * (I * -2.0);
        out = add(&out, &scale_fn(&fr.sym(tb(a), theta), &tbar));
    }
    scale(&out, C64::new(nf, 0.0))
}

/// Trace of a bilinear form against the metric.
pub fn trace(g: &Bilinear, b: &Bilinear) -> Result<Jet> {
    let ginv = linalg::inverse(g, "metric")?;
    let d = g.len();
    let mut acc = g[0][0].space().zero();
    for i in 0..d {
        for j in 0..d {
            acc += &ginv[i][j] * &b[i][j];
        }
    }
    Ok(acc)
}

/// Norm of the trace-free part of `b` at the base point, measured with `g`:
/// `|b₀|² = g^{ik} g^{jl} b₀_{ij} conj(b₀_{kl})`, reported as its square root of the absolute value.
pub fn trace_free_norm(g: &Bilinear, b: &Bilinear) -> Result<f64> {
    let d = g.len();
    let gv: Vec<Vec<C64>> = g.iter().map(|r| r.iter().map(Jet::value).collect()).collect();
    let bv: Vec<Vec<C64>> = b.iter().map(|r| r.iter().map(Jet::value).collect()).collect();
    let space = JetSpace::new(1, 0);
    let gj: JetMatrix = gv.iter().map(|r| r.iter().map(|&z| space.constant(z)).collect()).collect();
    let ginv: Vec<Vec<C64>> =
        linalg::inverse(&gj, "metric")?.iter().map(|r| r.iter().map(Jet::value).collect()).collect();
    let mut tr = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            tr += ginv[i][j] * bv[i][j];
        }
    }
    let tf: Vec<Vec<C64>> =
        (0..d).map(|i| (0..d).map(|j| bv[i][j] - gv[i][j] * tr / d as f64).collect()).collect();
    // g^{-1} tf as an endomorphism; its Frobenius norm is signature independent
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            let mut e = C64::new(0.0, 0.0);
            for k in 0..d {
                e += ginv[i][k] * tf[k][j];
            }
            acc += e.norm_sqr();
        }
    }
    Ok(libm::sqrt(acc))
}

/// Signature `(positive, negative)` of a real symmetric base-point matrix.
pub fn signature(g: &Bilinear) -> Result<(usize, usize)> {
    let d = g.len();
    let mut imag: f64 = 0.0;
    let real: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let v = g[i][j].value();
                    imag = imag.max(v.im.abs());
                    v.re
                })
                .collect()
        })
        .collect();
    if imag > 1e-9 {
        return Err(Error::Inconsistent { what: "metric reality", residual: imag });
    }
    let ev = linalg::symmetric_eigenvalues(&real);
    let scale = ev.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let (p, q, z) = linalg::inertia(&ev, 1e-12 * scale.max(1e-300));
    if z > 0 {
        return Err(Error::Singular("metric"));
    }
    Ok((p, q))
}

/// `max|ĝ_F − e^{−2u}g_F|` over all common jet coefficients, where `ĝ_F` is
/// rebuilt from scratch for the contact form `e^{−2u}θ`.
pub fn conformal_covariance(cf: &Coframe, u: &Jet) -> Result<f64> {
    let geom = Geometry::new(cf.clone())?;
    let hat = Geometry::new(crate::gauge::rescale(cf, &(u * -1.0))?)?;
    let g = fefferman_metric(&FeffermanFrame::new(&geom));
    let gh = fefferman_metric(&FeffermanFrame::new(&hat));
    let order = gh[0][0].order().min(g[0][0].order());
    let space = &gh[0][0].space().clone();
    let factor = (u * -2.0).exp().lift(space);
    let mut worst: f64 = 0.0;
    for (r, s) in gh.iter().zip(&g) {
        for (a, b) in r.iter().zip(s) {
            let scaled = (&factor * &b.lift(space)).truncate(order);
            worst = worst.max(a.truncate(order).max_diff(&scaled));
        }
    }
    Ok(worst)
}
