//! Conformal rescaling of the contact form and the density bundle `L`.
//!
//! A change of gauge is stored as `f` with `θ̂ = e^{2f}θ`; the other common
//! convention `θ̂ = e^{−2ρ}θ` is `ρ = −f`. The reference density `ℓ_ref` of a
//! coframe satisfies `ℓ_ref^{−(n+2)} = θ∧θ^1∧…∧θ^n`, so the rescaled
//! reference density is `e^{−f}ℓ_ref`.

use alloc::vec::Vec;

use crate::coframe::Coframe;
use crate::error::{Error, Result};
use crate::form::Form;
use crate::jet::{Jet, I};
use crate::pseudohermitian::Geometry;
use crate::tensor::Tensor;

/// Orthonormal coframe of `e^{2f}θ`, built from `(e^{2f}θ, e^f θ^α)` by the
/// Reeb normalization; consumes one jet order.
pub fn rescale(cf: &Coframe, f: &Jet) -> Result<Coframe> {
    let e1 = f.exp();
    let e2 = &e1 * &e1;
    let theta_a = cf.theta_a.iter().map(|t| t.mul_fn(&e1)).collect();
    Coframe::new(cf.theta.mul_fn(&e2), theta_a)?.orthonormalize()
}

#[derive(Clone, Debug)]
pub struct GaugeChange {
    pub f: Jet,
}

impl GaugeChange {
    pub fn from_f(f: Jet) -> GaugeChange {
        GaugeChange { f }
    }

    /// `θ̂ = e^{−2ρ}θ`.
    pub fn from_rho(rho: &Jet) -> GaugeChange {
        GaugeChange { f: -rho }
    }

    pub fn rho(&self) -> Jet {
        -&self.f
    }

    pub fn apply(&self, cf: &Coframe) -> Result<Coframe> {
        rescale(cf, &self.f)
    }

    /// The change back to the original contact form.
    pub fn inverse(&self) -> GaugeChange {
        GaugeChange { f: -&self.f }
    }
}

/// `u = ½ log|ℓ|²`: the contact form `e^{−2u}θ` gives `ℓ` unit length.
pub fn normalize_density(ell_norm_sq: f64) -> Result<f64> {
    if !(ell_norm_sq > 0.0) || !ell_norm_sq.is_finite() {
        return Err(Error::Singular("zero density"));
    }
    Ok(0.5 * libm::log(ell_norm_sq))
}

/// Jet version of [`normalize_density`] for `ℓ = F ℓ_ref`.
pub fn normalize_density_jet(component: &Jet) -> Result<Jet> {
    let norm_sq = (component * &component.conj()).re();
    if norm_sq.value().re <= 0.0 {
        return Err(Error::Singular("zero density"));
    }
    Ok(norm_sq.ln()? * 0.5)
}

/// Connection forms on `L` in the gauge of `ℓ_ref`: `∇ℓ_ref = l_form ⊗ ℓ_ref`.
#[derive(Clone, Debug)]
pub struct DensityGauge {
    pub l_form: Form,
    pub weyl_form: Form,
}

impl DensityGauge {
    /// `∇(F ℓ_ref) = (dF + F λ) ℓ_ref`, as the 1-form coefficient.
    pub fn covariant(&self, component: &Jet) -> Result<Form> {
        Form::function(component.clone()).d()?.add(&self.l_form.mul_fn(component))
    }
}

pub fn weyl_connection(geom: &Geometry) -> DensityGauge {
    DensityGauge { l_form: geom.l_form.clone(), weyl_form: geom.weyl_form.clone() }
}

/// First and second covariant derivatives of `f`, derivative index last.
fn derivatives(geom: &Geometry, f: &Jet) -> Result<(Tensor, Tensor)> {
    let d1 = Tensor::scalar(geom.n(), f.clone()).cov_deriv(&geom.conn)?;
    let d2 = d1.cov_deriv(&geom.conn)?;
    Ok((d1, d2))
}

/// Two-sided residual of the change of the density connection under
/// `θ ↦ e^{2f}θ`, tested on the density `density·ℓ_ref`:
/// `∇̂ℓ − ∇ℓ = 2∂_b f ⊗ ℓ + (2/(n+2))(f_0 + iΣ f_{ᾱα} + i(n+1)|d_b f|²) θ ⊗ ℓ`,
/// with `|d_b f|² = 2Σ f_α f_ᾱ`. Compares all frame components.
pub fn check_l_transform(geom: &Geometry, f: &Jet, density: &Jet) -> Result<f64> {
    let n = geom.n();
    let nf = n as f64;
    let hat = Geometry::new(rescale(&geom.coframe, f)?)?;
    let ef = f.exp();
    // the component of ℓ in the rescaled gauge is e^f·density
    let hat_cov = Form::function(&ef * density).d()?.add(&hat.l_form.mul_fn(&(&ef * density)))?;
    let lhs = hat_cov.mul_fn(&(-f).exp()).sub(&weyl_connection(geom).covariant(density)?)?;
    let lhs = geom.frame.comps1(&lhs)?;

    let (d1, d2) = derivatives(geom, f)?;
    let space = geom.coframe.space();
    let mut lap = space.zero();
    let mut norm = space.zero();
    for a in 0..n {
        lap += d2.get(&[geom.zb(a), geom.z(a)]);
        norm += d1.get(&[geom.z(a)]) * d1.get(&[geom.zb(a)]);
    }
    let norm = norm * 2.0;
    let theta_coeff = (d1.get(&[0]) + &(&lap * I) + &(&norm * (I * (nf + 1.0)))) * (2.0 / (nf + 2.0));
    let mut rhs: Vec<Jet> = Vec::with_capacity(geom.coframe.dim());
    rhs.push(&theta_coeff * density);
    for a in 0..n {
        rhs.push(&(d1.get(&[geom.z(a)]) * 2.0) * density);
    }
    for _ in 0..n {
        rhs.push(space.zero());
    }
    Ok(lhs.iter().zip(&rhs).fold(0.0, |m, (l, r)| m.max(l.max_diff(r))))
}

/// Right-hand sides of the rescaling laws for `T_α` and `S` under
/// `θ̂ = e^{−2ρ}θ`, in the frame of `θ`: the predicted `e^{−2ρ}T̂_α` and `e^{−4ρ}Ŝ`.
pub fn predicted_ts(geom: &Geometry, rho: &Jet) -> Result<(Vec<Jet>, Jet)> {
    let n = geom.n();
    let (d1, d2) = derivatives(geom, rho)?;
    let z = |a: usize| geom.z(a);
    let zb = |a: usize| geom.zb(a);
    let d = |i: usize| d1.get(&[i]);
    let dd = |i: usize, j: usize| d2.get(&[i, j]);
    let t = |i: usize| geom.t.get(&[i]);
    let a = |i: usize, j: usize| geom.torsion.get(&[i, j]);
    let p = |i: usize, j: usize| geom.schouten.get(&[i, j]);
    let space = geom.coframe.space();

    let mut norm = space.zero();
    for al in 0..n {
        norm += d(z(al)) * d(zb(al));
    }
    let mut t_hat = Vec::with_capacity(n);
    for al in 0..n {
        let mut v = t(z(al)) - &(dd(0, z(al)) * I);
        for be in 0..n {
            v -= &(p(z(al), zb(be)) * d(z(be))) * 2.0;
            v += &(a(z(al), z(be)) * d(zb(be))) * (I * 2.0);
            v += &(dd(z(al), z(be)) * d(zb(be))) * 2.0;
            v -= &(dd(z(al), zb(be)) * d(z(be))) * 2.0;
        }
        v += &(d(z(al)) * &norm) * 4.0;
        t_hat.push(v);
    }

    let mut s = &geom.s - dd(0, 0);
    s -= d(0) * d(0);
    for al in 0..n {
        s += (t(z(al)) * d(zb(al)) + t(zb(al)) * d(z(al))) * 6.0;
        s += (dd(0, zb(al)) * d(z(al)) - dd(0, z(al)) * d(zb(al))) * (I * 4.0);
        for be in 0..n {
            let (ra, rb, rab, rbb) = (d(z(al)), d(z(be)), d(zb(al)), d(zb(be)));
            s += (&(a(z(al), z(be)) * rab) * rbb - &(a(zb(al), zb(be)) * ra) * rb) * (I * 6.0);
            s -= &(p(z(al), zb(be)) * rab) * rb * 12.0;
            s += (&(dd(z(al), z(be)) * rab) * rbb + &(dd(zb(al), zb(be)) * ra) * rb) * 4.0;
            s -= &((dd(z(al), zb(be)) + dd(zb(be), z(al))) * rab) * rb * 4.0;
        }
    }
    s += &norm * &norm * 12.0;
    Ok((t_hat, s))
}

/// Two-sided residuals `(T, S)` of the rescaling laws under `θ̂ = e^{−2ρ}θ`.
/// The left sides are computed from scratch in the rescaled gauge and brought
/// to the frame of `θ` (`Ẑ_α = e^ρ Z_α`).
pub fn check_ts_transform(geom: &Geometry, rho: &Jet) -> Result<(f64, f64)> {
    let hat = Geometry::new(rescale(&geom.coframe, &-rho)?)?;
    let (t_pred, s_pred) = predicted_ts(geom, rho)?;
    let e1 = (-rho).exp();
    let e2 = &e1 * &e1;
    let e3 = &e2 * &e1;
    let mut rt: f64 = 0.0;
    for (al, pred) in t_pred.iter().enumerate() {
        let lhs = hat.t.get(&[hat.z(al)]) * &e3;
        rt = rt.max(lhs.max_diff(pred));
    }
    let lhs_s = &hat.s * &(&e2 * &e2);
    Ok((rt, lhs_s.max_diff(&s_pred)))
}
