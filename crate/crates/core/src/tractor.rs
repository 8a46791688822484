//! Tractors `(ℓ, τ, ψ)` in a gauge.
//!
//! Components are taken in the gauge's own trivialization: `ℓ` and `ψ`
//! against its reference density `ℓ_ref`, `τ_α` against its orthonormal
//! `θ^α ⊗ ℓ_ref`. The gauge is recorded as the accumulated log-scale `f`
//! (`θ_gauge = e^{2f}θ_chart`). The Hermitian pairing is antilinear in the
//! first slot.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::jet::{JetSpace, Jet, C64, I};
use crate::linalg;
use crate::pseudohermitian::Geometry;
use crate::tensor::Tensor;

/// Largest gauge-tag difference accepted as "same gauge".
const GAUGE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Tractor {
    pub ell: Jet,
    pub tau: Vec<Jet>,
    pub psi: Jet,
    pub gauge: Jet,
}

impl Tractor {
    /// Tractor in the chart's base gauge.
    pub fn new(ell: Jet, tau: Vec<Jet>, psi: Jet) -> Tractor {
        let gauge = ell.space().zero();
        Tractor { ell, tau, psi, gauge }
    }

    pub fn constant(space: &JetSpace, ell: C64, tau: &[C64], psi: C64) -> Tractor {
        Tractor::new(space.constant(ell), tau.iter().map(|&t| space.constant(t)).collect(), space.constant(psi))
    }

    /// Standard gauge frame: `e_0 = (1,0,0)`, `e_α`, `e_{n+1} = (0,0,1)`.
    pub fn standard_frame(space: &JetSpace, n: usize) -> Vec<Tractor> {
        (0..n + 2)
            .map(|k| {
                let mut comps = vec![C64::new(0.0, 0.0); n + 2];
                comps[k] = C64::new(1.0, 0.0);
                Tractor::constant(space, comps[0], &comps[1..=n], comps[n + 1])
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.tau.len()
    }

    pub fn space(&self) -> &JetSpace {
        self.ell.space()
    }

    /// `(ℓ, τ_1, …, τ_n, ψ)`.
    pub fn components(&self) -> Vec<&Jet> {
        let mut v = Vec::with_capacity(self.n() + 2);
        v.push(&self.ell);
        v.extend(self.tau.iter());
        v.push(&self.psi);
        v
    }

    pub fn from_components(mut comps: Vec<Jet>, gauge: Jet) -> Tractor {
        let psi = comps.pop().expect("at least two components");
        let ell = comps.remove(0);
        Tractor { ell, tau: comps, psi, gauge }
    }

    pub fn value(&self) -> Vec<C64> {
        self.components().iter().map(|j| j.value()).collect()
    }

    pub fn order(&self) -> usize {
        self.components().iter().map(|j| j.order()).min().unwrap_or(0)
    }

    fn map<F: Fn(&Jet) -> Jet>(&self, f: F) -> Tractor {
        Tractor { ell: f(&self.ell), tau: self.tau.iter().map(&f).collect(), psi: f(&self.psi), gauge: self.gauge.clone() }
    }

    pub fn truncate(&self, order: usize) -> Tractor {
        self.map(|j| j.truncate(order))
    }

    pub fn scale(&self, s: C64) -> Tractor {
        self.map(|j| j * s)
    }

    pub fn mul_fn(&self, f: &Jet) -> Tractor {
        self.map(|j| j * f)
    }

    pub fn add(&self, other: &Tractor) -> Result<Tractor> {
        same_gauge(self, other)?;
        Ok(Tractor {
            ell: &self.ell + &other.ell,
            tau: self.tau.iter().zip(&other.tau).map(|(a, b)| a + b).collect(),
            psi: &self.psi + &other.psi,
            gauge: self.gauge.clone(),
        })
    }

    pub fn sub(&self, other: &Tractor) -> Result<Tractor> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Largest coefficient difference over all slots.
    pub fn max_diff(&self, other: &Tractor) -> f64 {
        self.components().iter().zip(other.components()).fold(0.0, |m, (a, b)| m.max(a.max_diff(b)))
    }

    /// Largest base-point difference over all slots.
    pub fn value_diff(&self, other: &Tractor) -> f64 {
        self.value().iter().zip(other.value()).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn max_abs(&self) -> f64 {
        self.components().iter().fold(0.0, |m, j| m.max(j.max_abs()))
    }
}

fn same_gauge(a: &Tractor, b: &Tractor) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::Shape("tractors of different rank"));
    }
    if !a.gauge.space().same(b.gauge.space()) || a.gauge.max_diff(&b.gauge) > GAUGE_TOL {
        return Err(Error::GaugeMismatch);
    }
    Ok(())
}

/// Components of the tractor metric `h(σ₁,σ₂) = ℓ̄₁ψ₂ + ψ̄₁ℓ₂ + Σ τ̄₁τ₂`.
pub fn metric(s1: &Tractor, s2: &Tractor) -> Result<Jet> {
    same_gauge(s1, s2)?;
    let mut h = &s1.ell.conj() * &s2.psi + &s1.psi.conj() * &s2.ell;
    for (a, b) in s1.tau.iter().zip(&s2.tau) {
        h += &a.conj() * b;
    }
    Ok(h)
}

/// Base-point Gram matrix of the metric on `frame`.
pub fn gram(frame: &[Tractor]) -> Result<Vec<Vec<C64>>> {
    frame.iter().map(|a| frame.iter().map(|b| metric(a, b).map(|h| h.value())).collect()).collect()
}

/// `(positive, negative)` eigenvalue counts of the Gram matrix.
pub fn gram_signature(frame: &[Tractor]) -> Result<(usize, usize)> {
    let eig = linalg::hermitian_eigenvalues(&gram(frame)?);
    let (p, m, _) = linalg::inertia(&eig, 1e-12);
    Ok((p, m))
}

/// Determinant of the `(n+2)×(n+2)` component matrix, one tractor per column.
pub fn determinant(sigmas: &[Tractor]) -> Result<Jet> {
    let Some(first) = sigmas.first() else {
        return Err(Error::Shape("empty tractor list"));
    };
    if sigmas.len() != first.n() + 2 {
        return Err(Error::Shape("determinant needs n+2 tractors"));
    }
    for s in sigmas {
        same_gauge(first, s)?;
    }
    let cols: Vec<Vec<&Jet>> = sigmas.iter().map(|s| s.components()).collect();
    let rows: Vec<Vec<Jet>> = (0..sigmas.len()).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
    linalg::det(&rows)
}

/// Frame components `(ξ, Z_α, Z_ᾱ)` of `|ℓ|²ξ + i ℓ τ̄_α Z_α − i ℓ̄ τ_α Z_ᾱ`.
pub fn reeb_map(sig: &Tractor) -> Vec<Jet> {
    let n = sig.n();
    let lb = sig.ell.conj();
    let mut out = Vec::with_capacity(2 * n + 1);
    out.push((&sig.ell * &lb).re());
    for t in &sig.tau {
        out.push(&(&sig.ell * &t.conj()) * I);
    }
    for t in &sig.tau {
        out.push(&(&lb * t) * -I);
    }
    out
}

/// Change of gauge `θ ↦ e^{2f}θ`, `geom` being the geometry of the current
/// gauge: `ℓ̂ = e^f ℓ`, `τ̂_α = τ_α + 2f_α ℓ`,
/// `ψ̂ = e^{−f}(ψ − 2Σ f_ᾱ τ_α − (|d_b f|² + i f_0) ℓ)` with `|d_b f|² = 2Σ f_α f_ᾱ`.
/// The `e^{±f}` factors are the change of reference density; as sections of
/// the tractor bundle this is `ℓ ↦ ℓ`, `τ ↦ τ + 2∂_b f ⊗ ℓ`, `ψ ↦ ψ − …`.
pub fn gauge_transform(sig: &Tractor, f: &Jet, geom: &Geometry) -> Result<Tractor> {
    let n = sig.n();
    if n != geom.n() {
        return Err(Error::Shape("tractor rank does not match geometry"));
    }
    let fr = &geom.frame;
    let f0 = fr.apply(0, f)?;
    let fa: Vec<Jet> = (0..n).map(|a| fr.apply(geom.z(a), f)).collect::<Result<_>>()?;
    let fb: Vec<Jet> = (0..n).map(|a| fr.apply(geom.zb(a), f)).collect::<Result<_>>()?;
    let mut norm = f.space().zero();
    let mut contr = f.space().zero();
    for a in 0..n {
        norm += &fa[a] * &fb[a];
        contr += &fb[a] * &sig.tau[a];
    }
    let ef = f.exp();
    let inv = (-f).exp();
    let ell = &ef * &sig.ell;
    let tau = (0..n).map(|a| &sig.tau[a] + &(&(&fa[a] * &sig.ell) * 2.0)).collect();
    let corr = &(&norm * 2.0) + &(&f0 * I);
    let psi = &inv * &(&(&sig.psi - &(&contr * 2.0)) - &(&corr * &sig.ell));
    Ok(Tractor { ell, tau, psi, gauge: &sig.gauge + f })
}

/// First and second covariant derivatives of densities, with the weight of
/// `L` included: `∇_b(T ⊗ ℓ_ref) = (∇_b T + λ_b T) ⊗ ℓ_ref`.
pub struct DensityCalculus<'a> {
    pub geom: &'a Geometry,
    /// `λ(E_b)` for the density connection `∇ℓ_ref = λ ⊗ ℓ_ref`.
    pub lambda: Vec<Jet>,
}

impl<'a> DensityCalculus<'a> {
    pub fn new(geom: &'a Geometry) -> Result<DensityCalculus<'a>> {
        let lambda = geom.frame.comps1(&geom.l_form)?;
        Ok(DensityCalculus { geom, lambda })
    }

    pub fn cov_deriv(&self, t: &Tensor) -> Result<Tensor> {
        let mut out = t.cov_deriv(&self.geom.conn)?;
        let m = t.dim();
        let len = m.pow(t.rank() as u32);
        let mut idx = vec![0; t.rank() + 1];
        for k in 0..len {
            let mut r = k;
            for slot in (0..t.rank()).rev() {
                idx[slot] = r % m;
                r /= m;
            }
            let v = t.get(&idx[..t.rank()]);
            for b in 0..m {
                idx[t.rank()] = b;
                let w = out.get(&idx) + &(&self.lambda[b] * v);
                out.set(&idx, w);
            }
        }
        Ok(out)
    }

    /// Holonomic 2-jet of the density `component · ℓ_ref`.
    pub fn holonomic(&self, component: &Jet) -> Result<HolonomicJet> {
        let g = self.geom;
        let n = g.n();
        let nf = n as f64;
        let d1 = self.cov_deriv(&Tensor::scalar(n, component.clone()))?;
        let d2 = self.cov_deriv(&d1)?;
        let kappa = 1.0 / (2.0 * (nf + 1.0) * (nf + 2.0));
        let psi = &(d1.get(&[0]) * -I) + &(&(&g.scalar * component) * kappa);
        let dpsi = self.cov_deriv(&Tensor::scalar(n, psi.clone()))?;
        Ok(HolonomicJet { n, ell: component.clone(), d1, d2, psi, dpsi })
    }
}

/// `j¹` and the second-order data of a density, all in one gauge.
#[derive(Clone, Debug)]
pub struct HolonomicJet {
    pub n: usize,
    pub ell: Jet,
    /// `ℓ_a` (frame index `a`).
    pub d1: Tensor,
    /// `ℓ_{ab}`, derivative index last.
    pub d2: Tensor,
    /// `ψ = −iℓ_0 + R ℓ / (2(n+1)(n+2))`.
    pub psi: Jet,
    pub dpsi: Tensor,
}

impl HolonomicJet {
    /// `(ℓ, ∇^{1,0}ℓ, ψ)`.
    pub fn tractor(&self) -> Tractor {
        let tau = (0..self.n).map(|a| self.d1.get(&[1 + a]).clone()).collect();
        Tractor::new(self.ell.clone(), tau, self.psi.clone())
    }

    pub fn jet2(&self) -> Jet2Tractor {
        let n = self.n;
        Jet2Tractor {
            base: self.tractor(),
            ell_ab: (0..n).map(|a| (0..n).map(|b| self.d2.get(&[1 + a, 1 + b]).clone()).collect()).collect(),
            psi_a: (0..n).map(|a| self.dpsi.get(&[1 + a]).clone()).collect(),
            psi_0: self.dpsi.get(&[0]).clone(),
        }
    }

    /// Largest `|ℓ_ᾱ|` coefficient: zero for CR-holomorphic densities.
    pub fn dbar_residual(&self) -> f64 {
        (0..self.n).fold(0.0, |m, a| m.max(self.d1.get(&[1 + self.n + a]).max_abs()))
    }
}

/// Tractor together with the free second-order slots `ℓ_{αβ}`, `ψ_α`, `ψ_0`.
#[derive(Clone, Debug)]
pub struct Jet2Tractor {
    pub base: Tractor,
    pub ell_ab: Vec<Vec<Jet>>,
    pub psi_a: Vec<Jet>,
    pub psi_0: Jet,
}

/// Second-order components fixed by CR-holomorphicity of a 2-jet.
#[derive(Clone, Debug)]
pub struct Determined {
    /// `ℓ_{αβ̄} = −P_{αβ̄}ℓ − δ_{αβ}ψ`.
    pub ell_a_bbar: Vec<Vec<Jet>>,
    /// `ℓ_{0ᾱ} = −(1/(n+2)) A_{ᾱβ̄,β} ℓ + A_{ᾱβ̄} ℓ_β`.
    pub ell_0_abar: Vec<Jet>,
}

impl Jet2Tractor {
    pub fn determined(&self, geom: &Geometry) -> Result<Determined> {
        let n = geom.n();
        let s = &self.base;
        let nf = n as f64;
        let ell_a_bbar = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let mut v = -&(geom.schouten.get(&[geom.z(a), geom.zb(b)]) * &s.ell);
                        if a == b {
                            v -= &s.psi;
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let da = geom.torsion.cov_deriv(&geom.conn)?;
        let ell_0_abar = (0..n)
            .map(|a| {
                let mut div = s.ell.space().zero();
                let mut v = s.ell.space().zero();
                for b in 0..n {
                    div += da.get(&[geom.zb(a), geom.zb(b), geom.z(b)]);
                    v += geom.torsion.get(&[geom.zb(a), geom.zb(b)]) * &s.tau[b];
                }
                &v - &(&(&div * &s.ell) * (1.0 / (nf + 2.0)))
            })
            .collect();
        Ok(Determined { ell_a_bbar, ell_0_abar })
    }

    /// `R̂ = −n(n+1) h(σ,σ)`: scalar curvature of the contact form normalized by `ℓ`.
    pub fn scalar_function(&self) -> Result<Jet> {
        let n = self.base.n() as f64;
        Ok(metric(&self.base, &self.base)?.re() * -(n * (n + 1.0)))
    }

    /// `Â ⊗ ℓ = −iℓ_{αβ} + A_{αβ}ℓ`.
    pub fn torsion_function(&self, geom: &Geometry) -> Vec<Vec<Jet>> {
        let n = geom.n();
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| &(&self.ell_ab[a][b] * -I) + &(geom.torsion.get(&[geom.z(a), geom.z(b)]) * &self.base.ell))
                    .collect()
            })
            .collect()
    }

    pub fn max_diff(&self, other: &Jet2Tractor) -> f64 {
        let mut m = self.base.max_diff(&other.base).max(self.psi_0.max_diff(&other.psi_0));
        for (a, b) in self.psi_a.iter().zip(&other.psi_a) {
            m = m.max(a.max_diff(b));
        }
        for (ra, rb) in self.ell_ab.iter().zip(&other.ell_ab) {
            for (a, b) in ra.iter().zip(rb) {
                m = m.max(a.max_diff(b));
            }
        }
        m
    }
}

/// The prolongation `r(σ)`: `ℓ_{αβ} = −iA_{αβ}ℓ`, `ψ_α = P_{αβ̄}τ_β − T_α ℓ`,
/// `ψ_0 = −iSℓ − 2iT_ᾱτ_α − iRψ/(2(n+1)(n+2))`.
pub fn prolongation(sig: &Tractor, geom: &Geometry) -> Jet2Tractor {
    let n = geom.n();
    let nf = n as f64;
    let kappa = 1.0 / (2.0 * (nf + 1.0) * (nf + 2.0));
    let (z, zb) = (|a| 1 + a, |a| 1 + n + a);
    let ell_ab = (0..n)
        .map(|a| (0..n).map(|b| &(geom.torsion.get(&[z(a), z(b)]) * &sig.ell) * -I).collect())
        .collect();
    let psi_a = (0..n)
        .map(|a| {
            let mut v = -&(geom.t.get(&[z(a)]) * &sig.ell);
            for b in 0..n {
                v += geom.schouten.get(&[z(a), zb(b)]) * &sig.tau[b];
            }
            v
        })
        .collect();
    let mut psi_0 = &(&geom.s * &sig.ell) * -I;
    for b in 0..n {
        psi_0 -= &(geom.t.get(&[zb(b)]) * &sig.tau[b]) * (I * 2.0);
    }
    psi_0 -= &(&geom.scalar * &sig.psi) * (I * kappa);
    Jet2Tractor { base: sig.clone(), ell_ab, psi_a, psi_0 }
}
