//! The canonical Cartan connection on tractors, its curvature tensors and the
//! sphericity test.
//!
//! Frame directions are indexed like the coframe: `0` is `ξ`, `1..=n` are
//! `Z_α`, `n+1..=2n` are `Z_ᾱ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::coframe::bracket;
use crate::error::{Error, Result};
use crate::jet::{Jet, C64, I};
use crate::pseudohermitian::{norm2, Geometry};
use crate::tensor::Tensor;
use crate::tractor::{determinant, metric, DensityCalculus, Tractor};

/// Precomputed pieces of the Cartan derivative for one geometry.
pub struct Cartan<'a> {
    pub geom: &'a Geometry,
    lambda: Vec<Jet>,
    /// `R/(2(n+1)(n+2))`.
    kappa_r: Jet,
}

impl<'a> Cartan<'a> {
    pub fn new(geom: &'a Geometry) -> Result<Cartan<'a>> {
        let dc = DensityCalculus::new(geom)?;
        let nf = geom.n() as f64;
        let kappa_r = &geom.scalar * (1.0 / (2.0 * (nf + 1.0) * (nf + 2.0)));
        Ok(Cartan { geom, lambda: dc.lambda, kappa_r })
    }

    fn n(&self) -> usize {
        self.geom.n()
    }

    /// `𝔇_{E_b} σ`.
    pub fn derivative(&self, sig: &Tractor, b: usize) -> Result<Tractor> {
        let g = self.geom;
        let n = self.n();
        if sig.n() != n {
            return Err(Error::Shape("tractor rank does not match geometry"));
        }
        if b > 2 * n {
            return Err(Error::Shape("frame direction out of range"));
        }
        if sig.order() == 0 {
            return Err(Error::OrderExhausted { what: "Cartan derivative" });
        }
        let fr = &g.frame;
        let (z, zb) = (|a| 1 + a, |a| 1 + n + a);
        let lam = &self.lambda[b];
        let dl = |j: &Jet| -> Result<Jet> { Ok(&fr.apply(b, j)? + &(lam * j)) };
        let mut ell = dl(&sig.ell)?;
        let mut psi = dl(&sig.psi)?;
        let mut tau = Vec::with_capacity(n);
        for al in 0..n {
            let mut v = dl(&sig.tau[al])?;
            for ga in 0..n {
                v -= &g.conn.gamma[z(ga)][z(al)][b] * &sig.tau[ga];
            }
            tau.push(v);
        }
        let a = |i, j| g.torsion.get(&[i, j]);
        let p = |i, j| g.schouten.get(&[i, j]);
        let t = |i| g.t.get(&[i]);
        if b == 0 {
            ell += &(&self.kappa_r * &sig.ell) * I;
            ell -= &sig.psi * I;
            for al in 0..n {
                let mut v = &(&self.kappa_r * &sig.tau[al]) * I;
                v += &(t(z(al)) * &sig.ell) * (I * 2.0);
                for ga in 0..n {
                    v -= &(p(z(al), zb(ga)) * &sig.tau[ga]) * I;
                }
                tau[al] += v;
            }
            psi += &(&self.kappa_r * &sig.psi) * I;
            psi += &(&g.s * &sig.ell) * I;
            for ga in 0..n {
                psi += &(t(zb(ga)) * &sig.tau[ga]) * (I * 2.0);
            }
        } else if b <= n {
            let be = b - 1;
            ell -= &sig.tau[be];
            for al in 0..n {
                tau[al] += &(a(z(be), z(al)) * &sig.ell) * I;
            }
            psi += t(z(be)) * &sig.ell;
            for ga in 0..n {
                psi -= p(z(be), zb(ga)) * &sig.tau[ga];
            }
        } else {
            let be = b - 1 - n;
            for al in 0..n {
                tau[al] += p(z(al), zb(be)) * &sig.ell;
            }
            tau[be] += &sig.psi;
            psi -= t(zb(be)) * &sig.ell;
            for ga in 0..n {
                psi += &(a(zb(be), zb(ga)) * &sig.tau[ga]) * I;
            }
        }
        Ok(Tractor { ell, tau, psi, gauge: sig.gauge.clone() })
    }

    /// `𝔇_X σ` for `X = Σ coeffs[b] E_b`.
    pub fn derivative_along(&self, sig: &Tractor, coeffs: &[Jet]) -> Result<Tractor> {
        let mut acc: Option<Tractor> = None;
        for (b, c) in coeffs.iter().enumerate() {
            if c.max_abs() == 0.0 {
                continue;
            }
            let d = self.derivative(sig, b)?.mul_fn(c);
            acc = Some(match acc {
                None => d,
                Some(s) => s.add(&d)?,
            });
        }
        match acc {
            Some(s) => Ok(s),
            None => Ok(sig.mul_fn(&sig.space().zero()).truncate(sig.order().saturating_sub(1))),
        }
    }

    /// Curvature as `𝔇_a𝔇_b σ − 𝔇_b𝔇_a σ − 𝔇_{[E_a,E_b]} σ`, with the bracket
    /// computed from the frame jets.
    pub fn curvature_numeric(&self, sig: &Tractor, a: usize, b: usize) -> Result<Tractor> {
        let g = self.geom;
        let fr = &g.frame;
        let ab = self.derivative(&self.derivative(sig, b)?, a)?;
        let ba = self.derivative(&self.derivative(sig, a)?, b)?;
        let br = bracket(fr.vector(a), fr.vector(b))?;
        let coeffs = fr.to_frame(&g.coframe, &br)?;
        let lie = self.derivative_along(sig, &coeffs)?;
        ab.sub(&ba)?.sub(&lie)
    }

    /// Largest base-point `|X·h(σ₁,σ₂) − h(𝔇_X̄σ₁,σ₂) − h(σ₁,𝔇_Xσ₂)|` over frame directions.
    pub fn metric_compatibility(&self, s1: &Tractor, s2: &Tractor) -> Result<f64> {
        let n = self.n();
        let h = metric(s1, s2)?;
        let mut r: f64 = 0.0;
        for b in 0..=2 * n {
            let lhs = self.geom.frame.apply(b, &h)?;
            let bb = crate::coframe::bar(n, b);
            let rhs = metric(&self.derivative(s1, bb)?, s2)? + metric(s1, &self.derivative(s2, b)?)?;
            r = r.max((lhs.value() - rhs.value()).norm());
        }
        Ok(r)
    }

    /// Largest base-point deviation of `X·det(σ_0,…,σ_{n+1})` from the Leibniz sum over `𝔇_X`.
    pub fn determinant_compatibility(&self, frame: &[Tractor]) -> Result<f64> {
        let n = self.n();
        let d = determinant(frame)?;
        let mut r: f64 = 0.0;
        for b in 0..=2 * n {
            let lhs = self.geom.frame.apply(b, &d)?;
            let mut rhs = C64::new(0.0, 0.0);
            for k in 0..frame.len() {
                let mut f2: Vec<Tractor> = frame.to_vec();
                f2[k] = self.derivative(&frame[k], b)?;
                let o = f2[k].order();
                let f2: Vec<Tractor> = f2.iter().map(|s| s.truncate(o)).collect();
                rhs += determinant(&f2)?.value();
            }
            r = r.max((lhs.value() - rhs).norm());
        }
        Ok(r)
    }

    /// Matrix of the zeroth-order part of `𝔇_{E_b}`, acting on `(ℓ, τ, ψ)`.
    fn algebraic(&self, b: usize) -> Result<Vec<Vec<Jet>>> {
        let n = self.n();
        let space = self.geom.coframe.space().clone();
        let k = n + 2;
        let mut cols = Vec::with_capacity(k);
        for e in 0..k {
            let mut comps = vec![space.zero(); k];
            comps[e] = space.real(1.0);
            let sig = Tractor::from_components(comps, space.zero());
            cols.push(self.derivative(&sig, b)?);
        }
        Ok((0..k).map(|r| cols.iter().map(|c| c.components()[r].clone()).collect()).collect())
    }

    /// Jet of the `𝔇`-parallel section through `value` at the base point,
    /// solved order by order along the chart coordinates. Only meaningful
    /// where the curvature vanishes.
    pub fn parallel_section(&self, value: &[C64], order: usize) -> Result<Tractor> {
        let n = self.n();
        let k = n + 2;
        if value.len() != k {
            return Err(Error::Shape("parallel_section needs n+2 values"));
        }
        let cf = &self.geom.coframe;
        let space = cf.space().clone();
        let nv = space.nvars();
        let m = cf.dim();
        let alg: Vec<Vec<Vec<Jet>>> = (0..m).map(|b| self.algebraic(b)).collect::<Result<_>>()?;
        // 𝔇_{∂_i} = ∂_i + Σ_b θ^b(∂_i) M_b
        let coords: Vec<Vec<Vec<Jet>>> = (0..nv)
            .map(|i| {
                (0..k)
                    .map(|r| {
                        (0..k)
                            .map(|c| {
                                (0..m).fold(space.zero(), |acc, b| acc + &(&cf.basis(b).comps()[i] * &alg[b][r][c]))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let avail = coords.iter().flatten().flatten().map(Jet::order).min().unwrap_or(0);
        if order > avail + 1 {
            return Err(Error::OrderExhausted { what: "parallel section" });
        }
        let len = space.coeff_count(order);
        let mut coeffs: Vec<Vec<C64>> = value.iter().map(|&v| {
            let mut c = vec![C64::new(0.0, 0.0); len];
            c[0] = v;
            c
        }).collect();
        for deg in 0..order {
            let cur: Vec<Jet> = coeffs.iter().map(|c| Jet::from_coeffs(&space, order, c.clone())).collect();
            let rhs: Vec<Vec<Jet>> = (0..nv)
                .map(|i| {
                    (0..k)
                        .map(|r| (0..k).fold(space.zero(), |acc, c| acc - &(&coords[i][r][c] * &cur[c])))
                        .collect()
                })
                .collect();
            for idx in space.coeff_count(deg)..space.coeff_count(deg + 1) {
                let exps = space.exponents(idx).to_vec();
                let Some(i) = exps.iter().position(|&e| e > 0) else { continue };
                let mut lower = exps.clone();
                lower[i] -= 1;
                for r in 0..k {
                    coeffs[r][idx] = rhs[i][r].coeff(&lower) / f64::from(exps[i]);
                }
            }
        }
        let comps = coeffs.into_iter().map(|c| Jet::from_coeffs(&space, order, c)).collect();
        Ok(Tractor::from_components(comps, space.zero()))
    }
}

pub fn cartan_derivative(geom: &Geometry, sig: &Tractor, dir: usize) -> Result<Tractor> {
    Cartan::new(geom)?.derivative(sig, dir)
}

/// Curvature tensors `W, V, Q, U, Y`, stored with their conjugate blocks.
#[derive(Clone, Debug)]
pub struct CartanCurvature {
    pub n: usize,
    /// `W_{αβ̄ρσ̄}`.
    pub w: Tensor,
    /// `V_{αβ̄ρ}`.
    pub v: Tensor,
    /// `Q_{αβ}`.
    pub q: Tensor,
    /// `U_{αβ̄}`.
    pub u: Tensor,
    /// `Y_α = T_{α,0} − iS_{,α} + 2iP_{αρ̄}T_ρ − 3A_{αρ}T_ρ̄`.
    pub y: Tensor,
}

pub fn curvature_tensors(geom: &Geometry) -> Result<CartanCurvature> {
    let n = geom.n();
    let space = geom.coframe.space().clone();
    let conn = &geom.conn;
    let (z, zb) = (|a| 1 + a, |a| 1 + n + a);
    let a = |i, j| geom.torsion.get(&[i, j]);
    let p = |i, j| geom.schouten.get(&[i, j]);
    let t = |i| geom.t.get(&[i]);
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let da = geom.torsion.cov_deriv(conn)?;
    let dp = geom.schouten.cov_deriv(conn)?;
    let dt = geom.t.cov_deriv(conn)?;
    let ds = Tensor::scalar(n, geom.s.clone()).cov_deriv(conn)?;

    let mut w = Tensor::zeros(&space, n, 4);
    let mut v = Tensor::zeros(&space, n, 3);
    let mut q = Tensor::zeros(&space, n, 2);
    let mut u = Tensor::zeros(&space, n, 2);
    let mut y = Tensor::zeros(&space, n, 1);
    for al in 0..n {
        for be in 0..n {
            for rh in 0..n {
                for si in 0..n {
                    let mut x = geom.curvature.get(&[z(al), zb(be), z(rh), zb(si)]).clone();
                    x -= p(z(al), zb(be)) * delta(rh, si);
                    x -= p(z(rh), zb(si)) * delta(al, be);
                    x -= p(z(al), zb(si)) * delta(rh, be);
                    x -= p(z(rh), zb(be)) * delta(al, si);
                    w.set(&[zb(al), z(be), zb(rh), z(si)], x.conj());
                    w.set(&[z(al), zb(be), z(rh), zb(si)], x);
                }
                let mut x = da.get(&[z(al), z(rh), zb(be)]) + &(dp.get(&[z(al), zb(be), z(rh)]) * I);
                x -= &(t(z(rh)) * I) * delta(al, be);
                x -= &(t(z(al)) * (I * 2.0)) * delta(rh, be);
                v.set(&[zb(al), z(be), zb(rh)], x.conj());
                v.set(&[z(al), zb(be), z(rh)], x);
            }
            let mut x = &(da.get(&[z(al), z(be), 0]) * I) - &(dt.get(&[z(al), z(be)]) * (I * 2.0));
            let mut uu = dt.get(&[z(al), zb(be)]) + dt.get(&[zb(be), z(al)]);
            for rh in 0..n {
                x += &(p(z(al), zb(rh)) * a(z(rh), z(be))) * 2.0;
                uu += p(z(al), zb(rh)) * p(z(rh), zb(be));
                uu -= a(z(al), z(rh)) * a(zb(rh), zb(be));
            }
            if al == be {
                uu += &geom.s;
            }
            q.set(&[zb(al), zb(be)], x.conj());
            q.set(&[z(al), z(be)], x);
            u.set(&[zb(al), z(be)], uu.conj());
            u.set(&[z(al), zb(be)], uu);
        }
        let mut x = dt.get(&[z(al), 0]) - &(ds.get(&[z(al)]) * I);
        for rh in 0..n {
            x += &(p(z(al), zb(rh)) * t(z(rh))) * (I * 2.0);
            x -= &(a(z(al), z(rh)) * t(zb(rh))) * 3.0;
        }
        y.set(&[zb(al)], x.conj());
        y.set(&[z(al)], x);
    }
    Ok(CartanCurvature { n, w, v, q, u, y })
}

impl CartanCurvature {
    /// Base-point norms of `(W, V, Q, U, Y)`.
    pub fn norms(&self) -> [f64; 5] {
        [norm2(&self.w, 4), norm2(&self.v, 3), norm2(&self.q, 2), norm2(&self.u, 2), norm2(&self.y, 1)]
    }

    /// Largest `|Q_{αβ} − Q_{βα}|` over all coefficients.
    pub fn q_symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut r: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                r = r.max(self.q.get(&[1 + a, 1 + b]).max_diff(self.q.get(&[1 + b, 1 + a])));
            }
        }
        r
    }

    /// Largest `|Σ_α U_{αᾱ}|` coefficient.
    pub fn u_trace(&self) -> f64 {
        let n = self.n;
        let tr = (0..n).fold(self.u.get(&[1, 1 + n]).space().zero(), |acc, a| acc + self.u.get(&[1 + a, 1 + n + a]));
        tr.max_abs()
    }

    /// Largest coefficient of the trace `Σ_α W_{αᾱρσ̄}`.
    pub fn w_trace(&self) -> f64 {
        let n = self.n;
        let mut r: f64 = 0.0;
        for rh in 0..n {
            for si in 0..n {
                let tr = (0..n).fold(self.w.get(&[1, 1 + n, 1, 1 + n]).space().zero(), |acc, a| {
                    acc + self.w.get(&[1 + a, 1 + n + a, 1 + rh, 1 + n + si])
                });
                r = r.max(tr.max_abs());
            }
        }
        r
    }

    /// `R(E_a, E_b)σ = [𝔇_a, 𝔇_b]σ − 𝔇_{[E_a,E_b]}σ` assembled from the tensors.
    /// With this sign convention the curvature is minus
    /// `θ^ρ∧θ^σ̄ ⊗ (0, iV_{ρσ̄α}ℓ + W_{ρσ̄αβ̄}τ_β, U_{ρσ̄}ℓ − iV_{σ̄ρβ̄}τ_β)`
    /// `+ θ^ρ∧θ ⊗ (0, Q_{ρα}ℓ + V_{ρβ̄α}τ_β, Y_ρℓ − iU_{ρβ̄}τ_β)`
    /// `− θ^ρ̄∧θ ⊗ (0, iU_{αρ̄}ℓ + V_{β̄αρ̄}τ_β, Y_ρ̄ℓ + Q_{ρ̄β̄}τ_β)`.
    pub fn action(&self, sig: &Tractor, a: usize, b: usize) -> Tractor {
        let n = self.n;
        let (z, zb) = (|x| 1 + x, |x| 1 + n + x);
        let space = sig.space().clone();
        let mut out = Tractor { ell: space.zero(), tau: vec![space.zero(); n], psi: space.zero(), gauge: sig.gauge.clone() };
        let pair = |p: usize, q: usize| -> f64 {
            (if p == b && q == a { 1.0 } else { 0.0 }) - (if p == a && q == b { 1.0 } else { 0.0 })
        };
        let (w, v, q, u, y) = (&self.w, &self.v, &self.q, &self.u, &self.y);
        for rh in 0..n {
            for si in 0..n {
                let c = pair(z(rh), zb(si));
                if c == 0.0 {
                    continue;
                }
                for al in 0..n {
                    let mut x = &(v.get(&[z(rh), zb(si), z(al)]) * &sig.ell) * I;
                    for be in 0..n {
                        x += w.get(&[z(rh), zb(si), z(al), zb(be)]) * &sig.tau[be];
                    }
                    out.tau[al] += x * c;
                }
                let mut x = u.get(&[z(rh), zb(si)]) * &sig.ell;
                for be in 0..n {
                    x -= &(v.get(&[zb(si), z(rh), zb(be)]) * &sig.tau[be]) * I;
                }
                out.psi += x * c;
            }
            let c = pair(z(rh), 0);
            if c != 0.0 {
                for al in 0..n {
                    let mut x = q.get(&[z(rh), z(al)]) * &sig.ell;
                    for be in 0..n {
                        x += v.get(&[z(rh), zb(be), z(al)]) * &sig.tau[be];
                    }
                    out.tau[al] += x * c;
                }
                let mut x = y.get(&[z(rh)]) * &sig.ell;
                for be in 0..n {
                    x -= &(u.get(&[z(rh), zb(be)]) * &sig.tau[be]) * I;
                }
                out.psi += x * c;
            }
            let c = -pair(zb(rh), 0);
            if c != 0.0 {
                for al in 0..n {
                    let mut x = &(u.get(&[z(al), zb(rh)]) * &sig.ell) * I;
                    for be in 0..n {
                        x += v.get(&[zb(be), z(al), zb(rh)]) * &sig.tau[be];
                    }
                    out.tau[al] += x * c;
                }
                let mut x = y.get(&[zb(rh)]) * &sig.ell;
                for be in 0..n {
                    x += q.get(&[zb(rh), zb(be)]) * &sig.tau[be];
                }
                out.psi += x * c;
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Spherical,
    NonSpherical,
}

#[derive(Clone, Debug)]
pub struct Sphericity {
    pub verdict: Verdict,
    /// Norm the verdict is based on: `|Q|` for `n = 1`, `|W|` otherwise.
    pub deciding_norm: f64,
    /// `(W, V, Q, U, Y)`.
    pub norms: [f64; 5],
}

pub fn sphericity(curv: &CartanCurvature, tol: f64) -> Sphericity {
    let norms = curv.norms();
    let deciding_norm = if curv.n == 1 { norms[2] } else { norms[0] };
    let verdict = if deciding_norm <= tol { Verdict::Spherical } else { Verdict::NonSpherical };
    Sphericity { verdict, deciding_norm, norms }
}

/// Default tolerance of the sphericity verdict.
pub const SPHERICITY_TOL: f64 = 1e-6;
