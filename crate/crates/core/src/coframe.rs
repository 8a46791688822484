//! Adapted coframes `(θ, θ^1, …, θ^n)`, their dual frames and orthonormalization.
//!
//! Frame indices run over `0..2n+1`: `0` is the Reeb direction, `1..=n` the
//! `(1,0)` directions `Z_α` and `n+1..=2n` their conjugates.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::form::Form;
use crate::jet::{Jet, JetSpace, C64, I};
use crate::linalg::{self, JetMatrix};

/// Coordinate components of a vector field.
pub type Vector = Vec<Jet>;

/// `X(f) = Σ X^i ∂_i f`.
pub fn directional(f: &Jet, x: &[Jet]) -> Result<Jet> {
    let mut acc = f.space().zero();
    for (i, xi) in x.iter().enumerate() {
        if xi.max_abs() == 0.0 {
            continue;
        }
        acc += xi * &f.partial(i)?;
    }
    if f.order() == 0 {
        return Err(Error::OrderExhausted { what: "directional derivative" });
    }
    Ok(acc.truncate(f.order() - 1))
}

/// Lie bracket of coordinate vector fields.
pub fn bracket(x: &[Jet], y: &[Jet]) -> Result<Vector> {
    (0..x.len())
        .map(|i| {
            let a = directional(&y[i], x)?;
            let b = directional(&x[i], y)?;
            Ok(&a - &b)
        })
        .collect()
}

/// Conjugate frame index: `α ↔ ᾱ`, `0 ↦ 0`.
pub fn bar(n: usize, a: usize) -> usize {
    if a == 0 {
        0
    } else if a <= n {
        a + n
    } else {
        a - n
    }
}

#[derive(Clone, Debug)]
pub struct Coframe {
    pub theta: Form,
    pub theta_a: Vec<Form>,
}

/// Dual frame: `vectors[b]` is `E_b` in coordinates, with `θ^a(E_b) = δ^a_b`.
#[derive(Clone, Debug)]
pub struct Frame {
    n: usize,
    vectors: Vec<Vector>,
}

impl Frame {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vector(&self, a: usize) -> &[Jet] {
        &self.vectors[a]
    }

    pub fn xi(&self) -> &[Jet] {
        &self.vectors[0]
    }

    /// `Z_α`, zero-based `alpha`.
    pub fn z(&self, alpha: usize) -> &[Jet] {
        &self.vectors[1 + alpha]
    }

    pub fn zbar(&self, alpha: usize) -> &[Jet] {
        &self.vectors[1 + self.n + alpha]
    }

    /// `E_a(f)`.
    pub fn apply(&self, a: usize, f: &Jet) -> Result<Jet> {
        directional(f, &self.vectors[a])
    }

    /// `F(E_a)` for a 1-form.
    pub fn comps1(&self, form: &Form) -> Result<Vec<Jet>> {
        self.vectors.iter().map(|v| form.eval(&[v])).collect()
    }

    /// `F(E_a, E_b)` for a 2-form.
    pub fn comps2(&self, form: &Form) -> Result<JetMatrix> {
        let m = self.vectors.len();
        let mut out = vec![vec![form.space().zero(); m]; m];
        for a in 0..m {
            for b in a + 1..m {
                let v = form.eval(&[&self.vectors[a], &self.vectors[b]])?;
                out[b][a] = -&v;
                out[a][b] = v;
            }
        }
        Ok(out)
    }

    /// Frame components of a coordinate vector.
    pub fn to_frame(&self, cf: &Coframe, x: &[Jet]) -> Result<Vec<Jet>> {
        (0..2 * self.n + 1).map(|a| cf.basis(a).eval(&[x])).collect()
    }

    /// Coordinate vector `Σ c^a E_a`.
    pub fn combine(&self, coeffs: &[Jet]) -> Vector {
        let space = self.vectors[0][0].space();
        let mut out = vec![space.zero(); self.vectors.len()];
        for (ca, v) in coeffs.iter().zip(&self.vectors) {
            if ca.max_abs() == 0.0 {
                continue;
            }
            for (o, vi) in out.iter_mut().zip(v) {
                *o += ca * vi;
            }
        }
        out
    }

    pub fn truncate(&self, order: usize) -> Frame {
        Frame {
            n: self.n,
            vectors: self.vectors.iter().map(|v| v.iter().map(|j| j.truncate(order)).collect()).collect(),
        }
    }
}

impl Coframe {
    pub fn new(theta: Form, theta_a: Vec<Form>) -> Result<Coframe> {
        let n = theta_a.len();
        if n == 0 {
            return Err(Error::Shape("at least one (1,0) form is required"));
        }
        if theta.num_vars() != 2 * n + 1 {
            return Err(Error::Shape("chart dimension must be 2n+1"));
        }
        if theta.degree() != 1 || theta_a.iter().any(|f| f.degree() != 1 || !f.space().same(theta.space())) {
            return Err(Error::Shape("coframe entries must be 1-forms on one chart"));
        }
        Ok(Coframe { theta, theta_a })
    }

    pub fn n(&self) -> usize {
        self.theta_a.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.n() + 1
    }

    pub fn space(&self) -> &JetSpace {
        self.theta.space()
    }

    /// Lowest coefficient order among the coframe forms.
    pub fn order(&self) -> usize {
        self.theta_a.iter().map(Form::order).fold(self.theta.order(), usize::min)
    }

    /// Coframe element `a`: `θ`, `θ^α` or `θ^ᾱ`.
    pub fn basis(&self, a: usize) -> Form {
        let n = self.n();
        if a == 0 {
            self.theta.clone()
        } else if a <= n {
            self.theta_a[a - 1].clone()
        } else {
            self.theta_a[a - 1 - n].conj()
        }
    }

    pub fn truncate(&self, order: usize) -> Coframe {
        Coframe { theta: self.theta.truncate(order), theta_a: self.theta_a.iter().map(|f| f.truncate(order)).collect() }
    }

    /// Dual frame, at the coframe's order.
    pub fn frame(&self) -> Result<Frame> {
        let m = self.dim();
        let mat: JetMatrix = (0..m).map(|a| self.basis(a).comps().to_vec()).collect();
        let inv = linalg::inverse(&mat, "coframe matrix")?;
        let vectors = (0..m).map(|b| (0..m).map(|i| inv[i][b].clone()).collect()).collect();
        Ok(Frame { n: self.n(), vectors })
    }

    /// Largest imaginary part among the coefficients of `θ`.
    pub fn theta_imag(&self) -> f64 {
        self.theta.comps().iter().fold(0.0, |m, j| m.max(j.max_imag()))
    }

    /// Levi matrix `h_{αβ̄}` with `dθ ≡ i h_{αβ̄} θ^α∧θ^β̄ mod θ`.
    pub fn levi(&self, frame: &Frame) -> Result<JetMatrix> {
        let f = frame.comps2(&self.theta.d()?)?;
        let n = self.n();
        Ok((0..n).map(|a| (0..n).map(|b| &f[1 + a][1 + n + b] * (-I)).collect()).collect())
    }

    /// Residual of `dθ = i h_{αβ̄} θ^α∧θ^β̄` modulo `θ`: the `θ^α∧θ^β` parts must vanish
    /// and `h` must be Hermitian.
    pub fn levi_residual(&self) -> Result<f64> {
        let frame = self.frame()?;
        let f = frame.comps2(&self.theta.d()?)?;
        let n = self.n();
        let mut r: f64 = 0.0;
        for a in 1..=2 * n {
            for b in 1..=2 * n {
                let same_type = (a <= n) == (b <= n);
                if same_type {
                    r = r.max(f[a][b].max_abs());
                }
            }
        }
        let h = self.levi(&frame)?;
        for a in 0..n {
            for b in 0..n {
                r = r.max(h[a][b].max_diff(&h[b][a].conj()));
            }
        }
        Ok(r)
    }

    /// Full residual of `dθ = i Σ θ^α∧θ^ᾱ`, over every frame component and jet coefficient.
    pub fn admissibility_residual(&self) -> Result<f64> {
        let frame = self.frame()?;
        let f = frame.comps2(&self.theta.d()?)?;
        let n = self.n();
        let m = self.dim();
        let mut r: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                let mut want = C64::new(0.0, 0.0);
                if a >= 1 && a <= n && b == a + n {
                    want = I;
                } else if b >= 1 && b <= n && a == b + n {
                    want = -I;
                }
                r = r.max(f[a][b].add_const(-want).max_abs());
            }
        }
        Ok(r.max(self.theta_imag()))
    }

    /// Residual of the duality relations `θ^a(E_b) = δ^a_b` over all jet coefficients.
    pub fn duality_residual(&self, frame: &Frame) -> Result<f64> {
        let m = self.dim();
        let mut r: f64 = 0.0;
        for a in 0..m {
            let comps = frame.comps1(&self.basis(a))?;
            for (b, v) in comps.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                r = r.max(v.add_const(C64::new(-want, 0.0)).max_abs());
            }
        }
        Ok(r)
    }

    /// Normalizes to `dθ = i Σ θ^α∧θ^ᾱ` exactly, consuming one jet order.
    ///
    /// If the Levi form is negative definite, `θ` is replaced by `−θ` first; an
    /// indefinite or degenerate Levi form is rejected.
    pub fn orthonormalize(&self) -> Result<Coframe> {
        if self.order() == 0 {
            return Err(Error::OrderExhausted { what: "orthonormalization" });
        }
        let n = self.n();
        let mut theta = self.theta.clone();
        let frame = self.frame()?;
        let mut h = self.levi(&frame)?;
        let base: Vec<Vec<C64>> = h.iter().map(|r| r.iter().map(Jet::value).collect()).collect();
        let eig = linalg::hermitian_eigenvalues(&base);
        let scale = eig.iter().fold(0.0f64, |s, e| s.max(e.abs()));
        let tol = 1e-10 * scale.max(1e-300);
        let (pos, neg, _) = linalg::inertia(&eig, tol);
        if neg == n {
            theta = theta.scale(C64::new(-1.0, 0.0));
            for row in h.iter_mut() {
                for e in row.iter_mut() {
                    *e = -&*e;
                }
            }
        } else if pos != n {
            return Err(Error::NotPseudoconvex);
        }
        // θ'^α = θ^α + c^α θ removes the θ∧θ^β parts of dθ; the frame is unchanged
        // except for ξ, so the raw frame components suffice.
        let f = frame.comps2(&theta.d()?)?;
        let a: JetMatrix = (0..n).map(|b| vec![&f[0][1 + b] * I]).collect();
        let cbar = linalg::solve(&h, &a, "reeb normalization")?;
        let order = theta.d()?.order();
        let theta = theta.truncate(order);
        let shifted: Vec<Form> = (0..n)
            .map(|al| self.theta_a[al].truncate(order).add(&theta.mul_fn(&cbar[al][0].conj())))
            .collect::<Result<_>>()?;
        let l = linalg::cholesky(&h)?;
        let theta_a = (0..n)
            .map(|al| {
                let mut acc = Form::zero(theta.space(), 1);
                for be in 0..n {
                    acc = acc.add(&shifted[be].mul_fn(&l[be][al]))?;
                }
                Ok(acc.truncate(order))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Coframe { theta, theta_a })
    }

    /// Pointwise orthonormality test: `h = δ` and the Reeb normalization hold at all orders.
    pub fn is_orthonormal(&self, tol: f64) -> Result<bool> {
        Ok(self.admissibility_residual()? <= tol)
    }
}
