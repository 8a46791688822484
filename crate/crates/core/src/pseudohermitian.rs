//! Tanaka–Webster connection, torsion, curvature and the invariants `P`, `T`, `S`.
//!
//! Structure equations in an orthonormal admissible coframe:
//! `dθ^α = θ^β∧ω_β^α + A^α_β̄ θ∧θ^β̄` with `ω` skew-Hermitian and `A` symmetric.

use alloc::vec;
use alloc::vec::Vec;

use crate::coframe::{bar, Coframe, Frame};
use crate::error::{Error, Result};
use crate::form::Form;
use crate::jet::{Jet, C64, I};
use crate::linalg::JetMatrix;
use crate::tensor::{Connection, Tensor};

#[derive(Clone, Debug)]
pub struct Geometry {
    pub coframe: Coframe,
    pub frame: Frame,
    /// `omega[β][α] = ω_β^α`.
    pub omega: Vec<Vec<Form>>,
    pub conn: Connection,
    /// `A_{αβ}` and its conjugate block.
    pub torsion: Tensor,
    /// Curvature 2-forms `Π_β^α = dω_β^α − ω_β^γ∧ω_γ^α`, stored at `[β][α]`.
    pub curvature_forms: Vec<Vec<Form>>,
    /// `R_{αβ̄ρσ̄}` and its conjugate block.
    pub curvature: Tensor,
    pub ricci: Tensor,
    pub scalar: Jet,
    pub schouten: Tensor,
    pub t: Tensor,
    pub s: Jet,
    /// Connection form of the density bundle in the reference gauge.
    pub l_form: Form,
    pub weyl_form: Form,
}

/// Orders consumed from the raw coframe to `S`, including orthonormalization.
pub const RAW_ORDER_NEEDED: usize = 6;

impl Geometry {
    /// Orthonormalizes `raw` and builds the geometry.
    pub fn from_raw(raw: &Coframe) -> Result<Geometry> {
        Geometry::new(raw.orthonormalize()?)
    }

    /// Builds the geometry from an orthonormal admissible coframe.
    pub fn new(coframe: Coframe) -> Result<Geometry> {
        let n = coframe.n();
        let m = coframe.dim();
        if coframe.order() < 5 {
            return Err(Error::OrderExhausted { what: "pseudo-hermitian invariants" });
        }
        let space = coframe.space().clone();
        let frame = coframe.frame()?;
        let dtheta: Vec<JetMatrix> =
            (0..n).map(|al| frame.comps2(&coframe.theta_a[al].d()?)).collect::<Result<_>>()?;
        let zb = |b: usize| 1 + n + b;
        let z = |b: usize| 1 + b;

        // Γ^α_{βc} = ω_β^α(E_c)
        let mut gh = vec![vec![vec![space.zero(); m]; n]; n];
        for al in 0..n {
            for be in 0..n {
                gh[al][be][0] = dtheta[al][z(be)][0].clone();
                for ga in 0..n {
                    gh[al][be][zb(ga)] = dtheta[al][z(be)][zb(ga)].clone();
                    gh[al][be][z(ga)] = -dtheta[be][z(al)][zb(ga)].conj();
                }
            }
        }
        let omega: Vec<Vec<Form>> = (0..n)
            .map(|be| {
                (0..n)
                    .map(|al| {
                        let mut f = Form::zero(&space, 1);
                        for cidx in 0..m {
                            f = f.add(&coframe.basis(cidx).mul_fn(&gh[al][be][cidx]))?;
                        }
                        Ok(f)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;

        let mut gamma = vec![vec![vec![space.zero(); m]; m]; m];
        for al in 0..n {
            for be in 0..n {
                for b in 0..m {
                    gamma[z(al)][z(be)][b] = gh[al][be][b].clone();
                    gamma[zb(al)][zb(be)][b] = gh[al][be][bar(n, b)].conj();
                }
            }
        }
        let conn = Connection { frame: frame.clone(), gamma };

        let mut torsion = Tensor::zeros(&space, n, 2);
        for al in 0..n {
            for ga in 0..n {
                let v = dtheta[al][0][zb(ga)].clone();
                torsion.set(&[z(al), z(ga)], v.conj());
                torsion.set(&[zb(al), zb(ga)], v);
            }
        }

        let mut curvature_forms = vec![vec![Form::zero(&space, 2); n]; n];
        for be in 0..n {
            for al in 0..n {
                let mut p = omega[be][al].d()?;
                for ga in 0..n {
                    p = p.sub(&omega[be][ga].wedge(&omega[ga][al])?)?;
                }
                curvature_forms[be][al] = p;
            }
        }
        let mut curvature = Tensor::zeros(&space, n, 4);
        for al in 0..n {
            for be in 0..n {
                let pc = frame.comps2(&curvature_forms[al][be])?;
                for rh in 0..n {
                    for si in 0..n {
                        let v = pc[z(rh)][zb(si)].clone();
                        curvature.set(&[zb(al), z(be), zb(rh), z(si)], v.conj());
                        curvature.set(&[z(al), zb(be), z(rh), zb(si)], v);
                    }
                }
            }
        }
        let ricci = hermitian_from(&space, n, |r, s| {
            (0..n).fold(space.zero(), |acc, al| acc + curvature.get(&[z(al), zb(al), z(r), zb(s)]))
        });
        let scalar = (0..n).fold(space.zero(), |acc, r| acc + ricci.get(&[z(r), zb(r)]));
        let nf = n as f64;
        let schouten = hermitian_from(&space, n, |r, s| {
            let mut v = ricci.get(&[z(r), zb(s)]).clone();
            if r == s {
                v -= &scalar * (1.0 / (2.0 * (nf + 1.0)));
            }
            v * (1.0 / (nf + 2.0))
        });

        let dr = Tensor::scalar(n, scalar.clone()).cov_deriv(&conn)?;
        let da = torsion.cov_deriv(&conn)?;
        let mut t = Tensor::zeros(&space, n, 1);
        for al in 0..n {
            let mut v = dr.get(&[z(al)]) * (1.0 / (2.0 * (nf + 1.0)));
            for be in 0..n {
                v -= da.get(&[z(al), z(be), zb(be)]) * I;
            }
            let v = v * (1.0 / (nf + 2.0));
            t.set(&[zb(al)], v.conj());
            t.set(&[z(al)], v);
        }
        let dt = t.cov_deriv(&conn)?;
        let mut acc = space.zero();
        for al in 0..n {
            acc += dt.get(&[z(al), zb(al)]) + dt.get(&[zb(al), z(al)]);
            for be in 0..n {
                let p = schouten.get(&[z(al), zb(be)]);
                let a = torsion.get(&[z(al), z(be)]);
                acc += p * &p.conj();
                acc -= a * &a.conj();
            }
        }
        let s = acc * (-1.0 / nf);

        let mut l_form = Form::zero(&space, 1);
        for al in 0..n {
            l_form = l_form.add(&omega[al][al])?;
        }
        let l_form = l_form.scale(C64::new(1.0 / (nf + 2.0), 0.0));
        let weyl_form =
            l_form.add(&coframe.theta.mul_fn(&(&scalar * (I * (1.0 / (2.0 * (nf + 1.0) * (nf + 2.0)))))))?;

        Ok(Geometry {
            coframe,
            frame,
            omega,
            conn,
            torsion,
            curvature_forms,
            curvature,
            ricci,
            scalar,
            schouten,
            t,
            s,
            l_form,
            weyl_form,
        })
    }

    pub fn n(&self) -> usize {
        self.coframe.n()
    }

    /// Frame index of `Z_α`.
    pub fn z(&self, alpha: usize) -> usize {
        1 + alpha
    }

    /// Frame index of `Z_ᾱ`.
    pub fn zb(&self, alpha: usize) -> usize {
        1 + self.n() + alpha
    }

    /// `A_{αβ}` as a jet matrix.
    pub fn torsion_matrix(&self) -> JetMatrix {
        let n = self.n();
        (0..n).map(|a| (0..n).map(|b| self.torsion.get(&[self.z(a), self.z(b)]).clone()).collect()).collect()
    }

    /// `P_{αβ̄}` as a jet matrix.
    pub fn schouten_matrix(&self) -> JetMatrix {
        let n = self.n();
        (0..n).map(|a| (0..n).map(|b| self.schouten.get(&[self.z(a), self.zb(b)]).clone()).collect()).collect()
    }

    /// Coefficient jet of `ω_β^α` along coframe element `c`.
    pub fn omega_comp(&self, beta: usize, alpha: usize, c: usize) -> &Jet {
        &self.conn.gamma[self.z(alpha)][self.z(beta)][c]
    }

    /// Residual of the structure equations for `dθ^α` and of skew-Hermitian `ω`.
    pub fn structure_residual(&self) -> Result<f64> {
        let n = self.n();
        let mut r: f64 = 0.0;
        for al in 0..n {
            let mut rhs = Form::zero(self.coframe.space(), 2);
            for be in 0..n {
                rhs = rhs.add(&self.coframe.theta_a[be].wedge(&self.omega[be][al])?)?;
                let a = self.torsion.get(&[self.zb(al), self.zb(be)]);
                let tt = self.coframe.theta.wedge(&self.coframe.theta_a[be].conj())?;
                rhs = rhs.add(&tt.mul_fn(a))?;
            }
            let lhs = self.coframe.theta_a[al].d()?;
            r = r.max(lhs.sub(&rhs)?.max_abs());
            for be in 0..n {
                let skew = self.omega[be][al].add(&self.omega[al][be].conj())?;
                r = r.max(skew.max_abs());
            }
        }
        Ok(r)
    }

    /// Largest `|A_{αβ} − A_{βα}|`.
    pub fn torsion_symmetry_residual(&self) -> f64 {
        let a = self.torsion_matrix();
        let n = self.n();
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                r = r.max(a[i][j].max_diff(&a[j][i]));
            }
        }
        r
    }

    /// Ricci from the other trace of `R_{αβ̄ρσ̄}` (over `ρσ̄`).
    pub fn ricci_alt(&self) -> Tensor {
        let n = self.n();
        let space = self.coframe.space().clone();
        hermitian_from(&space, n, |a, b| {
            (0..n).fold(space.zero(), |acc, r| acc + self.curvature.get(&[self.z(a), self.zb(b), self.z(r), self.zb(r)]))
        })
    }

    /// Largest base-point `|A_{αβ}|`.
    pub fn torsion_norm(&self) -> f64 {
        norm2(&self.torsion, 2)
    }
}

/// Frobenius-type norm of the base values over the `(1,0)`-leading block.
pub fn norm2(t: &Tensor, rank: usize) -> f64 {
    let m = t.dim();
    let count = m.pow(rank as u32);
    let mut acc = 0.0;
    let mut idx = vec![0; rank];
    for k in 0..count {
        let mut r = k;
        for slot in (0..rank).rev() {
            idx[slot] = r % m;
            r /= m;
        }
        if idx[0] >= 1 && idx[0] <= t.n() {
            acc += t.at(&idx).norm_sqr();
        }
    }
    libm::sqrt(acc)
}

/// Rank-2 tensor with `(α,β̄)` block `f(α, β)` and the conjugate block filled in.
fn hermitian_from<F: Fn(usize, usize) -> Jet>(space: &crate::jet::JetSpace, n: usize, f: F) -> Tensor {
    let mut t = Tensor::zeros(space, n, 2);
    for a in 0..n {
        for b in 0..n {
            let v = f(a, b);
            t.set(&[1 + n + a, 1 + b], v.conj());
            t.set(&[1 + a, 1 + n + b], v);
        }
    }
    t
}
