//! Small dense linear algebra over jets and over plain complex numbers.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::jet::{c, Jet, C64};

pub type JetMatrix = Vec<Vec<Jet>>;

/// Solves `a * x = b` by Gaussian elimination in jet arithmetic.
///
/// Pivots are chosen by the magnitude of their base values; a pivot whose base
/// value vanishes makes the matrix singular at the base point.
pub fn solve(a: &[Vec<Jet>], b: &[Vec<Jet>], what: &'static str) -> Result<JetMatrix> {
    let n = a.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m: JetMatrix = a.to_vec();
    let mut rhs: JetMatrix = b.to_vec();
    let scale = a.iter().flatten().fold(0.0f64, |s, j| s.max(j.value().norm()));
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].value().norm().total_cmp(&m[j][col].value().norm()))
            .unwrap();
        if m[piv][col].value().norm() <= 1e-13 * scale.max(1e-300) {
            return Err(Error::Singular(what));
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        let inv = m[col][col].recip()?;
        for k in col..n {
            m[col][k] = &m[col][k] * &inv;
        }
        for row in rhs[col].iter_mut() {
            *row = &*row * &inv;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = m[r][col].clone();
            if f.max_abs() == 0.0 {
                continue;
            }
            for k in col..n {
                let t = &f * &m[col][k];
                m[r][k] -= t;
            }
            for k in 0..rhs[r].len() {
                let t = &f * &rhs[col][k];
                rhs[r][k] -= t;
            }
        }
    }
    Ok(rhs)
}

pub fn inverse(a: &[Vec<Jet>], what: &'static str) -> Result<JetMatrix> {
    let n = a.len();
    let space = a[0][0].space().clone();
    let id: JetMatrix =
        (0..n).map(|i| (0..n).map(|j| if i == j { space.real(1.0) } else { space.zero() }).collect()).collect();
    solve(a, &id, what)
}

/// Cholesky factor `L` (lower triangular) of a Hermitian jet matrix, `h = L L^*`.
///
/// Rows are processed in order; a non-positive pivot at the base point is an error.
pub fn cholesky(h: &[Vec<Jet>]) -> Result<JetMatrix> {
    let n = h.len();
    let space = h[0][0].space().clone();
    let mut l: JetMatrix = vec![vec![space.zero(); n]; n];
    for j in 0..n {
        let mut d = h[j][j].clone();
        for k in 0..j {
            d -= &l[j][k] * &l[j][k].conj();
        }
        if d.value().re <= 1e-12 {
            return Err(Error::NotPseudoconvex);
        }
        let djj = d.re().sqrt()?;
        let inv = djj.recip()?;
        l[j][j] = djj;
        for i in j + 1..n {
            let mut s = h[i][j].clone();
            for k in 0..j {
                s -= &l[i][k] * &l[j][k].conj();
            }
            l[i][j] = &s * &inv;
        }
    }
    Ok(l)
}

/// Determinant of a jet matrix by elimination.
pub fn det(a: &[Vec<Jet>]) -> Result<Jet> {
    let n = a.len();
    let space = a[0][0].space().clone();
    let mut m: JetMatrix = a.to_vec();
    let mut acc = space.real(1.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].value().norm().total_cmp(&m[j][col].value().norm()))
            .unwrap();
        if m[piv][col].value().norm() == 0.0 {
            return Ok(space.zero());
        }
        if piv != col {
            m.swap(col, piv);
            acc = -acc;
        }
        acc = &acc * &m[col][col];
        let inv = m[col][col].recip()?;
        for r in col + 1..n {
            let f = &m[r][col] * &inv;
            for k in col..n {
                let t = &f * &m[col][k];
                m[r][k] -= t;
            }
        }
    }
    Ok(acc)
}

/// Determinant of a complex matrix (partial pivoting).
pub fn det_c(a: &[Vec<C64>]) -> C64 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut acc = c(1.0);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm())).unwrap();
        if m[piv][col].norm() == 0.0 {
            return c(0.0);
        }
        if piv != col {
            m.swap(col, piv);
            acc = -acc;
        }
        acc *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for k in col..n {
                let t = f * m[col][k];
                m[r][k] -= t;
            }
        }
    }
    acc
}

/// Eigenvalues of a real symmetric matrix (cyclic Jacobi), ascending.
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / libm::sqrt(t * t + 1.0);
                let sn = t * cs;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = cs * mkp - sn * mkq;
                    m[k][q] = sn * mkp + cs * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = cs * mpk - sn * mqk;
                    m[q][k] = sn * mpk + cs * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a complex Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &[Vec<C64>]) -> Vec<f64> {
    let n = a.len();
    // real embedding [[Re, -Im], [Im, Re]] doubles every eigenvalue
    let mut r = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = (a[i][j] + a[j][i].conj()) * 0.5;
            r[i][j] = z.re;
            r[i + n][j + n] = z.re;
            r[i][j + n] = -z.im;
            r[i + n][j] = z.im;
        }
    }
    let ev = symmetric_eigenvalues(&r);
    ev.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// (positive, negative, near-zero) eigenvalue counts.
pub fn inertia(eigs: &[f64], tol: f64) -> (usize, usize, usize) {
    eigs.iter().fold((0, 0, 0), |(p, n, z), &e| {
        if e > tol {
            (p + 1, n, z)
        } else if e < -tol {
            (p, n + 1, z)
        } else {
            (p, n, z + 1)
        }
    })
}
