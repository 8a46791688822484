//! Dense tensors with all indices lowered, in the frame `(ξ, Z_α, Z_ᾱ)`.
//!
//! Upper `(1,0)` indices are lowered with `δ_{αβ̄}`, so `t^α` is stored as
//! `t_ᾱ`. Covariant derivatives append their index last:
//! `t_{γ,α}` is `(∇_{Z_α} t)(Z_γ)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::coframe::{bar, Frame};
use crate::error::Result;
use crate::jet::{Jet, JetSpace, C64};

#[derive(Clone, Debug)]
pub struct Tensor {
    n: usize,
    rank: usize,
    comps: Vec<Jet>,
}

/// Christoffel symbols of a linear connection in a frame:
/// `∇_{E_b} E_a = Γ^c_{ab} E_c`, stored at `[c][a][b]`.
#[derive(Clone, Debug)]
pub struct Connection {
    pub frame: Frame,
    pub gamma: Vec<Vec<Vec<Jet>>>,
}

impl Connection {
    pub fn n(&self) -> usize {
        self.frame.n()
    }
}

impl Tensor {
    pub fn zeros(space: &JetSpace, n: usize, rank: usize) -> Tensor {
        let m = 2 * n + 1;
        Tensor { n, rank, comps: vec![space.zero(); m.pow(rank as u32)] }
    }

    pub fn scalar(n: usize, value: Jet) -> Tensor {
        Tensor { n, rank: 0, comps: vec![value] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim() + i)
    }

    fn unflat(&self, mut k: usize) -> Vec<usize> {
        let m = self.dim();
        let mut idx = vec![0; self.rank];
        for slot in (0..self.rank).rev() {
            idx[slot] = k % m;
            k /= m;
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> &Jet {
        &self.comps[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Jet) {
        let k = self.flat(idx);
        self.comps[k] = v;
    }

    /// Value at the base point.
    pub fn at(&self, idx: &[usize]) -> C64 {
        self.get(idx).value()
    }

    /// The scalar of a rank-0 tensor.
    pub fn value(&self) -> &Jet {
        &self.comps[0]
    }

    pub fn order(&self) -> usize {
        self.comps.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn truncate(&self, order: usize) -> Tensor {
        Tensor { n: self.n, rank: self.rank, comps: self.comps.iter().map(|j| j.truncate(order)).collect() }
    }

    /// Complex conjugate tensor: `conj(t)_{a…} = conj(t_{ā…})`.
    pub fn conj(&self) -> Tensor {
        let mut out = self.clone();
        for k in 0..self.comps.len() {
            let idx: Vec<usize> = self.unflat(k).iter().map(|&i| bar(self.n, i)).collect();
            out.comps[k] = self.get(&idx).conj();
        }
        out
    }

    /// Largest deviation from `conj(t) = t` over all coefficients.
    pub fn reality_residual(&self) -> f64 {
        let c = self.conj();
        self.comps.iter().zip(&c.comps).fold(0.0, |m, (a, b)| m.max(a.max_diff(b)))
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, j| m.max(j.max_abs()))
    }

    /// Largest base-point magnitude over components.
    pub fn max_value(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, j| m.max(j.value().norm()))
    }

    pub fn max_diff(&self, other: &Tensor) -> f64 {
        self.comps.iter().zip(&other.comps).fold(0.0, |m, (a, b)| m.max(a.max_diff(b)))
    }

    pub fn scale(&self, s: C64) -> Tensor {
        Tensor { n: self.n, rank: self.rank, comps: self.comps.iter().map(|j| j * s).collect() }
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.rank, other.rank);
        Tensor { n: self.n, rank: self.rank, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Covariant derivative; the new index is appended last and one jet order is used.
    pub fn cov_deriv(&self, conn: &Connection) -> Result<Tensor> {
        let m = self.dim();
        let space = self.comps[0].space().clone();
        let mut out = Tensor::zeros(&space, self.n, self.rank + 1);
        let deriv: Vec<Vec<Jet>> = self
            .comps
            .iter()
            .map(|c| (0..m).map(|b| conn.frame.apply(b, c)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        for k in 0..self.comps.len() {
            let idx = self.unflat(k);
            for b in 0..m {
                let mut v = deriv[k][b].clone();
                for slot in 0..self.rank {
                    let a = idx[slot];
                    let mut j = idx.clone();
                    for cidx in 0..m {
                        let g = &conn.gamma[cidx][a][b];
                        if g.max_abs() == 0.0 {
                            continue;
                        }
                        j[slot] = cidx;
                        let t = self.get(&j);
                        if t.max_abs() == 0.0 {
                            continue;
                        }
                        v -= g * t;
                    }
                }
                let mut full = idx.clone();
                full.push(b);
                out.set(&full, v);
            }
        }
        Ok(out)
    }
}
