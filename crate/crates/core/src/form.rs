//! Differential forms on a coordinate chart with jet coefficients.
//!
//! Only strictly increasing index tuples are stored, so antisymmetry is
//! structural. Component `I` of a `p`-form multiplies `dx^{i_1} ∧ … ∧ dx^{i_p}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetSpace, C64};

/// Increasing `p`-tuples from `0..m` in lexicographic order.
pub fn combinations(m: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, p, &mut Vec::new(), &mut out);
    out
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, j| acc * (n - j) / (j + 1))
}

/// Position of an increasing tuple in [`combinations`] order.
pub fn combo_rank(tuple: &[usize], m: usize) -> usize {
    let p = tuple.len();
    let mut rank = 0;
    let mut prev = 0;
    for (k, &t) in tuple.iter().enumerate() {
        for v in prev..t {
            rank += binom(m - v - 1, p - k - 1);
        }
        prev = t + 1;
    }
    rank
}

/// Sorts a tuple, returning the permutation sign, or `None` on a repeated index.
fn sort_sign(t: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 0..t.len() {
        for j in 0..t.len() - 1 - i {
            if t[j] == t[j + 1] {
                return None;
            }
            if t[j] > t[j + 1] {
                t.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if t.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

#[derive(Clone, Debug)]
pub struct Form {
    degree: usize,
    space: JetSpace,
    comps: Vec<Jet>,
}

impl Form {
    pub fn zero(space: &JetSpace, degree: usize) -> Form {
        let m = space.nvars();
        assert!(degree <= m, "form degree exceeds chart dimension");
        Form { degree, space: space.clone(), comps: vec![space.zero(); binom(m, degree)] }
    }

    /// 0-form from a function.
    pub fn function(f: Jet) -> Form {
        Form { degree: 0, space: f.space().clone(), comps: vec![f] }
    }

    /// 1-form `Σ coeffs[i] dx^i`.
    pub fn one_form(space: &JetSpace, coeffs: Vec<Jet>) -> Form {
        assert_eq!(coeffs.len(), space.nvars());
        Form { degree: 1, space: space.clone(), comps: coeffs }
    }

    /// `dx^i`.
    pub fn dx(space: &JetSpace, i: usize) -> Form {
        let mut f = Form::zero(space, 1);
        f.comps[i] = space.real(1.0);
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn space(&self) -> &JetSpace {
        &self.space
    }

    pub fn num_vars(&self) -> usize {
        self.space.nvars()
    }

    pub fn comps(&self) -> &[Jet] {
        &self.comps
    }

    /// Component along the increasing tuple `tuple`.
    pub fn comp(&self, tuple: &[usize]) -> &Jet {
        &self.comps[combo_rank(tuple, self.num_vars())]
    }

    /// Lowest order among the coefficients.
    pub fn order(&self) -> usize {
        self.comps.iter().map(Jet::order).min().unwrap_or(self.space.max_order())
    }

    fn check(&self, other: &Form) -> Result<()> {
        if !self.space.same(&other.space) {
            return Err(Error::Shape("forms live on different charts"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        self.check(other)?;
        if self.degree != other.degree {
            return Err(Error::Shape("adding forms of different degree"));
        }
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect();
        Ok(Form { degree: self.degree, space: self.space.clone(), comps })
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Form {
        Form { degree: self.degree, space: self.space.clone(), comps: self.comps.iter().map(|j| j * s).collect() }
    }

    pub fn mul_fn(&self, f: &Jet) -> Form {
        Form { degree: self.degree, space: self.space.clone(), comps: self.comps.iter().map(|j| j * f).collect() }
    }

    pub fn conj(&self) -> Form {
        Form { degree: self.degree, space: self.space.clone(), comps: self.comps.iter().map(Jet::conj).collect() }
    }

    pub fn truncate(&self, order: usize) -> Form {
        Form { degree: self.degree, space: self.space.clone(), comps: self.comps.iter().map(|j| j.truncate(order)).collect() }
    }

    /// Graded-antisymmetric product.
    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.check(other)?;
        let m = self.num_vars();
        let p = self.degree + other.degree;
        if p > m {
            return Err(Error::Shape("wedge degree exceeds chart dimension"));
        }
        let ca = combinations(m, self.degree);
        let cb = combinations(m, other.degree);
        let mut out = Form::zero(&self.space, p);
        for (ia, ta) in ca.iter().enumerate() {
            if self.comps[ia].max_abs() == 0.0 {
                continue;
            }
            for (ib, tb) in cb.iter().enumerate() {
                if other.comps[ib].max_abs() == 0.0 {
                    continue;
                }
                let mut t: Vec<usize> = ta.iter().chain(tb).copied().collect();
                if let Some(sign) = sort_sign(&mut t) {
                    let r = combo_rank(&t, m);
                    let term = &self.comps[ia] * &other.comps[ib];
                    out.comps[r] += &term * sign;
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative; the result has one jet order less.
    pub fn d(&self) -> Result<Form> {
        let m = self.num_vars();
        if self.degree + 1 > m {
            return Ok(Form::zero(&self.space, self.degree).truncate(0));
        }
        let tuples = combinations(m, self.degree);
        let mut out = Form::zero(&self.space, self.degree + 1);
        let top = self.order().saturating_sub(1);
        if self.order() == 0 {
            return Err(Error::OrderExhausted { what: "exterior derivative" });
        }
        for c in out.comps.iter_mut() {
            *c = c.truncate(top);
        }
        for (k, t) in tuples.iter().enumerate() {
            let coeff = &self.comps[k];
            if coeff.max_abs() == 0.0 {
                continue;
            }
            for j in 0..m {
                if t.contains(&j) {
                    continue;
                }
                let mut u: Vec<usize> = core::iter::once(j).chain(t.iter().copied()).collect();
                let sign = sort_sign(&mut u).expect("j not in tuple");
                let r = combo_rank(&u, m);
                out.comps[r] += &coeff.partial(j)? * sign;
            }
        }
        Ok(out)
    }

    /// Contracts the form with `degree` vector fields given by coordinate components.
    pub fn eval(&self, vectors: &[&[Jet]]) -> Result<Jet> {
        if vectors.len() != self.degree {
            return Err(Error::Shape("wrong number of vectors for form evaluation"));
        }
        let m = self.num_vars();
        match self.degree {
            0 => Ok(self.comps[0].clone()),
            1 => {
                let mut acc = self.space.zero();
                for i in 0..m {
                    if self.comps[i].max_abs() != 0.0 {
                        acc += &self.comps[i] * &vectors[0][i];
                    }
                }
                Ok(acc)
            }
            2 => {
                let (x, y) = (vectors[0], vectors[1]);
                let mut acc = self.space.zero();
                for (k, t) in combinations(m, 2).iter().enumerate() {
                    let c = &self.comps[k];
                    if c.max_abs() == 0.0 {
                        continue;
                    }
                    let (i, j) = (t[0], t[1]);
                    acc += c * &(&(&x[i] * &y[j]) - &(&x[j] * &y[i]));
                }
                Ok(acc)
            }
            _ => {
                // general determinant expansion over the tuple
                let mut acc = self.space.zero();
                let perms = permutations(self.degree);
                for (k, t) in combinations(m, self.degree).iter().enumerate() {
                    let c = &self.comps[k];
                    if c.max_abs() == 0.0 {
                        continue;
                    }
                    let mut det = self.space.zero();
                    for (perm, sign) in &perms {
                        let mut term = self.space.real(*sign);
                        for (slot, &pi) in perm.iter().enumerate() {
                            term = &term * &vectors[slot][t[pi]];
                        }
                        det += term;
                    }
                    acc += c * &det;
                }
                Ok(acc)
            }
        }
    }

    /// Largest coefficient magnitude over all components.
    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, j| m.max(j.max_abs()))
    }
}

fn permutations(p: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut base: Vec<usize> = (0..p).collect();
    fn rec(k: usize, v: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, f64)>) {
        if k == v.len() {
            let mut t = v.clone();
            let sign = sort_sign(&mut t).unwrap();
            out.push((v.clone(), sign));
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            rec(k + 1, v, out);
            v.swap(k, i);
        }
    }
    rec(0, &mut base, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::c;

    #[test]
    fn ranks_match_enumeration() {
        for m in 1..6 {
            for p in 0..=m {
                for (k, t) in combinations(m, p).iter().enumerate() {
                    assert_eq!(combo_rank(t, m), k);
                }
            }
        }
    }

    #[test]
    fn dx_wedge_dx_vanishes_and_anticommutes() {
        let s = JetSpace::new(3, 2);
        let dx = Form::dx(&s, 0);
        let dy = Form::dx(&s, 1);
        assert_eq!(dx.wedge(&dx).unwrap().max_abs(), 0.0);
        let a = dx.wedge(&dy).unwrap();
        let b = dy.wedge(&dx).unwrap();
        assert_eq!(a.add(&b).unwrap().max_abs(), 0.0);
        assert_eq!(a.comp(&[0, 1]).value(), c(1.0));
    }

    #[test]
    fn d_of_constant_is_zero() {
        let s = JetSpace::new(3, 3);
        let f = Form::function(s.real(4.0));
        assert_eq!(f.d().unwrap().max_abs(), 0.0);
    }

    #[test]
    fn d_squared_vanishes() {
        let s = JetSpace::new(3, 5);
        let x = s.variable(0, 0.2);
        let y = s.variable(1, -0.1);
        let z = s.variable(2, 0.4);
        let w = Form::one_form(&s, vec![(&x * &y).exp(), (&y * &z).sin(), &(&x * &z) * &x]);
        let dd = w.d().unwrap().d().unwrap();
        assert!(dd.max_abs() < 1e-12);
    }

    #[test]
    fn two_form_evaluation() {
        let s = JetSpace::new(3, 1);
        let f = Form::dx(&s, 0).wedge(&Form::dx(&s, 1)).unwrap();
        let e0 = [s.real(1.0), s.zero(), s.zero()];
        let e1 = [s.zero(), s.real(1.0), s.zero()];
        assert_eq!(f.eval(&[&e0, &e1]).unwrap().value(), c(1.0));
        assert_eq!(f.eval(&[&e1, &e0]).unwrap().value(), c(-1.0));
        let three = f.wedge(&Form::dx(&s, 2)).unwrap();
        let e2 = [s.zero(), s.zero(), s.real(1.0)];
        assert_eq!(three.eval(&[&e0, &e1, &e2]).unwrap().value(), c(1.0));
        assert_eq!(three.eval(&[&e1, &e0, &e2]).unwrap().value(), c(-1.0));
    }
}
