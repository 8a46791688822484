//! Truncated multivariate Taylor arithmetic with complex coefficients.
//!
//! A [`Jet`] is the Taylor expansion of a function of `m` real variables at a
//! fixed base point, truncated at total degree `order`. Coefficients are stored
//! normalized (derivative divided by the multi-index factorial), so products
//! are plain truncated convolutions.
//!
//! Monomials are laid out in graded order: every monomial of degree `d` comes
//! after all monomials of degree `< d`. A jet of order `k` therefore occupies a
//! prefix of the table built for the largest order of its [`JetSpace`], and
//! jets of different orders in the same space combine without re-indexing.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

const NONE: u32 = u32::MAX;

/// Precomputed monomial tables for a fixed number of variables and maximal order.
pub struct Layout {
    nvars: usize,
    max_order: usize,
    exps: Vec<Vec<u8>>,
    degree: Vec<usize>,
    count_upto: Vec<usize>,
    lookup: BTreeMap<Vec<u8>, usize>,
    /// raise[v * len + k] is the index of monomial k times x_v.
    raise: Vec<u32>,
    /// Convolution pairs (i, j) contributing to result k live in
    /// pairs[pair_start[k]..pair_start[k + 1]].
    pair_start: Vec<usize>,
    pairs: Vec<(u32, u32)>,
}

impl Layout {
    fn build(nvars: usize, max_order: usize) -> Self {
        let mut exps: Vec<Vec<u8>> = Vec::new();
        let mut degree = Vec::new();
        let mut count_upto = Vec::with_capacity(max_order + 1);
        for d in 0..=max_order {
            let mut cur = Vec::new();
            monomials_of_degree(nvars, d, &mut vec![0u8; nvars], 0, &mut cur);
            for e in cur {
                exps.push(e);
                degree.push(d);
            }
            count_upto.push(exps.len());
        }
        let len = exps.len();
        let lookup: BTreeMap<Vec<u8>, usize> =
            exps.iter().enumerate().map(|(k, e)| (e.clone(), k)).collect();

        let mut raise = vec![NONE; nvars * len];
        for v in 0..nvars {
            for k in 0..len {
                if degree[k] < max_order {
                    let mut e = exps[k].clone();
                    e[v] += 1;
                    raise[v * len + k] = lookup[&e] as u32;
                }
            }
        }

        let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); len];
        for i in 0..len {
            for j in 0..len {
                if degree[i] + degree[j] > max_order {
                    continue;
                }
                let e: Vec<u8> = exps[i].iter().zip(&exps[j]).map(|(a, b)| a + b).collect();
                buckets[lookup[&e]].push((i as u32, j as u32));
            }
        }
        let mut pair_start = Vec::with_capacity(len + 1);
        let mut pairs = Vec::new();
        for b in buckets {
            pair_start.push(pairs.len());
            pairs.extend(b);
        }
        pair_start.push(pairs.len());

        Layout { nvars, max_order, exps, degree, count_upto, lookup, raise, pair_start, pairs }
    }

    fn len_for(&self, order: usize) -> usize {
        self.count_upto[order]
    }
}

fn monomials_of_degree(nvars: usize, d: usize, cur: &mut Vec<u8>, pos: usize, out: &mut Vec<Vec<u8>>) {
    if pos + 1 == nvars {
        cur[pos] = d as u8;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in (0..=d).rev() {
        cur[pos] = k as u8;
        monomials_of_degree(nvars, d - k, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

/// Shared monomial tables for jets in `nvars` variables up to `max_order`.
#[derive(Clone)]
pub struct JetSpace(Arc<Layout>);

impl JetSpace {
    pub fn new(nvars: usize, max_order: usize) -> Self {
        assert!(nvars >= 1, "a jet space needs at least one variable");
        assert!(max_order <= 24, "jet order {max_order} is beyond desk scale");
        JetSpace(Arc::new(Layout::build(nvars, max_order)))
    }

    pub fn nvars(&self) -> usize {
        self.0.nvars
    }

    pub fn max_order(&self) -> usize {
        self.0.max_order
    }

    /// Number of coefficients of a jet of the given order.
    pub fn coeff_count(&self, order: usize) -> usize {
        self.0.len_for(order)
    }

    pub fn same(&self, other: &JetSpace) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn zero(&self) -> Jet {
        Jet::constant(self, C64::new(0.0, 0.0))
    }

    pub fn constant(&self, v: C64) -> Jet {
        Jet::constant(self, v)
    }

    pub fn real(&self, v: f64) -> Jet {
        Jet::constant(self, c(v))
    }

    /// The jet of the coordinate function `x_var` at a base point where it equals `base`.
    pub fn variable(&self, var: usize, base: f64) -> Jet {
        Jet::variable(self, var, base)
    }

    /// Multi-index of coefficient slot `k`.
    pub fn exponents(&self, k: usize) -> &[u8] {
        &self.0.exps[k]
    }
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JetSpace(m={}, K={})", self.0.nvars, self.0.max_order)
    }
}

/// Truncated Taylor expansion at a base point.
#[derive(Clone)]
pub struct Jet {
    space: JetSpace,
    order: usize,
    coeffs: Vec<C64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet(order={}, value={})", self.order, self.coeffs[0])
    }
}

/// Analytic functions that can be composed with a jet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Analytic {
    Exp,
    Log,
    Sin,
    Cos,
    Pow(C64),
    Sqrt,
    Recip,
}

impl Analytic {
    pub fn name(&self) -> &'static str {
        match self {
            Analytic::Exp => "exp",
            Analytic::Log => "log",
            Analytic::Sin => "sin",
            Analytic::Cos => "cos",
            Analytic::Pow(_) => "pow",
            Analytic::Sqrt => "sqrt",
            Analytic::Recip => "recip",
        }
    }

    /// Taylor coefficients f^(k)(a0)/k! for k = 0..=order.
    fn taylor(&self, a0: C64, order: usize) -> Result<Vec<C64>> {
        let domain = || Error::Domain { func: self.name(), re: a0.re, im: a0.im };
        let mut out = Vec::with_capacity(order + 1);
        match *self {
            Analytic::Exp => {
                let e = a0.exp();
                let mut fact = 1.0;
                for k in 0..=order {
                    if k > 0 {
                        fact *= k as f64;
                    }
                    out.push(e / fact);
                }
            }
            Analytic::Log => {
                if off_branch_cut(a0) {
                    return Err(domain());
                }
                out.push(a0.ln());
                let inv = a0.inv();
                let mut p = inv;
                for k in 1..=order {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    out.push(p * (sign / k as f64));
                    p *= inv;
                }
            }
            Analytic::Sin | Analytic::Cos => {
                let (s, co) = (a0.sin(), a0.cos());
                // derivative cycle starting at sin: sin, cos, -sin, -cos
                let cycle = [s, co, -s, -co];
                let shift = if matches!(self, Analytic::Sin) { 0 } else { 1 };
                let mut fact = 1.0;
                for k in 0..=order {
                    if k > 0 {
                        fact *= k as f64;
                    }
                    out.push(cycle[(k + shift) % 4] / fact);
                }
            }
            Analytic::Pow(p) => return pow_taylor(a0, p, order).ok_or_else(domain),
            Analytic::Sqrt => return pow_taylor(a0, c(0.5), order).ok_or_else(domain),
            Analytic::Recip => {
                if a0.norm() < 1e-300 {
                    return Err(domain());
                }
                let inv = a0.inv();
                let mut p = inv;
                for k in 0..=order {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    out.push(p * sign);
                    p *= inv;
                }
            }
        }
        Ok(out)
    }
}

fn off_branch_cut(a0: C64) -> bool {
    a0.norm() < 1e-300 || (a0.im == 0.0 && a0.re < 0.0)
}

fn pow_taylor(a0: C64, p: C64, order: usize) -> Option<Vec<C64>> {
    let integral = p.im == 0.0 && libm::round(p.re) == p.re;
    if integral && p.re >= 0.0 {
        // polynomial: fine at any base value
        let k = p.re as i32;
        let mut out = Vec::with_capacity(order + 1);
        let mut binom = 1.0;
        for j in 0..=order as i32 {
            if j > k {
                out.push(c(0.0));
                continue;
            }
            out.push(a0.powi(k - j) * binom);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        return Some(out);
    }
    if integral {
        if a0.norm() < 1e-300 {
            return None;
        }
    } else if off_branch_cut(a0) {
        return None;
    }
    let mut out = Vec::with_capacity(order + 1);
    let mut cur = if integral { a0.powi(p.re as i32) } else { (p * a0.ln()).exp() };
    let inv = a0.inv();
    for k in 0..=order {
        out.push(cur);
        cur = cur * (p - c(k as f64)) * inv / (k + 1) as f64;
    }
    Some(out)
}

impl Jet {
    pub fn constant(space: &JetSpace, v: C64) -> Jet {
        let order = space.max_order();
        let mut coeffs = vec![C64::new(0.0, 0.0); space.coeff_count(order)];
        coeffs[0] = v;
        Jet { space: space.clone(), order, coeffs }
    }

    pub fn variable(space: &JetSpace, var: usize, base: f64) -> Jet {
        assert!(var < space.nvars(), "variable {var} out of range");
        let mut j = Jet::constant(space, c(base));
        if space.max_order() >= 1 {
            let mut e = vec![0u8; space.nvars()];
            e[var] = 1;
            let k = space.0.lookup[&e];
            j.coeffs[k] = c(1.0);
        }
        j
    }

    /// Builds a jet from raw normalized coefficients in the space's graded order.
    pub fn from_coeffs(space: &JetSpace, order: usize, coeffs: Vec<C64>) -> Jet {
        assert!(order <= space.max_order());
        assert_eq!(coeffs.len(), space.coeff_count(order), "coefficient count does not match order");
        Jet { space: space.clone(), order, coeffs }
    }

    pub fn space(&self) -> &JetSpace {
        &self.space
    }

    pub fn num_vars(&self) -> usize {
        self.space.nvars()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Value at the base point.
    #[inline]
    pub fn value(&self) -> C64 {
        self.coeffs[0]
    }

    /// Normalized coefficient of a multi-index; zero above the jet's order.
    pub fn coeff(&self, multi: &[u8]) -> C64 {
        assert_eq!(multi.len(), self.num_vars());
        match self.space.0.lookup.get(multi) {
            Some(&k) if k < self.coeffs.len() => self.coeffs[k],
            _ => C64::new(0.0, 0.0),
        }
    }

    /// Raw partial derivative at the base point (coefficient times multi-index factorial).
    pub fn derivative(&self, multi: &[u8]) -> C64 {
        let fact: f64 = multi.iter().map(|&e| (1..=e as u32).map(|v| v as f64).product::<f64>()).product();
        self.coeff(multi) * fact
    }

    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        let len = self.space.coeff_count(order);
        Jet { space: self.space.clone(), order, coeffs: self.coeffs[..len].to_vec() }
    }

    pub fn conj(&self) -> Jet {
        Jet { space: self.space.clone(), order: self.order, coeffs: self.coeffs.iter().map(|z| z.conj()).collect() }
    }

    pub fn re(&self) -> Jet {
        Jet { space: self.space.clone(), order: self.order, coeffs: self.coeffs.iter().map(|z| c(z.re)).collect() }
    }

    /// Largest |Im| over all coefficients.
    pub fn max_imag(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }

    /// Largest |coefficient|.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest coefficient difference over the common order.
    pub fn max_diff(&self, other: &Jet) -> f64 {
        let len = self.coeffs.len().min(other.coeffs.len());
        (0..len).fold(0.0, |m, k| m.max((self.coeffs[k] - other.coeffs[k]).norm()))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    fn check_space(&self, other: &Jet) -> Result<()> {
        if self.space.same(&other.space) {
            return Ok(());
        }
        if self.num_vars() != other.num_vars() {
            return Err(Error::VarMismatch { left: self.num_vars(), right: other.num_vars() });
        }
        Err(Error::SpaceMismatch)
    }

    pub fn checked_add(&self, other: &Jet) -> Result<Jet> {
        self.check_space(other)?;
        let order = self.order.min(other.order);
        let len = self.space.coeff_count(order);
        let coeffs = (0..len).map(|k| self.coeffs[k] + other.coeffs[k]).collect();
        Ok(Jet { space: self.space.clone(), order, coeffs })
    }

    /// Truncated Cauchy product at order `min(self.order, other.order)`.
    pub fn checked_mul(&self, other: &Jet) -> Result<Jet> {
        self.check_space(other)?;
        let order = self.order.min(other.order);
        let lay = &self.space.0;
        let len = lay.len_for(order);
        let mut coeffs = Vec::with_capacity(len);
        let (a, b) = (&self.coeffs, &other.coeffs);
        for k in 0..len {
            let mut acc = C64::new(0.0, 0.0);
            for &(i, j) in &lay.pairs[lay.pair_start[k]..lay.pair_start[k + 1]] {
                acc += a[i as usize] * b[j as usize];
            }
            coeffs.push(acc);
        }
        Ok(Jet { space: self.space.clone(), order, coeffs })
    }

    pub fn scale(&self, s: C64) -> Jet {
        Jet { space: self.space.clone(), order: self.order, coeffs: self.coeffs.iter().map(|z| z * s).collect() }
    }

    pub fn add_const(&self, s: C64) -> Jet {
        let mut j = self.clone();
        j.coeffs[0] += s;
        j
    }

    /// Partial derivative in variable `var`; the result has one order less.
    pub fn partial(&self, var: usize) -> Result<Jet> {
        if var >= self.num_vars() {
            return Err(Error::VarMismatch { left: var, right: self.num_vars() });
        }
        if self.order == 0 {
            return Err(Error::OrderExhausted { what: "partial derivative" });
        }
        let lay = &self.space.0;
        let order = self.order - 1;
        let len = lay.len_for(order);
        let full = lay.exps.len();
        let coeffs = (0..len)
            .map(|k| {
                let up = lay.raise[var * full + k] as usize;
                self.coeffs[up] * (lay.exps[k][var] as f64 + 1.0)
            })
            .collect();
        Ok(Jet { space: self.space.clone(), order, coeffs })
    }

    /// Composition f(a) with a univariate analytic function, truncated at `a.order`.
    pub fn apply(&self, f: Analytic) -> Result<Jet> {
        let a0 = self.value();
        let taylor = f.taylor(a0, self.order)?;
        let mut nil = self.clone();
        nil.coeffs[0] = C64::new(0.0, 0.0);
        // Horner in the nilpotent part
        let mut acc = Jet::constant(&self.space, taylor[self.order]).truncate(self.order);
        for k in (0..self.order).rev() {
            acc = &acc * &nil;
            acc.coeffs[0] += taylor[k];
        }
        Ok(acc)
    }

    pub fn exp(&self) -> Jet {
        self.apply(Analytic::Exp).expect("exp is entire")
    }

    pub fn ln(&self) -> Result<Jet> {
        self.apply(Analytic::Log)
    }

    pub fn sin(&self) -> Jet {
        self.apply(Analytic::Sin).expect("sin is entire")
    }

    pub fn cos(&self) -> Jet {
        self.apply(Analytic::Cos).expect("cos is entire")
    }

    pub fn sqrt(&self) -> Result<Jet> {
        self.apply(Analytic::Sqrt)
    }

    pub fn recip(&self) -> Result<Jet> {
        self.apply(Analytic::Recip)
    }

    pub fn powi(&self, k: i32) -> Result<Jet> {
        self.apply(Analytic::Pow(c(k as f64)))
    }

    pub fn div(&self, other: &Jet) -> Result<Jet> {
        self.checked_mul(&other.recip()?)
    }

    /// Re-expands the truncated polynomial about `base + delta`.
    pub fn recenter(&self, delta: &[f64]) -> Jet {
        assert_eq!(delta.len(), self.num_vars());
        let lay = &self.space.0;
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len()];
        // (x + d)^e expanded term by term: coefficient of x^f is prod binom(e_i, f_i) d_i^(e_i - f_i)
        for (k, &ck) in self.coeffs.iter().enumerate() {
            if ck == C64::new(0.0, 0.0) {
                continue;
            }
            let e = &lay.exps[k];
            for (fidx, slot) in out.iter_mut().enumerate() {
                let f = &lay.exps[fidx];
                if f.iter().zip(e).any(|(fi, ei)| fi > ei) {
                    continue;
                }
                let mut w = 1.0;
                for v in 0..e.len() {
                    w *= binom(e[v] as u32, f[v] as u32) * libm::pow(delta[v], (e[v] - f[v]) as f64);
                }
                *slot += ck * w;
            }
        }
        Jet { space: self.space.clone(), order: self.order, coeffs: out }
    }

    /// Value of the truncated polynomial at displacement `delta` from the base point.
    pub fn eval_at(&self, delta: &[f64]) -> C64 {
        let lay = &self.space.0;
        self.coeffs.iter().enumerate().fold(C64::new(0.0, 0.0), |acc, (k, ck)| {
            let w: f64 = lay.exps[k].iter().zip(delta).map(|(&e, &d)| libm::pow(d, e as f64)).product();
            acc + ck * w
        })
    }

    /// Embeds the jet into a space with more variables (the extra ones are absent).
    pub fn lift(&self, target: &JetSpace) -> Jet {
        assert!(target.nvars() >= self.num_vars());
        let order = self.order.min(target.max_order());
        let len = target.coeff_count(order);
        let mut coeffs = vec![C64::new(0.0, 0.0); len];
        let lay = &self.space.0;
        for k in 0..self.space.coeff_count(order) {
            let mut e = lay.exps[k].clone();
            e.resize(target.nvars(), 0);
            coeffs[target.0.lookup[&e]] = self.coeffs[k];
        }
        Jet { space: target.clone(), order, coeffs }
    }

    /// Degree of the monomial stored in slot `k`.
    pub fn slot_degree(&self, k: usize) -> usize {
        self.space.0.degree[k]
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Sum of jets that all live in `space`; the empty sum is an exact zero.
pub fn sum<'a, It: IntoIterator<Item = &'a Jet>>(space: &JetSpace, it: It) -> Jet {
    it.into_iter().fold(space.zero(), |acc, j| &acc + j)
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                let f: fn(&Jet, &Jet) -> Jet = $body;
                f(self, rhs)
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| a.checked_add(b).expect("jet spaces differ"));
forward_binop!(Sub, sub, |a, b| a.checked_add(&-b).expect("jet spaces differ"));
forward_binop!(Mul, mul, |a, b| a.checked_mul(b).expect("jet spaces differ"));

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(c(-1.0))
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

impl Mul<C64> for &Jet {
    type Output = Jet;
    fn mul(self, s: C64) -> Jet {
        self.scale(s)
    }
}

impl Mul<C64> for Jet {
    type Output = Jet;
    fn mul(self, s: C64) -> Jet {
        self.scale(s)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale(c(s))
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale(c(s))
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        *self = &*self + rhs;
    }
}

impl AddAssign<Jet> for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = &*self + &rhs;
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        *self = &*self - rhs;
    }
}

impl SubAssign<Jet> for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = &*self - &rhs;
    }
}

impl MulAssign<&Jet> for Jet {
    fn mul_assign(&mut self, rhs: &Jet) {
        *self = &*self * rhs;
    }
}
