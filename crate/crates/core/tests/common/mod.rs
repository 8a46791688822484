#![allow(dead_code)]

use crcartan_core::coframe::Coframe;
use crcartan_core::form::Form;
use crcartan_core::jet::{Jet, JetSpace, C64, I};
use crcartan_core::tractor::Tractor;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// 1-form `Σ coeffs[i] dx^i`.
pub fn one_form(space: &JetSpace, coeffs: Vec<Jet>) -> Form {
    Form::one_form(space, coeffs)
}

/// Round sphere in Euler angles `(a, b, c)`:
/// `θ = (dc + cos b da)/4`, `θ^1 = e^{ic}(sin b da + i db)/(2√2)`.
pub fn sphere(point: [f64; 3], order: usize) -> Coframe {
    let s = JetSpace::new(3, order);
    let b = s.variable(1, point[1]);
    let cc = s.variable(2, point[2]);
    let theta = one_form(&s, vec![&b.cos() * 0.25, s.zero(), s.real(0.25)]);
    let e = (&cc * I).exp() * (1.0 / (2.0 * 2f64.sqrt()));
    let theta1 = one_form(&s, vec![&e * &b.sin(), &e * I, s.zero()]);
    Coframe::new(theta, vec![theta1]).unwrap()
}

/// The left-invariant forms `σ_0, σ_1, σ_2` of the sphere chart.
pub fn sphere_sigmas(point: [f64; 3], order: usize) -> [Form; 3] {
    let s = JetSpace::new(3, order);
    let b = s.variable(1, point[1]);
    let cc = s.variable(2, point[2]);
    let s0 = one_form(&s, vec![&b.cos() * 0.5, s.zero(), s.real(0.5)]);
    let s1 = one_form(&s, vec![&(&cc.cos() * &b.sin()) * 0.5, &cc.sin() * -0.5, s.zero()]);
    let s2 = one_form(&s, vec![&(&cc.sin() * &b.sin()) * 0.5, &cc.cos() * 0.5, s.zero()]);
    [s0, s1, s2]
}

/// Rigid hypersurface `Im w = ρ(z)` in the chart `(t, x_1, y_1, …)`, with
/// `θ = dt + i Σ (ρ_{z̄_α} dz̄_α − ρ_{z_α} dz_α)` and `θ^α = dz_α`.
/// `rho_z` returns the jets `∂ρ/∂z_α` from the jets `z_α`.
pub fn rigid<F>(n: usize, point: &[f64], order: usize, rho_z: F) -> Coframe
where
    F: Fn(&[Jet]) -> Vec<Jet>,
{
    let s = JetSpace::new(2 * n + 1, order);
    let z: Vec<Jet> = (0..n)
        .map(|a| &s.variable(1 + 2 * a, point[1 + 2 * a]) + &(&s.variable(2 + 2 * a, point[2 + 2 * a]) * I))
        .collect();
    let g = rho_z(&z);
    let mut coeffs = vec![s.zero(); 2 * n + 1];
    coeffs[0] = s.real(1.0);
    for a in 0..n {
        // i(ḡ dz̄ − g dz) with dz = dx + i dy
        let gb = g[a].conj();
        coeffs[1 + 2 * a] = &(&gb - &g[a]) * I;
        coeffs[2 + 2 * a] = &(&gb + &g[a]) * 1.0;
    }
    let theta = one_form(&s, coeffs);
    let theta_a = (0..n)
        .map(|a| {
            let mut cs = vec![s.zero(); 2 * n + 1];
            cs[1 + 2 * a] = s.real(1.0);
            cs[2 + 2 * a] = s.constant(I);
            one_form(&s, cs)
        })
        .collect();
    Coframe::new(theta, theta_a).unwrap()
}

/// Flat Heisenberg group: `ρ = Σ |z_α|²`.
pub fn heisenberg(n: usize, point: &[f64], order: usize) -> Coframe {
    rigid(n, point, order, |z| z.iter().map(Jet::conj).collect())
}

/// `Im w = |z|² + ε|z|⁴`.
pub fn heis_pert(eps: f64, point: &[f64], order: usize) -> Coframe {
    rigid(1, point, order, |z| {
        let zb = z[0].conj();
        let r2 = &z[0] * &zb;
        vec![&zb * &(&r2 * (2.0 * eps)).add_const(c(1.0))]
    })
}

/// `Im w = |z_1|² + |z_2|² + ε(|z_1|⁴ + |z_1 z_2|²)`.
pub fn heis_pert2(eps: f64, point: &[f64], order: usize) -> Coframe {
    rigid(2, point, order, |z| {
        let z1b = z[0].conj();
        let z2b = z[1].conj();
        let r1 = &z[0] * &z1b;
        let r2 = &z[1] * &z2b;
        let g1 = &z1b + &(&(&(&r1 * 2.0) + &r2) * &z1b) * eps;
        let g2 = &z2b + &(&(&r1 * &z2b) * eps);
        vec![g1, g2]
    })
}

/// Random polynomial of degree ≤ 3 with small coefficients, centred at the base point.
pub fn random_poly(cf: &Coframe, rng: &mut ChaCha8Rng, scale: f64) -> Jet {
    let s = cf.space();
    let m = cf.dim();
    let vars: Vec<Jet> = (0..m).map(|i| s.variable(i, 0.0)).collect();
    let mut f = s.real(rng.gen_range(-1.0..1.0) * scale);
    for i in 0..m {
        f += &vars[i] * (rng.gen_range(-1.0..1.0) * scale);
        for j in i..m {
            f += &(&vars[i] * &vars[j]) * (rng.gen_range(-1.0..1.0) * scale);
            for k in j..m {
                f += &(&(&vars[i] * &vars[j]) * &vars[k]) * (rng.gen_range(-1.0..1.0) * scale * 0.5);
            }
        }
    }
    f
}

/// Tractor field with random low-degree polynomial components.
pub fn random_field(cf: &Coframe, rng: &mut ChaCha8Rng) -> Tractor {
    let n = cf.n();
    let comp = |rng: &mut ChaCha8Rng| {
        let re = random_poly(cf, rng, 0.5);
        let im = random_poly(cf, rng, 0.5);
        &re + &(&im * I)
    };
    let ell = comp(rng);
    let tau = (0..n).map(|_| comp(rng)).collect();
    let psi = comp(rng);
    Tractor::new(ell, tau, psi)
}
