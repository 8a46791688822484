//! Randomized invariant suites behind `crcartan check`.
//!
//! Every suite draws its points and functions from a `ChaCha8Rng` seeded once;
//! per-task seeds are drawn up front, so results do not depend on scheduling.

use std::fmt;
use std::str::FromStr;

use crcartan_core::coframe::Coframe;
use crcartan_core::fefferman::conformal_covariance;
use crcartan_core::form::Form;
use crcartan_core::gauge::{check_l_transform, check_ts_transform, rescale};
use crcartan_core::jet::{Jet, JetSpace, C64, I};
use crcartan_core::pseudohermitian::Geometry;
use crcartan_core::tractor::{determinant, gauge_transform, gram_signature, metric, Tractor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    coframe, compatibility_residuals, curvature_residuals, density, fefferman_parts, holonomic_residuals,
};
use crate::library::{builtin, builtin_spec};
use crate::spec::{eval_jet, eval_point, parse_spec, ManifoldSpec, PointValue, Value};
use crate::tol::{Residual, Tolerances};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Jets,
    GaugeLaws,
    Tractor,
    Cartan,
    Fefferman,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["jets", "gauge-laws", "tractor", "cartan", "fefferman", "all"];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Jets => "jets",
            Suite::GaugeLaws => "gauge-laws",
            Suite::Tractor => "tractor",
            Suite::Cartan => "cartan",
            Suite::Fefferman => "fefferman",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Suite, String> {
        Ok(match s {
            "jets" => Suite::Jets,
            "gauge-laws" => Suite::GaugeLaws,
            "tractor" => Suite::Tractor,
            "cartan" => Suite::Cartan,
            "fefferman" => Suite::Fefferman,
            "all" => Suite::All,
            _ => return Err(format!("unknown suite `{s}` (expected one of {})", Suite::NAMES.join(", "))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    /// Spec and point, or another description of the sample.
    pub case: String,
    #[serde(flatten)]
    pub residual: Residual,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.residual;
        let op = match r.bound {
            crate::tol::Bound::Max => "<=",
            crate::tol::Bound::Min => ">=",
        };
        write!(
            f,
            "{} {:<10} {:<34} {:<32} {:>10.3e} {op} {:.0e}",
            if r.pass { "PASS" } else { "FAIL" },
            self.suite,
            r.name,
            self.case,
            r.value,
            r.tolerance
        )
    }
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub seed: u64,
    /// Random points (or functions) per spec.
    pub points: usize,
    pub tols: Tolerances,
}

impl Default for CheckConfig {
    fn default() -> CheckConfig {
        CheckConfig { seed: 7, points: 10, tols: Tolerances::default() }
    }
}

/// The specs the geometric suites run on.
pub const SPECS: [&str; 3] = ["heisenberg", "sphere3", "heis_pert"];

pub fn run(suite: Suite, cfg: &CheckConfig) -> Result<Vec<CheckResult>, Error> {
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Jets {
        out.extend(jets(cfg)?);
    }
    if all || suite == Suite::GaugeLaws {
        out.extend(gauge_laws(cfg)?);
    }
    if all || suite == Suite::Tractor {
        out.extend(tractor(cfg)?);
    }
    if all || suite == Suite::Cartan {
        out.extend(cartan(cfg)?);
    }
    if all || suite == Suite::Fefferman {
        out.extend(fefferman(cfg)?);
    }
    Ok(out)
}

/// Runs `task(spec, point, rng)` for every spec and `cfg.points` sampled
/// points, in parallel, keeping results in task order.
fn per_point<F>(suite: &'static str, specs: &[&'static str], cfg: &CheckConfig, task: F) -> Result<Vec<CheckResult>, Error>
where
    F: Fn(&'static str, &ManifoldSpec, &[f64], &mut ChaCha8Rng) -> Result<Vec<Residual>, Error> + Sync,
{
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut jobs = Vec::new();
    for &name in specs {
        for _ in 0..cfg.points {
            let point = sample_point(name, &mut rng);
            jobs.push((name, point, rng.gen::<u64>()));
        }
    }
    let results: Vec<Result<Vec<CheckResult>, Error>> = jobs
        .par_iter()
        .map(|(name, point, seed)| {
            let spec = builtin_spec(name);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let case = format!("{name}@{}", fmt_point(point));
            let rs = task(name, &spec, point, &mut rng)?;
            Ok(rs.into_iter().map(|residual| CheckResult { suite, case: case.clone(), residual }).collect())
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

pub fn sample_point(name: &str, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let b = builtin(name).expect("builtin spec");
    // round to a few digits so cases are easy to replay from the command line
    b.sample.iter().map(|&(lo, hi)| (rng.gen_range(lo..hi) * 1e4).round() / 1e4).collect()
}

pub fn fmt_point(p: &[f64]) -> String {
    p.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",")
}

/// Random polynomial of degree ≤ 3 centred at the base point.
pub fn random_poly(space: &JetSpace, rng: &mut ChaCha8Rng, scale: f64) -> Jet {
    let m = space.nvars();
    let vars: Vec<Jet> = (0..m).map(|i| space.variable(i, 0.0)).collect();
    let mut f = space.real(rng.gen_range(-1.0..1.0) * scale);
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

fn random_complex_poly(space: &JetSpace, rng: &mut ChaCha8Rng, scale: f64) -> Jet {
    let re = random_poly(space, rng, scale);
    let im = random_poly(space, rng, scale);
    &re + &(&im * I)
}

pub fn random_field(cf: &Coframe, rng: &mut ChaCha8Rng) -> Tractor {
    let s = cf.space();
    let ell = random_complex_poly(s, rng, 0.5);
    let tau = (0..cf.n()).map(|_| random_complex_poly(s, rng, 0.5)).collect();
    let psi = random_complex_poly(s, rng, 0.5);
    Tractor::new(ell, tau, psi)
}

// ---------------------------------------------------------------- jets

/// Test functions for the finite-difference oracle, in the spec language over
/// the coordinates `t, x, y` with `z = x + iy`.
pub const FD_LIBRARY: [&str; 20] = [
    "exp(t*x)",
    "sin(t)*cos(x)",
    "log(t^2 + x^2 + 1)",
    "1/(t + y + 2)",
    "sqrt(x^2 + 1.5)",
    "(t + 1.2)^2*sqrt(t + 1.2)",
    "exp(y)*sin(t)",
    "t*x*y",
    "exp(cos(t*y))",
    "sin(sin(x))",
    "log(exp(t) + exp(x))",
    "t/(y^2 + 0.5)",
    "cos(3*t)*x^2",
    "1/((x + 2)^2*sqrt(x + 2))",
    "log(sqrt(t*x + 4))",
    "sin(y)*cos(y)*exp(t)",
    "t^3 - 2*x",
    "1/exp(x*y)",
    "exp(sin(t + x + y))",
    "exp(i*t)*z^2*conj(z)",
];

/// A spec whose density is `expr`, so the library goes through the parser.
pub fn fd_spec(expr: &str) -> ManifoldSpec {
    let text = format!(
        "manifold \"fd\" {{ n = 1 complex z = (x, y) coords = [t, x, y] }}\n\
         theta = d(t) + i*(conj(z)*d(z) - z*d(conj(z)))\ntheta1 = sqrt(2)*d(z)\ndensity = {expr}\n"
    );
    parse_spec(&text).expect("library expression parses")
}

fn scalar_at(spec: &ManifoldSpec, p: &[f64]) -> C64 {
    match eval_point(spec, spec.density().unwrap(), p) {
        Ok(PointValue::Scalar(v)) => v,
        _ => C64::new(f64::NAN, f64::NAN),
    }
}

fn central(f: &dyn Fn(&[f64]) -> C64, x: &[f64], v: usize, k: u8, h: f64) -> C64 {
    let at = |s: f64| {
        let mut y = x.to_vec();
        y[v] += s;
        f(&y)
    };
    match k {
        0 => f(x),
        1 => (at(h) - at(-h)) / (2.0 * h),
        2 => (at(h) - f(x) * 2.0 + at(-h)) / (h * h),
        3 => (at(2.0 * h) - at(h) * 2.0 + at(-h) * 2.0 - at(-2.0 * h)) / (2.0 * h * h * h),
        _ => unreachable!("stencils go to third order"),
    }
}

fn mixed(f: &dyn Fn(&[f64]) -> C64, x: &[f64], multi: &[u8], h: f64) -> C64 {
    match multi.iter().position(|&e| e > 0) {
        None => f(x),
        Some(v) => {
            let mut rest = multi.to_vec();
            let k = rest[v];
            rest[v] = 0;
            let inner = |y: &[f64]| mixed(f, y, &rest, h);
            central(&inner, x, v, k, h)
        }
    }
}

/// `∂^multi f(x)` by central differences with two Richardson steps.
pub fn fd_derivative(f: &dyn Fn(&[f64]) -> C64, x: &[f64], multi: &[u8]) -> C64 {
    let d = |h: f64| mixed(f, x, multi, h);
    let (a, b, c) = (d(0.04), d(0.02), d(0.01));
    let r1 = (b * 4.0 - a) / 3.0;
    let r2 = (c * 4.0 - b) / 3.0;
    (r2 * 16.0 - r1) / 15.0
}

/// Largest relative error `|jet − fd| / max(|jet|, 1)` over derivatives of order ≤ 3.
pub fn fd_error(spec: &ManifoldSpec, point: &[f64]) -> Result<f64, Error> {
    let s = JetSpace::new(3, 3);
    let Value::Scalar(jet) = eval_jet(spec, spec.density().unwrap(), &s, point)? else {
        unreachable!("density is a scalar")
    };
    let f = |p: &[f64]| scalar_at(spec, p);
    let mut worst: f64 = 0.0;
    for k in 0..s.coeff_count(3) {
        let e = s.exponents(k);
        let exact = jet.derivative(e);
        let fd = fd_derivative(&f, point, e);
        worst = worst.max((exact - fd).norm() / exact.norm().max(1.0));
    }
    Ok(worst)
}

/// Re-expanding a jet about a nearby point agrees with evaluating there,
/// on the coefficients the truncation leaves exact to `O(δ^3)`.
pub fn taylor_shift_error(spec: &ManifoldSpec, point: &[f64], delta: &[f64]) -> Result<f64, Error> {
    const K: usize = 6;
    let s = JetSpace::new(3, K);
    let Value::Scalar(jet) = eval_jet(spec, spec.density().unwrap(), &s, point)? else { unreachable!() };
    let moved: Vec<f64> = point.iter().zip(delta).map(|(p, d)| p + d).collect();
    let Value::Scalar(there) = eval_jet(spec, spec.density().unwrap(), &s, &moved)? else { unreachable!() };
    let shifted = jet.recenter(delta);
    let mut worst: f64 = 0.0;
    for k in 0..s.coeff_count(K - 3) {
        let e = s.exponents(k);
        worst = worst.max((shifted.coeff(e) - there.coeff(e)).norm() / there.coeff(e).norm().max(1.0));
    }
    Ok(worst)
}

fn random_jet(space: &JetSpace, order: usize, rng: &mut ChaCha8Rng) -> Jet {
    let n = space.coeff_count(order);
    let cs = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    Jet::from_coeffs(space, order, cs)
}

fn rel(a: &Jet, b: &Jet) -> f64 {
    a.max_diff(b) / a.max_abs().max(b.max_abs()).max(1.0)
}

/// Leibniz, `d² = 0` and inverse-function round trips on random jets.
pub fn identity_residuals(rng: &mut ChaCha8Rng) -> Result<[f64; 3], Error> {
    const K: usize = 4;
    let s = JetSpace::new(3, K);
    let a = random_jet(&s, K, rng);
    let b = random_jet(&s, K, rng);
    let mut leibniz: f64 = 0.0;
    for v in 0..3 {
        let lhs = (&a * &b).partial(v)?;
        let rhs = &(&a.partial(v)? * &b) + &(&a * &b.partial(v)?);
        leibniz = leibniz.max(rel(&lhs, &rhs));
    }
    let w = Form::one_form(&s, (0..3).map(|_| random_jet(&s, K, rng)).collect());
    let dd = w.d()?.d()?.max_abs() / w.max_abs().max(1.0);
    let dd = dd.max(Form::function(a.clone()).d()?.d()?.max_abs() / a.max_abs().max(1.0));
    let c = a.add_const(-a.value() + C64::new(1.5, 0.4));
    let mut trip = rel(&c.ln()?.exp(), &c);
    trip = trip.max(rel(&(&c.recip()? * &c), &s.real(1.0)));
    let r = c.sqrt()?;
    trip = trip.max(rel(&(&r * &r), &c));
    Ok([leibniz, dd, trip])
}

fn jets(cfg: &CheckConfig) -> Result<Vec<CheckResult>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let jobs: Vec<(Vec<f64>, [f64; 3], u64)> = (0..cfg.points)
        .map(|_| {
            let p = (0..3).map(|_| (rng.gen_range(-0.5..0.5) * 1e4f64).round() / 1e4).collect();
            let d = [0.0; 3].map(|_: f64| rng.gen_range(-1e-4..1e-4));
            (p, d, rng.gen())
        })
        .collect();
    let specs: Vec<ManifoldSpec> = FD_LIBRARY.iter().map(|e| fd_spec(e)).collect();
    let results: Vec<Result<Vec<CheckResult>, Error>> = jobs
        .par_iter()
        .map(|(p, delta, seed)| {
            let mut fd: f64 = 0.0;
            let mut shift: f64 = 0.0;
            for spec in &specs {
                fd = fd.max(fd_error(spec, p)?);
                shift = shift.max(taylor_shift_error(spec, p, delta)?);
            }
            let [leibniz, dd, trip] = identity_residuals(&mut ChaCha8Rng::seed_from_u64(*seed))?;
            let t = &cfg.tols;
            let case = format!("t,x,y={}", fmt_point(p));
            Ok([
                Residual::max("jets.finite_difference", fd, 1e-6, t),
                Residual::max("jets.taylor_shift", shift, 1e-9, t),
                Residual::max("jets.leibniz", leibniz, 1e-10, t),
                Residual::max("jets.d_squared", dd, 1e-10, t),
                Residual::max("jets.round_trip", trip, 1e-10, t),
            ]
            .into_iter()
            .map(|residual| CheckResult { suite: "jets", case: case.clone(), residual })
            .collect())
        })
        .collect();
    results.into_iter().collect::<Result<Vec<_>, _>>().map(|v| v.concat())
}

// ---------------------------------------------------------- gauge laws

fn gauge_laws(cfg: &CheckConfig) -> Result<Vec<CheckResult>, Error> {
    per_point("gauge-laws", &SPECS, cfg, |_, spec, p, rng| {
        let cf = coframe(spec, p, 9)?;
        let g = Geometry::new(cf.clone())?;
        let s = cf.space();
        let f = random_poly(s, rng, 0.3);
        let dens = random_complex_poly(s, rng, 0.5).add_const(C64::new(1.0, 0.3));
        let l = check_l_transform(&g, &f, &dens)?;
        let (rt, rs) = check_ts_transform(&g, &random_poly(s, rng, 0.3))?;
        // tractor law out and back
        let gh = Geometry::new(rescale(&cf, &f)?)?;
        let sig = random_field(&cf, rng);
        let back = gauge_transform(&gauge_transform(&sig, &f, &g)?, &-&f, &gh)?;
        let t = &cfg.tols;
        Ok(vec![
            Residual::max("gauge.l_transform", l, 1e-8, t),
            Residual::max("gauge.t_transform", rt, 1e-7, t),
            Residual::max("gauge.s_transform", rs, 1e-7, t),
            Residual::max("gauge.tractor_round_trip", back.value_diff(&sig), 1e-9, t),
        ])
    })
}

// ------------------------------------------------------------- tractor

/// Invariance of the tractor metric and determinant under a random gauge
/// change, on a random frame of tractor fields.
pub fn invariance_residuals(cf: &Coframe, rng: &mut ChaCha8Rng) -> Result<(f64, f64), Error> {
    let g = Geometry::new(cf.clone())?;
    let n = cf.n();
    let f = random_poly(cf.space(), rng, 0.3);
    let frame: Vec<Tractor> = (0..n + 2).map(|_| random_field(cf, rng)).collect();
    let moved = frame.iter().map(|s| gauge_transform(s, &f, &g)).collect::<Result<Vec<_>, _>>()?;
    let mut m: f64 = 0.0;
    for a in 0..n + 2 {
        for b in 0..n + 2 {
            let h0 = metric(&frame[a], &frame[b])?.value();
            let h1 = metric(&moved[a], &moved[b])?.value();
            m = m.max((h0 - h1).norm());
        }
    }
    let d = (determinant(&frame)?.value() - determinant(&moved)?.value()).norm();
    Ok((m, d))
}

fn tractor(cfg: &CheckConfig) -> Result<Vec<CheckResult>, Error> {
    let mut out = per_point("tractor", &SPECS, cfg, |_, spec, p, rng| {
        let cf = coframe(spec, p, 7)?;
        let (m, d) = invariance_residuals(&cf, rng)?;
        let n = cf.n();
        let sig = gram_signature(&Tractor::standard_frame(cf.space(), n))?;
        let t = &cfg.tols;
        Ok(vec![
            Residual::max("tractor.metric_invariance", m, 1e-9, t),
            Residual::max("tractor.determinant_invariance", d, 1e-9, t),
            Residual::max("tractor.gram_signature", if sig == (n + 1, 1) { 0.0 } else { 1.0 }, 0.0, t),
        ])
    })?;
    out.extend(per_point("tractor", &["heis_holo"], cfg, |_, spec, p, _| {
        let cf = coframe(spec, p, 9)?;
        let comp = density(spec, &cf, p)?.expect("heis_holo has a density");
        holonomic_residuals(&Geometry::new(cf)?, &comp, &cfg.tols)
    })?);
    Ok(out)
}

// -------------------------------------------------------------- cartan

fn cartan(cfg: &CheckConfig) -> Result<Vec<CheckResult>, Error> {
    per_point("cartan", &SPECS, cfg, |name, spec, p, rng| {
        let cf = coframe(spec, p, 7)?;
        let geom = Geometry::new(cf)?;
        let curv = crcartan_core::cartan::curvature_tensors(&geom)?;
        let (metric, det) = compatibility_residuals(&geom)?;
        let (diff, ell) = curvature_residuals(&geom)?;
        let t = &cfg.tols;
        let q = curv.norms()[2];
        let mut out = vec![
            Residual::max("cartan.metric", metric, 1e-8, t),
            Residual::max("cartan.determinant", det, 1e-8, t),
            Residual::max("cartan.curvature", diff, 1e-7, t),
            Residual::max("cartan.ell_slot", ell, 1e-12, t),
            Residual::max("cartan.q_symmetry", curv.q_symmetry_residual(), 1e-9, t),
            Residual::max("cartan.u_trace", curv.u_trace(), 1e-9, t),
        ];
        if name == "heis_pert" {
            out.push(Residual::min("cartan.q_nonzero", q, 1e-3, t));
        } else {
            out.push(Residual::max("cartan.q_spherical", q, 1e-7, t));
            // the verdict is gauge independent
            let cf = coframe(spec, p, 8)?;
            let f = random_poly(cf.space(), rng, 0.3);
            let hat = Geometry::new(rescale(&cf, &f)?)?;
            let qh = crcartan_core::cartan::curvature_tensors(&hat)?.norms()[2];
            out.push(Residual::max("cartan.q_spherical_rescaled", qh, 1e-7, t));
        }
        Ok(out)
    })
}

// ----------------------------------------------------------- fefferman

fn fefferman(cfg: &CheckConfig) -> Result<Vec<CheckResult>, Error> {
    per_point("fefferman", &SPECS, cfg, |_, spec, p, rng| {
        let geom = Geometry::new(coframe(spec, p, 7)?)?;
        let mut out = fefferman_parts(&geom)?.residuals(&cfg.tols);
        let cf = coframe(spec, p, 8)?;
        let u = random_poly(cf.space(), rng, 0.2);
        out.push(Residual::max("fefferman.conformal_covariance", conformal_covariance(&cf, &u)?, 1e-7, &cfg.tols));
        Ok(out)
    })
}
