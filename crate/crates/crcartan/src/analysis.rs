//! The full invariant ladder of a spec at a point, and its reports.

use crcartan_core::cartan::{curvature_tensors, sphericity, Cartan, Verdict, SPHERICITY_TOL};
use crcartan_core::coframe::Coframe;
use crcartan_core::fefferman::{
    fefferman_metric, levi_civita_ricci, max_value_diff, ricci_formula, signature, trace, trace_free_norm,
    Bilinear, FeffermanFrame,
};
use crcartan_core::form::Form;
use crcartan_core::gauge::{normalize_density_jet, rescale};
use crcartan_core::jet::{Jet, JetSpace, C64};
use crcartan_core::pseudohermitian::{norm2, Geometry};
use crcartan_core::tractor::{reeb_map, DensityCalculus, Tractor};
use serde::{Deserialize, Serialize};

use crate::spec::{eval_jet, ManifoldSpec, Value};
use crate::tol::{Residual, Tolerances};
use crate::Error;

/// Chart order used when none is given.
pub const DEFAULT_ORDER: usize = 6;
/// Chart order used when the spec has a density: the contact form that
/// normalizes it is a rescaling, which takes one more order.
pub const DENSITY_ORDER: usize = 7;

pub fn default_order(spec: &ManifoldSpec) -> usize {
    if spec.density().is_some() {
        DENSITY_ORDER
    } else {
        DEFAULT_ORDER
    }
}

/// Comma-separated reals, independent of locale.
pub fn parse_point(s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|x| {
            let x = x.trim();
            match x.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Point(format!("`{x}` is not a finite real number"))),
            }
        })
        .collect()
}

fn form_value(spec: &ManifoldSpec, expr: &crate::spec::Expr, space: &JetSpace, point: &[f64]) -> Result<Form, Error> {
    match eval_jet(spec, expr, space, point)? {
        Value::Form(cs) => Ok(Form::one_form(space, cs)),
        Value::Scalar(_) => unreachable!("the parser checks binding kinds"),
    }
}

/// The coframe exactly as written in the spec.
pub fn raw_coframe(spec: &ManifoldSpec, point: &[f64], order: usize) -> Result<Coframe, Error> {
    if point.len() != spec.dim() {
        return Err(Error::Point(format!("spec has {} coordinates, point has {}", spec.dim(), point.len())));
    }
    let space = JetSpace::new(spec.dim(), order);
    let theta = form_value(spec, spec.theta(), &space, point)?;
    let theta_a = (0..spec.n).map(|a| form_value(spec, spec.theta_a(a), &space, point)).collect::<Result<_, _>>()?;
    Ok(Coframe::new(theta, theta_a)?)
}

pub fn coframe(spec: &ManifoldSpec, point: &[f64], order: usize) -> Result<Coframe, Error> {
    Ok(raw_coframe(spec, point, order)?.orthonormalize()?)
}

/// The density component, as a jet in the space of `cf`.
pub fn density(spec: &ManifoldSpec, cf: &Coframe, point: &[f64]) -> Result<Option<Jet>, Error> {
    let Some(expr) = spec.density() else { return Ok(None) };
    match eval_jet(spec, expr, cf.space(), point)? {
        Value::Scalar(j) => Ok(Some(j.truncate(cf.order()))),
        Value::Form(_) => unreachable!("the parser checks binding kinds"),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scalars {
    /// Webster scalar curvature.
    pub r: f64,
    pub s: f64,
    pub torsion_norm: f64,
    pub t_norm: f64,
    pub schouten_norm: f64,
    pub w_norm: f64,
    pub v_norm: f64,
    pub q_norm: f64,
    pub u_norm: f64,
    pub y_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericityReport {
    /// `spherical` or `non-spherical`.
    pub verdict: String,
    /// `Q` when n = 1, `W` otherwise.
    pub deciding_tensor: String,
    pub deciding_norm: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub spec: String,
    pub point: Vec<f64>,
    pub order: usize,
    pub n: usize,
    pub scalars: Scalars,
    pub sphericity: SphericityReport,
    pub fefferman_scalar: f64,
    pub residuals: Vec<Residual>,
}

impl AnalysisReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|r| r.pass)
    }
}

/// Formula vs commutator curvature over every frame pair and standard tractor,
/// and the largest first-slot entry of the commutator.
pub fn curvature_residuals(geom: &Geometry) -> Result<(f64, f64), Error> {
    let cartan = Cartan::new(geom)?;
    let curv = curvature_tensors(geom)?;
    let m = geom.coframe.dim();
    let (mut diff, mut ell): (f64, f64) = (0.0, 0.0);
    for sig in Tractor::standard_frame(geom.coframe.space(), geom.n()) {
        for a in 0..m {
            for b in a + 1..m {
                let num = cartan.curvature_numeric(&sig, a, b)?;
                let form = curv.action(&sig.truncate(num.order()), a, b);
                diff = diff.max(num.value_diff(&form));
                ell = ell.max(num.ell.value().norm());
            }
        }
    }
    Ok((diff, ell))
}

/// Metric and determinant Leibniz residuals of the Cartan derivative on the standard frame.
pub fn compatibility_residuals(geom: &Geometry) -> Result<(f64, f64), Error> {
    let cartan = Cartan::new(geom)?;
    let frame = Tractor::standard_frame(geom.coframe.space(), geom.n());
    let mut metric: f64 = 0.0;
    for s1 in &frame {
        for s2 in &frame {
            metric = metric.max(cartan.metric_compatibility(s1, s2)?);
        }
    }
    Ok((metric, cartan.determinant_compatibility(&frame)?))
}

/// Holonomic checks of a CR density `comp·ℓ_ref`: the prolongation system,
/// then `R̂`, `Â⊗ℓ`, `ξ̂` and the pseudo-Einstein identity against the geometry
/// of the contact form that makes the density unit length.
pub fn holonomic_residuals(geom: &Geometry, comp: &Jet, tols: &Tolerances) -> Result<Vec<Residual>, Error> {
    let n = geom.n();
    let h = DensityCalculus::new(geom)?.holonomic(comp)?;
    let mut out = vec![Residual::max("density.dbar", h.dbar_residual(), 1e-9, tols)];
    let j2 = h.jet2();
    let det = j2.determined(geom)?;
    let mut system: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            system = system.max(h.d2.get(&[geom.z(a), geom.zb(b)]).max_diff(&det.ell_a_bbar[a][b]));
            system = system.max(h.d2.get(&[geom.zb(a), geom.z(b)]).max_abs());
        }
        system = system.max(h.d2.get(&[geom.zb(a), 0]).max_abs());
        system = system.max(h.d2.get(&[0, geom.zb(a)]).max_diff(&det.ell_0_abar[a]));
    }
    out.push(Residual::max("prolongation.system", system, 1e-9, tols));

    let u = normalize_density_jet(comp)?;
    let hat = Geometry::new(rescale(&geom.coframe, &-&u)?)?;
    let rs = j2.scalar_function()?;
    out.push(Residual::max("prolongation.scalar", (hat.scalar.value() - rs.value()).norm(), 1e-6, tols));

    let tf = j2.torsion_function(geom);
    let e = (&u * -2.0).exp();
    let mut torsion: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let ah = &(hat.torsion.get(&[hat.z(a), hat.z(b)]) * &e) * comp;
            torsion = torsion.max((ah.value() - tf[a][b].value()).norm());
        }
    }
    out.push(Residual::max("prolongation.torsion", torsion, 1e-6, tols));

    let rm = reeb_map(&h.tractor());
    let xi_hat = geom.frame.to_frame(&geom.coframe, hat.frame.xi())?;
    let reeb = rm.iter().zip(&xi_hat).fold(0.0f64, |m, (a, b)| m.max((a.value() - b.value()).norm()));
    out.push(Residual::max("prolongation.reeb", reeb, 1e-6, tols));

    let k = 1.0 / (2.0 * n as f64 * (n as f64 + 1.0));
    let mut pe: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let mut v = hat.schouten.get(&[hat.z(a), hat.zb(b)]).value();
            if a == b {
                v -= hat.scalar.value() * k;
            }
            pe = pe.max(v.norm());
        }
    }
    out.push(Residual::max("prolongation.pseudo_einstein", pe, 1e-6, tols));
    Ok(out)
}

pub fn analyze(
    name: &str,
    spec: &ManifoldSpec,
    point: &[f64],
    order: usize,
    tols: &Tolerances,
) -> Result<AnalysisReport, Error> {
    let cf = coframe(spec, point, order)?;
    let geom = Geometry::new(cf.clone())?;
    let curv = curvature_tensors(&geom)?;
    let sph = sphericity(&curv, tols.get("sphericity", SPHERICITY_TOL));
    let norms = sph.norms;
    let scalars = Scalars {
        r: geom.scalar.value().re,
        s: geom.s.value().re,
        torsion_norm: geom.torsion_norm(),
        t_norm: norm2(&geom.t, 1),
        schouten_norm: norm2(&geom.schouten, 2),
        w_norm: norms[0],
        v_norm: norms[1],
        q_norm: norms[2],
        u_norm: norms[3],
        y_norm: norms[4],
    };
    let mut residuals = vec![
        Residual::max("coframe.admissibility", cf.admissibility_residual()?, 1e-9, tols),
        Residual::max("pseudohermitian.structure", geom.structure_residual()?, 1e-9, tols),
        Residual::max("pseudohermitian.torsion_symmetry", geom.torsion_symmetry_residual(), 1e-9, tols),
        Residual::max(
            "pseudohermitian.reality",
            geom.scalar.max_imag().max(geom.s.max_imag()).max(geom.ricci.reality_residual()),
            1e-9,
            tols,
        ),
    ];
    let (metric, det) = compatibility_residuals(&geom)?;
    residuals.push(Residual::max("cartan.metric", metric, 1e-8, tols));
    residuals.push(Residual::max("cartan.determinant", det, 1e-8, tols));
    let (diff, ell) = curvature_residuals(&geom)?;
    residuals.push(Residual::max("cartan.curvature", diff, 1e-7, tols));
    residuals.push(Residual::max("cartan.ell_slot", ell, 1e-12, tols));
    residuals.push(Residual::max("cartan.q_symmetry", curv.q_symmetry_residual(), 1e-9, tols));
    residuals.push(Residual::max("cartan.u_trace", curv.u_trace(), 1e-9, tols));

    let fef = fefferman_parts(&geom)?;
    residuals.extend(fef.residuals(tols));
    if let Some(comp) = density(spec, &cf, point)? {
        residuals.extend(holonomic_residuals(&geom, &comp, tols)?);
    }
    Ok(AnalysisReport {
        spec: name.to_string(),
        point: point.to_vec(),
        order,
        n: spec.n,
        scalars,
        sphericity: SphericityReport {
            verdict: match sph.verdict {
                Verdict::Spherical => "spherical".into(),
                Verdict::NonSpherical => "non-spherical".into(),
            },
            deciding_tensor: if spec.n == 1 { "Q".into() } else { "W".into() },
            deciding_norm: sph.deciding_norm,
            tolerance: tols.get("sphericity", SPHERICITY_TOL),
        },
        fefferman_scalar: fef.scalar_lc,
        residuals,
    })
}

/// Everything the Fefferman report and the analysis need.
pub struct FeffermanParts {
    pub n: usize,
    pub frame: FeffermanFrame,
    pub metric: Bilinear,
    pub ricci_lc: Bilinear,
    pub ricci_formula: Bilinear,
    pub scalar_lc: f64,
    pub scalar_formula: f64,
    pub scalar_expected: f64,
    pub signature: (usize, usize),
    pub trace_free: f64,
    imag: f64,
}

pub fn fefferman_parts(geom: &Geometry) -> Result<FeffermanParts, Error> {
    let frame = FeffermanFrame::new(geom);
    let metric = fefferman_metric(&frame);
    let lc = levi_civita_ricci(&metric)?;
    let formula = ricci_formula(geom, &frame);
    let n = geom.n() as f64;
    let imag = metric
        .iter()
        .chain(&lc.ricci)
        .flatten()
        .map(|j| j.value().im.abs())
        .fold(lc.scalar.value().im.abs(), f64::max);
    Ok(FeffermanParts {
        n: geom.n(),
        signature: signature(&metric)?,
        trace_free: trace_free_norm(&metric, &lc.ricci)?,
        scalar_lc: lc.scalar.value().re,
        scalar_formula: trace(&metric, &formula)?.value().re,
        scalar_expected: geom.scalar.value().re * 2.0 * (2.0 * n + 1.0) / (n + 1.0),
        ricci_lc: lc.ricci,
        ricci_formula: formula,
        metric,
        frame,
        imag,
    })
}

impl FeffermanParts {
    pub fn residuals(&self, tols: &Tolerances) -> Vec<Residual> {
        let lorentz = self.signature == (2 * self.n + 1, 1);
        vec![
            Residual::max("fefferman.ricci", max_value_diff(&self.ricci_lc, &self.ricci_formula), 1e-7, tols),
            Residual::max("fefferman.scalar", (self.scalar_formula - self.scalar_expected).abs(), 1e-8, tols),
            Residual::max("fefferman.scalar_lc", (self.scalar_lc - self.scalar_expected).abs(), 1e-7, tols),
            Residual::max("fefferman.reality", self.imag, 1e-9, tols),
            Residual::min("fefferman.trace_free", self.trace_free, 1e-3, tols),
            Residual::max("fefferman.signature", if lorentz { 0.0 } else { 1.0 }, 0.0, tols),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeffermanReport {
    pub spec: String,
    pub point: Vec<f64>,
    pub order: usize,
    /// Chart coordinates followed by the circle coordinate `v`.
    pub coordinates: Vec<String>,
    pub signature: [usize; 2],
    pub metric: Vec<Vec<f64>>,
    pub ricci_levi_civita: Vec<Vec<f64>>,
    pub ricci_formula: Vec<Vec<f64>>,
    /// Components on the frame dual to `(ϖ, θ, θ^α, θ^ᾱ)`, as `[re, im]`.
    pub ricci_frame_levi_civita: Vec<Vec<[f64; 2]>>,
    pub ricci_frame_formula: Vec<Vec<[f64; 2]>>,
    pub scalar_levi_civita: f64,
    pub scalar_formula: f64,
    pub scalar_expected: f64,
    pub residuals: Vec<Residual>,
}

impl FeffermanReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|r| r.pass)
    }
}

fn real(b: &Bilinear) -> Vec<Vec<f64>> {
    b.iter().map(|r| r.iter().map(|j| j.value().re).collect()).collect()
}

fn complex(b: &Bilinear) -> Vec<Vec<[f64; 2]>> {
    let c = |z: C64| [z.re, z.im];
    b.iter().map(|r| r.iter().map(|j| c(j.value())).collect()).collect()
}

pub fn fefferman(
    name: &str,
    spec: &ManifoldSpec,
    point: &[f64],
    order: usize,
    tols: &Tolerances,
) -> Result<FeffermanReport, Error> {
    let geom = Geometry::new(coframe(spec, point, order)?)?;
    let p = fefferman_parts(&geom)?;
    let mut coordinates = spec.coords.clone();
    coordinates.push("v".into());
    Ok(FeffermanReport {
        spec: name.to_string(),
        point: point.to_vec(),
        order,
        coordinates,
        signature: [p.signature.0, p.signature.1],
        metric: real(&p.metric),
        ricci_levi_civita: real(&p.ricci_lc),
        ricci_formula: real(&p.ricci_formula),
        ricci_frame_levi_civita: complex(&p.frame.frame_components(&p.ricci_lc)?),
        ricci_frame_formula: complex(&p.frame.frame_components(&p.ricci_formula)?),
        scalar_levi_civita: p.scalar_lc,
        scalar_formula: p.scalar_formula,
        scalar_expected: p.scalar_expected,
        residuals: p.residuals(tols),
    })
}
