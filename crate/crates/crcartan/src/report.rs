//! Human-readable tables for the reports.

use std::fmt::Write;

use crate::analysis::{AnalysisReport, FeffermanReport};
use crate::tol::{Bound, Residual};

fn residual_table(out: &mut String, rs: &[Residual]) {
    let _ = writeln!(out, "\nchecks");
    for r in rs {
        let op = match r.bound {
            Bound::Max => "<=",
            Bound::Min => ">=",
        };
        let _ = writeln!(
            out,
            "  {} {:<34} {:>10.3e} {op} {:.0e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.value,
            r.tolerance
        );
    }
}

fn point(p: &[f64]) -> String {
    p.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", ")
}

pub fn analysis_table(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "spec   {}", r.spec);
    let _ = writeln!(out, "point  ({})", point(&r.point));
    let _ = writeln!(out, "order  {}   n = {}", r.order, r.n);
    let s = &r.scalars;
    let _ = writeln!(out, "\nscalars");
    for (k, v) in [
        ("R", s.r),
        ("S", s.s),
        ("|A|", s.torsion_norm),
        ("|T|", s.t_norm),
        ("|P|", s.schouten_norm),
        ("|W|", s.w_norm),
        ("|V|", s.v_norm),
        ("|Q|", s.q_norm),
        ("|U|", s.u_norm),
        ("|Y|", s.y_norm),
        ("Scal_F", r.fefferman_scalar),
    ] {
        let _ = writeln!(out, "  {k:<7}{:>16.10}", v + 0.0);
    }
    let sp = &r.sphericity;
    let _ = writeln!(
        out,
        "\nverdict  {} (|{}| = {:.3e}, tolerance {:.0e})",
        sp.verdict, sp.deciding_tensor, sp.deciding_norm, sp.tolerance
    );
    residual_table(&mut out, &r.residuals);
    out
}

fn matrix(out: &mut String, title: &str, labels: &[String], m: &[Vec<f64>]) {
    let _ = writeln!(out, "\n{title}");
    let _ = write!(out, "  {:>4}", "");
    for l in labels {
        let _ = write!(out, "{l:>14}");
    }
    let _ = writeln!(out);
    for (l, row) in labels.iter().zip(m) {
        let _ = write!(out, "  {l:>4}");
        for v in row {
            let _ = write!(out, "{v:>14.8}");
        }
        let _ = writeln!(out);
    }
}

pub fn fefferman_table(r: &FeffermanReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "spec       {}", r.spec);
    let _ = writeln!(out, "point      ({})", point(&r.point));
    let _ = writeln!(out, "order      {}", r.order);
    let _ = writeln!(out, "signature  ({}, {})", r.signature[0], r.signature[1]);
    matrix(&mut out, "metric", &r.coordinates, &r.metric);
    matrix(&mut out, "Ricci (Levi-Civita)", &r.coordinates, &r.ricci_levi_civita);
    matrix(&mut out, "Ricci (formula)", &r.coordinates, &r.ricci_formula);
    let _ = writeln!(out, "\nscalar curvature");
    let _ = writeln!(out, "  Levi-Civita  {:>16.10}", r.scalar_levi_civita);
    let _ = writeln!(out, "  formula      {:>16.10}", r.scalar_formula);
    let _ = writeln!(out, "  2(2n+1)R/(n+1) {:>14.10}", r.scalar_expected);
    residual_table(&mut out, &r.residuals);
    out
}
