mod common;
use common::*;
use crcartan_core::coframe::Coframe;
use crcartan_core::gauge::{normalize_density_jet, rescale};
use crcartan_core::jet::{Jet, C64, I};
use crcartan_core::pseudohermitian::Geometry;
use crcartan_core::tractor::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const P3: [f64; 3] = [0.1, 0.2, -0.15];
const P5: [f64; 5] = [0.1, 0.2, -0.15, 0.05, 0.1];

fn z(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `exp(0.3 w + 0.2 z)` with `w = t + i|z|²`, a CR function on the
/// (orientation-corrected) Heisenberg chart.
fn cr_density(cf: &Coframe, pt: &[f64]) -> Jet {
    let s = cf.space();
    let t = s.variable(0, pt[0]);
    let x = s.variable(1, pt[1]);
    let y = s.variable(2, pt[2]);
    let w = &t + &(&(&(&x * &x) + &(&y * &y)) * I);
    (&(&w * 0.3) + &(&(&x + &(&y * I)) * 0.2)).exp()
}

fn cr_density2(cf: &Coframe, pt: &[f64]) -> Jet {
    let s = cf.space();
    let v: Vec<Jet> = (0..5).map(|i| s.variable(i, pt[i])).collect();
    let z1 = &v[1] + &(&v[2] * I);
    let z2 = &v[3] + &(&v[4] * I);
    let r = &(&(&v[1] * &v[1]) + &(&v[2] * &v[2])) + &(&(&v[3] * &v[3]) + &(&v[4] * &v[4]));
    let w = &v[0] + &(&r * I);
    (&(&(&w * 0.3) + &(&z1 * 0.2)) + &(&(&z1 * &z2) * z(0.1, 0.4))).exp()
}

#[test]
fn metric_examples() {
    let s = crcartan_core::JetSpace::new(3, 2);
    let t = |l: f64, tau: f64, p: f64| Tractor::constant(&s, z(l, 0.0), &[z(tau, 0.0)], z(p, 0.0));
    assert_eq!(metric(&t(0.0, 1.0, 0.0), &t(0.0, 1.0, 0.0)).unwrap().value(), z(1.0, 0.0));
    assert_eq!(metric(&t(1.0, 0.0, 1.0), &t(1.0, 0.0, 1.0)).unwrap().value(), z(2.0, 0.0));
    assert_eq!(metric(&t(1.0, 0.0, -1.0), &t(1.0, 0.0, -1.0)).unwrap().value(), z(-2.0, 0.0));

    // Hermitian and antilinear in the first slot
    let a = Tractor::constant(&s, z(0.3, 0.1), &[z(-0.2, 0.5)], z(0.7, -0.4));
    let b = Tractor::constant(&s, z(-0.1, 0.9), &[z(0.4, 0.2)], z(0.2, 0.3));
    let hab = metric(&a, &b).unwrap().value();
    assert!((hab - metric(&b, &a).unwrap().value().conj()).norm() < 1e-15);
    let ia = a.scale(I);
    assert!((metric(&ia, &b).unwrap().value() - hab * -I).norm() < 1e-15);
    assert!((metric(&b, &ia).unwrap().value() - metric(&b, &a).unwrap().value() * I).norm() < 1e-15);

    for n in [1, 2, 3] {
        let s = crcartan_core::JetSpace::new(2 * n + 1, 1);
        assert_eq!(gram_signature(&Tractor::standard_frame(&s, n)).unwrap(), (n + 1, 1));
    }
}

#[test]
fn mismatched_gauges_are_rejected() {
    let cf = heisenberg(1, &P3, 6).orthonormalize().unwrap();
    let g = Geometry::new(cf.clone()).unwrap();
    let s = cf.space();
    let a = Tractor::constant(s, z(1.0, 0.0), &[z(0.0, 0.0)], z(0.0, 0.0));
    let b = gauge_transform(&a, &(s.variable(1, 0.0) * 0.1), &g).unwrap();
    assert!(matches!(metric(&a, &b), Err(crcartan_core::Error::GaugeMismatch)));
    let c = Tractor::constant(s, z(1.0, 0.0), &[z(0.0, 0.0); 2], z(0.0, 0.0));
    assert!(metric(&a, &c).is_err());
}

#[test]
fn determinant_examples() {
    let s = crcartan_core::JetSpace::new(5, 1);
    let mut fr = Tractor::standard_frame(&s, 2);
    assert!((determinant(&fr).unwrap().value() - z(1.0, 0.0)).norm() < 1e-15);
    fr[3] = fr[1].clone();
    assert!(determinant(&fr).unwrap().value().norm() < 1e-15);
    assert!(determinant(&fr[..3]).is_err());
}

#[test]
fn reeb_map_examples() {
    let s = crcartan_core::JetSpace::new(3, 1);
    let r = reeb_map(&Tractor::constant(&s, z(1.0, 0.0), &[z(0.0, 0.0)], z(0.4, 0.2)));
    assert_eq!(r.iter().map(Jet::value).collect::<Vec<_>>(), vec![z(1.0, 0.0), z(0.0, 0.0), z(0.0, 0.0)]);
    let r = reeb_map(&Tractor::constant(&s, z(0.0, 0.0), &[z(0.3, 1.0)], z(0.4, 0.2)));
    assert!(r.iter().all(|j| j.max_abs() == 0.0));

    let cf = heis_pert(0.1, &P3, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let sig = random_field(&cf, &mut rng);
        let r = reeb_map(&sig);
        // real vector: ξ-coefficient real, Z̄-coefficient the conjugate of the Z one
        assert!(r[0].max_imag() <= 1e-10);
        assert!(r[1].conj().max_diff(&r[2]) <= 1e-10);
    }
}

#[test]
fn gauge_transform_examples() {
    let cf = heis_pert(0.1, &P3, 7).orthonormalize().unwrap();
    let g = Geometry::new(cf.clone()).unwrap();
    let s = cf.space();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let sig = random_field(&cf, &mut rng);

    let same = gauge_transform(&sig, &s.zero(), &g).unwrap();
    assert!(same.max_diff(&sig) < 1e-15);

    // constant f: the same section, written against e^{−c}ℓ_ref
    let c = 0.37;
    let tr = gauge_transform(&sig, &s.real(c), &g).unwrap();
    assert!(tr.ell.max_diff(&(&sig.ell * c.exp())) < 1e-13);
    assert!(tr.tau[0].max_diff(&sig.tau[0]) < 1e-13);
    assert!(tr.psi.max_diff(&(&sig.psi * (-c).exp())) < 1e-13);
    assert!(metric(&tr, &tr).unwrap().max_diff(&metric(&sig, &sig).unwrap()) < 1e-12);
}

#[test]
fn gauge_round_trip_and_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let bases = [
        heisenberg(1, &P3, 8).orthonormalize().unwrap(),
        heis_pert(0.1, &P3, 8).orthonormalize().unwrap(),
        sphere([0.3, 1.0, 0.2], 8).orthonormalize().unwrap(),
        heis_pert2(0.3, &P5, 8).orthonormalize().unwrap(),
    ];
    for cf in bases {
        let g = Geometry::new(cf.clone()).unwrap();
        let n = g.n();
        for _ in 0..3 {
            let f = random_poly(&cf, &mut rng, 0.2);
            let gh = Geometry::new(rescale(&cf, &f).unwrap()).unwrap();
            let frame: Vec<Tractor> = (0..n + 2).map(|_| random_field(&cf, &mut rng)).collect();
            let moved: Vec<Tractor> = frame.iter().map(|s| gauge_transform(s, &f, &g).unwrap()).collect();
            let back = gauge_transform(&moved[0], &-&f, &gh).unwrap();
            assert!(back.value_diff(&frame[0]) <= 1e-9);
            for a in 0..2 {
                let h0 = metric(&frame[a], &frame[a + 1]).unwrap().value();
                let h1 = metric(&moved[a], &moved[a + 1]).unwrap().value();
                assert!((h0 - h1).norm() <= 1e-9);
            }
            let d0 = determinant(&frame).unwrap().value();
            let d1 = determinant(&moved).unwrap().value();
            assert!((d0 - d1).norm() <= 1e-9);
        }
    }
}

/// The tractor law reproduces j¹ of a density computed from scratch in the
/// rescaled gauge.
#[test]
fn gauge_transform_matches_holonomic_jets() {
    let base = heisenberg(1, &P3, 10).orthonormalize().unwrap();
    let sp = base.space();
    let g0 = &(sp.variable(1, 0.0) * 0.3) + &(&(&sp.variable(0, 0.0) * &sp.variable(2, 0.0)) * 0.4);
    let cf = rescale(&base, &g0).unwrap();
    let g = Geometry::new(cf.clone()).unwrap();
    let comp = &cr_density(&cf, &P3) * &g0.exp();
    let f = &(&sp.variable(2, 0.0) * 0.2) + &(&(&sp.variable(1, 0.0) * &sp.variable(0, 0.0)) * -0.3);
    let gh = Geometry::new(rescale(&cf, &f).unwrap()).unwrap();
    let j = DensityCalculus::new(&g).unwrap().holonomic(&comp).unwrap().tractor();
    let jh = DensityCalculus::new(&gh).unwrap().holonomic(&(&comp * &f.exp())).unwrap().tractor();
    let tr = gauge_transform(&j, &f, &g).unwrap();
    assert!(tr.value_diff(&jh) <= 1e-10, "{:e}", tr.value_diff(&jh));
}

#[test]
fn prolongation_examples() {
    let g = Geometry::new(heisenberg(1, &P3, 7).orthonormalize().unwrap()).unwrap();
    let s = g.coframe.space();
    let e0 = Tractor::constant(s, z(1.0, 0.0), &[z(0.0, 0.0)], z(0.0, 0.0));
    let r = prolongation(&e0, &g);
    assert!(r.ell_ab[0][0].max_abs() == 0.0 && r.psi_a[0].max_abs() == 0.0 && r.psi_0.max_abs() == 0.0);

    let g = Geometry::new(sphere([0.3, 1.0, 0.2], 7).orthonormalize().unwrap()).unwrap();
    let s = g.coframe.space();
    let e0 = Tractor::constant(s, z(1.0, 0.0), &[z(0.0, 0.0)], z(0.0, 0.0));
    let r = prolongation(&e0, &g);
    assert!(r.psi_a[0].value().norm() < 1e-12);
    assert!((r.psi_0.value() - I).norm() < 1e-12);

    let cf = heis_pert(0.1, &P3, 7).orthonormalize().unwrap();
    let g = Geometry::new(cf.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (a, b) = (random_field(&cf, &mut rng), random_field(&cf, &mut rng));
    let (ca, cb) = (z(0.3, -1.2), z(-0.7, 0.4));
    let lhs = prolongation(&a.scale(ca).add(&b.scale(cb)).unwrap(), &g);
    let ra = prolongation(&a, &g);
    let rb = prolongation(&b, &g);
    let mut d = lhs.psi_0.max_diff(&(&ra.psi_0 * ca + &rb.psi_0 * cb));
    d = d.max(lhs.psi_a[0].max_diff(&(&ra.psi_a[0] * ca + &rb.psi_a[0] * cb)));
    d = d.max(lhs.ell_ab[0][0].max_diff(&(&ra.ell_ab[0][0] * ca + &rb.ell_ab[0][0] * cb)));
    assert!(d < 1e-13);
}

/// Second-order components fixed by CR-holomorphicity, and the jet functions
/// of a holonomic 2-jet, against the geometry of the volume-normalized form.
fn check_holonomic(cf: &Coframe, comp: &Jet) {
    let g = Geometry::new(cf.clone()).unwrap();
    let n = g.n();
    let h = DensityCalculus::new(&g).unwrap().holonomic(comp).unwrap();
    assert!(h.dbar_residual() <= 1e-9, "not CR: {:e}", h.dbar_residual());
    let j2 = h.jet2();
    let det = j2.determined(&g).unwrap();
    for a in 0..n {
        for b in 0..n {
            assert!(h.d2.get(&[g.z(a), g.zb(b)]).max_diff(&det.ell_a_bbar[a][b]) <= 1e-9);
            assert!(h.d2.get(&[g.zb(a), g.z(b)]).max_abs() <= 1e-9);
        }
        assert!(h.d2.get(&[g.zb(a), 0]).max_abs() <= 1e-9);
        assert!(h.d2.get(&[0, g.zb(a)]).max_diff(&det.ell_0_abar[a]) <= 1e-9);
    }

    let u = normalize_density_jet(comp).unwrap();
    let hat = Geometry::new(rescale(cf, &-&u).unwrap()).unwrap();
    let rs = j2.scalar_function().unwrap();
    assert!((hat.scalar.value() - rs.value()).norm() <= 1e-6);

    // Â in the frame of the normalized form, times the component, brought back by e^{−2u}
    let tf = j2.torsion_function(&g);
    let e = (&u * -2.0).exp();
    for a in 0..n {
        for b in 0..n {
            let ah = &(hat.torsion.get(&[hat.z(a), hat.z(b)]) * &e) * comp;
            assert!((ah.value() - tf[a][b].value()).norm() <= 1e-6);
        }
    }

    let rm = reeb_map(&h.tractor());
    let xi_hat = g.frame.to_frame(&g.coframe, hat.frame.xi()).unwrap();
    for (a, b) in rm.iter().zip(&xi_hat) {
        assert!((a.value() - b.value()).norm() <= 1e-6);
    }

    let k = 1.0 / (2.0 * n as f64 * (n as f64 + 1.0));
    for a in 0..n {
        for b in 0..n {
            let mut v = hat.schouten.get(&[hat.z(a), hat.zb(b)]).value();
            if a == b {
                v -= hat.scalar.value() * k;
            }
            assert!(v.norm() <= 1e-6);
        }
    }
}

#[test]
fn holonomic_jets_on_heisenberg() {
    let cf = heisenberg(1, &P3, 9).orthonormalize().unwrap();
    check_holonomic(&cf, &cr_density(&cf, &P3));
    let cf = heisenberg(2, &P5, 9).orthonormalize().unwrap();
    check_holonomic(&cf, &cr_density2(&cf, &P5));
}

#[test]
fn holonomic_jets_with_torsion() {
    let base = heisenberg(1, &P3, 10).orthonormalize().unwrap();
    let sp = base.space();
    let g0 = &(sp.variable(1, 0.0) * 0.3) + &(&(&sp.variable(0, 0.0) * &sp.variable(2, 0.0)) * 0.4);
    let cf = rescale(&base, &g0).unwrap();
    assert!(Geometry::new(cf.clone()).unwrap().torsion_norm() > 1e-2);
    // same section as before, component e^{g0}F against the new reference density
    let comp = &cr_density(&cf, &P3) * &g0.exp();
    check_holonomic(&cf, &comp);
}

#[test]
fn wrong_orientation_is_not_cr() {
    let cf = heisenberg(1, &P3, 7).orthonormalize().unwrap();
    let g = Geometry::new(cf.clone()).unwrap();
    let s = cf.space();
    let t = s.variable(0, P3[0]);
    let x = s.variable(1, P3[1]);
    let y = s.variable(2, P3[2]);
    let w = &t - &(&(&(&x * &x) + &(&y * &y)) * I);
    let h = DensityCalculus::new(&g).unwrap().holonomic(&(&w * 0.3).exp()).unwrap();
    assert!(h.dbar_residual() > 1e-3);
}
