use crcartan_core::jet::{Analytic, Jet, JetSpace, C64, I};
use proptest::prelude::*;
use std::sync::OnceLock;

const M: usize = 3;
const K: usize = 4;

fn space() -> JetSpace {
    static SPACE: OnceLock<JetSpace> = OnceLock::new();
    SPACE.get_or_init(|| JetSpace::new(M, K)).clone()
}

fn jet_strategy() -> impl Strategy<Value = Jet> {
    let n = space().coeff_count(K);
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(|v| {
        let s = space();
        Jet::from_coeffs(&s, K, v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
    })
}

fn rel(a: &Jet, b: &Jet) -> f64 {
    a.max_diff(b) / a.max_abs().max(b.max_abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in jet_strategy(), b in jet_strategy(), c in jet_strategy()) {
        prop_assert!(rel(&(&a + &b), &(&b + &a)) == 0.0);
        prop_assert!(rel(&(&a * &b), &(&b * &a)) <= 1e-14);
        prop_assert!(rel(&(&(&a * &b) * &c), &(&a * &(&b * &c))) <= 1e-12);
        prop_assert!(rel(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))) <= 1e-12);
        let one = space().real(1.0);
        prop_assert!(rel(&(&a * &one), &a) == 0.0);
        prop_assert!((&a - &a).max_abs() == 0.0);
    }

    #[test]
    fn leibniz(a in jet_strategy(), b in jet_strategy(), v in 0..M) {
        let lhs = (&a * &b).partial(v).unwrap();
        let rhs = &(&a.partial(v).unwrap() * &b) + &(&a * &b.partial(v).unwrap());
        prop_assert!(rel(&lhs, &rhs) <= 1e-12);
    }

    #[test]
    fn partials_commute(a in jet_strategy(), u in 0..M, v in 0..M) {
        let uv = a.partial(u).unwrap().partial(v).unwrap();
        let vu = a.partial(v).unwrap().partial(u).unwrap();
        prop_assert!(uv.max_diff(&vu) == 0.0);
    }

    #[test]
    fn exp_round_trips(a in jet_strategy()) {
        let e = a.exp();
        let one = &e.recip().unwrap() * &e;
        prop_assert!(one.max_diff(&space().real(1.0)) <= 1e-12 * e.max_abs().max(1.0));
        // keep the base value near 0 so log stays on its principal branch
        let small = a.add_const(-a.value() + C64::new(0.3, 0.2));
        prop_assert!(small.exp().ln().unwrap().max_diff(&small) <= 1e-10);
    }

    #[test]
    fn powers_agree(a in jet_strategy()) {
        let b = a.add_const(C64::new(2.0, 0.0));
        prop_assert!(rel(&b.powi(3).unwrap(), &(&(&b * &b) * &b)) <= 1e-12);
        prop_assert!(rel(&b.powi(-2).unwrap(), &(&b * &b).recip().unwrap()) <= 1e-12);
        let r = b.sqrt().unwrap();
        prop_assert!(rel(&(&r * &r), &b) <= 1e-12);
        prop_assert!(rel(&b.apply(Analytic::Pow(C64::new(0.5, 0.0))).unwrap(), &r) <= 1e-12);
    }

    #[test]
    fn trig_identity(a in jet_strategy()) {
        let (s, c) = (a.sin(), a.cos());
        let one = &(&s * &s) + &(&c * &c);
        prop_assert!(rel(&one, &space().real(1.0)) <= 1e-12);
    }
}

/// Arithmetic shared by jets and plain complex numbers, so each test function
/// is written once and evaluated both ways.
trait Num: Clone {
    fn var(&self, i: usize) -> Self;
    fn cst(&self, v: f64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn f(&self, g: Analytic) -> Self;
}

#[derive(Clone)]
struct Jp([f64; M], Jet);

impl Num for Jp {
    fn var(&self, i: usize) -> Self {
        Jp(self.0, self.1.space().variable(i, self.0[i]))
    }
    fn cst(&self, v: f64) -> Self {
        Jp(self.0, self.1.space().real(v))
    }
    fn add(&self, o: &Self) -> Self {
        Jp(self.0, &self.1 + &o.1)
    }
    fn mul(&self, o: &Self) -> Self {
        Jp(self.0, &self.1 * &o.1)
    }
    fn f(&self, g: Analytic) -> Self {
        Jp(self.0, self.1.apply(g).unwrap())
    }
}

#[derive(Clone)]
struct Pt([f64; M], C64);

impl Num for Pt {
    fn var(&self, i: usize) -> Self {
        Pt(self.0, C64::new(self.0[i], 0.0))
    }
    fn cst(&self, v: f64) -> Self {
        Pt(self.0, C64::new(v, 0.0))
    }
    fn add(&self, o: &Self) -> Self {
        Pt(self.0, self.1 + o.1)
    }
    fn mul(&self, o: &Self) -> Self {
        Pt(self.0, self.1 * o.1)
    }
    fn f(&self, g: Analytic) -> Self {
        let z = self.1;
        let v = match g {
            Analytic::Exp => z.exp(),
            Analytic::Log => z.ln(),
            Analytic::Sin => z.sin(),
            Analytic::Cos => z.cos(),
            Analytic::Pow(p) => z.powc(p),
            Analytic::Sqrt => z.sqrt(),
            Analytic::Recip => z.inv(),
        };
        Pt(self.0, v)
    }
}

type TestFn<T> = fn(&T) -> T;

fn library<T: Num>() -> Vec<TestFn<T>> {
    use Analytic::*;
    vec![
        |t| t.var(0).mul(&t.var(1)).f(Exp),
        |t| t.var(0).f(Sin).mul(&t.var(1).f(Cos)),
        |t| t.var(0).mul(&t.var(0)).add(&t.var(1).mul(&t.var(1))).add(&t.cst(1.0)).f(Log),
        |t| t.var(0).add(&t.var(2)).add(&t.cst(2.0)).f(Recip),
        |t| t.var(1).mul(&t.var(1)).add(&t.cst(1.5)).f(Sqrt),
        |t| t.var(0).add(&t.cst(1.2)).f(Pow(C64::new(2.5, 0.0))),
        |t| t.var(2).f(Exp).mul(&t.var(0).f(Sin)),
        |t| t.var(0).mul(&t.var(1)).mul(&t.var(2)),
        |t| t.var(0).mul(&t.var(2)).f(Cos).f(Exp),
        |t| t.var(1).f(Sin).f(Sin),
        |t| t.var(0).f(Exp).add(&t.var(1).f(Exp)).f(Log),
        |t| t.var(2).mul(&t.var(2)).add(&t.cst(0.5)).f(Recip).mul(&t.var(0)),
        |t| t.var(0).mul(&t.cst(3.0)).f(Cos).mul(&t.var(1).mul(&t.var(1))),
        |t| t.var(1).add(&t.cst(2.0)).f(Pow(C64::new(-1.5, 0.0))),
        |t| t.var(0).mul(&t.var(1)).add(&t.cst(4.0)).f(Sqrt).f(Log),
        |t| t.var(2).f(Sin).mul(&t.var(2).f(Cos)).mul(&t.var(0).f(Exp)),
        |t| t.var(0).mul(&t.var(0)).mul(&t.var(0)).add(&t.var(1).mul(&t.cst(-2.0))),
        |t| t.var(1).mul(&t.var(2)).f(Exp).f(Recip),
        |t| t.var(0).add(&t.var(1)).add(&t.var(2)).f(Sin).f(Exp),
        |t| t.var(0).mul(&t.cst(0.7)).f(Cos).add(&t.cst(2.0)).f(Pow(C64::new(1.0, 0.5))),
    ]
}

/// `k`-th central difference of `f` along `v` with step `h`.
fn central(f: &dyn Fn([f64; M]) -> C64, x: [f64; M], v: usize, k: u8, h: f64) -> C64 {
    let shift = |x: [f64; M], s: f64| {
        let mut y = x;
        y[v] += s;
        y
    };
    match k {
        0 => f(x),
        1 => (f(shift(x, h)) - f(shift(x, -h))) / (2.0 * h),
        2 => (f(shift(x, h)) - f(x) * 2.0 + f(shift(x, -h))) / (h * h),
        3 => (f(shift(x, 2.0 * h)) - f(shift(x, h)) * 2.0 + f(shift(x, -h)) * 2.0 - f(shift(x, -2.0 * h))) / (2.0 * h * h * h),
        _ => unreachable!(),
    }
}

fn mixed(f: &dyn Fn([f64; M]) -> C64, x: [f64; M], multi: &[u8], h: f64) -> C64 {
    match multi.iter().position(|&e| e > 0) {
        None => f(x),
        Some(v) => {
            let mut rest = multi.to_vec();
            let k = rest[v];
            rest[v] = 0;
            let inner = |y: [f64; M]| mixed(f, y, &rest, h);
            central(&inner, x, v, k, h)
        }
    }
}

/// Two Richardson steps on the `O(h²)` stencil.
fn fd_derivative(f: &dyn Fn([f64; M]) -> C64, x: [f64; M], multi: &[u8]) -> C64 {
    let d = |h: f64| mixed(f, x, multi, h);
    let (a, b, c) = (d(0.04), d(0.02), d(0.01));
    let r1 = (b * 4.0 - a) / 3.0;
    let r2 = (c * 4.0 - b) / 3.0;
    (r2 * 16.0 - r1) / 15.0
}

#[test]
fn finite_difference_oracle() {
    let s = JetSpace::new(M, 3);
    let points = [[0.3, 0.7, -0.2], [-0.4, 0.1, 0.5]];
    let jets = library::<Jp>();
    let plain = library::<Pt>();
    let mut worst: f64 = 0.0;
    for x in points {
        let seed = Jp(x, s.zero());
        for (fj, fp) in jets.iter().zip(&plain) {
            let jet = fj(&seed).1;
            let scalar = |y: [f64; M]| fp(&Pt(y, C64::new(0.0, 0.0))).1;
            for k in 0..s.coeff_count(3) {
                let e = s.exponents(k).to_vec();
                let exact = jet.derivative(&e);
                let fd = fd_derivative(&scalar, x, &e);
                worst = worst.max((exact - fd).norm() / exact.norm().max(1.0));
            }
        }
    }
    assert!(worst <= 1e-6, "{worst:e}");
}

#[test]
fn exp_of_product_matches_differences() {
    let s = JetSpace::new(2, 3);
    let x = s.variable(0, 0.3);
    let y = s.variable(1, 0.7);
    let j = (&x * &y).exp();
    let f = |p: [f64; M]| C64::new(p[0] * p[1], 0.0).exp();
    for k in 0..s.coeff_count(3) {
        let e = s.exponents(k);
        let multi = [e[0], e[1], 0];
        let fd = fd_derivative(&f, [0.3, 0.7, 0.0], &multi);
        let exact = j.derivative(e);
        assert!((exact - fd).norm() <= 1e-6 * exact.norm().max(1.0));
    }
}

#[test]
fn complex_arithmetic() {
    let s = JetSpace::new(2, 3);
    let z = &s.variable(0, 0.2) + &(&s.variable(1, -0.1) * I);
    // holomorphic in z: ∂_y = i ∂_x
    let f = (&z * &z).exp();
    let dx = f.partial(0).unwrap();
    let dy = f.partial(1).unwrap();
    assert!((&dx * I).max_diff(&dy) <= 1e-14);
    assert!(f.conj().conj().max_diff(&f) == 0.0);
}
