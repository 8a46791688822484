use crcartan_core::jet::{Analytic, Jet, JetSpace, C64, I};

use super::{Expr, Func, ManifoldSpec};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("point has {got} coordinates, spec needs {want}")]
    PointLength { want: usize, got: usize },
    #[error("{func} is undefined at the base value {value} in `{expr}`")]
    Domain { func: &'static str, value: C64, expr: String },
    #[error("division by zero in `{expr}`")]
    DivByZero { expr: String },
    #[error("non-finite value in `{expr}`")]
    NonFinite { expr: String },
}

/// A scalar or the coordinate coefficients of a 1-form.
#[derive(Clone, Debug)]
pub enum Value {
    Scalar(Jet),
    Form(Vec<Jet>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum PointValue {
    Scalar(C64),
    Form(Vec<C64>),
}

/// Arithmetic the evaluator needs; implemented for jets and plain complex numbers.
trait Num: Clone + Sized {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale(&self, c: C64) -> Self;
    fn conj(&self) -> Self;
    fn base(&self) -> C64;
    fn func(&self, f: Func) -> Option<Self>;
    fn recip(&self) -> Option<Self>;
    fn powu(&self, k: u32) -> Self;
}

fn analytic(f: Func) -> Analytic {
    match f {
        Func::Exp => Analytic::Exp,
        Func::Log => Analytic::Log,
        Func::Sin => Analytic::Sin,
        Func::Cos => Analytic::Cos,
        Func::Sqrt => Analytic::Sqrt,
    }
}

impl Num for Jet {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: C64) -> Self {
        self * c
    }
    fn conj(&self) -> Self {
        Jet::conj(self)
    }
    fn base(&self) -> C64 {
        self.value()
    }
    fn func(&self, f: Func) -> Option<Self> {
        self.apply(analytic(f)).ok()
    }
    fn recip(&self) -> Option<Self> {
        Jet::recip(self).ok()
    }
    fn powu(&self, k: u32) -> Self {
        self.powi(k as i32).expect("non-negative powers are entire")
    }
}

/// Same branch rules as the jet functions: log and sqrt are cut along the
/// closed negative real axis.
impl Num for C64 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, c: C64) -> Self {
        self * c
    }
    fn conj(&self) -> Self {
        C64::conj(self)
    }
    fn base(&self) -> C64 {
        *self
    }
    fn func(&self, f: Func) -> Option<Self> {
        let cut = self.norm() < 1e-300 || (self.im == 0.0 && self.re < 0.0);
        match f {
            Func::Exp => Some(self.exp()),
            Func::Sin => Some(self.sin()),
            Func::Cos => Some(self.cos()),
            Func::Log if !cut => Some(self.ln()),
            Func::Sqrt if !cut => Some(self.sqrt()),
            _ => None,
        }
    }
    fn recip(&self) -> Option<Self> {
        (self.norm() >= 1e-300).then(|| self.inv())
    }
    fn powu(&self, k: u32) -> Self {
        self.powu(k)
    }
}

enum V<S> {
    S(S),
    F(Vec<S>),
}

struct Env<'a, S> {
    spec: &'a ManifoldSpec,
    coords: Vec<S>,
    constant: &'a dyn Fn(C64) -> S,
}

impl<S: Num> Env<'_, S> {
    fn basis(&self, idx: usize, c: C64) -> Vec<S> {
        (0..self.coords.len()).map(|j| (self.constant)(if j == idx { c } else { C64::new(0.0, 0.0) })).collect()
    }

    fn differential(&self, name: &str, sign: f64) -> Vec<S> {
        if let Some(i) = self.spec.coord_index(name) {
            return self.basis(i, C64::new(1.0, 0.0));
        }
        let cc = self.spec.complex_coord(name).expect("validated name");
        let re = self.spec.coord_index(&cc.re).expect("validated pair");
        let im = self.spec.coord_index(&cc.im).expect("validated pair");
        let mut v = self.basis(re, C64::new(1.0, 0.0));
        v[im] = (self.constant)(I * sign);
        v
    }

    fn eval(&self, e: &Expr) -> Result<V<S>, EvalError> {
        let zero = C64::new(0.0, 0.0);
        Ok(match e {
            Expr::Num(x) => V::S((self.constant)(C64::new(*x, 0.0))),
            Expr::I => V::S((self.constant)(I)),
            Expr::Var(name) => {
                if let Some(i) = self.spec.coord_index(name) {
                    V::S(self.coords[i].clone())
                } else if let Some(cc) = self.spec.complex_coord(name) {
                    let re = &self.coords[self.spec.coord_index(&cc.re).expect("validated pair")];
                    let im = &self.coords[self.spec.coord_index(&cc.im).expect("validated pair")];
                    V::S(re.add(&im.scale(I)))
                } else {
                    let p = self.spec.param(name).expect("validated identifier");
                    V::S((self.constant)(C64::new(p, 0.0)))
                }
            }
            Expr::D(name) => V::F(self.differential(name, 1.0)),
            Expr::DConj(name) => V::F(self.differential(name, -1.0)),
            Expr::Neg(a) => match self.eval(a)? {
                V::S(s) => V::S(s.scale(C64::new(-1.0, 0.0))),
                V::F(f) => V::F(f.iter().map(|s| s.scale(C64::new(-1.0, 0.0))).collect()),
            },
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let sub = matches!(e, Expr::Sub(..));
                let op = |x: &S, y: &S| if sub { x.sub(y) } else { x.add(y) };
                match (self.eval(a)?, self.eval(b)?) {
                    (V::S(x), V::S(y)) => V::S(op(&x, &y)),
                    (V::F(x), V::F(y)) => V::F(x.iter().zip(&y).map(|(p, q)| op(p, q)).collect()),
                    _ => unreachable!("kinds are checked by the parser"),
                }
            }
            Expr::Mul(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (V::S(x), V::S(y)) => V::S(x.mul(&y)),
                (V::S(x), V::F(f)) | (V::F(f), V::S(x)) => V::F(f.iter().map(|c| x.mul(c)).collect()),
                _ => unreachable!("kinds are checked by the parser"),
            },
            Expr::Div(a, b) => {
                let V::S(den) = self.eval(b)? else { unreachable!("kinds are checked by the parser") };
                if den.base() == zero {
                    return Err(EvalError::DivByZero { expr: e.to_string() });
                }
                let inv = den.recip().ok_or_else(|| EvalError::DivByZero { expr: e.to_string() })?;
                match self.eval(a)? {
                    V::S(x) => V::S(x.mul(&inv)),
                    V::F(f) => V::F(f.iter().map(|c| c.mul(&inv)).collect()),
                }
            }
            Expr::Pow(a, k) => {
                let V::S(x) = self.eval(a)? else { unreachable!("kinds are checked by the parser") };
                V::S(x.powu(*k))
            }
            Expr::Func(f, a) => {
                let V::S(x) = self.eval(a)? else { unreachable!("kinds are checked by the parser") };
                let value = x.base();
                V::S(x.func(*f).ok_or_else(|| EvalError::Domain { func: f.name(), value, expr: e.to_string() })?)
            }
            Expr::Conj(a) => match self.eval(a)? {
                V::S(s) => V::S(s.conj()),
                V::F(f) => V::F(f.iter().map(Num::conj).collect()),
            },
        })
    }
}

fn check_point(spec: &ManifoldSpec, point: &[f64]) -> Result<(), EvalError> {
    if point.len() != spec.dim() {
        return Err(EvalError::PointLength { want: spec.dim(), got: point.len() });
    }
    Ok(())
}

/// Evaluates `expr` to jets of the given space centered at `point`.
pub fn eval_jet(spec: &ManifoldSpec, expr: &Expr, space: &JetSpace, point: &[f64]) -> Result<Value, EvalError> {
    check_point(spec, point)?;
    assert_eq!(space.nvars(), spec.dim(), "jet space must have one variable per coordinate");
    let constant = |c: C64| space.constant(c);
    let env = Env { spec, coords: (0..point.len()).map(|i| space.variable(i, point[i])).collect(), constant: &constant };
    let v = match env.eval(expr)? {
        V::S(s) => Value::Scalar(s),
        V::F(f) => Value::Form(f),
    };
    let finite = |j: &Jet| j.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite());
    let ok = match &v {
        Value::Scalar(s) => finite(s),
        Value::Form(f) => f.iter().all(finite),
    };
    if !ok {
        return Err(EvalError::NonFinite { expr: expr.to_string() });
    }
    Ok(v)
}

/// Evaluates `expr` to plain complex values at `point`, without any jet machinery.
pub fn eval_point(spec: &ManifoldSpec, expr: &Expr, point: &[f64]) -> Result<PointValue, EvalError> {
    check_point(spec, point)?;
    let constant = |c: C64| c;
    let env = Env { spec, coords: point.iter().map(|&x| C64::new(x, 0.0)).collect(), constant: &constant };
    Ok(match env.eval(expr)? {
        V::S(s) => PointValue::Scalar(s),
        V::F(f) => PointValue::Form(f),
    })
}
