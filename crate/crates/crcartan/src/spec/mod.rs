//! The manifold spec format: a header naming coordinates and parameters,
//! followed by `name = expr` bindings for `theta`, `theta1`…`thetaN` and an
//! optional `density`.
//!
//! ```text
//! manifold "heisenberg" { n = 1 complex z = (x, y) coords = [t, x, y] }
//! theta  = d(t) + i*(conj(z)*d(z) - z*d(conj(z)))
//! theta1 = sqrt(2)*d(z)
//! ```
//!
//! A complex coordinate `z = (x, y)` stands for `x + i*y`; `d(z)` is
//! `d(x) + i*d(y)` and `d(conj(z))` is `d(x) - i*d(y)`.

mod eval;
mod lexer;
mod parser;

use std::fmt;

pub use eval::{eval_jet, eval_point, EvalError, PointValue, Value};
pub use lexer::Pos;
pub use parser::parse_spec;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    pub(crate) fn at(pos: Pos, msg: impl Into<String>) -> Self {
        ParseError { line: pos.line, col: pos.col, msg: msg.into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Exp, Func::Log, Func::Sin, Func::Cos, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

/// Names that can never be coordinates, parameters or complex coordinates.
pub fn is_reserved(name: &str) -> bool {
    matches!(name, "i" | "d" | "conj") || Func::from_name(name).is_some()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    I,
    Var(String),
    /// `d(name)`
    D(String),
    /// `d(conj(name))`
    DConj(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Func(Func, Box<Expr>),
    Conj(Box<Expr>),
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.prec();
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::I => f.write_str("i"),
            Expr::Var(v) => f.write_str(v),
            Expr::D(v) => write!(f, "d({v})"),
            Expr::DConj(v) => write!(f, "d(conj({v}))"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                child(f, a, a.prec() < p)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = match self {
                    Expr::Add(..) => " + ",
                    Expr::Sub(..) => " - ",
                    Expr::Mul(..) => "*",
                    _ => "/",
                };
                child(f, a, a.prec() < p)?;
                f.write_str(op)?;
                child(f, b, b.prec() <= p)
            }
            Expr::Pow(a, k) => {
                child(f, a, a.prec() < p)?;
                write!(f, "^{k}")
            }
            Expr::Func(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Conj(a) => write!(f, "conj({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexCoord {
    pub name: String,
    pub re: String,
    pub im: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Binding {
    pub name: String,
    pub expr: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldSpec {
    pub name: String,
    pub n: usize,
    pub complex: Vec<ComplexCoord>,
    pub coords: Vec<String>,
    pub params: Vec<(String, f64)>,
    /// In file order; validated to hold `theta`, every `thetaK` and at most one `density`.
    pub bindings: Vec<Binding>,
}

impl ManifoldSpec {
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn binding(&self, name: &str) -> Option<&Expr> {
        self.bindings.iter().find(|b| b.name == name).map(|b| &b.expr)
    }

    pub fn theta(&self) -> &Expr {
        self.binding("theta").expect("validated spec has theta")
    }

    /// `theta{alpha+1}`.
    pub fn theta_a(&self, alpha: usize) -> &Expr {
        self.binding(&format!("theta{}", alpha + 1)).expect("validated spec has every thetaK")
    }

    pub fn density(&self) -> Option<&Expr> {
        self.binding("density")
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    pub fn complex_coord(&self, name: &str) -> Option<&ComplexCoord> {
        self.complex.iter().find(|c| c.name == name)
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|p| p.0 == name).map(|p| p.1)
    }
}

impl fmt::Display for ManifoldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "manifold \"{}\" {{ n = {}", self.name, self.n)?;
        for c in &self.complex {
            write!(f, " complex {} = ({}, {})", c.name, c.re, c.im)?;
        }
        write!(f, " coords = [{}]", self.coords.join(", "))?;
        for (p, v) in &self.params {
            write!(f, " param {p} = {v}")?;
        }
        writeln!(f, " }}")?;
        for b in &self.bindings {
            writeln!(f, "{} = {}", b.name, b.expr)?;
        }
        Ok(())
    }
}
