use std::collections::HashSet;

use super::lexer::{tokenize, Pos, Tok, Token};
use super::{is_reserved, Binding, ComplexCoord, Expr, Func, ManifoldSpec, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Scalar,
    Form,
}

struct Parser<'a> {
    toks: &'a [Token],
    at: usize,
    spec: ManifoldSpec,
}

type Res<T> = Result<T, ParseError>;

/// Parses and validates spec text. Every failure carries the line and column
/// of the offending token.
pub fn parse_spec(text: &str) -> Res<ManifoldSpec> {
    let toks = tokenize(text)?;
    let spec = ManifoldSpec {
        name: String::new(),
        n: 0,
        complex: Vec::new(),
        coords: Vec::new(),
        params: Vec::new(),
        bindings: Vec::new(),
    };
    let mut p = Parser { toks: &toks, at: 0, spec };
    p.header()?;
    p.bindings()?;
    Ok(p.spec)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &'a Token {
        &self.toks[self.at]
    }

    fn next(&mut self) -> &'a Token {
        let t = &self.toks[self.at];
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn unexpected<T>(&self, want: &str) -> Res<T> {
        let t = self.peek();
        Err(ParseError::at(t.pos, format!("expected {want}, found {}", t.tok.describe())))
    }

    fn sym(&mut self, c: char) -> Res<()> {
        if self.peek().tok == Tok::Sym(c) {
            self.next();
            Ok(())
        } else {
            self.unexpected(&format!("`{c}`"))
        }
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn keyword(&mut self, kw: &str) -> Res<()> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => {
                self.next();
                Ok(())
            }
            _ => self.unexpected(&format!("`{kw}`")),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> Res<(String, Pos)> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let pos = self.next().pos;
                Ok((s.clone(), pos))
            }
            _ => self.unexpected("an identifier"),
        }
    }

    /// A new coordinate, complex coordinate or parameter name.
    fn fresh_name(&mut self, seen: &mut HashSet<String>) -> Res<String> {
        let (name, pos) = self.ident()?;
        if is_reserved(&name) {
            return Err(ParseError::at(pos, format!("`{name}` is reserved")));
        }
        if !seen.insert(name.clone()) {
            return Err(ParseError::at(pos, format!("duplicate definition of `{name}`")));
        }
        Ok(name)
    }

    fn header(&mut self) -> Res<()> {
        self.keyword("manifold")?;
        match &self.peek().tok {
            Tok::Str(s) => {
                self.spec.name = s.clone();
                self.next();
            }
            _ => return self.unexpected("a quoted manifold name"),
        }
        self.sym('{')?;
        self.keyword("n")?;
        self.sym('=')?;
        let npos = self.peek().pos;
        self.spec.n = match self.peek().tok {
            Tok::Int(k) if (1..=16).contains(&k) => k as usize,
            Tok::Int(_) => return Err(ParseError::at(npos, "n must be between 1 and 16")),
            _ => return self.unexpected("an integer"),
        };
        self.next();
        let mut names = HashSet::new();
        let mut pairs = Vec::new();
        while self.is_keyword("complex") {
            self.next();
            let name = self.fresh_name(&mut names)?;
            self.sym('=')?;
            self.sym('(')?;
            let re = self.ident()?;
            self.sym(',')?;
            let im = self.ident()?;
            self.sym(')')?;
            pairs.push((name, re, im));
        }
        self.keyword("coords")?;
        self.sym('=')?;
        self.sym('[')?;
        loop {
            let c = self.fresh_name(&mut names)?;
            self.spec.coords.push(c);
            if self.is_sym(',') {
                self.next();
            } else {
                break;
            }
        }
        let close = self.peek().pos;
        self.sym(']')?;
        let want = self.spec.dim();
        if self.spec.coords.len() != want {
            return Err(ParseError::at(
                close,
                format!("n = {} needs {want} coordinates, found {}", self.spec.n, self.spec.coords.len()),
            ));
        }
        let mut used = HashSet::new();
        for (name, (re, rpos), (im, ipos)) in pairs {
            for (c, pos) in [(&re, rpos), (&im, ipos)] {
                if self.spec.coord_index(c).is_none() {
                    return Err(ParseError::at(pos, format!("`{c}` is not a coordinate")));
                }
                if !used.insert(c.clone()) {
                    return Err(ParseError::at(pos, format!("coordinate `{c}` already belongs to a complex coordinate")));
                }
            }
            self.spec.complex.push(ComplexCoord { name, re, im });
        }
        while self.is_keyword("param") {
            self.next();
            let name = self.fresh_name(&mut names)?;
            self.sym('=')?;
            let v = match self.peek().tok {
                Tok::Int(k) => k as f64,
                Tok::Num(x) => x,
                _ => return self.unexpected("a number"),
            };
            self.next();
            self.spec.params.push((name, v));
        }
        self.sym('}')
    }

    fn bindings(&mut self) -> Res<()> {
        let n = self.spec.n;
        loop {
            if self.peek().tok == Tok::Eof {
                break;
            }
            let (name, pos) = self.ident()?;
            let want = match name.as_str() {
                "theta" => Kind::Form,
                "density" => Kind::Scalar,
                s => match s.strip_prefix("theta").and_then(|k| k.parse::<usize>().ok()) {
                    Some(k) if (1..=n).contains(&k) && !s.starts_with("theta0") => Kind::Form,
                    _ => return Err(ParseError::at(pos, format!("unknown binding `{name}`"))),
                },
            };
            if self.spec.binding(&name).is_some() {
                return Err(ParseError::at(pos, format!("duplicate definition of `{name}`")));
            }
            self.sym('=')?;
            let (expr, kind) = self.expr()?;
            if kind != want {
                let what = if want == Kind::Form { "a 1-form" } else { "a scalar" };
                return Err(ParseError::at(pos, format!("`{name}` must be {what}")));
            }
            self.spec.bindings.push(Binding { name, expr });
        }
        let end = self.peek().pos;
        let required = std::iter::once("theta".to_string()).chain((1..=n).map(|k| format!("theta{k}")));
        for r in required {
            if self.spec.binding(&r).is_none() {
                return Err(ParseError::at(end, format!("{r} undefined")));
            }
        }
        Ok(())
    }

    fn expr(&mut self) -> Res<(Expr, Kind)> {
        let (mut acc, mut kind) = self.term()?;
        while self.is_sym('+') || self.is_sym('-') {
            let op = self.next();
            let (rhs, k) = self.term()?;
            if k != kind {
                return Err(ParseError::at(op.pos, "cannot add a scalar and a 1-form"));
            }
            acc = if op.tok == Tok::Sym('+') {
                Expr::Add(Box::new(acc), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(acc), Box::new(rhs))
            };
            kind = k;
        }
        Ok((acc, kind))
    }

    fn term(&mut self) -> Res<(Expr, Kind)> {
        let (mut acc, mut kind) = self.factor()?;
        while self.is_sym('*') || self.is_sym('/') {
            let op = self.next();
            let (rhs, k) = self.factor()?;
            if op.tok == Tok::Sym('*') {
                if kind == Kind::Form && k == Kind::Form {
                    return Err(ParseError::at(op.pos, "product of two 1-forms"));
                }
                acc = Expr::Mul(Box::new(acc), Box::new(rhs));
                if k == Kind::Form {
                    kind = Kind::Form;
                }
            } else {
                if k == Kind::Form {
                    return Err(ParseError::at(op.pos, "division by a 1-form"));
                }
                acc = Expr::Div(Box::new(acc), Box::new(rhs));
            }
        }
        Ok((acc, kind))
    }

    fn factor(&mut self) -> Res<(Expr, Kind)> {
        if self.is_sym('-') {
            self.next();
            let (e, k) = self.factor()?;
            return Ok((Expr::Neg(Box::new(e)), k));
        }
        let (mut e, kind) = self.primary()?;
        while self.is_sym('^') {
            let op = self.next();
            if kind == Kind::Form {
                return Err(ParseError::at(op.pos, "power of a 1-form"));
            }
            let k = match self.peek().tok {
                Tok::Int(k) if k <= 64 => k as u32,
                Tok::Int(_) => return Err(ParseError::at(self.peek().pos, "exponent too large")),
                _ => return self.unexpected("an integer exponent"),
            };
            self.next();
            e = Expr::Pow(Box::new(e), k);
        }
        Ok((e, kind))
    }

    fn primary(&mut self) -> Res<(Expr, Kind)> {
        let t = self.peek();
        match &t.tok {
            Tok::Int(k) => {
                self.next();
                Ok((Expr::Num(*k as f64), Kind::Scalar))
            }
            Tok::Num(x) => {
                self.next();
                Ok((Expr::Num(*x), Kind::Scalar))
            }
            Tok::Sym('(') => {
                self.next();
                let r = self.expr()?;
                self.sym(')')?;
                Ok(r)
            }
            Tok::Ident(name) => {
                self.next();
                match name.as_str() {
                    "i" => Ok((Expr::I, Kind::Scalar)),
                    "d" => self.differential(),
                    "conj" => {
                        self.sym('(')?;
                        let (e, k) = self.expr()?;
                        self.sym(')')?;
                        Ok((Expr::Conj(Box::new(e)), k))
                    }
                    s => {
                        if let Some(func) = Func::from_name(s) {
                            self.sym('(')?;
                            let arg_pos = self.peek().pos;
                            let (e, k) = self.expr()?;
                            self.sym(')')?;
                            if k == Kind::Form {
                                return Err(ParseError::at(arg_pos, format!("{s} of a 1-form")));
                            }
                            return Ok((Expr::Func(func, Box::new(e)), Kind::Scalar));
                        }
                        let known = self.spec.coord_index(s).is_some()
                            || self.spec.complex_coord(s).is_some()
                            || self.spec.param(s).is_some();
                        if !known {
                            return Err(ParseError::at(t.pos, format!("unknown identifier `{s}`")));
                        }
                        Ok((Expr::Var(name.clone()), Kind::Scalar))
                    }
                }
            }
            _ => self.unexpected("an expression"),
        }
    }

    /// After `d`: `(IDENT)` or `(conj(IDENT))`.
    fn differential(&mut self) -> Res<(Expr, Kind)> {
        self.sym('(')?;
        let (name, pos) = self.ident()?;
        let (arg, pos, conj) = if name == "conj" {
            self.sym('(')?;
            let (inner, ipos) = self.ident()?;
            self.sym(')')?;
            (inner, ipos, true)
        } else {
            (name, pos, false)
        };
        self.sym(')')?;
        let is_coord = self.spec.coord_index(&arg).is_some();
        let is_complex = self.spec.complex_coord(&arg).is_some();
        if !is_coord && !is_complex {
            return Err(ParseError::at(pos, format!("`{arg}` is not a coordinate")));
        }
        let e = if conj { Expr::DConj(arg) } else { Expr::D(arg) };
        Ok((e, Kind::Form))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEIS: &str = "manifold \"heisenberg\" { n = 1 complex z = (x, y) coords = [t, x, y] }\n\
        theta  = d(t) + i*(conj(z)*d(z) - z*d(conj(z)))\n\
        theta1 = sqrt(2)*d(z)\n";

    fn err(text: &str) -> ParseError {
        parse_spec(text).unwrap_err()
    }

    #[test]
    fn heisenberg_literal() {
        let s = parse_spec(HEIS).unwrap();
        assert_eq!(s.name, "heisenberg");
        assert_eq!(s.n, 1);
        assert_eq!(s.coords, ["t", "x", "y"]);
        assert_eq!(s.complex[0], ComplexCoord { name: "z".into(), re: "x".into(), im: "y".into() });
        assert!(s.density().is_none());
        assert_eq!(s.theta_a(0).to_string(), "sqrt(2)*d(z)");
    }

    #[test]
    fn missing_theta() {
        let e = err("manifold \"h\" { n = 1 coords = [t, x, y] }\ntheta1 = sqrt(2)*d(x)\n");
        assert_eq!(e.msg, "theta undefined");
        let e = err("manifold \"h\" { n = 1 coords = [t, x, y] }\ntheta = d(t)\n");
        assert_eq!(e.msg, "theta1 undefined");
    }

    #[test]
    fn validation_errors() {
        let e = err("manifold \"h\" { n = 1 coords = [t, x] }\ntheta = d(t)\ntheta1 = d(x)");
        assert_eq!((e.line, e.col), (1, 36));
        assert!(e.msg.contains("needs 3 coordinates"));
        let e = err("manifold \"h\" { n = 1 coords = [t, x, y] }\ntheta = d(t) + w*d(x)\ntheta1 = d(x)");
        assert_eq!((e.line, e.col, e.msg.as_str()), (2, 16, "unknown identifier `w`"));
        let e = err("manifold \"h\" { n = 1 coords = [t, x, x] }\ntheta = d(t)\ntheta1 = d(x)");
        assert!(e.msg.starts_with("duplicate definition"));
        let e = err("manifold \"h\" { n = 1 coords = [t, x, y] }\ntheta = d(t)\ntheta = d(x)\ntheta1 = d(x)");
        assert_eq!((e.line, e.msg.as_str()), (3, "duplicate definition of `theta`"));
        let e = err("manifold \"h\" { n = 1 coords = [t, x, y] }\ntheta = d(t)\ntheta1 = d(x)\ntheta2 = d(y)");
        assert_eq!(e.msg, "unknown binding `theta2`");
        let e = err("manifold \"h\" { n = 1 coords = [t, exp, y] }\ntheta = d(t)\ntheta1 = d(x)");
        assert!(e.msg.contains("reserved"));
    }

    #[test]
    fn kind_errors() {
        let h = "manifold \"h\" { n = 1 coords = [t, x, y] }\ntheta1 = d(x)\ntheta = ";
        assert!(err(&format!("{h}d(t)*d(x)")).msg.contains("product of two 1-forms"));
        assert!(err(&format!("{h}d(t) + x")).msg.contains("scalar and a 1-form"));
        assert!(err(&format!("{h}exp(d(t))")).msg.contains("exp of a 1-form"));
        assert!(err(&format!("{h}x")).msg.contains("must be a 1-form"));
        assert!(err(&format!("{h}d(t)/d(x)")).msg.contains("division"));
        assert!(err(&format!("{h}d(t)^2")).msg.contains("power"));
    }

    #[test]
    fn precedence() {
        let s = parse_spec(&format!("{HEIS}density = -x^2 + 2*y/3 - (t - x)")).unwrap();
        assert_eq!(s.density().unwrap().to_string(), "-x^2 + 2*y/3 - (t - x)");
        match s.density().unwrap() {
            Expr::Sub(a, _) => match a.as_ref() {
                Expr::Add(neg, _) => assert!(matches!(neg.as_ref(), Expr::Neg(p) if matches!(p.as_ref(), Expr::Pow(..)))),
                e => panic!("{e:?}"),
            },
            e => panic!("{e:?}"),
        }
    }
}
