use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Str(String),
    Int(u64),
    Num(f64),
    Ident(String),
    Sym(char),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Int(i) => format!("integer {i}"),
            Tok::Num(x) => format!("number {x}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const SYMBOLS: &str = "{}()[],=+-*/^";

/// Splits spec text into tokens. Newlines are ordinary whitespace and `#`
/// starts a comment running to the end of the line.
pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize| {
        if chars[*i] == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
        *i += 1;
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col);
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col);
            }
        } else if c == '"' {
            advance(&mut i, &mut line, &mut col);
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(ParseError::at(pos, "unterminated string")),
                    Some('"') => {
                        advance(&mut i, &mut line, &mut col);
                        break;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        advance(&mut i, &mut line, &mut col);
                    }
                }
            }
            out.push(Token { tok: Tok::Str(s), pos });
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            let mut float = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col);
            }
            if i < chars.len() && chars[i] == '.' {
                float = true;
                advance(&mut i, &mut line, &mut col);
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance(&mut i, &mut line, &mut col);
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let sign = chars.get(i + 1).is_some_and(|&ch| ch == '+' || ch == '-');
                let digit_at = if sign { i + 2 } else { i + 1 };
                if chars.get(digit_at).is_some_and(char::is_ascii_digit) {
                    float = true;
                    while i < digit_at {
                        advance(&mut i, &mut line, &mut col);
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        advance(&mut i, &mut line, &mut col);
                    }
                }
            }
            let lit: String = chars[start..i].iter().collect();
            let tok = if float {
                Tok::Num(lit.parse().map_err(|_| ParseError::at(pos, format!("bad number `{lit}`")))?)
            } else {
                match lit.parse() {
                    Ok(v) => Tok::Int(v),
                    Err(_) => return Err(ParseError::at(pos, format!("integer `{lit}` too large"))),
                }
            };
            out.push(Token { tok, pos });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                advance(&mut i, &mut line, &mut col);
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), pos });
        } else if SYMBOLS.contains(c) {
            advance(&mut i, &mut line, &mut col);
            out.push(Token { tok: Tok::Sym(c), pos });
        } else {
            return Err(ParseError::at(pos, format!("unexpected character {c:?}")));
        }
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn numbers() {
        assert_eq!(toks("2 0.5 1e-3 3."), vec![Tok::Int(2), Tok::Num(0.5), Tok::Num(1e-3), Tok::Num(3.0), Tok::Eof]);
        // `e` not followed by digits is an identifier
        assert_eq!(toks("2e"), vec![Tok::Int(2), Tok::Ident("e".into()), Tok::Eof]);
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("# note\n  x = 1 # trailing\ny").unwrap();
        assert_eq!(t[0].tok, Tok::Ident("x".into()));
        assert_eq!(t[0].pos, Pos { line: 2, col: 3 });
        assert_eq!(t[3].pos, Pos { line: 3, col: 1 });
    }

    #[test]
    fn bad_input() {
        let e = tokenize("x = $").unwrap_err();
        assert_eq!((e.line, e.col), (1, 5));
        assert!(tokenize("\"open").is_err());
    }
}
