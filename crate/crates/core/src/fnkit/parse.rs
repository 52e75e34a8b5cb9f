//! Lexer, recursive-descent parser, and the inverse printer.

use super::Expr;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unsupported function '{name}' at offset {pos}")]
    UnsupportedFunction { pos: usize, name: String },
}

fn syntax(pos: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { pos, msg: msg.into() }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Z,
    ImagUnit,
    Num(f64),
    Func(Func),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Exp,
    Sin,
    Cos,
    Tan,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(text: &'a str) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut lx = Lexer { src: text.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            if lx.pos >= lx.src.len() {
                return Ok(out);
            }
            let start = lx.pos;
            let tok = lx.next_token()?;
            out.push((start, tok));
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next_token(&mut self) -> Result<Tok, ParseError> {
        let b = self.src[self.pos];
        let simple = match b {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            self.pos += 1;
            return Ok(t);
        }
        if b.is_ascii_digit() || b == b'.' {
            return self.number();
        }
        if b.is_ascii_alphabetic() {
            return self.word();
        }
        Err(syntax(self.pos, format!("unexpected character '{}'", b as char)))
    }

    fn number(&mut self) -> Result<Tok, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        // Exponent suffix, only when it cannot be the start of a name like
        // "exp": 'e'/'E' must be followed by digits (optionally signed).
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mut probe = self.pos + 1;
            if probe < self.src.len() && (self.src[probe] == b'+' || self.src[probe] == b'-') {
                probe += 1;
            }
            if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                self.pos = probe;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(Tok::Num)
            .map_err(|_| syntax(start, format!("bad number literal '{text}'")))
    }

    fn word(&mut self) -> Result<Tok, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match name {
            "z" => Ok(Tok::Z),
            "i" => Ok(Tok::ImagUnit),
            "exp" => Ok(Tok::Func(Func::Exp)),
            "sin" => Ok(Tok::Func(Func::Sin)),
            "cos" => Ok(Tok::Func(Func::Cos)),
            "tan" => Ok(Tok::Func(Func::Tan)),
            _ => Err(ParseError::UnsupportedFunction { pos: start, name: name.to_string() }),
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::tokens(text)?;
    if toks.is_empty() {
        return Err(syntax(0, "empty input"));
    }
    let end = text.len();
    let mut p = Parser { toks, at: 0, end };
    let e = p.expr()?;
    if let Some((pos, _)) = p.peek_at() {
        return Err(syntax(pos, "trailing input"));
    }
    Ok(e)
}

impl Parser {
    fn peek_at(&self) -> Option<(usize, &Tok)> {
        self.toks.get(self.at).map(|(p, t)| (*p, t))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        if t.is_some() {
            self.at += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(want) {
            self.at += 1;
            Ok(())
        } else {
            Err(syntax(self.here(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let negate_head = if self.peek() == Some(&Tok::Minus) {
            self.at += 1;
            true
        } else {
            false
        };
        let mut acc = self.term()?;
        if negate_head {
            acc = Expr::Neg(Box::new(acc));
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    let rhs = self.term()?;
                    acc = Expr::Add(Box::new(acc), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    let rhs = self.term()?;
                    acc = Expr::Sub(Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                    let rhs = self.factor()?;
                    acc = Expr::Mul(Box::new(acc), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.at += 1;
                    let rhs = self.factor()?;
                    acc = Expr::Div(Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.peek() == Some(&Tok::Caret) {
            self.at += 1;
            let n = self.integer_exponent()?;
            return Ok(Expr::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    fn integer_exponent(&mut self) -> Result<i32, ParseError> {
        let pos = self.here();
        let negative = match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                true
            }
            Some(Tok::Plus) => {
                self.at += 1;
                false
            }
            _ => false,
        };
        match self.bump() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => {
                let n = v as i32;
                Ok(if negative { -n } else { n })
            }
            _ => Err(syntax(pos, "expected integer exponent after '^'")),
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Z) => Ok(Expr::Z),
            Some(Tok::ImagUnit) => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
            Some(Tok::Num(v)) => Ok(Expr::Const(Complex64::new(v, 0.0))),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Func(f)) => {
                self.expect(&Tok::LParen, "'(' after function name")?;
                let arg = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                let b = Box::new(arg);
                Ok(match f {
                    Func::Exp => Expr::Exp(b),
                    Func::Sin => Expr::Sin(b),
                    Func::Cos => Expr::Cos(b),
                    Func::Tan => Expr::Tan(b),
                })
            }
            _ => Err(syntax(pos, "expected 'z', a number, 'i', '(' or a function")),
        }
    }
}

// Printing. `ctx` is the minimum precedence the surrounding slot accepts;
// anything looser gets parenthesised. Precedences: sums and leading minus 1,
// products 2, powers 3, atoms 4. The slot values below are exactly what the
// grammar demands, so print → parse reproduces the tree node for node.
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) | Expr::Neg(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Pow(..) => 3,
        _ => 4,
    }
}

pub fn serialize(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(e, 1, &mut s);
    s
}

fn write_expr(e: &Expr, ctx: u8, out: &mut String) {
    let wrap = prec(e) < ctx;
    if wrap {
        out.push('(');
    }
    match e {
        Expr::Z => out.push('z'),
        Expr::Const(c) => write_const(*c, out),
        Expr::Neg(a) => {
            out.push('-');
            write_expr(a, 2, out);
        }
        Expr::Add(a, b) => {
            write_expr(a, 1, out);
            out.push_str(" + ");
            write_expr(b, 2, out);
        }
        Expr::Sub(a, b) => {
            write_expr(a, 1, out);
            out.push_str(" - ");
            write_expr(b, 2, out);
        }
        Expr::Mul(a, b) => {
            write_expr(a, 2, out);
            out.push('*');
            write_expr(b, 3, out);
        }
        Expr::Div(a, b) => {
            write_expr(a, 2, out);
            out.push('/');
            write_expr(b, 3, out);
        }
        Expr::Pow(a, n) => {
            write_expr(a, 4, out);
            out.push('^');
            out.push_str(&n.to_string());
        }
        Expr::Exp(a) => write_func("exp", a, out),
        Expr::Sin(a) => write_func("sin", a, out),
        Expr::Cos(a) => write_func("cos", a, out),
        Expr::Tan(a) => write_func("tan", a, out),
    }
    if wrap {
        out.push(')');
    }
}

fn write_func(name: &str, arg: &Expr, out: &mut String) {
    out.push_str(name);
    out.push('(');
    write_expr(arg, 1, out);
    out.push(')');
}

fn write_const(c: Complex64, out: &mut String) {
    if c.re == 0.0 && c.im == 1.0 {
        out.push('i');
    } else {
        debug_assert!(c.im == 0.0 && c.re >= 0.0, "non-canonical constant {c}");
        // f64 Display is shortest-exact and never scientific, so the literal
        // relexes to the identical bit pattern.
        out.push_str(&c.re.to_string());
    }
}
