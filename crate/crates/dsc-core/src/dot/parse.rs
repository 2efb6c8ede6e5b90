//! Reader for textual DOT. Accepts both ASCII and Unicode spellings:
//! `⊤`/`Top`, `⊥`/`Bot`, `=>`/`⇒`, `&`/`∧`, `|`/`∨`.

use thiserror::Error;

use super::*;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{line}:{col}: {msg}")]
pub struct DotParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(&'static str),
}

struct Lexed {
    toks: Vec<(Tok, usize, usize)>,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '$' | '#' | '\'')
}

fn lex(src: &str) -> Result<Lexed, DotParseError> {
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut toks = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let sym2 = match two.as_str() {
            "=>" => Some("=>"),
            ".." => Some(".."),
            _ => None,
        };
        if let Some(s) = sym2 {
            toks.push((Tok::Sym(s), l0, c0));
            i += 2;
            col += 2;
            continue;
        }
        let sym1 = match c {
            '⇒' => Some("=>"),
            '∧' | '&' => Some("&"),
            '∨' | '|' => Some("|"),
            '⊤' => Some("⊤"),
            '⊥' => Some("⊥"),
            '{' => Some("{"),
            '}' => Some("}"),
            '(' => Some("("),
            ')' => Some(")"),
            ',' => Some(","),
            ':' => Some(":"),
            '=' => Some("="),
            '.' => Some("."),
            _ => None,
        };
        if let Some(s) = sym1 {
            toks.push((Tok::Sym(s), l0, c0));
            i += 1;
            col += 1;
            continue;
        }
        if is_ident_char(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            col += i - start;
            toks.push((Tok::Ident(chars[start..i].iter().collect()), l0, c0));
            continue;
        }
        return Err(DotParseError { line, col, msg: format!("unexpected character `{c}`") });
    }
    Ok(Lexed { toks })
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.0)
    }

    fn err(&self, msg: impl Into<String>) -> DotParseError {
        let (line, col) = match self.toks.get(self.pos) {
            Some((_, l, c)) => (*l, *c),
            None => self.toks.last().map(|(_, l, c)| (*l, *c + 1)).unwrap_or((1, 1)),
        };
        DotParseError { line, col, msg: msg.into() }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(t)) if *t == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), DotParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    fn ident(&mut self) -> Result<Name, DotParseError> {
        match self.peek() {
            Some(Tok::Ident(x)) => {
                let x = x.clone();
                self.pos += 1;
                Ok(x)
            }
            _ => Err(self.err("expected identifier")),
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == kw)
    }

    fn ty(&mut self) -> Result<DType, DotParseError> {
        let a = self.and_ty()?;
        if self.eat("|") {
            Ok(DType::or(a, self.ty()?))
        } else {
            Ok(a)
        }
    }

    fn and_ty(&mut self) -> Result<DType, DotParseError> {
        let a = self.atom_ty()?;
        if self.eat("&") {
            Ok(DType::and(a, self.and_ty()?))
        } else {
            Ok(a)
        }
    }

    fn atom_ty(&mut self) -> Result<DType, DotParseError> {
        if self.eat("⊤") || (self.is_kw("Top") && self.peek2() != Some(&Tok::Sym(".")) && self.bump()) {
            return Ok(DType::Top);
        }
        if self.eat("⊥") || (self.is_kw("Bot") && self.peek2() != Some(&Tok::Sym(".")) && self.bump()) {
            return Ok(DType::Bot);
        }
        if self.eat("(") {
            let t = self.ty()?;
            self.expect(")")?;
            return Ok(t);
        }
        if self.eat("{") {
            let z = self.ident()?;
            self.expect("=>")?;
            let t = self.ty()?;
            self.expect("}")?;
            return Ok(DType::rec(&z, t));
        }
        let x = self.ident()?;
        if self.eat(".") {
            let l = self.ident()?;
            return Ok(DType::Sel(x, l));
        }
        if self.eat("=") {
            return Ok(DType::alias(&x, self.ty()?));
        }
        if self.eat(":") {
            let lo = self.ty()?;
            self.expect("..")?;
            let hi = self.ty()?;
            return Ok(DType::Mem(x, Box::new(lo), Box::new(hi)));
        }
        if self.eat("(") {
            let mut ps = Vec::new();
            if !self.eat(")") {
                loop {
                    let p = self.ident()?;
                    self.expect(":")?;
                    ps.push((p, self.ty()?));
                    if self.eat(")") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            self.expect(":")?;
            let r = self.ty()?;
            return Ok(DType::Fun(x, ps, Box::new(r)));
        }
        Err(self.err(format!("expected `.`, `=`, `:` or `(` after `{x}`")))
    }

    fn bump(&mut self) -> bool {
        self.pos += 1;
        true
    }

    fn term(&mut self) -> Result<DTerm, DotParseError> {
        if self.is_kw("let") {
            self.pos += 1;
            let x = self.ident()?;
            self.expect("=")?;
            let s = self.term()?;
            if !self.is_kw("in") {
                return Err(self.err("expected `in`"));
            }
            self.pos += 1;
            let u = self.term()?;
            return Ok(DTerm::Let(x, Box::new(s), Box::new(u)));
        }
        let mut t = self.primary()?;
        while self.eat(".") {
            let m = self.ident()?;
            self.expect("(")?;
            let mut args = Vec::new();
            if !self.eat(")") {
                loop {
                    args.push(self.term()?);
                    if self.eat(")") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            t = DTerm::Call(Box::new(t), m, args);
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<DTerm, DotParseError> {
        if self.eat("(") {
            let t = self.term()?;
            self.expect(")")?;
            return Ok(t);
        }
        if self.eat("{") {
            let z = self.ident()?;
            self.expect("=>")?;
            let mut ds = Vec::new();
            if !self.eat("}") {
                loop {
                    ds.push(self.decl()?);
                    if self.eat("}") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            return Ok(DTerm::Obj(z, ds));
        }
        Ok(DTerm::Var(self.ident()?))
    }

    fn decl(&mut self) -> Result<Decl, DotParseError> {
        let l = self.ident()?;
        if self.eat("=") {
            return Ok(Decl::Tag(l, self.ty()?));
        }
        self.expect("(")?;
        let mut ps = Vec::new();
        if !self.eat(")") {
            loop {
                let x = self.ident()?;
                let t = if self.eat(":") { Some(self.ty()?) } else { None };
                ps.push((x, t));
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        let r = if self.eat(":") { Some(self.ty()?) } else { None };
        self.expect("=")?;
        let body = self.term()?;
        Ok(Decl::Def(l, ps, r, body))
    }

    fn done(&self) -> Result<(), DotParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.err("unexpected trailing input"))
        }
    }
}

pub fn parse_type(src: &str) -> Result<DType, DotParseError> {
    let mut p = Parser { toks: lex(src)?.toks, pos: 0 };
    let t = p.ty()?;
    p.done()?;
    Ok(t)
}

pub fn parse_term(src: &str) -> Result<DTerm, DotParseError> {
    let mut p = Parser { toks: lex(src)?.toks, pos: 0 };
    let t = p.term()?;
    p.done()?;
    Ok(t)
}
