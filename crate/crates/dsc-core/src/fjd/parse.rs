//! Reader for FJD concrete syntax:
//!
//! ```text
//! interface L { Object fooL(); }
//! class A < Object, L {
//!   Object f;
//!   A(Object f) { super(); this.f = f; }
//!   Object fooL() { return this.f; }
//! }
//! main = (L) new A(new Object());
//! ```
//!
//! The constructor may be omitted; it is always the canonical one and is
//! checked against the field list when present. Parentheses on a nullary
//! method declaration and the `;` after an abstract method are optional.

use super::*;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(char),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for ParseError {}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    for (n, line) in src.lines().enumerate() {
        let line_no = n + 1;
        let code = line.split("//").next().unwrap_or("");
        let mut chars = code.chars().peekable();
        while let Some(&c) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
            } else if c.is_alphanumeric() || c == '_' || c == '$' {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' || d == '$' {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(s), line_no));
            } else if "{}(),;.=<".contains(c) {
                out.push((Tok::Sym(c), line_no));
                chars.next();
            } else {
                return Err(ParseError { line: line_no, msg: format!("unexpected character `{c}`") });
            }
        }
    }
    Ok(out)
}

struct Ctor {
    params: Vec<(Name, Name)>,
    supers: Vec<Name>,
    assigns: Vec<(Name, Name)>,
    line: usize,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(1, |t| t.1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { line: self.line(), msg: msg.into() })
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.0)
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek_at(0) == Some(&Tok::Sym(c))
    }

    fn eat(&mut self, c: char) -> bool {
        let hit = self.is_sym(c);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek_at(0), Some(Tok::Ident(x)) if x == k)
    }

    fn ident(&mut self) -> Result<Name, ParseError> {
        match self.peek_at(0) {
            Some(Tok::Ident(x)) => {
                let x = x.clone();
                self.pos += 1;
                Ok(x)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn keyword(&mut self, k: &str) -> Result<(), ParseError> {
        if self.is_kw(k) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{k}`"))
        }
    }

    fn program(&mut self) -> Result<(FjdProgram, Vec<(Name, Ctor)>), ParseError> {
        let mut p = FjdProgram::default();
        let mut ctors = Vec::new();
        while self.pos < self.toks.len() {
            if self.is_kw("main") {
                self.pos += 1;
                self.expect('=')?;
                p.main = Some(self.expr()?);
                self.eat(';');
                continue;
            }
            let kind = if self.is_kw("class") {
                FKind::Class
            } else if self.is_kw("interface") {
                FKind::Interface
            } else {
                return self.err("expected `class`, `interface` or `main`");
            };
            self.pos += 1;
            let name = self.ident()?;
            let mut supers = Vec::new();
            if self.eat('<') {
                loop {
                    supers.push(self.ident()?);
                    if !self.eat(',') {
                        break;
                    }
                }
            }
            let (parent, interfaces) = match kind {
                FKind::Class if supers.is_empty() => (Some(OBJECT.to_string()), Vec::new()),
                FKind::Class => (Some(supers[0].clone()), supers[1..].to_vec()),
                FKind::Interface => (None, supers),
            };
            let mut c = FClass { kind, name: name.clone(), parent, interfaces, fields: Vec::new(), methods: Vec::new() };
            self.expect('{')?;
            while !self.eat('}') {
                if let Some(k) = self.member(&mut c)? {
                    ctors.push((name.clone(), k));
                }
            }
            if p.classes.insert(name.clone(), c).is_some() {
                return self.err(format!("duplicate declaration of {name}"));
            }
        }
        Ok((p, ctors))
    }

    fn params(&mut self) -> Result<Vec<(Name, Name)>, ParseError> {
        self.expect('(')?;
        let mut ps = Vec::new();
        if !self.eat(')') {
            loop {
                let t = self.ident()?;
                ps.push((t, self.ident()?));
                if self.eat(')') {
                    break;
                }
                self.expect(',')?;
            }
        }
        Ok(ps)
    }

    fn member(&mut self, c: &mut FClass) -> Result<Option<Ctor>, ParseError> {
        let line = self.line();
        let first = self.ident()?;
        if first == c.name && self.is_sym('(') {
            let params = self.params()?;
            self.expect('{')?;
            self.keyword("super")?;
            self.expect('(')?;
            let mut supers = Vec::new();
            if !self.eat(')') {
                loop {
                    supers.push(self.ident()?);
                    if self.eat(')') {
                        break;
                    }
                    self.expect(',')?;
                }
            }
            self.expect(';')?;
            let mut assigns = Vec::new();
            while !self.eat('}') {
                self.keyword("this")?;
                self.expect('.')?;
                let f = self.ident()?;
                self.expect('=')?;
                let x = self.ident()?;
                self.expect(';')?;
                assigns.push((f, x));
            }
            return Ok(Some(Ctor { params, supers, assigns, line }));
        }
        let name = self.ident()?;
        if self.eat(';') {
            c.fields.push((first, name));
            return Ok(None);
        }
        let params = if self.is_sym('(') { self.params()? } else { Vec::new() };
        let body = if self.eat('{') {
            self.keyword("return")?;
            let e = self.expr()?;
            self.expect(';')?;
            self.expect('}')?;
            Some(e)
        } else {
            self.eat(';');
            None
        };
        c.methods.push(FMethod { result: first, name, params, body });
        Ok(None)
    }

    fn starts_expr(&self, k: usize) -> bool {
        matches!(self.peek_at(k), Some(Tok::Ident(_)) | Some(Tok::Sym('(')))
    }

    fn expr(&mut self) -> Result<FExpr, ParseError> {
        // `(C) e` when a parenthesized name is followed by an expression.
        if self.is_sym('(')
            && matches!(self.peek_at(1), Some(Tok::Ident(_)))
            && self.peek_at(2) == Some(&Tok::Sym(')'))
            && self.starts_expr(3)
        {
            self.pos += 1;
            let c = self.ident()?;
            self.pos += 1;
            return Ok(FExpr::Cast(c, Box::new(self.expr()?)));
        }
        let mut e = self.primary()?;
        while self.eat('.') {
            let m = self.ident()?;
            if self.eat('(') {
                let mut args = Vec::new();
                if !self.eat(')') {
                    loop {
                        args.push(self.expr()?);
                        if self.eat(')') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                e = FExpr::Call(Box::new(e), m, args);
            } else {
                e = FExpr::Field(Box::new(e), m);
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<FExpr, ParseError> {
        if self.eat('(') {
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        if self.is_kw("new") {
            self.pos += 1;
            let c = self.ident()?;
            self.expect('(')?;
            let mut args = Vec::new();
            if !self.eat(')') {
                loop {
                    args.push(self.expr()?);
                    if self.eat(')') {
                        break;
                    }
                    self.expect(',')?;
                }
            }
            return Ok(FExpr::New(c, args));
        }
        Ok(FExpr::Var(self.ident()?))
    }
}

pub fn parse_program(src: &str) -> Result<FjdProgram, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let (prog, ctors) = p.program()?;
    for (c, k) in ctors {
        let d = &prog.classes[&c];
        let inherited = d.parent.as_deref().map(|p| prog.fields(p)).unwrap_or_default();
        let canonical = k.params == prog.fields(&c)
            && k.supers.iter().eq(inherited.iter().map(|(_, f)| f))
            && k.assigns.iter().map(|(f, x)| (f, x)).eq(d.fields.iter().map(|(_, f)| (f, f)));
        if !canonical {
            return Err(ParseError { line: k.line, msg: format!("constructor of {c} is not canonical") });
        }
    }
    Ok(prog)
}

pub fn parse_expr(src: &str) -> Result<FExpr, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn casts_and_parenthesized_receivers() {
        let e = parse_expr("((R)x).r()").unwrap();
        assert_eq!(e, FExpr::Call(Box::new(FExpr::cast("R", FExpr::var("x"))), "r".into(), vec![]));
        assert_eq!(parse_expr("(R)x.r()").unwrap(), FExpr::cast("R", FExpr::Call(Box::new(FExpr::var("x")), "r".into(), vec![])));
        assert_eq!(parse_expr("(x)").unwrap(), FExpr::var("x"));
    }

    #[test]
    fn listing_style_without_parens() {
        let p = parse_program("interface L { Object fooL() } class A < Object, L { Object fooL { return new Object(); } }").unwrap();
        assert_eq!(p.classes["L"].methods[0].body, None);
        assert_eq!(p.classes["A"].parent.as_deref(), Some("Object"));
        assert_eq!(p.classes["A"].interfaces, ["L"]);
    }

    #[test]
    fn non_canonical_constructor() {
        let e = parse_program("class A < Object { Object a; A(Object b) { super(); this.a = b; } }").unwrap_err();
        assert!(e.msg.contains("canonical"));
    }
}
