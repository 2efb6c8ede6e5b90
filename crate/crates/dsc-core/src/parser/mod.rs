//! Surface syntax: lexing, parsing, name resolution and level gating.
//!
//! Calls always parse as [`Expr::Call`]. At DS level [`desugar`] rewrites
//! them into blocks of variable-only invocations.

pub mod desugar;
pub mod lexer;
pub mod pretty;

use std::collections::HashSet;

use indexmap::IndexMap;

use crate::diag::{Diagnostic, Result};
use crate::syntax::*;
use lexer::{Tok, Token};

const KEYWORDS: &[&str] =
    &["class", "trait", "def", "type", "new", "if", "then", "else", "true", "false", "val", "main", "extends", "with"];

/// Parses a whole program. The level comes from `level`, then from a
/// `//level:` pragma, and defaults to DS.
pub fn parse_program(src: &str, level: Option<Level>) -> Result<Program> {
    let level = match level {
        Some(l) => l,
        None => match lexer::level_pragma(src) {
            Some(s) => Level::parse(&s)
                .ok_or_else(|| Diagnostic::new("PARSE", Span::new(1, 1), format!("unknown level `{s}` in pragma")))?,
            None => Level::Ds,
        },
    };
    let toks = lexer::lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let raw = p.program()?;
    let prog = build_program(raw, level)?;
    check_level(&prog)?;
    Ok(if level == Level::Ds { desugar::desugar_program(&prog) } else { prog })
}

/// Parses a standalone type, resolving names bound as type variables in `env`.
pub fn parse_type(src: &str, env: &TypeEnv) -> Result<Type> {
    let toks = lexer::lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let t = p.ty()?;
    p.expect_eof()?;
    let scope = Scope { class: env.type_names().into_iter().collect(), method: HashSet::new() };
    resolve_type(&t, &scope, p.toks[0].span)
}

/// Parses a context such as `X <: Object, x : A`. Entries are comma or
/// semicolon separated and bind left to right.
pub fn parse_env(src: &str) -> Result<TypeEnv> {
    let toks = lexer::lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let mut env = TypeEnv::new();
    while !p.at_eof() {
        let span = p.span();
        let name = p.ident()?;
        if p.eat("<:") {
            let t = p.ty()?;
            let scope = Scope { class: env.type_names().into_iter().chain([name.clone()]).collect(), method: HashSet::new() };
            let t = resolve_type(&t, &scope, span)?;
            env.push_types(&[TParam { name, bound: t }]);
        } else {
            p.expect(":")?;
            let t = p.ty()?;
            let scope = Scope { class: env.type_names().into_iter().collect(), method: HashSet::new() };
            env.push_term(&name, resolve_type(&t, &scope, span)?);
        }
        if !p.eat(",") && !p.eat(";") {
            break;
        }
    }
    p.expect_eof()?;
    Ok(env)
}

/// Parses an expression in the scope of `table` (used for `main`-like snippets).
pub fn parse_expr(src: &str, level: Level) -> Result<Expr> {
    let toks = lexer::lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    p.expect_eof()?;
    let e = resolve_expr(&e, &Scope::default(), p.toks[0].span)?;
    Ok(if level == Level::Ds { desugar::desugar_expr(&e, &mut desugar::Fresh::default()) } else { e })
}

struct RawParent {
    ty: Type,
    args: Option<Vec<Name>>,
}

struct RawClass {
    kind: ClassKind,
    name: Name,
    span: Span,
    tparams: Vec<TParam>,
    vparams: Option<Vec<(Name, Type)>>,
    parents: Vec<RawParent>,
    tdecls: Vec<TypeDecl>,
    methods: Vec<MethodDecl>,
}

struct RawProgram {
    classes: Vec<RawClass>,
    main: Option<(Expr, Span)>,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }
    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }
    fn span(&self) -> Span {
        self.toks[self.pos].span
    }
    fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }
    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Diagnostic::new("PARSE", self.span(), msg))
    }
    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }
    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }
    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }
    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }
    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }
    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", self.describe()))
        }
    }
    fn expect_kw(&mut self, k: &str) -> Result<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.err(format!("expected `{k}`, found {}", self.describe()))
        }
    }
    fn expect_eof(&self) -> Result<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.err(format!("unexpected {}", self.describe()))
        }
    }
    fn ident(&mut self) -> Result<Name> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.err(format!("expected identifier, found {}", self.describe())),
        }
    }

    fn program(&mut self) -> Result<RawProgram> {
        let mut classes = Vec::new();
        let mut main = None;
        loop {
            while self.eat(";") {}
            if self.at_eof() {
                break;
            }
            if self.is_kw("class") || self.is_kw("trait") {
                classes.push(self.class()?);
            } else if self.is_kw("main") {
                let span = self.span();
                self.bump();
                self.expect("=")?;
                if main.is_some() {
                    return Err(Diagnostic::new("PARSE", span, "duplicate `main`"));
                }
                main = Some((self.expr()?, span));
            } else {
                return self.err(format!("expected `class`, `trait` or `main`, found {}", self.describe()));
            }
        }
        Ok(RawProgram { classes, main })
    }

    fn class(&mut self) -> Result<RawClass> {
        let span = self.span();
        let kind = if self.eat_kw("class") {
            ClassKind::Class
        } else {
            self.expect_kw("trait")?;
            ClassKind::Trait
        };
        let name = self.ident()?;
        let tparams = if self.is_sym("[") { self.tparams()? } else { Vec::new() };
        let vparams = if self.is_sym("(") { Some(self.params()?) } else { None };
        let mut parents = Vec::new();
        if self.eat("<") || self.eat_kw("extends") {
            loop {
                let ty = self.ty_atom()?;
                let args = if self.is_sym("(") {
                    self.bump();
                    let mut xs = Vec::new();
                    if !self.is_sym(")") {
                        loop {
                            xs.push(self.ident()?);
                            if !self.eat(",") {
                                break;
                            }
                        }
                    }
                    self.expect(")")?;
                    Some(xs)
                } else {
                    None
                };
                parents.push(RawParent { ty, args });
                if !self.eat(",") && !self.eat_kw("with") {
                    break;
                }
            }
        }
        let mut tdecls = Vec::new();
        let mut methods = Vec::new();
        if self.eat("{") {
            loop {
                while self.eat(";") {}
                if self.eat("}") {
                    break;
                }
                if self.is_kw("def") {
                    methods.push(self.method()?);
                } else if self.is_kw("type") {
                    tdecls.push(self.tdecl()?);
                } else {
                    return self.err(format!("expected `def`, `type` or `}}`, found {}", self.describe()));
                }
            }
        }
        Ok(RawClass { kind, name, span, tparams, vparams, parents, tdecls, methods })
    }

    fn tparams(&mut self) -> Result<Vec<TParam>> {
        self.expect("[")?;
        let mut out = Vec::new();
        loop {
            let name = self.ident()?;
            let bound = if self.eat("<:") { self.ty()? } else { Type::object() };
            out.push(TParam { name, bound });
            if !self.eat(",") {
                break;
            }
        }
        self.expect("]")?;
        Ok(out)
    }

    fn params(&mut self) -> Result<Vec<(Name, Type)>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if !self.is_sym(")") {
            loop {
                let x = self.ident()?;
                self.expect(":")?;
                out.push((x, self.ty()?));
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        Ok(out)
    }

    fn method(&mut self) -> Result<MethodDecl> {
        let span = self.span();
        self.expect_kw("def")?;
        let name = self.ident()?;
        let tparams = if self.is_sym("[") { self.tparams()? } else { Vec::new() };
        let params = if self.is_sym("(") { self.params()? } else { Vec::new() };
        self.expect(":")?;
        let result = self.ty()?;
        let body = if self.eat("=") { Some(self.expr()?) } else { None };
        Ok(MethodDecl { name, tparams, params, result, body, span })
    }

    fn tdecl(&mut self) -> Result<TypeDecl> {
        let span = self.span();
        self.expect_kw("type")?;
        let label = self.ident()?;
        if self.eat("=") {
            let t = self.ty()?;
            return Ok(TypeDecl { label, lower: t.clone(), upper: t, span });
        }
        let lower = if self.eat(">:") { self.ty()? } else { Type::nothing() };
        let upper = if self.eat("<:") { self.ty()? } else { Type::object() };
        Ok(TypeDecl { label, lower, upper, span })
    }

    fn ty(&mut self) -> Result<Type> {
        let mut t = self.ty_and()?;
        while self.eat("|") {
            t = Type::or(t, self.ty_and()?);
        }
        Ok(t)
    }

    fn ty_and(&mut self) -> Result<Type> {
        let mut t = self.ty_atom()?;
        while self.eat("&") {
            t = Type::and(t, self.ty_atom()?);
        }
        Ok(t)
    }

    fn ty_atom(&mut self) -> Result<Type> {
        if self.eat("(") {
            let t = self.ty()?;
            self.expect(")")?;
            return Ok(t);
        }
        let name = self.ident()?;
        if self.is_sym(".") {
            self.bump();
            let label = self.ident()?;
            return Ok(Type::Sel(name, label));
        }
        let mut args = Vec::new();
        if self.eat("[") {
            loop {
                args.push(self.ty()?);
                if !self.eat(",") {
                    break;
                }
            }
            self.expect("]")?;
        }
        Ok(Type::App(name, args))
    }

    fn targs(&mut self) -> Result<Vec<Type>> {
        let mut out = Vec::new();
        if self.eat("[") {
            loop {
                out.push(self.ty()?);
                if !self.eat(",") {
                    break;
                }
            }
            self.expect("]")?;
        }
        Ok(out)
    }

    fn args(&mut self) -> Result<Vec<Expr>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if !self.is_sym(")") {
            loop {
                out.push(self.expr()?);
                if !self.eat(",") {
                    break;
                }
            }
        }
        self.expect(")")?;
        Ok(out)
    }

    fn expr(&mut self) -> Result<Expr> {
        if self.eat_kw("if") {
            let c = self.expr()?;
            self.expect_kw("then")?;
            let a = self.expr()?;
            self.expect_kw("else")?;
            let b = self.expr()?;
            return Ok(Expr::If(Box::new(c), Box::new(a), Box::new(b)));
        }
        let mut e = self.primary()?;
        while self.eat(".") {
            let name = self.ident()?;
            if self.is_sym("[") || self.is_sym("(") {
                let targs = self.targs()?;
                let args = self.args()?;
                e = Expr::Call { recv: Box::new(e), method: name, targs, args };
            } else {
                e = Expr::Get(Box::new(e), name);
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<Expr> {
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        if self.eat("{") {
            return self.block();
        }
        if self.eat_kw("true") {
            return Ok(Expr::Bool(true));
        }
        if self.eat_kw("false") {
            return Ok(Expr::Bool(false));
        }
        if self.eat_kw("new") {
            let t = self.ty_atom()?;
            let args = if self.is_sym("(") { self.args()? } else { Vec::new() };
            return Ok(Expr::New(t, args));
        }
        let name = self.ident()?;
        if self.is_sym("(") || (self.is_sym("[") && self.is_call_after_targs()) {
            let targs = self.targs()?;
            let args = self.args()?;
            return Ok(Expr::Call { recv: Box::new(Expr::var(THIS)), method: name, targs, args });
        }
        Ok(Expr::Var(name))
    }

    // `m[T](..)` as an implicit-this call: the bracket group is followed by `(`.
    fn is_call_after_targs(&self) -> bool {
        let mut depth = 0usize;
        let mut k = 0;
        loop {
            match self.peek_at(k) {
                Tok::Sym("[") => depth += 1,
                Tok::Sym("]") => {
                    depth -= 1;
                    if depth == 0 {
                        return matches!(self.peek_at(k + 1), Tok::Sym("("));
                    }
                }
                Tok::Eof => return false,
                _ => {}
            }
            k += 1;
        }
    }

    fn block(&mut self) -> Result<Expr> {
        let mut vals = Vec::new();
        loop {
            while self.eat(";") {}
            if self.eat_kw("val") {
                let x = self.ident()?;
                let ann = if self.eat(":") { Some(self.ty()?) } else { None };
                self.expect("=")?;
                let e = self.expr()?;
                vals.push((x, ann, e));
            } else {
                break;
            }
        }
        let mut body = self.expr()?;
        while self.eat(";") {}
        self.expect("}")?;
        for (x, ann, e) in vals.into_iter().rev() {
            body = Expr::Block(x, ann, Box::new(e), Box::new(body));
        }
        Ok(body)
    }
}

#[derive(Default)]
struct Scope {
    class: HashSet<Name>,
    method: HashSet<Name>,
}

fn resolve_type(t: &Type, scope: &Scope, span: Span) -> Result<Type> {
    Ok(match t {
        Type::App(n, args) => {
            let bound_here = scope.method.contains(n) || scope.class.contains(n);
            if bound_here && !args.is_empty() {
                return Err(Diagnostic::new("PARSE", span, format!("type variable `{n}` cannot take arguments")));
            }
            if scope.method.contains(n) {
                Type::Var(n.clone(), Flavor::Method)
            } else if scope.class.contains(n) {
                Type::Var(n.clone(), Flavor::Class)
            } else {
                Type::App(n.clone(), args.iter().map(|a| resolve_type(a, scope, span)).collect::<Result<_>>()?)
            }
        }
        Type::And(a, b) => Type::and(resolve_type(a, scope, span)?, resolve_type(b, scope, span)?),
        Type::Or(a, b) => Type::or(resolve_type(a, scope, span)?, resolve_type(b, scope, span)?),
        Type::Var(..) | Type::Sel(..) => t.clone(),
    })
}

fn resolve_expr(e: &Expr, scope: &Scope, span: Span) -> Result<Expr> {
    let ty = |t: &Type| resolve_type(t, scope, span);
    let ex = |e: &Expr| resolve_expr(e, scope, span);
    Ok(match e {
        Expr::Var(_) | Expr::Bool(_) => e.clone(),
        Expr::Get(r, f) => Expr::Get(Box::new(ex(r)?), f.clone()),
        Expr::Invoke { recv, method, targs, args } => Expr::Invoke {
            recv: recv.clone(),
            method: method.clone(),
            targs: targs.iter().map(ty).collect::<Result<_>>()?,
            args: args.clone(),
        },
        Expr::Call { recv, method, targs, args } => Expr::Call {
            recv: Box::new(ex(recv)?),
            method: method.clone(),
            targs: targs.iter().map(ty).collect::<Result<_>>()?,
            args: args.iter().map(ex).collect::<Result<_>>()?,
        },
        Expr::New(t, args) => Expr::New(ty(t)?, args.iter().map(ex).collect::<Result<_>>()?),
        Expr::If(c, a, b) => Expr::If(Box::new(ex(c)?), Box::new(ex(a)?), Box::new(ex(b)?)),
        Expr::Block(x, ann, a, b) => {
            Expr::Block(x.clone(), ann.as_ref().map(ty).transpose()?, Box::new(ex(a)?), Box::new(ex(b)?))
        }
    })
}

fn build_program(raw: RawProgram, level: Level) -> Result<Program> {
    let kinds: IndexMap<Name, ClassKind> = raw.classes.iter().map(|c| (c.name.clone(), c.kind)).collect();
    let mut table = ClassTable::new(level);
    for rc in raw.classes {
        if table.classes.contains_key(&rc.name) {
            return Err(Diagnostic::new("PARSE", rc.span, format!("duplicate declaration of `{}`", rc.name)));
        }
        if [OBJECT, NOTHING, BOOLEAN].contains(&rc.name.as_str()) {
            return Err(Diagnostic::new("PARSE", rc.span, format!("`{}` is built in and cannot be redeclared", rc.name)));
        }
        let decl = build_class(rc, &kinds)?;
        table.classes.insert(decl.name.clone(), decl);
    }
    let (main, main_span) = match raw.main {
        Some((e, span)) => (Some(resolve_expr(&e, &Scope::default(), span)?), span),
        None => (None, Span::default()),
    };
    Ok(Program { table, main, main_span })
}

fn build_class(rc: RawClass, kinds: &IndexMap<Name, ClassKind>) -> Result<ClassDecl> {
    let class_scope = Scope { class: rc.tparams.iter().map(|p| p.name.clone()).collect(), method: HashSet::new() };
    let span = rc.span;
    let rty = |t: &Type, s: &Scope| resolve_type(t, s, span);
    let tparams = rc
        .tparams
        .iter()
        .map(|p| Ok(TParam { name: p.name.clone(), bound: rty(&p.bound, &class_scope)? }))
        .collect::<Result<Vec<_>>>()?;
    let is_trait_name = |t: &Type| matches!(t, Type::App(n, _) if kinds.get(n) == Some(&ClassKind::Trait));
    let mut parents: Vec<(Type, Option<Vec<Name>>)> = Vec::new();
    for p in &rc.parents {
        parents.push((rty(&p.ty, &class_scope)?, p.args.clone()));
    }
    let (parent, traits, vparams) = match rc.kind {
        ClassKind::Class => {
            let vparams = rc
                .vparams
                .unwrap_or_default()
                .iter()
                .map(|(x, t)| Ok((x.clone(), rty(t, &class_scope)?)))
                .collect::<Result<Vec<_>>>()?;
            if parents.is_empty() || is_trait_name(&parents[0].0) {
                // A class whose first parent is a trait extends Object.
                if let Some((_, Some(_))) = parents.first() {
                    return Err(Diagnostic::new("PARSE", span, "a trait parent cannot take constructor arguments"));
                }
                let traits = parents.into_iter().map(|(t, _)| t).collect();
                (Some((Type::object(), Vec::new())), traits, vparams)
            } else {
                let mut it = parents.into_iter();
                let (p, args) = it.next().unwrap();
                let mut traits = Vec::new();
                for (t, a) in it {
                    if a.is_some() {
                        return Err(Diagnostic::new("PARSE", span, "only the first parent may take constructor arguments"));
                    }
                    traits.push(t);
                }
                (Some((p, args.unwrap_or_default())), traits, vparams)
            }
        }
        ClassKind::Trait => {
            if rc.vparams.is_some() {
                return Err(Diagnostic::new("PARSE", span, "traits cannot have value parameters"));
            }
            let mut traits = Vec::new();
            for (t, a) in parents {
                if a.is_some() {
                    return Err(Diagnostic::new("PARSE", span, "trait parents cannot take constructor arguments"));
                }
                if !t.is_object() {
                    traits.push(t);
                }
            }
            (None, traits, Vec::new())
        }
    };
    let tdecls = rc
        .tdecls
        .iter()
        .map(|d| {
            Ok(TypeDecl {
                label: d.label.clone(),
                lower: resolve_type(&d.lower, &class_scope, d.span)?,
                upper: resolve_type(&d.upper, &class_scope, d.span)?,
                span: d.span,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut methods = Vec::new();
    for m in &rc.methods {
        let scope = Scope { class: class_scope.class.clone(), method: m.tparams.iter().map(|p| p.name.clone()).collect() };
        let r = |t: &Type| resolve_type(t, &scope, m.span);
        methods.push(MethodDecl {
            name: m.name.clone(),
            tparams: m.tparams.iter().map(|p| Ok(TParam { name: p.name.clone(), bound: r(&p.bound)? })).collect::<Result<_>>()?,
            params: m.params.iter().map(|(x, t)| Ok((x.clone(), r(t)?))).collect::<Result<_>>()?,
            result: r(&m.result)?,
            body: m.body.as_ref().map(|e| resolve_expr(e, &scope, m.span)).transpose()?,
            span: m.span,
        });
    }
    Ok(ClassDecl { kind: rc.kind, name: rc.name, tparams, vparams, parent, traits, tdecls, methods, span })
}

fn level_err(span: Span, what: &str, need: Level, have: Level) -> Diagnostic {
    Diagnostic::new("LEVEL", span, format!("{what} requires level {need} or above (program is {have})"))
}

fn check_type_level(t: &Type, level: Level, span: Span) -> Result<()> {
    match t {
        Type::Var(..) if level < Level::Fgj => Err(level_err(span, "type variables", Level::Fgj, level)),
        Type::Var(..) => Ok(()),
        Type::App(n, args) => {
            if !args.is_empty() && level < Level::Fgj {
                return Err(level_err(span, "type arguments", Level::Fgj, level));
            }
            if (n == NOTHING || n == BOOLEAN) && level < Level::Pls {
                return Err(level_err(span, &format!("`{n}`"), Level::Pls, level));
            }
            args.iter().try_for_each(|a| check_type_level(a, level, span))
        }
        Type::And(a, b) => {
            if level < Level::Ps {
                return Err(level_err(span, "intersection types", Level::Ps, level));
            }
            check_type_level(a, level, span)?;
            check_type_level(b, level, span)
        }
        Type::Or(a, b) => {
            if level < Level::Pls {
                return Err(level_err(span, "union types", Level::Pls, level));
            }
            check_type_level(a, level, span)?;
            check_type_level(b, level, span)
        }
        Type::Sel(..) if level < Level::Ds => Err(level_err(span, "type selections", Level::Ds, level)),
        Type::Sel(..) => Ok(()),
    }
}

fn check_expr_level(e: &Expr, level: Level, span: Span) -> Result<()> {
    match e {
        Expr::Var(_) => Ok(()),
        Expr::Get(r, _) => check_expr_level(r, level, span),
        Expr::Invoke { targs, .. } => targs.iter().try_for_each(|t| check_type_level(t, level, span)),
        Expr::Call { recv, targs, args, .. } => {
            targs.iter().try_for_each(|t| check_type_level(t, level, span))?;
            check_expr_level(recv, level, span)?;
            args.iter().try_for_each(|a| check_expr_level(a, level, span))
        }
        Expr::New(t, args) => {
            check_type_level(t, level, span)?;
            args.iter().try_for_each(|a| check_expr_level(a, level, span))
        }
        Expr::Bool(_) if level < Level::Pls => Err(level_err(span, "boolean literals", Level::Pls, level)),
        Expr::Bool(_) => Ok(()),
        Expr::If(c, a, b) => {
            if level < Level::Pls {
                return Err(level_err(span, "conditionals", Level::Pls, level));
            }
            check_expr_level(c, level, span)?;
            check_expr_level(a, level, span)?;
            check_expr_level(b, level, span)
        }
        Expr::Block(_, ann, a, b) => {
            if level < Level::Ds {
                return Err(level_err(span, "local blocks", Level::Ds, level));
            }
            if let Some(t) = ann {
                check_type_level(t, level, span)?;
            }
            check_expr_level(a, level, span)?;
            check_expr_level(b, level, span)
        }
    }
}

/// Rejects constructs that the program's level does not have.
pub fn check_level(p: &Program) -> Result<()> {
    let level = p.table.level;
    for c in p.table.classes.values() {
        if c.is_trait() && level < Level::Ps {
            return Err(level_err(c.span, "traits", Level::Ps, level));
        }
        if !c.traits.is_empty() && level < Level::Ps {
            return Err(level_err(c.span, "trait parents", Level::Ps, level));
        }
        if !c.tparams.is_empty() && level < Level::Fgj {
            return Err(level_err(c.span, "type parameters", Level::Fgj, level));
        }
        if !c.tdecls.is_empty() && level < Level::Ds {
            return Err(level_err(c.tdecls[0].span, "type members", Level::Ds, level));
        }
        for p in &c.tparams {
            check_type_level(&p.bound, level, c.span)?;
        }
        for (_, t) in &c.vparams {
            check_type_level(t, level, c.span)?;
        }
        if let Some((t, _)) = &c.parent {
            check_type_level(t, level, c.span)?;
        }
        for t in &c.traits {
            check_type_level(t, level, c.span)?;
        }
        for d in &c.tdecls {
            check_type_level(&d.lower, level, d.span)?;
            check_type_level(&d.upper, level, d.span)?;
        }
        for m in &c.methods {
            if !m.tparams.is_empty() && level < Level::Fgj {
                return Err(level_err(m.span, "method type parameters", Level::Fgj, level));
            }
            if m.body.is_none() && !c.is_trait() {
                return Err(Diagnostic::new("PARSE", m.span, format!("method `{}` of class `{}` needs a body", m.name, c.name)));
            }
            for p in &m.tparams {
                check_type_level(&p.bound, level, m.span)?;
            }
            for (_, t) in &m.params {
                check_type_level(t, level, m.span)?;
            }
            check_type_level(&m.result, level, m.span)?;
            if let Some(b) = &m.body {
                check_expr_level(b, level, m.span)?;
            }
        }
    }
    if let Some(e) = &p.main {
        check_expr_level(e, level, p.main_span)?;
    }
    Ok(())
}
