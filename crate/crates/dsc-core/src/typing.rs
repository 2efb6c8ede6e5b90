//! Expression typing, method and class checking, and override validation.
//!
//! Wherever a rule asks for `S <: T` the checker uses algorithmic
//! subtyping. Rule names in diagnostics follow the calculus level of the
//! table (`GT-` for FGJ, `PT-` for PS and PLS, `DT-` for DS).

use std::cell::Cell;
use std::collections::HashSet;

use crate::classtable::MethodSig;
use crate::diag::Diagnostic;
use crate::parser::desugar::desugar_program;
use crate::parser::pretty::type_str;
use crate::parser::check_level;
use crate::subtyping::avoid::promote;
use crate::subtyping::Algo;
use crate::syntax::*;

/// A checked program. At DS level the program is stored desugared.
#[derive(Clone, Debug)]
pub struct TypedProgram {
    pub program: Program,
    pub main_type: Option<Type>,
}

pub type Diags = Vec<Diagnostic>;

/// Rule-code prefix for a calculus level.
fn prefix(level: Level) -> &'static str {
    match level {
        Level::Fj => "T",
        Level::Fgj => "GT",
        Level::Ps | Level::Pls => "PT",
        Level::Ds => "DT",
    }
}

pub struct Typer<'a> {
    pub ct: &'a ClassTable,
    fresh: Cell<usize>,
}

impl<'a> Typer<'a> {
    pub fn new(ct: &'a ClassTable) -> Typer<'a> {
        Typer { ct, fresh: Cell::new(0) }
    }

    fn rule(&self, name: &str) -> String {
        format!("{}-{}", prefix(self.ct.level), name)
    }

    fn sub(&self, env: &TypeEnv, s: &Type, t: &Type) -> bool {
        Algo::new(self.ct, env).sub(s, t)
    }

    fn wf(&self, env: &TypeEnv, t: &Type, span: Span) -> Result<(), Diagnostic> {
        if !env.pwf(t) {
            return Err(Diagnostic::new("WF", span, format!("type {} mentions unbound variables", type_str(t))));
        }
        Algo::new(self.ct, env)
            .wf(t)
            .map_err(|m| Diagnostic::new("WF", span, m).with_judgment(format!("⊢ {} wf", type_str(t))))
    }

    fn bound(&self, env: &TypeEnv, t: &Type, rule: &str, span: Span) -> Result<Type, Diagnostic> {
        if t.is_nothing() {
            return Err(Diagnostic::new(rule, span, "member selection on a receiver of type Nothing"));
        }
        Algo::new(self.ct, env)
            .bound(t)
            .ok_or_else(|| Diagnostic::new(rule, span, format!("no class bound for {}", type_str(t))))
    }

    /// `Γ ⊢ e : T`. Spans point at the enclosing declaration.
    pub fn type_expr(&self, env: &TypeEnv, e: &Expr, span: Span) -> Result<Type, Diagnostic> {
        match e {
            Expr::Var(x) => env
                .term(x)
                .cloned()
                .ok_or_else(|| Diagnostic::new(&self.rule("VAR"), span, format!("unknown variable `{x}`"))),
            Expr::Get(e0, f) => {
                let rule = self.rule("GETTER");
                let t0 = self.type_expr(env, e0, span)?;
                let b = self.bound(env, &t0, &rule, span)?;
                let ps = self
                    .ct
                    .vparams(&b)
                    .ok_or_else(|| Diagnostic::new(&rule, span, format!("vparams undefined on {}", type_str(&b))))?;
                ps.into_iter()
                    .find(|(g, _)| g == f)
                    .map(|(_, t)| t)
                    .ok_or_else(|| Diagnostic::new(&rule, span, format!("{} has no field `{f}`", type_str(&t0))))
            }
            Expr::Call { recv, method, targs, args } => {
                let t0 = self.type_expr(env, recv, span)?;
                let prefix = match &**recv {
                    Expr::Var(x) => Some(x.as_str()),
                    _ => None,
                };
                let ts = args.iter().map(|a| self.type_expr(env, a, span)).collect::<Result<Vec<_>, _>>()?;
                let names: Option<Vec<Name>> =
                    args.iter().map(|a| if let Expr::Var(x) = a { Some(x.clone()) } else { None }).collect();
                self.invoke(env, prefix, &t0, method, targs, &ts, names.as_deref(), span)
            }
            Expr::Invoke { recv, method, targs, args } => {
                let t0 = self.type_expr(env, &Expr::Var(recv.clone()), span)?;
                let ts = args.iter().map(|a| self.type_expr(env, &Expr::Var(a.clone()), span)).collect::<Result<Vec<_>, _>>()?;
                self.invoke(env, Some(recv), &t0, method, targs, &ts, Some(args), span)
            }
            Expr::New(n, args) => {
                let rule = self.rule("NEW");
                let Type::App(c, _) = n else {
                    return Err(Diagnostic::new(&rule, span, format!("cannot instantiate {}", type_str(n))));
                };
                if !self.ct.is_proper_class(c) || c == BOOLEAN {
                    return Err(Diagnostic::new(&rule, span, format!("`{c}` is not an instantiable class")));
                }
                self.wf(env, n, span)?;
                let ps = self.ct.vparams(n).unwrap_or_default();
                if ps.len() != args.len() {
                    return Err(Diagnostic::new(
                        &rule,
                        span,
                        format!("`new {}` expects {} argument(s), got {}", type_str(n), ps.len(), args.len()),
                    ));
                }
                for ((f, t), a) in ps.iter().zip(args) {
                    let s = self.type_expr(env, a, span)?;
                    if !self.sub(env, &s, t) {
                        return Err(Diagnostic::new(&rule, span, format!("argument `{f}` of `new {}`", type_str(n)))
                            .with_judgment(format!("{} <: {}", type_str(&s), type_str(t))));
                    }
                }
                Ok(n.clone())
            }
            Expr::Bool(_) => Ok(Type::boolean()),
            Expr::If(c, a, b) => {
                let t0 = self.type_expr(env, c, span)?;
                if !self.sub(env, &t0, &Type::boolean()) {
                    return Err(Diagnostic::new("LT-COND", span, "condition is not a Boolean")
                        .with_judgment(format!("{} <: Boolean", type_str(&t0))));
                }
                let t1 = self.type_expr(env, a, span)?;
                let t2 = self.type_expr(env, b, span)?;
                Ok(Type::or(t1, t2))
            }
            Expr::Block(x, ann, e1, e2) => {
                let s1 = self.type_expr(env, e1, span)?;
                let s = match ann {
                    Some(t) => {
                        self.wf(env, t, span)?;
                        if !self.sub(env, &s1, t) {
                            return Err(Diagnostic::new("DT-BLOCK", span, format!("initializer of `{x}` does not conform"))
                                .with_judgment(format!("{} <: {}", type_str(&s1), type_str(t))));
                        }
                        t.clone()
                    }
                    None => s1,
                };
                // Shadowed binders are renamed so the context binds each name once.
                let (x, e2) = if env.has_term(x) || x == THIS {
                    let y = self.fresh_name(x, env);
                    (y.clone(), e2.subst(&Subst::new().with_term(x, &y)))
                } else {
                    (x.clone(), (**e2).clone())
                };
                let inner = env.with_term(&x, s);
                let t = self.type_expr(&inner, &e2, span)?;
                promote(&Algo::new(self.ct, &inner), &t, &x).ok_or_else(|| {
                    Diagnostic::new("DT-BLOCK", span, format!("cannot avoid `{x}` in {}", type_str(&t)))
                })
            }
        }
    }

    fn fresh_name(&self, x: &str, env: &TypeEnv) -> Name {
        loop {
            let n = self.fresh.get();
            self.fresh.set(n + 1);
            let y = format!("{x}${n}");
            if !env.has_term(&y) {
                return y;
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn invoke(
        &self,
        env: &TypeEnv,
        prefix: Option<&str>,
        t0: &Type,
        m: &str,
        targs: &[Type],
        arg_types: &[Type],
        arg_names: Option<&[Name]>,
        span: Span,
    ) -> Result<Type, Diagnostic> {
        let rule = self.rule("INVK");
        let b = self.bound(env, t0, &rule, span)?;
        let sig = self
            .ct
            .mtype(prefix, m, &b)
            .ok_or_else(|| Diagnostic::new(&rule, span, format!("no method `{m}` in {}", type_str(t0))))?;
        if sig.tparams.len() != targs.len() {
            return Err(Diagnostic::new(
                &rule,
                span,
                format!("`{m}` expects {} type argument(s), got {}", sig.tparams.len(), targs.len()),
            ));
        }
        if sig.params.len() != arg_types.len() {
            return Err(Diagnostic::new(
                &rule,
                span,
                format!("`{m}` expects {} argument(s), got {}", sig.params.len(), arg_types.len()),
            ));
        }
        let mut s = Subst::types(sig.tparams.iter().map(|p| &p.name).zip(targs));
        match arg_names {
            Some(names) => {
                for ((x, _), y) in sig.params.iter().zip(names) {
                    if x != y {
                        s.terms.insert(x.clone(), y.clone());
                    }
                }
            }
            None => {
                let params: HashSet<&Name> = sig.params.iter().map(|(x, _)| x).collect();
                let dependent = sig.params.iter().map(|(_, t)| t).chain([&sig.result]).any(|t| t.term_vars().iter().any(|v| params.contains(v)));
                if dependent || prefix.is_none() && mentions_this(&sig) {
                    return Err(Diagnostic::new(&rule, span, format!("dependent call to `{m}` needs variable arguments")));
                }
            }
        }
        for (t, p) in targs.iter().zip(&sig.tparams) {
            self.wf(env, t, span)?;
            let bnd = p.bound.subst(&s);
            if !self.sub(env, t, &bnd) {
                return Err(Diagnostic::new(&rule, span, format!("type argument of `{m}` violates its bound"))
                    .with_judgment(format!("{} <: {}", type_str(t), type_str(&bnd))));
            }
        }
        for ((x, u), a) in sig.params.iter().zip(arg_types) {
            let u = u.subst(&s);
            if !self.sub(env, a, &u) {
                return Err(Diagnostic::new(&rule, span, format!("argument `{x}` of `{m}` does not conform"))
                    .with_judgment(format!("{} <: {}", type_str(a), type_str(&u))));
            }
        }
        Ok(sig.result.subst(&s))
    }

    /// `override(m, N, P)`: equal parameters up to renaming, covariant result.
    pub fn check_override(&self, env: &TypeEnv, m: &str, n: &Type, p: &Type) -> Result<(), String> {
        let Some(sp) = self.ct.mtype(Some(THIS), m, p) else { return Ok(()) };
        let Some(sn) = self.ct.mtype(Some(THIS), m, n) else { return Ok(()) };
        let Some(aligned) = sn.align(&sp) else {
            return Err(format!(
                "`{m}` in {} does not match the parameters of `{m}` in {}",
                type_str(n),
                type_str(p)
            ));
        };
        let mut inner = env.with_types(&sn.tparams);
        for (x, u) in &sn.params {
            inner.push_term(x, u.clone());
        }
        if self.sub(&inner, &sn.result, &aligned.result) {
            Ok(())
        } else {
            Err(format!(
                "result of `{m}` in {} is not a subtype of the result in {}: {} <: {} fails",
                type_str(n),
                type_str(p),
                type_str(&sn.result),
                type_str(&aligned.result)
            ))
        }
    }

    /// `isValid(m)` for a method name of `C`: the implementer (or first
    /// declaring base type) overrides every other declaration, and concrete
    /// overrides share a base type declaring `m`.
    pub fn check_method_valid(&self, env: &TypeEnv, c: &ClassDecl, m: &str) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let me = c.self_type();
        let Some(lin) = self.ct.linearize(&me) else { return out };
        let implementer = self.ct.mimpl(m, &me).or_else(|| lin.iter().find(|b| self.ct.declares(b, m)).cloned());
        let Some(n) = implementer else { return out };
        let n_concrete = self.ct.declares_concrete(&n, m);
        for p in lin.iter().filter(|p| **p != n && self.ct.declares(p, m)) {
            if let Err(msg) = self.check_override(env, m, &n, p) {
                out.push(Diagnostic::new("OVERRIDE", c.span, msg));
            }
            if n_concrete && self.ct.declares_concrete(p, m) && !self.common_declaring_base(&n, p, m) {
                out.push(Diagnostic::new(
                    "NO-ACCIDENTAL-OVERRIDE",
                    c.span,
                    format!(
                        "`{m}` in {} cannot override a concrete member of {} without a common base type declaring `{m}`",
                        type_str(&n),
                        type_str(p)
                    ),
                ));
            }
        }
        out
    }

    fn common_declaring_base(&self, n: &Type, p: &Type, m: &str) -> bool {
        let (Some(ln), Some(lp)) = (self.ct.linearize(n), self.ct.linearize(p)) else { return false };
        ln.iter().any(|b| lp.contains(b) && self.ct.declares(b, m))
    }

    /// `isValid(L)` for a type-member label of `C`.
    pub fn check_tmember_valid(&self, env: &TypeEnv, c: &ClassDecl, l: &str) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let me = c.self_type();
        let Some((s1, s2)) = self.ct.ttype(THIS, l, &me) else { return out };
        for p in self.ct.linearize(&me).unwrap_or_default() {
            if let Some((t1, t2)) = self.ct.ttype(THIS, l, &p) {
                if !(self.sub(env, &t1, &s1) && self.sub(env, &s2, &t2)) {
                    out.push(Diagnostic::new(
                        "OVERRIDE",
                        c.span,
                        format!("type member `{l}` in `{}` widens the bounds declared in {}", c.name, type_str(&p)),
                    ).with_judgment(format!(
                        "{} <: {}, {} <: {}",
                        type_str(&t1),
                        type_str(&s1),
                        type_str(&s2),
                        type_str(&t2)
                    )));
                }
            }
        }
        if !c.is_trait() && !self.sub(env, &s1, &s2) {
            out.push(
                Diagnostic::new(&self.rule("CLASS"), c.span, format!("type member `{l}` has bounds with no instance"))
                    .with_judgment(format!("{} <: {}", type_str(&s1), type_str(&s2))),
            );
        }
        out
    }

    /// `Γ ⊢ m ok` for a method declared in `c`.
    pub fn check_method(&self, c: &ClassDecl, m: &MethodDecl) -> Vec<Diagnostic> {
        let rule = self.rule("METHOD");
        let mut out = Vec::new();
        let gamma = class_env(c);
        let mut delta = gamma.with_types(&m.tparams);
        for p in &m.tparams {
            if let Err(d) = self.wf(&delta, &p.bound, m.span) {
                out.push(d);
            }
        }
        let mut seen = HashSet::new();
        for (x, u) in &m.params {
            if !seen.insert(x) || x == THIS {
                out.push(Diagnostic::new(&rule, m.span, format!("parameter name `{x}` is not allowed here")));
            }
            if let Err(d) = self.wf(&delta, u, m.span) {
                out.push(d);
            }
            delta.push_term(x, u.clone());
        }
        if let Err(d) = self.wf(&delta, &m.result, m.span) {
            out.push(d);
        }
        if !out.is_empty() {
            return out;
        }
        if let Some(body) = &m.body {
            match self.type_expr(&delta, body, m.span) {
                Ok(e0) => {
                    if !self.sub(&delta, &e0, &m.result) {
                        out.push(
                            Diagnostic::new(&rule, m.span, format!("body of `{}` does not conform to its result type", m.name))
                                .with_judgment(format!("{} <: {}", type_str(&e0), type_str(&m.result))),
                        );
                    }
                }
                Err(d) => out.push(d),
            }
        }
        for q in self.ct.parents(&c.self_type()).unwrap_or_default() {
            if let Err(msg) = self.check_override(&gamma, &m.name, &c.self_type(), &q) {
                out.push(Diagnostic::new("OVERRIDE", m.span, msg));
            }
        }
        out
    }

    /// `⊢ C ok`. Assumes the table has no inheritance cycles.
    pub fn check_class(&self, c: &ClassDecl) -> Vec<Diagnostic> {
        let rule = self.rule(if c.is_trait() && self.ct.level >= Level::Ps { "TRAIT" } else { "CLASS" });
        let mut out = Vec::new();
        let me = c.self_type();
        if self.ct.linearize(&me).is_none() {
            out.push(Diagnostic::new(
                &rule,
                c.span,
                format!("linearization of `{}` is undefined: a base class is inherited with different type arguments", c.name),
            ));
            return out;
        }
        let tenv = TypeEnv::new().with_types(&c.tparams);
        let gamma = class_env(c);
        for p in &c.tparams {
            if let Err(d) = self.wf(&tenv, &p.bound, c.span) {
                out.push(d);
            }
        }
        for (_, t) in &c.vparams {
            if let Err(d) = self.wf(&tenv, t, c.span) {
                out.push(d);
            }
        }
        if let Some((p, _)) = &c.parent {
            if let Err(d) = self.wf(&tenv, p, c.span) {
                out.push(d);
            } else if matches!(p, Type::App(pc, _) if !self.ct.is_proper_class(pc) || pc == BOOLEAN) {
                out.push(Diagnostic::new(&rule, c.span, format!("parent {} is not a proper class", type_str(p))));
            }
        }
        for q in &c.traits {
            if let Err(d) = self.wf(&tenv, q, c.span) {
                out.push(d);
            } else if matches!(q, Type::App(qc, _) if !self.ct.is_trait(qc)) {
                out.push(Diagnostic::new(&rule, c.span, format!("{} is not a trait", type_str(q))));
            }
        }
        for td in &c.tdecls {
            for t in [&td.lower, &td.upper] {
                if let Err(d) = self.wf(&gamma, t, td.span) {
                    out.push(d);
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        if !c.is_trait() {
            out.extend(self.check_ctor(c, &rule));
        }
        for m in &c.methods {
            out.extend(self.check_method(c, m));
        }
        if self.ct.level >= Level::Ps {
            if !c.is_trait() {
                let (_, abs) = self.ct.mnames_split(&c.name);
                if !abs.is_empty() {
                    out.push(Diagnostic::new(
                        &rule,
                        c.span,
                        format!("mnames_abs({}) = {{{}}} must be empty in a proper class", c.name, abs.join(", ")),
                    ));
                }
            }
            for m in self.ct.mnames(&c.name) {
                out.extend(self.check_method_valid(&gamma, c, &m));
            }
        }
        for l in self.ct.tnames(&c.name) {
            out.extend(self.check_tmember_valid(&gamma, c, &l));
        }
        dedup(out)
    }

    /// `vparams(P) = g : U` for the arguments passed to the parent constructor.
    fn check_ctor(&self, c: &ClassDecl, rule: &str) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let (parent, gs) = match &c.parent {
            Some((p, gs)) => (p.clone(), gs.clone()),
            None => (Type::object(), Vec::new()),
        };
        let pv = self.ct.vparams(&parent).unwrap_or_default();
        let mut names = HashSet::new();
        for (f, _) in &c.vparams {
            if !names.insert(f) {
                out.push(Diagnostic::new(rule, c.span, format!("duplicate field `{f}`")));
            }
        }
        let ok = pv.len() == gs.len()
            && c.vparams.len() >= gs.len()
            && pv.iter().zip(&gs).zip(&c.vparams).all(|(((pf, pt), g), (f, t))| pf == g && g == f && pt == t);
        if !ok {
            let want: Vec<String> = pv.iter().map(|(f, t)| format!("{f}: {}", type_str(t))).collect();
            out.push(Diagnostic::new(
                rule,
                c.span,
                format!(
                    "`{}` must start with the parent's fields ({}) and pass them to {}",
                    c.name,
                    want.join(", "),
                    type_str(&parent)
                ),
            ));
        }
        out
    }

    /// Class type parameters must be globally unique so that the DOT
    /// encoding can name them as members without clashes.
    fn check_unique_tparams(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut owner: std::collections::HashMap<&str, &str> = std::collections::HashMap::new();
        for c in self.ct.classes.values() {
            for p in &c.tparams {
                match owner.get(p.name.as_str()) {
                    Some(o) => out.push(Diagnostic::new(
                        "UNIQUE-TVAR",
                        c.span,
                        format!("type parameter `{}` of `{}` is already used by `{o}`", p.name, c.name),
                    )),
                    None => {
                        owner.insert(&p.name, &c.name);
                    }
                }
            }
        }
        out
    }

    /// Every class, in table order. Stops after cycle errors.
    pub fn check_table(&self) -> Diags {
        let mut out = Vec::new();
        for c in self.ct.classes.values() {
            if self.ct.has_cycle(&c.name) {
                out.push(Diagnostic::new(&self.rule("CT"), c.span, format!("inheritance cycle through `{}`", c.name)));
            }
        }
        if !out.is_empty() {
            return out;
        }
        out.extend(self.check_unique_tparams());
        for c in self.ct.classes.values() {
            out.extend(self.check_class(c));
        }
        out
    }
}

fn mentions_this(sig: &MethodSig) -> bool {
    sig.params.iter().map(|(_, t)| t).chain([&sig.result]).any(|t| t.mentions_term(THIS))
}

/// `Γ = X <: N, this : C[X]`.
pub fn class_env(c: &ClassDecl) -> TypeEnv {
    TypeEnv::new().with_types(&c.tparams).with_term(THIS, c.self_type())
}

fn dedup(ds: Vec<Diagnostic>) -> Vec<Diagnostic> {
    let mut out: Vec<Diagnostic> = Vec::new();
    for d in ds {
        if !out.iter().any(|o| o.rule == d.rule && o.message == d.message) {
            out.push(d);
        }
    }
    out
}

/// Level gate, desugaring at DS, table checks, then `main` in the empty context.
pub fn check_program(p: &Program) -> Result<TypedProgram, Diags> {
    check_level(p).map_err(|d| vec![d])?;
    let program = if p.table.level == Level::Ds { desugar_program(p) } else { p.clone() };
    let typer = Typer::new(&program.table);
    let mut diags = typer.check_table();
    if !diags.is_empty() {
        return Err(diags);
    }
    let main_type = match &program.main {
        Some(e) => match typer.type_expr(&TypeEnv::new(), e, program.main_span) {
            Ok(t) => Some(t),
            Err(d) => {
                diags.push(d);
                return Err(diags);
            }
        },
        None => None,
    };
    Ok(TypedProgram { program, main_type })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_env, parse_expr, parse_program, parse_type};

    fn check(src: &str) -> Result<TypedProgram, Diags> {
        check_program(&parse_program(src, None).unwrap())
    }

    fn rules(src: &str) -> Vec<String> {
        match check(src) {
            Ok(_) => Vec::new(),
            Err(ds) => ds.into_iter().map(|d| d.rule).collect(),
        }
    }

    #[test]
    fn fj_program_types() {
        let src = "//level: FJ
            class B() < Object {}
            class C(b: B) < Object { def get(): B = this.b }
            main = new C(new B()).get()";
        assert_eq!(check(src).unwrap().main_type, Some(Type::class("B")));
    }

    #[test]
    fn reabstraction_is_rejected() {
        let src = "//level: PS
            trait Base { def foo(): Object = new Object }
            trait Sub < Base { def foo(): Object }
            class A < Object, Sub {}";
        let ds = check(src).unwrap_err();
        assert!(ds.iter().any(|d| d.message.contains("mnames_abs(A) = {foo}")), "{ds:?}");
        let ok = "//level: PS
            trait Base { def foo(): Object = new Object }
            trait Sub < Base { def foo(): Object }
            class B < Object, Base, Sub {}";
        assert!(check(ok).is_ok());
    }

    #[test]
    fn accidental_override() {
        let bad = "//level: PS
            class One {}; class Two {}
            trait Base { def foo(): Object }
            trait Sub1 < Base { def foo(): Object = new One }
            trait Unrelated { def foo(): Object }
            trait Sub2 < Unrelated { def foo(): Object = new Two }
            class A < Object, Sub1, Sub2";
        assert!(rules(bad).contains(&"NO-ACCIDENTAL-OVERRIDE".to_string()));
        let good = "//level: PS
            class One {}; class Two {}
            trait Base { def foo(): Object }
            trait Sub1 < Base { def foo(): Object = new One }
            trait Sub2 < Base { def foo(): Object = new Two }
            class A < Object, Sub1, Sub2";
        assert!(rules(good).is_empty());
    }

    #[test]
    fn intersection_and_union_selection() {
        let ct = parse_program("class A {}; class B {}; trait L { def foo(): A }; trait R { def foo(): B }", None).unwrap().table;
        let t = Typer::new(&ct);
        let env = parse_env("x : L & R, y : L | R").unwrap();
        let e = parse_expr("x.foo()", Level::Pls).unwrap();
        assert_eq!(t.type_expr(&env, &e, Span::default()), Ok(parse_type("A & B", &env).unwrap()));
        let e = parse_expr("y.foo()", Level::Pls).unwrap();
        assert!(t.type_expr(&env, &e, Span::default()).is_err());
    }

    #[test]
    fn conditional_is_a_union() {
        let src = "//level: PLS
            class A {}; class B {}
            main = if true then new A() else new B()";
        assert_eq!(check(src).unwrap().main_type, Some(Type::or(Type::class("A"), Type::class("B"))));
    }

    #[test]
    fn transitivity_through_member_is_rejected() {
        let bad = "trait A[S <: Object, T <: Object] { type M >: S <: T; def id(x: S): T = x }";
        assert!(rules(bad).contains(&"DT-METHOD".to_string()));
        let good = "trait A[S <: Object, T <: Object] {
            type M >: S <: T
            def conv(x: S): this.M = x
            def id(x: S): T = conv(x) }";
        assert!(check(good).is_ok(), "{:?}", check(good).err());
    }

    #[test]
    fn dependent_method_call() {
        let src = "class X; trait HasA { type A >: Nothing <: Object }
            class HasX < HasA { type A >: X <: X }
            class Foo {
              def foo(hasA: HasA, a: hasA.A): hasA.A = a
              def bar(hasX: HasX, x: X): X = foo(hasX, x) }";
        assert!(check(src).is_ok(), "{:?}", check(src).err());
    }

    #[test]
    fn cycles_are_reported() {
        assert!(rules("class A < B {}; class B < A {}").iter().any(|r| r == "DT-CT"));
    }

    #[test]
    fn widening_type_member_is_rejected() {
        let src = "class X; trait P { type L >: Nothing <: X }; trait Q < P { type L >: Nothing <: Object }";
        assert!(rules(src).contains(&"OVERRIDE".to_string()));
    }

    #[test]
    fn block_result_avoids_binder() {
        let src = "class C[Y] { def c(): Object = new Object }
            class A { type M >: Object <: Object }
            main = { val x = new A(); new C[x.M]() }";
        let tp = check(src).unwrap();
        assert_eq!(tp.main_type, Some(Type::App("C".into(), vec![Type::object()])));
    }
}
