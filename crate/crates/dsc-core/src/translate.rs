//! Translation of checked source programs into DOT.
//!
//! The whole program becomes `let ct = {ct => ⟨CT⟩} in |e|`. The class table
//! object holds one type tag per class and one constructor `newC` per proper
//! class. The output depends on the calculus level: FJ has no tag
//! parameters, from FGJ on every method takes an `mtag` and every
//! constructor a `ctag` argument, and from PLS on the Boolean encoding is
//! part of the table.
//!
//! Naming: constructor parameters for a field `f` are `fparam`, fresh tag
//! variables at call sites are `$mtagN` and `$ctagN`. Conjunctions drop
//! `⊤` operands, and `C[]` translates to `ct.C` without a refinement.

use std::cell::Cell;

use crate::diag::Diagnostic;
use crate::dot::{DEnv, DTerm, DType, Decl};
use crate::subtyping::Algo;
use crate::syntax::*;
use crate::typing::{class_env, TypedProgram, Typer};

const CT: &str = "ct";
const MTAG: &str = "mtag";
const CTAG: &str = "ctag";

pub struct Translator<'a> {
    ct: &'a ClassTable,
    typer: Typer<'a>,
    mtags: Cell<usize>,
    ctags: Cell<usize>,
    renames: Cell<usize>,
}

fn and_all(items: Vec<DType>) -> DType {
    DType::and_all(items.into_iter().filter(|t| *t != DType::Top).collect())
}

/// DOT parameters and result of a method, with its source signature.
type DotSig = (Vec<(Name, DType)>, DType, crate::classtable::MethodSig);

fn field_param(f: &str) -> Name {
    format!("{f}param")
}

impl<'a> Translator<'a> {
    pub fn new(ct: &'a ClassTable) -> Translator<'a> {
        Translator { ct, typer: Typer::new(ct), mtags: Cell::new(0), ctags: Cell::new(0), renames: Cell::new(0) }
    }

    fn generic(&self) -> bool {
        self.ct.level >= Level::Fgj
    }

    fn fresh(&self, counter: &Cell<usize>, base: &str) -> Name {
        let n = counter.get();
        counter.set(n + 1);
        format!("${base}{n}")
    }

    /// `|T|`.
    pub fn ty(&self, t: &Type) -> DType {
        match t {
            Type::Var(x, Flavor::Class) => DType::sel(THIS, x),
            Type::Var(x, Flavor::Method) => DType::sel(MTAG, x),
            Type::App(c, _) if c == NOTHING => DType::Bot,
            Type::App(c, args) => {
                let base = DType::sel(CT, c);
                let ps = self.ct.tparams_of(c);
                if !self.generic() || ps.is_empty() {
                    return base;
                }
                let eqs = ps.iter().zip(args).map(|(p, a)| DType::alias(&p.name, self.ty(a))).collect();
                DType::and(base, DType::rec("_", DType::and_all(eqs)))
            }
            Type::And(a, b) => DType::and(self.ty(a), self.ty(b)),
            Type::Or(a, b) => DType::or(self.ty(a), self.ty(b)),
            Type::Sel(x, l) => DType::sel(x, l),
        }
    }

    /// `|X <: N|` with the given self variable (`this`, `mtag` or `ctag`).
    pub fn clause(&self, z: &str, ps: &[TParam]) -> DType {
        let mems = ps.iter().map(|p| DType::Mem(p.name.clone(), Box::new(DType::Bot), Box::new(self.ty(&p.bound)))).collect();
        DType::rec(z, DType::and_all(mems))
    }

    /// `|e|_Γ`.
    pub fn expr(&self, env: &TypeEnv, e: &Expr) -> Result<DTerm, Diagnostic> {
        let span = Span::default();
        Ok(match e {
            Expr::Var(x) => DTerm::var(x),
            Expr::Get(e0, f) => DTerm::call(self.expr(env, e0)?, f, Vec::new()),
            Expr::Invoke { recv, method, targs, args } => {
                let t0 = env.term(recv).cloned().ok_or_else(|| Diagnostic::new("TRANSLATE", span, format!("unknown `{recv}`")))?;
                let args = args.iter().map(|a| DTerm::var(a)).collect();
                self.call(env, Some(recv), &t0, DTerm::var(recv), method, targs, args)?
            }
            Expr::Call { recv, method, targs, args } => {
                let t0 = self.typer.type_expr(env, recv, span)?;
                let prefix = match &**recv {
                    Expr::Var(x) => Some(x.as_str()),
                    _ => None,
                };
                let r = self.expr(env, recv)?;
                let args = args.iter().map(|a| self.expr(env, a)).collect::<Result<Vec<_>, _>>()?;
                self.call(env, prefix, &t0, r, method, targs, args)?
            }
            Expr::New(n, args) => {
                let Type::App(c, targs) = n else {
                    return Err(Diagnostic::new("TRANSLATE", span, "`new` of a non-class type"));
                };
                if c == OBJECT {
                    return Ok(DTerm::empty());
                }
                let mut args = args.iter().map(|a| self.expr(env, a)).collect::<Result<Vec<_>, _>>()?;
                let ctor = format!("new{c}");
                if !self.generic() {
                    return Ok(DTerm::call(DTerm::var(CT), &ctor, args));
                }
                let tag = self.fresh(&self.ctags, CTAG);
                let eqs = self.ct.tparams_of(c).iter().zip(targs).map(|(p, v)| Decl::Tag(p.name.clone(), self.ty(v))).collect();
                args.insert(0, DTerm::var(&tag));
                DTerm::Let(tag, Box::new(DTerm::Obj("_".into(), eqs)), Box::new(DTerm::call(DTerm::var(CT), &ctor, args)))
            }
            Expr::Bool(b) => DTerm::call(DTerm::var(CT), if *b { "true" } else { "false" }, Vec::new()),
            Expr::If(c, a, b) => {
                // The tag carries the type of the whole conditional.
                let t = self.typer.type_expr(env, e, span)?;
                let tag = self.fresh(&self.mtags, MTAG);
                let obj = DTerm::Obj("_".into(), vec![Decl::Tag("A".into(), self.ty(&t))]);
                let call = DTerm::call(self.expr(env, c)?, "if", vec![DTerm::var(&tag), self.expr(env, a)?, self.expr(env, b)?]);
                DTerm::Let(tag, Box::new(obj), Box::new(call))
            }
            Expr::Block(x, ann, e1, e2) => {
                let s = match ann {
                    Some(t) => t.clone(),
                    None => self.typer.type_expr(env, e1, span)?,
                };
                let init = self.expr(env, e1)?;
                // Same renaming as the type checker, so the context binds
                // each name once.
                let (x, e2) = if env.has_term(x) || x == THIS {
                    let mut y;
                    loop {
                        let n = self.renames.get();
                        self.renames.set(n + 1);
                        y = format!("{x}${n}");
                        if !env.has_term(&y) {
                            break;
                        }
                    }
                    (y.clone(), e2.subst(&Subst::new().with_term(x, &y)))
                } else {
                    (x.clone(), (**e2).clone())
                };
                let body = self.expr(&env.with_term(&x, s), &e2)?;
                DTerm::Let(x, Box::new(init), Box::new(body))
            }
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn call(
        &self,
        env: &TypeEnv,
        prefix: Option<&str>,
        t0: &Type,
        recv: DTerm,
        m: &str,
        targs: &[Type],
        mut args: Vec<DTerm>,
    ) -> Result<DTerm, Diagnostic> {
        if !self.generic() {
            return Ok(DTerm::call(recv, m, args));
        }
        let span = Span::default();
        let b = Algo::new(self.ct, env)
            .bound(t0)
            .ok_or_else(|| Diagnostic::new("TRANSLATE", span, format!("no bound for receiver of `{m}`")))?;
        let sig = self
            .ct
            .mtype(prefix, m, &b)
            .ok_or_else(|| Diagnostic::new("TRANSLATE", span, format!("no method `{m}`")))?;
        let tag = self.fresh(&self.mtags, MTAG);
        let eqs = sig.tparams.iter().zip(targs).map(|(p, v)| Decl::Tag(p.name.clone(), self.ty(v))).collect();
        args.insert(0, DTerm::var(&tag));
        Ok(DTerm::Let(tag, Box::new(DTerm::Obj("_".into(), eqs)), Box::new(DTerm::call(recv, m, args))))
    }

    /// Signature of `m` as seen from `C[X]`, as DOT parameters and result.
    fn method_sig(&self, c: &ClassDecl, m: &str) -> Option<DotSig> {
        let sig = self.ct.mtype(Some(THIS), m, &c.self_type())?;
        let mut ps = Vec::new();
        if self.generic() {
            ps.push((MTAG.to_string(), self.clause(MTAG, &sig.tparams)));
        }
        ps.extend(sig.params.iter().map(|(x, t)| (x.clone(), self.ty(t))));
        let r = self.ty(&sig.result);
        Some((ps, r, sig))
    }

    /// `⟦m⟧_C`.
    pub fn method_type(&self, c: &ClassDecl, m: &str) -> Option<DType> {
        let (ps, r, _) = self.method_sig(c, m)?;
        Some(DType::Fun(m.to_string(), ps, Box::new(r)))
    }

    /// `⟨m⟩_C`, with the implementer's body renamed to the signature's binders.
    pub fn method_decl(&self, c: &ClassDecl, m: &str) -> Result<Decl, Diagnostic> {
        let span = c.span;
        let missing = || Diagnostic::new("TRANSLATE", span, format!("no implementation of `{m}` in `{}`", c.name));
        let (ps, r, sig) = self.method_sig(c, m).ok_or_else(missing)?;
        let body_decl = self.ct.mbody(m, &c.self_type()).ok_or_else(missing)?;
        let body = body_decl.body.clone().ok_or_else(missing)?;
        let mut s = Subst::new();
        for (a, b) in sig.tparams.iter().zip(&body_decl.tparams) {
            if a.name != b.name {
                s.types.insert(b.name.clone(), Type::Var(a.name.clone(), Flavor::Method));
            }
        }
        for ((x, _), (y, _)) in sig.params.iter().zip(&body_decl.params) {
            if x != y {
                s.terms.insert(y.clone(), x.clone());
            }
        }
        let body = body.subst(&s);
        let mut env = class_env(c).with_types(&sig.tparams);
        for (x, t) in &sig.params {
            env.push_term(x, t.clone());
        }
        let t = self.expr(&env, &body)?;
        Ok(Decl::Def(m.to_string(), ps.into_iter().map(|(x, t)| (x, Some(t))).collect(), Some(r), t))
    }

    /// `baseArgs(C)` as equalities `Z = |S|`, each base once.
    pub fn base_args(&self, n: &Type) -> Vec<(Name, DType)> {
        let mut out = Vec::new();
        if self.generic() {
            self.base_args_into(n, &mut out, 0);
        }
        out
    }

    fn base_args_into(&self, n: &Type, out: &mut Vec<(Name, DType)>, depth: usize) {
        if depth > 64 {
            return;
        }
        for p in self.ct.parents(n).unwrap_or_default() {
            let Type::App(b, args) = &p else { continue };
            let tps = self.ct.tparams_of(b);
            for (x, s) in tps.iter().zip(args) {
                let eq = (x.name.clone(), self.ty(s));
                if !out.contains(&eq) {
                    out.push(eq);
                }
            }
            let own = Type::App(b.clone(), tps.iter().map(|x| Type::Var(x.name.clone(), Flavor::Class)).collect());
            self.base_args_into(&own, out, depth + 1);
        }
    }

    /// `⟦C⟧`: getters, methods, base arguments and type members.
    pub fn body_type(&self, c: &ClassDecl) -> DType {
        let me = c.self_type();
        let mut items = Vec::new();
        for (f, t) in self.ct.vparams(&me).unwrap_or_default() {
            items.push(DType::Fun(f, Vec::new(), Box::new(self.ty(&t))));
        }
        for m in self.ct.mnames(&c.name) {
            items.extend(self.method_type(c, &m));
        }
        for (z, s) in self.base_args(&me) {
            items.push(DType::alias(&z, s));
        }
        for l in self.ct.tnames(&c.name) {
            if let Some((lo, hi)) = self.ct.ttype(THIS, &l, &me) {
                items.push(DType::Mem(l, Box::new(self.ty(&lo)), Box::new(self.ty(&hi))));
            }
        }
        and_all(items)
    }

    /// The type tag `C = ⋀ct.B ∧ {this ⇒ ⟦C⟧ ∧ X : ⊥ .. |N|}`.
    pub fn class_tag(&self, c: &ClassDecl) -> Decl {
        let me = c.self_type();
        let mut items: Vec<DType> = self
            .ct
            .parents(&me)
            .unwrap_or_default()
            .iter()
            .filter_map(|p| if let Type::App(b, _) = p { Some(DType::sel(CT, b)) } else { None })
            .collect();
        let mut body = vec![self.body_type(c)];
        body.extend(c.tparams.iter().map(|p| DType::Mem(p.name.clone(), Box::new(DType::Bot), Box::new(self.ty(&p.bound)))));
        let body = and_all(body);
        if body != DType::Top {
            items.push(DType::rec(THIS, body));
        }
        Decl::Tag(c.name.clone(), DType::and_all(items))
    }

    /// `⟨C⟩`: getters, methods, base arguments, then type members.
    pub fn class_decls(&self, c: &ClassDecl) -> Result<Vec<Decl>, Diagnostic> {
        let me = c.self_type();
        let mut ds = Vec::new();
        for (f, t) in self.ct.vparams(&me).unwrap_or_default() {
            ds.push(Decl::Def(f.clone(), Vec::new(), Some(self.ty(&t)), DTerm::var(&field_param(&f))));
        }
        for m in self.ct.mnames(&c.name) {
            ds.push(self.method_decl(c, &m)?);
        }
        for (z, s) in self.base_args(&me) {
            ds.push(Decl::Tag(z, s));
        }
        for l in self.ct.tnames(&c.name) {
            if let Some((_, hi)) = self.ct.ttype(THIS, &l, &me) {
                ds.push(Decl::Tag(l, self.ty(&hi)));
            }
        }
        Ok(ds)
    }

    /// `newC(ctag : |X <: N|, fparam : τ|U|) : τ|C[X]| = {this ⇒ ⟨C⟩^{τ|X|}}`
    /// with `τ = [ctag.X / this.X]`.
    pub fn constructor(&self, c: &ClassDecl) -> Result<Decl, Diagnostic> {
        let me = c.self_type();
        let tau = |t: DType| -> DType { c.tparams.iter().fold(t, |t, p| retarget(&t, &p.name)) };
        let mut ps = Vec::new();
        if self.generic() {
            ps.push((CTAG.to_string(), Some(self.clause(THIS, &c.tparams))));
        }
        for (f, t) in self.ct.vparams(&me).unwrap_or_default() {
            ps.push((field_param(&f), Some(tau(self.ty(&t)))));
        }
        let mut ds = self.class_decls(c)?;
        for p in &c.tparams {
            ds.push(Decl::Tag(p.name.clone(), DType::sel(CTAG, &p.name)));
        }
        let ret = tau(self.ty(&me));
        Ok(Decl::Def(format!("new{}", c.name), ps, Some(ret), DTerm::Obj(THIS.into(), ds)))
    }

    /// `⟨∅⟩`.
    pub fn builtins(&self) -> Vec<Decl> {
        let mut ds = vec![Decl::Tag(OBJECT.into(), DType::Top)];
        if self.ct.level >= Level::Pls {
            let a = DType::sel(MTAG, "A");
            let tag = DType::rec("_", DType::Mem("A".into(), Box::new(DType::Bot), Box::new(DType::Top)));
            let if_ty = DType::Fun(
                "if".into(),
                vec![(MTAG.into(), tag), ("t".into(), a.clone()), ("f".into(), a.clone())],
                Box::new(a),
            );
            ds.push(Decl::Tag(BOOLEAN.into(), if_ty));
            for (name, pick) in [("true", "t"), ("false", "f")] {
                let obj = DTerm::Obj(
                    "_".into(),
                    vec![Decl::Def("if".into(), vec![(MTAG.into(), None), ("t".into(), None), ("f".into(), None)], None, DTerm::var(pick))],
                );
                ds.push(Decl::Def(name.into(), Vec::new(), Some(DType::sel(CT, BOOLEAN)), obj));
            }
        }
        ds
    }

    /// `{ct ⇒ ⟨CT⟩}`.
    pub fn table(&self) -> Result<DTerm, Diagnostic> {
        let mut ds = self.builtins();
        for c in self.ct.classes.values() {
            ds.push(self.class_tag(c));
            if !c.is_trait() {
                ds.push(self.constructor(c)?);
            }
        }
        Ok(DTerm::Obj(CT.into(), ds))
    }

    /// `⟦CT⟧`, the type of the class table object.
    pub fn table_type(&self) -> Result<DType, Diagnostic> {
        let DTerm::Obj(_, ds) = self.table()? else { unreachable!() };
        Ok(DType::and_all(ds.iter().filter_map(decl_type).collect()))
    }

    /// `|Γ|` for contexts of term bindings: `ct : ⟦CT⟧, x : |T|`. Contexts
    /// with type variables are not supported.
    pub fn env(&self, env: &TypeEnv) -> Result<Option<DEnv>, Diagnostic> {
        let mut out = DEnv::new().with(CT, self.table_type()?);
        for b in &env.bindings {
            match b {
                Binding::Term(x, t) if x != THIS => out = out.with(x, self.ty(t)),
                _ => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

/// The declared type of a DOT declaration, when it is fully ascribed.
pub fn decl_type(d: &Decl) -> Option<DType> {
    match d {
        Decl::Tag(l, t) => Some(DType::alias(l, t.clone())),
        Decl::Def(m, ps, r, _) => {
            let ps = ps.iter().map(|(x, t)| t.clone().map(|t| (x.clone(), t))).collect::<Option<Vec<_>>>()?;
            Some(DType::Fun(m.clone(), ps, Box::new(r.clone()?)))
        }
    }
}

/// Replaces `this.X` by `ctag.X`, leaving selections under a rebinding of
/// `this` alone.
fn retarget(t: &DType, x: &str) -> DType {
    match t {
        DType::Sel(p, l) if p == THIS && l == x => DType::sel(CTAG, x),
        DType::Top | DType::Bot | DType::Sel(..) => t.clone(),
        DType::Mem(l, a, b) => DType::Mem(l.clone(), Box::new(retarget(a, x)), Box::new(retarget(b, x))),
        DType::And(a, b) => DType::and(retarget(a, x), retarget(b, x)),
        DType::Or(a, b) => DType::or(retarget(a, x), retarget(b, x)),
        DType::Rec(z, _) if z == THIS => t.clone(),
        DType::Rec(z, b) => DType::rec(z, retarget(b, x)),
        DType::Fun(m, ps, r) => {
            let mut shadowed = false;
            let mut out = Vec::new();
            for (y, p) in ps {
                out.push((y.clone(), if shadowed { p.clone() } else { retarget(p, x) }));
                shadowed |= y == THIS;
            }
            let r = if shadowed { (**r).clone() } else { retarget(r, x) };
            DType::Fun(m.clone(), out, Box::new(r))
        }
    }
}

/// `let ct = {ct ⇒ ⟨CT⟩} in |e|`, or just the table object without `main`.
pub fn translate_program(tp: &TypedProgram) -> Result<DTerm, Diagnostic> {
    let tr = Translator::new(&tp.program.table);
    let table = tr.table()?;
    match &tp.program.main {
        Some(e) => Ok(DTerm::Let(CT.into(), Box::new(table), Box::new(tr.expr(&TypeEnv::new(), e)?))),
        None => Ok(table),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dot::parse::{parse_term, parse_type};
    use crate::dot::{alpha_eq_term, alpha_eq_type, print};
    use crate::parser::parse_program;
    use crate::typing::check_program;

    fn translate(src: &str) -> DTerm {
        let tp = check_program(&parse_program(src, None).unwrap()).unwrap_or_else(|d| panic!("{d:?}"));
        translate_program(&tp).unwrap()
    }

    #[test]
    fn fj_table_matches_the_rules() {
        let src = "//level: FJ
class B(obj: Object) < Object {}
class C() < Object { def foo(): C = this }
class D() < C() { def bar(b: B): Object = b.obj }";
        let want = parse_term(
            "{ct =>
              Object = ⊤,
              B = ct.Object & {this => obj() : ct.Object},
              newB(objparam : ct.Object) : ct.B = {this => obj() : ct.Object = objparam},
              C = ct.Object & {this => foo() : ct.C},
              newC() : ct.C = {this => foo() : ct.C = this},
              D = ct.C & {this => (foo() : ct.C) & (bar(b : ct.B) : ct.Object)},
              newD() : ct.D = {this => foo() : ct.C = this, bar(b : ct.B) : ct.Object = b.obj()}}",
        )
        .unwrap();
        let got = translate(src);
        assert!(alpha_eq_term(&got, &want), "{}", print::term_pretty(&got));
    }

    #[test]
    fn fgj_types_and_base_args() {
        let src = "//level: FGJ
class C[X <: Object] < Object {}
class D[Y <: Object] < C[Y] {}";
        let p = parse_program(src, None).unwrap();
        let tr = Translator::new(&p.table);
        let t = tr.ty(&Type::App("C".into(), vec![Type::object()]));
        assert!(alpha_eq_type(&t, &parse_type("ct.C & {_ => X = ct.Object}").unwrap()));
        let d = p.table.get("D").unwrap();
        assert_eq!(tr.base_args(&d.self_type()), vec![("X".to_string(), DType::sel("this", "Y"))]);
        let Decl::Tag(_, tag) = tr.class_tag(d) else { panic!() };
        assert!(alpha_eq_type(&tag, &parse_type("ct.C & {this => (X = this.Y) & (Y : ⊥ .. ct.Object)}").unwrap()));
        let ctor = tr.constructor(d).unwrap();
        let want = parse_term(
            "{ct => newD(ctag : {this => Y : ⊥ .. ct.Object}) : ct.D & {_ => Y = ctag.Y} = {this => X = this.Y, Y = ctag.Y}}",
        )
        .unwrap();
        assert!(alpha_eq_term(&DTerm::Obj("ct".into(), vec![ctor]), &want));
    }

    #[test]
    fn object_and_booleans() {
        let t = translate("//level: PLS\nmain = new Object()");
        let DTerm::Let(_, table, body) = t else { panic!() };
        assert_eq!(*body, DTerm::empty());
        let DTerm::Obj(_, ds) = *table else { panic!() };
        let labels: Vec<&str> = ds.iter().map(|d| d.label()).collect();
        assert_eq!(labels, ["Object", "Boolean", "true", "false"]);
    }

    #[test]
    fn conditionals_carry_their_type() {
        let t = translate("//level: PLS\nclass A {}\nclass B {}\nmain = if true then new A() else new B()");
        let DTerm::Let(_, _, body) = t else { panic!() };
        let want = parse_term(
            "let $mtag0 = {_ => A = ct.A | ct.B} in ct.true().if($mtag0, let $ctag0 = {_ => } in ct.newA($ctag0), let $ctag1 = {_ => } in ct.newB($ctag1))",
        )
        .unwrap();
        assert!(alpha_eq_term(&body, &want), "{}", print::term_str(&body));
    }

    #[test]
    fn diamond_bodies_are_copied_from_the_implementer() {
        let src = "//level: PS
trait Base { def foo(): Object = new Object() }
trait Sub1 < Base { def foo(): Object = new Object() }
trait Sub2 < Base { def foo(): Object = this }
class A < Object, Sub1, Sub2 {}";
        let p = check_program(&parse_program(src, None).unwrap()).unwrap().program;
        let tr = Translator::new(&p.table);
        let ds = tr.class_decls(p.table.get("A").unwrap()).unwrap();
        let foo: Vec<&Decl> = ds.iter().filter(|d| d.label() == "foo").collect();
        assert_eq!(foo.len(), 1);
        assert!(matches!(foo[0], Decl::Def(_, _, _, DTerm::Var(x)) if x == "this"));
    }

    #[test]
    fn retargeting_respects_rebinding() {
        let t = parse_type("this.X & {this => this.X} & m(this : ⊤) : this.X").unwrap();
        let want = parse_type("ctag.X & {this => this.X} & m(this : ⊤) : this.X").unwrap();
        assert_eq!(retarget(&t, "X"), want);
    }
}
