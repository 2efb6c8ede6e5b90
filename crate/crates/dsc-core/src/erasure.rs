//! Erasure of the Pathless Scala fragment into FJD.
//!
//! Types erase to class names, intersections through a pluggable
//! `erasedGlb` policy. A method `m` declared in `E` becomes `mE` in FJD.
//! Calls are renamed after the first class declaring `m` in the
//! linearization of the erased receiver, and every proper class gets bridge
//! methods forwarding each inherited `mE` to its implementer. Casts are
//! inserted wherever the erased static type is not already a subtype of the
//! expected one.

use std::fmt;
use std::str::FromStr;

use crate::diag::Diagnostic;
use crate::fjd::{self, FClass, FExpr, FKind, FMethod, FjdProgram};
use crate::subtyping::Algo;
use crate::syntax::*;
use crate::typing::{class_env, Typer};

const RULE: &str = "ERASE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErasurePolicy {
    /// Java: the left operand.
    JavaFirst,
    /// Scala 3: proper classes over traits, then subtypes, then name order.
    Scala3,
    /// Proper classes over traits, then longer linearizations, then name
    /// order.
    BaseCount,
}

impl ErasurePolicy {
    pub const ALL: [ErasurePolicy; 3] = [ErasurePolicy::JavaFirst, ErasurePolicy::Scala3, ErasurePolicy::BaseCount];
}

impl FromStr for ErasurePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "java" | "javafirst" => Ok(ErasurePolicy::JavaFirst),
            "scala3" => Ok(ErasurePolicy::Scala3),
            "basecount" => Ok(ErasurePolicy::BaseCount),
            _ => Err(format!("unknown policy `{s}` (expected java, scala3 or basecount)")),
        }
    }
}

impl fmt::Display for ErasurePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErasurePolicy::JavaFirst => "java",
            ErasurePolicy::Scala3 => "scala3",
            ErasurePolicy::BaseCount => "basecount",
        })
    }
}

/// `mC`.
pub fn mangle(m: &str, c: &str) -> Name {
    format!("{m}{c}")
}

fn err(msg: impl Into<String>) -> Diagnostic {
    Diagnostic::new(RULE, Span::default(), msg)
}

/// Nominal subtyping between class names.
pub fn name_sub(ct: &ClassTable, a: &str, b: &str) -> bool {
    a == b || b == OBJECT || ct.ancestor_names(a).contains(b)
}

fn lin_len(ct: &ClassTable, c: &str) -> usize {
    match ct.get(c) {
        Some(d) => ct.linearize(&d.self_type()).map_or(0, |l| l.len()),
        None => 1,
    }
}

/// `erasedGlb(t1, t2)`; always one of its arguments.
pub fn erased_glb(policy: ErasurePolicy, ct: &ClassTable, t1: &str, t2: &str) -> Name {
    let pick = |first: bool| if first { t1.to_string() } else { t2.to_string() };
    if policy == ErasurePolicy::JavaFirst || t1 == t2 {
        return t1.to_string();
    }
    let (c1, c2) = (ct.is_proper_class(t1), ct.is_proper_class(t2));
    if c1 != c2 {
        return pick(c1);
    }
    match policy {
        ErasurePolicy::Scala3 => {
            if name_sub(ct, t1, t2) {
                return pick(true);
            }
            if name_sub(ct, t2, t1) {
                return pick(false);
            }
        }
        ErasurePolicy::BaseCount => {
            let (l1, l2) = (lin_len(ct, t1), lin_len(ct, t2));
            if l1 != l2 {
                return pick(l1 > l2);
            }
        }
        ErasurePolicy::JavaFirst => unreachable!(),
    }
    pick(t1 <= t2)
}

/// `|T|_Γ`. Intersections fold in source association.
pub fn erase_type(policy: ErasurePolicy, ct: &ClassTable, env: &TypeEnv, t: &Type) -> Result<Name, Diagnostic> {
    erase_type_guarded(policy, ct, env, t, 0)
}

fn erase_type_guarded(policy: ErasurePolicy, ct: &ClassTable, env: &TypeEnv, t: &Type, depth: usize) -> Result<Name, Diagnostic> {
    if depth > 64 {
        return Err(err(format!("cyclic bound while erasing {}", type_str(t))));
    }
    match t {
        Type::Var(x, _) => {
            let b = env.tvar(x).ok_or_else(|| err(format!("unbound type variable {x}")))?;
            erase_type_guarded(policy, ct, env, b, depth + 1)
        }
        Type::App(c, _) if c == NOTHING || c == BOOLEAN => Err(err(format!("`{c}` is outside the erasable fragment"))),
        Type::App(c, _) => Ok(c.clone()),
        Type::And(a, b) => {
            let ea = erase_type_guarded(policy, ct, env, a, depth + 1)?;
            let eb = erase_type_guarded(policy, ct, env, b, depth + 1)?;
            Ok(erased_glb(policy, ct, &ea, &eb))
        }
        Type::Or(..) | Type::Sel(..) => Err(err(format!("`{}` is outside the erasable fragment", type_str(t)))),
    }
}

fn type_str(t: &Type) -> String {
    crate::parser::pretty::type_str(t)
}

/// `erasedReceiver(m, T)`.
pub fn erased_receiver(ct: &ClassTable, env: &TypeEnv, m: &str, t: &Type) -> Result<Name, Diagnostic> {
    erased_receiver_guarded(ct, env, m, t, 0)
}

fn erased_receiver_guarded(ct: &ClassTable, env: &TypeEnv, m: &str, t: &Type, depth: usize) -> Result<Name, Diagnostic> {
    if depth > 64 {
        return Err(err(format!("cyclic bound looking up {m}")));
    }
    let defines = |t: &Type| Algo::new(ct, env).bound(t).is_some_and(|b| ct.mtype(None, m, &b).is_some());
    match t {
        Type::Var(x, _) => {
            let b = env.tvar(x).ok_or_else(|| err(format!("unbound type variable {x}")))?;
            erased_receiver_guarded(ct, env, m, b, depth + 1)
        }
        Type::App(c, _) if defines(t) => Ok(c.clone()),
        Type::And(a, b) if defines(a) => erased_receiver_guarded(ct, env, m, a, depth + 1),
        Type::And(_, b) if defines(b) => erased_receiver_guarded(ct, env, m, b, depth + 1),
        _ => Err(err(format!("no method `{m}` in {}", type_str(t)))),
    }
}

/// The first class in the linearization of `c` that declares `m`; calls
/// on a receiver erased to `c` go to `m` mangled with this name.
pub fn declaring_class(ct: &ClassTable, c: &str, m: &str) -> Option<Name> {
    let d = ct.get(c)?;
    ct.linearize(&d.self_type())?.into_iter().find_map(|n| match n {
        Type::App(e, _) if ct.get(&e).is_some_and(|x| x.method(m).is_some()) => Some(e),
        _ => None,
    })
}

pub struct Eraser<'a> {
    ct: &'a ClassTable,
    policy: ErasurePolicy,
    typer: Typer<'a>,
    /// Erased signatures, later also the bodies.
    out: FjdProgram,
}

impl<'a> Eraser<'a> {
    /// Erases every declaration's signature so bodies can be erased
    /// against the final FJD table.
    pub fn new(policy: ErasurePolicy, ct: &'a ClassTable) -> Result<Eraser<'a>, Diagnostic> {
        let mut er = Eraser { ct, policy, typer: Typer::new(ct), out: FjdProgram::default() };
        for d in ct.classes.values() {
            let c = er.signatures(d)?;
            er.out.classes.insert(d.name.clone(), c);
        }
        Ok(er)
    }

    pub fn ty(&self, env: &TypeEnv, t: &Type) -> Result<Name, Diagnostic> {
        erase_type(self.policy, self.ct, env, t)
    }

    fn method_env(&self, d: &ClassDecl, md: &MethodDecl) -> TypeEnv {
        let mut env = class_env(d).with_types(&md.tparams);
        for (x, t) in &md.params {
            env.push_term(x, t.clone());
        }
        env
    }

    fn signatures(&self, d: &ClassDecl) -> Result<FClass, Diagnostic> {
        let env = class_env(d);
        let mut methods = Vec::new();
        for md in &d.methods {
            let menv = self.method_env(d, md);
            let params =
                md.params.iter().map(|(x, t)| Ok((self.ty(&menv, t)?, x.clone()))).collect::<Result<Vec<_>, Diagnostic>>()?;
            methods.push(FMethod { result: self.ty(&menv, &md.result)?, name: mangle(&md.name, &d.name), params, body: None });
        }
        let supers = |ts: &[Type]| ts.iter().map(|t| self.ty(&env, t)).collect::<Result<Vec<_>, _>>();
        if d.is_trait() {
            return Ok(FClass {
                kind: FKind::Interface,
                name: d.name.clone(),
                parent: None,
                interfaces: supers(&d.traits)?,
                fields: Vec::new(),
                methods,
            });
        }
        let (parent, forwarded) = match &d.parent {
            Some((p, gs)) => (self.ty(&env, p)?, gs.clone()),
            None => (OBJECT.to_string(), Vec::new()),
        };
        let fields = d
            .vparams
            .iter()
            .filter(|(f, _)| !forwarded.contains(f))
            .map(|(f, t)| Ok((self.ty(&env, t)?, f.clone())))
            .collect::<Result<Vec<_>, Diagnostic>>()?;
        Ok(FClass {
            kind: FKind::Class,
            name: d.name.clone(),
            parent: Some(parent),
            interfaces: supers(&d.traits)?,
            fields,
            methods,
        })
    }

    fn fenv(&self, env: &TypeEnv) -> Result<fjd::Env, Diagnostic> {
        env.bindings
            .iter()
            .filter_map(|b| match b {
                Binding::Term(x, t) => Some(self.ty(env, t).map(|c| (x.clone(), c))),
                Binding::Types(_) => None,
            })
            .collect()
    }

    /// `|e|^T_Γ`: a cast unless the erased type is already below `target`.
    pub fn expr_at(&self, env: &TypeEnv, e: &Expr, target: &str) -> Result<FExpr, Diagnostic> {
        let e2 = self.expr(env, e)?;
        let s = self.out.type_of(&self.fenv(env)?, &e2).map_err(err)?;
        Ok(if self.out.sub(&s, target) { e2 } else { FExpr::cast(target, e2) })
    }

    fn source_type(&self, env: &TypeEnv, e: &Expr) -> Result<Type, Diagnostic> {
        self.typer.type_expr(env, e, Span::default())
    }

    /// `|e|_Γ`.
    pub fn expr(&self, env: &TypeEnv, e: &Expr) -> Result<FExpr, Diagnostic> {
        match e {
            Expr::Var(x) => Ok(FExpr::var(x)),
            Expr::Get(e0, f) => {
                let t0 = self.source_type(env, e0)?;
                let mut c = self.ty(env, &t0)?;
                if self.ct.is_trait(&c) {
                    // Traits have no fields; use the proper class in the bound.
                    let b = Algo::new(self.ct, env).bound(&t0).unwrap_or(t0.clone());
                    c = b
                        .and_operands()
                        .into_iter()
                        .find_map(|o| match o {
                            Type::App(n, _) if !self.ct.is_trait(n) => Some(n.clone()),
                            _ => None,
                        })
                        .ok_or_else(|| err(format!("no class declares field `{f}`")))?;
                }
                Ok(FExpr::Field(Box::new(self.expr_at(env, e0, &c)?), f.clone()))
            }
            Expr::Invoke { recv, method, args, .. } => {
                let args: Vec<Expr> = args.iter().map(|a| Expr::var(a)).collect();
                self.call(env, &Expr::var(recv), method, &args)
            }
            Expr::Call { recv, method, args, .. } => self.call(env, recv, method, args),
            Expr::New(n, args) => {
                let c = self.ty(env, n)?;
                let fs = self.out.fields(&c);
                if fs.len() != args.len() {
                    return Err(err(format!("new {c}: expected {} arguments", fs.len())));
                }
                let args = args.iter().zip(&fs).map(|(a, (t, _))| self.expr_at(env, a, t)).collect::<Result<_, _>>()?;
                Ok(FExpr::New(c, args))
            }
            Expr::Bool(_) | Expr::If(..) | Expr::Block(..) => Err(err("booleans, conditionals and blocks are outside the erasable fragment")),
        }
    }

    fn call(&self, env: &TypeEnv, recv: &Expr, m: &str, args: &[Expr]) -> Result<FExpr, Diagnostic> {
        let t0 = self.source_type(env, recv)?;
        let c = erased_receiver(self.ct, env, m, &t0)?;
        let e = declaring_class(self.ct, &c, m).ok_or_else(|| err(format!("no declaration of `{m}` above {c}")))?;
        let name = mangle(m, &e);
        let (ps, _) = self.out.mtype(&name, &c).ok_or_else(|| err(format!("{c} has no method {name}")))?;
        if ps.len() != args.len() {
            return Err(err(format!("{name}: expected {} arguments", ps.len())));
        }
        let r = self.expr_at(env, recv, &c)?;
        let args = args.iter().zip(&ps).map(|(a, p)| self.expr_at(env, a, p)).collect::<Result<_, _>>()?;
        Ok(FExpr::Call(Box::new(r), name, args))
    }

    /// `bridges(m, C[X])` for a proper class.
    pub fn bridges(&self, d: &ClassDecl, m: &str) -> Vec<FMethod> {
        let me = d.self_type();
        let Some(Type::App(imp, _)) = self.ct.mimpl(m, &me) else { return Vec::new() };
        let target = mangle(m, &imp);
        let Some((us, u0)) = self.out.get(&imp).and_then(|c| c.method(&target)).map(FMethod::signature) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for e in self.preorder(&d.name) {
            if e == imp {
                continue;
            }
            let name = mangle(m, &e);
            let Some(decl) = self.out.get(&e).and_then(|c| c.method(&name)) else { continue };
            let args = decl
                .params
                .iter()
                .zip(&us)
                .map(|((t, x), u)| if t == u { FExpr::var(x) } else { FExpr::cast(u, FExpr::var(x)) })
                .collect();
            let mut body = FExpr::Call(Box::new(FExpr::var(THIS)), target.clone(), args);
            if !self.out.sub(&u0, &decl.result) {
                body = FExpr::cast(&decl.result, body);
            }
            out.push(FMethod { body: Some(body), ..decl.clone() });
        }
        out
    }

    /// Ancestors of `c` in declaration order, depth first, each once.
    fn preorder(&self, c: &str) -> Vec<Name> {
        let mut out = Vec::new();
        let mut stack = vec![c.to_string()];
        while let Some(x) = stack.pop() {
            if out.contains(&x) {
                continue;
            }
            if let Some(d) = self.ct.get(&x) {
                let ps = d.parent.iter().map(|(p, _)| p).chain(&d.traits);
                let names: Vec<Name> = ps.filter_map(|t| if let Type::App(n, _) = t { Some(n.clone()) } else { None }).collect();
                stack.extend(names.into_iter().rev());
            }
            out.push(x);
        }
        out
    }

    fn erase_bodies(&mut self) -> Result<(), Diagnostic> {
        let mut bodies = Vec::new();
        for d in self.ct.classes.values() {
            let mut ms = Vec::new();
            for md in &d.methods {
                let env = self.method_env(d, md);
                let name = mangle(&md.name, &d.name);
                let sig = self.out.classes[&d.name].method(&name).unwrap().clone();
                let body = match &md.body {
                    Some(b) => Some(self.expr_at(&env, b, &sig.result)?),
                    None => None,
                };
                ms.push(FMethod { body, ..sig });
            }
            if !d.is_trait() {
                for m in self.ct.mnames(&d.name) {
                    for b in self.bridges(d, &m) {
                        if !ms.iter().any(|x| x.name == b.name) {
                            ms.push(b);
                        }
                    }
                }
            }
            bodies.push((d.name.clone(), ms));
        }
        for (c, ms) in bodies {
            self.out.classes[&c].methods = ms;
        }
        Ok(())
    }

    fn finish(mut self, dedup: bool) -> Result<FjdProgram, Diagnostic> {
        self.erase_bodies()?;
        if dedup {
            self.out = dedup_bridges(&self.out);
        }
        Ok(self.out)
    }
}

/// Drops bridges identical to the method a class inherits under the same
/// name.
pub fn dedup_bridges(p: &FjdProgram) -> FjdProgram {
    let mut out = p.clone();
    for (c, d) in &p.classes {
        if d.kind != FKind::Class {
            continue;
        }
        let keep: Vec<FMethod> = d
            .methods
            .iter()
            .filter(|md| {
                let inherited = d.parent.as_deref().and_then(|par| {
                    p.ancestors(par).into_iter().find_map(|a| {
                        let x = p.get(&a)?;
                        (x.kind == FKind::Class).then(|| x.method(&md.name).cloned()).flatten()
                    })
                });
                inherited.as_ref() != Some(*md) || !is_bridge(md)
            })
            .cloned()
            .collect();
        out.classes[c].methods = keep;
    }
    out
}

fn is_bridge(md: &FMethod) -> bool {
    matches!(&md.body, Some(FExpr::Call(r, _, _)) if **r == FExpr::var(THIS))
        || matches!(&md.body, Some(FExpr::Cast(_, b)) if matches!(&**b, FExpr::Call(r, _, _) if **r == FExpr::var(THIS)))
}

/// Erases a checked table (ER-CLASS, ER-TRAIT, ER-METHOD).
pub fn erase_table(policy: ErasurePolicy, ct: &ClassTable, dedup: bool) -> Result<FjdProgram, Diagnostic> {
    Eraser::new(policy, ct)?.finish(dedup)
}

/// Erases a checked program, including its main expression.
pub fn erase_program(policy: ErasurePolicy, p: &Program, dedup: bool) -> Result<FjdProgram, Diagnostic> {
    let er = Eraser::new(policy, &p.table)?;
    let main = match &p.main {
        Some(e) => Some(er.expr(&TypeEnv::new(), e)?),
        None => None,
    };
    let mut out = er.finish(dedup)?;
    out.main = main;
    Ok(out)
}
