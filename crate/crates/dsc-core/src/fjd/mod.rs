//! FJD: Featherweight Java with interfaces, default methods and casts.
//! This is the erasure target. Types are bare class names.
//!
//! The typing rules are reconstructed in the usual FJ style: nominal
//! subtyping through `extends`/`implements`, overrides with identical
//! signatures, and casts that always type-check to their target.

pub mod eval;
pub mod parse;
pub mod print;

use std::collections::HashSet;

use indexmap::IndexMap;

pub use crate::syntax::Name;

pub const OBJECT: &str = "Object";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FExpr {
    Var(Name),
    Field(Box<FExpr>, Name),
    Call(Box<FExpr>, Name, Vec<FExpr>),
    New(Name, Vec<FExpr>),
    Cast(Name, Box<FExpr>),
}

impl FExpr {
    pub fn var(x: &str) -> FExpr {
        FExpr::Var(x.to_string())
    }

    pub fn cast(c: &str, e: FExpr) -> FExpr {
        FExpr::Cast(c.to_string(), Box::new(e))
    }

    /// `new C(v̄)` with value arguments.
    pub fn is_value(&self) -> bool {
        matches!(self, FExpr::New(_, args) if args.iter().all(FExpr::is_value))
    }

    pub fn subst(&self, s: &[(Name, FExpr)]) -> FExpr {
        match self {
            FExpr::Var(x) => s.iter().find(|(y, _)| y == x).map_or_else(|| self.clone(), |(_, v)| v.clone()),
            FExpr::Field(e, f) => FExpr::Field(Box::new(e.subst(s)), f.clone()),
            FExpr::Call(e, m, args) => FExpr::Call(Box::new(e.subst(s)), m.clone(), args.iter().map(|a| a.subst(s)).collect()),
            FExpr::New(c, args) => FExpr::New(c.clone(), args.iter().map(|a| a.subst(s)).collect()),
            FExpr::Cast(c, e) => FExpr::Cast(c.clone(), Box::new(e.subst(s))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FMethod {
    pub result: Name,
    pub name: Name,
    /// `(type, name)` pairs, Java order.
    pub params: Vec<(Name, Name)>,
    /// `None` for an abstract interface method.
    pub body: Option<FExpr>,
}

impl FMethod {
    pub fn signature(&self) -> (Vec<Name>, Name) {
        (self.params.iter().map(|(t, _)| t.clone()).collect(), self.result.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FKind {
    Class,
    Interface,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FClass {
    pub kind: FKind,
    pub name: Name,
    /// Superclass of a proper class.
    pub parent: Option<Name>,
    pub interfaces: Vec<Name>,
    /// Own fields as `(type, name)`; the constructor takes inherited fields
    /// first and passes them to `super`.
    pub fields: Vec<(Name, Name)>,
    pub methods: Vec<FMethod>,
}

impl FClass {
    pub fn method(&self, m: &str) -> Option<&FMethod> {
        self.methods.iter().find(|d| d.name == m)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FjdProgram {
    pub classes: IndexMap<Name, FClass>,
    pub main: Option<FExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FjdError {
    pub class: Option<Name>,
    pub msg: String,
}

impl std::fmt::Display for FjdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.class {
            Some(c) => write!(f, "in {c}: {}", self.msg),
            None => write!(f, "{}", self.msg),
        }
    }
}

impl std::error::Error for FjdError {}

pub type Env = Vec<(Name, Name)>;

impl FjdProgram {
    pub fn get(&self, c: &str) -> Option<&FClass> {
        self.classes.get(c)
    }

    pub fn exists(&self, c: &str) -> bool {
        c == OBJECT || self.classes.contains_key(c)
    }

    fn is_class(&self, c: &str) -> bool {
        c == OBJECT || self.get(c).is_some_and(|d| d.kind == FKind::Class)
    }

    fn supers(&self, c: &str) -> Vec<Name> {
        match self.get(c) {
            Some(d) => d.parent.iter().chain(&d.interfaces).cloned().collect(),
            None => Vec::new(),
        }
    }

    /// `C <: D`, reflexive and transitive; every name is below `Object`.
    pub fn sub(&self, c: &str, d: &str) -> bool {
        if c == d || d == OBJECT {
            return true;
        }
        let mut seen = HashSet::new();
        let mut todo = vec![c.to_string()];
        while let Some(x) = todo.pop() {
            if x == d {
                return true;
            }
            if seen.insert(x.clone()) {
                todo.extend(self.supers(&x));
            }
        }
        false
    }

    /// All fields of a class, inherited first.
    pub fn fields(&self, c: &str) -> Vec<(Name, Name)> {
        let mut chain = Vec::new();
        let mut cur = Some(c.to_string());
        while let Some(x) = cur {
            if chain.contains(&x) {
                break;
            }
            let d = self.get(&x);
            cur = d.and_then(|d| d.parent.clone());
            chain.push(x);
        }
        chain.iter().rev().filter_map(|x| self.get(x)).flat_map(|d| d.fields.clone()).collect()
    }

    /// Superclass chain starting at `c`, then interfaces depth-first in
    /// declaration order, each once.
    pub fn ancestors(&self, c: &str) -> Vec<Name> {
        let mut classes = Vec::new();
        let mut cur = Some(c.to_string());
        while let Some(x) = cur {
            if classes.contains(&x) || !self.exists(&x) {
                break;
            }
            cur = self.get(&x).and_then(|d| d.parent.clone());
            classes.push(x);
        }
        let mut out = classes.clone();
        for x in &classes {
            let mut stack: Vec<Name> = self.get(x).map(|d| d.interfaces.iter().rev().cloned().collect()).unwrap_or_default();
            while let Some(i) = stack.pop() {
                if out.contains(&i) {
                    continue;
                }
                stack.extend(self.get(&i).map(|d| d.interfaces.iter().rev().cloned().collect::<Vec<_>>()).unwrap_or_default());
                out.push(i);
            }
        }
        out
    }

    /// The first declaration of `m` visible from `c`.
    pub fn mdecl(&self, m: &str, c: &str) -> Option<(&FClass, &FMethod)> {
        self.ancestors(c).iter().find_map(|a| {
            let d = self.get(a)?;
            d.method(m).map(|md| (d, md))
        })
    }

    pub fn mtype(&self, m: &str, c: &str) -> Option<(Vec<Name>, Name)> {
        self.mdecl(m, c).map(|(_, d)| d.signature())
    }

    /// Concrete method selected for a receiver of runtime class `c`: the
    /// class chain first, then the most specific interface default.
    pub fn resolve(&self, m: &str, c: &str) -> Result<&FMethod, String> {
        let anc = self.ancestors(c);
        for a in &anc {
            let Some(d) = self.get(a) else { continue };
            if d.kind == FKind::Class {
                if let Some(md) = d.method(m) {
                    return md.body.as_ref().map(|_| md).ok_or_else(|| format!("{a}.{m} has no body"));
                }
            }
        }
        let defaults: Vec<(&str, &FMethod)> = anc
            .iter()
            .filter_map(|a| {
                let d = self.get(a)?;
                let md = d.method(m)?;
                (d.kind == FKind::Interface && md.body.is_some()).then_some((a.as_str(), md))
            })
            .collect();
        // Drop defaults overridden by a more specific interface; the
        // first declared survivor wins.
        let best = defaults.iter().find(|(i, _)| defaults.iter().all(|(j, _)| j == i || !self.sub(j, i)));
        match best {
            Some((_, md)) => Ok(md),
            None => Err(format!("no implementation of {m} in {c}")),
        }
    }

    /// Surviving defaults of `m` for `c` when the class chain has none.
    fn default_conflict(&self, m: &str, c: &str) -> Option<(Name, Name)> {
        let anc = self.ancestors(c);
        if anc.iter().any(|a| self.get(a).is_some_and(|d| d.kind == FKind::Class && d.method(m).is_some())) {
            return None;
        }
        let defaults: Vec<&Name> = anc
            .iter()
            .filter(|a| self.get(a).and_then(|d| d.method(m)).is_some_and(|md| md.body.is_some()))
            .collect();
        let maximal: Vec<&&Name> = defaults.iter().filter(|i| defaults.iter().all(|j| j == *i || !self.sub(j, i))).collect();
        (maximal.len() > 1).then(|| (maximal[0].to_string(), maximal[1].to_string()))
    }

    /// Static type of an expression.
    pub fn type_of(&self, env: &Env, e: &FExpr) -> Result<Name, String> {
        match e {
            FExpr::Var(x) => {
                env.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t.clone()).ok_or_else(|| format!("unbound variable {x}"))
            }
            FExpr::Field(e0, f) => {
                let c = self.type_of(env, e0)?;
                self.fields(&c).into_iter().find(|(_, g)| g == f).map(|(t, _)| t).ok_or_else(|| format!("{c} has no field {f}"))
            }
            FExpr::Call(e0, m, args) => {
                let c = self.type_of(env, e0)?;
                let (ps, r) = self.mtype(m, &c).ok_or_else(|| format!("{c} has no method {m}"))?;
                if ps.len() != args.len() {
                    return Err(format!("{m} expects {} arguments, got {}", ps.len(), args.len()));
                }
                for (a, p) in args.iter().zip(&ps) {
                    let t = self.type_of(env, a)?;
                    if !self.sub(&t, p) {
                        return Err(format!("argument of type {t} is not a {p} in call to {m}"));
                    }
                }
                Ok(r)
            }
            FExpr::New(c, args) => {
                if !self.is_class(c) {
                    return Err(format!("cannot instantiate {c}"));
                }
                let fs = self.fields(c);
                if fs.len() != args.len() {
                    return Err(format!("new {c} expects {} arguments, got {}", fs.len(), args.len()));
                }
                for (a, (t, f)) in args.iter().zip(&fs) {
                    let s = self.type_of(env, a)?;
                    if !self.sub(&s, t) {
                        return Err(format!("argument for {f} has type {s}, expected {t}"));
                    }
                }
                Ok(c.clone())
            }
            FExpr::Cast(c, e0) => {
                if !self.exists(c) {
                    return Err(format!("unknown class {c}"));
                }
                self.type_of(env, e0)?;
                Ok(c.clone())
            }
        }
    }

    fn has_cycle(&self, c: &str) -> bool {
        self.supers(c).iter().any(|p| self.sub(p, c))
    }

    fn check_class(&self, d: &FClass) -> Result<(), String> {
        let known = |t: &str| if self.exists(t) { Ok(()) } else { Err(format!("unknown class {t}")) };
        match d.kind {
            FKind::Class => {
                let p = d.parent.as_deref().unwrap_or(OBJECT);
                known(p)?;
                if !self.is_class(p) {
                    return Err(format!("superclass {p} is an interface"));
                }
            }
            FKind::Interface => {
                if d.parent.is_some() || !d.fields.is_empty() {
                    return Err("interfaces have neither a superclass nor fields".into());
                }
            }
        }
        for i in &d.interfaces {
            known(i)?;
            if self.is_class(i) {
                return Err(format!("{i} is not an interface"));
            }
        }
        if self.has_cycle(&d.name) {
            return Err("inheritance cycle".into());
        }
        let inherited = d.parent.as_deref().map(|p| self.fields(p)).unwrap_or_default();
        let mut seen: HashSet<&str> = inherited.iter().map(|(_, f)| f.as_str()).collect();
        for (t, f) in &d.fields {
            known(t)?;
            if !seen.insert(f) {
                return Err(format!("duplicate field {f}"));
            }
        }
        let mut names = HashSet::new();
        for md in &d.methods {
            if !names.insert(&md.name) {
                return Err(format!("duplicate method {}", md.name));
            }
            known(&md.result)?;
            for (t, _) in &md.params {
                known(t)?;
            }
            // Overrides keep the exact signature.
            for s in self.supers(&d.name) {
                if let Some(sig) = self.mtype(&md.name, &s) {
                    if sig != md.signature() {
                        return Err(format!("{} does not match the signature it overrides in {s}", md.name));
                    }
                }
            }
            match &md.body {
                Some(body) => {
                    let mut env: Env = vec![("this".into(), d.name.clone())];
                    env.extend(md.params.iter().map(|(t, x)| (x.clone(), t.clone())));
                    let t = self.type_of(&env, body).map_err(|e| format!("{}: {e}", md.name))?;
                    if !self.sub(&t, &md.result) {
                        return Err(format!("{} returns {t}, expected {}", md.name, md.result));
                    }
                }
                None if d.kind == FKind::Class => return Err(format!("abstract method {} in a class", md.name)),
                None => {}
            }
        }
        if d.kind == FKind::Class {
            let mut all = Vec::new();
            for a in self.ancestors(&d.name) {
                for md in self.get(&a).map(|x| x.methods.clone()).unwrap_or_default() {
                    if !all.contains(&md.name) {
                        all.push(md.name);
                    }
                }
            }
            for m in all {
                if let Some((i, j)) = self.default_conflict(&m, &d.name) {
                    return Err(format!("conflicting defaults for {m} from {i} and {j}"));
                }
                if self.resolve(&m, &d.name).is_err() {
                    return Err(format!("{m} is not implemented"));
                }
            }
        }
        Ok(())
    }

    /// Checks every declaration and the main expression.
    pub fn typecheck(&self) -> Result<Option<Name>, Vec<FjdError>> {
        let mut errs = Vec::new();
        for d in self.classes.values() {
            if d.name == OBJECT {
                errs.push(FjdError { class: None, msg: "Object is predefined".into() });
                continue;
            }
            if let Err(msg) = self.check_class(d) {
                errs.push(FjdError { class: Some(d.name.clone()), msg });
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }
        match &self.main {
            Some(e) => self.type_of(&Vec::new(), e).map(Some).map_err(|msg| vec![FjdError { class: None, msg }]),
            None => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(src: &str) -> FjdProgram {
        parse::parse_program(src).unwrap()
    }

    #[test]
    fn subtyping_is_a_partial_order() {
        let p = prog("interface I {} class A < Object, I {} class B < A {}");
        let names = ["Object", "I", "A", "B"];
        for a in names {
            assert!(p.sub(a, a));
            for b in names {
                if a != b && p.sub(a, b) {
                    assert!(!p.sub(b, a));
                }
                for c in names {
                    if p.sub(a, b) && p.sub(b, c) {
                        assert!(p.sub(a, c));
                    }
                }
            }
        }
        assert!(p.sub("B", "I"));
    }

    #[test]
    fn fields_are_inherited_first() {
        let p = prog("class A < Object { Object a; A(Object a) { super(); this.a = a; } } class B < A { Object b; B(Object a, Object b) { super(a); this.b = b; } }");
        let fs: Vec<String> = p.fields("B").into_iter().map(|(_, f)| f).collect();
        assert_eq!(fs, ["a", "b"]);
        assert!(p.typecheck().is_ok());
    }

    #[test]
    fn unimplemented_interface_method() {
        let p = prog("interface I { Object m(); } class A < Object, I {}");
        let e = p.typecheck().unwrap_err();
        assert!(e[0].msg.contains("not implemented"), "{e:?}");
    }

    #[test]
    fn override_must_match_exactly() {
        let p = prog("class X < Object {} class A < Object { Object m() { return new Object(); } } class B < A { X m() { return new X(); } }");
        assert!(p.typecheck().unwrap_err()[0].msg.contains("signature"));
    }

    #[test]
    fn upcasts_type_check() {
        let p = prog("class C < Object {} main = (Object) new C();");
        assert_eq!(p.typecheck().unwrap(), Some("Object".to_string()));
    }

    #[test]
    fn default_resolution() {
        let src = "interface I { Object m() { return new Object(); } }
                   interface J < I { Object m() { return new K(); } }
                   class K < Object {}
                   class A < Object, I, J {}
                   class B < Object, I { Object m() { return new B(); } }";
        let p = prog(src);
        assert!(p.typecheck().is_ok(), "{:?}", p.typecheck());
        assert_eq!(p.resolve("m", "A").unwrap().body, Some(FExpr::New("K".into(), vec![])));
        assert_eq!(p.resolve("m", "B").unwrap().body, Some(FExpr::New("B".into(), vec![])));
    }

    #[test]
    fn diamond_defaults_conflict() {
        let src = "interface I { Object m() { return new Object(); } }
                   interface J { Object m() { return new Object(); } }
                   class A < Object, I, J {}";
        assert!(prog(src).typecheck().unwrap_err()[0].msg.contains("conflicting"));
    }
}
