//! Algorithmic subtyping with `bound`, `baseTypes` and well-formedness.
//!
//! Rules are tried in a fixed order and the first one whose premises hold
//! wins. Goals already on the stack fail instead of looping, and a fuel
//! counter caps the total work per query.

pub mod avoid;
pub mod oracle;

use std::cell::{Cell, RefCell};
use std::collections::HashSet;

use crate::classtable::is_builtin;
use crate::parser::pretty::type_str;
use crate::syntax::*;

pub const DEFAULT_FUEL: u64 = 10_000;

/// Result of one subtyping query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub holds: bool,
    /// Rule at the root of the derivation when it holds.
    pub rule: Option<&'static str>,
    /// The search ran out of fuel, so a negative answer is not conclusive.
    pub exhausted: bool,
    /// Derivation lines, indented by depth, when tracing was requested.
    pub trace: Vec<String>,
}

/// Shared state for one family of queries in a fixed context.
pub struct Algo<'a> {
    pub ct: &'a ClassTable,
    pub env: &'a TypeEnv,
    fuel: Cell<u64>,
    exhausted: Cell<bool>,
    in_progress: RefCell<HashSet<(Type, Type)>>,
    sel_in_progress: RefCell<HashSet<(Name, Name)>>,
    tracing: bool,
    trace: RefCell<Vec<String>>,
    depth: Cell<usize>,
}

impl<'a> Algo<'a> {
    pub fn new(ct: &'a ClassTable, env: &'a TypeEnv) -> Algo<'a> {
        Algo::with_fuel(ct, env, DEFAULT_FUEL)
    }

    pub fn with_fuel(ct: &'a ClassTable, env: &'a TypeEnv, fuel: u64) -> Algo<'a> {
        Algo {
            ct,
            env,
            fuel: Cell::new(fuel),
            exhausted: Cell::new(false),
            in_progress: RefCell::new(HashSet::new()),
            sel_in_progress: RefCell::new(HashSet::new()),
            tracing: false,
            trace: RefCell::new(Vec::new()),
            depth: Cell::new(0),
        }
    }

    pub fn traced(mut self) -> Algo<'a> {
        self.tracing = true;
        self
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted.get()
    }

    /// Runs one top-level query and reports rule, trace and exhaustion.
    pub fn check(&self, s: &Type, t: &Type) -> Outcome {
        self.trace.borrow_mut().clear();
        let rule = self.sub_rule(s, t);
        Outcome { holds: rule.is_some(), rule, exhausted: self.exhausted.get(), trace: self.trace.borrow().clone() }
    }

    pub fn sub(&self, s: &Type, t: &Type) -> bool {
        self.sub_rule(s, t).is_some()
    }

    pub fn equiv(&self, s: &Type, t: &Type) -> bool {
        self.sub(s, t) && self.sub(t, s)
    }

    fn sub_rule(&self, s: &Type, t: &Type) -> Option<&'static str> {
        if self.fuel.get() == 0 {
            self.exhausted.set(true);
            return None;
        }
        self.fuel.set(self.fuel.get() - 1);
        let key = (s.clone(), t.clone());
        if !self.in_progress.borrow_mut().insert(key.clone()) {
            return None;
        }
        let mark = self.trace.borrow().len();
        if self.tracing {
            self.trace.borrow_mut().push(String::new());
        }
        self.depth.set(self.depth.get() + 1);
        let rule = self.try_rules(s, t);
        self.depth.set(self.depth.get() - 1);
        self.in_progress.borrow_mut().remove(&key);
        if self.tracing {
            let mut tr = self.trace.borrow_mut();
            match rule {
                Some(r) => {
                    let indent = "  ".repeat(self.depth.get());
                    tr[mark] = format!("{indent}AS-{r}: {} <: {}", type_str(s), type_str(t));
                }
                None => tr.truncate(mark),
            }
        }
        rule
    }

    /// Undoes trace lines added by a failed premise.
    fn attempt(&self, f: impl FnOnce() -> bool) -> bool {
        let mark = self.trace.borrow().len();
        let ok = f();
        if !ok && self.tracing {
            self.trace.borrow_mut().truncate(mark);
        }
        ok
    }

    fn try_rules(&self, s: &Type, t: &Type) -> Option<&'static str> {
        if s == t {
            return Some("REFL");
        }
        if s.is_nothing() {
            return Some("NOTHING");
        }
        if let Type::Var(x, _) = s {
            if let Some(n) = self.env.tvar(x) {
                if self.attempt(|| self.sub(n, t)) {
                    return Some("VAR");
                }
            }
        }
        if let (Type::App(c, ss), Type::App(b, ts)) = (s, t) {
            if c == b && ss.len() == ts.len() && self.attempt(|| ss.iter().zip(ts).all(|(a, b)| self.equiv(a, b))) {
                return Some("INV");
            }
            if !s.is_nothing() {
                if let Some(ps) = self.ct.parents(s) {
                    for p in &ps {
                        if self.attempt(|| self.sub(p, t)) {
                            return Some("CLASS");
                        }
                    }
                }
            }
        }
        if let Type::And(t1, t2) = t {
            if self.attempt(|| self.sub(s, t1) && self.sub(s, t2)) {
                return Some("AND2");
            }
        }
        if let Type::Or(s1, s2) = s {
            if self.attempt(|| self.sub(s1, t) && self.sub(s2, t)) {
                return Some("OR1");
            }
        }
        if let Type::And(s1, _) = s {
            if self.attempt(|| self.sub(s1, t)) {
                return Some("AND11");
            }
        }
        if let Type::Or(t1, _) = t {
            if self.attempt(|| self.sub(s, t1)) {
                return Some("OR21");
            }
        }
        if let Type::And(_, s2) = s {
            if self.attempt(|| self.sub(s2, t)) {
                return Some("AND12");
            }
        }
        if let Type::Or(_, t2) = t {
            if self.attempt(|| self.sub(s, t2)) {
                return Some("OR22");
            }
        }
        if let Type::Sel(x, l) = s {
            if let Some((_, hi)) = self.sel_bounds(x, l) {
                if self.attempt(|| self.sub(&hi, t)) {
                    return Some("SEL1");
                }
            }
        }
        if let Type::Sel(x, l) = t {
            if let Some((lo, _)) = self.sel_bounds(x, l) {
                if self.attempt(|| self.sub(s, &lo)) {
                    return Some("SEL2");
                }
            }
        }
        None
    }

    /// `ttype(x.L, bound(Γ(x)))`, guarded against cyclic selections.
    pub fn sel_bounds(&self, x: &str, l: &str) -> Option<(Type, Type)> {
        let key = (x.to_string(), l.to_string());
        if !self.sel_in_progress.borrow_mut().insert(key.clone()) {
            return None;
        }
        let r = (|| {
            let u = self.env.term(x)?;
            let b = self.bound(u)?;
            self.ct.ttype(x, l, &b)
        })();
        self.sel_in_progress.borrow_mut().remove(&key);
        r
    }

    /// Non-variable upper bound: an intersection of class types.
    pub fn bound(&self, t: &Type) -> Option<Type> {
        match t {
            Type::Var(x, _) => {
                let n = self.env.tvar(x)?;
                if matches!(n, Type::Var(y, _) if y == x) {
                    return None;
                }
                self.bound(n)
            }
            Type::App(..) if t.is_nothing() => None,
            Type::App(..) => Some(t.clone()),
            Type::And(a, b) => Some(Type::and(self.bound(a)?, self.bound(b)?)),
            Type::Or(..) => {
                let bs = self.base_types(t)?;
                if bs.is_empty() {
                    None
                } else {
                    Some(Type::and_all(bs))
                }
            }
            Type::Sel(x, l) => {
                let key = (x.clone(), format!("bound:{l}"));
                if !self.sel_in_progress.borrow_mut().insert(key.clone()) {
                    return None;
                }
                let r = self.sel_bounds(x, l).and_then(|(_, hi)| self.bound(&hi));
                self.sel_in_progress.borrow_mut().remove(&key);
                r
            }
        }
    }

    pub fn base_types(&self, t: &Type) -> Option<Vec<Type>> {
        match t {
            Type::Var(x, _) => {
                let n = self.env.tvar(x)?.clone();
                self.base_types(&n)
            }
            Type::App(..) if t.is_nothing() => None,
            Type::App(..) => self.ct.linearize(t),
            Type::And(a, b) => {
                let mut out = self.base_types(a)?;
                for x in self.base_types(b)? {
                    if !out.contains(&x) {
                        out.push(x);
                    }
                }
                Some(out)
            }
            Type::Or(a, b) => {
                if self.sub(b, a) {
                    return self.base_types(a);
                }
                if self.sub(a, b) {
                    return self.base_types(b);
                }
                let pa = self.base_types(a)?;
                let pb = self.base_types(b)?;
                Some(pa.into_iter().filter(|q| pb.iter().any(|q2| self.equiv(q, q2))).collect())
            }
            Type::Sel(x, l) => {
                let key = (x.clone(), format!("base:{l}"));
                if !self.sel_in_progress.borrow_mut().insert(key.clone()) {
                    return None;
                }
                let r = self.sel_bounds(x, l).and_then(|(_, hi)| self.base_types(&hi));
                self.sel_in_progress.borrow_mut().remove(&key);
                r
            }
        }
    }

    /// Full well-formedness, including bound checks on type arguments.
    pub fn wf(&self, t: &Type) -> Result<(), String> {
        match t {
            Type::Var(x, _) => {
                if self.env.tvar(x).is_some() {
                    Ok(())
                } else {
                    Err(format!("type variable `{x}` is not in scope"))
                }
            }
            Type::App(c, args) => {
                if is_builtin(c) {
                    return if args.is_empty() { Ok(()) } else { Err(format!("`{c}` takes no type arguments")) };
                }
                let Some(d) = self.ct.get(c) else { return Err(format!("unknown class `{c}`")) };
                if d.tparams.len() != args.len() {
                    return Err(format!("`{c}` expects {} type argument(s), got {}", d.tparams.len(), args.len()));
                }
                for a in args {
                    self.wf(a)?;
                }
                let s = self.ct.class_subst(c, args).expect("arity checked");
                for (p, a) in d.tparams.iter().zip(args) {
                    let b = p.bound.subst(&s);
                    if !self.sub(a, &b) {
                        return Err(format!("type argument {} does not conform to bound {}", type_str(a), type_str(&b)));
                    }
                }
                Ok(())
            }
            Type::And(a, b) | Type::Or(a, b) => {
                self.wf(a)?;
                self.wf(b)
            }
            Type::Sel(x, l) => {
                if !self.env.has_term(x) {
                    return Err(format!("variable `{x}` is not in scope"));
                }
                if self.sel_bounds(x, l).is_none() {
                    return Err(format!("`{x}` has no type member `{l}`"));
                }
                Ok(())
            }
        }
    }
}

/// One-shot algorithmic subtyping query.
pub fn is_subtype(ct: &ClassTable, env: &TypeEnv, s: &Type, t: &Type) -> bool {
    Algo::new(ct, env).sub(s, t)
}

/// One-shot query with a derivation trace.
pub fn subtype_traced(ct: &ClassTable, env: &TypeEnv, s: &Type, t: &Type) -> Outcome {
    Algo::new(ct, env).traced().check(s, t)
}
