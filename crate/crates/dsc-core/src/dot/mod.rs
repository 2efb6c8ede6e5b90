//! The DOT target calculus: types, terms, free variables, capture-avoiding
//! renaming and alpha-equivalence.
//!
//! The AST keeps the usual derived forms (multi-parameter methods, calls and
//! `let`) so printed output stays readable. [`sugar::expand`] lowers them to
//! the core calculus, which is what evaluation and subtyping consume.

pub mod eval;
pub mod json;
pub mod parse;
pub mod print;
pub mod subtype;
pub mod sugar;

use std::collections::{BTreeSet, HashMap};

pub type Name = String;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DType {
    Top,
    Bot,
    /// `L : S .. U`; an alias `L = T` is `Mem(L, T, T)`.
    Mem(Name, Box<DType>, Box<DType>),
    /// `m(x1 : S1, ..) : U`. Core methods take exactly one parameter.
    Fun(Name, Vec<(Name, DType)>, Box<DType>),
    Sel(Name, Name),
    Rec(Name, Box<DType>),
    And(Box<DType>, Box<DType>),
    Or(Box<DType>, Box<DType>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DTerm {
    Var(Name),
    Obj(Name, Vec<Decl>),
    /// `t.m(t1, ..)`. Core calls take exactly one argument.
    Call(Box<DTerm>, Name, Vec<DTerm>),
    Let(Name, Box<DTerm>, Box<DTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Decl {
    Tag(Name, DType),
    Def(Name, Vec<(Name, Option<DType>)>, Option<DType>, DTerm),
}

impl Decl {
    pub fn label(&self) -> &str {
        match self {
            Decl::Tag(l, _) | Decl::Def(l, ..) => l,
        }
    }
}

impl DType {
    pub fn alias(l: &str, t: DType) -> DType {
        DType::Mem(l.to_string(), Box::new(t.clone()), Box::new(t))
    }

    pub fn sel(x: &str, l: &str) -> DType {
        DType::Sel(x.to_string(), l.to_string())
    }

    pub fn rec(z: &str, t: DType) -> DType {
        DType::Rec(z.to_string(), Box::new(t))
    }

    pub fn and(a: DType, b: DType) -> DType {
        DType::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: DType, b: DType) -> DType {
        DType::Or(Box::new(a), Box::new(b))
    }

    /// Right-nested intersection; `⊤` when empty.
    pub fn and_all(items: Vec<DType>) -> DType {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => DType::Top,
            Some(last) => it.fold(last, |acc, t| DType::and(t, acc)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        fv_type(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn rename(&self, from: &str, to: &str) -> DType {
        if from == to {
            return self.clone();
        }
        rn_type(self, from, to)
    }

    pub fn size(&self) -> usize {
        match self {
            DType::Top | DType::Bot | DType::Sel(..) => 1,
            DType::Mem(_, a, b) | DType::And(a, b) | DType::Or(a, b) => 1 + a.size() + b.size(),
            DType::Fun(_, ps, r) => 1 + ps.iter().map(|(_, t)| t.size()).sum::<usize>() + r.size(),
            DType::Rec(_, t) => 1 + t.size(),
        }
    }
}

impl DTerm {
    pub fn var(x: &str) -> DTerm {
        DTerm::Var(x.to_string())
    }

    pub fn call(t: DTerm, m: &str, args: Vec<DTerm>) -> DTerm {
        DTerm::Call(Box::new(t), m.to_string(), args)
    }

    pub fn empty() -> DTerm {
        DTerm::Obj("_".into(), Vec::new())
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        fv_term(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn rename(&self, from: &str, to: &str) -> DTerm {
        if from == to {
            return self.clone();
        }
        rn_term(self, from, to)
    }

    pub fn size(&self) -> usize {
        match self {
            DTerm::Var(_) => 1,
            DTerm::Obj(_, ds) => 1 + ds.iter().map(decl_size).sum::<usize>(),
            DTerm::Call(t, _, args) => 1 + t.size() + args.iter().map(DTerm::size).sum::<usize>(),
            DTerm::Let(_, s, u) => 1 + s.size() + u.size(),
        }
    }
}

fn decl_size(d: &Decl) -> usize {
    match d {
        Decl::Tag(_, t) => 1 + t.size(),
        Decl::Def(_, ps, r, b) => {
            1 + ps.iter().filter_map(|(_, t)| t.as_ref()).map(DType::size).sum::<usize>()
                + r.as_ref().map_or(0, DType::size)
                + b.size()
        }
    }
}

fn fv_type(t: &DType, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match t {
        DType::Top | DType::Bot => {}
        DType::Mem(_, a, b) | DType::And(a, b) | DType::Or(a, b) => {
            fv_type(a, bound, out);
            fv_type(b, bound, out);
        }
        DType::Fun(_, ps, r) => {
            let mark = bound.len();
            for (x, s) in ps {
                fv_type(s, bound, out);
                bound.push(x.clone());
            }
            fv_type(r, bound, out);
            bound.truncate(mark);
        }
        DType::Sel(x, _) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        DType::Rec(z, b) => {
            bound.push(z.clone());
            fv_type(b, bound, out);
            bound.pop();
        }
    }
}

fn fv_term(t: &DTerm, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match t {
        DTerm::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        DTerm::Obj(z, ds) => {
            bound.push(z.clone());
            for d in ds {
                fv_decl(d, bound, out);
            }
            bound.pop();
        }
        DTerm::Call(r, _, args) => {
            fv_term(r, bound, out);
            for a in args {
                fv_term(a, bound, out);
            }
        }
        DTerm::Let(x, s, u) => {
            fv_term(s, bound, out);
            bound.push(x.clone());
            fv_term(u, bound, out);
            bound.pop();
        }
    }
}

fn fv_decl(d: &Decl, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match d {
        Decl::Tag(_, t) => fv_type(t, bound, out),
        Decl::Def(_, ps, r, body) => {
            let mark = bound.len();
            for (x, s) in ps {
                if let Some(s) = s {
                    fv_type(s, bound, out);
                }
                bound.push(x.clone());
            }
            if let Some(r) = r {
                fv_type(r, bound, out);
            }
            fv_term(body, bound, out);
            bound.truncate(mark);
        }
    }
}

/// A binder name distinct from `avoid` and from the free variables given.
fn fresh_binder(base: &str, avoid: &str, fvs: &BTreeSet<Name>) -> Name {
    let mut b = format!("{base}'");
    while b == avoid || fvs.contains(&b) {
        b.push('\'');
    }
    b
}

fn rn_type(t: &DType, from: &str, to: &str) -> DType {
    match t {
        DType::Top | DType::Bot => t.clone(),
        DType::Mem(l, a, b) => DType::Mem(l.clone(), Box::new(rn_type(a, from, to)), Box::new(rn_type(b, from, to))),
        DType::And(a, b) => DType::and(rn_type(a, from, to), rn_type(b, from, to)),
        DType::Or(a, b) => DType::or(rn_type(a, from, to), rn_type(b, from, to)),
        DType::Sel(x, l) => DType::Sel(if x == from { to.to_string() } else { x.clone() }, l.clone()),
        DType::Rec(z, b) => {
            if z == from {
                t.clone()
            } else if z == to {
                let z2 = fresh_binder(z, to, &b.free_vars());
                DType::rec(&z2, rn_type(&rn_type(b, z, &z2), from, to))
            } else {
                DType::rec(z, rn_type(b, from, to))
            }
        }
        DType::Fun(m, ps, r) => {
            let (ps, r) = rn_params(ps, &**r, from, to, rn_type, rn_type);
            DType::Fun(m.clone(), ps, Box::new(r))
        }
    }
}

/// Renames through a telescope of parameters followed by a tail (result
/// type or body), renaming clashing binders.
fn rn_params<P: Clone, R: Clone>(
    ps: &[(Name, P)],
    tail: &R,
    from: &str,
    to: &str,
    on_param: impl Fn(&P, &str, &str) -> P + Copy,
    on_tail: impl Fn(&R, &str, &str) -> R + Copy,
) -> (Vec<(Name, P)>, R) {
    if ps.is_empty() {
        return (Vec::new(), on_tail(tail, from, to));
    }
    let (x, p) = &ps[0];
    let p2 = on_param(p, from, to);
    if x == from {
        return (ps.iter().cloned().enumerate().map(|(i, q)| if i == 0 { (q.0, p2.clone()) } else { q }).collect(), tail.clone());
    }
    let (x2, rest, tail2) = if x == to {
        // Rename the clashing binder first. The fresh name only needs to
        // avoid `to`; names ending in primes never occur in generated code.
        let x2 = format!("{x}'");
        let rest: Vec<(Name, P)> = ps[1..].iter().map(|(y, q)| (y.clone(), on_param(q, x, &x2))).collect();
        let tail2 = on_tail(tail, x, &x2);
        (x2, rest, tail2)
    } else {
        (x.clone(), ps[1..].to_vec(), tail.clone())
    };
    let (mut rest, tail) = rn_params(&rest, &tail2, from, to, on_param, on_tail);
    rest.insert(0, (x2, p2));
    (rest, tail)
}

fn rn_opt(t: &Option<DType>, from: &str, to: &str) -> Option<DType> {
    t.as_ref().map(|t| rn_type(t, from, to))
}

fn rn_term(t: &DTerm, from: &str, to: &str) -> DTerm {
    match t {
        DTerm::Var(x) => DTerm::Var(if x == from { to.to_string() } else { x.clone() }),
        DTerm::Call(r, m, args) => {
            DTerm::Call(Box::new(rn_term(r, from, to)), m.clone(), args.iter().map(|a| rn_term(a, from, to)).collect())
        }
        DTerm::Let(x, s, u) => {
            let s2 = rn_term(s, from, to);
            if x == from {
                DTerm::Let(x.clone(), Box::new(s2), u.clone())
            } else if x == to {
                let x2 = fresh_binder(x, to, &u.free_vars());
                DTerm::Let(x2.clone(), Box::new(s2), Box::new(rn_term(&rn_term(u, x, &x2), from, to)))
            } else {
                DTerm::Let(x.clone(), Box::new(s2), Box::new(rn_term(u, from, to)))
            }
        }
        DTerm::Obj(z, ds) => {
            if z == from {
                return t.clone();
            }
            if z == to {
                let z2 = format!("{z}'");
                let ds2: Vec<Decl> = ds.iter().map(|d| rn_decl(d, z, &z2)).collect();
                return DTerm::Obj(z2, ds2.iter().map(|d| rn_decl(d, from, to)).collect());
            }
            DTerm::Obj(z.clone(), ds.iter().map(|d| rn_decl(d, from, to)).collect())
        }
    }
}

fn rn_decl(d: &Decl, from: &str, to: &str) -> Decl {
    match d {
        Decl::Tag(l, t) => Decl::Tag(l.clone(), rn_type(t, from, to)),
        Decl::Def(m, ps, r, body) => {
            let tail = (r.clone(), body.clone());
            let (ps, (r, body)) = rn_params(ps, &tail, from, to, rn_opt, |(r, b): &(Option<DType>, DTerm), a, c| {
                (rn_opt(r, a, c), rn_term(b, a, c))
            });
            Decl::Def(m.clone(), ps, r, body)
        }
    }
}

/// Alpha-equivalence: equal after canonical renaming of bound variables.
pub fn alpha_eq_type(a: &DType, b: &DType) -> bool {
    Alpha::default().ty(a, b)
}

pub fn alpha_eq_term(a: &DTerm, b: &DTerm) -> bool {
    Alpha::default().term(a, b)
}

#[derive(Default)]
struct Alpha {
    // Binder name to depth, one map per side.
    left: HashMap<Name, Vec<usize>>,
    right: HashMap<Name, Vec<usize>>,
    depth: usize,
}

impl Alpha {
    fn bind(&mut self, x: &str, y: &str) {
        self.left.entry(x.to_string()).or_default().push(self.depth);
        self.right.entry(y.to_string()).or_default().push(self.depth);
        self.depth += 1;
    }

    fn unbind(&mut self, x: &str, y: &str) {
        self.left.get_mut(x).and_then(Vec::pop);
        self.right.get_mut(y).and_then(Vec::pop);
        self.depth -= 1;
    }

    fn var(&self, x: &str, y: &str) -> bool {
        let lx = self.left.get(x).and_then(|v| v.last());
        let ry = self.right.get(y).and_then(|v| v.last());
        match (lx, ry) {
            (Some(a), Some(b)) => a == b,
            (None, None) => x == y,
            _ => false,
        }
    }

    fn ty(&mut self, a: &DType, b: &DType) -> bool {
        match (a, b) {
            (DType::Top, DType::Top) | (DType::Bot, DType::Bot) => true,
            (DType::Mem(l1, s1, u1), DType::Mem(l2, s2, u2)) => l1 == l2 && self.ty(s1, s2) && self.ty(u1, u2),
            (DType::And(a1, b1), DType::And(a2, b2)) | (DType::Or(a1, b1), DType::Or(a2, b2)) => {
                self.ty(a1, a2) && self.ty(b1, b2)
            }
            (DType::Sel(x, l1), DType::Sel(y, l2)) => l1 == l2 && self.var(x, y),
            (DType::Rec(z1, b1), DType::Rec(z2, b2)) => {
                self.bind(z1, z2);
                let ok = self.ty(b1, b2);
                self.unbind(z1, z2);
                ok
            }
            (DType::Fun(m1, p1, r1), DType::Fun(m2, p2, r2)) => {
                if m1 != m2 || p1.len() != p2.len() {
                    return false;
                }
                let mut n = 0;
                let mut ok = true;
                for ((x, s), (y, t)) in p1.iter().zip(p2) {
                    if !self.ty(s, t) {
                        ok = false;
                        break;
                    }
                    self.bind(x, y);
                    n += 1;
                }
                ok = ok && self.ty(r1, r2);
                for ((x, _), (y, _)) in p1.iter().zip(p2).take(n).rev() {
                    self.unbind(x, y);
                }
                ok
            }
            _ => false,
        }
    }

    fn opt(&mut self, a: &Option<DType>, b: &Option<DType>) -> bool {
        match (a, b) {
            (None, None) => true,
            (Some(a), Some(b)) => self.ty(a, b),
            _ => false,
        }
    }

    fn term(&mut self, a: &DTerm, b: &DTerm) -> bool {
        match (a, b) {
            (DTerm::Var(x), DTerm::Var(y)) => self.var(x, y),
            (DTerm::Call(r1, m1, a1), DTerm::Call(r2, m2, a2)) => {
                m1 == m2 && a1.len() == a2.len() && self.term(r1, r2) && a1.iter().zip(a2).all(|(x, y)| self.term(x, y))
            }
            (DTerm::Let(x, s1, u1), DTerm::Let(y, s2, u2)) => {
                if !self.term(s1, s2) {
                    return false;
                }
                self.bind(x, y);
                let ok = self.term(u1, u2);
                self.unbind(x, y);
                ok
            }
            (DTerm::Obj(z1, d1), DTerm::Obj(z2, d2)) => {
                if d1.len() != d2.len() {
                    return false;
                }
                self.bind(z1, z2);
                let ok = d1.iter().zip(d2).all(|(x, y)| self.decl(x, y));
                self.unbind(z1, z2);
                ok
            }
            _ => false,
        }
    }

    fn decl(&mut self, a: &Decl, b: &Decl) -> bool {
        match (a, b) {
            (Decl::Tag(l1, t1), Decl::Tag(l2, t2)) => l1 == l2 && self.ty(t1, t2),
            (Decl::Def(m1, p1, r1, b1), Decl::Def(m2, p2, r2, b2)) => {
                if m1 != m2 || p1.len() != p2.len() {
                    return false;
                }
                let mut n = 0;
                let mut ok = true;
                for ((x, s), (y, t)) in p1.iter().zip(p2) {
                    if !self.opt(s, t) {
                        ok = false;
                        break;
                    }
                    self.bind(x, y);
                    n += 1;
                }
                ok = ok && self.opt(r1, r2) && self.term(b1, b2);
                for ((x, _), (y, _)) in p1.iter().zip(p2).take(n).rev() {
                    self.unbind(x, y);
                }
                ok
            }
            _ => false,
        }
    }
}

/// A DOT context: ordered bindings `x : T`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DEnv {
    pub bindings: Vec<(Name, DType)>,
}

impl DEnv {
    pub fn new() -> DEnv {
        DEnv::default()
    }

    pub fn with(&self, x: &str, t: DType) -> DEnv {
        let mut out = self.clone();
        out.bindings.push((x.to_string(), t));
        out
    }

    pub fn get(&self, x: &str) -> Option<&DType> {
        self.bindings.iter().rev().find(|(y, _)| y == x).map(|(_, t)| t)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.get(x).is_some()
    }

    /// `Γ_[x]`.
    pub fn truncate_at(&self, x: &str) -> DEnv {
        match self.bindings.iter().rposition(|(y, _)| y == x) {
            Some(i) => DEnv { bindings: self.bindings[..=i].to_vec() },
            None => self.clone(),
        }
    }
}

/// `Γ ⊢ T wf`: free variables are bound. Selections need not name an
/// existing member.
pub fn dot_wf(env: &DEnv, t: &DType) -> bool {
    t.free_vars().iter().all(|x| env.contains(x))
}

pub fn dot_wf_term(env: &DEnv, t: &DTerm) -> bool {
    t.free_vars().iter().all(|x| env.contains(x))
}

#[cfg(test)]
mod tests {
    use super::parse::{parse_term, parse_type};
    use super::*;

    fn ty(s: &str) -> DType {
        parse_type(s).unwrap()
    }

    #[test]
    fn alpha_examples() {
        assert!(alpha_eq_type(&ty("{z => A = ⊤}"), &ty("{w => A = ⊤}")));
        assert!(!alpha_eq_type(&ty("{z => A = z.B}"), &ty("{w => A = z.B}")));
        assert!(alpha_eq_type(&ty("m(x : ⊤) : ⊤"), &ty("m(y : ⊤) : ⊤")));
        assert!(alpha_eq_type(&ty("m(x : ⊤) : x.L"), &ty("m(y : ⊤) : y.L")));
        assert!(!alpha_eq_type(&ty("m(x : ⊤) : y.L"), &ty("m(y : ⊤) : y.L")));
    }

    #[test]
    fn free_vars_respect_binders() {
        let t = parse_term("{z => m(x) = x.f(z, y)}").unwrap();
        assert_eq!(t.free_vars().into_iter().collect::<Vec<_>>(), vec!["y".to_string()]);
        assert_eq!(ty("{z => A = z.B & y.C}").free_vars().len(), 1);
    }

    #[test]
    fn renaming_avoids_capture() {
        let t = ty("{y => A = x.B & y.C}");
        let r = t.rename("x", "y");
        assert!(r.free_vars().contains("y"));
        assert!(alpha_eq_type(&r, &ty("{w => A = y.B & w.C}")));
    }

    #[test]
    fn truncation() {
        let env = DEnv::new().with("a", DType::Top).with("b", DType::Top).with("c", DType::Top);
        assert_eq!(env.truncate_at("b").bindings.len(), 2);
        assert!(dot_wf(&env, &ty("b.L")));
        assert!(!dot_wf(&env.truncate_at("a"), &ty("b.L")));
    }
}
