//! Lookup functions over a class table: parents, linearization, member
//! declarations, method and type-member lookup, and the method-name sets.
//!
//! Every lookup takes an applied class type and substitutes the class's type
//! parameters. `None` means the lookup is undefined.

use std::collections::HashSet;

use crate::syntax::*;

/// A method signature `[Y <: P] -> (x : U) -> U0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodSig {
    pub tparams: Vec<TParam>,
    pub params: Vec<(Name, Type)>,
    pub result: Type,
}

impl MethodSig {
    pub fn of(d: &MethodDecl) -> MethodSig {
        MethodSig { tparams: d.tparams.clone(), params: d.params.clone(), result: d.result.clone() }
    }

    /// Renames `other`'s binders to ours when both have the same shape up to
    /// alpha-renaming of type and term parameters. The result type is renamed
    /// but not compared.
    pub fn align(&self, other: &MethodSig) -> Option<MethodSig> {
        if self.tparams.len() != other.tparams.len() || self.params.len() != other.params.len() {
            return None;
        }
        let mut s = Subst::new();
        for (a, b) in self.tparams.iter().zip(&other.tparams) {
            if a.name != b.name {
                s.types.insert(b.name.clone(), Type::Var(a.name.clone(), Flavor::Method));
            }
        }
        for ((x, _), (y, _)) in self.params.iter().zip(&other.params) {
            if x != y {
                s.terms.insert(y.clone(), x.clone());
            }
        }
        let renamed = MethodSig {
            tparams: other.tparams.iter().map(|p| TParam { name: p.name.clone(), bound: p.bound.subst(&s) }).collect(),
            params: self.params.iter().zip(&other.params).map(|((x, _), (_, t))| (x.clone(), t.subst(&s))).collect(),
            result: other.result.subst(&s),
        };
        let bounds_eq = self.tparams.iter().zip(&renamed.tparams).all(|(a, b)| a.bound == b.bound);
        let params_eq = self.params.iter().zip(&renamed.params).all(|(a, b)| a.1 == b.1);
        if bounds_eq && params_eq {
            Some(MethodSig { tparams: self.tparams.clone(), ..renamed })
        } else {
            None
        }
    }

    pub fn subst(&self, s: &Subst) -> MethodSig {
        MethodSig {
            tparams: self.tparams.iter().map(|p| TParam { name: p.name.clone(), bound: p.bound.subst(s) }).collect(),
            params: self.params.iter().map(|(x, t)| (x.clone(), t.subst(s))).collect(),
            result: self.result.subst(s),
        }
    }
}

pub fn is_builtin(c: &str) -> bool {
    c == OBJECT || c == BOOLEAN || c == NOTHING
}

impl ClassTable {
    pub fn exists(&self, c: &str) -> bool {
        self.classes.contains_key(c) || c == OBJECT || c == BOOLEAN
    }

    pub fn is_trait(&self, c: &str) -> bool {
        self.get(c).is_some_and(|d| d.is_trait())
    }

    pub fn is_proper_class(&self, c: &str) -> bool {
        c == OBJECT || c == BOOLEAN || self.get(c).is_some_and(|d| !d.is_trait())
    }

    pub fn tparams_of(&self, c: &str) -> &[TParam] {
        self.get(c).map(|d| d.tparams.as_slice()).unwrap_or(&[])
    }

    /// `[T/X]` for the type parameters of `c`; `None` on arity mismatch.
    pub fn class_subst(&self, c: &str, args: &[Type]) -> Option<Subst> {
        let ps = self.tparams_of(c);
        if ps.len() != args.len() {
            return None;
        }
        Some(Subst::types(ps.iter().map(|p| &p.name).zip(args)))
    }

    /// Direct parents of an applied class type.
    pub fn parents(&self, n: &Type) -> Option<Vec<Type>> {
        let Type::App(c, args) = n else { return None };
        if c == OBJECT {
            return Some(Vec::new());
        }
        if c == BOOLEAN {
            return Some(vec![Type::object()]);
        }
        let d = self.get(c)?;
        let s = self.class_subst(c, args)?;
        let mut out = Vec::new();
        match &d.parent {
            Some((p, _)) => out.push(p.subst(&s)),
            None => out.push(Type::object()),
        }
        out.extend(d.traits.iter().map(|t| t.subst(&s)));
        Some(out)
    }

    pub fn mdecls(&self, n: &Type) -> Option<Vec<MethodDecl>> {
        let Type::App(c, args) = n else { return None };
        if c == OBJECT || c == BOOLEAN {
            return Some(Vec::new());
        }
        let d = self.get(c)?;
        let s = self.class_subst(c, args)?;
        Some(d.methods.iter().map(|m| m.subst(&s)).collect())
    }

    /// The declaration of `m` directly in `n`, substituted.
    pub fn mdecl(&self, n: &Type, m: &str) -> Option<MethodDecl> {
        let Type::App(c, args) = n else { return None };
        let d = self.get(c)?.method(m)?;
        let s = self.class_subst(c, args)?;
        Some(d.subst(&s))
    }

    pub fn declares(&self, n: &Type, m: &str) -> bool {
        matches!(n, Type::App(c, _) if self.get(c).is_some_and(|d| d.method(m).is_some()))
    }

    pub fn declares_concrete(&self, n: &Type, m: &str) -> bool {
        matches!(n, Type::App(c, _) if self.get(c).and_then(|d| d.method(m)).is_some_and(|d| !d.is_abstract()))
    }

    /// Value parameters (PG-TRAIT, PG-ANDL, PG-ANDR).
    pub fn vparams(&self, t: &Type) -> Option<Vec<(Name, Type)>> {
        match t {
            Type::App(c, args) => {
                if c == OBJECT || c == BOOLEAN {
                    return Some(Vec::new());
                }
                let d = self.get(c)?;
                if d.is_trait() {
                    return Some(Vec::new());
                }
                let s = self.class_subst(c, args)?;
                Some(d.vparams.iter().map(|(f, t)| (f.clone(), t.subst(&s))).collect())
            }
            Type::And(a, b) => {
                let va = self.vparams(a)?;
                let vb = self.vparams(b)?;
                if vb.iter().all(|p| va.contains(p)) {
                    Some(va)
                } else if va.iter().all(|p| vb.contains(p)) {
                    Some(vb)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Linearization. Undefined on cycles and on inheriting one class at two
    /// different instantiations.
    pub fn linearize(&self, n: &Type) -> Option<Vec<Type>> {
        self.linearize_guarded(n, &mut Vec::new())
    }

    fn linearize_guarded(&self, n: &Type, visiting: &mut Vec<Name>) -> Option<Vec<Type>> {
        let Type::App(c, _) = n else { return None };
        if visiting.contains(c) {
            return None;
        }
        visiting.push(c.clone());
        let parents = self.parents(n);
        let result = (|| {
            let parents = parents?;
            let mut acc: Vec<Type> = Vec::new();
            for p in &parents {
                let lp = self.linearize_guarded(p, visiting)?;
                acc = concat_replace(&lp, &acc)?;
            }
            let mut out = vec![n.clone()];
            out.extend(acc);
            Some(out)
        })();
        visiting.pop();
        result
    }

    /// Every class name reachable through parents, including `c` itself.
    pub fn ancestor_names(&self, c: &str) -> HashSet<Name> {
        let mut seen = HashSet::new();
        let mut stack = vec![c.to_string()];
        while let Some(x) = stack.pop() {
            if !seen.insert(x.clone()) {
                continue;
            }
            if x == BOOLEAN {
                stack.push(OBJECT.to_string());
            }
            if let Some(d) = self.get(&x) {
                stack.push(OBJECT.to_string());
                if let Some((Type::App(p, _), _)) = &d.parent {
                    stack.push(p.clone());
                }
                for t in &d.traits {
                    if let Type::App(q, _) = t {
                        stack.push(q.clone());
                    }
                }
            }
        }
        seen
    }

    /// True when following parents from `c` comes back to `c`.
    pub fn has_cycle(&self, c: &str) -> bool {
        let Some(d) = self.get(c) else { return false };
        let direct: Vec<Name> = d
            .parent
            .iter()
            .map(|(t, _)| t)
            .chain(d.traits.iter())
            .filter_map(|t| if let Type::App(n, _) = t { Some(n.clone()) } else { None })
            .collect();
        direct.iter().any(|p| p == c || self.ancestor_names(p).contains(c))
    }

    /// `mimpl(m, N)`: first base type in the linearization with a concrete `m`.
    pub fn mimpl(&self, m: &str, n: &Type) -> Option<Type> {
        self.linearize(n)?.into_iter().find(|b| self.declares_concrete(b, m))
    }

    /// `mbody(m, N)`: the implementing declaration, substituted at the
    /// implementer's instantiation.
    pub fn mbody(&self, m: &str, n: &Type) -> Option<MethodDecl> {
        if self.level < Level::Ps {
            // FGJ: walk the single-parent chain.
            let mut cur = n.clone();
            loop {
                if let Some(d) = self.mdecl(&cur, m) {
                    return d.body.is_some().then_some(d);
                }
                cur = self.parents(&cur)?.into_iter().next()?;
            }
        }
        let imp = self.mimpl(m, n)?;
        self.mdecl(&imp, m)
    }

    /// `mtype(x.m, T)`. The prefix is substituted for `this` (DS only).
    pub fn mtype(&self, prefix: Option<&str>, m: &str, t: &Type) -> Option<MethodSig> {
        self.mtype_guarded(prefix, m, t, 0)
    }

    fn mtype_guarded(&self, prefix: Option<&str>, m: &str, t: &Type, depth: usize) -> Option<MethodSig> {
        if depth > 64 {
            return None;
        }
        match t {
            Type::App(..) => {
                if let Some(d) = self.mdecl(t, m) {
                    let sig = MethodSig::of(&d);
                    return Some(match prefix {
                        Some(x) => sig.subst(&Subst::new().with_term(THIS, x)),
                        None => sig,
                    });
                }
                let ps = self.parents(t)?;
                if ps.is_empty() {
                    return None;
                }
                self.mtype_guarded(prefix, m, &Type::and_all(ps), depth + 1)
            }
            Type::And(a, b) => {
                let ma = self.mtype_guarded(prefix, m, a, depth + 1);
                let mb = self.mtype_guarded(prefix, m, b, depth + 1);
                match (ma, mb) {
                    (Some(x), Some(y)) => {
                        let y = x.align(&y)?;
                        Some(MethodSig { result: Type::and(x.result.clone(), y.result), ..x })
                    }
                    (Some(x), None) | (None, Some(x)) => Some(x),
                    (None, None) => None,
                }
            }
            _ => None,
        }
    }

    /// `tdecls(N)`, substituted.
    pub fn tdecl(&self, n: &Type, l: &str) -> Option<TypeDecl> {
        let Type::App(c, args) = n else { return None };
        let d = self.get(c)?.tdecl(l)?;
        let s = self.class_subst(c, args)?;
        Some(TypeDecl { label: d.label.clone(), lower: d.lower.subst(&s), upper: d.upper.subst(&s), span: d.span })
    }

    /// `ttype(x.L, T)`.
    pub fn ttype(&self, x: &str, l: &str, t: &Type) -> Option<(Type, Type)> {
        self.ttype_guarded(x, l, t, 0)
    }

    fn ttype_guarded(&self, x: &str, l: &str, t: &Type, depth: usize) -> Option<(Type, Type)> {
        if depth > 64 {
            return None;
        }
        match t {
            Type::App(c, args) => {
                if let Some(d) = self.get(c).and_then(|d| d.tdecl(l)) {
                    let s = self.class_subst(c, args)?.with_term(THIS, x);
                    return Some((d.lower.subst(&s), d.upper.subst(&s)));
                }
                let ps = self.parents(t)?;
                if ps.is_empty() {
                    return None;
                }
                self.ttype_guarded(x, l, &Type::and_all(ps), depth + 1)
            }
            Type::And(a, b) => {
                let ta = self.ttype_guarded(x, l, a, depth + 1);
                let tb = self.ttype_guarded(x, l, b, depth + 1);
                match (ta, tb) {
                    (Some((s1, s2)), Some((t1, t2))) => Some((Type::or(s1, t1), Type::and(s2, t2))),
                    (Some(r), None) | (None, Some(r)) => Some(r),
                    (None, None) => None,
                }
            }
            _ => None,
        }
    }

    /// `tnames(C)`: inherited labels first, then new declared ones.
    pub fn tnames(&self, c: &str) -> Vec<Name> {
        let mut out = Vec::new();
        self.tnames_into(c, &mut out, &mut Vec::new());
        out
    }

    fn tnames_into(&self, c: &str, out: &mut Vec<Name>, visiting: &mut Vec<Name>) {
        let Some(d) = self.get(c) else { return };
        if visiting.iter().any(|v| v == c) {
            return;
        }
        visiting.push(c.to_string());
        for p in d.parent.iter().map(|(t, _)| t).chain(d.traits.iter()) {
            if let Type::App(pn, _) = p {
                self.tnames_into(pn, out, visiting);
            }
        }
        for td in &d.tdecls {
            if !out.contains(&td.label) {
                out.push(td.label.clone());
            }
        }
        visiting.pop();
    }

    fn parent_names(&self, c: &str) -> Vec<Name> {
        let Some(d) = self.get(c) else { return Vec::new() };
        let mut out = Vec::new();
        if d.is_trait() {
            out.push(OBJECT.to_string());
        }
        for t in d.parent.iter().map(|(t, _)| t).chain(d.traits.iter()) {
            if let Type::App(n, _) = t {
                out.push(n.clone());
            }
        }
        out
    }

    /// Concrete and abstract method names. A name inherited as abstract from
    /// every parent that has it stays abstract unless the class implements it.
    pub fn mnames_split(&self, c: &str) -> (Vec<Name>, Vec<Name>) {
        self.mnames_split_guarded(c, &mut Vec::new())
    }

    fn mnames_split_guarded(&self, c: &str, visiting: &mut Vec<Name>) -> (Vec<Name>, Vec<Name>) {
        let Some(d) = self.get(c) else { return (Vec::new(), Vec::new()) };
        if visiting.iter().any(|v| v == c) {
            return (Vec::new(), Vec::new());
        }
        visiting.push(c.to_string());
        let decl_con: Vec<Name> = d.methods.iter().filter(|m| !m.is_abstract()).map(|m| m.name.clone()).collect();
        let decl_abs: Vec<Name> = d.methods.iter().filter(|m| m.is_abstract()).map(|m| m.name.clone()).collect();
        let (mut pcon, mut pabs) = (Vec::<Name>::new(), Vec::<Name>::new());
        for p in self.parent_names(c) {
            let (pc, pa) = self.mnames_split_guarded(&p, visiting);
            push_unique(&mut pcon, pc);
            push_unique(&mut pabs, pa);
        }
        visiting.pop();
        let mut con = decl_con.clone();
        push_unique(&mut con, pcon.iter().filter(|m| !decl_abs.contains(m)).cloned().collect());
        let mut abs = decl_abs;
        push_unique(&mut abs, pabs.into_iter().filter(|m| !pcon.contains(m) && !decl_con.contains(m)).collect());
        (con, abs)
    }

    /// `mnames(C)`. Below PS this is the parent-first order of FJ/FGJ; from
    /// PS on, declared names come first followed by inherited ones.
    pub fn mnames(&self, c: &str) -> Vec<Name> {
        if self.level < Level::Ps {
            let mut out = Vec::new();
            let mut chain = Vec::new();
            let mut cur = c.to_string();
            while let Some(d) = self.get(&cur) {
                if chain.contains(&cur) {
                    break;
                }
                chain.push(cur.clone());
                match &d.parent {
                    Some((Type::App(p, _), _)) => cur = p.clone(),
                    _ => break,
                }
            }
            for cls in chain.iter().rev() {
                let d = self.get(cls).unwrap();
                push_unique(&mut out, d.methods.iter().map(|m| m.name.clone()).collect());
            }
            return out;
        }
        let Some(d) = self.get(c) else { return Vec::new() };
        let mut out: Vec<Name> = d.methods.iter().map(|m| m.name.clone()).collect();
        let (con, abs) = self.mnames_split(c);
        let mut inherited = Vec::new();
        for p in self.parent_names(c) {
            push_unique(&mut inherited, self.mnames(&p));
        }
        push_unique(&mut out, inherited.into_iter().filter(|m| con.contains(m) || abs.contains(m)).collect());
        out
    }
}

fn push_unique(out: &mut Vec<Name>, items: Vec<Name>) {
    for i in items {
        if !out.contains(&i) {
            out.push(i);
        }
    }
}

/// `left ⊎ right`: concatenation where elements of `right` replace equal
/// elements of `left`. Undefined when the same class occurs with different
/// arguments.
pub fn concat_replace(left: &[Type], right: &[Type]) -> Option<Vec<Type>> {
    let class_of = |t: &Type| match t {
        Type::App(c, _) => c.clone(),
        _ => String::new(),
    };
    let mut out = Vec::new();
    for n0 in left {
        if right.contains(n0) {
            continue;
        }
        let c0 = class_of(n0);
        if right.iter().any(|r| class_of(r) == c0) {
            return None;
        }
        out.push(n0.clone());
    }
    out.extend(right.iter().cloned());
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn table(src: &str, level: Level) -> ClassTable {
        parse_program(src, Some(level)).unwrap().table
    }

    fn names(ts: &[Type]) -> Vec<String> {
        ts.iter().map(crate::parser::pretty::type_str).collect()
    }

    const LIN: &str = "class One {}; class Two {}
        trait Base { def foo(): Object }
        trait Sub1 < Base { def foo(): Object = new One }
        trait Sub2 < Base { def foo(): Object = new Two }
        class A < Object, Sub1, Sub2";

    #[test]
    fn linearization_matches_worked_example() {
        let ct = table(LIN, Level::Ps);
        let l = ct.linearize(&Type::class("A")).unwrap();
        assert_eq!(names(&l), ["A", "Sub2", "Sub1", "Base", "Object"]);
        assert_eq!(ct.mimpl("foo", &Type::class("A")), Some(Type::class("Sub2")));
    }

    #[test]
    fn linearization_rejects_two_instantiations() {
        let ct = table("trait T[X]; trait L < T[Object]; trait R < T[Boolean]; class A < Object, L, R", Level::Pls);
        assert_eq!(ct.linearize(&Type::class("A")), None);
    }

    #[test]
    fn concat_replace_keeps_rightmost() {
        let (a, b, c) = (Type::class("A"), Type::class("B"), Type::class("C"));
        let r = concat_replace(&[a.clone(), b.clone()], &[b.clone(), c.clone()]).unwrap();
        assert_eq!(r, vec![a, b, c]);
    }

    #[test]
    fn reabstraction() {
        let src = "trait Base { def foo(): Object = new Object }
            trait Sub < Base { def foo(): Object }
            class A < Object, Sub {}
            class B < Object, Base, Sub {}";
        let ct = table(src, Level::Ps);
        assert_eq!(ct.mnames_split("A"), (vec![], vec!["foo".to_string()]));
        assert_eq!(ct.mnames_split("B"), (vec!["foo".to_string()], vec![]));
        assert_eq!(ct.mnames_split("Sub"), (vec![], vec!["foo".to_string()]));
    }

    #[test]
    fn fj_mnames_are_parent_first() {
        let ct = table("class C() < Object { def foo(): C = this }\nclass D() < C() { def bar(): C = this; def foo(): C = this }", Level::Fj);
        assert_eq!(ct.mnames("D"), ["foo", "bar"]);
    }

    #[test]
    fn mtype_on_intersection_combines_results() {
        let ct = table("class A {}; class B {}; trait L { def foo(): A }; trait R { def foo(): B }", Level::Ps);
        let sig = ct.mtype(None, "foo", &Type::and(Type::class("L"), Type::class("R"))).unwrap();
        assert_eq!(sig.result, Type::and(Type::class("A"), Type::class("B")));
        assert!(ct.mtype(None, "bar", &Type::class("L")).is_none());
    }

    #[test]
    fn mtype_substitutes_class_arguments_and_prefix() {
        let ct = table("trait Zero { type Elem; def zero(): this.Elem }; trait F[X] { def get(): X }; trait G < F[Zero]", Level::Ds);
        let sig = ct.mtype(Some("x"), "zero", &Type::class("Zero")).unwrap();
        assert_eq!(sig.result, Type::Sel("x".into(), "Elem".into()));
        let sig = ct.mtype(None, "get", &Type::class("G")).unwrap();
        assert_eq!(sig.result, Type::class("Zero"));
    }

    #[test]
    fn align_is_alpha_equivalence() {
        let a = MethodSig {
            tparams: vec![TParam { name: "Y".into(), bound: Type::object() }],
            params: vec![("x".into(), Type::Var("Y".into(), Flavor::Method))],
            result: Type::Sel("x".into(), "L".into()),
        };
        let b = MethodSig {
            tparams: vec![TParam { name: "Z".into(), bound: Type::object() }],
            params: vec![("y".into(), Type::Var("Z".into(), Flavor::Method))],
            result: Type::Sel("y".into(), "L".into()),
        };
        let r = a.align(&b).unwrap();
        assert_eq!(r.result, a.result);
        let c = MethodSig { params: vec![("y".into(), Type::object())], ..b };
        assert!(a.align(&c).is_none());
    }

    #[test]
    fn ttype_intersection_widens_lower_and_narrows_upper() {
        let ct = table("class X {}; class Y {}; trait P { type M >: X <: Object }; trait Q { type M >: Y <: Object }", Level::Ds);
        let (lo, hi) = ct.ttype("x", "M", &Type::and(Type::class("P"), Type::class("Q"))).unwrap();
        assert_eq!(lo, Type::or(Type::class("X"), Type::class("Y")));
        assert_eq!(hi, Type::and(Type::object(), Type::object()));
    }

    #[test]
    fn vparams_on_intersections() {
        let ct = table("class C(f: Object) < Object {}; trait T", Level::Ps);
        let v = ct.vparams(&Type::and(Type::class("C"), Type::class("T"))).unwrap();
        assert_eq!(v, vec![("f".to_string(), Type::object())]);
    }
}
