//! Bounded search over the declarative subtyping rules, transitivity
//! included. It answers `Yes` when it finds a derivation no deeper than the
//! fuel and `Unknown` otherwise, so it can only confirm.
//!
//! Transitivity needs a middle type. Candidates come from a finite pool built
//! from the query, the context, parents, base types and type-member bounds.

use std::collections::{HashMap, HashSet};

use crate::syntax::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    Unknown,
}

pub struct Oracle<'a> {
    ct: &'a ClassTable,
    max_pool: usize,
    // Goals known to fail at a given depth (and hence at any smaller one).
    failed: HashMap<(usize, Type, Type), usize>,
    pools: HashMap<usize, Vec<Type>>,
    envs: Vec<TypeEnv>,
}

const DEFAULT_POOL: usize = 48;

impl<'a> Oracle<'a> {
    pub fn new(ct: &'a ClassTable) -> Oracle<'a> {
        Oracle { ct, max_pool: DEFAULT_POOL, failed: HashMap::new(), pools: HashMap::new(), envs: Vec::new() }
    }

    pub fn with_pool_limit(mut self, n: usize) -> Oracle<'a> {
        self.max_pool = n;
        self
    }

    /// Searches for a derivation of `Γ ⊢ S <: T` of depth at most `fuel`,
    /// deepening one level at a time.
    pub fn check(&mut self, env: &TypeEnv, s: &Type, t: &Type, fuel: usize) -> Verdict {
        let id = self.env_id(env);
        self.ensure_pool(id, &[s, t]);
        for d in 1..=fuel {
            if self.derive(id, s, t, d) {
                return Verdict::Yes;
            }
        }
        Verdict::Unknown
    }

    fn env_id(&mut self, env: &TypeEnv) -> usize {
        match self.envs.iter().position(|e| e == env) {
            Some(i) => i,
            None => {
                self.envs.push(env.clone());
                self.envs.len() - 1
            }
        }
    }

    fn ensure_pool(&mut self, id: usize, extra: &[&Type]) {
        let env = self.envs[id].clone();
        let mut pool: Vec<Type> = self.pools.remove(&id).unwrap_or_default();
        let mut seen: HashSet<Type> = pool.iter().cloned().collect();
        let mut queue: Vec<Type> = Vec::new();
        for t in extra {
            subterms(t, &mut queue);
        }
        queue.push(Type::object());
        queue.push(Type::nothing());
        for b in &env.bindings {
            match b {
                Binding::Types(ps) => {
                    for (x, n) in ps {
                        queue.push(Type::Var(x.clone(), Flavor::Class));
                        subterms(n, &mut queue);
                    }
                }
                Binding::Term(x, t) => {
                    subterms(t, &mut queue);
                    for c in class_names(t, &env) {
                        for l in self.ct.tnames(&c) {
                            queue.push(Type::Sel(x.clone(), l));
                        }
                    }
                }
            }
        }
        let mut i = 0;
        while i < queue.len() && pool.len() < self.max_pool {
            let t = queue[i].clone();
            i += 1;
            if !seen.insert(t.clone()) {
                continue;
            }
            if let Type::App(..) = &t {
                if let Some(ps) = self.ct.parents(&t) {
                    queue.extend(ps);
                }
            }
            if let Type::Sel(x, l) = &t {
                if let Some(u) = env.term(x) {
                    for n in class_types(u, &env) {
                        if let Some((lo, hi)) = self.ct.ttype(x, l, &n) {
                            subterms(&lo, &mut queue);
                            subterms(&hi, &mut queue);
                        }
                    }
                }
            }
            pool.push(t);
        }
        self.pools.insert(id, pool);
    }

    fn derive(&mut self, id: usize, s: &Type, t: &Type, depth: usize) -> bool {
        if depth == 0 {
            return false;
        }
        if s == t || s.is_nothing() {
            return true;
        }
        let key = (id, s.clone(), t.clone());
        if self.failed.get(&key).is_some_and(|d| *d >= depth) {
            return false;
        }
        let ok = self.derive_rules(id, s, t, depth);
        if !ok {
            let e = self.failed.entry(key).or_insert(0);
            *e = (*e).max(depth);
        }
        ok
    }

    fn derive_rules(&mut self, id: usize, s: &Type, t: &Type, depth: usize) -> bool {
        let env = self.envs[id].clone();
        let d = depth - 1;
        // GS-VAR
        if let Type::Var(x, _) = s {
            if env.tvar(x) == Some(t) {
                return true;
            }
        }
        // PS-CLASS
        if let Type::App(..) = s {
            if self.ct.parents(s).is_some_and(|ps| ps.contains(t)) {
                return true;
            }
        }
        // PS-INV
        if let (Type::App(c, ss), Type::App(b, ts)) = (s, t) {
            if c == b
                && ss.len() == ts.len()
                && ss.iter().zip(ts).all(|(a, b)| self.derive(id, a, b, d) && self.derive(id, b, a, d))
            {
                return true;
            }
        }
        // PS-AND2, LS-OR1
        if let Type::And(t1, t2) = t {
            if self.derive(id, s, t1, d) && self.derive(id, s, t2, d) {
                return true;
            }
        }
        if let Type::Or(s1, s2) = s {
            if self.derive(id, s1, t, d) && self.derive(id, s2, t, d) {
                return true;
            }
        }
        // PS-AND11/12, LS-OR21/22
        if let Type::And(s1, s2) = s {
            if self.derive(id, s1, t, d) || self.derive(id, s2, t, d) {
                return true;
            }
        }
        if let Type::Or(t1, t2) = t {
            if self.derive(id, s, t1, d) || self.derive(id, s, t2, d) {
                return true;
            }
        }
        // DS-SELTHIS1/2 and DS-SELOTHER1/2
        if let Type::Sel(x, l) = s {
            if self.sel_bounds(id, x, l, d).iter().any(|(_, hi)| hi == t) {
                return true;
            }
        }
        if let Type::Sel(x, l) = t {
            if self.sel_bounds(id, x, l, d).iter().any(|(lo, _)| lo == s) {
                return true;
            }
        }
        // GS-TRANS
        if d >= 1 {
            let pool = self.pools.get(&id).cloned().unwrap_or_default();
            for m in &pool {
                if m == s || m == t {
                    continue;
                }
                if self.derive(id, s, m, d) && self.derive(id, m, t, d) {
                    return true;
                }
            }
        }
        false
    }

    /// Bounds of `x.L` that the declarative selection rules can expose with
    /// the remaining depth.
    fn sel_bounds(&mut self, id: usize, x: &str, l: &str, d: usize) -> Vec<(Type, Type)> {
        let env = self.envs[id].clone();
        let Some(u) = env.term(x).cloned() else { return Vec::new() };
        if x == THIS {
            // Γ ⊢ this : C[X̄] and ttype(this.L, C[X̄]).
            return match &u {
                Type::App(..) => self.ct.ttype(THIS, l, &u).into_iter().collect(),
                _ => Vec::new(),
            };
        }
        // Γ_[x] ⊢ U <: C[Ū] with L declared directly in C.
        let trunc = env.truncate_at(x);
        let tid = self.env_id(&trunc);
        self.ensure_pool(tid, &[&u]);
        let mut out = Vec::new();
        let candidates: Vec<Type> = self.pools.get(&tid).cloned().unwrap_or_default();
        for n in candidates {
            let Type::App(c, args) = &n else { continue };
            let Some(td) = self.ct.get(c).and_then(|cd| cd.tdecl(l)).cloned() else { continue };
            if n != u && !self.derive(tid, &u, &n, d) {
                continue;
            }
            let Some(s) = self.ct.class_subst(c, args) else { continue };
            let s = s.with_term(THIS, x);
            out.push((td.lower.subst(&s), td.upper.subst(&s)));
        }
        out
    }
}

fn subterms(t: &Type, out: &mut Vec<Type>) {
    out.push(t.clone());
    match t {
        Type::App(_, args) => args.iter().for_each(|a| subterms(a, out)),
        Type::And(a, b) | Type::Or(a, b) => {
            subterms(a, out);
            subterms(b, out);
        }
        Type::Var(..) | Type::Sel(..) => {}
    }
}

fn class_types(t: &Type, env: &TypeEnv) -> Vec<Type> {
    let mut out = Vec::new();
    collect_class_types(t, env, &mut out, 0);
    out
}

fn collect_class_types(t: &Type, env: &TypeEnv, out: &mut Vec<Type>, depth: usize) {
    if depth > 16 {
        return;
    }
    match t {
        Type::App(..) => out.push(t.clone()),
        Type::Var(x, _) => {
            if let Some(n) = env.tvar(x) {
                collect_class_types(n, env, out, depth + 1);
            }
        }
        Type::And(a, b) | Type::Or(a, b) => {
            collect_class_types(a, env, out, depth + 1);
            collect_class_types(b, env, out, depth + 1);
        }
        Type::Sel(..) => {}
    }
}

fn class_names(t: &Type, env: &TypeEnv) -> Vec<Name> {
    class_types(t, env)
        .into_iter()
        .filter_map(|n| if let Type::App(c, _) = n { Some(c) } else { None })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_env, parse_program, parse_type};
    use crate::subtyping::is_subtype;

    #[test]
    fn finds_transitive_chain_the_algorithm_misses() {
        let ct = parse_program("trait A[S, T] { type M >: S <: T }", Some(Level::Ds)).unwrap().table;
        let env = parse_env("S <: Object, T <: Object, this : A[S, T], x : S").unwrap();
        let s = parse_type("S", &env).unwrap();
        let t = parse_type("T", &env).unwrap();
        assert!(!is_subtype(&ct, &env, &s, &t));
        let mut o = Oracle::new(&ct);
        assert_eq!(o.check(&env, &s, &t, 3), Verdict::Yes);
        assert_eq!(o.check(&env, &t, &s, 3), Verdict::Unknown);
    }

    #[test]
    fn class_chains_need_transitivity() {
        let ct = parse_program("class A {}; class B < A {}; class C < B {}", Some(Level::Ps)).unwrap().table;
        let env = TypeEnv::new();
        let mut o = Oracle::new(&ct);
        assert_eq!(o.check(&env, &Type::class("C"), &Type::class("A"), 1), Verdict::Unknown);
        assert_eq!(o.check(&env, &Type::class("C"), &Type::class("A"), 2), Verdict::Yes);
    }

    #[test]
    fn selections_on_other_variables() {
        let ct = parse_program("class X {}; trait HasA { type A }; class HasX < HasA { type A >: X <: X }", Some(Level::Ds))
            .unwrap()
            .table;
        let env = parse_env("h : HasX").unwrap();
        let mut o = Oracle::new(&ct);
        let ha = parse_type("h.A", &env).unwrap();
        assert_eq!(o.check(&env, &ha, &Type::class("X"), 2), Verdict::Yes);
        assert_eq!(o.check(&env, &Type::class("X"), &ha, 2), Verdict::Yes);
    }
}
