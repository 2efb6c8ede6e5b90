//! Bounded search for DOT subtyping derivations.
//!
//! Rules: TOP, BOT, REFL (up to alpha), AND11/AND12/AND2, OR21/OR22/OR1,
//! TYP, FUN, SEL1/SEL2, BINDX, BIND1 and TRANS. Selection premises use
//! strict typing `Γ_[x] ⊢ x ;! T`, built from VAR, VARUNPACK and SUB (no
//! VARPACK), optionally closed under AND-I′.
//!
//! AND-BIND, `{z ⇒ T1} ∧ {z ⇒ T2} <: {z ⇒ T1 ∧ T2}`, is applied on the left
//! of a goal as one step: the recursive conjuncts are merged under a shared
//! self variable and the search continues from the merged type.

use std::collections::{HashMap, HashSet};

use super::sugar::expand_type;
use super::*;
pub use crate::subtyping::oracle::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub and_bind: bool,
    pub and_i_prime: bool,
    pub pool_limit: usize,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions { and_bind: true, and_i_prime: true, pool_limit: 24 }
    }
}

/// `Γ ⊢ S <: T` with a derivation of depth at most `fuel`.
pub fn bounded_dot_subtype(env: &DEnv, s: &DType, t: &DType, fuel: usize, opts: SearchOptions) -> Verdict {
    Search::new(opts).check(env, s, t, fuel)
}

pub struct Search {
    opts: SearchOptions,
    envs: Vec<DEnv>,
    pools: HashMap<usize, Vec<DType>>,
    failed: HashMap<(usize, DType, DType), usize>,
}

impl Search {
    pub fn new(opts: SearchOptions) -> Search {
        Search { opts, envs: Vec::new(), pools: HashMap::new(), failed: HashMap::new() }
    }

    pub fn check(&mut self, env: &DEnv, s: &DType, t: &DType, fuel: usize) -> Verdict {
        let (s, t) = (expand_type(s), expand_type(t));
        let env = DEnv { bindings: env.bindings.iter().map(|(x, t)| (x.clone(), expand_type(t))).collect() };
        let id = self.env_id(&env, &[&s, &t]);
        for d in 1..=fuel {
            if self.derive(id, &s, &t, d) {
                return Verdict::Yes;
            }
        }
        Verdict::Unknown
    }

    fn env_id(&mut self, env: &DEnv, seeds: &[&DType]) -> usize {
        if let Some(i) = self.envs.iter().position(|e| e == env) {
            return i;
        }
        self.envs.push(env.clone());
        let id = self.envs.len() - 1;
        let pool = self.build_pool(env, seeds);
        self.pools.insert(id, pool);
        id
    }

    /// Middle types for TRANS: well-scoped subterms of the seeds and of the
    /// context, plus selections on context variables.
    fn build_pool(&self, env: &DEnv, seeds: &[&DType]) -> Vec<DType> {
        let mut queue = vec![DType::Top, DType::Bot];
        for s in seeds {
            subterms(s, &mut queue);
        }
        for (x, _) in &env.bindings {
            for v in views(env, x, self.opts.and_i_prime) {
                subterms(&v, &mut queue);
                for l in member_labels(&v) {
                    queue.push(DType::sel(x, &l));
                }
            }
        }
        let mut seen = HashSet::new();
        let mut pool = Vec::new();
        for t in queue {
            if pool.len() >= self.opts.pool_limit {
                break;
            }
            if dot_wf(env, &t) && seen.insert(t.clone()) {
                pool.push(t);
            }
        }
        pool
    }

    fn derive(&mut self, id: usize, s: &DType, t: &DType, depth: usize) -> bool {
        if depth == 0 {
            return false;
        }
        // TOP, BOT, REFL
        if *t == DType::Top || *s == DType::Bot || alpha_eq_type(s, t) {
            return true;
        }
        let key = (id, s.clone(), t.clone());
        if self.failed.get(&key).is_some_and(|d| *d >= depth) {
            return false;
        }
        let ok = self.rules(id, s, t, depth - 1);
        if !ok {
            let e = self.failed.entry(key).or_insert(0);
            *e = (*e).max(depth);
        }
        ok
    }

    fn rules(&mut self, id: usize, s: &DType, t: &DType, d: usize) -> bool {
        // AND2, OR1
        if let DType::And(t1, t2) = t {
            if self.derive(id, s, t1, d) && self.derive(id, s, t2, d) {
                return true;
            }
        }
        if let DType::Or(s1, s2) = s {
            if self.derive(id, s1, t, d) && self.derive(id, s2, t, d) {
                return true;
            }
        }
        // AND11, AND12, OR21, OR22
        if let DType::And(s1, s2) = s {
            if self.derive(id, s1, t, d) || self.derive(id, s2, t, d) {
                return true;
            }
        }
        if let DType::Or(t1, t2) = t {
            if self.derive(id, s, t1, d) || self.derive(id, s, t2, d) {
                return true;
            }
        }
        // TYP
        if let (DType::Mem(l1, s1, u1), DType::Mem(l2, s2, u2)) = (s, t) {
            if l1 == l2 && self.derive(id, s2, s1, d) && self.derive(id, u1, u2, d) {
                return true;
            }
        }
        // FUN
        if let (DType::Fun(m1, p1, r1), DType::Fun(m2, p2, r2)) = (s, t) {
            if m1 == m2 && p1.len() == 1 && p2.len() == 1 && self.derive(id, &p2[0].1, &p1[0].1, d) {
                let env = self.envs[id].clone();
                let x = fresh(&env, &[s, t]);
                let (r1, r2) = (r1.rename(&p1[0].0, &x), r2.rename(&p2[0].0, &x));
                let inner = self.env_id(&env.with(&x, p2[0].1.clone()), &[&r1, &r2]);
                if self.derive(inner, &r1, &r2, d) {
                    return true;
                }
            }
        }
        // BINDX, BIND1
        if let DType::Rec(z1, b1) = s {
            let env = self.envs[id].clone();
            let z = fresh(&env, &[s, t]);
            let b1 = b1.rename(z1, &z);
            if let DType::Rec(z2, b2) = t {
                let b2 = b2.rename(z2, &z);
                let inner = self.env_id(&env.with(&z, b1.clone()), &[&b1, &b2]);
                if self.derive(inner, &b1, &b2, d) {
                    return true;
                }
            }
            let inner = self.env_id(&env.with(&z, b1.clone()), &[&b1, t]);
            if self.derive(inner, &b1, t, d) {
                return true;
            }
        }
        // AND-BIND
        if self.opts.and_bind {
            if let Some(merged) = merge_recs(&self.envs[id], s, t) {
                if self.derive(id, &merged, t, d) {
                    return true;
                }
            }
        }
        // SEL1, SEL2
        if let DType::Sel(x, l) = s {
            let goal = DType::Mem(l.clone(), Box::new(DType::Bot), Box::new(t.clone()));
            if self.strict(id, x, &goal, d) {
                return true;
            }
        }
        if let DType::Sel(x, l) = t {
            let goal = DType::Mem(l.clone(), Box::new(s.clone()), Box::new(DType::Top));
            if self.strict(id, x, &goal, d) {
                return true;
            }
        }
        // TRANS
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

    /// `Γ_[x] ⊢ x ;! goal`: some strict view of `x` is a subtype of `goal`.
    fn strict(&mut self, id: usize, x: &str, goal: &DType, d: usize) -> bool {
        let env = self.envs[id].truncate_at(x);
        if !env.contains(x) {
            return false;
        }
        let vs = views(&env, x, self.opts.and_i_prime);
        let tid = self.env_id(&env, &[goal]);
        vs.iter().any(|v| self.derive(tid, v, goal, d))
    }
}

/// Types `x` has under VAR and VARUNPACK, closed under projection of
/// intersections (SUB with AND11/AND12). With AND-I′, the intersection of
/// the unpacked views is added.
pub fn views(env: &DEnv, x: &str, and_i_prime: bool) -> Vec<DType> {
    let Some(t) = env.get(x) else { return Vec::new() };
    let mut out: Vec<DType> = Vec::new();
    let mut queue = vec![t.clone()];
    while let Some(v) = queue.pop() {
        if out.len() >= 32 || out.contains(&v) {
            continue;
        }
        match &v {
            DType::Rec(z, b) => queue.push(b.rename(z, x)),
            DType::And(a, b) => {
                queue.push((**b).clone());
                queue.push((**a).clone());
            }
            _ => {}
        }
        out.push(v);
    }
    if and_i_prime {
        let atoms: Vec<DType> = out.iter().filter(|v| !matches!(v, DType::And(..) | DType::Rec(..))).cloned().collect();
        if atoms.len() >= 2 {
            let all = DType::and_all(atoms);
            if !out.contains(&all) {
                out.push(all);
            }
        }
    }
    out
}

fn member_labels(t: &DType) -> Vec<Name> {
    match t {
        DType::Mem(l, ..) => vec![l.clone()],
        _ => Vec::new(),
    }
}

fn subterms(t: &DType, out: &mut Vec<DType>) {
    out.push(t.clone());
    match t {
        DType::Mem(_, a, b) | DType::And(a, b) | DType::Or(a, b) => {
            subterms(a, out);
            subterms(b, out);
        }
        DType::Fun(_, ps, r) => {
            ps.iter().for_each(|(_, p)| subterms(p, out));
            subterms(r, out);
        }
        DType::Rec(_, b) => subterms(b, out),
        DType::Top | DType::Bot | DType::Sel(..) => {}
    }
}

fn fresh(env: &DEnv, avoid: &[&DType]) -> Name {
    let mut n = env.bindings.len();
    loop {
        let z = format!("z{n}");
        if !env.contains(&z) && avoid.iter().all(|t| !t.free_vars().contains(&z)) {
            return z;
        }
        n += 1;
    }
}

fn conjuncts(t: &DType, out: &mut Vec<DType>) {
    match t {
        DType::And(a, b) => {
            conjuncts(a, out);
            conjuncts(b, out);
        }
        _ => out.push(t.clone()),
    }
}

/// Merges two or more recursive conjuncts of `s` into one.
fn merge_recs(env: &DEnv, s: &DType, t: &DType) -> Option<DType> {
    if !matches!(s, DType::And(..)) {
        return None;
    }
    let mut cs = Vec::new();
    conjuncts(s, &mut cs);
    let recs = cs.iter().filter(|c| matches!(c, DType::Rec(..))).count();
    if recs < 2 {
        return None;
    }
    let z = fresh(env, &[s, t]);
    let mut bodies = Vec::new();
    let mut rest = Vec::new();
    for c in cs {
        match c {
            DType::Rec(y, b) => bodies.push(b.rename(&y, &z)),
            other => rest.push(other),
        }
    }
    let mut items = vec![DType::rec(&z, DType::and_all(bodies))];
    items.extend(rest);
    Some(DType::and_all(items))
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_type;
    use super::*;

    fn ty(s: &str) -> DType {
        parse_type(s).unwrap()
    }

    const NO_AND_BIND: SearchOptions = SearchOptions { and_bind: false, and_i_prime: true, pool_limit: 24 };

    #[test]
    fn top_at_fuel_one() {
        let env = DEnv::new();
        assert_eq!(bounded_dot_subtype(&env, &ty("{z => A = ⊥}"), &DType::Top, 1, SearchOptions::default()), Verdict::Yes);
    }

    #[test]
    fn and_bind_goal() {
        let env = DEnv::new();
        let s = ty("{this => X = this.Y} & {this => Y = ⊤}");
        let t = ty("{this => X = ⊤}");
        assert_eq!(bounded_dot_subtype(&env, &s, &t, 50, SearchOptions::default()), Verdict::Yes);
        assert_eq!(bounded_dot_subtype(&env, &s, &t, 50, NO_AND_BIND), Verdict::Unknown);
    }

    #[test]
    fn selections_read_bounds() {
        let env = DEnv::new().with("x", ty("{z => (A : ⊥ .. z.B) & (B = ⊤)}"));
        let opts = SearchOptions::default();
        assert_eq!(bounded_dot_subtype(&env, &ty("x.A"), &ty("x.B"), 6, opts), Verdict::Yes);
        assert_eq!(bounded_dot_subtype(&env, &ty("x.B"), &ty("x.A"), 6, opts), Verdict::Unknown);
        assert_eq!(bounded_dot_subtype(&env, &ty("⊤"), &ty("x.B"), 6, opts), Verdict::Yes);
    }

    #[test]
    fn methods_are_contravariant_in_parameters() {
        let env = DEnv::new();
        let opts = SearchOptions::default();
        assert_eq!(bounded_dot_subtype(&env, &ty("m(x : ⊤) : ⊥"), &ty("m(y : ⊥) : ⊤"), 4, opts), Verdict::Yes);
        assert_eq!(bounded_dot_subtype(&env, &ty("m(x : ⊥) : ⊤"), &ty("m(y : ⊤) : ⊤"), 4, opts), Verdict::Unknown);
    }

    #[test]
    fn weakening_preserves_yes() {
        let env = DEnv::new().with("x", ty("{z => L = ⊤}"));
        let (s, t) = (ty("⊤"), ty("x.L"));
        let opts = SearchOptions::default();
        assert_eq!(bounded_dot_subtype(&env, &s, &t, 5, opts), Verdict::Yes);
        assert_eq!(bounded_dot_subtype(&env.with("y", DType::Bot), &s, &t, 5, opts), Verdict::Yes);
    }
}
