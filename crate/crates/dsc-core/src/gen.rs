//! Seeded generators for the randomized suites: small class tables, typing
//! contexts and types, plus a set model used to refute subtyping claims.
//!
//! In the model every class or trait name denotes the set of its nominal
//! descendants (itself included), `Object` is the whole universe, `Nothing`
//! is empty, `&` and `|` are intersection and union. Type arguments are
//! ignored, which can only hide violations, never invent them. A type
//! variable may denote its bound or the empty set, and a selection `x.L`
//! either of its bounds. A claim `S <: T` is refuted when some such
//! valuation gives a set for `S` that is not contained in the one for `T`.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::erasure::{erase_type, ErasurePolicy};
use crate::parser::parse_program;
use crate::subtyping::avoid::avoid_bounds;
use crate::subtyping::oracle::{Oracle, Verdict};
use crate::subtyping::Algo;
use crate::syntax::*;
use crate::typing::check_program;

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape limits for a generated class table.
#[derive(Clone, Copy, Debug)]
pub struct TableShape {
    pub max_classes: usize,
    pub type_members: bool,
    pub generics: bool,
    pub level: Level,
}

impl TableShape {
    pub fn dependent(max_classes: usize) -> TableShape {
        TableShape { max_classes, type_members: true, generics: true, level: Level::Ds }
    }

    pub fn erasable(max_classes: usize) -> TableShape {
        TableShape { max_classes, type_members: false, generics: false, level: Level::Ps }
    }
}

struct Draft {
    name: Name,
    is_trait: bool,
    generic: bool,
    parent: Option<usize>,
    traits: Vec<usize>,
}

fn applied(drafts: &[Draft], i: usize, rng: &mut GenRng, pool: &[usize]) -> String {
    let d = &drafts[i];
    if !d.generic {
        return d.name.clone();
    }
    let plain: Vec<&str> = pool.iter().filter(|&&j| !drafts[j].generic).map(|&j| drafts[j].name.as_str()).collect();
    let arg = plain.choose(rng).copied().unwrap_or(OBJECT);
    format!("{}[{arg}]", d.name)
}

/// Source text for a random table. Not every draft is well formed; callers
/// go through [`random_table`], which retries until one checks.
pub fn table_source(rng: &mut GenRng, shape: TableShape) -> String {
    let n = rng.gen_range(1..=shape.max_classes);
    let mut drafts: Vec<Draft> = Vec::new();
    for i in 0..n {
        let is_trait = rng.gen_bool(0.4);
        let earlier_classes: Vec<usize> = (0..i).filter(|&j| !drafts[j].is_trait).collect();
        let earlier_traits: Vec<usize> = (0..i).filter(|&j| drafts[j].is_trait).collect();
        let parent = if is_trait || earlier_classes.is_empty() || rng.gen_bool(0.4) {
            None
        } else {
            earlier_classes.choose(rng).copied()
        };
        let k = rng.gen_range(0..=earlier_traits.len().min(2));
        let mut traits: Vec<usize> = earlier_traits.choose_multiple(rng, k).copied().collect();
        traits.sort();
        let generic = shape.generics && rng.gen_bool(0.25);
        drafts.push(Draft { name: format!("K{i}"), is_trait, generic, parent, traits });
    }
    let names: Vec<usize> = (0..n).collect();
    let mut out = format!("//level: {}\n", shape.level);
    for i in 0..n {
        let d = &drafts[i];
        let kw = if d.is_trait { "trait" } else { "class" };
        let tp = if d.generic { format!("[X{i} <: Object]") } else { String::new() };
        let mut supers = Vec::new();
        if !d.is_trait {
            supers.push(match d.parent {
                Some(p) => applied(&drafts, p, rng, &names[..i]),
                None => OBJECT.to_string(),
            });
        }
        for &t in &d.traits {
            supers.push(applied(&drafts, t, rng, &names[..i]));
        }
        let ext = if supers.is_empty() { String::new() } else { format!(" < {}", supers.join(", ")) };
        let mut body = Vec::new();
        if shape.type_members && rng.gen_bool(0.6) {
            let hi_pool: Vec<String> =
                std::iter::once(OBJECT.to_string()).chain((0..i).filter(|&j| !drafts[j].generic).map(|j| drafts[j].name.clone())).collect();
            let hi = hi_pool.choose(rng).unwrap().clone();
            // Traits may carry bounds that no class can satisfy.
            let lo = if d.is_trait && rng.gen_bool(0.3) {
                hi_pool.choose(rng).unwrap().clone()
            } else if rng.gen_bool(0.5) {
                hi.clone()
            } else {
                NOTHING.to_string()
            };
            body.push(format!("type L{i} >: {lo} <: {hi}"));
        }
        out.push_str(&format!("{kw} {}{tp}{ext} {{ {} }}\n", d.name, body.join("; ")));
    }
    out
}

/// A random table that passes the checker.
pub fn random_table(rng: &mut GenRng, shape: TableShape) -> ClassTable {
    loop {
        let src = table_source(rng, shape);
        if let Ok(p) = parse_program(&src, None) {
            if let Ok(tp) = check_program(&p) {
                return tp.program.table;
            }
        }
    }
}

fn class_names(ct: &ClassTable) -> Vec<&ClassDecl> {
    ct.classes.values().collect()
}

/// A closed class type for `c`, with `Object` for every type argument.
fn instance(c: &ClassDecl) -> Type {
    Type::App(c.name.clone(), c.tparams.iter().map(|_| Type::object()).collect())
}

/// A context with up to two type variables and two term variables.
pub fn random_env(rng: &mut GenRng, ct: &ClassTable) -> TypeEnv {
    let cs = class_names(ct);
    let pick = |rng: &mut GenRng| -> Type {
        match cs.choose(rng) {
            Some(c) if rng.gen_bool(0.85) => instance(c),
            _ => Type::object(),
        }
    };
    let mut env = TypeEnv::new();
    let ntv = rng.gen_range(0..=2);
    let tvs: Vec<(Name, Type)> = (0..ntv).map(|i| (format!("Y{i}"), pick(rng))).collect();
    if !tvs.is_empty() {
        env.bindings.push(Binding::Types(tvs));
    }
    for i in 0..rng.gen_range(0..=2) {
        let mut t = pick(rng);
        if rng.gen_bool(0.3) {
            t = Type::and(t, pick(rng));
        }
        env.push_term(&format!("x{i}"), t);
    }
    env
}

/// The atoms a type can be built from in `env`: class types, `Object`,
/// `Nothing`, type variables and every well-formed selection.
pub fn atoms(ct: &ClassTable, env: &TypeEnv) -> Vec<Type> {
    let mut out = vec![Type::object(), Type::nothing()];
    for c in class_names(ct) {
        out.push(instance(c));
    }
    for b in &env.bindings {
        if let Binding::Types(ps) = b {
            out.extend(ps.iter().map(|(y, _)| Type::Var(y.clone(), Flavor::Class)));
        }
    }
    let algo = Algo::new(ct, env);
    for x in env.term_names() {
        for l in labels(ct) {
            if algo.sel_bounds(&x, &l).is_some() {
                out.push(Type::Sel(x.clone(), l));
            }
        }
    }
    out
}

fn labels(ct: &ClassTable) -> BTreeSet<Name> {
    ct.classes.values().flat_map(|c| c.tdecls.iter().map(|d| d.label.clone())).collect()
}

/// A random type over `atoms` of depth at most `depth`.
pub fn random_type(rng: &mut GenRng, atoms: &[Type], depth: usize) -> Type {
    if depth == 0 || rng.gen_bool(0.45) {
        return atoms.choose(rng).unwrap().clone();
    }
    let a = random_type(rng, atoms, depth - 1);
    let b = random_type(rng, atoms, depth - 1);
    if rng.gen_bool(0.5) {
        Type::and(a, b)
    } else {
        Type::or(a, b)
    }
}

/// A pair biased towards goals that hold, so both verdicts get exercised.
pub fn random_pair(rng: &mut GenRng, atoms: &[Type], depth: usize) -> (Type, Type) {
    let s = random_type(rng, atoms, depth);
    let t = match rng.gen_range(0..4) {
        0 => random_type(rng, atoms, depth),
        1 => Type::or(s.clone(), random_type(rng, atoms, depth.saturating_sub(1))),
        2 => return (Type::and(s, random_type(rng, atoms, depth.saturating_sub(1))), random_type(rng, atoms, depth)),
        _ => atoms.choose(rng).unwrap().clone(),
    };
    (s, t)
}

/// The set model over one class table.
pub struct Model<'a> {
    ct: &'a ClassTable,
    universe: BTreeSet<Name>,
}

pub type Set = BTreeSet<Name>;

/// Choice of denotation for each free variable and selection.
pub type Valuation = BTreeMap<Type, bool>;

impl<'a> Model<'a> {
    pub fn new(ct: &'a ClassTable) -> Model<'a> {
        let mut universe: Set = ct.classes.keys().cloned().collect();
        universe.insert(OBJECT.to_string());
        universe.insert(BOOLEAN.to_string());
        Model { ct, universe }
    }

    fn name(&self, c: &str) -> Set {
        if c == OBJECT {
            return self.universe.clone();
        }
        if c == NOTHING {
            return Set::new();
        }
        self.universe.iter().filter(|d| *d == c || self.ct.ancestor_names(d).contains(c)).cloned().collect()
    }

    /// Denotation of `t`. Variables and selections read their choice from
    /// `val`: `true` picks the upper end.
    pub fn eval(&self, env: &TypeEnv, t: &Type, val: &Valuation) -> Option<Set> {
        Some(match t {
            Type::App(c, _) => self.name(c),
            Type::And(a, b) => self.eval(env, a, val)?.intersection(&self.eval(env, b, val)?).cloned().collect(),
            Type::Or(a, b) => self.eval(env, a, val)?.union(&self.eval(env, b, val)?).cloned().collect(),
            Type::Var(y, _) => {
                if *val.get(t).unwrap_or(&true) {
                    self.eval(env, env.tvar(y)?, val)?
                } else {
                    Set::new()
                }
            }
            Type::Sel(x, l) => {
                let (lo, hi) = Algo::new(self.ct, env).sel_bounds(x, l)?;
                self.eval(env, if *val.get(t).unwrap_or(&true) { &hi } else { &lo }, val)?
            }
        })
    }

    /// Whether the context can be realised: every selection's lower bound
    /// must fit under its upper bound.
    pub fn realisable(&self, env: &TypeEnv, atoms: &[Type]) -> bool {
        let algo = Algo::new(self.ct, env);
        atoms.iter().all(|a| match a {
            Type::Sel(x, l) => match algo.sel_bounds(x, l) {
                Some((lo, hi)) => {
                    let v = Valuation::new();
                    matches!((self.eval(env, &lo, &v), self.eval(env, &hi, &v)), (Some(a), Some(b)) if a.is_subset(&b))
                }
                None => false,
            },
            _ => true,
        })
    }

    /// A valuation under which `s ⊆ t` fails, if any.
    pub fn refute(&self, env: &TypeEnv, s: &Type, t: &Type) -> Option<Valuation> {
        let mut free = BTreeSet::new();
        free_atoms(s, &mut free);
        free_atoms(t, &mut free);
        let free: Vec<Type> = free.into_iter().collect();
        let k = free.len().min(12);
        for bits in 0u32..(1 << k) {
            let val: Valuation = free.iter().take(k).enumerate().map(|(i, a)| (a.clone(), bits & (1 << i) != 0)).collect();
            if let (Some(a), Some(b)) = (self.eval(env, s, &val), self.eval(env, t, &val)) {
                if !a.is_subset(&b) {
                    return Some(val);
                }
            }
        }
        None
    }

    /// Whether `s ⊆ t` holds under every valuation of the free atoms.
    pub fn entails(&self, env: &TypeEnv, s: &Type, t: &Type) -> bool {
        self.refute(env, s, t).is_none()
    }
}

fn free_atoms(t: &Type, out: &mut BTreeSet<Type>) {
    match t {
        Type::Var(..) | Type::Sel(..) => {
            out.insert(t.clone());
        }
        Type::App(_, args) => args.iter().for_each(|a| free_atoms(a, out)),
        Type::And(a, b) | Type::Or(a, b) => {
            free_atoms(a, out);
            free_atoms(b, out);
        }
    }
}

/// Counters for the soundness suite.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SoundnessStats {
    pub cases: usize,
    pub algo_true: usize,
    pub oracle_yes: usize,
    pub oracle_unknown: usize,
    /// Goals the algorithm accepts but the model refutes.
    pub violations: Vec<String>,
}

/// Runs `cases` random goals: for each one the algorithm accepts, asks the
/// oracle at `fuel` and tries to refute it in the set model.
pub fn soundness_suite(seed: u64, cases: usize, max_classes: usize, depth: usize, fuel: usize) -> SoundnessStats {
    let mut rng = rng(seed);
    let mut stats = SoundnessStats::default();
    while stats.cases < cases {
        let ct = random_table(&mut rng, TableShape::dependent(max_classes));
        let model = Model::new(&ct);
        let env = random_env(&mut rng, &ct);
        let atoms = atoms(&ct, &env);
        if !model.realisable(&env, &atoms) {
            continue;
        }
        let mut oracle = Oracle::new(&ct);
        for _ in 0..8 {
            if stats.cases == cases {
                break;
            }
            let (s, t) = random_pair(&mut rng, &atoms, depth);
            stats.cases += 1;
            if !Algo::new(&ct, &env).sub(&s, &t) {
                continue;
            }
            stats.algo_true += 1;
            match oracle.check(&env, &s, &t, fuel) {
                Verdict::Yes => stats.oracle_yes += 1,
                Verdict::Unknown => stats.oracle_unknown += 1,
            }
            if model.refute(&env, &s, &t).is_some() {
                stats.violations.push(format!("{} <: {}", crate::parser::pretty::type_str(&s), crate::parser::pretty::type_str(&t)));
            }
        }
    }
    stats
}

/// Counters for the avoidance suite.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AvoidanceStats {
    pub cases: usize,
    /// Outputs that still mention the avoided variable.
    pub leaks: Vec<String>,
    pub lower_yes: usize,
    pub lower_unknown: usize,
    pub upper_yes: usize,
    pub upper_unknown: usize,
    /// Bounds the model refutes.
    pub violations: Vec<String>,
    /// Instances where avoidance produced no answer.
    pub undefined: usize,
}

/// Generates types that mention `x0` and checks the avoidance bounds
/// `lo <: S <: hi` with the oracle and the model.
pub fn avoidance_suite(seed: u64, cases: usize, fuel: usize) -> AvoidanceStats {
    let mut rng = rng(seed);
    let mut stats = AvoidanceStats::default();
    let show = crate::parser::pretty::type_str;
    while stats.cases < cases {
        let ct = random_table(&mut rng, TableShape::dependent(4));
        let base = random_env(&mut rng, &ct);
        let Some(c) = class_names(&ct).into_iter().find(|c| !c.tdecls.is_empty() || !ct.tnames(&c.name).is_empty()) else {
            continue;
        };
        let env = base.with_term("x0", instance(c));
        let all = atoms(&ct, &env);
        let model = Model::new(&ct);
        if !model.realisable(&env, &all) {
            continue;
        }
        let sels: Vec<Type> = all.iter().filter(|a| a.mentions_term("x0")).cloned().collect();
        if sels.is_empty() {
            continue;
        }
        let generics: Vec<&ClassDecl> = class_names(&ct).into_iter().filter(|c| c.tparams.len() == 1).collect();
        let mut oracle = Oracle::new(&ct);
        for _ in 0..5 {
            if stats.cases == cases {
                break;
            }
            let mut s = random_type(&mut rng, &all, 2);
            let sel = sels.choose(&mut rng).unwrap().clone();
            s = match (rng.gen_range(0..3), generics.choose(&mut rng)) {
                (0, Some(g)) => Type::App(g.name.clone(), vec![sel]),
                (1, _) => Type::and(s, sel),
                _ => Type::or(sel, s),
            };
            let algo = Algo::new(&ct, &env);
            if algo.wf(&s).is_err() {
                continue;
            }
            stats.cases += 1;
            let Some((lo, hi)) = avoid_bounds(&algo, &s, "x0") else {
                stats.undefined += 1;
                continue;
            };
            for b in [&lo, &hi] {
                if b.mentions_term("x0") {
                    stats.leaks.push(format!("{} avoids to {}", show(&s), show(b)));
                }
            }
            match oracle.check(&env, &lo, &s, fuel) {
                Verdict::Yes => stats.lower_yes += 1,
                Verdict::Unknown => stats.lower_unknown += 1,
            }
            match oracle.check(&env, &s, &hi, fuel) {
                Verdict::Yes => stats.upper_yes += 1,
                Verdict::Unknown => stats.upper_unknown += 1,
            }
            if !model.entails(&env, &lo, &s) || !model.entails(&env, &s, &hi) {
                stats.violations.push(format!("{} .. {} .. {}", show(&lo), show(&s), show(&hi)));
            }
        }
    }
    stats
}

/// Counters for the erasure policy laws.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ErasureLawStats {
    pub cases: usize,
    pub scala3_commutativity: Vec<String>,
    pub basecount_commutativity: Vec<String>,
    pub basecount_associativity: Vec<String>,
    /// Cases where `s <: t` but the glb under some policy is not `|s|`.
    pub prefers_subtypes: Vec<String>,
}

fn random_tree(rng: &mut GenRng, names: &[Name], depth: usize) -> Type {
    if depth == 0 || rng.gen_bool(0.35) {
        return Type::class(names.choose(rng).unwrap());
    }
    Type::and(random_tree(rng, names, depth - 1), random_tree(rng, names, depth - 1))
}

fn operands(t: &Type, out: &mut Vec<Type>) {
    match t {
        Type::And(a, b) => {
            operands(a, out);
            operands(b, out);
        }
        _ => out.push(t.clone()),
    }
}

/// Checks the policy laws on random intersection trees over random
/// hierarchies of at most six classes and traits.
pub fn erasure_law_suite(seed: u64, cases: usize) -> ErasureLawStats {
    let mut rng = rng(seed);
    let mut stats = ErasureLawStats::default();
    let env = TypeEnv::new();
    let show = crate::parser::pretty::type_str;
    while stats.cases < cases {
        let ct = random_table(&mut rng, TableShape::erasable(6));
        let mut names: Vec<Name> = ct.classes.keys().cloned().collect();
        names.push(OBJECT.to_string());
        for _ in 0..10 {
            stats.cases += 1;
            let a = random_tree(&mut rng, &names, 2);
            let b = random_tree(&mut rng, &names, 2);
            let c = random_tree(&mut rng, &names, 1);
            let er = |p: ErasurePolicy, t: &Type| erase_type(p, &ct, &env, t).ok();
            let ab = Type::and(a.clone(), b.clone());
            let ba = Type::and(b.clone(), a.clone());
            if er(ErasurePolicy::Scala3, &ab) != er(ErasurePolicy::Scala3, &ba) {
                stats.scala3_commutativity.push(show(&ab));
            }
            if er(ErasurePolicy::BaseCount, &ab) != er(ErasurePolicy::BaseCount, &ba) {
                stats.basecount_commutativity.push(show(&ab));
            }
            let left = Type::and(ab.clone(), c.clone());
            let right = Type::and(a.clone(), Type::and(b.clone(), c.clone()));
            if er(ErasurePolicy::BaseCount, &left) != er(ErasurePolicy::BaseCount, &right) {
                stats.basecount_associativity.push(show(&left));
            }
            // Any flattening order of the operands gives the same answer.
            let mut ops = Vec::new();
            operands(&left, &mut ops);
            ops.shuffle(&mut rng);
            let flat = Type::and_all(ops);
            if er(ErasurePolicy::BaseCount, &flat) != er(ErasurePolicy::BaseCount, &left) {
                stats.basecount_associativity.push(show(&flat));
            }
            let (sn, tn) = (names.choose(&mut rng).unwrap(), names.choose(&mut rng).unwrap());
            let (s, t) = (Type::class(sn), Type::class(tn));
            if sn != tn && Algo::new(&ct, &env).sub(&s, &t) && ct.is_trait(sn) == ct.is_trait(tn) {
                for p in [ErasurePolicy::Scala3, ErasurePolicy::BaseCount] {
                    let want = er(p, &s);
                    if er(p, &Type::and(s.clone(), t.clone())) != want || er(p, &Type::and(t.clone(), s.clone())) != want {
                        stats.prefers_subtypes.push(format!("{p}: {} & {}", show(&s), show(&t)));
                    }
                }
            }
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_deterministic_per_seed() {
        let a = table_source(&mut rng(7), TableShape::dependent(4));
        let b = table_source(&mut rng(7), TableShape::dependent(4));
        assert_eq!(a, b);
    }

    #[test]
    fn model_matches_nominal_subtyping() {
        let p = parse_program("class A; class B < A; trait T; class C < B, T", None).unwrap();
        let m = Model::new(&p.table);
        let env = TypeEnv::new();
        let v = Valuation::new();
        assert_eq!(m.eval(&env, &Type::class("A"), &v).unwrap(), ["A", "B", "C"].map(String::from).into());
        assert_eq!(m.eval(&env, &Type::and(Type::class("T"), Type::class("A")), &v).unwrap(), ["C".to_string()].into());
        assert!(m.entails(&env, &Type::class("C"), &Type::and(Type::class("B"), Type::class("T"))));
        assert!(m.refute(&env, &Type::class("A"), &Type::class("B")).is_some());
    }

    #[test]
    fn selections_range_over_their_bounds() {
        let p = parse_program("class A; class B < A; trait H { type L >: B <: A }", None).unwrap();
        let m = Model::new(&p.table);
        let env = TypeEnv::new().with_term("h", Type::class("H"));
        let sel = Type::Sel("h".into(), "L".into());
        assert!(m.entails(&env, &Type::class("B"), &sel));
        assert!(m.entails(&env, &sel, &Type::class("A")));
        assert!(m.refute(&env, &Type::class("A"), &sel).is_some());
    }

    #[test]
    fn model_refutes_rejected_goals() {
        // The refuter has teeth: it refutes most goals the algorithm rejects.
        let mut r = rng(3);
        let (mut rejected, mut refuted) = (0, 0);
        while rejected < 200 {
            let ct = random_table(&mut r, TableShape::dependent(4));
            let env = random_env(&mut r, &ct);
            let atoms = atoms(&ct, &env);
            let m = Model::new(&ct);
            if !m.realisable(&env, &atoms) {
                continue;
            }
            let (s, t) = random_pair(&mut r, &atoms, 2);
            if !Algo::new(&ct, &env).sub(&s, &t) {
                rejected += 1;
                refuted += m.refute(&env, &s, &t).is_some() as usize;
            }
        }
        assert!(refuted > 100, "{refuted}");
    }

    #[test]
    fn small_soundness_run() {
        let s = soundness_suite(1, 60, 4, 3, 3);
        assert_eq!(s.cases, 60);
        assert!(s.violations.is_empty(), "{:?}", s.violations);
    }
}

