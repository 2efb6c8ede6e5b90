//! Store-based small-step reduction. Evaluation contexts are
//! `[] | [].m(t) | v.m([])`, so the receiver is reduced before the argument.
//! Object literals allocate a fresh store variable `#n` and substitute it
//! for the self variable.

use indexmap::IndexMap;

use super::sugar::expand_term;
use super::*;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoreEntry {
    pub decls: Vec<Decl>,
    /// The method whose body produced this object literal, if any. The
    /// translation names constructors `newC`, so this identifies the class
    /// of a constructed value.
    pub origin: Option<Name>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Store {
    entries: IndexMap<Name, StoreEntry>,
    pending: Option<Name>,
}

impl Store {
    pub fn new() -> Store {
        Store::default()
    }

    pub fn get(&self, v: &str) -> Option<&StoreEntry> {
        self.entries.get(v)
    }

    pub fn contains(&self, v: &str) -> bool {
        self.entries.contains_key(v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &StoreEntry)> {
        self.entries.iter()
    }

    /// The class a value was constructed as, when it came from a `newC`
    /// constructor.
    pub fn class_of(&self, v: &str) -> Option<&str> {
        self.get(v)?.origin.as_deref()?.strip_prefix("new")
    }

    fn alloc(&mut self, z: &str, ds: &[Decl]) -> Name {
        let v = format!("#{}", self.entries.len());
        let decls = ds.iter().map(|d| rename_decl(d, z, &v)).collect();
        let origin = self.pending.take();
        self.entries.insert(v.clone(), StoreEntry { decls, origin });
        v
    }
}

fn rename_decl(d: &Decl, from: &str, to: &str) -> Decl {
    // Renaming inside a one-element object reuses the term renamer.
    match DTerm::Obj("$self".into(), vec![d.clone()]).rename(from, to) {
        DTerm::Obj(_, mut ds) => ds.remove(0),
        _ => unreachable!(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Value(Name),
    Next(DTerm),
    Stuck(String),
}

/// One reduction step of a core term.
pub fn step(store: &mut Store, t: &DTerm) -> Step {
    match t {
        DTerm::Var(x) if store.contains(x) => Step::Value(x.clone()),
        DTerm::Var(x) => Step::Stuck(format!("unbound variable {x}")),
        DTerm::Obj(z, ds) => Step::Next(DTerm::Var(store.alloc(z, ds))),
        DTerm::Let(..) => Step::Stuck("`let` must be expanded before evaluation".into()),
        DTerm::Call(_, m, args) if args.len() != 1 => {
            Step::Stuck(format!("call to {m} with {} arguments must be expanded before evaluation", args.len()))
        }
        DTerm::Call(r, m, args) => match step(store, r) {
            Step::Next(r2) => Step::Next(DTerm::Call(Box::new(r2), m.clone(), args.clone())),
            Step::Stuck(why) => Step::Stuck(why),
            Step::Value(v1) => match step(store, &args[0]) {
                Step::Next(a2) => Step::Next(DTerm::Call(r.clone(), m.clone(), vec![a2])),
                Step::Stuck(why) => Step::Stuck(why),
                Step::Value(v2) => {
                    let found = store.get(&v1).and_then(|e| {
                        e.decls.iter().find_map(|d| match d {
                            Decl::Def(n, ps, _, body) if n == m && ps.len() == 1 => Some((ps[0].0.clone(), body.clone())),
                            _ => None,
                        })
                    });
                    match found {
                        Some((x, body)) => {
                            let body = body.rename(&x, &v2);
                            if matches!(body, DTerm::Obj(..)) {
                                store.pending = Some(m.clone());
                            }
                            Step::Next(body)
                        }
                        None => Step::Stuck(format!("{v1} has no method {m}")),
                    }
                }
            },
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Value(Name),
    Stuck { term: DTerm, reason: String },
    OutOfFuel(DTerm),
}

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub outcome: Outcome,
    pub store: Store,
    pub steps: usize,
}

impl Evaluation {
    pub fn is_stuck(&self) -> bool {
        matches!(self.outcome, Outcome::Stuck { .. })
    }

    /// One-line description of the outcome.
    pub fn summary(&self) -> String {
        match &self.outcome {
            Outcome::Value(v) => {
                let cls = self.store.class_of(v).map(|c| format!(" (new {c})")).unwrap_or_default();
                format!("value {v}{cls} after {} steps, store size {}", self.steps, self.store.len())
            }
            Outcome::Stuck { term, reason } => {
                format!("stuck after {} steps: {reason}\n  at {}", self.steps, print::term_str(term))
            }
            Outcome::OutOfFuel(_) => format!("out of fuel after {} steps", self.steps),
        }
    }
}

/// Expands derived forms and reduces for at most `max_steps` steps.
pub fn evaluate(t: &DTerm, max_steps: usize) -> Evaluation {
    let mut store = Store::new();
    let mut t = expand_term(t);
    let mut steps = 0;
    loop {
        if let DTerm::Var(x) = &t {
            if store.contains(x) {
                return Evaluation { outcome: Outcome::Value(x.clone()), store, steps };
            }
        }
        if steps == max_steps {
            return Evaluation { outcome: Outcome::OutOfFuel(t), store, steps };
        }
        match step(&mut store, &t) {
            Step::Next(t2) => {
                t = t2;
                steps += 1;
            }
            Step::Value(v) => return Evaluation { outcome: Outcome::Value(v), store, steps },
            Step::Stuck(reason) => return Evaluation { outcome: Outcome::Stuck { term: t, reason }, store, steps },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_term;
    use super::*;

    fn run(src: &str, n: usize) -> Evaluation {
        evaluate(&parse_term(src).unwrap(), n)
    }

    #[test]
    fn identity_returns_the_allocated_argument() {
        let e = run("{_ => m(x) = x}.m({_ => })", 10);
        assert_eq!(e.outcome, Outcome::Value("#1".into()));
        assert_eq!(e.steps, 3);
    }

    #[test]
    fn empty_object_is_a_value_after_one_step() {
        let e = run("{_ => }", 10);
        assert_eq!(e.outcome, Outcome::Value("#0".into()));
        assert_eq!(e.steps, 1);
    }

    #[test]
    fn zero_fuel_on_a_redex() {
        assert!(matches!(run("{_ => }", 0).outcome, Outcome::OutOfFuel(_)));
    }

    #[test]
    fn missing_method_is_stuck() {
        let e = run("{_ => }.m({_ => })", 10);
        assert!(matches!(e.outcome, Outcome::Stuck { ref reason, .. } if reason.contains("no method m")));
    }

    #[test]
    fn self_reference_and_let() {
        let e = run("let o = {z => me() = z, L = ⊤} in o.me().me()", 50);
        let Outcome::Value(v) = &e.outcome else { panic!("{:?}", e.outcome) };
        // `{_ => apply(o) = ..}` is #0, the object is #1.
        assert_eq!(v, "#1");
        assert!(matches!(&e.store.get("#1").unwrap().decls[0], Decl::Def(_, _, _, DTerm::Var(x)) if x == "#1"));
    }

    #[test]
    fn divergence_runs_out_of_fuel() {
        let e = run("{z => loop(x) = z.loop(x)}.loop({_ => })", 1000);
        assert!(matches!(e.outcome, Outcome::OutOfFuel(_)));
        assert_eq!(e.steps, 1000);
    }

    #[test]
    fn constructor_origin_is_recorded() {
        let e = run("{ct => newC(p) = {this => a() = p}}.newC({_ => })", 20);
        let Outcome::Value(v) = &e.outcome else { panic!() };
        assert_eq!(e.store.class_of(v), Some("C"));
    }
}
