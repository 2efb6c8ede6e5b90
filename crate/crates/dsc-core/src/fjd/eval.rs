//! Call-by-value, left-to-right small-step reduction. A failing downcast is
//! reported as [`FjdOutcome::ClassCastFailure`], distinct from a stuck term.

use super::*;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FjdOutcome {
    Value(FExpr),
    ClassCastFailure { from: Name, to: Name },
    Stuck { term: FExpr, reason: String },
    OutOfFuel(FExpr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FjdEvaluation {
    pub outcome: FjdOutcome,
    pub steps: usize,
}

impl FjdEvaluation {
    pub fn summary(&self) -> String {
        match &self.outcome {
            FjdOutcome::Value(v) => format!("value {} after {} steps", print::expr_str(v), self.steps),
            FjdOutcome::ClassCastFailure { from, to } => {
                format!("class cast failure after {} steps: {from} is not a {to}", self.steps)
            }
            FjdOutcome::Stuck { term, reason } => {
                format!("stuck after {} steps: {reason}\n  at {}", self.steps, print::expr_str(term))
            }
            FjdOutcome::OutOfFuel(_) => format!("out of fuel after {} steps", self.steps),
        }
    }
}

enum Step {
    Next(FExpr),
    Cast(Name, Name),
    Stuck(String),
}

fn step(p: &FjdProgram, e: &FExpr) -> Step {
    // Reduce the leftmost non-value subterm first.
    let sub = |e: &FExpr, rebuild: &dyn Fn(FExpr) -> FExpr| match step(p, e) {
        Step::Next(e2) => Step::Next(rebuild(e2)),
        other => other,
    };
    match e {
        FExpr::Var(x) => Step::Stuck(format!("free variable {x}")),
        FExpr::New(c, args) => match args.iter().position(|a| !a.is_value()) {
            Some(i) => sub(&args[i], &|a| {
                let mut args = args.clone();
                args[i] = a;
                FExpr::New(c.clone(), args)
            }),
            None => Step::Stuck("already a value".into()),
        },
        FExpr::Field(e0, f) if !e0.is_value() => sub(e0, &|e| FExpr::Field(Box::new(e), f.clone())),
        FExpr::Field(e0, f) => {
            let FExpr::New(c, vs) = &**e0 else { unreachable!() };
            match p.fields(c).iter().position(|(_, g)| g == f) {
                Some(i) if i < vs.len() => Step::Next(vs[i].clone()),
                _ => Step::Stuck(format!("{c} has no field {f}")),
            }
        }
        FExpr::Call(e0, m, args) if !e0.is_value() => sub(e0, &|e| FExpr::Call(Box::new(e), m.clone(), args.clone())),
        FExpr::Call(e0, m, args) => {
            if let Some(i) = args.iter().position(|a| !a.is_value()) {
                return sub(&args[i], &|a| {
                    let mut args = args.clone();
                    args[i] = a;
                    FExpr::Call(e0.clone(), m.clone(), args)
                });
            }
            let FExpr::New(c, _) = &**e0 else { unreachable!() };
            match p.resolve(m, c) {
                Ok(md) if md.params.len() == args.len() => {
                    let mut s: Vec<(Name, FExpr)> = vec![("this".into(), (**e0).clone())];
                    s.extend(md.params.iter().map(|(_, x)| x.clone()).zip(args.iter().cloned()));
                    Step::Next(md.body.as_ref().unwrap().subst(&s))
                }
                Ok(_) => Step::Stuck(format!("arity mismatch calling {m}")),
                Err(why) => Step::Stuck(why),
            }
        }
        FExpr::Cast(c, e0) if !e0.is_value() => sub(e0, &|e| FExpr::Cast(c.clone(), Box::new(e))),
        FExpr::Cast(c, e0) => {
            let FExpr::New(d, _) = &**e0 else { unreachable!() };
            if p.sub(d, c) {
                Step::Next((**e0).clone())
            } else {
                Step::Cast(d.clone(), c.clone())
            }
        }
    }
}

pub fn evaluate_expr(p: &FjdProgram, e: &FExpr, max_steps: usize) -> FjdEvaluation {
    let mut e = e.clone();
    let mut steps = 0;
    loop {
        if e.is_value() {
            return FjdEvaluation { outcome: FjdOutcome::Value(e), steps };
        }
        if steps == max_steps {
            return FjdEvaluation { outcome: FjdOutcome::OutOfFuel(e), steps };
        }
        match step(p, &e) {
            Step::Next(e2) => {
                e = e2;
                steps += 1;
            }
            Step::Cast(from, to) => return FjdEvaluation { outcome: FjdOutcome::ClassCastFailure { from, to }, steps },
            Step::Stuck(reason) => return FjdEvaluation { outcome: FjdOutcome::Stuck { term: e, reason }, steps },
        }
    }
}

/// Evaluates `main`; a program without one is stuck.
pub fn evaluate(p: &FjdProgram, max_steps: usize) -> FjdEvaluation {
    match &p.main {
        Some(e) => evaluate_expr(p, e, max_steps),
        None => FjdEvaluation {
            outcome: FjdOutcome::Stuck { term: FExpr::var("main"), reason: "no main expression".into() },
            steps: 0,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_program;
    use super::*;

    fn run(src: &str) -> FjdOutcome {
        evaluate(&parse_program(src).unwrap(), 1000).outcome
    }

    #[test]
    fn upcast_succeeds() {
        assert_eq!(run("class C < Object {} main = (Object) new C();"), FjdOutcome::Value(FExpr::New("C".into(), vec![])));
    }

    #[test]
    fn unrelated_downcast_fails() {
        assert_eq!(
            run("class X < Object {} class Y < Object {} main = (Y) new X();"),
            FjdOutcome::ClassCastFailure { from: "X".into(), to: "Y".into() }
        );
    }

    #[test]
    fn fields_methods_and_defaults() {
        let src = "interface I { Object get() { return this.self(); } Object self(); }
                   class P < Object, I { Object a; P(Object a) { super(); this.a = a; } Object self() { return this.a; } }
                   class Q < Object {}
                   main = new P(new Q()).get();";
        assert_eq!(run(src), FjdOutcome::Value(FExpr::New("Q".into(), vec![])));
    }

    #[test]
    fn arguments_left_to_right() {
        let src = "class X < Object {} class Y < Object {}
                   class P < Object { Object a; Object b; P(Object a, Object b) { super(); this.a = a; this.b = b; } }
                   main = new P((Y) new X(), (X) new Y());";
        assert_eq!(run(src), FjdOutcome::ClassCastFailure { from: "X".into(), to: "Y".into() });
    }

    #[test]
    fn divergence_and_stuck() {
        let src = "class L < Object { Object go() { return this.go(); } } main = new L().go();";
        assert!(matches!(run(src), FjdOutcome::OutOfFuel(_)));
        assert!(matches!(run("class L < Object {} main = new L().go();"), FjdOutcome::Stuck { .. }));
    }
}
