//! Acceptance suite: one PASS/FAIL line per criterion.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dsc_core::dot::eval::Outcome;
use dsc_core::dot::subtype::{bounded_dot_subtype, SearchOptions};
use dsc_core::dot::{alpha_eq_term, parse as dot_parse, print as dot_print, DEnv, DTerm};
use dsc_core::erasure::{erase_program, erase_type, ErasurePolicy};
use dsc_core::fjd::eval::{evaluate_expr, FjdOutcome};
use dsc_core::fjd::{parse as fjd_parse, FExpr};
use dsc_core::gen;
use dsc_core::parser::{parse_env, parse_expr, parse_program, parse_type};
use dsc_core::pipeline::{check_source, corpus_files, run_both, CORPUS_STEPS};
use dsc_core::subtyping::avoid::{avoid_rule, promote};
use dsc_core::subtyping::oracle::{Oracle, Verdict};
use dsc_core::subtyping::Algo;
use dsc_core::syntax::Span;
use dsc_core::translate::translate_program;
use dsc_core::typing::Typer;
use dsc_core::{Level, Type};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn corpus(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn read(rel: &str) -> String {
    fs::read_to_string(corpus(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn rules_of(src: &str) -> Vec<String> {
    match check_source(src, None) {
        Ok(_) => Vec::new(),
        Err(ds) => ds.into_iter().map(|d| format!("{}: {}", d.rule, d.message)).collect(),
    }
}

fn translation_golden() -> Check {
    let start = Instant::now();
    let tp = check_source(&read("ch3/sec3.2-translation.dsc"), None).map_err(|d| format!("{d:?}"))?;
    let term = translate_program(&tp).map_err(|d| d.to_string())?;
    let DTerm::Let(_, table, _) = &term else { return Err("translation is not a let".into()) };
    let golden = dot_parse::parse_term(&read("ch3/sec3.2-translation.dot")).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure!(alpha_eq_term(table, &golden), "table differs from golden:\n{}", dot_print::term_pretty(table));
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("alpha-equal to the rule-derived golden in {elapsed:?}"))
}

const LIN: &str = "//level: PS
class One {}; class Two {}
trait Base { def foo(): Object }
trait Sub1 < Base { def foo(): Object = new One }
trait Sub2 < Base { def foo(): Object = new Two }
class A < Object, Sub1, Sub2";

fn linearization() -> Check {
    let tp = check_source(LIN, None).map_err(|d| format!("{d:?}"))?;
    let ct = &tp.program.table;
    let lin = ct.linearize(&Type::class("A")).ok_or("no linearization")?;
    let names: Vec<String> = lin.iter().map(dsc_core::parser::pretty::type_str).collect();
    ensure!(names == ["A", "Sub2", "Sub1", "Base", "Object"], "L(A) = {names:?}");
    let imp = ct.mimpl("foo", &Type::class("A"));
    ensure!(imp == Some(Type::class("Sub2")), "mimpl(foo, A) = {imp:?}");
    let twice = "//level: PS
class One {}; class Two {}
trait T[X] {}; trait L < T[One]; trait R < T[Two]
class A < Object, L, R";
    let errs = rules_of(twice);
    ensure!(!errs.is_empty(), "two instantiations of T accepted");
    Ok(format!("L(A) = {}, mimpl(foo, A) = Sub2; T[One]/T[Two] rejected: {}", names.join(", "), errs[0]))
}

fn abstract_members() -> Check {
    let a = "//level: PS
trait Base { def foo(): Object = new Object() }
trait Sub < Base { def foo(): Object }
class A < Object, Sub {}";
    let errs = rules_of(a);
    let hit = errs.iter().find(|e| e.contains("mnames_abs(A) = {foo}"));
    ensure!(hit.is_some(), "class A diagnostics: {errs:?}");
    let b = read("ch5/sec5.3.2-reabstraction.dsc");
    let errs_b = rules_of(&b);
    ensure!(errs_b.is_empty(), "class B rejected: {errs_b:?}");
    Ok(format!("A rejected ({}); B accepted", hit.unwrap()))
}

fn accidental_override() -> Check {
    let bad = "//level: PS
class One {}; class Two {}
trait Base { def foo(): Object }
trait Sub1 < Base { def foo(): Object = new One }
trait Unrelated { def foo(): Object }
trait Sub2 < Unrelated { def foo(): Object = new Two }
class A < Object, Sub1, Sub2";
    let errs = rules_of(bad);
    ensure!(errs.iter().any(|e| e.starts_with("NO-ACCIDENTAL-OVERRIDE")), "diagnostics: {errs:?}");
    let good = rules_of(LIN);
    ensure!(good.is_empty(), "Base-common variant rejected: {good:?}");
    Ok("Unrelated variant rejected with NO-ACCIDENTAL-OVERRIDE; Base-common variant accepted".into())
}

fn member_selection() -> Check {
    let p = parse_program("class A {}; class B {}; trait L { def foo(): A }; trait R { def foo(): B }; trait Foo[X] { def foo(): X }", Some(Level::Pls))
        .map_err(|d| d.to_string())?;
    let t = Typer::new(&p.table);
    let env = parse_env("x : L & R, y : L | R, z : Foo[A] | Foo[B]").map_err(|d| d.to_string())?;
    let call = |v: &str| t.type_expr(&env, &parse_expr(&format!("{v}.foo()"), Level::Pls).unwrap(), Span::default());
    let want = parse_type("A & B", &env).unwrap();
    ensure!(call("x") == Ok(want.clone()), "x.foo() : {:?}", call("x"));
    ensure!(call("y").is_err(), "y : L | R selected foo: {:?}", call("y"));
    ensure!(call("z").is_err(), "z : Foo[A] | Foo[B] selected foo: {:?}", call("z"));
    let cond = check_source(&read("ch6/sec6.3-conditional.dsc"), None).map_err(|d| format!("{d:?}"))?;
    let ab = Type::or(Type::class("A"), Type::class("B"));
    ensure!(cond.main_type == Some(ab), "if : {:?}", cond.main_type);
    Ok("L&R gives A & B; L|R and Foo[A]|Foo[B] rejected; if gives A | B".into())
}

fn incompleteness() -> Check {
    let bad = "trait A[S <: Object, T <: Object] { type M >: S <: T; def id(x: S): T = x }";
    let errs = rules_of(bad);
    ensure!(errs.iter().any(|e| e.starts_with("DT-METHOD")), "id accepted or wrong rule: {errs:?}");
    let p = parse_program(bad, None).map_err(|d| d.to_string())?;
    let env = parse_env("S <: Object, T <: Object, this : A[S, T], x : S").map_err(|d| d.to_string())?;
    let ty = |s: &str| parse_type(s, &env).unwrap();
    let algo = Algo::new(&p.table, &env);
    ensure!(algo.sub(&ty("S"), &ty("this.M")), "S <: this.M fails");
    ensure!(algo.sub(&ty("this.M"), &ty("T")), "this.M <: T fails");
    ensure!(!algo.sub(&ty("S"), &ty("T")), "S <: T holds algorithmically");
    let good = rules_of(&read("ch7/sec7.3-conv-id.dsc"));
    ensure!(good.is_empty(), "conv/id rejected: {good:?}");
    let mut oracle = Oracle::new(&p.table);
    for fuel in 3..=6 {
        let v = oracle.check(&env, &ty("S"), &ty("T"), fuel);
        ensure!(v == Verdict::Yes, "oracle at fuel {fuel}: {v:?}");
    }
    Ok("id rejected (DT-METHOD); S <: this.M and this.M <: T hold; conv/id accepted; oracle Yes at fuel 3..6".into())
}

fn avoidance() -> Check {
    let src = "class X; class C[T] < Object { def c(): Object = new Object }
        class A < Object { type M >: X <: X }";
    let p = parse_program(src, None).map_err(|d| d.to_string())?;
    let env = parse_env("x : A").map_err(|d| d.to_string())?;
    let algo = Algo::new(&p.table, &env);
    let s = parse_type("C[x.M]", &env).unwrap();
    let up = promote(&algo, &s, "x");
    ensure!(up == Some(parse_type("C[X]", &env).unwrap()), "C[x.M] promotes to {up:?}");
    ensure!(avoid_rule(&algo, &s, "x") == Some("A-DEALIAS"), "rule {:?}", avoid_rule(&algo, &s, "x"));

    let src = "class Inv[Z] < Object; trait X; trait Y
        trait HasA { type A >: X | Y <: X & Y }
        trait HasB { type B >: X <: Y }";
    let p = parse_program(src, None).map_err(|d| d.to_string())?;
    let env = parse_env("a : HasA, b : HasB").map_err(|d| d.to_string())?;
    let algo = Algo::new(&p.table, &env);
    let s = parse_type("Inv[b.B]", &env).unwrap();
    let up = promote(&algo, &s, "b");
    ensure!(up == Some(Type::object()), "Inv[b.B] promotes to {up:?}");

    let st = gen::avoidance_suite(0xA701D, 500, 6);
    ensure!(st.cases == 500, "{} cases", st.cases);
    ensure!(st.leaks.is_empty(), "outputs mention the avoided variable: {:?}", st.leaks);
    ensure!(st.violations.is_empty(), "model refutes bounds: {:?}", st.violations);
    ensure!(st.undefined == 0, "{} instances without a result", st.undefined);
    Ok(format!(
        "C[x.M] -> C[X] (A-DEALIAS); Inv[b.B] -> Object; 500 random: lower Yes {} / Unknown {}, upper Yes {} / Unknown {}, 0 leaks, 0 model violations",
        st.lower_yes, st.lower_unknown, st.upper_yes, st.upper_unknown
    ))
}

fn soundness() -> Check {
    let start = Instant::now();
    let st = gen::soundness_suite(0x50D, 1000, 4, 3, 6);
    let elapsed = start.elapsed();
    ensure!(st.violations.is_empty(), "{} violations: {:?}", st.violations.len(), st.violations);
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "{} goals, {} accepted by the algorithm: oracle Yes {}, Unknown {}; 0 model violations; {elapsed:.1?}",
        st.cases, st.algo_true, st.oracle_yes, st.oracle_unknown
    ))
}

fn and_bind() -> Check {
    let env = DEnv::new();
    let s = dot_parse::parse_type("{this => X = this.Y} & {this => Y = ⊤}").unwrap();
    let t = dot_parse::parse_type("{this => X = ⊤}").unwrap();
    let with = bounded_dot_subtype(&env, &s, &t, 50, SearchOptions::default());
    let without = bounded_dot_subtype(&env, &s, &t, 50, SearchOptions { and_bind: false, ..SearchOptions::default() });
    ensure!(with == Verdict::Yes && without == Verdict::Unknown, "with AND-BIND {with:?}, without {without:?}");
    Ok("Yes with AND-BIND, Unknown without, fuel 50".into())
}

fn no_stuck() -> Check {
    let files = corpus_files(&corpus(""));
    ensure!(!files.is_empty(), "empty corpus");
    let (mut values, mut fuel) = (0, 0);
    for f in &files {
        let src = fs::read_to_string(f).map_err(|e| e.to_string())?;
        let r = run_both(&src, ErasurePolicy::Scala3, CORPUS_STEPS).map_err(|d| format!("{}: {d:?}", f.display()))?;
        match &r.dot.outcome {
            Outcome::Value(_) => values += 1,
            Outcome::OutOfFuel(_) => fuel += 1,
            Outcome::Stuck { .. } => return Err(format!("{}: {}", f.display(), r.dot.summary())),
        }
    }
    Ok(format!("{} programs: {values} values, {fuel} out of fuel, 0 stuck", files.len()))
}

fn erasure() -> Check {
    let p = parse_program("trait X; trait Y; trait Z < X", Some(Level::Ps)).map_err(|d| d.to_string())?;
    let env = dsc_core::TypeEnv::new();
    let er = |pol, s: &str| erase_type(pol, &p.table, &env, &parse_type(s, &env).unwrap()).unwrap();
    let got = [
        er(ErasurePolicy::Scala3, "(X & Y) & Z"),
        er(ErasurePolicy::Scala3, "X & (Y & Z)"),
        er(ErasurePolicy::BaseCount, "(X & Y) & Z"),
        er(ErasurePolicy::BaseCount, "X & (Y & Z)"),
    ];
    ensure!(got == ["Z", "X", "Z", "Z"], "triple-intersection erasures {got:?}");

    let laws = gen::erasure_law_suite(0xE4A5E, 1000);
    ensure!(laws.cases >= 1000, "{} cases", laws.cases);
    ensure!(laws.scala3_commutativity.is_empty(), "Scala3 not commutative: {:?}", laws.scala3_commutativity);
    ensure!(laws.basecount_commutativity.is_empty(), "BaseCount not commutative: {:?}", laws.basecount_commutativity);
    ensure!(laws.basecount_associativity.is_empty(), "BaseCount not associative: {:?}", laws.basecount_associativity);

    let tp = check_source(&read("appA/secA.3-bridges.dsc"), None).map_err(|d| format!("{d:?}"))?;
    let out = erase_program(ErasurePolicy::Scala3, &tp.program, false).map_err(|d| d.to_string())?;
    let golden = fjd_parse::parse_program(&read("appA/secA.3-bridges.fjd")).map_err(|e| e.to_string())?;
    for c in ["X", "Y", "L", "R", "A"] {
        ensure!(out.classes.get(c) == golden.classes.get(c), "{c} differs from the golden");
    }
    let call = FExpr::Call(Box::new(FExpr::New("A".into(), vec![])), "fooL".into(), vec![]);
    let run = evaluate_expr(&out, &call, 100);
    ensure!(run.outcome == FjdOutcome::Value(FExpr::New("Y".into(), vec![])), "new A().fooL(): {}", run.summary());

    let mut erased = 0;
    for f in corpus_files(&corpus("")) {
        let src = fs::read_to_string(&f).map_err(|e| e.to_string())?;
        let r = run_both(&src, ErasurePolicy::Scala3, CORPUS_STEPS).map_err(|d| format!("{d:?}"))?;
        let Some((prog, run)) = &r.erased else { continue };
        erased += 1;
        ensure!(prog.typecheck().is_ok(), "{}: erased program ill-typed: {:?}", f.display(), prog.typecheck());
        ensure!(
            !matches!(run.outcome, FjdOutcome::ClassCastFailure { .. } | FjdOutcome::Stuck { .. }),
            "{}: {}",
            f.display(),
            run.summary()
        );
        ensure!(r.dot_class() == r.fjd_class(), "{}: DOT {:?} vs FJD {:?}", f.display(), r.dot_class(), r.fjd_class());
    }
    Ok(format!(
        "(X & Y) & Z vs X & (Y & Z): Scala3 Z/X, BaseCount Z/Z; {} law cases hold; bridge golden reproduced; {erased} erased corpus programs typecheck, 0 cast failures; new A().fooL() -> new Y()",
        laws.cases
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("class-table translation golden", translation_golden),
        ("linearization and mimpl", linearization),
        ("abstract-member accounting", abstract_members),
        ("accidental override", accidental_override),
        ("intersection/union member selection", member_selection),
        ("algorithmic-subtyping incompleteness", incompleteness),
        ("avoidance goldens and randomized bounds", avoidance),
        ("algorithmic subtyping soundness", soundness),
        ("DOT AND-BIND extension", and_bind),
        ("no-stuck corpus evaluation", no_stuck),
        ("erasure goldens and policy laws", erasure),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
