//! Invariants checked on generated inputs: DOT alpha-equivalence and
//! printing, FJD subtyping, erasure well-typedness and source round-trips.

use std::fs;
use std::path::Path;

use proptest::prelude::*;

use dsc_core::dot::{alpha_eq_type, parse as dot_parse, print as dot_print, DType};
use dsc_core::erasure::{erase_table, ErasurePolicy};
use dsc_core::gen;
use dsc_core::parser::{parse_program, pretty};
use dsc_core::pipeline::corpus_files;

fn dot_type() -> impl Strategy<Value = DType> {
    let vars = prop_oneof![Just("x"), Just("y"), Just("z")];
    let labels = prop_oneof![Just("A"), Just("B")];
    let leaf = prop_oneof![Just(DType::Top), Just(DType::Bot), (vars, labels).prop_map(|(x, l)| DType::sel(x, l))];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (prop_oneof![Just("A"), Just("B")], inner.clone(), inner.clone()).prop_map(|(l, a, b)| DType::Mem(l.into(), Box::new(a), Box::new(b))),
            (prop_oneof![Just("x"), Just("y"), Just("z")], inner.clone()).prop_map(|(z, b)| DType::rec(z, b)),
            (prop_oneof![Just("x"), Just("y")], inner.clone(), inner.clone())
                .prop_map(|(p, a, r)| DType::Fun("m".into(), vec![(p.into(), a)], Box::new(r))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| DType::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| DType::or(a, b)),
        ]
    })
}

/// Renames every binder to a fresh name, numbering from `start`.
fn freshen(t: &DType, next: &mut usize) -> DType {
    match t {
        DType::Top | DType::Bot | DType::Sel(..) => t.clone(),
        DType::Mem(l, a, b) => DType::Mem(l.clone(), Box::new(freshen(a, next)), Box::new(freshen(b, next))),
        DType::Rec(z, b) => {
            *next += 1;
            let z2 = format!("v{next}");
            DType::rec(&z2, freshen(&b.rename(z, &z2), next))
        }
        DType::Fun(m, ps, r) => {
            let (p, a) = &ps[0];
            *next += 1;
            let p2 = format!("v{next}");
            DType::Fun(m.clone(), vec![(p2.clone(), freshen(a, next))], Box::new(freshen(&r.rename(p, &p2), next)))
        }
        DType::And(a, b) => DType::and(freshen(a, next), freshen(b, next)),
        DType::Or(a, b) => DType::or(freshen(a, next), freshen(b, next)),
    }
}

proptest! {
    #[test]
    fn alpha_equivalence_is_an_equivalence(t in dot_type(), u in dot_type()) {
        let (v1, v2) = (freshen(&t, &mut 0), freshen(&t, &mut 100));
        prop_assert!(alpha_eq_type(&t, &t));
        prop_assert!(alpha_eq_type(&t, &v1) && alpha_eq_type(&v1, &t));
        prop_assert!(alpha_eq_type(&v1, &v2));
        prop_assert_eq!(alpha_eq_type(&t, &u), alpha_eq_type(&u, &t));
        if alpha_eq_type(&t, &u) {
            prop_assert!(alpha_eq_type(&v1, &u));
        }
    }

    #[test]
    fn dot_types_print_and_parse_back(t in dot_type()) {
        let shown = dot_print::type_str(&t);
        let back = dot_parse::parse_type(&shown).unwrap();
        prop_assert!(alpha_eq_type(&back, &t), "{}", shown);
    }

    #[test]
    fn erased_tables_typecheck_and_subtyping_is_a_partial_order(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let ct = gen::random_table(&mut rng, gen::TableShape::erasable(6));
        for policy in ErasurePolicy::ALL {
            let p = erase_table(policy, &ct, false).unwrap();
            prop_assert!(p.typecheck().is_ok(), "{policy}: {:?}", p.typecheck());
            let names: Vec<&String> = p.classes.keys().collect();
            for a in &names {
                prop_assert!(p.sub(a, a));
                for b in &names {
                    if a != b && p.sub(a, b) {
                        prop_assert!(!p.sub(b, a), "{a} and {b} are mutual subtypes");
                    }
                    for c in &names {
                        if p.sub(a, b) && p.sub(b, c) {
                            prop_assert!(p.sub(a, c));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn corpus_programs_round_trip() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    for f in corpus_files(&root) {
        let src = fs::read_to_string(&f).unwrap();
        let p = parse_program(&src, None).unwrap();
        let again = parse_program(&pretty::program_str(&p), None).unwrap();
        assert_eq!(pretty::program_str(&again), pretty::program_str(&p), "{}", f.display());
        assert_eq!(again.table.classes.keys().collect::<Vec<_>>(), p.table.classes.keys().collect::<Vec<_>>());
        assert_eq!(again.main, p.main, "{}", f.display());
    }
}
