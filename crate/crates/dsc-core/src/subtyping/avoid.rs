//! Variable avoidance: approximate a type mentioning `x` by bounds that do not.

use super::Algo;
use crate::syntax::*;

/// Promotion `S ⇑x T` (the upper approximation).
pub fn promote(algo: &Algo<'_>, s: &Type, x: &str) -> Option<Type> {
    avoid(algo, s, x, 0).map(|(_, hi)| hi)
}

/// Demotion `S ⇓x T` (the lower approximation).
pub fn demote(algo: &Algo<'_>, s: &Type, x: &str) -> Option<Type> {
    avoid(algo, s, x, 0).map(|(lo, _)| lo)
}

/// `S ⇕x T1 .. T2`. The name of the rule that applied at the root is
/// available through [`avoid_rule`].
pub fn avoid_bounds(algo: &Algo<'_>, s: &Type, x: &str) -> Option<(Type, Type)> {
    avoid(algo, s, x, 0)
}

pub fn avoid_rule(algo: &Algo<'_>, s: &Type, x: &str) -> Option<&'static str> {
    if !s.mentions_term(x) {
        return Some("A-ABSENT");
    }
    match s {
        Type::And(..) => Some("A-AND"),
        Type::Or(..) => Some("A-OR"),
        Type::Sel(..) => Some("A-SEL"),
        Type::App(..) => {
            let args = dealias_args(algo, s, x, 0)?;
            Some(if args.is_some() { "A-DEALIAS" } else { "A-SUPER" })
        }
        Type::Var(..) => None,
    }
}

const MAX_DEPTH: usize = 64;

fn avoid(algo: &Algo<'_>, s: &Type, x: &str, depth: usize) -> Option<(Type, Type)> {
    if depth > MAX_DEPTH {
        return None;
    }
    if !s.mentions_term(x) {
        return Some((s.clone(), s.clone()));
    }
    match s {
        Type::And(a, b) => {
            let (a1, a2) = avoid(algo, a, x, depth + 1)?;
            let (b1, b2) = avoid(algo, b, x, depth + 1)?;
            Some((Type::and(a1, b1), Type::and(a2, b2)))
        }
        Type::Or(a, b) => {
            let (a1, a2) = avoid(algo, a, x, depth + 1)?;
            let (b1, b2) = avoid(algo, b, x, depth + 1)?;
            Some((Type::or(a1, b1), Type::or(a2, b2)))
        }
        Type::Sel(y, l) => {
            debug_assert_eq!(y, x);
            let (s1, s2) = algo.sel_bounds(y, l)?;
            let (lo, _) = avoid(algo, &s1, x, depth + 1)?;
            let (_, hi) = avoid(algo, &s2, x, depth + 1)?;
            Some((lo, hi))
        }
        Type::App(c, _) => match dealias_args(algo, s, x, depth)? {
            Some(args) => Some((Type::App(c.clone(), args.clone()), Type::App(c.clone(), args))),
            None => {
                // A-SUPER, generalised to several parents: promote their
                // intersection, leaving out Object when other parents exist.
                let mut ps = algo.ct.parents(s)?;
                if ps.len() > 1 {
                    ps.retain(|p| !p.is_object());
                }
                if ps.is_empty() {
                    return Some((Type::nothing(), Type::object()));
                }
                let (_, hi) = avoid(algo, &Type::and_all(ps), x, depth + 1)?;
                Some((Type::nothing(), hi))
            }
        },
        Type::Var(..) => Some((s.clone(), s.clone())),
    }
}

/// For A-DEALIAS: `Some(args)` when every argument avoids to equivalent
/// bounds, `None` when some argument does not (A-SUPER applies).
fn dealias_args(algo: &Algo<'_>, s: &Type, x: &str, depth: usize) -> Option<Option<Vec<Type>>> {
    let Type::App(_, args) = s else { return Some(None) };
    let mut out = Vec::new();
    for a in args {
        let (lo, hi) = avoid(algo, a, x, depth + 1)?;
        if !algo.sub(&hi, &lo) {
            return Some(None);
        }
        out.push(lo);
    }
    Some(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_env, parse_program, parse_type};

    fn setup(src: &str, env: &str) -> (ClassTable, TypeEnv) {
        (parse_program(src, Some(Level::Ds)).unwrap().table, parse_env(env).unwrap())
    }

    #[test]
    fn dealias_example() {
        let (ct, env) = setup("class C[Y] {}; class A[X] { type M = X }", "X <: Object, x : A[X]");
        let algo = Algo::new(&ct, &env);
        let t = parse_type("C[x.M]", &env).unwrap();
        assert_eq!(promote(&algo, &t, "x"), Some(parse_type("C[X]", &env).unwrap()));
        assert_eq!(avoid_rule(&algo, &t, "x"), Some("A-DEALIAS"));
    }

    #[test]
    fn hasb_counterexample_promotes_to_object() {
        let src = "class Inv[X] < Object; trait X; trait Y
            trait HasA { type A >: X | Y <: X & Y }
            trait HasB { type B >: X <: Y }";
        let (ct, env) = setup(src, "a : HasA, b : HasB");
        let algo = Algo::new(&ct, &env);
        let t = parse_type("Inv[b.B]", &env).unwrap();
        assert_eq!(promote(&algo, &t, "b"), Some(Type::object()));
        assert_eq!(avoid_rule(&algo, &t, "b"), Some("A-SUPER"));
    }

    #[test]
    fn selection_uses_bounds() {
        let (ct, env) = setup("class P {}; class Q < P {}; trait H { type L >: Q <: P }", "h : H");
        let algo = Algo::new(&ct, &env);
        let t = parse_type("h.L & Object", &env).unwrap();
        assert_eq!(avoid_bounds(&algo, &t, "h"), Some((parse_type("Q & Object", &env).unwrap(), parse_type("P & Object", &env).unwrap())));
    }
}
