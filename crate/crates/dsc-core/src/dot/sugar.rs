//! Derived forms and their expansion into core DOT.
//!
//! * `let x = s in u` becomes `{_ => apply(x) = u}.apply(s)`.
//! * `m() : U` becomes `m(_ : ⊤) : U`, and `t.m()` becomes `t.m({_ => })`.
//! * `m(x̄, y : T) : U` curries into `m(x̄) : {_ => apply(y : T) : U}`, with
//!   the body wrapped in the matching `apply` object, and
//!   `t.m(x̄, y)` becomes `t.m(x̄).apply(y)`.

use super::*;

/// `{_ => apply(x) = u}`.
pub fn lambda(x: &str, ty: Option<DType>, u: DTerm) -> DTerm {
    DTerm::Obj("_".into(), vec![Decl::Def("apply".into(), vec![(x.to_string(), ty)], None, u)])
}

/// `(x : S) => U`, i.e. `{_ => apply(x : S) : U}`.
pub fn fun_type(x: &str, s: DType, u: DType) -> DType {
    DType::rec("_", DType::Fun("apply".into(), vec![(x.to_string(), s)], Box::new(u)))
}

pub fn let_in(x: &str, s: DTerm, u: DTerm) -> DTerm {
    DTerm::Let(x.to_string(), Box::new(s), Box::new(u))
}

/// Nested lets, outermost binding first.
pub fn lets(binds: Vec<(Name, DTerm)>, body: DTerm) -> DTerm {
    binds.into_iter().rev().fold(body, |acc, (x, s)| let_in(&x, s, acc))
}

pub fn expand_type(t: &DType) -> DType {
    match t {
        DType::Top | DType::Bot | DType::Sel(..) => t.clone(),
        DType::Mem(l, a, b) => DType::Mem(l.clone(), Box::new(expand_type(a)), Box::new(expand_type(b))),
        DType::And(a, b) => DType::and(expand_type(a), expand_type(b)),
        DType::Or(a, b) => DType::or(expand_type(a), expand_type(b)),
        DType::Rec(z, b) => DType::rec(z, expand_type(b)),
        DType::Fun(m, ps, r) => expand_fun(m, ps, r),
    }
}

fn expand_fun(m: &str, ps: &[(Name, DType)], r: &DType) -> DType {
    match ps.len() {
        0 => DType::Fun(m.to_string(), vec![("_".into(), DType::Top)], Box::new(expand_type(r))),
        1 => DType::Fun(m.to_string(), vec![(ps[0].0.clone(), expand_type(&ps[0].1))], Box::new(expand_type(r))),
        n => {
            let (y, ty) = &ps[n - 1];
            let inner = fun_type(y, ty.clone(), r.clone());
            expand_fun(m, &ps[..n - 1], &inner)
        }
    }
}

pub fn expand_term(t: &DTerm) -> DTerm {
    match t {
        DTerm::Var(_) => t.clone(),
        DTerm::Obj(z, ds) => DTerm::Obj(z.clone(), ds.iter().map(expand_decl).collect()),
        DTerm::Let(x, s, u) => {
            DTerm::call(lambda(x, None, expand_term(u)), "apply", vec![expand_term(s)])
        }
        DTerm::Call(r, m, args) => expand_call(expand_term(r), m, args),
    }
}

fn expand_call(r: DTerm, m: &str, args: &[DTerm]) -> DTerm {
    match args.len() {
        0 => DTerm::call(r, m, vec![DTerm::empty()]),
        1 => DTerm::call(r, m, vec![expand_term(&args[0])]),
        n => {
            let head = expand_call(r, m, &args[..n - 1]);
            DTerm::call(head, "apply", vec![expand_term(&args[n - 1])])
        }
    }
}

pub fn expand_decl(d: &Decl) -> Decl {
    match d {
        Decl::Tag(l, t) => Decl::Tag(l.clone(), expand_type(t)),
        Decl::Def(m, ps, r, body) => expand_def(m, ps, r.as_ref(), expand_term(body)),
    }
}

fn expand_def(m: &str, ps: &[(Name, Option<DType>)], r: Option<&DType>, body: DTerm) -> Decl {
    match ps.len() {
        0 => Decl::Def(m.to_string(), vec![("_".into(), Some(DType::Top))], r.map(expand_type), body),
        1 => Decl::Def(m.to_string(), vec![(ps[0].0.clone(), ps[0].1.as_ref().map(expand_type))], r.map(expand_type), body),
        n => {
            let (y, ty) = &ps[n - 1];
            // The curried result needs both the last parameter type and the
            // result type; otherwise it is left unascribed.
            let inner_ty = match (ty, r) {
                (Some(ty), Some(r)) => Some(expand_type(&fun_type(y, ty.clone(), r.clone()))),
                _ => None,
            };
            let inner = DTerm::Obj(
                "_".into(),
                vec![Decl::Def("apply".into(), vec![(y.clone(), ty.as_ref().map(expand_type))], r.map(expand_type), body)],
            );
            expand_def(m, &ps[..n - 1], inner_ty.as_ref(), inner)
        }
    }
}

/// True when the term uses no derived forms.
pub fn is_core_term(t: &DTerm) -> bool {
    match t {
        DTerm::Var(_) => true,
        DTerm::Let(..) => false,
        DTerm::Call(r, _, args) => args.len() == 1 && is_core_term(r) && is_core_term(&args[0]),
        DTerm::Obj(_, ds) => ds.iter().all(|d| match d {
            Decl::Tag(_, t) => is_core_type(t),
            Decl::Def(_, ps, r, b) => {
                ps.len() == 1
                    && ps[0].1.as_ref().is_none_or(is_core_type)
                    && r.as_ref().is_none_or(is_core_type)
                    && is_core_term(b)
            }
        }),
    }
}

pub fn is_core_type(t: &DType) -> bool {
    match t {
        DType::Top | DType::Bot | DType::Sel(..) => true,
        DType::Mem(_, a, b) | DType::And(a, b) | DType::Or(a, b) => is_core_type(a) && is_core_type(b),
        DType::Rec(_, b) => is_core_type(b),
        DType::Fun(_, ps, r) => ps.len() == 1 && is_core_type(&ps[0].1) && is_core_type(r),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::{parse_term, parse_type};
    use super::*;

    #[test]
    fn let_expands_to_apply() {
        let t = parse_term("let x = s in u").unwrap();
        let want = parse_term("{_ => apply(x) = u}.apply(s)").unwrap();
        assert!(alpha_eq_term(&expand_term(&t), &want));
    }

    #[test]
    fn nullary_call_passes_unit() {
        let t = parse_term("t.m()").unwrap();
        assert!(alpha_eq_term(&expand_term(&t), &parse_term("t.m({_ => })").unwrap()));
    }

    #[test]
    fn multi_parameter_methods_curry() {
        let t = parse_type("m(x : ⊤, y : x.A) : y.B").unwrap();
        let want = parse_type("m(x : ⊤) : {_ => apply(y : x.A) : y.B}").unwrap();
        assert!(alpha_eq_type(&expand_type(&t), &want));
        let c = parse_term("t.m(a, b, c)").unwrap();
        let want = parse_term("t.m(a).apply(b).apply(c)").unwrap();
        assert!(alpha_eq_term(&expand_term(&c), &want));
    }

    #[test]
    fn expansion_is_idempotent_on_core() {
        let t = expand_term(&parse_term("let x = {z => m(a, b) = a} in x.m(x, x)").unwrap());
        assert!(is_core_term(&t));
        assert_eq!(expand_term(&t), t);
    }

    #[test]
    fn alias_is_a_member_with_equal_bounds() {
        assert_eq!(parse_type("X = ⊤").unwrap(), parse_type("X : ⊤ .. ⊤").unwrap());
    }
}
