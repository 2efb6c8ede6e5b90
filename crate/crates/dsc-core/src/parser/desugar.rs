//! Method-call desugaring for DS: `e0.m[T](e)` becomes a block that binds
//! every non-variable receiver and argument to a fresh `$n`.

use crate::syntax::*;

#[derive(Default)]
pub struct Fresh {
    next: usize,
}

impl Fresh {
    pub fn name(&mut self) -> Name {
        let n = format!("${}", self.next);
        self.next += 1;
        n
    }
}

pub fn desugar_program(p: &Program) -> Program {
    let mut fresh = Fresh::default();
    let mut out = p.clone();
    for c in out.table.classes.values_mut() {
        for m in &mut c.methods {
            if let Some(b) = &m.body {
                m.body = Some(desugar_expr(b, &mut fresh));
            }
        }
    }
    out.main = p.main.as_ref().map(|e| desugar_expr(e, &mut fresh));
    out
}

pub fn desugar_expr(e: &Expr, fresh: &mut Fresh) -> Expr {
    match e {
        Expr::Var(_) | Expr::Bool(_) | Expr::Invoke { .. } => e.clone(),
        Expr::Get(r, f) => Expr::Get(Box::new(desugar_expr(r, fresh)), f.clone()),
        Expr::New(t, args) => Expr::New(t.clone(), args.iter().map(|a| desugar_expr(a, fresh)).collect()),
        Expr::If(c, a, b) => Expr::If(
            Box::new(desugar_expr(c, fresh)),
            Box::new(desugar_expr(a, fresh)),
            Box::new(desugar_expr(b, fresh)),
        ),
        Expr::Block(x, ann, a, b) => {
            Expr::Block(x.clone(), ann.clone(), Box::new(desugar_expr(a, fresh)), Box::new(desugar_expr(b, fresh)))
        }
        Expr::Call { recv, method, targs, args } => {
            // Receiver first, then arguments left to right.
            let mut binds: Vec<(Name, Expr)> = Vec::new();
            let name_of = |e: &Expr, fresh: &mut Fresh, binds: &mut Vec<(Name, Expr)>| -> Name {
                match e {
                    Expr::Var(x) => x.clone(),
                    other => {
                        let d = desugar_expr(other, fresh);
                        let x = fresh.name();
                        binds.push((x.clone(), d));
                        x
                    }
                }
            };
            let r = name_of(recv, fresh, &mut binds);
            let xs: Vec<Name> = args.iter().map(|a| name_of(a, fresh, &mut binds)).collect();
            let mut body = Expr::Invoke { recv: r, method: method.clone(), targs: targs.clone(), args: xs };
            for (x, d) in binds.into_iter().rev() {
                body = Expr::Block(x, None, Box::new(d), Box::new(body));
            }
            body
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(recv: Expr, m: &str, args: Vec<Expr>) -> Expr {
        Expr::Call { recv: Box::new(recv), method: m.into(), targs: vec![], args }
    }

    #[test]
    fn variables_are_not_rebound() {
        let e = call(Expr::var("x"), "m", vec![Expr::var("y")]);
        let d = desugar_expr(&e, &mut Fresh::default());
        assert_eq!(d, Expr::Invoke { recv: "x".into(), method: "m".into(), targs: vec![], args: vec!["y".into()] });
    }

    #[test]
    fn receiver_is_bound_before_arguments() {
        let inner = call(Expr::var("a"), "f", vec![]);
        let e = call(inner.clone(), "m", vec![Expr::New(Type::object(), vec![])]);
        let d = desugar_expr(&e, &mut Fresh::default());
        let expected = Expr::Block(
            "$0".into(),
            None,
            Box::new(Expr::Invoke { recv: "a".into(), method: "f".into(), targs: vec![], args: vec![] }),
            Box::new(Expr::Block(
                "$1".into(),
                None,
                Box::new(Expr::New(Type::object(), vec![])),
                Box::new(Expr::Invoke { recv: "$0".into(), method: "m".into(), targs: vec![], args: vec!["$1".into()] }),
            )),
        );
        assert_eq!(d, expected);
    }
}
