//! Pretty printer whose output parses back to the same AST.

use std::fmt::Write;

use crate::syntax::*;

pub fn type_str(t: &Type) -> String {
    let mut s = String::new();
    write_type(&mut s, t, 0);
    s
}

// Precedence: 0 = union context, 1 = intersection context, 2 = atom.
fn write_type(out: &mut String, t: &Type, prec: u8) {
    match t {
        Type::Var(x, _) => out.push_str(x),
        Type::App(c, args) => {
            out.push_str(c);
            if !args.is_empty() {
                out.push('[');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_type(out, a, 0);
                }
                out.push(']');
            }
        }
        Type::Sel(x, l) => {
            let _ = write!(out, "{x}.{l}");
        }
        Type::And(a, b) => {
            let paren = prec > 1;
            if paren {
                out.push('(');
            }
            write_type(out, a, 1);
            out.push_str(" & ");
            write_type(out, b, 2);
            if paren {
                out.push(')');
            }
        }
        Type::Or(a, b) => {
            let paren = prec > 0;
            if paren {
                out.push('(');
            }
            write_type(out, a, 0);
            out.push_str(" | ");
            write_type(out, b, 1);
            if paren {
                out.push(')');
            }
        }
    }
}

fn targs_str(ts: &[Type]) -> String {
    if ts.is_empty() {
        String::new()
    } else {
        format!("[{}]", ts.iter().map(type_str).collect::<Vec<_>>().join(", "))
    }
}

pub fn expr_str(e: &Expr) -> String {
    match e {
        Expr::Var(x) => x.clone(),
        Expr::Get(r, f) => format!("{}.{f}", recv_str(r)),
        Expr::Invoke { recv, method, targs, args } => {
            format!("{recv}.{method}{}({})", targs_str(targs), args.join(", "))
        }
        Expr::Call { recv, method, targs, args } => format!(
            "{}.{method}{}({})",
            recv_str(recv),
            targs_str(targs),
            args.iter().map(expr_str).collect::<Vec<_>>().join(", ")
        ),
        Expr::New(t, args) => {
            format!("new {}({})", type_atom_str(t), args.iter().map(expr_str).collect::<Vec<_>>().join(", "))
        }
        Expr::Bool(b) => b.to_string(),
        Expr::If(c, a, b) => format!("if {} then {} else {}", expr_str(c), expr_str(a), expr_str(b)),
        Expr::Block(..) => {
            let mut parts = Vec::new();
            let mut cur = e;
            while let Expr::Block(x, ann, a, b) = cur {
                match ann {
                    Some(t) => parts.push(format!("val {x}: {} = {}", type_str(t), expr_str(a))),
                    None => parts.push(format!("val {x} = {}", expr_str(a))),
                }
                cur = b;
            }
            parts.push(expr_str(cur));
            format!("{{ {} }}", parts.join("; "))
        }
    }
}

fn type_atom_str(t: &Type) -> String {
    let mut s = String::new();
    write_type(&mut s, t, 2);
    s
}

fn recv_str(e: &Expr) -> String {
    match e {
        Expr::If(..) => format!("({})", expr_str(e)),
        _ => expr_str(e),
    }
}

fn tparams_str(ps: &[TParam]) -> String {
    if ps.is_empty() {
        return String::new();
    }
    let items: Vec<String> = ps.iter().map(|p| format!("{} <: {}", p.name, type_str(&p.bound))).collect();
    format!("[{}]", items.join(", "))
}

fn params_str(ps: &[(Name, Type)]) -> String {
    ps.iter().map(|(x, t)| format!("{x}: {}", type_str(t))).collect::<Vec<_>>().join(", ")
}

pub fn method_str(m: &MethodDecl) -> String {
    let mut s = format!("def {}{}({}): {}", m.name, tparams_str(&m.tparams), params_str(&m.params), type_str(&m.result));
    if let Some(b) = &m.body {
        let _ = write!(s, " = {}", expr_str(b));
    }
    s
}

pub fn class_str(c: &ClassDecl) -> String {
    let mut s = String::new();
    match c.kind {
        ClassKind::Class => {
            let _ = write!(s, "class {}{}({})", c.name, tparams_str(&c.tparams), params_str(&c.vparams));
            let (p, args) = c.parent.clone().unwrap_or((Type::object(), Vec::new()));
            let _ = write!(s, " < {}({})", type_atom_str(&p), args.join(", "));
            for t in &c.traits {
                let _ = write!(s, ", {}", type_atom_str(t));
            }
        }
        ClassKind::Trait => {
            let _ = write!(s, "trait {}{}", c.name, tparams_str(&c.tparams));
            if !c.traits.is_empty() {
                let ts: Vec<String> = c.traits.iter().map(type_atom_str).collect();
                let _ = write!(s, " < {}", ts.join(", "));
            }
        }
    }
    s.push_str(" {\n");
    for d in &c.tdecls {
        let _ = writeln!(s, "  type {} >: {} <: {}", d.label, type_str(&d.lower), type_str(&d.upper));
    }
    for m in &c.methods {
        let _ = writeln!(s, "  {}", method_str(m));
    }
    s.push('}');
    s
}

pub fn program_str(p: &Program) -> String {
    let mut s = format!("//level: {}\n", p.table.level);
    for c in p.table.classes.values() {
        s.push_str(&class_str(c));
        s.push('\n');
    }
    if let Some(e) = &p.main {
        let _ = writeln!(s, "main = {}", expr_str(e));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn strip(p: &Program) -> Program {
        let mut p = p.clone();
        p.main_span = Span::default();
        for c in p.table.classes.values_mut() {
            c.span = Span::default();
            c.tdecls.iter_mut().for_each(|d| d.span = Span::default());
            c.methods.iter_mut().for_each(|m| m.span = Span::default());
        }
        p
    }

    #[test]
    fn types_keep_their_grouping() {
        let x = Type::class("X");
        let y = Type::class("Y");
        let z = Type::class("Z");
        assert_eq!(type_str(&Type::and(Type::and(x.clone(), y.clone()), z.clone())), "X & Y & Z");
        assert_eq!(type_str(&Type::and(x.clone(), Type::and(y.clone(), z.clone()))), "X & (Y & Z)");
        assert_eq!(type_str(&Type::and(Type::or(x.clone(), y.clone()), z.clone())), "(X | Y) & Z");
        assert_eq!(type_str(&Type::or(x, Type::and(y, z))), "X | Y & Z");
    }

    #[test]
    fn round_trip() {
        let src = r#"
            trait HasA { type A >: Nothing <: Object }
            class Inv[X] < Object
            class T(a: HasA) < Object, HasA {
              type A = Object
              def f[Y <: Object](y: Y): Object | Y = if true then this.a else { val z = y; z }
              def g(): Inv[this.A] = new Inv[this.A]
            }
            main = new T(new T(new Inv[Object])).f[Object](new Inv[Object])
        "#;
        let p = parse_program(src, Some(Level::Ds)).unwrap();
        let printed = program_str(&p);
        let q = parse_program(&printed, None).unwrap();
        assert_eq!(strip(&p), strip(&q), "{printed}");
    }
}
