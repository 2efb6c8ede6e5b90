//! Textual DOT. `&` and `|` associate to the right, and member types are
//! parenthesized inside them. Long objects break one declaration per line.

use super::*;

const WIDTH: usize = 100;

pub fn type_str(t: &DType) -> String {
    let mut s = String::new();
    ty(t, &mut s);
    s
}

fn ty(t: &DType, out: &mut String) {
    match t {
        DType::Top => out.push('⊤'),
        DType::Bot => out.push('⊥'),
        DType::Mem(l, a, b) => {
            if a == b {
                out.push_str(&format!("{l} = "));
                ty(a, out);
            } else {
                out.push_str(&format!("{l} : "));
                ty(a, out);
                out.push_str(" .. ");
                ty(b, out);
            }
        }
        DType::Fun(m, ps, r) => {
            out.push_str(m);
            out.push('(');
            for (i, (x, s)) in ps.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&format!("{x} : "));
                ty(s, out);
            }
            out.push_str(") : ");
            ty(r, out);
        }
        DType::Sel(x, l) => out.push_str(&format!("{x}.{l}")),
        DType::Rec(z, b) => {
            out.push_str(&format!("{{{z} => "));
            ty(b, out);
            out.push('}');
        }
        DType::And(a, b) => binary(a, b, " & ", |t| matches!(t, DType::And(..)), out),
        DType::Or(a, b) => binary(a, b, " | ", |t| matches!(t, DType::Or(..)), out),
    }
}

fn binary(a: &DType, b: &DType, op: &str, same: fn(&DType) -> bool, out: &mut String) {
    // Both connectives associate to the right, so a left operand of either
    // kind is grouped, as is a right operand of the other kind.
    operand(a, matches!(a, DType::And(..) | DType::Or(..)), out);
    out.push_str(op);
    operand(b, matches!(b, DType::And(..) | DType::Or(..)) && !same(b), out);
}

fn operand(t: &DType, group: bool, out: &mut String) {
    if group || matches!(t, DType::Mem(..) | DType::Fun(..)) {
        out.push('(');
        ty(t, out);
        out.push(')');
    } else {
        ty(t, out);
    }
}

/// Single-line rendering.
pub fn term_str(t: &DTerm) -> String {
    term(t, None)
}

/// Multi-line rendering for objects that do not fit on one line.
pub fn term_pretty(t: &DTerm) -> String {
    term(t, Some(0))
}

fn term(t: &DTerm, indent: Option<usize>) -> String {
    match t {
        DTerm::Var(x) => x.clone(),
        DTerm::Call(r, m, args) => {
            let recv = match **r {
                DTerm::Let(..) => format!("({})", term(r, indent)),
                _ => term(r, indent),
            };
            let args: Vec<String> = args.iter().map(|a| term(a, indent)).collect();
            format!("{recv}.{m}({})", args.join(", "))
        }
        DTerm::Let(x, s, u) => {
            let body = term(u, indent);
            match indent {
                Some(i) => format!("let {x} = {} in\n{}{body}", term(s, indent), " ".repeat(i)),
                None => format!("let {x} = {} in {body}", term(s, indent)),
            }
        }
        DTerm::Obj(z, ds) => {
            if ds.is_empty() {
                return format!("{{{z} => }}");
            }
            let flat: Vec<String> = ds.iter().map(|d| decl(d, None)).collect();
            let one = format!("{{{z} => {}}}", flat.join(", "));
            match indent {
                Some(i) if one.len() + i > WIDTH || one.contains('\n') => {
                    let pad = " ".repeat(i + 2);
                    let lines: Vec<String> = ds.iter().map(|d| format!("{pad}{}", decl(d, Some(i + 2)))).collect();
                    format!("{{{z} =>\n{}\n{}}}", lines.join(",\n"), " ".repeat(i))
                }
                _ => one,
            }
        }
    }
}

pub fn decl_str(d: &Decl) -> String {
    decl(d, None)
}

fn decl(d: &Decl, indent: Option<usize>) -> String {
    match d {
        Decl::Tag(l, t) => format!("{l} = {}", type_str(t)),
        Decl::Def(m, ps, r, body) => {
            let ps: Vec<String> = ps
                .iter()
                .map(|(x, t)| match t {
                    Some(t) => format!("{x} : {}", type_str(t)),
                    None => x.clone(),
                })
                .collect();
            let r = r.as_ref().map(|r| format!(" : {}", type_str(r))).unwrap_or_default();
            format!("{m}({}){r} = {}", ps.join(", "), term(body, indent))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::{parse_term, parse_type};
    use super::*;

    #[test]
    fn grouping() {
        let t = DType::and(DType::alias("X", DType::Top), DType::and(DType::sel("a", "B"), DType::Top));
        assert_eq!(type_str(&t), "(X = ⊤) & a.B & ⊤");
        let t = DType::and(DType::and(DType::Top, DType::Bot), DType::Top);
        assert_eq!(type_str(&t), "(⊤ & ⊥) & ⊤");
        let t = DType::or(DType::and(DType::Top, DType::Bot), DType::Top);
        assert_eq!(type_str(&t), "(⊤ & ⊥) | ⊤");
    }

    #[test]
    fn round_trip() {
        for src in [
            "{ct => Object = ⊤, B = ct.Object & {this => obj() : ct.Object}}",
            "let x = {_ => } in x.m(x, {z => A = z.B})",
            "{z => m(x : ⊤, y) : x.L = y.apply(x)}",
        ] {
            let t = parse_term(src).unwrap();
            assert_eq!(parse_term(&term_str(&t)).unwrap(), t);
            assert_eq!(parse_term(&term_pretty(&t)).unwrap(), t);
        }
        let t = parse_type("{z => (X = z.Y) & (Y = ⊤)} | ⊥").unwrap();
        assert_eq!(parse_type(&type_str(&t)).unwrap(), t);
    }
}
