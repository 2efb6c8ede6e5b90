//! Printer for FJD programs. The output parses back to the same program.

use super::*;

pub fn expr_str(e: &FExpr) -> String {
    match e {
        FExpr::Var(x) => x.clone(),
        FExpr::Field(e0, f) => format!("{}.{f}", receiver(e0)),
        FExpr::Call(e0, m, args) => format!("{}.{m}({})", receiver(e0), args_str(args)),
        FExpr::New(c, args) => format!("new {c}({})", args_str(args)),
        FExpr::Cast(c, e0) => format!("({c}){}", expr_str(e0)),
    }
}

fn receiver(e: &FExpr) -> String {
    match e {
        FExpr::Cast(..) => format!("({})", expr_str(e)),
        _ => expr_str(e),
    }
}

fn args_str(args: &[FExpr]) -> String {
    args.iter().map(expr_str).collect::<Vec<_>>().join(", ")
}

pub fn method_str(m: &FMethod) -> String {
    let ps = m.params.iter().map(|(t, x)| format!("{t} {x}")).collect::<Vec<_>>().join(", ");
    match &m.body {
        Some(e) => format!("{} {}({ps}) {{ return {}; }}", m.result, m.name, expr_str(e)),
        None => format!("{} {}({ps});", m.result, m.name),
    }
}

/// A declaration. The constructor is printed only when the class has
/// fields, since the empty one is implied.
pub fn class_str(p: &FjdProgram, c: &FClass) -> String {
    let supers: Vec<&Name> = c.parent.iter().chain(&c.interfaces).collect();
    let kw = match c.kind {
        FKind::Class => "class",
        FKind::Interface => "interface",
    };
    let mut head = format!("{kw} {}", c.name);
    if !supers.is_empty() {
        head.push_str(" < ");
        head.push_str(&supers.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "));
    }
    let mut lines = Vec::new();
    for (t, f) in &c.fields {
        lines.push(format!("{t} {f};"));
    }
    let all = p.fields(&c.name);
    if c.kind == FKind::Class && !all.is_empty() {
        let ps = all.iter().map(|(t, f)| format!("{t} {f}")).collect::<Vec<_>>().join(", ");
        let n = all.len() - c.fields.len();
        let sup = all[..n].iter().map(|(_, f)| f.as_str()).collect::<Vec<_>>().join(", ");
        let mut k = format!("{}({ps}) {{ super({sup});", c.name);
        for (_, f) in &c.fields {
            k.push_str(&format!(" this.{f} = {f};"));
        }
        k.push_str(" }");
        lines.push(k);
    }
    lines.extend(c.methods.iter().map(method_str));
    if lines.is_empty() {
        format!("{head} {{}}")
    } else {
        format!("{head} {{\n{}\n}}", lines.iter().map(|l| format!("  {l}")).collect::<Vec<_>>().join("\n"))
    }
}

pub fn program_str(p: &FjdProgram) -> String {
    let mut out: Vec<String> = p.classes.values().map(|c| class_str(p, c)).collect();
    if let Some(e) = &p.main {
        out.push(format!("main = {};", expr_str(e)));
    }
    let mut s = out.join("\n");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_program;
    use super::*;

    #[test]
    fn round_trip() {
        let src = "interface L {\n  Object fooL();\n}\nclass A < Object, L {\n  Object a;\n  A(Object a) { super(); this.a = a; }\n  Object fooL() { return ((L)this).fooL(); }\n}\nclass B < A {\n  B(Object a) { super(a); }\n}\nmain = (Object)new B(new Object()).a;\n";
        let p = parse_program(src).unwrap();
        assert_eq!(program_str(&p), src);
        assert_eq!(parse_program(&program_str(&p)).unwrap(), p);
    }
}
