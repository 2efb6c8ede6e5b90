//! Stable JSON form of DOT ASTs, used by `--emit dot-json`.
//!
//! Every node is an object with a `kind` field. Types: `top`, `bot`,
//! `member {label, lower, upper}`, `method {name, params, result}`,
//! `select {var, label}`, `rec {self, body}`, `and {left, right}`,
//! `or {left, right}`. Terms: `var {name}`, `obj {self, decls}`,
//! `call {receiver, method, args}`, `let {var, init, body}`. Declarations:
//! `tag {label, type}` and `def {name, params, result, body}`, where absent
//! ascriptions are `null`.

use serde_json::{json, Value};

use super::*;

pub fn type_json(t: &DType) -> Value {
    match t {
        DType::Top => json!({"kind": "top"}),
        DType::Bot => json!({"kind": "bot"}),
        DType::Mem(l, a, b) => json!({"kind": "member", "label": l, "lower": type_json(a), "upper": type_json(b)}),
        DType::Fun(m, ps, r) => json!({
            "kind": "method",
            "name": m,
            "params": ps.iter().map(|(x, t)| json!({"name": x, "type": type_json(t)})).collect::<Vec<_>>(),
            "result": type_json(r),
        }),
        DType::Sel(x, l) => json!({"kind": "select", "var": x, "label": l}),
        DType::Rec(z, b) => json!({"kind": "rec", "self": z, "body": type_json(b)}),
        DType::And(a, b) => json!({"kind": "and", "left": type_json(a), "right": type_json(b)}),
        DType::Or(a, b) => json!({"kind": "or", "left": type_json(a), "right": type_json(b)}),
    }
}

fn opt_json(t: &Option<DType>) -> Value {
    t.as_ref().map_or(Value::Null, type_json)
}

pub fn decl_json(d: &Decl) -> Value {
    match d {
        Decl::Tag(l, t) => json!({"kind": "tag", "label": l, "type": type_json(t)}),
        Decl::Def(m, ps, r, body) => json!({
            "kind": "def",
            "name": m,
            "params": ps.iter().map(|(x, t)| json!({"name": x, "type": opt_json(t)})).collect::<Vec<_>>(),
            "result": opt_json(r),
            "body": term_json(body),
        }),
    }
}

pub fn term_json(t: &DTerm) -> Value {
    match t {
        DTerm::Var(x) => json!({"kind": "var", "name": x}),
        DTerm::Obj(z, ds) => json!({"kind": "obj", "self": z, "decls": ds.iter().map(decl_json).collect::<Vec<_>>()}),
        DTerm::Call(r, m, args) => json!({
            "kind": "call",
            "receiver": term_json(r),
            "method": m,
            "args": args.iter().map(term_json).collect::<Vec<_>>(),
        }),
        DTerm::Let(x, s, u) => json!({"kind": "let", "var": x, "init": term_json(s), "body": term_json(u)}),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse_term;
    use super::*;

    #[test]
    fn shape() {
        let t = parse_term("{z => L = ⊤, m(x) = x}").unwrap();
        let j = term_json(&t);
        assert_eq!(j["kind"], "obj");
        assert_eq!(j["self"], "z");
        assert_eq!(j["decls"][0]["type"]["kind"], "top");
        assert_eq!(j["decls"][1]["params"][0]["type"], Value::Null);
        assert_eq!(j["decls"][1]["body"]["name"], "x");
    }
}
