use crate::diag::{Diagnostic, Result};
use crate::syntax::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

// Longest symbols first so that `<:` wins over `<`.
const SYMBOLS: &[&str] = &[
    "<:", ">:", "=>", "⇒", "..", "(", ")", "[", "]", "{", "}", ",", ";", ":", ".", "=", "<", ">", "&", "|",
];

pub fn lex(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let start = Span::new(line, col);
            i += 2;
            col += 2;
            loop {
                if i >= chars.len() {
                    return Err(Diagnostic::new("PARSE", start, "unterminated block comment"));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    i += 2;
                    col += 2;
                    break;
                }
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
            continue;
        }
        let span = Span::new(line, col);
        if c.is_alphanumeric() || c == '_' || c == '$' || c == '#' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$' || chars[i] == '#') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += (i - start) as u32;
            out.push(Token { tok: Tok::Ident(word), span });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                let n = s.chars().count();
                i += n;
                col += n as u32;
                out.push(Token { tok: Tok::Sym(s), span });
            }
            None => return Err(Diagnostic::new("PARSE", span, format!("unexpected character `{c}`"))),
        }
    }
    out.push(Token { tok: Tok::Eof, span: Span::new(line, col) });
    Ok(out)
}

/// Reads a `//level: X` pragma if the source has one.
pub fn level_pragma(src: &str) -> Option<String> {
    src.lines().find_map(|l| {
        let t = l.trim();
        let rest = t.strip_prefix("//")?.trim_start();
        let v = rest.strip_prefix("level:")?;
        Some(v.trim().to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbols_and_spans() {
        let toks = lex("class A[X <: B] {\n  def m(): X }").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("class".into()));
        assert!(toks.iter().any(|t| t.tok == Tok::Sym("<:")));
        let def = toks.iter().find(|t| t.tok == Tok::Ident("def".into())).unwrap();
        assert_eq!(def.span, Span::new(2, 3));
    }

    #[test]
    fn comments_are_skipped() {
        let toks = lex("// hi\n/* a\n b */ x").unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0].span, Span::new(3, 7));
    }

    #[test]
    fn pragma() {
        assert_eq!(level_pragma("// something\n//level: PS\nclass A"), Some("PS".into()));
        assert_eq!(level_pragma("class A"), None);
    }
}
