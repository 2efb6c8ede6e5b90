//! Diagnostics carrying the rule that failed and the judgment being checked.

use std::fmt;

use thiserror::Error;

use crate::syntax::Span;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct Diagnostic {
    /// Rule name such as `PT-CLASS` or `PARSE`.
    pub rule: String,
    pub span: Span,
    pub message: String,
    /// Judgment that failed, rendered as text, when there is one.
    pub judgment: Option<String>,
}

impl Diagnostic {
    pub fn new(rule: &str, span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic { rule: rule.to_string(), span, message: message.into(), judgment: None }
    }

    pub fn with_judgment(mut self, j: impl Into<String>) -> Diagnostic {
        self.judgment = Some(j.into());
        self
    }

    /// `<file>:<line>:<col>: error[<RULE>]: <message>`
    pub fn render(&self, file: &str) -> String {
        let mut s = format!("{}:{}:{}: error[{}]: {}", file, self.span.line, self.span.col, self.rule, self.message);
        if let Some(j) = &self.judgment {
            s.push_str("\n  in judgment: ");
            s.push_str(j);
        }
        s
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: error[{}]: {}", self.span.line, self.span.col, self.rule, self.message)
    }
}

pub type Result<T> = std::result::Result<T, Diagnostic>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_format() {
        let d = Diagnostic::new("PT-CLASS", Span::new(3, 7), "abstract member foo");
        assert_eq!(d.render("a.dsc"), "a.dsc:3:7: error[PT-CLASS]: abstract member foo");
        let d = d.with_judgment("|- A ok");
        assert!(d.render("a.dsc").ends_with("in judgment: |- A ok"));
    }
}
