//! Abstract syntax shared by every source calculus.
//!
//! One AST covers FJ, FGJ, PS, PLS and DS. The [`Level`] attached to a class
//! table decides which constructs the parser accepts and which rules the
//! checker applies.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use indexmap::IndexMap;

pub type Name = String;

/// Calculus level, ordered by inclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Fj,
    Fgj,
    Ps,
    Pls,
    Ds,
}

impl Level {
    pub const ALL: [Level; 5] = [Level::Fj, Level::Fgj, Level::Ps, Level::Pls, Level::Ds];

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Fj => "FJ",
            Level::Fgj => "FGJ",
            Level::Ps => "PS",
            Level::Pls => "PLS",
            Level::Ds => "DS",
        }
    }

    pub fn parse(s: &str) -> Option<Level> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FJ" => Some(Level::Fj),
            "FGJ" => Some(Level::Fgj),
            "PS" => Some(Level::Ps),
            "PLS" => Some(Level::Pls),
            "DS" => Some(Level::Ds),
            _ => None,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Span {
        Span { line, col }
    }
}

/// Whether a type variable was bound by a class or by a method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    Class,
    Method,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Var(Name, Flavor),
    App(Name, Vec<Type>),
    And(Box<Type>, Box<Type>),
    Or(Box<Type>, Box<Type>),
    /// Type selection `x.L`.
    Sel(Name, Name),
}

pub const OBJECT: &str = "Object";
pub const NOTHING: &str = "Nothing";
pub const BOOLEAN: &str = "Boolean";
pub const THIS: &str = "this";

impl Type {
    pub fn class(name: &str) -> Type {
        Type::App(name.to_string(), Vec::new())
    }
    pub fn object() -> Type {
        Type::class(OBJECT)
    }
    pub fn nothing() -> Type {
        Type::class(NOTHING)
    }
    pub fn boolean() -> Type {
        Type::class(BOOLEAN)
    }
    pub fn and(a: Type, b: Type) -> Type {
        Type::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Type, b: Type) -> Type {
        Type::Or(Box::new(a), Box::new(b))
    }

    /// Left-nested intersection of a non-empty list; `Object` when empty.
    pub fn and_all<I: IntoIterator<Item = Type>>(items: I) -> Type {
        let mut it = items.into_iter();
        match it.next() {
            None => Type::object(),
            Some(first) => it.fold(first, Type::and),
        }
    }

    pub fn is_nothing(&self) -> bool {
        matches!(self, Type::App(n, a) if n == NOTHING && a.is_empty())
    }

    pub fn is_object(&self) -> bool {
        matches!(self, Type::App(n, a) if n == OBJECT && a.is_empty())
    }

    /// Operands of a (possibly nested) intersection, left to right.
    pub fn and_operands(&self) -> Vec<&Type> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a Type, out: &mut Vec<&'a Type>) {
            match t {
                Type::And(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    /// Free term variables (selection prefixes).
    pub fn term_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_term_vars(&mut out);
        out
    }

    fn collect_term_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Type::Var(..) => {}
            Type::App(_, args) => args.iter().for_each(|a| a.collect_term_vars(out)),
            Type::And(a, b) | Type::Or(a, b) => {
                a.collect_term_vars(out);
                b.collect_term_vars(out);
            }
            Type::Sel(x, _) => {
                out.insert(x.clone());
            }
        }
    }

    pub fn mentions_term(&self, x: &str) -> bool {
        match self {
            Type::Var(..) => false,
            Type::App(_, args) => args.iter().any(|a| a.mentions_term(x)),
            Type::And(a, b) | Type::Or(a, b) => a.mentions_term(x) || b.mentions_term(x),
            Type::Sel(y, _) => y == x,
        }
    }

    /// Free type variables.
    pub fn type_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_type_vars(&mut out);
        out
    }

    fn collect_type_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Type::Var(x, _) => {
                out.insert(x.clone());
            }
            Type::App(_, args) => args.iter().for_each(|a| a.collect_type_vars(out)),
            Type::And(a, b) | Type::Or(a, b) => {
                a.collect_type_vars(out);
                b.collect_type_vars(out);
            }
            Type::Sel(..) => {}
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Type::Var(..) | Type::Sel(..) => 1,
            Type::App(_, args) => 1 + args.iter().map(Type::size).sum::<usize>(),
            Type::And(a, b) | Type::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn subst(&self, s: &Subst) -> Type {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Type::Var(x, _) => match s.types.get(x) {
                Some(t) => t.clone(),
                None => self.clone(),
            },
            Type::App(c, args) => Type::App(c.clone(), args.iter().map(|a| a.subst(s)).collect()),
            Type::And(a, b) => Type::and(a.subst(s), b.subst(s)),
            Type::Or(a, b) => Type::or(a.subst(s), b.subst(s)),
            Type::Sel(x, l) => match s.terms.get(x) {
                Some(y) => Type::Sel(y.clone(), l.clone()),
                None => self.clone(),
            },
        }
    }
}

/// Simultaneous substitution of types for type variables and of variables
/// for term variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Subst {
    pub types: HashMap<Name, Type>,
    pub terms: HashMap<Name, Name>,
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    pub fn types<'a, I>(pairs: I) -> Subst
    where
        I: IntoIterator<Item = (&'a Name, &'a Type)>,
    {
        Subst { types: pairs.into_iter().map(|(x, t)| (x.clone(), t.clone())).collect(), terms: HashMap::new() }
    }

    /// `[x/this]` composed with a type substitution.
    pub fn with_term(mut self, from: &str, to: &str) -> Subst {
        if from != to {
            self.terms.insert(from.to_string(), to.to_string());
        }
        self
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty() && self.terms.is_empty()
    }
}

/// Source expressions. `Call` is the general form; at DS level it is
/// desugared into blocks and `Invoke` before checking.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(Name),
    Get(Box<Expr>, Name),
    Invoke { recv: Name, method: Name, targs: Vec<Type>, args: Vec<Name> },
    Call { recv: Box<Expr>, method: Name, targs: Vec<Type>, args: Vec<Expr> },
    New(Type, Vec<Expr>),
    Bool(bool),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    /// `{ val x[: T] = e1; e2 }`. The ascription is optional.
    Block(Name, Option<Type>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(x: &str) -> Expr {
        Expr::Var(x.to_string())
    }

    pub fn subst(&self, s: &Subst) -> Expr {
        if s.is_empty() {
            return self.clone();
        }
        let rn = |x: &Name| s.terms.get(x).cloned().unwrap_or_else(|| x.clone());
        match self {
            Expr::Var(x) => Expr::Var(rn(x)),
            Expr::Get(e, f) => Expr::Get(Box::new(e.subst(s)), f.clone()),
            Expr::Invoke { recv, method, targs, args } => Expr::Invoke {
                recv: rn(recv),
                method: method.clone(),
                targs: targs.iter().map(|t| t.subst(s)).collect(),
                args: args.iter().map(rn).collect(),
            },
            Expr::Call { recv, method, targs, args } => Expr::Call {
                recv: Box::new(recv.subst(s)),
                method: method.clone(),
                targs: targs.iter().map(|t| t.subst(s)).collect(),
                args: args.iter().map(|a| a.subst(s)).collect(),
            },
            Expr::New(t, args) => Expr::New(t.subst(s), args.iter().map(|a| a.subst(s)).collect()),
            Expr::Bool(b) => Expr::Bool(*b),
            Expr::If(c, a, b) => Expr::If(Box::new(c.subst(s)), Box::new(a.subst(s)), Box::new(b.subst(s))),
            Expr::Block(x, ann, e1, e2) => {
                let e1 = e1.subst(s);
                // The block binder shadows any renaming of the same name.
                let mut inner = s.clone();
                inner.terms.remove(x);
                Expr::Block(x.clone(), ann.as_ref().map(|t| t.subst(s)), Box::new(e1), Box::new(e2.subst(&inner)))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassKind {
    Class,
    Trait,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TParam {
    pub name: Name,
    pub bound: Type,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDecl {
    pub label: Name,
    pub lower: Type,
    pub upper: Type,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: Name,
    pub tparams: Vec<TParam>,
    pub params: Vec<(Name, Type)>,
    pub result: Type,
    pub body: Option<Expr>,
    pub span: Span,
}

impl MethodDecl {
    pub fn is_abstract(&self) -> bool {
        self.body.is_none()
    }

    pub fn subst(&self, s: &Subst) -> MethodDecl {
        MethodDecl {
            name: self.name.clone(),
            tparams: self.tparams.iter().map(|p| TParam { name: p.name.clone(), bound: p.bound.subst(s) }).collect(),
            params: self.params.iter().map(|(x, t)| (x.clone(), t.subst(s))).collect(),
            result: self.result.subst(s),
            body: self.body.as_ref().map(|e| e.subst(s)),
            span: self.span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDecl {
    pub kind: ClassKind,
    pub name: Name,
    pub tparams: Vec<TParam>,
    pub vparams: Vec<(Name, Type)>,
    /// Proper classes only: parent class and the parameters forwarded to it.
    pub parent: Option<(Type, Vec<Name>)>,
    pub traits: Vec<Type>,
    pub tdecls: Vec<TypeDecl>,
    pub methods: Vec<MethodDecl>,
    pub span: Span,
}

impl ClassDecl {
    pub fn is_trait(&self) -> bool {
        self.kind == ClassKind::Trait
    }

    pub fn method(&self, m: &str) -> Option<&MethodDecl> {
        self.methods.iter().find(|d| d.name == m)
    }

    pub fn tdecl(&self, l: &str) -> Option<&TypeDecl> {
        self.tdecls.iter().find(|d| d.label == l)
    }

    /// `C[X̄]` applied to its own type parameters.
    pub fn self_type(&self) -> Type {
        Type::App(
            self.name.clone(),
            self.tparams.iter().map(|p| Type::Var(p.name.clone(), Flavor::Class)).collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassTable {
    pub level: Level,
    pub classes: IndexMap<Name, ClassDecl>,
}

impl ClassTable {
    pub fn new(level: Level) -> ClassTable {
        ClassTable { level, classes: IndexMap::new() }
    }

    pub fn get(&self, c: &str) -> Option<&ClassDecl> {
        self.classes.get(c)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub table: ClassTable,
    pub main: Option<Expr>,
    pub main_span: Span,
}

/// One context entry. Type-variable groups are kept together so the
/// context can be truncated at a term variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binding {
    Term(Name, Type),
    Types(Vec<(Name, Type)>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeEnv {
    pub bindings: Vec<Binding>,
}

impl TypeEnv {
    pub fn new() -> TypeEnv {
        TypeEnv::default()
    }

    pub fn with_term(&self, x: &str, t: Type) -> TypeEnv {
        let mut out = self.clone();
        out.bindings.push(Binding::Term(x.to_string(), t));
        out
    }

    pub fn with_types(&self, ps: &[TParam]) -> TypeEnv {
        let mut out = self.clone();
        if !ps.is_empty() {
            out.bindings.push(Binding::Types(ps.iter().map(|p| (p.name.clone(), p.bound.clone())).collect()));
        }
        out
    }

    pub fn push_term(&mut self, x: &str, t: Type) {
        self.bindings.push(Binding::Term(x.to_string(), t));
    }

    pub fn push_types(&mut self, ps: &[TParam]) {
        if !ps.is_empty() {
            self.bindings.push(Binding::Types(ps.iter().map(|p| (p.name.clone(), p.bound.clone())).collect()));
        }
    }

    /// Innermost binding of a term variable.
    pub fn term(&self, x: &str) -> Option<&Type> {
        self.bindings.iter().rev().find_map(|b| match b {
            Binding::Term(y, t) if y == x => Some(t),
            _ => None,
        })
    }

    pub fn tvar(&self, x: &str) -> Option<&Type> {
        self.bindings.iter().rev().find_map(|b| match b {
            Binding::Types(ps) => ps.iter().find(|(y, _)| y == x).map(|(_, t)| t),
            _ => None,
        })
    }

    pub fn has_term(&self, x: &str) -> bool {
        self.term(x).is_some()
    }

    /// `Γ_[x]`: everything up to and including the innermost binding of `x`.
    pub fn truncate_at(&self, x: &str) -> TypeEnv {
        let pos = self.bindings.iter().rposition(|b| matches!(b, Binding::Term(y, _) if y == x));
        match pos {
            Some(i) => TypeEnv { bindings: self.bindings[..=i].to_vec() },
            None => self.clone(),
        }
    }

    pub fn term_names(&self) -> Vec<Name> {
        self.bindings
            .iter()
            .filter_map(|b| match b {
                Binding::Term(x, _) => Some(x.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn type_names(&self) -> Vec<Name> {
        self.bindings
            .iter()
            .flat_map(|b| match b {
                Binding::Types(ps) => ps.iter().map(|(x, _)| x.clone()).collect(),
                _ => Vec::new(),
            })
            .collect()
    }

    /// Partial well-formedness: every free variable of `t` is bound.
    pub fn pwf(&self, t: &Type) -> bool {
        t.type_vars().iter().all(|x| self.tvar(x).is_some()) && t.term_vars().iter().all(|x| self.has_term(x))
    }
}
