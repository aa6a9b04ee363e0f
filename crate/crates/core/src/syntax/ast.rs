//! Parse tree for `.ml1` compilation units.
//!
//! Every node carries a [`Span`] into its source. Structural comparison of
//! trees (round-trip checks, rewriter laws) goes through [`CompilationUnit::without_spans`],
//! which zeroes all spans so that only shape and names are compared.

use serde::ser::{Serialize, SerializeTuple, Serializer};
use serde::Serialize as DeriveSerialize;

/// Byte offsets into the source, 0-based, half-open.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub const DUMMY: Span = Span { start: 0, end: 0 };

    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl Serialize for Span {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut tup = serializer.serialize_tuple(2)?;
        tup.serialize_element(&self.start)?;
        tup.serialize_element(&self.end)?;
        tup.end()
    }
}

/// A dotted name such as `com.mycompany.salat`.
#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
pub struct QualId {
    pub segments: Vec<String>,
    pub span: Span,
}

impl QualId {
    pub fn new(segments: Vec<String>, span: Span) -> Self {
        QualId { segments, span }
    }

    pub fn dotted(&self) -> String {
        self.segments.join(".")
    }
}

impl std::fmt::Display for QualId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.dotted())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
#[serde(tag = "kind", rename = "CompilationUnit", rename_all = "camelCase")]
pub struct CompilationUnit {
    pub source_name: String,
    pub package_path: Vec<String>,
    pub stats: Vec<TopStat>,
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
#[serde(untagged)]
pub enum TopStat {
    Import(ImportClause),
    Template(TemplateDef),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, DeriveSerialize)]
#[serde(rename_all = "camelCase")]
pub enum TemplateKind {
    Object,
    Trait,
    PackageObject,
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
#[serde(tag = "kind", rename = "Template", rename_all = "camelCase")]
pub struct TemplateDef {
    pub template_kind: TemplateKind,
    pub implicit: bool,
    pub name: String,
    pub parents: Vec<QualId>,
    pub stats: Vec<TemplateStat>,
    pub span: Span,
}

impl TemplateDef {
    pub fn imports(&self) -> impl Iterator<Item = &ImportClause> {
        self.stats.iter().filter_map(|s| match s {
            TemplateStat::Import(i) => Some(i),
            _ => None,
        })
    }

    pub fn nested_templates(&self) -> impl Iterator<Item = &TemplateDef> {
        self.stats.iter().filter_map(|s| match s {
            TemplateStat::Template(t) => Some(t),
            _ => None,
        })
    }
}

/// Statement inside a template body.
///
/// Nested `object`/`trait` definitions are accepted here in addition to the
/// import/def/val/expression forms.
#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
#[serde(untagged)]
pub enum TemplateStat {
    Import(ImportClause),
    Def(DefDecl),
    Val(ValDecl),
    Template(TemplateDef),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
pub struct Annotation {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
#[serde(tag = "kind", rename = "Import", rename_all = "camelCase")]
pub struct ImportClause {
    pub annotations: Vec<Annotation>,
    pub path: QualId,
    pub selectors: Selectors,
    pub span: Span,
}

impl ImportClause {
    pub fn is_exported(&self) -> bool {
        self.annotations.len() == 1 && self.annotations[0].name == "exported"
    }
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
pub enum Selectors {
    Wildcard,
    Named(Vec<Selector>),
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
pub enum Selector {
    Name { source: String, target: SelectorTarget, span: Span },
    Wildcard { span: Span },
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
pub enum SelectorTarget {
    Same,
    Rename(String),
    /// `name => _`
    Hidden,
}

impl Selectors {
    /// Names at the import target that this selector list makes visible under
    /// `visible`. Empty when `visible` is filtered out.
    pub fn sources_for<'a>(&'a self, visible: &'a str) -> Vec<&'a str> {
        let list = match self {
            Selectors::Wildcard => return vec![visible],
            Selectors::Named(list) => list,
        };
        let mut out = Vec::new();
        let mut mentioned = false;
        let mut wildcard = false;
        for sel in list {
            match sel {
                Selector::Name { source, target, .. } => {
                    if source == visible {
                        mentioned = true;
                    }
                    match target {
                        SelectorTarget::Same if source == visible => out.push(source.as_str()),
                        SelectorTarget::Rename(to) if to == visible => out.push(source.as_str()),
                        _ => {}
                    }
                }
                Selector::Wildcard { .. } => wildcard = true,
            }
        }
        if wildcard && !mentioned {
            out.push(visible);
        }
        out
    }

    /// Visible name for `source`, if the selectors let it through.
    pub fn visible_name<'a>(&'a self, source: &'a str) -> Option<&'a str> {
        let list = match self {
            Selectors::Wildcard => return Some(source),
            Selectors::Named(list) => list,
        };
        let mut wildcard = false;
        for sel in list {
            match sel {
                Selector::Name { source: s, target, .. } if s == source => {
                    return match target {
                        SelectorTarget::Same => Some(s),
                        SelectorTarget::Rename(to) => Some(to),
                        SelectorTarget::Hidden => None,
                    }
                }
                Selector::Wildcard { .. } => wildcard = true,
                _ => {}
            }
        }
        wildcard.then_some(source)
    }

    pub fn has_wildcard(&self) -> bool {
        match self {
            Selectors::Wildcard => true,
            Selectors::Named(list) => list.iter().any(|s| matches!(s, Selector::Wildcard { .. })),
        }
    }

    /// Explicitly selected `(visible, source)` pairs, excluding hidden names.
    pub fn named_pairs(&self) -> Vec<(&str, &str)> {
        match self {
            Selectors::Wildcard => Vec::new(),
            Selectors::Named(list) => list
                .iter()
                .filter_map(|s| match s {
                    Selector::Name { source, target: SelectorTarget::Same, .. } => {
                        Some((source.as_str(), source.as_str()))
                    }
                    Selector::Name { source, target: SelectorTarget::Rename(to), .. } => {
                        Some((to.as_str(), source.as_str()))
                    }
                    _ => None,
                })
                .collect(),
        }
    }

    /// Whether `source` is mentioned by a named selector (and so excluded from
    /// the trailing wildcard).
    pub fn mentions(&self, source: &str) -> bool {
        match self {
            Selectors::Wildcard => false,
            Selectors::Named(list) => list.iter().any(|s| matches!(s, Selector::Name { source: s, .. } if s == source)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
#[serde(tag = "kind", rename = "Def", rename_all = "camelCase")]
pub struct DefDecl {
    pub name: String,
    pub params: Vec<String>,
    pub body: Block,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
#[serde(tag = "kind", rename = "Val", rename_all = "camelCase")]
pub struct ValDecl {
    pub name: String,
    pub value: Expr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
pub struct Block {
    pub stats: Vec<Stat>,
    pub span: Span,
}

impl Block {
    pub fn new(stats: Vec<Stat>, span: Span) -> Self {
        Block { stats, span }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
#[serde(untagged)]
pub enum Stat {
    Def(DefDecl),
    Val(ValDecl),
    Expr(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
pub enum Literal {
    Int(i64),
    Str(String),
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
#[serde(tag = "kind")]
pub enum Expr {
    Lit {
        value: Literal,
        span: Span,
    },
    Ref {
        path: QualId,
    },
    Call {
        callee: Box<Expr>,
        args: Vec<Expr>,
        span: Span,
    },
    Block(Block),
    /// Surface `defer { ... }`. Carries no meaning until a rewriter lowers it.
    DeferCandidate {
        body: Block,
        span: Span,
    },
    /// `__frame { ... }`: per-invocation defer frame around a def body.
    Frame {
        body: Block,
        span: Span,
    },
    /// `__defer(thunk { ... })`: registers a thunk on the innermost frame.
    DeferRegister {
        thunk: Block,
        span: Span,
    },
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Lit { span, .. }
            | Expr::Call { span, .. }
            | Expr::DeferCandidate { span, .. }
            | Expr::Frame { span, .. }
            | Expr::DeferRegister { span, .. } => *span,
            Expr::Ref { path } => path.span,
            Expr::Block(b) => b.span,
        }
    }
}

impl CompilationUnit {
    pub fn templates(&self) -> impl Iterator<Item = &TemplateDef> {
        self.stats.iter().filter_map(|s| match s {
            TopStat::Template(t) => Some(t),
            _ => None,
        })
    }

    pub fn imports(&self) -> impl Iterator<Item = &ImportClause> {
        self.stats.iter().filter_map(|s| match s {
            TopStat::Import(i) => Some(i),
            _ => None,
        })
    }

    /// Copy of the unit with every span zeroed.
    pub fn without_spans(&self) -> CompilationUnit {
        let mut u = self.clone();
        u.stats.iter_mut().for_each(|s| match s {
            TopStat::Import(i) => clear_import(i),
            TopStat::Template(t) => clear_template(t),
        });
        u
    }

    /// Structural equality: same shape and names, spans ignored.
    pub fn same_shape(&self, other: &CompilationUnit) -> bool {
        self.without_spans() == other.without_spans()
    }
}

fn clear_import(i: &mut ImportClause) {
    i.span = Span::DUMMY;
    i.path.span = Span::DUMMY;
    i.annotations.iter_mut().for_each(|a| a.span = Span::DUMMY);
    if let Selectors::Named(list) = &mut i.selectors {
        for sel in list {
            match sel {
                Selector::Name { span, .. } | Selector::Wildcard { span } => *span = Span::DUMMY,
            }
        }
    }
}

fn clear_template(t: &mut TemplateDef) {
    t.span = Span::DUMMY;
    t.parents.iter_mut().for_each(|p| p.span = Span::DUMMY);
    for s in &mut t.stats {
        match s {
            TemplateStat::Import(i) => clear_import(i),
            TemplateStat::Def(d) => clear_def(d),
            TemplateStat::Val(v) => clear_val(v),
            TemplateStat::Template(n) => clear_template(n),
            TemplateStat::Expr(e) => clear_expr(e),
        }
    }
}

fn clear_def(d: &mut DefDecl) {
    d.span = Span::DUMMY;
    clear_block(&mut d.body);
}

fn clear_val(v: &mut ValDecl) {
    v.span = Span::DUMMY;
    clear_expr(&mut v.value);
}

fn clear_block(b: &mut Block) {
    b.span = Span::DUMMY;
    for s in &mut b.stats {
        match s {
            Stat::Def(d) => clear_def(d),
            Stat::Val(v) => clear_val(v),
            Stat::Expr(e) => clear_expr(e),
        }
    }
}

fn clear_expr(e: &mut Expr) {
    match e {
        Expr::Lit { span, .. } => *span = Span::DUMMY,
        Expr::Ref { path } => path.span = Span::DUMMY,
        Expr::Call { callee, args, span } => {
            *span = Span::DUMMY;
            clear_expr(callee);
            args.iter_mut().for_each(clear_expr);
        }
        Expr::Block(b) => clear_block(b),
        Expr::DeferCandidate { body, span }
        | Expr::Frame { body, span }
        | Expr::DeferRegister { thunk: body, span } => {
            *span = Span::DUMMY;
            clear_block(body);
        }
    }
}
