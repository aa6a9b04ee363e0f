use serde::Serialize;

use crate::syntax::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    AnnotationAtTopLevel,
    DuplicateSymbol,
    UnknownImportAnnotation,
    UnresolvedImportPath,
    UnresolvedParent,
    Unresolved,
    Ambiguous,
    AmbiguousImplicit,
    UnregisteredRewriter,
    Rewrite,
    DeferOutsideMethod,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::AnnotationAtTopLevel => "E_ANNOTATION_AT_TOP_LEVEL",
            Code::DuplicateSymbol => "E_DUPLICATE_SYMBOL",
            Code::UnknownImportAnnotation => "E_UNKNOWN_IMPORT_ANNOTATION",
            Code::UnresolvedImportPath => "E_UNRESOLVED_IMPORT_PATH",
            Code::UnresolvedParent => "E_UNRESOLVED_PARENT",
            Code::Unresolved => "E_UNRESOLVED",
            Code::Ambiguous => "E_AMBIGUOUS",
            Code::AmbiguousImplicit => "E_AMBIGUOUS_IMPLICIT",
            Code::UnregisteredRewriter => "E_UNREGISTERED_REWRITER",
            Code::Rewrite => "E_REWRITE",
            Code::DeferOutsideMethod => "E_DEFER_OUTSIDE_METHOD",
        }
    }
}

impl std::fmt::Display for Code {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// A semantic error attached to a unit (by index into the unit list) and span.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: Code,
    pub unit: Option<usize>,
    pub span: Option<Span>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: Code, unit: usize, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { code, unit: Some(unit), span: Some(span), message: message.into() }
    }

    pub fn global(code: Code, message: impl Into<String>) -> Self {
        Diagnostic { code, unit: None, span: None, message: message.into() }
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "error[{}]: {}", self.code, self.message)
    }
}

/// 1-based line and column of a byte offset.
pub fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let before = &source[..offset.min(source.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, col)
}
