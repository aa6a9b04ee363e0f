//! Lexing, parsing, pretty-printing and JSON dumps of `.ml1` sources.

pub mod ast;
mod lexer;
mod parser;
mod printer;

pub use ast::*;
pub use lexer::{is_keyword, tokenize, Token, TokenKind, KEYWORDS};
pub use parser::parse_unit;
pub use printer::pretty_print;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{message}")]
    Lex { span: Span, message: String },
    #[error("expected {expected}, found {found}")]
    Parse { span: Span, expected: String, found: String },
    #[error("annotated imports must be situated inside a template")]
    AnnotationAtTopLevel { span: Span },
}

impl SyntaxError {
    pub fn span(&self) -> Span {
        match self {
            SyntaxError::Lex { span, .. }
            | SyntaxError::Parse { span, .. }
            | SyntaxError::AnnotationAtTopLevel { span } => *span,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            SyntaxError::Lex { .. } => "E_LEX",
            SyntaxError::Parse { .. } => "E_PARSE",
            SyntaxError::AnnotationAtTopLevel { .. } => "E_ANNOTATION_AT_TOP_LEVEL",
        }
    }
}

/// `tokenize` followed by `parse_unit`.
pub fn parse_source(source: &str, source_name: &str) -> Result<CompilationUnit, SyntaxError> {
    parse_unit(&tokenize(source)?, source_name)
}

/// Deterministic JSON dump of the tree, as printed by `parse --dump-ast`.
pub fn dump_ast(unit: &CompilationUnit) -> String {
    serde_json::to_string_pretty(unit).expect("AST serialization cannot fail")
}
