use super::ast::Span;
use super::SyntaxError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Ident,
    Punct,
    IntLit,
    StrLit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// Raw source text of the token (string literals keep their quotes and escapes).
    pub text: String,
    pub span: Span,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_punct(&self, text: &str) -> bool {
        self.is(TokenKind::Punct, text)
    }

    pub fn is_keyword(&self, text: &str) -> bool {
        self.is(TokenKind::Keyword, text)
    }
}

pub const KEYWORDS: &[&str] = &[
    "package",
    "object",
    "trait",
    "implicit",
    "extends",
    "with",
    "import",
    "def",
    "val",
    // reserved modifiers, always rejected by the parser
    "abstract",
    "case",
    "final",
    "lazy",
    "override",
    "private",
    "protected",
    "sealed",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `source` into tokens, skipping whitespace and `//` comments.
pub fn tokenize(source: &str) -> Result<Vec<Token>, SyntaxError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = source[pos..].chars().next().expect("in bounds");
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        if source[pos..].starts_with("//") {
            pos = source[pos..].find('\n').map_or(bytes.len(), |n| pos + n);
            continue;
        }
        let start = pos;
        let kind = if is_ident_start(c) {
            pos += 1;
            while pos < bytes.len() && is_ident_continue(bytes[pos] as char) {
                pos += 1;
            }
            let word = &source[start..pos];
            if word == "_" {
                TokenKind::Punct
            } else if is_keyword(word) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            }
        } else if c.is_ascii_digit() {
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if source[start..pos].parse::<i64>().is_err() {
                return Err(SyntaxError::Lex {
                    span: Span::new(start, pos),
                    message: "integer literal out of range".into(),
                });
            }
            TokenKind::IntLit
        } else if c == '"' {
            pos += 1;
            loop {
                match bytes.get(pos) {
                    None | Some(b'\n') => {
                        return Err(SyntaxError::Lex {
                            span: Span::new(start, pos),
                            message: "unterminated string literal".into(),
                        })
                    }
                    Some(b'"') => {
                        pos += 1;
                        break;
                    }
                    Some(b'\\') => match bytes.get(pos + 1) {
                        Some(b'"' | b'\\' | b'n' | b't') => pos += 2,
                        _ => {
                            return Err(SyntaxError::Lex {
                                span: Span::new(pos, pos + 1),
                                message: "invalid escape in string literal".into(),
                            })
                        }
                    },
                    Some(_) => pos += source[pos..].chars().next().expect("in bounds").len_utf8(),
                }
            }
            TokenKind::StrLit
        } else if source[pos..].starts_with("=>") {
            pos += 2;
            TokenKind::Punct
        } else if "{}(),.=@;".contains(c) {
            pos += 1;
            TokenKind::Punct
        } else {
            return Err(SyntaxError::Lex {
                span: Span::new(start, start + c.len_utf8()),
                message: format!("illegal character `{c}`"),
            });
        };
        tokens.push(Token { kind, text: source[start..pos].to_string(), span: Span::new(start, pos) });
    }
    Ok(tokens)
}

/// Decodes the body of a string literal token (quotes included in `raw`).
pub fn unescape(raw: &str) -> String {
    let inner = &raw[1..raw.len() - 1];
    let mut out = String::with_capacity(inner.len());
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some(other) => out.push(other),
                None => {}
            }
        } else {
            out.push(c);
        }
    }
    out
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
