//! Recursive-descent parser.
//!
//! ```text
//! Unit         ::= ['package' QualId] {TopStat}
//! TopStat      ::= Import | TemplateDef
//! TemplateDef  ::= ['implicit'] ('object'|'trait'|'package' 'object') Id
//!                  ['extends' QualId {'with' QualId}] '{' {TemplateStat} '}'
//! TemplateStat ::= {Annotation} Import | DefDecl | TemplateDef | Expr
//! Annotation   ::= '@' Id
//! Import       ::= 'import' QualId '.' ('_' | '{' Sel {',' Sel} '}' | Id)
//! Sel          ::= Id ['=>' (Id | '_')] | '_'
//! DefDecl      ::= 'def' Id '(' [Id {',' Id}] ')' '=' (Block | '__frame' Block)
//!                | 'val' Id '=' Expr
//! Expr         ::= IntLit | StringLit | QualId | QualId '(' [Expr {',' Expr}] ')'
//!                | Block | 'defer' Block | '__frame' Block | '__defer' '(' 'thunk' Block ')'
//! Block        ::= '{' {Stat} '}'      Stat ::= DefDecl | Expr
//! ```
//!
//! `;` may separate statements anywhere and is otherwise ignored. `defer`,
//! `__frame`, `__defer` and `thunk` are contextual: they are ordinary
//! identifiers except in the positions above.

use std::collections::HashSet;

use super::ast::*;
use super::lexer::{unescape, Token, TokenKind};
use super::SyntaxError;

pub fn parse_unit(tokens: &[Token], source_name: &str) -> Result<CompilationUnit, SyntaxError> {
    Parser { tokens, pos: 0 }.unit(source_name)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&'t Token> {
        self.tokens.get(self.pos + n)
    }

    fn bump(&mut self) -> &'t Token {
        let t = &self.tokens[self.pos];
        self.pos += 1;
        t
    }

    fn eof_span(&self) -> Span {
        let end = self.tokens.last().map_or(0, |t| t.span.end);
        Span::new(end, end)
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        let (span, found) = match self.peek() {
            Some(t) => (t.span, format!("`{}`", t.text)),
            None => (self.eof_span(), "end of input".to_string()),
        };
        Err(SyntaxError::Parse { span, expected: expected.to_string(), found })
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn at_keyword(&self, k: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(k))
    }

    fn at_ident(&self, name: &str) -> bool {
        self.peek().is_some_and(|t| t.is(TokenKind::Ident, name))
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<Span> {
        if self.at_punct(p) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{p}`"))
        }
    }

    fn expect_keyword(&mut self, k: &str) -> PResult<Span> {
        if self.at_keyword(k) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{k}`"))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                self.pos += 1;
                Ok((t.text.clone(), t.span))
            }
            _ => self.error("identifier"),
        }
    }

    fn skip_separators(&mut self) {
        while self.eat_punct(";") {}
    }

    fn qual_id(&mut self) -> PResult<QualId> {
        let (first, span) = self.ident()?;
        let mut segments = vec![first];
        let mut end = span;
        while self.at_punct(".") {
            self.bump();
            let (seg, s) = self.ident()?;
            segments.push(seg);
            end = s;
        }
        Ok(QualId::new(segments, span.to(end)))
    }

    fn unit(mut self, source_name: &str) -> PResult<CompilationUnit> {
        let mut package_path = Vec::new();
        if self.at_keyword("package") && !self.peek_at(1).is_some_and(|t| t.is_keyword("object")) {
            self.bump();
            package_path = self.qual_id()?.segments;
        }
        let mut stats = Vec::new();
        loop {
            self.skip_separators();
            let Some(tok) = self.peek() else { break };
            if tok.is_punct("@") {
                let annotations = self.annotations()?;
                if self.at_keyword("import") {
                    let span = annotations[0].span.to(self.peek().expect("checked").span);
                    return Err(SyntaxError::AnnotationAtTopLevel { span });
                }
                return self.error("`import`");
            } else if tok.is_keyword("import") {
                stats.push(TopStat::Import(self.import(Vec::new())?));
            } else if self.at_template_start() {
                stats.push(TopStat::Template(self.template(true)?));
            } else {
                return self.error("`import` or template definition");
            }
        }
        Ok(CompilationUnit { source_name: source_name.to_string(), package_path, stats })
    }

    fn at_template_start(&self) -> bool {
        ["implicit", "object", "trait", "package"].iter().any(|k| self.at_keyword(k))
    }

    fn annotations(&mut self) -> PResult<Vec<Annotation>> {
        let mut out = Vec::new();
        while self.at_punct("@") {
            let at = self.bump().span;
            let (name, span) = self.ident()?;
            out.push(Annotation { name, span: at.to(span) });
        }
        Ok(out)
    }

    fn template(&mut self, top_level: bool) -> PResult<TemplateDef> {
        let start = self.peek().expect("template start").span;
        let implicit = self.at_keyword("implicit");
        if implicit {
            self.bump();
        }
        let template_kind = if self.at_keyword("object") {
            self.bump();
            TemplateKind::Object
        } else if self.at_keyword("trait") && !implicit {
            self.bump();
            TemplateKind::Trait
        } else if self.at_keyword("package") && !implicit {
            if !top_level {
                return self.error("`object` or `trait` (package objects are only allowed at top level)");
            }
            self.bump();
            self.expect_keyword("object")?;
            TemplateKind::PackageObject
        } else if implicit {
            return self.error("`object` (only objects may be implicit)");
        } else {
            return self.error("template definition");
        };
        let (name, _) = self.ident()?;
        let mut parents = Vec::new();
        if self.at_keyword("extends") {
            self.bump();
            parents.push(self.qual_id()?);
            while self.at_keyword("with") {
                self.bump();
                parents.push(self.qual_id()?);
            }
        }
        self.expect_punct("{")?;
        let mut stats = Vec::new();
        loop {
            self.skip_separators();
            if self.at_punct("}") {
                break;
            }
            stats.push(self.template_stat()?);
        }
        let end = self.expect_punct("}")?;
        Ok(TemplateDef { template_kind, implicit, name, parents, stats, span: start.to(end) })
    }

    fn template_stat(&mut self) -> PResult<TemplateStat> {
        if self.at_punct("@") {
            let annotations = self.annotations()?;
            if !self.at_keyword("import") {
                return self.error("`import`");
            }
            return Ok(TemplateStat::Import(self.import(annotations)?));
        }
        if self.at_keyword("import") {
            return Ok(TemplateStat::Import(self.import(Vec::new())?));
        }
        if self.at_template_start() {
            return Ok(TemplateStat::Template(self.template(false)?));
        }
        Ok(match self.stat()? {
            Stat::Def(d) => TemplateStat::Def(d),
            Stat::Val(v) => TemplateStat::Val(v),
            Stat::Expr(e) => TemplateStat::Expr(e),
        })
    }

    fn import(&mut self, annotations: Vec<Annotation>) -> PResult<ImportClause> {
        let kw = self.expect_keyword("import")?;
        let start = annotations.first().map_or(kw, |a| a.span);
        let (first, first_span) = self.ident()?;
        let mut segments = vec![first];
        let mut path_end = first_span;
        let (selectors, end) = loop {
            self.expect_punct(".")?;
            if self.at_punct("_") {
                break (Selectors::Wildcard, self.bump().span);
            }
            if self.at_punct("{") {
                break self.selector_list()?;
            }
            let (name, span) = self.ident()?;
            if self.at_punct(".") {
                segments.push(name);
                path_end = span;
                continue;
            }
            let sel = Selector::Name { source: name, target: SelectorTarget::Same, span };
            break (Selectors::Named(vec![sel]), span);
        };
        Ok(ImportClause {
            annotations,
            path: QualId::new(segments, first_span.to(path_end)),
            selectors,
            span: start.to(end),
        })
    }

    fn selector_list(&mut self) -> PResult<(Selectors, Span)> {
        self.expect_punct("{")?;
        let mut list = Vec::new();
        loop {
            if let Some(Selector::Wildcard { .. }) = list.last() {
                return self.error("`}` (wildcard selector must be last)");
            }
            list.push(self.selector()?);
            if !self.eat_punct(",") {
                break;
            }
        }
        let end = self.expect_punct("}")?;
        let mut sources = HashSet::new();
        let mut visible = HashSet::new();
        for sel in &list {
            if let Selector::Name { source, target, span } = sel {
                let dup = |what: &str, name: &str| SyntaxError::Parse {
                    span: *span,
                    expected: format!("distinct {what}"),
                    found: format!("`{name}` twice"),
                };
                if !sources.insert(source.as_str()) {
                    return Err(dup("selector names", source));
                }
                let shown = match target {
                    SelectorTarget::Same => Some(source),
                    SelectorTarget::Rename(to) => Some(to),
                    SelectorTarget::Hidden => None,
                };
                if let Some(shown) = shown {
                    if !visible.insert(shown.as_str()) {
                        return Err(dup("rename targets", shown));
                    }
                }
            }
        }
        Ok((Selectors::Named(list), end))
    }

    fn selector(&mut self) -> PResult<Selector> {
        if self.at_punct("_") {
            return Ok(Selector::Wildcard { span: self.bump().span });
        }
        let (source, span) = self.ident()?;
        if !self.eat_punct("=>") {
            return Ok(Selector::Name { source, target: SelectorTarget::Same, span });
        }
        if self.at_punct("_") {
            let end = self.bump().span;
            return Ok(Selector::Name { source, target: SelectorTarget::Hidden, span: span.to(end) });
        }
        let (to, end) = self.ident()?;
        Ok(Selector::Name { source, target: SelectorTarget::Rename(to), span: span.to(end) })
    }

    fn stat(&mut self) -> PResult<Stat> {
        if self.at_keyword("def") {
            return Ok(Stat::Def(self.def()?));
        }
        if self.at_keyword("val") {
            let start = self.bump().span;
            let (name, _) = self.ident()?;
            self.expect_punct("=")?;
            let value = self.expr()?;
            let span = start.to(value.span());
            return Ok(Stat::Val(ValDecl { name, value, span }));
        }
        Ok(Stat::Expr(self.expr()?))
    }

    fn def(&mut self) -> PResult<DefDecl> {
        let start = self.expect_keyword("def")?;
        let (name, _) = self.ident()?;
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.at_punct(")") {
            loop {
                params.push(self.ident()?.0);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        self.expect_punct(")")?;
        self.expect_punct("=")?;
        let body = if self.at_ident("__frame") && self.peek_at(1).is_some_and(|t| t.is_punct("{")) {
            let kw = self.bump().span;
            let inner = self.block()?;
            let span = kw.to(inner.span);
            Block::new(vec![Stat::Expr(Expr::Frame { body: inner, span })], span)
        } else {
            self.block()?
        };
        let span = start.to(body.span);
        Ok(DefDecl { name, params, body, span })
    }

    fn block(&mut self) -> PResult<Block> {
        let start = self.expect_punct("{")?;
        let mut stats = Vec::new();
        loop {
            self.skip_separators();
            if self.at_punct("}") {
                break;
            }
            if self.peek().is_none() {
                return self.error("`}`");
            }
            stats.push(self.stat()?);
        }
        let end = self.expect_punct("}")?;
        Ok(Block::new(stats, start.to(end)))
    }

    fn expr(&mut self) -> PResult<Expr> {
        let Some(tok) = self.peek() else { return self.error("expression") };
        match tok.kind {
            TokenKind::IntLit => {
                self.bump();
                let value = tok.text.parse().expect("lexer checked range");
                Ok(Expr::Lit { value: Literal::Int(value), span: tok.span })
            }
            TokenKind::StrLit => {
                self.bump();
                Ok(Expr::Lit { value: Literal::Str(unescape(&tok.text)), span: tok.span })
            }
            TokenKind::Punct if tok.text == "{" => Ok(Expr::Block(self.block()?)),
            TokenKind::Ident => {
                let next_is = |p: &str| self.peek_at(1).is_some_and(|t| t.is_punct(p));
                match tok.text.as_str() {
                    "defer" if next_is("{") => {
                        self.bump();
                        let body = self.block()?;
                        Ok(Expr::DeferCandidate { span: tok.span.to(body.span), body })
                    }
                    "__frame" if next_is("{") => {
                        self.bump();
                        let body = self.block()?;
                        Ok(Expr::Frame { span: tok.span.to(body.span), body })
                    }
                    "__defer" if next_is("(") => {
                        self.bump();
                        self.bump();
                        if !self.at_ident("thunk") {
                            return self.error("`thunk`");
                        }
                        self.bump();
                        let thunk = self.block()?;
                        let end = self.expect_punct(")")?;
                        Ok(Expr::DeferRegister { thunk, span: tok.span.to(end) })
                    }
                    _ => self.ref_or_call(),
                }
            }
            _ => self.error("expression"),
        }
    }

    fn ref_or_call(&mut self) -> PResult<Expr> {
        let path = self.qual_id()?;
        if !self.at_punct("(") {
            return Ok(Expr::Ref { path });
        }
        self.bump();
        let mut args = Vec::new();
        if !self.at_punct(")") {
            loop {
                args.push(self.expr()?);
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        let end = self.expect_punct(")")?;
        let span = path.span.to(end);
        Ok(Expr::Call { callee: Box::new(Expr::Ref { path }), args, span })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_source, SyntaxError};
    use super::*;

    const SALAT: &str = "package com.mycompany
package object salat {
  @exported import com.mongodb.casbah.Imports._
  @exported import com.novus.salat._
  @exported import com.mycompany.salat.context._
}
";

    #[test]
    fn salat_package_object() {
        let unit = parse_source(SALAT, "salat.ml1").unwrap();
        assert_eq!(unit.package_path, vec!["com", "mycompany"]);
        let templates: Vec<_> = unit.templates().collect();
        assert_eq!(templates.len(), 1);
        let t = templates[0];
        assert_eq!(t.template_kind, TemplateKind::PackageObject);
        assert_eq!(t.name, "salat");
        let imports: Vec<_> = t.imports().collect();
        assert_eq!(imports.len(), 3);
        for i in imports {
            assert_eq!(i.annotations.len(), 1);
            assert_eq!(i.annotations[0].name, "exported");
            assert_eq!(i.selectors, Selectors::Wildcard);
        }
    }

    #[test]
    fn minimal_object() {
        let unit = parse_source("object A { def f() = { 1 } }", "a.ml1").unwrap();
        let t = unit.templates().next().unwrap();
        assert_eq!(t.template_kind, TemplateKind::Object);
        let TemplateStat::Def(d) = &t.stats[0] else { panic!("expected def") };
        assert_eq!(d.name, "f");
        assert!(d.params.is_empty());
        assert_eq!(d.body.stats.len(), 1);
        assert!(matches!(&d.body.stats[0], Stat::Expr(Expr::Lit { value: Literal::Int(1), .. })));
    }

    #[test]
    fn annotated_import_at_top_level() {
        let err = parse_source("@exported import x._", "a.ml1").unwrap_err();
        assert!(matches!(err, SyntaxError::AnnotationAtTopLevel { .. }));
        assert_eq!(err.code(), "E_ANNOTATION_AT_TOP_LEVEL");
    }

    #[test]
    fn unknown_annotation_parses() {
        let unit = parse_source("object A { @foo import a._ }", "a.ml1").unwrap();
        let imp = unit.templates().next().unwrap().imports().next().unwrap();
        assert_eq!(imp.annotations[0].name, "foo");
    }

    #[test]
    fn selectors() {
        let unit = parse_source("import A.{rewriter=>_,x=>y,z,_}\nimport a.b.c", "a.ml1").unwrap();
        let imps: Vec<_> = unit.imports().collect();
        assert_eq!(imps[0].path.segments, vec!["A"]);
        let Selectors::Named(list) = &imps[0].selectors else { panic!() };
        assert_eq!(list.len(), 4);
        assert!(matches!(&list[0], Selector::Name { target: SelectorTarget::Hidden, .. }));
        assert!(matches!(&list[3], Selector::Wildcard { .. }));
        assert_eq!(imps[1].path.segments, vec!["a", "b"]);
        assert_eq!(imps[1].selectors.named_pairs(), vec![("c", "c")]);
    }

    #[test]
    fn wildcard_selector_must_be_last() {
        assert!(parse_source("import A.{_, x}", "a.ml1").is_err());
    }

    #[test]
    fn rename_targets_distinct() {
        assert!(parse_source("import A.{x=>z, y=>z}", "a.ml1").is_err());
        assert!(parse_source("import A.{x, y=>x}", "a.ml1").is_err());
    }

    #[test]
    fn import_needs_selector() {
        assert!(parse_source("import a", "a.ml1").is_err());
    }

    #[test]
    fn implicit_only_on_objects() {
        assert!(parse_source("implicit object r extends DefaultRewriter {}", "a.ml1").is_ok());
        assert!(parse_source("implicit trait r {}", "a.ml1").is_err());
        assert!(parse_source("implicit package object r {}", "a.ml1").is_err());
    }

    #[test]
    fn package_object_only_at_top_level() {
        assert!(parse_source("object A { package object b {} }", "a.ml1").is_err());
    }

    #[test]
    fn defer_is_contextual() {
        let src = "import go.defer._\nobject M { def f() = { val defer = 1; defer { g(defer) } } }";
        let unit = parse_source(src, "a.ml1").unwrap();
        let t = unit.templates().next().unwrap();
        let TemplateStat::Def(d) = &t.stats[0] else { panic!() };
        assert!(matches!(&d.body.stats[1], Stat::Expr(Expr::DeferCandidate { .. })));
    }

    #[test]
    fn intrinsic_forms() {
        let src = "object M { def f() = __frame { __defer(thunk { g() }); 1 } }";
        let unit = parse_source(src, "a.ml1").unwrap();
        let TemplateStat::Def(d) = &unit.templates().next().unwrap().stats[0] else { panic!() };
        let [Stat::Expr(Expr::Frame { body, .. })] = d.body.stats.as_slice() else { panic!() };
        assert!(matches!(&body.stats[0], Stat::Expr(Expr::DeferRegister { .. })));
    }

    #[test]
    fn other_modifiers_rejected() {
        assert!(parse_source("private object A {}", "a.ml1").is_err());
        assert!(parse_source("object A { lazy val x = 1 }", "a.ml1").is_err());
    }

    #[test]
    fn parse_error_reports_expected_and_found() {
        let err = parse_source("object A { def f( = {} }", "a.ml1").unwrap_err();
        let SyntaxError::Parse { expected, found, .. } = err else { panic!() };
        assert_eq!(expected, "identifier");
        assert_eq!(found, "`=`");
    }
}
