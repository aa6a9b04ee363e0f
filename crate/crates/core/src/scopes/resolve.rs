use std::collections::BTreeMap;

use super::graph::{DeclSite, ScopeGraph};
use super::lookup::{Binding, Builtin, LookupError, Site};
use crate::diag::{Code, Diagnostic};
use crate::syntax::{Block, CompilationUnit, DefDecl, Expr, Span, Stat, TemplateDef, TemplateStat, TopStat};

/// A reference site: unit index and the span of the `Ref` node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RefSite {
    pub unit: usize,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedRef {
    pub path: String,
    pub binding: Binding,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Resolution {
    pub refs: BTreeMap<RefSite, ResolvedRef>,
    /// Annotated import clauses whose meaning now lives in the scope graph.
    pub erased_imports: Vec<RefSite>,
    /// Local FQN of every block-level val and def, keyed by declaration span.
    pub locals: BTreeMap<RefSite, String>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Resolution {
    pub fn binding(&self, unit: usize, span: Span) -> Option<&Binding> {
        self.refs.get(&RefSite { unit, span }).map(|r| &r.binding)
    }

    pub fn is_ok(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

/// Resolves every reference in `units` against `graph`. Import annotations in
/// `units` are ignored; only the graph's export edges matter.
pub fn resolve_units(graph: &ScopeGraph, units: &[CompilationUnit]) -> Resolution {
    let mut r = Resolver { graph, out: Resolution::default() };
    for (u, unit) in units.iter().enumerate() {
        let mut site = Site::unit_level(graph, u);
        for stat in &unit.stats {
            match stat {
                TopStat::Import(i) if !i.annotations.is_empty() => {
                    r.out.erased_imports.push(RefSite { unit: u, span: i.span })
                }
                TopStat::Import(_) => {}
                TopStat::Template(t) => r.template(&mut site, t),
            }
        }
    }
    r.out
}

struct Resolver<'g> {
    graph: &'g ScopeGraph,
    out: Resolution,
}

impl Resolver<'_> {
    fn template(&mut self, site: &mut Site, t: &TemplateDef) {
        let Some(id) = self.graph.declared_at(DeclSite { unit: site.unit, span: t.span }) else {
            return;
        };
        let owner = self.graph.fqn(id).to_string();
        site.enter_template(self.graph, id);
        for stat in &t.stats {
            match stat {
                TemplateStat::Import(i) => {
                    if !i.annotations.is_empty() {
                        self.out.erased_imports.push(RefSite { unit: site.unit, span: i.span });
                    }
                }
                TemplateStat::Def(d) => {
                    let fqn = format!("{owner}.{}", d.name);
                    self.def_body(site, d, &fqn);
                }
                TemplateStat::Val(v) => {
                    let fqn = format!("{owner}.{}", v.name);
                    self.expr(site, &v.value, &fqn);
                }
                TemplateStat::Template(n) => self.template(site, n),
                TemplateStat::Expr(e) => self.expr(site, e, &owner),
            }
        }
        site.exit_template();
    }

    /// Binds the parameters of `d` (whose locals are owned by `def_fqn`) and
    /// resolves its body.
    fn def_body(&mut self, site: &mut Site, d: &DefDecl, def_fqn: &str) {
        let mark = site.locals.len();
        for (i, p) in d.params.iter().enumerate() {
            if d.params[..i].contains(p) {
                self.out.diagnostics.push(Diagnostic::new(
                    Code::DuplicateSymbol,
                    site.unit,
                    d.span,
                    format!("parameter `{p}` of `{def_fqn}` is declared twice"),
                ));
            }
            site.bind_local(p, format!("{def_fqn}/{p}"));
        }
        self.block(site, &d.body, def_fqn);
        site.locals.truncate(mark);
    }

    fn block(&mut self, site: &mut Site, b: &Block, owner: &str) {
        let mark = site.locals.len();
        for stat in &b.stats {
            match stat {
                Stat::Val(v) => {
                    self.expr(site, &v.value, owner);
                    let fqn = format!("{owner}/{}@{}", v.name, v.span.start);
                    self.out.locals.insert(RefSite { unit: site.unit, span: v.span }, fqn.clone());
                    site.bind_local(&v.name, fqn);
                }
                Stat::Def(d) => {
                    let fqn = format!("{owner}/{}@{}", d.name, d.span.start);
                    self.out.locals.insert(RefSite { unit: site.unit, span: d.span }, fqn.clone());
                    site.bind_local(&d.name, fqn.clone());
                    self.def_body(site, d, &fqn);
                }
                Stat::Expr(e) => self.expr(site, e, owner),
            }
        }
        site.locals.truncate(mark);
    }

    fn expr(&mut self, site: &mut Site, e: &Expr, owner: &str) {
        match e {
            Expr::Lit { .. } => {}
            Expr::Ref { path } => {
                self.reference(site, &path.segments, path.span);
            }
            Expr::Call { callee, args, .. } => {
                let callee_binding = match callee.as_ref() {
                    Expr::Ref { path } => self.reference(site, &path.segments, path.span),
                    other => {
                        self.expr(site, other, owner);
                        None
                    }
                };
                if callee_binding == Some(Binding::Builtin(Builtin::Repeat)) {
                    if let [Expr::Ref { path }, count, body @ ..] = args.as_slice() {
                        if path.segments.len() == 1 {
                            self.repeat(site, path, count, body, owner);
                            return;
                        }
                    }
                }
                for a in args {
                    self.expr(site, a, owner);
                }
            }
            Expr::Block(b) => self.block(site, b, owner),
            Expr::DeferCandidate { body, .. } | Expr::Frame { body, .. } => self.block(site, body, owner),
            Expr::DeferRegister { thunk, .. } => self.block(site, thunk, owner),
        }
    }

    /// `repeat(i, n, body...)` binds `i` in `body` only.
    fn repeat(&mut self, site: &mut Site, binder: &crate::syntax::QualId, count: &Expr, body: &[Expr], owner: &str) {
        self.expr(site, count, owner);
        let name = &binder.segments[0];
        let fqn = format!("{owner}/{name}@{}", binder.span.start);
        self.out.refs.insert(
            RefSite { unit: site.unit, span: binder.span },
            ResolvedRef { path: name.clone(), binding: Binding::Local { fqn: fqn.clone(), name: name.clone() } },
        );
        let mark = site.locals.len();
        site.bind_local(name, fqn);
        for b in body {
            self.expr(site, b, owner);
        }
        site.locals.truncate(mark);
    }

    fn reference(&mut self, site: &Site, segments: &[String], span: Span) -> Option<Binding> {
        let dotted = segments.join(".");
        match self.graph.resolve_path(site, segments) {
            Ok(binding) => {
                self.out
                    .refs
                    .insert(RefSite { unit: site.unit, span }, ResolvedRef { path: dotted, binding: binding.clone() });
                Some(binding)
            }
            Err(LookupError::Unresolved) => {
                self.out.diagnostics.push(Diagnostic::new(
                    Code::Unresolved,
                    site.unit,
                    span,
                    format!("cannot resolve `{dotted}`"),
                ));
                None
            }
            Err(LookupError::Ambiguous(candidates)) => {
                let fqns: Vec<&str> = candidates.iter().map(|c| self.graph.fqn(*c)).collect();
                self.out.diagnostics.push(Diagnostic::new(
                    Code::Ambiguous,
                    site.unit,
                    span,
                    format!("`{dotted}` is ambiguous: {}", fqns.join(", ")),
                ));
                None
            }
        }
    }
}

/// Strips annotations from every import clause. Resolution results do not
/// change: export information is carried by the scope graph.
pub fn erase_import_annotations(units: &[CompilationUnit]) -> Vec<CompilationUnit> {
    units
        .iter()
        .map(|u| {
            let mut u = u.clone();
            for stat in &mut u.stats {
                match stat {
                    TopStat::Import(i) => i.annotations.clear(),
                    TopStat::Template(t) => erase_template(t),
                }
            }
            u
        })
        .collect()
}

fn erase_template(t: &mut TemplateDef) {
    for stat in &mut t.stats {
        match stat {
            TemplateStat::Import(i) => i.annotations.clear(),
            TemplateStat::Template(n) => erase_template(n),
            _ => {}
        }
    }
}
