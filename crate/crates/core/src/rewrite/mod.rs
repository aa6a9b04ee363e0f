//! Default rewriters: binding the implicit rewriter in scope of a unit to a
//! host intrinsic (or a composition of intrinsics) and applying it to every
//! template.

pub mod defer;
pub mod upper;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::diag::{Code, Diagnostic};
use crate::scopes::{
    implicit_candidates, select_implicit, Binding, Builtin, Resolution, ScopeGraph, SymbolId, DEFAULT_REWRITER,
};
use crate::syntax::{CompilationUnit, Expr, Span, Stat, TemplateDef, TemplateStat, TopStat};

/// Error raised by an intrinsic that rejects a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteError {
    pub code: Code,
    pub span: Span,
    pub message: String,
}

/// Host transformation of one template. Must be pure. Nested templates are
/// visited separately and should be left alone. Returns the new template
/// and the number of nodes replaced.
pub type Intrinsic = fn(&TemplateDef) -> Result<(TemplateDef, usize), RewriteError>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RewriterRef {
    Identity,
    Intrinsic(String),
    /// `outer` applied to the result of `inner`.
    Composed(Box<RewriterRef>, Box<RewriterRef>),
}

impl RewriterRef {
    pub fn intrinsic(key: impl Into<String>) -> Self {
        RewriterRef::Intrinsic(key.into())
    }

    pub fn compose(outer: RewriterRef, inner: RewriterRef) -> Self {
        RewriterRef::Composed(Box::new(outer), Box::new(inner))
    }

    /// Intrinsic keys in application order (innermost first).
    pub fn chain(&self) -> Vec<&str> {
        match self {
            RewriterRef::Identity => Vec::new(),
            RewriterRef::Intrinsic(k) => vec![k.as_str()],
            RewriterRef::Composed(outer, inner) => {
                let mut c = inner.chain();
                c.extend(outer.chain());
                c
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("rewriter `{0}` is already registered")]
    Duplicate(String),
}

/// Collects intrinsics before use; each key can be registered once.
#[derive(Default)]
pub struct RegistryBuilder {
    table: BTreeMap<String, Intrinsic>,
}

impl RegistryBuilder {
    pub fn register(&mut self, key: impl Into<String>, f: Intrinsic) -> Result<&mut Self, RegistryError> {
        let key = key.into();
        if self.table.contains_key(&key) {
            return Err(RegistryError::Duplicate(key));
        }
        self.table.insert(key, f);
        Ok(self)
    }

    pub fn freeze(self) -> RewriterRegistry {
        RewriterRegistry { table: self.table }
    }
}

/// Frozen table from implicit-object FQN to intrinsic.
#[derive(Clone)]
pub struct RewriterRegistry {
    table: BTreeMap<String, Intrinsic>,
}

impl RewriterRegistry {
    pub fn builder() -> RegistryBuilder {
        RegistryBuilder::default()
    }

    /// Builder preloaded with the shipped rewriters.
    pub fn builder_with_builtins() -> RegistryBuilder {
        let mut b = RegistryBuilder::default();
        b.register(defer::KEY, defer::lower_template).expect("fresh builder");
        b.register(upper::KEY, upper::upper_template).expect("fresh builder");
        b
    }

    pub fn builtin() -> Self {
        Self::builder_with_builtins().freeze()
    }

    pub fn get(&self, key: &str) -> Option<Intrinsic> {
        self.table.get(key).copied()
    }

    pub fn contains(&self, key: &str) -> bool {
        self.table.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.table.keys().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RewriteReport {
    pub unit: String,
    pub chain: Vec<String>,
    pub templates_touched: usize,
    pub nodes_replaced: usize,
}

/// Finds the implicit rewriter in scope at the top of `unit` and maps it to
/// a [`RewriterRef`].
pub fn bind_rewriter(
    graph: &ScopeGraph,
    resolution: &Resolution,
    units: &[CompilationUnit],
    unit: usize,
    registry: &RewriterRegistry,
) -> Result<RewriterRef, Diagnostic> {
    let marker = graph.resolve_absolute(DEFAULT_REWRITER).expect("marker is built in");
    let candidates = implicit_candidates(graph, unit, marker);
    match select_implicit(&candidates) {
        Ok(None) => Ok(RewriterRef::Identity),
        Ok(Some(winner)) => Binder { graph, resolution, units, registry, unit, stack: Vec::new() }.bind(winner.symbol),
        Err(tied) => {
            let fqns: Vec<&str> = tied.iter().map(|s| graph.fqn(*s)).collect();
            Err(Diagnostic::new(
                Code::AmbiguousImplicit,
                unit,
                Span::DUMMY,
                format!("ambiguous implicit rewriters: {}", fqns.join(", ")),
            ))
        }
    }
}

struct Binder<'a> {
    graph: &'a ScopeGraph,
    resolution: &'a Resolution,
    units: &'a [CompilationUnit],
    registry: &'a RewriterRegistry,
    unit: usize,
    stack: Vec<SymbolId>,
}

impl Binder<'_> {
    fn bind(&mut self, sym: SymbolId) -> Result<RewriterRef, Diagnostic> {
        let fqn = self.graph.fqn(sym).to_string();
        if self.stack.contains(&sym) {
            return Err(self.error(Code::UnregisteredRewriter, format!("rewriter `{fqn}` is composed from itself")));
        }
        if let Some((decl_unit, (outer, inner))) = self.composition(sym) {
            self.stack.push(sym);
            let outer = self.bind_arg(decl_unit, &outer)?;
            let inner = self.bind_arg(decl_unit, &inner)?;
            self.stack.pop();
            return Ok(RewriterRef::compose(outer, inner));
        }
        if self.registry.contains(&fqn) {
            Ok(RewriterRef::Intrinsic(fqn))
        } else {
            Err(self.error(Code::UnregisteredRewriter, format!("no intrinsic registered for rewriter `{fqn}`")))
        }
    }

    fn bind_arg(&mut self, unit: usize, arg: &Expr) -> Result<RewriterRef, Diagnostic> {
        match self.resolution.binding(unit, arg.span()) {
            Some(Binding::Symbol(s)) if matches!(arg, Expr::Ref { .. }) => self.bind(*s),
            _ => Err(self.error(Code::UnregisteredRewriter, "compose arguments must name rewriter objects")),
        }
    }

    fn error(&self, code: Code, message: impl Into<String>) -> Diagnostic {
        Diagnostic::new(code, self.unit, Span::DUMMY, message)
    }

    /// `compose(outer, inner)` in the object's body: a statement of its own
    /// or the last expression of `def transform()`.
    fn composition(&self, sym: SymbolId) -> Option<(usize, (Expr, Expr))> {
        let decl = self.graph.symbol(sym).decl?;
        let t = find_template(&self.units[decl.unit], decl.span)?;
        let compose_args = |e: &'_ Expr| -> bool {
            matches!(e, Expr::Call { callee, args, .. }
                if args.len() == 2
                && matches!(self.resolution.binding(decl.unit, callee.span()), Some(Binding::Builtin(Builtin::Compose))))
        };
        let found = t.stats.iter().rev().find_map(|s| match s {
            TemplateStat::Expr(e) if compose_args(e) => Some(e),
            TemplateStat::Def(d) if d.name == "transform" && d.params.is_empty() => match d.body.stats.last() {
                Some(Stat::Expr(e)) if compose_args(e) => Some(e),
                _ => None,
            },
            _ => None,
        })?;
        let Expr::Call { args, .. } = found else { return None };
        Some((decl.unit, (args[0].clone(), args[1].clone())))
    }
}

fn find_template(unit: &CompilationUnit, span: Span) -> Option<&TemplateDef> {
    fn walk(t: &TemplateDef, span: Span) -> Option<&TemplateDef> {
        if t.span == span {
            return Some(t);
        }
        t.nested_templates().find_map(|n| walk(n, span))
    }
    unit.templates().find_map(|t| walk(t, span))
}

/// Applies `r` to every template of `unit`, outer templates before the
/// templates nested in them, in source order.
pub fn apply_rewriter(
    r: &RewriterRef,
    unit: &CompilationUnit,
    unit_index: usize,
    registry: &RewriterRegistry,
) -> Result<(CompilationUnit, RewriteReport), Diagnostic> {
    let chain = r.chain();
    let mut fns = Vec::with_capacity(chain.len());
    for key in &chain {
        match registry.get(key) {
            Some(f) => fns.push((*key, f)),
            None => {
                return Err(Diagnostic::new(
                    Code::UnregisteredRewriter,
                    unit_index,
                    Span::DUMMY,
                    format!("no intrinsic registered for rewriter `{key}`"),
                ))
            }
        }
    }
    let mut report = RewriteReport {
        unit: unit.source_name.clone(),
        chain: chain.iter().map(|k| k.to_string()).collect(),
        templates_touched: 0,
        nodes_replaced: 0,
    };
    let mut out = unit.clone();
    if fns.is_empty() {
        return Ok((out, report));
    }
    for stat in &mut out.stats {
        if let TopStat::Template(t) = stat {
            *t = rewrite_template(t, &fns, unit_index, &mut report)?;
        }
    }
    Ok((out, report))
}

fn rewrite_template(
    t: &TemplateDef,
    fns: &[(&str, Intrinsic)],
    unit_index: usize,
    report: &mut RewriteReport,
) -> Result<TemplateDef, Diagnostic> {
    let mut cur = t.clone();
    let mut replaced = 0;
    for (key, f) in fns {
        let (next, n) = f(&cur)
            .map_err(|e| Diagnostic::new(e.code, unit_index, e.span, format!("{} (rewriter `{key}`)", e.message)))?;
        cur = next;
        replaced += n;
    }
    if replaced > 0 {
        report.templates_touched += 1;
        report.nodes_replaced += replaced;
    }
    for stat in &mut cur.stats {
        if let TemplateStat::Template(n) = stat {
            *n = rewrite_template(n, fns, unit_index, report)?;
        }
    }
    Ok(cur)
}
