//! JSON dump printed by `resolve --dump`.

use serde::Serialize;

use super::closure::{ClosureEntry, ExportClosure};
use super::graph::{ScopeGraph, SymbolKind};
use super::lookup::Binding;
use super::resolve::Resolution;
use crate::diag::{Code, Diagnostic};
use crate::syntax::Span;

#[derive(Serialize)]
struct Dump<'a> {
    references: Vec<RefDump<'a>>,
    exports: Vec<ClosureDump>,
    diagnostics: Vec<DiagDump<'a>>,
}

#[derive(Serialize)]
struct RefDump<'a> {
    unit: &'a str,
    span: Span,
    path: &'a str,
    symbol: String,
    kind: &'static str,
}

#[derive(Serialize)]
struct ClosureDump {
    template: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    entries: Vec<EntryDump>,
    #[serde(rename = "inherited", skip_serializing_if = "Vec::is_empty")]
    inherited: Vec<EntryDump>,
}

#[derive(Serialize)]
struct EntryDump {
    name: String,
    symbol: String,
    provenance: Vec<String>,
}

#[derive(Serialize)]
struct DiagDump<'a> {
    code: Code,
    unit: Option<&'a str>,
    span: Option<Span>,
    message: &'a str,
}

fn entry(graph: &ScopeGraph, e: &ClosureEntry) -> EntryDump {
    EntryDump {
        name: e.name.clone(),
        symbol: graph.fqn(e.symbol).to_string(),
        provenance: e
            .provenance
            .iter()
            .map(|r| {
                let edge = &graph.export_edges(r.origin)[r.index];
                format!("{}: import {}.{}", graph.fqn(r.origin), edge.import_path, edge.selectors)
            })
            .collect(),
    }
}

fn entries(graph: &ScopeGraph, c: &ExportClosure) -> Vec<EntryDump> {
    c.entries().map(|e| entry(graph, e)).collect()
}

/// Reference table, per-template export closures (own and inherited) and
/// diagnostics. Ordering follows unit order, spans and symbol numbering.
pub fn resolution_dump(graph: &ScopeGraph, resolution: &Resolution, diagnostics: &[Diagnostic]) -> String {
    let references = resolution
        .refs
        .iter()
        .map(|(site, r)| {
            let (symbol, kind) = match &r.binding {
                Binding::Symbol(s) => (graph.fqn(*s).to_string(), graph.symbol(*s).kind.label()),
                Binding::Local { fqn, .. } => (fqn.clone(), "local"),
                Binding::Builtin(b) => (b.name().to_string(), "builtin"),
            };
            RefDump { unit: graph.unit_name(site.unit), span: site.span, path: &r.path, symbol, kind }
        })
        .collect();
    let exports = graph
        .symbols()
        .filter(|(_, s)| matches!(s.kind, SymbolKind::Template(_)))
        .filter_map(|(id, s)| {
            let own = entries(graph, graph.export_closure(id));
            let inherited = entries(graph, graph.inherited_exports(id));
            (!own.is_empty() || !inherited.is_empty()).then(|| ClosureDump {
                template: s.fqn.clone(),
                entries: own,
                inherited,
            })
        })
        .collect();
    let diagnostics = diagnostics
        .iter()
        .map(|d| DiagDump { code: d.code, unit: d.unit.map(|u| graph.unit_name(u)), span: d.span, message: &d.message })
        .collect();
    serde_json::to_string_pretty(&Dump { references, exports, diagnostics }).expect("dump serializes")
}
