//! Export closures: the names a template makes visible through its
//! `@exported` imports, followed transitively.
//!
//! Lookup through an export edge is driven by a `(template, name)` state:
//! "which symbols does `template`'s closure provide under `name`?". Each edge
//! maps the requested name back to the source names its selectors accept
//! (renames inverted, hidden names dropped), checks the target's direct
//! members, and continues into the target's own closure. A state is entered
//! at most once, so lookups terminate on cyclic edge sets. Renames inside a
//! cycle can change the name being looked up, which is why the state is the
//! pair and not the template alone.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use super::graph::{ScopeGraph, SymbolId};
use crate::syntax::{QualId, Selector, SelectorTarget, Selectors, Span};

/// One `@exported` import clause.
#[derive(Debug, Clone)]
pub struct ExportEdge {
    pub origin: SymbolId,
    pub import_path: QualId,
    pub selectors: Selectors,
    pub target: SymbolId,
    pub unit: usize,
    pub span: Span,
}

/// Reference to the `index`-th export edge of `origin`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeRef {
    pub origin: SymbolId,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureEntry {
    pub name: String,
    pub symbol: SymbolId,
    /// Edges traversed, outermost first. Shortest derivation, ties broken by
    /// edge order.
    pub provenance: Vec<EdgeRef>,
}

/// Entries keyed by visible name; one entry per `(name, symbol)` pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExportClosure {
    by_name: BTreeMap<String, Vec<ClosureEntry>>,
}

impl ExportClosure {
    pub fn is_empty(&self) -> bool {
        self.by_name.is_empty()
    }

    pub fn len(&self) -> usize {
        self.by_name.values().map(Vec::len).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = &ClosureEntry> {
        self.by_name.values().flatten()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.by_name.keys().map(String::as_str)
    }

    pub fn entries_named(&self, name: &str) -> &[ClosureEntry] {
        self.by_name.get(name).map_or(&[], Vec::as_slice)
    }

    pub fn symbols_named(&self, name: &str) -> impl Iterator<Item = SymbolId> + '_ {
        self.entries_named(name).iter().map(|e| e.symbol)
    }

    /// `(name, symbol)` pairs, sorted.
    pub fn pairs(&self) -> BTreeSet<(String, SymbolId)> {
        self.entries().map(|e| (e.name.clone(), e.symbol)).collect()
    }

    fn insert(&mut self, entry: ClosureEntry) {
        let slot = self.by_name.entry(entry.name.clone()).or_default();
        if !slot.iter().any(|e| e.symbol == entry.symbol) {
            slot.push(entry);
            slot.sort_by_key(|e| e.symbol);
        }
    }
}

/// Names that can appear in any closure: declared member names plus the
/// targets of rename selectors on export edges.
fn name_universe(graph: &ScopeGraph) -> BTreeSet<String> {
    let mut names: BTreeSet<String> = graph.member_index.keys().map(|(_, n)| n.clone()).collect();
    for edge in graph.all_export_edges() {
        if let Selectors::Named(list) = &edge.selectors {
            for sel in list {
                if let Selector::Name { target: SelectorTarget::Rename(to), .. } = sel {
                    names.insert(to.clone());
                }
            }
        }
    }
    names
}

pub(crate) fn compute_all(graph: &ScopeGraph) -> std::collections::HashMap<SymbolId, ExportClosure> {
    let universe = name_universe(graph);
    graph.exports.keys().map(|&t| (t, export_closure_with(graph, t, &universe))).collect()
}

/// Computes the export closure of `template` from the graph's edges, without
/// using cached closures.
pub fn compute_export_closure(graph: &ScopeGraph, template: SymbolId) -> ExportClosure {
    export_closure_with(graph, template, &name_universe(graph))
}

fn export_closure_with(graph: &ScopeGraph, template: SymbolId, universe: &BTreeSet<String>) -> ExportClosure {
    let mut closure = ExportClosure::default();
    if graph.export_edges(template).is_empty() {
        return closure;
    }
    for name in universe {
        for (symbol, provenance) in lookup_exported(graph, template, name) {
            closure.insert(ClosureEntry { name: name.clone(), symbol, provenance });
        }
    }
    closure
}

/// Breadth-first search over `(template, name)` states starting at
/// `(template, visible)`. Returns each reachable symbol with the first (and
/// so shortest) edge path that reaches it.
fn lookup_exported(graph: &ScopeGraph, template: SymbolId, visible: &str) -> Vec<(SymbolId, Vec<EdgeRef>)> {
    let mut found: Vec<(SymbolId, Vec<EdgeRef>)> = Vec::new();
    let mut visited: HashSet<(SymbolId, String)> = HashSet::new();
    let mut queue: VecDeque<(SymbolId, String, Vec<EdgeRef>)> = VecDeque::new();
    visited.insert((template, visible.to_string()));
    queue.push_back((template, visible.to_string(), Vec::new()));
    while let Some((at, name, path)) = queue.pop_front() {
        for (index, edge) in graph.export_edges(at).iter().enumerate() {
            for source in edge.selectors.sources_for(&name) {
                let mut next = path.clone();
                next.push(EdgeRef { origin: at, index });
                if let Some(sym) = graph.direct_member(edge.target, source) {
                    if !found.iter().any(|(s, _)| *s == sym) {
                        found.push((sym, next.clone()));
                    }
                }
                if let Some(node) = graph.closure_node(edge.target) {
                    if visited.insert((node, source.to_string())) {
                        queue.push_back((node, source.to_string(), next));
                    }
                }
            }
        }
    }
    found
}

/// Union of the export closures of `template`'s transitive parents, in
/// linearization order. The first entry for a `(name, symbol)` pair is kept.
pub(crate) fn inherited_exports(graph: &ScopeGraph, template: SymbolId) -> ExportClosure {
    let mut out = ExportClosure::default();
    for &parent in graph.linearization(template) {
        for entry in graph.export_closure(parent).entries() {
            out.insert(entry.clone());
        }
    }
    out
}
