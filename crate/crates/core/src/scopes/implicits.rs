//! Implicit-object discovery at unit scope, the selection policy shared by
//! rewriter binding and the context linter, and the linter itself.

use std::collections::BTreeSet;

use super::graph::{DeclSite, ScopeGraph, SymbolId, SymbolKind};
use super::lookup::{Binding, Lookup, Site, Tier};
use crate::syntax::{CompilationUnit, TemplateDef, TemplateKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplicitCandidate {
    pub symbol: SymbolId,
    pub name: String,
    pub tier: Tier,
    /// Index of the providing import among the unit's imports; 0 for the
    /// package tier.
    pub position: usize,
}

fn is_implicit_of(graph: &ScopeGraph, sym: SymbolId, marker: SymbolId) -> bool {
    let s = graph.symbol(sym);
    s.implicit && s.kind == SymbolKind::Template(TemplateKind::Object) && graph.derives_from(sym, marker)
}

/// Implicit objects deriving from `marker` that are reachable by name from
/// the unit's top scope through imports or its package. Shadowed names are
/// skipped. Ordered by tier, then import position, then name.
pub fn implicit_candidates(graph: &ScopeGraph, unit: usize, marker: SymbolId) -> Vec<ImplicitCandidate> {
    let site = Site::unit_level(graph, unit);
    let mut out = Vec::new();
    let consider = |name: &str, lookup: Lookup, tier: Tier, position: usize, out: &mut Vec<ImplicitCandidate>| {
        let Lookup::Found(sym) = lookup else { return };
        if !is_implicit_of(graph, sym, marker) {
            return;
        }
        if graph.resolve_head_tier(&site, name) != Ok((Binding::Symbol(sym), tier)) {
            return;
        }
        if !out.iter().any(|c: &ImplicitCandidate| c.symbol == sym && c.tier == tier && c.position == position) {
            out.push(ImplicitCandidate { symbol: sym, name: name.to_string(), tier, position });
        }
    };
    let imports: Vec<_> = graph.unit_imports(unit).collect();
    for (pos, imp) in imports.iter().enumerate() {
        let Some(target) = imp.target else { continue };
        for (visible, source) in imp.selectors.named_pairs() {
            consider(visible, graph.visible_through(target, source), Tier::NamedImport, pos, &mut out);
        }
    }
    for (pos, imp) in imports.iter().enumerate() {
        let Some(target) = imp.target else { continue };
        if !imp.selectors.has_wildcard() {
            continue;
        }
        for name in graph.visible_names(target) {
            if !imp.selectors.mentions(&name) {
                consider(&name, graph.visible_through(target, &name), Tier::WildcardImport, pos, &mut out);
            }
        }
    }
    if let Some(pkg) = graph.unit_package(unit) {
        for name in graph.visible_names(pkg) {
            consider(&name, graph.visible_through(pkg, &name), Tier::Package, 0, &mut out);
        }
    }
    out
}

/// Picks the winning candidate: the highest-precedence tier, then the last
/// import within it. Two different symbols at that position are ambiguous.
pub fn select_implicit(candidates: &[ImplicitCandidate]) -> Result<Option<&ImplicitCandidate>, Vec<SymbolId>> {
    let Some(best_tier) = candidates.iter().map(|c| c.tier).min() else {
        return Ok(None);
    };
    let in_tier = candidates.iter().filter(|c| c.tier == best_tier);
    let last = in_tier.clone().map(|c| c.position).max().expect("tier is non-empty");
    let winners: Vec<&ImplicitCandidate> = in_tier.filter(|c| c.position == last).collect();
    let distinct: BTreeSet<SymbolId> = winners.iter().map(|c| c.symbol).collect();
    if distinct.len() > 1 {
        return Err(distinct.into_iter().collect());
    }
    Ok(winners.first().copied())
}

/// Two units whose ambient implicit for the marker differs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    pub unit_a: usize,
    pub unit_b: usize,
    pub symbol_a: SymbolId,
    pub symbol_b: SymbolId,
}

/// Compares the winning implicit for `marker` across units. Units that
/// declare an implementation of the marker themselves, and units with no
/// (or an ambiguous) winner, are not compared.
pub fn check_context_consistency(graph: &ScopeGraph, units: &[CompilationUnit], marker: SymbolId) -> Vec<Divergence> {
    let winners: Vec<(usize, SymbolId)> = (0..units.len())
        .filter(|&u| !declares_implicit_of(graph, u, &units[u], marker))
        .filter_map(|u| {
            let cands = implicit_candidates(graph, u, marker);
            select_implicit(&cands).ok().flatten().map(|c| (u, c.symbol))
        })
        .collect();
    let mut out = Vec::new();
    for (i, &(ua, sa)) in winners.iter().enumerate() {
        for &(ub, sb) in &winners[i + 1..] {
            if sa != sb {
                out.push(Divergence { unit_a: ua, unit_b: ub, symbol_a: sa, symbol_b: sb });
            }
        }
    }
    out
}

fn declares_implicit_of(graph: &ScopeGraph, unit: usize, cu: &CompilationUnit, marker: SymbolId) -> bool {
    fn walk(graph: &ScopeGraph, unit: usize, t: &TemplateDef, marker: SymbolId) -> bool {
        let declared = graph.declared_at(DeclSite { unit, span: t.span });
        declared.is_some_and(|s| is_implicit_of(graph, s, marker))
            || t.nested_templates().any(|n| walk(graph, unit, n, marker))
    }
    cu.templates().any(|t| walk(graph, unit, t, marker))
}

/// One report line per divergence, sorted.
pub fn divergence_report(graph: &ScopeGraph, marker: SymbolId, divergences: &[Divergence]) -> Vec<String> {
    let mut lines: Vec<String> = divergences
        .iter()
        .map(|d| {
            format!(
                "DIVERGENCE {} {}:{} != {}:{}",
                graph.fqn(marker),
                graph.unit_name(d.unit_a),
                graph.fqn(d.symbol_a),
                graph.unit_name(d.unit_b),
                graph.fqn(d.symbol_b)
            )
        })
        .collect();
    lines.sort();
    lines
}
