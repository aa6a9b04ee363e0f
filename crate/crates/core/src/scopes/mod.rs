//! Scope graph, export closures, name resolution, implicit discovery and the
//! cross-unit context linter.

mod closure;
mod dump;
mod graph;
mod implicits;
mod lookup;
mod resolve;

pub use closure::{compute_export_closure, ClosureEntry, EdgeRef, ExportClosure, ExportEdge};
pub use dump::resolution_dump;
pub use graph::{
    build_scope_graph, DeclSite, ImportId, ImportInfo, ScopeGraph, Symbol, SymbolId, SymbolKind, DEFAULT_REWRITER,
};
pub use implicits::{
    check_context_consistency, divergence_report, implicit_candidates, select_implicit, Divergence, ImplicitCandidate,
};
pub use lookup::{Binding, Builtin, Lookup, LookupError, Site, Tier};
pub use resolve::{erase_import_annotations, resolve_units, RefSite, Resolution, ResolvedRef};

use crate::diag::Diagnostic;
use crate::syntax::CompilationUnit;

/// Graph plus resolution for a project, with all diagnostics in order.
#[derive(Debug)]
pub struct Analysis {
    pub graph: ScopeGraph,
    pub resolution: Resolution,
    pub diagnostics: Vec<Diagnostic>,
}

impl Analysis {
    pub fn is_ok(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

pub fn analyze(units: &[CompilationUnit]) -> Analysis {
    let (graph, mut diagnostics) = build_scope_graph(units);
    let resolution = resolve_units(&graph, units);
    diagnostics.extend(resolution.diagnostics.iter().cloned());
    Analysis { graph, resolution, diagnostics }
}
