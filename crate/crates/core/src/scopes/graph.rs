//! Project-wide symbol table: packages, templates, members, inheritance and
//! export edges.

use std::collections::HashMap;

use serde::Serialize;

use super::closure::{self, ExportClosure, ExportEdge};
use super::lookup::Site;
use crate::diag::{Code, Diagnostic};
use crate::syntax::{
    CompilationUnit, ImportClause, QualId, Selectors, Span, TemplateDef, TemplateKind, TemplateStat, TopStat,
};

/// Fully qualified name of the built-in marker trait for default rewriters.
pub const DEFAULT_REWRITER: &str = "DefaultRewriter";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub(crate) u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum SymbolKind {
    Package,
    Template(TemplateKind),
    Def,
    Val,
}

impl SymbolKind {
    pub fn is_scope(self) -> bool {
        matches!(self, SymbolKind::Package | SymbolKind::Template(_))
    }

    pub fn label(self) -> &'static str {
        match self {
            SymbolKind::Package => "package",
            SymbolKind::Template(_) => "template",
            SymbolKind::Def => "def",
            SymbolKind::Val => "val",
        }
    }
}

/// Where a symbol is declared: unit index and the declaration's span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeclSite {
    pub unit: usize,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct Symbol {
    pub fqn: String,
    pub name: String,
    pub kind: SymbolKind,
    pub owner: Option<SymbolId>,
    pub decl: Option<DeclSite>,
    pub implicit: bool,
    pub arity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ImportId(pub(crate) u32);

/// Every import clause of the project, exported or not.
#[derive(Debug, Clone)]
pub struct ImportInfo {
    pub unit: usize,
    pub span: Span,
    /// Enclosing template; `None` for unit-level imports.
    pub owner: Option<SymbolId>,
    pub path: QualId,
    pub selectors: Selectors,
    pub target: Option<SymbolId>,
    pub exported: bool,
}

#[derive(Debug, Default)]
pub struct ScopeGraph {
    pub(crate) symbols: Vec<Symbol>,
    pub(crate) by_fqn: HashMap<String, SymbolId>,
    pub(crate) members: HashMap<SymbolId, Vec<SymbolId>>,
    pub(crate) member_index: HashMap<(SymbolId, String), SymbolId>,
    pub(crate) package_objects: HashMap<SymbolId, SymbolId>,
    pub(crate) inherits: HashMap<SymbolId, Vec<SymbolId>>,
    pub(crate) linearization: HashMap<SymbolId, Vec<SymbolId>>,
    pub(crate) exports: HashMap<SymbolId, Vec<ExportEdge>>,
    pub(crate) imports: Vec<ImportInfo>,
    pub(crate) unit_imports: Vec<Vec<ImportId>>,
    pub(crate) template_imports: HashMap<SymbolId, Vec<ImportId>>,
    pub(crate) unit_packages: Vec<Option<SymbolId>>,
    pub(crate) unit_names: Vec<String>,
    pub(crate) decls: HashMap<DeclSite, SymbolId>,
    pub(crate) closures: HashMap<SymbolId, ExportClosure>,
    pub(crate) inherited: HashMap<SymbolId, ExportClosure>,
    pub(crate) root: Option<SymbolId>,
}

impl ScopeGraph {
    pub fn root(&self) -> SymbolId {
        self.root.expect("graph has a root package")
    }

    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.index()]
    }

    pub fn symbols(&self) -> impl Iterator<Item = (SymbolId, &Symbol)> {
        self.symbols.iter().enumerate().map(|(i, s)| (SymbolId(i as u32), s))
    }

    pub fn lookup_fqn(&self, fqn: &str) -> Option<SymbolId> {
        self.by_fqn.get(fqn).copied()
    }

    pub fn fqn(&self, id: SymbolId) -> &str {
        &self.symbol(id).fqn
    }

    pub fn members(&self, owner: SymbolId) -> &[SymbolId] {
        self.members.get(&owner).map_or(&[], Vec::as_slice)
    }

    pub fn member(&self, owner: SymbolId, name: &str) -> Option<SymbolId> {
        self.member_index.get(&(owner, name.to_string())).copied()
    }

    pub fn package_object(&self, package: SymbolId) -> Option<SymbolId> {
        self.package_objects.get(&package).copied()
    }

    /// Resolved parents, in declaration order.
    pub fn parents(&self, template: SymbolId) -> &[SymbolId] {
        self.inherits.get(&template).map_or(&[], Vec::as_slice)
    }

    /// Transitive parents: left-to-right, depth-first, first occurrence kept.
    pub fn linearization(&self, template: SymbolId) -> &[SymbolId] {
        self.linearization.get(&template).map_or(&[], Vec::as_slice)
    }

    pub fn export_edges(&self, template: SymbolId) -> &[ExportEdge] {
        self.exports.get(&template).map_or(&[], Vec::as_slice)
    }

    pub fn all_export_edges(&self) -> impl Iterator<Item = &ExportEdge> {
        self.symbols().flat_map(move |(id, _)| self.export_edges(id).iter())
    }

    pub fn import(&self, id: ImportId) -> &ImportInfo {
        &self.imports[id.0 as usize]
    }

    pub fn imports(&self) -> &[ImportInfo] {
        &self.imports
    }

    pub fn unit_imports(&self, unit: usize) -> impl Iterator<Item = &ImportInfo> {
        self.unit_imports[unit].iter().map(|id| self.import(*id))
    }

    pub fn template_imports(&self, template: SymbolId) -> impl Iterator<Item = &ImportInfo> {
        self.template_imports.get(&template).into_iter().flatten().map(|id| self.import(*id))
    }

    pub fn unit_package(&self, unit: usize) -> Option<SymbolId> {
        self.unit_packages[unit]
    }

    pub fn unit_count(&self) -> usize {
        self.unit_names.len()
    }

    pub fn unit_name(&self, unit: usize) -> &str {
        &self.unit_names[unit]
    }

    /// Symbol declared at `site` (template, def or val).
    pub fn declared_at(&self, site: DeclSite) -> Option<SymbolId> {
        self.decls.get(&site).copied()
    }

    pub fn is_template(&self, id: SymbolId) -> bool {
        matches!(self.symbol(id).kind, SymbolKind::Template(_))
    }

    /// Whether `template` has `ancestor` among its transitive parents.
    pub fn derives_from(&self, template: SymbolId, ancestor: SymbolId) -> bool {
        self.linearization(template).contains(&ancestor)
    }

    /// Templates whose members a wildcard import of `target` makes visible
    /// directly: the target itself, plus the package object for packages.
    pub(crate) fn closure_node(&self, target: SymbolId) -> Option<SymbolId> {
        match self.symbol(target).kind {
            SymbolKind::Package => self.package_object(target),
            SymbolKind::Template(_) => Some(target),
            _ => None,
        }
    }

    /// Direct member `name` of a package or template; package members come
    /// before package-object members.
    pub fn direct_member(&self, target: SymbolId, name: &str) -> Option<SymbolId> {
        self.member(target, name).or_else(|| match self.symbol(target).kind {
            SymbolKind::Package => self.package_object(target).and_then(|po| self.member(po, name)),
            _ => None,
        })
    }

    /// Every name `direct_member` can answer for `target`.
    pub fn direct_member_names(&self, target: SymbolId) -> Vec<&str> {
        let mut names: Vec<&str> = self.members(target).iter().map(|m| self.symbol(*m).name.as_str()).collect();
        if let Some(po) = self.package_object(target) {
            names.extend(self.members(po).iter().map(|m| self.symbol(*m).name.as_str()));
        }
        names.sort_unstable();
        names.dedup();
        names
    }

    pub fn export_closure(&self, template: SymbolId) -> &ExportClosure {
        static EMPTY: std::sync::OnceLock<ExportClosure> = std::sync::OnceLock::new();
        self.closures.get(&template).unwrap_or_else(|| EMPTY.get_or_init(ExportClosure::default))
    }

    pub fn inherited_exports(&self, template: SymbolId) -> &ExportClosure {
        static EMPTY: std::sync::OnceLock<ExportClosure> = std::sync::OnceLock::new();
        self.inherited.get(&template).unwrap_or_else(|| EMPTY.get_or_init(ExportClosure::default))
    }
}

/// Builds the scope graph for a whole project. Units are indexed by their
/// position in `units`; that order fixes symbol numbering.
pub fn build_scope_graph(units: &[CompilationUnit]) -> (ScopeGraph, Vec<Diagnostic>) {
    let mut b = Builder { graph: ScopeGraph::default(), diags: Vec::new() };
    let root = b.add_symbol(String::new(), String::new(), SymbolKind::Package, None, None);
    b.graph.root = Some(root);
    let marker = b.add_symbol(
        DEFAULT_REWRITER.into(),
        DEFAULT_REWRITER.into(),
        SymbolKind::Template(TemplateKind::Trait),
        Some(root),
        None,
    );
    b.graph.member_index.insert((root, DEFAULT_REWRITER.into()), marker);
    b.graph.members.entry(root).or_default().push(marker);

    for (u, unit) in units.iter().enumerate() {
        b.graph.unit_names.push(unit.source_name.clone());
        b.graph.unit_imports.push(Vec::new());
        b.declare_unit(u, unit);
    }
    b.resolve_import_targets();
    b.build_export_edges();
    b.graph.closures = closure::compute_all(&b.graph);
    b.resolve_parents(units);
    b.linearize();
    b.graph.inherited = b
        .graph
        .symbols()
        .filter(|(id, _)| !b.graph.linearization(*id).is_empty())
        .map(|(id, _)| (id, closure::inherited_exports(&b.graph, id)))
        .collect();
    (b.graph, b.diags)
}

struct Builder {
    graph: ScopeGraph,
    diags: Vec<Diagnostic>,
}

fn join(owner_fqn: &str, name: &str) -> String {
    if owner_fqn.is_empty() {
        name.to_string()
    } else {
        format!("{owner_fqn}.{name}")
    }
}

impl Builder {
    fn add_symbol(
        &mut self,
        fqn: String,
        name: String,
        kind: SymbolKind,
        owner: Option<SymbolId>,
        decl: Option<DeclSite>,
    ) -> SymbolId {
        let id = SymbolId(self.graph.symbols.len() as u32);
        self.graph.by_fqn.insert(fqn.clone(), id);
        self.graph.symbols.push(Symbol { fqn, name, kind, owner, decl, implicit: false, arity: 0 });
        if let Some(d) = decl {
            self.graph.decls.insert(d, id);
        }
        id
    }

    /// Declares `name` as a member of `owner`, reporting duplicates.
    fn declare_member(&mut self, owner: SymbolId, name: &str, kind: SymbolKind, decl: DeclSite) -> Option<SymbolId> {
        let fqn = join(&self.graph.symbol(owner).fqn, name);
        if self.graph.by_fqn.contains_key(&fqn) {
            self.diags.push(Diagnostic::new(
                Code::DuplicateSymbol,
                decl.unit,
                decl.span,
                format!("`{fqn}` is already defined"),
            ));
            return None;
        }
        let id = self.add_symbol(fqn, name.to_string(), kind, Some(owner), Some(decl));
        self.graph.member_index.insert((owner, name.to_string()), id);
        self.graph.members.entry(owner).or_default().push(id);
        Some(id)
    }

    fn ensure_package(&mut self, path: &[String], unit: usize) -> Option<SymbolId> {
        let mut cur = self.graph.root();
        for seg in path {
            cur = match self.graph.member(cur, seg) {
                Some(id) if self.graph.symbol(id).kind == SymbolKind::Package => id,
                Some(id) => {
                    let fqn = self.graph.symbol(id).fqn.clone();
                    self.diags.push(Diagnostic::new(
                        Code::DuplicateSymbol,
                        unit,
                        Span::DUMMY,
                        format!("package `{fqn}` clashes with a template of the same name"),
                    ));
                    return None;
                }
                None => {
                    let fqn = join(&self.graph.symbol(cur).fqn, seg);
                    let id = self.add_symbol(fqn, seg.clone(), SymbolKind::Package, Some(cur), None);
                    self.graph.member_index.insert((cur, seg.clone()), id);
                    self.graph.members.entry(cur).or_default().push(id);
                    id
                }
            };
        }
        Some(cur)
    }

    fn declare_unit(&mut self, unit: usize, cu: &CompilationUnit) {
        let pkg = self.ensure_package(&cu.package_path, unit);
        self.graph.unit_packages.push(pkg);
        for stat in &cu.stats {
            match stat {
                TopStat::Import(imp) => {
                    if !imp.annotations.is_empty() {
                        self.diags.push(Diagnostic::new(
                            Code::AnnotationAtTopLevel,
                            unit,
                            imp.span,
                            "annotated imports must be situated inside a template",
                        ));
                    }
                    let id = self.add_import(unit, None, imp);
                    self.graph.unit_imports[unit].push(id);
                }
                TopStat::Template(t) => {
                    let Some(pkg) = pkg else { continue };
                    if t.template_kind == TemplateKind::PackageObject {
                        self.declare_package_object(unit, &cu.package_path, t);
                    } else {
                        self.declare_template(unit, pkg, t);
                    }
                }
            }
        }
    }

    fn declare_package_object(&mut self, unit: usize, package_path: &[String], t: &TemplateDef) {
        let mut path = package_path.to_vec();
        path.push(t.name.clone());
        let Some(pkg) = self.ensure_package(&path, unit) else { return };
        let site = DeclSite { unit, span: t.span };
        if self.graph.package_objects.contains_key(&pkg) {
            self.diags.push(Diagnostic::new(
                Code::DuplicateSymbol,
                unit,
                t.span,
                format!("package `{}` already has a package object", self.graph.symbol(pkg).fqn),
            ));
            return;
        }
        let fqn = join(&self.graph.symbol(pkg).fqn, "package");
        let id = self.add_symbol(
            fqn,
            "package".into(),
            SymbolKind::Template(TemplateKind::PackageObject),
            Some(pkg),
            Some(site),
        );
        self.graph.package_objects.insert(pkg, id);
        self.declare_body(unit, id, t);
    }

    fn declare_template(&mut self, unit: usize, owner: SymbolId, t: &TemplateDef) {
        let site = DeclSite { unit, span: t.span };
        let Some(id) = self.declare_member(owner, &t.name, SymbolKind::Template(t.template_kind), site) else {
            return;
        };
        self.graph.symbols[id.index()].implicit = t.implicit;
        self.declare_body(unit, id, t);
    }

    fn declare_body(&mut self, unit: usize, id: SymbolId, t: &TemplateDef) {
        for stat in &t.stats {
            match stat {
                TemplateStat::Import(imp) => {
                    let import = self.add_import(unit, Some(id), imp);
                    self.graph.template_imports.entry(id).or_default().push(import);
                }
                TemplateStat::Def(d) => {
                    let site = DeclSite { unit, span: d.span };
                    if let Some(m) = self.declare_member(id, &d.name, SymbolKind::Def, site) {
                        self.graph.symbols[m.index()].arity = d.params.len();
                    }
                }
                TemplateStat::Val(v) => {
                    self.declare_member(id, &v.name, SymbolKind::Val, DeclSite { unit, span: v.span });
                }
                TemplateStat::Template(n) => self.declare_template(unit, id, n),
                TemplateStat::Expr(_) => {}
            }
        }
    }

    fn add_import(&mut self, unit: usize, owner: Option<SymbolId>, imp: &ImportClause) -> ImportId {
        let mut exported = false;
        if !imp.annotations.is_empty() {
            if imp.is_exported() {
                exported = owner.is_some();
            } else if owner.is_some() {
                let names: Vec<String> = imp.annotations.iter().map(|a| format!("@{}", a.name)).collect();
                self.diags.push(Diagnostic::new(
                    Code::UnknownImportAnnotation,
                    unit,
                    imp.annotations[0].span.to(imp.annotations.last().expect("non-empty").span),
                    format!("unknown import annotation {}; only a single @exported is supported", names.join(" ")),
                ));
            }
        }
        let id = ImportId(self.graph.imports.len() as u32);
        self.graph.imports.push(ImportInfo {
            unit,
            span: imp.span,
            owner,
            path: imp.path.clone(),
            selectors: imp.selectors.clone(),
            target: None,
            exported,
        });
        id
    }

    /// Import paths are absolute and follow declared members only.
    fn resolve_import_targets(&mut self) {
        for i in 0..self.graph.imports.len() {
            let info = &self.graph.imports[i];
            let mut cur = Some(self.graph.root());
            for seg in &info.path.segments {
                cur = cur.and_then(|c| self.graph.member(c, seg));
            }
            let target = cur.filter(|t| self.graph.symbol(*t).kind.is_scope());
            if target.is_none() {
                self.diags.push(Diagnostic::new(
                    Code::UnresolvedImportPath,
                    info.unit,
                    info.path.span,
                    format!("cannot resolve import path `{}`", info.path),
                ));
            }
            self.graph.imports[i].target = target;
        }
    }

    fn build_export_edges(&mut self) {
        for info in &self.graph.imports {
            let (Some(origin), Some(target), true) = (info.owner, info.target, info.exported) else {
                continue;
            };
            self.graph.exports.entry(origin).or_default().push(ExportEdge {
                origin,
                import_path: info.path.clone(),
                selectors: info.selectors.clone(),
                target,
                unit: info.unit,
                span: info.span,
            });
        }
    }

    /// Parents resolve in the scope enclosing the template, before any
    /// inheritance is known.
    fn resolve_parents(&mut self, units: &[CompilationUnit]) {
        let mut resolved: Vec<(SymbolId, Vec<SymbolId>)> = Vec::new();
        for (u, unit) in units.iter().enumerate() {
            let mut site = Site::unit_level(&self.graph, u);
            for t in unit.templates() {
                self.parents_in(&mut site, t, &mut resolved);
            }
        }
        for (id, parents) in resolved {
            self.graph.inherits.insert(id, parents);
        }
    }

    fn parents_in(&mut self, site: &mut Site, t: &TemplateDef, out: &mut Vec<(SymbolId, Vec<SymbolId>)>) {
        let Some(id) = self.graph.declared_at(DeclSite { unit: site.unit, span: t.span }) else {
            return;
        };
        let mut parents = Vec::new();
        for p in &t.parents {
            match self.graph.resolve_path(site, &p.segments) {
                Ok(super::Binding::Symbol(s)) if self.graph.is_template(s) && s != id => parents.push(s),
                _ => self.diags.push(Diagnostic::new(
                    Code::UnresolvedParent,
                    site.unit,
                    p.span,
                    format!("cannot resolve parent template `{p}`"),
                )),
            }
        }
        out.push((id, parents));
        site.enter_template(&self.graph, id);
        for n in t.nested_templates() {
            self.parents_in(site, n, out);
        }
        site.exit_template();
    }

    fn linearize(&mut self) {
        let ids: Vec<SymbolId> = self.graph.inherits.keys().copied().collect();
        for id in ids {
            let mut order = Vec::new();
            let mut stack = vec![id];
            self.linearize_into(id, &mut order, &mut stack);
            self.graph.linearization.insert(id, order);
        }
    }

    fn linearize_into(&self, t: SymbolId, order: &mut Vec<SymbolId>, stack: &mut Vec<SymbolId>) {
        for &p in self.graph.parents(t) {
            if stack.contains(&p) || order.contains(&p) {
                continue;
            }
            order.push(p);
            stack.push(p);
            self.linearize_into(p, order, stack);
            stack.pop();
        }
    }
}
