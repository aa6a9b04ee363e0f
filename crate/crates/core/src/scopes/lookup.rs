//! Name lookup by precedence tier.
//!
//! Innermost first:
//! (a) local block bindings, innermost block outward;
//! (b) members of enclosing templates, their inherited members, then what
//!     their parents export;
//! (c) named-selector imports, later imports shadowing earlier ones;
//! (d) wildcard imports, later shadowing earlier; a wildcard import of a
//!     template sees its direct members and, when absent, its export closure;
//! (e) the enclosing package and its package object;
//! (f) root-package members and builtins.

use std::collections::BTreeSet;

use serde::Serialize;

use super::graph::{ImportId, ScopeGraph, SymbolId, SymbolKind};

/// Host-provided functions. They sit below every user definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Builtin {
    Print,
    Error,
    Concat,
    Add,
    Sub,
    Eq,
    When,
    Repeat,
    Compose,
}

impl Builtin {
    pub const ALL: [Builtin; 9] = [
        Builtin::Print,
        Builtin::Error,
        Builtin::Concat,
        Builtin::Add,
        Builtin::Sub,
        Builtin::Eq,
        Builtin::When,
        Builtin::Repeat,
        Builtin::Compose,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Print => "print",
            Builtin::Error => "error",
            Builtin::Concat => "concat",
            Builtin::Add => "add",
            Builtin::Sub => "sub",
            Builtin::Eq => "eq",
            Builtin::When => "when",
            Builtin::Repeat => "repeat",
            Builtin::Compose => "compose",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Builtin::ALL.into_iter().find(|b| b.name() == name)
    }
}

/// What a reference resolved to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Binding {
    Symbol(SymbolId),
    /// Parameter or block-local binding; the name is unique per project.
    Local {
        fqn: String,
        name: String,
    },
    Builtin(Builtin),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tier {
    Local,
    Template,
    NamedImport,
    WildcardImport,
    Package,
    Root,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LookupError {
    Unresolved,
    Ambiguous(Vec<SymbolId>),
}

/// Outcome of looking a single name up in one scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lookup {
    Found(SymbolId),
    Ambiguous(Vec<SymbolId>),
    NotFound,
}

/// Reference context: unit, enclosing templates (outermost first), visible
/// imports in textual order, and local bindings (innermost last).
#[derive(Debug, Clone)]
pub struct Site {
    pub unit: usize,
    pub templates: Vec<SymbolId>,
    pub imports: Vec<ImportId>,
    import_marks: Vec<usize>,
    pub locals: Vec<(String, String)>,
}

impl Site {
    pub fn unit_level(graph: &ScopeGraph, unit: usize) -> Site {
        Site {
            unit,
            templates: Vec::new(),
            imports: graph.unit_imports[unit].clone(),
            import_marks: Vec::new(),
            locals: Vec::new(),
        }
    }

    pub fn enter_template(&mut self, graph: &ScopeGraph, template: SymbolId) {
        self.templates.push(template);
        self.import_marks.push(self.imports.len());
        if let Some(ids) = graph.template_imports.get(&template) {
            self.imports.extend(ids.iter().copied());
        }
    }

    pub fn exit_template(&mut self) {
        self.templates.pop();
        let mark = self.import_marks.pop().expect("balanced enter/exit");
        self.imports.truncate(mark);
    }

    pub fn bind_local(&mut self, name: &str, fqn: String) {
        self.locals.push((name.to_string(), fqn));
    }
}

fn distinct(syms: impl IntoIterator<Item = SymbolId>) -> Lookup {
    let set: BTreeSet<SymbolId> = syms.into_iter().collect();
    match set.len() {
        0 => Lookup::NotFound,
        1 => Lookup::Found(*set.iter().next().expect("one element")),
        _ => Lookup::Ambiguous(set.into_iter().collect()),
    }
}

impl ScopeGraph {
    /// `name` as seen through a wildcard or selection of `target`: direct
    /// members win over names reached through the export closure; two
    /// different symbols in the closure are ambiguous.
    pub fn visible_through(&self, target: SymbolId, name: &str) -> Lookup {
        if let Some(s) = self.direct_member(target, name) {
            return Lookup::Found(s);
        }
        match self.closure_node(target) {
            Some(node) => distinct(self.export_closure(node).symbols_named(name)),
            None => Lookup::NotFound,
        }
    }

    /// Every name `visible_through(target, _)` can answer, sorted.
    pub fn visible_names(&self, target: SymbolId) -> Vec<String> {
        let mut names: BTreeSet<String> = self.direct_member_names(target).into_iter().map(str::to_string).collect();
        if let Some(node) = self.closure_node(target) {
            names.extend(self.export_closure(node).names().map(str::to_string));
        }
        names.into_iter().collect()
    }

    fn lookup_template_tier(&self, template: SymbolId, name: &str) -> Lookup {
        if let Some(s) = self.member(template, name) {
            return Lookup::Found(s);
        }
        for &p in self.linearization(template) {
            if let Some(s) = self.member(p, name) {
                return Lookup::Found(s);
            }
        }
        distinct(self.inherited_exports(template).symbols_named(name))
    }

    /// Resolves a single identifier at `site`, reporting the tier that answered.
    pub fn resolve_head_tier(&self, site: &Site, name: &str) -> Result<(Binding, Tier), LookupError> {
        if let Some((_, fqn)) = site.locals.iter().rev().find(|(n, _)| n == name) {
            return Ok((Binding::Local { fqn: fqn.clone(), name: name.to_string() }, Tier::Local));
        }
        let found = |l: Lookup, tier| match l {
            Lookup::Found(s) => Some(Ok((Binding::Symbol(s), tier))),
            Lookup::Ambiguous(c) => Some(Err(LookupError::Ambiguous(c))),
            Lookup::NotFound => None,
        };
        for &t in site.templates.iter().rev() {
            if let Some(r) = found(self.lookup_template_tier(t, name), Tier::Template) {
                return r;
            }
        }
        for &id in site.imports.iter().rev() {
            let imp = self.import(id);
            let Some(target) = imp.target else { continue };
            for (visible, source) in imp.selectors.named_pairs() {
                if visible == name {
                    if let Some(r) = found(self.visible_through(target, source), Tier::NamedImport) {
                        return r;
                    }
                }
            }
        }
        for &id in site.imports.iter().rev() {
            let imp = self.import(id);
            let Some(target) = imp.target else { continue };
            if imp.selectors.has_wildcard() && !imp.selectors.mentions(name) {
                if let Some(r) = found(self.visible_through(target, name), Tier::WildcardImport) {
                    return r;
                }
            }
        }
        if let Some(pkg) = self.unit_package(site.unit) {
            if let Some(r) = found(self.visible_through(pkg, name), Tier::Package) {
                return r;
            }
        }
        if let Some(s) = self.member(self.root(), name) {
            return Ok((Binding::Symbol(s), Tier::Root));
        }
        match Builtin::from_name(name) {
            Some(b) => Ok((Binding::Builtin(b), Tier::Root)),
            None => Err(LookupError::Unresolved),
        }
    }

    pub fn resolve_head(&self, site: &Site, name: &str) -> Result<Binding, LookupError> {
        self.resolve_head_tier(site, name).map(|(b, _)| b)
    }

    /// Resolves a dotted path: the head by tiers, each further segment as a
    /// member of the previous package or template.
    pub fn resolve_path(&self, site: &Site, segments: &[String]) -> Result<Binding, LookupError> {
        let (head, rest) = segments.split_first().expect("paths are non-empty");
        let mut cur = self.resolve_head(site, head)?;
        for seg in rest {
            let Binding::Symbol(s) = cur else { return Err(LookupError::Unresolved) };
            if !self.symbol(s).kind.is_scope() {
                return Err(LookupError::Unresolved);
            }
            cur = match self.visible_through(s, seg) {
                Lookup::Found(m) => Binding::Symbol(m),
                Lookup::Ambiguous(c) => return Err(LookupError::Ambiguous(c)),
                Lookup::NotFound => return Err(LookupError::Unresolved),
            };
        }
        Ok(cur)
    }

    /// Resolves an absolute dotted name from the root package.
    pub fn resolve_absolute(&self, dotted: &str) -> Option<SymbolId> {
        let mut cur = self.root();
        for seg in dotted.split('.') {
            if !self.symbol(cur).kind.is_scope() {
                return None;
            }
            cur = match self.visible_through(cur, seg) {
                Lookup::Found(m) => m,
                _ => return None,
            };
        }
        Some(cur)
    }
}

impl SymbolKind {
    pub fn is_template(self) -> bool {
        matches!(self, SymbolKind::Template(_))
    }
}
