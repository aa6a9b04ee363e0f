//! Random export graphs over templates `g.T0..`, a source renderer, and a
//! brute-force fixpoint oracle that shares no code with the library.

use std::collections::BTreeSet;

use proptest::collection::vec;
use proptest::prelude::*;

pub const POOL: &[&str] = &["p", "q", "r", "s"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sel {
    Keep(String),
    Rename(String, String),
    Hide(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sels {
    All,
    Named { list: Vec<Sel>, wildcard: bool },
}

impl Sels {
    /// Name under which `source` is re-exported through this edge, if any.
    pub fn visible(&self, source: &str) -> Option<String> {
        match self {
            Sels::All => Some(source.to_string()),
            Sels::Named { list, wildcard } => {
                for sel in list {
                    match sel {
                        Sel::Keep(s) if s == source => return Some(s.clone()),
                        Sel::Rename(s, to) if s == source => return Some(to.clone()),
                        Sel::Hide(s) if s == source => return None,
                        _ => {}
                    }
                }
                wildcard.then(|| source.to_string())
            }
        }
    }

    fn render(&self) -> String {
        match self {
            Sels::All => "_".into(),
            Sels::Named { list, wildcard } => {
                let mut parts: Vec<String> = list
                    .iter()
                    .map(|s| match s {
                        Sel::Keep(n) => n.clone(),
                        Sel::Rename(n, to) => format!("{n} => {to}"),
                        Sel::Hide(n) => format!("{n} => _"),
                    })
                    .collect();
                if *wildcard {
                    parts.push("_".into());
                }
                format!("{{{}}}", parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub sels: Sels,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportGraph {
    /// Def names declared directly in each template.
    pub defs: Vec<BTreeSet<String>>,
    pub edges: Vec<Edge>,
}

pub fn template_fqn(i: usize) -> String {
    format!("g.T{i}")
}

fn sels() -> impl Strategy<Value = Sels> {
    let pool = || proptest::sample::select(POOL).prop_map(str::to_string);
    let named = (vec((pool(), 0u8..3, pool()), 1..4), any::<bool>()).prop_map(|(raw, wildcard)| {
        let mut list = Vec::new();
        let mut sources = BTreeSet::new();
        let mut shown = BTreeSet::new();
        for (source, kind, to) in raw {
            let (sel, vis) = match kind {
                0 => (Sel::Keep(source.clone()), Some(source.clone())),
                1 => (Sel::Rename(source.clone(), to.clone()), Some(to)),
                _ => (Sel::Hide(source.clone()), None),
            };
            if sources.contains(&source) || vis.as_ref().is_some_and(|v| shown.contains(v)) {
                continue;
            }
            sources.insert(source);
            shown.extend(vis);
            list.push(sel);
        }
        Sels::Named { list, wildcard }
    });
    prop_oneof![1 => Just(Sels::All), 3 => named]
}

pub fn edge(n: usize) -> impl Strategy<Value = Edge> {
    (0..n, 0..n, sels()).prop_map(|(from, to, sels)| Edge { from, to, sels })
}

pub fn export_graph() -> impl Strategy<Value = ExportGraph> {
    (1usize..=8).prop_flat_map(|n| {
        let defs = vec(proptest::sample::subsequence(POOL, 0..=POOL.len()), n)
            .prop_map(|ds| ds.into_iter().map(|d| d.into_iter().map(str::to_string).collect()).collect());
        (defs, vec(edge(n), 0..=16)).prop_map(|(defs, edges)| ExportGraph { defs, edges })
    })
}

/// A graph together with one extra edge over the same templates.
pub fn graph_and_extra_edge() -> impl Strategy<Value = (ExportGraph, Edge)> {
    export_graph().prop_flat_map(|g| {
        let n = g.defs.len();
        (Just(g), edge(n))
    })
}

impl ExportGraph {
    pub fn with_edge(&self, e: Edge) -> ExportGraph {
        let mut g = self.clone();
        g.edges.push(e);
        g
    }

    /// One unit in package `g` holding every template.
    pub fn render(&self) -> String {
        let mut out = String::from("package g\n");
        for (i, defs) in self.defs.iter().enumerate() {
            out.push_str(&format!("\nobject T{i} {{\n"));
            for e in self.edges.iter().filter(|e| e.from == i) {
                out.push_str(&format!("  @exported import {}.{}\n", template_fqn(e.to), e.sels.render()));
            }
            for d in defs {
                out.push_str(&format!("  def {d}() = {{}}\n"));
            }
            out.push_str("}\n");
        }
        out
    }

    /// Least fixpoint of: `(v, U.s)` is exported by `T` when an edge
    /// `T -> U` shows `s` as `v` and `s` is a def of `U` or is exported by
    /// `U` as some symbol. Symbols are rendered as fully qualified names.
    pub fn oracle(&self) -> Vec<BTreeSet<(String, String)>> {
        let n = self.defs.len();
        let mut closure: Vec<BTreeSet<(String, String)>> = vec![BTreeSet::new(); n];
        loop {
            let mut changed = false;
            for e in &self.edges {
                let mut add = Vec::new();
                for d in &self.defs[e.to] {
                    if let Some(v) = e.sels.visible(d) {
                        add.push((v, format!("{}.{d}", template_fqn(e.to))));
                    }
                }
                for (name, sym) in &closure[e.to] {
                    if let Some(v) = e.sels.visible(name) {
                        add.push((v, sym.clone()));
                    }
                }
                for pair in add {
                    changed |= closure[e.from].insert(pair);
                }
            }
            if !changed {
                return closure;
            }
        }
    }
}
