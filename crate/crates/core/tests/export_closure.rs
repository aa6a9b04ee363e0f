mod common;

use std::collections::BTreeSet;

use common::export_model::{export_graph, graph_and_extra_edge, template_fqn, ExportGraph};
use ml1::pipeline::Project;
use ml1::scopes::{compute_export_closure, ScopeGraph};
use proptest::prelude::*;

fn load(g: &ExportGraph) -> Project {
    Project::load(&[("g.ml1", g.render())]).expect("rendered graph parses")
}

/// Closure of every template as `(name, symbol fqn)` pairs.
fn closures(graph: &ScopeGraph, n: usize) -> Vec<BTreeSet<(String, String)>> {
    (0..n)
        .map(|i| {
            let t = graph.lookup_fqn(&template_fqn(i)).expect("template exists");
            graph.export_closure(t).pairs().into_iter().map(|(name, s)| (name, graph.fqn(s).to_string())).collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn closure_matches_fixpoint_oracle(g in export_graph()) {
        let p = load(&g);
        prop_assert!(p.analysis.is_ok(), "{:?}\n{}", p.analysis.diagnostics, g.render());
        prop_assert_eq!(closures(&p.analysis.graph, g.defs.len()), g.oracle());
    }

    #[test]
    fn uncached_closure_agrees_with_cache(g in export_graph()) {
        let p = load(&g);
        let graph = &p.analysis.graph;
        for i in 0..g.defs.len() {
            let t = graph.lookup_fqn(&template_fqn(i)).unwrap();
            prop_assert_eq!(compute_export_closure(graph, t).pairs(), graph.export_closure(t).pairs());
        }
    }

    #[test]
    fn adding_an_edge_never_removes_names((g, extra) in graph_and_extra_edge()) {
        let before = closures(&load(&g).analysis.graph, g.defs.len());
        let after = closures(&load(&g.with_edge(extra)).analysis.graph, g.defs.len());
        for (b, a) in before.iter().zip(&after) {
            prop_assert!(b.is_subset(a));
        }
    }

    /// Every entry's provenance is a real edge path from the template to the
    /// symbol's owner, and replaying the selectors along it yields the entry
    /// name. So a name hidden on the first edge can only appear if renamed.
    #[test]
    fn provenance_replays_selectors(g in export_graph()) {
        let p = load(&g);
        let graph = &p.analysis.graph;
        for i in 0..g.defs.len() {
            let t = graph.lookup_fqn(&template_fqn(i)).unwrap();
            for entry in graph.export_closure(t).entries() {
                let path = &entry.provenance;
                prop_assert!(!path.is_empty());
                prop_assert_eq!(path[0].origin, t);
                for w in path.windows(2) {
                    prop_assert_eq!(graph.export_edges(w[0].origin)[w[0].index].target, w[1].origin);
                }
                let last = path.last().unwrap();
                let owner = graph.export_edges(last.origin)[last.index].target;
                prop_assert_eq!(graph.symbol(entry.symbol).owner, Some(owner));
                let mut name = graph.symbol(entry.symbol).name.clone();
                for step in path.iter().rev() {
                    let edge = &graph.export_edges(step.origin)[step.index];
                    let shown = edge.selectors.visible_name(&name).map(str::to_string);
                    prop_assert!(shown.is_some(), "edge hides `{}`", name);
                    name = shown.unwrap();
                }
                prop_assert_eq!(&name, &entry.name);
            }
        }
    }
}

#[test]
fn cycle_terminates_with_both_members() {
    let src = "package g\nobject T0 {\n  @exported import g.T1._\n  def p() = {}\n}\nobject T1 {\n  @exported import g.T0._\n  def q() = {}\n}\n";
    let p = Project::load(&[("g.ml1", src)]).unwrap();
    let got = closures(&p.analysis.graph, 2);
    let pair = |n: &str, s: &str| (n.to_string(), s.to_string());
    assert_eq!(got[0], BTreeSet::from([pair("p", "g.T0.p"), pair("q", "g.T1.q")]));
    assert_eq!(got[1], got[0]);
}

#[test]
fn hide_then_rename_along_a_chain() {
    let src = "package g
object T0 {
  @exported import g.T1.{p => _, q => p, _}
}
object T1 {
  @exported import g.T2._
  def p() = {}
}
object T2 {
  def q() = {}
  def r() = {}
}
";
    let p = Project::load(&[("g.ml1", src)]).unwrap();
    let got = closures(&p.analysis.graph, 1);
    let pair = |n: &str, s: &str| (n.to_string(), s.to_string());
    assert_eq!(got[0], BTreeSet::from([pair("p", "g.T2.q"), pair("r", "g.T2.r")]));
}
