mod common;

use common::laws::{apply, registry, rewriter, then, Outcome, DEFER, TAG, UPPER};
use ml1::rewrite::{apply_rewriter, RewriterRef};
use ml1::syntax::TemplateStat;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn identity_leaves_units_unchanged(u in common::units::unit()) {
        let (out, report) = apply_rewriter(&RewriterRef::Identity, &u, 0, &registry()).unwrap();
        prop_assert_eq!(out, u);
        prop_assert_eq!(report.nodes_replaced, 0);
        prop_assert!(report.chain.is_empty());
    }

    #[test]
    fn identity_is_a_unit_for_composition(r in rewriter(), u in common::units::unit()) {
        let id = RewriterRef::Identity;
        prop_assert_eq!(apply(&RewriterRef::compose(id.clone(), r.clone()), &u), apply(&r, &u));
        prop_assert_eq!(apply(&RewriterRef::compose(r.clone(), id), &u), apply(&r, &u));
    }

    #[test]
    fn composition_is_sequential_application(a in rewriter(), b in rewriter(), u in common::units::unit()) {
        let composed = apply(&RewriterRef::compose(a.clone(), b.clone()), &u);
        prop_assert_eq!(composed, then(&a, apply(&b, &u)));
    }

    #[test]
    fn composition_is_associative(a in rewriter(), b in rewriter(), c in rewriter(), u in common::units::unit()) {
        let left = RewriterRef::compose(RewriterRef::compose(a.clone(), b.clone()), c.clone());
        let right = RewriterRef::compose(a, RewriterRef::compose(b, c));
        prop_assert_eq!(left.chain(), right.chain());
        prop_assert_eq!(apply(&left, &u), apply(&right, &u));
    }

    #[test]
    fn defer_lowering_is_idempotent(u in common::units::unit()) {
        let r = RewriterRef::intrinsic(DEFER);
        if let Ok(once) = apply(&r, &u) {
            prop_assert_eq!(apply(&r, &once), Ok(once));
        }
    }
}

#[test]
fn order_is_observable() {
    let src = "object A { def go() = {} }";
    let u = ml1::syntax::parse_source(src, "a.ml1").unwrap();
    let upper_then_tag = apply(&RewriterRef::compose(RewriterRef::intrinsic(TAG), RewriterRef::intrinsic(UPPER)), &u);
    let tag_then_upper = apply(&RewriterRef::compose(RewriterRef::intrinsic(UPPER), RewriterRef::intrinsic(TAG)), &u);
    let name = |o: Outcome| match &o.unwrap().stats[0] {
        ml1::syntax::TopStat::Template(t) => match &t.stats[0] {
            TemplateStat::Def(d) => d.name.clone(),
            _ => unreachable!(),
        },
        _ => unreachable!(),
    };
    assert_eq!(name(upper_then_tag), "GO_t");
    assert_eq!(name(tag_then_upper), "GO_T");
}

#[test]
fn copy_lowering_report() {
    let (_, src) = &common::fixtures(&["copy/copy.ml1"])[0];
    let u = ml1::syntax::parse_source(src, "copy.ml1").unwrap();
    let (_, report) = apply_rewriter(&RewriterRef::intrinsic(DEFER), &u, 0, &registry()).unwrap();
    assert_eq!((report.templates_touched, report.nodes_replaced), (1, 3));
}
