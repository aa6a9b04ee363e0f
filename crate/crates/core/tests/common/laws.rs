//! A third test-only intrinsic and random rewriter expressions over it and
//! the built-in ones.

use ml1::diag::Diagnostic;
use ml1::rewrite::{apply_rewriter, RewriteError, RewriterRef, RewriterRegistry};
use ml1::syntax::{CompilationUnit, TemplateDef, TemplateStat};
use proptest::prelude::*;

pub const DEFER: &str = "go.defer.rewriter";
pub const UPPER: &str = "demo.upper.rewriter";
pub const TAG: &str = "test.tag.rewriter";

/// Appends `_t` to each def declared directly in the template. Does not
/// commute with the upper-casing rewriter, which makes order observable.
pub fn tag_template(t: &TemplateDef) -> Result<(TemplateDef, usize), RewriteError> {
    let mut out = t.clone();
    let mut n = 0;
    for stat in &mut out.stats {
        if let TemplateStat::Def(d) = stat {
            d.name.push_str("_t");
            n += 1;
        }
    }
    Ok((out, n))
}

pub fn registry() -> RewriterRegistry {
    let mut b = RewriterRegistry::builder_with_builtins();
    b.register(TAG, tag_template).unwrap();
    b.freeze()
}

pub type Outcome = Result<CompilationUnit, Diagnostic>;

pub fn apply(r: &RewriterRef, u: &CompilationUnit) -> Outcome {
    apply_rewriter(r, u, 0, &registry()).map(|(u, _)| u.without_spans())
}

pub fn then(r: &RewriterRef, prev: Outcome) -> Outcome {
    prev.and_then(|u| apply(r, &u))
}

pub fn rewriter() -> impl Strategy<Value = RewriterRef> {
    let leaf = prop_oneof![
        Just(RewriterRef::Identity),
        Just(RewriterRef::intrinsic(DEFER)),
        Just(RewriterRef::intrinsic(UPPER)),
        Just(RewriterRef::intrinsic(TAG)),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| RewriterRef::compose(a, b)))
}
