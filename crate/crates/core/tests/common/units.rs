//! Random well-formed compilation units, built as trees.

use ml1::syntax::*;
use proptest::collection::vec;
use proptest::prelude::*;

const NAMES: &[&str] = &["a", "b", "c", "foo", "bar", "x1", "Main", "go", "util", "in_", "Zed"];

pub fn ident() -> impl Strategy<Value = String> {
    proptest::sample::select(NAMES).prop_map(str::to_string)
}

fn qual_id(max: usize) -> impl Strategy<Value = QualId> {
    vec(ident(), 1..=max).prop_map(|segments| QualId::new(segments, Span::DUMMY))
}

fn string_lit() -> impl Strategy<Value = String> {
    vec(proptest::sample::select(&['a', 'z', ' ', '"', '\\', '\n', '\t', '-', '7', 'é'][..]), 0..6)
        .prop_map(|cs| cs.into_iter().collect())
}

fn block_of(stat: BoxedStrategy<Stat>, max: usize) -> impl Strategy<Value = Block> {
    vec(stat, 0..=max).prop_map(|stats| Block::new(stats, Span::DUMMY))
}

pub fn expr() -> BoxedStrategy<Expr> {
    let leaf = prop_oneof![
        (0i64..100_000).prop_map(|n| Expr::Lit { value: Literal::Int(n), span: Span::DUMMY }),
        string_lit().prop_map(|s| Expr::Lit { value: Literal::Str(s), span: Span::DUMMY }),
        qual_id(3).prop_map(|path| Expr::Ref { path }),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        let stat = prop_oneof![
            4 => inner.clone().prop_map(Stat::Expr),
            1 => (ident(), inner.clone())
                .prop_map(|(name, value)| Stat::Val(ValDecl { name, value, span: Span::DUMMY })),
        ]
        .boxed();
        prop_oneof![
            3 => (qual_id(2), vec(inner.clone(), 0..3)).prop_map(|(path, args)| Expr::Call {
                callee: Box::new(Expr::Ref { path }),
                args,
                span: Span::DUMMY,
            }),
            1 => block_of(stat.clone(), 3).prop_map(Expr::Block),
            1 => block_of(stat.clone(), 3).prop_map(|body| Expr::DeferCandidate { body, span: Span::DUMMY }),
            1 => block_of(stat.clone(), 2).prop_map(|body| Expr::Frame { body, span: Span::DUMMY }),
            1 => block_of(stat, 2).prop_map(|thunk| Expr::DeferRegister { thunk, span: Span::DUMMY }),
        ]
    })
    .boxed()
}

fn block_stat() -> BoxedStrategy<Stat> {
    let local_def =
        (ident(), vec(ident(), 0..3), vec(expr().prop_map(Stat::Expr), 0..3)).prop_map(|(name, params, stats)| {
            Stat::Def(DefDecl { name, params, body: Block::new(stats, Span::DUMMY), span: Span::DUMMY })
        });
    prop_oneof![
        5 => expr().prop_map(Stat::Expr),
        2 => (ident(), expr()).prop_map(|(name, value)| Stat::Val(ValDecl { name, value, span: Span::DUMMY })),
        1 => local_def,
    ]
    .boxed()
}

fn def_decl() -> impl Strategy<Value = DefDecl> {
    (ident(), vec(ident(), 0..3), vec(block_stat(), 0..5)).prop_map(|(name, params, stats)| DefDecl {
        name,
        params,
        body: Block::new(stats, Span::DUMMY),
        span: Span::DUMMY,
    })
}

fn selectors() -> impl Strategy<Value = Selectors> {
    let named = (vec((ident(), 0u8..3, ident()), 1..4), any::<bool>()).prop_map(|(raw, wildcard)| {
        let mut list = Vec::new();
        let mut sources = Vec::new();
        let mut visible = Vec::new();
        for (source, kind, to) in raw {
            if sources.contains(&source) {
                continue;
            }
            let target = match kind {
                0 => SelectorTarget::Same,
                1 => SelectorTarget::Rename(to),
                _ => SelectorTarget::Hidden,
            };
            let shown = match &target {
                SelectorTarget::Same => Some(source.clone()),
                SelectorTarget::Rename(to) => Some(to.clone()),
                SelectorTarget::Hidden => None,
            };
            if let Some(v) = &shown {
                if visible.contains(v) {
                    continue;
                }
                visible.push(v.clone());
            }
            sources.push(source.clone());
            list.push(Selector::Name { source, target, span: Span::DUMMY });
        }
        if wildcard {
            list.push(Selector::Wildcard { span: Span::DUMMY });
        }
        Selectors::Named(list)
    });
    prop_oneof![1 => Just(Selectors::Wildcard), 2 => named]
}

fn import(annotated: bool) -> impl Strategy<Value = ImportClause> {
    let annotations = if annotated {
        prop_oneof![
            2 => Just(vec![]),
            2 => Just(vec!["exported"]),
            1 => Just(vec!["foo"]),
        ]
        .boxed()
    } else {
        Just(vec![]).boxed()
    };
    (annotations, qual_id(3), selectors()).prop_map(|(names, path, selectors)| ImportClause {
        annotations: names.into_iter().map(|name| Annotation { name: name.into(), span: Span::DUMMY }).collect(),
        path,
        selectors,
        span: Span::DUMMY,
    })
}

fn template(depth: u32, top: bool) -> BoxedStrategy<TemplateDef> {
    let kind = if top {
        prop_oneof![Just(TemplateKind::Object), Just(TemplateKind::Trait), Just(TemplateKind::PackageObject)].boxed()
    } else {
        prop_oneof![Just(TemplateKind::Object), Just(TemplateKind::Trait)].boxed()
    };
    let mut stat = vec![
        (2, import(true).prop_map(TemplateStat::Import).boxed()),
        (3, def_decl().prop_map(TemplateStat::Def).boxed()),
        (
            1,
            (ident(), expr())
                .prop_map(|(name, value)| TemplateStat::Val(ValDecl { name, value, span: Span::DUMMY }))
                .boxed(),
        ),
        (1, expr().prop_map(TemplateStat::Expr).boxed()),
    ];
    if depth > 0 {
        stat.push((1, template(depth - 1, false).prop_map(TemplateStat::Template).boxed()));
    }
    let stat = proptest::strategy::Union::new_weighted(stat);
    (kind, any::<bool>(), ident(), vec(qual_id(2), 0..3), vec(stat, 0..5))
        .prop_map(|(template_kind, implicit, name, parents, stats)| TemplateDef {
            template_kind,
            implicit: implicit && template_kind == TemplateKind::Object,
            name,
            parents,
            stats,
            span: Span::DUMMY,
        })
        .boxed()
}

/// Random unit accepted by the parser (annotations only inside templates).
pub fn unit() -> impl Strategy<Value = CompilationUnit> {
    let top = prop_oneof![
        1 => import(false).prop_map(TopStat::Import),
        2 => template(2, true).prop_map(TopStat::Template),
    ];
    (vec(ident(), 0..3), vec(top, 0..4)).prop_map(|(package_path, stats)| CompilationUnit {
        source_name: "gen.ml1".into(),
        package_path,
        stats,
    })
}
