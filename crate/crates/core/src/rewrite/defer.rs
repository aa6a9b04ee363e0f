//! `go.defer.rewriter`: lowers `defer { b }` inside a def into
//! `__defer(thunk { b })` and wraps the def body in `__frame { ... }`.

use super::RewriteError;
use crate::diag::Code;
use crate::syntax::{Block, DefDecl, Expr, Stat, TemplateDef, TemplateStat, ValDecl};

pub const KEY: &str = "go.defer.rewriter";

/// Lowers the template's own defs. Nested templates are left to the caller.
pub fn lower_template(t: &TemplateDef) -> Result<(TemplateDef, usize), RewriteError> {
    let mut out = t.clone();
    let mut replaced = 0;
    for stat in &mut out.stats {
        match stat {
            TemplateStat::Def(d) => replaced += lower_def(d),
            TemplateStat::Val(ValDecl { value, .. }) | TemplateStat::Expr(value) => {
                if let Some(span) = find_candidate(value) {
                    return Err(RewriteError {
                        code: Code::DeferOutsideMethod,
                        span,
                        message: format!("`defer` outside a method in `{}`", t.name),
                    });
                }
            }
            TemplateStat::Import(_) | TemplateStat::Template(_) => {}
        }
    }
    Ok((out, replaced))
}

/// Lowers `d` and every local def inside it; returns the number of nodes
/// replaced (registrations plus frame wrappers).
fn lower_def(d: &mut DefDecl) -> usize {
    let mut replaced = 0;
    let mut registered = 0;
    lower_block(&mut d.body, &mut registered, &mut replaced);
    if registered > 0 {
        let span = d.body.span;
        let body = std::mem::replace(&mut d.body, Block::new(Vec::new(), span));
        d.body = Block::new(vec![Stat::Expr(Expr::Frame { body, span })], span);
        replaced += 1;
    }
    replaced + registered
}

fn lower_block(b: &mut Block, registered: &mut usize, replaced: &mut usize) {
    for stat in &mut b.stats {
        match stat {
            Stat::Def(d) => *replaced += lower_def(d),
            Stat::Val(v) => lower_expr(&mut v.value, registered, replaced),
            Stat::Expr(e) => lower_expr(e, registered, replaced),
        }
    }
}

fn lower_expr(e: &mut Expr, registered: &mut usize, replaced: &mut usize) {
    match e {
        Expr::Lit { .. } | Expr::Ref { .. } => {}
        Expr::Call { callee, args, .. } => {
            lower_expr(callee, registered, replaced);
            for a in args {
                lower_expr(a, registered, replaced);
            }
        }
        Expr::Block(b) | Expr::Frame { body: b, .. } | Expr::DeferRegister { thunk: b, .. } => {
            lower_block(b, registered, replaced)
        }
        Expr::DeferCandidate { body, span } => {
            let mut thunk = std::mem::replace(body, Block::new(Vec::new(), *span));
            lower_block(&mut thunk, registered, replaced);
            *e = Expr::DeferRegister { thunk, span: *span };
            *registered += 1;
        }
    }
}

fn find_candidate(e: &Expr) -> Option<crate::syntax::Span> {
    match e {
        Expr::DeferCandidate { span, .. } => Some(*span),
        Expr::Lit { .. } | Expr::Ref { .. } => None,
        Expr::Call { callee, args, .. } => find_candidate(callee).or_else(|| args.iter().find_map(find_candidate)),
        Expr::Block(b) | Expr::Frame { body: b, .. } | Expr::DeferRegister { thunk: b, .. } => {
            b.stats.iter().find_map(|s| match s {
                // a local def is a method of its own
                Stat::Def(_) => None,
                Stat::Val(v) => find_candidate(&v.value),
                Stat::Expr(e) => find_candidate(e),
            })
        }
    }
}
