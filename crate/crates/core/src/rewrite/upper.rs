//! `demo.upper.rewriter`: renames every def to its upper-case spelling.
//! Exists so composition has a second, easily observed transform.

use super::RewriteError;
use crate::syntax::{Block, DefDecl, Expr, Stat, TemplateDef, TemplateStat};

pub const KEY: &str = "demo.upper.rewriter";

pub fn upper_template(t: &TemplateDef) -> Result<(TemplateDef, usize), RewriteError> {
    let mut out = t.clone();
    let mut renamed = 0;
    for stat in &mut out.stats {
        match stat {
            TemplateStat::Def(d) => renamed += upper_def(d),
            TemplateStat::Val(v) => renamed += upper_expr(&mut v.value),
            TemplateStat::Expr(e) => renamed += upper_expr(e),
            TemplateStat::Import(_) | TemplateStat::Template(_) => {}
        }
    }
    Ok((out, renamed))
}

fn upper_def(d: &mut DefDecl) -> usize {
    let upper = d.name.to_uppercase();
    let mut n = usize::from(upper != d.name);
    d.name = upper;
    n += upper_block(&mut d.body);
    n
}

fn upper_block(b: &mut Block) -> usize {
    b.stats
        .iter_mut()
        .map(|s| match s {
            Stat::Def(d) => upper_def(d),
            Stat::Val(v) => upper_expr(&mut v.value),
            Stat::Expr(e) => upper_expr(e),
        })
        .sum()
}

fn upper_expr(e: &mut Expr) -> usize {
    match e {
        Expr::Lit { .. } | Expr::Ref { .. } => 0,
        Expr::Call { callee, args, .. } => upper_expr(callee) + args.iter_mut().map(upper_expr).sum::<usize>(),
        Expr::Block(b)
        | Expr::DeferCandidate { body: b, .. }
        | Expr::Frame { body: b, .. }
        | Expr::DeferRegister { thunk: b, .. } => upper_block(b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_source, TopStat};

    #[test]
    fn renames_template_and_local_defs() {
        let unit = parse_source("object A { def copy() = { def inner() = {}\n inner() } }", "u.ml1").unwrap();
        let TopStat::Template(t) = &unit.stats[0] else { panic!() };
        let (out, n) = upper_template(t).unwrap();
        assert_eq!(n, 2);
        let TemplateStat::Def(d) = &out.stats[0] else { panic!() };
        assert_eq!(d.name, "COPY");
        assert!(matches!(&d.body.stats[0], Stat::Def(inner) if inner.name == "INNER"));
        assert_eq!(upper_template(&out).unwrap().1, 0);
    }
}
