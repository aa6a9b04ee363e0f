use std::fmt::Write;

use super::ast::*;
use super::lexer::escape;

const INDENT: &str = "  ";

/// Canonical source text for `unit`. Always ends with a newline.
pub fn pretty_print(unit: &CompilationUnit) -> String {
    let mut p = Printer { out: String::new() };
    if !unit.package_path.is_empty() {
        let _ = writeln!(p.out, "package {}", unit.package_path.join("."));
        if !unit.stats.is_empty() {
            p.out.push('\n');
        }
    }
    for (i, stat) in unit.stats.iter().enumerate() {
        let both_imports = i > 0 && matches!((&unit.stats[i - 1], stat), (TopStat::Import(_), TopStat::Import(_)));
        if i > 0 && !both_imports {
            p.out.push('\n');
        }
        match stat {
            TopStat::Import(imp) => p.import(imp),
            TopStat::Template(t) => p.template(t, 0),
        }
        p.out.push('\n');
    }
    if p.out.is_empty() {
        p.out.push('\n');
    }
    p.out
}

impl std::fmt::Display for Selectors {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let list = match self {
            Selectors::Wildcard => return f.write_str("_"),
            Selectors::Named(list) => list,
        };
        if let [Selector::Name { source, target: SelectorTarget::Same, .. }] = list.as_slice() {
            return f.write_str(source);
        }
        f.write_str("{")?;
        for (i, sel) in list.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match sel {
                Selector::Wildcard { .. } => f.write_str("_")?,
                Selector::Name { source, target: SelectorTarget::Same, .. } => f.write_str(source)?,
                Selector::Name { source, target: SelectorTarget::Rename(to), .. } => write!(f, "{source} => {to}")?,
                Selector::Name { source, target: SelectorTarget::Hidden, .. } => write!(f, "{source} => _")?,
            }
        }
        f.write_str("}")
    }
}

struct Printer {
    out: String,
}

impl Printer {
    fn indent(&mut self, level: usize) {
        for _ in 0..level {
            self.out.push_str(INDENT);
        }
    }

    fn import(&mut self, imp: &ImportClause) {
        for a in &imp.annotations {
            let _ = write!(self.out, "@{} ", a.name);
        }
        let _ = write!(self.out, "import {}.{}", imp.path.dotted(), imp.selectors);
    }

    fn template(&mut self, t: &TemplateDef, level: usize) {
        if t.implicit {
            self.out.push_str("implicit ");
        }
        self.out.push_str(match t.template_kind {
            TemplateKind::Object => "object ",
            TemplateKind::Trait => "trait ",
            TemplateKind::PackageObject => "package object ",
        });
        self.out.push_str(&t.name);
        for (i, parent) in t.parents.iter().enumerate() {
            let _ = write!(self.out, " {} {}", if i == 0 { "extends" } else { "with" }, parent.dotted());
        }
        if t.stats.is_empty() {
            self.out.push_str(" {}");
            return;
        }
        self.out.push_str(" {\n");
        for (i, stat) in t.stats.iter().enumerate() {
            self.indent(level + 1);
            match stat {
                TemplateStat::Import(imp) => self.import(imp),
                TemplateStat::Def(d) => self.def(d, level + 1),
                TemplateStat::Val(v) => self.val(v, level + 1),
                TemplateStat::Template(n) => self.template(n, level + 1),
                TemplateStat::Expr(e) => {
                    self.expr(e, level + 1);
                    if matches!(e, Expr::Ref { .. })
                        && matches!(t.stats.get(i + 1), Some(TemplateStat::Expr(Expr::Block(_))))
                    {
                        self.out.push(';');
                    }
                }
            }
            self.out.push('\n');
        }
        self.indent(level);
        self.out.push('}');
    }

    fn def(&mut self, d: &DefDecl, level: usize) {
        let _ = write!(self.out, "def {}({}) = ", d.name, d.params.join(", "));
        match d.body.stats.as_slice() {
            [Stat::Expr(Expr::Frame { body, .. })] => {
                self.out.push_str("__frame ");
                self.block(body, level);
            }
            _ => self.block(&d.body, level),
        }
    }

    fn val(&mut self, v: &ValDecl, level: usize) {
        let _ = write!(self.out, "val {} = ", v.name);
        self.expr(&v.value, level);
    }

    fn block(&mut self, b: &Block, level: usize) {
        if b.stats.is_empty() {
            self.out.push_str("{}");
            return;
        }
        self.out.push_str("{\n");
        for (i, stat) in b.stats.iter().enumerate() {
            self.indent(level + 1);
            match stat {
                Stat::Def(d) => self.def(d, level + 1),
                Stat::Val(v) => self.val(v, level + 1),
                Stat::Expr(e) => {
                    self.expr(e, level + 1);
                    // `defer` / `__frame` followed by a block would re-parse as one statement
                    if matches!(e, Expr::Ref { .. }) && matches!(b.stats.get(i + 1), Some(Stat::Expr(Expr::Block(_)))) {
                        self.out.push(';');
                    }
                }
            }
            self.out.push('\n');
        }
        self.indent(level);
        self.out.push('}');
    }

    fn expr(&mut self, e: &Expr, level: usize) {
        match e {
            Expr::Lit { value: Literal::Int(n), .. } => {
                let _ = write!(self.out, "{n}");
            }
            Expr::Lit { value: Literal::Str(s), .. } => self.out.push_str(&escape(s)),
            Expr::Ref { path } => self.out.push_str(&path.dotted()),
            Expr::Call { callee, args, .. } => {
                self.expr(callee, level);
                self.out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        self.out.push_str(", ");
                    }
                    self.expr(a, level);
                }
                self.out.push(')');
            }
            Expr::Block(b) => self.block(b, level),
            Expr::DeferCandidate { body, .. } => {
                self.out.push_str("defer ");
                self.block(body, level);
            }
            Expr::Frame { body, .. } => {
                self.out.push_str("__frame ");
                self.block(body, level);
            }
            Expr::DeferRegister { thunk, .. } => {
                self.out.push_str("__defer(thunk ");
                self.block(thunk, level);
                self.out.push(')');
            }
        }
    }
}
