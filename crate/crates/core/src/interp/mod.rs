//! Tree-walking evaluator for rewritten units.
//!
//! Symbols are identified through the scope graph and resolution computed
//! before rewriting; rewriters keep declaration spans, so a symbol's body is
//! found in the rewritten trees by its declaration site.

mod value;

use std::collections::HashMap;
use std::rc::Rc;

use thiserror::Error;

use crate::scopes::{Binding, Builtin, DeclSite, RefSite, Resolution, ScopeGraph, SymbolId, SymbolKind};
use crate::syntax::{Block, CompilationUnit, DefDecl, Expr, Literal, Span, Stat, TemplateDef, TemplateStat, ValDecl};

pub use value::{Env, Func, Thunk, Val, Value};

/// Deepest call nesting before evaluation gives up.
pub const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimeError {
    pub message: String,
    pub span: Span,
    /// Errors raised by deferred thunks while this one was propagating.
    pub suppressed: Vec<RuntimeError>,
}

impl RuntimeError {
    pub fn new(message: impl Into<String>, span: Span) -> Self {
        RuntimeError { message: message.into(), span, suppressed: Vec::new() }
    }

    /// Suppressed errors, depth-first, not including `self`.
    pub fn all_suppressed(&self) -> Vec<&RuntimeError> {
        let mut out = Vec::new();
        for s in &self.suppressed {
            out.push(s);
            out.extend(s.all_suppressed());
        }
        out
    }
}

impl std::fmt::Display for RuntimeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exit {
    Normal(Value),
    Failed(RuntimeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub events: Vec<String>,
    pub exit: Exit,
}

impl Trace {
    pub fn failed(&self) -> Option<&RuntimeError> {
        match &self.exit {
            Exit::Failed(e) => Some(e),
            Exit::Normal(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("E_NO_ENTRY: `{0}` is not a zero-argument def")]
    NoEntry(String),
}

/// Runs `entry`, a zero-argument def, over the rewritten `units`.
pub fn run(
    units: &[CompilationUnit],
    graph: &ScopeGraph,
    resolution: &Resolution,
    entry: &str,
) -> Result<Trace, RunError> {
    let sym = graph
        .lookup_fqn(entry)
        .filter(|s| graph.symbol(*s).kind == SymbolKind::Def && graph.symbol(*s).arity == 0)
        .ok_or_else(|| RunError::NoEntry(entry.to_string()))?;
    let mut interp = Interp::new(units, graph, resolution);
    if interp.def_of(sym).is_none() {
        return Err(RunError::NoEntry(entry.to_string()));
    }
    let result = interp.call_global(sym, Vec::new(), Span::DUMMY);
    debug_assert!(interp.frames.is_empty());
    let exit = match result {
        Ok(v) => Exit::Normal(v.to_value(graph)),
        Err(e) => Exit::Failed(e),
    };
    Ok(Trace { events: interp.events, exit })
}

#[derive(Default)]
struct DeferFrame<'a> {
    pending: Vec<Rc<Thunk<'a>>>,
}

enum ValState<'a> {
    Running,
    Done(Val<'a>),
}

/// Per-invocation context: the unit whose tree is being evaluated and the
/// frame stack height at entry.
#[derive(Clone, Copy)]
struct Ctx {
    unit: usize,
    frame_base: usize,
}

type R<'a> = Result<Val<'a>, RuntimeError>;

struct Interp<'a> {
    graph: &'a ScopeGraph,
    resolution: &'a Resolution,
    defs: HashMap<DeclSite, &'a DefDecl>,
    vals: HashMap<DeclSite, &'a ValDecl>,
    val_cache: HashMap<SymbolId, ValState<'a>>,
    frames: Vec<DeferFrame<'a>>,
    events: Vec<String>,
    depth: usize,
}

impl<'a> Interp<'a> {
    fn new(units: &'a [CompilationUnit], graph: &'a ScopeGraph, resolution: &'a Resolution) -> Self {
        let mut interp = Interp {
            graph,
            resolution,
            defs: HashMap::new(),
            vals: HashMap::new(),
            val_cache: HashMap::new(),
            frames: Vec::new(),
            events: Vec::new(),
            depth: 0,
        };
        for (u, unit) in units.iter().enumerate() {
            for t in unit.templates() {
                interp.index_template(u, t);
            }
        }
        interp
    }

    fn index_template(&mut self, unit: usize, t: &'a TemplateDef) {
        for stat in &t.stats {
            match stat {
                TemplateStat::Def(d) => {
                    self.defs.insert(DeclSite { unit, span: d.span }, d);
                }
                TemplateStat::Val(v) => {
                    self.vals.insert(DeclSite { unit, span: v.span }, v);
                }
                TemplateStat::Template(n) => self.index_template(unit, n),
                TemplateStat::Import(_) | TemplateStat::Expr(_) => {}
            }
        }
    }

    fn def_of(&self, sym: SymbolId) -> Option<&'a DefDecl> {
        self.graph.symbol(sym).decl.and_then(|d| self.defs.get(&d).copied())
    }

    fn enter(&mut self, span: Span) -> Result<(), RuntimeError> {
        if self.depth >= MAX_DEPTH {
            return Err(RuntimeError::new("call depth limit exceeded", span));
        }
        self.depth += 1;
        Ok(())
    }

    fn call_global(&mut self, sym: SymbolId, args: Vec<Val<'a>>, span: Span) -> R<'a> {
        let d = self
            .def_of(sym)
            .ok_or_else(|| RuntimeError::new(format!("`{}` has no body", self.graph.fqn(sym)), span))?;
        let unit = self.graph.symbol(sym).decl.expect("defs are declared").unit;
        let fqn = self.graph.fqn(sym).to_string();
        self.invoke(d, &fqn, Env::default(), unit, args, span)
    }

    fn call_func(&mut self, f: &Func<'a>, args: Vec<Val<'a>>, span: Span) -> R<'a> {
        match f {
            Func::Global(sym) => self.call_global(*sym, args, span),
            Func::Local { def, fqn, env, unit } => {
                let env = env.bind(fqn, Val::Func(Rc::new(f.clone())));
                self.invoke(def, fqn, env, *unit, args, span)
            }
        }
    }

    fn invoke(
        &mut self,
        d: &'a DefDecl,
        fqn: &str,
        env: Env<'a>,
        unit: usize,
        args: Vec<Val<'a>>,
        span: Span,
    ) -> R<'a> {
        if args.len() != d.params.len() {
            return Err(RuntimeError::new(
                format!("`{fqn}` expects {} argument(s), got {}", d.params.len(), args.len()),
                span,
            ));
        }
        let mut env = env;
        for (p, a) in d.params.iter().zip(args) {
            env = env.bind(&format!("{fqn}/{p}"), a);
        }
        self.enter(span)?;
        let ctx = Ctx { unit, frame_base: self.frames.len() };
        let result = self.block(&d.body, &env, ctx);
        self.depth -= 1;
        debug_assert_eq!(self.frames.len(), ctx.frame_base, "frame leak");
        result
    }

    fn block(&mut self, b: &'a Block, env: &Env<'a>, ctx: Ctx) -> R<'a> {
        let mut env = env.clone();
        let mut last = Val::Unit;
        for stat in &b.stats {
            last = Val::Unit;
            match stat {
                Stat::Val(v) => {
                    let value = self.expr(&v.value, &env, ctx)?;
                    env = env.bind(&self.local_fqn(ctx.unit, v.span)?, value);
                }
                Stat::Def(d) => {
                    let fqn = self.local_fqn(ctx.unit, d.span)?;
                    let f = Func::Local { def: d, fqn: fqn.clone(), env: env.clone(), unit: ctx.unit };
                    env = env.bind(&fqn, Val::Func(Rc::new(f)));
                }
                Stat::Expr(e) => last = self.expr(e, &env, ctx)?,
            }
        }
        Ok(last)
    }

    fn local_fqn(&self, unit: usize, span: Span) -> Result<String, RuntimeError> {
        self.resolution
            .locals
            .get(&RefSite { unit, span })
            .cloned()
            .ok_or_else(|| RuntimeError::new("declaration was not resolved", span))
    }

    fn binding(&self, ctx: Ctx, span: Span) -> Result<&'a Binding, RuntimeError> {
        self.resolution.binding(ctx.unit, span).ok_or_else(|| RuntimeError::new("unresolved reference", span))
    }

    fn expr(&mut self, e: &'a Expr, env: &Env<'a>, ctx: Ctx) -> R<'a> {
        match e {
            Expr::Lit { value: Literal::Int(n), .. } => Ok(Val::Int(*n)),
            Expr::Lit { value: Literal::Str(s), .. } => Ok(Val::Str(s.clone())),
            Expr::Ref { path } => self.reference(self.binding(ctx, path.span)?, env, path.span),
            Expr::Call { callee, args, span } => self.call(callee, args, *span, env, ctx),
            Expr::Block(b) => self.block(b, env, ctx),
            Expr::DeferCandidate { span, .. } => {
                Err(RuntimeError::new("`defer` has no meaning unless a defer rewriter is imported", *span))
            }
            Expr::Frame { body, .. } => self.frame(body, env, ctx),
            Expr::DeferRegister { thunk, span } => {
                if self.frames.len() <= ctx.frame_base {
                    return Err(RuntimeError::new("E_NO_FRAME: `__defer` outside of `__frame`", *span));
                }
                let t = Thunk { body: thunk, env: env.clone(), unit: ctx.unit };
                self.frames.last_mut().expect("checked above").pending.push(Rc::new(t));
                Ok(Val::Unit)
            }
        }
    }

    /// `__frame`: evaluates `body`, then runs registered thunks last-first
    /// whatever the outcome. The body's value is fixed before thunks run; a
    /// body error wins over thunk errors, which are attached as suppressed.
    fn frame(&mut self, body: &'a Block, env: &Env<'a>, ctx: Ctx) -> R<'a> {
        self.frames.push(DeferFrame::default());
        let mut result = self.block(body, env, ctx);
        let frame = self.frames.pop().expect("pushed above");
        for thunk in frame.pending.into_iter().rev() {
            if let Err(e) = self.run_thunk(&thunk) {
                match &mut result {
                    Ok(_) => result = Err(e),
                    Err(primary) => primary.suppressed.push(e),
                }
            }
        }
        result
    }

    /// A thunk runs as an invocation of its own: defers inside it need their
    /// own frame.
    fn run_thunk(&mut self, t: &Thunk<'a>) -> R<'a> {
        self.enter(t.body.span)?;
        let ctx = Ctx { unit: t.unit, frame_base: self.frames.len() };
        let result = self.frame(t.body, &t.env, ctx);
        self.depth -= 1;
        result
    }

    fn reference(&mut self, b: &'a Binding, env: &Env<'a>, span: Span) -> R<'a> {
        match b {
            Binding::Local { fqn, name } => {
                env.lookup(fqn).ok_or_else(|| RuntimeError::new(format!("`{name}` is not initialized"), span))
            }
            Binding::Builtin(b) => Err(RuntimeError::new(format!("builtin `{}` must be called", b.name()), span)),
            Binding::Symbol(s) => match self.graph.symbol(*s).kind {
                SymbolKind::Def if self.graph.symbol(*s).arity == 0 => self.call_global(*s, Vec::new(), span),
                SymbolKind::Def => Ok(Val::Func(Rc::new(Func::Global(*s)))),
                SymbolKind::Val => self.template_val(*s, span),
                SymbolKind::Template(_) | SymbolKind::Package => Ok(Val::Obj(*s)),
            },
        }
    }

    /// Template vals are initialized on first use and memoized.
    fn template_val(&mut self, s: SymbolId, span: Span) -> R<'a> {
        match self.val_cache.get(&s) {
            Some(ValState::Done(v)) => return Ok(v.clone()),
            Some(ValState::Running) => {
                return Err(RuntimeError::new(format!("`{}` depends on itself", self.graph.fqn(s)), span))
            }
            None => {}
        }
        let decl = self.graph.symbol(s).decl.expect("vals are declared");
        let v = *self
            .vals
            .get(&decl)
            .ok_or_else(|| RuntimeError::new(format!("`{}` has no initializer", self.graph.fqn(s)), span))?;
        self.val_cache.insert(s, ValState::Running);
        self.enter(span)?;
        let ctx = Ctx { unit: decl.unit, frame_base: self.frames.len() };
        let result = self.expr(&v.value, &Env::default(), ctx);
        self.depth -= 1;
        match result {
            Ok(value) => {
                self.val_cache.insert(s, ValState::Done(value.clone()));
                Ok(value)
            }
            Err(e) => {
                self.val_cache.remove(&s);
                Err(e)
            }
        }
    }

    fn call(&mut self, callee: &'a Expr, args: &'a [Expr], span: Span, env: &Env<'a>, ctx: Ctx) -> R<'a> {
        let f = match callee {
            Expr::Ref { path } => match self.binding(ctx, path.span)? {
                Binding::Builtin(b) => return self.builtin(*b, args, span, env, ctx),
                Binding::Symbol(s) if self.graph.symbol(*s).kind == SymbolKind::Def => {
                    let values = self.args(args, env, ctx)?;
                    return self.call_global(*s, values, span);
                }
                other => self.reference(other, env, path.span)?,
            },
            other => self.expr(other, env, ctx)?,
        };
        match f {
            Val::Func(f) => {
                let values = self.args(args, env, ctx)?;
                self.call_func(&f, values, span)
            }
            other => Err(RuntimeError::new(format!("`{}` is not a def", other.render(self.graph)), span)),
        }
    }

    fn args(&mut self, args: &'a [Expr], env: &Env<'a>, ctx: Ctx) -> Result<Vec<Val<'a>>, RuntimeError> {
        args.iter().map(|a| self.expr(a, env, ctx)).collect()
    }

    fn builtin(&mut self, b: Builtin, args: &'a [Expr], span: Span, env: &Env<'a>, ctx: Ctx) -> R<'a> {
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(RuntimeError::new(format!("`{}` expects {n} argument(s), got {}", b.name(), args.len()), span))
            }
        };
        match b {
            Builtin::Print => {
                arity(1)?;
                let v = self.expr(&args[0], env, ctx)?;
                self.events.push(v.render(self.graph));
                Ok(Val::Unit)
            }
            Builtin::Error => {
                arity(1)?;
                let v = self.expr(&args[0], env, ctx)?;
                Err(RuntimeError::new(v.render(self.graph), span))
            }
            Builtin::Concat => {
                arity(2)?;
                let a = self.expr(&args[0], env, ctx)?;
                let c = self.expr(&args[1], env, ctx)?;
                Ok(Val::Str(a.render(self.graph) + &c.render(self.graph)))
            }
            Builtin::Add | Builtin::Sub => {
                arity(2)?;
                let a = self.int(&args[0], env, ctx)?;
                let c = self.int(&args[1], env, ctx)?;
                let r = if b == Builtin::Add { a.checked_add(c) } else { a.checked_sub(c) };
                r.map(Val::Int).ok_or_else(|| RuntimeError::new("integer overflow", span))
            }
            Builtin::Eq => {
                arity(2)?;
                let a = self.expr(&args[0], env, ctx)?;
                let c = self.expr(&args[1], env, ctx)?;
                Ok(Val::Int(i64::from(a.same(&c))))
            }
            Builtin::When => {
                if args.is_empty() {
                    return Err(RuntimeError::new("`when` expects a condition", span));
                }
                let mut last = Val::Unit;
                if self.expr(&args[0], env, ctx)?.truthy() {
                    for a in &args[1..] {
                        last = self.expr(a, env, ctx)?;
                    }
                }
                Ok(last)
            }
            Builtin::Repeat => {
                let [Expr::Ref { path }, count, body @ ..] = args else {
                    return Err(RuntimeError::new("`repeat` expects (name, count, body...)", span));
                };
                let n = self.int(count, env, ctx)?;
                let fqn = match self.binding(ctx, path.span)? {
                    Binding::Local { fqn, .. } => fqn,
                    _ => return Err(RuntimeError::new("`repeat` expects a fresh name", path.span)),
                };
                for i in 0..n.max(0) {
                    let inner = env.bind(fqn, Val::Int(i));
                    for a in body {
                        self.expr(a, &inner, ctx)?;
                    }
                }
                Ok(Val::Unit)
            }
            // a declaration for rewriter binding; nothing to do at run time
            Builtin::Compose => Ok(Val::Unit),
        }
    }

    fn int(&mut self, e: &'a Expr, env: &Env<'a>, ctx: Ctx) -> Result<i64, RuntimeError> {
        match self.expr(e, env, ctx)? {
            Val::Int(n) => Ok(n),
            other => {
                Err(RuntimeError::new(format!("expected an integer, got `{}`", other.render(self.graph)), e.span()))
            }
        }
    }
}
