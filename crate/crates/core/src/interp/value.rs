use std::rc::Rc;

use crate::scopes::{ScopeGraph, SymbolId};
use crate::syntax::{Block, DefDecl};

/// Runtime value. Borrows the trees it closes over.
#[derive(Debug, Clone)]
pub enum Val<'a> {
    Int(i64),
    Str(String),
    Unit,
    Thunk(Rc<Thunk<'a>>),
    Obj(SymbolId),
    Func(Rc<Func<'a>>),
}

#[derive(Debug)]
pub struct Thunk<'a> {
    pub body: &'a Block,
    pub env: Env<'a>,
    pub unit: usize,
}

#[derive(Debug, Clone)]
pub enum Func<'a> {
    Global(SymbolId),
    Local { def: &'a DefDecl, fqn: String, env: Env<'a>, unit: usize },
}

/// Persistent environment keyed by local FQN.
#[derive(Debug, Clone, Default)]
pub struct Env<'a>(Option<Rc<EnvNode<'a>>>);

#[derive(Debug)]
struct EnvNode<'a> {
    fqn: String,
    value: Val<'a>,
    next: Env<'a>,
}

impl<'a> Env<'a> {
    pub fn bind(&self, fqn: &str, value: Val<'a>) -> Env<'a> {
        Env(Some(Rc::new(EnvNode { fqn: fqn.to_string(), value, next: self.clone() })))
    }

    pub fn lookup(&self, fqn: &str) -> Option<Val<'a>> {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if node.fqn == fqn {
                return Some(node.value.clone());
            }
            cur = &node.next.0;
        }
        None
    }
}

impl Val<'_> {
    /// Text printed by `print` and used by `concat`.
    pub fn render(&self, graph: &ScopeGraph) -> String {
        match self {
            Val::Int(n) => n.to_string(),
            Val::Str(s) => s.clone(),
            Val::Unit => "()".into(),
            Val::Thunk(_) => "<thunk>".into(),
            Val::Obj(s) => graph.fqn(*s).to_string(),
            Val::Func(f) => match f.as_ref() {
                Func::Global(s) => format!("<def {}>", graph.fqn(*s)),
                Func::Local { fqn, .. } => format!("<def {fqn}>"),
            },
        }
    }

    pub fn truthy(&self) -> bool {
        !matches!(self, Val::Int(0) | Val::Unit)
    }

    pub fn same(&self, other: &Val<'_>) -> bool {
        match (self, other) {
            (Val::Int(a), Val::Int(b)) => a == b,
            (Val::Str(a), Val::Str(b)) => a == b,
            (Val::Unit, Val::Unit) => true,
            (Val::Obj(a), Val::Obj(b)) => a == b,
            _ => false,
        }
    }

    pub fn to_value(&self, graph: &ScopeGraph) -> Value {
        match self {
            Val::Int(n) => Value::Int(*n),
            Val::Str(s) => Value::Str(s.clone()),
            Val::Unit => Value::Unit,
            Val::Thunk(_) => Value::Thunk,
            Val::Obj(s) => Value::Obj(graph.fqn(*s).to_string()),
            Val::Func(_) => Value::Func(self.render(graph)),
        }
    }
}

/// Owned result value of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Str(String),
    Unit,
    Thunk,
    Obj(String),
    Func(String),
}
