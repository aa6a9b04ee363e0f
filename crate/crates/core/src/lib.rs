pub mod cli;
pub mod diag;
pub mod interp;
pub mod pipeline;
pub mod rewrite;
pub mod scopes;
pub mod syntax;
