//! Command-line driver. Exit codes: 0 success, 1 semantic diagnostics or
//! divergence, 2 lex/parse/runtime failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::diag::{line_col, Diagnostic};
use crate::interp::Exit;
use crate::pipeline::{PipelineError, Project};
use crate::rewrite::RewriterRegistry;
use crate::scopes::{check_context_consistency, divergence_report, resolution_dump};
use crate::syntax::{dump_ast, pretty_print, SyntaxError};

#[derive(Parser, Debug)]
#[command(name = "ml1", version, about = "Frontend, rewriter and interpreter for .ml1 sources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse each file and print its AST as JSON
    Parse {
        /// Accepted for symmetry; the AST is always dumped
        #[arg(long)]
        dump_ast: bool,
        #[command(flatten)]
        files: Files,
    },
    /// Resolve every reference across the project
    Resolve {
        /// Print references, export closures and diagnostics as JSON
        #[arg(long)]
        dump: bool,
        #[command(flatten)]
        files: Files,
    },
    /// Apply the rewriter in scope of each unit and print the result
    Rewrite {
        /// Follow each unit with its rewrite report as JSON
        #[arg(long)]
        dump: bool,
        #[command(flatten)]
        files: Files,
    },
    /// Rewrite, then run a zero-argument def
    Run {
        /// Fully qualified name of the def to run, e.g. `Main.main`
        #[arg(long)]
        entry: String,
        #[command(flatten)]
        files: Files,
    },
    /// Report units whose ambient implicit for a marker differs
    Lint {
        /// Fully qualified name of the marker trait
        #[arg(long)]
        marker: String,
        #[command(flatten)]
        files: Files,
    },
}

#[derive(Args, Debug)]
struct Files {
    /// Source files; their order fixes symbol numbering
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

type Sources = Vec<(String, String)>;

/// Runs the CLI on `args` (program name first). Returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let files = match &cli.command {
        Command::Parse { files, .. }
        | Command::Resolve { files, .. }
        | Command::Rewrite { files, .. }
        | Command::Run { files, .. }
        | Command::Lint { files, .. } => &files.files,
    };
    let sources = match read_sources(files) {
        Ok(s) => s,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    let mut d = Driver { sources, out, err };
    let result = match cli.command {
        Command::Parse { .. } => d.parse(),
        Command::Resolve { dump, .. } => d.resolve(dump),
        Command::Rewrite { dump, .. } => d.rewrite(dump),
        Command::Run { entry, .. } => d.run(&entry),
        Command::Lint { marker, .. } => d.lint(&marker),
    };
    let _ = d.out.flush();
    result.unwrap_or(2)
}

fn read_sources(files: &[PathBuf]) -> Result<Sources, String> {
    files
        .iter()
        .map(|p| {
            std::fs::read_to_string(p)
                .map(|s| (p.display().to_string(), s))
                .map_err(|e| format!("cannot read {}: {e}", p.display()))
        })
        .collect()
}

struct Driver<'w> {
    sources: Sources,
    out: &'w mut dyn Write,
    err: &'w mut dyn Write,
}

impl Driver<'_> {
    fn location(&self, unit: &str, span: crate::syntax::Span) -> String {
        let src = self.sources.iter().find(|(n, _)| n == unit).map_or("", |(_, s)| s.as_str());
        let (line, col) = line_col(src, span.start);
        format!("{unit}:{line}:{col}")
    }

    fn syntax_error(&mut self, unit: &str, e: &SyntaxError) {
        let loc = self.location(unit, e.span());
        let _ = writeln!(self.err, "error[{}]: {loc}: {e}", e.code());
    }

    fn diagnostics(&mut self, diags: &[Diagnostic]) {
        for d in diags {
            let loc = match (d.unit, d.span) {
                (Some(u), Some(span)) => format!("{}: ", self.location(&self.sources[u].0, span)),
                (Some(u), None) => format!("{}: ", self.sources[u].0),
                _ => String::new(),
            };
            let _ = writeln!(self.err, "error[{}]: {loc}{}", d.code, d.message);
        }
    }

    /// Reports a pipeline failure; returns the exit code for it.
    fn failure(&mut self, e: PipelineError) -> i32 {
        match e {
            PipelineError::Syntax { unit, error } => {
                self.syntax_error(&unit, &error);
                2
            }
            PipelineError::Diagnostics(diags) => {
                self.diagnostics(&diags);
                1
            }
            PipelineError::Run(e) => {
                let _ = writeln!(self.err, "error: {e}");
                2
            }
        }
    }

    fn load(&mut self) -> Result<Project, i32> {
        Project::load(&self.sources).map_err(|e| self.failure(e))
    }

    fn parse(&mut self) -> Option<i32> {
        for i in 0..self.sources.len() {
            let (name, src) = &self.sources[i];
            match crate::syntax::parse_source(src, name) {
                Ok(unit) => writeln!(self.out, "{}", dump_ast(&unit)).ok()?,
                Err(e) => {
                    let name = name.clone();
                    self.syntax_error(&name, &e);
                    return Some(2);
                }
            }
        }
        Some(0)
    }

    fn resolve(&mut self, dump: bool) -> Option<i32> {
        let project = match self.load() {
            Ok(p) => p,
            Err(code) => return Some(code),
        };
        let a = &project.analysis;
        if dump {
            writeln!(self.out, "{}", resolution_dump(&a.graph, &a.resolution, &a.diagnostics)).ok()?;
        } else {
            writeln!(self.out, "resolved {} reference(s) in {} unit(s)", a.resolution.refs.len(), project.units.len())
                .ok()?;
        }
        self.diagnostics(&a.diagnostics);
        Some(if a.is_ok() { 0 } else { 1 })
    }

    fn rewrite(&mut self, dump: bool) -> Option<i32> {
        let project = match self.load().and_then(|p| p.checked().map_err(|e| self.failure(e))) {
            Ok(p) => p,
            Err(code) => return Some(code),
        };
        let (units, reports) = match project.rewrite(&RewriterRegistry::builtin()) {
            Ok(r) => r,
            Err(e) => return Some(self.failure(e)),
        };
        let many = units.len() > 1;
        for (unit, report) in units.iter().zip(&reports) {
            if many {
                writeln!(self.out, "// {}", unit.source_name).ok()?;
            }
            write!(self.out, "{}", pretty_print(unit)).ok()?;
            if dump {
                writeln!(self.out, "{}", serde_json::to_string(report).expect("report serializes")).ok()?;
            }
        }
        Some(0)
    }

    fn run(&mut self, entry: &str) -> Option<i32> {
        let project = match self.load().and_then(|p| p.checked().map_err(|e| self.failure(e))) {
            Ok(p) => p,
            Err(code) => return Some(code),
        };
        let trace = match project.run(&RewriterRegistry::builtin(), entry) {
            Ok(t) => t,
            Err(e) => return Some(self.failure(e)),
        };
        for line in &trace.events {
            writeln!(self.out, "{line}").ok()?;
        }
        match &trace.exit {
            Exit::Normal(_) => Some(0),
            Exit::Failed(e) => {
                let _ = writeln!(self.err, "error: {}", e.message);
                for s in e.all_suppressed() {
                    let _ = writeln!(self.err, "suppressed: {}", s.message);
                }
                Some(2)
            }
        }
    }

    fn lint(&mut self, marker: &str) -> Option<i32> {
        let project = match self.load() {
            Ok(p) => p,
            Err(code) => return Some(code),
        };
        let a = &project.analysis;
        if !a.is_ok() {
            self.diagnostics(&a.diagnostics);
            return Some(2);
        }
        let Some(m) = a.graph.resolve_absolute(marker).filter(|m| a.graph.is_template(*m)) else {
            let _ = writeln!(self.err, "error: marker `{marker}` is not a template");
            return Some(2);
        };
        let lines = divergence_report(&a.graph, m, &check_context_consistency(&a.graph, &project.units, m));
        for line in &lines {
            writeln!(self.out, "{line}").ok()?;
        }
        Some(if lines.is_empty() { 0 } else { 1 })
    }
}
