//! The whole-project pipeline: parse, resolve, erase, rewrite, run.

use thiserror::Error;

use crate::diag::Diagnostic;
use crate::interp::{self, RunError, Trace};
use crate::rewrite::{apply_rewriter, bind_rewriter, RewriteReport, RewriterRegistry};
use crate::scopes::{analyze, erase_import_annotations, Analysis};
use crate::syntax::{parse_source, CompilationUnit, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("{unit}: {error}")]
    Syntax { unit: String, error: SyntaxError },
    #[error("{} diagnostic(s)", .0.len())]
    Diagnostics(Vec<Diagnostic>),
    #[error(transparent)]
    Run(#[from] RunError),
}

/// Parses `(name, source)` pairs in order; the first error aborts.
pub fn parse_all<S: AsRef<str>, T: AsRef<str>>(sources: &[(S, T)]) -> Result<Vec<CompilationUnit>, PipelineError> {
    sources
        .iter()
        .map(|(name, src)| {
            parse_source(src.as_ref(), name.as_ref())
                .map_err(|error| PipelineError::Syntax { unit: name.as_ref().to_string(), error })
        })
        .collect()
}

/// Parsed and resolved project.
#[derive(Debug)]
pub struct Project {
    pub units: Vec<CompilationUnit>,
    pub analysis: Analysis,
}

impl Project {
    pub fn load<S: AsRef<str>, T: AsRef<str>>(sources: &[(S, T)]) -> Result<Project, PipelineError> {
        let units = parse_all(sources)?;
        let analysis = analyze(&units);
        Ok(Project { units, analysis })
    }

    /// Fails with the project's diagnostics, if any.
    pub fn checked(self) -> Result<Project, PipelineError> {
        if self.analysis.is_ok() {
            Ok(self)
        } else {
            Err(PipelineError::Diagnostics(self.analysis.diagnostics))
        }
    }

    /// Erases import annotations, then binds and applies each unit's rewriter.
    pub fn rewrite(
        &self,
        registry: &RewriterRegistry,
    ) -> Result<(Vec<CompilationUnit>, Vec<RewriteReport>), PipelineError> {
        let erased = erase_import_annotations(&self.units);
        let mut units = Vec::with_capacity(erased.len());
        let mut reports = Vec::with_capacity(erased.len());
        let mut diags = Vec::new();
        for (i, unit) in erased.iter().enumerate() {
            let result = bind_rewriter(&self.analysis.graph, &self.analysis.resolution, &self.units, i, registry)
                .and_then(|r| apply_rewriter(&r, unit, i, registry));
            match result {
                Ok((u, report)) => {
                    units.push(u);
                    reports.push(report);
                }
                Err(d) => diags.push(d),
            }
        }
        if diags.is_empty() {
            Ok((units, reports))
        } else {
            Err(PipelineError::Diagnostics(diags))
        }
    }

    pub fn run(&self, registry: &RewriterRegistry, entry: &str) -> Result<Trace, PipelineError> {
        let (units, _) = self.rewrite(registry)?;
        Ok(interp::run(&units, &self.analysis.graph, &self.analysis.resolution, entry)?)
    }
}

/// Parse, resolve, rewrite with the shipped rewriters, and run `entry`.
pub fn run_sources<S: AsRef<str>, T: AsRef<str>>(sources: &[(S, T)], entry: &str) -> Result<Trace, PipelineError> {
    Project::load(sources)?.checked()?.run(&RewriterRegistry::builtin(), entry)
}
