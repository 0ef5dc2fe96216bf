//! Parse, infer, insert casts and evaluate in one go.

use thiserror::Error;

use crate::cast::{insert_casts, CastInsertError, Translation};
use crate::eval::{EvalResult, Evaluator, Mode, RunOptions, StuckError};
use crate::frontend::{parse_itgl_with, Note, ParseError, ParseOptions};
use crate::infer::{infer_principal, InferError, Inference};
use crate::itgl::TermItgl;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("type error: {0}")]
    Infer(#[from] InferError),
    #[error("cast insertion failed: {0}")]
    Cast(#[from] CastInsertError),
    #[error("evaluation failed: {0}")]
    Eval(#[from] StuckError),
}

/// A surface program together with everything derived from it statically.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub source: TermItgl,
    pub inference: Inference,
    pub translation: Translation,
    pub notes: Vec<Note>,
}

pub fn compile(src: &str) -> Result<Compiled, PipelineError> {
    let (source, notes) = parse_itgl_with(src, ParseOptions::default())?;
    let mut c = compile_term(&source)?;
    c.notes = notes;
    Ok(c)
}

pub fn compile_term(e: &TermItgl) -> Result<Compiled, PipelineError> {
    let inference = infer_principal(&[], e)?;
    let translation = insert_casts(&[], &inference.term)?;
    Ok(Compiled { source: e.clone(), inference, translation, notes: Vec::new() })
}

/// Compiles and evaluates a closed surface program.
pub fn run_source(src: &str, mode: Mode, opts: RunOptions) -> Result<(Compiled, EvalResult), PipelineError> {
    let c = compile(src)?;
    let r = Evaluator::new(mode).run(&c.translation.term, opts)?;
    Ok((c, r))
}
