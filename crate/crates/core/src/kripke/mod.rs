//! Finite S5 Kripke models, context environments, the satisfaction
//! relation for relativized formulas, and bounded model enumeration.

mod enumerate;
mod env;
mod eval;
mod model;
mod worldset;

pub use enumerate::{
    enumerate_models, enumerate_models_with, find_countermodel, find_countermodel_with,
    model_count, search_vocabulary, EnumError, ModelIter, Pointed, SearchError, DEFAULT_CEILING,
};
pub use env::{ContextEnv, EnvError, Resolved};
pub use eval::{eval_context, satisfies, EvalError};
pub use model::{check_model, CompiledModel, KripkeModel, Violation};
pub use worldset::WorldSet;
