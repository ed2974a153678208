pub mod corpus;
pub mod dialogue;
pub mod epistemology;
pub mod kripke;
pub mod prove;
pub mod reduce;
pub mod syntax;
