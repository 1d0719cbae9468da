pub mod cli;
pub mod deps;
pub mod eval;
pub mod model;
pub mod syntax;
pub mod transforms;
pub mod verify;
