pub mod cli;
pub mod dsl;
pub mod eval;
pub mod export;
pub mod functions;
pub mod library;
pub mod model;
pub mod server;
pub mod tracking;
pub mod whatif;
