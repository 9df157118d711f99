pub mod calculus;
pub mod cli;
pub mod exact;
pub mod expr;
pub mod function;
pub mod gap;
pub mod measure;
pub mod models;
pub mod poly;
pub mod region;
pub mod sampling;
pub mod spectrum;
mod syntax;
pub mod tail;
pub mod vector;
