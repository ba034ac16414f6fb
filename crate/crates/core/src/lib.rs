pub mod error;
pub mod graph;
pub mod pot;
pub mod spectrum;
pub mod assembly;
pub mod scenario;
pub mod recipes;
pub mod search;
pub mod bounds;
