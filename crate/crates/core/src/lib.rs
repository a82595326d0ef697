pub mod analytics;
pub mod error;
pub mod numeric;
pub mod scenario;
pub mod simulator;
pub mod optimizer;
pub mod cli;
