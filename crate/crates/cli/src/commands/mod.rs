pub mod ablate;
pub mod build;
pub mod report;
pub mod score;
pub mod sweep;
