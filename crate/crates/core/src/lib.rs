pub mod error;
pub mod grammar;
pub mod trace;
pub mod world;
pub mod oracle;
pub mod bot;
pub mod config;
pub mod dataset;
