pub mod cell;
pub mod chem;
pub mod config;
pub mod engine;
pub mod evolution;
pub mod grn;
pub mod ledger;
pub mod lock;
pub mod nodes;
pub mod physics;
pub mod rng;
