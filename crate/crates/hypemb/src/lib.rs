//! Configuration, verification sweeps and JSON reports on top of
//! `hypemb-core`.

pub mod commands;
pub mod config;
pub mod encode;
pub mod sweeps;
