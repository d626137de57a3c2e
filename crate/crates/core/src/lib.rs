//! Numerics for self-testing of nonlocal games: game polynomials, quantum
//! strategies, spectral gaps, local dilations, determining pairs, tracial
//! GNS constructions and Gowers–Hatami stability bounds.

pub mod algebras;
pub mod builtins;
pub mod config;
pub mod error;
pub mod games;
pub mod gowers_hatami;
pub mod io;
pub mod linalg;
pub mod selftest;
pub mod strategies;

pub use config::Config;
pub use error::{Error, Result};
