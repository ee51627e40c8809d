//! Directed-homotopy invariants of finite grid models of concurrent programs.

#![allow(clippy::needless_range_loop)]

pub mod act;
pub mod dispace;
pub mod dot;
pub mod fincat;
pub mod groth;
pub mod linalg;
pub mod models;
pub mod natsys;
pub mod report;
pub mod trace;
