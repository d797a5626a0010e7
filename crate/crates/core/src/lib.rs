//! Ordered configuration sets `F(G,k)` of finite groups.
//!
//! The crate builds finite groups from short specifications (`Z4`, `D3`,
//! `S3`, `Z2xZ2`, `table:PATH`), enumerates configuration sets inside direct
//! powers, decides whether they generate, computes the configuration group of
//! `Z_p` by elimination over `GF(p)`, analyzes Cayley graphs with
//! configuration sets as connection sets, and audits the translation map
//! `F(G,k+1) -> F(G-{1},k)`.
//!
//! Frontier expansion and exhaustive pair scans run on rayon when the default
//! `parallel` feature is enabled.

pub mod cayley;
pub mod closure;
pub mod config;
pub mod error;
pub mod group;
pub mod linalg;
mod par;
pub mod punctured;
pub mod report;
pub mod tuple;

pub use error::{Error, Result};
pub use group::{direct_power, group_from_spec, Group};
pub use tuple::Tuple;
