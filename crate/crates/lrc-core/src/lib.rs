//! Locally repairable codes built from rank-metric precoding.
//!
//! The pipeline encodes a file in two stages: a Gabidulin (maximum rank
//! distance) code over `F_{q^m}` first, then an `F_q`-linear MDS array code
//! inside each local group of storage nodes. Single-node failures are fixed
//! from at most `r` nodes of the same group; larger failures fall back to a
//! global reconstruction that treats every surviving symbol, parity or not,
//! as an evaluation of one linearized polynomial.
//!
//! Modules follow the pipeline: [`gf`] (field tower), [`linpoly`]
//! (linearized-polynomial evaluation and interpolation), [`gabidulin`]
//! (MRD encode/decode), [`mds`] (per-group array layer), [`lrc`] (the
//! composed code, parameter derivation, bounds), and [`verify`]
//! (brute-force distance oracles and worst-case pattern generation).

pub mod error;
pub mod gabidulin;
pub mod gf;
pub mod linpoly;
pub mod lrc;
pub mod mds;
pub mod verify;

pub use error::{Error, Result};
pub use gabidulin::GabidulinCode;
pub use gf::{BaseElem, BaseParams, ExtParams, FieldElem};
pub use linpoly::LinearizedPoly;
pub use lrc::{CodeParams, Codeword, ErasurePattern, LrcCode, OptimalityCase};
pub use mds::{MdsLayer, NodeBlock};
