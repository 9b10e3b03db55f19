//! Erasure list decoding of expander codes over GF(2).
//!
//! An expander code `C(G, C0)` labels the edges of a `d`-regular bipartite
//! graph `G` so that the labels around every vertex form a codeword of a short
//! inner code `C0`. This crate builds such codes and decodes them from
//! erasures three ways: an iterative unique decoder, an exhaustive-advice list
//! decoder, and a linear-time list decoder that returns the whole list as an
//! affine space `{L·x + ℓ}`. A dense linear-algebra decoder serves as ground
//! truth for all of them.

pub mod code;
pub mod error;
pub mod gf2;
pub mod graph;
pub mod inner;
pub mod list;
pub mod rational;
pub mod rng;
pub mod spectral;
pub mod unique;

pub use code::{ErasurePattern, ExpanderCode, ListDescription, ReceivedWord};
pub use error::{CodeError, GraphError, ParseError};
pub use gf2::{affine_equal, solve_affine, AffineSpace, BitMatrix, BitVector, RowBasis};
pub use graph::{make_graph, AnyGraph, BipartiteGraph, GraphSpec, RegularGraph};
pub use inner::{make_code, CodeSpec, ErasedWord, LinearCode};
pub use list::{list_decode_fast, list_decode_slow, DecodeFailure, DecodeReport, DecoderParams};
pub use rational::Rational;
pub use rng::SplitMix64;
pub use unique::{unique_decode, UniqueResult};
