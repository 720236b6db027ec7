//! Exact computation toolkit for quantum-symmetry spectral problems.
//!
//! The crate is organised around one pipeline: noncrossing combinatorics
//! ([`nc`]) feeds exact rational linear algebra ([`linalg`]), which powers the
//! Gram/Weingarten integration calculus ([`weingarten`]).  Moment sequences
//! produced there are manipulated with free-probability transforms
//! ([`freeprob`]), compared against rooted-graph walk counts ([`graphs`]) and
//! closed-form circle measures ([`ade`]), and cross-checked by randomized
//! matrix models ([`models`]).  The [`verify`] module wires all of this into
//! end-to-end verification suites.
//!
//! Everything that can be exact is exact: arbitrary-precision rationals
//! throughout, fraction-free elimination for matrix inverses, and
//! float-to-rational reconstruction at the few places where eigenvalue
//! routines force a detour through `f64`.

pub mod error;
pub mod rational;

pub mod ade;
pub mod freeprob;
pub mod graphs;
pub mod linalg;
pub mod models;
pub mod nc;
pub mod report;
pub mod verify;
pub mod weingarten;

pub use error::{Error, Result};
pub use rational::Rat;

// Every Rust block in the guide compiles and runs under `cargo test`; the
// book cannot drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/noncrossing.md")]
    pub mod noncrossing {}
    #[doc = include_str!("../../../book/src/gram-weingarten.md")]
    pub mod gram_weingarten {}
    #[doc = include_str!("../../../book/src/free-probability.md")]
    pub mod free_probability {}
    #[doc = include_str!("../../../book/src/graph-spectra.md")]
    pub mod graph_spectra {}
    #[doc = include_str!("../../../book/src/measure-catalog.md")]
    pub mod measure_catalog {}
    #[doc = include_str!("../../../book/src/matrix-models.md")]
    pub mod matrix_models {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
