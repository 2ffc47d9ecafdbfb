//! Compiles the code listings in `book/src` as doc-tests.
//!
//! mdbook cannot run listings against an external crate, so each chapter is
//! pulled in as the docs of an empty module and `cargo test --doc` does the
//! rest. One module per chapter keeps failures traceable to a file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/circuits.md")]
pub mod circuits {}
#[doc = include_str!("../../../book/src/matrices.md")]
pub mod matrices {}
#[doc = include_str!("../../../book/src/search.md")]
pub mod search {}
#[doc = include_str!("../../../book/src/rewrite.md")]
pub mod rewrite {}
#[doc = include_str!("../../../book/src/benchmarks.md")]
pub mod benchmarks {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
