//! mdbook cannot run snippets that depend on workspace crates, so every
//! chapter is pulled in here as a doc comment and `cargo test --doc`
//! checks its code blocks. One module per chapter keeps failures
//! traceable to a file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/tensor-trains.md")]
pub mod tensor_trains {}

#[doc = include_str!("../../../book/src/kernels.md")]
pub mod kernels {}

#[doc = include_str!("../../../book/src/interpolation.md")]
pub mod interpolation {}

#[doc = include_str!("../../../book/src/cross.md")]
pub mod cross {}

#[doc = include_str!("../../../book/src/pipeline.md")]
pub mod pipeline {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/acceptance.md")]
pub mod acceptance {}
