//! Tensor-train surrogates for option pricing.
//!
//! The crate learns a price surface from a black-box pricer with TT-cross
//! ([`cross`]), evaluates it off-grid either through Gaussian-process
//! inference with an analytic Laplacian-kernel train ([`kernel`]) or through
//! its large length-scale limit, TT-native multilinear interpolation
//! ([`interp`]), and compares the result against dense GP regression
//! ([`gpr`]) and direct pricing ([`market`]).
//!
//! ```
//! use tensor_surrogate::tt::TensorTrain;
//!
//! let u = TensorTrain::from_factors(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
//! assert_eq!(u.eval(&[1, 0]).unwrap(), 6.0);
//! ```

pub mod cross;
pub mod error;
pub mod gpr;
pub mod interp;
pub mod kernel;
pub mod market;
pub mod pipeline;
pub mod tt;

pub use error::{Error, Result};
