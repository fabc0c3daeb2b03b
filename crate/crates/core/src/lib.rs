// `!(x > y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod canonical;
pub mod config;
pub mod densities;
pub mod error;
pub mod fusscatalan;
pub mod genfun;
pub mod hausdorff;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod seqcore;
pub mod spectra;

pub use error::{Error, Result};
pub use scalar::{Scalar, ScalarKind, Sequence};
