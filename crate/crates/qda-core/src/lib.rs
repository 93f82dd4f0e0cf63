#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is how NaN gets rejected; index loops mirror the dense kernels
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]
//! Stable/anti-stable eigenspaces of regular pencils by doubling in
//! Q-standard form, with permutation-based safeguards that keep the iterates
//! bounded.

extern crate alloc;

pub mod densela;
pub mod error;

pub use densela::{ComplexMatrix, Permutation, C64};
pub use error::{Error, Result, Stage};
pub mod init;
pub mod sfq;
pub mod doubling;
pub mod qguard;
pub mod driver;
pub mod eigapp;
pub mod problems;
