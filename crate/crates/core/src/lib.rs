//! Normal 2-coverings of affine groups `V ⋊ H` with `H ≤ ΓL_d(q)`, `d ≤ 3`.
//!
//! The number-theoretic classification for `d = 1` lives in [`gammal1`] and
//! [`affine1`]; [`groupengine`] is an independent brute-force oracle over
//! explicit Cayley tables, and [`matgrp`] handles semilinear matrix groups in
//! dimensions 2 and 3. [`suites`] bundles the verification runs and [`report`]
//! renders their records.

pub mod affine1;
pub mod error;
pub mod ffield;
pub mod gammal1;
pub mod groupengine;
pub mod linalg;
pub mod matgrp;
pub mod numth;
pub mod report;
pub mod suites;
pub mod verdict;

pub use error::{Error, Result};
