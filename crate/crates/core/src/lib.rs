#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod comparison;
pub mod cylinder;
pub mod error;
pub mod exec;
pub mod frequency;
pub mod ladder;
pub mod numerics;
pub mod report;

pub use error::{Error, Result};
pub use exec::Exec;
pub use report::{CheckReport, Status};
