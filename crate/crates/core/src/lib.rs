#![no_std]

extern crate alloc;

pub mod affine;
pub mod anf;
pub mod bits;
pub mod cbreak;
pub mod condense;
pub mod daext;
pub mod dimexp;
pub mod dist;
pub mod error;
pub mod field;
pub mod injector;
pub mod lbp;
pub mod matrix;
pub mod snmext;
pub mod subspace;
pub mod verify;
pub mod xprims;

pub use affine::AffineSource;
pub use bits::BitVec;
pub use dist::ExactDist;
pub use error::{Error, Result};
pub use matrix::GF2Matrix;
