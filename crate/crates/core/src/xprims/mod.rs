//! Extractor building blocks used by the directional extractor pipeline.

pub mod codes;
pub mod ip;
pub mod lsext;
pub mod srext;

pub use codes::LinearCode;
pub use ip::{ip, InnerProduct};
pub use lsext::{lsext, ExtractorProfile, LinearSeededExtractor};
pub use srext::{affine_srext, affine_srext_with, SrStrategy};
