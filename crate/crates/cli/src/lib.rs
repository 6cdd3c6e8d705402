//! Command line and HTTP front ends for the planforge pipeline.

pub mod http;
pub mod ops;
pub mod service;
