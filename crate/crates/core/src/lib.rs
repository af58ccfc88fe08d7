//! Core algebra for computing twisted string bordism at the prime 2.
//!
//! Everything here is `no_std` with `alloc`: linear algebra over F₂, the
//! Milnor basis of the Steenrod algebra and its subalgebras A(n), finite
//! graded modules, the cohomology models used as inputs, minimal
//! resolutions with their Ext charts, and the Adams spectral sequence
//! bookkeeping that turns charts plus differential assertions into
//! bordism groups.

#![no_std]

extern crate alloc;

pub mod adams;
pub mod f2;
pub mod models;
pub mod ext;
pub mod module;
pub mod steenrod;
