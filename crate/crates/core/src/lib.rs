//! Translation surfaces with exact coordinates.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod exact;
pub mod sl2;
pub mod geom;
pub mod surface;
pub mod builders;
pub mod triangulation;
pub mod saddle;
pub mod cylinder;
pub mod audit;
