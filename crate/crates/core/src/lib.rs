//! Percolation of words on truncated anisotropic long-range lattices.

pub mod kv;
pub mod lattice;
pub mod sampler;
pub mod word;
pub mod growth;
pub mod stats;
pub mod renorm;
pub mod gadget;
pub mod oriented;
pub mod slab;
pub mod harness;
