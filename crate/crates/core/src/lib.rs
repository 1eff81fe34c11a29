//! Exact-arithmetic certification engine: rational intervals, polynomial and
//! radical-tower algebra, symbolic construction of the profile and fundamental
//! system, Bernstein/interval range bounding, and the certificate pipeline.

pub mod bound;
pub mod build;
pub mod exact;
pub mod expr;
pub mod modp;
pub mod pipeline;
pub mod poly;
pub mod tables;
pub mod tower;
