//! Boilerplate detection for large plain-text corpora.
//!
//! Pass 1 counts the normalized lines found near the start and end of every
//! file; pass 2 treats lines seen at least `K` times as boilerplate and cuts
//! each file where the run of frequent lines gives out.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod counters;
pub mod detector;
pub mod pipeline;
pub mod preprocess;
