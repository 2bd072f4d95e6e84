//! Coxeter graphs, enumerated groups, and word combinatorics.

pub mod commutation;
mod graph;
mod group;
pub mod type_b;

pub use commutation::{BraidChoice, BraidFactorization};
pub use graph::{build_graph, CoxeterGraph, CoxeterType, GraphOptions};
pub use group::{format_word, parse_word, CoxeterGroup, Element, Gen, Side, DEFAULT_CAPACITY};
