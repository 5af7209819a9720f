//! Graphs of infinite cyclic groups: parsing, validation, words and
//! factorizations, spanning trees.

mod graph;
mod tree;
mod word;

pub use graph::{
    orientation, parse_graph, Edge, EdgeId, EdgeSpec, GbsGraph, GraphError, Orientation, Symbol, ValidationReport,
    VertexId, Violation,
};
pub use tree::{rebase, spanning_tree, SpanningTree, TreeError};
pub use word::{letters_to_string, parse_factorization, parse_word, to_factorization, GFactorization, Letter, WordDisplay, WordError};
