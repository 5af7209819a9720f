use std::collections::VecDeque;

use thiserror::Error;

use super::graph::{EdgeId, GbsGraph, VertexId};
use super::word::{to_factorization, GFactorization, Letter, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph has no vertices")]
    Empty,
}

/// A spanning tree stored as parent pointers from a root. Each tree edge is
/// kept in its root-to-leaf direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    root: VertexId,
    parent: Vec<Option<EdgeId>>,
    in_tree: Vec<bool>,
    edges: Vec<EdgeId>,
}

impl SpanningTree {
    pub fn root(&self) -> VertexId {
        self.root
    }

    /// Tree edges in discovery order, one from each selected inverse pair.
    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    /// True if `e` or its inverse was selected.
    pub fn contains(&self, e: EdgeId) -> bool {
        self.in_tree[e.0]
    }

    fn path_to_root(&self, graph: &GbsGraph, mut v: VertexId) -> Vec<EdgeId> {
        let mut path = Vec::new();
        while let Some(e) = self.parent[v.0] {
            path.push(e);
            v = graph.source(e);
        }
        path.reverse();
        path
    }

    /// The unique reduced tree path `T[u, v]`.
    pub fn path(&self, graph: &GbsGraph, u: VertexId, v: VertexId) -> Vec<EdgeId> {
        let pu = self.path_to_root(graph, u);
        let pv = self.path_to_root(graph, v);
        let common = pu.iter().zip(&pv).take_while(|(a, b)| a == b).count();
        let mut out: Vec<EdgeId> = pu[common..].iter().rev().map(|&e| graph.inverse(e)).collect();
        out.extend_from_slice(&pv[common..]);
        out
    }
}

/// Breadth-first spanning tree from the lexicographically least vertex,
/// scanning edges in file order.
pub fn spanning_tree(graph: &GbsGraph) -> Result<SpanningTree, TreeError> {
    let root = graph.least_vertex().ok_or(TreeError::Empty)?;
    let mut seen = vec![false; graph.vertex_count()];
    let mut parent = vec![None; graph.vertex_count()];
    let mut in_tree = vec![false; graph.edge_count()];
    let mut edges = Vec::new();
    seen[root.0] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for e in graph.out_edges(v) {
            let t = graph.target(e);
            if !seen[t.0] {
                seen[t.0] = true;
                parent[t.0] = Some(e);
                in_tree[e.0] = true;
                in_tree[graph.inverse(e).0] = true;
                edges.push(e);
                queue.push_back(t);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(TreeError::Disconnected);
    }
    Ok(SpanningTree { root, parent, in_tree, edges })
}

/// Maps a word read in `π₁(G, T)` to a closed factorization at `base`:
/// `y ↦ T[base, ι(y)] y T[τ(y), base]` and `b^k ↦ T[base, b] b^k T[b, base]`.
pub fn rebase(
    letters: &[Letter],
    graph: &GbsGraph,
    tree: &SpanningTree,
    base: VertexId,
) -> Result<GFactorization, WordError> {
    let mut out = Vec::new();
    let tree_path = |out: &mut Vec<Letter>, u, v| {
        out.extend(tree.path(graph, u, v).into_iter().map(Letter::EdgeLetter));
    };
    for letter in letters {
        match letter {
            Letter::EdgeLetter(e) => {
                tree_path(&mut out, base, graph.source(*e));
                out.push(letter.clone());
                tree_path(&mut out, graph.target(*e), base);
            }
            Letter::VertexPower(b, _) => {
                tree_path(&mut out, base, *b);
                out.push(letter.clone());
                tree_path(&mut out, *b, base);
            }
        }
    }
    if out.is_empty() {
        return Ok(GFactorization::identity(base));
    }
    to_factorization(&out, graph)
}
