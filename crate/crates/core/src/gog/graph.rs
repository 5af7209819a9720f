use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::arith::{parse_int, ArithError, PrimeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub usize);

/// One directed edge `y` together with its labels. The defining relation
/// is `y b^β ȳ = a^α` for `a = ι(y)`, `b = τ(y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub source: VertexId,
    pub target: VertexId,
    pub alpha: BigInt,
    pub beta: BigInt,
    pub inverse: EdgeId,
}

/// Raw edge record before names are resolved.
#[derive(Debug, Clone)]
pub struct EdgeSpec {
    pub name: String,
    pub source: String,
    pub target: String,
    pub alpha: BigInt,
    pub beta: BigInt,
    pub inverse: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    Vertex(VertexId),
    Edge(EdgeId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: duplicate id `{id}`")]
    Duplicate { line: usize, id: String },
    #[error("line {line}: unknown vertex `{id}`")]
    UnknownVertex { line: usize, id: String },
    #[error("line {line}: unknown inverse edge `{id}`")]
    UnknownEdge { line: usize, id: String },
    #[error("invalid graph: {0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A finite graph with edge involution and nonzero labels `α_y`, `β_y`:
/// the presentation of a GBS group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GbsGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    names: HashMap<String, Symbol>,
}

impl GbsGraph {
    /// Builds a graph from named records. Names must be unique across
    /// vertices and edges; structural conditions are left to [`validate`].
    ///
    /// [`validate`]: GbsGraph::validate
    pub fn new(vertices: Vec<String>, edges: Vec<EdgeSpec>) -> Result<Self, GraphError> {
        Self::build(vertices.into_iter().map(|v| (0, v)).collect(), edges.into_iter().map(|e| (0, e)).collect())
    }

    fn build(vertices: Vec<(usize, String)>, edges: Vec<(usize, EdgeSpec)>) -> Result<Self, GraphError> {
        let mut names = HashMap::new();
        for (idx, (line, v)) in vertices.iter().enumerate() {
            if names.insert(v.clone(), Symbol::Vertex(VertexId(idx))).is_some() {
                return Err(GraphError::Duplicate { line: *line, id: v.clone() });
            }
        }
        for (idx, (line, e)) in edges.iter().enumerate() {
            if names.insert(e.name.clone(), Symbol::Edge(EdgeId(idx))).is_some() {
                return Err(GraphError::Duplicate { line: *line, id: e.name.clone() });
            }
        }
        let vertex = |line: usize, id: &str| match names.get(id) {
            Some(Symbol::Vertex(v)) => Ok(*v),
            _ => Err(GraphError::UnknownVertex { line, id: id.to_string() }),
        };
        let mut resolved = Vec::with_capacity(edges.len());
        for (line, e) in &edges {
            let inverse = match names.get(&e.inverse) {
                Some(Symbol::Edge(id)) => *id,
                _ => return Err(GraphError::UnknownEdge { line: *line, id: e.inverse.clone() }),
            };
            resolved.push(Edge {
                name: e.name.clone(),
                source: vertex(*line, &e.source)?,
                target: vertex(*line, &e.target)?,
                alpha: e.alpha.clone(),
                beta: e.beta.clone(),
                inverse,
            });
        }
        Ok(Self {
            vertices: vertices.into_iter().map(|(_, v)| v).collect(),
            edges: resolved,
            names,
        })
    }

    /// `BS(p, q) = ⟨a, y | y a^p y⁻¹ = a^q⟩` as a one-vertex graph.
    pub fn baumslag_solitar(p: BigInt, q: BigInt) -> Self {
        let edge = |name: &str, alpha: &BigInt, beta: &BigInt, inv: &str| EdgeSpec {
            name: name.into(),
            source: "a".into(),
            target: "a".into(),
            alpha: alpha.clone(),
            beta: beta.clone(),
            inverse: inv.into(),
        };
        let edges = vec![edge("y", &q, &p, "Y"), edge("Y", &p, &q, "y")];
        Self::new(vec!["a".into()], edges).expect("BS graph is well formed")
    }

    pub fn parse(text: &str) -> Result<Self, GraphError> {
        parse_graph(text)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0].name
    }

    pub fn source(&self, e: EdgeId) -> VertexId {
        self.edges[e.0].source
    }

    pub fn target(&self, e: EdgeId) -> VertexId {
        self.edges[e.0].target
    }

    pub fn alpha(&self, e: EdgeId) -> &BigInt {
        &self.edges[e.0].alpha
    }

    pub fn beta(&self, e: EdgeId) -> &BigInt {
        &self.edges[e.0].beta
    }

    pub fn inverse(&self, e: EdgeId) -> EdgeId {
        self.edges[e.0].inverse
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.names.get(name).copied()
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        match self.lookup(name) {
            Some(Symbol::Vertex(v)) => Some(v),
            _ => None,
        }
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        match self.lookup(name) {
            Some(Symbol::Edge(e)) => Some(e),
            _ => None,
        }
    }

    /// Edges leaving `v`, in file order.
    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = EdgeId> + '_ {
        self.edge_ids().filter(move |&e| self.source(e) == v)
    }

    /// Vertex with the lexicographically least id.
    pub fn least_vertex(&self) -> Option<VertexId> {
        self.vertex_ids().min_by(|a, b| self.vertex_name(*a).cmp(self.vertex_name(*b)))
    }

    /// `(loop edge y, p, q)` when the graph is `BS(p, q)`: one vertex and one
    /// pair of edges, with `y` the first-listed edge.
    pub fn as_baumslag_solitar(&self) -> Option<(EdgeId, &BigInt, &BigInt)> {
        if self.vertices.len() == 1 && self.edges.len() == 2 {
            let y = EdgeId(0);
            Some((y, self.beta(y), self.alpha(y)))
        } else {
            None
        }
    }

    /// The set of primes dividing some `α_y`, headed by the formal prime −1.
    pub fn prime_set(&self) -> Result<PrimeSet, ArithError> {
        PrimeSet::of_values(self.edges.iter().map(|e| &e.alpha), true)
    }

    /// Checks every structural condition and reports each violation.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.vertices.is_empty() {
            violations.push(Violation::Empty);
        }
        for e in self.edge_ids() {
            let edge = self.edge(e);
            let inv = edge.inverse;
            let name = edge.name.clone();
            if inv == e || self.inverse(inv) != e {
                violations.push(Violation::NotInvolution { edge: name.clone() });
            }
            if self.target(inv) != edge.source {
                violations.push(Violation::EndpointMismatch { edge: name.clone() });
            }
            if *self.beta(inv) != edge.alpha {
                violations.push(Violation::LabelMismatch { edge: name.clone() });
            }
            if edge.alpha.is_zero() || edge.beta.is_zero() {
                violations.push(Violation::ZeroLabel { edge: name });
            }
        }
        if let Some(root) = self.vertex_ids().next() {
            let reached = self.reachable(root);
            let unreached: Vec<String> = self
                .vertex_ids()
                .filter(|v| !reached[v.0])
                .map(|v| self.vertex_name(v).to_string())
                .collect();
            if !unreached.is_empty() {
                violations.push(Violation::Disconnected { unreached });
            }
        }
        ValidationReport { violations }
    }

    /// Consumes the graph, returning it only if it passes [`validate`].
    ///
    /// [`validate`]: GbsGraph::validate
    pub fn validated(self) -> Result<Self, GraphError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(self)
        } else {
            Err(GraphError::Invalid(report))
        }
    }

    fn reachable(&self, root: VertexId) -> Vec<bool> {
        let mut seen = vec![false; self.vertices.len()];
        seen[root.0] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for e in self.edge_ids() {
                // connectivity ignores edge direction
                let (s, t) = (self.source(e), self.target(e));
                for (from, to) in [(s, t), (t, s)] {
                    if from == v && !seen[to.0] {
                        seen[to.0] = true;
                        queue.push_back(to);
                    }
                }
            }
        }
        seen
    }

    /// Explicit `vertex`/`edge` text form, parseable by [`parse_graph`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            out.push_str(&format!("vertex {v}\n"));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "edge {} {} {} {} {} {}\n",
                e.name,
                self.vertices[e.source.0],
                self.vertices[e.target.0],
                e.alpha,
                e.beta,
                self.edges[e.inverse.0].name
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Empty,
    NotInvolution { edge: String },
    EndpointMismatch { edge: String },
    LabelMismatch { edge: String },
    ZeroLabel { edge: String },
    Disconnected { unreached: Vec<String> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "graph has no vertices"),
            Violation::NotInvolution { edge } => {
                write!(f, "edge {edge}: inverse is not a fixed-point-free involution")
            }
            Violation::EndpointMismatch { edge } => {
                write!(f, "edge {edge}: source differs from the target of its inverse")
            }
            Violation::LabelMismatch { edge } => write!(f, "edge {edge}: alpha differs from beta of its inverse"),
            Violation::ZeroLabel { edge } => write!(f, "edge {edge}: zero label"),
            Violation::Disconnected { unreached } => write!(f, "disconnected: unreachable {}", unreached.join(", ")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", lines.join("; "))
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

/// Parses the line-oriented graph format: either a single `bs <p> <q>` line
/// or `vertex <id>` / `edge <id> <src> <dst> <alpha> <beta> <inv-id>` lines.
/// `#` starts a comment.
pub fn parse_graph(text: &str) -> Result<GbsGraph, GraphError> {
    let mut vertices: Vec<(usize, String)> = Vec::new();
    let mut edges: Vec<(usize, EdgeSpec)> = Vec::new();
    let mut bs: Option<(usize, BigInt, BigInt)> = None;
    let mut content_lines = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        content_lines += 1;
        let syntax = |msg: &str| GraphError::Syntax { line, msg: msg.to_string() };
        let number = |s: &str| parse_int(s).ok_or_else(|| syntax(&format!("malformed integer `{s}`")));
        let ident = |s: &str| {
            if is_ident(s) {
                Ok(s.to_string())
            } else {
                Err(syntax(&format!("malformed identifier `{s}`")))
            }
        };
        match fields[0] {
            "bs" => {
                if fields.len() != 3 {
                    return Err(syntax("expected `bs <p> <q>`"));
                }
                bs = Some((line, number(fields[1])?, number(fields[2])?));
            }
            "vertex" => {
                if fields.len() != 2 {
                    return Err(syntax("expected `vertex <id>`"));
                }
                vertices.push((line, ident(fields[1])?));
            }
            "edge" => {
                if fields.len() != 7 {
                    return Err(syntax("expected `edge <id> <src> <dst> <alpha> <beta> <inv-id>`"));
                }
                edges.push((
                    line,
                    EdgeSpec {
                        name: ident(fields[1])?,
                        source: ident(fields[2])?,
                        target: ident(fields[3])?,
                        alpha: number(fields[4])?,
                        beta: number(fields[5])?,
                        inverse: ident(fields[6])?,
                    },
                ));
            }
            other => return Err(syntax(&format!("unknown directive `{other}`"))),
        }
    }

    if let Some((line, p, q)) = bs {
        if content_lines != 1 {
            return Err(GraphError::Syntax { line, msg: "`bs` must be the only directive".into() });
        }
        return Ok(GbsGraph::baumslag_solitar(p, q));
    }
    GbsGraph::build(vertices, edges)
}

/// One edge from each inverse pair: the one listed first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    /// For every edge, its slot in `D` and whether it is the `D` member
    /// (`+1`) or the inverse of one (`-1`).
    slots: Vec<(usize, i64)>,
    members: Vec<EdgeId>,
}

impl Orientation {
    pub fn members(&self) -> &[EdgeId] {
        &self.members
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.slots[e.0].1 == 1
    }

    pub fn slot(&self, e: EdgeId) -> (usize, i64) {
        self.slots[e.0]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn orientation(graph: &GbsGraph) -> Orientation {
    let mut slots = vec![(usize::MAX, 0); graph.edge_count()];
    let mut members = Vec::new();
    for e in graph.edge_ids() {
        if slots[e.0].1 != 0 {
            continue;
        }
        let inv = graph.inverse(e);
        slots[e.0] = (members.len(), 1);
        if inv != e {
            slots[inv.0] = (members.len(), -1);
        }
        members.push(e);
    }
    Orientation { slots, members }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    const TWO_VERTEX: &str = "\
# amalgam a -- b
vertex a
vertex b
edge t a b 2 3 T
edge T b a 3 2 t
";

    #[test]
    fn bs_header() {
        let g = parse_graph("bs 2 3\n").unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 2);
        let y = g.edge_by_name("y").unwrap();
        assert_eq!((g.alpha(y), g.beta(y)), (&int(3), &int(2)));
        assert_eq!(g.inverse(y), g.edge_by_name("Y").unwrap());
        assert!(g.validate().is_valid());
        let (_, p, q) = g.as_baumslag_solitar().unwrap();
        assert_eq!((p, q), (&int(2), &int(3)));
    }

    #[test]
    fn explicit_two_vertex_file() {
        let g = parse_graph(TWO_VERTEX).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 2));
        assert!(g.validate().is_valid());
        let round = parse_graph(&g.to_text()).unwrap();
        assert_eq!(round, g);
    }

    #[test]
    fn missing_inverse_is_rejected() {
        let text = "vertex a\nedge y a a 1 2 Y\n";
        assert!(matches!(parse_graph(text), Err(GraphError::UnknownEdge { line: 2, .. })));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_graph("vertex a\n\nedge y a a x 2 Y\n").unwrap_err();
        assert!(matches!(err, GraphError::Syntax { line: 3, .. }), "{err}");
        assert!(matches!(parse_graph("vertex a\nvertex a\n"), Err(GraphError::Duplicate { line: 2, .. })));
        assert!(matches!(parse_graph("vertex a\nedge y a b 1 1 y\n"), Err(GraphError::UnknownVertex { .. })));
        assert!(matches!(parse_graph("bs 2 3\nvertex b\n"), Err(GraphError::Syntax { .. })));
        assert!(matches!(parse_graph("bogus\n"), Err(GraphError::Syntax { line: 1, .. })));
    }

    #[test]
    fn validate_reports_each_condition() {
        let disconnected = "vertex a\nvertex b\nedge y a a 1 2 Y\nedge Y a a 2 1 y\nedge z b b 1 1 Z\nedge Z b b 1 1 z\n";
        let r = parse_graph(disconnected).unwrap().validate();
        assert_eq!(r.violations, vec![Violation::Disconnected { unreached: vec!["b".into()] }]);

        let zero = "vertex a\nedge y a a 0 2 Y\nedge Y a a 2 0 y\n";
        let r = parse_graph(zero).unwrap().validate();
        assert!(r.violations.contains(&Violation::ZeroLabel { edge: "y".into() }));

        let self_inverse = "vertex a\nedge y a a 1 1 y\n";
        let r = parse_graph(self_inverse).unwrap().validate();
        assert_eq!(r.violations, vec![Violation::NotInvolution { edge: "y".into() }]);

        let not_involution = "vertex a\nedge x a a 1 1 y\nedge y a a 1 1 z\nedge z a a 1 1 y\n";
        let r = parse_graph(not_involution).unwrap().validate();
        assert!(r.violations.contains(&Violation::NotInvolution { edge: "x".into() }));

        let endpoints = "vertex a\nvertex b\nedge t a b 1 1 T\nedge T a b 1 1 t\n";
        let r = parse_graph(endpoints).unwrap().validate();
        assert!(r.violations.contains(&Violation::EndpointMismatch { edge: "t".into() }));

        let labels = "vertex a\nedge y a a 2 3 Y\nedge Y a a 2 3 y\n";
        let r = parse_graph(labels).unwrap().validate();
        assert_eq!(
            r.violations,
            vec![Violation::LabelMismatch { edge: "y".into() }, Violation::LabelMismatch { edge: "Y".into() }]
        );
        assert!(parse_graph(labels).unwrap().validated().is_err());
    }

    #[test]
    fn orientation_prefers_earlier_edge() {
        let g = parse_graph("bs 2 3").unwrap();
        let d = orientation(&g);
        assert_eq!(d.members(), &[g.edge_by_name("y").unwrap()]);

        let two = "vertex a\nedge y a a 1 1 Y\nedge Y a a 1 1 y\nedge z a a 2 2 Z\nedge Z a a 2 2 z\n";
        let g = parse_graph(two).unwrap();
        let names: Vec<&str> = orientation(&g).members().iter().map(|&e| g.edge_name(e)).collect();
        assert_eq!(names, vec!["y", "z"]);

        let swapped = "vertex a\nedge Y a a 1 1 y\nedge y a a 1 1 Y\n";
        let g = parse_graph(swapped).unwrap();
        let d = orientation(&g);
        assert!(d.contains(g.edge_by_name("Y").unwrap()));
        assert!(!d.contains(g.edge_by_name("y").unwrap()));
    }
}
