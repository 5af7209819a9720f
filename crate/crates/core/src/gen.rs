//! Seeded random GBS graphs and words for oracle comparisons.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::britton::cyclic_form;
use crate::gog::{EdgeId, EdgeSpec, GFactorization, GbsGraph, VertexId};

/// Size limits for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub max_vertices: usize,
    pub max_edge_pairs: usize,
    /// Bound on `|α|`, `|β|`.
    pub max_label: i64,
    /// Bound on the number of edge letters.
    pub max_len: usize,
    /// Bound on `|k_i|`.
    pub max_exp: i64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self { max_vertices: 4, max_edge_pairs: 6, max_label: 5, max_len: 14, max_exp: 8 }
    }
}

const WALK_ATTEMPTS: usize = 10_000;
const HYPERBOLIC_ATTEMPTS: usize = 100;

pub fn vertex_name(i: usize) -> String {
    if i < 26 {
        char::from(b'a' + i as u8).to_string()
    } else {
        format!("v{i}")
    }
}

fn nonzero<R: Rng>(rng: &mut R, bound: i64) -> i64 {
    let bound = bound.max(1);
    let k = rng.gen_range(1..=bound);
    if rng.gen_bool(0.5) {
        k
    } else {
        -k
    }
}

/// A connected graph: a random spanning tree plus extra edge pairs.
pub fn random_graph<R: Rng>(rng: &mut R, params: &GenParams) -> GbsGraph {
    let nv = rng.gen_range(1..=params.max_vertices.max(1));
    let min_pairs = (nv - 1).max(1);
    let pairs = rng.gen_range(min_pairs..=params.max_edge_pairs.max(min_pairs));
    let mut ends = Vec::with_capacity(pairs);
    for i in 1..nv {
        ends.push((rng.gen_range(0..i), i));
    }
    while ends.len() < pairs {
        ends.push((rng.gen_range(0..nv), rng.gen_range(0..nv)));
    }
    ends.shuffle(rng);
    let mut edges = Vec::with_capacity(2 * pairs);
    for (k, (s, t)) in ends.into_iter().enumerate() {
        let (s, t) = if rng.gen_bool(0.5) { (s, t) } else { (t, s) };
        let alpha = BigInt::from(nonzero(rng, params.max_label));
        let beta = BigInt::from(nonzero(rng, params.max_label));
        let (y, yb) = (format!("e{k}"), format!("E{k}"));
        edges.push(EdgeSpec {
            name: y.clone(),
            source: vertex_name(s),
            target: vertex_name(t),
            alpha: alpha.clone(),
            beta: beta.clone(),
            inverse: yb.clone(),
        });
        edges.push(EdgeSpec { name: yb, source: vertex_name(t), target: vertex_name(s), alpha: beta, beta: alpha, inverse: y });
    }
    GbsGraph::new((0..nv).map(vertex_name).collect(), edges).expect("generated graph is well formed")
}

/// An exponent, often a multiple of `β_y` so that reductions can fire.
fn exponent_after<R: Rng>(rng: &mut R, graph: &GbsGraph, e: EdgeId, max_exp: i64) -> BigInt {
    let beta = graph.beta(e);
    if rng.gen_bool(0.5) {
        let b: i64 = beta.try_into().unwrap_or(i64::MAX);
        let b = b.abs();
        if b <= max_exp {
            let t = rng.gen_range(-(max_exp / b)..=max_exp / b);
            return BigInt::from(t * b);
        }
    }
    if rng.gen_bool(0.25) {
        return BigInt::zero();
    }
    BigInt::from(rng.gen_range(-max_exp..=max_exp))
}

/// A random path with `n` edges from `start`, biased toward backtracking.
pub fn random_path<R: Rng>(rng: &mut R, graph: &GbsGraph, start: VertexId, n: usize, max_exp: i64) -> GFactorization {
    let mut at = start;
    let mut steps: Vec<(EdgeId, BigInt)> = Vec::with_capacity(n);
    let k0 = BigInt::from(rng.gen_range(-max_exp..=max_exp));
    for _ in 0..n {
        let e = match steps.last() {
            Some(&(prev, _)) if rng.gen_bool(0.35) => graph.inverse(prev),
            _ => {
                let out: Vec<EdgeId> = graph.out_edges(at).collect();
                *out.choose(rng).expect("connected graphs with an edge have out-edges everywhere")
            }
        };
        at = graph.target(e);
        steps.push((e, exponent_after(rng, graph, e, max_exp)));
    }
    GFactorization { start, k0, steps }
}

/// A closed walk of up to `max_len` edges by rejection sampling.
pub fn random_closed_word<R: Rng>(rng: &mut R, graph: &GbsGraph, params: &GenParams) -> Option<GFactorization> {
    let vertices: Vec<VertexId> = graph.vertex_ids().collect();
    for _ in 0..WALK_ATTEMPTS {
        let start = *vertices.choose(rng)?;
        let n = rng.gen_range(0..=params.max_len);
        let f = random_path(rng, graph, start, n, params.max_exp);
        if f.is_closed(graph) {
            return Some(f);
        }
    }
    None
}

/// `u · y a^{βt} ȳ a^{−αt} · u⁻¹`: trivial by construction.
pub fn random_trivial_word<R: Rng>(rng: &mut R, graph: &GbsGraph, params: &GenParams) -> GFactorization {
    let vertices: Vec<VertexId> = graph.vertex_ids().collect();
    let start = *vertices.choose(rng).expect("graph has vertices");
    let reach = params.max_len.saturating_sub(2) / 2;
    let len = rng.gen_range(0..=reach);
    let mut u = random_path(rng, graph, start, len, params.max_exp);
    // a zero junction exponent keeps merged exponents within bounds
    match u.steps.last_mut() {
        Some((_, k)) => *k = BigInt::zero(),
        None => u.k0 = BigInt::zero(),
    }
    let at = u.end(graph);
    let out: Vec<EdgeId> = graph.out_edges(at).collect();
    let y = *out.choose(rng).expect("out-edge");
    let (alpha, beta) = (graph.alpha(y), graph.beta(y));
    let t = BigInt::from(nonzero(rng, 1));
    let relator = GFactorization {
        start: at,
        k0: BigInt::zero(),
        steps: vec![(y, beta * &t), (graph.inverse(y), -(alpha * &t))],
    };
    u.concat(&relator, graph).and_then(|w| w.concat(&u.invert(graph), graph)).expect("paths line up")
}

/// A closed word; a third of the time trivial by construction.
pub fn random_word<R: Rng>(rng: &mut R, graph: &GbsGraph, params: &GenParams) -> GFactorization {
    if rng.gen_bool(1.0 / 3.0) {
        return random_trivial_word(rng, graph, params);
    }
    random_closed_word(rng, graph, params).unwrap_or_else(|| random_trivial_word(rng, graph, params))
}

/// A path of up to `max_len` edges ending at `end`, for use as a conjugator.
pub fn random_conjugator<R: Rng>(rng: &mut R, graph: &GbsGraph, end: VertexId, max_len: usize, max_exp: i64) -> GFactorization {
    let len = rng.gen_range(0..=max_len);
    random_path(rng, graph, end, len, max_exp).invert(graph)
}

/// A cyclically reduced closed word with at least one edge letter.
pub fn random_hyperbolic<R: Rng>(rng: &mut R, graph: &GbsGraph, params: &GenParams) -> Option<GFactorization> {
    for _ in 0..HYPERBOLIC_ATTEMPTS {
        let w = random_closed_word(rng, graph, params)?;
        let c = cyclic_form(&w, graph).ok()?.word;
        if c.has_edges() {
            return Some(c);
        }
    }
    None
}

/// `BS(p, q)` with `p, q` nonzero and bounded by `max_label`.
pub fn random_bs<R: Rng>(rng: &mut R, max_label: i64) -> GbsGraph {
    let p = nonzero(rng, max_label);
    let q = nonzero(rng, max_label);
    GbsGraph::baumslag_solitar(BigInt::from(p), BigInt::from(q))
}
