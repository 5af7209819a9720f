use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use super::graph::{EdgeId, GbsGraph, Symbol, VertexId};
use crate::arith::{bit_size, parse_int};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Letter {
    VertexPower(VertexId, BigInt),
    EdgeLetter(EdgeId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("malformed exponent in `{0}`")]
    MalformedExponent(String),
    #[error("edge letter `{0}` takes no exponent")]
    EdgeExponent(String),
    #[error("letter {position}: path broken, edge does not start where the previous one ends")]
    PathBroken { position: usize },
    #[error("letter {position}: vertex power at the wrong vertex")]
    WrongVertex { position: usize },
    #[error("word is not a closed path at its start vertex")]
    NotClosed,
    #[error("cannot concatenate: first word ends at a different vertex than the second starts")]
    Mismatch,
    #[error("empty graph")]
    EmptyGraph,
}

/// Splits whitespace-separated tokens into letters. `1` denotes the empty word.
pub fn parse_word(text: &str, graph: &GbsGraph) -> Result<Vec<Letter>, WordError> {
    let mut letters = Vec::new();
    for token in text.split_whitespace() {
        if token == "1" {
            continue;
        }
        let (name, exp) = match token.split_once('^') {
            Some((name, exp)) => {
                let exp = parse_int(exp).ok_or_else(|| WordError::MalformedExponent(token.to_string()))?;
                (name, Some(exp))
            }
            None => (token, None),
        };
        match graph.lookup(name) {
            Some(Symbol::Vertex(v)) => letters.push(Letter::VertexPower(v, exp.unwrap_or_else(|| BigInt::from(1)))),
            Some(Symbol::Edge(e)) => {
                if exp.is_some() {
                    return Err(WordError::EdgeExponent(token.to_string()));
                }
                letters.push(Letter::EdgeLetter(e));
            }
            None => return Err(WordError::UnknownId(name.to_string())),
        }
    }
    Ok(letters)
}

/// A word `a₀^{k₀} y₁ a₁^{k₁} ⋯ y_n a_n^{k_n}` whose edges form a path
/// starting at `a₀`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GFactorization {
    pub start: VertexId,
    pub k0: BigInt,
    pub steps: Vec<(EdgeId, BigInt)>,
}

impl GFactorization {
    pub fn power(start: VertexId, k: BigInt) -> Self {
        Self { start, k0: k, steps: Vec::new() }
    }

    pub fn identity(start: VertexId) -> Self {
        Self::power(start, BigInt::zero())
    }

    /// Builds a factorization, checking the path condition.
    pub fn new(graph: &GbsGraph, start: VertexId, k0: BigInt, steps: Vec<(EdgeId, BigInt)>) -> Result<Self, WordError> {
        let mut at = start;
        for (pos, (e, _)) in steps.iter().enumerate() {
            if graph.source(*e) != at {
                return Err(WordError::PathBroken { position: pos + 1 });
            }
            at = graph.target(*e);
        }
        Ok(Self { start, k0, steps })
    }

    /// Number of edge letters.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty() && self.k0.is_zero()
    }

    /// True when the word contains at least one edge letter.
    pub fn has_edges(&self) -> bool {
        !self.steps.is_empty()
    }

    /// Exponent `k_i` for `0 ≤ i ≤ n`.
    pub fn exponent(&self, i: usize) -> &BigInt {
        if i == 0 {
            &self.k0
        } else {
            &self.steps[i - 1].1
        }
    }

    /// Edge `y_i` for `1 ≤ i ≤ n`.
    pub fn edge(&self, i: usize) -> EdgeId {
        self.steps[i - 1].0
    }

    /// Vertex `a_i` carrying exponent `k_i`.
    pub fn vertex_at(&self, i: usize, graph: &GbsGraph) -> VertexId {
        if i == 0 {
            self.start
        } else {
            graph.target(self.edge(i))
        }
    }

    pub fn end(&self, graph: &GbsGraph) -> VertexId {
        self.vertex_at(self.len(), graph)
    }

    pub fn is_closed(&self, graph: &GbsGraph) -> bool {
        self.end(graph) == self.start
    }

    pub fn require_closed(&self, graph: &GbsGraph) -> Result<(), WordError> {
        if self.is_closed(graph) {
            Ok(())
        } else {
            Err(WordError::NotClosed)
        }
    }

    /// Number of tokens in canonical text: edges plus nonzero powers.
    pub fn token_count(&self) -> usize {
        let powers = std::iter::once(&self.k0).chain(self.steps.iter().map(|(_, k)| k));
        self.steps.len() + powers.filter(|k| !k.is_zero()).count()
    }

    /// Total bits over all exponents.
    pub fn bit_size(&self) -> u64 {
        bit_size(&self.k0) + self.steps.iter().map(|(_, k)| bit_size(k)).sum::<u64>()
    }

    pub fn to_letters(&self, graph: &GbsGraph) -> Vec<Letter> {
        let mut out = Vec::new();
        if !self.k0.is_zero() {
            out.push(Letter::VertexPower(self.start, self.k0.clone()));
        }
        for (e, k) in &self.steps {
            out.push(Letter::EdgeLetter(*e));
            if !k.is_zero() {
                out.push(Letter::VertexPower(graph.target(*e), k.clone()));
            }
        }
        out
    }

    /// The formal inverse `a_n^{−k_n} ȳ_n ⋯ ȳ₁ a₀^{−k₀}`.
    pub fn invert(&self, graph: &GbsGraph) -> Self {
        let n = self.len();
        let steps = (1..=n)
            .rev()
            .map(|i| (graph.inverse(self.edge(i)), -self.exponent(i - 1)))
            .collect();
        Self { start: self.end(graph), k0: -self.exponent(n), steps }
    }

    /// Concatenation, merging the powers at the junction.
    pub fn concat(&self, other: &Self, graph: &GbsGraph) -> Result<Self, WordError> {
        if self.end(graph) != other.start {
            return Err(WordError::Mismatch);
        }
        let mut out = self.clone();
        match out.steps.last_mut() {
            Some((_, k)) => *k += &other.k0,
            None => out.k0 += &other.k0,
        }
        out.steps.extend(other.steps.iter().cloned());
        Ok(out)
    }

    /// Cyclic rotation of a closed factorization by `r` edge steps:
    /// `y_{r+1} a^{k_{r+1}} ⋯ y_n a^{k_n + k_0} y_1 ⋯ y_r a^{k_r}`, starting
    /// (and ending) at `a_r`. Equals `u⁻¹ · self · u` for `u` the prefix
    /// through step `r`; in particular `r = 0` moves `k₀` to the end.
    pub fn rotate(&self, r: usize, graph: &GbsGraph) -> Self {
        let n = self.len();
        if n == 0 {
            return self.clone();
        }
        let r = r % n;
        let mut steps: Vec<(EdgeId, BigInt)> = self.steps[r..].to_vec();
        steps.last_mut().expect("nonempty").1 += &self.k0;
        steps.extend(self.steps[..r].iter().cloned());
        Self { start: self.vertex_at(r, graph), k0: BigInt::zero(), steps }
    }

    /// Prefix `a₀^{k₀} y₁ ⋯ y_r a_r^{k_r}`.
    pub fn prefix(&self, r: usize) -> Self {
        Self { start: self.start, k0: self.k0.clone(), steps: self.steps[..r].to_vec() }
    }

    pub fn display<'a>(&'a self, graph: &'a GbsGraph) -> WordDisplay<'a> {
        WordDisplay { word: self, graph }
    }

    pub fn max_abs_exponent(&self) -> BigInt {
        std::iter::once(&self.k0)
            .chain(self.steps.iter().map(|(_, k)| k))
            .map(|k| k.abs())
            .max()
            .unwrap_or_default()
    }
}

pub struct WordDisplay<'a> {
    word: &'a GFactorization,
    graph: &'a GbsGraph,
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = self.word.to_letters(self.graph);
        write_letters(f, &letters, self.graph)
    }
}

fn write_letters(f: &mut fmt::Formatter<'_>, letters: &[Letter], graph: &GbsGraph) -> fmt::Result {
    if letters.is_empty() {
        return write!(f, "1");
    }
    for (i, letter) in letters.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        match letter {
            Letter::VertexPower(v, k) => write!(f, "{}^{}", graph.vertex_name(*v), k)?,
            Letter::EdgeLetter(e) => write!(f, "{}", graph.edge_name(*e))?,
        }
    }
    Ok(())
}

/// Canonical text of a letter sequence, zero powers omitted.
pub fn letters_to_string(letters: &[Letter], graph: &GbsGraph) -> String {
    struct Show<'a>(&'a [Letter], &'a GbsGraph);
    impl fmt::Display for Show<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write_letters(f, self.0, self.1)
        }
    }
    let kept: Vec<Letter> = letters
        .iter()
        .filter(|l| !matches!(l, Letter::VertexPower(_, k) if k.is_zero()))
        .cloned()
        .collect();
    Show(&kept, graph).to_string()
}

/// Normalizes letters into a factorization: merges adjacent powers,
/// inserts zero exponents between edges and checks the path condition.
/// A word without letters starts at the first vertex of the graph.
pub fn to_factorization(letters: &[Letter], graph: &GbsGraph) -> Result<GFactorization, WordError> {
    let start = match letters.first().map(|l| match l {
        Letter::VertexPower(v, _) => *v,
        Letter::EdgeLetter(e) => graph.source(*e),
    }) {
        Some(v) => v,
        None => graph.vertex_ids().next().ok_or(WordError::EmptyGraph)?,
    };
    let mut k0 = BigInt::zero();
    let mut steps: Vec<(EdgeId, BigInt)> = Vec::new();
    let mut at = start;
    for (pos, letter) in letters.iter().enumerate() {
        match letter {
            Letter::VertexPower(v, k) => {
                if *v != at {
                    return Err(WordError::WrongVertex { position: pos + 1 });
                }
                match steps.last_mut() {
                    Some((_, last)) => *last += k,
                    None => k0 += k,
                }
            }
            Letter::EdgeLetter(e) => {
                if graph.source(*e) != at {
                    return Err(WordError::PathBroken { position: pos + 1 });
                }
                steps.push((*e, BigInt::zero()));
                at = graph.target(*e);
            }
        }
    }
    Ok(GFactorization { start, k0, steps })
}

/// Parses text straight to a factorization.
pub fn parse_factorization(text: &str, graph: &GbsGraph) -> Result<GFactorization, WordError> {
    to_factorization(&parse_word(text, graph)?, graph)
}
